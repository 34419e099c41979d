//! Small dense complex linear algebra: just enough for the determinant
//! identities and correlation determinants, whose matrices never exceed a few
//! dozen rows.

use num_complex::Complex64;

/// Determinant by partially pivoted Gaussian elimination. `a` is row-major
/// `n × n` and is consumed.
pub fn determinant(n: usize, a: &mut [Complex64]) -> Complex64 {
    assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].norm();
        for row in col + 1..n {
            let mag = a[row * n + col].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let diag = a[col * n + col];
        det *= diag;
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let sub = factor * a[col * n + k];
                a[row * n + k] -= sub;
            }
        }
    }
    det
}
