//! Orthogonality of the row functions `M_j` over the fundamental domain:
//! closed-form x-integral weights `m_j(y)`, closed-form double-integral norms
//! `h_j`, and quadrature verifiers for both.
//!
//! The double integrals carry the Gaussian weight `e^{−2π𝒩y²/(LW)}`:
//!
//! ```text
//! ∫_0^L dx ∫_0^W dy e^{−2π𝒩y²/(LW)} conj(M_j(x+iy)) M_k(x+iy) = h_j δ_jk.
//! ```

use crate::error::Result;
use crate::quadrature::{self, Kahan, QuadratureSpec, Rule};
use crate::root_system::{m_function, DomainGeometry, Letter, RootSystemSpec};
use crate::theta::{self, ThetaIndex};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Closed-form norms `h_j` for one family/geometry pair. For `τ = iW/L`
/// these are positive reals.
#[derive(Debug, Clone)]
pub struct NormTable {
    pub spec: RootSystemSpec,
    pub geom: DomainGeometry,
    pub h: Vec<f64>,
}

/// Coefficient multiplying `LW/√(2𝒩 Im τ)` in `h_j`: 1 for A, 2 for the
/// C-letter families, 4 on the doubled rows (j=1 for the B letter, j∈{1,N}
/// for D) and 2 otherwise.
fn norm_coefficient(spec: RootSystemSpec, j: usize) -> f64 {
    let n = spec.n_particles();
    match spec.family().letter() {
        Letter::A => 1.0,
        Letter::C => 2.0,
        Letter::B => {
            if j == 1 {
                4.0
            } else {
                2.0
            }
        }
        Letter::D => {
            if j == 1 || j == n {
                4.0
            } else {
                2.0
            }
        }
    }
}

/// `h_j = coef · LW/√(2𝒩 Imτ) · e^{−2τπi J(j)²/𝒩}`; the exponential equals
/// `e^{2π(W/L)J(j)²/𝒩}` for `τ = iW/L`.
pub fn h_norm(spec: RootSystemSpec, geom: DomainGeometry, j: usize) -> f64 {
    let nn = spec.script_n() as f64;
    let jj = spec.offset_j(j);
    let base = geom.area() / (2.0 * nn * geom.aspect()).sqrt();
    norm_coefficient(spec, j) * base * (2.0 * PI * geom.aspect() * jj * jj / nn).exp()
}

pub fn h_norm_table(spec: RootSystemSpec, geom: DomainGeometry) -> NormTable {
    let h = (1..=spec.n_particles())
        .map(|j| h_norm(spec, geom, j))
        .collect();
    NormTable { spec, geom, h }
}

/// Closed-form x-integral weight `m_j(y)` in
/// `∫_0^L conj(M_j(x+iy)) M_k(x+iy) dx = m_j(y) δ_jk`.
pub fn m_weight_y(spec: RootSystemSpec, geom: DomainGeometry, j: usize, y: f64) -> Complex64 {
    let n = spec.n_particles();
    let nn = spec.script_n() as f64;
    let l = geom.length();
    let tau = geom.tau();
    let tau2n = tau.scale(2.0 * nn);
    let jj = spec.offset_j(j);
    let th2 = |v: Complex64| theta::eval(ThetaIndex::Two, v, tau2n);
    let arg_plus = 2.0 * (jj * tau.get() + Complex64::new(0.0, nn * y / l));
    let arg_minus = 2.0 * (jj * tau.get() - Complex64::new(0.0, nn * y / l));
    let e_plus = (4.0 * PI * jj * y / l).exp();
    let e_minus = (-4.0 * PI * jj * y / l).exp();
    let letter = spec.family().letter();
    // Rows built from a single theta term (A always; the J=0 rows of the B
    // letter and D, where M_j collapses to 2ϑ; the σ=1/2 top row of D).
    match letter {
        Letter::A => l * e_minus * th2(arg_plus),
        Letter::B if j == 1 => 4.0 * l * th2(arg_plus),
        Letter::D if j == 1 => 4.0 * l * th2(arg_plus),
        Letter::D if j == n => 2.0 * l * (e_plus * th2(arg_minus) + e_minus * th2(arg_plus)),
        _ => l * (e_plus * th2(arg_minus) + e_minus * th2(arg_plus)),
    }
}

/// Residual of the x-orthogonality relation at height `y`, normalized by
/// `|m_j(y)|`. Uses the periodic trapezoid rule along x.
pub fn verify_x_orthogonality(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    j: usize,
    k: usize,
    y: f64,
    nx: usize,
) -> Result<f64> {
    let integral = quadrature::integrate_interval(
        |x| {
            let z = Complex64::new(x, y);
            m_function(spec, geom, j, z).conj() * m_function(spec, geom, k, z)
        },
        (0.0, geom.length()),
        nx,
        Rule::PeriodicTrapezoid,
    )?;
    let m = m_weight_y(spec, geom, j, y);
    let expected = if j == k {
        m
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok((integral - expected).norm() / m.norm().max(1.0e-30))
}

/// Gaussian weight of the double-integral orthogonality.
pub fn gaussian_weight(spec: RootSystemSpec, geom: DomainGeometry, y: f64) -> f64 {
    (-2.0 * PI * spec.script_n() as f64 * y * y / geom.area()).exp()
}

/// Residual of the weighted double-integral orthogonality for a single
/// `(j,k)` pair, normalized by `√(h_j h_k)`. Refined by node doubling to
/// 1e−10 relative (up to 4 doublings).
pub fn verify_z_orthogonality(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    j: usize,
    k: usize,
) -> Result<f64> {
    let estimate = |level: u32| {
        let qspec = QuadratureSpec::new(
            128 << level,
            64 << level,
            Rule::PeriodicTrapezoid,
            Rule::GaussLegendre,
        )
        .expect("valid node counts");
        quadrature::integrate_rect(
            |x, y| {
                let z = Complex64::new(x, y);
                gaussian_weight(spec, geom, y)
                    * m_function(spec, geom, j, z).conj()
                    * m_function(spec, geom, k, z)
            },
            (0.0, geom.length()),
            (0.0, geom.width()),
            &qspec,
        )
    };
    let refined = quadrature::refine_until(estimate, 1e-10, 4)?;
    let expected = if j == k {
        Complex64::new(h_norm(spec, geom, j), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let scale = (h_norm(spec, geom, j) * h_norm(spec, geom, k)).sqrt();
    Ok((refined.value - expected).norm() / scale.max(1.0e-30))
}

/// Full Gram matrix `G_jk = ∫∫ e^{−2π𝒩y²/(LW)} conj(M_j) M_k` on a tensor
/// grid, evaluating each row function once per node.
pub fn gram_matrix(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    qspec: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    let n = spec.n_particles();
    let xs = quadrature::nodes(qspec.rule_x, qspec.nx, 0.0, geom.length());
    let ys = quadrature::nodes(qspec.rule_y, qspec.ny, 0.0, geom.width());
    let mut acc = vec![Kahan::default(); n * n];
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for &(y, wy) in &ys {
        let weight = gaussian_weight(spec, geom, y);
        for &(x, wx) in &xs {
            let z = Complex64::new(x, y);
            for (jj, slot) in row.iter_mut().enumerate() {
                *slot = m_function(spec, geom, jj + 1, z);
            }
            let w = wx * wy * weight;
            for j in 0..n {
                for k in 0..n {
                    acc[j * n + k].add(w * row[j].conj() * row[k]);
                }
            }
        }
    }
    Ok(acc.into_iter().map(Kahan::value).collect())
}

/// Largest entrywise deviation of the Gram matrix from `diag(h_j)`:
/// diagonal entries relative to `h_j`, off-diagonal ones scaled by
/// `√(h_j h_k)`.
pub fn gram_max_residual(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    let n = spec.n_particles();
    let gram = gram_matrix(spec, geom, qspec)?;
    let table = h_norm_table(spec, geom);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let scale = (table.h[j] * table.h[k]).sqrt();
            let expected = if j == k {
                Complex64::new(table.h[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((gram[j * n + k] - expected).norm() / scale);
        }
    }
    Ok(worst)
}

/// Residual of the proof's intermediate identity
/// `h_j = ∫_0^W e^{−2π𝒩y²/(LW)} m_j(y) dy`.
pub fn h_from_m_residual(spec: RootSystemSpec, geom: DomainGeometry, j: usize) -> Result<f64> {
    let integral = quadrature::integrate_interval(
        |y| gaussian_weight(spec, geom, y) * m_weight_y(spec, geom, j, y),
        (0.0, geom.width()),
        256,
        Rule::GaussLegendre,
    )?;
    let h = h_norm(spec, geom, j);
    Ok((integral - h).norm() / h)
}
