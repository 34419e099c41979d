//! Deterministic 1-D and 2-D tensor-product quadrature over intervals and
//! rectangles.
//!
//! Three node rules cover the integrand zoo in this crate: periodic trapezoid
//! (spectrally accurate for the L-periodic directions), Gauss–Legendre (entire
//! integrands with boundary layers in y), and midpoint (whose nodes avoid the
//! lattice-point logarithmic singularities of the background-potential
//! integrands for even node counts).
//!
//! Node evaluation order and the compensated reduction order are fixed
//! (row-major, x fastest), so results are bit-reproducible for a given spec.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    PeriodicTrapezoid,
    GaussLegendre,
    Midpoint,
}

/// Node counts and rules for a 2-D tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nx: usize,
    pub ny: usize,
    pub rule_x: Rule,
    pub rule_y: Rule,
}

impl QuadratureSpec {
    pub fn new(nx: usize, ny: usize, rule_x: Rule, rule_y: Rule) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidInput(format!(
                "node counts must be at least 4, got nx={nx}, ny={ny}"
            )));
        }
        Ok(QuadratureSpec {
            nx,
            ny,
            rule_x,
            rule_y,
        })
    }

    /// Default for fundamental-domain integrands: periodic trapezoid along x,
    /// Gauss–Legendre along y.
    pub fn domain_default() -> Self {
        QuadratureSpec {
            nx: 256,
            ny: 128,
            rule_x: Rule::PeriodicTrapezoid,
            rule_y: Rule::GaussLegendre,
        }
    }

    pub fn doubled(self) -> Self {
        QuadratureSpec {
            nx: self.nx * 2,
            ny: self.ny * 2,
            ..self
        }
    }
}

/// Nodes and weights for one axis on `[a, b]`.
pub fn nodes(rule: Rule, n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1 && b > a, "need n >= 1 and a nonempty interval");
    let h = (b - a) / n as f64;
    match rule {
        // For (b−a)-periodic integrands the left-endpoint rule IS the
        // trapezoid rule; nodes stay strictly inside [a, b).
        Rule::PeriodicTrapezoid => (0..n).map(|i| (a + i as f64 * h, h)).collect(),
        Rule::Midpoint => (0..n).map(|i| (a + (i as f64 + 0.5) * h, h)).collect(),
        Rule::GaussLegendre => gauss_legendre(n)
            .into_iter()
            .map(|(x, w)| (0.5 * (b + a) + 0.5 * (b - a) * x, 0.5 * (b - a) * w))
            .collect(),
    }
}

/// Gauss–Legendre nodes/weights on [−1, 1] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for k in 0..m {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[k] = (-x, w);
        out[n - 1 - k] = (x, w);
    }
    out
}

/// Compensated (Kahan) accumulator; the componentwise algorithm carries over
/// to complex values unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: Complex64,
    carry: Complex64,
}

impl Kahan {
    pub fn add(&mut self, term: Complex64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(self) -> Complex64 {
        self.sum
    }
}

/// 1-D quadrature of a complex-valued integrand.
pub fn integrate_interval<F>(f: F, range: (f64, f64), n: usize, rule: Rule) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut acc = Kahan::default();
    for (x, w) in nodes(rule, n, range.0, range.1) {
        let v = f(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteSample { x, y: f64::NAN });
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// 2-D tensor-product quadrature over `x_range × y_range`.
pub fn integrate_rect<F>(
    f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let xs = nodes(spec.rule_x, spec.nx, x_range.0, x_range.1);
    let ys = nodes(spec.rule_y, spec.ny, y_range.0, y_range.1);
    let mut acc = Kahan::default();
    for &(y, wy) in &ys {
        for &(x, wx) in &xs {
            let v = f(x, y);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample { x, y });
            }
            acc.add(wx * wy * v);
        }
    }
    Ok(acc.value())
}

/// Outcome of [`refine_until`].
#[derive(Debug, Clone, Copy)]
pub struct Refined {
    pub value: Complex64,
    /// Relative change between the last two estimates.
    pub delta: f64,
    /// False when the doubling budget ran out before reaching the tolerance;
    /// the caller decides how severe that is.
    pub converged: bool,
}

/// Doubles the resolution of an estimate until two successive values agree to
/// `tol` relative, or `max_doublings` is exhausted. `estimate(k)` must
/// evaluate with all node counts scaled by `2^k`.
pub fn refine_until<F>(mut estimate: F, tol: f64, max_doublings: u32) -> Result<Refined>
where
    F: FnMut(u32) -> Result<Complex64>,
{
    assert!(tol > 0.0, "tolerance must be positive");
    let mut prev = estimate(0)?;
    let mut delta = 0.0;
    for k in 1..=max_doublings {
        let next = estimate(k)?;
        delta = (next - prev).norm() / next.norm().max(prev.norm()).max(1.0e-30);
        prev = next;
        if delta < tol {
            return Ok(Refined {
                value: next,
                delta,
                converged: true,
            });
        }
    }
    Ok(Refined {
        value: prev,
        delta,
        converged: max_doublings == 0,
    })
}
