//! Doubly periodic N-point weights, their partition functions and densities,
//! and the projection correlation kernels with their determinant identities.
//!
//! The weight attached to a configuration `z = (z_1..z_N)` is
//! `Q(z) = |C(z) W(z/L;τ)|²` with the Gaussian-and-theta prefactor `C`;
//! every `Q` is invariant under the lattice shifts `z_m → z_m + L` and
//! `z_m → z_m + iW`. The kernel
//!
//! ```text
//! K(z,z′) = e^{−π𝒩(y²+y′²)/(LW)} Σ_{n=1}^N M_n(z) conj(M_n(z′)) / h_n
//! ```
//!
//! is the orthonormal projection onto the span of the weighted row functions,
//! and `det[K(z_j,z_k)]` reproduces `N! Q(z)/Z`.

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::orthogonality::{h_norm_table, NormTable};
use crate::quadrature::{self, QuadratureSpec};
use crate::root_system::{
    m_function, macdonald_denominator, DomainGeometry, Family, RootSystemSpec,
};
use crate::theta::{self, ModularTau, ThetaIndex};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const RESIDUAL_FLOOR: f64 = 1.0e-30;

/// An ordered N-point configuration, canonically wrapped into the fundamental
/// rectangle at construction. Wrapping never changes a weight value.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<Complex64>,
    geom: DomainGeometry,
}

impl Configuration {
    pub fn new(points: Vec<Complex64>, geom: DomainGeometry) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("configuration needs points".into()));
        }
        if points
            .iter()
            .any(|p| !p.re.is_finite() || !p.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "configuration points must be finite".into(),
            ));
        }
        let wrapped = points
            .into_iter()
            .map(|p| {
                Complex64::new(
                    p.re.rem_euclid(geom.length()),
                    p.im.rem_euclid(geom.width()),
                )
            })
            .collect();
        Ok(Configuration {
            points: wrapped,
            geom,
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn geom(&self) -> DomainGeometry {
        self.geom
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parity-dependent constants of one family/size pair: the theta label
/// `s(N)` (0 even / 3 odd), its companion `s̃(N)` (0 even / 1 odd), and the
/// signs picked up by `q = C·W` under the two elementary shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityConstants {
    pub s: ThetaIndex,
    pub s_tilde: ThetaIndex,
    pub sgn_l: f64,
    pub sgn_iw: f64,
}

pub fn parity_constants(spec: RootSystemSpec) -> ParityConstants {
    let n_even = spec.n_particles().is_multiple_of(2);
    let s = if n_even {
        ThetaIndex::Zero
    } else {
        ThetaIndex::Three
    };
    let s_tilde = if n_even {
        ThetaIndex::Zero
    } else {
        ThetaIndex::One
    };
    let sgn_l = match spec.family() {
        Family::A => {
            if n_even {
                -1.0
            } else {
                1.0
            }
        }
        Family::Bv | Family::C | Family::D => 1.0,
        Family::B | Family::Cv | Family::BC => -1.0,
    };
    let sgn_iw = match spec.family() {
        Family::B | Family::Bv => -1.0,
        _ => 1.0,
    };
    ParityConstants {
        s,
        s_tilde,
        sgn_l,
        sgn_iw,
    }
}

/// Prefactor `C(z)`: the Gaussian `e^{−π𝒩 Σ y_j²/(LW)}`, carrying for the A
/// family the extra factor `ϑ_{s(N)}(Σ z_k/L; τ)`.
pub fn weight_c_at(spec: RootSystemSpec, geom: DomainGeometry, points: &[Complex64]) -> Complex64 {
    let nn = spec.script_n() as f64;
    let sum_y2: f64 = points.iter().map(|p| p.im * p.im).sum();
    let gauss = (-PI * nn * sum_y2 / geom.area()).exp();
    match spec.family() {
        Family::A => {
            let total: Complex64 = points.iter().sum::<Complex64>() / geom.length();
            gauss * theta::eval(parity_constants(spec).s, total, geom.tau())
        }
        _ => Complex64::new(gauss, 0.0),
    }
}

pub fn weight_c(spec: RootSystemSpec, config: &Configuration) -> Complex64 {
    weight_c_at(spec, config.geom(), config.points())
}

/// `q(z) = C(z) W(z/L;τ)`, the quasi-doubly-periodic amplitude whose squared
/// modulus is the weight.
pub fn q_at(spec: RootSystemSpec, geom: DomainGeometry, points: &[Complex64]) -> Complex64 {
    let scaled: Vec<Complex64> = points.iter().map(|p| p / geom.length()).collect();
    weight_c_at(spec, geom, points) * macdonald_denominator(spec, &scaled, geom.tau())
}

/// `log Q(z)`; −∞ when two points coincide (or an extra theta factor
/// vanishes). Assembled additively from the log-moduli of the individual
/// theta factors, so it stays finite-ranged for particle counts where the
/// product form would under- or overflow.
pub fn log_weight_q_at(spec: RootSystemSpec, geom: DomainGeometry, points: &[Complex64]) -> f64 {
    let nn = spec.script_n() as f64;
    let tau = geom.tau();
    let l = geom.length();
    let sum_y2: f64 = points.iter().map(|p| p.im * p.im).sum();
    let mut log_abs = -PI * nn * sum_y2 / geom.area();

    let th1_log = |v: Complex64, t: ModularTau| theta::eval(ThetaIndex::One, v, t).norm().ln();
    for p in points {
        let xi = p / l;
        log_abs += match spec.family() {
            Family::A | Family::D => 0.0,
            Family::B => th1_log(xi, tau),
            Family::Bv => th1_log(2.0 * xi, tau.scale(2.0)),
            Family::C => th1_log(2.0 * xi, tau),
            Family::Cv => th1_log(xi, tau.scale(0.5)),
            Family::BC => {
                th1_log(xi, tau)
                    + theta::eval(ThetaIndex::Zero, 2.0 * xi, tau.scale(2.0))
                        .norm()
                        .ln()
            }
        };
    }
    let pair_sum = spec.family() != Family::A;
    for k in 1..points.len() {
        for j in 0..k {
            let (a, b) = (points[j] / l, points[k] / l);
            log_abs += th1_log(b - a, tau);
            if pair_sum {
                log_abs += th1_log(b + a, tau);
            }
        }
    }
    if spec.family() == Family::A {
        let total: Complex64 = points.iter().sum::<Complex64>() / l;
        log_abs += theta::eval(parity_constants(spec).s, total, tau)
            .norm()
            .ln();
    }
    2.0 * log_abs
}

/// The doubly periodic weight `Q(z) = |q(z)|² ≥ 0`.
pub fn weight_q_at(spec: RootSystemSpec, geom: DomainGeometry, points: &[Complex64]) -> f64 {
    let lq = log_weight_q_at(spec, geom, points);
    if lq == f64::NEG_INFINITY {
        0.0
    } else {
        lq.exp()
    }
}

pub fn weight_q(spec: RootSystemSpec, config: &Configuration) -> f64 {
    weight_q_at(spec, config.geom(), config.points())
}

/// Residuals of the two quasi-periodicity relations of `q` when the m-th
/// point is shifted by `L` and by `iW`; returns the larger one.
pub fn quasi_periodicity_residual_q(
    spec: RootSystemSpec,
    config: &Configuration,
    m: usize,
) -> f64 {
    let n = config.len();
    assert!((1..=n).contains(&m), "particle index {m} outside 1..={n}");
    let geom = config.geom();
    let parity = parity_constants(spec);
    let base = q_at(spec, geom, config.points());
    let scale = base.norm().max(RESIDUAL_FLOOR);

    let mut shifted_l = config.points().to_vec();
    shifted_l[m - 1] += geom.length();
    let lhs_l = q_at(spec, geom, &shifted_l);
    let res_l = (lhs_l - parity.sgn_l * base).norm() / scale;

    let mut shifted_w = config.points().to_vec();
    shifted_w[m - 1] += Complex64::new(0.0, geom.width());
    let lhs_w = q_at(spec, geom, &shifted_w);
    let x_m = config.points()[m - 1].re;
    let phase =
        (-2.0 * PI * I * spec.script_n() as f64 * x_m / geom.length()).exp();
    let res_w = (lhs_w - parity.sgn_iw * phase * base).norm() / scale;

    res_l.max(res_w)
}

/// Residual of full double periodicity of `Q` under shifting the m-th point.
pub fn double_periodicity_residual_q(
    spec: RootSystemSpec,
    config: &Configuration,
    m: usize,
) -> f64 {
    let geom = config.geom();
    let base = weight_q(spec, config);
    let scale = base.abs().max(RESIDUAL_FLOOR);
    let mut worst: f64 = 0.0;
    for shift in [
        Complex64::new(geom.length(), 0.0),
        Complex64::new(0.0, geom.width()),
    ] {
        let mut pts = config.points().to_vec();
        pts[m - 1] += shift;
        worst = worst.max((weight_q_at(spec, geom, &pts) - base).abs() / scale);
    }
    worst
}

/// Closed-form normalization `Z = (1/N!) ∫_{Λ^N} Q`:
///
/// ```text
/// Z = 2^δ (LW)^N (𝒩 Im τ)^{−N/2} η(τ)^κ g(τ)
/// ```
///
/// with the family tables for δ, κ and the η-ratio factor g.
pub fn partition_z(spec: RootSystemSpec, geom: DomainGeometry) -> f64 {
    let n = spec.n_particles() as i32;
    let nf = n as f64;
    let tau = geom.tau();
    let eta = theta::dedekind_eta(tau).re;
    let (delta, kappa) = match spec.family() {
        Family::A => (-nf / 2.0, (n - 1) * (n - 2)),
        Family::B => ((nf - 2.0) / 2.0, 2 * n * (n - 1)),
        Family::Bv => ((nf - 2.0) / 2.0, 2 * (n - 1) * (n + 1)),
        Family::C => (nf / 2.0, 2 * n * (n - 1)),
        Family::Cv => (nf / 2.0, (n - 1) * (2 * n - 1)),
        Family::BC => (nf / 2.0, 2 * n * (n + 1)),
        Family::D => ((nf - 4.0) / 2.0, 2 * n * (n - 2)),
    };
    let g = match spec.family() {
        Family::Bv => (theta::dedekind_eta(tau.scale(2.0)).re / (eta * eta)).powi(2 * (n - 1)),
        Family::Cv => {
            let eta_half = theta::dedekind_eta(tau.scale(0.5)).re;
            (eta_half * eta_half / eta).powi(n - 1)
        }
        Family::BC => (theta::dedekind_eta(tau.scale(2.0)).re / (eta * eta)).powi(2 * n),
        _ => 1.0,
    };
    2.0_f64.powf(delta)
        * geom.area().powi(n)
        * (spec.script_n() as f64 * geom.aspect()).powf(-nf / 2.0)
        * eta.powi(kappa)
        * g
}

/// Normalized N-point density `p(z) = Q(z)/Z`; integrates to `N!` over
/// ordered configurations.
pub fn density_p(spec: RootSystemSpec, config: &Configuration) -> f64 {
    weight_q(spec, config) / partition_z(spec, config.geom())
}

/// Precomputed kernel evaluator for one family/geometry pair.
#[derive(Debug, Clone)]
pub struct KernelContext {
    spec: RootSystemSpec,
    geom: DomainGeometry,
    norms: NormTable,
    inv_sqrt_h: Vec<f64>,
}

impl KernelContext {
    pub fn new(spec: RootSystemSpec, geom: DomainGeometry) -> Self {
        let norms = h_norm_table(spec, geom);
        let inv_sqrt_h = norms.h.iter().map(|h| 1.0 / h.sqrt()).collect();
        KernelContext {
            spec,
            geom,
            norms,
            inv_sqrt_h,
        }
    }

    pub fn spec(&self) -> RootSystemSpec {
        self.spec
    }

    pub fn geom(&self) -> DomainGeometry {
        self.geom
    }

    pub fn norms(&self) -> &NormTable {
        &self.norms
    }

    pub fn n_points(&self) -> usize {
        self.spec.n_particles()
    }

    /// Orthonormal feature vector `φ_n(z) = e^{−π𝒩y²/(LW)} M_n(z)/√h_n`;
    /// the kernel is `K(z,z′) = Σ_n φ_n(z) conj(φ_n(z′))`.
    pub fn features(&self, z: Complex64) -> Vec<Complex64> {
        let nn = self.spec.script_n() as f64;
        let damp = (-PI * nn * z.im * z.im / self.geom.area()).exp();
        (1..=self.n_points())
            .map(|n| damp * self.inv_sqrt_h[n - 1] * m_function(self.spec, self.geom, n, z))
            .collect()
    }

    pub fn eval(&self, z: Complex64, zp: Complex64) -> Complex64 {
        let fz = self.features(z);
        let fzp = self.features(zp);
        fz.iter()
            .zip(&fzp)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// `K(z,z) = Σ |φ_n(z)|²`, the one-point intensity.
    pub fn intensity(&self, z: Complex64) -> f64 {
        self.features(z).iter().map(|f| f.norm_sqr()).sum()
    }
}

/// Max relative residual of the four shift relations of the kernel
/// (`z → z+L`, `z → z+iW` and the primed versions), with the family signs.
pub fn kernel_quasi_periodicity_residual(
    ctx: &KernelContext,
    z: Complex64,
    zp: Complex64,
) -> f64 {
    let geom = ctx.geom();
    let nn = ctx.spec().script_n();
    let base = ctx.eval(z, zp);
    let scale = base.norm().max(RESIDUAL_FLOOR);
    // A-family: each row picks up e^{2πiJ(j)} (−1)^𝒩 = −(−1)^𝒩 under z → z+L
    // because the offsets J(j) are half-integers; at N=1 the kernel is built
    // from the 1-periodic ϑ3, fixing the sign to (−1)^{𝒩+1}.
    let sign_l = match ctx.spec().family() {
        Family::A => {
            if nn.is_multiple_of(2) {
                -1.0
            } else {
                1.0
            }
        }
        Family::B | Family::Cv | Family::BC => -1.0,
        Family::Bv | Family::C | Family::D => 1.0,
    };
    let sign_w = match ctx.spec().family() {
        Family::B | Family::Bv => -1.0,
        _ => 1.0,
    };
    let l = geom.length();
    let iw = Complex64::new(0.0, geom.width());
    let nnf = nn as f64;
    let mut worst: f64 = 0.0;
    worst = worst.max((ctx.eval(z + l, zp) - sign_l * base).norm() / scale);
    worst = worst.max((ctx.eval(z, zp + l) - sign_l * base).norm() / scale);
    let phase_z = (-2.0 * PI * I * nnf * z.re / l).exp();
    worst = worst.max((ctx.eval(z + iw, zp) - sign_w * phase_z * base).norm() / scale);
    let phase_zp = (2.0 * PI * I * nnf * zp.re / l).exp();
    worst = worst.max((ctx.eval(z, zp + iw) - sign_w * phase_zp * base).norm() / scale);
    worst
}

/// `det[K(z_j, z_k)]` over up to N points: the correlation function. The
/// determinant of a Hermitian matrix is real; the imaginary residue is
/// checked and dropped.
pub fn correlation(ctx: &KernelContext, points: &[Complex64]) -> f64 {
    let np = points.len();
    assert!(
        np >= 1 && np <= ctx.n_points(),
        "correlation order {np} outside 1..={}",
        ctx.n_points()
    );
    let mut mat = vec![Complex64::new(0.0, 0.0); np * np];
    for j in 0..np {
        for k in 0..np {
            mat[j * np + k] = ctx.eval(points[j], points[k]);
        }
    }
    let det = determinant(np, &mut mat);
    debug_assert!(
        det.im.abs() <= 1.0e-12 * det.re.abs().max(1.0),
        "correlation determinant has imaginary residue {det}"
    );
    det.re
}

/// Relative residual of the reproducing identity
/// `∫_Λ K(z,w) K(w,z′) d²w = K(z,z′)`.
pub fn reproducing_residual(
    ctx: &KernelContext,
    z: Complex64,
    zp: Complex64,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    let integral = quadrature::integrate_rect(
        |x, y| {
            let w = Complex64::new(x, y);
            ctx.eval(z, w) * ctx.eval(w, zp)
        },
        (0.0, ctx.geom().length()),
        (0.0, ctx.geom().width()),
        qspec,
    )?;
    let k = ctx.eval(z, zp);
    Ok((integral - k).norm() / k.norm().max(RESIDUAL_FLOOR))
}

/// Relative deviation of `∫_Λ K(z,z) d²z` from N.
pub fn trace_residual(ctx: &KernelContext, qspec: &QuadratureSpec) -> Result<f64> {
    let integral = quadrature::integrate_rect(
        |x, y| Complex64::new(ctx.intensity(Complex64::new(x, y)), 0.0),
        (0.0, ctx.geom().length()),
        (0.0, ctx.geom().width()),
        qspec,
    )?;
    let n = ctx.n_points() as f64;
    Ok((integral.re - n).abs() / n)
}

/// Relative residual of `det[K(z_j,z_k)]_{N×N} = Q(z)/Z`, the identity
/// linking the kernel route and the weight route to the same density
/// (equivalently `det K = N! Q / ∫_{Λ^N} Q`, since `Z = (1/N!)∫Q`).
pub fn det_consistency_residual(ctx: &KernelContext, config: &Configuration) -> f64 {
    let n = ctx.n_points();
    assert_eq!(config.len(), n, "need a full N-point configuration");
    let det = correlation(ctx, config.points());
    let density = density_p(ctx.spec(), config);
    (det - density).abs() / det.abs().max(density.abs()).max(RESIDUAL_FLOOR)
}
