//! Infinite-volume limits: the four strip kernels obtained from the finite
//! families at fixed density `ρ = N/(LW)` and fixed strip height `W`, their
//! projection (`g`-function) representations, the three Ginibre-like plane
//! kernels reached as `W → ∞`, the matching Mittag–Leffler density profiles,
//! and numeric convergence scans between all three levels.
//!
//! The plane density profiles are scale changes of the three Mittag–Leffler
//! profiles with unit microscopic potential: amplitude ρ (class A) or 2ρ
//! (C, D) with argument scale √(2πρ).

use crate::dpp::KernelContext;
use crate::error::{Error, Result};
use crate::quadrature::{self, Rule};
use crate::root_system::{theta_letter, DomainGeometry, Family, Letter, RootSystemSpec};
use crate::theta::{self, ModularTau, ThetaIndex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const RESIDUAL_FLOOR: f64 = 1.0e-30;

/// The four limit classes the seven finite families collapse onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitClass {
    A,
    B,
    C,
    D,
}

impl LimitClass {
    pub const ALL: [LimitClass; 4] = [LimitClass::A, LimitClass::B, LimitClass::C, LimitClass::D];

    /// Which strip class a finite family converges to: A→A, B/B∨→B,
    /// C/C∨/BC→C, D→D.
    pub fn from_family(family: Family) -> Self {
        match family.letter() {
            Letter::A => LimitClass::A,
            Letter::B => LimitClass::B,
            Letter::C => LimitClass::C,
            Letter::D => LimitClass::D,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LimitClass::A => "A",
            LimitClass::B => "B",
            LimitClass::C => "C",
            LimitClass::D => "D",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(LimitClass::A),
            "B" | "b" => Ok(LimitClass::B),
            "C" | "c" => Ok(LimitClass::C),
            "D" | "d" => Ok(LimitClass::D),
            other => Err(Error::InvalidInput(format!(
                "unknown limit class {other:?}; expected A, B, C or D"
            ))),
        }
    }
}

/// The three plane classes left after `W → ∞`: B and C merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneClass {
    A,
    C,
    D,
}

impl PlaneClass {
    pub const ALL: [PlaneClass; 3] = [PlaneClass::A, PlaneClass::C, PlaneClass::D];

    pub fn from_strip(class: LimitClass) -> Self {
        match class {
            LimitClass::A => PlaneClass::A,
            LimitClass::B | LimitClass::C => PlaneClass::C,
            LimitClass::D => PlaneClass::D,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PlaneClass::A => "A",
            PlaneClass::C => "C",
            PlaneClass::D => "D",
        }
    }
}

/// Point density and strip height of an infinite-volume system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripParams {
    rho: f64,
    width: f64,
}

impl StripParams {
    pub fn new(rho: f64, width: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite() && width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strip parameters must be positive and finite, got rho={rho}, W={width}"
            )));
        }
        Ok(StripParams { rho, width })
    }

    pub fn rho(self) -> f64 {
        self.rho
    }

    pub fn width(self) -> f64 {
        self.width
    }

    /// Half-length of the λ-integration range, `√ρ·W`.
    pub fn lambda_max(self) -> f64 {
        self.rho.sqrt() * self.width
    }
}

fn refine_lambda_integral<F>(f: F, range: (f64, f64)) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let tol = 1e-10;
    // Kernel values can sit many orders below the integrand's magnitude
    // (oscillatory cancellation), so convergence is measured against the
    // larger of the estimates and a fraction of the integrand's L1 size.
    let l1 = quadrature::integrate_interval(
        |lam| Complex64::new(f(lam).norm(), 0.0),
        range,
        200,
        Rule::GaussLegendre,
    )?
    .re;
    let floor = 1e-3 * l1;
    let mut prev = quadrature::integrate_interval(&f, range, 200, Rule::GaussLegendre)?;
    let mut delta = f64::INFINITY;
    for k in 1..=4u32 {
        let next = quadrature::integrate_interval(&f, range, 200 << k, Rule::GaussLegendre)?;
        delta = (next - prev).norm() / next.norm().max(prev.norm()).max(floor).max(1e-300);
        prev = next;
        if delta < tol {
            return Ok(next);
        }
    }
    Err(Error::QuadratureNotConverged { delta, tol })
}

/// Strip kernel `𝒦^R_{W,ρ}(z,z′)` by its λ-integral representation:
/// class A integrates `e^{−2πλ²}` against two ϑ2 factors at modular
/// parameter `iρW²` over `[0, √ρW]`; classes B/C/D integrate `e^{−πλ²}`
/// against ϑ1 (B) or ϑ2 (C, D) factors at `2iρW²` over `[−√ρW, √ρW]`,
/// with the difference (B, C) or sum (D) of the two λ-exponential terms.
pub fn strip_kernel(
    class: LimitClass,
    p: StripParams,
    z: Complex64,
    zp: Complex64,
) -> Result<Complex64> {
    let rho = p.rho();
    let w = p.width();
    let sq = rho.sqrt();
    let lam_max = p.lambda_max();
    match class {
        LimitClass::A => {
            let tau = ModularTau::imaginary(rho * w * w).expect("positive strip parameter");
            let th2 = |v: Complex64| theta::eval(ThetaIndex::Two, v, tau);
            let integral = refine_lambda_integral(
                |lam| {
                    let osc = (-2.0 * PI * lam * lam
                        + 2.0 * PI * I * sq * (z - zp.conj()) * lam)
                        .exp();
                    osc * th2(sq * w * (I * lam + sq * z))
                        * th2(sq * w * (I * lam - sq * zp.conj()))
                },
                (0.0, lam_max),
            )?;
            let damp = (-PI * rho * (z.im * z.im + zp.im * zp.im)).exp();
            Ok(2.0_f64.sqrt() * rho * damp * integral)
        }
        LimitClass::B | LimitClass::C | LimitClass::D => {
            let tau = ModularTau::imaginary(2.0 * rho * w * w).expect("positive strip parameter");
            let mu = if class == LimitClass::B {
                ThetaIndex::One
            } else {
                ThetaIndex::Two
            };
            let th = |v: Complex64| theta::eval(mu, v, tau);
            let direct = refine_lambda_integral(
                |lam| {
                    let osc =
                        (-PI * lam * lam + 2.0 * PI * I * sq * (z - zp.conj()) * lam).exp();
                    osc * th(sq * w * (I * lam + 2.0 * sq * z))
                        * th(sq * w * (I * lam - 2.0 * sq * zp.conj()))
                },
                (-lam_max, lam_max),
            )?;
            let reflected = refine_lambda_integral(
                |lam| {
                    let osc =
                        (-PI * lam * lam + 2.0 * PI * I * sq * (z + zp.conj()) * lam).exp();
                    osc * th(sq * w * (I * lam + 2.0 * sq * z))
                        * th(sq * w * (I * lam + 2.0 * sq * zp.conj()))
                },
                (-lam_max, lam_max),
            )?;
            let damp = (-2.0 * PI * rho * (z.im * z.im + zp.im * zp.im)).exp();
            let combined = match class {
                LimitClass::B => -(direct - reflected),
                LimitClass::C => direct - reflected,
                LimitClass::D => direct + reflected,
                LimitClass::A => unreachable!(),
            };
            Ok(rho * damp * combined)
        }
    }
}

/// Strip intensity `𝒦(z,z)`; real up to roundoff.
pub fn strip_density(class: LimitClass, p: StripParams, z: Complex64) -> Result<f64> {
    Ok(strip_kernel(class, p, z, z)?.re)
}

/// Max relative residual of the `iW`-shift relations
/// `𝒦(z+iW,z′) = ±e^{−2πi c ρWx} 𝒦(z,z′)` and its primed twin
/// (− sign for class B only). The phase multiplier is `c = 1` for class A
/// and `c = 2` for B, C, D: it is the limit of the finite-size phase
/// `e^{−2πi𝒩x/L}`, and `𝒩/N → 2` for every non-A family.
pub fn strip_quasi_periodicity_residual(
    class: LimitClass,
    p: StripParams,
    z: Complex64,
    zp: Complex64,
) -> Result<f64> {
    let base = strip_kernel(class, p, z, zp)?;
    let scale = base.norm().max(RESIDUAL_FLOOR);
    let sign = if class == LimitClass::B { -1.0 } else { 1.0 };
    let multiplier = if class == LimitClass::A { 1.0 } else { 2.0 };
    let iw = Complex64::new(0.0, p.width());
    let up = strip_kernel(class, p, z + iw, zp)?;
    let phase = (-2.0 * PI * I * multiplier * p.rho() * p.width() * z.re).exp();
    let r1 = (up - sign * phase * base).norm() / scale;
    let up_p = strip_kernel(class, p, z, zp + iw)?;
    let phase_p = (2.0 * PI * I * multiplier * p.rho() * p.width() * zp.re).exp();
    let r2 = (up_p - sign * phase_p * base).norm() / scale;
    Ok(r1.max(r2))
}

/// Projection integrand `g^R_{W,ρ}(z,λ)`:
///
/// ```text
/// g^A = 2^{1/4} √ρ e^{−π(ρy²+λ²)}   Θ^A(λ/(√ρW),  ρWz,  iρW²)
/// g^R = √ρ     e^{−π(2ρy²+λ²/2)}  Θ^R(λ/(2√ρW), 2ρWz, 2iρW²),  R = B,C,D
/// ```
pub fn g_strip(class: LimitClass, p: StripParams, z: Complex64, lambda: f64) -> Complex64 {
    let rho = p.rho();
    let w = p.width();
    let sq = rho.sqrt();
    match class {
        LimitClass::A => {
            let tau = ModularTau::imaginary(rho * w * w).expect("positive strip parameter");
            2.0_f64.powf(0.25)
                * sq
                * (-PI * (rho * z.im * z.im + lambda * lambda)).exp()
                * theta_letter(Letter::A, lambda / (sq * w), rho * w * z, tau)
        }
        _ => {
            let tau = ModularTau::imaginary(2.0 * rho * w * w).expect("positive strip parameter");
            let letter = match class {
                LimitClass::B => Letter::B,
                LimitClass::C => Letter::C,
                LimitClass::D => Letter::D,
                LimitClass::A => unreachable!(),
            };
            sq * (-PI * (2.0 * rho * z.im * z.im + lambda * lambda / 2.0)).exp()
                * theta_letter(letter, lambda / (2.0 * sq * w), 2.0 * rho * w * z, tau)
        }
    }
}

/// Relative residual of the projection representation
/// `𝒦(z,z′) = ∫_0^{√ρW} g(z,λ) conj(g(z′,λ)) dλ`.
pub fn strip_reconstruction_residual(
    class: LimitClass,
    p: StripParams,
    z: Complex64,
    zp: Complex64,
) -> Result<f64> {
    let reconstructed = refine_lambda_integral(
        |lam| g_strip(class, p, z, lam) * g_strip(class, p, zp, lam).conj(),
        (0.0, p.lambda_max()),
    )?;
    let direct = strip_kernel(class, p, z, zp)?;
    Ok((reconstructed - direct).norm() / direct.norm().max(RESIDUAL_FLOOR))
}

/// Smeared off-diagonal strip inner product: `λ′` is mollified with a
/// Gaussian of width `eps`, and the x-integral truncated to `[−trunc, trunc]`.
/// For distinct `λ, λ′ ∈ (0, √ρW)` this tends to (mollified) zero with a
/// Gaussian tail in the truncation length.
pub fn strip_smeared_offdiag(
    class: LimitClass,
    p: StripParams,
    lambda: f64,
    lambda_p: f64,
    eps: f64,
    trunc: f64,
) -> Result<f64> {
    assert!(eps > 0.0 && trunc > 0.0);
    let moll = quadrature::nodes(Rule::GaussLegendre, 24, lambda_p - 4.0 * eps, lambda_p + 4.0 * eps);
    let weight = |s: f64| {
        let u = (s - lambda_p) / eps;
        (-0.5 * u * u).exp() / (eps * (2.0 * PI).sqrt())
    };
    let nx = (64.0 * trunc).ceil() as usize;
    let inner = quadrature::integrate_rect(
        |x, y| {
            let z = Complex64::new(x, y);
            let mut smeared = Complex64::new(0.0, 0.0);
            for &(s, ws) in &moll {
                smeared += ws * weight(s) * g_strip(class, p, z, s);
            }
            g_strip(class, p, z, lambda).conj() * smeared
        },
        (-trunc, trunc),
        (0.0, p.width()),
        &quadrature::QuadratureSpec::new(nx.max(64), 48, Rule::GaussLegendre, Rule::GaussLegendre)?,
    )?;
    Ok(inner.norm())
}

/// Ginibre-like plane kernels reached as `W → ∞`:
///
/// ```text
/// K^A = ρ e^{−πρ(|z|²+|z′|²)/2 + πρ z conj(z′)}
/// K^C = 2ρ e^{−πρ(|z|²+|z′|²)} sinh(2πρ z conj(z′))
/// K^D = 2ρ e^{−πρ(|z|²+|z′|²)} cosh(2πρ z conj(z′))
/// ```
pub fn ginibre_kernel(class: PlaneClass, rho: f64, z: Complex64, zp: Complex64) -> Complex64 {
    assert!(rho > 0.0 && rho.is_finite(), "density must be positive");
    let zage = z.norm_sqr() + zp.norm_sqr();
    match class {
        PlaneClass::A => rho * (-PI * rho * zage / 2.0 + PI * rho * z * zp.conj()).exp(),
        PlaneClass::C => {
            2.0 * rho * (-PI * rho * zage).exp() * (2.0 * PI * rho * z * zp.conj()).sinh()
        }
        PlaneClass::D => {
            2.0 * rho * (-PI * rho * zage).exp() * (2.0 * PI * rho * z * zp.conj()).cosh()
        }
    }
}

/// Density profile `K(z,z)`: uniform ρ for A, `ρ(1 − e^{−4πρ|z|²})` for C,
/// `ρ(1 + e^{−4πρ|z|²})` for D.
pub fn ginibre_density(class: PlaneClass, rho: f64, z: Complex64) -> f64 {
    ginibre_kernel(class, rho, z, z).re
}

/// Index sets of the three admissible Mittag–Leffler profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlIndexSet {
    /// All of 0, 1, 2, …
    NonnegativeIntegers,
    /// Even indices 0, 2, 4, …
    Even,
    /// Odd indices 1, 3, 5, …
    Odd,
}

/// One-point density `ρ^I_{k,c}(z) = k Σ_{j∈I} |z|^{2j}/Γ(j/k+(1+c)/k) ·
/// e^{−Q_{k,c}(z)}` with `Q_{k,c}(z) = |z|^{2k} − 2c log|z|`, restricted to
/// the three solvable parameter choices at `k = 1`:
/// `(ℕ₀, c=0) ≡ 1`, `(even, c=1) = sinh(|z|²)e^{−|z|²}`, and
/// `(odd, c=−1) = cosh(|z|²)e^{−|z|²}`.
pub fn mittag_leffler_density(
    index_set: MlIndexSet,
    k: u32,
    c: f64,
    z: Complex64,
) -> Result<f64> {
    let supported = matches!(
        (index_set, k, c),
        (MlIndexSet::NonnegativeIntegers, 1, 0.0) | (MlIndexSet::Even, 1, 1.0) | (MlIndexSet::Odd, 1, -1.0)
    );
    if !supported {
        return Err(Error::InvalidInput(format!(
            "unsupported Mittag-Leffler parameters: set {index_set:?}, k={k}, c={c}"
        )));
    }
    let t = z.norm_sqr();
    // Σ_{j∈I} t^{j+c}/Γ(j+1+c), folding |z|^{2c} = t^c into the series so
    // every term stays finite at t = 0.
    let (start, step) = match index_set {
        MlIndexSet::NonnegativeIntegers => (0i64, 1i64),
        MlIndexSet::Even => (0, 2),
        MlIndexSet::Odd => (1, 2),
    };
    let mut sum = 0.0f64;
    let mut j = start;
    loop {
        let power = j as f64 + c;
        let gamma_arg = j as f64 + 1.0 + c;
        // Γ at positive integers: (gamma_arg − 1)!
        let mut ln_fact = 0.0f64;
        let mut m = 2.0;
        while m < gamma_arg {
            ln_fact += m.ln();
            m += 1.0;
        }
        let term = if t == 0.0 {
            if power == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (power * t.ln() - ln_fact).exp()
        };
        sum += term;
        j += step;
        if (t == 0.0 && j > start + 2 * step)
            || (t > 0.0 && j as f64 > t && term < 1e-18 * sum.max(1.0))
            || j > 10_000
        {
            break;
        }
    }
    Ok(sum * (-t).exp())
}

/// Sixteen seeded test pairs inside one period cell of the strip.
pub fn default_test_pairs(p: StripParams, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..16)
        .map(|_| {
            let z = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..p.width()));
            let zp = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..p.width()));
            (z, zp)
        })
        .collect()
}

/// For each N in `n_values`, with `L = N/(ρW)`, the sup over the test pairs
/// of `| |K^{R_N}(z,z′)| − |𝒦^R(z,z′)| |`; the sequence decreases toward 0.
pub fn finite_to_strip_scan(
    family: Family,
    n_values: &[usize],
    p: StripParams,
    pairs: &[(Complex64, Complex64)],
) -> Result<Vec<f64>> {
    let class = LimitClass::from_family(family);
    let limits: Vec<Complex64> = pairs
        .iter()
        .map(|(z, zp)| strip_kernel(class, p, *z, *zp))
        .collect::<Result<_>>()?;
    let mut errors = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let spec = RootSystemSpec::new(family, n)?;
        let length = n as f64 / (p.rho() * p.width());
        let geom = DomainGeometry::new(length, p.width())?;
        let ctx = KernelContext::new(spec, geom);
        let mut sup: f64 = 0.0;
        for ((z, zp), lim) in pairs.iter().zip(&limits) {
            let finite = ctx.eval(*z, *zp);
            sup = sup.max((finite.norm() - lim.norm()).abs());
        }
        errors.push(sup);
    }
    Ok(errors)
}

/// For each W in `w_values`, the sup over the test pairs of
/// `| |𝒦^R_{W,ρ}(z,z′)| − |K^{map(R)}_{Ginibre,ρ}(z,z′)| |`.
pub fn strip_to_ginibre_scan(
    class: LimitClass,
    rho: f64,
    w_values: &[f64],
    pairs: &[(Complex64, Complex64)],
) -> Result<Vec<f64>> {
    let plane = PlaneClass::from_strip(class);
    let mut errors = Vec::with_capacity(w_values.len());
    for &w in w_values {
        let p = StripParams::new(rho, w)?;
        let mut sup: f64 = 0.0;
        for (z, zp) in pairs {
            let strip = strip_kernel(class, p, *z, *zp)?;
            let gin = ginibre_kernel(plane, rho, *z, *zp);
            sup = sup.max((strip.norm() - gin.norm()).abs());
        }
        errors.push(sup);
    }
    Ok(errors)
}

/// Plane projection integrands of the Ginibre-like kernels:
///
/// ```text
/// g^A_ρ(z,λ) = 2^{1/4} ρ^{3/4} e^{2πρzλ − πρ(x²+λ²)},          λ ∈ ℝ
/// g^C_ρ(z,λ) = 2^{3/2} ρ^{3/4} sinh(4πρzλ) e^{−2πρ(x²+λ²)},   λ > 0
/// g^D_ρ(z,λ) = 2^{3/2} ρ^{3/4} cosh(4πρzλ) e^{−2πρ(x²+λ²)},   λ > 0
/// ```
pub fn g_plane(class: PlaneClass, rho: f64, z: Complex64, lambda: f64) -> Result<Complex64> {
    assert!(rho > 0.0 && rho.is_finite(), "density must be positive");
    if class != PlaneClass::A && lambda <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "lambda must be positive for class {}, got {lambda}",
            class.label()
        )));
    }
    let x = z.re;
    Ok(match class {
        PlaneClass::A => {
            2.0_f64.powf(0.25)
                * rho.powf(0.75)
                * (2.0 * PI * rho * z * lambda - PI * rho * (x * x + lambda * lambda)).exp()
        }
        PlaneClass::C => {
            2.0_f64.powf(1.5)
                * rho.powf(0.75)
                * (4.0 * PI * rho * z * lambda).sinh()
                * (-2.0 * PI * rho * (x * x + lambda * lambda)).exp()
        }
        PlaneClass::D => {
            2.0_f64.powf(1.5)
                * rho.powf(0.75)
                * (4.0 * PI * rho * z * lambda).cosh()
                * (-2.0 * PI * rho * (x * x + lambda * lambda)).exp()
        }
    })
}

/// Gauge-invariant residual of the plane projection representation:
/// `| |∫_S g(z,λ) conj(g(z′,λ)) dλ| − |K_Ginibre(z,z′)| | / |K_Ginibre|`,
/// with the λ-range truncated where the Gaussian tail is below 1e−15.
pub fn plane_reconstruction_residual(
    class: PlaneClass,
    rho: f64,
    z: Complex64,
    zp: Complex64,
) -> Result<f64> {
    let margin = 6.0 / rho.sqrt();
    let center = (z.re + zp.re) / 2.0;
    let range = match class {
        PlaneClass::A => (center - margin, center + margin),
        _ => (0.0, z.re.abs().max(zp.re.abs()) + margin),
    };
    let integral = refine_lambda_integral(
        |lam| match g_plane(class, rho, z, lam) {
            Ok(a) => a * g_plane(class, rho, zp, lam).expect("valid lambda").conj(),
            Err(_) => Complex64::new(0.0, 0.0),
        },
        range,
    )?;
    let gin = ginibre_kernel(class, rho, z, zp);
    Ok((integral.norm() - gin.norm()).abs() / gin.norm().max(RESIDUAL_FLOOR))
}

/// Smeared plane orthonormality probe: mollified `λ′`, with the oscillatory
/// (y) direction truncated to `[−trunc, trunc]` and the Gaussian (x)
/// direction integrated over its effective support.
pub fn plane_smeared_offdiag(
    class: PlaneClass,
    rho: f64,
    lambda: f64,
    lambda_p: f64,
    eps: f64,
    trunc: f64,
) -> Result<f64> {
    assert!(eps > 0.0 && trunc > 0.0);
    let moll = quadrature::nodes(
        Rule::GaussLegendre,
        24,
        lambda_p - 4.0 * eps,
        lambda_p + 4.0 * eps,
    );
    let weight = |s: f64| {
        let u = (s - lambda_p) / eps;
        (-0.5 * u * u).exp() / (eps * (2.0 * PI).sqrt())
    };
    let x_extent = lambda.abs().max(lambda_p.abs()) + 6.0 / rho.sqrt();
    let ny = (48.0 * trunc).ceil() as usize;
    let inner = quadrature::integrate_rect(
        |x, y| {
            let z = Complex64::new(x, y);
            let mut smeared = Complex64::new(0.0, 0.0);
            for &(s, ws) in &moll {
                if class != PlaneClass::A && s <= 0.0 {
                    continue;
                }
                smeared += ws * weight(s) * g_plane(class, rho, z, s).expect("valid lambda");
            }
            g_plane(class, rho, z, lambda).expect("valid lambda").conj() * smeared
        },
        (-x_extent, x_extent),
        (-trunc, trunc),
        &quadrature::QuadratureSpec::new(96, ny.max(64), Rule::GaussLegendre, Rule::GaussLegendre)?,
    )?;
    Ok(inner.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(rho: f64, w: f64) -> StripParams {
        StripParams::new(rho, w).unwrap()
    }

    #[test]
    fn b_and_c_vanish_at_origin() {
        let p = params(1.0, 1.0);
        let zero = c(0.0, 0.0);
        assert!(strip_kernel(LimitClass::B, p, zero, zero).unwrap().norm() < 1e-10);
        assert!(strip_kernel(LimitClass::C, p, zero, zero).unwrap().norm() < 1e-10);
        // A and D do not vanish there
        assert!(strip_kernel(LimitClass::D, p, zero, zero).unwrap().norm() > 0.1);
    }

    #[test]
    fn strip_kernel_reference_value() {
        // 25-digit quadrature reference for class A at ρ=1, W=1
        let p = params(1.0, 1.0);
        let got = strip_kernel(LimitClass::A, p, c(0.2, 0.1), c(0.1, 0.0)).unwrap();
        let want = c(1.212_383_600_450_513_7, -0.144_555_741_493_387_2);
        assert!(
            (got - want).norm() / want.norm() < 1e-10,
            "{}",
            (got - want).norm() / want.norm()
        );
    }

    #[test]
    fn strip_kernels_hermitian() {
        let p = params(1.3, 0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for class in LimitClass::ALL {
            for _ in 0..5 {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..p.width()));
                let zp = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..p.width()));
                let fwd = strip_kernel(class, p, z, zp).unwrap();
                let bwd = strip_kernel(class, p, zp, z).unwrap();
                assert!(
                    (fwd - bwd.conj()).norm() < 1e-12 * fwd.norm().max(1.0),
                    "class {}",
                    class.label()
                );
                let diag = strip_kernel(class, p, z, z).unwrap();
                assert!(diag.im.abs() < 1e-12 * diag.re.abs().max(1e-30));
                assert!(diag.re >= -1e-12);
            }
        }
    }

    #[test]
    fn strip_shift_relations() {
        let p = params(1.0, 1.0);
        let cases = [
            (LimitClass::A, c(0.31, 0.42), c(-0.2, 0.7)),
            (LimitClass::B, c(0.25, 0.33), c(0.4, 0.1)),
            (LimitClass::C, c(-0.4, 0.52), c(0.3, 0.8)),
            (LimitClass::D, c(0.11, 0.6), c(-0.35, 0.2)),
        ];
        for (class, z, zp) in cases {
            let r = strip_quasi_periodicity_residual(class, p, z, zp).unwrap();
            assert!(r < 1e-8, "class {}: {r}", class.label());
        }
    }

    #[test]
    fn projection_reconstructs_strip_kernels() {
        let p = params(1.0, 1.2);
        let pts = [(c(0.3, 0.5), c(-0.2, 0.9)), (c(0.0, 0.3), c(0.4, 0.4))];
        for class in LimitClass::ALL {
            for (z, zp) in pts {
                let r = strip_reconstruction_residual(class, p, z, zp).unwrap();
                assert!(r < 1e-8, "class {}: {r}", class.label());
            }
        }
        // the C integrand vanishes identically at z = 0
        assert_eq!(g_strip(LimitClass::C, p, c(0.0, 0.0), 0.37).norm(), 0.0);
    }

    #[test]
    fn smeared_offdiagonal_decays_with_truncation() {
        let p = params(1.0, 1.0);
        let (l1, l2) = (0.25 * p.lambda_max(), 0.75 * p.lambda_max());
        let eps = 0.1 * p.lambda_max();
        let mut values = Vec::new();
        for trunc in [2.0, 4.0, 8.0] {
            values.push(
                strip_smeared_offdiag(LimitClass::A, p, l1, l2, eps, trunc).unwrap(),
            );
        }
        assert!(
            values[1] < values[0] && values[2] < values[1],
            "no monotone decay: {values:?}"
        );
    }

    #[test]
    fn ginibre_density_profiles() {
        let rho = 1.3;
        for z in [c(0.0, 0.0), c(0.4, -0.2), c(1.5, 2.0)] {
            // A: uniform
            assert!((ginibre_density(PlaneClass::A, rho, z) - rho).abs() < 1e-13 * rho);
            // C/D: the sinh/cosh forms equal ρ(1 ∓ e^{−4πρ|z|²})
            let t = (-4.0 * PI * rho * z.norm_sqr()).exp();
            let dc = ginibre_density(PlaneClass::C, rho, z);
            let dd = ginibre_density(PlaneClass::D, rho, z);
            assert!((dc - rho * (1.0 - t)).abs() < 1e-13 * rho);
            assert!((dd - rho * (1.0 + t)).abs() < 1e-13 * rho);
        }
        assert_eq!(ginibre_density(PlaneClass::C, rho, c(0.0, 0.0)), 0.0);
        assert!((ginibre_density(PlaneClass::D, rho, c(0.0, 0.0)) - 2.0 * rho).abs() < 1e-14);
        // ρ^{C,D} → ρ far from the origin: at ρ|z|² = 10 the deviation is e^{−40π}
        let far = c((10.0f64 / rho).sqrt(), 0.0);
        assert!((ginibre_density(PlaneClass::C, rho, far) - rho).abs() < 1e-12 * rho);
        assert!((ginibre_density(PlaneClass::D, rho, far) - rho).abs() < 1e-12 * rho);
    }

    #[test]
    fn mittag_leffler_profiles() {
        let pts = [c(0.0, 0.0), c(0.7, 0.4), c(1.0, -1.2), c(2.0, 0.3)];
        for z in pts {
            let t = z.norm_sqr();
            let flat = mittag_leffler_density(MlIndexSet::NonnegativeIntegers, 1, 0.0, z).unwrap();
            assert!((flat - 1.0).abs() < 1e-13, "flat profile at {z}: {flat}");
            let even = mittag_leffler_density(MlIndexSet::Even, 1, 1.0, z).unwrap();
            assert!((even - t.sinh() * (-t).exp()).abs() < 1e-13);
            let odd = mittag_leffler_density(MlIndexSet::Odd, 1, -1.0, z).unwrap();
            assert!((odd - t.cosh() * (-t).exp()).abs() < 1e-13);
        }
        assert!(mittag_leffler_density(MlIndexSet::Even, 2, 1.0, pts[1]).is_err());
        assert!(mittag_leffler_density(MlIndexSet::Even, 1, 0.5, pts[1]).is_err());
    }

    #[test]
    fn ginibre_profiles_are_scaled_mittag_leffler() {
        // amplitude 2ρ (C, D) or ρ (A), argument scale √(2πρ)
        let rho = 0.8;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let w = (2.0 * PI * rho).sqrt() * z;
            let c_prof = ginibre_density(PlaneClass::C, rho, z);
            let scaled =
                2.0 * rho * mittag_leffler_density(MlIndexSet::Even, 1, 1.0, w).unwrap();
            assert!((c_prof - scaled).abs() <= 1e-12 * rho);
            let d_prof = ginibre_density(PlaneClass::D, rho, z);
            let scaled_d =
                2.0 * rho * mittag_leffler_density(MlIndexSet::Odd, 1, -1.0, w).unwrap();
            assert!((d_prof - scaled_d).abs() <= 1e-12 * rho);
        }
    }

    #[test]
    fn finite_kernels_approach_strip_kernels() {
        // Periodization error is Gaussian in L = N/(ρW): visible decay at
        // small N, machine floor from N ≈ 7 on.
        let p = params(1.0, 1.0);
        let pairs = default_test_pairs(p, 101);
        let errors = finite_to_strip_scan(Family::A, &[2, 3, 4, 8, 16], p, &pairs).unwrap();
        for pair in errors.windows(2) {
            assert!(
                pair[1] < pair[0] || pair[1] < 1e-12,
                "not decreasing: {errors:?}"
            );
        }
        assert!(errors[3] < 1e-10, "error at N=8: {}", errors[3]);
        assert!(errors[0] > 1e-3, "error at N=2 should be visible: {}", errors[0]);
    }

    #[test]
    fn strip_kernels_approach_ginibre() {
        let pairs: Vec<(Complex64, Complex64)> = default_test_pairs(params(1.0, 1.0), 77)
            .into_iter()
            .take(6)
            .collect();
        for class in [LimitClass::A, LimitClass::D] {
            let errors = strip_to_ginibre_scan(class, 1.0, &[1.0, 2.0, 3.0], &pairs).unwrap();
            assert!(
                errors[1] < errors[0] && errors[2] < errors[1],
                "class {}: {errors:?}",
                class.label()
            );
        }
    }

    #[test]
    fn plane_projection_matches_ginibre_kernels() {
        let rho = 1.0;
        let pts = [(c(0.3, 0.2), c(-0.1, 0.4)), (c(0.0, 0.0), c(0.5, -0.3))];
        for class in PlaneClass::ALL {
            for (z, zp) in pts {
                let r = plane_reconstruction_residual(class, rho, z, zp).unwrap();
                assert!(r < 1e-8, "class {}: {r}", class.label());
            }
        }
        // sinh(0) kills the C integrand at z = 0
        assert_eq!(
            g_plane(PlaneClass::C, rho, c(0.0, 0.0), 0.7).unwrap().norm(),
            0.0
        );
        assert!(g_plane(PlaneClass::C, rho, c(0.1, 0.0), -0.5).is_err());
    }

    #[test]
    fn plane_smeared_offdiagonal_decays() {
        let rho = 1.0;
        let (l1, l2) = (0.4, 1.3);
        let mut values = Vec::new();
        for trunc in [1.0, 2.0, 4.0] {
            values.push(plane_smeared_offdiag(PlaneClass::A, rho, l1, l2, 0.12, trunc).unwrap());
        }
        assert!(
            values[1] < values[0] && values[2] < values[1],
            "no monotone decay: {values:?}"
        );
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(StripParams::new(0.0, 1.0).is_err());
        assert!(StripParams::new(1.0, -2.0).is_err());
        assert!(LimitClass::parse("E").is_err());
        assert_eq!(LimitClass::parse("b").unwrap(), LimitClass::B);
        assert_eq!(PlaneClass::from_strip(LimitClass::B), PlaneClass::C);
    }
}
