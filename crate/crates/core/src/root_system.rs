//! The seven affine root-system families behind the doubly periodic point
//! processes: family parameters, the row functions `M_j`, the Macdonald
//! denominators `W`, their scalar prefactors `a(τ)`, and a numeric check of
//! the determinant identity that ties them together.

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::theta::{self, ModularTau, ThetaIndex};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The seven irreducible reduced affine families. `Bv`/`Cv` are the duals
/// B∨/C∨.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    Bv,
    C,
    Cv,
    BC,
    D,
}

/// Which of the four building-block combinations `Θ^A..Θ^D` a family uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::Bv,
        Family::C,
        Family::Cv,
        Family::BC,
        Family::D,
    ];

    pub fn letter(self) -> Letter {
        match self {
            Family::A => Letter::A,
            Family::B | Family::Bv => Letter::B,
            Family::C | Family::Cv | Family::BC => Letter::C,
            Family::D => Letter::D,
        }
    }

    /// Smallest admissible particle count (D needs N ≥ 2 so its modular
    /// parameter `2(N−1)τ` stays in the upper half-plane).
    pub fn min_particles(self) -> usize {
        match self {
            Family::D => 2,
            _ => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::Bv => "Bv",
            Family::C => "C",
            Family::Cv => "Cv",
            Family::BC => "BC",
            Family::D => "D",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "Bv" | "bv" | "BV" => Ok(Family::Bv),
            "C" | "c" => Ok(Family::C),
            "Cv" | "cv" | "CV" => Ok(Family::Cv),
            "BC" | "bc" => Ok(Family::BC),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::InvalidInput(format!(
                "unknown family {other:?}; expected one of A, B, Bv, C, Cv, BC, D"
            ))),
        }
    }
}

/// A family together with a particle count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootSystemSpec {
    family: Family,
    n_particles: usize,
}

impl RootSystemSpec {
    pub fn new(family: Family, n_particles: usize) -> Result<Self> {
        if n_particles < family.min_particles() {
            return Err(Error::InvalidInput(format!(
                "family {} needs at least {} particles, got {n_particles}",
                family.label(),
                family.min_particles()
            )));
        }
        Ok(RootSystemSpec {
            family,
            n_particles,
        })
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn n_particles(self) -> usize {
        self.n_particles
    }

    /// The degree parameter 𝒩 entering the nome `𝒩τ` and the Gaussian
    /// weights:
    ///
    /// | A | B    | B∨, C∨ | C      | BC   | D      |
    /// |---|------|--------|--------|------|--------|
    /// | N | 2N−1 | 2N     | 2(N+1) | 2N+1 | 2(N−1) |
    pub fn script_n(self) -> usize {
        let n = self.n_particles;
        match self.family {
            Family::A => n,
            Family::B => 2 * n - 1,
            Family::Bv | Family::Cv => 2 * n,
            Family::C => 2 * (n + 1),
            Family::BC => 2 * n + 1,
            Family::D => 2 * (n - 1),
        }
    }

    /// The index offset J(j): `j − 1/2` (A, C∨), `j − 1` (B, B∨, D), `j`
    /// (C, BC). `j` is 1-based and must lie in `1..=N`.
    pub fn offset_j(self, j: usize) -> f64 {
        assert!(
            (1..=self.n_particles).contains(&j),
            "row index {j} outside 1..={}",
            self.n_particles
        );
        match self.family {
            Family::A | Family::Cv => j as f64 - 0.5,
            Family::B | Family::Bv | Family::D => j as f64 - 1.0,
            Family::C | Family::BC => j as f64,
        }
    }
}

/// Rectangular fundamental domain `[0, L) × i[0, W)` with modular parameter
/// `τ = iW/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGeometry {
    length: f64,
    width: f64,
}

impl DomainGeometry {
    pub fn new(length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite() && width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "domain periods must be positive and finite, got L={length}, W={width}"
            )));
        }
        Ok(DomainGeometry { length, width })
    }

    pub fn length(self) -> f64 {
        self.length
    }

    pub fn width(self) -> f64 {
        self.width
    }

    pub fn area(self) -> f64 {
        self.length * self.width
    }

    /// Aspect ratio W/L, the imaginary part of τ.
    pub fn aspect(self) -> f64 {
        self.width / self.length
    }

    pub fn tau(self) -> ModularTau {
        ModularTau::imaginary(self.aspect()).expect("positive aspect ratio")
    }
}

/// The four letter combinations
///
/// ```text
/// Θ^A(σ,z,τ) = e^{2πiσz} ϑ2(στ+z;τ)
/// Θ^B(σ,z,τ) = e^{2πiσz} ϑ1(στ+z;τ) − e^{−2πiσz} ϑ1(στ−z;τ)
/// Θ^C(σ,z,τ) = e^{2πiσz} ϑ2(στ+z;τ) − e^{−2πiσz} ϑ2(στ−z;τ)
/// Θ^D(σ,z,τ) = e^{2πiσz} ϑ2(στ+z;τ) + e^{−2πiσz} ϑ2(στ−z;τ)
/// ```
pub fn theta_letter(letter: Letter, sigma: f64, z: Complex64, tau: ModularTau) -> Complex64 {
    let t = tau.get();
    let plus = (2.0 * PI * I * sigma * z).exp();
    let minus = (-2.0 * PI * I * sigma * z).exp();
    match letter {
        Letter::A => plus * theta::eval(ThetaIndex::Two, sigma * t + z, tau),
        Letter::B => {
            plus * theta::eval(ThetaIndex::One, sigma * t + z, tau)
                - minus * theta::eval(ThetaIndex::One, sigma * t - z, tau)
        }
        Letter::C => {
            plus * theta::eval(ThetaIndex::Two, sigma * t + z, tau)
                - minus * theta::eval(ThetaIndex::Two, sigma * t - z, tau)
        }
        Letter::D => {
            plus * theta::eval(ThetaIndex::Two, sigma * t + z, tau)
                + minus * theta::eval(ThetaIndex::Two, sigma * t - z, tau)
        }
    }
}

/// Row function `M_j(z) = Θ^{letter}(J(j)/𝒩, 𝒩z/L, 𝒩τ)`.
pub fn m_function(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    j: usize,
    z: Complex64,
) -> Complex64 {
    let nn = spec.script_n() as f64;
    let sigma = spec.offset_j(j) / nn;
    let tau_n = geom.tau().scale(nn);
    theta_letter(spec.family().letter(), sigma, nn * z / geom.length(), tau_n)
}

/// Macdonald denominator `W(ξ;τ)`: the pair products
/// `Π_{j<k} ϑ1(ξ_k−ξ_j;τ) [ϑ1(ξ_k+ξ_j;τ)]` with the family's single-variable
/// prefactors. Empty products are 1.
pub fn macdonald_denominator(
    spec: RootSystemSpec,
    xi: &[Complex64],
    tau: ModularTau,
) -> Complex64 {
    assert_eq!(
        xi.len(),
        spec.n_particles(),
        "expected {} coordinates, got {}",
        spec.n_particles(),
        xi.len()
    );
    let th1 = |v: Complex64, t: ModularTau| theta::eval(ThetaIndex::One, v, t);
    let mut w = Complex64::new(1.0, 0.0);
    for x in xi {
        w *= match spec.family() {
            Family::A | Family::D => continue,
            Family::B => th1(*x, tau),
            Family::Bv => th1(2.0 * x, tau.scale(2.0)),
            Family::C => th1(2.0 * x, tau),
            Family::Cv => th1(*x, tau.scale(0.5)),
            Family::BC => th1(*x, tau) * theta::eval(ThetaIndex::Zero, 2.0 * x, tau.scale(2.0)),
        };
    }
    let pair_sum = spec.family() != Family::A;
    for k in 1..xi.len() {
        for j in 0..k {
            w *= th1(xi[k] - xi[j], tau);
            if pair_sum {
                w *= th1(xi[k] + xi[j], tau);
            }
        }
    }
    w
}

/// The scalar prefactor `a(τ)` in the determinant identity, in terms of
/// η(τ), η(2τ), η(τ/2) and an exponential of τ.
pub fn prefactor_a(spec: RootSystemSpec, tau: ModularTau) -> Complex64 {
    let n = spec.n_particles() as i64;
    let eta = theta::dedekind_eta(tau);
    let e_tau = |num: i64, den: i64| (-tau.get() * PI * I * num as f64 / den as f64).exp();
    match spec.family() {
        Family::A => {
            e_tau((2 * n - 1) * (2 * n + 1), 12) * eta.powi((-(n - 1) * (n - 2) / 2) as i32)
        }
        Family::B => 2.0 * e_tau(n * (n - 1), 6) * eta.powi((-n * (n - 1)) as i32),
        Family::Bv => {
            let eta2 = theta::dedekind_eta(tau.scale(2.0));
            2.0 * e_tau((n - 1) * (2 * n - 1), 12)
                * eta.powi((-(n - 1) * (n - 1)) as i32)
                * eta2.powi(-(n as i32 - 1))
        }
        Family::C => e_tau(n * (2 * n + 1), 12) * eta.powi((-n * (n - 1)) as i32),
        Family::Cv => {
            let eta_half = theta::dedekind_eta(tau.scale(0.5));
            e_tau((2 * n - 1) * (2 * n + 1), 24)
                * eta.powi((-(n - 1) * (n - 1)) as i32)
                * eta_half.powi(-(n as i32 - 1))
        }
        Family::BC => {
            let eta2 = theta::dedekind_eta(tau.scale(2.0));
            e_tau(n * (n + 1), 6) * eta.powi((-n * (n - 1)) as i32) * eta2.powi(-(n as i32))
        }
        Family::D => 4.0 * e_tau(n * (2 * n - 1), 12) * eta.powi((-n * (n - 2)) as i32),
    }
}

/// `i^k` for any integer `k`.
pub(crate) fn unit_imag_power(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `det[M_j(z_k)]` over the given configuration.
pub fn m_matrix_determinant(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    z: &[Complex64],
) -> Complex64 {
    let n = spec.n_particles();
    assert_eq!(z.len(), n, "expected {} points, got {}", n, z.len());
    let mut mat = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, point) in z.iter().enumerate() {
        for row in 0..n {
            mat[row * n + col] = m_function(spec, geom, row + 1, *point);
        }
    }
    determinant(n, &mut mat)
}

/// Closed form for `det[M_j(z_k)]`: phase · a(τ) · [extra ϑ factor for A] ·
/// `W(z/L;τ)`. For the A family the extra factor is `ϑ0(Σz_j/L;τ)` at even N
/// and `ϑ3(Σz_j/L;τ)` at odd N, taken with the full complex coordinates.
pub fn macdonald_identity_rhs(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    z: &[Complex64],
) -> Complex64 {
    let n = spec.n_particles();
    assert_eq!(z.len(), n, "expected {} points, got {}", n, z.len());
    let tau = geom.tau();
    let scaled: Vec<Complex64> = z.iter().map(|p| p / geom.length()).collect();
    let w = macdonald_denominator(spec, &scaled, tau);
    let a = prefactor_a(spec, tau);
    match spec.family() {
        Family::A => {
            let total: Complex64 = scaled.iter().sum();
            if n.is_multiple_of(2) {
                unit_imag_power(n as i64 / 2) * a * theta::eval(ThetaIndex::Zero, total, tau) * w
            } else {
                unit_imag_power(-((n as i64 - 1) / 2))
                    * a
                    * theta::eval(ThetaIndex::Three, total, tau)
                    * w
            }
        }
        Family::B | Family::Bv | Family::D => a * w,
        Family::C | Family::Cv | Family::BC => unit_imag_power(-(n as i64)) * a * w,
    }
}

/// Relative difference between the determinant and its closed form,
/// `|LHS − RHS| / max(|LHS|, |RHS|, 1e−30)`.
pub fn macdonald_identity_residual(
    spec: RootSystemSpec,
    geom: DomainGeometry,
    z: &[Complex64],
) -> f64 {
    let lhs = m_matrix_determinant(spec, geom, z);
    let rhs = macdonald_identity_rhs(spec, geom, z);
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0e-30)
}
