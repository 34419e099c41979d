//! Jacobi theta functions and the Dedekind eta function for complex
//! arguments and upper-half-plane modular parameter.
//!
//! Conventions (nome `q = e^{iπτ}`, `Im τ > 0`):
//!
//! ```text
//! ϑ0(v;τ) = 1 + 2 Σ_{n≥1} (−1)^n q^{n²} cos(2nπv)
//! ϑ1(v;τ) = 2 Σ_{n≥1} (−1)^{n−1} q^{(n−1/2)²} sin((2n−1)πv)
//! ϑ2(v;τ) = 2 Σ_{n≥1} q^{(n−1/2)²} cos((2n−1)πv)
//! ϑ3(v;τ) = 1 + 2 Σ_{n≥1} q^{n²} cos(2nπv)
//! ```
//!
//! Evaluation reduces the argument into the fundamental strip using the
//! quasi-periodicity relations (`v → v+1` and `v → v+τ`), and switches to
//! Jacobi's imaginary transformation `τ → −1/τ` when `Im τ` is small, so the
//! working nome stays far from the unit circle.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Im τ` below which [`eval`] routes through [`imaginary_transform`].
/// Both branches stay accurate on `Im τ ∈ [0.3, 3]`, which the tests use
/// for cross-checks.
pub const TRANSFORM_THRESHOLD: f64 = 0.5;

/// ln(1e−18): target for the absolute series tail after argument reduction.
const LN_TAIL: f64 = -41.446_531_673_892_82;

/// Hard cap on the series length; reached only for pathological arguments.
const MAX_TERMS: usize = 10_000;

/// Modular parameter constrained to the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularTau(Complex64);

impl ModularTau {
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidInput(format!(
                "modular parameter must be finite, got {value}"
            )));
        }
        if value.im <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "modular parameter must satisfy Im τ > 0, got {value}"
            )));
        }
        Ok(ModularTau(value))
    }

    /// Purely imaginary `τ = it`, the case arising from rectangular domains.
    pub fn imaginary(t: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, t))
    }

    pub fn get(self) -> Complex64 {
        self.0
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    /// `−1/τ`, which is again in the upper half-plane.
    pub fn neg_inverse(self) -> Self {
        ModularTau(-Complex64::new(1.0, 0.0) / self.0)
    }

    /// `kτ` for `k > 0`.
    pub fn scale(self, k: f64) -> Self {
        assert!(k > 0.0 && k.is_finite(), "scale factor must be positive");
        ModularTau(self.0 * k)
    }
}

/// Label of one of the four classical theta functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaIndex {
    Zero,
    One,
    Two,
    Three,
}

impl ThetaIndex {
    pub const ALL: [ThetaIndex; 4] = [
        ThetaIndex::Zero,
        ThetaIndex::One,
        ThetaIndex::Two,
        ThetaIndex::Three,
    ];

    pub fn from_u8(mu: u8) -> Result<Self> {
        match mu {
            0 => Ok(ThetaIndex::Zero),
            1 => Ok(ThetaIndex::One),
            2 => Ok(ThetaIndex::Two),
            3 => Ok(ThetaIndex::Three),
            _ => Err(Error::InvalidInput(format!(
                "theta index must be one of 0,1,2,3, got {mu}"
            ))),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            ThetaIndex::Zero => 0,
            ThetaIndex::One => 1,
            ThetaIndex::Two => 2,
            ThetaIndex::Three => 3,
        }
    }

    /// Sign picked up under `v → v+1`: −1 for ϑ1, ϑ2 and +1 for ϑ0, ϑ3.
    fn unit_shift_sign(self) -> f64 {
        match self {
            ThetaIndex::One | ThetaIndex::Two => -1.0,
            ThetaIndex::Zero | ThetaIndex::Three => 1.0,
        }
    }

    /// Sign in `ϑ(v+τ) = ±e^{−(2v+τ)πi} ϑ(v)`: −1 for ϑ0, ϑ1 and +1 for ϑ2, ϑ3.
    fn tau_shift_sign(self) -> f64 {
        match self {
            ThetaIndex::Zero | ThetaIndex::One => -1.0,
            ThetaIndex::Two | ThetaIndex::Three => 1.0,
        }
    }

    /// Index swap under `τ → −1/τ` (0 ↔ 2, 1 and 3 fixed).
    fn imaginary_partner(self) -> Self {
        match self {
            ThetaIndex::Zero => ThetaIndex::Two,
            ThetaIndex::Two => ThetaIndex::Zero,
            other => other,
        }
    }
}

/// Result of pulling a theta argument back into the fundamental strip:
/// `ϑ_μ(v;τ) = prefactor · ϑ_μ(v_reduced;τ)` with `v = v_reduced + n + mτ`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedArgument {
    pub v_reduced: Complex64,
    pub prefactor: Complex64,
    /// Lattice shifts `(m, n)` removed along `τ` and `1`.
    pub shifts: (i64, i64),
}

/// Splits off the lattice part of `v` so that `|Im v_reduced| ≤ Im τ / 2`
/// (up to rounding) and `|Re v_reduced| ≤ 1/2`, accumulating the exact
/// quasi-periodicity prefactor.
///
/// Panics on non-finite `v` and when more than 10⁶ lattice shifts would be
/// required, which signals pathological input.
pub fn reduce(mu: ThetaIndex, v: Complex64, tau: ModularTau) -> ReducedArgument {
    assert!(
        v.re.is_finite() && v.im.is_finite(),
        "theta argument must be finite, got {v}"
    );
    let t = tau.get();
    let m = (v.im / t.im).round();
    assert!(
        m.abs() <= 1.0e6,
        "argument reduction needs {m} shifts along tau; input is pathological"
    );
    let v1 = v - m * t;
    let n = v1.re.round();
    assert!(
        n.abs() <= 1.0e6,
        "argument reduction needs {n} unit shifts; input is pathological"
    );
    let v_red = v1 - n;

    // v = (v_red + n) + mτ, so undoing m τ-shifts from w = v_red + n gives
    // ϑ(v) = ε^m e^{−iπ(2mw + m²τ)} ϑ(w) and the n unit shifts give s^n.
    let w = v_red + n;
    let phase = (-I * PI * (2.0 * m * w + m * m * t)).exp();
    let sign_m = if m as i64 % 2 == 0 {
        1.0
    } else {
        mu.tau_shift_sign()
    };
    let sign_n = if n as i64 % 2 == 0 {
        1.0
    } else {
        mu.unit_shift_sign()
    };
    ReducedArgument {
        v_reduced: v_red,
        prefactor: sign_m * sign_n * phase,
        shifts: (m as i64, n as i64),
    }
}

/// Series length needed for an absolute tail below 1e−18, given the reduced
/// argument. The bound `|q|^{(n−1/2)²} e^{2πn|Im v|}` dominates all four series.
fn series_length(im_tau: f64, im_v_abs: f64) -> usize {
    let ln_q = -PI * im_tau;
    let mut n = 1usize;
    while n < MAX_TERMS {
        let x = n as f64;
        if (x - 0.5) * (x - 0.5) * ln_q + 2.0 * PI * x * im_v_abs < LN_TAIL {
            break;
        }
        n += 1;
    }
    n + 2
}

/// Plain truncated series at the given (already reduced) argument.
///
/// Each term is assembled as a single complex exponential (nome power and
/// trigonometric factor combined), so no intermediate under/overflows even
/// when one factor alone would leave the f64 range.
fn series(mu: ThetaIndex, v: Complex64, tau: Complex64) -> Complex64 {
    let n_max = series_length(tau.im, v.im.abs());
    let mut sum = Complex64::new(0.0, 0.0);
    // Smallest terms first.
    for n in (1..=n_max).rev() {
        let x = n as f64;
        let term = match mu {
            ThetaIndex::Zero | ThetaIndex::Three => {
                let base = I * PI * (tau * (x * x));
                let osc = I * PI * (2.0 * x) * v;
                let pair = (base + osc).exp() + (base - osc).exp();
                if mu == ThetaIndex::Zero && n % 2 == 1 {
                    -pair
                } else {
                    pair
                }
            }
            ThetaIndex::One | ThetaIndex::Two => {
                let h = x - 0.5;
                let base = I * PI * (tau * (h * h));
                let osc = I * PI * (2.0 * x - 1.0) * v;
                if mu == ThetaIndex::Two {
                    (base + osc).exp() + (base - osc).exp()
                } else {
                    // 2 q^{h²} sin((2n−1)πv) = −i (e^{base+osc} − e^{base−osc})
                    let d = -I * ((base + osc).exp() - (base - osc).exp());
                    if n % 2 == 1 {
                        d
                    } else {
                        -d
                    }
                }
            }
        };
        sum += term;
    }
    let constant = match mu {
        ThetaIndex::Zero | ThetaIndex::Three => Complex64::new(1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    };
    constant + sum
}

/// Series evaluation with argument reduction but without the modular
/// transformation. Accurate whenever `Im τ` is not small.
pub fn eval_direct(mu: ThetaIndex, v: Complex64, tau: ModularTau) -> Complex64 {
    let r = reduce(mu, v, tau);
    r.prefactor * series(mu, r.v_reduced, tau.get())
}

/// `ϑ_μ(v;τ)`.
///
/// Uses the direct series (after argument reduction) for `Im τ ≥ 0.5` and
/// Jacobi's imaginary transformation below that, so the relative error stays
/// at the 1e−12 level across the accessible parameter range.
pub fn eval(mu: ThetaIndex, v: Complex64, tau: ModularTau) -> Complex64 {
    if tau.im() < TRANSFORM_THRESHOLD && tau.neg_inverse().im() > tau.im() {
        imaginary_transform(mu, v, tau)
    } else {
        eval_direct(mu, v, tau)
    }
}

/// `ϑ_μ(v;τ)` computed through `τ → −1/τ`:
///
/// ```text
/// ϑ0(v;τ) = e^{iπ/4}  τ^{−1/2} e^{−iπv²/τ} ϑ2(v/τ; −1/τ)
/// ϑ1(v;τ) = e^{3iπ/4} τ^{−1/2} e^{−iπv²/τ} ϑ1(v/τ; −1/τ)
/// ϑ2(v;τ) = e^{iπ/4}  τ^{−1/2} e^{−iπv²/τ} ϑ0(v/τ; −1/τ)
/// ϑ3(v;τ) = e^{iπ/4}  τ^{−1/2} e^{−iπv²/τ} ϑ3(v/τ; −1/τ)
/// ```
///
/// (principal square root; for τ in the upper half-plane this agrees with the
/// usual `(−iτ)^{−1/2}` normalization).
pub fn imaginary_transform(mu: ThetaIndex, v: Complex64, tau: ModularTau) -> Complex64 {
    let t = tau.get();
    let partner = mu.imaginary_partner();
    let eighth = match mu {
        ThetaIndex::One => (I * (3.0 * PI / 4.0)).exp(),
        _ => (I * (PI / 4.0)).exp(),
    };
    let gauss = (-I * PI * v * v / t).exp();
    eighth / t.sqrt() * gauss * eval_direct(partner, v / t, tau.neg_inverse())
}

/// `ϑ1(v;τ)` through the infinite product
///
/// ```text
/// ϑ1(v;τ) = 2 q^{1/4} sin(πv) Π_{j≥1} (1 − 2q^{2j}cos(2πv) + q^{4j})(1 − q^{2j}),
/// ```
///
/// truncated when a factor differs from 1 by less than 1e−16. Independent of
/// the series path, so it doubles as an oracle for [`eval`] with μ = 1.
pub fn theta1_product(v: Complex64, tau: ModularTau) -> Complex64 {
    assert!(
        v.re.is_finite() && v.im.is_finite(),
        "theta argument must be finite, got {v}"
    );
    let t = tau.get();
    let q2 = (2.0 * I * PI * t).exp(); // q²
    let cos2 = (2.0 * PI * v).cos();
    let mut product = 2.0 * (I * PI * t / 4.0).exp() * (PI * v).sin();
    let mut q2j = Complex64::new(1.0, 0.0);
    for _ in 0..100_000 {
        q2j *= q2;
        let deviation = q2j.norm() * (2.0 * cos2.norm() + q2j.norm() + 1.0);
        product *= (1.0 - 2.0 * q2j * cos2 + q2j * q2j) * (1.0 - q2j);
        if deviation < 1.0e-16 {
            break;
        }
    }
    product
}

/// Dedekind eta function `η(τ) = e^{iπτ/12} Π_{n≥1} (1 − e^{2πinτ})`,
/// truncated once the factors are within 1e−17 of 1. Real and positive for
/// purely imaginary τ.
pub fn dedekind_eta(tau: ModularTau) -> Complex64 {
    let p = (2.0 * I * PI * tau.get()).exp();
    let mut product = (I * PI * tau.get() / 12.0).exp();
    let mut pn = Complex64::new(1.0, 0.0);
    for _ in 0..1_000_000 {
        pn *= p;
        product *= 1.0 - pn;
        if pn.norm() < 1.0e-17 {
            break;
        }
    }
    product
}

/// `log η(τ)` for purely imaginary τ, where η is real and positive.
pub fn log_eta_imag(tau: ModularTau) -> f64 {
    debug_assert!(tau.get().re == 0.0);
    // log η = −πt/12 + Σ log(1 − e^{−2πnt})
    let t = tau.im();
    let mut sum = -PI * t / 12.0;
    let mut n = 1.0;
    loop {
        let x = (-2.0 * PI * n * t).exp();
        if x < 1.0e-18 {
            break;
        }
        sum += (1.0 - x).ln();
        n += 1.0;
    }
    sum
}

/// `∂ϑ1/∂v at v = 0`, which equals `2π η(τ)³`.
pub fn theta1_prime_zero(tau: ModularTau) -> Complex64 {
    let eta = dedekind_eta(tau);
    2.0 * PI * eta * eta * eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1.0e-30)
    }

    /// Widest-range direct summation used as a cross-check: no reduction,
    /// symmetric index range, extended term count. Exponents are combined
    /// before exponentiating so huge/tiny factors never meet as 0·∞.
    fn brute_series(mu: ThetaIndex, v: Complex64, tau: Complex64, terms: usize) -> Complex64 {
        let term = |a: f64, k: f64| (I * PI * (tau * a + v * k)).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        for n in -(terms as i64)..=(terms as i64) {
            let x = n as f64;
            sum += match mu {
                ThetaIndex::Zero => {
                    (if n % 2 == 0 { 1.0 } else { -1.0 }) * term(x * x, 2.0 * x)
                }
                ThetaIndex::Three => term(x * x, 2.0 * x),
                ThetaIndex::One => {
                    (if n % 2 == 0 { 1.0 } else { -1.0 })
                        * I
                        * term((x - 0.5) * (x - 0.5), 2.0 * x - 1.0)
                }
                ThetaIndex::Two => term((x - 0.5) * (x - 0.5), 2.0 * x - 1.0),
            };
        }
        sum
    }

    #[test]
    fn known_zeros() {
        let tau = ModularTau::imaginary(1.0).unwrap();
        assert_eq!(eval(ThetaIndex::One, c(0.0, 0.0), tau).norm(), 0.0);
        let tau7 = ModularTau::imaginary(0.7).unwrap();
        assert!(eval(ThetaIndex::Two, c(0.5, 0.0), tau7).norm() < 1e-14);
    }

    #[test]
    fn oracle_values() {
        // Reference values from 40-digit mpmath evaluations.
        let v = eval(
            ThetaIndex::Three,
            c(0.3, 0.2),
            ModularTau::imaginary(1.1).unwrap(),
        );
        let want = c(0.962_943_652_708_005, -0.096_922_611_068_677_18);
        assert!(rel_err(v, want) < 1e-14, "rel err {}", rel_err(v, want));

        let v = eval(
            ThetaIndex::One,
            c(0.25, 0.0),
            ModularTau::imaginary(1.0).unwrap(),
        );
        assert!(rel_err(v, c(0.643_589_764_038_585_9, 0.0)) < 1e-14);

        let v = eval(
            ThetaIndex::One,
            c(0.5, 0.0),
            ModularTau::imaginary(1.0).unwrap(),
        );
        assert!(rel_err(v, c(0.913_579_138_156_116_8, 0.0)) < 1e-14);
    }

    #[test]
    fn eta_values() {
        let eta_i = dedekind_eta(ModularTau::imaginary(1.0).unwrap());
        assert!(rel_err(eta_i, c(0.768_225_422_326_056_6, 0.0)) < 1e-14);
        let eta_2i = dedekind_eta(ModularTau::imaginary(2.0).unwrap());
        assert!(rel_err(eta_2i, c(0.592_382_781_332_415_8, 0.0)) < 1e-14);
        let d = theta1_prime_zero(ModularTau::imaginary(1.3).unwrap());
        assert!(rel_err(d, c(2.261_455_105_559_486_3, 0.0)) < 1e-14);
    }

    #[test]
    fn eta_functional_equation() {
        // η(−1/τ) = (−iτ)^{1/2} η(τ)
        let tau = ModularTau::imaginary(0.7).unwrap();
        let lhs = dedekind_eta(tau.neg_inverse());
        let rhs = (-I * tau.get()).sqrt() * dedekind_eta(tau);
        assert!(rel_err(lhs, rhs) < 1e-13);
        assert!(rel_err(lhs, c(0.822_186_447_762_493_4, 0.0) * (-I * tau.get()).sqrt()) < 1e-13);
    }

    #[test]
    fn eta_large_tau_tends_to_leading_factor() {
        let tau = ModularTau::imaginary(40.0).unwrap();
        let eta = dedekind_eta(tau);
        let leading = (I * PI * tau.get() / 12.0).exp();
        assert!(rel_err(eta, leading) < 1e-14);
    }

    #[test]
    fn log_eta_matches_product() {
        for t in [0.3, 0.5, 1.0, 2.0, 7.0] {
            let tau = ModularTau::imaginary(t).unwrap();
            let direct = dedekind_eta(tau).re.ln();
            assert!((log_eta_imag(tau) - direct).abs() < 1e-13 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn reduce_examples() {
        let tau = ModularTau::imaginary(0.9).unwrap();
        let v0 = c(0.21, 0.13);

        let r = reduce(ThetaIndex::One, v0 + 1.0, tau);
        assert_eq!(r.shifts, (0, 1));
        assert!((r.v_reduced - v0).norm() < 1e-15);
        assert!((r.prefactor - c(-1.0, 0.0)).norm() < 1e-15);

        let r = reduce(ThetaIndex::Three, v0 + tau.get(), tau);
        assert_eq!(r.shifts, (1, 0));
        let want = (-(2.0 * v0 + tau.get()) * PI * I).exp();
        assert!(rel_err(r.prefactor, want) < 1e-14);
    }

    #[test]
    fn reduction_reconstructs_series() {
        // ϑ(v + n + mτ) must match prefactor·ϑ(v) for |m|,|n| ≤ 5.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let tau = ModularTau::imaginary(rng.gen_range(0.6..2.5)).unwrap();
            let v = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.4..0.4) * tau.im());
            let m = rng.gen_range(-5i64..=5);
            let n = rng.gen_range(-5i64..=5);
            for mu in ThetaIndex::ALL {
                let shifted = v + n as f64 + m as f64 * tau.get();
                let direct = eval_direct(mu, shifted, tau);
                let r = reduce(mu, shifted, tau);
                let rebuilt = r.prefactor * eval_direct(mu, r.v_reduced, tau);
                assert!(
                    rel_err(direct, rebuilt) < 1e-12,
                    "mu={mu:?} m={m} n={n}: {}",
                    rel_err(direct, rebuilt)
                );
            }
        }
    }

    #[test]
    fn reduction_matches_brute_force_series() {
        let tau = ModularTau::imaginary(1.0).unwrap();
        let v = c(0.1, 5.3);
        for mu in ThetaIndex::ALL {
            let fast = eval(mu, v, tau);
            let brute = brute_series(mu, v, tau.get(), 60);
            assert!(rel_err(fast, brute) < 1e-12, "mu={mu:?}");
        }
    }

    #[test]
    fn parity() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let tau = ModularTau::imaginary(rng.gen_range(0.5..3.0)).unwrap();
            let v = c(
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-0.7..0.7) * tau.im(),
            );
            let odd = eval(ThetaIndex::One, -v, tau) + eval(ThetaIndex::One, v, tau);
            assert!(odd.norm() <= 1e-13 * eval(ThetaIndex::One, v, tau).norm().max(1e-30));
            for mu in [ThetaIndex::Zero, ThetaIndex::Two, ThetaIndex::Three] {
                let a = eval(mu, v, tau);
                let b = eval(mu, -v, tau);
                assert!(rel_err(a, b) < 1e-13);
            }
        }
    }

    #[test]
    fn product_agrees_with_series() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let tau = ModularTau::imaginary(rng.gen_range(0.5..5.0)).unwrap();
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.45..0.45));
            let a = eval(ThetaIndex::One, v, tau);
            let b = theta1_product(v, tau);
            assert!(rel_err(a, b) < 1e-12, "{}", rel_err(a, b));
        }
        // sin factor forces an exact zero
        assert_eq!(
            theta1_product(c(0.0, 0.0), ModularTau::imaginary(2.0).unwrap()).norm(),
            0.0
        );
    }

    #[test]
    fn imaginary_transform_consistency() {
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..1000 {
            let tau = ModularTau::imaginary(rng.gen_range(0.3..3.0)).unwrap();
            let v = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.3..0.3) * tau.im());
            for mu in ThetaIndex::ALL {
                let a = eval_direct(mu, v, tau);
                let b = imaginary_transform(mu, v, tau);
                assert!(rel_err(a, b) < 1e-10, "mu={mu:?} {}", rel_err(a, b));
            }
        }
    }

    #[test]
    fn transform_oracle_small_tau() {
        // ϑ3(0.4+0.1i; 0.2i), reference from 40-digit series of the left side.
        let tau = ModularTau::imaginary(0.2).unwrap();
        let got = eval(ThetaIndex::Three, c(0.4, 0.1), tau);
        let want = c(0.062_661_379_242_658_48, -0.192_851_895_311_825_14);
        assert!(rel_err(got, want) < 1e-12, "{}", rel_err(got, want));
        // ϑ1(0.2; 0.1i) = e^{3πi/4} τ^{−1/2} e^{−πiv²/τ} ϑ1(v/τ; −1/τ)
        let tau1 = ModularTau::imaginary(0.1).unwrap();
        let v = c(0.2, 0.0);
        let lhs = eval(ThetaIndex::One, v, tau1);
        let rhs = (I * 3.0 * PI / 4.0).exp() / tau1.get().sqrt()
            * (-I * PI * v * v / tau1.get()).exp()
            * eval(ThetaIndex::One, v / tau1.get(), tau1.neg_inverse());
        assert!(rel_err(lhs, rhs) < 1e-11);
        // ϑ0(0; 0.3i) = e^{iπ/4} τ^{−1/2} ϑ2(0; −1/τ)
        let tau3 = ModularTau::imaginary(0.3).unwrap();
        let lhs = eval(ThetaIndex::Zero, c(0.0, 0.0), tau3);
        let rhs = (I * PI / 4.0).exp() / tau3.get().sqrt()
            * eval(ThetaIndex::Two, c(0.0, 0.0), tau3.neg_inverse());
        assert!(rel_err(lhs, rhs) < 1e-12);
    }

    #[test]
    fn positivity_on_real_sections() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..1000 {
            let tau = ModularTau::imaginary(rng.gen_range(0.4..3.0)).unwrap();
            let x1 = rng.gen_range(1e-3..1.0 - 1e-3);
            assert!(eval(ThetaIndex::One, c(x1, 0.0), tau).re > 0.0);
            let x2 = rng.gen_range(-0.5 + 1e-3..0.5 - 1e-3);
            assert!(eval(ThetaIndex::Two, c(x2, 0.0), tau).re > 0.0);
            let x = rng.gen_range(-3.0..3.0);
            assert!(eval(ThetaIndex::Zero, c(x, 0.0), tau).re > 0.0);
            assert!(eval(ThetaIndex::Three, c(x, 0.0), tau).re > 0.0);
        }
    }

    #[test]
    fn large_tau_asymptotics() {
        let tau = ModularTau::imaginary(30.0).unwrap();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..100 {
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            assert!((eval(ThetaIndex::Zero, v, tau) - 1.0).norm() < 1e-12);
            assert!((eval(ThetaIndex::Three, v, tau) - 1.0).norm() < 1e-12);
        }
        // ϑ1(v;τ) ≈ 2 e^{iπτ/4} sin(πv) in the same regime
        let v = c(0.3, 0.2);
        let approx = 2.0 * (I * PI * tau.get() / 4.0).exp() * (PI * v).sin();
        assert!(rel_err(eval(ThetaIndex::One, v, tau), approx) < 1e-12);
    }

    #[test]
    fn theta1_prime_finite_difference() {
        let tau = ModularTau::imaginary(1.3).unwrap();
        let h = 1e-5;
        let fd = (eval(ThetaIndex::One, c(h, 0.0), tau) - eval(ThetaIndex::One, c(-h, 0.0), tau))
            / (2.0 * h);
        assert!(rel_err(fd, theta1_prime_zero(tau)) < 1e-8);
    }

    #[test]
    fn invalid_tau_rejected() {
        assert!(ModularTau::imaginary(0.0).is_err());
        assert!(ModularTau::imaginary(-1.0).is_err());
        assert!(ModularTau::new(c(f64::NAN, 1.0)).is_err());
        assert!(ThetaIndex::from_u8(4).is_err());
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn non_finite_argument_panics() {
        let tau = ModularTau::imaginary(1.0).unwrap();
        eval(ThetaIndex::One, c(f64::NAN, 0.0), tau);
    }
}

