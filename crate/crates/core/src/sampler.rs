//! Exact sampling of the N-point projection processes by the chain rule,
//! plus histogram estimators and a Pearson χ² comparison for Monte Carlo
//! validation.
//!
//! The chain rule samples points one at a time: the first from `K(z,z)/N`,
//! and after `k` points are fixed, the next from the squared norm of the
//! feature vector's residual after orthogonal projection onto the span of the
//! fixed points' feature vectors (divided by `N−k`). Every conditional is
//! dominated pointwise by `K(z,z)`, so a single grid-estimated envelope
//! serves every step of the rejection loop.

use crate::dpp::{Configuration, KernelContext};
use crate::error::{Error, Result};
use crate::root_system::DomainGeometry;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Knobs for the rejection sampler. The defaults match the intended
/// operating point; the envelope is a grid maximum of the intensity times
/// `envelope_safety`.
#[derive(Debug, Clone, Copy)]
pub struct SamplerOptions {
    pub seed: u64,
    pub envelope_grid: usize,
    pub envelope_safety: f64,
    pub max_rejections: usize,
}

impl SamplerOptions {
    pub fn new(seed: u64) -> Self {
        SamplerOptions {
            seed,
            envelope_grid: 256,
            envelope_safety: 1.5,
            max_rejections: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.envelope_safety <= 1.0 {
            return Err(Error::InvalidInput(format!(
                "envelope_safety must exceed 1, got {}",
                self.envelope_safety
            )));
        }
        if self.max_rejections < 1_000 {
            return Err(Error::InvalidInput(format!(
                "max_rejections must be at least 1000, got {}",
                self.max_rejections
            )));
        }
        if self.envelope_grid < 16 {
            return Err(Error::InvalidInput(format!(
                "envelope_grid must be at least 16, got {}",
                self.envelope_grid
            )));
        }
        Ok(())
    }
}

/// Squared-norm threshold (relative to `K(z,z)`) below which an accepted
/// point is treated as a duplicate and redrawn.
const SINGULAR_PIVOT: f64 = 1.0e-12;

/// Grid maximum of the intensity over the fundamental domain.
fn envelope(ctx: &KernelContext, grid: usize) -> f64 {
    let geom = ctx.geom();
    let (hx, hy) = (geom.length() / grid as f64, geom.width() / grid as f64);
    let mut max = 0.0f64;
    for iy in 0..grid {
        let y = (iy as f64 + 0.5) * hy;
        for ix in 0..grid {
            let x = (ix as f64 + 0.5) * hx;
            max = max.max(ctx.intensity(Complex64::new(x, y)));
        }
    }
    max
}

/// Draws one exact N-point configuration. Deterministic for a fixed seed.
pub fn sample_configuration(ctx: &KernelContext, opts: &SamplerOptions) -> Result<Configuration> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let env = opts.envelope_safety * envelope(ctx, opts.envelope_grid);
    sample_with_rng(ctx, opts, env, &mut rng)
}

/// Draws `count` configurations from one RNG stream seeded once.
pub fn sample_many(
    ctx: &KernelContext,
    opts: &SamplerOptions,
    count: usize,
) -> Result<Vec<Configuration>> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let env = opts.envelope_safety * envelope(ctx, opts.envelope_grid);
    (0..count)
        .map(|_| sample_with_rng(ctx, opts, env, &mut rng))
        .collect()
}

fn sample_with_rng(
    ctx: &KernelContext,
    opts: &SamplerOptions,
    env: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Configuration> {
    let geom = ctx.geom();
    let n = ctx.n_points();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut rejections = 0usize;

    while points.len() < n {
        if rejections > opts.max_rejections {
            return Err(Error::RejectionBudgetExhausted {
                rejections: opts.max_rejections,
            });
        }
        let z = Complex64::new(
            rng.gen_range(0.0..geom.length()),
            rng.gen_range(0.0..geom.width()),
        );
        let accept_draw: f64 = rng.gen();
        let phi = ctx.features(z);
        let intensity: f64 = phi.iter().map(|f| f.norm_sqr()).sum();
        // Project out the span of the accepted points' feature vectors.
        let coeffs: Vec<Complex64> = basis
            .iter()
            .map(|e| e.iter().zip(&phi).map(|(b, f)| b.conj() * f).sum())
            .collect();
        let projected: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let conditional = (intensity - projected).max(0.0);
        if conditional > env {
            return Err(Error::EnvelopeViolation {
                value: conditional,
                envelope: env,
            });
        }
        if accept_draw * env >= conditional {
            rejections += 1;
            continue;
        }
        // Gram–Schmidt residual of the accepted feature vector.
        let mut residual = phi;
        for (c, e) in coeffs.iter().zip(&basis) {
            for (r, b) in residual.iter_mut().zip(e) {
                *r -= c * b;
            }
        }
        let norm_sqr: f64 = residual.iter().map(|r| r.norm_sqr()).sum();
        if norm_sqr < SINGULAR_PIVOT * intensity.max(1.0) {
            // numerically coincident with an accepted point: redraw
            rejections += 1;
            continue;
        }
        let inv_norm = 1.0 / norm_sqr.sqrt();
        for r in residual.iter_mut() {
            *r *= inv_norm;
        }
        basis.push(residual);
        points.push(z);
    }
    Configuration::new(points, geom)
}

/// Histogram of points on an `nx × ny` grid over the fundamental domain,
/// row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCounts {
    pub nx: usize,
    pub ny: usize,
    pub counts: Vec<f64>,
    pub geom: DomainGeometry,
}

impl BinnedCounts {
    pub fn cell_area(&self) -> f64 {
        self.geom.area() / (self.nx * self.ny) as f64
    }
}

/// Bins all points of all samples. Every configuration must share the
/// geometry of the first.
pub fn bin_counts(samples: &[Configuration], bins: (usize, usize)) -> Result<BinnedCounts> {
    let (nx, ny) = bins;
    if samples.is_empty() {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidInput("bin counts must be positive".into()));
    }
    let geom = samples[0].geom();
    let mut counts = vec![0.0; nx * ny];
    for sample in samples {
        if sample.geom() != geom {
            return Err(Error::InvalidInput(
                "samples were drawn over different geometries".into(),
            ));
        }
        for p in sample.points() {
            let ix = ((p.re / geom.length() * nx as f64) as usize).min(nx - 1);
            let iy = ((p.im / geom.width() * ny as f64) as usize).min(ny - 1);
            counts[iy * nx + ix] += 1.0;
        }
    }
    Ok(BinnedCounts {
        nx,
        ny,
        counts,
        geom,
    })
}

/// Histogram estimate of the one-point intensity, normalized so that the
/// grid integrates to N (counts / samples / cell area).
pub fn estimate_one_point(
    samples: &[Configuration],
    bins: (usize, usize),
) -> Result<BinnedCounts> {
    let mut grid = bin_counts(samples, bins)?;
    let scale = 1.0 / (samples.len() as f64 * grid.cell_area());
    for c in grid.counts.iter_mut() {
        *c *= scale;
    }
    Ok(grid)
}

/// Expected per-bin counts for `n_samples` draws, integrating `K(z,z)` over
/// each cell with a 2×2 Gauss rule.
pub fn expected_counts_from_kernel(
    ctx: &KernelContext,
    bins: (usize, usize),
    n_samples: usize,
) -> BinnedCounts {
    let (nx, ny) = bins;
    let geom = ctx.geom();
    let (hx, hy) = (geom.length() / nx as f64, geom.width() / ny as f64);
    let offset = 0.5 / 3.0_f64.sqrt();
    let mut counts = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let (cx, cy) = ((ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy);
            let mut cell = 0.0;
            for sx in [-1.0, 1.0] {
                for sy in [-1.0, 1.0] {
                    cell += ctx.intensity(Complex64::new(
                        cx + sx * offset * hx,
                        cy + sy * offset * hy,
                    ));
                }
            }
            counts[iy * nx + ix] = n_samples as f64 * cell / 4.0 * hx * hy;
        }
    }
    BinnedCounts {
        nx,
        ny,
        counts,
        geom,
    }
}

/// Pearson χ² comparison of observed against expected counts.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub significance: f64,
    pub pass: bool,
}

/// Pearson statistic over the grid, with bins of expected count below 5
/// pooled together (and folded into the smallest regular bin if the pool
/// itself stays below 5). Passes when the p-value is at least the
/// significance level.
pub fn chi_square_report(
    observed: &BinnedCounts,
    expected: &BinnedCounts,
    significance: f64,
) -> Result<ChiSquareReport> {
    if observed.nx != expected.nx || observed.ny != expected.ny {
        return Err(Error::ShapeMismatch {
            left: (observed.nx, observed.ny),
            right: (expected.nx, expected.ny),
        });
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (o, e) in observed.counts.iter().zip(&expected.counts) {
        if *e < 5.0 {
            pool_obs += o;
            pool_exp += e;
        } else {
            cells.push((*o, *e));
        }
    }
    if pool_exp >= 5.0 {
        cells.push((pool_obs, pool_exp));
    } else if pool_exp > 0.0 {
        if let Some(smallest) = cells
            .iter_mut()
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite expectations"))
        {
            smallest.0 += pool_obs;
            smallest.1 += pool_exp;
        }
    }
    if cells.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two bins with expected count >= 5".into(),
        ));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let p_value = chi_square_survival(dof as f64, statistic);
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value,
        significance,
        pass: p_value >= significance,
    })
}

/// Survival function of the χ² distribution with `dof` degrees of freedom:
/// the upper regularized incomplete gamma Q(dof/2, x/2).
pub fn chi_square_survival(dof: f64, x: f64) -> f64 {
    regularized_gamma_upper(dof / 2.0, x / 2.0)
}

/// Q(a,x) by the series for x < a+1 and the continued fraction otherwise.
fn regularized_gamma_upper(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_cf(a, x)
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos, g = 7
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::correlation;
    use crate::quadrature::{self, QuadratureSpec};
    use crate::root_system::{Family, RootSystemSpec};

    fn ctx(family: Family, n: usize, l: f64, w: f64) -> KernelContext {
        KernelContext::new(
            RootSystemSpec::new(family, n).unwrap(),
            DomainGeometry::new(l, w).unwrap(),
        )
    }

    #[test]
    fn options_validation() {
        let mut opts = SamplerOptions::new(1);
        assert!(opts.validate().is_ok());
        opts.envelope_safety = 0.9;
        assert!(opts.validate().is_err());
        opts = SamplerOptions::new(1);
        opts.max_rejections = 10;
        assert!(opts.validate().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let ctx = ctx(Family::C, 4, 4.0, 2.0);
        let opts = SamplerOptions::new(42);
        let a = sample_configuration(&ctx, &opts).unwrap();
        let b = sample_configuration(&ctx, &opts).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.len(), 4);
        for p in a.points() {
            assert!((0.0..4.0).contains(&p.re) && (0.0..2.0).contains(&p.im));
        }
        // distinct seed, distinct draw
        let c2 = sample_configuration(&ctx, &SamplerOptions::new(43)).unwrap();
        assert_ne!(a.points(), c2.points());
    }

    #[test]
    fn sampled_configurations_have_positive_weight() {
        let kc = ctx(Family::D, 3, 3.0, 1.5);
        let samples = sample_many(&kc, &SamplerOptions::new(7), 50).unwrap();
        for s in &samples {
            assert!(crate::dpp::weight_q(kc.spec(), s) > 0.0);
        }
    }

    #[test]
    fn mean_height_matches_quadrature_n1() {
        // For N=1 the density is K(z,z)/1; compare the empirical mean of y.
        let kc = ctx(Family::A, 1, 1.5, 1.0);
        let n_samples = 10_000;
        let samples = sample_many(&kc, &SamplerOptions::new(11), n_samples).unwrap();
        let ys: Vec<f64> = samples.iter().map(|s| s.points()[0].im).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64;
        let se = (var / ys.len() as f64).sqrt();

        let expected = quadrature::integrate_rect(
            |x, y| Complex64::new(y * kc.intensity(Complex64::new(x, y)), 0.0),
            (0.0, 1.5),
            (0.0, 1.0),
            &QuadratureSpec::domain_default(),
        )
        .unwrap()
        .re;
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn intensity_histogram_integrates_to_n() {
        let kc = ctx(Family::B, 3, 2.0, 1.0);
        let samples = sample_many(&kc, &SamplerOptions::new(3), 200).unwrap();
        let grid = estimate_one_point(&samples, (16, 8)).unwrap();
        let mass: f64 = grid.counts.iter().sum::<f64>() * grid.cell_area();
        assert!((mass - 3.0).abs() < 1e-12);
        // single sample: histogram mass equals N as well
        let single = estimate_one_point(&samples[..1], (16, 8)).unwrap();
        let mass1: f64 = single.counts.iter().sum::<f64>() * single.cell_area();
        assert!((mass1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_mismatch_rejected() {
        let a =
            sample_configuration(&ctx(Family::A, 2, 2.0, 1.0), &SamplerOptions::new(1)).unwrap();
        let b =
            sample_configuration(&ctx(Family::A, 2, 1.0, 1.0), &SamplerOptions::new(1)).unwrap();
        assert!(bin_counts(&[a, b], (8, 8)).is_err());
    }

    #[test]
    fn chi_square_zero_when_equal() {
        let kc = ctx(Family::A, 2, 2.0, 1.0);
        let expected = expected_counts_from_kernel(&kc, (6, 6), 500);
        let report = chi_square_report(&expected, &expected, 0.001).unwrap();
        assert_eq!(report.statistic, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn chi_square_shape_mismatch() {
        let kc = ctx(Family::A, 2, 2.0, 1.0);
        let a = expected_counts_from_kernel(&kc, (6, 6), 100);
        let b = expected_counts_from_kernel(&kc, (6, 5), 100);
        assert!(matches!(
            chi_square_report(&a, &b, 0.001),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn chi_square_survival_reference_points() {
        // classic 5% critical values
        assert!((chi_square_survival(1.0, 3.8415) - 0.05).abs() < 1e-3);
        assert!((chi_square_survival(10.0, 18.307) - 0.05).abs() < 1e-3);
        assert!((chi_square_survival(4.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empirical_intensity_matches_kernel() {
        let kc = ctx(Family::A, 4, 2.0, 2.0);
        let n_samples = 4_000;
        let samples = sample_many(&kc, &SamplerOptions::new(17), n_samples).unwrap();
        let observed = bin_counts(&samples, (10, 10)).unwrap();
        let expected = expected_counts_from_kernel(&kc, (10, 10), n_samples);
        let report = chi_square_report(&observed, &expected, 0.001).unwrap();
        assert!(
            report.pass,
            "chi² {} at dof {} (p={})",
            report.statistic, report.dof, report.p_value
        );
    }

    #[test]
    fn monte_carlo_error_shrinks_with_sample_count() {
        let kc = ctx(Family::Cv, 2, 2.0, 1.0);
        let bins = (8, 4);
        let big = 8_000;
        let samples = sample_many(&kc, &SamplerOptions::new(23), big).unwrap();
        let expected = expected_counts_from_kernel(&kc, bins, 1);

        let sup_error = |subset: &[Configuration]| -> f64 {
            let grid = estimate_one_point(subset, bins).unwrap();
            let area = grid.cell_area();
            grid.counts
                .iter()
                .zip(&expected.counts)
                .map(|(got, want)| (got - want / area).abs())
                .fold(0.0f64, f64::max)
        };
        let half = sup_error(&samples[..big / 8]);
        let full = sup_error(&samples);
        // ~1/√S scaling leaves generous room between S/8 and S
        assert!(full < half, "error did not shrink: {half} -> {full}");
    }

    #[test]
    fn pair_distance_histogram_matches_two_point_correlation() {
        // D family, N=2: the single pair distance against the determinant
        // formula, integrated over the domain with a tensor grid.
        let kc = ctx(Family::D, 2, 2.0, 1.0);
        let n_samples = 10_000;
        let samples = sample_many(&kc, &SamplerOptions::new(31), n_samples).unwrap();

        let n_bins = 20;
        let d_max = (4.0f64 + 1.0).sqrt(); // diagonal of the 2×1 cell
        let mut observed = vec![0.0f64; n_bins];
        for s in &samples {
            let d = (s.points()[0] - s.points()[1]).norm();
            let b = ((d / d_max * n_bins as f64) as usize).min(n_bins - 1);
            observed[b] += 1.0;
        }

        // expected: (1/2) ∫∫ 1_bin(|z1−z2|) det[K(z_i,z_j)] over Λ²
        let (gx, gy) = (40usize, 20usize);
        let geom = kc.geom();
        let (hx, hy) = (geom.length() / gx as f64, geom.width() / gy as f64);
        let mut nodes = Vec::with_capacity(gx * gy);
        for iy in 0..gy {
            for ix in 0..gx {
                let z = Complex64::new((ix as f64 + 0.5) * hx, (iy as f64 + 0.5) * hy);
                nodes.push((z, kc.features(z)));
            }
        }
        let mut expected = vec![0.0f64; n_bins];
        let cell = hx * hy;
        for (za, fa) in &nodes {
            let kaa: f64 = fa.iter().map(|v| v.norm_sqr()).sum();
            for (zb, fb) in &nodes {
                let kbb: f64 = fb.iter().map(|v| v.norm_sqr()).sum();
                let kab: Complex64 = fa.iter().zip(fb).map(|(a, b)| a * b.conj()).sum();
                let rho2 = kaa * kbb - kab.norm_sqr();
                let d = (za - zb).norm();
                let b = ((d / d_max * n_bins as f64) as usize).min(n_bins - 1);
                expected[b] += 0.5 * rho2 * cell * cell;
            }
        }
        let total: f64 = expected.iter().sum();
        assert!((total - 1.0).abs() < 1e-3, "pair mass {total}");

        for b in 0..n_bins {
            let e = n_samples as f64 * expected[b];
            let o = observed[b];
            let sigma = e.max(1.0).sqrt();
            assert!(
                (o - e).abs() <= 3.0 * sigma + 3.0,
                "bin {b}: observed {o}, expected {e}, sigma {sigma}"
            );
        }
    }

    #[test]
    fn conditional_density_never_negative() {
        let kc = ctx(Family::BC, 3, 2.0, 1.0);
        let samples = sample_many(&kc, &SamplerOptions::new(5), 20).unwrap();
        for s in &samples {
            // det K over the accepted configuration is a positive density
            assert!(correlation(&kc, s.points()) > 0.0);
        }
    }
}
