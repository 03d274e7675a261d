//! Reproducible parallel sampling, unbiased cumulant estimation with
//! bootstrap errors, and the Poisson/Gaussian convergence diagnostics.
//!
//! Reproducibility contract: sample `i` of a run draws from a ChaCha
//! stream indexed by `i` under the run seed, so results are bit-identical
//! for a fixed seed regardless of the worker count or scheduling. The
//! bootstrap uses a reserved stream family derived from the same seed.

use std::fmt;

use ewens_core::ewens::{enumerate_ewens, ewens_sample, EwensParam};
use ewens_core::perm::Permutation;
use ewens_core::stats::DashedPattern;
use ewens_core::{rat_int, Rat};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Bootstrap resample count for standard errors.
pub const BOOTSTRAP_REPS: usize = 200;

/// Default verdict threshold in standard-error multiples.
pub const DEFAULT_SE_MULTIPLE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub enum McError {
    BadTheta(f64),
    NoSamples,
    GridTooSmall(usize),
    MaxOrder(usize),
}

impl fmt::Display for McError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McError::BadTheta(t) => write!(f, "theta {t} must be positive and finite"),
            McError::NoSamples => write!(f, "at least one sample required"),
            McError::GridTooSmall(k) => write!(f, "size grid needs >= 3 points, got {k}"),
            McError::MaxOrder(m) => write!(f, "cumulant order {m} outside 1..=4"),
        }
    }
}

impl std::error::Error for McError {}

/// One Monte-Carlo run: permutation size, measure parameter, sample count,
/// seed and worker count (0 = library default). Output depends only on
/// `(n, theta, samples, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub theta: f64,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl RunConfig {
    pub fn new(n: usize, theta: f64, samples: usize, seed: u64) -> Self {
        RunConfig {
            n,
            theta,
            samples,
            seed,
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// The RNG for one unit of work: stream `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Bootstrap RNG family, kept disjoint from the sampling streams by a
/// fixed offset in the upper half of the stream space.
fn bootstrap_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1u64 << 63) | replicate);
    rng
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return job();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(job)
}

/// Draws `cfg.samples` Ewens permutations and maps each through `stat`;
/// results are ordered by sample index.
pub fn run_map<T, F>(cfg: &RunConfig, stat: F) -> Result<Vec<T>, McError>
where
    T: Send,
    F: Fn(&Permutation) -> T + Sync,
{
    if cfg.samples == 0 {
        return Err(McError::NoSamples);
    }
    let theta = EwensParam::from_f64(cfg.theta).map_err(|_| McError::BadTheta(cfg.theta))?;
    let (n, seed) = (cfg.n, cfg.seed);
    Ok(run_in_pool(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i as u64);
                let sigma = ewens_sample(n, &theta, &mut rng).expect("validated parameters");
                stat(&sigma)
            })
            .collect()
    }))
}

/// First four k-statistics (unbiased cumulant estimators) of a sample.
/// Orders that need more data than provided come out as zero.
pub fn k_statistics(xs: &[f64]) -> [f64; 4] {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return [0.0; 4];
    }
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let k2 = if xs.len() > 1 { n / (n - 1.0) * m2 } else { 0.0 };
    let k3 = if xs.len() > 2 {
        n * n / ((n - 1.0) * (n - 2.0)) * m3
    } else {
        0.0
    };
    let k4 = if xs.len() > 3 {
        n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
            / ((n - 1.0) * (n - 2.0) * (n - 3.0))
    } else {
        0.0
    };
    [mean, k2, k3, k4]
}

/// Bootstrap standard errors of the first four k-statistics.
pub fn bootstrap_k_se(xs: &[f64], seed: u64) -> [f64; 4] {
    let n = xs.len();
    if n < 2 {
        return [0.0; 4];
    }
    let reps: Vec<[f64; 4]> = (0..BOOTSTRAP_REPS as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = bootstrap_rng(seed, b);
            let resample: Vec<f64> = (0..n).map(|_| xs[rng.gen_range(0..n)]).collect();
            k_statistics(&resample)
        })
        .collect();
    std_of_columns(&reps)
}

fn std_of_columns(rows: &[[f64; 4]]) -> [f64; 4] {
    let b = rows.len() as f64;
    let mut out = [0.0; 4];
    for c in 0..4 {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / b;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (b - 1.0);
        out[c] = var.sqrt();
    }
    out
}

/// One estimated cumulant with its bootstrap standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Unbiased estimates of the first `max_order <= 4` cumulants with
/// bootstrap standard errors. A constant sample yields zero higher
/// cumulants with zero error.
pub fn estimate_cumulants(
    xs: &[f64],
    max_order: usize,
    seed: u64,
) -> Result<Vec<CumulantEstimate>, McError> {
    if !(1..=4).contains(&max_order) {
        return Err(McError::MaxOrder(max_order));
    }
    if xs.is_empty() {
        return Err(McError::NoSamples);
    }
    let k = k_statistics(xs);
    let se = if xs.iter().all(|&x| x == xs[0]) {
        [0.0; 4]
    } else {
        bootstrap_k_se(xs, seed)
    };
    Ok((0..max_order)
        .map(|c| CumulantEstimate {
            order: c + 1,
            value: k[c],
            std_error: se[c],
            samples: xs.len(),
        })
        .collect())
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Sample covariance (denominator n-1) of paired samples.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1.0)
}

/// Bootstrap standard error of the sample covariance of paired samples.
pub fn bootstrap_cov_se(xs: &[f64], ys: &[f64], seed: u64) -> f64 {
    let n = xs.len();
    let reps: Vec<f64> = (0..BOOTSTRAP_REPS as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = bootstrap_rng(seed, b);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let rx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
            let ry: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
            covariance(&rx, &ry)
        })
        .collect();
    let b = reps.len() as f64;
    let mean = reps.iter().sum::<f64>() / b;
    (reps.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0)).sqrt()
}

/// Total-variation distance between the empirical law of nonnegative
/// integer samples and a Poisson law, truncated at `lambda + 10 sqrt(lambda)`
/// with the two tails compared in one lump.
pub fn tv_to_poisson(xs: &[f64], lambda: f64) -> f64 {
    let n = xs.len() as f64;
    let cut = (lambda + 10.0 * lambda.sqrt()).ceil() as usize;
    let mut counts = vec![0u64; cut + 1];
    let mut tail = 0u64;
    for &x in xs {
        let k = x as usize;
        if k <= cut {
            counts[k] += 1;
        } else {
            tail += 1;
        }
    }
    let mut tv = 0.0;
    let mut pmf = (-lambda).exp();
    let mut cdf = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        if k > 0 {
            pmf *= lambda / k as f64;
        }
        cdf += pmf;
        tv += (c as f64 / n - pmf).abs();
    }
    tv += (tail as f64 / n - (1.0 - cdf)).abs();
    tv / 2.0
}

/// Draws from a Poisson law by inversion; used to calibrate attainable
/// total-variation thresholds at a given sample size.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let mut u: f64 = rng.gen();
    let mut pmf = (-lambda).exp();
    let mut k = 0u64;
    loop {
        if u < pmf || k > 10_000 {
            return k;
        }
        u -= pmf;
        k += 1;
        pmf *= lambda / k as f64;
    }
}

/// Poisson-limit diagnostic: first two cumulants within `se_multiple`
/// standard errors of `lambda`, and total variation below the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub lambda: f64,
    pub tv: f64,
    pub tv_threshold: f64,
    pub cumulants: Vec<CumulantEstimate>,
    pub k1_ok: bool,
    pub k2_ok: bool,
    pub tv_ok: bool,
    pub verdict: bool,
    pub se_multiple: f64,
}

pub fn poisson_diagnostic(
    xs: &[f64],
    lambda: f64,
    tv_threshold: f64,
    se_multiple: f64,
    seed: u64,
) -> Result<PoissonReport, McError> {
    if xs.is_empty() {
        return Err(McError::NoSamples);
    }
    if lambda == 0.0 {
        // Degenerate limit: the statistic must vanish identically.
        let all_zero = xs.iter().all(|&x| x == 0.0);
        return Ok(PoissonReport {
            lambda,
            tv: if all_zero { 0.0 } else { 1.0 },
            tv_threshold,
            cumulants: estimate_cumulants(xs, 4, seed)?,
            k1_ok: all_zero,
            k2_ok: all_zero,
            tv_ok: all_zero,
            verdict: all_zero,
            se_multiple,
        });
    }
    let cumulants = estimate_cumulants(xs, 4, seed)?;
    let within = |c: &CumulantEstimate| (c.value - lambda).abs() <= se_multiple * c.std_error;
    let k1_ok = within(&cumulants[0]);
    let k2_ok = within(&cumulants[1]);
    let tv = tv_to_poisson(xs, lambda);
    let tv_ok = tv < tv_threshold;
    Ok(PoissonReport {
        lambda,
        tv,
        tv_threshold,
        cumulants,
        k1_ok,
        k2_ok,
        tv_ok,
        verdict: k1_ok && k2_ok && tv_ok,
        se_multiple,
    })
}

/// Per-size summary inside a Gaussian-limit diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPoint {
    pub n: usize,
    pub samples: usize,
    pub k2: f64,
    pub k2_se: f64,
    pub k3: f64,
    pub k3_se: f64,
    pub k4: f64,
    pub k4_se: f64,
}

/// Gaussian-limit diagnostic over a size grid: skewness and excess
/// kurtosis of the normalized statistic compatible with zero, and the
/// variance stable across consecutive sizes. A constant sample yields a
/// degenerate report with no verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianReport {
    pub points: Vec<GaussianPoint>,
    pub k3_ok: bool,
    pub k4_ok: bool,
    pub k2_stable: bool,
    pub verdict: Option<bool>,
    pub se_multiple: f64,
}

pub fn gaussian_diagnostic(
    samples_by_n: &[(usize, Vec<f64>)],
    se_multiple: f64,
    seed: u64,
) -> Result<GaussianReport, McError> {
    if samples_by_n.is_empty() || samples_by_n.iter().any(|(_, xs)| xs.is_empty()) {
        return Err(McError::NoSamples);
    }
    let mut points = Vec::new();
    let mut degenerate = false;
    for (n, xs) in samples_by_n {
        if xs.iter().all(|&x| x == xs[0]) {
            degenerate = true;
        }
        let k = k_statistics(xs);
        let se = bootstrap_k_se(xs, seed ^ (*n as u64));
        points.push(GaussianPoint {
            n: *n,
            samples: xs.len(),
            k2: k[1],
            k2_se: se[1],
            k3: k[2],
            k3_se: se[2],
            k4: k[3],
            k4_se: se[3],
        });
    }
    if degenerate {
        return Ok(GaussianReport {
            points,
            k3_ok: false,
            k4_ok: false,
            k2_stable: false,
            verdict: None,
            se_multiple,
        });
    }
    let k3_ok = points
        .iter()
        .all(|p| p.k3.abs() <= se_multiple * p.k3_se);
    let k4_ok = points
        .iter()
        .all(|p| p.k4.abs() <= se_multiple * p.k4_se);
    let k2_stable = points.windows(2).all(|w| {
        let joint = (w[0].k2_se.powi(2) + w[1].k2_se.powi(2)).sqrt();
        (w[0].k2 - w[1].k2).abs() <= se_multiple * joint
    });
    Ok(GaussianReport {
        points,
        k3_ok,
        k4_ok,
        k2_stable,
        verdict: Some(k3_ok && k4_ok && k2_stable),
        se_multiple,
    })
}

/// One grid point in a limiting-variance fit.
#[derive(Debug, Clone, PartialEq)]
pub struct VariancePoint {
    pub n: usize,
    pub samples: usize,
    /// `N^(1-2(p-q)) * Var(count)`, the finite-size variance on the
    /// limiting scale.
    pub scaled_variance: f64,
    pub std_error: f64,
}

/// Limiting-variance estimate for a dashed pattern: the scaled variances
/// are fitted to `V + c/N` (cumulants are rational in the size, so the
/// leading correction is a simple pole) and the fit extrapolates to the
/// limit, with exact small-size variances tabulated alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate {
    pub v: f64,
    pub std_error: f64,
    pub correction: f64,
    pub points: Vec<VariancePoint>,
    pub exact_small_n: Vec<(usize, String)>,
}

impl VarianceEstimate {
    /// How many standard errors above zero the estimate sits.
    pub fn positivity_margin(&self) -> f64 {
        if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            self.v / self.std_error
        }
    }
}

pub fn estimate_v(
    pattern: &DashedPattern,
    n_grid: &[usize],
    base: &RunConfig,
) -> Result<VarianceEstimate, McError> {
    if n_grid.len() < 3 {
        return Err(McError::GridTooSmall(n_grid.len()));
    }
    let counter = crate::fastpat::pattern_counter(pattern);
    let p = pattern.size();
    let q = pattern.num_adjacencies();
    let scale_exp = 1i32 - 2 * (p as i32 - q as i32);
    let mut points = Vec::new();
    for (gi, &n) in n_grid.iter().enumerate() {
        let cfg = RunConfig {
            n,
            // Stream reuse across grid points is harmless statistically but
            // would correlate the fit residuals; shift the seed per point.
            seed: base.seed.wrapping_add(gi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ..base.clone()
        };
        let xs: Vec<f64> = run_map(&cfg, |sigma| counter(sigma) as f64)?;
        let scale = (n as f64).powi(scale_exp);
        let k = k_statistics(&xs);
        let se = bootstrap_k_se(&xs, cfg.seed);
        points.push(VariancePoint {
            n,
            samples: xs.len(),
            scaled_variance: scale * k[1],
            std_error: scale * se[1],
        });
    }
    // Least squares for v(N) = V + c/N.
    let (v, correction, weights) = fit_constant_plus_pole(&points);
    let se = weights
        .iter()
        .zip(&points)
        .map(|(w, pt)| (w * pt.std_error).powi(2))
        .sum::<f64>()
        .sqrt();
    let exact_small_n = exact_variance_table(pattern, base.theta);
    Ok(VarianceEstimate {
        v,
        std_error: se,
        correction,
        points,
        exact_small_n,
    })
}

/// Ordinary least squares of `y = V + c x` with `x = 1/N`; returns
/// `(V, c, weights)` where `V = sum weights[i] * y[i]`.
fn fit_constant_plus_pole(points: &[VariancePoint]) -> (f64, f64, Vec<f64>) {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.scaled_variance).collect();
    let sx = xs.iter().sum::<f64>();
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let det = m * sxx - sx * sx;
    // weights for the intercept: (sxx - sx * x_i)/det
    let weights: Vec<f64> = xs.iter().map(|x| (sxx - sx * x) / det).collect();
    let v = weights.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>();
    let c = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (m * x - sx) * y / det)
        .sum::<f64>();
    (v, c, weights)
}

/// Exact pattern-count variances by exhaustive enumeration for sizes up to
/// 7, when the measure parameter converts exactly.
fn exact_variance_table(pattern: &DashedPattern, theta: f64) -> Vec<(usize, String)> {
    let Some(theta) = Rat::from_float(theta) else {
        return Vec::new();
    };
    let Ok(param) = EwensParam::new(theta) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for n in pattern.size()..=7 {
        let mut mean = Rat::zero();
        let mut second = Rat::zero();
        for (sigma, w) in enumerate_ewens(n, &param).expect("n <= 7") {
            let count = rat_int(ewens_core::stats::count_dashed(&sigma, pattern) as i64);
            mean += &w * &count;
            second += &w * &count * &count;
        }
        let var = second - &mean * &mean;
        out.push((n, format!("{var}")));
    }
    out
}

/// Scaled variance values `n^(1-2(p-q)) Var` from the exact table, for
/// cross-checks against the Monte-Carlo fit.
pub fn exact_scaled_variance(pattern: &DashedPattern, theta: f64, n: usize) -> Option<f64> {
    let theta = Rat::from_float(theta)?;
    let param = EwensParam::new(theta).ok()?;
    let mut mean = Rat::zero();
    let mut second = Rat::zero();
    for (sigma, w) in enumerate_ewens(n, &param).ok()? {
        let count = rat_int(ewens_core::stats::count_dashed(&sigma, pattern) as i64);
        mean += &w * &count;
        second += &w * &count * &count;
    }
    let var = (second - &mean * &mean).to_f64()?;
    let p = pattern.size() as i32;
    let q = pattern.num_adjacencies() as i32;
    Some((n as f64).powi(1 - 2 * (p - q)) * var)
}
