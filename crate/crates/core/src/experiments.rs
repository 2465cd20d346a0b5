//! Seeded randomized experiments behind the lower bounds: random spectra
//! with the largest-gap witness, the Bernstein tail of the centered field,
//! and Rademacher sums over lacunary spectra.
//!
//! Every trial draws from its own stream `derive_seed(seed, trial)`, so
//! reports are pure functions of the configuration.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng as _;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::{make_lacunary, spectrum_draws, spectrum_from_draws, FrequencySet};
use crate::par;
use crate::rng::{derive_seed, rng_from_seed};
use crate::trigpoly::TrigPolynomial;

pub const DEFAULT_REPORT_CONSTANT: f64 = 0.2;

const DECOMPOSITION_TOL: f64 = 1e-8;
const BB_REL_TOL: f64 = 1e-3;
const BB_NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XiMode {
    #[default]
    Equispaced,
    Random,
}

impl std::str::FromStr for XiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equispaced" => Ok(XiMode::Equispaced),
            "random" => Ok(XiMode::Random),
            other => Err(Error::InvalidArgument(format!("unknown xi mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear interpolation between order statistics. Empty input gives NaN.
    pub fn of(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |q: f64| -> f64 {
            if v.is_empty() {
                return f64::NAN;
            }
            let pos = q * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Quantiles {
            min: at(0.0),
            q10: at(0.1),
            median: at(0.5),
            q90: at(0.9),
            max: at(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    RandomSpectrum {
        #[serde(rename = "K")]
        k: usize,
        #[serde(rename = "N")]
        n: usize,
        m: usize,
        trials: usize,
        seed: u64,
        xi_mode: XiMode,
        c: f64,
    },
    Hoeffding {
        n: usize,
        b: f64,
        m: usize,
        trials: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    /// Trials counted in `success_fraction` (those passing the per-trial
    /// hypothesis check).
    pub eligible_trials: usize,
    pub success_fraction: f64,
    pub ratio_quantiles: Quantiles,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpectrumTrial {
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub q_set: FrequencySet,
    pub q_card: usize,
    pub card_in_range: bool,
    pub sup_dc: f64,
    pub sup_ds: f64,
    pub decomposition_error: f64,
    pub x_star: f64,
    pub min_distance_to_xi: f64,
    pub f_x_star: f64,
    pub max_f_xi: f64,
    pub ratio: f64,
    pub bound_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpectrumReport {
    pub summary: ExperimentSummary,
    pub card_in_range_fraction: f64,
    /// `f(x*) = |Q(w)|` held exactly in every trial.
    pub f_star_exact: bool,
    /// `max(sup D^c, sup D^s) / (N ln K)^{1/2}` over all trials.
    pub c0_measured: f64,
    /// Smallest `ratio / (N / ln K)^{1/2}` over eligible trials.
    pub c_measured: f64,
    pub per_trial: Vec<RandomSpectrumTrial>,
}

/// `a(p) = p / (1 − p)`.
pub fn a_of_p(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Largest `m` allowed for given `K`, `N`: `⌊K (ln K)^{1/2} / N^{1/2}⌋`.
pub fn max_points(k: usize, n: usize) -> usize {
    let kf = k as f64;
    (kf * kf.ln().sqrt() / (n as f64).sqrt()).floor() as usize
}

fn check_spectrum_hypotheses(k: usize, n: usize, m: usize, trials: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Hypothesis(format!("K = {k} must be ≥ 2")));
    }
    let ln_k = (k as f64).ln();
    if (n as f64) < ln_k {
        return Err(Error::Hypothesis(format!("ln K ≤ N fails: ln {k} = {ln_k:.4} > N = {n}")));
    }
    if 4 * n > k {
        return Err(Error::Hypothesis(format!("N ≤ K/4 fails: N = {n}, K/4 = {}", k as f64 / 4.0)));
    }
    if n < 16 {
        return Err(Error::Hypothesis(format!("N ≥ 16 fails: N = {n}")));
    }
    let bound = (k as f64) * ln_k.sqrt() / (n as f64).sqrt();
    if m == 0 || m as f64 > bound {
        return Err(Error::Hypothesis(format!(
            "1 ≤ m ≤ K (ln K)^(1/2) N^(-1/2) fails: m = {m}, bound = {bound:.4}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    Ok(())
}

/// `Σ_{k=1}^{K} e^{ikx}` in closed form.
pub fn dirichlet_one_sided(k: usize, x: f64) -> Complex64 {
    let half = 0.5 * x.rem_euclid(TAU);
    let s = half.sin();
    if s.abs() < 1e-12 {
        // x ≡ 0 (mod 2π)
        return Complex64::new(k as f64, 0.0);
    }
    let amp = (k as f64 * half).sin() / s;
    Complex64::from_polar(amp, (k as f64 + 1.0) * half)
}

/// `Σ_{k=1}^{K} c_k e^{i k x^l}` at `x^l = lπ/(2K)`, `l = 1..4K`, by one
/// FFT of length `4K`.
fn values_on_quarter_grid(k: usize, coeffs: &[f64], planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let len = 4 * k;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, &c) in coeffs.iter().enumerate() {
        buf[i + 1] = Complex64::new(c, 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    (1..=len).map(|l| buf[l % len]).collect()
}

/// Points `ξ^1..ξ^m` in `[0, 2π)`, sorted.
pub fn place_points(m: usize, mode: XiMode, seed: u64) -> Vec<f64> {
    match mode {
        XiMode::Equispaced => (0..m).map(|j| TAU * j as f64 / m as f64).collect(),
        XiMode::Random => {
            let mut rng = rng_from_seed(seed);
            let mut v: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * TAU).collect();
            v.sort_by(f64::total_cmp);
            v
        }
    }
}

/// Midpoint of the first largest gap of sorted points on the circle,
/// counting the wrap-around gap `[ξ^m, ξ^1 + 2π]`. Returns `(x*, gap)`.
pub fn largest_gap_midpoint(sorted: &[f64]) -> (f64, f64) {
    assert!(!sorted.is_empty());
    let m = sorted.len();
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..m {
        let next = if j + 1 < m { sorted[j + 1] } else { sorted[0] + TAU };
        let gap = next - sorted[j];
        if gap > best.1 {
            best = (j, gap);
        }
    }
    let x = (sorted[best.0] + 0.5 * best.1).rem_euclid(TAU);
    (x, best.1)
}

/// Distance on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn random_spectrum_trial(
    k: usize,
    n: usize,
    m: usize,
    xi_mode: XiMode,
    c: f64,
    seed: u64,
) -> Result<RandomSpectrumTrial> {
    let p = n as f64 / k as f64;
    let a = a_of_p(p);
    let draws = spectrum_draws(k, seed);
    let q = spectrum_from_draws(&draws, p);
    let q_card = q.cardinality();

    let eta: Vec<f64> = draws.iter().map(|&w| if w <= p { 1.0 } else { -a }).collect();
    let indicator: Vec<f64> = draws.iter().map(|&w| if w <= p { 1.0 } else { 0.0 }).collect();
    let mut planner = FftPlanner::new();
    let field = values_on_quarter_grid(k, &eta, &mut planner);
    let direct = values_on_quarter_grid(k, &indicator, &mut planner);

    let mut sup_dc = 0.0f64;
    let mut sup_ds = 0.0f64;
    let mut decomposition_error = 0.0f64;
    for (l, (g, d)) in field.iter().zip(&direct).enumerate() {
        sup_dc = sup_dc.max(g.re.abs());
        sup_ds = sup_ds.max(g.im.abs());
        let x = (l + 1) as f64 * PI / (2.0 * k as f64);
        let via = (g + dirichlet_one_sided(k, x) * a) / (1.0 + a);
        decomposition_error = decomposition_error.max((via - d).norm());
    }
    if decomposition_error > DECOMPOSITION_TOL * (1.0 + k as f64) {
        return Err(Error::Invariant(format!(
            "centered-field decomposition off by {decomposition_error:e}"
        )));
    }

    let xi = place_points(m, xi_mode, derive_seed(seed, u64::MAX));
    let (x_star, _) = largest_gap_midpoint(&xi);
    let min_distance_to_xi = xi
        .iter()
        .map(|&x| circle_distance(x, x_star))
        .fold(f64::INFINITY, f64::min);

    let freqs = q.values_1d().expect("random spectra are one-dimensional");
    let f_at = |x: f64| -> Complex64 {
        let t = x - x_star;
        freqs.iter().map(|&kk| Complex64::cis(kk as f64 * t)).sum()
    };
    let f_x_star = f_at(x_star).re;
    let max_f_xi = xi.iter().map(|&x| f_at(x).norm()).fold(0.0, f64::max);
    let ratio = if max_f_xi > 0.0 {
        f_x_star / max_f_xi
    } else if q_card == 0 {
        0.0
    } else {
        f64::INFINITY
    };
    let bound_rhs = c * (n as f64 / (k as f64).ln()).sqrt();

    Ok(RandomSpectrumTrial {
        seed,
        k,
        n,
        p,
        q_set: q,
        q_card,
        card_in_range: 2 * q_card >= n && 2 * q_card <= 3 * n,
        sup_dc,
        sup_ds,
        decomposition_error,
        x_star,
        min_distance_to_xi,
        f_x_star,
        max_f_xi,
        ratio,
        bound_rhs,
    })
}

/// Random-spectrum lower-bound experiment. Trials with `|Q(w)|` outside
/// `[N/2, 3N/2]` are recorded but excluded from the success fraction.
pub fn random_spectrum_experiment(
    k: usize,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    xi_mode: XiMode,
) -> Result<RandomSpectrumReport> {
    random_spectrum_experiment_with(k, n, m, trials, seed, xi_mode, DEFAULT_REPORT_CONSTANT)
}

pub fn random_spectrum_experiment_with(
    k: usize,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    xi_mode: XiMode,
    c: f64,
) -> Result<RandomSpectrumReport> {
    check_spectrum_hypotheses(k, n, m, trials)?;
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("reporting constant c = {c} must be ≥ 0")));
    }
    let per_trial = par::map_range(trials, |t| {
        random_spectrum_trial(k, n, m, xi_mode, c, derive_seed(seed, t as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let eligible: Vec<&RandomSpectrumTrial> = per_trial.iter().filter(|t| t.card_in_range).collect();
    let successes = eligible.iter().filter(|t| t.ratio >= t.bound_rhs).count();
    let ratios: Vec<f64> = per_trial.iter().map(|t| t.ratio).collect();
    let ln_k = (k as f64).ln();
    let c0_measured = per_trial
        .iter()
        .map(|t| t.sup_dc.max(t.sup_ds))
        .fold(0.0, f64::max)
        / (n as f64 * ln_k).sqrt();
    let c_measured = eligible
        .iter()
        .map(|t| t.ratio)
        .fold(f64::INFINITY, f64::min)
        / (n as f64 / ln_k).sqrt();

    Ok(RandomSpectrumReport {
        summary: ExperimentSummary {
            trials,
            eligible_trials: eligible.len(),
            success_fraction: if eligible.is_empty() {
                0.0
            } else {
                successes as f64 / eligible.len() as f64
            },
            ratio_quantiles: Quantiles::of(&ratios),
            config: ExperimentConfig::RandomSpectrum {
                k,
                n,
                m,
                trials,
                seed,
                xi_mode,
                c,
            },
        },
        card_in_range_fraction: eligible.len() as f64 / trials as f64,
        f_star_exact: per_trial.iter().all(|t| t.f_x_star == t.q_card as f64),
        c0_measured,
        c_measured,
        per_trial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCheck {
    #[serde(rename = "K")]
    pub k: usize,
    pub p: f64,
    pub y: f64,
    pub trials: usize,
    /// The node `x^1 = π/(2K)` at which the field is sampled.
    pub node: f64,
    pub empirical: f64,
    pub bound: f64,
    pub std_error: f64,
    /// `empirical ≤ bound + 3 std_error`.
    pub holds: bool,
}

/// `2 exp(−y² / (2(a(p) K + y/3)))`.
pub fn bernstein_bound(k: usize, p: f64, y: f64) -> f64 {
    let a = a_of_p(p);
    2.0 * (-(y * y) / (2.0 * (a * k as f64 + y / 3.0))).exp()
}

/// Monte Carlo estimate of `P(|D^c(x^1, p, w)| ≥ y)` against the Bernstein
/// bound.
pub fn bernstein_tail_check(k: usize, p: f64, y: f64, trials: usize, seed: u64) -> Result<BernsteinCheck> {
    if k == 0 || trials == 0 {
        return Err(Error::InvalidArgument("K and trials must be ≥ 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1)")));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("y = {y} must be positive")));
    }
    let a = a_of_p(p);
    let node = PI / (2.0 * k as f64);
    let cosines: Vec<f64> = (1..=k).map(|j| (j as f64 * node).cos()).collect();
    let hits = par::map_range(trials, |t| {
        let draws = spectrum_draws(k, derive_seed(seed, t as u64));
        let v: f64 = draws
            .iter()
            .zip(&cosines)
            .map(|(&w, &c)| if w <= p { c } else { -a * c })
            .sum();
        v.abs() >= y
    })
    .into_iter()
    .filter(|&h| h)
    .count();
    let empirical = hits as f64 / trials as f64;
    let std_error = (empirical * (1.0 - empirical) / trials as f64).sqrt();
    let bound = bernstein_bound(k, p, y);
    Ok(BernsteinCheck {
        k,
        p,
        y,
        trials,
        node,
        empirical,
        bound,
        std_error,
        holds: empirical <= bound + 3.0 * std_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingTrial {
    pub seed: u64,
    pub signs: Vec<i8>,
    pub sup: f64,
    pub sup_error_bound: Option<f64>,
    pub sample_max: f64,
    pub l2: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingReport {
    pub summary: ExperimentSummary,
    /// `‖f‖_2 = n^{1/2}` held exactly in every trial.
    pub l2_exact: bool,
    /// `(n / ln m)^{1/2}`.
    pub shape: f64,
    /// `median ratio / shape`.
    pub proportionality: f64,
    /// Smallest `‖f‖_∞ / n` over trials.
    pub c_b: f64,
    pub per_trial: Vec<HoeffdingTrial>,
}

/// Rademacher sums `Σ r_j e^{i k_j x}` over the lacunary spectrum of ratio
/// `b`, compared on `m` equispaced points. Success means `ratio ≥ 1`.
pub fn lacunary_hoeffding_experiment(n: usize, b: f64, m: usize, trials: usize, seed: u64) -> Result<HoeffdingReport> {
    if m == 0 || trials == 0 {
        return Err(Error::InvalidArgument("m and trials must be ≥ 1".into()));
    }
    let lac = make_lacunary(n, b)?;
    let freqs: Vec<i64> = lac.values_1d().expect("lacunary sets are one-dimensional").to_vec();
    let xi = place_points(m, XiMode::Equispaced, seed);

    let per_trial = par::map_range(trials, |t| -> Result<HoeffdingTrial> {
        let tseed = derive_seed(seed, t as u64);
        let mut rng = rng_from_seed(tseed);
        let signs: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let f = TrigPolynomial::from_terms(
            1,
            freqs
                .iter()
                .zip(&signs)
                .map(|(&k, &s)| (vec![k], Complex64::new(s as f64, 0.0))),
        )?;
        let sample_max = xi.iter().map(|&x| f.eval_at(&[x]).norm()).fold(0.0, f64::max);
        let (est, _) = f.sup_branch_bound(BB_REL_TOL, BB_NODE_BUDGET)?;
        // the best value found is attained, so it can only improve on the samples
        let sup = est.value.max(sample_max);
        let l2 = f.norm_l2().value;
        Ok(HoeffdingTrial {
            seed: tseed,
            signs,
            sup,
            sup_error_bound: est.error_bound,
            sample_max,
            l2,
            ratio: sup / sample_max,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let ratios: Vec<f64> = per_trial.iter().map(|t| t.ratio).collect();
    let quantiles = Quantiles::of(&ratios);
    let shape = (n as f64 / (m as f64).ln()).sqrt();
    let successes = per_trial.iter().filter(|t| t.ratio >= 1.0).count();
    Ok(HoeffdingReport {
        summary: ExperimentSummary {
            trials,
            eligible_trials: trials,
            success_fraction: successes as f64 / trials as f64,
            ratio_quantiles: quantiles,
            config: ExperimentConfig::Hoeffding { n, b, m, trials, seed },
        },
        l2_exact: per_trial.iter().all(|t| t.l2 == (n as f64).sqrt()),
        shape,
        proportionality: quantiles.median / shape,
        c_b: per_trial.iter().map(|t| t.sup).fold(f64::INFINITY, f64::min) / n as f64,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(q.min, 1.0);
        assert_eq!(q.median, 3.0);
        assert_eq!(q.max, 5.0);
        assert!((q.q10 - 1.4).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_closed_form_matches_sum() {
        for &x in &[0.0, 0.3, 1.7, PI, 5.9, TAU] {
            let direct: Complex64 = (1..=37).map(|k| Complex64::cis(k as f64 * x)).sum();
            assert!((dirichlet_one_sided(37, x) - direct).norm() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn quarter_grid_matches_direct_sum() {
        let k = 12;
        let c: Vec<f64> = (1..=k).map(|j| (j as f64).sin()).collect();
        let vals = values_on_quarter_grid(k, &c, &mut FftPlanner::new());
        for l in 1..=4 * k {
            let x = l as f64 * PI / (2.0 * k as f64);
            let d: Complex64 = c
                .iter()
                .enumerate()
                .map(|(i, &ci)| Complex64::cis((i + 1) as f64 * x) * ci)
                .sum();
            assert!((vals[l - 1] - d).norm() < 1e-10);
        }
    }

    #[test]
    fn largest_gap_handles_wraparound() {
        let (x, gap) = largest_gap_midpoint(&[1.0, 2.0, 5.0]);
        assert!((gap - 3.0).abs() < 1e-12);
        assert!((x - 3.5).abs() < 1e-12);
        // wrap gap [3, 1 + 2π] is the largest
        let (x, gap) = largest_gap_midpoint(&[1.0, 2.0, 3.0]);
        assert!((gap - (TAU - 2.0)).abs() < 1e-12);
        assert!((x - (3.0 + 0.5 * (TAU - 2.0)).rem_euclid(TAU)).abs() < 1e-12);
        // ties go to the first gap
        let pts = place_points(8, XiMode::Equispaced, 0);
        let (x, _) = largest_gap_midpoint(&pts);
        assert!((x - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn gap_midpoint_distance() {
        for seed in 0..20 {
            let pts = place_points(50, XiMode::Random, seed);
            let (x, gap) = largest_gap_midpoint(&pts);
            let d = pts.iter().map(|&p| circle_distance(p, x)).fold(f64::INFINITY, f64::min);
            assert!(d >= 0.5 * gap - 1e-12);
            assert!(gap >= TAU / 50.0 - 1e-12);
        }
        let pts = place_points(64, XiMode::Equispaced, 0);
        let (x, _) = largest_gap_midpoint(&pts);
        let d = pts.iter().map(|&p| circle_distance(p, x)).fold(f64::INFINITY, f64::min);
        assert!(d >= PI / 64.0 - 1e-12);
    }

    #[test]
    fn hypotheses_are_named() {
        let msg = |r: Result<RandomSpectrumReport>| match r {
            Err(Error::Hypothesis(s)) => s,
            other => panic!("expected hypothesis error, got {other:?}"),
        };
        assert!(msg(random_spectrum_experiment(1 << 10, 8, 10, 1, 0, XiMode::Equispaced)).contains("N ≥ 16"));
        assert!(msg(random_spectrum_experiment(40, 16, 10, 1, 0, XiMode::Equispaced)).contains("N ≤ K/4"));
        let m = max_points(1 << 10, 16);
        assert!(msg(random_spectrum_experiment(1 << 10, 16, m + 1, 1, 0, XiMode::Equispaced)).contains("m ≤"));
        assert!(random_spectrum_experiment(1 << 10, 16, m, 1, 0, XiMode::Equispaced).is_ok());
    }

    #[test]
    fn random_spectrum_small_run() {
        let k = 1 << 10;
        let m = max_points(k, 16);
        let r = random_spectrum_experiment(k, 16, m, 12, 3, XiMode::Equispaced).unwrap();
        assert!(r.f_star_exact);
        for t in &r.per_trial {
            assert_eq!(t.q_card, t.q_set.cardinality());
            assert!(t.ratio >= 1.0);
            assert!(t.decomposition_error < 1e-8);
            assert!(t.min_distance_to_xi >= PI / m as f64 - 1e-12);
        }
        assert!((0.0..=1.0).contains(&r.summary.success_fraction));
        let again = random_spectrum_experiment(k, 16, m, 12, 3, XiMode::Equispaced).unwrap();
        assert_eq!(r, again);
        let random = random_spectrum_experiment(k, 16, m, 4, 3, XiMode::Random).unwrap();
        assert!(random.f_star_exact);
    }

    #[test]
    fn bernstein_bound_formula() {
        assert_eq!(bernstein_bound(1024, 1.0 / 64.0, 0.0), 2.0);
        // a = 1/3, aK = 3, y = 3: 2 exp(-9 / 8)
        assert!((bernstein_bound(9, 0.25, 3.0) - 2.0 * (-9.0f64 / 8.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn bernstein_far_tail_is_empty() {
        let r = bernstein_tail_check(256, 1.0 / 16.0, 512.0, 200, 1).unwrap();
        assert_eq!(r.empirical, 0.0);
        assert!(r.holds);
        assert!(bernstein_tail_check(256, 0.1, 0.0, 10, 1).is_err());
    }

    #[test]
    fn hoeffding_small_run() {
        let r = lacunary_hoeffding_experiment(8, 2.0, 64, 10, 5).unwrap();
        assert!(r.l2_exact);
        assert_eq!(r.summary.success_fraction, 1.0);
        for t in &r.per_trial {
            assert!(t.sup >= t.l2 - 1e-12);
            assert!(t.sup <= 8.0 + 1e-9);
        }
        let one = lacunary_hoeffding_experiment(1, 3.0, 5, 3, 0).unwrap();
        for t in &one.per_trial {
            assert!((t.ratio - 1.0).abs() < 1e-12);
        }
    }
}
