//! Sampling recovery in the uniform norm.
//!
//! The recovery operator maps samples `y_j ≈ f(ξ^j)` to a minimizer of
//! `max_j |u(ξ^j) − y_j|` over `u ∈ span(basis)`. The complex modulus is
//! handled by polygonal constraints `Re(e^{−iθ}(u(ξ^j) − y_j)) ≤ t` refined by
//! cutting planes at the angles of the current residuals until the LP bound
//! and the true residual agree.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::discretize::PointSet;
use crate::error::{Error, Result};
use crate::lpsolve::{self, LinearProgram, LpStatus};
use crate::par;
use crate::rng::{derive_seed, rng_from_seed};
use crate::trigpoly::{TrigPolynomial, DEFAULT_GRID_BUDGET, DEFAULT_L1_OVERSAMPLE, DEFAULT_SUP_PASSES};

pub const DEFAULT_FIT_POLYGON_K: usize = 16;
pub const EXACT_TOL: f64 = 1e-8;

const MAX_CUT_ROUNDS: usize = 200;
const CUT_RTOL: f64 = 1e-8;
const CUT_ATOL: f64 = 1e-13;
const EXCHANGE_ROUNDS: usize = 30;
const EXCHANGE_RTOL: f64 = 1e-8;
const EXCHANGE_OVERSAMPLE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub fitted: TrigPolynomial,
    pub coefficients: Vec<Complex64>,
    /// `max_j |fitted(ξ^j) − y_j|`.
    pub sample_residual: f64,
    /// Optimal value of the final polygonal LP; no element of the span does
    /// better than this on the samples.
    pub residual_lower_bound: f64,
    /// `‖f − fitted‖_∞` when the target is known.
    pub sup_error: Option<f64>,
    /// `(2/C1 + 1) d(f, X_N)_∞` when requested.
    pub et3_rhs: Option<f64>,
    pub lp_solves: usize,
    pub constraints: usize,
}

fn check_basis(basis: &[TrigPolynomial]) -> Result<usize> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("basis is empty".into()))?;
    let dim = first.dim();
    if let Some(b) = basis.iter().find(|b| b.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
    }
    Ok(dim)
}

pub(crate) fn combine(basis: &[TrigPolynomial], c: &[Complex64]) -> TrigPolynomial {
    let mut f = TrigPolynomial::zero(basis[0].dim());
    for (b, &ci) in basis.iter().zip(c) {
        f = f.add(&b.scale(ci)).expect("basis dimensions checked");
    }
    f
}

fn random_coefficients(rng: &mut crate::rng::Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Discrete complex Chebyshev fit. `phi[j][n]` is basis function `n` at
/// sample `j`. Returns `(coefficients, residual, lp_bound, solves, rows)`.
fn chebyshev_lp(
    phi: &[Vec<Complex64>],
    y: &[Complex64],
    polygon_k: usize,
) -> Result<(Vec<Complex64>, f64, f64, usize, usize)> {
    let n = phi[0].len();
    let mut obj = vec![0.0; 2 * n + 1];
    obj[2 * n] = -1.0;
    let mut lp = LinearProgram::new(obj)?;
    let mut row = vec![0.0; 2 * n + 1];
    let mut add_cut = |lp: &mut LinearProgram, j: usize, theta: f64| -> Result<()> {
        let rot = Complex64::cis(-theta);
        for (i, &p) in phi[j].iter().enumerate() {
            let v = rot * p;
            row[2 * i] = v.re;
            row[2 * i + 1] = -v.im;
        }
        row[2 * n] = -1.0;
        lp.add_constraint(&row, (rot * y[j]).re)
    };
    for j in 0..phi.len() {
        for r in 0..polygon_k {
            add_cut(&mut lp, j, TAU * r as f64 / polygon_k as f64)?;
        }
    }
    let mut solves = 0;
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    let mut lower = 0.0;
    for _ in 0..MAX_CUT_ROUNDS {
        let sol = lpsolve::solve(&lp, lpsolve::DEFAULT_TOL);
        solves += 1;
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpFailure {
                x_star: Vec::new(),
                status: format!("{:?}{}", sol.status, sol.diagnostics.map(|d| format!("\n{d}")).unwrap_or_default()),
            });
        }
        let t = sol.x[2 * n].max(0.0);
        lower = t;
        let c: Vec<Complex64> = sol.x[..2 * n]
            .chunks_exact(2)
            .map(|ab| Complex64::new(ab[0], ab[1]))
            .collect();
        let res: Vec<Complex64> = phi
            .iter()
            .zip(y)
            .map(|(p, &yj)| p.iter().zip(&c).map(|(a, b)| a * b).sum::<Complex64>() - yj)
            .collect();
        let rho = res.iter().map(|r| r.norm()).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| rho < b.1) {
            best = Some((c, rho));
        }
        let thresh = t * (1.0 + CUT_RTOL) + CUT_ATOL;
        if rho <= thresh {
            break;
        }
        for (j, r) in res.iter().enumerate() {
            if r.norm() > thresh {
                add_cut(&mut lp, j, r.arg())?;
            }
        }
    }
    let (c, rho) = best.expect("at least one LP solved");
    Ok((c, rho, lower, solves, lp.n_constraints()))
}

fn sample_matrix(basis: &[TrigPolynomial], points: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    par::map_slice(points, |p| basis.iter().map(|b| b.eval_at(p)).collect())
}

/// `ℓ∞(ξ)` recovery: a minimizer of `max_j |u(ξ^j) − y_j|` over the span.
pub fn chebyshev_fit(
    xi: &PointSet,
    values: &[Complex64],
    basis: &[TrigPolynomial],
    polygon_k: usize,
) -> Result<RecoveryReport> {
    let dim = check_basis(basis)?;
    if xi.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if xi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: xi.dim() });
    }
    if values.len() != xi.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values for {} points",
            values.len(),
            xi.len()
        )));
    }
    if polygon_k < 4 {
        return Err(Error::InvalidArgument(format!("polygon_k = {polygon_k} < 4")));
    }
    let phi = sample_matrix(basis, xi.points());
    let (c, rho, lower, lp_solves, constraints) = chebyshev_lp(&phi, values, polygon_k)?;
    Ok(RecoveryReport {
        fitted: combine(basis, &c),
        coefficients: c,
        sample_residual: rho,
        residual_lower_bound: lower,
        sup_error: None,
        et3_rhs: None,
        lp_solves,
        constraints,
    })
}

/// Samples a known target at `ξ`, fits, and records `‖f − fitted‖_∞`.
pub fn recover_known(
    f: &TrigPolynomial,
    xi: &PointSet,
    basis: &[TrigPolynomial],
    polygon_k: usize,
    oversample: usize,
) -> Result<RecoveryReport> {
    let y: Vec<Complex64> = xi.points().iter().map(|p| f.eval_at(p)).collect();
    let mut rep = chebyshev_fit(xi, &y, basis, polygon_k)?;
    rep.sup_error = Some(f.sub(&rep.fitted)?.norm_sup(oversample)?.value);
    Ok(rep)
}

/// Target values on an equispaced tensor grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTarget {
    pub sizes: Vec<usize>,
    pub values: Vec<Complex64>,
    /// Per-axis degree of `f − u` for every `u` in the span, when known.
    pub band: Option<Vec<u64>>,
    /// The target itself, when known; enables off-grid exchange steps.
    pub function: Option<TrigPolynomial>,
}

impl GridTarget {
    /// Grid of `oversample·(2K_j+1)` nodes per axis, `K_j` the largest degree
    /// of `f` and the basis on axis `j`.
    pub fn sample(f: &TrigPolynomial, basis: &[TrigPolynomial], oversample: usize) -> Result<Self> {
        let dim = check_basis(basis)?;
        if f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: f.dim() });
        }
        let mut band = f.max_abs_freq();
        for b in basis {
            for (k, bk) in band.iter_mut().zip(b.max_abs_freq()) {
                *k = (*k).max(bk);
            }
        }
        let sizes: Vec<usize> = band.iter().map(|&k| oversample * (2 * k as usize + 1)).collect();
        let grid = f.values_on_grid(&sizes, DEFAULT_GRID_BUDGET)?;
        Ok(GridTarget { sizes, values: grid.values, band: Some(band), function: Some(f.clone()) })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn grid(&self) -> crate::trigpoly::Grid {
        crate::trigpoly::Grid { sizes: self.sizes.clone(), values: self.values.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestApproximation {
    /// Sup norm of `f − witness` (grid maximum when the target is only
    /// known on the grid).
    pub distance: f64,
    /// No element of the span is closer than this on the sampled points,
    /// hence in sup norm.
    pub lower: f64,
    /// Sup norm bound for `f − witness` from the grid maximum, when the band is known.
    pub upper: Option<f64>,
    pub witness: TrigPolynomial,
    pub grid_points: usize,
    /// Off-grid points added by exchange steps.
    pub exchange_points: usize,
}

/// `d(f, X_N)_∞` with the sup norm replaced by the maximum over a fine grid.
///
/// When the target polynomial is known, the refined argmax of `|f − u|` is
/// added to the sample set and the fit repeated until the sup norm of the
/// error matches the sampled residual.
pub fn best_uniform_approx(target: &GridTarget, basis: &[TrigPolynomial], polygon_k: usize) -> Result<BestApproximation> {
    let dim = check_basis(basis)?;
    if target.sizes.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: target.sizes.len() });
    }
    let total: usize = target.sizes.iter().product();
    if total != target.values.len() || total == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid of {total} nodes with {} values",
            target.values.len()
        )));
    }
    let grid = target.grid();
    let nodes: Vec<Vec<f64>> = (0..total).map(|i| grid.node(i)).collect();
    let xi = PointSet::new(dim, nodes)?;
    let mut rep = chebyshev_fit(&xi, &target.values, basis, polygon_k)?;
    let mut distance = rep.sample_residual;
    let mut exchange_points = 0;
    if let Some(f) = &target.function {
        let mut pts = xi.points().to_vec();
        let mut vals = target.values.clone();
        for round in 0..=EXCHANGE_ROUNDS {
            let (est, x) = f.sub(&rep.fitted)?.sup_with_argmax(EXCHANGE_OVERSAMPLE, DEFAULT_SUP_PASSES)?;
            distance = est.value.max(rep.sample_residual);
            if est.value <= rep.sample_residual * (1.0 + EXCHANGE_RTOL) + CUT_ATOL || round == EXCHANGE_ROUNDS {
                break;
            }
            vals.push(f.eval_at(&x));
            pts.push(x);
            exchange_points += 1;
            rep = chebyshev_fit(&PointSet::new(dim, pts.clone())?, &vals, basis, polygon_k)?;
        }
    }
    let upper = target.band.as_ref().map(|band| {
        let diff: Vec<Complex64> = rep
            .fitted
            .values_on_grid(&target.sizes, DEFAULT_GRID_BUDGET)
            .map(|g| g.values.iter().zip(&target.values).map(|(u, f)| f - u).collect())
            .unwrap_or_default();
        crate::trigpoly::Grid { sizes: target.sizes.clone(), values: diff }.sup_upper_bound(band)
    });
    Ok(BestApproximation {
        distance,
        lower: rep.residual_lower_bound,
        upper,
        witness: rep.fitted,
        grid_points: total,
        exchange_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Et3Check {
    pub holds: bool,
    /// `rhs − lhs`.
    pub slack: f64,
    /// `‖f − ℓ∞(ξ)(f)‖_∞`.
    pub lhs: f64,
    pub rhs: f64,
    pub c1: f64,
    /// Lower end of the `d(f, X_N)_∞` bracket, used in `rhs`.
    pub distance: f64,
    pub report: RecoveryReport,
}

/// Checks `‖f − ℓ∞(ξ)(f)‖_∞ ≤ (2/C1 + 1) d(f, X_N)_∞` for a known target,
/// where `C1 ‖u‖_∞ ≤ max_j |u(ξ^j)|` on the span.
pub fn verify_et3(
    f: &TrigPolynomial,
    basis: &[TrigPolynomial],
    xi: &PointSet,
    c1: f64,
    polygon_k: usize,
    oversample: usize,
) -> Result<Et3Check> {
    if !(c1 > 0.0) || !c1.is_finite() {
        return Err(Error::InvalidArgument(format!("C1 = {c1} must be positive")));
    }
    let mut report = recover_known(f, xi, basis, polygon_k, oversample)?;
    let lhs = report.sup_error.expect("target known");
    let best = best_uniform_approx(&GridTarget::sample(f, basis, oversample)?, basis, polygon_k)?;
    let rhs = (2.0 / c1 + 1.0) * best.lower;
    report.et3_rhs = Some(rhs);
    let tol = EXACT_TOL * (1.0 + rhs);
    Ok(Et3Check {
        holds: lhs <= rhs + tol,
        slack: rhs - lhs,
        lhs,
        rhs,
        c1,
        distance: best.lower,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRecoveryReport {
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
    pub max_sample_residual: f64,
    pub max_sup_error: f64,
    /// Largest `‖fitted‖_∞ / max_j |f(ξ^j)|`.
    pub max_stability_ratio: f64,
    pub stability_factor: Option<f64>,
    /// Fewer points than basis functions: the fit is not unique and only the
    /// sample residual is asserted.
    pub underdetermined: bool,
}

/// Random `f` in the span are sampled at `ξ` and refitted; a trial succeeds
/// when the residual and `‖f − fitted‖_∞` are at most `1e-8` (relative to
/// `‖f‖_∞ = 1`) and, if `stability_factor = Some(A)`, when also
/// `‖fitted‖_∞ ≤ A max_j |f(ξ^j)| + 1e-8`.
pub fn exact_recovery_check(
    basis: &[TrigPolynomial],
    xi: &PointSet,
    trials: usize,
    seed: u64,
    stability_factor: Option<f64>,
) -> Result<ExactRecoveryReport> {
    check_basis(basis)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    let underdetermined = xi.len() < basis.len();
    let outcomes = par::map_range(trials, |t| -> Result<(bool, f64, f64, f64)> {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let c = random_coefficients(&mut rng, basis.len());
        let raw = combine(basis, &c);
        let norm = raw.norm_sup(DEFAULT_L1_OVERSAMPLE)?.value;
        if norm == 0.0 {
            return Err(Error::Numerical("random element of the span vanished".into()));
        }
        let f = raw.scale(Complex64::new(1.0 / norm, 0.0));
        let rep = recover_known(&f, xi, basis, DEFAULT_FIT_POLYGON_K, DEFAULT_L1_OVERSAMPLE)?;
        let err = rep.sup_error.expect("target known");
        let on_xi = xi.points().iter().map(|p| f.eval_at(p).norm()).fold(0.0, f64::max);
        let fitted_sup = rep.fitted.norm_sup(DEFAULT_L1_OVERSAMPLE)?.value;
        let stability = fitted_sup / on_xi;
        let mut ok = rep.sample_residual <= EXACT_TOL;
        if !underdetermined {
            ok &= err <= EXACT_TOL;
            if let Some(a) = stability_factor {
                ok &= fitted_sup <= a * on_xi + EXACT_TOL;
            }
        }
        Ok((ok, rep.sample_residual, err, stability))
    });
    let mut rep = ExactRecoveryReport {
        trials,
        successes: 0,
        success_fraction: 0.0,
        max_sample_residual: 0.0,
        max_sup_error: 0.0,
        max_stability_ratio: 0.0,
        stability_factor,
        underdetermined,
    };
    for o in outcomes {
        let (ok, res, err, stab) = o?;
        rep.successes += ok as usize;
        rep.max_sample_residual = rep.max_sample_residual.max(res);
        rep.max_sup_error = rep.max_sup_error.max(err);
        rep.max_stability_ratio = rep.max_stability_ratio.max(stab);
    }
    rep.success_fraction = rep.successes as f64 / trials as f64;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableRecoveryCheck {
    pub trials: usize,
    /// Trials where the fit met the premise: error ≤ 1/2 and
    /// `‖fitted‖_∞ ≤ A max_j |f(ξ^j)|`.
    pub premise_trials: usize,
    /// Premise trials where `‖f‖_∞ > 2A max_j |f(ξ^j)|`.
    pub violations: usize,
    /// Largest `‖f‖_∞ / max_j |f(ξ^j)|` over premise trials.
    pub max_ratio: f64,
}

/// For unit-norm random `f` in the span: whenever the fit recovers `f` to
/// within 1/2 with stability `A`, the samples must satisfy
/// `‖f‖_∞ ≤ 2A max_j |f(ξ^j)|`.
pub fn stable_recovery_check(
    basis: &[TrigPolynomial],
    xi: &PointSet,
    a: f64,
    trials: usize,
    seed: u64,
) -> Result<StableRecoveryCheck> {
    check_basis(basis)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("A = {a} must be positive")));
    }
    let outcomes = par::map_range(trials, |t| -> Result<Option<f64>> {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let raw = combine(basis, &random_coefficients(&mut rng, basis.len()));
        let norm = raw.norm_sup(DEFAULT_L1_OVERSAMPLE)?.value;
        let f = raw.scale(Complex64::new(1.0 / norm, 0.0));
        let rep = recover_known(&f, xi, basis, DEFAULT_FIT_POLYGON_K, DEFAULT_L1_OVERSAMPLE)?;
        let on_xi = xi.points().iter().map(|p| f.eval_at(p).norm()).fold(0.0, f64::max);
        let fitted_sup = rep.fitted.norm_sup(DEFAULT_L1_OVERSAMPLE)?.value;
        let premise = rep.sup_error.expect("target known") <= 0.5 && fitted_sup <= a * on_xi + EXACT_TOL;
        Ok(premise.then_some(1.0 / on_xi))
    });
    let mut out = StableRecoveryCheck { trials, premise_trials: 0, violations: 0, max_ratio: 0.0 };
    for o in outcomes {
        if let Some(r) = o? {
            out.premise_trials += 1;
            out.max_ratio = out.max_ratio.max(r);
            if r > 2.0 * a * (1.0 + EXACT_TOL) {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::equispaced_points;
    use crate::freqset::make_box;
    use std::f64::consts::PI;

    fn monomials(ks: &[i64]) -> Vec<TrigPolynomial> {
        ks.iter().map(|&k| TrigPolynomial::monomial(vec![k], Complex64::new(1.0, 0.0))).collect()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_fit_is_midpoint() {
        let xi = PointSet::new(1, vec![vec![0.0], vec![PI]]).unwrap();
        let rep = chebyshev_fit(&xi, &[c(0.0, 0.0), c(2.0, 0.0)], &monomials(&[0]), 8).unwrap();
        assert!((rep.sample_residual - 1.0).abs() < 1e-7);
        assert!((rep.coefficients[0] - c(1.0, 0.0)).norm() < 2e-4);
        assert!(rep.residual_lower_bound <= rep.sample_residual + 1e-12);
    }

    #[test]
    fn in_space_data_is_interpolated() {
        let basis = monomials(&[-2, -1, 0, 1, 2]);
        let coef = [c(0.3, -1.0), c(0.5, 0.2), c(-1.2, 0.0), c(0.0, 0.7), c(0.25, 0.25)];
        let u0 = combine(&basis, &coef);
        let xi = equispaced_points(12).unwrap();
        let rep = recover_known(&u0, &xi, &basis, 16, 16).unwrap();
        assert!(rep.sample_residual <= 1e-9);
        assert!(rep.sup_error.unwrap() <= 1e-8);
        for (a, b) in rep.coefficients.iter().zip(&coef) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn fit_residual_matches_lattice_search() {
        // single complex coefficient: minimize max_j |a − y_j| by brute force
        let basis = monomials(&[0]);
        let xi = equispaced_points(5).unwrap();
        let y = [c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.3), c(0.2, -1.0), c(0.8, 0.9)];
        let rep = chebyshev_fit(&xi, &y, &basis, 8).unwrap();
        let cost = |a: Complex64| y.iter().map(|v| (a - v).norm()).fold(0.0, f64::max);
        let search = |center: Complex64, half: f64| {
            let steps = 400;
            let mut best = (center, f64::INFINITY);
            for i in 0..=steps {
                for j in 0..=steps {
                    let a = center + c(-half + 2.0 * half * i as f64 / steps as f64, -half + 2.0 * half * j as f64 / steps as f64);
                    let v = cost(a);
                    if v < best.1 {
                        best = (a, v);
                    }
                }
            }
            best
        };
        let coarse = search(c(0.0, 0.0), 2.0);
        let fine = search(coarse.0, 0.02);
        assert!(rep.sample_residual <= fine.1 + 1e-9);
        assert!((rep.sample_residual - fine.1).abs() < 1e-3);
    }

    #[test]
    fn equivariance_and_homogeneity() {
        let basis = monomials(&[0, 1]);
        let xi = equispaced_points(7).unwrap();
        let mut rng = rng_from_seed(4);
        for _ in 0..5 {
            let y: Vec<Complex64> = random_coefficients(&mut rng, 7);
            let base = chebyshev_fit(&xi, &y, &basis, 16).unwrap();
            let u = combine(&basis, &random_coefficients(&mut rng, 2));
            let shifted: Vec<Complex64> = y.iter().zip(xi.points()).map(|(v, p)| v + u.eval_at(p)).collect();
            let s = chebyshev_fit(&xi, &shifted, &basis, 16).unwrap();
            assert!((s.sample_residual - base.sample_residual).abs() < 1e-7);
            let scaled: Vec<Complex64> = y.iter().map(|v| v * 3.5).collect();
            let h = chebyshev_fit(&xi, &scaled, &basis, 16).unwrap();
            assert!((h.sample_residual - 3.5 * base.sample_residual).abs() < 1e-7);
        }
    }

    #[test]
    fn best_approx_of_orthogonal_monomial() {
        let f = TrigPolynomial::monomial(vec![2], c(1.0, 0.0));
        let basis = monomials(&[0, 1]);
        let best = best_uniform_approx(&GridTarget::sample(&f, &basis, 8).unwrap(), &basis, 16).unwrap();
        assert!((best.distance - 1.0).abs() < 1e-7);
        assert!(best.lower <= best.distance + 1e-12);
        assert!(best.upper.unwrap() >= best.distance);
        let inside = best_uniform_approx(&GridTarget::sample(&basis[1], &basis, 8).unwrap(), &basis, 16).unwrap();
        assert!(inside.distance < 1e-9);
    }

    #[test]
    fn best_approx_is_grid_stable() {
        let mut rng = rng_from_seed(9);
        let basis = monomials(&[-1, 0, 1]);
        let q = make_box(&[3]).unwrap();
        for _ in 0..3 {
            let f = TrigPolynomial::from_coefficients(&q, &random_coefficients(&mut rng, q.cardinality()));
            let a = best_uniform_approx(&GridTarget::sample(&f, &basis, 8).unwrap(), &basis, 16).unwrap();
            let b = best_uniform_approx(&GridTarget::sample(&f, &basis, 16).unwrap(), &basis, 16).unwrap();
            assert!((a.distance - b.distance).abs() < 1e-3 * (1.0 + b.distance), "{} vs {}", a.distance, b.distance);
        }
    }

    #[test]
    fn et3_holds_for_perturbed_targets() {
        let basis = monomials(&[0, 1, 2]);
        let xi = equispaced_points(9).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..5 {
            let u0 = combine(&basis, &random_coefficients(&mut rng, 3));
            let pert = TrigPolynomial::monomial(vec![5], c(0.05, -0.02));
            let f = u0.add(&pert).unwrap();
            // C1 = 1/2 is valid: equispaced 9 points discretize T({0,1,2}) with constant ≤ 2
            let chk = verify_et3(&f, &basis, &xi, 0.5, 16, 16).unwrap();
            assert!(chk.holds, "{chk:?}");
            assert!(chk.slack > 0.0);
        }
        let u0 = combine(&basis, &random_coefficients(&mut rng, 3));
        let chk = verify_et3(&u0, &basis, &xi, 0.5, 16, 16).unwrap();
        assert!(chk.holds && chk.lhs < 1e-8 && chk.rhs < 1e-8);
    }

    #[test]
    fn exact_recovery_cases() {
        let one = exact_recovery_check(&monomials(&[3]), &equispaced_points(2).unwrap(), 5, 1, None).unwrap();
        assert_eq!(one.success_fraction, 1.0);
        let basis = monomials(&[0, 1, 2]);
        let rep = exact_recovery_check(&basis, &equispaced_points(9).unwrap(), 10, 3, None).unwrap();
        assert_eq!(rep.success_fraction, 1.0, "{rep:?}");
        let under = exact_recovery_check(&basis, &equispaced_points(2).unwrap(), 4, 3, None).unwrap();
        assert!(under.underdetermined);
        assert_eq!(under.success_fraction, 1.0);
        assert!(under.max_sup_error > 1e-3);
    }

    #[test]
    fn stable_recovery_implies_sampling_inequality() {
        let basis = monomials(&[0, 1, 2]);
        let chk = stable_recovery_check(&basis, &equispaced_points(9).unwrap(), 2.0, 20, 5).unwrap();
        assert_eq!(chk.violations, 0);
        assert_eq!(chk.premise_trials, 20);
    }
}
