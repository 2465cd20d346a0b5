//! Point sets and estimates of how well they discretize the uniform norm.
//!
//! `D(Q, ξ) = sup_{f ∈ T(Q)} ‖f‖_∞ / max_j |f(ξ^j)|` is estimated by fixing a
//! candidate `x*`, maximizing `Re f(x*)` under polygonal relaxations of the
//! constraints `|f(ξ^j)| ≤ 1` (a linear program), and maximizing over `x*`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::FrequencySet;
use crate::lpsolve::{self, LinearProgram, LpStatus, WarmStart};
use crate::par::{self, Execution};
use crate::rng::rng_from_seed;
use crate::trigpoly::{golden_max, TrigPolynomial, DEFAULT_GRID_BUDGET, DEFAULT_L1_OVERSAMPLE};

pub const DEFAULT_POLYGON_K: usize = 64;
pub const DEFAULT_OVERSAMPLE: usize = 8;

const CANDIDATE_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    /// Wraps coordinates into `[0, 2π)` and drops exact duplicates, keeping
    /// first occurrences in order.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite point coordinate".into()));
            }
            let w: Vec<f64> = p
                .iter()
                .map(|&v| {
                    let r = v.rem_euclid(TAU);
                    // rem_euclid can round up to exactly 2π
                    if r >= TAU {
                        0.0
                    } else {
                        r
                    }
                })
                .collect();
            let key: Vec<u64> = w.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                out.push(w);
            }
        }
        Ok(PointSet { dim, points: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        let mut all = self.points.clone();
        all.extend(other.points.iter().cloned());
        PointSet::new(self.dim, all)
    }
}

/// `ξ^j = 2πj/m`, `j = 0..m-1`.
pub fn equispaced_points(m: usize) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be ≥ 1".into()));
    }
    PointSet::new(1, (0..m).map(|j| vec![TAU * j as f64 / m as f64]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    pub base: PointSet,
    pub weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(base: PointSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != base.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be positive and finite".into()));
        }
        Ok(WeightedPointSet { base, weights })
    }

    pub fn uniform(base: PointSet) -> Self {
        let m = base.len();
        WeightedPointSet { base, weights: vec![1.0 / m as f64; m] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationCertificate {
    /// Certified lower bound: `|witness(x*)| / max_j |witness(ξ^j)|`, at
    /// least `raw_value·cos(π/polygon_k)`; raised to 1 when `0 ∈ Q`.
    pub value: f64,
    /// Largest relaxed LP value over the candidates.
    pub raw_value: f64,
    /// Normalized so that `max_j |witness(ξ^j)| = 1`.
    pub witness: TrigPolynomial,
    pub x_star: Vec<f64>,
    pub polygon_k: usize,
    pub grid_size: usize,
    pub lp_solves: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    pub polygon_k: usize,
    pub oversample: usize,
    /// Golden-section passes around the best grid candidate.
    pub refine_passes: u32,
    pub tol: f64,
    pub execution: Execution,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            polygon_k: DEFAULT_POLYGON_K,
            oversample: DEFAULT_OVERSAMPLE,
            refine_passes: 1,
            tol: lpsolve::DEFAULT_TOL,
            execution: Execution::available(),
        }
    }
}

/// The relaxed problem for fixed `(Q, ξ)`; only the objective depends on `x*`.
struct RelaxedProblem<'a> {
    q: &'a FrequencySet,
    lp: LinearProgram,
}

impl<'a> RelaxedProblem<'a> {
    fn new(q: &'a FrequencySet, xi: &PointSet, polygon_k: usize) -> Result<Self> {
        let n = q.cardinality();
        let mut lp = LinearProgram::new(vec![0.0; 2 * n])?;
        let mut row = vec![0.0; 2 * n];
        for p in xi.points() {
            let phases: Vec<f64> = q.iter().map(|k| phase(k, p)).collect();
            for t in 0..polygon_k {
                let theta = TAU * t as f64 / polygon_k as f64;
                for (i, &ph) in phases.iter().enumerate() {
                    let (s, c) = (ph - theta).sin_cos();
                    row[2 * i] = c;
                    row[2 * i + 1] = -s;
                }
                lp.add_constraint(&row, 1.0)?;
            }
        }
        Ok(RelaxedProblem { q, lp })
    }

    fn objective(&self, x: &[f64]) -> Vec<f64> {
        let mut c = Vec::with_capacity(2 * self.q.cardinality());
        for k in self.q.iter() {
            let (s, co) = phase(k, x).sin_cos();
            c.push(co);
            c.push(-s);
        }
        c
    }

    fn solve(&self, x: &[f64], tol: f64) -> Result<(f64, Vec<f64>)> {
        self.solve_warm(x, tol, &mut None)
    }

    fn solve_warm(&self, x: &[f64], tol: f64, warm: &mut Option<WarmStart>) -> Result<(f64, Vec<f64>)> {
        let sol = lpsolve::solve_warm(&self.lp, &self.objective(x), tol, warm);
        match sol.status {
            LpStatus::Optimal => Ok((sol.objective_value, sol.x)),
            other => Err(Error::LpFailure {
                x_star: x.to_vec(),
                status: match other {
                    LpStatus::Unbounded => "unbounded: the points do not determine T(Q)".to_string(),
                    _ => format!("{other:?}{}", sol.diagnostics.map(|d| format!("\n{d}")).unwrap_or_default()),
                },
            }),
        }
    }

    fn polynomial(&self, x: &[f64]) -> TrigPolynomial {
        let c: Vec<Complex64> = x.chunks_exact(2).map(|ab| Complex64::new(ab[0], ab[1])).collect();
        TrigPolynomial::from_coefficients(self.q, &c)
    }
}

fn phase(k: &[i64], x: &[f64]) -> f64 {
    k.iter().zip(x).map(|(&kj, &xj)| kj as f64 * xj).sum()
}

/// Grid nodes `2π i / G_j` with `G_j = oversample·(2K_j+1)`.
fn candidate_grid(q: &FrequencySet, oversample: usize) -> Result<Vec<Vec<f64>>> {
    let sizes: Vec<usize> = q
        .max_abs_per_axis()
        .iter()
        .map(|&k| oversample.saturating_mul(2 * k as usize + 1))
        .collect();
    let total = sizes.iter().try_fold(1usize, |a, &g| a.checked_mul(g));
    match total {
        Some(t) if t <= DEFAULT_GRID_BUDGET => {}
        _ => {
            return Err(Error::GridBudget { points: total.unwrap_or(usize::MAX), budget: DEFAULT_GRID_BUDGET })
        }
    }
    let mut out = vec![Vec::new()];
    for &g in &sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..g).map(move |i| {
                    let mut p = p.clone();
                    p.push(TAU * i as f64 / g as f64);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

pub fn estimate_d(q: &FrequencySet, xi: &PointSet, polygon_k: usize, oversample: usize) -> Result<DiscretizationCertificate> {
    estimate_d_with(q, xi, &EstimateOptions { polygon_k, oversample, ..Default::default() })
}

pub fn estimate_d_with(q: &FrequencySet, xi: &PointSet, opts: &EstimateOptions) -> Result<DiscretizationCertificate> {
    if q.is_empty() || xi.is_empty() {
        return Err(Error::InvalidArgument("Q and ξ must be non-empty".into()));
    }
    if q.dim() != xi.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), got: xi.dim() });
    }
    if q.dim() > 2 {
        return Err(Error::Unsupported(format!("estimate_D in dimension {}", q.dim())));
    }
    if opts.polygon_k < 8 || opts.oversample < 8 {
        return Err(Error::InvalidArgument("polygon_k and oversample must be ≥ 8".into()));
    }
    let prob = RelaxedProblem::new(q, xi, opts.polygon_k)?;
    let cands = candidate_grid(q, opts.oversample)?;
    // neighbouring candidates share most of their optimal basis; chunks are
    // fixed-size so results do not depend on the thread count
    let chunks: Vec<&[Vec<f64>]> = cands.chunks(CANDIDATE_CHUNK).collect();
    let vals: Vec<Result<f64>> = par::map_slice_with(opts.execution, &chunks, |chunk| {
        let mut warm = None;
        chunk
            .iter()
            .map(|x| prob.solve_warm(x, opts.tol, &mut warm).map(|r| r.0))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        // stable: strictly larger wins, so ties keep the smaller x*
        if v > best.0 {
            best = (v, i);
        }
    }
    let mut lp_solves = cands.len();
    let mut x_best = cands[best.1].clone();
    let mut v_best = best.0;
    let steps: Vec<f64> = q
        .max_abs_per_axis()
        .iter()
        .map(|&k| TAU / (opts.oversample * (2 * k as usize + 1)) as f64)
        .collect();
    for pass in 0..opts.refine_passes {
        for axis in 0..q.dim() {
            let half = steps[axis] / (1u64 << pass) as f64;
            let count = std::cell::Cell::new(0usize);
            let (t, v) = golden_max(
                |t| {
                    count.set(count.get() + 1);
                    let mut y = x_best.clone();
                    y[axis] = t;
                    prob.solve(&y, opts.tol).map(|r| r.0).unwrap_or(f64::NEG_INFINITY)
                },
                x_best[axis] - half,
                x_best[axis] + half,
            );
            lp_solves += count.get();
            if v > v_best {
                v_best = v;
                x_best[axis] = t.rem_euclid(TAU);
            }
        }
    }
    let (raw, coeffs) = prob.solve(&x_best, opts.tol)?;
    lp_solves += 1;
    let f = prob.polynomial(&coeffs);
    let on_xi = xi.points().iter().map(|p| f.eval_at(p).norm()).fold(0.0, f64::max);
    let mut witness = f.scale(Complex64::new(1.0 / on_xi, 0.0));
    let mut value = f.eval_at(&x_best).norm() / on_xi;
    if q.contains(&vec![0; q.dim()]) && value < 1.0 {
        witness = TrigPolynomial::constant(q.dim(), Complex64::new(1.0, 0.0));
        value = 1.0;
    }
    Ok(DiscretizationCertificate {
        value,
        raw_value: raw,
        witness,
        x_star: x_best,
        polygon_k: opts.polygon_k,
        grid_size: cands.len(),
        lp_solves,
    })
}

/// Values of every basis function on a common grid, `values[b][node]`.
struct BasisGrid {
    sizes: Vec<usize>,
    values: Vec<Vec<Complex64>>,
}

impl BasisGrid {
    fn new(basis: &[TrigPolynomial], oversample: usize) -> Result<Self> {
        let dim = basis[0].dim();
        let mut kmax = vec![0u64; dim];
        for b in basis {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
            }
            for (m, k) in kmax.iter_mut().zip(b.max_abs_freq()) {
                *m = (*m).max(k);
            }
        }
        let sizes: Vec<usize> = kmax.iter().map(|&k| oversample * (2 * k as usize + 1)).collect();
        let values = basis
            .iter()
            .map(|b| b.values_on_grid(&sizes, DEFAULT_GRID_BUDGET).map(|g| g.values))
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisGrid { sizes, values })
    }

    fn combine(&self, c: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for (ci, vals) in c.iter().zip(&self.values) {
            for (o, v) in out.iter_mut().zip(vals) {
                *o += ci * v;
            }
        }
    }

    fn len(&self) -> usize {
        self.values[0].len()
    }

    fn node(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        let mut x = vec![0.0; self.sizes.len()];
        for axis in (0..self.sizes.len()).rev() {
            x[axis] = TAU * (rem % self.sizes[axis]) as f64 / self.sizes[axis] as f64;
            rem /= self.sizes[axis];
        }
        x
    }
}

fn combine_poly(basis: &[TrigPolynomial], c: &[Complex64]) -> TrigPolynomial {
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

#[derive(Debug, Clone, Copy)]
pub struct NetOptions {
    pub net_budget: usize,
    pub pool_size: usize,
    pub oversample: usize,
    pub seed: u64,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions { net_budget: 531_441, pool_size: 20_000, oversample: 8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonNet {
    pub points: PointSet,
    pub eps: f64,
    pub net_size: usize,
    pub pool_size: usize,
    /// `(1+2/ε)^N`.
    pub point_bound: f64,
    /// `1/(1-2ε)`, the factor the points are expected to certify.
    pub target_factor: f64,
    /// Largest grid sup distance from a pool function to the net.
    pub covering_radius: f64,
    pub grid_size: usize,
}

/// Points from a greedy ε-net of the unit sphere of `span(basis)`.
///
/// A seeded pool of random functions is normalized to unit grid sup norm and
/// rotated so the value at the grid argmax is real positive. Farthest-point
/// greedy selection in grid sup distance runs until every pool function is
/// within `eps` of the net. The returned points are the grid argmaxima of the
/// net functions, deduplicated.
pub fn epsilon_net_points(basis: &[TrigPolynomial], eps: f64, opts: &NetOptions) -> Result<EpsilonNet> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("basis is empty".into()));
    }
    let n = basis.len();
    if n > 6 {
        return Err(Error::InvalidArgument(format!("basis of size {n} > 6")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    let point_bound = (1.0 + 2.0 / eps).powi(n as i32);
    let grid = BasisGrid::new(basis, opts.oversample)?;
    let g = grid.len();
    let mut rng = rng_from_seed(opts.seed);
    let mut pool: Vec<Complex64> = Vec::with_capacity(opts.pool_size * g);
    let mut argmax: Vec<usize> = Vec::with_capacity(opts.pool_size);
    let mut buf = vec![Complex64::new(0.0, 0.0); g];
    while argmax.len() < opts.pool_size {
        let c = random_coefficients(&mut rng, n);
        grid.combine(&c, &mut buf);
        // first node within rounding of the maximum, so ties resolve the same
        // way for functions of constant modulus
        let top = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let imax = buf.iter().position(|v| v.norm() >= top * (1.0 - 1e-12)).unwrap_or(0);
        let vmax = buf[imax];
        if vmax.norm() < 1e-12 {
            continue;
        }
        let rot = vmax.conj() / (vmax.norm() * vmax.norm());
        pool.extend(buf.iter().map(|v| v * rot));
        argmax.push(imax);
    }
    let p = argmax.len();
    let member = |i: usize| &pool[i * g..(i + 1) * g];
    let dist = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);

    let mut nearest = vec![f64::INFINITY; p];
    let mut net: Vec<usize> = Vec::new();
    let mut next = 0usize;
    loop {
        net.push(next);
        if net.len() > opts.net_budget {
            return Err(Error::NetBudget { size: net.len(), budget: opts.net_budget });
        }
        let center = member(next).to_vec();
        let updated: Vec<f64> = par::map_range(p, |i| nearest[i].min(dist(member(i), &center)));
        nearest = updated;
        let (far, r) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if r <= eps {
            break;
        }
        next = far;
    }
    let covering_radius = nearest.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = net.iter().map(|&i| argmax[i]).collect();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() as f64 > point_bound {
        return Err(Error::NetBudget { size: idx.len(), budget: point_bound as usize });
    }
    let points = PointSet::new(basis[0].dim(), idx.iter().map(|&i| grid.node(i)).collect())?;
    Ok(EpsilonNet {
        points,
        eps,
        net_size: net.len(),
        pool_size: p,
        point_bound,
        target_factor: 1.0 / (1.0 - 2.0 * eps),
        covering_radius,
        grid_size: g,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCheck {
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: usize,
}

/// Tests `‖f‖_∞ ≤ factor · max_j |f(ξ^j)|` on seeded random `f ∈ span(basis)`.
pub fn check_sampling_factor(
    basis: &[TrigPolynomial],
    xi: &PointSet,
    factor: f64,
    samples: usize,
    seed: u64,
) -> Result<NetCheck> {
    if basis.is_empty() || xi.is_empty() {
        return Err(Error::InvalidArgument("basis and points must be non-empty".into()));
    }
    let mut rng = rng_from_seed(seed);
    let coeffs: Vec<Vec<Complex64>> = (0..samples).map(|_| random_coefficients(&mut rng, basis.len())).collect();
    let ratios = par::map_slice(&coeffs, |c| -> Result<f64> {
        let f = combine_poly(basis, c);
        let sup = f.norm_sup(DEFAULT_OVERSAMPLE)?.value;
        let on_xi = xi.points().iter().map(|p| f.eval_at(p).norm()).fold(0.0, f64::max);
        Ok(sup / on_xi)
    });
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for r in ratios {
        let r = r?;
        max_ratio = max_ratio.max(r);
        if r > factor {
            violations += 1;
        }
    }
    Ok(NetCheck { samples, max_ratio, violations })
}

/// One-sided heuristic extrema of `Σ λ_ν |g(ξ^ν)| / ‖g‖_1` over `g ∈ span(basis)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDReport {
    /// Smallest ratio found: an upper bound on the true infimum.
    pub c0_estimate: f64,
    /// Largest ratio found: a lower bound on the true supremum.
    #[serde(rename = "C0_estimate")]
    pub c0_upper_estimate: f64,
    pub c0_witness: Vec<Complex64>,
    pub c0_upper_witness: Vec<Complex64>,
    pub sample_count: usize,
    pub optimizer_iterations: usize,
}

pub fn check_condition_d(
    basis: &[TrigPolynomial],
    wps: &WeightedPointSet,
    trials: usize,
    descent_steps: usize,
    seed: u64,
) -> Result<ConditionDReport> {
    if basis.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument("basis and trials must be non-empty".into()));
    }
    let grid = BasisGrid::new(basis, DEFAULT_L1_OVERSAMPLE)?;
    let at_pts: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|b| wps.base.points().iter().map(|p| b.eval_at(p)).collect())
        .collect();
    let n = basis.len();
    let ratio = |c: &[Complex64]| -> f64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
        grid.combine(c, &mut buf);
        let l1 = buf.iter().map(|v| v.norm()).sum::<f64>() / buf.len() as f64;
        let mut s = 0.0;
        for (j, &w) in wps.weights.iter().enumerate() {
            let v: Complex64 = c.iter().zip(&at_pts).map(|(ci, vals)| ci * vals[j]).sum();
            s += w * v.norm();
        }
        if l1 <= 1e-300 {
            f64::NAN
        } else {
            s / l1
        }
    };
    let mut rng = rng_from_seed(seed);
    let starts: Vec<Vec<Complex64>> = (0..trials).map(|_| random_coefficients(&mut rng, n)).collect();
    let runs = par::map_slice(&starts, |c0| {
        let mut out = Vec::with_capacity(2);
        let mut iters = 0usize;
        for sign in [-1.0, 1.0] {
            let mut c = c0.clone();
            let scale = c.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-12);
            let mut best = ratio(&c);
            for _ in 0..descent_steps {
                let before = best;
                for coord in 0..2 * n {
                    let dir = if coord % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
                    let i = coord / 2;
                    let (t, v) = golden_max(
                        |t| {
                            let mut y = c.clone();
                            y[i] += dir * t;
                            let r = ratio(&y);
                            if r.is_nan() {
                                f64::NEG_INFINITY
                            } else {
                                sign * r
                            }
                        },
                        -2.0 * scale,
                        2.0 * scale,
                    );
                    iters += 1;
                    if v > sign * best {
                        c[i] += dir * t;
                        best = sign * v;
                    }
                }
                if (best - before).abs() <= 1e-12 * before.abs().max(1e-300) {
                    break;
                }
            }
            out.push((best, c));
        }
        (out, iters)
    });
    let mut lo = (f64::INFINITY, Vec::new());
    let mut hi = (f64::NEG_INFINITY, Vec::new());
    let mut iterations = 0;
    for (pair, it) in runs {
        iterations += it;
        let (min_r, min_c) = &pair[0];
        let (max_r, max_c) = &pair[1];
        if *min_r < lo.0 {
            lo = (*min_r, min_c.clone());
        }
        if *max_r > hi.0 {
            hi = (*max_r, max_c.clone());
        }
    }
    Ok(ConditionDReport {
        c0_estimate: lo.0.max(0.0),
        c0_upper_estimate: hi.0,
        c0_witness: lo.1,
        c0_upper_witness: hi.1,
        sample_count: trials,
        optimizer_iterations: iterations,
    })
}

/// `‖f‖_grid / max|f|` after deleting the `⌊β·G⌋` largest grid values.
pub fn remez_ratio(f: &TrigPolynomial, beta: f64, oversample: usize) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("remez_ratio needs d = 1".into()));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta = {beta} outside [0, 1)")));
    }
    let grid = f.grid_values(oversample.max(1), DEFAULT_GRID_BUDGET)?;
    let mut mags: Vec<f64> = grid.values.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let drop = (beta * mags.len() as f64).floor() as usize;
    if drop >= mags.len() {
        return Err(Error::InvalidArgument("beta removes every grid point".into()));
    }
    if mags[drop] == 0.0 {
        return Err(Error::Numerical("f vanishes off the deleted set".into()));
    }
    Ok(mags[0] / mags[drop])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NikolskiiCheck {
    pub holds: bool,
    /// `R β^{-1/q} ‖f‖_q - ‖f‖_∞`.
    pub slack: f64,
    pub sup: f64,
    pub lq: f64,
}

/// Checks `‖f‖_∞ ≤ R β^{-1/q} ‖f‖_q`.
pub fn nikolskii_check(f: &TrigPolynomial, q: f64, beta: f64, r: f64) -> Result<NikolskiiCheck> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!("beta = {beta} outside (0, 1]")));
    }
    let sup = f.norm_sup(DEFAULT_OVERSAMPLE)?.value;
    let lq = f.norm_lq(q, DEFAULT_L1_OVERSAMPLE)?.value;
    let slack = r * beta.powf(-1.0 / q) * lq - sup;
    Ok(NikolskiiCheck { holds: slack >= -1e-9 * sup.max(1.0), slack, sup, lq })
}

/// `cos(π/k)`: relaxed LP values times this are certified lower bounds.
pub fn polygon_deflation(polygon_k: usize) -> f64 {
    (PI / polygon_k as f64).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqset::make_lacunary;
    use crate::kernels::dirichlet;
    use proptest::prelude::*;

    fn c1(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn monomials(ks: &[i64]) -> Vec<TrigPolynomial> {
        ks.iter().map(|&k| TrigPolynomial::monomial(vec![k], c1(1.0))).collect()
    }

    #[test]
    fn point_sets() {
        assert_eq!(equispaced_points(1).unwrap().points(), &[vec![0.0]]);
        let p = equispaced_points(4).unwrap();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (a, b) in p.points().iter().zip(want) {
            assert!((a[0] - b).abs() < 1e-15);
        }
        let d = PointSet::new(1, vec![vec![0.5], vec![0.5], vec![-1.0]]).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.points()[1][0] - (TAU - 1.0)).abs() < 1e-15);
        assert!(d.points().iter().all(|p| (0.0..TAU).contains(&p[0])));
        assert!(equispaced_points(0).is_err());
        assert!(WeightedPointSet::new(p.clone(), vec![1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn estimate_constant() {
        let q = FrequencySet::from_1d([0]);
        let xi = PointSet::new(1, vec![vec![1.3]]).unwrap();
        let c = estimate_d(&q, &xi, 64, 8).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        assert!(c.raw_value >= 1.0 && c.raw_value <= 1.0 / polygon_deflation(64) + 1e-9);
    }

    #[test]
    fn estimate_marcinkiewicz() {
        let mut vals = Vec::new();
        for n in [2i64, 4] {
            let q = FrequencySet::from_1d(-n..=n);
            let xi = equispaced_points(4 * n as usize).unwrap();
            let c = estimate_d(&q, &xi, 64, 8).unwrap();
            // witness is normalized on ξ and attains the value at x*
            let on_xi = xi.points().iter().map(|p| c.witness.eval_at(p).norm()).fold(0.0, f64::max);
            assert!((on_xi - 1.0).abs() < 1e-9);
            assert!((c.witness.eval_at(&c.x_star).norm() - c.value).abs() < 1e-9);
            assert!(c.value <= c.raw_value + 1e-9);
            assert!(c.value >= c.raw_value * polygon_deflation(64) - 1e-9);
            assert!(c.value >= 1.0);
            vals.push(c.value);
        }
        assert!(vals.iter().all(|&v| v < 3.0));
    }

    #[test]
    fn estimate_unisolvent_fails() {
        let q = FrequencySet::from_1d(-2..=2);
        let xi = equispaced_points(3).unwrap();
        assert!(matches!(estimate_d(&q, &xi, 64, 8), Err(Error::LpFailure { .. })));
        assert!(estimate_d(&q, &xi, 4, 8).is_err());
    }

    #[test]
    fn estimate_monotone_in_points() {
        let q = FrequencySet::from_1d([0, 1, 3]);
        let base = PointSet::new(1, vec![vec![0.1], vec![1.9], vec![3.3], vec![4.4]]).unwrap();
        let more = base.union(&PointSet::new(1, vec![vec![5.5], vec![2.6]]).unwrap()).unwrap();
        let a = estimate_d(&q, &base, 64, 8).unwrap();
        let b = estimate_d(&q, &more, 64, 8).unwrap();
        assert!(b.raw_value <= a.raw_value * (1.0 + 1e-3));
    }

    #[test]
    fn estimate_sequential_matches_parallel() {
        let q = FrequencySet::from_1d([-1, 0, 2]);
        let xi = equispaced_points(7).unwrap();
        let par_opts = EstimateOptions::default();
        let seq_opts = EstimateOptions { execution: Execution::Sequential, ..par_opts };
        assert_eq!(estimate_d_with(&q, &xi, &par_opts).unwrap(), estimate_d_with(&q, &xi, &seq_opts).unwrap());
    }

    #[test]
    fn net_single_monomial() {
        let net = epsilon_net_points(&monomials(&[1]), 0.25, &NetOptions { pool_size: 200, ..Default::default() })
            .unwrap();
        assert_eq!(net.net_size, 1);
        assert_eq!(net.points.len(), 1);
        let q = FrequencySet::from_1d([1]);
        let d = estimate_d(&q, &net.points, 64, 8).unwrap();
        assert!(d.value <= 1.0 + 1e-9);
    }

    #[test]
    fn net_rejects_bad_eps() {
        let b = monomials(&[0, 1]);
        assert!(epsilon_net_points(&b, 0.5, &NetOptions::default()).is_err());
        assert!(epsilon_net_points(&b, 0.0, &NetOptions::default()).is_err());
        assert!(epsilon_net_points(&monomials(&[0, 1, 2, 3, 4, 5, 6]), 0.25, &NetOptions::default()).is_err());
        let tight = NetOptions { net_budget: 3, pool_size: 500, ..Default::default() };
        assert!(matches!(epsilon_net_points(&b, 0.1, &tight), Err(Error::NetBudget { .. })));
    }

    #[test]
    fn net_two_dim_space() {
        let basis = monomials(&[0, 1]);
        let net = epsilon_net_points(&basis, 0.25, &NetOptions { pool_size: 2000, ..Default::default() }).unwrap();
        assert!(net.covering_radius <= 0.25);
        assert!(net.points.len() as f64 <= net.point_bound);
        let chk = check_sampling_factor(&basis, &net.points, 2.0, 200, 9).unwrap();
        assert_eq!(chk.violations, 0);
    }

    #[test]
    fn condition_d_constant() {
        let basis = vec![TrigPolynomial::constant(1, c1(1.0))];
        let wps = WeightedPointSet::new(PointSet::new(1, vec![vec![0.7]]).unwrap(), vec![1.0]).unwrap();
        let r = check_condition_d(&basis, &wps, 3, 5, 1).unwrap();
        assert!((r.c0_estimate - 1.0).abs() < 1e-9);
        assert!((r.c0_upper_estimate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn condition_d_single_point_vanishes() {
        let basis = monomials(&[0, 1]);
        let wps = WeightedPointSet::new(PointSet::new(1, vec![vec![0.0]]).unwrap(), vec![1.0]).unwrap();
        let r = check_condition_d(&basis, &wps, 4, 20, 2).unwrap();
        assert!(r.c0_estimate < 1e-6, "{}", r.c0_estimate);
        // the oracle: g = 1 - e^{ix} vanishes at 0
        let g = [c1(1.0), c1(-1.0)];
        let v: Complex64 = basis.iter().zip(&g).map(|(b, c)| b.eval_at(&[0.0]) * c).sum();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn condition_d_equispaced_brackets_one() {
        let n = 4i64;
        let basis = monomials(&(-n..=n).collect::<Vec<_>>());
        let wps = WeightedPointSet::uniform(equispaced_points(4 * n as usize).unwrap());
        let r = check_condition_d(&basis, &wps, 4, 4, 3).unwrap();
        assert!(r.c0_estimate > 0.0 && r.c0_estimate <= 1.0);
        assert!(r.c0_upper_estimate >= 1.0 && r.c0_upper_estimate < 3.0);
    }

    #[test]
    fn remez_examples() {
        let k = TrigPolynomial::constant(1, c1(2.0));
        assert_eq!(remez_ratio(&k, 0.5, 8).unwrap(), 1.0);
        let d = dirichlet(&FrequencySet::from_1d(-4..=4));
        assert_eq!(remez_ratio(&d, 0.0, 8).unwrap(), 1.0);
        assert!(remez_ratio(&d, 1e-4, 8).unwrap() < 1.0 + 1e-9);
        let mut prev = 0.0;
        for beta in [0.01, 0.05, 0.1, 0.2, 0.4] {
            let r = remez_ratio(&d, beta, 8).unwrap();
            assert!(r >= prev);
            prev = r;
        }
        let rs: Vec<f64> = [4i64, 8, 16]
            .iter()
            .map(|&n| remez_ratio(&dirichlet(&FrequencySet::from_1d(-n..=n)), 1.0 / (4 * n) as f64, 16).unwrap())
            .collect();
        assert!(rs.iter().all(|&r| r < 2.0), "{rs:?}");
        assert!(remez_ratio(&d, 1.0, 8).is_err());
    }

    #[test]
    fn nikolskii_examples() {
        let k = TrigPolynomial::constant(1, c1(1.0));
        let c = nikolskii_check(&k, 2.0, 0.25, 1.0).unwrap();
        assert!(c.holds);
        assert!((c.slack - (0.25f64.powf(-0.5) - 1.0)).abs() < 1e-12);
        let n = 8i64;
        let d = dirichlet(&FrequencySet::from_1d(-n..=n));
        let beta = 1.0 / (4 * n) as f64;
        let r = remez_ratio(&d, beta, 16).unwrap();
        assert!(nikolskii_check(&d, 2.0, beta, r).unwrap().holds);
        let lam = make_lacunary(6, 3.0).unwrap();
        let f = TrigPolynomial::from_coefficients(&lam, &[c1(1.0), c1(-0.5), c1(0.7), c1(0.2), c1(-1.0), c1(0.4)]);
        let beta = 0.05;
        let r = remez_ratio(&f, beta, 16).unwrap();
        assert!(nikolskii_check(&f, 4.0, beta, r).unwrap().holds);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn estimate_at_least_one_with_constants(extra in proptest::collection::btree_set(1i64..6, 0..3), m in 6usize..12) {
            let q = FrequencySet::from_1d(std::iter::once(0).chain(extra.iter().copied()));
            let xi = equispaced_points(m).unwrap();
            let c = estimate_d(&q, &xi, 16, 8).unwrap();
            prop_assert!(c.value >= 1.0 - 1e-9);
        }

        #[test]
        fn remez_monotone(coeffs in proptest::collection::vec(-1.0f64..1.0, 3..7), b1 in 0.0f64..0.5, b2 in 0.0f64..0.5) {
            let q = FrequencySet::from_1d(0..coeffs.len() as i64);
            let f = TrigPolynomial::from_coefficients(&q, &coeffs.iter().map(|&v| c1(v)).collect::<Vec<_>>());
            prop_assume!(!f.is_zero());
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            prop_assert!(remez_ratio(&f, lo, 8).unwrap() <= remez_ratio(&f, hi, 8).unwrap());
        }
    }
}
