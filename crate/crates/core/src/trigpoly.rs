//! Sparse trigonometric polynomials `f(x) = Σ_k c_k e^{i(k,x)}` on the torus.
//!
//! Norms use the normalized Lebesgue measure on `[0, 2π)^d`. The L2 norm is
//! exact (Parseval); L1/Lq are rectangle-rule quadratures on an oversampled
//! equispaced grid; the sup norm is a grid maximum followed by golden-section
//! refinement, or a branch-and-bound search for very sparse high-degree
//! one-dimensional polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::FrequencySet;
use crate::par;

/// Default oversampling factor for L1 quadrature.
pub const DEFAULT_L1_OVERSAMPLE: usize = 16;
/// Default golden-section passes for the sup norm.
pub const DEFAULT_SUP_PASSES: u32 = 3;
/// Largest grid (total points) a norm estimate may allocate.
const MAX_REFINED_PEAKS: usize = 256;

pub const DEFAULT_GRID_BUDGET: usize = 1 << 24;
/// Largest support a product may produce.
pub const DEFAULT_SUPPORT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    coeffs: Vec<TermRepr>,
}

impl TryFrom<PolyRepr> for TrigPolynomial {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        TrigPolynomial::from_terms(
            r.dim,
            r.coeffs.into_iter().map(|t| (t.k, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<TrigPolynomial> for PolyRepr {
    fn from(p: TrigPolynomial) -> Self {
        PolyRepr {
            dim: p.dim,
            coeffs: p
                .coeffs
                .into_iter()
                .map(|(k, c)| TermRepr { k, re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        TrigPolynomial {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn monomial(k: Vec<i64>, c: Complex64) -> Self {
        let mut p = Self::zero(k.len());
        p.add_term(k, c);
        p
    }

    /// Sums repeated frequencies and drops exact zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite coefficient at {k:?}")));
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    /// `Σ_{k∈Q} c_k e^{i(k,x)}` with coefficients listed in the order of `q`.
    pub fn from_coefficients(q: &FrequencySet, c: &[Complex64]) -> Self {
        assert_eq!(q.cardinality(), c.len());
        let mut p = Self::zero(q.dim());
        for (k, &ck) in q.iter().zip(c) {
            p.add_term(k.to_vec(), ck);
        }
        p
    }

    fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(k) {
            Entry::Vacant(v) => {
                if c != Complex64::new(0.0, 0.0) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.coeffs.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn support(&self) -> FrequencySet {
        FrequencySet::new(self.dim, self.coeffs.keys().cloned().collect())
            .expect("keys share the polynomial dimension")
    }

    /// Largest `|k_j|` over the support, per axis.
    pub fn max_abs_freq(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        for k in self.coeffs.keys() {
            for (o, &kj) in out.iter_mut().zip(k) {
                *o = (*o).max(kj.unsigned_abs());
            }
        }
        out
    }

    /// `Σ |c_k|`, an upper bound for the sup norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, &c) in &self.coeffs {
            p.add_term(k.clone(), c * a);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut p = self.clone();
        for (k, &c) in &other.coeffs {
            p.add_term(k.clone(), c);
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: dim,
            });
        }
        Ok(())
    }

    /// Value at a single point; the caller guarantees `x.len() == dim`.
    pub fn eval_at(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in &self.coeffs {
            let phase: f64 = k.iter().zip(x).map(|(&kj, &xj)| kj as f64 * xj).sum();
            let (s, co) = phase.sin_cos();
            acc += c * Complex64::new(co, s);
        }
        acc
    }

    pub fn evaluate(&self, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        for p in points {
            self.check_dim(p.len())?;
        }
        Ok(par::map_slice(points, |p| self.eval_at(p)))
    }

    /// Coefficient convolution, rejecting products with more than `cap` terms.
    pub fn multiply_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut acc: HashMap<Vec<i64>, Complex64> = HashMap::new();
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                let k: Option<Vec<i64>> = a.iter().zip(b).map(|(x, y)| x.checked_add(*y)).collect();
                *acc.entry(k.ok_or(Error::FrequencyOverflow)?).or_default() += ca * cb;
                if acc.len() > cap {
                    return Err(Error::SupportCap {
                        size: acc.len(),
                        cap,
                    });
                }
            }
        }
        TrigPolynomial::from_terms(self.dim, acc)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_capped(other, DEFAULT_SUPPORT_CAP)
    }

    /// `f(-x)`: coefficients `k ↦ c_{-k}`.
    pub fn reflect(&self) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, &c) in &self.coeffs {
            p.add_term(k.iter().map(|&x| -x).collect(), c);
        }
        p
    }

    /// `f(x - t)`.
    pub fn translate(&self, t: &[f64]) -> Self {
        assert_eq!(t.len(), self.dim);
        let mut p = Self::zero(self.dim);
        for (k, &c) in &self.coeffs {
            let phase: f64 = k.iter().zip(t).map(|(&kj, &tj)| kj as f64 * tj).sum();
            p.add_term(k.clone(), c * Complex64::from_polar(1.0, -phase));
        }
        p
    }

    pub fn norm_l2(&self) -> NormEstimate {
        let s: f64 = self.coeffs.values().map(|c| c.norm_sqr()).sum();
        NormEstimate {
            value: s.sqrt(),
            kind: NormKind::L2Exact,
            grid_size: 0,
            refinement_passes: 0,
            error_bound: Some(0.0),
        }
    }

    pub fn norm_l1(&self, oversample: usize) -> Result<NormEstimate> {
        self.norm_lq(1.0, oversample)
    }

    /// Rectangle-rule `(∫|f|^q)^{1/q}` on `oversample·(2K_j+1)` nodes per axis.
    pub fn norm_lq(&self, q: f64, oversample: usize) -> Result<NormEstimate> {
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!("q = {q} must be ≥ 1")));
        }
        let grid = self.grid_values(oversample, DEFAULT_GRID_BUDGET)?;
        let n = grid.values.len() as f64;
        let value = if q == 1.0 {
            grid.values.iter().map(|v| v.norm()).sum::<f64>() / n
        } else {
            (grid.values.iter().map(|v| v.norm().powf(q)).sum::<f64>() / n).powf(1.0 / q)
        };
        // |f| is Lipschitz with constant K_j·‖f‖_∞ along axis j; the cell
        // average of |x_j - node_j| is h_j/4.
        let sup = grid.sup_upper_bound(&self.max_abs_freq());
        let k = self.max_abs_freq();
        let lip_err: f64 = k
            .iter()
            .zip(&grid.sizes)
            .map(|(&kj, &g)| kj as f64 * sup * (TAU / g as f64) / 4.0)
            .sum();
        let error_bound = if q == 1.0 { Some(lip_err) } else { None };
        Ok(NormEstimate {
            value,
            kind: if q == 1.0 {
                NormKind::L1Quadrature
            } else {
                NormKind::LqQuadrature
            },
            grid_size: grid.values.len(),
            refinement_passes: 0,
            error_bound,
        })
    }

    pub fn norm_sup(&self, oversample: usize) -> Result<NormEstimate> {
        Ok(self.sup_with_argmax(oversample, DEFAULT_SUP_PASSES)?.0)
    }

    /// Sup norm together with the point where it is attained.
    ///
    /// The grid maximum is a certified lower bound; the refined value is the
    /// best of the grid maximum and golden-section searches around every grid
    /// local maximum that could still exceed it.
    pub fn sup_with_argmax(&self, oversample: usize, passes: u32) -> Result<(NormEstimate, Vec<f64>)> {
        if oversample < 4 {
            return Err(Error::InvalidArgument(format!("oversample {oversample} < 4")));
        }
        let grid = self.grid_values(oversample, DEFAULT_GRID_BUDGET)?;
        let mag: Vec<f64> = grid.values.iter().map(|v| v.norm_sqr()).collect();
        // any peak above the grid maximum has a local-maximum node at least
        // this high
        let upper = grid.sup_upper_bound(&self.max_abs_freq());
        let floor = if upper.is_finite() && upper > 0.0 {
            let r = grid.max_abs() / upper;
            grid.max_abs() * grid.max_abs() * r * r
        } else {
            0.0
        };
        let strides: Vec<usize> = (0..grid.sizes.len())
            .map(|a| grid.sizes[a + 1..].iter().product())
            .collect();
        let is_local_max = |i: usize| -> bool {
            grid.sizes.iter().zip(&strides).all(|(&g, &st)| {
                let pos = (i / st) % g;
                let up = i - pos * st + ((pos + 1) % g) * st;
                let down = i - pos * st + ((pos + g - 1) % g) * st;
                mag[i] >= mag[up] && mag[i] >= mag[down]
            })
        };
        let mut order: Vec<usize> = (0..mag.len()).filter(|&i| mag[i] >= floor && is_local_max(i)).collect();
        order.sort_by(|&a, &b| mag[b].partial_cmp(&mag[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
        order.truncate(MAX_REFINED_PEAKS);
        if order.is_empty() {
            order.push(mag.iter().enumerate().fold(0, |acc, (i, &v)| if v > mag[acc] { i } else { acc }));
        }

        let steps: Vec<f64> = grid.sizes.iter().map(|&g| TAU / g as f64).collect();
        let mut best_x = grid.node(order[0]);
        let mut best = mag[order[0]];
        for &idx in &order {
            let mut x = grid.node(idx);
            let mut val = mag[idx];
            for pass in 0..passes {
                for axis in 0..self.dim {
                    let half = steps[axis] / (1u64 << pass) as f64;
                    let (t, v) = golden_max(
                        |t| {
                            let mut y = x.clone();
                            y[axis] = t;
                            self.eval_at(&y).norm_sqr()
                        },
                        x[axis] - half,
                        x[axis] + half,
                    );
                    if v > val {
                        val = v;
                        x[axis] = t;
                    }
                }
            }
            if val > best {
                best = val;
                best_x = x;
            }
        }
        for xj in best_x.iter_mut() {
            *xj = xj.rem_euclid(TAU);
        }
        Ok((
            NormEstimate {
                value: best.sqrt(),
                kind: NormKind::LinfGrid,
                grid_size: grid.values.len(),
                refinement_passes: passes,
                error_bound: Some(grid.sup_upper_bound(&self.max_abs_freq()) - best.sqrt()),
            },
            best_x,
        ))
    }

    /// Values on the equispaced grid with `oversample·(2K_j+1)` nodes per axis.
    pub fn grid_values(&self, oversample: usize, budget: usize) -> Result<Grid> {
        let sizes: Vec<usize> = self
            .max_abs_freq()
            .iter()
            .map(|&k| oversample.saturating_mul(2 * k as usize + 1))
            .collect();
        self.values_on_grid(&sizes, budget)
    }

    /// Exact values at `x_j = 2π i_j / G_j` via inverse FFT after folding
    /// frequencies modulo the grid size.
    pub fn values_on_grid(&self, sizes: &[usize], budget: usize) -> Result<Grid> {
        self.check_dim(sizes.len())?;
        if self.dim > 2 {
            return Err(Error::Unsupported(format!(
                "grid norms in dimension {} (only 1 and 2)",
                self.dim
            )));
        }
        let total = sizes.iter().try_fold(1usize, |acc, &g| acc.checked_mul(g));
        let total = match total {
            Some(t) if t <= budget => t,
            _ => {
                return Err(Error::GridBudget {
                    points: total.unwrap_or(usize::MAX),
                    budget,
                })
            }
        };
        if sizes.contains(&0) {
            return Err(Error::InvalidArgument("grid axis of size 0".into()));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        for (k, &c) in &self.coeffs {
            let mut idx = 0usize;
            for (&kj, &g) in k.iter().zip(sizes) {
                idx = idx * g + kj.rem_euclid(g as i64) as usize;
            }
            buf[idx] += c;
        }
        let mut planner = FftPlanner::<f64>::new();
        if self.dim == 1 {
            planner.plan_fft_inverse(sizes[0]).process(&mut buf);
        } else {
            let (g0, g1) = (sizes[0], sizes[1]);
            let rows = planner.plan_fft_inverse(g1);
            for row in buf.chunks_exact_mut(g1) {
                rows.process(row);
            }
            let cols = planner.plan_fft_inverse(g0);
            let mut col = vec![Complex64::new(0.0, 0.0); g0];
            for j in 0..g1 {
                for i in 0..g0 {
                    col[i] = buf[i * g1 + j];
                }
                cols.process(&mut col);
                for i in 0..g0 {
                    buf[i * g1 + j] = col[i];
                }
            }
        }
        Ok(Grid {
            sizes: sizes.to_vec(),
            values: buf,
        })
    }

    /// Sup norm of a one-dimensional polynomial by branch and bound over
    /// dyadic arcs; suited to sparse spectra with huge frequencies where no
    /// grid fits in memory.
    ///
    /// Returns the best value found (a certified lower bound) with
    /// `error_bound` = certified upper bound − value, and its location.
    pub fn sup_branch_bound(&self, rel_tol: f64, node_budget: usize) -> Result<(NormEstimate, f64)> {
        if self.dim != 1 {
            return Err(Error::Unsupported("branch-and-bound sup norm needs d = 1".into()));
        }
        let mut terms: Vec<(i64, Complex64)> = self.coeffs.iter().map(|(k, &c)| (k[0], c)).collect();
        terms.sort_by_key(|(k, _)| k.unsigned_abs());
        if terms.is_empty() {
            return Ok((
                NormEstimate {
                    value: 0.0,
                    kind: NormKind::LinfBranchBound,
                    grid_size: 0,
                    refinement_passes: 0,
                    error_bound: Some(0.0),
                },
                0.0,
            ));
        }
        let abs: Vec<f64> = terms.iter().map(|(_, c)| c.norm()).collect();
        let tail: Vec<f64> = {
            let mut t = vec![0.0; abs.len() + 1];
            for i in (0..abs.len()).rev() {
                t[i] = t[i + 1] + abs[i];
            }
            t
        };
        const MAX_LEVEL: u32 = 62;

        // Arc at `level` with index `a` covers t ∈ [a, a+1)/2^level, x = 2πt.
        let eval_center = |level: u32, a: u64| -> (f64, f64) {
            let shift = level + 1;
            let modulus: u128 = 1u128 << shift;
            let num: u128 = 2 * a as u128 + 1;
            let half_width = PI / (1u64 << level) as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut slack = 0.0;
            let mut bound = f64::INFINITY;
            for (i, &(k, c)) in terms.iter().enumerate() {
                let km = (k as i128).rem_euclid(modulus as i128) as u128;
                let frac = ((km * num) % modulus) as f64 / modulus as f64;
                sum += c * Complex64::from_polar(1.0, TAU * frac);
                slack += abs[i] * (k.unsigned_abs() as f64 * half_width).min(2.0);
                bound = bound.min(sum.norm() + slack + tail[i + 1]);
            }
            (sum.norm(), bound.min(tail[0]))
        };
        let center_x = |level: u32, a: u64| -> f64 { PI * (2 * a + 1) as f64 / (1u64 << level) as f64 };

        #[derive(PartialEq)]
        struct Node {
            upper: f64,
            level: u32,
            index: u64,
        }
        impl Eq for Node {}
        impl PartialOrd for Node {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Node {
            fn cmp(&self, o: &Self) -> Ordering {
                self.upper
                    .partial_cmp(&o.upper)
                    .unwrap_or(Ordering::Equal)
                    .then(o.level.cmp(&self.level))
                    .then(o.index.cmp(&self.index))
            }
        }

        let mut best = 0.0f64;
        let mut best_x = 0.0f64;
        let mut heap = BinaryHeap::new();
        let start_level = 12u32;
        for a in 0..(1u64 << start_level) {
            let (val, upper) = eval_center(start_level, a);
            if val > best {
                best = val;
                best_x = center_x(start_level, a);
            }
            heap.push(Node {
                upper,
                level: start_level,
                index: a,
            });
        }
        let mut visited = 0usize;
        let mut global_upper = best;
        while let Some(node) = heap.pop() {
            global_upper = node.upper;
            if node.upper <= best * (1.0 + rel_tol) {
                break;
            }
            if node.level >= MAX_LEVEL {
                // arcs this small cannot be split further; keep the bound
                continue;
            }
            visited += 1;
            if visited > node_budget {
                return Err(Error::Numerical(format!(
                    "branch-and-bound node budget {node_budget} exhausted (bracket [{best}, {}])",
                    node.upper
                )));
            }
            for child in [2 * node.index, 2 * node.index + 1] {
                let level = node.level + 1;
                let (val, upper) = eval_center(level, child);
                if val > best {
                    best = val;
                    best_x = center_x(level, child);
                }
                if upper > best * (1.0 + rel_tol) {
                    heap.push(Node {
                        upper,
                        level,
                        index: child,
                    });
                }
            }
        }
        if heap.is_empty() {
            global_upper = global_upper.min(best * (1.0 + rel_tol));
        }
        Ok((
            NormEstimate {
                value: best,
                kind: NormKind::LinfBranchBound,
                grid_size: visited,
                refinement_passes: 0,
                error_bound: Some((global_upper - best).max(0.0)),
            },
            best_x,
        ))
    }
}

/// Golden-section maximization of `f` on `[a, b]`; returns `(argmax, max)`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Values of a polynomial on an equispaced tensor grid, row-major.
#[derive(Debug, Clone)]
pub struct Grid {
    pub sizes: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Grid {
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.sizes.len()];
        let mut rem = flat;
        for axis in (0..self.sizes.len()).rev() {
            idx[axis] = rem % self.sizes[axis];
            rem /= self.sizes[axis];
        }
        idx.iter()
            .zip(&self.sizes)
            .map(|(&i, &g)| TAU * i as f64 / g as f64)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Upper bound for `‖f‖_∞` from the grid maximum, valid when `f` has
    /// degree at most `k_j` on axis `j`: `|f|²` has degree `2k_j` and its
    /// decay from the maximizer to the nearest node is at most
    /// `(Σ_j 2k_j h_j/2)²/2` in relative terms.
    pub fn sup_upper_bound(&self, k: &[u64]) -> f64 {
        let s: f64 = k
            .iter()
            .zip(&self.sizes)
            .map(|(&kj, &g)| 2.0 * kj as f64 * (TAU / g as f64) / 2.0)
            .sum();
        let c = 1.0 - s * s / 2.0;
        if c <= 0.0 {
            f64::INFINITY
        } else {
            self.max_abs() / c.sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "L1_quadrature")]
    L1Quadrature,
    #[serde(rename = "Lq_quadrature")]
    LqQuadrature,
    #[serde(rename = "L2_exact")]
    L2Exact,
    #[serde(rename = "Linf_grid")]
    LinfGrid,
    #[serde(rename = "Linf_branch_bound")]
    LinfBranchBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    pub grid_size: usize,
    pub refinement_passes: u32,
    /// A-priori error bound where one is available.
    pub error_bound: Option<f64>,
}

/// Polynomial with exact integer coefficients, used to certify identities
/// of Dirichlet-kernel products without rounding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "IntPolyRepr", into = "IntPolyRepr")]
pub struct IntegerPolynomial {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, i64>,
}

#[derive(Serialize, Deserialize)]
struct IntTermRepr {
    k: Vec<i64>,
    c: i64,
}

#[derive(Serialize, Deserialize)]
struct IntPolyRepr {
    dim: usize,
    coeffs: Vec<IntTermRepr>,
}

impl From<IntPolyRepr> for IntegerPolynomial {
    fn from(r: IntPolyRepr) -> Self {
        IntegerPolynomial::from_terms(r.dim, r.coeffs.into_iter().map(|t| (t.k, t.c)))
    }
}

impl From<IntegerPolynomial> for IntPolyRepr {
    fn from(p: IntegerPolynomial) -> Self {
        IntPolyRepr {
            dim: p.dim,
            coeffs: p.coeffs.into_iter().map(|(k, c)| IntTermRepr { k, c }).collect(),
        }
    }
}

impl IntegerPolynomial {
    pub fn zero(dim: usize) -> Self {
        IntegerPolynomial {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// Coefficient one on every element of `q`.
    pub fn dirichlet(q: &FrequencySet) -> Self {
        IntegerPolynomial {
            dim: q.dim(),
            coeffs: q.iter().map(|k| (k.to_vec(), 1)).collect(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, i64)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            assert_eq!(k.len(), dim);
            *p.coeffs.entry(k).or_insert(0) += c;
        }
        p.coeffs.retain(|_, c| *c != 0);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: &[i64]) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], i64)> {
        self.coeffs.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn support(&self) -> FrequencySet {
        FrequencySet::new(self.dim, self.coeffs.keys().cloned().collect())
            .expect("keys share the polynomial dimension")
    }

    /// `self += factor · other`, with overflow checks.
    pub fn add_scaled(&mut self, other: &Self, factor: i64) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        for (k, &c) in &other.coeffs {
            let add = c.checked_mul(factor).ok_or(Error::FrequencyOverflow)?;
            self.add_term(k.clone(), add)?;
        }
        Ok(())
    }

    pub fn add_term(&mut self, k: Vec<i64>, c: i64) -> Result<()> {
        if k.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.len(),
            });
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(k) {
            Entry::Vacant(v) => {
                if c != 0 {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get().checked_add(c).ok_or(Error::FrequencyOverflow)?;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn reflect(&self) -> Self {
        IntegerPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, &c)| (k.iter().map(|&x| -x).collect(), c))
                .collect(),
        }
    }

    /// Exact product with overflow checks.
    pub fn multiply(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.dim == 1 {
            return self.multiply_dense_1d(other, cap);
        }
        let mut acc: HashMap<Vec<i64>, i64> = HashMap::new();
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                let k: Option<Vec<i64>> = a.iter().zip(b).map(|(x, y)| x.checked_add(*y)).collect();
                let e = acc.entry(k.ok_or(Error::FrequencyOverflow)?).or_insert(0);
                *e = ca
                    .checked_mul(cb)
                    .and_then(|p| e.checked_add(p))
                    .ok_or(Error::FrequencyOverflow)?;
                if acc.len() > cap {
                    return Err(Error::SupportCap { size: acc.len(), cap });
                }
            }
        }
        Ok(Self::from_terms(self.dim, acc))
    }

    fn multiply_dense_1d(&self, other: &Self, cap: usize) -> Result<Self> {
        let (Some((alo, _)), Some((ahi, _))) = (self.coeffs.first_key_value(), self.coeffs.last_key_value())
        else {
            return Ok(Self::zero(1));
        };
        let (Some((blo, _)), Some((bhi, _))) = (other.coeffs.first_key_value(), other.coeffs.last_key_value())
        else {
            return Ok(Self::zero(1));
        };
        let lo = alo[0].checked_add(blo[0]).ok_or(Error::FrequencyOverflow)?;
        let hi = ahi[0].checked_add(bhi[0]).ok_or(Error::FrequencyOverflow)?;
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > (1 << 26) {
            // sparse fallback
            let mut acc: HashMap<i64, i64> = HashMap::new();
            for (a, &ca) in &self.coeffs {
                for (b, &cb) in &other.coeffs {
                    let e = acc.entry(a[0] + b[0]).or_insert(0);
                    *e = ca
                        .checked_mul(cb)
                        .and_then(|p| e.checked_add(p))
                        .ok_or(Error::FrequencyOverflow)?;
                }
                if acc.len() > cap {
                    return Err(Error::SupportCap { size: acc.len(), cap });
                }
            }
            return Ok(Self::from_terms(1, acc.into_iter().map(|(k, c)| (vec![k], c))));
        }
        let mut dense = vec![0i64; span as usize];
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                let slot = &mut dense[(a[0] + b[0] - lo) as usize];
                *slot = ca
                    .checked_mul(cb)
                    .and_then(|p| slot.checked_add(p))
                    .ok_or(Error::FrequencyOverflow)?;
            }
        }
        let coeffs: BTreeMap<Vec<i64>, i64> = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(i, c)| (vec![lo + i as i64], c))
            .collect();
        if coeffs.len() > cap {
            return Err(Error::SupportCap {
                size: coeffs.len(),
                cap,
            });
        }
        Ok(IntegerPolynomial { dim: 1, coeffs })
    }

    /// `self / denom` as a floating-point polynomial.
    pub fn to_trig(&self, denom: i64) -> TrigPolynomial {
        let mut p = TrigPolynomial::zero(self.dim);
        for (k, &c) in &self.coeffs {
            p.add_term(k.clone(), Complex64::new(c as f64 / denom as f64, 0.0));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqset::{make_box, FrequencySet};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dirichlet(q: &FrequencySet) -> TrigPolynomial {
        TrigPolynomial::from_coefficients(q, &vec![c(1.0, 0.0); q.cardinality()])
    }

    fn random_poly(seed: u64, kmax: i64, terms: usize, real: bool) -> TrigPolynomial {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p = TrigPolynomial::zero(1);
        for _ in 0..terms {
            let k = rng.random_range(-kmax..=kmax);
            let v = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if real {
                p = p
                    .add(&TrigPolynomial::from_terms(1, [(vec![k], v), (vec![-k], v.conj())]).unwrap())
                    .unwrap();
            } else {
                p = p.add(&TrigPolynomial::monomial(vec![k], v)).unwrap();
            }
        }
        p
    }

    #[test]
    fn evaluate_examples() {
        let one = TrigPolynomial::constant(1, c(1.0, 0.0));
        assert_eq!(one.evaluate(&[vec![0.3], vec![2.0]]).unwrap(), vec![c(1.0, 0.0); 2]);
        let d = dirichlet(&make_box(&[1]).unwrap());
        assert!((d.eval_at(&[0.0]) - c(3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            d.evaluate(&[vec![0.0, 1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dirichlet_closed_form() {
        // Σ_{k=1}^K e^{ikx} = e^{i(K+1)x/2} sin(Kx/2)/sin(x/2)
        let kk = 37i64;
        let d = dirichlet(&FrequencySet::from_1d(1..=kk));
        for i in 1..200 {
            let x = 0.031 * i as f64;
            let closed = Complex64::from_polar(1.0, (kk + 1) as f64 * x / 2.0)
                * ((kk as f64 * x / 2.0).sin() / (x / 2.0).sin());
            assert!((d.eval_at(&[x]) - closed).norm() < 1e-10);
        }
    }

    #[test]
    fn multiply_examples() {
        let f = random_poly(1, 5, 4, false);
        let one = TrigPolynomial::constant(1, c(1.0, 0.0));
        assert_eq!(f.multiply(&one).unwrap(), f);
        let e1 = TrigPolynomial::monomial(vec![1], c(1.0, 0.0));
        assert_eq!(e1.multiply(&e1).unwrap(), TrigPolynomial::monomial(vec![2], c(1.0, 0.0)));
        let d = dirichlet(&FrequencySet::from_1d([0, 1]));
        let prod = d.multiply(&d.reflect()).unwrap();
        let want = TrigPolynomial::from_terms(
            1,
            [(vec![-1], c(1.0, 0.0)), (vec![0], c(2.0, 0.0)), (vec![1], c(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(prod, want);
        assert!(matches!(
            dirichlet(&FrequencySet::from_1d(0..10)).multiply_capped(&dirichlet(&FrequencySet::from_1d(0..10)), 5),
            Err(Error::SupportCap { .. })
        ));
    }

    #[test]
    fn reflect_examples() {
        let one = TrigPolynomial::constant(1, c(1.0, 0.0));
        assert_eq!(one.reflect(), one);
        let e1 = TrigPolynomial::monomial(vec![1], c(1.0, 0.0));
        assert_eq!(e1.reflect(), TrigPolynomial::monomial(vec![-1], c(1.0, 0.0)));
        let q = FrequencySet::from_1d([1, 4, 7]);
        assert_eq!(dirichlet(&q).reflect(), dirichlet(&q.negate().unwrap()));
    }

    #[test]
    fn l2_examples() {
        assert_eq!(TrigPolynomial::zero(1).norm_l2().value, 0.0);
        let q = make_box(&[1, 1]).unwrap();
        let n = dirichlet(&q).norm_l2();
        assert_eq!(n.value, 3.0);
        assert_eq!(n.grid_size, 0);
    }

    #[test]
    fn l2_against_quadrature() {
        for seed in 0..5 {
            let f = random_poly(seed, 12, 9, false);
            let kmax = f.max_abs_freq()[0] as usize;
            let g = f.values_on_grid(&[64 * (kmax + 1)], DEFAULT_GRID_BUDGET).unwrap();
            let quad = (g.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / g.values.len() as f64).sqrt();
            assert!((quad - f.norm_l2().value).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_matches_direct_evaluation() {
        let f = random_poly(3, 20, 10, false);
        let g = f.values_on_grid(&[50], DEFAULT_GRID_BUDGET).unwrap();
        for i in 0..50 {
            let x = g.node(i);
            assert!((g.values[i] - f.eval_at(&x)).norm() < 1e-10);
        }
        let mut p2 = TrigPolynomial::zero(2);
        for (k, v) in [([1, -2], c(0.5, 1.0)), ([0, 3], c(-1.0, 0.2)), ([-2, 1], c(0.3, 0.0))] {
            p2 = p2.add(&TrigPolynomial::monomial(k.to_vec(), v)).unwrap();
        }
        let g = p2.values_on_grid(&[9, 11], DEFAULT_GRID_BUDGET).unwrap();
        for i in 0..99 {
            assert!((g.values[i] - p2.eval_at(&g.node(i))).norm() < 1e-10);
        }
    }

    #[test]
    fn l1_examples() {
        let k = TrigPolynomial::constant(1, c(3.0, -4.0));
        assert!((k.norm_l1(16).unwrap().value - 5.0).abs() < 1e-12);
        let e1 = TrigPolynomial::monomial(vec![1], c(1.0, 0.0));
        assert!((e1.norm_l1(16).unwrap().value - 1.0).abs() < 1e-12);
        let n = e1.norm_l1(16).unwrap();
        assert_eq!(n.kind, NormKind::L1Quadrature);
        assert_eq!(n.grid_size, 48);
        let mut p3 = TrigPolynomial::zero(3);
        p3 = p3.add(&TrigPolynomial::constant(3, c(1.0, 0.0))).unwrap();
        assert!(matches!(p3.norm_l1(16), Err(Error::Unsupported(_))));
        let huge = TrigPolynomial::monomial(vec![1 << 40], c(1.0, 0.0));
        assert!(matches!(huge.norm_l1(16), Err(Error::GridBudget { .. })));
    }

    #[test]
    fn l1_of_two_cos() {
        // ‖2 + 2cos x‖_1 = 2 since the function is nonnegative with mean 2
        let p = TrigPolynomial::from_terms(
            1,
            [(vec![-1], c(1.0, 0.0)), (vec![0], c(2.0, 0.0)), (vec![1], c(1.0, 0.0))],
        )
        .unwrap();
        assert!((p.norm_l1(16).unwrap().value - 2.0).abs() < 1e-12);
        // ‖cos x‖_1 = 2/π
        let cosx = TrigPolynomial::from_terms(1, [(vec![-1], c(0.5, 0.0)), (vec![1], c(0.5, 0.0))]).unwrap();
        assert!((cosx.norm_l1(64).unwrap().value - 2.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn sup_examples() {
        let k = TrigPolynomial::constant(1, c(0.0, 2.0));
        assert!((k.norm_sup(8).unwrap().value - 2.0).abs() < 1e-12);
        let q = FrequencySet::from_1d([-4, 1, 2, 9]);
        let (n, x) = dirichlet(&q).sup_with_argmax(8, 3).unwrap();
        assert!((n.value - 4.0).abs() < 1e-9);
        assert!(x[0] < 1e-6 || (TAU - x[0]) < 1e-6);
        assert_eq!(n.refinement_passes, 3);
        assert!(dirichlet(&q).norm_sup(2).is_err());
    }

    #[test]
    fn sup_against_dense_scan() {
        for seed in 0..4 {
            let f = random_poly(100 + seed, 16, 12, true);
            let sup = f.norm_sup(8).unwrap().value;
            let scan = f
                .values_on_grid(&[1_000_000], DEFAULT_GRID_BUDGET)
                .unwrap()
                .max_abs();
            assert!((sup - scan).abs() < 1e-6, "sup {sup} scan {scan}");
            assert!(sup >= scan - 1e-12);
        }
    }

    #[test]
    fn sup_2d() {
        let q = make_box(&[2, 1]).unwrap();
        let d = dirichlet(&q).translate(&[0.7, 2.1]);
        let (n, x) = d.sup_with_argmax(8, 3).unwrap();
        assert!((n.value - 15.0).abs() < 1e-8);
        assert!((x[0] - 0.7).abs() < 1e-5 && (x[1] - 2.1).abs() < 1e-5);
    }

    #[test]
    fn branch_bound_matches_grid() {
        for seed in 0..3 {
            let f = random_poly(200 + seed, 40, 8, false);
            let grid = f.norm_sup(8).unwrap().value;
            let (bb, x) = f.sup_branch_bound(1e-9, 1_000_000).unwrap();
            assert!((bb.value - grid).abs() < 1e-6 * grid, "bb {} grid {grid}", bb.value);
            assert!((f.eval_at(&[x]).norm() - bb.value).abs() < 1e-9);
        }
    }

    #[test]
    fn branch_bound_huge_frequencies() {
        // all-plus lacunary sum attains n at x = 0
        let terms = (0..30).map(|j| (vec![1i64 << j], c(1.0, 0.0)));
        let f = TrigPolynomial::from_terms(1, terms).unwrap();
        let (bb, _) = f.sup_branch_bound(1e-9, 2_000_000).unwrap();
        assert!((bb.value - 30.0).abs() < 1e-6);
        assert!(bb.error_bound.unwrap() <= 30.0 * 1e-9 + 1e-12);
    }

    #[test]
    fn lq_norms() {
        let e1 = TrigPolynomial::monomial(vec![3], c(0.0, 2.0));
        for q in [1.0, 2.0, 4.0] {
            assert!((e1.norm_lq(q, 8).unwrap().value - 2.0).abs() < 1e-12);
        }
        let f = random_poly(7, 6, 5, false);
        // quadrature of |f|^2 is exact on this grid
        assert!((f.norm_lq(2.0, 8).unwrap().value - f.norm_l2().value).abs() < 1e-12);
    }

    #[test]
    fn json_layout() {
        let p = TrigPolynomial::monomial(vec![2], c(1.5, -0.5));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":1,"coeffs":[{"k":[2],"re":1.5,"im":-0.5}]}"#);
        let back: TrigPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn integer_track() {
        let a = IntegerPolynomial::dirichlet(&FrequencySet::from_1d([0, 1]));
        let p = a.multiply(&a.reflect(), DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(p.coeff(&[-1]), 1);
        assert_eq!(p.coeff(&[0]), 2);
        assert_eq!(p.coeff(&[1]), 1);
        let b = IntegerPolynomial::dirichlet(&make_box(&[1, 1]).unwrap());
        let p2 = b.multiply(&b, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(p2.coeff(&[0, 0]), 9);
        assert_eq!(p2.num_terms(), 25);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<IntegerPolynomial>(&json).unwrap(), p);
    }

    fn poly_strategy() -> impl Strategy<Value = TrigPolynomial> {
        proptest::collection::vec((-8i64..8, -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|v| {
            TrigPolynomial::from_terms(1, v.into_iter().map(|(k, a, b)| (vec![k], c(a, b)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn norm_ordering(f in poly_strategy()) {
            prop_assume!(!f.is_zero());
            let l1 = f.norm_l1(16).unwrap().value;
            let l2 = f.norm_l2().value;
            let sup = f.norm_sup(8).unwrap().value;
            prop_assert!(l1 <= l2 + 1e-9);
            prop_assert!(l2 <= sup + 1e-9);
            let parseval: f64 = f.terms().map(|(_, c)| c.norm_sqr()).sum();
            prop_assert!((l2 * l2 - parseval).abs() <= 1e-12 * parseval.max(1.0));
        }

        #[test]
        fn l1_quadrature_converges(f in poly_strategy()) {
            let a = f.norm_l1(16).unwrap().value;
            let b = f.norm_l1(32).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-3 * f.norm_l2().value.max(1e-12));
        }

        #[test]
        fn evaluate_is_linear(f in poly_strategy(), g in poly_strategy(), a in -2.0f64..2.0, x in 0.0f64..6.28) {
            let lhs = f.scale(c(a, 0.0)).add(&g).unwrap().eval_at(&[x]);
            let rhs = f.eval_at(&[x]) * a + g.eval_at(&[x]);
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }

        #[test]
        fn multiply_is_bilinear(f in poly_strategy(), g in poly_strategy(), h in poly_strategy(), x in 0.0f64..6.28) {
            let lhs = f.multiply(&g.add(&h).unwrap()).unwrap().eval_at(&[x]);
            let rhs = f.eval_at(&[x]) * (g.eval_at(&[x]) + h.eval_at(&[x]));
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }

        #[test]
        fn reflect_involution(f in poly_strategy()) {
            prop_assert_eq!(f.reflect().reflect(), f);
        }

        #[test]
        fn dirichlet_product_support_is_sumset(a in proptest::collection::vec(-10i64..10, 1..6),
                                               b in proptest::collection::vec(-10i64..10, 1..6)) {
            let (qa, qb) = (FrequencySet::from_1d(a), FrequencySet::from_1d(b));
            let prod = dirichlet(&qa).multiply(&dirichlet(&qb)).unwrap();
            prop_assert_eq!(prod.support(), crate::freqset::sumset(&qa, &qb).unwrap());
        }
    }
}
