//! Finite frequency sets `Q ⊂ Z^d` and the families built from them.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Default cap on the cardinality of any set in a sumset chain.
pub const DEFAULT_SUMSET_CAP: usize = 10_000_000;

/// A finite, lexicographically sorted, duplicate-free set of integer vectors.
///
/// Elements are stored flat: element `i` occupies `data[i*dim..(i+1)*dim]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FrequencySetRepr", into = "FrequencySetRepr")]
pub struct FrequencySet {
    dim: usize,
    data: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct FrequencySetRepr {
    dim: usize,
    elements: Vec<Vec<i64>>,
}

impl TryFrom<FrequencySetRepr> for FrequencySet {
    type Error = Error;

    fn try_from(repr: FrequencySetRepr) -> Result<Self> {
        FrequencySet::new(repr.dim, repr.elements)
    }
}

impl From<FrequencySet> for FrequencySetRepr {
    fn from(q: FrequencySet) -> Self {
        FrequencySetRepr {
            dim: q.dim,
            elements: q.iter().map(|k| k.to_vec()).collect(),
        }
    }
}

impl FrequencySet {
    pub fn new(dim: usize, elements: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for e in &elements {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.len(),
                });
            }
        }
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        Ok(FrequencySet {
            dim,
            data: elements.into_iter().flatten().collect(),
        })
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        FrequencySet { dim, data: vec![] }
    }

    /// One-dimensional set from arbitrary (unsorted, possibly repeated) values.
    pub fn from_1d<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let mut data: Vec<i64> = values.into_iter().collect();
        data.sort_unstable();
        data.dedup();
        FrequencySet { dim: 1, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cardinality(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn len(&self) -> usize {
        self.cardinality()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, i64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn get(&self, i: usize) -> &[i64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Values of a one-dimensional set, `None` otherwise.
    pub fn values_1d(&self) -> Option<&[i64]> {
        (self.dim == 1).then_some(self.data.as_slice())
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.position(k).is_some()
    }

    pub fn position(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.cardinality());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(k) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Largest `|k_j|` over the set, per axis.
    pub fn max_abs_per_axis(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        for k in self.iter() {
            for (o, &kj) in out.iter_mut().zip(k) {
                *o = (*o).max(kj.unsigned_abs());
            }
        }
        out
    }

    /// `-Q`.
    pub fn negate(&self) -> Result<Self> {
        let mut elements = Vec::with_capacity(self.cardinality());
        for k in self.iter() {
            let neg: Option<Vec<i64>> = k.iter().map(|&x| x.checked_neg()).collect();
            elements.push(neg.ok_or(Error::FrequencyOverflow)?);
        }
        FrequencySet::new(self.dim, elements)
    }

    pub fn is_subset_of(&self, other: &FrequencySet) -> bool {
        self.dim == other.dim && self.iter().all(|k| other.contains(k))
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &FrequencySet) -> FrequencySet {
        let data = self
            .iter()
            .filter(|k| !other.contains(k))
            .flatten()
            .copied()
            .collect();
        FrequencySet {
            dim: self.dim,
            data,
        }
    }
}

/// The box `{a ∈ Z^d : |a_j| ≤ n_j}`.
pub fn make_box(n_vec: &[u64]) -> Result<FrequencySet> {
    if n_vec.is_empty() {
        return Err(Error::InvalidArgument("box needs at least one axis".into()));
    }
    let dim = n_vec.len();
    let mut bounds = Vec::with_capacity(dim);
    for &n in n_vec {
        bounds.push(i64::try_from(n).map_err(|_| Error::FrequencyOverflow)?);
    }
    let mut data = Vec::new();
    let mut cur: Vec<i64> = bounds.iter().map(|&n| -n).collect();
    // odometer in lexicographic order
    loop {
        data.extend_from_slice(&cur);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok(FrequencySet { dim, data });
            }
            axis -= 1;
            if cur[axis] < bounds[axis] {
                cur[axis] += 1;
                for j in axis + 1..dim {
                    cur[j] = -bounds[j];
                }
                break;
            }
        }
    }
}

/// Lacunary sequence `k_1 = 1`, `k_{j+1} = max(k_j + 1, ⌈b k_j⌉)`.
pub fn make_lacunary(n: usize, b: f64) -> Result<FrequencySet> {
    if n == 0 {
        return Err(Error::InvalidArgument("lacunary length must be ≥ 1".into()));
    }
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio b = {b} must be > 1")));
    }
    let mut out = Vec::with_capacity(n);
    let mut k: i64 = 1;
    out.push(k);
    for _ in 1..n {
        let next = if b.fract() == 0.0 && b < i64::MAX as f64 {
            k.checked_mul(b as i64).ok_or(Error::FrequencyOverflow)?
        } else {
            // f64 products are exact below 2^52
            if k > (1i64 << 52) {
                return Err(Error::FrequencyOverflow);
            }
            let prod = (b * k as f64).ceil();
            if prod >= i64::MAX as f64 {
                return Err(Error::FrequencyOverflow);
            }
            prod as i64
        };
        k = next.max(k.checked_add(1).ok_or(Error::FrequencyOverflow)?);
        out.push(k);
    }
    Ok(FrequencySet::from_1d(out))
}

/// `|k|` range of the dyadic block `ρ(s)` on one axis, as `[lo, hi)`.
fn dyadic_block(s: u32) -> (i64, i64) {
    let lo = if s == 0 { 0 } else { 1i64 << (s - 1) };
    (lo, 1i64 << s)
}

fn dyadic_axis_values(s: u32) -> Vec<i64> {
    let (lo, hi) = dyadic_block(s);
    let mut v = Vec::new();
    for a in lo..hi {
        v.push(a);
        if a != 0 {
            v.push(-a);
        }
    }
    v
}

/// Step hyperbolic cross `Q_n = ∪_{‖s‖₁ ≤ n} ρ(s)` for `d ∈ {1, 2}`, `n ≤ 16`.
pub fn make_hyperbolic_cross(n: u32, d: usize) -> Result<FrequencySet> {
    if n > 16 {
        return Err(Error::Unsupported(format!(
            "hyperbolic cross level n = {n} > 16"
        )));
    }
    match d {
        1 => Ok(FrequencySet::from_1d((0..=n).flat_map(dyadic_axis_values))),
        2 => {
            let mut elements = Vec::new();
            for s1 in 0..=n {
                let a1 = dyadic_axis_values(s1);
                for s2 in 0..=(n - s1) {
                    let a2 = dyadic_axis_values(s2);
                    for &x in &a1 {
                        for &y in &a2 {
                            elements.push(vec![x, y]);
                        }
                    }
                }
            }
            FrequencySet::new(2, elements)
        }
        _ => Err(Error::Unsupported(format!(
            "hyperbolic cross in dimension {d} (only 1 and 2)"
        ))),
    }
}

/// Minkowski sum `A + B`, aborting once the result exceeds `cap` elements.
pub fn sumset_capped(a: &FrequencySet, b: &FrequencySet, cap: usize) -> Result<FrequencySet> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    let too_big = |size| Error::SumsetBudget { step: 1, size, cap };
    if a.is_empty() || b.is_empty() {
        return Ok(FrequencySet::empty(a.dim));
    }
    if a.dim == 1 {
        let (av, bv) = (&a.data, &b.data);
        let lo = av[0].checked_add(bv[0]).ok_or(Error::FrequencyOverflow)?;
        let hi = av[av.len() - 1]
            .checked_add(bv[bv.len() - 1])
            .ok_or(Error::FrequencyOverflow)?;
        let span = (hi as i128 - lo as i128 + 1) as u128;
        let pairs = (av.len() as u128) * (bv.len() as u128);
        if span <= (1u128 << 28) && span <= 64 * pairs.max(1) {
            let mut mark = vec![false; span as usize];
            for &x in av {
                for &y in bv {
                    mark[(x + y - lo) as usize] = true;
                }
            }
            let data: Vec<i64> = mark
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| lo + i as i64)
                .collect();
            if data.len() > cap {
                return Err(too_big(data.len()));
            }
            return Ok(FrequencySet { dim: 1, data });
        }
        let mut seen = HashSet::new();
        for &x in av {
            for &y in bv {
                seen.insert(x.checked_add(y).ok_or(Error::FrequencyOverflow)?);
                if seen.len() > cap {
                    return Err(too_big(seen.len()));
                }
            }
        }
        return Ok(FrequencySet::from_1d(seen));
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for x in a.iter() {
        for y in b.iter() {
            let s: Option<Vec<i64>> = x.iter().zip(y).map(|(p, q)| p.checked_add(*q)).collect();
            seen.insert(s.ok_or(Error::FrequencyOverflow)?);
            if seen.len() > cap {
                return Err(too_big(seen.len()));
            }
        }
    }
    FrequencySet::new(a.dim, seen.into_iter().collect())
}

pub fn sumset(a: &FrequencySet, b: &FrequencySet) -> Result<FrequencySet> {
    sumset_capped(a, b, DEFAULT_SUMSET_CAP)
}

/// `[Q_1, …, Q_{s+1}]` with `Q_1 = Q`, `Q_{j+1} = Q_j + Q`.
pub fn iterated_sumset_chain(q: &FrequencySet, s: usize, cap: usize) -> Result<Vec<FrequencySet>> {
    if s == 0 {
        return Err(Error::InvalidArgument("chain length s must be ≥ 1".into()));
    }
    if q.cardinality() > cap {
        return Err(Error::SumsetBudget {
            step: 1,
            size: q.cardinality(),
            cap,
        });
    }
    let mut chain = Vec::with_capacity(s + 1);
    chain.push(q.clone());
    for j in 1..=s {
        let next = sumset_capped(&chain[j - 1], q, cap).map_err(|e| match e {
            Error::SumsetBudget { size, cap, .. } => Error::SumsetBudget {
                step: j + 1,
                size,
                cap,
            },
            other => other,
        })?;
        chain.push(next);
    }
    Ok(chain)
}

/// The uniform draws `w_1..w_K` behind a random spectrum.
pub fn spectrum_draws(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..k).map(|_| rng.random::<f64>()).collect()
}

/// `Q(w) = {k ∈ [1, K] : w_k ≤ p}`.
pub fn spectrum_from_draws(draws: &[f64], p: f64) -> FrequencySet {
    FrequencySet::from_1d(
        draws
            .iter()
            .enumerate()
            .filter(|(_, &w)| w <= p)
            .map(|(i, _)| i as i64 + 1),
    )
}

/// Random subset of `[1, K]`, each element kept independently with probability `p`.
pub fn sample_random_spectrum(k: usize, p: f64, seed: u64) -> Result<FrequencySet> {
    if k < 4 {
        return Err(Error::InvalidArgument(format!("K = {k} must be ≥ 4")));
    }
    if !(p > 0.0 && p <= 0.25) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1/4]")));
    }
    Ok(spectrum_from_draws(&spectrum_draws(k, seed), p))
}

/// `Q^- = [1, K] \ Q`.
pub fn complement_in_range(q: &FrequencySet, k: i64) -> Result<FrequencySet> {
    let vals = q.values_1d().ok_or(Error::DimensionMismatch {
        expected: 1,
        got: q.dim(),
    })?;
    if let Some(&bad) = vals.iter().find(|&&v| v < 1 || v > k) {
        return Err(Error::OutOfRange {
            element: vec![bad],
            upper: k,
        });
    }
    Ok(FrequencySet::from_1d(
        (1..=k).filter(|v| vals.binary_search(v).is_err()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_sumset(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    #[test]
    fn box_examples() {
        let z = make_box(&[0]).unwrap();
        assert_eq!(z.cardinality(), 1);
        assert_eq!(z.values_1d().unwrap(), &[0]);
        assert_eq!(make_box(&[1]).unwrap().values_1d().unwrap(), &[-1, 0, 1]);
        let b = make_box(&[1, 1]).unwrap();
        assert_eq!(b.cardinality(), 9);
        assert!(b.iter().all(|k| k.iter().all(|x| x.abs() <= 1)));
        assert!(make_box(&[]).is_err());
    }

    #[test]
    fn box_is_sorted() {
        let b = make_box(&[2, 1, 3]).unwrap();
        assert_eq!(b.cardinality(), 5 * 3 * 7);
        let v: Vec<&[i64]> = b.iter().collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lacunary_examples() {
        assert_eq!(make_lacunary(1, 2.0).unwrap().values_1d().unwrap(), &[1]);
        assert_eq!(make_lacunary(4, 2.0).unwrap().values_1d().unwrap(), &[1, 2, 4, 8]);
        assert_eq!(make_lacunary(3, 3.0).unwrap().values_1d().unwrap(), &[1, 3, 9]);
        // ceiling rounding for non-integer ratios
        assert_eq!(make_lacunary(5, 1.5).unwrap().values_1d().unwrap(), &[1, 2, 3, 5, 8]);
        assert!(make_lacunary(3, 1.0).is_err());
        assert_eq!(make_lacunary(80, 2.0), Err(Error::FrequencyOverflow));
        assert_eq!(make_lacunary(200, 1.5), Err(Error::FrequencyOverflow));
    }

    #[test]
    fn hyperbolic_cross_examples() {
        assert_eq!(make_hyperbolic_cross(0, 1).unwrap().values_1d().unwrap(), &[0]);
        let q2 = make_hyperbolic_cross(2, 1).unwrap();
        assert_eq!(q2.values_1d().unwrap(), &[-3, -2, -1, 0, 1, 2, 3]);
        assert!(make_hyperbolic_cross(3, 3).is_err());
        assert!(make_hyperbolic_cross(17, 1).is_err());
    }

    /// Direct enumeration over the box [-2^n, 2^n]^2 testing block membership.
    fn brute_cross_2d(n: u32) -> usize {
        let r = 1i64 << n;
        let level = |k: i64| -> u32 {
            // smallest s with |k| < 2^s
            let a = k.unsigned_abs();
            (0..=n + 1).find(|&s| a < (1u64 << s)).unwrap()
        };
        let mut count = 0;
        for x in -r..=r {
            for y in -r..=r {
                if level(x) + level(y) <= n {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn hyperbolic_cross_2d_matches_enumeration() {
        // n = 1: blocks (0,0),(1,0),(0,1) -> 1 + 2 + 2
        assert_eq!(make_hyperbolic_cross(1, 2).unwrap().cardinality(), 5);
        for n in 0..=6 {
            assert_eq!(
                make_hyperbolic_cross(n, 2).unwrap().cardinality(),
                brute_cross_2d(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn sumset_examples() {
        let q = FrequencySet::from_1d([1, 5, 7]);
        let zero = FrequencySet::from_1d([0]);
        assert_eq!(sumset(&zero, &q).unwrap(), q);
        let ab = FrequencySet::from_1d([0, 1]);
        assert_eq!(sumset(&ab, &ab).unwrap().values_1d().unwrap(), &[0, 1, 2]);
        let l = FrequencySet::from_1d([1, 3, 9]);
        assert_eq!(
            sumset(&l, &l).unwrap().values_1d().unwrap(),
            brute_sumset(&[1, 3, 9], &[1, 3, 9]).as_slice()
        );
        assert_eq!(sumset(&l, &l).unwrap().values_1d().unwrap(), &[2, 4, 6, 10, 12, 18]);
        let two = make_box(&[1, 1]).unwrap();
        assert!(matches!(sumset(&l, &two), Err(Error::DimensionMismatch { .. })));
        let big = FrequencySet::from_1d([i64::MAX - 1]);
        assert_eq!(sumset(&big, &big), Err(Error::FrequencyOverflow));
    }

    #[test]
    fn sumset_sparse_path() {
        let a = FrequencySet::from_1d([0, 1_000_000_000]);
        let b = FrequencySet::from_1d([0, 1, 2_000_000_000_000]);
        let s = sumset(&a, &b).unwrap();
        assert_eq!(
            s.values_1d().unwrap(),
            brute_sumset(a.values_1d().unwrap(), b.values_1d().unwrap()).as_slice()
        );
    }

    #[test]
    fn chain_examples() {
        let zero = FrequencySet::from_1d([0]);
        let c = iterated_sumset_chain(&zero, 3, DEFAULT_SUMSET_CAP).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|q| *q == zero));

        let ab = FrequencySet::from_1d([0, 1]);
        let c = iterated_sumset_chain(&ab, 2, DEFAULT_SUMSET_CAP).unwrap();
        let got: Vec<Vec<i64>> = c.iter().map(|q| q.values_1d().unwrap().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]);

        let lam = make_lacunary(3, 3.0).unwrap();
        let c = iterated_sumset_chain(&lam, 3, DEFAULT_SUMSET_CAP).unwrap();
        let mut brute = vec![1i64, 3, 9];
        for (j, qj) in c.iter().enumerate() {
            assert_eq!(qj.values_1d().unwrap(), brute.as_slice(), "Q_{}", j + 1);
            brute = brute_sumset(&brute, &[1, 3, 9]);
        }
        // 1+1+1+9 = 3+3+3+3 is the first collision
        let cards: Vec<usize> = c.iter().map(|q| q.cardinality()).collect();
        assert_eq!(cards, vec![3, 6, 10, 14]);
    }

    #[test]
    fn chain_cap_reports_step() {
        let q = FrequencySet::from_1d([0, 1, 10, 100]);
        match iterated_sumset_chain(&q, 4, 19) {
            Err(Error::SumsetBudget { step, .. }) => assert_eq!(step, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_spectrum_examples() {
        let a = sample_random_spectrum(100, 0.25, 42).unwrap();
        let b = sample_random_spectrum(100, 0.25, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.values_1d().unwrap().iter().all(|&k| (1..=100).contains(&k)));
        assert!(sample_random_spectrum(3, 0.25, 1).is_err());
        assert!(sample_random_spectrum(10, 0.3, 1).is_err());
    }

    #[test]
    fn random_spectrum_mean_cardinality() {
        // E|Q| = pK, Var = p(1-p)K; the mean of 200 trials has sd sqrt(Var/200)
        let (k, p, trials) = (400usize, 0.2, 200u64);
        let total: usize = (0..trials)
            .map(|t| sample_random_spectrum(k, p, 1000 + t).unwrap().cardinality())
            .sum();
        let mean = total as f64 / trials as f64;
        let sd = (p * (1.0 - p) * k as f64 / trials as f64).sqrt();
        assert!((mean - p * k as f64).abs() <= 5.0 * sd, "mean {mean}");
    }

    #[test]
    fn random_spectrum_inclusion_frequency() {
        let (k, p, trials) = (8usize, 0.1, 10_000u64);
        let mut hits = vec![0usize; k];
        for t in 0..trials {
            for &v in sample_random_spectrum(k, p, t).unwrap().values_1d().unwrap() {
                hits[(v - 1) as usize] += 1;
            }
        }
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        for h in hits {
            let freq = h as f64 / trials as f64;
            assert!((freq - p).abs() <= 5.0 * sd, "freq {freq}");
        }
    }

    #[test]
    fn complement_examples() {
        let full = FrequencySet::from_1d(1..=6);
        assert!(complement_in_range(&full, 6).unwrap().is_empty());
        let q = FrequencySet::from_1d([2]);
        assert_eq!(complement_in_range(&q, 3).unwrap().values_1d().unwrap(), &[1, 3]);
        let r = sample_random_spectrum(50, 0.25, 9).unwrap();
        let c = complement_in_range(&r, 50).unwrap();
        assert_eq!(r.cardinality() + c.cardinality(), 50);
        assert!(matches!(
            complement_in_range(&FrequencySet::from_1d([0, 2]), 3),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn json_layout() {
        let q = make_box(&[1, 0]).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"dim":2,"elements":[[-1,0],[0,0],[1,0]]}"#);
        let back: FrequencySet = serde_json::from_str(r#"{"dim":1,"elements":[[3],[1],[3]]}"#).unwrap();
        assert_eq!(back.values_1d().unwrap(), &[1, 3]);
        assert!(serde_json::from_str::<FrequencySet>(r#"{"dim":2,"elements":[[3]]}"#).is_err());
    }

    fn small_set_1d() -> impl Strategy<Value = FrequencySet> {
        proptest::collection::vec(-20i64..20, 1..6).prop_map(FrequencySet::from_1d)
    }

    fn small_set_2d() -> impl Strategy<Value = FrequencySet> {
        proptest::collection::vec((-5i64..5, -5i64..5), 1..5).prop_map(|v| {
            FrequencySet::new(2, v.into_iter().map(|(a, b)| vec![a, b]).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn sumset_commutative_associative_1d(a in small_set_1d(), b in small_set_1d(), c in small_set_1d()) {
            prop_assert_eq!(sumset(&a, &b).unwrap(), sumset(&b, &a).unwrap());
            let l = sumset(&sumset(&a, &b).unwrap(), &c).unwrap();
            let r = sumset(&a, &sumset(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn sumset_commutative_associative_2d(a in small_set_2d(), b in small_set_2d(), c in small_set_2d()) {
            prop_assert_eq!(sumset(&a, &b).unwrap(), sumset(&b, &a).unwrap());
            let l = sumset(&sumset(&a, &b).unwrap(), &c).unwrap();
            let r = sumset(&a, &sumset(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn sumset_bounds(a in small_set_1d(), b in small_set_1d()) {
            let s = sumset(&a, &b).unwrap();
            prop_assert!(s.cardinality() <= a.cardinality() * b.cardinality());
            for x in a.iter() {
                for y in b.iter() {
                    prop_assert!(s.contains(&[x[0] + y[0]]));
                }
            }
        }

        #[test]
        fn chain_nondecreasing(a in small_set_1d(), s in 1usize..5) {
            let c = iterated_sumset_chain(&a, s, DEFAULT_SUMSET_CAP).unwrap();
            prop_assert_eq!(c.len(), s + 1);
            for w in c.windows(2) {
                prop_assert!(w[0].cardinality() <= w[1].cardinality());
            }
        }

        #[test]
        fn chain_of_progression(start in -10i64..10, step in 1i64..5, n in 1usize..8, s in 1usize..6) {
            let q = FrequencySet::from_1d((0..n as i64).map(|i| start + i * step));
            let c = iterated_sumset_chain(&q, s, DEFAULT_SUMSET_CAP).unwrap();
            for (idx, qj) in c.iter().enumerate() {
                let j = idx + 1;
                prop_assert_eq!(qj.cardinality(), j * (n - 1) + 1);
            }
        }

        #[test]
        fn lacunary_ratio(n in 1usize..20, b in 1.05f64..4.0) {
            let l = make_lacunary(n, b).unwrap();
            let v = l.values_1d().unwrap();
            prop_assert_eq!(v[0], 1);
            prop_assert_eq!(v.len(), n);
            for w in v.windows(2) {
                prop_assert!(w[1] as f64 >= b * w[0] as f64);
            }
        }

        #[test]
        fn box_cardinality(n in proptest::collection::vec(0u64..4, 1..4)) {
            let expect: u64 = n.iter().map(|&x| 2 * x + 1).product();
            prop_assert_eq!(make_box(&n).unwrap().cardinality() as u64, expect);
        }
    }
}
