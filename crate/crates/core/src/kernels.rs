//! Kernels `V` whose Fourier coefficients equal one on a target spectrum `Q`.
//!
//! Every construction is carried on an exact integer track (numerator
//! polynomial over a common denominator) so the coefficient identities on `Q`
//! are checked without rounding. `‖V‖_1` bounds the best approximation of
//! `D_Q` in L1 by polynomials with no frequencies in `Q`, using at most
//! `off_terms` extra terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freqset::{iterated_sumset_chain, FrequencySet, DEFAULT_SUMSET_CAP};
use crate::par;
use crate::trigpoly::{IntegerPolynomial, NormEstimate, TrigPolynomial, DEFAULT_L1_OVERSAMPLE};

/// Relative slack allowed when comparing quadrature L1 values with bounds.
pub const BOUND_RTOL: f64 = 1e-3;

/// Default cap on the number of terms of an expanded Riesz product.
pub const DEFAULT_EXPAND_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClassicalVp,
    GeneralizedVp,
    Riesz,
    RieszSplit,
    Block,
}

/// Outcome of the exact and quadrature checks on a generalized kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub chain_cardinalities: Vec<usize>,
    pub nu: usize,
    pub ratio: f64,
    /// `(|Q_{s+1}|/|Q|)^{1/s}`.
    pub geometric_mean_ratio: f64,
    pub coefficients_on_target_exact: bool,
    pub off_target_coefficients_in_range: bool,
    pub f_nu_l1: f64,
    pub f_nu_l1_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConstruction {
    pub kernel: TrigPolynomial,
    /// `kernel = numerator / denominator` exactly.
    pub numerator: IntegerPolynomial,
    pub denominator: i64,
    pub target: FrequencySet,
    pub off_terms: usize,
    pub l1_measured: NormEstimate,
    pub l1_certified_bound: f64,
    pub method: KernelMethod,
    /// Number of sub-kernels summed (1 for single constructions).
    pub parts: usize,
    pub chain: Option<ChainReport>,
}

impl KernelConstruction {
    fn assemble(
        numerator: IntegerPolynomial,
        denominator: i64,
        target: &FrequencySet,
        bound: f64,
        method: KernelMethod,
        parts: usize,
        chain: Option<ChainReport>,
    ) -> Result<Self> {
        for k in target.iter() {
            if numerator.coeff(k) != denominator {
                return Err(Error::Invariant(format!(
                    "coefficient at {k:?} is {}/{denominator}, not 1",
                    numerator.coeff(k)
                )));
            }
        }
        let kernel = numerator.to_trig(denominator);
        let l1_measured = kernel.norm_l1(DEFAULT_L1_OVERSAMPLE)?;
        Ok(KernelConstruction {
            off_terms: numerator.num_terms() - target.cardinality(),
            kernel,
            numerator,
            denominator,
            target: target.clone(),
            l1_measured,
            l1_certified_bound: bound,
            method,
            parts,
            chain,
        })
    }

    /// The coefficient of `V` at `k` as an exact fraction.
    pub fn coeff_exact(&self, k: &[i64]) -> (i64, i64) {
        (self.numerator.coeff(k), self.denominator)
    }
}

pub fn dirichlet(q: &FrequencySet) -> TrigPolynomial {
    IntegerPolynomial::dirichlet(q).to_trig(1)
}

/// `(2n+1)^{-1} Σ_{k=n}^{3n} D_{[-k,k]}`.
pub fn classical_vp(n: u32) -> Result<KernelConstruction> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let n = n as i64;
    let num = IntegerPolynomial::from_terms(1, (-3 * n..=3 * n).map(|j| (vec![j], 3 * n - n.max(j.abs()) + 1)));
    KernelConstruction::assemble(
        num,
        2 * n + 1,
        &FrequencySet::from_1d(-n..=n),
        3.0,
        KernelMethod::ClassicalVp,
        1,
        None,
    )
}

/// `f_ν = D_{Q_{ν+1}}(x) D_{Q_ν}(-x)` over the chain `Q_j = Q + … + Q`.
fn chain_product(chain: &[FrequencySet], nu: usize) -> Result<IntegerPolynomial> {
    let big = IntegerPolynomial::dirichlet(&chain[nu]);
    let small = IntegerPolynomial::dirichlet(&chain[nu - 1]).reflect();
    big.multiply(&small, usize::MAX)
}

/// Kernel `f_ν/|Q_ν|` with `ν ≤ s` minimizing `|Q_{ν+1}|/|Q_ν|`.
pub fn generalized_vp(q: &FrequencySet, s: usize) -> Result<KernelConstruction> {
    generalized_vp_capped(q, s, DEFAULT_SUMSET_CAP)
}

pub fn generalized_vp_capped(q: &FrequencySet, s: usize, cap: usize) -> Result<KernelConstruction> {
    check_target(q)?;
    if s == 0 || s > q.cardinality() {
        return Err(Error::InvalidArgument(format!(
            "s = {s} outside [1, |Q| = {}]",
            q.cardinality()
        )));
    }
    let chain = iterated_sumset_chain(q, s, cap)?;
    let cards: Vec<usize> = chain.iter().map(|c| c.cardinality()).collect();
    let mut nu = 1;
    for j in 2..=s {
        // |Q_{j+1}|/|Q_j| < |Q_{ν+1}|/|Q_ν| without division
        if (cards[j] as u128) * (cards[nu - 1] as u128) < (cards[nu] as u128) * (cards[j - 1] as u128) {
            nu = j;
        }
    }
    build_from_chain(q, &chain, nu, s)
}

/// Kernel `f_ν/|Q_ν|` for a caller-chosen `ν ≥ 1`.
pub fn generalized_vp_fixed(q: &FrequencySet, nu: usize) -> Result<KernelConstruction> {
    check_target(q)?;
    if nu == 0 {
        return Err(Error::InvalidArgument("ν must be ≥ 1".into()));
    }
    let chain = iterated_sumset_chain(q, nu, DEFAULT_SUMSET_CAP)?;
    build_from_chain(q, &chain, nu, nu)
}

fn check_target(q: &FrequencySet) -> Result<()> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("target spectrum is empty".into()));
    }
    Ok(())
}

fn build_from_chain(q: &FrequencySet, chain: &[FrequencySet], nu: usize, s: usize) -> Result<KernelConstruction> {
    let cards: Vec<usize> = chain.iter().map(|c| c.cardinality()).collect();
    let (big, small) = (cards[nu] as f64, cards[nu - 1] as f64);
    let ratio = big / small;
    let geometric = (cards[s] as f64 / cards[0] as f64).powf(1.0 / s as f64);
    let best = (1..=s)
        .map(|j| cards[j] as f64 / cards[j - 1] as f64)
        .fold(f64::INFINITY, f64::min);
    if best > geometric * (1.0 + 1e-12) {
        return Err(Error::Invariant(format!(
            "min chain ratio {best} exceeds geometric mean {geometric}"
        )));
    }

    let f = chain_product(chain, nu)?;
    let qn = cards[nu - 1] as i64;
    let on_target = q.iter().all(|k| f.coeff(k) == qn);
    let in_range = f.terms().all(|(k, c)| q.contains(k) || (1..=qn).contains(&c));
    if !on_target || !in_range {
        return Err(Error::Invariant(format!(
            "f_{nu} coefficients: on Q exact = {on_target}, off Q in [1, {qn}] = {in_range}"
        )));
    }

    let bound = ratio.sqrt();
    let mut kc = KernelConstruction::assemble(f, qn, q, bound, KernelMethod::GeneralizedVp, 1, None)?;
    let f_l1 = kc.l1_measured.value * small;
    let f_bound = (big * small).sqrt();
    if kc.l1_measured.value > bound * (1.0 + BOUND_RTOL) || f_l1 > f_bound * (1.0 + BOUND_RTOL) {
        return Err(Error::Invariant(format!(
            "measured L1 {} above certified bound {bound}",
            kc.l1_measured.value
        )));
    }
    kc.chain = Some(ChainReport {
        chain_cardinalities: cards,
        nu,
        ratio,
        geometric_mean_ratio: geometric,
        coefficients_on_target_exact: on_target,
        off_target_coefficients_in_range: in_range,
        f_nu_l1: f_l1,
        f_nu_l1_bound: f_bound,
    });
    Ok(kc)
}

fn lacunary_values(lacunary: &FrequencySet) -> Result<&[i64]> {
    let v = lacunary
        .values_1d()
        .ok_or_else(|| Error::Unsupported("Riesz products need d = 1".into()))?;
    if v.is_empty() {
        return Err(Error::InvalidArgument("empty lacunary set".into()));
    }
    if v[0] <= 0 {
        return Err(Error::InvalidArgument("lacunary frequencies must be positive".into()));
    }
    Ok(v)
}

/// `2^n R = Π_j (2 + e^{ik_j x} + e^{-ik_j x})`; the coefficient at a signed
/// subset sum with `z` unused frequencies is `2^z`.
pub fn riesz_numerator(lacunary: &FrequencySet, expand_cap: usize) -> Result<IntegerPolynomial> {
    let v = lacunary_values(lacunary)?;
    for (i, w) in v.windows(2).enumerate() {
        if (w[1] as i128) < 3 * w[0] as i128 {
            return Err(Error::NonUniqueRepresentation {
                index: i + 1,
                ratio: w[1] as f64 / w[0] as f64,
            });
        }
    }
    let n = v.len();
    let size = 3f64.powi(n as i32);
    if n > 62 || size > expand_cap as f64 {
        return Err(Error::SupportCap {
            size: size.min(usize::MAX as f64) as usize,
            cap: expand_cap,
        });
    }
    let mut acc = IntegerPolynomial::from_terms(1, [(vec![0], 1)]);
    for &k in v {
        let factor = IntegerPolynomial::from_terms(1, [(vec![-k], 1), (vec![0], 2), (vec![k], 1)]);
        acc = acc.multiply(&factor, expand_cap)?;
    }
    Ok(acc)
}

/// `V = 2R` for a lacunary set with ratio at least 3.
pub fn riesz_product(lacunary: &FrequencySet, expand_cap: usize) -> Result<KernelConstruction> {
    let num = riesz_numerator(lacunary, expand_cap)?;
    let n = lacunary.cardinality() as u32;
    KernelConstruction::assemble(num, 1i64 << (n - 1), lacunary, 2.0, KernelMethod::Riesz, 1, None)
}

/// Splits an increasing sequence greedily into subsequences with
/// consecutive ratio at least `ratio`.
pub fn split_lacunary(values: &[i64], ratio: i64) -> Vec<Vec<i64>> {
    let mut parts: Vec<Vec<i64>> = Vec::new();
    for &k in values {
        match parts
            .iter_mut()
            .find(|p| (k as i128) >= ratio as i128 * *p.last().expect("parts are non-empty") as i128)
        {
            Some(p) => p.push(k),
            None => parts.push(vec![k]),
        }
    }
    parts
}

/// Sums sub-kernels over a common denominator and restores coefficient one on
/// the target where other parts' off-target terms landed on it.
fn combine(parts: &[(IntegerPolynomial, i64, f64)], target: &FrequencySet) -> Result<(IntegerPolynomial, i64, f64)> {
    let mut den = 1i64;
    for (_, d, _) in parts {
        den = lcm(den, *d).ok_or(Error::FrequencyOverflow)?;
    }
    let mut num = IntegerPolynomial::zero(target.dim());
    let mut bound = 0.0;
    for (p, d, b) in parts {
        num.add_scaled(p, den / d)?;
        bound += b;
    }
    let mut correction = 0i64;
    for k in target.iter() {
        let delta = den - num.coeff(k);
        if delta != 0 {
            num.add_term(k.to_vec(), delta)?;
            correction = correction.checked_add(delta.abs()).ok_or(Error::FrequencyOverflow)?;
        }
    }
    Ok((num, den, bound + correction as f64 / den as f64))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> Option<i64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Riesz kernel for a lacunary set of any ratio > 1: one Riesz product per
/// ratio-3 subsequence, summed and corrected back to one on the target.
pub fn riesz_split(lacunary: &FrequencySet, expand_cap: usize) -> Result<KernelConstruction> {
    let v = lacunary_values(lacunary)?;
    let groups = split_lacunary(v, 3);
    let parts: Vec<(IntegerPolynomial, i64, f64)> = par::map_slice(&groups, |g| {
        let n = g.len() as u32;
        riesz_numerator(&FrequencySet::from_1d(g.iter().copied()), expand_cap).map(|num| (num, 1i64 << (n - 1), 2.0))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let (num, den, bound) = combine(&parts, lacunary)?;
    KernelConstruction::assemble(num, den, lacunary, bound, KernelMethod::RieszSplit, groups.len(), None)
}

/// Block construction: consecutive blocks of length `[n^{1-α}]`, a
/// generalized kernel per block (chain length `s`, default the block length),
/// summed and corrected.
pub fn block_kernel(q: &FrequencySet, alpha: f64, s: Option<usize>) -> Result<KernelConstruction> {
    check_target(q)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside (0, 1)")));
    }
    let n = q.cardinality();
    let len = ((n as f64).powf(1.0 - alpha).floor() as usize).max(1);
    let blocks: Vec<FrequencySet> = (0..n / len + 1)
        .map(|b| (b * len, ((b + 1) * len).min(n)))
        .filter(|(lo, hi)| lo < hi)
        .map(|(lo, hi)| {
            FrequencySet::new(q.dim(), (lo..hi).map(|i| q.get(i).to_vec()).collect())
                .expect("subset of a valid set")
        })
        .collect();
    let parts: Vec<(IntegerPolynomial, i64, f64)> = par::map_slice(&blocks, |b| {
        let sb = s.unwrap_or(b.cardinality()).min(b.cardinality());
        generalized_vp(b, sb).map(|kc| (kc.numerator, kc.denominator, kc.l1_certified_bound))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let (num, den, bound) = combine(&parts, q)?;
    KernelConstruction::assemble(num, den, q, bound, KernelMethod::Block, blocks.len(), None)
}

/// Upper bound for the best `off_terms`-term L1 approximation error of `D_Q`
/// by polynomials without frequencies in `Q`.
pub fn mterm_error_bound(kc: &KernelConstruction) -> f64 {
    kc.l1_measured.value
}
