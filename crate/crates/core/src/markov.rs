//! Exact distribution of the random walk `X_j = ω(a₁) + … + ω(a_j)` on the
//! group, where the steps `ω(x)` are i.i.d. on the generating set.
//!
//! By linearity of expectation `E|S_γ(i)| = C(n, k) · p_k(γ)` with
//! `k = ⌊n/2⌋ + i`, so expected slice and family sizes reduce to
//! convolution powers of the step distribution.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binom::binomial;
use crate::error::{invalid, Result};
use crate::family::{FamilyDiamondWitness, SubsetFamily, WeightedGroundSet, MAX_GROUND_SET};
use crate::group::{FiniteAbelianGroup, GeneratorSet, GroupElement};
use crate::poset::CayleyPoset;

/// Name of the generator used by [`sample_weighting`], reported with samples.
pub const SAMPLER_NAME: &str = "chacha8/stream-per-index";

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Distribution of one step `ω(x)`: strictly positive on every generator.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    gens: GeneratorSet,
    probs: Vec<BigRational>,
}

impl StepDistribution {
    /// `probs[j]` is the probability of `gens.elements()[j]`.
    pub fn new(gens: &GeneratorSet, probs: Vec<BigRational>) -> Result<Self> {
        if probs.len() != gens.len() {
            return invalid(format!(
                "{} probabilities for {} generators",
                probs.len(),
                gens.len()
            ));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_positive()) {
            return invalid(format!("step probability {p} is not positive"));
        }
        let sum: BigRational = probs.iter().sum();
        if !sum.is_one() {
            return invalid(format!("step probabilities sum to {sum}, not 1"));
        }
        Ok(Self {
            gens: gens.clone(),
            probs,
        })
    }

    pub fn uniform(gens: &GeneratorSet) -> Self {
        let p = ratio(1, gens.len() as i64);
        Self {
            gens: gens.clone(),
            probs: vec![p; gens.len()],
        }
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.gens.group()
    }
}

/// A probability vector over the group, indexed by dense element index.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDistribution {
    group: FiniteAbelianGroup,
    probs: Vec<BigRational>,
}

impl GroupDistribution {
    pub fn point_mass(group: &FiniteAbelianGroup, at: &GroupElement) -> Self {
        let mut probs = vec![BigRational::zero(); group.order() as usize];
        probs[group.index_of(at)] = BigRational::one();
        Self {
            group: group.clone(),
            probs,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn prob(&self, e: &GroupElement) -> &BigRational {
        &self.probs[self.group.index_of(e)]
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn support(&self) -> BTreeSet<GroupElement> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, _)| self.group.element_at(i))
            .collect()
    }

    /// One more step of the walk.
    pub fn convolve(&self, step: &StepDistribution) -> GroupDistribution {
        let table = self.group.add_table();
        self.convolve_with(step, &table)
    }

    fn convolve_with(&self, step: &StepDistribution, table: &[Vec<u32>]) -> GroupDistribution {
        let mut next = vec![BigRational::zero(); self.probs.len()];
        for (x, px) in self.probs.iter().enumerate() {
            if px.is_zero() {
                continue;
            }
            for (&eta, q) in step.gens.indices().iter().zip(&step.probs) {
                next[table[x][eta] as usize] += px * q;
            }
        }
        GroupDistribution {
            group: self.group.clone(),
            probs: next,
        }
    }

    fn uniform_mass(&self) -> BigRational {
        ratio(1, self.group.order() as i64)
    }

    /// `½ Σ_γ |p(γ) - 1/m|`.
    pub fn tv_to_uniform(&self) -> BigRational {
        let u = self.uniform_mass();
        let total: BigRational = self.probs.iter().map(|p| (p - &u).abs()).sum();
        total / BigRational::from_integer(2.into())
    }

    /// `max_γ |p(γ) - 1/m|`.
    pub fn max_deviation(&self) -> BigRational {
        let u = self.uniform_mass();
        self.probs
            .iter()
            .map(|p| (p - &u).abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// The successive distributions `p_0, p_1, p_2, …` of the walk.
pub struct ConvolutionPowers {
    step: StepDistribution,
    table: Vec<Vec<u32>>,
    current: GroupDistribution,
}

impl ConvolutionPowers {
    pub fn new(step: &StepDistribution) -> Self {
        let group = step.group();
        Self {
            step: step.clone(),
            table: group.add_table(),
            current: GroupDistribution::point_mass(group, &group.identity()),
        }
    }
}

impl Iterator for ConvolutionPowers {
    type Item = GroupDistribution;

    fn next(&mut self) -> Option<GroupDistribution> {
        let next = self.current.convolve_with(&self.step, &self.table);
        Some(std::mem::replace(&mut self.current, next))
    }
}

/// Exact `k`-fold convolution of the step distribution; `k = 0` is the
/// point mass at the identity.
pub fn convolution_power(step: &StepDistribution, k: u64) -> GroupDistribution {
    ConvolutionPowers::new(step)
        .nth(k as usize)
        .expect("the walk is infinite")
}

/// Floating-point `k`-fold convolution. Each step is a convex combination
/// of the previous vector, so every entry carries an absolute error of at
/// most `k · |H| · 2⁻⁵²`.
pub fn convolution_power_f64(step: &StepDistribution, k: u64) -> Vec<f64> {
    let group = step.group();
    let table = group.add_table();
    let q: Vec<f64> = step
        .probs
        .iter()
        .map(|p| p.to_f64().unwrap_or(0.0))
        .collect();
    let mut p = vec![0.0; group.order() as usize];
    p[group.index_of(&group.identity())] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; p.len()];
        for (x, px) in p.iter().enumerate() {
            if *px == 0.0 {
                continue;
            }
            for (&eta, qe) in step.gens.indices().iter().zip(&q) {
                next[table[x][eta] as usize] += px * qe;
            }
        }
        p = next;
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k: u64,
    pub gamma: GroupElement,
    pub prob: BigRational,
    /// `prob - 1/m`.
    pub dev: BigRational,
}

/// Per-`k` table of the walk's distribution against the uniform one.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistributionReport {
    pub rows: Vec<ReportRow>,
    /// `(k, TV distance to uniform)` for each `k`.
    pub tv: Vec<(u64, BigRational)>,
    /// Largest deviation `max_γ |p_k(γ) - 1/m|` for each `k`.
    pub max_dev: Vec<BigRational>,
    pub epsilon: Option<BigRational>,
    /// Smallest `k₀` such that every tabulated `k ≥ k₀` has all deviations
    /// below `epsilon`.
    pub k0: Option<u64>,
}

impl EquidistributionReport {
    pub fn within_epsilon(&self, k: u64) -> Option<bool> {
        let eps = self.epsilon.as_ref()?;
        Some(&self.max_dev[k as usize] < eps)
    }

    /// Indices `k` at which the TV distance increased over `k - 1`.
    pub fn tv_increases(&self) -> Vec<u64> {
        self.tv
            .windows(2)
            .filter(|w| w[1].1 > w[0].1)
            .map(|w| w[1].0)
            .collect()
    }

    /// Columns `k, gamma, prob, dev, tv`. Exact `p/q` values unless a
    /// decimal precision is given.
    pub fn to_tsv(&self, precision: Option<usize>) -> String {
        let mut out = String::from("k\tgamma\tprob\tdev\ttv\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                row.k,
                row.gamma,
                render(&row.prob, precision),
                render(&row.dev, precision),
                render(&self.tv[row.k as usize].1, precision)
            ));
        }
        out
    }
}

/// Exact rational as `p/q`, or a decimal with the given precision.
pub fn render(x: &BigRational, precision: Option<usize>) -> String {
    match precision {
        None => x.to_string(),
        Some(prec) => match x.to_f64() {
            Some(v) if prec > 17 || v.abs() >= 1e-4 || v == 0.0 => format!("{v:.prec$}"),
            Some(v) => format!("{v:.prec$e}"),
            None => x.to_string(),
        },
    }
}

/// Tabulates `p_k` for `k = 0..=k_max`.
pub fn equidistribution_report(
    step: &StepDistribution,
    k_max: u64,
    epsilon: Option<BigRational>,
) -> EquidistributionReport {
    let group = step.group().clone();
    let u = ratio(1, group.order() as i64);
    let mut rows = Vec::new();
    let mut tv = Vec::new();
    let mut max_dev = Vec::new();
    for (k, dist) in ConvolutionPowers::new(step)
        .take(k_max as usize + 1)
        .enumerate()
    {
        let k = k as u64;
        for (i, p) in dist.probs().iter().enumerate() {
            rows.push(ReportRow {
                k,
                gamma: group.element_at(i),
                prob: p.clone(),
                dev: p - &u,
            });
        }
        tv.push((k, dist.tv_to_uniform()));
        max_dev.push(dist.max_deviation());
    }
    let k0 = epsilon.as_ref().and_then(|eps| {
        let last_bad = max_dev.iter().rposition(|d| d >= eps);
        match last_bad {
            None => Some(0),
            Some(b) if (b as u64) < k_max => Some(b as u64 + 1),
            Some(_) => None,
        }
    });
    EquidistributionReport {
        rows,
        tv,
        max_dev,
        epsilon,
        k0,
    }
}

fn level_size(n: u32, i: i64) -> Result<u64> {
    let size = (n / 2) as i64 + i;
    if size < 0 || size > n as i64 {
        return invalid(format!("level {i} gives set size {size} outside [0, {n}]"));
    }
    Ok(size as u64)
}

/// `E|S_γ(i)| / C(n, ⌊n/2⌋ + i)`, which equals `p_k(γ)`.
pub fn expected_slice_ratio(
    n: u32,
    i: i64,
    step: &StepDistribution,
    gamma: &GroupElement,
) -> Result<BigRational> {
    let k = level_size(n, i)?;
    if !step.group().contains(gamma) {
        return invalid(format!("{gamma} is not in group {}", step.group()));
    }
    Ok(convolution_power(step, k).prob(gamma).clone())
}

/// `E|F(N, ω, Π)| / C(n, ⌊n/2⌋)`, exact.
pub fn expected_family_ratio(
    poset: &CayleyPoset,
    n: u32,
    step: &StepDistribution,
) -> Result<BigRational> {
    if step.gens() != poset.gens() {
        return invalid("step distribution and poset use different generating sets");
    }
    let sizes = poset
        .elements()
        .iter()
        .map(|p| level_size(n, p.level))
        .collect::<Result<Vec<_>>>()?;
    let Some(&k_max) = sizes.iter().max() else {
        return Ok(BigRational::zero());
    };
    let powers: Vec<GroupDistribution> = ConvolutionPowers::new(step)
        .take(k_max as usize + 1)
        .collect();
    let middle = binomial(n as u64, (n / 2) as u64);
    let mut total = BigRational::zero();
    for (p, &k) in poset.elements().iter().zip(&sizes) {
        let prob = powers[k as usize].prob(&p.gamma);
        total += prob * BigRational::from_integer(binomial(n as u64, k));
    }
    Ok(total / BigRational::from_integer(middle))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRatioRow {
    pub n: u32,
    pub ratio: BigRational,
    /// `ℓ / m`.
    pub target: BigRational,
    /// `ratio - target`.
    pub gap: BigRational,
}

pub fn expected_ratio_table(
    poset: &CayleyPoset,
    ns: &[u32],
    step: &StepDistribution,
) -> Result<Vec<ExpectedRatioRow>> {
    let target = ratio(poset.len() as i64, poset.group().order() as i64);
    ns.iter()
        .map(|&n| {
            let r = expected_family_ratio(poset, n, step)?;
            Ok(ExpectedRatioRow {
                n,
                gap: &r - &target,
                ratio: r,
                target: target.clone(),
            })
        })
        .collect()
}

/// Columns `n, ratio, target, gap`.
pub fn expected_ratio_tsv(rows: &[ExpectedRatioRow], precision: Option<usize>) -> String {
    let mut out = String::from("n\tratio\ttarget\tgap\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.n,
            render(&r.ratio, precision),
            render(&r.target, precision),
            render(&r.gap, precision)
        ));
    }
    out
}

/// Draws `ω(1), …, ω(n)`. The weight of ground element `x` comes from the
/// ChaCha8 stream `x` of the generator keyed by `seed`, so every index is
/// independent of how many others are drawn or in which order.
pub fn sample_weighting(n: u32, step: &StepDistribution, seed: u64) -> Result<WeightedGroundSet> {
    if n == 0 || n > MAX_GROUND_SET {
        return invalid(format!("n = {n} outside [1, {MAX_GROUND_SET}]"));
    }
    let two64 = BigInt::from(1u8) << 64;
    let mut cumulative = Vec::with_capacity(step.probs.len());
    let mut acc = BigRational::zero();
    for p in &step.probs {
        acc += p;
        cumulative.push(acc.clone());
    }
    let weights = (1..=n)
        .map(|x| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(x as u64);
            let r = BigInt::from(rng.next_u64());
            // first j with r / 2^64 < cumulative[j]
            let j = cumulative
                .iter()
                .position(|c| &r * c.denom() < c.numer() * &two64)
                .unwrap_or(cumulative.len() - 1);
            step.gens.elements()[j].clone()
        })
        .collect();
    WeightedGroundSet::new(step.group(), weights)
}

#[derive(Debug, Clone)]
pub struct SampledFamily {
    pub ground: WeightedGroundSet,
    pub family: SubsetFamily,
    pub diamond: Option<FamilyDiamondWitness>,
    pub seed: u64,
    pub generator: &'static str,
}

impl SampledFamily {
    pub fn size(&self) -> usize {
        self.family.len()
    }

    pub fn is_diamond_free(&self) -> bool {
        self.diamond.is_none()
    }
}

/// One realization of `F(N, ω, Π)` under a seeded random weighting.
pub fn sample_family(
    n: u32,
    step: &StepDistribution,
    poset: &CayleyPoset,
    seed: u64,
) -> Result<SampledFamily> {
    let ground = sample_weighting(n, step, seed)?;
    let family = ground.build_family(poset)?.family;
    let diamond = family.diamond_witness();
    Ok(SampledFamily {
        ground,
        family,
        diamond,
        seed,
        generator: SAMPLER_NAME,
    })
}
