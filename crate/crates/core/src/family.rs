//! Subset families over `[n]`, `n ≤ 64`, with subsets stored as bitmasks
//! (bit `x - 1` for ground element `x`).

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::binom::{binomial, binomial_u128};
use crate::error::{invalid, Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::poset::{CayleyPoset, PosetElement};

pub const MAX_GROUND_SET: u32 = 64;

/// Upper limit on the number of subsets any single enumeration visits.
pub const MAX_ENUMERATION: u128 = 1 << 28;

pub type Subset = u64;

/// Ascending 1-based indices of a subset.
pub fn subset_indices(s: Subset) -> Vec<u32> {
    (0..64).filter(|b| s >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn subset_from_indices(n: u32, indices: &[u32]) -> Result<Subset> {
    let mut s = 0u64;
    for &x in indices {
        if x == 0 || x > n {
            return invalid(format!("index {x} outside [1, {n}]"));
        }
        s |= 1 << (x - 1);
    }
    Ok(s)
}

fn full_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// All `k`-subsets of `[n]` in increasing bitmask order (Gosper's hack).
pub fn k_subsets(n: u32, k: u32) -> impl Iterator<Item = Subset> {
    let limit: u128 = 1u128 << n;
    let mut cur: Option<u128> = if k <= n { Some((1u128 << k) - 1) } else { None };
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == 0 {
            None
        } else {
            let lowest = c & c.wrapping_neg();
            let ripple = c + lowest;
            let next = (((ripple ^ c) >> 2) / lowest) | ripple;
            (next < limit).then_some(next)
        };
        Some(c as u64)
    })
}

fn check_enumeration(n: u32, k: u32) -> Result<()> {
    let count = binomial_u128(n as u64, k as u64);
    if count > MAX_ENUMERATION {
        return Err(Error::TooLarge(format!(
            "C({n}, {k}) = {count} subsets exceeds the limit {MAX_ENUMERATION}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGroundSet {
    group: FiniteAbelianGroup,
    weights: Vec<GroupElement>,
}

impl WeightedGroundSet {
    /// `weights[x - 1]` is the weight of ground element `x`.
    pub fn new(group: &FiniteAbelianGroup, weights: Vec<GroupElement>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_GROUND_SET as usize {
            return invalid(format!(
                "ground set size {} outside [1, {MAX_GROUND_SET}]",
                weights.len()
            ));
        }
        if let Some(w) = weights.iter().find(|w| !group.contains(w)) {
            return invalid(format!("weight {w} is not in group {group}"));
        }
        Ok(Self {
            group: group.clone(),
            weights,
        })
    }

    /// `w(1) = w(2) = 2`, every other weight `0`, over `Z_3`.
    pub fn dove(n: u32) -> Result<Self> {
        let g = FiniteAbelianGroup::cyclic(3)?;
        let weights = (1..=n)
            .map(|x| g.element(&[if x <= 2 { 2 } else { 0 }]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&g, weights)
    }

    pub fn n(&self) -> u32 {
        self.weights.len() as u32
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn weights(&self) -> &[GroupElement] {
        &self.weights
    }

    /// The partition classes: ground elements grouped by weight.
    pub fn classes(&self) -> BTreeMap<GroupElement, Vec<u32>> {
        let mut classes: BTreeMap<GroupElement, Vec<u32>> = BTreeMap::new();
        for (i, w) in self.weights.iter().enumerate() {
            classes.entry(w.clone()).or_default().push(i as u32 + 1);
        }
        classes
    }

    /// `w(A) = Σ_{x ∈ A} w(x)`; `w(∅)` is the identity.
    pub fn subset_weight(&self, a: Subset) -> Result<GroupElement> {
        if a & !full_mask(self.n()) != 0 {
            return invalid(format!("subset has indices beyond n = {}", self.n()));
        }
        Ok(self.group.element_at(self.weight_index(a)))
    }

    fn weight_index(&self, a: Subset) -> usize {
        let factors = self.group.factors();
        let mut acc = vec![0u64; factors.len()];
        let mut bits = a;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for ((slot, r), f) in acc.iter_mut().zip(self.weights[x].residues()).zip(factors) {
                *slot = (*slot + r) % f;
            }
        }
        acc.iter().zip(factors).fold(0u64, |i, (r, f)| i * f + r) as usize
    }

    /// `s_γ(i)`: subsets of size `⌊n/2⌋ + i` with weight `gamma`.
    pub fn level_slice(&self, gamma: &GroupElement, i: i64) -> Result<LevelSlice> {
        if !self.group.contains(gamma) {
            return invalid(format!("{gamma} is not in group {}", self.group));
        }
        let n = self.n();
        let size = (n / 2) as i64 + i;
        if size < 0 || size > n as i64 {
            return Ok(LevelSlice {
                family: SubsetFamily::empty(n),
                in_range: false,
            });
        }
        check_enumeration(n, size as u32)?;
        let target = self.group.index_of(gamma);
        let members = k_subsets(n, size as u32)
            .filter(|&a| self.weight_index(a) == target)
            .collect();
        Ok(LevelSlice {
            family: SubsetFamily::from_sorted(n, members),
            in_range: true,
        })
    }

    /// `F(N, w, Π)`: the union of `s_γ(i)` over the elements of the poset.
    pub fn build_family(&self, poset: &CayleyPoset) -> Result<FamilyBuild> {
        if poset.group() != &self.group {
            return invalid(format!(
                "poset group {} differs from weight group {}",
                poset.group(),
                self.group
            ));
        }
        if let Some(w) = self.weights.iter().find(|w| !poset.gens().contains(w)) {
            return invalid(format!("weight {w} is not a generator of the poset"));
        }
        let n = self.n();
        let half = (n / 2) as i64;
        let mut by_level: BTreeMap<i64, Vec<&PosetElement>> = BTreeMap::new();
        for p in poset.elements() {
            let size = half + p.level;
            if size < 0 || size > n as i64 {
                return invalid(format!(
                    "poset level {} gives set size {size} outside [0, {n}]",
                    p.level
                ));
            }
            by_level.entry(p.level).or_default().push(p);
        }
        let m = self.group.order() as usize;
        let mut members = Vec::new();
        let mut counts = Vec::with_capacity(poset.len());
        for (level, elems) in by_level {
            let size = (half + level) as u32;
            check_enumeration(n, size)?;
            let mut slot = vec![usize::MAX; m];
            for (j, p) in elems.iter().enumerate() {
                slot[self.group.index_of(&p.gamma)] = j;
            }
            let mut per = vec![0usize; elems.len()];
            for a in k_subsets(n, size) {
                let j = slot[self.weight_index(a)];
                if j != usize::MAX {
                    per[j] += 1;
                    members.push(a);
                }
            }
            counts.extend(elems.into_iter().cloned().zip(per));
        }
        Ok(FamilyBuild {
            family: SubsetFamily::new(n, members)?,
            counts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSlice {
    pub family: SubsetFamily,
    /// False when `⌊n/2⌋ + i` falls outside `[0, n]`; the family is empty.
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyBuild {
    pub family: SubsetFamily,
    /// Slice size contributed by each poset element, in canonical order.
    pub counts: Vec<(PosetElement, usize)>,
}

/// Four distinct members with `bottom ⊂ left, right ⊂ top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyDiamondWitness {
    pub bottom: Subset,
    pub left: Subset,
    pub right: Subset,
    pub top: Subset,
}

/// Members are kept distinct and sorted by `(size, bitmask)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    n: u32,
    members: Vec<Subset>,
}

fn canonical_key(s: &Subset) -> (u32, u64) {
    (s.count_ones(), *s)
}

impl SubsetFamily {
    pub fn empty(n: u32) -> Self {
        Self {
            n,
            members: Vec::new(),
        }
    }

    pub fn new(n: u32, members: impl IntoIterator<Item = Subset>) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return invalid(format!("n = {n} exceeds {MAX_GROUND_SET}"));
        }
        let mask = full_mask(n);
        let mut members: Vec<Subset> = members.into_iter().collect();
        if let Some(s) = members.iter().find(|&&s| s & !mask != 0) {
            return invalid(format!("member {s:#x} has indices beyond n = {n}"));
        }
        members.sort_by_key(canonical_key);
        members.dedup();
        Ok(Self { n, members })
    }

    fn from_sorted(n: u32, mut members: Vec<Subset>) -> Self {
        members.sort_by_key(canonical_key);
        Self { n, members }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members
            .binary_search_by_key(&canonical_key(&s), canonical_key)
            .is_ok()
    }

    /// Number of members of each size.
    pub fn size_profile(&self) -> BTreeMap<u32, usize> {
        let mut profile = BTreeMap::new();
        for s in &self.members {
            *profile.entry(s.count_ones()).or_insert(0) += 1;
        }
        profile
    }

    pub fn union(&self, other: &SubsetFamily) -> Result<SubsetFamily> {
        SubsetFamily::new(
            self.n.max(other.n),
            self.members.iter().chain(&other.members).copied(),
        )
    }

    /// First diamond in canonical order, or `None` if the family is
    /// diamond-free. For each comparable pair `A ⊊ D` the members strictly
    /// between them are counted; two or more give a diamond (a 4-chain
    /// included).
    pub fn diamond_witness(&self) -> Option<FamilyDiamondWitness> {
        let f = &self.members;
        let len = f.len();
        let strictly_inside = |a: Subset, b: Subset| a != b && a & !b == 0;
        // Sorting by size puts every strict superset after its subsets.
        let up: Vec<FixedBitSet> = (0..len)
            .into_par_iter()
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(len);
                for b in a + 1..len {
                    if strictly_inside(f[a], f[b]) {
                        s.insert(b);
                    }
                }
                s
            })
            .collect();
        let down: Vec<FixedBitSet> = (0..len)
            .into_par_iter()
            .map(|d| {
                let mut s = FixedBitSet::with_capacity(len);
                for b in 0..d {
                    if strictly_inside(f[b], f[d]) {
                        s.insert(b);
                    }
                }
                s
            })
            .collect();
        (0..len).into_par_iter().find_map_first(|a| {
            up[a].ones().find_map(|d| {
                let mut between = up[a].intersection(&down[d]);
                match (between.next(), between.next()) {
                    (Some(x), Some(y)) => Some(FamilyDiamondWitness {
                        bottom: f[a],
                        left: f[x],
                        right: f[y],
                        top: f[d],
                    }),
                    _ => None,
                }
            })
        })
    }

    pub fn is_diamond_free(&self) -> bool {
        self.diamond_witness().is_none()
    }

    /// `Σ_{F} 1 / C(n, |F|)`.
    pub fn lubell(&self) -> BigRational {
        self.size_profile()
            .into_iter()
            .fold(BigRational::zero(), |acc, (size, count)| {
                acc + BigRational::new(BigInt::from(count), binomial(self.n as u64, size as u64))
            })
    }
}

fn all_of_size(n: u32, k: u32) -> Result<impl Iterator<Item = Subset>> {
    check_enumeration(n, k)?;
    Ok(k_subsets(n, k))
}

/// Dove's three-level family on `[n]` for even `n ≥ 6`: sets of size
/// `n/2 - 1` not containing `{1,2}`, of size `n/2` meeting `{1,2}` in zero
/// or two elements, and of size `n/2 + 1` meeting `{1,2}`.
pub fn dove_family(n: u32) -> Result<SubsetFamily> {
    if n < 6 || n % 2 == 1 || n > MAX_GROUND_SET {
        return invalid(format!("Dove's family needs an even n in [6, 64], got {n}"));
    }
    let pair: Subset = 0b11;
    let half = n / 2;
    let mut members: Vec<Subset> = all_of_size(n, half - 1)?
        .filter(|a| a & pair != pair)
        .collect();
    members.extend(all_of_size(n, half)?.filter(|a| (a & pair).count_ones() != 1));
    members.extend(all_of_size(n, half + 1)?.filter(|a| a & pair != 0));
    SubsetFamily::new(n, members)
}

/// Which window to take when two windows of middle levels are equally large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Lower,
    Upper,
}

/// Sizes of the `k` middle levels: the contiguous window of `k` sizes with
/// the largest total, ties resolved by `tie`.
pub fn middle_level_sizes(n: u32, k: u32, tie: TieBreak) -> Result<Vec<u32>> {
    if k > n + 1 {
        return invalid(format!(
            "cannot take {k} levels of a lattice with {} levels",
            n + 1
        ));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let total = |start: u32| -> u128 {
        (start..start + k)
            .map(|s| binomial_u128(n as u64, s as u64))
            .sum()
    };
    let starts = 0..=(n + 1 - k);
    let best = starts.clone().map(total).max().unwrap_or(0);
    let mut winners = starts.filter(|&s| total(s) == best);
    let start = match tie {
        TieBreak::Lower => winners.next(),
        TieBreak::Upper => winners.next_back(),
    }
    .unwrap_or(0);
    Ok((start..start + k).collect())
}

/// The `k` middle levels of the subset lattice of `[n]`.
pub fn middle_levels_family(n: u32, k: u32, tie: TieBreak) -> Result<SubsetFamily> {
    if n > MAX_GROUND_SET {
        return invalid(format!("n = {n} exceeds {MAX_GROUND_SET}"));
    }
    let mut members = Vec::new();
    for size in middle_level_sizes(n, k, tie)? {
        members.extend(all_of_size(n, size)?);
    }
    SubsetFamily::new(n, members)
}
