//! Finite abelian groups as direct products of cyclic groups, generating
//! sets and their iterated sumsets.
//!
//! Elements are residue vectors. Every element also has a dense index in
//! `0..order` (mixed radix, first factor most significant), so index order
//! coincides with lexicographic residue order.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, RwLock};

use fixedbitset::FixedBitSet;
use num_integer::Integer;

use crate::error::{invalid, Error, Result};

/// Largest group order accepted. Most operations enumerate the group.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    order: u64,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Element literal: residues joined by `:`; the element of the trivial
/// (factorless) group is written `()`.
impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.is_empty() {
            return f.write_str("()");
        }
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

/// Group literal: factors joined by `x`; the factorless group is `trivial`.
impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("trivial");
        }
        for (i, m) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FiniteAbelianGroup {
    /// Direct product of cyclic groups `Z_f` for each factor `f`.
    pub fn new(factors: &[u64]) -> Result<Self> {
        let mut order: u64 = 1;
        for &f in factors {
            if f == 0 {
                return invalid("group factors must be at least 1");
            }
            order = order
                .checked_mul(f)
                .filter(|&o| o <= MAX_GROUP_ORDER)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "group order exceeds the limit {MAX_GROUP_ORDER}"
                    ))
                })?;
        }
        Ok(Self {
            factors: factors.to_vec(),
            order,
        })
    }

    /// Signed-input variant used by front ends, rejecting non-positive factors.
    pub fn from_signed(factors: &[i64]) -> Result<Self> {
        let mut v = Vec::with_capacity(factors.len());
        for &f in factors {
            if f < 1 {
                return invalid(format!("group factor {f} is not positive"));
            }
            v.push(f as u64);
        }
        Self::new(&v)
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(&[m])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.factors.len()],
        }
    }

    /// Element with the given residues; each must already be reduced.
    pub fn element(&self, residues: &[u64]) -> Result<GroupElement> {
        if residues.len() != self.factors.len() {
            return invalid(format!(
                "element has {} residues but group {} has {} factors",
                residues.len(),
                self,
                self.factors.len()
            ));
        }
        for (r, f) in residues.iter().zip(&self.factors) {
            if r >= f {
                return invalid(format!("residue {r} not reduced modulo {f}"));
            }
        }
        Ok(GroupElement {
            residues: residues.to_vec(),
        })
    }

    /// Element from arbitrary integers, reduced componentwise.
    pub fn reduce(&self, values: &[i64]) -> Result<GroupElement> {
        if values.len() != self.factors.len() {
            return invalid(format!(
                "element has {} residues but group {} has {} factors",
                values.len(),
                self,
                self.factors.len()
            ));
        }
        Ok(GroupElement {
            residues: values
                .iter()
                .zip(&self.factors)
                .map(|(&v, &f)| (v as i128).mod_floor(&(f as i128)) as u64)
                .collect(),
        })
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        e.residues.len() == self.factors.len()
            && e.residues.iter().zip(&self.factors).all(|(r, f)| r < f)
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            invalid(format!("element {e} does not belong to group {self}"))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, &self.neg_unchecked(b)))
    }

    /// `t·a` for any signed integer `t`.
    pub fn scale(&self, a: &GroupElement, t: i64) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.scale_unchecked(a, t))
    }

    pub(crate) fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((x, y), f)| (x + y) % f)
                .collect(),
        }
    }

    pub(crate) fn neg_unchecked(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(x, f)| (f - x) % f)
                .collect(),
        }
    }

    pub(crate) fn sub_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add_unchecked(a, &self.neg_unchecked(b))
    }

    pub(crate) fn scale_unchecked(&self, a: &GroupElement, t: i64) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &f)| ((x as i128 * t as i128).mod_floor(&(f as i128))) as u64)
                .collect(),
        }
    }

    /// Dense index of an element (mixed radix, first factor most significant).
    pub fn index_of(&self, e: &GroupElement) -> usize {
        e.residues
            .iter()
            .zip(&self.factors)
            .fold(0u64, |acc, (r, f)| acc * f + r) as usize
    }

    /// Dense index of `a - b` without building the element.
    pub(crate) fn sub_index(&self, a: &GroupElement, b: &GroupElement) -> usize {
        a.residues
            .iter()
            .zip(&b.residues)
            .zip(&self.factors)
            .fold(0u64, |acc, ((x, y), f)| acc * f + (x + f - y) % f) as usize
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0; self.factors.len()];
        for (slot, &f) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = index as u64 % f;
            index /= f as usize;
        }
        GroupElement { residues }
    }

    /// All elements in canonical (lexicographic) order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order as usize).map(|i| self.element_at(i))
    }

    /// Addition table on dense indices.
    pub(crate) fn add_table(&self) -> Vec<Vec<u32>> {
        let elems: Vec<GroupElement> = self.elements().collect();
        elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| self.index_of(&self.add_unchecked(a, b)) as u32)
                    .collect()
            })
            .collect()
    }

    /// Smallest subgroup containing `set`, by closure under addition from the
    /// identity. Closure under negation follows from finiteness.
    pub fn generated_subgroup(&self, set: &[GroupElement]) -> Result<BTreeSet<GroupElement>> {
        for e in set {
            self.check(e)?;
        }
        let bits = self.closure_bits(set);
        Ok(bits.ones().map(|i| self.element_at(i)).collect())
    }

    pub(crate) fn closure_bits(&self, set: &[GroupElement]) -> FixedBitSet {
        let m = self.order as usize;
        let mut seen = FixedBitSet::with_capacity(m);
        let start = self.identity();
        seen.insert(self.index_of(&start));
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for g in set {
                let y = self.add_unchecked(&x, g);
                let iy = self.index_of(&y);
                if !seen.contains(iy) {
                    seen.insert(iy);
                    stack.push(y);
                }
            }
        }
        seen
    }
}

/// Diagnostics on the return lengths of a generating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodInfo {
    /// gcd of all `l >= 1` with the identity in the `l`-fold sumset.
    pub period_d: u64,
    pub aperiodic: bool,
    /// Order of the subgroup generated by the differences `H - H`.
    pub difference_subgroup_size: u64,
}

/// A nonempty set of distinct group elements, kept in canonical order.
///
/// Sumsets `k×H` are memoized in a table shared between clones.
#[derive(Clone)]
pub struct GeneratorSet {
    group: FiniteAbelianGroup,
    elements: Vec<GroupElement>,
    indices: Vec<usize>,
    sumsets: Arc<RwLock<SumsetTable>>,
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Eq for GeneratorSet {}

impl fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSet")
            .field("group", &self.group)
            .field("elements", &self.elements)
            .finish()
    }
}

/// `layers[k]` is `k×H`. Once two consecutive layers have equal size the
/// sequence is a translate of a fixed coset: `(k+1)×H = k×H + η` for all
/// later `k` and any `η ∈ H`.
struct SumsetTable {
    layers: Vec<FixedBitSet>,
    stable_from: Option<usize>,
}

impl GeneratorSet {
    /// Builds a generating set; elements are sorted and must be distinct.
    pub fn new(group: &FiniteAbelianGroup, elements: Vec<GroupElement>) -> Result<Self> {
        if elements.is_empty() {
            return invalid("generating set must be nonempty");
        }
        for e in &elements {
            group.check(e)?;
        }
        let mut sorted = elements;
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate generator {}", w[0]));
        }
        let indices = sorted.iter().map(|e| group.index_of(e)).collect();
        let m = group.order() as usize;
        let mut zero = FixedBitSet::with_capacity(m);
        zero.insert(group.index_of(&group.identity()));
        Ok(Self {
            group: group.clone(),
            elements: sorted,
            indices,
            sumsets: Arc::new(RwLock::new(SumsetTable {
                layers: vec![zero],
                stable_from: None,
            })),
        })
    }

    /// Generators in a cyclic group given as integer residues (reduced mod m).
    pub fn cyclic(m: u64, residues: &[i64]) -> Result<Self> {
        let group = FiniteAbelianGroup::cyclic(m)?;
        let elements = residues
            .iter()
            .map(|&r| group.reduce(&[r]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&group, elements)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.elements.binary_search(e).is_ok()
    }

    pub fn position(&self, e: &GroupElement) -> Option<usize> {
        self.elements.binary_search(e).ok()
    }

    pub(crate) fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `-H`.
    pub fn negated(&self) -> GeneratorSet {
        let neg = self
            .elements
            .iter()
            .map(|e| self.group.neg_unchecked(e))
            .collect();
        GeneratorSet::new(&self.group, neg).expect("negation is a bijection")
    }

    fn ensure_layers(&self, k: usize) {
        {
            let t = self.sumsets.read().unwrap();
            if t.stable_from.is_some() || t.layers.len() > k {
                return;
            }
        }
        let mut t = self.sumsets.write().unwrap();
        let add = |prev: &FixedBitSet| {
            let mut next = FixedBitSet::with_capacity(prev.len());
            for x in prev.ones() {
                let xe = self.group.element_at(x);
                for g in &self.elements {
                    next.insert(self.group.index_of(&self.group.add_unchecked(&xe, g)));
                }
            }
            next
        };
        while t.stable_from.is_none() && t.layers.len() <= k {
            let last = t.layers.len() - 1;
            let next = add(&t.layers[last]);
            if next.count_ones(..) == t.layers[last].count_ones(..) {
                t.stable_from = Some(last);
            }
            t.layers.push(next);
        }
    }

    /// Membership of the element with dense index `delta` in `k×H`.
    pub(crate) fn sumset_contains_index(&self, k: u64, delta: usize) -> bool {
        let cap = k.min(self.group.order() + 1) as usize;
        self.ensure_layers(cap);
        let t = self.sumsets.read().unwrap();
        if k < t.layers.len() as u64 {
            return t.layers[k as usize].contains(delta);
        }
        let s = t
            .stable_from
            .expect("sequence stabilizes within the group order");
        let shift = self.group.scale_unchecked(
            &self.elements[0],
            -(((k - s as u64) % self.group.order()) as i64),
        );
        let d = self
            .group
            .add_unchecked(&self.group.element_at(delta), &shift);
        t.layers[s].contains(self.group.index_of(&d))
    }

    pub fn sumset_contains(&self, k: u64, delta: &GroupElement) -> bool {
        self.group.contains(delta) && self.sumset_contains_index(k, self.group.index_of(delta))
    }

    /// The k-fold sumset `k×H` (repetition allowed); `0×H` is `{identity}`.
    pub fn iterated_sumset(&self, k: u64) -> BTreeSet<GroupElement> {
        (0..self.group.order() as usize)
            .filter(|&i| self.sumset_contains_index(k, i))
            .map(|i| self.group.element_at(i))
            .collect()
    }

    pub fn is_generating(&self) -> bool {
        self.group.closure_bits(&self.elements).count_ones(..) as u64 == self.group.order()
    }

    fn difference_subgroup(&self) -> FixedBitSet {
        let diffs: Vec<GroupElement> = self
            .elements
            .iter()
            .flat_map(|a| self.elements.iter().map(move |b| (a, b)))
            .map(|(a, b)| self.group.sub_unchecked(a, b))
            .collect();
        self.group.closure_bits(&diffs)
    }

    /// Period `d` from the difference subgroup `K = <H - H>`: `d` is the
    /// order of `h₀ + K` in `Γ/K`.
    pub fn period(&self) -> Result<PeriodInfo> {
        self.require_generating()?;
        let k = self.difference_subgroup();
        let h0 = &self.elements[0];
        let mut x = h0.clone();
        let mut d = 1;
        while !k.contains(self.group.index_of(&x)) {
            x = self.group.add_unchecked(&x, h0);
            d += 1;
        }
        Ok(PeriodInfo {
            period_d: d,
            aperiodic: d == 1,
            difference_subgroup_size: k.count_ones(..) as u64,
        })
    }

    /// Brute-force period: gcd of `{l ≤ 4m² : identity ∈ l×H}`.
    pub fn period_oracle(&self) -> Result<PeriodInfo> {
        self.require_generating()?;
        let m = self.group.order();
        let zero = self.group.index_of(&self.group.identity());
        let mut layer = FixedBitSet::with_capacity(m as usize);
        layer.insert(zero);
        let mut d = 0u64;
        for l in 1..=4 * m * m {
            let mut next = FixedBitSet::with_capacity(m as usize);
            for x in layer.ones() {
                let xe = self.group.element_at(x);
                for g in &self.elements {
                    next.insert(self.group.index_of(&self.group.add_unchecked(&xe, g)));
                }
            }
            layer = next;
            if layer.contains(zero) {
                d = d.gcd(&l);
                if d == 1 {
                    break;
                }
            }
        }
        Ok(PeriodInfo {
            period_d: d,
            aperiodic: d == 1,
            difference_subgroup_size: self.difference_subgroup().count_ones(..) as u64,
        })
    }

    fn require_generating(&self) -> Result<()> {
        let size = self.group.closure_bits(&self.elements).count_ones(..) as u64;
        if size == self.group.order() {
            Ok(())
        } else {
            Err(Error::NotGenerating {
                subgroup: size,
                order: self.group.order(),
            })
        }
    }
}
