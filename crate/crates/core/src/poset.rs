//! Finite Cayley posets: pairs `(γ, i)` of a group element and an integer
//! level, ordered by sumset reachability across levels.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{invalid, Result};
use crate::group::{FiniteAbelianGroup, GeneratorSet, GroupElement};

/// Orientation of the order relation.
///
/// `Standard`: `(γ,i) ⪯ (δ,j)` iff `j ≥ i` and `δ - γ ∈ (j-i)×H`, i.e. the
/// higher element minus the lower one is a `(j-i)`-term sum. This is the
/// orientation under which subset inclusion maps onto the poset.
/// `Mirror`: the same with `γ - δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    #[default]
    Standard,
    Mirror,
}

impl Convention {
    pub fn flipped(self) -> Self {
        match self {
            Convention::Standard => Convention::Mirror,
            Convention::Mirror => Convention::Standard,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::Mirror => "mirror",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(Convention::Standard),
            "mirror" => Ok(Convention::Mirror),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosetElement {
    pub gamma: GroupElement,
    pub level: i64,
}

impl PosetElement {
    pub fn new(gamma: GroupElement, level: i64) -> Self {
        Self { gamma, level }
    }
}

/// Canonical order: level first, then residues.
impl Ord for PosetElement {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level, &self.gamma).cmp(&(other.level, &other.gamma))
    }
}

impl PartialOrd for PosetElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PosetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.gamma, self.level)
    }
}

/// The group difference that must lie in the sumset for `lo ⪯ hi`.
pub fn gap(
    group: &FiniteAbelianGroup,
    lo: &PosetElement,
    hi: &PosetElement,
    convention: Convention,
) -> GroupElement {
    match convention {
        Convention::Standard => group.sub_unchecked(&hi.gamma, &lo.gamma),
        Convention::Mirror => group.sub_unchecked(&lo.gamma, &hi.gamma),
    }
}

/// The order relation of the infinite Cayley poset `P(Γ, H)`.
pub fn leq(
    p1: &PosetElement,
    p2: &PosetElement,
    gens: &GeneratorSet,
    convention: Convention,
) -> bool {
    if p2.level < p1.level {
        return false;
    }
    let k = (p2.level - p1.level) as u64;
    gens.sumset_contains(k, &gap(gens.group(), p1, p2, convention))
}

/// Generators that can appear as a term of some `k`-term sum equal to
/// `delta`: `{η ∈ H : delta - η ∈ (k-1)×H}`.
pub fn usable_generators(delta: &GroupElement, k: u64, gens: &GeneratorSet) -> Vec<GroupElement> {
    if k == 0 {
        return Vec::new();
    }
    let g = gens.group();
    gens.elements()
        .iter()
        .filter(|eta| gens.sumset_contains(k - 1, &g.sub_unchecked(delta, eta)))
        .cloned()
        .collect()
}

/// Four elements with `bottom ⪯ left ⪯ top` and `bottom ⪯ right ⪯ top`.
/// `left` and `right` may be comparable (a 4-chain is a diamond).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondWitness {
    pub bottom: PosetElement,
    pub left: PosetElement,
    pub right: PosetElement,
    pub top: PosetElement,
}

/// `lower ≺ middle ≺ upper` where `shared_eta` is usable in both gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongChainWitness {
    pub lower: PosetElement,
    pub middle: PosetElement,
    pub upper: PosetElement,
    pub shared_eta: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub diamond: Option<DiamondWitness>,
    pub strong_chain: Option<StrongChainWitness>,
}

impl Verdict {
    pub fn is_strongly_diamond_free(&self) -> bool {
        self.diamond.is_none() && self.strong_chain.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyPoset {
    gens: GeneratorSet,
    elements: Vec<PosetElement>,
    convention: Convention,
}

impl CayleyPoset {
    /// Elements are stored in canonical order; duplicates and elements of
    /// a foreign group are rejected.
    pub fn new(
        gens: GeneratorSet,
        convention: Convention,
        elements: impl IntoIterator<Item = PosetElement>,
    ) -> Result<Self> {
        let mut elements: Vec<PosetElement> = elements.into_iter().collect();
        for e in &elements {
            if !gens.group().contains(&e.gamma) {
                return invalid(format!(
                    "element {} does not belong to group {}",
                    e,
                    gens.group()
                ));
            }
        }
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate poset element {}", w[0]));
        }
        Ok(Self {
            gens,
            elements,
            convention,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.gens.group()
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn elements(&self) -> &[PosetElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, a: &PosetElement, b: &PosetElement) -> bool {
        leq(a, b, &self.gens, self.convention)
    }

    pub fn gap(&self, lo: &PosetElement, hi: &PosetElement) -> GroupElement {
        gap(self.group(), lo, hi, self.convention)
    }

    /// The same element set read under the other convention.
    pub fn with_convention(&self, convention: Convention) -> CayleyPoset {
        CayleyPoset {
            convention,
            ..self.clone()
        }
    }

    /// `above[a]` holds every `b` with `a ≺ b` (strictly).
    fn strict_above(&self) -> Vec<FixedBitSet> {
        let n = self.elements.len();
        let g = self.group();
        let e = &self.elements;
        (0..n)
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(n);
                for b in 0..n {
                    if a == b || e[b].level < e[a].level {
                        continue;
                    }
                    let d = match self.convention {
                        Convention::Standard => g.sub_index(&e[b].gamma, &e[a].gamma),
                        Convention::Mirror => g.sub_index(&e[a].gamma, &e[b].gamma),
                    };
                    if self
                        .gens
                        .sumset_contains_index((e[b].level - e[a].level) as u64, d)
                    {
                        s.insert(b);
                    }
                }
                s
            })
            .collect()
    }

    fn diamond_in(&self, above: &[FixedBitSet]) -> Option<DiamondWitness> {
        for (w, up) in above.iter().enumerate() {
            for z in up.ones() {
                let mut mids = up.ones().filter(|&x| above[x].contains(z));
                if let (Some(x), Some(y)) = (mids.next(), mids.next()) {
                    let e = &self.elements;
                    return Some(DiamondWitness {
                        bottom: e[w].clone(),
                        left: e[x].clone(),
                        right: e[y].clone(),
                        top: e[z].clone(),
                    });
                }
            }
        }
        None
    }

    fn strong_chain_in(&self, above: &[FixedBitSet]) -> Option<StrongChainWitness> {
        let e = &self.elements;
        let h = self.gens.len();
        // usable generators (as positions in H) for every comparable pair
        let usable: Vec<Vec<Option<FixedBitSet>>> = (0..e.len())
            .map(|a| {
                (0..e.len())
                    .map(|b| {
                        above[a].contains(b).then(|| {
                            let k = (e[b].level - e[a].level) as u64;
                            let mut s = FixedBitSet::with_capacity(h);
                            for eta in usable_generators(&self.gap(&e[a], &e[b]), k, &self.gens) {
                                s.insert(self.gens.position(&eta).expect("generator"));
                            }
                            s
                        })
                    })
                    .collect()
            })
            .collect();
        for p1 in 0..e.len() {
            for p2 in above[p1].ones() {
                let first = usable[p1][p2].as_ref().expect("comparable");
                for p3 in above[p2].ones() {
                    let second = usable[p2][p3].as_ref().expect("comparable");
                    if let Some(j) = first.intersection(second).next() {
                        return Some(StrongChainWitness {
                            lower: e[p1].clone(),
                            middle: e[p2].clone(),
                            upper: e[p3].clone(),
                            shared_eta: self.gens.elements()[j].clone(),
                        });
                    }
                }
            }
        }
        None
    }

    /// First diamond in canonical order: the least bottom, then the least
    /// top with at least two elements strictly between them.
    pub fn diamond_witness(&self) -> Option<DiamondWitness> {
        self.diamond_in(&self.strict_above())
    }

    /// First strong chain in canonical (lower, middle, upper) order; the
    /// shared generator is the least usable one.
    pub fn strong_chain_witness(&self) -> Option<StrongChainWitness> {
        self.strong_chain_in(&self.strict_above())
    }

    pub fn verify(&self) -> Verdict {
        let above = self.strict_above();
        Verdict {
            diamond: self.diamond_in(&above),
            strong_chain: self.strong_chain_in(&above),
        }
    }

    pub fn is_strongly_diamond_free(&self) -> bool {
        self.verify().is_strongly_diamond_free()
    }

    /// `(γ, i) ↦ (γ + c, i + s)`. With `negate`, the result is read under the
    /// flipped convention over `-H`, which induces the same order relation.
    pub fn transform(
        &self,
        translate_by: &GroupElement,
        shift_levels: i64,
        negate: bool,
    ) -> Result<CayleyPoset> {
        let g = self.group();
        if !g.contains(translate_by) {
            return invalid(format!("translation {translate_by} is not in group {g}"));
        }
        let elements = self.elements.iter().map(|p| PosetElement {
            gamma: g.add_unchecked(&p.gamma, translate_by),
            level: p.level + shift_levels,
        });
        let (gens, convention) = if negate {
            (self.gens.negated(), self.convention.flipped())
        } else {
            (self.gens.clone(), self.convention)
        };
        CayleyPoset::new(gens, convention, elements)
    }

    /// Key of the `eta`-chain through `p`. Under the standard convention the
    /// chains are `{(γ + iη, i)}` and the key is `γ - iη`; under the mirror
    /// convention they run the other way and the key is `γ + iη`.
    pub fn chain_key(&self, p: &PosetElement, eta: &GroupElement) -> GroupElement {
        let g = self.group();
        let step = g.scale_unchecked(eta, p.level);
        match self.convention {
            Convention::Standard => g.sub_unchecked(&p.gamma, &step),
            Convention::Mirror => g.add_unchecked(&p.gamma, &step),
        }
    }

    /// Occupancy of each of the `m` chains `{(γ + iη, i) : i ∈ Z}`.
    pub fn chain_partition_histogram(
        &self,
        eta: &GroupElement,
    ) -> Result<BTreeMap<GroupElement, usize>> {
        if !self.gens.contains(eta) {
            return invalid(format!("{eta} is not a generator"));
        }
        let mut hist = BTreeMap::new();
        for p in &self.elements {
            *hist.entry(self.chain_key(p, eta)).or_insert(0) += 1;
        }
        Ok(hist)
    }

    pub fn max_chain_occupancy(&self, eta: &GroupElement) -> Result<usize> {
        Ok(self
            .chain_partition_histogram(eta)?
            .values()
            .copied()
            .max()
            .unwrap_or(0))
    }
}

/// Builds a poset over `Z_m` from `(residue, level)` pairs.
pub fn cyclic_poset(
    m: u64,
    gens: &[i64],
    convention: Convention,
    elements: &[(i64, i64)],
) -> Result<CayleyPoset> {
    let h = GeneratorSet::cyclic(m, gens)?;
    let g = h.group().clone();
    let elems = elements
        .iter()
        .map(|&(r, l)| g.reduce(&[r]).map(|e| PosetElement::new(e, l)))
        .collect::<Result<Vec<_>>>()?;
    CayleyPoset::new(h, convention, elems)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &FiniteAbelianGroup, r: u64, level: i64) -> PosetElement {
        PosetElement::new(g.element(&[r]).unwrap(), level)
    }

    #[test]
    fn leq_examples() {
        let h = GeneratorSet::cyclic(3, &[0, 2]).unwrap();
        let g = h.group().clone();
        assert!(leq(&el(&g, 0, -1), &el(&g, 2, 0), &h, Convention::Standard));
        assert!(!leq(
            &el(&g, 0, -1),
            &el(&g, 1, 0),
            &h,
            Convention::Standard
        ));
        assert!(leq(&el(&g, 1, 4), &el(&g, 1, 4), &h, Convention::Standard));
        assert!(!leq(
            &el(&g, 2, 0),
            &el(&g, 0, -1),
            &h,
            Convention::Standard
        ));

        let h7 = GeneratorSet::cyclic(7, &[2, 3, 5]).unwrap();
        let g7 = h7.group().clone();
        assert!(leq(
            &el(&g7, 6, 1),
            &el(&g7, 2, 2),
            &h7,
            Convention::Standard
        ));
        // mirror reads 6 - 2 = 4, which is not a generator
        assert!(!leq(
            &el(&g7, 6, 1),
            &el(&g7, 2, 2),
            &h7,
            Convention::Mirror
        ));
    }

    #[test]
    fn usable_examples() {
        let h = GeneratorSet::cyclic(7, &[2, 3, 5]).unwrap();
        let g = h.group().clone();
        let e = |r| g.element(&[r]).unwrap();
        assert_eq!(usable_generators(&e(5), 2, &h), vec![e(2), e(3)]);
        assert_eq!(usable_generators(&e(3), 1, &h), vec![e(3)]);
        let h3 = GeneratorSet::cyclic(3, &[0, 2]).unwrap();
        assert!(usable_generators(&h3.group().element(&[1]).unwrap(), 1, &h3).is_empty());
    }

    #[test]
    fn four_chain_is_a_diamond() {
        let p = cyclic_poset(
            2,
            &[1],
            Convention::Standard,
            &[(0, 0), (1, 1), (0, 2), (1, 3)],
        )
        .unwrap();
        let w = p.diamond_witness().unwrap();
        assert_eq!(w.bottom, el(p.group(), 0, 0));
        assert_eq!(w.top, el(p.group(), 1, 3));
    }

    #[test]
    fn diamond_with_incomparable_middles() {
        let p = cyclic_poset(
            5,
            &[1, 2],
            Convention::Standard,
            &[(0, 0), (1, 1), (2, 1), (3, 2)],
        )
        .unwrap();
        let g = p.group().clone();
        let w = p.diamond_witness().unwrap();
        assert_eq!(
            w,
            DiamondWitness {
                bottom: el(&g, 0, 0),
                left: el(&g, 1, 1),
                right: el(&g, 2, 1),
                top: el(&g, 3, 2),
            }
        );
        for (a, b) in [
            (&w.bottom, &w.left),
            (&w.bottom, &w.right),
            (&w.left, &w.top),
            (&w.right, &w.top),
            (&w.bottom, &w.top),
        ] {
            assert!(p.leq(a, b));
        }
    }

    #[test]
    fn strong_chain_examples() {
        let p = cyclic_poset(3, &[1, 2], Convention::Standard, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = p.strong_chain_witness().unwrap();
        assert_eq!(w.shared_eta, p.group().element(&[1]).unwrap());
        assert!(!p.is_strongly_diamond_free());
        assert!(p.verify().diamond.is_none());

        let p = cyclic_poset(
            7,
            &[2, 3, 5],
            Convention::Standard,
            &[(0, 0), (5, 2), (3, 4)],
        )
        .unwrap();
        let w = p.strong_chain_witness().unwrap();
        assert_eq!(w.shared_eta, p.group().element(&[2]).unwrap());
    }

    #[test]
    fn chain_histogram_of_a_single_chain() {
        let p = cyclic_poset(3, &[1, 2], Convention::Standard, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let one = p.group().element(&[1]).unwrap();
        let hist = p.chain_partition_histogram(&one).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[&p.group().element(&[2]).unwrap()], 3);
        assert!(p.chain_partition_histogram(&p.group().identity()).is_err());
    }

    #[test]
    fn rejects_duplicates_and_foreign_elements() {
        assert!(cyclic_poset(3, &[1], Convention::Standard, &[(0, 1), (3, 1)]).is_err());
        let h = GeneratorSet::cyclic(3, &[1]).unwrap();
        let foreign = PosetElement::new(FiniteAbelianGroup::new(&[2, 2]).unwrap().identity(), 0);
        assert!(CayleyPoset::new(h, Convention::Standard, [foreign]).is_err());
    }

    #[test]
    fn negate_transform_preserves_relation() {
        let p = cyclic_poset(
            7,
            &[2, 3, 5],
            Convention::Standard,
            &[(1, 1), (3, 2), (6, 3), (0, 2)],
        )
        .unwrap();
        let q = p.transform(&p.group().identity(), 0, true).unwrap();
        assert_eq!(q.convention(), Convention::Mirror);
        for a in p.elements() {
            for b in p.elements() {
                assert_eq!(p.leq(a, b), q.leq(a, b));
            }
        }
    }
}
