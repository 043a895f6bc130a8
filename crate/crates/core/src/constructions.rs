//! The catalogue of strongly diamond-free Cayley posets: two full levels,
//! the odd cyclic family, the 13-element poset over `Z_7`, the two
//! four-level families with `2m - 2` elements and the three-level poset
//! over `Z_3` behind Dove's family.

use num_integer::Integer;

use crate::error::{invalid, Result};
use crate::group::{FiniteAbelianGroup, GeneratorSet};
use crate::poset::{CayleyPoset, Convention, PosetElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    /// Levels `base` and `base + 1`, every group element on each.
    TwoLevels { gens: GeneratorSet, base: i64 },
    /// `Z_m`, `m` odd, `H = {a, b}` with `gcd(a, b) = 1`.
    OddCyclic { m: u64, a: u64, b: u64 },
    /// `Z_7`, `H = {2, 3, 5}`, 13 elements.
    Z7,
    /// `Z_{4k-1}`, `H = {2k-1, 2k}`, `k ≥ 2`.
    FourLevelsMinus { k: u64 },
    /// `Z_{4k+1}`, `H = {2k, 2k+1}`, `k ≥ 2`.
    FourLevelsPlus { k: u64 },
    /// `Z_3`, `H = {0, 2}`, levels -1, 0, 1.
    Z3Dove,
}

impl Construction {
    /// Parameterless constructions addressed by their catalogue number 1..6.
    /// Kinds 1, 2, 4 and 5 take the given parameters.
    pub fn from_kind(kind: u32, params: &KindParams) -> Result<Self> {
        Ok(match kind {
            1 => {
                let m = params.m.unwrap_or(3);
                let gens = match &params.gens {
                    Some(g) => GeneratorSet::cyclic(m, g)?,
                    None => GeneratorSet::cyclic(m, &[1])?,
                };
                Construction::TwoLevels {
                    gens,
                    base: params.base.unwrap_or(0),
                }
            }
            2 => Construction::OddCyclic {
                m: params.m.unwrap_or(3),
                a: params.a.unwrap_or(1),
                b: params.b.unwrap_or(2),
            },
            3 => Construction::Z7,
            4 => Construction::FourLevelsMinus {
                k: params.k.unwrap_or(2),
            },
            5 => Construction::FourLevelsPlus {
                k: params.k.unwrap_or(2),
            },
            6 => Construction::Z3Dove,
            other => return invalid(format!("unknown example kind {other}; expected 1..=6")),
        })
    }

    pub fn kind(&self) -> u32 {
        match self {
            Construction::TwoLevels { .. } => 1,
            Construction::OddCyclic { .. } => 2,
            Construction::Z7 => 3,
            Construction::FourLevelsMinus { .. } => 4,
            Construction::FourLevelsPlus { .. } => 5,
            Construction::Z3Dove => 6,
        }
    }

    /// Group order `m`.
    pub fn order(&self) -> u64 {
        match self {
            Construction::TwoLevels { gens, .. } => gens.group().order(),
            Construction::OddCyclic { m, .. } => *m,
            Construction::Z7 => 7,
            Construction::FourLevelsMinus { k } => 4 * k - 1,
            Construction::FourLevelsPlus { k } => 4 * k + 1,
            Construction::Z3Dove => 3,
        }
    }

    /// Advertised number of elements.
    pub fn expected_len(&self) -> usize {
        let m = self.order() as usize;
        match self {
            Construction::TwoLevels { .. } | Construction::OddCyclic { .. } => 2 * m,
            Construction::Z7 => 13,
            Construction::FourLevelsMinus { .. } | Construction::FourLevelsPlus { .. } => 2 * m - 2,
            Construction::Z3Dove => 6,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Construction::TwoLevels { gens, base } => {
                let h: Vec<String> = gens.elements().iter().map(|e| e.to_string()).collect();
                format!(
                    "example 1 group={} H={{{}}} base={base}",
                    gens.group(),
                    h.join(",")
                )
            }
            Construction::OddCyclic { m, a, b } => format!("example 2 m={m} a={a} b={b}"),
            Construction::Z7 => "example 3".to_string(),
            Construction::FourLevelsMinus { k } => format!("example 4 k={k}"),
            Construction::FourLevelsPlus { k } => format!("example 5 k={k}"),
            Construction::Z3Dove => "example 6".to_string(),
        }
    }

    /// The element set exactly as listed for the construction, under the
    /// standard convention.
    pub fn build(&self) -> Result<CayleyPoset> {
        match self {
            Construction::TwoLevels { gens, base } => {
                let g = gens.group().clone();
                let elems = [*base, base + 1]
                    .into_iter()
                    .flat_map(|l| g.elements().map(move |e| PosetElement::new(e, l)))
                    .collect::<Vec<_>>();
                CayleyPoset::new(gens.clone(), Convention::Standard, elems)
            }
            &Construction::OddCyclic { m, a, b } => {
                if m < 3 || m % 2 == 0 {
                    return invalid(format!("example 2 needs an odd m ≥ 3, got {m}"));
                }
                if a >= m || b >= m || a == b {
                    return invalid(format!(
                        "example 2 needs distinct residues a, b in [0, {m}), got {a}, {b}"
                    ));
                }
                if a.gcd(&b) != 1 {
                    return invalid(format!("example 2 needs gcd(a, b) = 1, got gcd({a}, {b})"));
                }
                let top = (a + b) % m;
                let mut elems: Vec<(u64, i64)> =
                    (0..m).filter(|&g| g != top).map(|g| (g, 3)).collect();
                elems.extend([(a, 2), (b, 2)]);
                elems.extend((1..m).map(|g| (g, 1)));
                cyclic(m, &[a, b], &elems)
            }
            Construction::Z7 => {
                let mut elems: Vec<(u64, i64)> = (0..7)
                    .filter(|g| ![0, 1, 5].contains(g))
                    .map(|g| (g, 3))
                    .collect();
                elems.extend([(2, 2), (3, 2), (5, 2)]);
                elems.extend((1..7).map(|g| (g, 1)));
                cyclic(7, &[2, 3, 5], &elems)
            }
            &Construction::FourLevelsMinus { k } => {
                if k < 2 {
                    return invalid(format!("example 4 needs k ≥ 2, got {k}"));
                }
                let m = 4 * k - 1;
                let mut elems: Vec<(u64, i64)> = (k + 2..=3 * k - 3).map(|i| (i, 4)).collect();
                for j in 1..=3 {
                    elems.extend((k..=3 * k - 1).map(|i| (i, j)));
                }
                cyclic(m, &[2 * k - 1, 2 * k], &elems)
            }
            &Construction::FourLevelsPlus { k } => {
                if k < 2 {
                    return invalid(format!("example 5 needs k ≥ 2, got {k}"));
                }
                let m = 4 * k + 1;
                let mut elems: Vec<(u64, i64)> = (k + 2..=3 * k - 2).map(|i| (i, 4)).collect();
                for j in 1..=3 {
                    elems.extend((k..=3 * k).map(|i| (i, j)));
                }
                cyclic(m, &[2 * k, 2 * k + 1], &elems)
            }
            Construction::Z3Dove => {
                let elems: Vec<(u64, i64)> = [(1, 1), (0, 0), (2, -1)]
                    .into_iter()
                    .flat_map(|(skip, level)| {
                        (0..3).filter(move |&g| g != skip).map(move |g| (g, level))
                    })
                    .collect();
                cyclic(3, &[0, 2], &elems)
            }
        }
    }
}

/// Optional parameters for [`Construction::from_kind`].
#[derive(Debug, Clone, Default)]
pub struct KindParams {
    pub m: Option<u64>,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub k: Option<u64>,
    pub gens: Option<Vec<i64>>,
    pub base: Option<i64>,
}

fn cyclic(m: u64, gens: &[u64], elems: &[(u64, i64)]) -> Result<CayleyPoset> {
    let group = FiniteAbelianGroup::cyclic(m)?;
    let h = GeneratorSet::new(
        &group,
        gens.iter()
            .map(|&r| group.element(&[r]))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let elems = elems
        .iter()
        .map(|&(r, l)| group.element(&[r]).map(|e| PosetElement::new(e, l)))
        .collect::<Result<Vec<_>>>()?;
    CayleyPoset::new(h, Convention::Standard, elems)
}
