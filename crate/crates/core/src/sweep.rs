//! Batch verification of the construction catalogue.

use num_integer::Integer;

use crate::constructions::Construction;
use crate::error::Error;
use crate::group::{GeneratorSet, PeriodInfo};
use crate::poset::Verdict;

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub description: String,
    pub kind: u32,
    pub order: u64,
    pub outcome: std::result::Result<SweepOutcome, Error>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub vertices: usize,
    pub expected: usize,
    pub verdict: Verdict,
    /// `Err` when the generators do not generate the group.
    pub period: std::result::Result<PeriodInfo, Error>,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.vertices == o.expected && o.verdict.is_strongly_diamond_free())
    }
}

pub fn verify_example_sweep(instances: &[Construction]) -> Vec<SweepRow> {
    instances
        .iter()
        .map(|c| {
            let outcome = c.build().map(|p| SweepOutcome {
                vertices: p.len(),
                expected: c.expected_len(),
                verdict: p.verify(),
                period: p.gens().period(),
            });
            SweepRow {
                description: c.describe(),
                kind: c.kind(),
                order: c.order(),
                outcome,
            }
        })
        .collect()
}

/// Two-level posets over `Z_m` for `m ≤ 12` and a few generating sets,
/// every coprime pair for the odd cyclic family with `m ≤ 11`, the `Z_7`
/// and `Z_3` posets, and the four-level families for `k = 2, 3, 4`.
pub fn default_sweep() -> Vec<Construction> {
    let mut out = Vec::new();
    for m in 1..=12u64 {
        let choices: &[&[i64]] = &[&[0], &[1], &[0, 1], &[1, 2], &[2], &[1, 3, 5]];
        for h in choices {
            let reduced: Vec<i64> = h.iter().map(|&x| x % m as i64).collect();
            if let Ok(gens) = GeneratorSet::cyclic(m, &reduced) {
                let c = Construction::TwoLevels { gens, base: 0 };
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    for m in [3u64, 5, 7, 9, 11] {
        for a in 0..m {
            for b in a + 1..m {
                if a.gcd(&b) == 1 {
                    out.push(Construction::OddCyclic { m, a, b });
                }
            }
        }
    }
    out.push(Construction::Z7);
    for k in 2..=4 {
        out.push(Construction::FourLevelsMinus { k });
    }
    for k in 2..=4 {
        out.push(Construction::FourLevelsPlus { k });
    }
    out.push(Construction::Z3Dove);
    out
}
