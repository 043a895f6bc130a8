//! Branch-and-bound search for the largest strongly diamond-free Cayley
//! poset inside a grid `Γ × levels`.
//!
//! Candidates are visited in canonical order (level, then residues), so a
//! newly added element can only be the top of a new diamond or the upper
//! end of a new strong chain; feasibility is checked against precomputed
//! masks. The bound uses the partition of `P(Γ, H)` into the chains
//! `{(γ + iη, i)}`: a strongly diamond-free poset has at most two elements
//! on each.
//!
//! Parallel runs split on the first chosen element. The shared incumbent
//! key orders solutions by size and then by lowest branch, so the returned
//! poset does not depend on scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Duration;

#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;
#[cfg(target_arch = "wasm32")]
use web_time::Instant;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::group::GeneratorSet;
use crate::poset::{gap, leq, usable_generators, CayleyPoset, Convention, PosetElement};

pub const DEFAULT_MAX_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SearchProblem {
    pub gens: GeneratorSet,
    pub levels: Vec<i64>,
    pub convention: Convention,
    pub budget: Budget,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Fix the first chosen element to the identity column. Valid because
    /// the grid and the verdict are both translation invariant.
    pub symmetry_reduction: bool,
    pub max_grid: usize,
    /// Optional starting incumbent; must lie inside the grid.
    pub incumbent: Option<CayleyPoset>,
}

impl SearchProblem {
    pub fn new(gens: GeneratorSet, levels: impl IntoIterator<Item = i64>) -> Self {
        let mut levels: Vec<i64> = levels.into_iter().collect();
        levels.sort_unstable();
        levels.dedup();
        Self {
            gens,
            levels,
            convention: Convention::Standard,
            budget: Budget::default(),
            threads: 0,
            symmetry_reduction: false,
            max_grid: DEFAULT_MAX_GRID,
            incumbent: None,
        }
    }

    pub fn grid(&self) -> Vec<PosetElement> {
        let g = self.gens.group();
        self.levels
            .iter()
            .flat_map(|&l| g.elements().map(move |e| PosetElement::new(e, l)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: CayleyPoset,
    pub best_size: usize,
    /// `min_η Σ_chains min(2, |chain ∩ grid|)`, never above `2m`.
    pub upper_bound: usize,
    pub nodes_expanded: u64,
    pub proven_optimal: bool,
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn summary_line(&self) -> String {
        format!(
            "optimum {} bound {} proven {} nodes {}",
            self.best_size,
            self.upper_bound,
            if self.proven_optimal { "yes" } else { "no" },
            self.nodes_expanded
        )
    }
}

struct Grid {
    cands: Vec<PosetElement>,
    below: Vec<u64>,
    above: Vec<u64>,
    /// `conflict[mid][top]`: lower ends `p` with `(p, mid, top)` a strong chain.
    conflict: Vec<Vec<u64>>,
    /// Chain masks for each generator.
    chains: Vec<Vec<u64>>,
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

impl Grid {
    fn new(cands: Vec<PosetElement>, gens: &GeneratorSet, conv: Convention) -> Self {
        let n = cands.len();
        let group = gens.group();
        let mut below = vec![0u64; n];
        let mut above = vec![0u64; n];
        let mut usable = vec![vec![0u64; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b && leq(&cands[a], &cands[b], gens, conv) {
                    below[b] |= 1 << a;
                    above[a] |= 1 << b;
                    let k = (cands[b].level - cands[a].level) as u64;
                    let delta = gap(group, &cands[a], &cands[b], conv);
                    for eta in usable_generators(&delta, k, gens) {
                        usable[a][b] |= 1 << gens.position(&eta).expect("generator");
                    }
                }
            }
        }
        let mut conflict = vec![vec![0u64; n]; n];
        for mid in 0..n {
            for top in bits(above[mid]) {
                for low in bits(below[mid]) {
                    if usable[low][mid] & usable[mid][top] != 0 {
                        conflict[mid][top] |= 1 << low;
                    }
                }
            }
        }
        let probe = CayleyPoset::new(gens.clone(), conv, []).expect("empty poset");
        let m = group.order() as usize;
        let chains = gens
            .elements()
            .iter()
            .map(|eta| {
                let mut masks = vec![0u64; m];
                for (i, c) in cands.iter().enumerate() {
                    masks[group.index_of(&probe.chain_key(c, eta))] |= 1 << i;
                }
                masks.retain(|&x| x != 0);
                masks
            })
            .collect();
        Self {
            cands,
            below,
            above,
            conflict,
            chains,
        }
    }

    fn feasible(&self, chosen: u64, e: usize) -> bool {
        let lows = chosen & self.below[e];
        for mid in bits(lows) {
            if chosen & self.conflict[mid][e] != 0 {
                return false;
            }
            if (chosen & self.above[mid] & self.below[e]).count_ones() >= 2 {
                return false;
            }
        }
        true
    }

    fn capacity(&self, avail: u64) -> usize {
        self.chains
            .iter()
            .map(|masks| {
                masks
                    .iter()
                    .map(|&c| (avail & c).count_ones().min(2) as usize)
                    .sum::<usize>()
            })
            .min()
            .unwrap_or(0)
    }

    fn suffix(&self, pos: usize) -> u64 {
        let n = self.cands.len();
        if pos >= n {
            0
        } else {
            let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            all & !((1u64 << pos) - 1)
        }
    }
}

/// Solutions compare by size, then by lowest branch.
fn key(size: usize, branch: u32) -> u64 {
    (size as u64) << 32 | (u32::MAX - branch) as u64
}

struct Shared<'a> {
    grid: &'a Grid,
    best: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
    budget: Budget,
    start: Instant,
}

struct Branch<'a, 'b> {
    shared: &'b Shared<'a>,
    id: u32,
    best_size: usize,
    best_mask: u64,
}

impl Branch<'_, '_> {
    fn tick(&self) -> bool {
        let s = self.shared;
        if s.stop.load(Ordering::Relaxed) {
            return false;
        }
        let n = s.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(max) = s.budget.max_nodes {
            if n > max {
                s.stop.store(true, Ordering::Relaxed);
                return false;
            }
        }
        if let Some(t) = s.budget.max_time {
            if n.is_multiple_of(4096) && s.start.elapsed() > t {
                s.stop.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, pos: usize, chosen: u64, size: usize) {
        if !self.tick() {
            return;
        }
        if size > self.best_size {
            self.best_size = size;
            self.best_mask = chosen;
            self.shared
                .best
                .fetch_max(key(size, self.id), Ordering::Relaxed);
        }
        let grid = self.shared.grid;
        if pos == grid.cands.len() {
            return;
        }
        let bound = grid.capacity(chosen | grid.suffix(pos));
        if key(bound, self.id) <= self.shared.best.load(Ordering::Relaxed) {
            return;
        }
        if grid.feasible(chosen, pos) {
            self.dfs(pos + 1, chosen | 1 << pos, size + 1);
        }
        self.dfs(pos + 1, chosen, size);
    }
}

/// Largest strongly diamond-free subposet of the grid, with the chain
/// bound as certificate.
pub fn max_sdf_poset(problem: &SearchProblem) -> Result<SearchResult> {
    if problem.levels.is_empty() {
        return invalid("search needs at least one level");
    }
    let cands = problem.grid();
    let limit = problem.max_grid.min(64);
    if cands.len() > limit {
        return invalid(format!(
            "grid has {} candidates, more than the limit {limit}",
            cands.len()
        ));
    }
    let start = Instant::now();
    let grid = Grid::new(cands, &problem.gens, problem.convention);
    let m = problem.gens.group().order() as usize;
    let upper_bound = grid.capacity(grid.suffix(0)).min(2 * m);

    let mut initial = (0usize, 0u64);
    if let Some(seed) = &problem.incumbent {
        if seed.gens() != &problem.gens || seed.convention() != problem.convention {
            return invalid("incumbent uses a different generating set or convention");
        }
        if !seed.is_strongly_diamond_free() {
            return invalid("incumbent is not strongly diamond-free");
        }
        let mut mask = 0u64;
        for e in seed.elements() {
            match grid.cands.iter().position(|c| c == e) {
                Some(i) => mask |= 1 << i,
                None => return invalid(format!("incumbent element {e} is outside the grid")),
            }
        }
        initial = (seed.len(), mask);
    }

    let shared = Shared {
        grid: &grid,
        best: AtomicU64::new(key(initial.0, u32::MAX)),
        nodes: AtomicU64::new(1),
        stop: AtomicBool::new(false),
        budget: problem.budget,
        start,
    };
    let identity = problem.gens.group().identity();
    let branches: Vec<usize> = (0..grid.cands.len())
        .filter(|&j| !problem.symmetry_reduction || grid.cands[j].gamma == identity)
        .collect();
    let run = |j: usize| {
        let mut b = Branch {
            shared: &shared,
            id: j as u32,
            best_size: 0,
            best_mask: 0,
        };
        b.dfs(j + 1, 1 << j, 1);
        (key(b.best_size, b.id), b.best_mask)
    };
    let outcomes: Vec<(u64, u64)> = if problem.threads == 1 {
        branches.iter().map(|&j| run(j)).collect()
    } else if problem.threads == 0 {
        branches.par_iter().map(|&j| run(j)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(problem.threads)
            .build()
            .map_err(|e| crate::error::Error::InvalidArgument(e.to_string()))?
            .install(|| branches.par_iter().map(|&j| run(j)).collect())
    };
    let (best_key, best_mask) =
        outcomes
            .into_iter()
            .fold((key(initial.0, u32::MAX), initial.1), |acc, o| {
                if o.0 > acc.0 {
                    o
                } else {
                    acc
                }
            });
    let best_size = (best_key >> 32) as usize;
    assert!(
        best_size <= 2 * m,
        "search returned {best_size} elements, above the chain bound 2m = {}",
        2 * m
    );
    let best = CayleyPoset::new(
        problem.gens.clone(),
        problem.convention,
        bits(best_mask).map(|i| grid.cands[i].clone()),
    )?;
    let exhausted = !shared.stop.load(Ordering::Relaxed);
    Ok(SearchResult {
        best,
        best_size,
        upper_bound,
        nodes_expanded: shared.nodes.load(Ordering::Relaxed),
        proven_optimal: exhausted || best_size == upper_bound,
        elapsed: start.elapsed(),
    })
}
