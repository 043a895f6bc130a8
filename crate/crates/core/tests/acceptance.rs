//! One line per criterion, `PASS` or `FAIL`, and a nonzero exit if any fail.

use std::time::{Duration, Instant};

use cayley_diamond::binom::binomial;
use cayley_diamond::family::{dove_family, k_subsets, middle_levels_family, TieBreak};
use cayley_diamond::markov::{
    equidistribution_report, expected_family_ratio, ratio, sample_family, sample_weighting,
};
use cayley_diamond::sweep::{default_sweep, verify_example_sweep};
use cayley_diamond::*;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sweep_counts() -> Outcome {
    let t = Instant::now();
    let rows = verify_example_sweep(&default_sweep());
    let elapsed = t.elapsed();
    let mut failed = Vec::new();
    for r in &rows {
        let right_count = match &r.outcome {
            Ok(o) => {
                let m = r.order as usize;
                let want = match r.kind {
                    1 | 2 => 2 * m,
                    3 => 13,
                    4 | 5 => 2 * m - 2,
                    _ => 6,
                };
                o.vertices == want
            }
            Err(_) => false,
        };
        if !r.passed() || !right_count {
            failed.push(r.description.clone());
        }
    }
    check(
        failed.is_empty() && elapsed < Duration::from_secs(10),
        format!("{} instances, failed {failed:?}, {elapsed:.2?}", rows.len()),
    )
}

fn periods() -> Outcome {
    let aperiodic = |m, h: &[i64]| {
        let info = GeneratorSet::cyclic(m, h).unwrap().period().unwrap();
        info.aperiodic && info.period_d == 1
    };
    let z6 = GeneratorSet::cyclic(6, &[1])
        .unwrap()
        .period()
        .unwrap()
        .period_d;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut tried = 0;
    while tried < 100 {
        let m = 2 + rng.next_u64() % 29;
        let size = 1 + rng.next_u64() % 4;
        let h: Vec<i64> = (0..size).map(|_| (rng.next_u64() % m) as i64).collect();
        let mut h = h;
        h.sort();
        h.dedup();
        let gens = GeneratorSet::cyclic(m, &h).unwrap();
        if !gens.is_generating() {
            continue;
        }
        tried += 1;
        if gens.period().unwrap() != gens.period_oracle().unwrap() {
            mismatches += 1;
        }
    }
    check(
        aperiodic(3, &[1, 2]) && aperiodic(7, &[2, 3, 5]) && z6 == 6 && mismatches == 0,
        format!("Z6 {{1}} period {z6}, {mismatches} oracle mismatches in {tried}"),
    )
}

fn dove_n6() -> Outcome {
    let ground = WeightedGroundSet::dove(6).unwrap();
    let dove = dove_family(6).unwrap();
    let printed = Construction::Z3Dove.build().unwrap();
    let shifted = printed
        .transform(&printed.group().element(&[2]).unwrap(), 0, false)
        .unwrap();
    let from_printed = ground.build_family(&printed).unwrap().family;
    let from_shifted = ground.build_family(&shifted).unwrap().family;
    let middle = middle_levels_family(6, 2, TieBreak::Lower).unwrap();
    check(
        dove.len() == 36
            && dove.len() > middle.len()
            && middle.len() == 35
            && dove.is_diamond_free()
            && from_shifted == dove
            && from_printed.len() == 32
            && from_printed.is_diamond_free(),
        format!(
            "dove {}, middle {}, shifted build {}, printed build {}",
            dove.len(),
            middle.len(),
            from_shifted.len(),
            from_printed.len()
        ),
    )
}

/// `|F_D(n)|` counted level by level.
fn dove_closed_form(n: u64) -> BigInt {
    let h = n / 2;
    let b = |a, c| binomial(a, c);
    (b(n, h - 1) - b(n - 2, h - 3))
        + (b(n - 2, h) + b(n - 2, h - 2))
        + (b(n, h + 1) - b(n - 2, h + 1))
}

fn dove_beats_middle_levels() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [6u32, 8, 10] {
        let d = dove_family(n).unwrap();
        let m = middle_levels_family(n, 2, TieBreak::Lower).unwrap();
        ok &= d.is_diamond_free()
            && d.len() > m.len()
            && BigInt::from(d.len()) == dove_closed_form(n as u64);
        detail.push(format!("n={n}: {} > {}", d.len(), m.len()));
    }
    check(ok, detail.join(", "))
}

fn equidistribution() -> Outcome {
    let gens = GeneratorSet::cyclic(3, &[1, 2]).unwrap();
    let report = equidistribution_report(&StepDistribution::uniform(&gens), 40, None);
    let eps = ratio(1, 1_000_000_000);
    let dev = report.max_dev.last().unwrap().clone();
    let monotone = report.tv[1..].windows(2).all(|w| w[1].1 <= w[0].1);
    check(
        dev < eps && monotone && report.tv_increases().is_empty(),
        format!("max deviation at k=40 {:.3e}", dev.to_f64().unwrap()),
    )
}

fn expected_ratios() -> Outcome {
    let t = Instant::now();
    let p = Construction::Z3Dove.build().unwrap();
    let step = StepDistribution::uniform(p.gens());
    let big = expected_family_ratio(&p, 500, &step).unwrap();
    let gens = GeneratorSet::cyclic(3, &[1, 2]).unwrap();
    let single = CayleyPoset::new(
        gens.clone(),
        Convention::Standard,
        [PosetElement::new(gens.group().identity(), 0)],
    )
    .unwrap();
    let small = expected_family_ratio(&single, 200, &StepDistribution::uniform(&gens)).unwrap();
    let elapsed = t.elapsed();
    let d1 = (&big - ratio(2, 1)).abs();
    let d2 = (&small - ratio(1, 3)).abs();
    check(
        d1 < ratio(1, 50) && d2 < ratio(1, 1_000_000_000) && elapsed < Duration::from_secs(30),
        format!(
            "n=500 ratio {:.6}, n=200 single {:.12}, {elapsed:.2?}",
            big.to_f64().unwrap(),
            small.to_f64().unwrap()
        ),
    )
}

/// Random strongly diamond-free subposet of `Γ × {-1, 0, 1}`: elements of
/// the grid in random order, each kept when the poset stays valid.
fn random_sdf(gens: &GeneratorSet, rng: &mut ChaCha8Rng) -> CayleyPoset {
    let g = gens.group();
    let mut grid: Vec<PosetElement> = (-1..=1)
        .flat_map(|l| g.elements().map(move |e| PosetElement::new(e, l)))
        .collect();
    for i in (1..grid.len()).rev() {
        grid.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
    }
    let mut kept = CayleyPoset::new(gens.clone(), Convention::Standard, []).unwrap();
    for e in grid {
        let mut next = kept.elements().to_vec();
        next.push(e);
        let candidate = CayleyPoset::new(gens.clone(), Convention::Standard, next).unwrap();
        if candidate.is_strongly_diamond_free() {
            kept = candidate;
        }
    }
    kept
}

fn families_from_random_posets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut all_gens = Vec::new();
    for m in 2..=5u64 {
        for size in 1..=3u32 {
            for mask in k_subsets(m as u32, size) {
                let h: Vec<i64> = (0..m as i64).filter(|&x| mask >> x & 1 == 1).collect();
                let gens = GeneratorSet::cyclic(m, &h).unwrap();
                if gens.is_generating() {
                    all_gens.push(gens);
                }
            }
        }
    }
    let mut bad = 0;
    let mut built = 0;
    while built < 200 {
        let gens = &all_gens[built % all_gens.len()];
        let p = random_sdf(gens, &mut rng);
        let ground = sample_weighting(8, &StepDistribution::uniform(gens), rng.next_u64()).unwrap();
        let f = ground.build_family(&p).unwrap().family;
        if !p.is_strongly_diamond_free() || !f.is_diamond_free() {
            bad += 1;
        }
        built += 1;
    }
    let ex2 = Construction::OddCyclic { m: 3, a: 1, b: 2 }
        .build()
        .unwrap();
    let step = StepDistribution::uniform(ex2.gens());
    let sampled_bad = (0..100)
        .filter(|&seed| {
            !sample_family(12, &step, &ex2, seed)
                .unwrap()
                .is_diamond_free()
        })
        .count();
    check(
        bad == 0 && sampled_bad == 0,
        format!(
            "{built} posets over {} generating sets, {bad} bad; {sampled_bad}/100 sampled bad",
            all_gens.len()
        ),
    )
}

fn naive_optimum(problem: &SearchProblem) -> usize {
    let grid = problem.grid();
    let n = grid.len() as u32;
    (0..=n)
        .rev()
        .find(|&size| {
            k_subsets(n, size).any(|mask| {
                CayleyPoset::new(
                    problem.gens.clone(),
                    problem.convention,
                    (0..grid.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| grid[i].clone()),
                )
                .unwrap()
                .is_strongly_diamond_free()
            })
        })
        .unwrap_or(0) as usize
}

fn search_optima() -> Outcome {
    let t = Instant::now();
    let solve = |m, h: &[i64], levels: &[i64]| {
        let p = SearchProblem::new(GeneratorSet::cyclic(m, h).unwrap(), levels.iter().copied());
        let r = max_sdf_poset(&p).unwrap();
        (p, r)
    };
    let mut detail = Vec::new();
    let mut ok = true;
    for (m, h, levels, want) in [
        (3, &[0i64, 2][..], &[-1i64, 0, 1][..], 6),
        (3, &[1, 2], &[1, 2, 3], 6),
        (5, &[1, 2], &[1, 2, 3], 10),
    ] {
        let (p, r) = solve(m, h, levels);
        let naive = naive_optimum(&p);
        ok &= r.best_size == want && naive == want && r.proven_optimal;
        detail.push(format!("Z{m} {}", r.best_size));
    }
    let (_, r) = solve(7, &[2, 3, 5], &[1, 2, 3]);
    ok &= (13..=14).contains(&r.best_size) && r.best.is_strongly_diamond_free();
    detail.push(format!("Z7 {} proven {}", r.best_size, r.proven_optimal));
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    detail.push(format!("{elapsed:.2?}"));
    check(ok, detail.join(", "))
}

fn lubell() -> Outcome {
    let two = (6..=9).all(|n| {
        middle_levels_family(n, 2, TieBreak::Lower)
            .unwrap()
            .lubell()
            == ratio(2, 1)
    });
    let dove = dove_family(6).unwrap().lubell();
    check(two && dove == ratio(34, 15), format!("dove n=6 {dove}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example sweep counts", sweep_counts),
        ("periods match oracle", periods),
        ("dove n=6 from Z3 poset", dove_n6),
        ("dove beats middle levels", dove_beats_middle_levels),
        ("equidistribution on Z3", equidistribution),
        ("expected family ratios", expected_ratios),
        (
            "random posets give diamond-free families",
            families_from_random_posets,
        ),
        ("search optima", search_optima),
        ("lubell values", lubell),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
