use cayley_diamond::family::k_subsets;
use cayley_diamond::*;

/// Largest strongly diamond-free subset of the grid, trying every subset
/// from the largest size down.
fn naive_optimum(problem: &SearchProblem) -> usize {
    let grid = problem.grid();
    assert!(grid.len() <= 18);
    let n = grid.len() as u32;
    for size in (0..=n).rev() {
        for mask in k_subsets(n, size) {
            let p = CayleyPoset::new(
                problem.gens.clone(),
                problem.convention,
                grid.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, e)| e.clone()),
            )
            .unwrap();
            if p.is_strongly_diamond_free() {
                return size as usize;
            }
        }
    }
    0
}

fn problem(m: u64, h: &[i64], levels: &[i64]) -> SearchProblem {
    SearchProblem::new(GeneratorSet::cyclic(m, h).unwrap(), levels.iter().copied())
}

#[test]
fn matches_naive_enumeration_on_small_grids() {
    let cases: &[(u64, &[i64], &[i64])] = &[
        (3, &[0, 2], &[-1, 0, 1]),
        (3, &[1, 2], &[1, 2, 3]),
        (2, &[1], &[0, 1, 2, 3]),
        (4, &[1, 2], &[0, 1, 2]),
        (4, &[0, 1, 3], &[0, 1, 2, 3]),
        (5, &[1, 2], &[1, 2, 3]),
        (6, &[1, 2], &[0, 1, 2]),
        (6, &[2, 3], &[0, 1, 2]),
        (3, &[0], &[0, 1, 2, 3, 4, 5]),
    ];
    for &(m, h, levels) in cases {
        let p = problem(m, h, levels);
        let r = max_sdf_poset(&p).unwrap();
        assert_eq!(
            r.best_size,
            naive_optimum(&p),
            "Z{m} H={h:?} levels={levels:?}"
        );
        assert!(r.proven_optimal);
        assert!(r.best.is_strongly_diamond_free());
        assert!(r.best_size <= r.upper_bound && r.upper_bound as u64 <= 2 * m);
    }
}

#[test]
fn mirror_convention_search_matches_naive() {
    let mut p = problem(5, &[1, 2], &[1, 2, 3]);
    p.convention = Convention::Mirror;
    let r = max_sdf_poset(&p).unwrap();
    assert_eq!(r.best_size, naive_optimum(&p));
    assert_eq!(r.best.convention(), Convention::Mirror);
}

#[test]
fn seeded_incumbent_never_lowers_the_optimum() {
    let seed = Construction::Z7.build().unwrap();
    let mut p = problem(7, &[2, 3, 5], &[1, 2, 3]);
    let plain = max_sdf_poset(&p).unwrap();
    p.incumbent = Some(seed);
    let seeded = max_sdf_poset(&p).unwrap();
    assert!(seeded.best_size >= 13);
    assert_eq!(seeded.best_size, plain.best_size);
}

#[test]
fn result_is_independent_of_threads() {
    let base = problem(6, &[1, 2], &[0, 1, 2]);
    let runs: Vec<SearchResult> = [1, 2, 3, 8]
        .iter()
        .map(|&t| {
            let mut p = base.clone();
            p.threads = t;
            max_sdf_poset(&p).unwrap()
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.best, runs[0].best);
        assert_eq!(r.proven_optimal, runs[0].proven_optimal);
    }
}

#[test]
fn summary_line_format() {
    let r = max_sdf_poset(&problem(3, &[0, 2], &[-1, 0, 1])).unwrap();
    let line = r.summary_line();
    assert!(
        line.starts_with("optimum 6 bound 6 proven yes nodes "),
        "{line}"
    );
}
