use std::collections::BTreeSet;

use cayley_diamond::family::{k_subsets, Subset};
use cayley_diamond::markov::{convolution_power, ConvolutionPowers};
use cayley_diamond::poset::{leq, usable_generators};
use cayley_diamond::*;
use num_traits::One;
use proptest::prelude::*;

/// Cyclic group order and a nonempty generator set of distinct residues.
fn cyclic_gens(max_m: u64, max_h: usize) -> impl Strategy<Value = GeneratorSet> {
    (2..=max_m).prop_flat_map(move |m| {
        proptest::collection::btree_set(0..m as i64, 1..=max_h.min(m as usize))
            .prop_map(move |h| GeneratorSet::cyclic(m, &h.into_iter().collect::<Vec<_>>()).unwrap())
    })
}

fn generating(max_m: u64, max_h: usize) -> impl Strategy<Value = GeneratorSet> {
    cyclic_gens(max_m, max_h).prop_filter("generating", |h| h.is_generating())
}

/// Subposet of `Γ × {lo..=hi}` chosen by a bitmask over the grid.
fn poset_of(gens: &GeneratorSet, lo: i64, hi: i64, mask: u64, conv: Convention) -> CayleyPoset {
    let g = gens.group();
    let grid: Vec<PosetElement> = (lo..=hi)
        .flat_map(|l| g.elements().map(move |e| PosetElement::new(e, l)))
        .collect();
    CayleyPoset::new(
        gens.clone(),
        conv,
        grid.into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e),
    )
    .unwrap()
}

/// Sumset by plain iteration over element sets.
fn naive_sumset(gens: &GeneratorSet, k: u64) -> BTreeSet<GroupElement> {
    let g = gens.group();
    let mut s: BTreeSet<GroupElement> = [g.identity()].into();
    for _ in 0..k {
        s = s
            .iter()
            .flat_map(|x| gens.elements().iter().map(move |y| g.add(x, y).unwrap()))
            .collect();
    }
    s
}

/// Four nested loops over the family, independent of the bitset route.
fn naive_family_diamond(f: &[Subset]) -> bool {
    let sub = |a: Subset, b: Subset| a != b && a & !b == 0;
    for &a in f {
        for &d in f {
            if !sub(a, d) {
                continue;
            }
            for &b in f {
                if !(sub(a, b) && sub(b, d)) {
                    continue;
                }
                for &c in f {
                    if c != b && sub(a, c) && sub(c, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn period_agrees_with_gcd_oracle(h in generating(30, 4)) {
        prop_assert_eq!(h.period().unwrap(), h.period_oracle().unwrap());
        let p = h.period().unwrap();
        prop_assert_eq!(h.group().order() % p.period_d, 0);
        prop_assert_eq!(p.aperiodic, p.difference_subgroup_size == h.group().order());
    }

    #[test]
    fn sumsets_grow_and_match_iteration(h in cyclic_gens(15, 4), k in 0u64..25) {
        let a = h.iterated_sumset(k);
        prop_assert_eq!(&a, &naive_sumset(&h, k));
        prop_assert!(a.len() <= h.iterated_sumset(k + 1).len());
    }

    #[test]
    fn generated_subgroup_is_closed(h in cyclic_gens(24, 3)) {
        let g = h.group();
        let s = g.generated_subgroup(h.elements()).unwrap();
        prop_assert!(s.contains(&g.identity()));
        for x in &s {
            prop_assert!(s.contains(&g.neg(x).unwrap()));
            for y in &s {
                prop_assert!(s.contains(&g.add(x, y).unwrap()));
            }
        }
    }

    #[test]
    fn order_relation_is_a_partial_order(h in cyclic_gens(6, 3), mask in any::<u32>()) {
        let p = poset_of(&h, 0, 3, mask as u64, Convention::Standard);
        let e = p.elements();
        for a in e {
            prop_assert!(p.leq(a, a));
            for b in e {
                if a != b && p.leq(a, b) {
                    prop_assert!(!p.leq(b, a));
                }
                for c in e {
                    if p.leq(a, b) && p.leq(b, c) {
                        prop_assert!(p.leq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn verdict_is_translation_invariant(h in cyclic_gens(5, 3), mask in any::<u16>(), c in 0i64..5, s in -3i64..3) {
        let p = poset_of(&h, 0, 2, mask as u64, Convention::Standard);
        let t = p.group().reduce(&[c]).unwrap();
        let q = p.transform(&t, s, false).unwrap();
        prop_assert_eq!(q.len(), p.len());
        prop_assert_eq!(p.is_strongly_diamond_free(), q.is_strongly_diamond_free());
    }

    #[test]
    fn mirror_equals_standard_over_negated_gens(h in cyclic_gens(5, 3), mask in any::<u16>()) {
        let p = poset_of(&h, 0, 2, mask as u64, Convention::Mirror);
        let q = poset_of(&h.negated(), 0, 2, mask as u64, Convention::Standard);
        prop_assert_eq!(p.is_strongly_diamond_free(), q.is_strongly_diamond_free());
        let r = p.transform(&p.group().identity(), 0, true).unwrap();
        prop_assert_eq!(r.convention(), Convention::Standard);
        prop_assert_eq!(r.is_strongly_diamond_free(), p.is_strongly_diamond_free());
    }

    #[test]
    fn witnesses_recheck(h in cyclic_gens(5, 3), mask in any::<u16>()) {
        let p = poset_of(&h, 0, 2, mask as u64, Convention::Standard);
        let v = p.verify();
        if let Some(d) = &v.diamond {
            let all = [&d.bottom, &d.left, &d.right, &d.top];
            for (i, a) in all.iter().enumerate() {
                for b in &all[i + 1..] {
                    prop_assert_ne!(a, b);
                }
            }
            for (a, b) in [(&d.bottom, &d.left), (&d.bottom, &d.right), (&d.left, &d.top), (&d.right, &d.top)] {
                prop_assert!(leq(a, b, &h, Convention::Standard));
            }
        }
        if let Some(c) = &v.strong_chain {
            let g = h.group();
            let gap1 = g.sub(&c.middle.gamma, &c.lower.gamma).unwrap();
            let gap2 = g.sub(&c.upper.gamma, &c.middle.gamma).unwrap();
            let k1 = (c.middle.level - c.lower.level) as u64;
            let k2 = (c.upper.level - c.middle.level) as u64;
            prop_assert!(k1 >= 1 && k2 >= 1);
            prop_assert!(usable_generators(&gap1, k1, &h).contains(&c.shared_eta));
            prop_assert!(usable_generators(&gap2, k2, &h).contains(&c.shared_eta));
        }
    }

    #[test]
    fn strong_chain_free_means_two_per_chain(h in cyclic_gens(5, 3), mask in any::<u16>()) {
        let p = poset_of(&h, 0, 2, mask as u64, Convention::Standard);
        if p.strong_chain_witness().is_none() {
            for eta in h.elements() {
                prop_assert!(p.max_chain_occupancy(eta).unwrap() <= 2);
            }
            prop_assert!(p.len() as u64 <= 2 * h.group().order());
        }
    }

    #[test]
    fn family_diamond_check_matches_naive(n in 3u32..=7, picks in proptest::collection::vec(any::<u8>(), 0..40)) {
        let members: Vec<Subset> = picks.iter().map(|&x| x as u64 & ((1 << n) - 1)).collect();
        let f = SubsetFamily::new(n, members).unwrap();
        let w = f.diamond_witness();
        prop_assert_eq!(w.is_some(), naive_family_diamond(f.members()));
        if let Some(w) = w {
            for s in [w.bottom, w.left, w.right, w.top] {
                prop_assert!(f.contains(s));
            }
            prop_assert!(w.left != w.right);
            prop_assert!(w.bottom & !w.left == 0 && w.left & !w.top == 0);
            prop_assert!(w.bottom & !w.right == 0 && w.right & !w.top == 0);
        }
    }

    #[test]
    fn slices_partition_each_level(h in cyclic_gens(5, 3), n in 1u32..10, seed in any::<u64>(), i in -4i64..4) {
        let step = StepDistribution::uniform(&h);
        let ground = markov::sample_weighting(n, &step, seed).unwrap();
        let size = (n / 2) as i64 + i;
        let total: usize = h.group().elements()
            .map(|g| ground.level_slice(&g, i).unwrap().family.len())
            .sum();
        let expected = if (0..=n as i64).contains(&size) { k_subsets(n, size as u32).count() } else { 0 };
        prop_assert_eq!(total, expected);
    }

    #[test]
    fn build_family_counts_add_up(h in cyclic_gens(4, 3), mask in any::<u16>(), seed in any::<u64>()) {
        let p = poset_of(&h, -1, 1, mask as u64, Convention::Standard);
        let ground = markov::sample_weighting(6, &StepDistribution::uniform(&h), seed).unwrap();
        let built = ground.build_family(&p).unwrap();
        let sum: usize = built.counts.iter().map(|(_, c)| c).sum();
        prop_assert_eq!(sum, built.family.len());
    }

    #[test]
    fn convolution_support_and_mass(h in cyclic_gens(9, 3), k in 0u64..20) {
        let step = StepDistribution::uniform(&h);
        let p = convolution_power(&step, k);
        prop_assert!(p.probs().iter().sum::<num_rational::BigRational>().is_one());
        prop_assert_eq!(p.support(), h.iterated_sumset(k));
    }

    #[test]
    fn tv_never_increases(h in cyclic_gens(9, 3)) {
        let step = StepDistribution::uniform(&h);
        let tvs: Vec<_> = ConvolutionPowers::new(&step).take(25).map(|d| d.tv_to_uniform()).collect();
        for w in tvs.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn poset_text_round_trips(h in cyclic_gens(6, 3), mask in any::<u32>(), mirror in any::<bool>()) {
        let conv = if mirror { Convention::Mirror } else { Convention::Standard };
        let p = poset_of(&h, -2, 1, mask as u64, conv);
        let text = format::emit_poset(&p);
        let q = format::parse_poset(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(format::emit_poset(&q), text);
    }
}

#[test]
fn periodic_walk_stays_in_one_coset() {
    let h = GeneratorSet::cyclic(10, &[2, 7]).unwrap();
    let info = h.period().unwrap();
    assert_eq!(info.period_d, 5);
    let g = h.group();
    let k_sub: BTreeSet<GroupElement> = g.generated_subgroup(&[g.element(&[5]).unwrap()]).unwrap();
    let step = StepDistribution::uniform(&h);
    for (k, dist) in ConvolutionPowers::new(&step).take(30).enumerate() {
        let shift = g.scale(&h.elements()[0], k as i64).unwrap();
        let coset: BTreeSet<GroupElement> =
            k_sub.iter().map(|x| g.add(x, &shift).unwrap()).collect();
        assert!(dist.support().is_subset(&coset), "k = {k}");
    }
}

#[test]
fn four_chain_in_family_counts_as_diamond() {
    let f = SubsetFamily::new(3, [0, 1, 3, 7]).unwrap();
    assert!(!f.is_diamond_free());
}
