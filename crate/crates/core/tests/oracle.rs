mod common;

use grinblat::gen::gen_lower_bound_family;
use grinblat::oracle::exact::{exact_solve, ExactOutcome};
use grinblat::oracle::search::{min_unmatchable_kernel, search_unmatchable, SearchParams};
use grinblat::{verify_matching, Element, Instance, Partition};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 100_000_000;

fn verdict(inst: &Instance) -> bool {
    match exact_solve(inst, BUDGET).outcome {
        ExactOutcome::Matched(m) => {
            assert!(verify_matching(inst, &m).is_valid());
            true
        }
        ExactOutcome::ProvenNone => false,
        ExactOutcome::BudgetExhausted => panic!("budget exhausted"),
    }
}

#[test]
fn lower_bound_family_is_tight() {
    for n in 2..=6 {
        let inst = gen_lower_bound_family(n);
        assert_eq!(inst.min_kernel().unwrap(), 3 * n - 3);
        assert!(!verdict(&inst), "n={n}");
        assert!(verdict(&common::with_extra_pair(&inst)), "n={n} plus a pair");
    }
}

#[test]
fn disjoint_pairs_match_directly() {
    let inst =
        Instance::new(4, vec![Partition::new(vec![vec![0, 1]]).unwrap(), Partition::new(vec![vec![2, 3]]).unwrap()])
            .unwrap();
    let ExactOutcome::Matched(m) = exact_solve(&inst, 100).outcome else { panic!() };
    assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
}

#[test]
fn agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let n = rng.random_range(1..=6);
        let ground = rng.random_range(2..=16);
        let inst = common::random_instance(&mut rng, n, ground);
        assert_eq!(verdict(&inst), common::brute_force_matchable(&inst), "{inst:?}");
    }
}

#[test]
fn verdict_ignores_labels_and_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let ground = rng.random_range(2..=14);
        let inst = common::random_instance(&mut rng, n, ground);
        let mut map: Vec<Element> = (0..ground as Element).collect();
        map.shuffle(&mut rng);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        assert_eq!(verdict(&inst), verdict(&common::relabel(&inst, &map, &order)));
    }
}

#[test]
fn exact_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst = common::random_instance(&mut rng, 6, 20);
    assert_eq!(exact_solve(&inst, BUDGET), exact_solve(&inst, BUDGET));
}

#[test]
fn search_witnesses_are_certified() {
    for (n, k) in [(2, 3), (2, 4), (3, 6)] {
        let r = search_unmatchable(&SearchParams { n, kernel_target: k, max_ground: 10, budget: 10_000_000, seed: 2 });
        let w = r.witness.expect("witness");
        assert_eq!(w.len(), n);
        assert!(w.min_kernel().unwrap() >= k);
        assert!(w.relations().iter().all(|p| p.classes().iter().all(|c| c.len() <= 3)));
        assert!(!verdict(&w));
    }
}

#[test]
fn min_kernel_for_two_relations() {
    let e = min_unmatchable_kernel(2, 10, 10_000_000, 1);
    assert_eq!(e.kernel, 4);
    assert!(e.next_exhaustive);
    assert!(!verdict(&e.witness));
}
