use grinblat::construct::charge::{charge_scheme_3, heavy_indices, right_heavy, Scheme3Outcome};
use grinblat::construct::heavy::try_five_heavy_left_win;
use grinblat::construct::lucky::{find_lucky, select_nonconflicting};
use grinblat::construct::telemetry::{Branch, FinalCase, FiveHeavyCase, Phase, StepLog};
use grinblat::construct::{base_bound, extend_matching, ConstructOptions, Extension};
use grinblat::gen::{
    gen_fixture_ledger, gen_planted_concentrated, gen_planted_pattern, planted_capacity, ChargeRequest, Fixture,
    FixtureSpec, Planted, PlantedPattern,
};
use grinblat::relations::{verify_matching, Matching};
use grinblat::{ConstructError, FixtureError};

use PlantedPattern::*;

fn c_eff(p: &Planted) -> u64 {
    let n = p.instance.len();
    (p.instance.min_kernel().unwrap() - base_bound(n)) as u64
}

fn run(p: &Planted) -> Extension {
    let opts = ConstructOptions { c: c_eff(p), ..Default::default() };
    let ext = extend_matching(&p.instance, &p.sub, p.new_rel, &opts).unwrap();
    assert!(verify_matching(&p.instance, &ext.matching).is_valid());
    ext
}

fn fixture(n: usize, pattern: PlantedPattern, charges: Vec<ChargeRequest>) -> Result<Fixture, FixtureError> {
    gen_fixture_ledger(&FixtureSpec { n, pattern, seed: Some(11), charges })
}

fn to_matching(f: &Fixture, by_pos: Vec<(u32, u32)>) -> Matching {
    let mut out = vec![(0, 0); by_pos.len()];
    for (p, pair) in by_pos.into_iter().enumerate() {
        out[f.state.relation(p)] = pair;
    }
    Matching::new(out)
}

#[test]
fn every_pattern_ends_in_its_branch_at_n200() {
    type Expect = (PlantedPattern, fn(&Branch) -> bool);
    let expect: [Expect; 11] = [
        (Base, |b| *b == Branch::Final { case: FinalCase::SameLeft }),
        (TrackWin, |b| *b == Branch::TrackWin { step: 3 }),
        (TrackFinal, |b| *b == Branch::TrackFinalObs),
        (FiveHeavyOne, |b| *b == Branch::FiveHeavy { case: FiveHeavyCase::One }),
        (FiveHeavyTwoA, |b| *b == Branch::FiveHeavy { case: FiveHeavyCase::TwoA }),
        (FiveHeavyTwoB, |b| *b == Branch::FiveHeavy { case: FiveHeavyCase::TwoB }),
        (OutsideA, |b| matches!(b, Branch::OutsidePair { .. })),
        (OutsideB, |b| matches!(b, Branch::OutsideIdentity { .. })),
        (FinalOutside, |b| *b == Branch::Final { case: FinalCase::Outside }),
        (FinalDifferentLeft, |b| *b == Branch::Final { case: FinalCase::DifferentLeft }),
        (Conflicting, |b| matches!(b, Branch::Final { .. })),
    ];
    for (pattern, ok) in expect {
        for seed in [None, Some(3)] {
            let ext = run(&gen_planted_pattern(200, 0, pattern, seed));
            assert!(ok(&ext.log.branch), "{pattern:?}: {:?}", ext.log.branch);
        }
    }
}

#[test]
fn conflicting_pattern_has_conflict_edges() {
    let ext = run(&gen_planted_pattern(200, 0, Conflicting, Some(1)));
    assert!(ext.log.conflict_edges > 0);
    assert!(ext.log.h_double > 0);
}

#[test]
fn n60_track_has_eleven_left_components() {
    let p = gen_planted_pattern(60, 0, Base, Some(2));
    let ext = run(&p);
    assert_eq!(ext.log.track_len, 11);
    assert!(ext.log.phase_reached >= Phase::Lucky);
}

#[test]
fn small_c_defers_to_exact_solver() {
    // at n = 30 the compatible pair needs a larger constant than the layout has
    let ext = run(&gen_planted_pattern(30, 0, Base, None));
    assert!(matches!(ext.log.branch, Branch::Exact { .. }));
    assert!(ext.log.exact_nodes > 0);
}

#[test]
fn concentrated_generator_meets_the_bound() {
    for n in [30, 60, 200] {
        for c in [0, planted_capacity(n) as u64, 5000] {
            let p = gen_planted_concentrated(n, c, 9);
            assert!(p.instance.min_kernel().unwrap() >= base_bound(n) + c as usize);
            let others: Vec<usize> = (1..n).collect();
            assert!(verify_matching(&p.instance.select(&others), &p.sub).is_valid());
            assert_eq!(p, gen_planted_concentrated(n, c, 9));
        }
    }
    // padded instances match directly
    let ext = run(&gen_planted_concentrated(60, 5000, 1));
    assert_eq!(ext.log.branch, Branch::DirectPair);
}

#[test]
fn tampered_sub_matching_is_rejected() {
    let mut p = gen_planted_concentrated(40, 0, 4);
    p.sub.pairs.swap(0, 1);
    let err = extend_matching(&p.instance, &p.sub, 0, &ConstructOptions { c: 0, ..Default::default() });
    assert!(matches!(err, Err(ConstructError::InvalidSubMatching(_))), "{err:?}");
}

#[test]
fn hypothesis_is_checked() {
    let p = gen_planted_concentrated(40, 0, 4);
    let err = extend_matching(&p.instance, &p.sub, 0, &ConstructOptions::default()).unwrap_err();
    assert!(matches!(err, ConstructError::HypothesisViolation { .. }));
}

#[test]
fn fixture_charges_are_realized() {
    let f = fixture(
        60,
        Base,
        vec![ChargeRequest { position: 20, sigma: 3, tau: 2 }, ChargeRequest { position: 21, sigma: 0, tau: 4 }],
    )
    .unwrap();
    assert_eq!((f.ledger.sigma[20], f.ledger.tau[20]), (3, 2));
    assert_eq!((f.ledger.sigma[21], f.ledger.tau[21]), (0, 4));
    assert!(f.ledger.s.iter().all(|s| s.len() <= 2));
}

#[test]
fn fixture_rejects_cap_violations() {
    let e = fixture(60, Base, vec![ChargeRequest { position: 20, sigma: 5, tau: 4 }]).unwrap_err();
    assert!(matches!(e, FixtureError::Infeasible(_)));
    assert!(fixture(60, Base, vec![ChargeRequest { position: 20, sigma: 1, tau: 4 }]).is_err());
    // left components cannot be requested
    assert!(fixture(60, Base, vec![ChargeRequest { position: 3, sigma: 4, tau: 4 }]).is_err());
    // patterns that win while the track is built have no ledger
    assert!(fixture(60, TrackWin, vec![]).is_err());
    assert!(fixture(20, Base, vec![]).is_err());
}

#[test]
fn five_heavy_fixtures_complete() {
    for (pattern, case) in
        [(FiveHeavyOne, FiveHeavyCase::One), (FiveHeavyTwoA, FiveHeavyCase::TwoA), (FiveHeavyTwoB, FiveHeavyCase::TwoB)]
    {
        for n in [30, 60, 200] {
            let f = fixture(n, pattern, vec![]).unwrap();
            let mut log = StepLog::new(n, 0);
            let (m, got) = try_five_heavy_left_win(&f.problem(), &f.state, &f.ledger, &mut log).unwrap().expect("win");
            assert_eq!(got, case, "{pattern:?} n={n}");
            assert!(verify_matching(&f.planted.instance, &to_matching(&f, m)).is_valid());
        }
    }
    // no five heavy left components in the base layout
    let f = fixture(60, Base, vec![]).unwrap();
    let mut log = StepLog::new(60, 0);
    assert!(try_five_heavy_left_win(&f.problem(), &f.state, &f.ledger, &mut log).unwrap().is_none());
}

#[test]
fn scheme3_fixtures_complete() {
    for (pattern, is_a) in [(OutsideA, true), (OutsideB, false)] {
        let f = fixture(60, pattern, vec![]).unwrap();
        let c = c_eff(&f.planted);
        let prob = f.problem();
        let heavy = heavy_indices(&f.state, &f.ledger, c).unwrap();
        let h = right_heavy(&f.state, &f.ledger, &heavy, c).unwrap();
        let mut log = StepLog::new(60, c);
        let Scheme3Outcome::Win(m, branch) = charge_scheme_3(&prob, &f.state, &f.ledger, h[0], &mut log).unwrap()
        else {
            panic!("{pattern:?} did not win at the first heavy index");
        };
        assert_eq!(matches!(branch, Branch::OutsidePair { .. }), is_a);
        assert!(verify_matching(&f.planted.instance, &to_matching(&f, m)).is_valid());
    }
}

#[test]
fn conflicting_fixture_is_detected() {
    let f = fixture(200, Conflicting, vec![]).unwrap();
    let c = c_eff(&f.planted);
    let prob = f.problem();
    let heavy = heavy_indices(&f.state, &f.ledger, c).unwrap();
    let h = right_heavy(&f.state, &f.ledger, &heavy, c).unwrap();
    let mut log = StepLog::new(200, c);
    let tables: Vec<_> = h
        .iter()
        .map(|&i| match charge_scheme_3(&prob, &f.state, &f.ledger, i, &mut log).unwrap() {
            Scheme3Outcome::Charged(t) => t,
            Scheme3Outcome::Win(..) => panic!("unexpected win at {i}"),
        })
        .collect();
    assert!(tables.iter().all(|t| t.uncharged <= 6 && t.counts.iter().all(|&k| k <= 4)));
    let mut lucky = find_lucky(&f.state, &tables, c).unwrap();
    select_nonconflicting(&prob, &f.state, &mut lucky, c).unwrap();
    assert!(!lucky.conflict_edges.is_empty());
    for &(u, v) in &lucky.conflict_edges {
        assert!(!(lucky.h_double.contains(&u) && lucky.h_double.contains(&v)));
    }
}
