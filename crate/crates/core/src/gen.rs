//! Instance generators.
//!
//! * [`gen_lower_bound_family`]: `n` identical relations made of `n - 1`
//!   triples; no rainbow matching although every kernel has `3n - 3` elements.
//! * [`gen_random_hypothesis`]: uniform classes of size 2 and 3 with kernels
//!   above `ceil(16n/5) + c`.
//! * [`gen_planted_concentrated`]: a planted matching whose new relation is
//!   concentrated on the matched elements, so the extension has to build the
//!   full track and go through the charging phases. Variants of the same
//!   layout ([`PlantedPattern`]) steer the pipeline into each win branch.
//!
//! Planted layout, before relabeling: component `p = 1..n-1` has
//! `a_p = 2(p-1)`, `b_p = 2(p-1) + 1`; every matched element `e` has an
//! outside partner `o(e) = 2(n-1) + e`. Track components are `1..=t-1` with
//! `t = floor(n/5)`, `c_p = o(a_p)`, `d_p = o(b_p)`.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::charge::{charge_scheme_2, ChargeLedger};
use crate::construct::telemetry::StepLog;
use crate::construct::track::{build_track, TrackState};
use crate::construct::{base_bound, Problem, StepError};
use crate::error::FixtureError;
use crate::relations::{Element, Instance, Matching, Partition};

pub fn gen_lower_bound_family(n: usize) -> Instance {
    let classes: Vec<Vec<Element>> =
        (0..n.saturating_sub(1)).map(|j| (0..3).map(|k| (3 * j + k) as Element).collect()).collect();
    let p = Partition::new(classes).expect("disjoint triples");
    Instance::new(3 * n.saturating_sub(1), vec![p; n]).expect("in range")
}

/// Every kernel has exactly `ceil(16n/5) + c + slack` elements, split into
/// classes of size 2 and 3 over a ground set of
/// `ceil(1.5 * (ceil(16n/5) + c))` elements (or the kernel size, if larger).
pub fn gen_random_hypothesis(n: usize, c: u64, seed: u64, slack: usize) -> Instance {
    let bound = base_bound(n) + c as usize;
    let k = bound + slack;
    let ground = (3 * bound).div_ceil(2).max(k).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems: Vec<Element> = (0..ground as Element).collect();
    let rels = (0..n)
        .map(|_| {
            elems.shuffle(&mut rng);
            let mut classes = Vec::new();
            let mut rest = &elems[..k];
            while !rest.is_empty() {
                let size = match rest.len() {
                    2 | 3 => rest.len(),
                    4 => 2,
                    _ => rng.random_range(2..=3),
                };
                classes.push(rest[..size].to_vec());
                rest = &rest[size..];
            }
            Partition::new(classes).expect("disjoint")
        })
        .collect();
    Instance::new(ground, rels).expect("in range")
}

/// Variants of the planted layout; each one is designed to end in the named
/// branch of the extension pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlantedPattern {
    /// Full pipeline; final substitution with both free elements in one left
    /// component.
    Base,
    /// Two left components become classmates while building the track.
    TrackWin,
    /// Same for the last track relation.
    TrackFinal,
    /// Five heavy left components, first case (`c' ~ d'` in the second).
    FiveHeavyOne,
    /// Five heavy left components, case 2a.
    FiveHeavyTwoA,
    /// Five heavy left components, case 2b.
    FiveHeavyTwoB,
    /// Two free classmates under the first heavy relation.
    OutsideA,
    /// An identity element of a left component with a free classmate under
    /// the first heavy relation.
    OutsideB,
    /// Final substitution with free elements outside the left components.
    FinalOutside,
    /// Final substitution with free elements in two left components; the
    /// first two nonconflicting indices are blocked by their t-charged sets.
    FinalDifferentLeft,
    /// Every third heavy index charges the lucky component crosswise.
    Conflicting,
}

/// Requested charge counts for one right component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChargeRequest {
    pub position: usize,
    pub sigma: u8,
    pub tau: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureSpec {
    pub n: usize,
    pub pattern: PlantedPattern,
    /// Relabels elements when set.
    pub seed: Option<u64>,
    pub charges: Vec<ChargeRequest>,
}

/// A planted instance together with the matching of every relation except
/// `new_rel`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    pub instance: Instance,
    /// Pairs of relations `1..n`, in order.
    pub sub: Matching,
    pub new_rel: usize,
}

struct Layout {
    n: usize,
    t: usize,
    rels: Vec<Vec<Vec<Element>>>,
    next_fresh: Element,
}

impl Layout {
    fn a(&self, p: usize) -> Element {
        2 * (p as Element - 1)
    }
    fn b(&self, p: usize) -> Element {
        self.a(p) + 1
    }
    fn o(&self, e: Element) -> Element {
        2 * (self.n as Element - 1) + e
    }
    fn c(&self, p: usize) -> Element {
        self.o(self.a(p))
    }
    fn d(&self, p: usize) -> Element {
        self.o(self.b(p))
    }
    fn fresh(&mut self) -> Element {
        self.next_fresh += 1;
        self.next_fresh - 1
    }

    fn new(n: usize) -> Self {
        let t = n / 5;
        let tp = t - 1;
        let mut l = Layout { n, t, rels: vec![Vec::new(); n], next_fresh: 4 * (n as Element - 1) };
        let mut rels = vec![Vec::new(); n];
        for q in 1..n {
            rels[0].push(vec![l.a(q), l.c(q)]);
            rels[0].push(vec![l.b(q), l.d(q)]);
        }
        for (s, rel) in rels.iter_mut().enumerate().skip(1) {
            for q in 1..n {
                let crossed = q < s && q <= tp;
                if crossed {
                    rel.push(vec![l.a(q), l.d(q)]);
                    if s != tp {
                        rel.push(vec![l.b(q), l.c(q)]);
                    }
                } else if q == s {
                    rel.push(vec![l.a(q), l.b(q)]);
                    if s <= tp {
                        rel.push(vec![l.c(q), l.d(q)]);
                    }
                } else {
                    rel.push(vec![l.a(q), l.c(q)]);
                    rel.push(vec![l.b(q), l.d(q)]);
                }
            }
        }
        l.rels = rels;
        l
    }

    fn remove_class(&mut self, r: usize, elems: &[Element]) {
        let before = self.rels[r].len();
        self.rels[r].retain(|c| !(c.len() == elems.len() && elems.iter().all(|e| c.contains(e))));
        assert_eq!(before, self.rels[r].len() + 1, "class {elems:?} not in relation {r}");
    }

    fn replace(&mut self, r: usize, old: &[&[Element]], new: &[&[Element]]) {
        for c in old {
            self.remove_class(r, c);
        }
        for c in new {
            self.rels[r].push(c.to_vec());
        }
    }

    fn apply(&mut self, pattern: PlantedPattern) {
        let tp = self.t - 1;
        let j = tp + 1;
        let roles: [fn(&Layout, usize) -> Element; 4] = [Layout::a, Layout::b, Layout::c, Layout::d];
        match pattern {
            PlantedPattern::Base => {}
            PlantedPattern::TrackWin => {
                let (a1, a2, d1, d2) = (self.a(1), self.a(2), self.d(1), self.d(2));
                self.replace(3, &[&[a1, d1], &[a2, d2]], &[&[a1, a2], &[d1, d2]]);
            }
            PlantedPattern::TrackFinal => {
                let (a1, a2, d1, d2) = (self.a(1), self.a(2), self.d(1), self.d(2));
                self.replace(tp, &[&[a1, d1], &[a2, d2]], &[&[a1, a2], &[d1, d2]]);
            }
            PlantedPattern::FiveHeavyOne => {
                for p in 1..tp {
                    let (ap, bp, cp, dp) = (self.a(p), self.b(p), self.c(p), self.d(p));
                    self.replace(tp, &[&[ap, dp]], &[&[ap, bp], &[cp, dp]]);
                }
            }
            PlantedPattern::FiveHeavyTwoA | PlantedPattern::FiveHeavyTwoB => {
                for p in 1..tp {
                    let (bp, cp) = (self.b(p), self.c(p));
                    self.rels[tp].push(vec![bp, cp]);
                }
                if pattern == PlantedPattern::FiveHeavyTwoA {
                    let f = self.fresh();
                    let (b2, d2) = (self.b(2), self.d(2));
                    self.replace(0, &[&[b2, d2]], &[&[b2, f]]);
                }
            }
            PlantedPattern::OutsideA => {
                let (f, g) = (self.fresh(), self.fresh());
                self.rels[j].push(vec![f, g]);
            }
            PlantedPattern::OutsideB => {
                let f = self.fresh();
                let (a1, d1) = (self.a(1), self.d(1));
                self.replace(j, &[&[a1, d1]], &[&[a1, f]]);
            }
            PlantedPattern::FinalOutside | PlantedPattern::FinalDifferentLeft => {
                // the lucky component j stops being heavy
                let (bj, dj) = (self.b(j), self.o(self.b(j)));
                self.remove_class(0, &[bj, dj]);
                for p in 1..=tp {
                    let (ap, bp, cp, dp) = (self.a(p), self.b(p), self.c(p), self.d(p));
                    self.remove_class(j, &[ap, dp]);
                    self.remove_class(j, &[bp, cp]);
                }
                if pattern == PlantedPattern::FinalOutside {
                    for _ in 0..2 * tp {
                        let (f, g) = (self.fresh(), self.fresh());
                        self.rels[j].push(vec![f, g]);
                    }
                } else {
                    // groups of two left components (three for the last one
                    // when the count is odd), joined role by role
                    let mut groups: Vec<Vec<usize>> =
                        (1..=tp).collect::<Vec<_>>().chunks(2).map(|c| c.to_vec()).collect();
                    if groups.len() > 1 && groups.last().is_some_and(|g| g.len() == 1) {
                        let last = groups.pop().expect("nonempty");
                        groups.last_mut().expect("nonempty").extend(last);
                    }
                    for g in groups {
                        for role in roles {
                            let class: Vec<Element> = g.iter().map(|&p| role(self, p)).collect();
                            self.rels[j].push(class);
                        }
                    }
                    // block the two lowest heavy indices through their t-charges
                    for (k, p) in [(j + 1, 1), (j + 2, 2)] {
                        let (ak, ok, ap, dp) = (self.a(k), self.o(self.a(k)), self.a(p), self.d(p));
                        self.replace(tp, &[&[ak, ok], &[ap, dp]], &[&[ak, dp]]);
                    }
                }
            }
            PlantedPattern::Conflicting => {
                let (aj, bj) = (self.a(j), self.b(j));
                let (oa, ob) = (self.o(aj), self.o(bj));
                for k in (j + 1..self.n).step_by(3) {
                    self.replace(k, &[&[aj, oa], &[bj, ob]], &[&[aj, ob], &[bj, oa]]);
                }
            }
        }
    }

    fn apply_charges(&mut self, reqs: &[ChargeRequest]) -> Result<(), FixtureError> {
        let tp = self.t - 1;
        for r in reqs {
            let p = r.position;
            if p <= tp || p >= self.n {
                return Err(FixtureError::Infeasible(format!("position {p} is not a right component")));
            }
            for (rel, want, name) in [(0, r.sigma, "sigma"), (tp, r.tau, "tau")] {
                let (ap, bp) = (self.a(p), self.b(p));
                let (oa, ob) = (self.o(ap), self.o(bp));
                match want {
                    4 => {}
                    3 => self.replace(rel, &[&[ap, oa], &[bp, ob]], &[&[ap, bp, oa]]),
                    2 => self.replace(rel, &[&[ap, oa], &[bp, ob]], &[&[ap, bp]]),
                    0 => self.replace(rel, &[&[ap, oa], &[bp, ob]], &[]),
                    k if k > 4 => {
                        return Err(FixtureError::Infeasible(format!(
                            "{name} = {k} at position {p}: a component takes at most four charges"
                        )))
                    }
                    k => {
                        return Err(FixtureError::Infeasible(format!("{name} = {k} at position {p} is not realizable")))
                    }
                }
            }
        }
        Ok(())
    }

    /// Pads every relation with shared classes of unused elements up to `target`.
    fn pad(&mut self, target: usize) {
        let sizes: Vec<usize> = self.rels.iter().map(|r| r.iter().map(Vec::len).sum()).collect();
        let deficit = sizes.iter().map(|&s| target.saturating_sub(s)).max().unwrap_or(0);
        if deficit == 0 {
            return;
        }
        let mut blocks: Vec<Vec<Element>> = Vec::new();
        let mut covered = 0;
        while covered < deficit {
            let size = if deficit - covered == 2 || deficit - covered == 4 { 2 } else { 3 };
            blocks.push((0..size).map(|_| self.fresh()).collect());
            covered += size;
        }
        for (r, rel) in self.rels.iter_mut().enumerate() {
            let mut have = sizes[r];
            for bl in &blocks {
                if have >= target {
                    break;
                }
                rel.push(bl.clone());
                have += bl.len();
            }
        }
    }

    fn finish(self, seed: Option<u64>) -> Planted {
        let ground = self.next_fresh as usize;
        let mut map: Vec<Element> = (0..ground as Element).collect();
        if let Some(s) = seed {
            map.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        }
        let rels = self
            .rels
            .iter()
            .map(|r| {
                Partition::new(r.iter().map(|c| c.iter().map(|&e| map[e as usize]).collect()).collect())
                    .expect("disjoint")
            })
            .collect();
        let sub = Matching::new((1..self.n).map(|p| (map[self.a(p) as usize], map[self.b(p) as usize])).collect());
        Planted { instance: Instance::new(ground, rels).expect("in range"), sub, new_rel: 0 }
    }
}

/// Smallest `c` the unpadded base layout supports: `4n - 2t - ceil(16n/5)`.
pub fn planted_capacity(n: usize) -> i64 {
    4 * n as i64 - 2 * (n / 5) as i64 - base_bound(n) as i64
}

/// Planted instance meeting the kernel bound for `c`. When `c` exceeds
/// [`planted_capacity`], every relation is padded with classes of unused
/// elements, which makes the new relation directly matchable.
pub fn gen_planted_concentrated(n: usize, c: u64, seed: u64) -> Planted {
    gen_planted_pattern(n, c, PlantedPattern::Base, Some(seed))
}

pub fn gen_planted_pattern(n: usize, c: u64, pattern: PlantedPattern, seed: Option<u64>) -> Planted {
    assert!(n >= 30, "planted layouts need n >= 30");
    let mut l = Layout::new(n);
    l.apply(pattern);
    l.pad(base_bound(n) + c as usize);
    l.finish(seed)
}

/// Planted instance plus the state after track building and Scheme 2.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub planted: Planted,
    pub state: TrackState,
    pub ledger: ChargeLedger,
    pub indices: Vec<crate::relations::PartitionIndex>,
}

impl Fixture {
    pub fn problem(&self) -> Problem<'_> {
        Problem {
            ground: self.planted.instance.ground_size(),
            rels: self.planted.instance.relations(),
            idx: &self.indices,
        }
    }
}

/// Builds the planted layout for `spec`, runs the track and Scheme 2 on it,
/// and checks that every requested charge count was realized.
pub fn gen_fixture_ledger(spec: &FixtureSpec) -> Result<Fixture, FixtureError> {
    if spec.n < 30 {
        return Err(FixtureError::Infeasible(format!("n = {} is below 30", spec.n)));
    }
    let mut l = Layout::new(spec.n);
    l.apply(spec.pattern);
    l.apply_charges(&spec.charges)?;
    let planted = l.finish(spec.seed);
    let indices = planted.instance.indices();
    let inst = &planted.instance;
    let mut pairs = vec![(0, 0)];
    pairs.extend(planted.sub.pairs.iter().copied());
    let mut state = TrackState::new(inst.ground_size(), 0, &pairs);
    let prob = Problem { ground: inst.ground_size(), rels: inst.relations(), idx: &indices };
    let mut log = StepLog::new(spec.n, 0);
    let early = build_track(&prob, &mut state, &mut log).map_err(step_err)?;
    if early.is_some() {
        return Err(FixtureError::Infeasible(format!("pattern {:?} wins while building the track", spec.pattern)));
    }
    let ledger = charge_scheme_2(&prob, &state).map_err(step_err)?;
    for r in &spec.charges {
        if ledger.sigma[r.position] != r.sigma || ledger.tau[r.position] != r.tau {
            return Err(FixtureError::Infeasible(format!(
                "position {} realized sigma {} tau {}",
                r.position, ledger.sigma[r.position], ledger.tau[r.position]
            )));
        }
    }
    Ok(Fixture { planted, state, ledger, indices })
}

fn step_err(e: StepError) -> FixtureError {
    FixtureError::Infeasible(format!("{e:?}"))
}
