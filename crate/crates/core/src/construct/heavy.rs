//! Five heavy left components, and the pair-element picker for two heavy
//! right components.

use crate::construct::charge::ChargeLedger;
use crate::construct::complete::{complete_assignment, Overrides};
use crate::construct::telemetry::{FiveHeavyCase, StepLog};
use crate::construct::track::TrackState;
use crate::construct::{Problem, StepError};
use crate::error::ConstructError;
use crate::relations::Element;

fn logic(step: &'static str, detail: String) -> StepError {
    StepError::Logic(ConstructError::logic(step, detail))
}

/// Completed pairs by position and the case that produced them.
pub type FiveHeavyWin = (Vec<(Element, Element)>, FiveHeavyCase);

/// If at least five left components are heavy, completes a matching from
/// the first five. Returns `None` when fewer than five are heavy.
pub fn try_five_heavy_left_win(
    prob: &Problem,
    st: &TrackState,
    lg: &ChargeLedger,
    log: &mut StepLog,
) -> Result<Option<FiveHeavyWin>, StepError> {
    let left: Vec<usize> = (1..=st.left_len).filter(|&p| lg.is_heavy(p)).collect();
    if left.len() < 5 {
        return Ok(None);
    }
    let p = &left[..5];
    for &q in p {
        if lg.sigma[q] < 3 || lg.tau[q] < 3 {
            return Err(logic("five_heavy", format!("heavy left {q}: sigma {} tau {}", lg.sigma[q], lg.tau[q])));
        }
    }
    let tpos = st.last_left();
    let idx0 = &prob.idx[st.relation(0)];
    let idxt = &prob.idx[st.relation(tpos)];
    let mut attempts = 0u32;
    let mut attempt = |ov: Overrides| {
        attempts += 1;
        complete_assignment(prob, st, &ov).ok()
    };
    let o = st.comps[p[1]];
    let (a, b, c, d) = (o.a, o.b, o.c(), o.d());
    let result = if idxt.equivalent(c, d) {
        // case 1: some 1-charged outside element of p3..p5 avoids {c', d'}
        let mut found = None;
        'case1: for &j in &p[2..] {
            for &y in &lg.s[j] {
                if y == c || y == d {
                    continue;
                }
                for v in [st.comps[j].a, st.comps[j].b] {
                    if idx0.equivalent(v, y) {
                        if let Some(m) = attempt(Overrides::from([(tpos, (c, d)), (0, (v, y))])) {
                            found = Some((m, FiveHeavyCase::One));
                            break 'case1;
                        }
                    }
                }
            }
        }
        found
    } else {
        let mut found = None;
        let orientations = [(a, b, c, d), (b, a, d, c)];
        'case2: for (oa, ob, oc, od) in orientations {
            if !idxt.equivalent(oa, od) {
                continue;
            }
            for &y in &lg.s[p[1]] {
                if !idx0.equivalent(ob, y) {
                    continue;
                }
                if y != od {
                    if let Some(m) = attempt(Overrides::from([(0, (ob, y)), (tpos, (oa, od))])) {
                        found = Some((m, FiveHeavyCase::TwoA));
                        break 'case2;
                    }
                } else {
                    let f = st.comps[p[0]];
                    for (x, z) in [(f.c(), f.d()), (f.a, f.d()), (f.b, f.c())] {
                        if !idxt.equivalent(x, z) {
                            continue;
                        }
                        let ov = Overrides::from([(p[1] - 1, (oa, oc)), (0, (ob, od)), (tpos, (x, z))]);
                        if let Some(m) = attempt(ov) {
                            found = Some((m, FiveHeavyCase::TwoB));
                            break 'case2;
                        }
                    }
                }
            }
        }
        found
    };
    log.recipe_retries += attempts.saturating_sub(1);
    match result {
        Some(r) => Ok(Some(r)),
        None => Err(logic("five_heavy", format!("no case applies for heavy left {p:?}; {}", st.digest()))),
    }
}

/// Every `(v1, w1, v2, w2)` with `v1, v2` in the identity pairs of `i` and
/// `j`, `w1, w2` in `U_i ∪ U_j`, all distinct, `v1 ~ w1` under the new
/// relation and `v2 ~ w2` under the last track relation. With
/// `furthermore = Some((q, r))`, exactly one of `q, r` is among `w1, w2`.
/// Lexicographic order over (v1, w1, v2, w2) with `v` ordered `a_i, b_i, a_j, b_j`.
pub fn heavy_pair_candidates(
    prob: &Problem,
    st: &TrackState,
    lg: &ChargeLedger,
    i: usize,
    j: usize,
    furthermore: Option<(Element, Element)>,
) -> Vec<(Element, Element, Element, Element)> {
    let idx0 = &prob.idx[st.relation(0)];
    let idxt = &prob.idx[st.relation(st.last_left())];
    let vs = [st.comps[i].a, st.comps[i].b, st.comps[j].a, st.comps[j].b];
    let mut ws = lg.u(i);
    ws.extend(lg.u(j));
    ws.sort_unstable();
    ws.dedup();
    let mut out = Vec::new();
    for &v1 in &vs {
        for &w1 in &ws {
            if !idx0.equivalent(v1, w1) {
                continue;
            }
            for &v2 in &vs {
                if v2 == v1 {
                    continue;
                }
                for &w2 in &ws {
                    if w2 == w1 || !idxt.equivalent(v2, w2) {
                        continue;
                    }
                    if let Some((q, r)) = furthermore {
                        let hits = [q, r].iter().filter(|&&e| e == w1 || e == w2).count();
                        if hits != 1 {
                            continue;
                        }
                    }
                    out.push((v1, w1, v2, w2));
                }
            }
        }
    }
    out
}

/// First candidate of [`heavy_pair_candidates`]; existence is guaranteed for
/// two distinct heavy right components.
pub fn pick_heavy_pair_elements(
    prob: &Problem,
    st: &TrackState,
    lg: &ChargeLedger,
    i: usize,
    j: usize,
    furthermore: Option<(Element, Element)>,
) -> Result<(Element, Element, Element, Element), StepError> {
    heavy_pair_candidates(prob, st, lg, i, j, furthermore)
        .first()
        .copied()
        .ok_or_else(|| logic("pick_heavy_pair_elements", format!("heavy {i}, {j}, furthermore {furthermore:?}")))
}
