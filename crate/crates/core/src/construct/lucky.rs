//! The lucky right component, nonconflicting and compatible heavy indices,
//! and the final substitution.

use std::collections::{BTreeMap, VecDeque};

use crate::construct::charge::{ChargeLedger, Scheme3};
use crate::construct::complete::{complete_assignment, Overrides};
use crate::construct::heavy::heavy_pair_candidates;
use crate::construct::telemetry::{FinalCase, StepLog};
use crate::construct::track::TrackState;
use crate::construct::{c_dependent, Problem, StepError};
use crate::error::ConstructError;
use crate::relations::Element;

fn logic(step: &'static str, detail: String) -> StepError {
    StepError::Logic(ConstructError::logic(step, detail))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LuckyData {
    pub j_star: usize,
    /// Heavy indices charging `C_{j*}` four times, ascending, truncated.
    pub h_prime: Vec<usize>,
    /// `w[k]` = the two outside elements `k`-charged to `C_{j*}`, equivalent
    /// to `a_{j*}` and `b_{j*}` respectively.
    pub w: BTreeMap<usize, (Element, Element)>,
    /// Pairwise nonconflicting subset of `h_prime`.
    pub h_double: Vec<usize>,
    pub conflict_edges: Vec<(usize, usize)>,
}

/// `ceil((c - 10) / 4)`, zero when `c <= 10`.
pub fn h_prime_target(c: u64) -> usize {
    c.saturating_sub(10).div_ceil(4) as usize
}

/// `floor(c / 16)`.
pub fn h_double_target(c: u64) -> usize {
    (c / 16) as usize
}

/// `ceil(sqrt(c))`.
pub fn popularity_threshold(c: u64) -> usize {
    let r = c.isqrt();
    (if r * r < c { r + 1 } else { r }) as usize
}

/// Right component charged four times by the most heavy indices (lowest
/// position on ties).
pub fn find_lucky(st: &TrackState, tables: &[Scheme3], c: u64) -> Result<LuckyData, StepError> {
    let n = st.n();
    let mut count = vec![0usize; n];
    for tb in tables {
        for &(q, _, _) in &tb.full {
            count[q] += 1;
        }
    }
    let j_star = (st.left_len + 1..n)
        .max_by_key(|&q| (count[q], std::cmp::Reverse(q)))
        .ok_or_else(|| logic("find_lucky", "no right components".into()))?;
    if 4 * count[j_star] as u64 + 10 < c {
        return Err(logic(
            "find_lucky",
            format!("lucky component {j_star} has only {} indices, c = {c}", count[j_star]),
        ));
    }
    let mut w = BTreeMap::new();
    let mut h_prime = Vec::new();
    for tb in tables {
        if let Some(&(_, x, y)) = tb.full.iter().find(|f| f.0 == j_star) {
            h_prime.push(tb.heavy);
            w.insert(tb.heavy, (x, y));
        }
    }
    h_prime.sort_unstable();
    h_prime.truncate(h_prime_target(c));
    w.retain(|k, _| h_prime.contains(k));
    for (&k, &(x, y)) in &w {
        if st.in_b_prime(x) || st.in_b_prime(y) {
            return Err(logic("find_lucky", format!("W_{k} meets the components")));
        }
    }
    Ok(LuckyData { j_star, h_prime, w, h_double: Vec::new(), conflict_edges: Vec::new() })
}

/// No way to split `C_{j*}` between `k1` and `k2` with distinct partners
/// from `W_{k1} ∪ W_{k2}`.
pub fn conflicting(prob: &Problem, st: &TrackState, lucky: &LuckyData, k1: usize, k2: usize) -> bool {
    let cj = st.comps[lucky.j_star];
    let (p, q) = (lucky.w[&k1], lucky.w[&k2]);
    let pool = [p.0, p.1, q.0, q.1];
    let i1 = &prob.idx[st.relation(k1)];
    let i2 = &prob.idx[st.relation(k2)];
    for (w, x) in [(cj.a, cj.b), (cj.b, cj.a)] {
        for &y in &pool {
            if !i1.equivalent(w, y) {
                continue;
            }
            if pool.iter().any(|&z| z != y && i2.equivalent(x, z)) {
                return false;
            }
        }
    }
    true
}

/// Builds the conflict graph on `H'`, 2-colors it, and keeps the larger side
/// of every connected component (the side of the lowest vertex on ties),
/// truncated to `floor(c / 16)` lowest indices.
pub fn select_nonconflicting(prob: &Problem, st: &TrackState, lucky: &mut LuckyData, c: u64) -> Result<(), StepError> {
    let hp = &lucky.h_prime;
    let m = hp.len();
    let mut adj = vec![Vec::new(); m];
    let cj = st.comps[lucky.j_star];
    let mut edges = Vec::new();
    for x in 0..m {
        for y in x + 1..m {
            let (k1, k2) = (hp[x], hp[y]);
            if !conflicting(prob, st, lucky, k1, k2) {
                continue;
            }
            // only the crossed pattern on a shared W can conflict
            let (w1, w2) = (lucky.w[&k1], lucky.w[&k2]);
            let i1 = &prob.idx[st.relation(k1)];
            let i2 = &prob.idx[st.relation(k2)];
            let crossed = w1 == (w2.1, w2.0)
                && i1.equivalent(cj.a, w1.0)
                && i1.equivalent(cj.b, w1.1)
                && i2.equivalent(cj.a, w2.0)
                && i2.equivalent(cj.b, w2.1);
            if !crossed {
                return Err(logic("select_nonconflicting", format!("conflict {k1}-{k2} without crossed pattern")));
            }
            adj[x].push(y);
            adj[y].push(x);
            edges.push((k1, k2));
        }
    }
    let mut color = vec![u8::MAX; m];
    let mut keep = Vec::new();
    for s in 0..m {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut sides = [vec![s], Vec::new()];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    sides[color[v] as usize].push(v);
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return Err(logic("select_nonconflicting", format!("odd cycle through {} and {}", hp[u], hp[v])));
                }
            }
        }
        let side = if sides[1].len() > sides[0].len() { 1 } else { 0 };
        keep.extend(sides[side].iter().map(|&v| hp[v]));
    }
    keep.sort_unstable();
    keep.truncate(h_double_target(c));
    lucky.h_double = keep;
    lucky.conflict_edges = edges;
    Ok(())
}

fn disjoint(a: &[Element], b: &[Element]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

/// Compatible pairs `(k1, k2)` in preference order: `k1` ascending among
/// indices whose `U` avoids popular elements, then `k2` ascending.
pub fn compatible_pairs(lg: &ChargeLedger, lucky: &LuckyData, c: u64) -> (Vec<(usize, usize)>, usize) {
    let thr = popularity_threshold(c).max(1);
    let mut freq: BTreeMap<Element, usize> = BTreeMap::new();
    for &k in &lucky.h_double {
        let (x, y) = lucky.w[&k];
        *freq.entry(x).or_default() += 1;
        if y != x {
            *freq.entry(y).or_default() += 1;
        }
    }
    let popular: Vec<Element> = freq.iter().filter(|e| *e.1 >= thr).map(|e| *e.0).collect();
    let mut out = Vec::new();
    for &k1 in &lucky.h_double {
        let u1 = lg.u(k1);
        if !disjoint(&u1, &popular) {
            continue;
        }
        let w1 = lucky.w[&k1];
        for &k2 in &lucky.h_double {
            if k2 == k1 {
                continue;
            }
            let w2 = lucky.w[&k2];
            if disjoint(&[w1.0, w1.1], &lg.u(k2)) && disjoint(&[w2.0, w2.1], &u1) {
                out.push((k1, k2));
            }
        }
    }
    (out, popular.len())
}

pub fn find_compatible_pair(lg: &ChargeLedger, lucky: &LuckyData, c: u64) -> Result<(usize, usize), StepError> {
    compatible_pairs(lg, lucky, c)
        .0
        .first()
        .copied()
        .ok_or_else(|| c_dependent(c, "find_compatible_pair", format!("|H''| = {}", lucky.h_double.len())))
}

/// `C_right ∪ W ∪ ⋃ U_k` over `k` in `H''`, as a membership mask.
pub fn exclusion_set(st: &TrackState, lg: &ChargeLedger, lucky: &LuckyData, ground: usize) -> (Vec<bool>, usize) {
    let mut y = vec![false; ground];
    for p in st.left_len + 1..st.n() {
        y[st.comps[p].a as usize] = true;
        y[st.comps[p].b as usize] = true;
    }
    for &k in &lucky.h_double {
        let (a, b) = lucky.w[&k];
        y[a as usize] = true;
        y[b as usize] = true;
        for e in lg.u(k) {
            y[e as usize] = true;
        }
    }
    let size = y.iter().filter(|&&b| b).count();
    (y, size)
}

/// Lowest pair of `j*`-equivalent elements outside `Y`.
pub fn free_pair(prob: &Problem, st: &TrackState, lucky: &LuckyData, y: &[bool]) -> Option<(Element, Element)> {
    let mut best: Option<(Element, Element)> = None;
    for class in prob.rels[st.relation(lucky.j_star)].classes() {
        let mut free = class.iter().copied().filter(|&e| !y[e as usize]);
        if let (Some(a), Some(b)) = (free.next(), free.next()) {
            if best.is_none_or(|p| (a, b) < p) {
                best = Some((a, b));
            }
        }
    }
    best
}

/// Completes the matching from a free pair `(x, y)` of the lucky relation.
pub fn final_win(
    prob: &Problem,
    st: &TrackState,
    lg: &ChargeLedger,
    lucky: &LuckyData,
    (x, y): (Element, Element),
    c: u64,
    log: &mut StepLog,
) -> Result<(Vec<(Element, Element)>, FinalCase), StepError> {
    let js = lucky.j_star;
    let cj = st.comps[js];
    let tpos = st.last_left();
    let (ox, oy) = (st.owner(x).filter(|&p| st.is_left(p)), st.owner(y).filter(|&p| st.is_left(p)));
    let case = match (ox, oy) {
        (Some(i), Some(j)) if i == j => FinalCase::SameLeft,
        (Some(_), Some(_)) => FinalCase::DifferentLeft,
        _ => FinalCase::Outside,
    };
    let mut tries = 0u32;
    if case == FinalCase::DifferentLeft {
        let (i, j) = (ox.expect("left"), oy.expect("left"));
        let opposite = |e: Element, p: usize| {
            if st.role(e).expect("owned").is_top() {
                st.comps[p].d()
            } else {
                st.comps[p].c()
            }
        };
        let (bi, bj) = (opposite(x, i), opposite(y, j));
        let mut any_k = false;
        for &k in &lucky.h_double {
            if lg.t[k].contains(&bi) || lg.t[k].contains(&bj) {
                continue;
            }
            any_k = true;
            let ik = &prob.idx[st.relation(k)];
            let it = &prob.idx[st.relation(tpos)];
            let (wa, wb) = lucky.w[&k];
            for (w, we) in [(cj.a, wa), (cj.b, wb)] {
                if !ik.equivalent(w, we) {
                    continue;
                }
                for &e in &lg.t[k] {
                    for v2 in [st.comps[k].a, st.comps[k].b] {
                        if !it.equivalent(v2, e) {
                            continue;
                        }
                        tries += 1;
                        let ov = Overrides::from([(js, (x, y)), (k, (w, we)), (tpos, (v2, e))]);
                        if let Ok(m) = complete_assignment(prob, st, &ov) {
                            log.recipe_retries += tries - 1;
                            return Ok((m, case));
                        }
                    }
                }
            }
        }
        if !any_k {
            return Err(c_dependent(c, "final_win", format!("no index of H'' avoids {bi} and {bj}")));
        }
        return Err(logic("final_win", format!("different-left case does not complete for ({x},{y})")));
    }
    let (pairs, _) = compatible_pairs(lg, lucky, c);
    if pairs.is_empty() {
        return Err(c_dependent(c, "find_compatible_pair", format!("|H''| = {}", lucky.h_double.len())));
    }
    for &(k1, k2) in &pairs {
        let ik1 = &prob.idx[st.relation(k1)];
        let ik2 = &prob.idx[st.relation(k2)];
        let (p, q) = (lucky.w[&k1], lucky.w[&k2]);
        let pool = [p.0, p.1, q.0, q.1];
        let mut splits = Vec::new();
        for (w, xx) in [(cj.a, cj.b), (cj.b, cj.a)] {
            for &yy in &pool {
                if !ik1.equivalent(w, yy) {
                    continue;
                }
                for &zz in &pool {
                    if zz != yy && ik2.equivalent(xx, zz) {
                        splits.push(((w, yy), (xx, zz)));
                    }
                }
            }
        }
        // the preferred pick first, then every other candidate
        let mut cands = heavy_pair_candidates(prob, st, lg, k1, k2, None);
        if let Some(&(_, w1, _, w2)) = cands.first() {
            let unlucky = (1..=st.left_len).any(|j| {
                let cc = st.comps[j];
                (w1, w2) == (cc.c(), cc.d()) || (w1, w2) == (cc.d(), cc.c())
            });
            if unlucky {
                let mut f = heavy_pair_candidates(prob, st, lg, k1, k2, Some((w1, w2)));
                f.extend(cands);
                cands = f;
            }
        }
        for &(v1, w1, v2, w2) in &cands {
            for &(s1, s2) in &splits {
                tries += 1;
                let ov = Overrides::from([(js, (x, y)), (k1, s1), (k2, s2), (0, (v1, w1)), (tpos, (v2, w2))]);
                if let Ok(m) = complete_assignment(prob, st, &ov) {
                    log.recipe_retries += tries - 1;
                    return Ok((m, case));
                }
            }
        }
    }
    Err(logic("final_win", format!("{case:?} case does not complete for ({x},{y}); {}", st.digest())))
}
