//! Charging of the new relation and the last track relation to components
//! (Scheme 2), heavy components, and per-heavy-index charging (Scheme 3)
//! with its two early wins.

use crate::construct::complete::complete_assignment;
use crate::construct::complete::Overrides;
use crate::construct::telemetry::{Branch, Phase, StepLog};
use crate::construct::track::TrackState;
use crate::construct::{Problem, StepError};
use crate::error::ConstructError;
use crate::relations::Element;

/// Scheme 2 charges per position (index 0 unused).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChargeLedger {
    pub sigma: Vec<u8>,
    pub tau: Vec<u8>,
    /// Elements other than `a_i, b_i` 1-charged to component `i`, sorted.
    pub s: Vec<Vec<Element>>,
    /// Same for t-charges.
    pub t: Vec<Vec<Element>>,
}

impl ChargeLedger {
    pub fn u(&self, p: usize) -> Vec<Element> {
        let mut u = self.s[p].clone();
        u.extend(&self.t[p]);
        u.sort_unstable();
        u.dedup();
        u
    }

    pub fn charges(&self, p: usize) -> u8 {
        self.sigma[p] + self.tau[p]
    }

    pub fn is_heavy(&self, p: usize) -> bool {
        self.charges(p) >= 7
    }
}

fn logic(step: &'static str, detail: String) -> StepError {
    StepError::Logic(ConstructError::logic(step, detail))
}

/// Charges every element of the new relation's kernel (1-charges) and of the
/// last track relation's kernel (t-charges). Validates the ledger invariants.
pub fn charge_scheme_2(prob: &Problem, st: &TrackState) -> Result<ChargeLedger, StepError> {
    let n = st.n();
    let tpos = st.last_left();
    let mut lg = ChargeLedger { sigma: vec![0; n], tau: vec![0; n], s: vec![Vec::new(); n], t: vec![Vec::new(); n] };
    let rel0 = st.relation(0);
    for class in prob.rels[rel0].classes() {
        for &x in class {
            let q = if st.in_b(x) {
                st.owner(x).expect("owned")
            } else {
                let q = class
                    .iter()
                    .filter(|&&y| st.in_b(y))
                    .map(|&y| st.owner(y).expect("owned"))
                    .min()
                    .ok_or_else(|| logic("charge_scheme_2", format!("element {x} has no classmate in B")))?;
                lg.s[q].push(x);
                q
            };
            lg.sigma[q] += 1;
        }
    }
    let relt = st.relation(tpos);
    let idx_t = &prob.idx[relt];
    for class in prob.rels[relt].classes() {
        for &x in class {
            let q = if st.in_b(x) {
                st.owner(x).expect("owned")
            } else {
                let own = st.owner(x).filter(|&p| st.is_left(p));
                let q = match own {
                    Some(j) if idx_t.equivalent(st.comps[j].c(), st.comps[j].d()) => j,
                    _ => {
                        let right =
                            class.iter().filter(|&&y| st.in_right(y)).map(|&y| st.owner(y).expect("owned")).min();
                        let own_mate =
                            own.filter(|&j| st.comps[j].elements().iter().any(|&y| y != x && idx_t.equivalent(x, y)));
                        match (own_mate, right) {
                            (Some(j), Some(r)) => j.min(r),
                            (Some(j), None) => j,
                            (None, Some(r)) => r,
                            (None, None) => {
                                return Err(logic(
                                    "charge_scheme_2",
                                    format!("element {x} has no t-charge target; {}", st.digest()),
                                ))
                            }
                        }
                    }
                };
                lg.t[q].push(x);
                q
            };
            lg.tau[q] += 1;
        }
    }
    for v in lg.s.iter_mut().chain(lg.t.iter_mut()) {
        v.sort_unstable();
    }
    check_ledger(prob, st, &lg)?;
    Ok(lg)
}

/// Caps, set sizes, disjointness and charge conservation.
pub fn check_ledger(prob: &Problem, st: &TrackState, lg: &ChargeLedger) -> Result<(), StepError> {
    let n = st.n();
    let k0 = prob.rels[st.relation(0)].kernel_size();
    let kt = prob.rels[st.relation(st.last_left())].kernel_size();
    let ssum: usize = lg.sigma.iter().map(|&x| x as usize).sum();
    let tsum: usize = lg.tau.iter().map(|&x| x as usize).sum();
    if ssum != k0 || tsum != kt {
        return Err(logic("charge_scheme_2", format!("charge totals {ssum}/{tsum} vs kernels {k0}/{kt}")));
    }
    for p in 1..n {
        if lg.sigma[p] > 4 || lg.tau[p] > 4 || lg.s[p].len() > 2 || lg.t[p].len() > 2 {
            return Err(logic(
                "charge_scheme_2",
                format!(
                    "component {p}: sigma {} tau {} |S| {} |T| {}",
                    lg.sigma[p],
                    lg.tau[p],
                    lg.s[p].len(),
                    lg.t[p].len()
                ),
            ));
        }
    }
    for sets in [&lg.s, &lg.t] {
        let mut all: Vec<Element> = sets.iter().flatten().copied().collect();
        let len = all.len();
        all.sort_unstable();
        all.dedup();
        if all.len() != len {
            return Err(logic("charge_scheme_2", "charged sets overlap".into()));
        }
    }
    Ok(())
}

/// All positions with at least 7 combined charges, checked against the
/// count the kernel bound forces: `5 * |heavy| >= n + 5c`.
pub fn heavy_indices(st: &TrackState, lg: &ChargeLedger, c: u64) -> Result<Vec<usize>, StepError> {
    let heavy: Vec<usize> = (1..st.n()).filter(|&p| lg.is_heavy(p)).collect();
    if 5 * (heavy.len() as u64) < st.n() as u64 + 5 * c {
        return Err(logic("heavy_indices", format!("{} heavy components, n = {}, c = {c}", heavy.len(), st.n())));
    }
    Ok(heavy)
}

/// Right-side heavy set `H` with its per-index checks.
pub fn right_heavy(st: &TrackState, lg: &ChargeLedger, heavy: &[usize], c: u64) -> Result<Vec<usize>, StepError> {
    let h: Vec<usize> = heavy.iter().copied().filter(|&p| st.is_right_pos(p)).collect();
    if 5 * (h.len() as u64) + 20 < st.n() as u64 + 5 * c {
        return Err(logic("heavy_indices", format!("{} right heavy components, c = {c}", h.len())));
    }
    for &i in &h {
        let (s, t, u) = (lg.s[i].len(), lg.t[i].len(), lg.u(i).len());
        if s < 1 || t < 1 || s.max(t) != 2 || !(2..=4).contains(&u) {
            return Err(logic("heavy_indices", format!("heavy {i}: |S| {s} |T| {t} |U| {u}")));
        }
    }
    Ok(h)
}

/// Scheme 3 outcome for one heavy index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme3 {
    pub heavy: usize,
    /// Charges per position.
    pub counts: Vec<u8>,
    pub uncharged: usize,
    /// Right components `q != heavy` with four charges, with the outside
    /// elements equivalent to `a_q` and `b_q`.
    pub full: Vec<(usize, Element, Element)>,
}

/// Either a completed matching (positions) from an early win, or the charge table.
pub enum Scheme3Outcome {
    Win(Vec<(Element, Element)>, Branch),
    Charged(Scheme3),
}

/// Runs the two early-win checks for heavy index `i`, then charges
/// `K_i \ U_i`.
pub fn charge_scheme_3(
    prob: &Problem,
    st: &TrackState,
    lg: &ChargeLedger,
    i: usize,
    log: &mut StepLog,
) -> Result<Scheme3Outcome, StepError> {
    log.phase_reached = log.phase_reached.max(Phase::Scheme3);
    let n = st.n();
    let rel = st.relation(i);
    let idx = &prob.idx[rel];
    let s_i = &lg.s[i];
    let t_i = &lg.t[i];
    let u_i = lg.u(i);
    let tainted: Vec<usize> = t_i.iter().filter_map(|&e| st.owner(e).filter(|&p| st.is_left(p))).collect();
    let ci = st.comps[i];
    let idx0 = &prob.idx[st.relation(0)];
    let idxt = &prob.idx[st.relation(st.last_left())];

    // (a) two classmates outside B and S_i
    for class in prob.rels[rel].classes() {
        let mut out = class.iter().copied().filter(|&x| !st.in_b(x) && !s_i.contains(&x));
        if let (Some(x), Some(y)) = (out.next(), out.next()) {
            for &u in s_i {
                for v in [ci.a, ci.b] {
                    if !idx0.equivalent(u, v) {
                        continue;
                    }
                    let ov = Overrides::from([(i, (x, y)), (0, (v, u))]);
                    if let Ok(m) = complete_assignment(prob, st, &ov) {
                        return Ok(Scheme3Outcome::Win(m, Branch::OutsidePair { heavy: i }));
                    }
                    log.recipe_retries += 1;
                }
            }
            return Err(logic("outside_pair", format!("heavy {i}: pair ({x},{y}) does not complete; {}", st.digest())));
        }
    }
    // (b) a non-tainted left component with an outside classmate
    for j in 1..=st.left_len {
        if tainted.contains(&j) {
            continue;
        }
        for v in [st.comps[j].a, st.comps[j].b] {
            let class = match idx.class(v) {
                crate::relations::SINGLETON => continue,
                c => &prob.rels[rel].classes()[c as usize],
            };
            let Some(z) = class.iter().copied().find(|&z| z != v && !st.in_b_prime(z) && !t_i.contains(&z)) else {
                continue;
            };
            for &e in t_i {
                for w in [ci.a, ci.b] {
                    if !idxt.equivalent(w, e) {
                        continue;
                    }
                    let ov = Overrides::from([(i, (v, z)), (st.last_left(), (w, e))]);
                    if let Ok(m) = complete_assignment(prob, st, &ov) {
                        return Ok(Scheme3Outcome::Win(m, Branch::OutsideIdentity { heavy: i }));
                    }
                    log.recipe_retries += 1;
                }
            }
            return Err(logic("outside_identity", format!("heavy {i}, left {j}: ({v},{z}) does not complete")));
        }
    }

    let mut counts = vec![0u8; n];
    let mut wa = vec![u32::MAX; n];
    let mut wb = vec![u32::MAX; n];
    let mut uncharged = 0usize;
    for class in prob.rels[rel].classes() {
        for &x in class {
            if u_i.contains(&x) {
                continue;
            }
            if let Some(p) = st.owner(x) {
                counts[p] += 1;
                continue;
            }
            let blocked = class.iter().any(|&y| {
                s_i.contains(&y) || (st.in_b(y) && st.owner(y).is_some_and(|p| st.is_left(p) && tainted.contains(&p)))
            });
            if blocked {
                uncharged += 1;
                continue;
            }
            let q = class
                .iter()
                .filter(|&&y| st.in_right(y))
                .map(|&y| st.owner(y).expect("owned"))
                .min()
                .ok_or_else(|| logic("charge_scheme_3", format!("heavy {i}: element {x} has no charge target")))?;
            counts[q] += 1;
            if idx.equivalent(x, st.comps[q].a) {
                wa[q] = x;
            } else {
                wb[q] = x;
            }
        }
    }
    if uncharged > 6 {
        return Err(logic("charge_scheme_3", format!("heavy {i}: {uncharged} uncharged elements")));
    }
    if let Some(q) = (1..n).find(|&q| counts[q] > 4) {
        return Err(logic("charge_scheme_3", format!("heavy {i}: component {q} has {} charges", counts[q])));
    }
    let mut full = Vec::new();
    for q in st.left_len + 1..n {
        if q == i || counts[q] != 4 {
            continue;
        }
        if wa[q] == u32::MAX || wb[q] == u32::MAX {
            return Err(logic("charge_scheme_3", format!("heavy {i}: full component {q} lacks outside charges")));
        }
        full.push((q, wa[q], wb[q]));
    }
    log.max_uncharged = log.max_uncharged.max(uncharged);
    log.scheme3_runs += 1;
    Ok(Scheme3Outcome::Charged(Scheme3 { heavy: i, counts, uncharged, full }))
}

pub(crate) fn record_hist(lg: &ChargeLedger, log: &mut StepLog) {
    for p in 1..lg.sigma.len() {
        log.sigma_hist[lg.sigma[p] as usize] += 1;
        log.tau_hist[lg.tau[p] as usize] += 1;
    }
}
