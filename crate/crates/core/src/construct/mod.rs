//! Constructive extension of a rainbow matching by one relation.
//!
//! Given a rainbow matching of all relations but one (the *new* relation),
//! and kernels of size at least `ceil(16n/5) + c`, the pipeline
//!
//! 1. looks for a pair of the new relation outside the matched elements;
//! 2. builds a track of `floor(n/5) - 1` left components, each found as a
//!    right component receiving four charges;
//! 3. charges the new relation and the last track relation to components and
//!    finds heavy components (at least 7 charges);
//! 4. wins directly from five heavy left components, or charges each heavy
//!    right relation once more;
//! 5. picks a lucky right component, a nonconflicting and compatible pair of
//!    heavy indices, and substitutes a free pair of the lucky relation.
//!
//! Every win is completed by [`complete::complete_assignment`]. Steps whose
//! success depends on `c` being large (at least [`PROOF_CONSTANT`]) defer to
//! the exact solver when `c` is smaller; any other failed step is reported as
//! [`ConstructError::InternalLogic`].

pub mod charge;
pub mod complete;
pub mod heavy;
pub mod lucky;
pub mod telemetry;
pub mod track;

use crate::error::ConstructError;
use crate::oracle::exact::{exact_solve_relations, ExactOutcome};
use crate::relations::{verify_pairs, Element, Instance, Matching, Partition, PartitionIndex};

use charge::{charge_scheme_2, charge_scheme_3, heavy_indices, record_hist, right_heavy, Scheme3Outcome};
use heavy::try_five_heavy_left_win;
use lucky::{exclusion_set, final_win, find_lucky, free_pair, select_nonconflicting};
use telemetry::{Branch, Phase, StepLog};
use track::{build_track, try_direct_pair, TrackState};

/// The constant for which every counting step is guaranteed.
pub const PROOF_CONSTANT: u64 = 5000;

/// Smallest `n` handled by the pipeline; smaller instances go to the exact solver.
pub const DEFAULT_N_MIN: usize = 30;

/// Relations of one extension step over a shared ground set.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub ground: usize,
    pub rels: &'a [Partition],
    pub idx: &'a [PartitionIndex],
}

/// Failure of a single pipeline step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    Logic(ConstructError),
    /// A step that needs a larger constant than the instance provides.
    Stuck {
        step: &'static str,
        detail: String,
    },
}

pub(crate) fn c_dependent(c: u64, step: &'static str, detail: String) -> StepError {
    if c >= PROOF_CONSTANT {
        StepError::Logic(ConstructError::InternalLogic { step, detail })
    } else {
        StepError::Stuck { step, detail }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructOptions {
    pub c: u64,
    pub n_min: usize,
    /// Node budget for every exact-solver call.
    pub exact_budget: u64,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { c: PROOF_CONSTANT, n_min: DEFAULT_N_MIN, exact_budget: 50_000_000 }
    }
}

/// `ceil(16n / 5)`.
pub fn base_bound(n: usize) -> usize {
    (16 * n).div_ceil(5)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub matching: Matching,
    pub log: StepLog,
}

/// Extends `sub`, a rainbow matching of every relation except `new_rel`
/// (in ascending relation order), to all relations.
pub fn extend_matching(
    inst: &Instance,
    sub: &Matching,
    new_rel: usize,
    opts: &ConstructOptions,
) -> Result<Extension, ConstructError> {
    let n = inst.len();
    if new_rel >= n {
        return Err(ConstructError::InvalidSubMatching(format!("new relation {} out of range", new_rel + 1)));
    }
    if sub.len() + 1 != n {
        return Err(ConstructError::InvalidSubMatching(format!("expected {} pairs, found {}", n - 1, sub.len())));
    }
    let others: Vec<usize> = (0..n).filter(|&r| r != new_rel).collect();
    let rest = inst.select(&others);
    let report = crate::relations::verify_matching(&rest, sub);
    if let Some(v) = report.violation {
        // report relation numbers of the full instance
        return Err(ConstructError::InvalidSubMatching(remap_violation(&v, &others)));
    }
    let mut pairs = vec![(0, 0); n];
    for (k, &r) in others.iter().enumerate() {
        pairs[r] = sub.pairs[k];
    }
    if n < opts.n_min {
        return exact_extension(inst.ground_size(), inst.relations(), opts, "below n_min", 0);
    }
    let min_kernel = inst.min_kernel().map_err(|_| ConstructError::NoMatching)?;
    let required = base_bound(n) + opts.c as usize;
    if min_kernel < required {
        return Err(ConstructError::HypothesisViolation { min_kernel, required });
    }
    let idx = inst.indices();
    let prob = Problem { ground: inst.ground_size(), rels: inst.relations(), idx: &idx };
    let c_eff = (min_kernel - base_bound(n)) as u64;
    run_step(&prob, new_rel, &pairs, c_eff, opts)
}

fn remap_violation(v: &crate::relations::Violation, others: &[usize]) -> String {
    use crate::relations::Violation::*;
    match *v {
        Repeated { element, first, second } => Repeated { element, first: others[first], second: others[second] },
        NotEquivalent { relation, a, b } => NotEquivalent { relation: others[relation], a, b },
        OutOfRange { relation, element } => OutOfRange { relation: others[relation], element },
        ref w => w.clone(),
    }
    .to_string()
}

fn exact_extension(
    ground: usize,
    rels: &[Partition],
    opts: &ConstructOptions,
    reason: &'static str,
    c_eff: u64,
) -> Result<Extension, ConstructError> {
    let r = exact_solve_relations(ground, rels, opts.exact_budget);
    let mut log = StepLog::new(rels.len(), c_eff);
    log.phase_reached = Phase::Exact;
    log.branch = Branch::Exact { reason };
    log.exact_nodes = r.nodes;
    match r.outcome {
        ExactOutcome::Matched(m) => Ok(Extension { matching: m, log }),
        ExactOutcome::ProvenNone => Err(ConstructError::NoMatching),
        ExactOutcome::BudgetExhausted => Err(ConstructError::FallbackExhausted { nodes: r.nodes }),
    }
}

/// One extension on a prepared problem; falls back to the exact solver when
/// a step is stuck for lack of a large constant.
fn run_step(
    prob: &Problem,
    new_rel: usize,
    pairs: &[(Element, Element)],
    c_eff: u64,
    opts: &ConstructOptions,
) -> Result<Extension, ConstructError> {
    let mut log = StepLog::new(prob.rels.len(), c_eff);
    match pipeline(prob, new_rel, pairs, c_eff, &mut log) {
        Ok(m) => Ok(Extension { matching: m, log }),
        Err(StepError::Logic(e)) => Err(e),
        Err(StepError::Stuck { step, .. }) => {
            let mut ext = exact_extension(prob.ground, prob.rels, opts, step, c_eff)?;
            let nodes = ext.log.exact_nodes;
            log.branch = Branch::Exact { reason: step };
            log.exact_nodes = nodes;
            ext.log = log;
            Ok(ext)
        }
    }
}

/// The full pipeline; returns the matching in relation order.
pub fn pipeline(
    prob: &Problem,
    new_rel: usize,
    pairs: &[(Element, Element)],
    c: u64,
    log: &mut StepLog,
) -> Result<Matching, StepError> {
    let mut st = TrackState::new(prob.ground, new_rel, pairs);
    let by_pos = run_phases(prob, &mut st, c, log)?;
    let mut out = vec![(0, 0); by_pos.len()];
    for (p, pair) in by_pos.into_iter().enumerate() {
        out[st.relation(p)] = pair;
    }
    let m = Matching::new(out);
    if let Some(v) = verify_pairs(prob.ground, prob.rels, &m).violation {
        return Err(StepError::Logic(ConstructError::logic(
            "extend_matching",
            format!("branch {:?} produced an invalid matching: {v}", log.branch),
        )));
    }
    Ok(m)
}

fn run_phases(
    prob: &Problem,
    st: &mut TrackState,
    c: u64,
    log: &mut StepLog,
) -> Result<Vec<(Element, Element)>, StepError> {
    if let Some(pair) = try_direct_pair(prob, st) {
        log.branch = Branch::DirectPair;
        return track::complete(prob, st, complete::Overrides::from([(0, pair)]), "direct-pair");
    }
    if let Some(m) = build_track(prob, st, log)? {
        return Ok(m);
    }
    log.phase_reached = Phase::Scheme2;
    let lg = charge_scheme_2(prob, st)?;
    record_hist(&lg, log);
    let heavy = heavy_indices(st, &lg, c)?;
    log.heavy_total = heavy.len();
    log.heavy_left = heavy.iter().filter(|&&p| st.is_left(p)).count();
    log.phase_reached = Phase::FiveHeavy;
    if let Some((m, case)) = try_five_heavy_left_win(prob, st, &lg, log)? {
        log.branch = Branch::FiveHeavy { case };
        return Ok(m);
    }
    let h = right_heavy(st, &lg, &heavy, c)?;
    log.heavy_right = h.len();
    let mut tables = Vec::with_capacity(h.len());
    for &i in &h {
        match charge_scheme_3(prob, st, &lg, i, log)? {
            Scheme3Outcome::Win(m, branch) => {
                log.branch = branch;
                return Ok(m);
            }
            Scheme3Outcome::Charged(tb) => tables.push(tb),
        }
    }
    log.phase_reached = Phase::Lucky;
    let mut lucky = find_lucky(st, &tables, c)?;
    log.lucky = Some(lucky.j_star);
    log.h_prime = lucky.h_prime.len();
    select_nonconflicting(prob, st, &mut lucky, c)?;
    log.h_double = lucky.h_double.len();
    log.conflict_edges = lucky.conflict_edges.len();
    log.popular = lucky::compatible_pairs(&lg, &lucky, c).1;
    let (ymask, ysize) = exclusion_set(st, &lg, &lucky, prob.ground);
    log.y_size = ysize;
    // |Y| <= 2(n - t) + c/8 + c/4
    if 8 * ysize as u64 > 16 * (st.n() - st.t) as u64 + 3 * c {
        return Err(StepError::Logic(ConstructError::logic("final_win", format!("|Y| = {ysize} exceeds its bound"))));
    }
    log.phase_reached = Phase::Final;
    let pair = free_pair(prob, st, &lucky, &ymask)
        .ok_or_else(|| c_dependent(c, "final_win", format!("no free pair outside Y (|Y| = {ysize})")))?;
    let (m, case) = final_win(prob, st, &lg, &lucky, pair, c, log)?;
    log.branch = Branch::Final { case };
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub matching: Matching,
    /// One entry per extension step, new relations in descending index order;
    /// a single exact entry when the whole instance went to the exact solver.
    pub steps: Vec<StepLog>,
}

impl SolveReport {
    /// Deepest phase reached by any step.
    pub fn phase_reached(&self) -> Phase {
        self.steps.iter().map(|s| s.phase_reached).max().unwrap_or(Phase::Exact)
    }
}

/// Finds a rainbow matching of the whole instance by induction: the last
/// `n_min - 1` relations are solved exactly, then relations are added one at
/// a time from the back, each by [`extend_matching`]'s pipeline. Instances
/// below the kernel bound, or with fewer than `n_min` relations, go to the
/// exact solver.
pub fn solve(inst: &Instance, opts: &ConstructOptions) -> Result<SolveReport, ConstructError> {
    let n = inst.len();
    if n == 0 {
        return Ok(SolveReport { matching: Matching::new(vec![]), steps: vec![] });
    }
    let min_kernel = inst.min_kernel().map_err(|_| ConstructError::NoMatching)?;
    if n < opts.n_min || min_kernel < base_bound(n) + opts.c as usize {
        let reason = if n < opts.n_min { "below n_min" } else { "below kernel bound" };
        let ext = exact_extension(inst.ground_size(), inst.relations(), opts, reason, 0)?;
        return Ok(SolveReport { matching: ext.matching, steps: vec![ext.log] });
    }
    let rels = inst.relations();
    let idx = inst.indices();
    let ground = inst.ground_size();
    let base = n + 1 - opts.n_min.max(1);
    let mut suffix_min = vec![usize::MAX; n + 1];
    for k in (0..n).rev() {
        suffix_min[k] = suffix_min[k + 1].min(rels[k].kernel_size());
    }
    let first = exact_extension(ground, &rels[base..], opts, "induction base", 0)?;
    let mut pairs: Vec<(Element, Element)> = first.matching.pairs;
    let mut steps = vec![first.log];
    // pairs[k] belongs to relation base + k; extend to the front
    pairs.reverse();
    for k in (0..base).rev() {
        let m = n - k;
        let prob = Problem { ground, rels: &rels[k..], idx: &idx[k..] };
        let c_eff = (suffix_min[k] - base_bound(m)) as u64;
        let mut local = Vec::with_capacity(m);
        local.push((0, 0));
        local.extend(pairs.iter().rev().copied());
        let ext = run_step(&prob, 0, &local, c_eff, opts)?;
        pairs = ext.matching.pairs.into_iter().rev().collect();
        steps.push(ext.log);
    }
    pairs.reverse();
    let matching = Matching::new(pairs);
    if let Some(v) = crate::relations::verify_matching(inst, &matching).violation {
        return Err(ConstructError::logic("solve", format!("assembled matching invalid: {v}")));
    }
    Ok(SolveReport { matching, steps })
}
