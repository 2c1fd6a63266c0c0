//! Components, the track of left components, and the first two win checks.

use crate::construct::complete::{complete_assignment, Overrides};
use crate::construct::telemetry::{Branch, Phase, StepLog};
use crate::construct::{Problem, StepError};
use crate::error::ConstructError;
use crate::relations::Element;

const NONE: u32 = u32::MAX;

/// Identity pair `(a, b)` of one relation, plus the cross pair `(c, d)` once
/// the component is on the left side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub a: Element,
    pub b: Element,
    pub cross: Option<(Element, Element)>,
}

impl Component {
    pub fn elements(&self) -> Vec<Element> {
        match self.cross {
            Some((c, d)) => vec![self.a, self.b, c, d],
            None => vec![self.a, self.b],
        }
    }

    pub fn c(&self) -> Element {
        self.cross.expect("left component").0
    }

    pub fn d(&self) -> Element {
        self.cross.expect("left component").1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    A,
    B,
    C,
    D,
}

impl Role {
    /// `a` and `c` form the top half of a left component, `b` and `d` the bottom.
    pub fn is_top(self) -> bool {
        matches!(self, Role::A | Role::C)
    }
}

/// Positions: 0 is the new relation; position `p >= 1` holds the relation
/// whose identity pair forms component `p`. Positions `1..=left_len` are
/// left components.
#[derive(Clone, Debug)]
pub struct TrackState {
    /// Position to relation index in the problem.
    pub perm: Vec<usize>,
    /// `comps[p]` for `p >= 1`; `comps[0]` is a placeholder.
    pub comps: Vec<Component>,
    pub left_len: usize,
    /// Track parameter `floor(n / 5)`; the last left position is `t - 1`.
    pub t: usize,
    owner: Vec<u32>,
    role: Vec<u8>,
}

impl TrackState {
    /// `pairs[r]` is the matched pair of relation `r`; the entry of `new_rel`
    /// is ignored. Other relations take positions in ascending order.
    pub fn new(ground: usize, new_rel: usize, pairs: &[(Element, Element)]) -> Self {
        let n = pairs.len();
        let mut perm = vec![new_rel];
        perm.extend((0..n).filter(|&r| r != new_rel));
        let mut comps = vec![Component { a: 0, b: 0, cross: None }];
        comps.extend(perm[1..].iter().map(|&r| Component { a: pairs[r].0, b: pairs[r].1, cross: None }));
        let mut owner = vec![NONE; ground];
        let mut role = vec![0u8; ground];
        for (p, comp) in comps.iter().enumerate().skip(1) {
            owner[comp.a as usize] = p as u32;
            role[comp.a as usize] = 0;
            owner[comp.b as usize] = p as u32;
            role[comp.b as usize] = 1;
        }
        TrackState { perm, comps, left_len: 0, t: n / 5, owner, role }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Position of the last left component, i.e. of the track's final relation.
    pub fn last_left(&self) -> usize {
        self.t - 1
    }

    pub fn owner(&self, x: Element) -> Option<usize> {
        let o = self.owner[x as usize];
        (o != NONE).then_some(o as usize)
    }

    pub fn role(&self, x: Element) -> Option<Role> {
        self.owner(x).map(|_| match self.role[x as usize] {
            0 => Role::A,
            1 => Role::B,
            2 => Role::C,
            _ => Role::D,
        })
    }

    /// Member of some identity pair.
    pub fn in_b(&self, x: Element) -> bool {
        matches!(self.role(x), Some(Role::A | Role::B))
    }

    /// Member of some component.
    pub fn in_b_prime(&self, x: Element) -> bool {
        self.owner(x).is_some()
    }

    pub fn is_left(&self, p: usize) -> bool {
        p >= 1 && p <= self.left_len
    }

    pub fn is_right_pos(&self, p: usize) -> bool {
        p > self.left_len
    }

    /// Element of a right component.
    pub fn in_right(&self, x: Element) -> bool {
        self.owner(x).is_some_and(|p| p > self.left_len)
    }

    pub fn in_left(&self, x: Element) -> bool {
        self.owner(x).is_some_and(|p| self.is_left(p))
    }

    /// One element in the top half, the other in the bottom half, of the same
    /// left component.
    pub fn exception(&self, x: Element, y: Element) -> bool {
        match (self.owner(x), self.owner(y)) {
            (Some(p), Some(q)) if p == q && self.is_left(p) => {
                self.role(x).expect("owned").is_top() != self.role(y).expect("owned").is_top()
            }
            _ => false,
        }
    }

    pub fn relation(&self, p: usize) -> usize {
        self.perm[p]
    }

    /// Moves the component at position `q` to position `p` and vice versa.
    pub(crate) fn swap_positions(&mut self, p: usize, q: usize) {
        if p == q {
            return;
        }
        self.perm.swap(p, q);
        self.comps.swap(p, q);
        for pos in [p, q] {
            for x in self.comps[pos].elements() {
                self.owner[x as usize] = pos as u32;
            }
        }
    }

    pub(crate) fn make_left(&mut self, p: usize, c: Element, d: Element) {
        debug_assert_eq!(p, self.left_len + 1);
        self.comps[p].cross = Some((c, d));
        self.owner[c as usize] = p as u32;
        self.role[c as usize] = 2;
        self.owner[d as usize] = p as u32;
        self.role[d as usize] = 3;
        self.left_len = p;
    }

    /// Sorted element lists of all components, positions `1..`.
    pub fn digest(&self) -> String {
        format!("n={} t={} left={} perm[..8]={:?}", self.n(), self.t, self.left_len, &self.perm[..self.n().min(8)])
    }
}

/// Lowest pair `x < y` of `new_rel`-equivalent elements outside every
/// identity pair.
pub fn try_direct_pair(prob: &Problem, st: &TrackState) -> Option<(Element, Element)> {
    let mut best: Option<(Element, Element)> = None;
    for class in prob.rels[st.relation(0)].classes() {
        let mut free = class.iter().copied().filter(|&x| !st.in_b(x));
        if let (Some(x), Some(y)) = (free.next(), free.next()) {
            if best.is_none_or(|b| (x, y) < b) {
                best = Some((x, y));
            }
        }
    }
    best
}

/// Lowest pair of equivalent elements under the relation at position `pos`,
/// both outside the right components and not split across the two halves of
/// one left component.
pub fn track_win_pair(prob: &Problem, st: &TrackState, pos: usize) -> Option<(Element, Element)> {
    let mut best: Option<(Element, Element)> = None;
    for class in prob.rels[st.relation(pos)].classes() {
        let free: Vec<Element> = class.iter().copied().filter(|&x| !st.in_right(x)).collect();
        'outer: for i in 0..free.len() {
            for &y in &free[i + 1..] {
                if !st.exception(free[i], y) {
                    if best.is_none_or(|b| (free[i], y) < b) {
                        best = Some((free[i], y));
                    }
                    break 'outer;
                }
            }
        }
    }
    best
}

/// Builds the track of `t - 1` left components. Returns a completed matching
/// (by position) if a win fires on the way.
pub fn build_track(
    prob: &Problem,
    st: &mut TrackState,
    log: &mut StepLog,
) -> Result<Option<Vec<(Element, Element)>>, StepError> {
    log.phase_reached = log.phase_reached.max(Phase::Track);
    let n = st.n();
    let target = st.last_left();
    for p in 0..target {
        log.track_len = st.left_len;
        if p > 0 {
            if let Some(pair) = track_win_pair(prob, st, p) {
                log.branch = Branch::TrackWin { step: p };
                return complete(prob, st, Overrides::from([(p, pair)]), "track-win").map(Some);
            }
        }
        // Scheme 1: charge every kernel element of relation p
        let mut count = vec![0u8; n];
        let mut out_a = vec![NONE; n];
        let mut out_b = vec![NONE; n];
        let rel = st.relation(p);
        let mut total = 0usize;
        for class in prob.rels[rel].classes() {
            for &x in class {
                total += 1;
                if let Some(q) = st.owner(x) {
                    count[q] += 1;
                    continue;
                }
                let q = class.iter().filter_map(|&y| st.owner(y).filter(|&q| st.is_right_pos(q))).min().ok_or_else(
                    || {
                        StepError::Logic(ConstructError::logic(
                            "build_track",
                            format!("element {x} has no right-side classmate at step {p}; {}", st.digest()),
                        ))
                    },
                )?;
                count[q] += 1;
                let comp = st.comps[q];
                if prob.idx[rel].equivalent(x, comp.a) {
                    out_a[q] = x;
                } else {
                    out_b[q] = x;
                }
            }
        }
        debug_assert_eq!(total, prob.rels[rel].kernel_size());
        if let Some(q) = count.iter().position(|&k| k > 4) {
            return Err(StepError::Logic(ConstructError::logic(
                "build_track",
                format!("component at position {q} has {} charges", count[q]),
            )));
        }
        let q = (p + 1..n).find(|&q| count[q] == 4).ok_or_else(|| {
            StepError::Logic(ConstructError::logic(
                "build_track",
                format!("no right component with four charges at step {p}; {}", st.digest()),
            ))
        })?;
        if out_a[q] == NONE || out_b[q] == NONE {
            return Err(StepError::Logic(ConstructError::logic(
                "build_track",
                format!("four-charged component {q} lacks two outside charges"),
            )));
        }
        let (c, d) = (out_a[q], out_b[q]);
        st.swap_positions(p + 1, q);
        st.make_left(p + 1, c, d);
    }
    log.track_len = st.left_len;
    if let Some(pair) = track_win_pair(prob, st, target) {
        log.branch = Branch::TrackFinalObs;
        return complete(prob, st, Overrides::from([(target, pair)]), "track-final").map(Some);
    }
    Ok(None)
}

/// Runs the completion engine where the recipe is known to succeed.
pub(crate) fn complete(
    prob: &Problem,
    st: &TrackState,
    ov: Overrides,
    step: &'static str,
) -> Result<Vec<(Element, Element)>, StepError> {
    complete_assignment(prob, st, &ov)
        .map_err(|e| StepError::Logic(ConstructError::logic(step, format!("{e}; overrides {ov:?}; {}", st.digest()))))
}
