//! Completion engine: fills every relation without an override from its
//! identity pair or a cross pair of the next left component.
//!
//! Relation at position `r` may take `(a_r, b_r)` (when `r >= 1`) or, when
//! component `r + 1` is on the left, `(a_{r+1}, c_{r+1})` or
//! `(b_{r+1}, d_{r+1})`. Taking a cross pair of component `r + 1` rules out
//! the identity pair of position `r + 1`. Feasibility is a three-state
//! dynamic program over positions; the assignment is read back from the top
//! position down, preferring identity, then top, then bottom.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::construct::track::TrackState;
use crate::construct::Problem;
use crate::relations::Element;

/// Position to fixed pair.
pub type Overrides = BTreeMap<usize, (Element, Element)>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("override for position {0} is not an equivalent pair of distinct elements")]
    BadOverride(usize),
    #[error("element {0} is used by two overrides")]
    SharedElement(Element),
    #[error("no assignment of identity and cross pairs avoids the overrides")]
    Impossible,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Choice {
    Fixed,
    Identity,
    Top,
    Bottom,
}

impl Choice {
    /// Index of the cross pair of component `r + 1` this choice takes.
    fn state(self) -> usize {
        match self {
            Choice::Top => 1,
            Choice::Bottom => 2,
            _ => 0,
        }
    }
}

/// Completed pairs indexed by position.
pub fn complete_assignment(
    prob: &Problem,
    st: &TrackState,
    ov: &Overrides,
) -> Result<Vec<(Element, Element)>, CompletionError> {
    let n = st.n();
    let mut consumed: Vec<Element> = Vec::with_capacity(2 * ov.len());
    for (&p, &(x, y)) in ov {
        if p >= n || x == y || !prob.idx[st.relation(p)].equivalent(x, y) {
            return Err(CompletionError::BadOverride(p));
        }
        for e in [x, y] {
            if consumed.contains(&e) {
                return Err(CompletionError::SharedElement(e));
            }
            consumed.push(e);
        }
    }
    let free = |e: Element| !consumed.contains(&e);
    let options = |r: usize| -> Vec<Choice> {
        if ov.contains_key(&r) {
            return vec![Choice::Fixed];
        }
        let mut v = Vec::with_capacity(3);
        if r >= 1 && free(st.comps[r].a) && free(st.comps[r].b) {
            v.push(Choice::Identity);
        }
        if r < st.left_len {
            let next = st.comps[r + 1];
            if free(next.a) && free(next.c()) {
                v.push(Choice::Top);
            }
            if free(next.b) && free(next.d()) {
                v.push(Choice::Bottom);
            }
        }
        v
    };
    // reach[r][s]: positions 0..=r can be assigned ending in state s
    let mut reach = vec![[false; 3]; n];
    let mut opts = Vec::with_capacity(n);
    for r in 0..n {
        let o = options(r);
        for &ch in &o {
            let ok = if r == 0 {
                true
            } else if ch == Choice::Identity {
                reach[r - 1][0]
            } else {
                reach[r - 1].iter().any(|&b| b)
            };
            if ok {
                reach[r][ch.state()] = true;
            }
        }
        opts.push(o);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if !reach[n - 1][0] {
        return Err(CompletionError::Impossible);
    }
    let mut out = vec![(0, 0); n];
    // state the position below must end in: None = any
    let mut need: Option<usize> = Some(0);
    for r in (0..n).rev() {
        let pick = opts[r]
            .iter()
            .copied()
            .find(|&ch| {
                need.is_none_or(|s| s == ch.state())
                    && reach[r][ch.state()]
                    && (r == 0
                        || if ch == Choice::Identity { reach[r - 1][0] } else { reach[r - 1].iter().any(|&b| b) })
            })
            .ok_or(CompletionError::Impossible)?;
        out[r] = match pick {
            Choice::Fixed => ov[&r],
            Choice::Identity => (st.comps[r].a, st.comps[r].b),
            Choice::Top => (st.comps[r + 1].a, st.comps[r + 1].c()),
            Choice::Bottom => (st.comps[r + 1].b, st.comps[r + 1].d()),
        };
        need = if pick == Choice::Identity { Some(0) } else { None };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{verify_pairs, Matching, Partition, PartitionIndex};

    // positions 1 and 2 are left components: (0,1 | 4,5) and (2,3 | 6,7)
    fn setup() -> (Vec<Partition>, Vec<PartitionIndex>, TrackState) {
        let rels = vec![
            Partition::new(vec![vec![0, 4], vec![1, 5]]).unwrap(),
            Partition::new(vec![vec![0, 1], vec![2, 6], vec![3, 7]]).unwrap(),
            Partition::new(vec![vec![2, 3], vec![8, 9]]).unwrap(),
        ];
        let idx = rels.iter().map(|p| PartitionIndex::new(p, 10)).collect();
        let mut st = TrackState::new(10, 0, &[(0, 0), (0, 1), (2, 3)]);
        st.make_left(1, 4, 5);
        st.make_left(2, 6, 7);
        (rels, idx, st)
    }

    #[test]
    fn shifts_along_the_chain() {
        let (rels, idx, st) = setup();
        let prob = Problem { ground: 10, rels: &rels, idx: &idx };
        let out = complete_assignment(&prob, &st, &Overrides::from([(2, (8, 9))])).unwrap();
        assert_eq!(out, vec![(0, 4), (2, 6), (8, 9)]);
        assert!(verify_pairs(10, &rels, &Matching::new(out)).is_valid());
    }

    #[test]
    fn needs_a_free_pair_somewhere() {
        let (rels, idx, st) = setup();
        let prob = Problem { ground: 10, rels: &rels, idx: &idx };
        assert_eq!(complete_assignment(&prob, &st, &Overrides::new()), Err(CompletionError::Impossible));
        // relation 1 keeps its identity pair, so relation 0 has nothing left
        let ov = Overrides::from([(1, (0, 1)), (2, (8, 9))]);
        assert_eq!(complete_assignment(&prob, &st, &ov), Err(CompletionError::Impossible));
    }

    #[test]
    fn rejects_bad_overrides() {
        let (rels, idx, st) = setup();
        let prob = Problem { ground: 10, rels: &rels, idx: &idx };
        assert_eq!(
            complete_assignment(&prob, &st, &Overrides::from([(2, (8, 3))])),
            Err(CompletionError::BadOverride(2))
        );
        assert_eq!(
            complete_assignment(&prob, &st, &Overrides::from([(2, (9, 9))])),
            Err(CompletionError::BadOverride(2))
        );
        assert_eq!(
            complete_assignment(&prob, &st, &Overrides::from([(0, (0, 4)), (1, (0, 1))])),
            Err(CompletionError::SharedElement(0))
        );
    }
}
