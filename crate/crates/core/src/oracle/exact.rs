//! Complete backtracking search for rainbow matchings.
//!
//! Relations are branched in fail-first order: the unassigned relation with
//! the fewest currently available pairs goes next. Available pair counts are
//! maintained incrementally per (relation, class) as elements are used.

use crate::relations::{Element, Instance, Matching, Partition, SINGLETON};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    Matched(Matching),
    ProvenNone,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    pub outcome: ExactOutcome,
    /// Search nodes visited: one per tentative pair assignment.
    pub nodes: u64,
}

pub fn exact_solve(inst: &Instance, budget: u64) -> ExactResult {
    exact_solve_relations(inst.ground_size(), inst.relations(), budget)
}

/// Same as [`exact_solve`] over a borrowed list of relations.
pub fn exact_solve_relations(ground: usize, rels: &[Partition], budget: u64) -> ExactResult {
    let mut s = Search::new(ground, rels, budget);
    let outcome = match s.dfs(rels.len()) {
        Some(true) => {
            ExactOutcome::Matched(Matching::new(s.assigned.iter().map(|p| p.expect("complete assignment")).collect()))
        }
        Some(false) => ExactOutcome::ProvenNone,
        None => ExactOutcome::BudgetExhausted,
    };
    ExactResult { outcome, nodes: s.nodes }
}

struct Search<'a> {
    rels: &'a [Partition],
    used: Vec<bool>,
    // CSR list of (relation, class) memberships per element
    memb_start: Vec<usize>,
    memb: Vec<(u32, u32)>,
    avail: Vec<Vec<u32>>,
    pairs: Vec<u64>,
    assigned: Vec<Option<(Element, Element)>>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(ground: usize, rels: &'a [Partition], budget: u64) -> Self {
        let mut count = vec![0usize; ground + 1];
        for p in rels {
            for c in p.classes() {
                for &x in c {
                    count[x as usize + 1] += 1;
                }
            }
        }
        for i in 0..ground {
            count[i + 1] += count[i];
        }
        let mut memb = vec![(SINGLETON, SINGLETON); count[ground]];
        let mut fill = count.clone();
        for (r, p) in rels.iter().enumerate() {
            for (ci, c) in p.classes().iter().enumerate() {
                for &x in c {
                    memb[fill[x as usize]] = (r as u32, ci as u32);
                    fill[x as usize] += 1;
                }
            }
        }
        let avail: Vec<Vec<u32>> = rels.iter().map(|p| p.classes().iter().map(|c| c.len() as u32).collect()).collect();
        let pairs = rels.iter().map(Partition::pair_count).collect();
        Search {
            rels,
            used: vec![false; ground],
            memb_start: count,
            memb,
            avail,
            pairs,
            assigned: vec![None; rels.len()],
            nodes: 0,
            budget,
        }
    }

    fn mark(&mut self, x: Element) {
        self.used[x as usize] = true;
        let (lo, hi) = (self.memb_start[x as usize], self.memb_start[x as usize + 1]);
        for &(r, c) in &self.memb[lo..hi] {
            let a = &mut self.avail[r as usize][c as usize];
            self.pairs[r as usize] -= u64::from(*a - 1);
            *a -= 1;
        }
    }

    fn unmark(&mut self, x: Element) {
        self.used[x as usize] = false;
        let (lo, hi) = (self.memb_start[x as usize], self.memb_start[x as usize + 1]);
        for &(r, c) in &self.memb[lo..hi] {
            let a = &mut self.avail[r as usize][c as usize];
            self.pairs[r as usize] += u64::from(*a);
            *a += 1;
        }
    }

    /// `Some(true)` on success, `Some(false)` when the subtree is exhausted,
    /// `None` when the budget ran out.
    fn dfs(&mut self, remaining: usize) -> Option<bool> {
        if remaining == 0 {
            return Some(true);
        }
        let r = (0..self.rels.len())
            .filter(|&r| self.assigned[r].is_none())
            .min_by_key(|&r| self.pairs[r])
            .expect("an unassigned relation");
        if self.pairs[r] == 0 {
            return Some(false);
        }
        let rels = self.rels;
        for (ci, class) in rels[r].classes().iter().enumerate() {
            if self.avail[r][ci] < 2 {
                continue;
            }
            for i in 0..class.len() {
                let x = class[i];
                if self.used[x as usize] {
                    continue;
                }
                for &y in &class[i + 1..] {
                    if self.used[y as usize] {
                        continue;
                    }
                    if self.nodes >= self.budget {
                        return None;
                    }
                    self.nodes += 1;
                    self.mark(x);
                    self.mark(y);
                    self.assigned[r] = Some((x, y));
                    let res = self.dfs(remaining - 1);
                    if res != Some(false) {
                        if res.is_none() {
                            self.assigned[r] = None;
                        }
                        return res;
                    }
                    self.assigned[r] = None;
                    self.unmark(y);
                    self.unmark(x);
                }
            }
        }
        Some(false)
    }
}
