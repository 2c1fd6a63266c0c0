//! Search for instances with large kernels and no rainbow matching.
//!
//! Instances are built relation by relation over a ground set of at most 64
//! elements (bitmask representation), with classes of size 2 or 3:
//!
//! * the first relation is a canonical block layout (triples, then pairs, on
//!   the lowest elements) and has the smallest kernel of the instance;
//! * middle relations are enumerated as set partitions, introducing unused
//!   elements only in increasing order, and in non-decreasing canonical
//!   order among themselves;
//! * the last relation is not enumerated. A pair `{u, v}` may sit in one of
//!   its classes only if every rainbow matching of the other relations meets
//!   `{u, v}`; the last relation exists iff those allowed pairs admit a
//!   vertex-disjoint cover by edges and triangles reaching the kernel target.
//!
//! While the last middle relation grows, its allowed-pair graph only shrinks,
//! so the cover bound prunes partial partitions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gen::gen_lower_bound_family;
use crate::oracle::exact::{exact_solve, ExactOutcome};
use crate::relations::{Instance, Partition};
use crate::seed::splitmix64;

pub const MAX_SEARCH_GROUND: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub n: usize,
    pub kernel_target: usize,
    pub max_ground: usize,
    pub budget: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Certified witness: every kernel reaches the target, classes have size
    /// 2 or 3, and the exact solver proves it has no rainbow matching.
    pub witness: Option<Instance>,
    /// True when the search space was fully explored.
    pub exhaustive: bool,
    pub nodes: u64,
    pub restarts: u32,
}

/// Randomized-restart search. Restart `k` explores the same tree with a
/// child order shuffled by a seed derived from `(seed, k)` and a node cap
/// that doubles every restart; a restart that finishes under its cap makes
/// the result exhaustive.
pub fn search_unmatchable(p: &SearchParams) -> SearchResult {
    let max_ground = p.max_ground.min(MAX_SEARCH_GROUND);
    let mut spent = 0u64;
    let mut cap = (p.budget / 64).max(1 << 16);
    let mut restart = 0u32;
    loop {
        let this_cap = cap.min(p.budget.saturating_sub(spent));
        let rng = ChaCha8Rng::seed_from_u64(splitmix64(p.seed ^ splitmix64(restart as u64)));
        let mut s = Searcher::new(p.n, p.kernel_target, max_ground, this_cap, rng, restart > 0);
        let found = s.run();
        spent += s.nodes;
        restart += 1;
        match found {
            Some(Some(w)) => {
                let inst = certify(w, p.kernel_target);
                return SearchResult { witness: Some(inst), exhaustive: false, nodes: spent, restarts: restart };
            }
            Some(None) => return SearchResult { witness: None, exhaustive: true, nodes: spent, restarts: restart },
            None => {
                if spent >= p.budget {
                    return SearchResult { witness: None, exhaustive: false, nodes: spent, restarts: restart };
                }
                cap = cap.saturating_mul(2);
            }
        }
    }
}

fn certify(classes: Vec<Vec<u64>>, target: usize) -> Instance {
    let ground = classes.iter().flatten().map(|m| 64 - m.leading_zeros() as usize).max().unwrap_or(0).max(1);
    let rels = classes
        .iter()
        .map(|cs| Partition::new(cs.iter().map(|&m| mask_elems(m)).collect()).expect("disjoint classes"))
        .collect();
    let inst = Instance::new(ground, rels).expect("elements in range");
    for rel in inst.relations() {
        assert!(rel.kernel_size() >= target, "witness kernel below target");
        assert!(rel.classes().iter().all(|c| (2..=3).contains(&c.len())));
    }
    assert_eq!(exact_solve(&inst, u64::MAX).outcome, ExactOutcome::ProvenNone, "search produced a matchable witness");
    inst
}

fn mask_elems(m: u64) -> Vec<u32> {
    (0..64).filter(|&i| m >> i & 1 == 1).collect()
}

fn pairs_of_class(c: u64, out: &mut Vec<u64>) {
    let e = mask_elems(c);
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            out.push(1 << e[i] | 1 << e[j]);
        }
    }
}

/// Result of one relation-level call: `None` = cap hit, `Some(None)` =
/// exhausted without witness, `Some(Some(w))` = witness.
type Found = Option<Option<Vec<Vec<u64>>>>;

struct Searcher {
    n: usize,
    target: usize,
    ground: usize,
    cap: u64,
    nodes: u64,
    rng: ChaCha8Rng,
    shuffle: bool,
    rels: Vec<Vec<u64>>,
    base_kernel: usize,
}

impl Searcher {
    fn new(n: usize, target: usize, ground: usize, cap: u64, rng: ChaCha8Rng, shuffle: bool) -> Self {
        Searcher { n, target, ground, cap, nodes: 0, rng, shuffle, rels: Vec::new(), base_kernel: 0 }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.cap
    }

    fn run(&mut self) -> Found {
        if self.n == 0 {
            return Some(None);
        }
        if self.n == 1 {
            // a single relation is unmatchable only when its kernel is empty
            return Some(if self.target == 0 { Some(vec![vec![]]) } else { None });
        }
        let mut shapes = Vec::new();
        for triples in 0..=self.ground / 3 {
            for pairs in 0..=(self.ground - 3 * triples) / 2 {
                let k = 3 * triples + 2 * pairs;
                if k >= self.target && k <= self.ground {
                    shapes.push((k, triples, pairs));
                }
            }
        }
        shapes.sort();
        if self.shuffle {
            shapes.shuffle(&mut self.rng);
        }
        let mut exhausted = true;
        for (k, triples, pairs) in shapes {
            let mut classes = Vec::new();
            let mut next = 0;
            for _ in 0..triples {
                classes.push(0b111u64 << next);
                next += 3;
            }
            for _ in 0..pairs {
                classes.push(0b11u64 << next);
                next += 2;
            }
            self.rels = vec![classes.clone()];
            self.base_kernel = k;
            let mut matchings = Vec::new();
            for &c in &classes {
                pairs_of_class(c, &mut matchings);
            }
            match self.next_relation(matchings, k) {
                None => exhausted = false,
                Some(Some(w)) => return Some(Some(w)),
                Some(None) => {}
            }
            if self.nodes > self.cap {
                return None;
            }
        }
        if exhausted {
            Some(None)
        } else {
            None
        }
    }

    /// `matchings` are the rainbow matchings (as element masks) of the
    /// relations fixed so far; `frontier` is one past the largest element used.
    fn next_relation(&mut self, matchings: Vec<u64>, frontier: usize) -> Found {
        let r = self.rels.len();
        let need = self.target.max(self.base_kernel);
        if matchings.is_empty() {
            // already unmatchable: pad with copies of the first relation
            let mut w = self.rels.clone();
            while w.len() < self.n {
                w.push(self.rels[0].clone());
            }
            return Some(Some(w));
        }
        if r == self.n - 1 {
            if !self.tick() {
                return None;
            }
            let forbidden = forbidden_from(&matchings, self.ground);
            let allowed = allowed_graph(&forbidden, self.ground);
            return Some(cover(&allowed, full_mask(self.ground), need).map(|last| {
                let mut w = self.rels.clone();
                w.push(last);
                w
            }));
        }
        let last_middle = r == self.n - 2;
        let mut st = PartState { classes: Vec::new(), kernel: 0, forbidden: vec![0u64; self.ground], fresh_open: true };
        self.partition_dfs(0, frontier, need, last_middle, &matchings, &mut st)
    }

    #[allow(clippy::too_many_arguments)]
    fn partition_dfs(
        &mut self,
        e: usize,
        frontier: usize,
        need: usize,
        last_middle: bool,
        matchings: &[u64],
        st: &mut PartState,
    ) -> Found {
        if !self.tick() {
            return None;
        }
        let remaining = self.ground - e;
        let singles = st.classes.iter().filter(|c| c.count_ones() == 1).count();
        if singles > remaining || st.kernel + remaining < need {
            return Some(None);
        }
        if e == self.ground {
            return self.finish_relation(frontier, matchings, st);
        }
        let fresh = e >= frontier;
        let mut options: Vec<Option<usize>> = Vec::new(); // None = new class, Some(i) = join i
        let can_use = !fresh || st.fresh_open;
        if can_use {
            options.push(None);
            for (i, c) in st.classes.iter().enumerate() {
                if c.count_ones() < 3 {
                    options.push(Some(i));
                }
            }
        }
        if self.shuffle {
            options.shuffle(&mut self.rng);
        }
        let mut exhausted = true;
        for opt in options.into_iter().map(Some).chain(std::iter::once(None)) {
            let bit = 1u64 << e;
            let saved_forbidden = if last_middle { Some(st.forbidden.clone()) } else { None };
            match opt {
                Some(None) => {
                    st.classes.push(bit);
                    st.kernel += 1;
                }
                Some(Some(i)) => {
                    if last_middle {
                        let old = st.classes[i];
                        for u in mask_elems(old) {
                            add_pair_forbidden(&mut st.forbidden, matchings, 1 << u | bit, self.ground);
                        }
                        let allowed = allowed_graph(&st.forbidden, self.ground);
                        if !self.tick() {
                            st.forbidden = saved_forbidden.expect("saved");
                            return None;
                        }
                        if cover(&allowed, full_mask(self.ground), need).is_none() {
                            st.forbidden = saved_forbidden.expect("saved");
                            continue;
                        }
                    }
                    st.classes[i] |= bit;
                    st.kernel += 1;
                }
                None => {
                    // singleton; a skipped fresh element closes the fresh range
                }
            }
            let was_open = st.fresh_open;
            if opt.is_none() && fresh {
                st.fresh_open = false;
            }
            let res = self.partition_dfs(e + 1, frontier, need, last_middle, matchings, st);
            st.fresh_open = was_open;
            match opt {
                Some(None) => {
                    st.classes.pop();
                    st.kernel -= 1;
                }
                Some(Some(i)) => {
                    st.classes[i] &= !bit;
                    st.kernel -= 1;
                }
                None => {}
            }
            if let Some(f) = saved_forbidden {
                st.forbidden = f;
            }
            match res {
                None => return None,
                Some(Some(w)) => return Some(Some(w)),
                Some(None) => {}
            }
            let _ = &mut exhausted;
        }
        Some(None)
    }

    fn finish_relation(&mut self, frontier: usize, matchings: &[u64], st: &PartState) -> Found {
        if st.classes.iter().any(|c| c.count_ones() < 2) {
            return Some(None);
        }
        let mut code = st.classes.clone();
        code.sort_unstable();
        // middle relations are interchangeable: keep them in non-decreasing order
        if self.rels.len() >= 2 && code < self.rels[self.rels.len() - 1] {
            return Some(None);
        }
        let mut pairs = Vec::new();
        for &c in &code {
            pairs_of_class(c, &mut pairs);
        }
        let mut next = Vec::new();
        for &m in matchings {
            for &p in &pairs {
                if m & p == 0 {
                    next.push(m | p);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        let used = code.iter().fold(0u64, |a, &c| a | c);
        let new_frontier = frontier.max(64 - used.leading_zeros() as usize);
        self.rels.push(code);
        let res = self.next_relation(next, new_frontier);
        self.rels.pop();
        res
    }
}

struct PartState {
    classes: Vec<u64>,
    kernel: usize,
    forbidden: Vec<u64>,
    fresh_open: bool,
}

fn full_mask(ground: usize) -> u64 {
    if ground == 64 {
        u64::MAX
    } else {
        (1u64 << ground) - 1
    }
}

/// `forbidden[u]` has bit `v` when some matching avoids both `u` and `v`.
fn forbidden_from(matchings: &[u64], ground: usize) -> Vec<u64> {
    let full = full_mask(ground);
    let mut f = vec![0u64; ground];
    for &m in matchings {
        let free = full & !m;
        for (u, fu) in f.iter_mut().enumerate() {
            if free >> u & 1 == 1 {
                *fu |= free;
            }
        }
    }
    f
}

fn add_pair_forbidden(f: &mut [u64], matchings: &[u64], pair: u64, ground: usize) {
    let full = full_mask(ground);
    for &m in matchings {
        if m & pair != 0 {
            continue;
        }
        let free = full & !(m | pair);
        for (u, fu) in f.iter_mut().enumerate() {
            if free >> u & 1 == 1 {
                *fu |= free;
            }
        }
    }
}

fn allowed_graph(forbidden: &[u64], ground: usize) -> Vec<u64> {
    let full = full_mask(ground);
    forbidden.iter().enumerate().map(|(u, &f)| full & !f & !(1u64 << u)).collect()
}

/// A set of vertex-disjoint allowed edges and triangles covering at least
/// `need` vertices, as class masks.
fn cover(allowed: &[u64], avail: u64, need: usize) -> Option<Vec<u64>> {
    let mut acc = Vec::new();
    if cover_rec(allowed, avail, 0, need, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

fn cover_rec(allowed: &[u64], avail: u64, covered: usize, need: usize, acc: &mut Vec<u64>) -> bool {
    if covered >= need {
        return true;
    }
    if covered + avail.count_ones() as usize > need.max(covered) {
        // fall through: enough vertices may remain
    } else if covered + (avail.count_ones() as usize) < need {
        return false;
    }
    if avail == 0 {
        return false;
    }
    let v = avail.trailing_zeros() as usize;
    let rest = avail & !(1u64 << v);
    let mut nb = allowed[v] & rest;
    while nb != 0 {
        let u = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        let mut tri = allowed[v] & allowed[u] & rest & !((1u64 << (u + 1)) - 1);
        while tri != 0 {
            let w = tri.trailing_zeros() as usize;
            tri &= tri - 1;
            let c = 1u64 << v | 1u64 << u | 1u64 << w;
            acc.push(c);
            if cover_rec(allowed, rest & !c, covered + 3, need, acc) {
                return true;
            }
            acc.pop();
        }
        let c = 1u64 << v | 1u64 << u;
        acc.push(c);
        if cover_rec(allowed, rest & !c, covered + 2, need, acc) {
            return true;
        }
        acc.pop();
    }
    cover_rec(allowed, rest, covered, need, acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinKernelEstimate {
    /// Largest kernel size with a certified unmatchable witness.
    pub kernel: usize,
    pub witness: Instance,
    /// Whether the search at `kernel + 1` explored its whole space.
    pub next_exhaustive: bool,
    pub nodes: u64,
}

/// Largest `k` for which a witness with all kernels `>= k` was certified.
///
/// Starts from the identical-triples family (kernel `3n - 3`) and searches
/// upward until a target yields no witness.
pub fn min_unmatchable_kernel(n: usize, max_ground: usize, budget: u64, seed: u64) -> MinKernelEstimate {
    let (mut kernel, mut witness) = if n >= 2 {
        let w = gen_lower_bound_family(n);
        (3 * n - 3, w)
    } else {
        (0, Instance::new(1, vec![Partition::empty(); n]).expect("valid"))
    };
    let mut nodes = 0;
    loop {
        let r = search_unmatchable(&SearchParams { n, kernel_target: kernel + 1, max_ground, budget, seed });
        nodes += r.nodes;
        match r.witness {
            Some(w) => {
                kernel += 1;
                witness = w;
            }
            None => return MinKernelEstimate { kernel, witness, next_exhaustive: r.exhaustive, nodes },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, g: usize) -> SearchParams {
        SearchParams { n, kernel_target: k, max_ground: g, budget: 50_000_000, seed: 1 }
    }

    #[test]
    fn two_relations_kernel_three() {
        let r = search_unmatchable(&params(2, 3, 10));
        let w = r.witness.expect("witness");
        assert_eq!(w.len(), 2);
        for rel in w.relations() {
            assert_eq!(rel.classes(), &[vec![0, 1, 2]]);
        }
    }

    #[test]
    fn two_relations_kernel_four_crossed_pairs() {
        // {0,1},{2,3} against {0,2},{1,3}: each pair of one relation meets
        // both pairs of the other
        let r = search_unmatchable(&params(2, 4, 10));
        let w = r.witness.expect("witness");
        assert_eq!(w.ground_size(), 4);
        assert!(w.relations().iter().all(|p| p.classes().len() == 2 && p.kernel_size() == 4));
    }

    #[test]
    fn two_relations_kernel_five_is_exhaustively_matchable() {
        let r = search_unmatchable(&params(2, 5, 10));
        assert!(r.witness.is_none());
        assert!(r.exhaustive);
    }

    #[test]
    fn cover_finds_triangles() {
        let mut allowed = vec![0u64; 6];
        for (u, v) in [(0, 1), (0, 2), (1, 2), (3, 4)] {
            allowed[u] |= 1 << v;
            allowed[v] |= 1 << u;
        }
        let c = cover(&allowed, 0b111111, 5).expect("cover");
        assert_eq!(c.iter().map(|m| m.count_ones()).sum::<u32>(), 5);
        assert!(cover(&allowed, 0b111111, 6).is_none());
    }

    #[test]
    fn min_kernel_n2() {
        let e = min_unmatchable_kernel(2, 10, 10_000_000, 3);
        assert_eq!(e.kernel, 4);
        assert!(e.next_exhaustive);
    }
}
