#![allow(dead_code)]

use grinblat::{Element, Instance, Partition};
use rand::seq::SliceRandom;
use rand::{Rng, RngExt};

/// Random instance with `n` relations on `ground` elements; each relation
/// covers a random subset with classes of sizes 2 to 4.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, ground: usize) -> Instance {
    let mut rels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut elems: Vec<Element> = (0..ground as Element).collect();
        elems.shuffle(rng);
        let take = rng.random_range(0..=ground.min(12));
        elems.truncate(take);
        let mut classes = Vec::new();
        let mut rest = &elems[..];
        while rest.len() >= 2 {
            let k = rng.random_range(2..=4usize).min(rest.len());
            classes.push(rest[..k].to_vec());
            rest = &rest[k..];
        }
        rels.push(Partition::new(classes).unwrap());
    }
    Instance::new(ground, rels).unwrap()
}

/// Pairs of equivalent elements of one relation.
fn pairs(p: &Partition) -> Vec<(Element, Element)> {
    let mut out = Vec::new();
    for c in p.classes() {
        for (i, &x) in c.iter().enumerate() {
            for &y in &c[i + 1..] {
                out.push((x, y));
            }
        }
    }
    out
}

/// Enumerates pair tuples relation by relation, in input order, cutting a
/// branch as soon as an element repeats.
pub fn brute_force_matchable(inst: &Instance) -> bool {
    let lists: Vec<_> = inst.relations().iter().map(pairs).collect();
    let mut used = vec![false; inst.ground_size()];
    fn go(r: usize, lists: &[Vec<(Element, Element)>], used: &mut [bool]) -> bool {
        if r == lists.len() {
            return true;
        }
        for &(x, y) in &lists[r] {
            if used[x as usize] || used[y as usize] {
                continue;
            }
            used[x as usize] = true;
            used[y as usize] = true;
            let ok = go(r + 1, lists, used);
            used[x as usize] = false;
            used[y as usize] = false;
            if ok {
                return true;
            }
        }
        false
    }
    go(0, &lists, &mut used)
}

/// Applies an element relabeling and a relation order.
pub fn relabel(inst: &Instance, map: &[Element], order: &[usize]) -> Instance {
    let rels = order
        .iter()
        .map(|&r| {
            let p = &inst.relations()[r];
            Partition::new(p.classes().iter().map(|c| c.iter().map(|&e| map[e as usize]).collect()).collect()).unwrap()
        })
        .collect();
    Instance::new(inst.ground_size(), rels).unwrap()
}

/// The instance with one extra class `{f, f + 1}` of fresh elements added to
/// every relation, `f` distinct per relation.
pub fn with_extra_pair(inst: &Instance) -> Instance {
    let g = inst.ground_size();
    let rels: Vec<Partition> = inst
        .relations()
        .iter()
        .enumerate()
        .map(|(r, p)| {
            let mut cl = p.classes().to_vec();
            let f = (g + 2 * r) as Element;
            cl.push(vec![f, f + 1]);
            Partition::new(cl).unwrap()
        })
        .collect();
    Instance::new(g + 2 * inst.len(), rels).unwrap()
}
