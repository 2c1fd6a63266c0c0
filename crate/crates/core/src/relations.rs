//! Instances, partitions, kernels and rainbow matchings.
//!
//! Elements of the ground set are dense indices `0..ground_size`. A
//! [`Partition`] lists only its non-singleton classes; every element that
//! does not appear in a listed class is a singleton.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::RelationError;

/// Element of the ground set.
pub type Element = u32;

/// Sentinel used by [`PartitionIndex`] for elements in singleton classes.
pub const SINGLETON: u32 = u32::MAX;

/// One equivalence relation, stored as its non-singleton classes.
///
/// Classes are kept in canonical order: each class sorted ascending, classes
/// sorted by their smallest element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Partition {
    classes: Vec<Vec<Element>>,
}

impl Partition {
    /// Builds a partition, rejecting classes of size < 2 and overlapping
    /// classes. Elements are not range checked here; see [`Instance::new`].
    pub fn new(classes: Vec<Vec<Element>>) -> Result<Self, RelationError> {
        let mut classes: Vec<Vec<Element>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        let mut seen = BTreeSet::new();
        for (i, class) in classes.iter().enumerate() {
            if class.len() < 2 {
                return Err(RelationError::ClassTooSmall { class: i, size: class.len() });
            }
            for &x in class {
                if !seen.insert(x) {
                    return Err(RelationError::DuplicateElement { element: x });
                }
            }
        }
        classes.sort_unstable_by_key(|c| c[0]);
        Ok(Partition { classes })
    }

    /// The partition with no non-singleton class.
    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn classes(&self) -> &[Vec<Element>] {
        &self.classes
    }

    /// Union of the listed classes, ascending.
    pub fn kernel(&self) -> Vec<Element> {
        let mut k: Vec<Element> = self.classes.iter().flatten().copied().collect();
        k.sort_unstable();
        k
    }

    pub fn kernel_size(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    /// The class containing `x`, or `{x}` when `x` is a singleton.
    pub fn class_of(&self, x: Element) -> Vec<Element> {
        self.classes.iter().find(|c| c.binary_search(&x).is_ok()).cloned().unwrap_or_else(|| vec![x])
    }

    pub fn equivalent(&self, x: Element, y: Element) -> bool {
        x == y || self.classes.iter().any(|c| c.binary_search(&x).is_ok() && c.binary_search(&y).is_ok())
    }

    /// Largest element mentioned, if any.
    pub fn max_element(&self) -> Option<Element> {
        self.classes.iter().filter_map(|c| c.last().copied()).max()
    }

    /// Number of unordered pairs of distinct equivalent elements.
    pub fn pair_count(&self) -> u64 {
        self.classes
            .iter()
            .map(|c| {
                let k = c.len() as u64;
                k * (k - 1) / 2
            })
            .sum()
    }
}

/// Constant-time class lookup for one partition over a fixed ground set.
#[derive(Clone, Debug)]
pub struct PartitionIndex {
    class_of: Vec<u32>,
}

impl PartitionIndex {
    pub fn new(p: &Partition, ground_size: usize) -> Self {
        let mut class_of = vec![SINGLETON; ground_size];
        for (ci, class) in p.classes.iter().enumerate() {
            for &x in class {
                class_of[x as usize] = ci as u32;
            }
        }
        PartitionIndex { class_of }
    }

    /// Class id of `x`, or [`SINGLETON`].
    #[inline]
    pub fn class(&self, x: Element) -> u32 {
        self.class_of[x as usize]
    }

    #[inline]
    pub fn in_kernel(&self, x: Element) -> bool {
        self.class_of[x as usize] != SINGLETON
    }

    #[inline]
    pub fn equivalent(&self, x: Element, y: Element) -> bool {
        if x == y {
            return true;
        }
        let cx = self.class_of[x as usize];
        cx != SINGLETON && cx == self.class_of[y as usize]
    }
}

/// A ground set together with an ordered family of equivalence relations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Instance {
    ground_size: usize,
    relations: Vec<Partition>,
}

impl Instance {
    /// Checks that every listed element lies in `0..ground_size`.
    pub fn new(ground_size: usize, relations: Vec<Partition>) -> Result<Self, RelationError> {
        for (r, p) in relations.iter().enumerate() {
            if let Some(m) = p.max_element() {
                if m as usize >= ground_size {
                    return Err(RelationError::OutOfRange { relation: r, element: m, ground_size });
                }
            }
        }
        if ground_size > SINGLETON as usize {
            return Err(RelationError::GroundTooLarge(ground_size));
        }
        Ok(Instance { ground_size, relations })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn relations(&self) -> &[Partition] {
        &self.relations
    }

    /// Number of relations `n`.
    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn kernel_info(&self) -> KernelInfo {
        KernelInfo { kernels: self.relations.iter().map(Partition::kernel).collect() }
    }

    /// Smallest kernel size over all relations.
    pub fn min_kernel(&self) -> Result<usize, RelationError> {
        self.relations.iter().map(Partition::kernel_size).min().ok_or(RelationError::NoRelations)
    }

    pub fn indices(&self) -> Vec<PartitionIndex> {
        self.relations.iter().map(|p| PartitionIndex::new(p, self.ground_size)).collect()
    }

    /// Splits every class of size >= 4 into blocks of 2 and 3.
    ///
    /// Blocks of 3 are cut greedily in sorted order; when the size is 1 mod 3
    /// the last four elements become two blocks of 2. Kernels are unchanged
    /// and every output class is contained in an input class.
    pub fn normalize(&self) -> Instance {
        let relations = self
            .relations
            .iter()
            .map(|p| {
                let mut out = Vec::with_capacity(p.classes.len());
                for class in &p.classes {
                    split_class(class, &mut out);
                }
                out.sort_unstable_by_key(|c| c[0]);
                Partition { classes: out }
            })
            .collect();
        Instance { ground_size: self.ground_size, relations }
    }

    /// The instance restricted to the relations with the given indices, in
    /// the order given.
    pub fn select(&self, relations: &[usize]) -> Instance {
        Instance {
            ground_size: self.ground_size,
            relations: relations.iter().map(|&r| self.relations[r].clone()).collect(),
        }
    }
}

fn split_class(class: &[Element], out: &mut Vec<Vec<Element>>) {
    let k = class.len();
    if k <= 3 {
        out.push(class.to_vec());
        return;
    }
    let tail = if k % 3 == 1 { 4 } else { 0 };
    let head = k - tail;
    for block in class[..head].chunks(3) {
        out.push(block.to_vec());
    }
    if tail == 4 {
        out.push(class[head..head + 2].to_vec());
        out.push(class[head + 2..].to_vec());
    }
}

/// Kernels `K_i` of every relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelInfo {
    pub kernels: Vec<Vec<Element>>,
}

impl KernelInfo {
    pub fn sizes(&self) -> Vec<usize> {
        self.kernels.iter().map(Vec::len).collect()
    }
}

/// One pair per relation, in relation order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    pub pairs: Vec<(Element, Element)>,
}

impl Matching {
    pub fn new(pairs: Vec<(Element, Element)>) -> Self {
        Matching { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Matching with some relations left open.
pub type PartialMatching = Vec<Option<(Element, Element)>>;

/// The first condition a matching fails, in scan order: length, then range,
/// then distinctness, then per-relation equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, found: usize },
    OutOfRange { relation: usize, element: Element },
    Repeated { element: Element, first: usize, second: usize },
    NotEquivalent { relation: usize, a: Element, b: Element },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { expected, found } => {
                write!(f, "expected {expected} pairs, found {found}")
            }
            Violation::OutOfRange { relation, element } => {
                write!(f, "relation {}: element {element} outside the ground set", relation + 1)
            }
            Violation::Repeated { element, first, second } => {
                write!(f, "element {element} used by relation {} and relation {}", first + 1, second + 1)
            }
            Violation::NotEquivalent { relation, a, b } => {
                write!(f, "relation {}: {a} and {b} are not equivalent", relation + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub violation: Option<Violation>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn verify_matching(inst: &Instance, m: &Matching) -> VerifyReport {
    verify_pairs(inst.ground_size, &inst.relations, m)
}

/// [`verify_matching`] over a borrowed list of relations.
pub fn verify_pairs(ground_size: usize, relations: &[Partition], m: &Matching) -> VerifyReport {
    VerifyReport { violation: first_violation(ground_size, relations, m) }
}

fn first_violation(ground_size: usize, relations: &[Partition], m: &Matching) -> Option<Violation> {
    if m.pairs.len() != relations.len() {
        return Some(Violation::WrongLength { expected: relations.len(), found: m.pairs.len() });
    }
    let g = ground_size as u64;
    for (i, &(a, b)) in m.pairs.iter().enumerate() {
        for x in [a, b] {
            if x as u64 >= g {
                return Some(Violation::OutOfRange { relation: i, element: x });
            }
        }
    }
    let mut owner: std::collections::HashMap<Element, usize> = Default::default();
    for (i, &(a, b)) in m.pairs.iter().enumerate() {
        for x in [a, b] {
            if let Some(&first) = owner.get(&x) {
                return Some(Violation::Repeated { element: x, first, second: i });
            }
            owner.insert(x, i);
        }
    }
    for (i, &(a, b)) in m.pairs.iter().enumerate() {
        if !relations[i].equivalent(a, b) {
            return Some(Violation::NotEquivalent { relation: i, a, b });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(classes: &[&[u32]]) -> Partition {
        Partition::new(classes.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let p = part(&[&[0, 1, 2], &[3, 4]]);
        assert_eq!(p.kernel(), vec![0, 1, 2, 3, 4]);
        assert_eq!(p.kernel_size(), 5);
        assert!(Partition::empty().kernel().is_empty());
        let lb = part(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 8]]);
        assert_eq!(lb.kernel_size(), 9);
    }

    #[test]
    fn class_of_examples() {
        let p = part(&[&[0, 1, 2]]);
        assert_eq!(p.class_of(1), vec![0, 1, 2]);
        assert_eq!(p.class_of(5), vec![5]);
        assert_eq!(part(&[&[0, 1], &[2, 3]]).class_of(3), vec![2, 3]);
    }

    #[test]
    fn partition_rejects_bad_classes() {
        assert!(matches!(Partition::new(vec![vec![1]]), Err(RelationError::ClassTooSmall { .. })));
        assert!(matches!(
            Partition::new(vec![vec![1, 2], vec![2, 3]]),
            Err(RelationError::DuplicateElement { element: 2 })
        ));
        assert!(matches!(Partition::new(vec![vec![4, 4]]), Err(RelationError::DuplicateElement { element: 4 })));
    }

    #[test]
    fn instance_range_check() {
        let err = Instance::new(3, vec![part(&[&[1, 3]])]).unwrap_err();
        assert!(matches!(err, RelationError::OutOfRange { element: 3, .. }));
    }

    #[test]
    fn verify_examples() {
        let one = Instance::new(2, vec![part(&[&[0, 1]])]).unwrap();
        assert!(verify_matching(&one, &Matching::new(vec![(0, 1)])).is_valid());

        let shared = Instance::new(3, vec![part(&[&[0, 1]]), part(&[&[0, 2]])]).unwrap();
        let r = verify_matching(&shared, &Matching::new(vec![(0, 1), (0, 2)]));
        assert_eq!(r.violation, Some(Violation::Repeated { element: 0, first: 0, second: 1 }));

        let apart = Instance::new(4, vec![part(&[&[0, 1]]), part(&[&[2, 3]])]).unwrap();
        assert!(verify_matching(&apart, &Matching::new(vec![(0, 1), (2, 3)])).is_valid());
        let r = verify_matching(&apart, &Matching::new(vec![(0, 1), (2, 1)]));
        assert!(matches!(r.violation, Some(Violation::Repeated { element: 1, .. })));
        let r = verify_matching(&apart, &Matching::new(vec![(0, 2), (1, 3)]));
        assert_eq!(r.violation, Some(Violation::NotEquivalent { relation: 0, a: 0, b: 2 }));
        // a pair (x, x) is caught by distinctness
        let r = verify_matching(&one, &Matching::new(vec![(0, 0)]));
        assert!(matches!(r.violation, Some(Violation::Repeated { element: 0, .. })));
    }

    #[test]
    fn normalize_split_rule() {
        let inst =
            Instance::new(12, vec![part(&[&[0, 1, 2, 3, 4]]), part(&[&[0, 1, 2, 3]]), part(&[&[5, 6, 7]])]).unwrap();
        let n = inst.normalize();
        assert_eq!(n.relations()[0].classes(), &[vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(n.relations()[1].classes(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(n.relations()[2].classes(), &[vec![5, 6, 7]]);
        let big = Instance::new(12, vec![part(&[&[0, 1, 2, 3, 4, 5, 6]])]).unwrap().normalize();
        assert_eq!(big.relations()[0].classes(), &[vec![0, 1, 2], vec![3, 4], vec![5, 6]]);
    }

    #[test]
    fn min_kernel_examples() {
        assert!(matches!(Instance::default().min_kernel(), Err(RelationError::NoRelations)));
        let one = Instance::new(2, vec![part(&[&[0, 1]])]).unwrap();
        assert_eq!(one.min_kernel().unwrap(), 2);
        let two = Instance::new(8, vec![part(&[&[0, 1], &[2, 3]]), part(&[&[0, 1, 2], &[3, 4, 5]])]).unwrap();
        assert_eq!(two.min_kernel().unwrap(), 4);
    }

    #[test]
    fn index_agrees_with_partition() {
        let p = part(&[&[0, 4, 2], &[1, 5]]);
        let idx = PartitionIndex::new(&p, 7);
        assert!(idx.equivalent(0, 4) && idx.equivalent(2, 0) && idx.equivalent(1, 5));
        assert!(!idx.equivalent(0, 1) && !idx.equivalent(3, 6));
        assert!(idx.equivalent(3, 3));
        assert!(!idx.in_kernel(6));
    }
}
