//! Partitions of `{0, .., n-1}`, viewed interchangeably as equivalence relations.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest degree for which dense relation matrices are built.
pub const RELATION_DEGREE_LIMIT: usize = 4096;

/// A partition in canonical form: blocks are sorted and numbered by their
/// least point, so two equal partitions have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// The partition `E` into singletons.
    pub fn discrete(n: usize) -> Self {
        Partition { block_of: (0..n).collect(), blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// The partition `U` with a single part (no parts when `n = 0`).
    pub fn universal(n: usize) -> Self {
        if n == 0 {
            return Partition { block_of: Vec::new(), blocks: Vec::new() };
        }
        Partition { block_of: vec![0; n], blocks: vec![(0..n).collect()] }
    }

    /// Canonical partition from arbitrary labels: points with equal labels
    /// share a block.
    pub fn from_labels<T: std::hash::Hash + Eq + Clone>(labels: &[T]) -> Self {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, l) in labels.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(l.clone()).or_insert(next);
            if id == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[id].push(x);
            block_of.push(id);
        }
        Partition { block_of, blocks }
    }

    /// Validated construction from explicit blocks.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::PointOutOfRange { point: x, degree: n });
                }
                if label[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("point {x} in two blocks")));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("point {x} not covered")));
        }
        Ok(Partition::from_labels(&label))
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.degree()
    }

    pub fn is_universal(&self) -> bool {
        self.blocks.len() <= 1
    }

    fn check_degree(&self, other: &Partition) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), found: other.degree() });
        }
        Ok(())
    }

    /// Coarsest common refinement: the non-empty intersections of parts.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_degree(other)?;
        let pairs: Vec<(usize, usize)> = (0..self.degree()).map(|x| (self.block_of[x], other.block_of[x])).collect();
        Ok(Partition::from_labels(&pairs))
    }

    /// Finest common coarsening.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_degree(other)?;
        let mut uf = UnionFind::new(self.degree());
        for p in [self, other] {
            for block in &p.blocks {
                for w in block.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        Ok(uf.into_partition())
    }

    /// `self ≼ other`: every block of `self` lies inside a block of `other`.
    pub fn is_refinement(&self, other: &Partition) -> Result<bool> {
        self.check_degree(other)?;
        Ok(self.blocks.iter().all(|b| b.iter().all(|&x| other.block_of[x] == other.block_of[b[0]])))
    }

    /// Unchecked refinement test for equal-degree partitions.
    pub(crate) fn refines(&self, other: &Partition) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&x| other.block_of[x] == other.block_of[b[0]]))
    }

    pub fn is_uniform(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Common block size of a uniform partition.
    pub fn block_size(&self) -> Option<usize> {
        if self.is_uniform() {
            Some(self.blocks.first().map_or(0, |b| b.len()))
        } else {
            None
        }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Whether the two equivalence relations commute.
    ///
    /// Inside each block of the join, every block of `self` must meet every
    /// block of `other`: the number of meet blocks there equals the product
    /// of the two block counts.
    pub fn commutes(&self, other: &Partition) -> Result<bool> {
        self.check_degree(other)?;
        let join = self.join(other)?;
        let meet = self.meet(other)?;
        let k = join.num_blocks();
        let mut count_self = vec![0usize; k];
        let mut count_other = vec![0usize; k];
        let mut count_meet = vec![0usize; k];
        for b in &self.blocks {
            count_self[join.block_of[b[0]]] += 1;
        }
        for b in &other.blocks {
            count_other[join.block_of[b[0]]] += 1;
        }
        for b in &meet.blocks {
            count_meet[join.block_of[b[0]]] += 1;
        }
        Ok((0..k).all(|j| count_self[j] * count_other[j] == count_meet[j]))
    }

    pub fn relation(&self) -> Result<BinaryRelation> {
        BinaryRelation::from_partition(self)
    }

    /// The relation `self ∘ other`.
    pub fn compose_relations(&self, other: &Partition) -> Result<BinaryRelation> {
        self.check_degree(other)?;
        self.relation()?.compose(&other.relation()?)
    }

    /// Whether `g` maps every block onto a block.
    pub fn is_invariant_under(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree() {
            return false;
        }
        self.blocks.iter().all(|b| {
            let target = self.block_of[g.apply(b[0])];
            b.len() == self.blocks[target].len() && b.iter().all(|&x| self.block_of[g.apply(x)] == target)
        })
    }

    /// Image of the partition under a permutation of the points.
    pub fn image(&self, g: &Permutation) -> Partition {
        let mut labels = vec![0usize; self.degree()];
        for x in 0..self.degree() {
            labels[g.apply(x)] = self.block_of[x];
        }
        Partition::from_labels(&labels)
    }

    /// The partition `self × other` of `Γ × Δ`, pair `(γ, δ)` being point `γ + |Γ|·δ`.
    pub fn product(&self, other: &Partition) -> Partition {
        let n = self.degree();
        let labels: Vec<(usize, usize)> =
            (0..n * other.degree()).map(|x| (self.block_of[x % n], other.block_of[x / n])).collect();
        Partition::from_labels(&labels)
    }

    /// Every partition of `{0, .., n-1}`, as restricted growth strings in
    /// lexicographic order. There are Bell(n) of them.
    pub fn all(n: usize) -> impl Iterator<Item = Partition> {
        let mut rgs = vec![0usize; n];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = Partition::from_labels(&rgs);
            // advance: bump the last position that may grow, reset the tail
            done = true;
            for i in (1..n).rev() {
                let max_before = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= max_before {
                    rgs[i] += 1;
                    rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
                    done = false;
                    break;
                }
            }
            Some(out)
        })
    }

    pub fn to_literal(&self) -> PartitionLiteral {
        PartitionLiteral { degree: self.degree(), blocks: self.blocks.clone() }
    }
}

impl Ord for Partition {
    /// Coarser partitions (fewer blocks) sort later; ties by label vector.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.num_blocks().cmp(&self.num_blocks()).then_with(|| self.block_of.cmp(&other.block_of))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            let s: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", s.join(","))?;
        }
        write!(f, "}}")
    }
}

/// JSON form `{"degree": n, "blocks": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionLiteral {
    pub degree: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl PartitionLiteral {
    pub fn to_partition(&self) -> Result<Partition> {
        Partition::from_blocks(self.degree, self.blocks.clone())
    }
}

/// Disjoint-set forest over `0..n`.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the classes of `x` and `y`; returns false if already merged.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            std::cmp::Ordering::Less => self.parent[rx] = ry,
            std::cmp::Ordering::Greater => self.parent[ry] = rx,
            std::cmp::Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Partition::from_labels(&roots)
    }
}

/// Dense boolean relation on `{0, .., n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    degree: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BinaryRelation {
    pub fn empty(degree: usize) -> Result<Self> {
        if degree > RELATION_DEGREE_LIMIT {
            return Err(Error::CapExceeded { what: "relation degree", cap: RELATION_DEGREE_LIMIT as u128 });
        }
        let words = degree.div_ceil(64);
        Ok(BinaryRelation { degree, words, bits: vec![0; words * degree] })
    }

    pub fn from_partition(p: &Partition) -> Result<Self> {
        let mut r = BinaryRelation::empty(p.degree())?;
        for b in p.blocks() {
            for &x in b {
                for &y in b {
                    r.insert(x, y);
                }
            }
        }
        Ok(r)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits[x * self.words + y / 64] |= 1 << (y % 64);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    fn row(&self, x: usize) -> &[u64] {
        &self.bits[x * self.words..(x + 1) * self.words]
    }

    /// `(α, β)` is in `self ∘ other` when some `γ` has `(α, γ) ∈ self` and `(γ, β) ∈ other`.
    pub fn compose(&self, other: &BinaryRelation) -> Result<BinaryRelation> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let mut out = BinaryRelation::empty(self.degree)?;
        for a in 0..self.degree {
            for c in 0..self.degree {
                if self.contains(a, c) {
                    let (dst, src) = (a * self.words, other.row(c));
                    for w in 0..self.words {
                        out.bits[dst + w] |= src[w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.degree * self.degree
    }
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.degree {
            let row: String = (0..self.degree).map(|y| if self.contains(x, y) { '1' } else { '0' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, blocks: Vec<Vec<usize>>) -> Partition {
        Partition::from_blocks(n, blocks).unwrap()
    }

    fn rows() -> Partition {
        p(4, vec![vec![0, 1], vec![2, 3]])
    }

    fn cols() -> Partition {
        p(4, vec![vec![0, 2], vec![1, 3]])
    }

    /// Flags of the affine plane of order 2: ordered pairs of distinct points
    /// of a 4-set; flag `(p, q)` is point `p` on line `{p, q}`.
    fn flags() -> (Partition, Partition) {
        let pairs: Vec<(usize, usize)> =
            (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        let point: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
        let line: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        (Partition::from_labels(&line), Partition::from_labels(&point))
    }

    #[test]
    fn meets() {
        assert_eq!(rows().meet(&cols()).unwrap(), Partition::discrete(4));
        assert_eq!(rows().meet(&Partition::universal(4)).unwrap(), rows());
        let a = p(6, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let b = p(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert_eq!(a.meet(&b).unwrap(), p(6, vec![vec![0, 1], vec![2], vec![3], vec![4, 5]]));
    }

    #[test]
    fn joins() {
        assert_eq!(rows().join(&cols()).unwrap(), Partition::universal(4));
        assert_eq!(rows().join(&Partition::discrete(4)).unwrap(), rows());
        let a = p(4, vec![vec![0, 1], vec![2], vec![3]]);
        let b = p(4, vec![vec![1, 2], vec![0], vec![3]]);
        assert_eq!(a.join(&b).unwrap(), p(4, vec![vec![0, 1, 2], vec![3]]));
    }

    #[test]
    fn degree_mismatch() {
        assert!(matches!(rows().meet(&Partition::discrete(3)), Err(Error::DegreeMismatch { .. })));
        assert!(rows().join(&Partition::discrete(5)).is_err());
    }

    #[test]
    fn refinement() {
        assert!(Partition::discrete(4).is_refinement(&rows()).unwrap());
        assert!(!rows().is_refinement(&cols()).unwrap());
        assert!(rows().is_refinement(&Partition::universal(4)).unwrap());
    }

    #[test]
    fn compositions() {
        let e = Partition::discrete(4);
        assert_eq!(e.compose_relations(&rows()).unwrap(), rows().relation().unwrap());
        assert!(rows().compose_relations(&cols()).unwrap().is_full());
        let (line, point) = flags();
        assert_ne!(line.compose_relations(&point).unwrap(), point.compose_relations(&line).unwrap());
    }

    #[test]
    fn commuting() {
        assert!(rows().commutes(&cols()).unwrap());
        let fine = p(4, vec![vec![0, 1], vec![2], vec![3]]);
        assert!(fine.commutes(&rows()).unwrap());
        let (line, point) = flags();
        assert!(!line.commutes(&point).unwrap());
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=7).map(|n| Partition::all(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203, 877]);
        let mut seen = std::collections::HashSet::new();
        assert!(Partition::all(6).all(|p| seen.insert(p)));
    }

    #[test]
    fn products() {
        let e2 = Partition::discrete(2);
        let u3 = Partition::universal(3);
        let p = e2.product(&u3);
        assert_eq!(p.degree(), 6);
        assert_eq!(p, Partition::from_blocks(6, vec![vec![0, 2, 4], vec![1, 3, 5]]).unwrap());
        assert_eq!(Partition::universal(2).product(&u3), Partition::universal(6));
    }

    #[test]
    fn uniformity() {
        assert!(Partition::discrete(5).is_uniform());
        assert!(Partition::universal(5).is_uniform());
        assert!(!p(3, vec![vec![0], vec![1, 2]]).is_uniform());
        let five_by_three = Partition::from_labels(&(0..15).map(|x| x / 3).collect::<Vec<_>>());
        assert!(five_by_three.is_uniform());
        assert_eq!(five_by_three.block_size(), Some(3));
    }

    #[test]
    fn invalid_blocks_are_rejected() {
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn literal_roundtrip() {
        let json = r#"{"degree": 4, "blocks": [[2, 0], [3, 1]]}"#;
        let lit: PartitionLiteral = serde_json::from_str(json).unwrap();
        assert_eq!(lit.to_partition().unwrap(), cols());
    }

    fn arb_partition(n: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0..n, n).prop_map(|labels| Partition::from_labels(&labels))
    }

    fn arb_triple() -> impl Strategy<Value = (Partition, Partition, Partition)> {
        (1usize..=12).prop_flat_map(|n| (arb_partition(n), arb_partition(n), arb_partition(n)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn lattice_laws((a, b, c) in arb_triple()) {
            prop_assert_eq!(a.meet(&b).unwrap(), b.meet(&a).unwrap());
            prop_assert_eq!(a.join(&b).unwrap(), b.join(&a).unwrap());
            prop_assert_eq!(a.meet(&b.meet(&c).unwrap()).unwrap(), a.meet(&b).unwrap().meet(&c).unwrap());
            prop_assert_eq!(a.join(&b.join(&c).unwrap()).unwrap(), a.join(&b).unwrap().join(&c).unwrap());
            prop_assert_eq!(a.meet(&a).unwrap(), a.clone());
            prop_assert_eq!(a.join(&a).unwrap(), a.clone());
            prop_assert_eq!(a.join(&a.meet(&b).unwrap()).unwrap(), a.clone());
            prop_assert_eq!(a.meet(&a.join(&b).unwrap()).unwrap(), a.clone());
            prop_assert!(a.meet(&b).unwrap().is_refinement(&a).unwrap());
            prop_assert!(a.is_refinement(&a.join(&b).unwrap()).unwrap());
        }

        #[test]
        fn commuting_three_way_agreement((a, b, _c) in arb_triple()) {
            let ab = a.compose_relations(&b).unwrap();
            let ba = b.compose_relations(&a).unwrap();
            let join = a.join(&b).unwrap().relation().unwrap();
            let fast = a.commutes(&b).unwrap();
            prop_assert_eq!(fast, ab == ba);
            prop_assert_eq!(fast, ab == join);
        }
    }
}
