//! Finite lattices, abstract (meet/join tables) and of partitions.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::poset::{NodeSet, Poset};

/// Default cap on the number of elements produced by [`PartitionLattice::close`].
pub const DEFAULT_LATTICE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ForbiddenKind {
    P5,
    N3,
}

/// A five-element sublattice. For `P5` the elements are
/// `[bottom, low, high, side, top]` with `low < high`; for `N3` they are
/// `[bottom, x, y, z, top]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: ForbiddenKind,
    pub elements: [usize; 5],
}

/// A join-indecomposable element with its unique lower cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JoinIndecomposable {
    pub element: usize,
    pub predecessor: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractLattice {
    size: usize,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: usize,
    top: usize,
}

impl AbstractLattice {
    /// Builds a lattice from its meet and join tables, checking the axioms.
    pub fn from_tables(meet: Vec<Vec<usize>>, join: Vec<Vec<usize>>) -> Result<AbstractLattice> {
        let k = meet.len();
        if k == 0 || join.len() != k || meet.iter().chain(&join).any(|r| r.len() != k) {
            return Err(Error::Hypothesis("meet and join tables must be square and non-empty".into()));
        }
        let flat = |t: &Vec<Vec<usize>>| t.iter().flatten().map(|&x| x as u32).collect::<Vec<u32>>();
        let mut l = AbstractLattice { size: k, meet: flat(&meet), join: flat(&join), bottom: 0, top: 0 };
        if l.meet.iter().chain(&l.join).any(|&x| x as usize >= k) {
            return Err(Error::Hypothesis("table entry out of range".into()));
        }
        l.check_axioms()?;
        l.find_extremes();
        Ok(l)
    }

    /// Tables known to come from a lattice.
    pub(crate) fn from_trusted_tables(size: usize, meet: Vec<u32>, join: Vec<u32>) -> AbstractLattice {
        let mut l = AbstractLattice { size, meet, join, bottom: 0, top: 0 };
        l.find_extremes();
        l
    }

    fn find_extremes(&mut self) {
        let (l, k) = (&*self, self.size);
        let bottom = (0..k).fold(0, |acc, a| l.meet(acc, a));
        let top = (0..k).fold(0, |acc, a| l.join(acc, a));
        self.bottom = bottom;
        self.top = top;
    }

    /// Builds a lattice from a partial order matrix by computing glbs and lubs.
    pub fn from_order(leq: &[Vec<bool>]) -> Result<AbstractLattice> {
        let k = leq.len();
        let bound = |a: usize, b: usize, lower: bool| -> Result<usize> {
            let rel = |x: usize, y: usize| if lower { leq[x][y] } else { leq[y][x] };
            let common: Vec<usize> = (0..k).filter(|&c| rel(c, a) && rel(c, b)).collect();
            common.iter().copied().find(|&c| common.iter().all(|&d| rel(d, c))).ok_or_else(|| {
                Error::Hypothesis(format!("elements {a} and {b} have no {}", if lower { "meet" } else { "join" }))
            })
        };
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for a in 0..k {
            for b in 0..k {
                meet[a][b] = bound(a, b, true)?;
                join[a][b] = bound(a, b, false)?;
            }
        }
        AbstractLattice::from_tables(meet, join)
    }

    /// The pentagon `0 < a < c < 1`, `0 < b < 1`, indexed `[0, a, c, b, 1]`.
    pub fn pentagon() -> AbstractLattice {
        AbstractLattice::from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    }

    /// The diamond with three atoms, indexed `[0, x, y, z, 1]`.
    pub fn diamond() -> AbstractLattice {
        AbstractLattice::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
    }

    fn from_covers(k: usize, covers: &[(usize, usize)]) -> AbstractLattice {
        let p = Poset::from_covers(k, covers).expect("valid covers");
        let leq: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| p.leq(i, j)).collect()).collect();
        AbstractLattice::from_order(&leq).expect("valid lattice")
    }

    /// The lattice of down-sets of a poset, with the down-set of each element.
    pub fn of_downsets(poset: &Poset) -> Result<(AbstractLattice, Vec<NodeSet>)> {
        let sets = poset.downsets()?;
        let index: HashMap<NodeSet, usize> = sets.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let k = sets.len();
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for a in 0..k {
            for b in 0..k {
                meet[a][b] = index[&sets[a].intersection(sets[b])];
                join[a][b] = index[&sets[a].union(sets[b])];
            }
        }
        Ok((AbstractLattice::from_tables(meet, join)?, sets))
    }

    fn check_axioms(&self) -> Result<()> {
        let k = self.size;
        let bad = |what: &str| Err(Error::Hypothesis(format!("lattice axiom fails: {what}")));
        for a in 0..k {
            if self.meet(a, a) != a || self.join(a, a) != a {
                return bad("idempotence");
            }
            for b in 0..k {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return bad("commutativity");
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return bad("absorption");
                }
                for c in 0..k {
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        return bad("associativity");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b] as usize
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b] as usize
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    pub fn lower_covers(&self, a: usize) -> Vec<usize> {
        let below: Vec<usize> = (0..self.size).filter(|&b| b != a && self.leq(b, a)).collect();
        below.iter().copied().filter(|&b| !below.iter().any(|&c| c != b && self.leq(b, c))).collect()
    }

    /// Cover pairs `(lower, upper)`.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        (0..self.size).flat_map(|a| self.lower_covers(a).into_iter().map(move |b| (b, a))).collect()
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn ranks(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&a| (0..self.size).filter(|&b| self.leq(b, a)).count());
        let mut rank = vec![0; self.size];
        for &a in &order {
            rank[a] = self.lower_covers(a).iter().map(|&b| rank[b] + 1).max().unwrap_or(0);
        }
        rank
    }

    pub fn is_modular(&self) -> bool {
        let k = self.size;
        (0..k).all(|a| {
            (0..k)
                .filter(|&c| self.leq(a, c))
                .all(|c| (0..k).all(|b| self.join(a, self.meet(b, c)) == self.meet(self.join(a, b), c)))
        })
    }

    pub fn is_distributive(&self) -> bool {
        let k = self.size;
        (0..k).all(|a| {
            (0..k).all(|b| (0..k).all(|c| self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))))
        })
    }

    fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// A `P5` sublattice when the lattice is not modular, else an `N3`
    /// sublattice when it is not distributive, else `None`.
    pub fn find_forbidden_sublattice(&self) -> Option<Witness> {
        let k = self.size;
        for low in 0..k {
            for high in (0..k).filter(|&h| h != low && self.leq(low, h)) {
                for side in (0..k).filter(|&s| !self.comparable(s, low) && !self.comparable(s, high)) {
                    let (bot, top) = (self.meet(low, side), self.join(low, side));
                    if self.meet(high, side) == bot && self.join(high, side) == top {
                        return Some(Witness { kind: ForbiddenKind::P5, elements: [bot, low, high, side, top] });
                    }
                }
            }
        }
        for x in 0..k {
            for y in (x + 1..k).filter(|&y| !self.comparable(x, y)) {
                let (bot, top) = (self.meet(x, y), self.join(x, y));
                for z in (y + 1..k).filter(|&z| !self.comparable(x, z) && !self.comparable(y, z)) {
                    if self.meet(x, z) == bot
                        && self.meet(y, z) == bot
                        && self.join(x, z) == top
                        && self.join(y, z) == top
                    {
                        return Some(Witness { kind: ForbiddenKind::N3, elements: [bot, x, y, z, top] });
                    }
                }
            }
        }
        None
    }

    /// Elements other than the bottom with exactly one lower cover.
    pub fn join_indecomposables(&self) -> Vec<JoinIndecomposable> {
        (0..self.size)
            .filter(|&m| m != self.bottom)
            .filter_map(|m| match self.lower_covers(m).as_slice() {
                [p] => Some(JoinIndecomposable { element: m, predecessor: *p }),
                _ => None,
            })
            .collect()
    }

    /// The unique element covered by a join-indecomposable `m`.
    pub fn predecessor(&self, m: usize) -> Result<usize> {
        match self.lower_covers(m).as_slice() {
            [p] if m != self.bottom => Ok(*p),
            _ => Err(Error::NotJoinIndecomposable { element: m }),
        }
    }

    /// The join-indecomposables ordered by the lattice order, and their
    /// element indices (poset node `i` is lattice element `map[i]`).
    pub fn ji_poset(&self) -> (Poset, Vec<usize>) {
        let ji: Vec<usize> = self.join_indecomposables().iter().map(|j| j.element).collect();
        let covers: Vec<(usize, usize)> = (0..ji.len())
            .flat_map(|i| (0..ji.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq(ji[i], ji[j]))
            .collect();
        let poset = Poset::from_covers(ji.len(), &covers).expect("lattice order is acyclic");
        (poset, ji)
    }

    /// Checks that `a ↦ {join-indecomposables below a}` is an isomorphism onto
    /// the down-set lattice of the join-indecomposable poset.
    pub fn birkhoff_check(&self) -> Result<bool> {
        if !self.is_distributive() {
            return Err(Error::NotDistributive);
        }
        let (poset, ji) = self.ji_poset();
        let image: Vec<NodeSet> =
            (0..self.size).map(|a| NodeSet::from_indices((0..ji.len()).filter(|&i| self.leq(ji[i], a)))).collect();
        let downsets = poset.downsets()?;
        let mut seen = std::collections::HashSet::new();
        let bijective = image.iter().all(|s| poset.is_downset(*s) && seen.insert(*s)) && downsets.len() == self.size;
        let homomorphic = (0..self.size).all(|a| {
            (0..self.size).all(|b| {
                image[self.meet(a, b)] == image[a].intersection(image[b])
                    && image[self.join(a, b)] == image[a].union(image[b])
            })
        });
        Ok(bijective && homomorphic)
    }

    /// Sublattice `[lo, hi]`, with the original index of each element.
    pub fn interval(&self, lo: usize, hi: usize) -> (AbstractLattice, Vec<usize>) {
        let members: Vec<usize> = (0..self.size).filter(|&x| self.leq(lo, x) && self.leq(x, hi)).collect();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            members.iter().map(|&a| members.iter().map(|&b| pos[&f(a, b)]).collect()).collect()
        };
        let l = AbstractLattice::from_tables(table(&|a, b| self.meet(a, b)), table(&|a, b| self.join(a, b)))
            .expect("interval is a lattice");
        (l, members)
    }

    /// The order as a [`Poset`] (at most 64 elements).
    pub fn as_poset(&self) -> Result<Poset> {
        let covers = self.hasse();
        Poset::from_covers(self.size, &covers)
    }

    /// Order isomorphism test by backtracking; intended for small lattices.
    pub fn is_isomorphic(&self, other: &AbstractLattice) -> bool {
        match (self.as_poset(), other.as_poset()) {
            (Ok(a), Ok(b)) => a.is_isomorphic(&b),
            _ => false,
        }
    }
}

/// A lattice of partitions of `{0, .., n-1}` closed under meet and join.
#[derive(Debug, Clone)]
pub struct PartitionLattice {
    degree: usize,
    elements: Vec<Partition>,
    index: HashMap<Partition, usize>,
    lattice: AbstractLattice,
}

impl PartitionLattice {
    /// Smallest family containing the inputs, `E` and `U` that is closed
    /// under meet and join.
    pub fn close(degree: usize, partitions: &[Partition], cap: usize) -> Result<PartitionLattice> {
        let mut elements: Vec<Partition> = Vec::new();
        let mut index: HashMap<Partition, usize> = HashMap::new();
        let mut push = |p: Partition, elements: &mut Vec<Partition>| -> Result<()> {
            if p.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: p.degree() });
            }
            if !index.contains_key(&p) {
                if elements.len() == cap {
                    return Err(Error::CapExceeded { what: "lattice elements", cap: cap as u128 });
                }
                index.insert(p.clone(), elements.len());
                elements.push(p);
            }
            Ok(())
        };
        push(Partition::discrete(degree), &mut elements)?;
        push(Partition::universal(degree), &mut elements)?;
        for p in partitions {
            push(p.clone(), &mut elements)?;
        }
        let mut done = 0;
        while done < elements.len() {
            let a = elements[done].clone();
            for b in 0..=done {
                let m = a.meet(&elements[b])?;
                let j = a.join(&elements[b])?;
                push(m, &mut elements)?;
                push(j, &mut elements)?;
            }
            done += 1;
        }
        PartitionLattice::from_closed(degree, elements)
    }

    /// Builds the lattice from a family already closed under meet and join
    /// and containing `E` and `U`.
    pub fn from_closed(degree: usize, mut elements: Vec<Partition>) -> Result<PartitionLattice> {
        elements.sort();
        elements.dedup();
        let index: HashMap<Partition, usize> = elements.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let k = elements.len();
        let lookup = |p: Partition| {
            index.get(&p).copied().ok_or_else(|| Error::Hypothesis(format!("family not closed: {p} missing")))
        };
        if !index.contains_key(&Partition::discrete(degree)) || !index.contains_key(&Partition::universal(degree)) {
            return Err(Error::Hypothesis("family must contain E and U".into()));
        }
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for a in 0..k {
            for b in a..k {
                let m = lookup(elements[a].meet(&elements[b])?)?;
                let j = lookup(elements[a].join(&elements[b])?)?;
                meet[a][b] = m;
                meet[b][a] = m;
                join[a][b] = j;
                join[b][a] = j;
            }
        }
        let flat = |t: Vec<Vec<usize>>| t.into_iter().flatten().map(|x| x as u32).collect();
        let lattice = AbstractLattice::from_trusted_tables(k, flat(meet), flat(join));
        Ok(PartitionLattice { degree, elements, index, lattice })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements sorted with `E` first and `U` last.
    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.index.contains_key(p)
    }

    pub fn abstract_lattice(&self) -> &AbstractLattice {
        &self.lattice
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.lattice.meet(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.lattice.join(a, b)
    }

    pub fn hasse(&self) -> Vec<(usize, usize)> {
        self.lattice.hasse()
    }

    pub fn is_modular(&self) -> bool {
        self.lattice.is_modular()
    }

    pub fn is_distributive(&self) -> bool {
        self.lattice.is_distributive()
    }

    pub fn find_forbidden_sublattice(&self) -> Option<Witness> {
        self.lattice.find_forbidden_sublattice()
    }

    pub fn join_indecomposables(&self) -> Vec<JoinIndecomposable> {
        self.lattice.join_indecomposables()
    }

    pub fn ji_poset(&self) -> (Poset, Vec<usize>) {
        self.lattice.ji_poset()
    }

    pub fn birkhoff_check(&self) -> Result<bool> {
        self.lattice.birkhoff_check()
    }

    /// Hasse diagram in Graphviz DOT, bottom to top.
    pub fn to_dot(&self) -> String {
        let ranks = self.lattice.ranks();
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, p) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", size_label(p));
        }
        let max_rank = ranks.iter().copied().max().unwrap_or(0);
        for r in 0..=max_rank {
            let same: Vec<String> = (0..self.len()).filter(|&i| ranks[i] == r).map(|i| format!("n{i}")).collect();
            let _ = writeln!(out, "  {{ rank=same; {} }}", same.join("; "));
        }
        for (lo, hi) in self.hasse() {
            let _ = writeln!(out, "  n{lo} -> n{hi};");
        }
        out.push_str("}\n");
        out
    }
}

/// Block sizes as `size^count` factors, e.g. `3^5` or `1^2 2^1`.
pub fn size_label(p: &Partition) -> String {
    let mut sizes = p.block_sizes();
    sizes.sort_unstable();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        let j = sizes[i..].iter().take_while(|&&s| s == sizes[i]).count();
        parts.push(format!("{}^{}", sizes[i], j));
        i += j;
    }
    parts.join(" ")
}
