//! Finite partial orders on `{0, .., N-1}` stored as full `⊑` matrices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest poset whose down-sets are enumerated.
pub const DOWNSET_SIZE_LIMIT: usize = 20;
/// Default cap on the number of linear extensions.
pub const DEFAULT_EXTENSION_CAP: usize = 10_000;
/// Largest poset representable with [`NodeSet`].
pub const MAX_POSET_SIZE: usize = 64;

/// A subset of poset elements as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(n: usize) -> NodeSet {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> NodeSet {
        NodeSet(1 << i)
    }

    pub fn from_indices(items: impl IntoIterator<Item = usize>) -> NodeSet {
        NodeSet(items.into_iter().fold(0, |acc, i| acc | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// `leq[i]` is the set of `j` with `i ⊑ j`.
    leq: Vec<NodeSet>,
}

impl Poset {
    /// Reflexive-transitive closure of cover pairs `(i, j)` meaning `i ⊏ j`.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Poset> {
        if n > MAX_POSET_SIZE {
            return Err(Error::CapExceeded { what: "poset size", cap: MAX_POSET_SIZE as u128 });
        }
        let mut leq: Vec<NodeSet> = (0..n).map(NodeSet::singleton).collect();
        for &(i, j) in covers {
            if i >= n || j >= n {
                return Err(Error::PointOutOfRange { point: i.max(j), degree: n });
            }
            leq[i].insert(j);
        }
        // Warshall closure on bitsets.
        for k in 0..n {
            for i in 0..n {
                if leq[i].contains(k) {
                    leq[i] = leq[i].union(leq[k]);
                }
            }
        }
        for i in 0..n {
            for j in leq[i].iter() {
                if j != i && leq[j].contains(i) {
                    return Err(Error::PosetCycle(format!("m{} and m{} are mutually below", i + 1, j + 1)));
                }
            }
        }
        Ok(Poset { labels: default_labels(n), leq })
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::from_covers(n, &[]).expect("antichain is a poset")
    }

    /// The chain `0 ⊏ 1 ⊏ .. ⊏ n-1`.
    pub fn chain(n: usize) -> Poset {
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_covers(n, &covers).expect("chain is a poset")
    }

    /// Builds a poset from a relation matrix, checking the partial order axioms.
    pub fn from_matrix(leq: &[Vec<bool>]) -> Result<Poset> {
        let n = leq.len();
        let mut covers = Vec::new();
        for (i, row) in leq.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DegreeMismatch { expected: n, found: row.len() });
            }
            for (j, &b) in row.iter().enumerate() {
                if b && i != j {
                    covers.push((i, j));
                }
            }
        }
        let p = Poset::from_covers(n, &covers)?;
        for i in 0..n {
            for j in 0..n {
                if i != j && p.leq(i, j) != leq[i][j] {
                    return Err(Error::Hypothesis("relation is not transitive".into()));
                }
            }
        }
        Ok(p)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Poset> {
        if labels.len() != self.size() {
            return Err(Error::DegreeMismatch { expected: self.size(), found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.leq.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `m_i ⊑ m_j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i].contains(j)
    }

    /// `m_i ⊏ m_j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn all(&self) -> NodeSet {
        NodeSet::full(self.size())
    }

    /// `A(i)`: elements strictly above `i`.
    pub fn ancestors_strict(&self, i: usize) -> NodeSet {
        let mut s = self.leq[i];
        s.remove(i);
        s
    }

    /// `A[i] = A(i) ∪ {i}`.
    pub fn ancestors_weak(&self, i: usize) -> NodeSet {
        self.leq[i]
    }

    /// `D(i)`: elements strictly below `i`.
    pub fn descendants_strict(&self, i: usize) -> NodeSet {
        let mut s = self.descendants_weak(i);
        s.remove(i);
        s
    }

    /// `D[i] = D(i) ∪ {i}`.
    pub fn descendants_weak(&self, i: usize) -> NodeSet {
        NodeSet::from_indices((0..self.size()).filter(|&j| self.leq(j, i)))
    }

    /// Cover pairs `(i, j)`: `i ⊏ j` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in self.ancestors_strict(i).iter() {
                let between = self.ancestors_strict(i).intersection(self.descendants_strict(j));
                if between.is_empty() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn minimal_elements(&self, within: NodeSet) -> NodeSet {
        NodeSet::from_indices(within.iter().filter(|&i| self.descendants_strict(i).intersection(within).is_empty()))
    }

    pub fn maximal_elements(&self, within: NodeSet) -> NodeSet {
        NodeSet::from_indices(within.iter().filter(|&i| self.ancestors_strict(i).intersection(within).is_empty()))
    }

    pub fn is_downset(&self, set: NodeSet) -> bool {
        set.iter().all(|i| self.descendants_weak(i).is_subset(set))
    }

    pub fn is_upset(&self, set: NodeSet) -> bool {
        set.iter().all(|i| self.ancestors_weak(i).is_subset(set))
    }

    /// All down-sets, ordered by size and then lexicographically by sorted elements.
    pub fn downsets(&self) -> Result<Vec<NodeSet>> {
        let n = self.size();
        if n > DOWNSET_SIZE_LIMIT {
            return Err(Error::CapExceeded {
                what: "poset size for down-set enumeration",
                cap: DOWNSET_SIZE_LIMIT as u128,
            });
        }
        let mut out = Vec::new();
        self.downsets_rec(0, NodeSet::EMPTY, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
        Ok(out)
    }

    // Decides elements in index order; `i` may join only if its lower
    // elements with smaller index are in, and larger-index ones are checked
    // when they are decided.
    fn downsets_rec(&self, i: usize, current: NodeSet, out: &mut Vec<NodeSet>) {
        if i == self.size() {
            if self.is_downset(current) {
                out.push(current);
            }
            return;
        }
        let below = self.descendants_strict(i);
        let below_decided = NodeSet(below.0 & ((1u64 << i) - 1));
        if below_decided.is_subset(current) {
            let mut with = current;
            with.insert(i);
            self.downsets_rec(i + 1, with, out);
        }
        // Excluding `i` forces every element above it out.
        let above_decided = NodeSet(self.ancestors_strict(i).0 & ((1u64 << i) - 1));
        if above_decided.intersection(current).is_empty() {
            self.downsets_rec(i + 1, current, out);
        }
    }

    /// All linear extensions as sequences listing elements from bottom to top.
    pub fn linear_extensions(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.size());
        self.extend(self.all(), &mut prefix, &mut out, cap)?;
        Ok(out)
    }

    fn extend(&self, remaining: NodeSet, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) -> Result<()> {
        if remaining.is_empty() {
            if out.len() == cap {
                return Err(Error::CapExceeded { what: "linear extensions", cap: cap as u128 });
            }
            out.push(prefix.clone());
            return Ok(());
        }
        for m in self.minimal_elements(remaining).iter() {
            prefix.push(m);
            let mut rest = remaining;
            rest.remove(m);
            self.extend(rest, prefix, out, cap)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Total order given as a bottom-to-top sequence, on the same labels.
    pub fn from_linear_order(&self, order: &[usize]) -> Result<Poset> {
        let covers: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        Poset::from_covers(self.size(), &covers)?.with_labels(self.labels.clone())
    }

    /// Relation-wise intersection of two orders on the same ground set.
    pub fn intersect(&self, other: &Poset) -> Result<Poset> {
        if self.size() != other.size() || self.labels != other.labels {
            return Err(Error::GroundSetMismatch);
        }
        let leq = self.leq.iter().zip(&other.leq).map(|(a, b)| a.intersection(*b)).collect();
        Ok(Poset { labels: self.labels.clone(), leq })
    }

    /// Sub-poset on the given elements, relabelled `0..k` in increasing index order.
    pub fn restrict(&self, keep: NodeSet) -> Poset {
        let idx = keep.to_vec();
        let leq = idx
            .iter()
            .map(|&i| NodeSet::from_indices(idx.iter().enumerate().filter(|&(_, &j)| self.leq(i, j)).map(|(k, _)| k)))
            .collect();
        Poset { labels: idx.iter().map(|&i| self.labels[i].clone()).collect(), leq }
    }

    /// Whether some bijection of indices carries one order onto the other.
    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        let n = self.size();
        if n != other.size() || self.covers().len() != other.covers().len() {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.iso_rec(other, 0, &mut map, &mut used)
    }

    fn iso_rec(&self, other: &Poset, i: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        if i == self.size() {
            return true;
        }
        for t in 0..self.size() {
            if used[t] {
                continue;
            }
            let consistent =
                (0..i).all(|j| self.leq(i, j) == other.leq(t, map[j]) && self.leq(j, i) == other.leq(map[j], t));
            if consistent {
                map[i] = t;
                used[t] = true;
                if self.iso_rec(other, i + 1, map, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        false
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            elements: self.labels.clone(),
            covers: self.covers().into_iter().map(|(i, j)| (self.labels[i].clone(), self.labels[j].clone())).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Poset> {
        serde_json::from_str::<PosetFile>(text)?.to_poset()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("poset serialises")
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("m{i}")).collect()
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> =
            self.covers().into_iter().map(|(i, j)| format!("{}<{}", self.labels[i], self.labels[j])).collect();
        write!(f, "Poset[{}; {}]", self.labels.join(","), covers.join(","))
    }
}

/// JSON form `{"elements": ["m1", ..], "covers": [["m1", "m3"], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

impl PosetFile {
    pub fn to_poset(&self) -> Result<Poset> {
        let find =
            |l: &str| self.elements.iter().position(|e| e == l).ok_or_else(|| Error::UnknownElement(l.to_string()));
        let mut covers = Vec::new();
        for (a, b) in &self.covers {
            covers.push((find(a)?, find(b)?));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.elements.iter().find(|e| !seen.insert(*e)) {
            return Err(Error::Parse(format!("duplicate element {dup}")));
        }
        Poset::from_covers(self.elements.len(), &covers)?.with_labels(self.elements.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v_poset() -> Poset {
        Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap()
    }

    fn set(items: &[usize]) -> NodeSet {
        NodeSet::from_indices(items.iter().copied())
    }

    #[test]
    fn construction() {
        let a = Poset::from_covers(2, &[]).unwrap();
        assert!(!a.leq(0, 1) && !a.leq(1, 0));
        let c = Poset::from_covers(2, &[(0, 1)]).unwrap();
        assert!(c.lt(0, 1));
        let v = v_poset();
        assert!(v.lt(0, 2) && v.lt(1, 2) && !v.leq(0, 1));
        assert_eq!(v.labels(), &["m1", "m2", "m3"]);
    }

    #[test]
    fn cycles_are_rejected() {
        assert!(matches!(Poset::from_covers(3, &[(0, 1), (1, 2), (2, 0)]), Err(Error::PosetCycle(_))));
    }

    #[test]
    fn downset_counts() {
        assert_eq!(Poset::antichain(2).downsets().unwrap().len(), 4);
        assert_eq!(Poset::chain(2).downsets().unwrap().len(), 3);
        let d = v_poset().downsets().unwrap();
        assert_eq!(d, vec![set(&[]), set(&[0]), set(&[1]), set(&[0, 1]), set(&[0, 1, 2])]);
    }

    #[test]
    fn downset_cap() {
        assert!(Poset::antichain(21).downsets().is_err());
    }

    #[test]
    fn ancestors_and_descendants() {
        let v = v_poset();
        assert_eq!(v.ancestors_strict(0), set(&[2]));
        assert_eq!(v.descendants_strict(0), set(&[]));
        assert_eq!(v.ancestors_weak(0), set(&[0, 2]));
        let c = Poset::chain(2);
        assert_eq!(c.ancestors_strict(1), set(&[]));
        assert_eq!(c.descendants_strict(1), set(&[0]));
        let a = Poset::antichain(3);
        assert!((0..3).all(|i| a.ancestors_strict(i).is_empty()));
    }

    #[test]
    fn extensions() {
        assert_eq!(Poset::antichain(2).linear_extensions(DEFAULT_EXTENSION_CAP).unwrap().len(), 2);
        assert_eq!(Poset::chain(3).linear_extensions(DEFAULT_EXTENSION_CAP).unwrap().len(), 1);
        let v = v_poset().linear_extensions(DEFAULT_EXTENSION_CAP).unwrap();
        assert_eq!(v, vec![vec![0, 1, 2], vec![1, 0, 2]]);
        assert!(Poset::antichain(8).linear_extensions(100).is_err());
    }

    #[test]
    fn intersections() {
        let up = Poset::chain(2);
        let down = Poset::from_covers(2, &[(1, 0)]).unwrap();
        assert_eq!(up.intersect(&down).unwrap(), Poset::antichain(2));
        assert_eq!(up.intersect(&up).unwrap(), up);
        let v = v_poset();
        let exts = v.linear_extensions(DEFAULT_EXTENSION_CAP).unwrap();
        let a = v.from_linear_order(&exts[0]).unwrap();
        let b = v.from_linear_order(&exts[1]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), v);
        assert!(matches!(up.intersect(&Poset::chain(3)), Err(Error::GroundSetMismatch)));
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"elements": ["m1", "m2", "m3"], "covers": [["m1", "m3"], ["m2", "m3"]]}"#;
        let p = Poset::from_json(text).unwrap();
        assert_eq!(p, v_poset());
        assert_eq!(Poset::from_json(&p.to_json()).unwrap(), p);
        assert!(matches!(
            Poset::from_json(r#"{"elements": ["a"], "covers": [["a", "b"]]}"#),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn isomorphism() {
        let v = v_poset();
        let v2 = Poset::from_covers(3, &[(2, 0), (1, 0)]).unwrap();
        assert!(v.is_isomorphic(&v2));
        assert!(!v.is_isomorphic(&Poset::chain(3)));
    }

    fn arb_poset() -> impl Strategy<Value = Poset> {
        (1usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
                // orient every chosen pair upward by index to stay acyclic
                let covers: Vec<(usize, usize)> =
                    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| bits[i * n + j]).collect();
                Poset::from_covers(n, &covers).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn poset_is_intersection_of_its_extensions(p in arb_poset()) {
            let exts = p.linear_extensions(DEFAULT_EXTENSION_CAP).unwrap();
            let mut acc = p.from_linear_order(&exts[0]).unwrap();
            for e in &exts[1..] {
                acc = acc.intersect(&p.from_linear_order(e).unwrap()).unwrap();
            }
            prop_assert_eq!(acc, p);
        }

        #[test]
        fn downsets_closed_under_union_and_intersection(p in arb_poset()) {
            let d = p.downsets().unwrap();
            let brute = (0u64..1 << p.size()).filter(|&b| p.is_downset(NodeSet(b))).count();
            prop_assert_eq!(d.len(), brute);
            for a in &d {
                for b in &d {
                    prop_assert!(d.contains(&a.union(*b)));
                    prop_assert!(d.contains(&a.intersection(*b)));
                }
            }
        }

        #[test]
        fn ancestor_descendant_duality(p in arb_poset()) {
            for i in 0..p.size() {
                for j in 0..p.size() {
                    prop_assert_eq!(p.ancestors_strict(i).contains(j), p.descendants_strict(j).contains(i));
                }
            }
        }
    }
}
