//! Orthogonal and poset block structures and their association schemes.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ObsViolation, Result};
use crate::lattice::{PartitionLattice, DEFAULT_LATTICE_CAP};
use crate::partition::Partition;
use crate::poset::{NodeSet, Poset};

/// Default cap on the number of points of a poset block structure.
pub const DEFAULT_DEGREE_CAP: usize = 1 << 16;

/// Points of `Ω_1 × .. × Ω_N` as integers, coordinate 0 varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl MixedRadix {
    pub fn new(sizes: &[usize], cap: usize) -> Result<MixedRadix> {
        let mut strides = Vec::with_capacity(sizes.len());
        let mut total: usize = 1;
        for &n in sizes {
            strides.push(total);
            total = total
                .checked_mul(n)
                .filter(|&t| t <= cap)
                .ok_or(Error::CapExceeded { what: "product degree", cap: cap as u128 })?;
        }
        Ok(MixedRadix { sizes: sizes.to_vec(), strides, total })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn coordinate(&self, point: usize, i: usize) -> usize {
        point / self.strides[i] % self.sizes[i]
    }

    pub fn decode(&self, point: usize) -> Vec<usize> {
        (0..self.sizes.len()).map(|i| self.coordinate(point, i)).collect()
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// The point with coordinates in `set` replaced by zero.
    pub fn clear(&self, point: usize, set: NodeSet) -> usize {
        set.iter().fold(point, |p, i| p - self.coordinate(point, i) * self.strides[i])
    }

    /// Number of points of the product over `set`.
    pub fn size_of(&self, set: NodeSet) -> usize {
        set.iter().map(|i| self.sizes[i]).product()
    }
}

/// An orthogonal block structure: a lattice of uniform, pairwise commuting
/// partitions containing `E` and `U`.
#[derive(Debug, Clone)]
pub struct Obs {
    lattice: PartitionLattice,
}

impl Obs {
    /// Closes the family and checks uniformity and commuting.
    pub fn validate(degree: usize, partitions: &[Partition]) -> Result<Obs> {
        Obs::validate_with_cap(degree, partitions, DEFAULT_LATTICE_CAP)
    }

    pub fn validate_with_cap(degree: usize, partitions: &[Partition], cap: usize) -> Result<Obs> {
        let lattice = PartitionLattice::close(degree, partitions, cap)?;
        Obs::from_lattice(lattice)
    }

    /// Checks a lattice against the uniformity and commuting axioms.
    pub fn from_lattice(lattice: PartitionLattice) -> Result<Obs> {
        let els = lattice.elements();
        if let Some(p) = els.iter().find(|p| !p.is_uniform()) {
            return Err(Error::NotObs(ObsViolation::NonUniform { element: p.clone() }));
        }
        for (i, a) in els.iter().enumerate() {
            for b in &els[i + 1..] {
                if !a.commutes(b)? {
                    return Err(Error::NotObs(ObsViolation::NonCommuting { first: a.clone(), second: b.clone() }));
                }
            }
        }
        Ok(Obs { lattice })
    }

    /// `{E, U}` on `n` points.
    pub fn trivial(n: usize) -> Obs {
        Obs::validate(n, &[]).expect("trivial structure is orthogonal")
    }

    pub fn degree(&self) -> usize {
        self.lattice.degree()
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &PartitionLattice {
        &self.lattice
    }

    pub fn partitions(&self) -> &[Partition] {
        self.lattice.elements()
    }

    /// Whether the structure is a poset block structure (distributive lattice).
    pub fn is_pbs(&self) -> bool {
        self.lattice.is_distributive()
    }

    pub fn to_file(&self) -> ObsFile {
        ObsFile { degree: self.degree(), partitions: self.partitions().iter().map(|p| p.blocks().to_vec()).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("structure serialises")
    }
}

/// JSON form `{"degree": n, "partitions": [[[..], ..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsFile {
    pub degree: usize,
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl ObsFile {
    pub fn to_partitions(&self) -> Result<Vec<Partition>> {
        self.partitions.iter().map(|b| Partition::from_blocks(self.degree, b.clone())).collect()
    }

    pub fn validate(&self) -> Result<Obs> {
        Obs::validate(self.degree, &self.to_partitions()?)
    }
}

pub fn validate_obs(degree: usize, partitions: &[Partition]) -> Result<Obs> {
    Obs::validate(degree, partitions)
}

/// Crossing: all products `R1 × R2` on `Ω1 × Ω2`.
pub fn cross(b1: &Obs, b2: &Obs) -> Result<Obs> {
    let parts: Vec<Partition> =
        b1.partitions().iter().flat_map(|r1| b2.partitions().iter().map(move |r2| r1.product(r2))).collect();
    Obs::validate(b1.degree() * b2.degree(), &parts)
}

/// Nesting `b2` within `b1`: `R1 × U2` for `R1` in `b1` and `E1 × R2` for `R2` in `b2`.
pub fn nest(b1: &Obs, b2: &Obs) -> Result<Obs> {
    let (u2, e1) = (Partition::universal(b2.degree()), Partition::discrete(b1.degree()));
    let mut parts: Vec<Partition> = b1.partitions().iter().map(|r1| r1.product(&u2)).collect();
    parts.extend(b2.partitions().iter().map(|r2| e1.product(r2)));
    Obs::validate(b1.degree() * b2.degree(), &parts)
}

/// The block structure defined by a poset and component sizes.
#[derive(Debug, Clone)]
pub struct Pbs {
    obs: Obs,
    poset: Poset,
    radix: MixedRadix,
    downsets: Vec<NodeSet>,
    element_of: Vec<usize>,
}

impl Pbs {
    pub fn obs(&self) -> &Obs {
        &self.obs
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn radix(&self) -> &MixedRadix {
        &self.radix
    }

    pub fn degree(&self) -> usize {
        self.radix.total()
    }

    /// Down-sets in canonical order.
    pub fn downsets(&self) -> &[NodeSet] {
        &self.downsets
    }

    /// Lattice index of `Π_D` for the `k`-th down-set.
    pub fn element_of_downset(&self, k: usize) -> usize {
        self.element_of[k]
    }

    /// `Π_D` for a down-set `D`.
    pub fn partition(&self, d: NodeSet) -> Option<&Partition> {
        let k = self.downsets.iter().position(|&s| s == d)?;
        Some(self.obs.lattice().element(self.element_of[k]))
    }

    /// `Π_S` for an arbitrary subset: tuples agreeing outside `S`.
    pub fn partition_of_set(&self, set: NodeSet) -> Partition {
        pi_of_set(&self.radix, set)
    }
}

pub(crate) fn pi_of_set(radix: &MixedRadix, set: NodeSet) -> Partition {
    let labels: Vec<usize> = (0..radix.total()).map(|x| radix.clear(x, set)).collect();
    Partition::from_labels(&labels)
}

/// Builds `Π_D` for every down-set `D` of the poset on `∏ Ω_i`.
pub fn pbs_from_poset(poset: &Poset, sizes: &[usize], degree_cap: usize) -> Result<Pbs> {
    if sizes.len() != poset.size() {
        return Err(Error::DegreeMismatch { expected: poset.size(), found: sizes.len() });
    }
    if let Some(i) = sizes.iter().position(|&n| n < 2) {
        return Err(Error::Hypothesis(format!("component {} has fewer than two points", poset.label(i))));
    }
    let radix = MixedRadix::new(sizes, degree_cap)?;
    let downsets = poset.downsets()?;
    let parts: Vec<Partition> = downsets.iter().map(|&d| pi_of_set(&radix, d)).collect();
    let index: HashMap<NodeSet, usize> = downsets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    for (a, &da) in downsets.iter().enumerate() {
        for (b, &db) in downsets.iter().enumerate().skip(a) {
            let meet_ok = parts[a].meet(&parts[b])? == parts[index[&da.intersection(db)]];
            let join_ok = parts[a].join(&parts[b])? == parts[index[&da.union(db)]];
            if !meet_ok || !join_ok {
                return Err(Error::Hypothesis(format!("down-sets {a} and {b} break the lattice correspondence")));
            }
        }
    }
    let lattice = PartitionLattice::from_closed(radix.total(), parts.clone())?;
    let element_of = parts.iter().map(|p| lattice.index_of(p).expect("element present")).collect();
    let obs = Obs::from_lattice(lattice)?;
    Ok(Pbs { obs, poset: poset.clone(), radix, downsets, element_of })
}

/// Classes of pairs of points; class 0 is the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationScheme {
    degree: usize,
    classes: usize,
    class_of: Vec<u32>,
}

impl AssociationScheme {
    /// Renumbers an arbitrary symmetric labelling: diagonal first, then by
    /// class size and least pair.
    pub fn from_labels(degree: usize, labels: &[usize]) -> AssociationScheme {
        let mut info: HashMap<usize, (usize, (usize, usize), bool)> = HashMap::new();
        for a in 0..degree {
            for b in 0..degree {
                let e = info.entry(labels[a * degree + b]).or_insert((0, (a, b), a == b));
                e.0 += 1;
            }
        }
        let mut order: Vec<(usize, (usize, usize, (usize, usize)))> =
            info.iter().map(|(&l, &(size, least, diag))| (l, (usize::from(!diag), size, least))).collect();
        order.sort_by_key(|&(_, key)| key);
        let renumber: HashMap<usize, u32> = order.iter().enumerate().map(|(i, &(l, _))| (l, i as u32)).collect();
        AssociationScheme { degree, classes: order.len(), class_of: labels.iter().map(|l| renumber[l]).collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of classes including the diagonal.
    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn class_of(&self, a: usize, b: usize) -> usize {
        self.class_of[a * self.degree + b] as usize
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.classes];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Symmetry, diagonal class, and constancy of every `p^k_ij`.
    pub fn verify(&self) -> bool {
        let (n, r) = (self.degree, self.classes);
        for a in 0..n {
            for b in 0..n {
                if self.class_of(a, b) != self.class_of(b, a) || (self.class_of(a, b) == 0) != (a == b) {
                    return false;
                }
            }
        }
        let mut reference: Vec<Option<Vec<u32>>> = vec![None; r];
        let mut counts = vec![0u32; r * r];
        for a in 0..n {
            for b in 0..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for g in 0..n {
                    counts[self.class_of(a, g) * r + self.class_of(g, b)] += 1;
                }
                let k = self.class_of(a, b);
                match &reference[k] {
                    None => reference[k] = Some(counts.clone()),
                    Some(expected) if *expected != counts => return false,
                    Some(_) => {}
                }
            }
        }
        true
    }

    /// Same partition of pairs into classes, up to renumbering.
    pub fn same_as(&self, other: &AssociationScheme) -> bool {
        if self.degree != other.degree || self.classes != other.classes {
            return false;
        }
        let mut forward = vec![u32::MAX; self.classes];
        let mut backward = vec![u32::MAX; self.classes];
        for (&x, &y) in self.class_of.iter().zip(&other.class_of) {
            let (f, b) = (&mut forward[x as usize], &mut backward[y as usize]);
            if (*f != u32::MAX && *f != y) || (*b != u32::MAX && *b != x) {
                return false;
            }
            *f = y;
            *b = x;
        }
        true
    }

    /// `n` rows of `n` space-separated class indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in 0..self.degree {
            let row: Vec<String> = (0..self.degree).map(|b| self.class_of(a, b).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// The scheme whose class of `(α, β)` is the least element of the structure
/// containing the pair.
pub fn association_scheme(obs: &Obs) -> AssociationScheme {
    let n = obs.degree();
    let lattice = obs.lattice();
    let els = lattice.elements();
    let top = els.len() - 1;
    let mut labels = vec![0usize; n * n];
    for a in 0..n {
        for b in a..n {
            let least = (0..els.len()).filter(|&i| els[i].same_block(a, b)).fold(top, |acc, i| lattice.meet(acc, i));
            labels[a * n + b] = least;
            labels[b * n + a] = least;
        }
    }
    AssociationScheme::from_labels(n, &labels)
}

/// `|S_F|` for every element `F`: the number of ordered pairs whose least
/// containing element is `F`, by Möbius inversion of `|F| = n·k_F` over the
/// lattice. Indexed like the lattice elements.
pub fn stratum_sizes(obs: &Obs) -> Vec<i64> {
    let lattice = obs.lattice();
    let lat = lattice.abstract_lattice();
    let n = obs.degree() as i64;
    let size = lat.size();
    let pairs: Vec<i64> = lattice.elements().iter().map(|p| n * p.block_size().unwrap_or(0) as i64).collect();
    // mobius[g][f] for g ≤ f, filled in an order where g's strict upper part comes first
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&x| (0..size).filter(|&y| lat.leq(y, x)).count());
    let mut out = vec![0i64; size];
    for &f in &order {
        let mut mu = vec![0i64; size];
        mu[f] = 1;
        for &g in order.iter().rev() {
            if g != f && lat.leq(g, f) {
                mu[g] = -(0..size).filter(|&h| h != g && lat.leq(g, h) && lat.leq(h, f)).map(|h| mu[h]).sum::<i64>();
            }
        }
        out[f] = (0..size).filter(|&g| lat.leq(g, f)).map(|g| mu[g] * pairs[g]).sum();
    }
    out
}

pub fn verify_scheme(scheme: &AssociationScheme) -> bool {
    scheme.verify()
}

pub fn schemes_equal(a: &AssociationScheme, b: &AssociationScheme) -> bool {
    a.same_as(b)
}

/// A factor of `Γ × Δ`, where `(γ, δ)` is point `γ + |Γ|·δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Gamma,
    Delta,
}

fn split(gamma: usize, side: Side, x: usize) -> (usize, usize) {
    match side {
        Side::Gamma => (x % gamma, x / gamma),
        Side::Delta => (x / gamma, x % gamma),
    }
}

fn side_degree(gamma: usize, delta: usize, side: Side) -> usize {
    match side {
        Side::Gamma => gamma,
        Side::Delta => delta,
    }
}

fn check_product(p: &Partition, gamma: usize, delta: usize) -> Result<()> {
    if p.degree() != gamma * delta {
        return Err(Error::DegreeMismatch { expected: gamma * delta, found: p.degree() });
    }
    Ok(())
}

/// The partition of one factor into the projections of the parts of `p`.
pub fn projection_partition(p: &Partition, gamma: usize, delta: usize, side: Side) -> Result<Partition> {
    check_product(p, gamma, delta)?;
    let m = side_degree(gamma, delta, side);
    let mut label = vec![usize::MAX; m];
    let mut projections: Vec<Vec<usize>> = Vec::new();
    for block in p.blocks() {
        let mut proj: Vec<usize> = block.iter().map(|&x| split(gamma, side, x).0).collect();
        proj.sort_unstable();
        proj.dedup();
        if !projections.contains(&proj) {
            projections.push(proj);
        }
    }
    for (i, proj) in projections.iter().enumerate() {
        for &g in proj {
            if label[g] != usize::MAX {
                return Err(Error::Hypothesis(format!("projections of parts overlap at point {g}")));
            }
            label[g] = i;
        }
    }
    Ok(Partition::from_labels(&label))
}

/// The partition of one factor cut out by the slice through coordinate 0
/// of the other factor.
pub fn fibre_partition(p: &Partition, gamma: usize, delta: usize, side: Side) -> Result<Partition> {
    check_product(p, gamma, delta)?;
    let m = side_degree(gamma, delta, side);
    let mut label = vec![0; m];
    for x in 0..p.degree() {
        let (own, other) = split(gamma, side, x);
        if other == 0 {
            label[own] = p.block_of(x);
        }
    }
    Ok(Partition::from_labels(&label))
}

/// Rows, columns and the letters `r + k·c (mod q)` for `k = 1..q-1` of the
/// complete set of Latin squares over a prime `q`, cell `(r, c)` being point
/// `r + q·c`.
pub fn latin_square_partitions(q: usize) -> Vec<Partition> {
    let cells: Vec<(usize, usize)> = (0..q * q).map(|x| (x % q, x / q)).collect();
    let mut out = vec![
        Partition::from_labels(&cells.iter().map(|&(r, _)| r).collect::<Vec<_>>()),
        Partition::from_labels(&cells.iter().map(|&(_, c)| c).collect::<Vec<_>>()),
    ];
    for k in 1..q {
        out.push(Partition::from_labels(&cells.iter().map(|&(r, c)| (r + k * c) % q).collect::<Vec<_>>()));
    }
    out
}
