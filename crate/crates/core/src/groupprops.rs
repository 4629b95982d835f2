//! Properties of transitive groups read off their invariant partitions.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::blockstruct::{fibre_partition, projection_partition, AssociationScheme, Side};
use crate::error::{Error, Result};
use crate::lattice::{PartitionLattice, Witness, DEFAULT_LATTICE_CAP};
use crate::partition::{Partition, PartitionLiteral, UnionFind};
use crate::perm::{direct_product_product_action, kernel_on_parts, part_stabiliser, PermGroup, Permutation};

/// Largest degree accepted by [`two_closure`].
pub const TWO_CLOSURE_DEGREE_CAP: usize = 16;
/// Largest group order for explicit subgroup enumeration.
pub const SUBGROUP_ORDER_CAP: usize = 128;

/// A verdict, with a witness when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Check<W> {
    fn pass() -> Self {
        Check { holds: true, witness: None }
    }

    fn fail(w: W) -> Self {
        Check { holds: false, witness: Some(w) }
    }
}

fn require_transitive(group: &PermGroup) -> Result<()> {
    if group.is_transitive() {
        Ok(())
    } else {
        Err(Error::NotTransitive)
    }
}

/// Finest invariant partition with `alpha` and `beta` in one part.
pub fn minimal_block_partition(group: &PermGroup, alpha: usize, beta: usize) -> Result<Partition> {
    let n = group.degree();
    for x in [alpha, beta] {
        if x >= n {
            return Err(Error::PointOutOfRange { point: x, degree: n });
        }
    }
    let mut uf = UnionFind::new(n);
    let mut queue = VecDeque::new();
    if uf.union(alpha, beta) {
        queue.push_back((alpha, beta));
    }
    while let Some((a, b)) = queue.pop_front() {
        for g in group.generators() {
            let (x, y) = (g.apply(a), g.apply(b));
            if uf.union(x, y) {
                queue.push_back((x, y));
            }
        }
    }
    Ok(uf.into_partition())
}

/// The lattice of partitions invariant under a transitive group.
#[derive(Debug, Clone)]
pub struct InvariantLattice {
    group: PermGroup,
    lattice: PartitionLattice,
}

/// Every invariant partition is the join of the minimal block partitions
/// of `{0, β}` over `β` in its part at 0, and those depend only on the
/// `G_0`-orbit of `β`; so joins of these generate the whole lattice.
pub fn invariant_partitions(group: &PermGroup) -> Result<InvariantLattice> {
    invariant_partitions_with_cap(group, DEFAULT_LATTICE_CAP)
}

pub fn invariant_partitions_with_cap(group: &PermGroup, cap: usize) -> Result<InvariantLattice> {
    require_transitive(group)?;
    let n = group.degree();
    let mut elements = vec![Partition::discrete(n)];
    let mut seen: HashSet<Partition> = elements.iter().cloned().collect();
    let mut atoms: Vec<Partition> = Vec::new();
    if n > 1 {
        let suborbits = group.point_stabiliser(0)?.orbit_partition();
        for orbit in suborbits.blocks().iter().filter(|b| b[0] != 0) {
            let p = minimal_block_partition(group, 0, orbit[0])?;
            if seen.insert(p.clone()) {
                atoms.push(p.clone());
                elements.push(p);
            }
        }
    }
    let mut done = 0;
    while done < elements.len() {
        let current = elements[done].clone();
        for atom in &atoms {
            let j = current.join(atom)?;
            if !seen.contains(&j) {
                if elements.len() == cap {
                    return Err(Error::CapExceeded { what: "invariant partitions", cap: cap as u128 });
                }
                seen.insert(j.clone());
                elements.push(j);
            }
        }
        done += 1;
    }
    let lattice = PartitionLattice::from_closed(n, elements)?;
    Ok(InvariantLattice { group: group.clone(), lattice })
}

impl InvariantLattice {
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn lattice(&self) -> &PartitionLattice {
        &self.lattice
    }

    pub fn partitions(&self) -> &[Partition] {
        self.lattice.elements()
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// `(block size, number of blocks)` for each element.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.partitions().iter().map(|p| (p.block_size().unwrap_or(0), p.num_blocks())).collect()
    }

    pub fn is_primitive(&self) -> bool {
        self.len() <= 2
    }

    pub fn is_chain(&self) -> bool {
        let els = self.partitions();
        els.windows(2).all(|w| w[0].refines(&w[1]))
    }

    /// All invariant partitions commute pairwise.
    pub fn is_ob(&self) -> Check<(Partition, Partition)> {
        let els = self.partitions();
        for (i, a) in els.iter().enumerate() {
            for b in &els[i + 1..] {
                if !a.commutes(b).expect("equal degrees") {
                    return Check::fail((a.clone(), b.clone()));
                }
            }
        }
        Check::pass()
    }

    pub fn is_pb(&self) -> bool {
        self.is_ob().holds && self.lattice.is_distributive()
    }

    /// Every invariant partition is the orbit partition of the kernel of the
    /// action on its parts.
    pub fn is_preprimitive(&self) -> Result<Check<Partition>> {
        for p in self.partitions() {
            if p.is_discrete() || p.is_universal() {
                continue;
            }
            if kernel_on_parts(&self.group, p)?.orbit_partition() != *p {
                return Ok(Check::fail(p.clone()));
            }
        }
        Ok(Check::pass())
    }

    /// Every non-trivial normal subgroup is transitive. The witness is an
    /// element whose normal closure is intransitive.
    pub fn is_quasiprimitive(&self) -> Result<Check<Permutation>> {
        if self.is_primitive() {
            return Ok(Check::pass());
        }
        // A non-trivial kernel on a proper system of blocks is an intransitive normal subgroup.
        for p in self.partitions().iter().filter(|p| !p.is_discrete() && !p.is_universal()) {
            if let Some(k) = kernel_on_parts(&self.group, p)?.generators().iter().find(|g| !g.is_identity()) {
                return Ok(Check::fail(k.clone()));
            }
        }
        let elements = self.group.elements()?;
        let mut covered: HashSet<Permutation> = HashSet::new();
        let mut sorted: Vec<&Permutation> = elements.iter().collect();
        sorted.sort();
        for x in sorted {
            if x.is_identity() || covered.contains(x) {
                continue;
            }
            let class = conjugacy_class(&self.group, x);
            let closure = PermGroup::new(self.group.degree(), class.clone())?;
            if !closure.is_transitive() {
                return Ok(Check::fail(x.clone()));
            }
            covered.extend(class);
        }
        Ok(Check::pass())
    }
}

/// Conjugates of `x` under the group, by closing under conjugation by generators.
pub fn conjugacy_class(group: &PermGroup, x: &Permutation) -> Vec<Permutation> {
    let mut seen: HashSet<Permutation> = HashSet::from([x.clone()]);
    let mut out = vec![x.clone()];
    let mut k = 0;
    while k < out.len() {
        for g in group.generators() {
            let y = out[k].conjugate_by(g);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        k += 1;
    }
    out
}

pub fn is_ob(group: &PermGroup) -> Result<Check<(Partition, Partition)>> {
    Ok(invariant_partitions(group)?.is_ob())
}

pub fn is_pb(group: &PermGroup) -> Result<bool> {
    Ok(invariant_partitions(group)?.is_pb())
}

pub fn is_primitive(group: &PermGroup) -> Result<bool> {
    Ok(invariant_partitions(group)?.is_primitive())
}

pub fn is_preprimitive(group: &PermGroup) -> Result<Check<Partition>> {
    invariant_partitions(group)?.is_preprimitive()
}

pub fn is_quasiprimitive(group: &PermGroup) -> Result<Check<Permutation>> {
    invariant_partitions(group)?.is_quasiprimitive()
}

/// Orbits of a group on ordered pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbitals {
    degree: usize,
    classes: usize,
    class_of: Vec<usize>,
}

impl Orbitals {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.classes == 0
    }

    pub fn class_of(&self, a: usize, b: usize) -> usize {
        self.class_of[a * self.degree + b]
    }

    /// Classes of unordered pairs: each orbital merged with its transpose.
    pub fn symmetrised(&self) -> AssociationScheme {
        let n = self.degree;
        let mut uf = UnionFind::new(self.classes);
        for a in 0..n {
            for b in 0..n {
                uf.union(self.class_of(a, b), self.class_of(b, a));
            }
        }
        let labels: Vec<usize> = self.class_of.iter().map(|&c| uf.find(c)).collect();
        AssociationScheme::from_labels(n, &labels)
    }
}

pub fn orbitals(group: &PermGroup) -> Orbitals {
    let n = group.degree();
    let mut uf = UnionFind::new(n * n);
    for g in group.generators() {
        for a in 0..n {
            for b in 0..n {
                uf.union(a * n + b, g.apply(a) * n + g.apply(b));
            }
        }
    }
    let p = uf.into_partition();
    Orbitals { degree: n, classes: p.num_blocks(), class_of: p.labels().to_vec() }
}

/// The symmetrised orbitals form an association scheme.
pub fn is_stratifiable(group: &PermGroup) -> Result<bool> {
    require_transitive(group)?;
    Ok(orbitals(group).symmetrised().verify())
}

/// All permutations preserving every orbital of the group.
///
/// Generators are found level by level from the last point down: at level
/// `i` one permutation fixing `0..i` and sending `i` to each target outside
/// the current orbit of `i` is searched for by backtracking.
pub fn two_closure(group: &PermGroup) -> Result<PermGroup> {
    two_closure_with_cap(group, TWO_CLOSURE_DEGREE_CAP)
}

pub fn two_closure_with_cap(group: &PermGroup, degree_cap: usize) -> Result<PermGroup> {
    let n = group.degree();
    if n > degree_cap {
        return Err(Error::CapExceeded { what: "degree for 2-closure", cap: degree_cap as u128 });
    }
    let orb = orbitals(group);
    let mut gens: Vec<Permutation> = Vec::new();
    for i in (0..n).rev() {
        let mut orbit = orbit_of(n, &gens, i);
        for t in i + 1..n {
            if orbit[t] {
                continue;
            }
            let mut images: Vec<usize> = (0..i).collect();
            images.push(t);
            let mut used = vec![false; n];
            used[..i].iter_mut().for_each(|u| *u = true);
            used[t] = true;
            if consistent(&orb, &images, i) && extend_automorphism(&orb, &mut images, &mut used) {
                gens.push(Permutation::from_images_unchecked(images));
                orbit = orbit_of(n, &gens, i);
            }
        }
    }
    let name = format!("2-closure of {}", group.name());
    Ok(PermGroup::new(n, gens)?.named(name).with_element_cap(group.element_cap()))
}

fn orbit_of(n: usize, gens: &[Permutation], x: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for g in gens {
            let z = g.apply(y);
            if !seen[z] {
                seen[z] = true;
                stack.push(z);
            }
        }
    }
    seen
}

/// Whether the newest assignment `j -> images[j]` respects colours against all earlier ones.
fn consistent(orb: &Orbitals, images: &[usize], j: usize) -> bool {
    let tj = images[j];
    (0..=j).all(|k| {
        let tk = images[k];
        orb.class_of(j, k) == orb.class_of(tj, tk) && orb.class_of(k, j) == orb.class_of(tk, tj)
    })
}

fn extend_automorphism(orb: &Orbitals, images: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let j = images.len();
    if j == orb.degree() {
        return true;
    }
    for t in 0..orb.degree() {
        if used[t] {
            continue;
        }
        images.push(t);
        if consistent(orb, images, j) {
            used[t] = true;
            if extend_automorphism(orb, images, used) {
                return true;
            }
            used[t] = false;
        }
        images.pop();
    }
    false
}

/// Every invariant partition of the product action of `G × H` is a product
/// of one-sided partitions. The witness is an invariant partition that is not.
pub fn partition_orthogonal(g: &PermGroup, h: &PermGroup) -> Result<Check<Partition>> {
    require_transitive(g)?;
    require_transitive(h)?;
    let (a, b) = (g.degree(), h.degree());
    let product = direct_product_product_action(g, h);
    for p in invariant_partitions(&product)?.partitions() {
        for side in [Side::Gamma, Side::Delta] {
            if fibre_partition(p, a, b, side)? != projection_partition(p, a, b, side)? {
                return Ok(Check::fail(p.clone()));
            }
        }
    }
    Ok(Check::pass())
}

/// Multiplication table of a group of order at most [`SUBGROUP_ORDER_CAP`],
/// with subgroups as bitmasks over element indices.
#[derive(Debug, Clone)]
pub struct GroupTable {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    mul: Vec<u8>,
}

impl GroupTable {
    pub fn new(group: &PermGroup) -> Result<GroupTable> {
        if group.order() > SUBGROUP_ORDER_CAP as u128 {
            return Err(Error::CapExceeded {
                what: "group order for subgroup enumeration",
                cap: SUBGROUP_ORDER_CAP as u128,
            });
        }
        let elements = group.sorted_elements()?;
        let index: HashMap<Permutation, usize> = elements.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let k = elements.len();
        let mut mul = vec![0u8; k * k];
        for a in 0..k {
            for b in 0..k {
                mul[a * k + b] = index[&elements[a].then(&elements[b])] as u8;
            }
        }
        Ok(GroupTable { elements, index, mul })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b] as usize
    }

    fn identity(&self) -> usize {
        self.elements.iter().position(|p| p.is_identity()).expect("group contains identity")
    }

    /// Subgroup generated by a set of element indices.
    pub fn generated(&self, seed: u128) -> u128 {
        let gens = bits(seed);
        let e = self.identity();
        let mut set = 1u128 << e;
        let mut queue = vec![e];
        while let Some(x) = queue.pop() {
            for &g in &gens {
                let y = self.mul(x, g);
                if set >> y & 1 == 0 {
                    set |= 1 << y;
                    queue.push(y);
                }
            }
        }
        set
    }

    /// `HK = KH` as sets of elements.
    pub fn permute(&self, h: u128, k: u128) -> bool {
        let (hs, ks) = (bits(h), bits(k));
        let mut hk = 0u128;
        let mut kh = 0u128;
        for &x in &hs {
            for &y in &ks {
                hk |= 1 << self.mul(x, y);
                kh |= 1 << self.mul(y, x);
            }
        }
        hk == kh
    }

    /// Join-closure of the seeds. `visit` sees each new subgroup with the
    /// list found so far, and stops the search by returning false.
    fn subgroups_from(&self, seeds: &[u128], mut visit: impl FnMut(&[u128], u128) -> bool) -> Option<Vec<u128>> {
        let mut list: Vec<u128> = Vec::new();
        let mut seen: HashSet<u128> = HashSet::new();
        let mut queue: VecDeque<u128> = VecDeque::from([1u128 << self.identity()]);
        queue.extend(seeds.iter().copied());
        while let Some(s) = queue.pop_front() {
            if !seen.insert(s) {
                continue;
            }
            if !visit(&list, s) {
                return None;
            }
            list.push(s);
            for &seed in seeds {
                let j = self.generated(s | seed);
                if !seen.contains(&j) {
                    queue.push_back(j);
                }
            }
        }
        Some(list)
    }

    fn cyclic_subgroups(&self) -> Vec<u128> {
        let mut out: Vec<u128> = (0..self.order()).map(|x| self.generated(1 << x)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All subgroups, as bitmasks.
    pub fn subgroups(&self) -> Vec<u128> {
        self.subgroups_from(&self.cyclic_subgroups(), |_, _| true).expect("never stopped")
    }

    pub fn members(&self, set: u128) -> Vec<Permutation> {
        bits(set).into_iter().map(|i| self.elements[i].clone()).collect()
    }
}

fn bits(set: u128) -> Vec<usize> {
    (0..128).filter(|&i| set >> i & 1 == 1).collect()
}

/// Element sets of all subgroups of a group of order at most 128.
pub fn all_subgroups(group: &PermGroup) -> Result<Vec<Vec<Permutation>>> {
    let t = GroupTable::new(group)?;
    Ok(t.subgroups().into_iter().map(|s| t.members(s)).collect())
}

type SubgroupPair = (Vec<Permutation>, Vec<Permutation>);

fn pairwise_permuting(table: &GroupTable, seeds: &[u128]) -> Check<SubgroupPair> {
    let mut witness = None;
    let found = table.subgroups_from(seeds, |list, s| match list.iter().find(|&&h| !table.permute(h, s)) {
        Some(&h) => {
            witness = Some((h, s));
            false
        }
        None => true,
    });
    match (found, witness) {
        (None, Some((h, k))) => Check::fail((table.members(h), table.members(k))),
        _ => Check::pass(),
    }
}

/// Any two subgroups permute (`HK = KH`). The witness is a non-permuting pair.
pub fn is_quasihamiltonian(group: &PermGroup) -> Result<Check<SubgroupPair>> {
    let table = GroupTable::new(group)?;
    Ok(pairwise_permuting(&table, &table.cyclic_subgroups()))
}

/// Whether the two partitions commute, and whether the stabilisers `H`,
/// `K` of their parts containing 0 satisfy `HK = KH`.
pub fn subgroups_commute_via_partitions(group: &PermGroup, p1: &Partition, p2: &Partition) -> Result<(bool, bool)> {
    let commute = p1.commutes(p2)?;
    let h = part_stabiliser(group, p1, p1.block_of(0))?.with_element_cap(group.element_cap());
    let k = part_stabiliser(group, p2, p2.block_of(0))?.with_element_cap(group.element_cap());
    let (hs, ks) = (h.elements()?, k.elements()?);
    let cap = group.element_cap();
    let mut hk: HashSet<Permutation> = HashSet::new();
    for x in hs.iter() {
        for y in ks.iter() {
            hk.insert(x.then(y));
            if hk.len() > cap {
                return Err(Error::CapExceeded { what: "subgroup product", cap: cap as u128 });
            }
        }
    }
    let permute = ks.iter().all(|y| hs.iter().all(|x| hk.contains(&y.then(x))));
    Ok((commute, permute))
}

/// For a group with a regular normal subgroup `N`: all `G_0`-invariant
/// subgroups of `N` permute pairwise.
pub fn regular_normal_ob(group: &PermGroup, normal_generators: Vec<Permutation>) -> Result<Check<SubgroupPair>> {
    let n = group.degree();
    let normal = PermGroup::new(n, normal_generators)?;
    if !group.contains_group(&normal) || !group.normalises(&normal) {
        return Err(Error::Hypothesis("subgroup is not normal".into()));
    }
    if !normal.is_transitive() || normal.order() != n as u128 {
        return Err(Error::Hypothesis("normal subgroup is not regular".into()));
    }
    let table = GroupTable::new(&normal)?;
    let stab = group.point_stabiliser(0)?;
    let conj: Vec<Vec<usize>> = stab
        .generators()
        .iter()
        .map(|a| {
            (0..table.order()).map(|i| table.index_of(&table.element(i).conjugate_by(a)).expect("normal")).collect()
        })
        .collect();
    let invariant_closure = |mut set: u128| loop {
        let mut next = set;
        for map in &conj {
            for i in bits(set) {
                next |= 1 << map[i];
            }
        }
        next = table.generated(next);
        if next == set {
            return set;
        }
        set = next;
    };
    let mut seeds: Vec<u128> = table.cyclic_subgroups().into_iter().map(invariant_closure).collect();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(pairwise_permuting(&table, &seeds))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_commuting: Option<[PartitionLiteral; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub not_orbit_partition: Option<PartitionLiteral>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intransitive_normal_closure: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forbidden_sublattice: Option<Witness>,
}

/// Summary of the properties of one group. Properties other than
/// transitivity are `None` for intransitive groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub degree: usize,
    pub order: u128,
    pub transitive: bool,
    pub primitive: Option<bool>,
    pub quasiprimitive: Option<bool>,
    pub preprimitive: Option<bool>,
    pub ob: Option<bool>,
    pub pb: Option<bool>,
    pub stratifiable: Option<bool>,
    pub modular: Option<bool>,
    pub distributive: Option<bool>,
    pub lattice_size: Option<usize>,
    pub witnesses: Witnesses,
}

pub fn analyze(group: &PermGroup) -> Result<PropertyReport> {
    let mut report = PropertyReport {
        name: group.name().to_string(),
        degree: group.degree(),
        order: group.order(),
        transitive: group.is_transitive(),
        primitive: None,
        quasiprimitive: None,
        preprimitive: None,
        ob: None,
        pb: None,
        stratifiable: None,
        modular: None,
        distributive: None,
        lattice_size: None,
        witnesses: Witnesses::default(),
    };
    if !report.transitive {
        return Ok(report);
    }
    let inv = invariant_partitions(group)?;
    let ob = inv.is_ob();
    let pre = inv.is_preprimitive()?;
    let quasi = inv.is_quasiprimitive()?;
    report.primitive = Some(inv.is_primitive());
    report.ob = Some(ob.holds);
    report.pb = Some(inv.is_pb());
    report.preprimitive = Some(pre.holds);
    report.quasiprimitive = Some(quasi.holds);
    report.stratifiable = Some(is_stratifiable(group)?);
    report.modular = Some(inv.lattice().is_modular());
    report.distributive = Some(inv.lattice().is_distributive());
    report.lattice_size = Some(inv.len());
    report.witnesses = Witnesses {
        non_commuting: ob.witness.map(|(a, b)| [a.to_literal(), b.to_literal()]),
        not_orbit_partition: pre.witness.map(|p| p.to_literal()),
        intransitive_normal_closure: quasi.witness.map(|x| x.images()),
        forbidden_sublattice: inv.lattice().find_forbidden_sublattice(),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{coset_action, wreath_imprimitive};

    fn g(n: usize, gens: &[&[&[usize]]]) -> PermGroup {
        PermGroup::from_cycles(n, gens).unwrap()
    }

    /// Regular action of a group on itself, given by its elements.
    fn regular(group: &PermGroup) -> PermGroup {
        let els = group.sorted_elements().unwrap();
        let index: HashMap<&Permutation, usize> = els.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let gens = group
            .generators()
            .iter()
            .map(|s| Permutation::from_images(els.iter().map(|x| index[&x.then(s)]).collect()).unwrap())
            .collect();
        PermGroup::new(els.len(), gens).unwrap()
    }

    fn d4_natural() -> PermGroup {
        g(4, &[&[&[0, 1, 2, 3]], &[&[0, 2]]])
    }

    fn q8_regular() -> PermGroup {
        // i and j acting on the right of Q8 = {±1, ±i, ±j, ±k}
        let i = Permutation::from_cycles(8, &[&[0, 2, 1, 3], &[4, 7, 5, 6]]).unwrap();
        let j = Permutation::from_cycles(8, &[&[0, 4, 1, 5], &[2, 6, 3, 7]]).unwrap();
        PermGroup::new(8, vec![i, j]).unwrap()
    }

    fn brute_force_invariant(group: &PermGroup) -> HashSet<Partition> {
        Partition::all(group.degree()).filter(|p| group.generators().iter().all(|s| p.is_invariant_under(s))).collect()
    }

    #[test]
    fn minimal_blocks() {
        let c4 = PermGroup::cyclic(4);
        assert_eq!(
            minimal_block_partition(&c4, 0, 2).unwrap(),
            Partition::from_blocks(4, vec![vec![0, 2], vec![1, 3]]).unwrap()
        );
        let s4 = PermGroup::symmetric(4);
        assert_eq!(minimal_block_partition(&s4, 1, 3).unwrap(), Partition::universal(4));
        let c2wrc2 = wreath_imprimitive(&PermGroup::cyclic(2), &PermGroup::cyclic(2));
        assert_eq!(
            minimal_block_partition(&c2wrc2, 0, 1).unwrap(),
            Partition::from_blocks(4, vec![vec![0, 1], vec![2, 3]]).unwrap()
        );
    }

    #[test]
    fn invariant_partitions_match_brute_force() {
        let groups = vec![
            PermGroup::cyclic(4),
            PermGroup::cyclic(6),
            PermGroup::symmetric(5),
            d4_natural(),
            regular(&d4_natural()),
            q8_regular(),
            wreath_imprimitive(&PermGroup::symmetric(3), &PermGroup::cyclic(2)),
            wreath_imprimitive(&PermGroup::cyclic(2), &PermGroup::cyclic(4)),
            direct_product_product_action(&PermGroup::cyclic(2), &PermGroup::cyclic(4)),
            g(
                8,
                &[
                    &[&[0, 1]],
                    &[&[2, 3]],
                    &[&[4, 5]],
                    &[&[6, 7]],
                    &[&[0, 2], &[1, 3]],
                    &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]],
                ],
            ),
        ];
        for grp in &groups {
            let inv = invariant_partitions(grp).unwrap();
            let ours: HashSet<Partition> = inv.partitions().iter().cloned().collect();
            assert_eq!(ours, brute_force_invariant(grp), "{grp:?}");
        }
    }

    #[test]
    fn dihedral_regular_has_ten_invariant_partitions() {
        let d8 = regular(&d4_natural());
        let inv = invariant_partitions(&d8).unwrap();
        assert_eq!(inv.len(), 10);
        assert_eq!(all_subgroups(&d8).unwrap().len(), 10);
        assert!(!inv.is_ob().holds);
    }

    #[test]
    fn a5_on_fifteen_points() {
        let a5 = g(5, &[&[&[0, 1, 2]], &[&[0, 1, 2, 3, 4]]]);
        let v4 = vec![
            Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap(),
            Permutation::from_cycles(5, &[&[0, 2], &[1, 3]]).unwrap(),
        ];
        let (action, _) = coset_action(&a5, &v4).unwrap();
        let inv = invariant_partitions(&action).unwrap();
        assert_eq!(inv.shapes(), vec![(1, 15), (3, 5), (15, 1)]);
        assert!(inv.is_ob().holds);
        assert!(inv.is_quasiprimitive().unwrap().holds);
        assert!(!inv.is_primitive());
        let pre = inv.is_preprimitive().unwrap();
        assert!(!pre.holds);
        assert_eq!(pre.witness.unwrap().num_blocks(), 5);
    }

    #[test]
    fn pb_examples() {
        assert!(is_pb(&PermGroup::cyclic(6)).unwrap());
        let klein = g(4, &[&[&[0, 1], &[2, 3]], &[&[0, 2], &[1, 3]]]);
        assert!(is_ob(&klein).unwrap().holds);
        assert!(!is_pb(&klein).unwrap());
    }

    #[test]
    fn primitivity() {
        let s3 = PermGroup::symmetric(3);
        assert!(is_primitive(&s3).unwrap());
        assert!(is_preprimitive(&s3).unwrap().holds);
        let w = wreath_imprimitive(&PermGroup::cyclic(2), &PermGroup::cyclic(2));
        assert!(!is_primitive(&w).unwrap());
        let q = is_quasiprimitive(&w).unwrap();
        assert!(!q.holds);
        assert!(!PermGroup::new(4, vec![q.witness.unwrap()]).unwrap().is_transitive());
        assert!(matches!(is_ob(&PermGroup::trivial(3)), Err(Error::NotTransitive)));
    }

    #[test]
    fn stratifiability() {
        assert!(is_stratifiable(&PermGroup::symmetric(5)).unwrap());
        assert_eq!(orbitals(&PermGroup::symmetric(5)).symmetrised().num_classes(), 2);
        assert!(is_stratifiable(&d4_natural()).unwrap());
        assert!(!is_stratifiable(&regular(&d4_natural())).unwrap());
    }

    #[test]
    fn two_closures() {
        let a4 = g(4, &[&[&[0, 1, 2]], &[&[1, 2, 3]]]);
        assert_eq!(two_closure(&a4).unwrap().order(), 24);
        let c4 = PermGroup::cyclic(4);
        assert!(two_closure(&c4).unwrap().same_group(&c4).unwrap());
        let klein = g(4, &[&[&[0, 1], &[2, 3]], &[&[0, 2], &[1, 3]]]);
        assert!(two_closure(&klein).unwrap().same_group(&klein).unwrap());
        assert_eq!(two_closure(&PermGroup::cyclic(5)).unwrap().order(), 5);
        let d8 = regular(&d4_natural());
        assert_eq!(two_closure(&d8).unwrap().order(), 8);
        assert!(two_closure(&PermGroup::cyclic(17)).is_err());
    }

    #[test]
    fn two_closure_matches_brute_force() {
        let groups = [d4_natural(), PermGroup::cyclic(6), g(6, &[&[&[0, 1, 2], &[3, 4, 5]], &[&[0, 3]]])];
        for grp in &groups {
            let orb = orbitals(grp);
            let n = grp.degree();
            let count = PermGroup::symmetric(n)
                .elements()
                .unwrap()
                .iter()
                .filter(|p| (0..n).all(|a| (0..n).all(|b| orb.class_of(a, b) == orb.class_of(p.apply(a), p.apply(b)))))
                .count();
            assert_eq!(two_closure(grp).unwrap().order(), count as u128);
        }
    }

    #[test]
    fn orthogonality() {
        let (c2, c3) = (PermGroup::cyclic(2), PermGroup::cyclic(3));
        assert!(!partition_orthogonal(&c2, &c2).unwrap().holds);
        assert!(partition_orthogonal(&c2, &c3).unwrap().holds);
        assert!(partition_orthogonal(&PermGroup::symmetric(3), &PermGroup::symmetric(3)).unwrap().holds);
    }

    #[test]
    fn fibres_detect_crossings() {
        let pairs = [
            (PermGroup::cyclic(2), PermGroup::cyclic(2)),
            (PermGroup::cyclic(2), PermGroup::cyclic(3)),
            (PermGroup::symmetric(3), PermGroup::symmetric(3)),
        ];
        for (a, b) in &pairs {
            let (m, n) = (a.degree(), b.degree());
            let product = direct_product_product_action(a, b);
            let left = invariant_partitions(a).unwrap();
            let right = invariant_partitions(b).unwrap();
            for p in invariant_partitions(&product).unwrap().partitions() {
                let equal = fibre_partition(p, m, n, Side::Gamma).unwrap()
                    == projection_partition(p, m, n, Side::Gamma).unwrap();
                let crossing = left.partitions().iter().any(|x| right.partitions().iter().any(|y| x.product(y) == *p));
                assert_eq!(equal, crossing);
                assert!(fibre_partition(p, m, n, Side::Gamma)
                    .unwrap()
                    .refines(&projection_partition(p, m, n, Side::Gamma).unwrap()));
            }
        }
    }

    #[test]
    fn quasihamiltonian() {
        assert!(is_quasihamiltonian(&q8_regular()).unwrap().holds);
        let d = is_quasihamiltonian(&regular(&d4_natural())).unwrap();
        assert!(!d.holds);
        let (h, k) = d.witness.unwrap();
        assert!(h.len() < 8 && k.len() < 8);
        assert!(is_quasihamiltonian(&PermGroup::cyclic(12)).unwrap().holds);
        assert!(is_quasihamiltonian(&PermGroup::symmetric(6)).is_err());
    }

    #[test]
    fn subgroup_counts() {
        let q8 = GroupTable::new(&q8_regular()).unwrap();
        assert_eq!(q8.subgroups().len(), 6);
        let s4 = GroupTable::new(&PermGroup::symmetric(4)).unwrap();
        assert_eq!(s4.subgroups().len(), 30);
    }

    #[test]
    fn commuting_partitions_versus_subgroups() {
        let groups = [regular(&d4_natural()), d4_natural(), q8_regular(), PermGroup::cyclic(6)];
        for grp in &groups {
            let inv = invariant_partitions(grp).unwrap();
            for a in inv.partitions() {
                for b in inv.partitions() {
                    let (c, p) = subgroups_commute_via_partitions(grp, a, b).unwrap();
                    assert_eq!(c, p);
                }
            }
        }
    }

    #[test]
    fn regular_normal_subgroups() {
        let d8 = regular(&d4_natural());
        assert!(!regular_normal_ob(&d8, d8.generators().to_vec()).unwrap().holds);
        let agl = g(5, &[&[&[0, 1, 2, 3, 4]], &[&[1, 2, 4, 3]]]);
        let c5 = vec![Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()];
        assert!(regular_normal_ob(&agl, c5).unwrap().holds);
        assert!(is_ob(&agl).unwrap().holds);
        let klein = g(4, &[&[&[0, 1], &[2, 3]], &[&[0, 2], &[1, 3]]]);
        assert!(regular_normal_ob(&klein, klein.generators().to_vec()).unwrap().holds);
        let s4 = PermGroup::symmetric(4);
        let not_normal = vec![Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()];
        assert!(regular_normal_ob(&s4, not_normal).is_err());
        let v4 = vec![
            Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
            Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
        ];
        assert_eq!(regular_normal_ob(&s4, v4).unwrap().holds, is_ob(&s4).unwrap().holds);
    }

    #[test]
    fn report_serialises() {
        let r = analyze(&regular(&d4_natural()).named("D8")).unwrap();
        assert_eq!(r.ob, Some(false));
        assert!(r.witnesses.non_commuting.is_some());
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "transitive",
            "primitive",
            "quasiprimitive",
            "preprimitive",
            "ob",
            "pb",
            "stratifiable",
            "witnesses",
            "lattice_size",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let intransitive = analyze(&PermGroup::trivial(2)).unwrap();
        assert!(!intransitive.transitive && intransitive.ob.is_none());
    }
}
