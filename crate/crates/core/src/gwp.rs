//! Generalised wreath products over finite posets.
//!
//! A point of `Ω = ∏ Ω_i` has one coordinate per poset node; node `i`'s
//! coordinate is permuted by a function of the coordinates at its strict
//! ancestors `A(i) = {j : i ⊏ j}`. Coordinates are laid out by
//! [`MixedRadix`], node 0 varying fastest.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blockstruct::{pi_of_set, MixedRadix, Obs, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};
use crate::groupprops::{analyze, invariant_partitions, PropertyReport};
use crate::lattice::PartitionLattice;
use crate::partition::{Partition, PartitionLiteral};
use crate::perm::{
    check_invariant, induced_action, induced_on_subparts, kernel_on_parts, part_stabiliser, GroupFile, PermGroup,
    Permutation,
};
use crate::poset::{NodeSet, Poset, PosetFile};

/// A poset with a permutation group at every node.
#[derive(Debug, Clone)]
pub struct GwpSpec {
    poset: Poset,
    components: Vec<PermGroup>,
    radix: MixedRadix,
    ancestors: Vec<Vec<usize>>,
    fibre_sizes: Vec<usize>,
}

/// One permutation of `G(m_i)` for every tuple of ancestor coordinates, per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GwpElement {
    tables: Vec<Vec<Permutation>>,
}

impl GwpElement {
    /// Table of node `i`, indexed by the mixed-radix ancestor tuple.
    pub fn table(&self, i: usize) -> &[Permutation] {
        &self.tables[i]
    }
}

/// Why a permutation is not in a generalised wreath product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonMember {
    pub node: usize,
    pub label: String,
    pub reason: String,
}

impl fmt::Display for NonMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.label, self.reason)
    }
}

impl GwpSpec {
    pub fn new(poset: Poset, components: Vec<PermGroup>) -> Result<GwpSpec> {
        GwpSpec::with_cap(poset, components, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(poset: Poset, components: Vec<PermGroup>, degree_cap: usize) -> Result<GwpSpec> {
        if components.len() != poset.size() {
            return Err(Error::DegreeMismatch { expected: poset.size(), found: components.len() });
        }
        if let Some(i) = components.iter().position(|g| g.degree() == 0) {
            return Err(Error::Hypothesis(format!("component {} acts on no points", poset.label(i))));
        }
        let sizes: Vec<usize> = components.iter().map(|g| g.degree()).collect();
        let radix = MixedRadix::new(&sizes, degree_cap)?;
        let ancestors: Vec<Vec<usize>> = (0..poset.size()).map(|i| poset.ancestors_strict(i).to_vec()).collect();
        let fibre_sizes = ancestors.iter().map(|a| a.iter().map(|&j| sizes[j]).product()).collect();
        Ok(GwpSpec { poset, components, radix, ancestors, fibre_sizes })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn components(&self) -> &[PermGroup] {
        &self.components
    }

    pub fn radix(&self) -> &MixedRadix {
        &self.radix
    }

    pub fn degree(&self) -> usize {
        self.radix.total()
    }

    pub fn size(&self) -> usize {
        self.poset.size()
    }

    pub fn ancestors(&self, i: usize) -> &[usize] {
        &self.ancestors[i]
    }

    /// `|Ω^i|`.
    pub fn fibre_size(&self, i: usize) -> usize {
        self.fibre_sizes[i]
    }

    /// Index of `π^i(ω)` among the tuples over `A(i)`.
    pub fn ancestor_index(&self, i: usize, point: usize) -> usize {
        let mut index = 0;
        let mut stride = 1;
        for &j in &self.ancestors[i] {
            index += self.radix.coordinate(point, j) * stride;
            stride *= self.radix.sizes()[j];
        }
        index
    }

    /// A point whose ancestor tuple at `i` is `x`, all other coordinates zero.
    fn ancestor_point(&self, i: usize, mut x: usize) -> usize {
        let mut point = 0;
        for &j in &self.ancestors[i] {
            let n = self.radix.sizes()[j];
            point += (x % n) * self.radix.strides()[j];
            x /= n;
        }
        point
    }

    pub fn identity(&self) -> GwpElement {
        let tables = (0..self.size()).map(|i| vec![self.components[i].identity(); self.fibre_sizes[i]]).collect();
        GwpElement { tables }
    }

    /// Builds an element from tables, checking shapes and membership of entries.
    pub fn element(&self, tables: Vec<Vec<Permutation>>) -> Result<GwpElement> {
        if tables.len() != self.size() {
            return Err(Error::DegreeMismatch { expected: self.size(), found: tables.len() });
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != self.fibre_sizes[i] {
                return Err(Error::DegreeMismatch { expected: self.fibre_sizes[i], found: t.len() });
            }
            for p in t {
                if p.degree() != self.components[i].degree() {
                    return Err(Error::DegreeMismatch { expected: self.components[i].degree(), found: p.degree() });
                }
                if !self.components[i].contains(p) {
                    return Err(Error::InvalidPermutation(format!(
                        "table entry for {} is not in its component group",
                        self.poset.label(i)
                    )));
                }
            }
        }
        Ok(GwpElement { tables })
    }

    /// `(ωf)_i = ω_i · f_i(π^i ω)`, every lookup on the original `ω`.
    pub fn act(&self, f: &GwpElement, point: usize) -> usize {
        (0..self.size())
            .map(|i| {
                let c = self.radix.coordinate(point, i);
                f.tables[i][self.ancestor_index(i, point)].apply(c) * self.radix.strides()[i]
            })
            .sum()
    }

    pub fn realise(&self, f: &GwpElement) -> Permutation {
        Permutation::from_images_unchecked((0..self.degree()).map(|w| self.act(f, w)).collect())
    }

    /// `f` then `h`.
    pub fn multiply(&self, f: &GwpElement, h: &GwpElement) -> GwpElement {
        let tables = (0..self.size())
            .map(|i| {
                (0..self.fibre_sizes[i])
                    .map(|x| {
                        let moved = self.act(f, self.ancestor_point(i, x));
                        f.tables[i][x].then(&h.tables[i][self.ancestor_index(i, moved)])
                    })
                    .collect()
            })
            .collect();
        GwpElement { tables }
    }

    pub fn inverse(&self, f: &GwpElement) -> GwpElement {
        let mut tables = self.identity().tables;
        for (i, table) in tables.iter_mut().enumerate() {
            for x in 0..self.fibre_sizes[i] {
                let moved = self.act(f, self.ancestor_point(i, x));
                table[self.ancestor_index(i, moved)] = f.tables[i][x].inverse();
            }
        }
        GwpElement { tables }
    }

    /// One element per node, ancestor tuple and component generator.
    pub fn canonical_generators(&self) -> Vec<GwpElement> {
        let mut out = Vec::new();
        for i in 0..self.size() {
            for x in 0..self.fibre_sizes[i] {
                for g in self.components[i].generators() {
                    let mut f = self.identity();
                    f.tables[i][x] = g.clone();
                    out.push(f);
                }
            }
        }
        out
    }

    /// The product as a permutation group on `Ω`.
    pub fn group(&self) -> PermGroup {
        let gens = self.canonical_generators().iter().map(|f| self.realise(f)).filter(|p| !p.is_identity()).collect();
        let cap = self.components.iter().map(|g| g.element_cap()).max().unwrap_or(crate::perm::DEFAULT_ELEMENT_CAP);
        PermGroup::new(self.degree(), gens).expect("degrees agree").named(self.name()).with_element_cap(cap)
    }

    pub fn name(&self) -> String {
        let comps: Vec<&str> = self.components.iter().map(|g| g.name()).collect();
        format!("GWP({:?}; {})", self.poset, comps.join(", "))
    }

    /// `∏ |G(m_i)|^{|Ω^i|}`.
    pub fn expected_order(&self) -> Result<u128> {
        let overflow = || Error::CapExceeded { what: "group order", cap: u128::MAX };
        let mut total: u128 = 1;
        for (g, &k) in self.components.iter().zip(&self.fibre_sizes) {
            let e = u32::try_from(k).map_err(|_| overflow())?;
            total = total.checked_mul(g.order().checked_pow(e).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        Ok(total)
    }

    /// Decomposes `p` into per-node tables, or reports the first node where
    /// the induced coordinate map is not a function of the ancestor tuple or
    /// leaves the component group.
    pub fn membership(&self, p: &Permutation) -> std::result::Result<GwpElement, NonMember> {
        let fail = |node: usize, reason: String| NonMember { node, label: self.poset.label(node).to_string(), reason };
        if p.degree() != self.degree() {
            return Err(NonMember {
                node: 0,
                label: String::new(),
                reason: format!("degree {} does not match {}", p.degree(), self.degree()),
            });
        }
        let mut tables = Vec::with_capacity(self.size());
        for i in 0..self.size() {
            let n = self.radix.sizes()[i];
            let mut maps = vec![vec![usize::MAX; n]; self.fibre_sizes[i]];
            for w in 0..self.degree() {
                let x = self.ancestor_index(i, w);
                let a = self.radix.coordinate(w, i);
                let b = self.radix.coordinate(p.apply(w), i);
                let slot = &mut maps[x][a];
                if *slot == usize::MAX {
                    *slot = b;
                } else if *slot != b {
                    return Err(fail(
                        i,
                        format!("coordinate image depends on coordinates outside the ancestors (point {w})"),
                    ));
                }
            }
            let mut table = Vec::with_capacity(maps.len());
            for (x, images) in maps.into_iter().enumerate() {
                let q = Permutation::from_images(images)
                    .map_err(|_| fail(i, format!("induced map at ancestor tuple {x} is not a permutation")))?;
                if !self.components[i].contains(&q) {
                    return Err(fail(
                        i,
                        format!("induced permutation {:?} at ancestor tuple {x} is not in the component", q.cycles()),
                    ));
                }
                table.push(q);
            }
            tables.push(table);
        }
        let f = GwpElement { tables };
        if self.realise(&f) != *p {
            return Err(fail(0, "reconstructed element acts differently".to_string()));
        }
        Ok(f)
    }

    /// Sub-product on the nodes of `keep` with the induced order.
    pub fn restrict(&self, keep: NodeSet) -> Result<GwpSpec> {
        let comps = keep.iter().map(|i| self.components[i].clone()).collect();
        GwpSpec::with_cap(self.poset.restrict(keep), comps, self.degree().max(1))
    }

    /// Coordinates of `point` on `keep`, as a point of [`GwpSpec::restrict`].
    pub fn project(&self, point: usize, keep: NodeSet) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for i in keep.iter() {
            out += self.radix.coordinate(point, i) * stride;
            stride *= self.radix.sizes()[i];
        }
        out
    }

    /// `Π_S`: points agreeing outside `S`.
    pub fn partition_of_set(&self, set: NodeSet) -> Partition {
        pi_of_set(&self.radix, set)
    }

    /// `Π_D` for every down-set `D`.
    pub fn downset_partitions(&self) -> Result<Vec<(NodeSet, Partition)>> {
        Ok(self.poset.downsets()?.into_iter().map(|d| (d, self.partition_of_set(d))).collect())
    }

    pub fn to_file(&self) -> GwpSpecFile {
        let components = (0..self.size())
            .map(|i| (self.poset.label(i).to_string(), ComponentEntry::Inline(self.components[i].to_file())))
            .collect();
        GwpSpecFile { poset: self.poset.to_file(), components }
    }

    /// Per-node tables as image arrays, keyed by node label.
    pub fn dump(&self, f: &GwpElement) -> ElementDump {
        let tables = (0..self.size())
            .map(|i| (self.poset.label(i).to_string(), f.tables[i].iter().map(|p| p.images()).collect()))
            .collect();
        ElementDump { tables }
    }

    pub fn from_dump(&self, dump: &ElementDump) -> Result<GwpElement> {
        let mut tables = Vec::with_capacity(self.size());
        for i in 0..self.size() {
            let label = self.poset.label(i);
            let rows = dump.tables.get(label).ok_or_else(|| Error::UnknownElement(label.to_string()))?;
            tables.push(rows.iter().map(|r| Permutation::from_images(r.clone())).collect::<Result<Vec<_>>>()?);
        }
        self.element(tables)
    }
}

/// A component given inline or as a path to a group file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentEntry {
    Inline(GroupFile),
    Path(String),
}

/// JSON form `{"poset": <poset file>, "components": {"m1": <group>, ..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwpSpecFile {
    pub poset: PosetFile,
    pub components: BTreeMap<String, ComponentEntry>,
}

impl GwpSpecFile {
    /// Builds the spec; relative component paths are resolved against `base`.
    pub fn to_spec(&self, base: Option<&Path>) -> Result<GwpSpec> {
        let poset = self.poset.to_poset()?;
        let mut comps = Vec::with_capacity(poset.size());
        for label in poset.labels() {
            let entry = self.components.get(label).ok_or_else(|| Error::UnknownElement(label.clone()))?;
            let file = match entry {
                ComponentEntry::Inline(f) => f.clone(),
                ComponentEntry::Path(p) => {
                    let path = base.map(|b| b.join(p)).unwrap_or_else(|| p.into());
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)?
                }
            };
            comps.push(file.realise()?);
        }
        if let Some(extra) = self.components.keys().find(|k| poset.index_of(k).is_none()) {
            return Err(Error::UnknownElement(extra.clone()));
        }
        GwpSpec::new(poset, comps)
    }

    pub fn load(path: &Path) -> Result<GwpSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let file: GwpSpecFile = serde_json::from_str(&text)?;
        file.to_spec(path.parent())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDump {
    pub tables: BTreeMap<String, Vec<Vec<usize>>>,
}

/// Kernel and quotient of the product at a minimal node `p`.
#[derive(Debug, Clone)]
pub struct Semidirect {
    pub node: usize,
    /// Parts of `Π_{p}`, numbered by least point.
    pub parts: Partition,
    pub kernel: PermGroup,
    pub quotient: PermGroup,
    /// The quotient equals the product over the remaining nodes.
    pub quotient_matches: bool,
    /// Parts grouped by `Π_{M∖A(p)}`.
    pub classes: Partition,
    /// Parts grouped by how the kernel acts on them.
    pub acting_classes: Partition,
    pub kernel_order_matches: bool,
    /// Parts grouped by lying in one part of `Π ∨ Φ` for every down-set
    /// partition `Φ` incomparable to `Π`; all parts when there is none.
    pub literal_classes: Partition,
}

impl Semidirect {
    pub fn holds(&self) -> bool {
        self.quotient_matches && self.kernel_order_matches && self.classes == self.acting_classes
    }
}

pub fn semidirect_decomposition(spec: &GwpSpec, p: usize) -> Result<Semidirect> {
    if p >= spec.size() {
        return Err(Error::PointOutOfRange { point: p, degree: spec.size() });
    }
    if !spec.poset.descendants_strict(p).is_empty() {
        return Err(Error::Hypothesis(format!("{} is not minimal", spec.poset.label(p))));
    }
    let group = spec.group();
    let parts = spec.partition_of_set(NodeSet::singleton(p));
    let kernel = kernel_on_parts(&group, &parts)?;
    let quotient = induced_action(&group, &parts)?.image_group();

    let rest = spec.poset.all().difference(NodeSet::singleton(p));
    let sub = spec.restrict(rest)?;
    let label: Vec<usize> = parts.blocks().iter().map(|b| spec.project(b[0], rest)).collect();
    let quotient_matches = same_after_relabel(&quotient, &label, &sub.group())?;

    let above = spec.poset.all().difference(spec.poset.ancestors_strict(p));
    let coarse = spec.partition_of_set(above);
    let classes = Partition::from_labels(&parts.blocks().iter().map(|b| coarse.block_of(b[0])).collect::<Vec<_>>());

    let n_p = spec.radix.sizes()[p];
    let stride = spec.radix.strides()[p];
    let mut kernel_elements: Vec<Permutation> = kernel.elements()?.iter().cloned().collect();
    kernel_elements.sort();
    let signatures: Vec<Vec<usize>> = parts
        .blocks()
        .iter()
        .map(|b| {
            kernel_elements
                .iter()
                .flat_map(|k| (0..n_p).map(move |t| spec.radix.coordinate(k.apply(b[0] + t * stride), p)))
                .collect()
        })
        .collect();
    let acting_classes = Partition::from_labels(&signatures);

    let mut literal = Partition::universal(spec.degree());
    for (d, phi) in spec.downset_partitions()? {
        if !d.is_empty() && !d.contains(p) {
            literal = literal.meet(&parts.join(&phi)?)?;
        }
    }
    let literal_classes =
        Partition::from_labels(&parts.blocks().iter().map(|b| literal.block_of(b[0])).collect::<Vec<_>>());

    let expected = spec.components[p]
        .order()
        .checked_pow(classes.num_blocks() as u32)
        .ok_or(Error::CapExceeded { what: "group order", cap: u128::MAX })?;
    Ok(Semidirect {
        node: p,
        kernel_order_matches: kernel.order() == expected,
        parts,
        kernel,
        quotient,
        quotient_matches,
        classes,
        acting_classes,
        literal_classes,
    })
}

/// Whether `group`, with point `x` renamed `label[x]`, equals `target`.
fn same_after_relabel(group: &PermGroup, label: &[usize], target: &PermGroup) -> Result<bool> {
    if group.degree() != target.degree() {
        return Ok(false);
    }
    let gens = group.generators().iter().map(|g| relabel(g, label)).collect();
    PermGroup::new(target.degree(), gens)?.same_group(target)
}

fn relabel(g: &Permutation, label: &[usize]) -> Permutation {
    let mut images = vec![0; label.len()];
    for (x, &lx) in label.iter().enumerate() {
        images[lx] = label[g.apply(x)];
    }
    Permutation::from_images_unchecked(images)
}

/// Group induced on the `P_K`-parts inside the `P_J`-part at 0 by its
/// stabiliser, beside the product over `J∖K`.
#[derive(Debug, Clone)]
pub struct IntervalGroup {
    pub induced: PermGroup,
    pub expected: PermGroup,
    pub matches: bool,
}

pub fn interval_group(spec: &GwpSpec, j: NodeSet, k: NodeSet) -> Result<IntervalGroup> {
    for d in [j, k] {
        if !d.is_subset(spec.poset.all()) || !spec.poset.is_downset(d) {
            return Err(Error::Hypothesis(format!("{:?} is not a down-set", d.to_vec())));
        }
    }
    if !k.is_subset(j) {
        return Err(Error::Hypothesis("K is not contained in J".into()));
    }
    let group = spec.group();
    let pj = spec.partition_of_set(j);
    let pk = spec.partition_of_set(k);
    let part = pj.block_of(0);
    let stab = part_stabiliser(&group, &pj, part)?;
    let (induced, subparts) = induced_on_subparts(&stab, &pk, &pj, part)?;
    let between = j.difference(k);
    let label: Vec<usize> = subparts.iter().map(|&s| spec.project(pk.blocks()[s][0], between)).collect();
    let expected = spec.restrict(between)?.group();
    let matches = same_after_relabel(&induced, &label, &expected)?;
    Ok(IntervalGroup { induced, expected, matches })
}

/// Incomparable nodes whose components are cyclic of the same prime order.
/// Every component must be primitive.
pub fn pb_obstruction(spec: &GwpSpec) -> Result<Option<(usize, usize)>> {
    for (i, g) in spec.components.iter().enumerate() {
        if !g.is_transitive() || invariant_partitions(g)?.len() > 2 {
            return Err(Error::Hypothesis(format!("component {} is not primitive", spec.poset.label(i))));
        }
    }
    let prime_order = |g: &PermGroup| {
        let n = g.order();
        (n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))).then_some(n)
    };
    for i in 0..spec.size() {
        for j in i + 1..spec.size() {
            if spec.poset.leq(i, j) || spec.poset.leq(j, i) {
                continue;
            }
            if let (Some(a), Some(b)) = (prime_order(&spec.components[i]), prime_order(&spec.components[j])) {
                if a == b {
                    return Ok(Some((i, j)));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct GwpProperties {
    pub report: PropertyReport,
    pub obstruction: Option<(String, String)>,
    pub downsets: usize,
    pub invariant_partitions: usize,
    pub downset_partitions_invariant: bool,
    /// No obstruction, `pb` and "exactly the down-set partitions" agree.
    pub consistent: bool,
}

pub fn gwp_properties(spec: &GwpSpec) -> Result<GwpProperties> {
    let obstruction = pb_obstruction(spec)?;
    let group = spec.group();
    let report = analyze(&group)?;
    let inv = invariant_partitions(&group)?;
    let downsets = spec.downset_partitions()?;
    let downset_partitions_invariant = downsets.iter().all(|(_, p)| inv.lattice().contains(p));
    let exact = downset_partitions_invariant && inv.len() == downsets.len();
    let free = obstruction.is_none();
    Ok(GwpProperties {
        consistent: report.pb == Some(free) && exact == free,
        obstruction: obstruction.map(|(i, j)| (spec.poset.label(i).to_string(), spec.poset.label(j).to_string())),
        downsets: downsets.len(),
        invariant_partitions: inv.len(),
        downset_partitions_invariant,
        report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    pub first_order: u128,
    pub second_order: u128,
    pub intersection_order: u128,
    pub meet_order: u128,
    /// The element-set intersection is the product over the intersected order.
    pub equal: bool,
    /// Set when the first order is contained in the second: whether every
    /// generator of the first product is a member of the second.
    pub first_in_second: Option<bool>,
    pub second_in_first: Option<bool>,
}

fn same_components(a: &GwpSpec, b: &GwpSpec) -> Result<()> {
    if a.poset.labels() != b.poset.labels() || a.radix.sizes() != b.radix.sizes() {
        return Err(Error::GroundSetMismatch);
    }
    for (g, h) in a.components.iter().zip(&b.components) {
        if !g.same_group(h)? {
            return Err(Error::GroundSetMismatch);
        }
    }
    Ok(())
}

fn poset_contained(a: &Poset, b: &Poset) -> bool {
    (0..a.size()).all(|i| (0..a.size()).all(|j| !a.leq(i, j) || b.leq(i, j)))
}

fn generators_member(a: &GwpSpec, b: &GwpSpec) -> bool {
    a.group().generators().iter().all(|g| b.membership(g).is_ok())
}

pub fn gwp_intersection(a: &GwpSpec, b: &GwpSpec) -> Result<IntersectionReport> {
    same_components(a, b)?;
    let meet = GwpSpec::with_cap(a.poset.intersect(&b.poset)?, a.components.clone(), a.degree())?;
    let ea = a.group().elements()?;
    let eb = b.group().elements()?;
    let common: HashSet<&Permutation> = ea.iter().filter(|x| eb.contains(*x)).collect();
    let em = meet.group().elements()?;
    let equal = common.len() == em.len() && em.iter().all(|x| common.contains(x));
    Ok(IntersectionReport {
        first_order: ea.len() as u128,
        second_order: eb.len() as u128,
        intersection_order: common.len() as u128,
        meet_order: em.len() as u128,
        equal,
        first_in_second: poset_contained(&a.poset, &b.poset).then(|| generators_member(a, b)),
        second_in_first: poset_contained(&b.poset, &a.poset).then(|| generators_member(b, a)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearExtensionReport {
    pub extensions: usize,
    pub extension_orders: Vec<u128>,
    pub intersection_order: u128,
    pub gwp_order: u128,
    pub equal: bool,
    /// Every generator of the product lies in every iterated wreath product.
    pub generators_contained: bool,
}

/// Intersects the iterated wreath products over all linear extensions.
pub fn linear_extension_intersection(spec: &GwpSpec, cap: usize) -> Result<LinearExtensionReport> {
    let orders = spec.poset.linear_extensions(cap)?;
    let mut common: Option<HashSet<Permutation>> = None;
    let mut extension_orders = Vec::new();
    let mut generators_contained = true;
    for order in &orders {
        let chain = GwpSpec::with_cap(spec.poset.from_linear_order(order)?, spec.components.clone(), spec.degree())?;
        generators_contained &= generators_member(spec, &chain);
        let els = chain.group().elements()?;
        extension_orders.push(els.len() as u128);
        common = Some(match common {
            None => els.iter().cloned().collect(),
            Some(c) => c.into_iter().filter(|x| els.contains(x)).collect(),
        });
    }
    let common = common.unwrap_or_default();
    let own = spec.group().elements()?;
    let equal = common.len() == own.len() && own.iter().all(|x| common.contains(x));
    Ok(LinearExtensionReport {
        extensions: orders.len(),
        extension_orders,
        intersection_order: common.len() as u128,
        gwp_order: own.len() as u128,
        equal,
        generators_contained,
    })
}

/// The groups attached to a join-indecomposable `m` of an invariant lattice.
#[derive(Debug, Clone)]
pub struct GStar {
    pub element: usize,
    pub predecessor: usize,
    /// Elements `Φ` with `Φ ∧ m = m⁻`.
    pub family: Vec<usize>,
    /// Join of the family.
    pub psi: usize,
    pub psi_in_family: bool,
    /// `Ψ ∨ m`.
    pub cover: usize,
    /// Induced on the `Ψ`-parts inside the `Ψ ∨ m`-part at 0.
    pub group: PermGroup,
    /// `Ψ`-parts inside the `Ψ ∨ m`-part at 0, in label order.
    pub subparts: Vec<usize>,
    /// Induced on the `m⁻`-parts inside the `m`-part at 0.
    pub naive: PermGroup,
    /// The naive group with each `m⁻`-part renamed by the `Ψ`-part
    /// containing it, when that is a bijection.
    pub naive_on_labels: Option<PermGroup>,
}

fn require_pbs(group: &PermGroup, lattice: &PartitionLattice) -> Result<()> {
    if lattice.degree() != group.degree() {
        return Err(Error::DegreeMismatch { expected: group.degree(), found: lattice.degree() });
    }
    for p in lattice.elements() {
        check_invariant(group, p)?;
    }
    if !lattice.is_distributive() {
        return Err(Error::NotDistributive);
    }
    Obs::from_lattice(lattice.clone())?;
    Ok(())
}

pub fn gstar(group: &PermGroup, lattice: &PartitionLattice, m: usize) -> Result<GStar> {
    require_pbs(group, lattice)?;
    gstar_unchecked(group, lattice, m)
}

fn gstar_unchecked(group: &PermGroup, lattice: &PartitionLattice, m: usize) -> Result<GStar> {
    let lat = lattice.abstract_lattice();
    let predecessor = lat.predecessor(m)?;
    let family: Vec<usize> = (0..lat.size()).filter(|&phi| lat.meet(phi, m) == predecessor).collect();
    let psi = family.iter().fold(lat.bottom(), |acc, &phi| lat.join(acc, phi));
    let cover = lat.join(psi, m);
    let (psi_p, cover_p) = (lattice.element(psi), lattice.element(cover));
    let base = cover_p.block_of(0);
    let stab = part_stabiliser(group, cover_p, base)?;
    let (gs, subparts) = induced_on_subparts(&stab, psi_p, cover_p, base)?;

    let (pi, pi_minus) = (lattice.element(m), lattice.element(predecessor));
    let naive_base = pi.block_of(0);
    let naive_stab = part_stabiliser(group, pi, naive_base)?;
    let (naive, naive_parts) = induced_on_subparts(&naive_stab, pi_minus, pi, naive_base)?;

    let position: HashMap<usize, usize> = subparts.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let label: Option<Vec<usize>> =
        naive_parts.iter().map(|&x| position.get(&psi_p.block_of(pi_minus.blocks()[x][0])).copied()).collect();
    let naive_on_labels = match label {
        Some(l) if l.len() == subparts.len() && l.iter().collect::<HashSet<_>>().len() == l.len() => {
            let gens = naive.generators().iter().map(|g| relabel(g, &l)).collect();
            Some(PermGroup::new(l.len(), gens)?.named(format!("naive {}", group.name())))
        }
        _ => None,
    };
    Ok(GStar {
        element: m,
        predecessor,
        psi_in_family: family.contains(&psi),
        family,
        psi,
        cover,
        group: gs,
        subparts,
        naive,
        naive_on_labels,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeReport {
    pub label: String,
    pub pi: PartitionLiteral,
    pub pi_minus: PartitionLiteral,
    pub family: Vec<PartitionLiteral>,
    pub psi: PartitionLiteral,
    pub psi_in_family: bool,
    pub gstar: GroupFile,
    pub gstar_order: u128,
    pub naive_order: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorOutcome {
    pub generator: usize,
    pub member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<NonMember>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub poset: PosetFile,
    pub nodes: Vec<NodeReport>,
    pub generators: Vec<GeneratorOutcome>,
    pub verdict: bool,
    pub message: String,
    pub group_order: u128,
    pub gwp_order: u128,
    pub order_divides: bool,
    /// Membership with the naive groups as components, when they can be
    /// placed on the same labels.
    pub naive_verdict: Option<bool>,
    /// Coordinate point of each original point.
    pub coordinates: Vec<usize>,
    #[serde(skip)]
    pub spec: Option<GwpSpec>,
}

/// Coordinatises the points by the join-indecomposables of a distributive
/// orthogonal block structure preserved by `group` (its invariant lattice
/// when `lattice` is `None`) and tests every generator for membership in the
/// product of the `G*` groups.
pub fn verify_embedding(group: &PermGroup, lattice: Option<&PartitionLattice>) -> Result<EmbeddingReport> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let owned;
    let lattice = match lattice {
        Some(l) => l,
        None => {
            owned = invariant_partitions(group)?.lattice().clone();
            &owned
        }
    };
    require_pbs(group, lattice)?;
    let n = group.degree();
    let (poset, ji) = lattice.ji_poset();
    let stars: Vec<GStar> = ji.iter().map(|&m| gstar_unchecked(group, lattice, m)).collect::<Result<_>>()?;

    let sizes: Vec<usize> = stars.iter().map(|s| s.subparts.len()).collect();
    let radix = MixedRadix::new(&sizes, n.max(1))
        .map_err(|_| Error::Hypothesis("coordinatisation failed: part counts exceed the degree".into()))?;
    if radix.total() != n {
        return Err(Error::Hypothesis(format!(
            "coordinatisation failed: part counts multiply to {} on {n} points",
            radix.total()
        )));
    }
    let mut coordinates = vec![0; n];
    for (i, star) in stars.iter().enumerate() {
        let cover = lattice.element(star.cover);
        let psi = lattice.element(star.psi);
        let transversal = part_transversal(group, cover);
        let label: HashMap<usize, usize> = star.subparts.iter().enumerate().map(|(l, &s)| (s, l)).collect();
        for (w, c) in coordinates.iter_mut().enumerate() {
            let back = transversal[cover.block_of(w)].apply(w);
            *c += label[&psi.block_of(back)] * radix.strides()[i];
        }
    }
    if coordinates.iter().collect::<HashSet<_>>().len() != n {
        return Err(Error::Hypothesis("coordinatisation failed: coordinate map is not injective".into()));
    }

    let relabelled: Vec<Permutation> = group.generators().iter().map(|g| relabel(g, &coordinates)).collect();
    let spec = GwpSpec::with_cap(poset.clone(), stars.iter().map(|s| s.group.clone()).collect(), n)?;
    let generators: Vec<GeneratorOutcome> = relabelled
        .iter()
        .enumerate()
        .map(|(gi, g)| match spec.membership(g) {
            Ok(_) => GeneratorOutcome { generator: gi, member: true, failure: None },
            Err(e) => GeneratorOutcome { generator: gi, member: false, failure: Some(e) },
        })
        .collect();
    let verdict = generators.iter().all(|o| o.member);

    let naive_verdict = match stars.iter().map(|s| s.naive_on_labels.clone()).collect::<Option<Vec<_>>>() {
        Some(comps) => {
            let naive = GwpSpec::with_cap(poset.clone(), comps, n)?;
            Some(relabelled.iter().all(|g| naive.membership(g).is_ok()))
        }
        None => None,
    };

    let group_order = group.order();
    let gwp_order = spec.expected_order()?;
    let nodes = stars
        .iter()
        .enumerate()
        .map(|(i, s)| NodeReport {
            label: poset.label(i).to_string(),
            pi: lattice.element(s.element).to_literal(),
            pi_minus: lattice.element(s.predecessor).to_literal(),
            family: s.family.iter().map(|&f| lattice.element(f).to_literal()).collect(),
            psi: lattice.element(s.psi).to_literal(),
            psi_in_family: s.psi_in_family,
            gstar: s.group.to_file(),
            gstar_order: s.group.order(),
            naive_order: s.naive.order(),
        })
        .collect();
    Ok(EmbeddingReport {
        poset: poset.to_file(),
        nodes,
        generators,
        verdict,
        message: if verdict { "embedded".into() } else { "not verified under canonical labelling".into() },
        group_order,
        gwp_order,
        order_divides: gwp_order % group_order == 0,
        naive_verdict,
        coordinates,
        spec: Some(spec),
    })
}

/// For each part `T` of an invariant partition, an element mapping `T` back
/// onto the part containing 0.
fn part_transversal(group: &PermGroup, partition: &Partition) -> Vec<Permutation> {
    let k = partition.num_blocks();
    let mut forward: Vec<Option<Permutation>> = vec![None; k];
    let base = partition.block_of(0);
    forward[base] = Some(group.identity());
    let mut queue = VecDeque::from([base]);
    while let Some(t) = queue.pop_front() {
        let rep = forward[t].clone().expect("visited");
        for g in group.generators() {
            let u = partition.block_of(g.apply(partition.blocks()[t][0]));
            if forward[u].is_none() {
                forward[u] = Some(rep.then(g));
                queue.push_back(u);
            }
        }
    }
    forward.into_iter().map(|f| f.expect("transitive group").inverse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{direct_product_product_action, wreath_imprimitive};

    fn c(n: usize) -> PermGroup {
        PermGroup::cyclic(n)
    }

    fn antichain(a: PermGroup, b: PermGroup) -> GwpSpec {
        GwpSpec::new(Poset::antichain(2), vec![a, b]).unwrap()
    }

    fn chain(a: PermGroup, b: PermGroup) -> GwpSpec {
        GwpSpec::new(Poset::chain(2), vec![a, b]).unwrap()
    }

    fn vee(comps: [PermGroup; 3]) -> GwpSpec {
        GwpSpec::new(Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap(), comps.to_vec()).unwrap()
    }

    fn swap() -> Permutation {
        Permutation::from_images(vec![1, 0]).unwrap()
    }

    #[test]
    fn act_on_antichain_and_chain() {
        let s = antichain(c(2), c(2));
        let mut f = s.identity();
        f.tables[0][0] = swap();
        assert_eq!(s.realise(&f).images(), vec![1, 0, 3, 2]);
        assert_eq!(s.realise(&s.identity()), Permutation::identity(4));

        let s = chain(c(2), c(2));
        let mut f = s.identity();
        f.tables[0][0] = swap();
        // only the two points with second coordinate 0 move
        assert_eq!(s.realise(&f).images(), vec![1, 0, 2, 3]);
    }

    #[test]
    fn orders_match_formula() {
        for (s, order) in [
            (antichain(c(2), c(2)), 4),
            (chain(c(2), c(2)), 8),
            (vee([c(2), c(2), c(2)]), 32),
            (chain(PermGroup::symmetric(3), c(2)), 72),
        ] {
            assert_eq!(s.expected_order().unwrap(), order);
            assert_eq!(s.group().order(), order);
            assert_eq!(s.group().elements().unwrap().len() as u128, order);
        }
    }

    #[test]
    fn degenerate_cases_are_classical_products() {
        let (g, h) = (PermGroup::symmetric(3), c(2));
        let a = antichain(g.clone(), h.clone()).group();
        assert!(a.same_group(&direct_product_product_action(&g, &h)).unwrap());
        let w = chain(g.clone(), h.clone()).group();
        assert!(w.same_group(&wreath_imprimitive(&g, &h)).unwrap());
    }

    #[test]
    fn multiplication_and_inverse() {
        let s = vee([c(2), c(3), c(2)]);
        let gens = s.canonical_generators();
        for f in &gens {
            for h in &gens {
                let fh = s.multiply(f, h);
                assert_eq!(s.realise(&fh), s.realise(f).then(&s.realise(h)));
            }
            assert_eq!(s.multiply(f, &s.inverse(f)), s.identity());
            assert_eq!(s.multiply(f, &s.identity()), *f);
        }
    }

    #[test]
    fn membership_round_trips() {
        let s = vee([c(2), c(3), c(2)]);
        let gens = s.canonical_generators();
        let mut f = s.identity();
        for g in gens.iter().cycle().take(17) {
            f = s.multiply(&f, g);
            assert_eq!(s.membership(&s.realise(&f)).unwrap(), f);
        }
    }

    #[test]
    fn base_transposition_separates_chain_from_antichain() {
        let p = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        assert!(chain(c(2), c(2)).membership(&p).is_ok());
        let err = antichain(c(2), c(2)).membership(&p).unwrap_err();
        assert_eq!(err.node, 0);
    }

    #[test]
    fn semidirect_examples() {
        let sd = semidirect_decomposition(&chain(c(2), c(2)), 0).unwrap();
        assert_eq!(sd.kernel.order(), 4);
        assert_eq!(sd.quotient.order(), 2);
        assert!(sd.classes.is_discrete());
        assert!(sd.holds());
        // no down-set partition is incomparable to the blocks, so the literal reading lumps them
        assert!(sd.literal_classes.is_universal());

        let sd = semidirect_decomposition(&antichain(c(2), c(2)), 0).unwrap();
        assert_eq!(sd.kernel.order(), 2);
        assert!(sd.classes.is_universal());
        assert!(sd.holds());

        let sd = semidirect_decomposition(&vee([c(2), c(2), c(2)]), 0).unwrap();
        assert_eq!(sd.kernel.order(), 4);
        assert_eq!(sd.classes.block_sizes(), vec![2, 2]);
        assert!(sd.holds());

        assert!(semidirect_decomposition(&chain(c(2), c(2)), 1).is_err());
    }

    #[test]
    fn interval_examples() {
        let s = chain(c(2), c(2));
        let all = s.poset().all();
        let r = interval_group(&s, all, NodeSet::EMPTY).unwrap();
        assert!(r.matches && r.induced.order() == 8);
        let r = interval_group(&s, NodeSet::singleton(0), NodeSet::EMPTY).unwrap();
        assert!(r.matches && r.induced.order() == 2);

        let v = vee([c(2), c(3), c(2)]);
        let r = interval_group(&v, NodeSet::from_indices([0, 1]), NodeSet::singleton(0)).unwrap();
        assert!(r.matches);
        assert_eq!(r.induced.order(), 3);
        assert!(interval_group(&v, NodeSet::singleton(2), NodeSet::EMPTY).is_err());
    }

    #[test]
    fn obstruction_and_properties() {
        let p = gwp_properties(&antichain(c(2), c(2))).unwrap();
        assert_eq!(p.obstruction, Some(("m1".into(), "m2".into())));
        assert_eq!(p.report.pb, Some(false));
        assert_eq!((p.invariant_partitions, p.downsets), (5, 4));
        assert!(p.consistent);

        let p = gwp_properties(&antichain(c(2), c(3))).unwrap();
        assert!(p.obstruction.is_none());
        assert_eq!((p.invariant_partitions, p.downsets), (4, 4));
        assert!(p.consistent && p.report.pb == Some(true));

        let p = gwp_properties(&chain(c(2), c(2))).unwrap();
        assert!(p.obstruction.is_none() && p.consistent);

        let imprimitive = PermGroup::cyclic(4);
        assert!(matches!(pb_obstruction(&antichain(imprimitive, c(2))), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn intersections() {
        let up = chain(c(2), c(2));
        let down = GwpSpec::new(Poset::from_covers(2, &[(1, 0)]).unwrap(), vec![c(2), c(2)]).unwrap();
        let r = gwp_intersection(&up, &down).unwrap();
        assert_eq!((r.first_order, r.second_order, r.intersection_order), (8, 8, 4));
        assert!(r.equal);

        let r = gwp_intersection(&antichain(c(2), c(2)), &up).unwrap();
        assert_eq!(r.first_in_second, Some(true));
        assert_eq!(r.second_in_first, None);

        let r = linear_extension_intersection(&vee([c(2), c(2), c(2)]), 100).unwrap();
        assert_eq!(r.extensions, 2);
        assert_eq!(r.extension_orders, vec![128, 128]);
        assert_eq!(r.intersection_order, 32);
        assert!(r.equal && r.generators_contained);
    }

    #[test]
    fn gstar_on_imprimitive_group() {
        let d4 = PermGroup::from_cycles(4, &[&[&[0, 1, 2, 3]], &[&[0, 2]]]).unwrap();
        let inv = invariant_partitions(&d4).unwrap();
        let lat = inv.lattice();
        let blocks = lat.index_of(&Partition::from_labels(&[0, 1, 0, 1])).unwrap();
        let top = lat.abstract_lattice().top();
        let s = gstar(&d4, lat, blocks).unwrap();
        assert_eq!((s.group.order(), s.naive.order()), (2, 2));
        let s = gstar(&d4, lat, top).unwrap();
        assert_eq!(s.psi, blocks);
        assert_eq!(s.group.order(), 2);

        let r = verify_embedding(&d4, None).unwrap();
        assert!(r.verdict);
        assert_eq!((r.group_order, r.gwp_order), (8, 8));
    }

    #[test]
    fn self_embedding_over_vee() {
        let v = vee([c(2), c(3), c(2)]);
        let r = verify_embedding(&v.group(), None).unwrap();
        assert!(r.verdict && r.order_divides);
        assert_eq!(r.gwp_order, v.expected_order().unwrap());
        let ji = r.spec.as_ref().unwrap().poset().clone();
        assert!(ji.is_isomorphic(v.poset()));
    }

    #[test]
    fn dump_round_trip() {
        let s = chain(c(3), c(2));
        let f = s.multiply(&s.canonical_generators()[1], &s.canonical_generators()[2]);
        let text = serde_json::to_string(&s.dump(&f)).unwrap();
        let back: ElementDump = serde_json::from_str(&text).unwrap();
        assert_eq!(s.from_dump(&back).unwrap(), f);
        let file = s.to_file();
        let again = file.to_spec(None).unwrap();
        assert!(again.group().same_group(&s.group()).unwrap());
    }
}
