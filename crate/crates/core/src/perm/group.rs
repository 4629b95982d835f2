use std::collections::{HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::stabchain::StabChain;
use super::Permutation;
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};

/// Default cap on explicit element enumeration.
pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

/// A permutation group given by generators.
///
/// The element set and the stabiliser chain are computed on first use and
/// memoised; concurrent first uses compute the same value and one of them
/// wins.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    name: String,
    element_cap: usize,
    elements: OnceLock<Arc<HashSet<Permutation>>>,
    chain: OnceLock<Arc<StabChain>>,
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: g.degree() });
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            name: String::new(),
            element_cap: DEFAULT_ELEMENT_CAP,
            elements: OnceLock::new(),
            chain: OnceLock::new(),
        })
    }

    /// Group generated by permutations given in cycle notation.
    pub fn from_cycles(degree: usize, generators: &[&[&[usize]]]) -> Result<Self> {
        let gens =
            generators.iter().map(|cycles| Permutation::from_cycles(degree, cycles)).collect::<Result<Vec<_>>>()?;
        PermGroup::new(degree, gens)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("no generators")
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[&[0, 1]]).unwrap());
        }
        if degree >= 3 {
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Permutation::from_cycles(degree, &[&cycle]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap().named(format!("S{degree}"))
    }

    /// Cyclic group generated by an `n`-cycle (the regular action of `C_n`).
    pub fn cyclic(n: usize) -> Self {
        let cycle: Vec<usize> = (0..n).collect();
        let gens = if n >= 2 { vec![Permutation::from_cycles(n, &[&cycle]).unwrap()] } else { Vec::new() };
        PermGroup::new(n, gens).unwrap().named(format!("C{n}"))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_element_cap(mut self, cap: usize) -> Self {
        self.element_cap = cap;
        self.elements = OnceLock::new();
        self
    }

    /// A new group on the same degree inheriting this group's cap.
    pub(crate) fn derived(&self, generators: Vec<Permutation>) -> PermGroup {
        PermGroup::new(self.degree, generators).expect("same degree").with_element_cap(self.element_cap)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn stab_chain(&self) -> Arc<StabChain> {
        self.chain.get_or_init(|| Arc::new(StabChain::new(self.degree, &self.generators, &[]))).clone()
    }

    pub fn order(&self) -> u128 {
        self.stab_chain().order()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.stab_chain().contains(p)
    }

    /// All elements, by breadth-first closure under right multiplication by
    /// generators. Fails once more than `element_cap` elements are found.
    pub fn elements(&self) -> Result<Arc<HashSet<Permutation>>> {
        if let Some(e) = self.elements.get() {
            return Ok(e.clone());
        }
        let id = self.identity();
        let mut seen = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.then(g);
                if !seen.contains(&y) {
                    if seen.len() >= self.element_cap {
                        return Err(Error::CapExceeded {
                            what: "group element enumeration",
                            cap: self.element_cap as u128,
                        });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let _ = self.elements.set(Arc::new(seen));
        Ok(self.elements.get().expect("just set").clone())
    }

    /// Elements in a fixed (sorted) order.
    pub fn sorted_elements(&self) -> Result<Vec<Permutation>> {
        let mut v: Vec<Permutation> = self.elements()?.iter().cloned().collect();
        v.sort();
        Ok(v)
    }

    pub fn orbit(&self, alpha: usize) -> Result<Orbit> {
        if alpha >= self.degree {
            return Err(Error::PointOutOfRange { point: alpha, degree: self.degree });
        }
        Ok(Orbit::compute(self.degree, &self.generators, alpha))
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || Orbit::compute(self.degree, &self.generators, 0).points.len() == self.degree
    }

    /// Partition of the points into orbits.
    pub fn orbit_partition(&self) -> Partition {
        let mut uf = UnionFind::new(self.degree);
        for g in &self.generators {
            for x in 0..self.degree {
                uf.union(x, g.apply(x));
            }
        }
        uf.into_partition()
    }

    /// Stabiliser of `alpha`.
    ///
    /// Generated by the Schreier generators of the orbit transversal, thinned
    /// by sifting them through a stabiliser chain with base starting at
    /// `alpha`; only generators that enlarge the chain survive.
    pub fn point_stabiliser(&self, alpha: usize) -> Result<PermGroup> {
        if alpha >= self.degree {
            return Err(Error::PointOutOfRange { point: alpha, degree: self.degree });
        }
        let chain = StabChain::new(self.degree, &self.generators, &[alpha]);
        let gens = chain.stabiliser_generators(1);
        let stab = self.derived(gens);
        Ok(stab)
    }

    /// Raw Schreier generators for the stabiliser of `alpha`, deduplicated.
    pub fn schreier_generators(&self, alpha: usize) -> Result<Vec<Permutation>> {
        let orbit = self.orbit(alpha)?;
        let mut out: Vec<Permutation> = Vec::new();
        let mut seen = HashSet::new();
        for &beta in &orbit.points {
            let u = orbit.transversal[beta].as_ref().unwrap();
            for s in &self.generators {
                let v = orbit.transversal[s.apply(beta)].as_ref().unwrap();
                let g = u.then(s).then(&v.inverse());
                if !g.is_identity() && seen.insert(g.clone()) {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }

    /// Group equality as sets of permutations.
    pub fn same_group(&self, other: &PermGroup) -> Result<bool> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(self.generators.iter().all(|g| other.contains(g)) && other.generators.iter().all(|g| self.contains(g)))
    }

    /// True when every generator of `other` lies in this group.
    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.degree == self.degree && other.generators.iter().all(|g| self.contains(g))
    }

    /// Whether `other` is normalised by every generator of this group.
    pub fn normalises(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|x| other.generators.iter().all(|n| other.contains(&n.conjugate_by(x))))
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            name: self.name.clone(),
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.images()).collect(),
            subgroup_generators: None,
        }
    }
}

/// An orbit with a transversal: `transversal[beta]` maps the base point to `beta`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub base: usize,
    /// Orbit points in breadth-first order.
    pub points: Vec<usize>,
    pub transversal: Vec<Option<Permutation>>,
    /// Generator words: `words[beta]` lists generator indices whose product maps base to beta.
    pub words: Vec<Option<Vec<usize>>>,
}

impl Orbit {
    pub(crate) fn compute(degree: usize, generators: &[Permutation], alpha: usize) -> Orbit {
        let mut transversal = vec![None; degree];
        let mut words = vec![None; degree];
        transversal[alpha] = Some(Permutation::identity(degree));
        words[alpha] = Some(Vec::new());
        let mut points = vec![alpha];
        let mut k = 0;
        while k < points.len() {
            let x = points[k];
            let ux = transversal[x].clone().unwrap();
            let wx: Vec<usize> = words[x].clone().unwrap();
            for (gi, g) in generators.iter().enumerate() {
                let y = g.apply(x);
                if transversal[y].is_none() {
                    transversal[y] = Some(ux.then(g));
                    let mut w = wx.clone();
                    w.push(gi);
                    words[y] = Some(w);
                    points.push(y);
                }
            }
            k += 1;
        }
        Orbit { base: alpha, points, transversal, words }
    }

    pub fn contains(&self, beta: usize) -> bool {
        self.transversal.get(beta).is_some_and(|t| t.is_some())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sorted_points(&self) -> Vec<usize> {
        let mut v = self.points.clone();
        v.sort_unstable();
        v
    }
}

/// Group file: `{"name", "degree", "generators": [[..], ..]}` with zero-based
/// image arrays; coset-action files add `"subgroup_generators"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    #[serde(default)]
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_generators: Option<Vec<Vec<usize>>>,
}

impl GroupFile {
    pub fn to_group(&self) -> Result<PermGroup> {
        let gens = self.generators.iter().map(|g| Permutation::from_images(g.clone())).collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::new(self.degree, gens)?.named(self.name.clone()))
    }

    /// The group the file describes: the coset action on the subgroup when
    /// `subgroup_generators` is present, the generated group otherwise.
    pub fn realise(&self) -> Result<PermGroup> {
        let group = self.to_group()?;
        match self.subgroup()? {
            None => Ok(group),
            Some(sub) => Ok(super::action::coset_action(&group, &sub)?.0.named(self.name.clone())),
        }
    }

    pub fn subgroup(&self) -> Result<Option<Vec<Permutation>>> {
        match &self.subgroup_generators {
            None => Ok(None),
            Some(gs) => {
                let perms = gs.iter().map(|g| Permutation::from_images(g.clone())).collect::<Result<Vec<_>>>()?;
                for p in &perms {
                    if p.degree() != self.degree {
                        return Err(Error::DegreeMismatch { expected: self.degree, found: p.degree() });
                    }
                }
                Ok(Some(perms))
            }
        }
    }
}
