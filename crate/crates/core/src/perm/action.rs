use std::collections::HashMap;

use super::stabchain::StabChain;
use super::{PermGroup, Permutation};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// A group together with the images of its generators under an action on
/// `{0, .., target_degree-1}`.
#[derive(Debug, Clone)]
pub struct ActionRecord {
    pub source: PermGroup,
    pub target_degree: usize,
    pub images: Vec<Permutation>,
}

impl ActionRecord {
    pub fn image_group(&self) -> PermGroup {
        PermGroup::new(self.target_degree, self.images.clone())
            .expect("images share the target degree")
            .with_element_cap(self.source.element_cap())
    }

    /// Checks that generator relations hold by comparing the element-level
    /// multiplication of source elements against their images. Desk scale only.
    pub fn verify_homomorphism(&self) -> Result<bool> {
        let elements = self.source.elements()?;
        let mut image_of: HashMap<Permutation, Permutation> = HashMap::new();
        let id = self.source.identity();
        image_of.insert(id.clone(), Permutation::identity(self.target_degree));
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            let ix = image_of[&x].clone();
            for (g, ig) in self.source.generators().iter().zip(&self.images) {
                let y = x.then(g);
                let iy = ix.then(ig);
                match image_of.get(&y) {
                    Some(prev) if *prev != iy => return Ok(false),
                    Some(_) => {}
                    None => {
                        image_of.insert(y.clone(), iy);
                        frontier.push(y);
                    }
                }
            }
        }
        Ok(image_of.len() == elements.len())
    }
}

/// Action of `group` on the right cosets `Hg` of the subgroup generated by
/// `subgroup_generators`. Returns the image group (its generators are the
/// images of `group`'s generators, in order) and one representative per coset.
pub fn coset_action(group: &PermGroup, subgroup_generators: &[Permutation]) -> Result<(PermGroup, Vec<Permutation>)> {
    for (i, h) in subgroup_generators.iter().enumerate() {
        if h.degree() != group.degree() {
            return Err(Error::DegreeMismatch { expected: group.degree(), found: h.degree() });
        }
        if !group.contains(h) {
            return Err(Error::NotSubgroup { generator: i });
        }
    }
    let sub = group.derived(subgroup_generators.to_vec());
    let index = group.order() / sub.order();
    if index > group.element_cap() as u128 {
        return Err(Error::CapExceeded { what: "coset count", cap: group.element_cap() as u128 });
    }
    let h_elements: Vec<Permutation> = sub.sorted_elements()?;
    // A coset Hg is keyed by its least element.
    let key = |g: &Permutation| -> Permutation { h_elements.iter().map(|h| h.then(g)).min().expect("H non-empty") };

    let mut reps = vec![group.identity()];
    let mut index_of: HashMap<Permutation, usize> = HashMap::new();
    index_of.insert(key(&reps[0]), 0);
    let mut images: Vec<Vec<usize>> = vec![Vec::new(); group.generators().len()];
    let mut k = 0;
    while k < reps.len() {
        let r = reps[k].clone();
        for (gi, g) in group.generators().iter().enumerate() {
            let rg = r.then(g);
            let kk = key(&rg);
            let target = match index_of.get(&kk) {
                Some(&t) => t,
                None => {
                    let t = reps.len();
                    index_of.insert(kk, t);
                    reps.push(rg);
                    t
                }
            };
            images[gi].push(target);
        }
        k += 1;
    }
    let gens = images.into_iter().map(Permutation::from_images_unchecked).collect();
    let image = PermGroup::new(reps.len(), gens)?.with_element_cap(group.element_cap());
    Ok((image, reps))
}

/// Checks that every generator maps parts of `partition` onto parts.
pub fn check_invariant(group: &PermGroup, partition: &Partition) -> Result<()> {
    if partition.degree() != group.degree() {
        return Err(Error::DegreeMismatch { expected: group.degree(), found: partition.degree() });
    }
    for (gi, g) in group.generators().iter().enumerate() {
        if !partition.is_invariant_under(g) {
            return Err(Error::NotInvariant { generator: gi });
        }
    }
    Ok(())
}

/// Permutation induced by `g` on the parts of an invariant partition.
fn action_on_parts(g: &Permutation, partition: &Partition) -> Permutation {
    let images = partition.blocks().iter().map(|b| partition.block_of(g.apply(b[0]))).collect();
    Permutation::from_images_unchecked(images)
}

/// Action on the parts of an invariant partition; parts are numbered by
/// their least point.
pub fn induced_action(group: &PermGroup, partition: &Partition) -> Result<ActionRecord> {
    check_invariant(group, partition)?;
    let images = group.generators().iter().map(|g| action_on_parts(g, partition)).collect();
    Ok(ActionRecord { source: group.clone(), target_degree: partition.num_blocks(), images })
}

/// Generators acting on the points followed by the parts: point `n + b`
/// stands for part `b`.
fn extended_generators(group: &PermGroup, partition: &Partition) -> Vec<Permutation> {
    let n = group.degree();
    group
        .generators()
        .iter()
        .map(|g| {
            let on_parts = action_on_parts(g, partition);
            let mut images = g.images();
            images.extend(on_parts.images().into_iter().map(|b| n + b));
            Permutation::from_images_unchecked(images)
        })
        .collect()
}

fn restrict(p: &Permutation, n: usize) -> Permutation {
    Permutation::from_images_unchecked(p.images()[..n].to_vec())
}

/// Subgroup of elements fixing every part of an invariant partition.
///
/// Computed as a pointwise stabiliser in the action on points and parts,
/// with the part-points placed first in the base.
pub fn kernel_on_parts(group: &PermGroup, partition: &Partition) -> Result<PermGroup> {
    check_invariant(group, partition)?;
    let n = group.degree();
    let k = partition.num_blocks();
    let ext = extended_generators(group, partition);
    let prefix: Vec<usize> = (n..n + k).collect();
    let chain = StabChain::new(n + k, &ext, &prefix);
    let gens = chain.stabiliser_generators(k).iter().map(|g| restrict(g, n)).collect();
    Ok(group.derived(gens))
}

/// Setwise stabiliser of part `part` of an invariant partition.
pub fn part_stabiliser(group: &PermGroup, partition: &Partition, part: usize) -> Result<PermGroup> {
    check_invariant(group, partition)?;
    let n = group.degree();
    let ext = extended_generators(group, partition);
    let chain = StabChain::new(n + partition.num_blocks(), &ext, &[n + part]);
    let gens = chain.stabiliser_generators(1).iter().map(|g| restrict(g, n)).collect();
    Ok(group.derived(gens))
}

/// Group induced by `group` on the parts of `fine` contained in part
/// `coarse_part` of `coarse`. `group` must stabilise that part and `fine`
/// must refine `coarse`. Sub-parts are labelled by their least point.
pub fn induced_on_subparts(
    group: &PermGroup,
    fine: &Partition,
    coarse: &Partition,
    coarse_part: usize,
) -> Result<(PermGroup, Vec<usize>)> {
    check_invariant(group, fine)?;
    let region = &coarse.blocks()[coarse_part];
    let mut subparts: Vec<usize> = region.iter().map(|&x| fine.block_of(x)).collect();
    subparts.sort_unstable();
    subparts.dedup();
    let label: HashMap<usize, usize> = subparts.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut gens = Vec::new();
    for (gi, g) in group.generators().iter().enumerate() {
        let mut images = Vec::with_capacity(subparts.len());
        for &b in &subparts {
            let img = fine.block_of(g.apply(fine.blocks()[b][0]));
            match label.get(&img) {
                Some(&l) => images.push(l),
                None => return Err(Error::NotInvariant { generator: gi }),
            }
        }
        gens.push(Permutation::from_images_unchecked(images));
    }
    let out = PermGroup::new(subparts.len(), gens)?.with_element_cap(group.element_cap());
    Ok((out, subparts))
}

/// Product action of `G × H` on `Γ × Δ`; the pair `(γ, δ)` is point `γ + |Γ|·δ`.
pub fn direct_product_product_action(g: &PermGroup, h: &PermGroup) -> PermGroup {
    let (a, b) = (g.degree(), h.degree());
    let mut gens = Vec::new();
    for x in g.generators() {
        gens.push(Permutation::from_images_unchecked((0..a * b).map(|p| x.apply(p % a) + a * (p / a)).collect()));
    }
    for y in h.generators() {
        gens.push(Permutation::from_images_unchecked((0..a * b).map(|p| p % a + a * y.apply(p / a)).collect()));
    }
    let name = format!("{} x {}", g.name(), h.name());
    PermGroup::new(a * b, gens).unwrap().named(name).with_element_cap(g.element_cap())
}

/// Imprimitive wreath product `G wr H` on `Γ × Δ`, with blocks `Γ × {δ}`;
/// the pair `(γ, δ)` is point `γ + |Γ|·δ`.
pub fn wreath_imprimitive(g: &PermGroup, h: &PermGroup) -> PermGroup {
    let (a, b) = (g.degree(), h.degree());
    let mut gens = Vec::new();
    for block in 0..b {
        for x in g.generators() {
            gens.push(Permutation::from_images_unchecked(
                (0..a * b).map(|p| if p / a == block { x.apply(p % a) + a * block } else { p }).collect(),
            ));
        }
    }
    for y in h.generators() {
        gens.push(Permutation::from_images_unchecked((0..a * b).map(|p| p % a + a * y.apply(p / a)).collect()));
    }
    let name = format!("{} wr {}", g.name(), h.name());
    PermGroup::new(a * b, gens).unwrap().named(name).with_element_cap(g.element_cap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermGroup {
        PermGroup::from_cycles(3, &[&[&[0, 1]], &[&[0, 1, 2]]]).unwrap()
    }

    fn d4() -> PermGroup {
        PermGroup::from_cycles(4, &[&[&[0, 1, 2, 3]], &[&[0, 2]]]).unwrap()
    }

    fn blocks(n: usize, b: Vec<Vec<usize>>) -> Partition {
        Partition::from_blocks(n, b).unwrap()
    }

    #[test]
    fn coset_action_recovers_natural_s3() {
        let h = vec![Permutation::from_cycles(3, &[&[0, 1]]).unwrap()];
        let (image, reps) = coset_action(&s3(), &h).unwrap();
        assert_eq!(image.degree(), 3);
        assert_eq!(reps.len(), 3);
        assert_eq!(image.order(), 6);
    }

    #[test]
    fn coset_action_rejects_non_subgroups() {
        let c3 = PermGroup::from_cycles(3, &[&[&[0, 1, 2]]]).unwrap();
        let h = vec![Permutation::from_cycles(3, &[&[0, 1]]).unwrap()];
        assert_eq!(coset_action(&c3, &h).unwrap_err(), Error::NotSubgroup { generator: 0 });
    }

    #[test]
    fn coset_action_of_a5_on_fifteen_points() {
        let a5 = PermGroup::from_cycles(5, &[&[&[0, 1, 2]], &[&[0, 1, 2, 3, 4]]]).unwrap();
        let v4 = vec![
            Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap(),
            Permutation::from_cycles(5, &[&[0, 2], &[1, 3]]).unwrap(),
        ];
        let (image, _) = coset_action(&a5, &v4).unwrap();
        assert_eq!(image.degree(), 15);
        assert!(image.is_transitive());
        assert_eq!(image.order(), 60);
    }

    #[test]
    fn coset_action_on_point_stabiliser_is_the_original_action() {
        let g = d4();
        let stab = g.point_stabiliser(0).unwrap();
        let (image, reps) = coset_action(&g, stab.generators()).unwrap();
        // coset G_0 r corresponds to the point 0r
        let relabel: Vec<usize> = reps.iter().map(|r| r.apply(0)).collect();
        for (x, y) in g.generators().iter().zip(image.generators()) {
            for c in 0..reps.len() {
                assert_eq!(x.apply(relabel[c]), relabel[y.apply(c)]);
            }
        }
    }

    #[test]
    fn induced_actions() {
        let diag = blocks(4, vec![vec![0, 2], vec![1, 3]]);
        let rec = induced_action(&d4(), &diag).unwrap();
        assert_eq!(rec.target_degree, 2);
        assert_eq!(rec.image_group().order(), 2);
        assert!(rec.verify_homomorphism().unwrap());

        let u = Partition::universal(4);
        let rec = induced_action(&d4(), &u).unwrap();
        assert_eq!(rec.target_degree, 1);
        assert_eq!(rec.image_group().order(), 1);

        let bad = blocks(4, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(induced_action(&d4(), &bad).unwrap_err(), Error::NotInvariant { generator: 0 });
    }

    #[test]
    fn kernels() {
        let c2 = PermGroup::cyclic(2);
        let wr = wreath_imprimitive(&c2, &c2);
        let base_blocks = blocks(4, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(kernel_on_parts(&wr, &base_blocks).unwrap().order(), 4);
        assert_eq!(induced_action(&wr, &base_blocks).unwrap().image_group().order(), 2);

        let dp = direct_product_product_action(&c2, &c2);
        // parts Γ × {δ}: the first factor fixes them
        let rows = blocks(4, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(kernel_on_parts(&dp, &rows).unwrap().order(), 2);
        assert_eq!(kernel_on_parts(&d4(), &Partition::discrete(4)).unwrap().order(), 1);
    }

    #[test]
    fn kernel_matches_element_filtering() {
        let g = wreath_imprimitive(&s3(), &PermGroup::cyclic(2));
        let p = blocks(6, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let kernel = kernel_on_parts(&g, &p).unwrap();
        let filtered: Vec<_> = g
            .elements()
            .unwrap()
            .iter()
            .filter(|x| p.blocks().iter().all(|b| p.block_of(x.apply(b[0])) == p.block_of(b[0])))
            .cloned()
            .collect();
        assert_eq!(kernel.order(), filtered.len() as u128);
        assert!(filtered.iter().all(|x| kernel.contains(x)));
        assert!(g.normalises(&kernel));
        let image = induced_action(&g, &p).unwrap().image_group();
        assert_eq!(g.order(), kernel.order() * image.order());
    }

    #[test]
    fn product_orders() {
        let c2 = PermGroup::cyclic(2);
        assert_eq!(direct_product_product_action(&c2, &c2).order(), 4);
        assert_eq!(wreath_imprimitive(&c2, &c2).order(), 8);
        assert_eq!(wreath_imprimitive(&s3(), &c2).order(), 72);
    }

    #[test]
    fn products_preserve_their_partitions() {
        let g = s3();
        let h = PermGroup::cyclic(2);
        let wr = wreath_imprimitive(&g, &h);
        let canonical = blocks(6, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(check_invariant(&wr, &canonical).is_ok());
        let dp = direct_product_product_action(&g, &h);
        let other = blocks(6, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert!(check_invariant(&dp, &canonical).is_ok());
        assert!(check_invariant(&dp, &other).is_ok());
    }

    #[test]
    fn part_stabilisers_and_subparts() {
        let g = wreath_imprimitive(&s3(), &PermGroup::cyclic(2));
        let p = blocks(6, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let st = part_stabiliser(&g, &p, 0).unwrap();
        assert_eq!(st.order(), 36);
        let (on_points, labels) = induced_on_subparts(&st, &Partition::discrete(6), &p, 0).unwrap();
        assert_eq!(labels, vec![0, 1, 2]);
        assert_eq!(on_points.order(), 6);
    }
}
