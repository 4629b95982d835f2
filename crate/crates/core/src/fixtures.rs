//! Named example groups, block structures and product specs.
//!
//! Each constructor is deterministic; `examples/export_fixtures.rs` writes
//! them to `fixtures/` as JSON.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::blockstruct::{latin_square_partitions, ObsFile};
use crate::error::{Error, Result};
use crate::gwp::GwpSpec;
use crate::partition::Partition;
use crate::perm::{coset_action, direct_product_product_action, wreath_imprimitive, GroupFile, PermGroup, Permutation};
use crate::poset::Poset;
use crate::survey::{CatalogManifest, ManifestEntry};

fn cycles(n: usize, gens: &[&[&[usize]]]) -> PermGroup {
    PermGroup::from_cycles(n, gens).expect("fixture generators are valid")
}

/// Right-regular action of a group on its own elements, listed in sorted order.
pub fn regular_action(group: &PermGroup) -> Result<PermGroup> {
    let els = group.sorted_elements()?;
    let index: HashMap<&Permutation, usize> = els.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let gens = group
        .generators()
        .iter()
        .map(|s| Permutation::from_images_unchecked(els.iter().map(|x| index[&x.then(s)]).collect()))
        .collect();
    Ok(PermGroup::new(els.len(), gens)?.named(format!("{} regular", group.name())))
}

pub fn s3_natural() -> PermGroup {
    cycles(3, &[&[&[0, 1]], &[&[0, 1, 2]]]).named("S3")
}

pub fn c4_regular() -> PermGroup {
    PermGroup::cyclic(4).named("C4")
}

/// The symmetries of a square on its corners; blocks are the diagonals.
pub fn d4_blocks4() -> PermGroup {
    cycles(4, &[&[&[0, 1, 2, 3]], &[&[0, 2]]]).named("D4 on 4")
}

pub fn c2c2_regular() -> PermGroup {
    cycles(4, &[&[&[0, 1], &[2, 3]], &[&[0, 2], &[1, 3]]]).named("C2 x C2")
}

pub fn c5() -> PermGroup {
    PermGroup::cyclic(5).named("C5")
}

pub fn agl15() -> PermGroup {
    cycles(5, &[&[&[0, 1, 2, 3, 4]], &[&[1, 2, 4, 3]]]).named("AGL(1,5)")
}

pub fn c6_regular() -> PermGroup {
    PermGroup::cyclic(6).named("C6")
}

pub fn s3_wr_c2() -> PermGroup {
    wreath_imprimitive(&s3_natural(), &PermGroup::cyclic(2)).named("S3 wr C2")
}

pub fn c8_regular() -> PermGroup {
    PermGroup::cyclic(8).named("C8")
}

pub fn c4c2_regular() -> PermGroup {
    direct_product_product_action(&PermGroup::cyclic(4), &PermGroup::cyclic(2)).named("C4 x C2")
}

pub fn c2c2c2_regular() -> PermGroup {
    direct_product_product_action(&c2c2_regular(), &PermGroup::cyclic(2)).named("C2^3")
}

/// `i` and `j` acting on the right of `{±1, ±i, ±j, ±k}`.
pub fn q8_regular() -> PermGroup {
    cycles(8, &[&[&[0, 2, 1, 3], &[4, 7, 5, 6]], &[&[0, 4, 1, 5], &[2, 6, 3, 7]]]).named("Q8")
}

pub fn d4_regular8() -> PermGroup {
    regular_action(&d4_blocks4()).expect("order 8").named("D4 regular")
}

pub fn c3c3_regular() -> PermGroup {
    direct_product_product_action(&PermGroup::cyclic(3), &PermGroup::cyclic(3)).named("C3 x C3")
}

pub fn s3_wr_s3() -> PermGroup {
    wreath_imprimitive(&s3_natural(), &s3_natural()).named("S3 wr S3")
}

/// `S3 × S3` on the cells of a 3×3 grid.
pub fn s3s3_grid() -> PermGroup {
    direct_product_product_action(&s3_natural(), &s3_natural()).named("S3 x S3 grid")
}

fn ordered_pairs() -> Vec<(usize, usize)> {
    (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b))).collect()
}

/// `S4` on the 12 flags of the affine plane of order 2: the flag on point
/// `a` and line `{a, b}` is the ordered pair `(a, b)`.
pub fn flags12() -> PermGroup {
    let pairs = ordered_pairs();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let on_pairs = |g: &Permutation| {
        Permutation::from_images_unchecked(pairs.iter().map(|&(a, b)| index[&(g.apply(a), g.apply(b))]).collect())
    };
    let s4 = cycles(4, &[&[&[0, 1, 2, 3]], &[&[0, 1]]]);
    PermGroup::new(12, s4.generators().iter().map(on_pairs).collect()).unwrap().named("S4 on 12 flags")
}

/// Point, line and parallel-class partitions of the 12 flags.
pub fn flags12_partitions() -> [Partition; 3] {
    let pairs = ordered_pairs();
    let point = Partition::from_labels(&pairs.iter().map(|&(a, _)| a).collect::<Vec<_>>());
    let line = Partition::from_labels(&pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect::<Vec<_>>());
    let parallel = Partition::from_labels(
        &pairs.iter().map(|&(a, b)| if a.min(b) == 0 { a.max(b) } else { 6 - a.max(b) - a.min(b) }).collect::<Vec<_>>(),
    );
    [point, line, parallel]
}

/// `AGL(2,3)` on the 36 flags of the affine plane of order 3. The flag on
/// point `x + 3y` and the line through it with direction `d` is point
/// `x + 3y + 9d`, directions being `(1,0), (0,1), (1,1), (1,2)`.
pub fn agl23_flags36() -> PermGroup {
    let dirs = [(1usize, 0usize), (0, 1), (1, 1), (1, 2)];
    let normalise = |(a, b): (usize, usize)| {
        let inv = if a % 3 != 0 {
            if a % 3 == 1 {
                1
            } else {
                2
            }
        } else if b % 3 == 1 {
            1
        } else {
            2
        };
        let v = ((a * inv) % 3, (b * inv) % 3);
        dirs.iter().position(|&d| d == v).expect("non-zero direction")
    };
    let affine = |m: [[usize; 2]; 2], t: (usize, usize)| {
        let images = (0..36)
            .map(|f| {
                let (x, y, d) = (f % 3, f / 3 % 3, f / 9);
                let px = (m[0][0] * x + m[0][1] * y + t.0) % 3;
                let py = (m[1][0] * x + m[1][1] * y + t.1) % 3;
                let (a, b) = dirs[d];
                let nd = normalise(((m[0][0] * a + m[0][1] * b) % 3, (m[1][0] * a + m[1][1] * b) % 3));
                px + 3 * py + 9 * nd
            })
            .collect();
        Permutation::from_images(images).expect("affine maps permute flags")
    };
    let id = [[1, 0], [0, 1]];
    let gens = vec![
        affine(id, (1, 0)),
        affine(id, (0, 1)),
        affine([[1, 1], [0, 1]], (0, 0)),
        affine([[1, 0], [1, 1]], (0, 0)),
        affine([[2, 0], [0, 1]], (0, 0)),
    ];
    PermGroup::new(36, gens).unwrap().named("AGL(2,3) on 36 flags")
}

pub fn a5_natural() -> PermGroup {
    cycles(5, &[&[&[0, 1, 2, 3, 4]], &[&[0, 1, 2]]]).named("A5")
}

/// `A5` on the cosets of a Klein four-group.
pub fn a5_on15() -> PermGroup {
    let a5 = a5_natural();
    let v4 = [
        Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap(),
        Permutation::from_cycles(5, &[&[0, 2], &[1, 3]]).unwrap(),
    ];
    coset_action(&a5, &v4).expect("V4 lies in A5").0.named("A5 on 15")
}

/// `a` of order 8 and `b` of order 2 with `b⁻¹ab = a⁵`, acting on the right
/// of the elements `a^i b^j`, numbered `i + 8j`.
pub fn m16_regular() -> PermGroup {
    let a: Vec<usize> = (0..16).map(|x| if x < 8 { (x + 1) % 8 } else { 8 + (x - 8 + 5) % 8 }).collect();
    let b: Vec<usize> = (0..16).map(|x| (x + 8) % 16).collect();
    let gens = vec![Permutation::from_images(a).unwrap(), Permutation::from_images(b).unwrap()];
    PermGroup::new(16, gens).unwrap().named("M16")
}

/// The collineation group of the Fano plane, lines `{i, i+1, i+3} mod 7`.
pub fn gl32_natural() -> PermGroup {
    cycles(7, &[&[&[0, 1, 2, 3, 4, 5, 6]], &[&[1, 2, 4], &[3, 6, 5]], &[&[2, 4], &[5, 6]]]).named("GL(3,2)")
}

/// Stabiliser of the flag (point 0, line `{0, 1, 3}`), a Sylow 2-subgroup.
pub fn gl32_flag_stabiliser() -> Vec<Permutation> {
    let mut stab: Vec<Permutation> = gl32_natural()
        .sorted_elements()
        .expect("order 168")
        .into_iter()
        .filter(|g| g.apply(0) == 0 && [1, 3].contains(&g.apply(1)) && [1, 3].contains(&g.apply(3)))
        .collect();
    stab.retain(|g| !g.is_identity());
    stab
}

/// `GL(3,2)` on the 21 flags of the Fano plane.
pub fn gl32_flags21() -> PermGroup {
    coset_action(&gl32_natural(), &gl32_flag_stabiliser()).expect("subgroup").0.named("GL(3,2) on 21 flags")
}

/// `C7 ⋊ C3` acting regularly.
pub fn c7c3_regular() -> PermGroup {
    let g = cycles(7, &[&[&[0, 1, 2, 3, 4, 5, 6]], &[&[1, 2, 4], &[3, 6, 5]]]).named("C7:C3");
    regular_action(&g).expect("order 21")
}

pub fn c5c5_regular() -> PermGroup {
    direct_product_product_action(&PermGroup::cyclic(5), &PermGroup::cyclic(5)).named("C5 x C5")
}

pub fn s6_natural() -> PermGroup {
    cycles(6, &[&[&[0, 1, 2, 3, 4, 5]], &[&[0, 1]]]).named("S6")
}

/// A transitive subgroup of `S6` of order 120 (a copy of `PGL(2,5)`).
pub fn s6_exotic_subgroup() -> Vec<Permutation> {
    vec![
        Permutation::from_cycles(6, &[&[0, 1, 2, 3, 4]]).unwrap(),
        Permutation::from_cycles(6, &[&[1, 2, 4, 3]]).unwrap(),
        Permutation::from_cycles(6, &[&[0, 5], &[1, 4]]).unwrap(),
    ]
}

/// `S6` on `6 × 6` points, naturally on the first coordinate and on the
/// cosets of [`s6_exotic_subgroup`] on the second; `(a, b)` is `a + 6b`.
pub fn s6_square36() -> PermGroup {
    let s6 = s6_natural();
    let (other, _) = coset_action(&s6, &s6_exotic_subgroup()).expect("subgroup of S6");
    let gens = s6
        .generators()
        .iter()
        .zip(other.generators())
        .map(|(g, h)| {
            Permutation::from_images_unchecked((0..36).map(|x| g.apply(x % 6) + 6 * h.apply(x / 6)).collect())
        })
        .collect();
    PermGroup::new(36, gens).unwrap().named("S6 on 36")
}

pub fn q8q8_regular() -> PermGroup {
    direct_product_product_action(&q8_regular(), &q8_regular()).named("Q8 x Q8")
}

/// Every fixture group with its file stem.
pub fn all_groups() -> Vec<(&'static str, PermGroup)> {
    vec![
        ("s3_natural", s3_natural()),
        ("c4_regular", c4_regular()),
        ("d4_blocks4", d4_blocks4()),
        ("c2c2_regular", c2c2_regular()),
        ("c5", c5()),
        ("agl15", agl15()),
        ("c6_regular", c6_regular()),
        ("s3_wr_c2", s3_wr_c2()),
        ("c8_regular", c8_regular()),
        ("c4c2_regular", c4c2_regular()),
        ("c2c2c2_regular", c2c2c2_regular()),
        ("q8_regular", q8_regular()),
        ("d4_regular8", d4_regular8()),
        ("c3c3_regular", c3c3_regular()),
        ("s3_wr_s3", s3_wr_s3()),
        ("s3s3_grid", s3s3_grid()),
        ("flags12", flags12()),
        ("a5_on15", a5_on15()),
        ("m16_regular", m16_regular()),
        ("gl32_flags21", gl32_flags21()),
        ("c7c3_regular", c7c3_regular()),
        ("c5c5_regular", c5c5_regular()),
        ("s6_square36", s6_square36()),
        ("agl23_flags36", agl23_flags36()),
        ("q8q8_regular", q8q8_regular()),
    ]
}

/// The five groups of order 8 in their regular actions.
pub fn regular_order8() -> Vec<(&'static str, PermGroup)> {
    vec![
        ("c8_regular", c8_regular()),
        ("c4c2_regular", c4c2_regular()),
        ("c2c2c2_regular", c2c2c2_regular()),
        ("q8_regular", q8_regular()),
        ("d4_regular8", d4_regular8()),
    ]
}

/// Rows and columns of a 3×3 grid, cell `(r, c)` being `r + 3c`.
pub fn grid_partitions() -> Vec<Partition> {
    latin_square_partitions(3)[..2].to_vec()
}

/// Block structures with their file stems.
pub fn all_obs() -> Vec<(&'static str, Vec<Partition>)> {
    vec![
        ("grid9", grid_partitions()),
        ("latin2", latin_square_partitions(2)),
        ("latin2_rows_columns", latin_square_partitions(2)[..2].to_vec()),
        ("latin3", latin_square_partitions(3)),
    ]
}

fn vee() -> Poset {
    Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap()
}

fn c(n: usize) -> PermGroup {
    PermGroup::cyclic(n).named(format!("C{n}"))
}

pub fn antichain_c2c2() -> GwpSpec {
    GwpSpec::new(Poset::antichain(2), vec![c(2), c(2)]).unwrap()
}

pub fn antichain_c2c3() -> GwpSpec {
    GwpSpec::new(Poset::antichain(2), vec![c(2), c(3)]).unwrap()
}

pub fn chain_c2c2() -> GwpSpec {
    GwpSpec::new(Poset::chain(2), vec![c(2), c(2)]).unwrap()
}

/// `m1 ⊏ m3`, `m2 ⊏ m3`, all `C2`.
pub fn v_poset_c2() -> GwpSpec {
    GwpSpec::new(vee(), vec![c(2), c(2), c(2)]).unwrap()
}

/// The V-poset with components `C2`, `C3`, `C2`.
pub fn v_poset_c2c3c2() -> GwpSpec {
    GwpSpec::new(vee(), vec![c(2), c(3), c(2)]).unwrap()
}

/// Two copies of `S6` on 6 points over a 2-antichain.
pub fn antichain_s6s6() -> GwpSpec {
    GwpSpec::new(Poset::antichain(2), vec![s6_natural(), s6_natural()]).unwrap()
}

pub fn all_specs() -> Vec<(&'static str, GwpSpec)> {
    vec![
        ("antichain_c2c2", antichain_c2c2()),
        ("antichain_c2c3", antichain_c2c3()),
        ("chain_c2c2", chain_c2c2()),
        ("v_poset_c2", v_poset_c2()),
        ("v_poset_c2c3c2", v_poset_c2c3c2()),
        ("antichain_s6s6", antichain_s6s6()),
    ]
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("fixture serialises") + "\n"
}

/// Every fixture file as `(path relative to the fixture root, contents)`.
pub fn render() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (stem, g) in all_groups() {
        out.push((format!("groups/{stem}.json"), pretty(&g.to_file())));
    }
    let coset = |name: &str, g: PermGroup, sub: Vec<Permutation>| GroupFile {
        name: name.to_string(),
        subgroup_generators: Some(sub.iter().map(|p| p.images()).collect()),
        ..g.to_file()
    };
    let v4 = vec![
        Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap(),
        Permutation::from_cycles(5, &[&[0, 2], &[1, 3]]).unwrap(),
    ];
    out.push(("groups/a5_on15_coset.json".into(), pretty(&coset("A5 on 15", a5_natural(), v4))));
    out.push((
        "groups/gl32_flags21_coset.json".into(),
        pretty(&coset("GL(3,2) on 21 flags", gl32_natural(), gl32_flag_stabiliser())),
    ));
    for (stem, parts) in all_obs() {
        let file =
            ObsFile { degree: parts[0].degree(), partitions: parts.iter().map(|p| p.blocks().to_vec()).collect() };
        out.push((format!("obs/{stem}.json"), pretty(&file)));
    }
    for (stem, spec) in all_specs() {
        out.push((format!("gwp/{stem}.json"), pretty(&spec.to_file())));
    }
    let expect_ob = [true, true, true, true, false];
    let entries = regular_order8()
        .into_iter()
        .zip(expect_ob)
        .map(|((stem, g), ob)| ManifestEntry {
            path: format!("../groups/{stem}.json"),
            degree: g.degree(),
            expect: BTreeMap::from([("ob".to_string(), ob)]),
        })
        .collect();
    out.push(("manifests/regular8.json".into(), pretty(&CatalogManifest { entries })));
    out
}

/// Writes [`render`] under `root`.
pub fn export(root: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (rel, text) in render() {
        let path = root.join(rel);
        let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", path.display()));
        std::fs::create_dir_all(path.parent().expect("nested path")).map_err(io)?;
        std::fs::write(&path, text).map_err(io)?;
        written.push(path);
    }
    Ok(written)
}
