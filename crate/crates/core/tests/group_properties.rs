use proptest::prelude::*;

use blocklat::fixtures;
use blocklat::groupprops::{analyze, is_ob, two_closure};
use blocklat::perm::{direct_product_product_action, wreath_imprimitive};
use blocklat::{PermGroup, Permutation};

fn ob(g: &PermGroup) -> bool {
    is_ob(g).unwrap().holds
}

#[test]
fn implications_hold_on_every_fixture() {
    for (name, g) in fixtures::all_groups() {
        let r = analyze(&g).unwrap();
        if !r.transitive {
            continue;
        }
        let ob = r.ob.unwrap();
        if r.primitive.unwrap() {
            assert!(r.quasiprimitive.unwrap() && r.preprimitive.unwrap(), "{name}");
        }
        if r.preprimitive.unwrap() || r.pb.unwrap() || r.stratifiable.unwrap() {
            assert!(ob, "{name}");
        }
        if r.distributive.unwrap() {
            assert!(r.modular.unwrap(), "{name}");
        }
    }
}

#[test]
fn chain_lattices_are_ob() {
    for (name, g) in fixtures::all_groups() {
        let inv = blocklat::groupprops::invariant_partitions(&g).unwrap();
        if inv.is_chain() {
            assert!(inv.is_ob().holds, "{name}");
        }
    }
}

#[test]
fn ob_is_upward_closed_on_nested_fixtures() {
    let groups = fixtures::all_groups();
    let mut pairs = 0;
    for (small_name, small) in &groups {
        for (big_name, big) in &groups {
            if small_name == big_name || small.degree() != big.degree() || !big.contains_group(small) {
                continue;
            }
            pairs += 1;
            if ob(small) {
                assert!(ob(big), "{small_name} <= {big_name}");
            }
        }
    }
    assert!(pairs >= 1);
}

#[test]
fn wreath_products_are_ob_exactly_when_both_factors_are() {
    let factors = [
        ("C2", PermGroup::cyclic(2)),
        ("C3", PermGroup::cyclic(3)),
        ("S3", PermGroup::symmetric(3)),
        ("D4", fixtures::d4_regular8()),
    ];
    for (gn, g) in &factors {
        for (hn, h) in &factors {
            let w = wreath_imprimitive(g, h);
            assert_eq!(ob(&w), ob(g) && ob(h), "{gn} wr {hn}");
        }
    }
}

#[test]
fn direct_factors_of_ob_products_are_ob() {
    let factors = [PermGroup::cyclic(2), PermGroup::cyclic(3), PermGroup::symmetric(3), fixtures::q8_regular()];
    for g in &factors {
        for h in &factors {
            let p = direct_product_product_action(g, h);
            if ob(&p) {
                assert!(ob(g) && ob(h));
            }
        }
    }
    let q8 = fixtures::q8_regular();
    assert!(ob(&q8));
    assert!(!ob(&fixtures::q8q8_regular()));
}

#[test]
fn ob_agrees_with_two_closure() {
    for (name, g) in fixtures::all_groups() {
        if g.degree() <= 12 && g.is_transitive() {
            assert_eq!(ob(&g), ob(&two_closure(&g).unwrap()), "{name}");
        }
    }
}

fn small_transitive() -> Vec<PermGroup> {
    fixtures::all_groups().into_iter().map(|(_, g)| g).filter(|g| g.degree() <= 9 && g.is_transitive()).collect()
}

fn group_and_permutation() -> impl Strategy<Value = (usize, Vec<usize>)> {
    let degrees: Vec<usize> = small_transitive().iter().map(PermGroup::degree).collect();
    (0..degrees.len()).prop_flat_map(move |i| (Just(i), Just((0..degrees[i]).collect::<Vec<_>>()).prop_shuffle()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_a_generator_keeps_ob((i, images) in group_and_permutation()) {
        let g = &small_transitive()[i];
        let mut gens = g.generators().to_vec();
        gens.push(Permutation::from_images(images).unwrap());
        let h = PermGroup::new(g.degree(), gens).unwrap();
        if ob(g) {
            prop_assert!(ob(&h));
        }
    }
}
