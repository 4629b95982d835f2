//! Permutations and permutation groups.
//!
//! Points are `0..n`. All actions are right actions: `p.then(&q)` applies
//! `p` first. Generated groups materialise their elements lazily and only
//! up to an element cap; orders and membership go through a stabiliser chain.

mod action;
mod group;
mod permutation;
pub mod stabchain;

pub use action::{
    check_invariant, coset_action, direct_product_product_action, induced_action, induced_on_subparts, kernel_on_parts,
    part_stabiliser, wreath_imprimitive, ActionRecord,
};
pub use group::{GroupFile, Orbit, PermGroup, DEFAULT_ELEMENT_CAP};
pub use permutation::Permutation;
