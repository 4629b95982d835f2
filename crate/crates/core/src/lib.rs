//! Block structures of permutation groups and the lattices of partitions they preserve.

pub mod blockstruct;
pub mod error;
pub mod fixtures;
pub mod groupprops;
pub mod gwp;
pub mod lattice;
pub mod partition;
pub mod perm;
pub mod poset;
pub mod survey;

pub use error::{Error, Result};
pub use partition::{BinaryRelation, Partition, PartitionLiteral};
pub use perm::{PermGroup, Permutation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/permutations.md")]
    mod permutations {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/block-structures.md")]
    mod block_structures {}
    #[doc = include_str!("../../../book/src/group-properties.md")]
    mod group_properties {}
    #[doc = include_str!("../../../book/src/wreath-products.md")]
    mod wreath_products {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
