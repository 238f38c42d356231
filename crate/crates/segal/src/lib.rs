//! Finite truncated simplicial sets from combinatorial data, with exhaustive
//! 1-Segal and 2-Segal verification, Hall algebras, and the discrete
//! S-construction on pointed stable double categories together with its
//! inverse.
//!
//! The crate is organized around [`simplicial::TruncatedSimplicialSet`]:
//! builders ([`graph`], [`tree`], [`nerve`], [`double_category`]) produce
//! them from graphs, rooted trees, (partial) monoids, categories, and double
//! categories; [`checks`] decides Segal conditions by brute-force fiber
//! products; [`hall`] computes Hall algebras of reduced 2-Segal sets.

mod error;

pub mod checks;
pub mod double_category;
pub mod graph;
pub mod hall;
pub mod nerve;
pub mod simplicial;
pub mod tree;
pub mod triangulation;

pub use error::{Result, SegalError};
pub use simplicial::{
    Descriptor, LevelwiseMap, MonotoneMap, SimplexId, TruncatedSimplicialSet,
};

pub mod book;
