//! The guide chapters from `book/`, mounted as modules so that every code
//! block in the book compiles and runs under `cargo test --doc`. mdbook
//! cannot test snippets that depend on this crate, so the book is kept
//! honest from this side instead.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/simplicial-sets.md")]
pub mod simplicial_sets {}

#[doc = include_str!("../../../book/src/segal-conditions.md")]
pub mod segal_conditions {}

#[doc = include_str!("../../../book/src/graphs-and-trees.md")]
pub mod graphs_and_trees {}

#[doc = include_str!("../../../book/src/hall-algebras.md")]
pub mod hall_algebras {}

#[doc = include_str!("../../../book/src/double-categories.md")]
pub mod double_categories {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
