//! Succinct edit-sensitive-parsing index with approximate pattern search.
//!
//! The pipeline: [`esp`] parses a text into a balanced straight-line program
//! by deterministic edit sensitive parsing, [`index`] renames the grammar into
//! a sorted id space and encodes it with succinct bit structures from
//! [`succinct`], and [`search`] answers threshold queries by decomposing
//! candidate windows into maximal subtrees and comparing characteristic
//! vectors in L1 distance. [`oracle`] holds slow reference implementations
//! used to cross-check the fast paths.

pub mod error;
pub mod esp;
pub mod index;
pub mod oracle;
pub mod search;
pub mod succinct;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
