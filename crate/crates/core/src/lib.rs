//! Norms, operator norms, and boundedness/compactness/isometry diagnostics
//! for multiplication, composition, and weighted composition operators
//! between discrete weighted Hardy spaces on finite-depth truncations of
//! rooted trees.
//!
//! The crate is organized around closed-form results evaluated on a
//! truncation ([`criteria`]) and an independent brute-force maximizer over
//! the truncation's unit ball ([`oracle`]) that cross-validates every one of
//! them. [`tree`], [`spaces`], and [`operators`] supply the underlying
//! objects; [`examples`] packages six contrasting operator configurations;
//! [`json`] defines the file formats the command-line front end consumes.
//!
//! Every supremum is taken over the truncation, so each reported value is a
//! depth-D lower approximation of its infinite-tree counterpart. Tail
//! diagnostics report evidence about limit behaviour, never a verdict on
//! compactness itself.

pub mod criteria;
pub mod error;
pub mod examples;
pub mod json;
mod numeric;
pub mod operators;
pub mod oracle;
pub mod spaces;
pub mod tree;

pub use error::{Error, Result};
pub use numeric::rel_close;
