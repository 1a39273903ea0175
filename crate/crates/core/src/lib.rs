//! Non-backtracking random walks on marked finite groups, and the machinery
//! for estimating how often a few-relator random presentation surjects onto
//! an extension of a finite group by a finite-field module.
//!
//! The crate is organised bottom-up:
//!
//! - [`words`]: reduced words in a free group and uniform sampling of them.
//! - [`groups`]: finite groups with a marked generator map, word evaluation,
//!   subgroup closure.
//! - [`walk`]: the non-backtracking walk chain on `G × {±1..±n}`, its
//!   irreducibility and period, exact distribution evolution and mixing.
//! - [`fqlin`]: dense linear algebra over a prime field and generating-tuple
//!   counts.
//! - [`schreier`]: Schreier rewriting into the mod-q homology of a kernel,
//!   the conjugation action on it and module-generation tests.
//! - [`experiments`]: Monte Carlo and exact surjection probabilities, the
//!   probability bound, and l-sweeps.
//! - [`config`]: the flat key-value experiment config format.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fqlin;
pub mod groups;
pub mod schreier;
pub mod walk;
pub mod words;

pub use error::{Error, Result};
pub use fqlin::{FqMatrix, FqVector, Modulus};
pub use groups::{Elem, FiniteGroup, GroupSpec, MarkedFiniteGroup, Subgroup};
pub use schreier::{CrossedImage, SchreierSystem};
pub use walk::{WalkChain, WalkWeights};
pub use words::{Letter, ReducedWord};

/// Default cap on the number of elements of any materialized group.
pub const DEFAULT_GROUP_CAP: usize = 100_000;
