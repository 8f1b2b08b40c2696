//! Workbench for pretransitive polymodal logics of finite height.
//!
//! The crate builds finite Kripke frames and models, analyses their
//! order-theoretic structure (clusters, skeleton, height, depth), constructs
//! the finite k-generated free algebra of a frame-class logic together with
//! its dual canonical model, and from those derives the classical formula
//! schemes of the area: the finite-height axioms `B_h`, Jankov-Fine formulas
//! `beta(a)`, depth formulas `B_{i,k}`, and the Glivenko-style translations
//! from a height-bounded extension `L[h+1]` down to the base logic `L`.
//!
//! Decision procedures come in two independent flavours: signed tableaux for
//! the named logics K, T, K4, S4, S5, and exact canonical-model checks for
//! frame-class logics and their height-bounded extensions. The `verify`
//! module cross-checks the two against each other and against brute-force
//! oracles.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the thin
//! `glivenko` CLI; the library surface is re-exported from the crate root.

pub mod algebra;
pub mod analysis;
pub mod bits;
pub mod decide;
pub mod formula;
pub mod genrand;
pub mod kripke;
pub mod parse;
pub mod schemes;
pub mod tableau;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
