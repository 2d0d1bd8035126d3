//! Entanglement detection from immanant inequalities.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] and [`random`]: dense complex operators on tensor-product
//!   spaces, partial traces/transposes, Hermitian spectral routines and
//!   seeded Ginibre/Haar sampling.
//! * [`symgroup`]: partitions, characters of `S_k`, permutation operators,
//!   Young projectors and immanants.
//! * [`maps`] and [`witness`]: filtered multilinear positive maps, witness
//!   operators built from immanant inequalities and state-witness contraction.
//! * [`optimizer`]: minimisation of `tr(XW)` over states with positive
//!   partial transposes.
//! * [`experiments`]: seeded, parallel Monte Carlo and table reproductions
//!   backing the `immwit` command-line tool.

pub mod catalog;
pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod linalg;
pub mod maps;
pub mod optimizer;
pub mod random;
pub mod symgroup;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{MultiOperator, C64};
pub use random::RandomSource;
