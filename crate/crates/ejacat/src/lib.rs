//! Euclidean Jordan algebras realized as embedded JC-algebras inside
//! finite-dimensional complex *-algebras, with canonical composites,
//! JNW classification, and the categorical structure around them.
//!
//! The crate is organized bottom-up:
//! * [`linalg`]: dense complex matrices, spectral calculus, real subspaces;
//! * [`star_algebra`]: multi-block *-algebras, involutions, linear maps;
//! * [`jordan_core`]: embedded Jordan algebras, frames, states, order maps;
//! * [`constructors`]: the simple families `R_n`, `C_n`, `Q_n`, `V_n`;
//! * [`composites`]: Jordan closure and fixed-point composites;
//! * [`classify`]: JNW fingerprinting and composition-table verification;
//! * [`category`]: compact structure, daggers, and morphism classes;
//! * [`suites`]: named check suites shared by the CLI and the tests.

#![forbid(unsafe_code)]

pub mod api;
pub mod category;
pub mod classify;
pub mod composites;
pub mod config;
pub mod constructors;
pub mod error;
pub mod jordan_core;
pub mod linalg;
pub mod star_algebra;
pub mod suites;

pub use config::Config;
pub use error::{Error, Result};
