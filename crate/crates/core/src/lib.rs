// SPDX-License-Identifier: Apache-2.0

//! Pauli-blocked secular Redfield dynamics for the one-electron density
//! matrix of tight-binding chains coupled to bosonic baths.
//!
//! The pipeline is: [`model`] builds and diagonalizes a chain, [`bath`]
//! tabulates transition rates, [`generator`] evaluates dγ/dt,
//! [`integrator`] propagates it, [`observables`] reduces trajectories, and
//! [`scenarios`] ties everything to configuration files and output bundles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod density;
pub mod error;
pub mod generator;
pub mod integrator;
pub mod model;
pub mod observables;
pub mod oracles;
pub mod scenarios;

pub use density::{CMatrix, DensityMatrix, C64};
pub use error::{Error, Result};
