//! Computations in rational de Branges–Rovnyak spaces `H(b)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`], [`rational`], [`roots`]: complex polynomial and rational
//!   arithmetic with clustered root finding.
//! * [`spectral`]: the Pythagorean mate `a` of `b`, inner/outer splitting.
//! * [`space`]: kernels, the plus-function realization of the `H(b)` norm,
//!   Gram matrices.
//! * [`isometry`]: weak-form defect identities of the shift `M_z`.
//! * [`model`]: the rank-one extension process producing rational `b` whose
//!   shift is a strict `2n`-isometry.
//! * [`lattice`]: invariant subspaces and cyclic vectors.
//! * [`report`]: JSON reports, the acceptance suite and the `hb` front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod isometry;
pub mod lattice;
pub mod model;
pub mod poly;
pub mod rational;
pub mod report;
pub mod roots;
pub mod space;
pub mod spectral;

pub use config::{RunConfig, Settings, Tolerances, Truncation};
pub use error::{HbError, Result};
pub use poly::{Poly, C64};
pub use rational::RationalFn;
pub use space::{HbSpace, HbVector};
pub use spectral::{BoundaryZero, MateResult};
