//! Controllability analysis for consensus dynamics on matrix-weighted networks.
//!
//! A matrix-weighted network couples `n` agents with `d`-dimensional states
//! through symmetric positive (semi-)definite `d×d` edge weights. Under the
//! leader-follower protocol `ẋ = −Lx + Bu` the questions of interest are the
//! dimension of the controllable subspace `⟨L|B⟩` and graph-theoretic
//! certificates bounding it.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | graph construction, block Laplacian, hop distances, PD paths |
//! | [`linalg`] | definiteness, numerical rank, subspaces, Krylov and eigenspace forms of the controllable subspace |
//! | [`partition`] | characteristic matrices, distance partitions, AEPs, quotients |
//! | [`controllability`] | input matrices, controllable subspace, PBH witnesses |
//! | [`bounds`] | lower/upper bound certificates, uncontrollable input construction |
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `mwcontrol` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod bounds;
pub mod controllability;
mod error;
pub mod graph;
pub mod linalg;
pub mod partition;
mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

pub use nalgebra::{DMatrix, DVector};
