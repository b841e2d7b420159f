//! Exact classification of quasitriangular structures on the Hopf algebras
//! `k^G #_{σ,τ} kZ₂`: abelian group data with an order-two action and a
//! pair of compatible cocycles.

#![allow(clippy::needless_range_loop)]

pub mod group;
pub mod scalar;
pub mod cocycle;
pub mod hopf;
pub mod rmatrix;
pub mod solver;
pub mod families;
pub mod io;
pub mod cli;
