//! Boundary-value and Steklov eigenproblems on polygonal domains with
//! prefractal (Minkowski) boundaries.
//!
//! The crate builds prefractal boundary curves and the constant-area domains
//! they bound, triangulates them exactly on the dyadic boundary grid,
//! assembles P1 finite-element operators together with boundary measures
//! (arclength or self-similar d-measures), and exposes the discrete
//! Poincaré–Steklov (Dirichlet-to-Neumann) operator as a boundary Schur
//! complement. On top of that sit spectral solvers (shift-invert Lanczos,
//! dense symmetric QL) and the cross-generation stability analysis:
//! eigenfunction localization, modal assurance matching and spectral
//! Hausdorff distances.
//!
//! The crate is `no_std` (alloc only); all IO, file formats and the CLI live
//! in the companion `steklov-lab` crate. Every computation is sequential and
//! deterministic: identical inputs and seeds give bitwise-identical results.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dense;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod measure;
pub mod mesh;
pub mod rng;
pub mod sparse;
pub mod spectral;

mod fx;

pub use error::{Error, Result};
