//! Overlapping Schwarz alternating method for a 2D elliptic model problem with
//! guaranteed, fully computable error majorants adapted to the decomposition.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure numerics:
//! structured triangulations and their decompositions ([`mesh`]), P1 assembly and
//! exact-error evaluation ([`problem`]), the multiplicative and additive Schwarz
//! iterations ([`schwarz`]), broken flux reconstruction with lowest-order
//! Raviart–Thomas correctors ([`flux`]), and the majorant itself ([`majorant`]).
//! File formats and the command line live in the `ddmcert` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod flux;
pub mod geometry;
pub mod linalg;
pub mod majorant;
pub mod mesh;
pub mod pipeline;
pub mod problem;
pub mod quadrature;
pub mod schwarz;

pub use error::{Error, Result};
pub use geometry::{Mat2, Point, Vec2};
