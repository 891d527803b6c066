//! Discrete Dirichlet-type Stokes operators on rough planar domains.
//!
//! Everything lives on a uniform Cartesian grid with a marker-and-cell (MAC)
//! layout: pressures at cell centres, the two velocity components on the
//! vertical and horizontal faces, stream functions and scalar Laplace
//! unknowns on vertices. Domains are pixel unions that may carry *slits*,
//! internal walls made of whole grid faces.
//!
//! Two boundary treatments are available through [`BcMode`]:
//!
//! * [`BcMode::Weak`] sees slits as walls (closure of compactly supported
//!   test fields),
//! * [`BcMode::Pseudo`] ignores slits (restrictions of globally defined
//!   fields vanishing outside the closure of the domain).
//!
//! On top of that the crate provides the two orthogonal decompositions of
//! discrete `L²` ([`leray`]), the Laplace and Stokes resolvents with an
//! independent stream-function cross-check ([`resolvents`]), and monotone
//! domain-sequence experiments ([`harness`]).
//!
//! The crate is `no_std` and only needs `alloc`. Enabling the `std` feature
//! adds wall-clock timing to solver statistics.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod leray;
pub mod resolvents;
pub mod solver;

mod float;
mod timer;

pub use error::{Error, Result};
pub use fields::{CellField, MacField, VertexField};
pub use geometry::{DomainMask, Face, FaceAxis, Grid};
pub use leray::BcMode;
