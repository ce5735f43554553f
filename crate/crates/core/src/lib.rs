//! Linear 2x2 hyperbolic systems on metric graphs.
//!
//! The crate builds edge systems, generalized Kirchhoff vertex conditions and
//! the global flow matrix `B`, then evolves the diagonalized network with the
//! explicit characteristic propagator or evaluates its resolvent.
//!
//! `no_std` with `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod edge;
pub mod error;
pub mod flow;
pub mod graph;
pub mod kirchhoff;
pub mod linalg;
pub mod network;
pub mod quad;
pub mod resolvent;
pub mod scenarios;
