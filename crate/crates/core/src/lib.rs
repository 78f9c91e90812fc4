//! Lyapunov certificates for dynamical systems whose trajectories are kept
//! inside a closed convex set by a normal-cone inclusion
//! `ẋ ∈ f(x) − N_S(x)`.
//!
//! Two search procedures are provided:
//!
//! * [`conic`]: for homogeneous vector fields on a polyhedral cone
//!   `K = {x : Cx ≥ 0}`, a hierarchy of linear programs over simplicial
//!   partitions of the ℓ1 sections of `K` searches for a rational function
//!   `V = h / ‖x‖^{2r}`.
//! * [`sos`]: for compact semialgebraic sets `S = {x : g_i(x) ≥ 0}`, a
//!   hierarchy of sum-of-squares programs with Putinar multipliers searches
//!   for a polynomial `V`.
//!
//! Every certificate can be re-checked by brute-force sampling in [`oracle`],
//! and trajectories of the constrained dynamics can be generated with the
//! projected Euler scheme in [`flow`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;


pub mod cones;
pub mod conic;
mod error;
pub mod flow;
mod linalg;
pub mod linprog;
pub mod nnls;
pub mod oracle;
pub mod poly;
pub mod sdp;
pub mod sos;
pub mod tangency;

pub use error::{Error, Result};
