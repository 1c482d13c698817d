//! Pseudospectral variational solver for a coupled system driven by the
//! fractional Laplacian on a periodic box, with numerical checks of the
//! Sobolev constants and convexity bounds behind its existence theory.
//!
//! The system is
//!
//! ```text
//! (-Delta)^s u + gamma u = (alpha/p) u_+^{alpha-1} v_+^beta + f
//! (-Delta)^s v + gamma v = (beta/p)  v_+^{beta-1} u_+^alpha + g
//! ```
//!
//! with `gamma = 0`, `p = 2N/(N-2s)` (critical) or `gamma = 1`,
//! `p = alpha + beta` (subcritical).

pub mod constants;
pub mod energy;
pub mod error;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod params;
pub mod profiles;
pub mod report;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::{make_grid, Grid};
pub use params::{MinimizeOpts, QuotientSpec, Regime, SystemParams};
