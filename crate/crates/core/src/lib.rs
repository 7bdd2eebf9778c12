//! Ground states of the focusing NLS energy on a line and a plane glued at a point.
//!
//! The state is `U = (u, v)` with `u` on the line and `v = φ + q K₀(|x|)/(2π)` on
//! the plane; the energy couples them through `−β Re(q̄ u(0))`. Everything is
//! generic over [`Real`]; the `*64` aliases fix `f64`.

// `!(x > 0)` is how NaN is rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod checks;
pub mod energy;
pub mod error;
pub mod grid;
mod linalg;
pub mod params;
pub mod scalar;
pub mod solver;
pub mod special;
pub mod state;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type Params64 = params::Params<f64>;
pub type Grids64 = grid::Grids<f64>;
pub type LineGrid64 = grid::LineGrid<f64>;
pub type RadialGrid64 = grid::RadialGrid<f64>;
pub type HybridState64 = state::HybridState<f64>;
pub type SolveConfig64 = solver::SolveConfig<f64>;
pub type SolveReport64 = solver::SolveReport<f64>;
pub type EnergyBreakdown64 = energy::EnergyBreakdown<f64>;
pub type ExistenceVerdict64 = analysis::ExistenceVerdict<f64>;
