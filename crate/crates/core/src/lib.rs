//! Numerical laboratory for oscillating (Bukhgeim-type) solutions of the
//! two-dimensional Schrödinger equation `Laplace u + q u = 0` on the unit
//! disc, the Dirichlet-to-Neumann map, and the log-type stability of the
//! inverse problem.

pub mod cgo;
pub mod diff;
pub mod disc;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod forward;
pub mod norms;
pub mod quad;
pub mod transforms;

pub use error::{Error, Result};
