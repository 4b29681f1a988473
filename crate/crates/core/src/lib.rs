//! Stochastic completeness of spherically symmetric graphs.
//!
//! The minimal diffusion of the graph Laplacian `Δf(x) = Σ_{y~x} (f(x) - f(y))`
//! explodes (loses mass in finite time) on some infinite graphs with
//! unbounded valence. This crate decides and demonstrates that for radial
//! families in three independent ways:
//!
//! * [`harmonic`]: series criteria and the growth of radial solutions of
//!   `(Δ + λ) w = 0` (bounded iff explosive);
//! * [`heat`]: the Dirichlet heat mass `M_R(t)` on growing balls;
//! * [`sim`]: Monte Carlo of the jump chain with exponential holding times.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ball;
pub mod dd;
pub mod error;
pub mod family;
pub mod harmonic;
pub mod heat;
pub mod profile;
pub mod sequence;
pub mod sim;

pub use ball::{materialize_ball, BallVertex, FiniteBall, VertexKind};
pub use dd::Dd;
pub use error::{Error, ProfileDefect};
pub use family::GraphFamily;
pub use profile::{IntraSphere, RadialProfile};
pub use sequence::{Growth, Rounding, SequenceSpec};
