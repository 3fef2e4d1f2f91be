//! Numerical laboratory for the general mKdV equation (cubic nonlinearity).
//!
//! The crate provides the full pipeline for soliton experiments on the
//! six-parameter gmKdV family:
//!
//! - [`profile`]: traveling-wave profiles (root finding for the profile
//!   equation, amplitude/velocity coupling, RK4 integration of the profile
//!   ODE, sampling onto a mesh) plus the exact mKdV sech soliton,
//! - [`grid`]: the uniform mesh, difference operators, the conservative
//!   nonlinear forms `Q1`/`Q2` and their bilinear counterparts `R1`/`R2`,
//! - [`penta`]: a direct O(n) solver for five-diagonal systems,
//! - [`stepper`]: the implicit time step, linearized and iterated exactly
//!   twice per level,
//! - [`diagnostics`]: mass/energy functionals, their drifts, and the
//!   max-norm error against a registered exact solution,
//! - [`config`] / [`experiment`]: run configuration, presets and the
//!   experiment drivers behind the `gmkdv` CLI.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod params;
pub mod penta;
pub mod profile;
pub mod stepper;

pub use error::Error;
pub use grid::{GridState, Mesh};
pub use params::ModelParams;
pub use profile::{ProfileTable, SolitonSpec};
