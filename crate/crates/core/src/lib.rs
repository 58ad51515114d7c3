//! Radiation-pressure optical bistability in a coherently driven cavity with
//! one harmonically bound mirror.
//!
//! The crate models the system at three levels that cross-check each other:
//!
//! * [`steady`] — the cubic state equation for the intracavity intensity:
//!   roots, branch stability, fold points and the bistability threshold;
//! * [`dynamics`] — the deterministic mean-field equations of motion, their
//!   fixed-point Jacobians, and hysteresis sweeps along the folded curve;
//! * [`quantum`] — a truncated Fock-space master-equation integrator for the
//!   full cavity ⊗ mirror model, used as the brute-force oracle.
//!
//! [`model`] owns parameter handling and the effective constants (detuning,
//! displacement parameter, effective Kerr constant, thermal drive scaling),
//! and [`analogy`] maps the optomechanical cubic onto the Kerr-medium state
//! equation and onto the classical interferometer formula.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the common choice.

pub mod analogy;
mod cubic;
pub mod dynamics;
pub mod model;
pub mod ode;
pub mod quantum;
pub mod scalar;
pub mod steady;

pub use model::{derive, thermal_scaling, Mode, ScalingVariant};
pub use scalar::Real;

/// Complex scalar over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Complex scalar over `f32`.
pub type C32 = num_complex::Complex<f32>;

pub type SystemParams64 = model::SystemParams<f64>;
pub type DerivedParams64 = model::DerivedParams<f64>;
pub type StateEquation64 = steady::StateEquation<f64>;
pub type RootSet64 = steady::RootSet<f64>;
pub type MeanField64 = dynamics::MeanField<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type KerrParams64 = analogy::KerrParams<f64>;
pub type ClassicalParams64 = analogy::ClassicalParams<f64>;
