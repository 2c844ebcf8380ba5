//! Oscillation periods of one-dimensional conservative systems, and light
//! deflection and perihelion precession in the Schwarzschild metric.
//!
//! Three independent routes are provided for every observable:
//!
//! * exact singular quadrature ([`quadrature`], [`gr`]): Chebyshev–Gauss
//!   rules absorb the inverse-square-root turning-point singularity;
//! * the linear delta expansion ([`delta`]): the potential is interpolated
//!   with a harmonic one of stiffness `1 + λ²` and expanded to any order,
//!   with `λ` fixed by the principle of minimal sensitivity ([`pms`]);
//! * first-order closed forms ([`closed_forms`], [`gr`]).
//!
//! All numerics are generic over [`Scalar`]; the `*64` aliases below fix
//! the scalar to `f64`.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod delta;
mod error;
pub mod gr;
pub mod pms;
pub mod potential;
pub mod quadrature;
mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use delta::{DeltaExpansion, DeltaSeries, InterpolationFamily};
pub use gr::{LightPath, Orbit, OrbitConstants};
pub use pms::PmsResult;
pub use potential::{CustomPotential, ParsePotentialError, Potential, TurningPoints};
pub use quadrature::{ChebyshevRule, FejerRule};

pub type Potential64 = Potential<f64>;
pub type TurningPoints64 = TurningPoints<f64>;
pub type InterpolationFamily64 = InterpolationFamily<f64>;
pub type DeltaSeries64 = DeltaSeries<f64>;
pub type DeltaExpansion64 = DeltaExpansion<f64>;
pub type PmsResult64 = PmsResult<f64>;
pub type LightPath64 = LightPath<f64>;
pub type Orbit64 = Orbit<f64>;
pub type OrbitConstants64 = OrbitConstants<f64>;
pub type ChebyshevRule64 = ChebyshevRule<f64>;
pub type FejerRule64 = FejerRule<f64>;

/// Default relative tolerance for adaptive quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
