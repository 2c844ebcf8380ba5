use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by the numeric routines.
///
/// Payloads are stored as `f64` regardless of the scalar type in use so the
/// error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("(2n-1)!! is not representable for n = {n}")]
    Overflow { n: usize },

    #[error("gamma function has a pole at x = {x}")]
    GammaPole { x: f64 },

    #[error("2F1(a, -{n}; c; z) is undefined for c = {c}")]
    HypergeometricParameter { c: f64, n: usize },

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("motion is unbound at energy {energy}: no turning point found")]
    Unbound { energy: f64 },

    #[error("x = {x} is not strictly between the turning points ({lo}, {hi})")]
    OutsideInterval { x: f64, lo: f64, hi: f64 },

    #[error(
        "quadrature did not converge with {nodes} nodes (last two estimates {previous} and {last})"
    )]
    NoConvergence {
        nodes: usize,
        previous: f64,
        last: f64,
    },

    #[error("no stationary point in [{lo}, {hi}]; scanned derivative ranged over [{min_slope}, {max_slope}]")]
    NoStationaryPoint {
        lo: f64,
        hi: f64,
        min_slope: f64,
        max_slope: f64,
    },

    #[error("objective is not finite at s = {s}")]
    NonFiniteObjective { s: f64 },

    #[error("closest approach r0 = {r0} m is at or inside the divergence radius {radius} m")]
    InsidePhotonSphere { r0: f64, radius: f64 },

    #[error("orbit is not bound and stable: {reason}")]
    UnstableOrbit { reason: &'static str },
}

impl Error {
    pub(crate) fn domain<T: crate::Scalar>(
        name: &'static str,
        value: T,
        expected: &'static str,
    ) -> Self {
        Error::Domain {
            name,
            value: value.as_f64(),
            expected,
        }
    }
}
