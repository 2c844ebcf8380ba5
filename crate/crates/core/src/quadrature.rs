//! Quadrature for period-type integrals.
//!
//! Between two turning points the period integrand behaves like
//! `1/√((x₊ − x)(x − x₋))`, which is exactly the Chebyshev weight after an
//! affine map. Chebyshev–Gauss nodes are strictly interior, so the `0/0` of
//! `E − V` at the endpoints is never evaluated.

use crate::potential::{Potential, TurningPoints};
use crate::specfun::elliptic_k;
use crate::{Error, Result, Scalar};

/// Initial node count for adaptive doubling.
const START_NODES: usize = 16;
/// Largest node count tried before giving up.
pub const MAX_NODES: usize = 1 << 16;
/// Largest node count for the plain-integral rule (its weights cost O(n²)).
pub const MAX_FEJER_NODES: usize = 1 << 13;

/// n-point Chebyshev–Gauss rule for `∫ f(x) / √((b − x)(x − a)) dx`.
///
/// Every node carries the same weight `π/n`; the rule is exact for
/// polynomials of degree below `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule<T> {
    nodes: Vec<T>,
}

impl<T: Scalar> ChebyshevRule<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("n", T::zero(), "at least one node"));
        }
        Ok(Self {
            nodes: chebyshev_nodes(n),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes on the reference interval `(−1, 1)`, descending.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Common weight `π/n`.
    pub fn weight(&self) -> T {
        T::PI() / T::from_count(self.len())
    }

    /// Nodes mapped onto `(a, b)`.
    pub fn abscissae(&self, a: T, b: T) -> impl Iterator<Item = T> + '_ {
        let mid = (a + b) * T::lit(0.5);
        let half = (b - a) * T::lit(0.5);
        self.nodes.iter().map(move |&t| mid + half * t)
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let sum: T = self.abscissae(a, b).map(&mut f).sum();
        sum * self.weight()
    }
}

fn chebyshev_nodes<T: Scalar>(n: usize) -> Vec<T> {
    let denom = T::from_count(2 * n);
    (1..=n)
        .map(|k| (T::from_count(2 * k - 1) * T::PI() / denom).cos())
        .collect()
}

/// Fejér's first rule: plain `∫ₐᵇ f(x) dx` on the same interior Chebyshev
/// nodes. Used where only one endpoint is singular and a substitution has
/// already removed it.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> FejerRule<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("n", T::zero(), "at least one node"));
        }
        let denom = T::from_count(2 * n);
        let two = T::lit(2.0);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 1..=n {
            let theta = T::from_count(2 * k - 1) * T::PI() / denom;
            // cos(2jθ) by the three-term recurrence
            let c2 = (two * theta).cos();
            let (mut prev, mut cur) = (T::one(), c2);
            let mut acc = T::zero();
            for j in 1..=n / 2 {
                let jj = T::from_count(j);
                acc += cur / (T::lit(4.0) * jj * jj - T::one());
                let next = two * c2 * cur - prev;
                prev = cur;
                cur = next;
            }
            nodes.push(theta.cos());
            weights.push(two / T::from_count(n) * (T::one() - two * acc));
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let mid = (a + b) * T::lit(0.5);
        let half = (b - a) * T::lit(0.5);
        let sum: T = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum();
        sum * half
    }
}

/// Repeats `eval(n)` with doubling `n` until two successive results agree
/// to `tol` relative. Returns the last value and the node count used.
pub(crate) fn converge_by_doubling<T, F>(
    start: usize,
    cap: usize,
    tol: T,
    mut eval: F,
) -> Result<(T, usize)>
where
    T: Scalar,
    F: FnMut(usize) -> Result<T>,
{
    let tol = T::attainable(tol);
    let mut n = start;
    let mut previous = eval(n)?;
    let mut pair = (previous, previous);
    while n * 2 <= cap {
        n *= 2;
        let current = eval(n)?;
        pair = (previous, current);
        if !current.is_finite() {
            break;
        }
        if (current - previous).abs() <= tol * current.abs() {
            return Ok((current, n));
        }
        previous = current;
    }
    Err(Error::NoConvergence {
        nodes: n,
        previous: pair.0.as_f64(),
        last: pair.1.as_f64(),
    })
}

/// `∫ f(x) / √((x₊ − x)(x − x₋)) dx` with an `n`-point Chebyshev–Gauss rule.
pub fn integrate_singular<T, F>(f: F, tp: &TurningPoints<T>, n: usize) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let rule = ChebyshevRule::new(n)?;
    Ok(rule.integrate(f, tp.x_minus(), tp.x_plus()))
}

/// Exact period `T = ∫ √2 / √(E − V(x)) dx` at energy `E`.
pub fn exact_period<T: Scalar>(potential: &Potential<T>, energy: T) -> Result<T> {
    let tp = potential.turning_points(energy)?;
    exact_period_at(potential, &tp, T::lit(crate::DEFAULT_QUAD_TOL))
}

/// Exact period between known turning points, to relative tolerance `tol`.
///
/// `√(E − V)` is split as `√g(x) · √((x₊ − x)(x − x₋))`; the rule integrates
/// `√2/√g` and the node count doubles until successive estimates agree.
pub fn exact_period_at<T: Scalar>(
    potential: &Potential<T>,
    tp: &TurningPoints<T>,
    tol: T,
) -> Result<T> {
    let sqrt2 = T::SQRT_2();
    let (value, _) = converge_by_doubling(START_NODES, MAX_NODES, tol, |n| {
        integrate_singular(|x| sqrt2 / potential.gap_ratio(tp, x).sqrt(), tp, n)
    })?;
    Ok(value)
}

/// Exact pendulum period `4 K(sin(Θ/2))` for amplitude `0 < Θ < π`.
pub fn exact_pendulum_period<T: Scalar>(theta: T) -> Result<T> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::domain("theta", theta, "0 < theta < pi"));
    }
    Ok(T::lit(4.0) * elliptic_k((theta * T::lit(0.5)).sin())?)
}

/// Exact Duffing period `4 K(k) / √(1 + μA²)`, `k² = μA² / (2(1 + μA²))`.
pub fn exact_duffing_period<T: Scalar>(mu: T, amplitude: T) -> Result<T> {
    if !(mu >= T::zero()) {
        return Err(Error::domain("mu", mu, "mu >= 0"));
    }
    if !(amplitude > T::zero()) {
        return Err(Error::domain("amplitude", amplitude, "A > 0"));
    }
    let coupling = mu * amplitude * amplitude;
    let stiff = T::one() + coupling;
    let k = (coupling / (T::lit(2.0) * stiff)).sqrt();
    Ok(T::lit(4.0) * elliptic_k(k)? / stiff.sqrt())
}
