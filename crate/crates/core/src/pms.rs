//! Principle of minimal sensitivity: the interpolation parameter is fixed
//! where the truncated observable is stationary, `∂T/∂s = 0`.
//!
//! The search is numeric and works at any order; the closed-form values
//! for the first-order oscillator cases are catalogued alongside.

use crate::delta::{DeltaExpansion, InterpolationFamily, DEFAULT_TERM_NODES};
use crate::potential::{Potential, TurningPoints};
use crate::specfun::bessel_j1;
use crate::{Error, Result, Scalar};

/// Number of subintervals scanned for derivative sign changes.
pub const SCAN_INTERVALS: usize = 256;
const BISECTION_STEPS: usize = 200;

/// Stationary point of a truncated observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmsResult<T> {
    /// Stationary `s` (`λ²`, or `λ²/r₀³` for deflection).
    pub s_star: T,
    /// Objective at `s_star`.
    pub value: T,
    pub order: usize,
    /// `|d value / ds|` at `s_star`.
    pub residual: T,
    pub bracket: (T, T),
    /// Number of sign changes found in the scan.
    pub stationary_points: usize,
}

/// `(s_min + 1e-6, 10 (1 + s_c))` around a known closed form `s_c`, or
/// `(s_min + 1e-6, 10³)` without one.
pub fn default_bracket<T: Scalar>(s_min: T, closed_form: Option<T>) -> (T, T) {
    let lo = s_min + T::lit(1e-6);
    let hi = match closed_form {
        Some(s) => T::lit(10.0) * (T::one() + s),
        None => T::lit(1e3),
    };
    (lo, hi)
}

fn evaluate<T: Scalar, F: FnMut(T) -> Result<T>>(objective: &mut F, s: T) -> Result<T> {
    let v = objective(s)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteObjective { s: s.as_f64() })
    }
}

// Richardson-extrapolated central difference, error O(h⁴), with
// h = 1e-4·max(1, |s|) shrunk so that s ± 2h stays inside the bracket.
fn slope<T: Scalar, F: FnMut(T) -> Result<T>>(
    objective: &mut F,
    s: T,
    bracket: (T, T),
) -> Result<T> {
    let quarter = T::lit(0.25);
    let h = (T::lit(1e-4) * s.abs().max(T::one()))
        .min((s - bracket.0) * quarter)
        .min((bracket.1 - s) * quarter);
    let mut central = |h: T| -> Result<T> {
        let up = evaluate(objective, s + h)?;
        let down = evaluate(objective, s - h)?;
        Ok((up - down) / (h + h))
    };
    let (fine, coarse) = (central(h)?, central(h + h)?);
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

/// Locates `ds f = 0` on `bracket`.
///
/// The derivative is sampled at the midpoints of [`SCAN_INTERVALS`] equal
/// subintervals; every sign change is refined by bisection and the
/// stationary point of smallest `|s|` is returned.
pub fn optimize<T, F>(mut objective: F, bracket: (T, T), order: usize) -> Result<PmsResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(
            "bracket",
            hi - lo,
            "finite interval with lo < hi",
        ));
    }
    let width = (hi - lo) / T::from_count(SCAN_INTERVALS);
    let samples: Vec<(T, T)> = (0..SCAN_INTERVALS)
        .map(|i| {
            let s = lo + width * (T::from_count(i) + T::lit(0.5));
            slope(&mut objective, s, bracket).map(|d| (s, d))
        })
        .collect::<Result<_>>()?;

    let mut roots = Vec::new();
    for pair in samples.windows(2) {
        let ((a, da), (b, db)) = (pair[0], pair[1]);
        if da == T::zero() {
            roots.push(a);
        } else if da.signum() != db.signum() && db != T::zero() {
            roots.push(bisect(&mut objective, bracket, (a, da), b)?);
        }
    }
    if let Some(&(s, d)) = samples.last() {
        if d == T::zero() {
            roots.push(s);
        }
    }

    let Some(s_star) = roots
        .iter()
        .copied()
        .reduce(|x, y| if y.abs() < x.abs() { y } else { x })
    else {
        let (min_slope, max_slope) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, d)| {
                (a.min(d.as_f64()), b.max(d.as_f64()))
            });
        return Err(Error::NoStationaryPoint {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            min_slope,
            max_slope,
        });
    };
    Ok(PmsResult {
        s_star,
        value: evaluate(&mut objective, s_star)?,
        order,
        residual: slope(&mut objective, s_star, bracket)?.abs(),
        bracket,
        stationary_points: roots.len(),
    })
}

fn bisect<T, F>(objective: &mut F, bracket: (T, T), (mut a, da): (T, T), mut b: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let sign_a = da.signum();
    for _ in 0..BISECTION_STEPS {
        let mid = (a + b) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let d = slope(objective, mid, bracket)?;
        if d == T::zero() {
            return Ok(mid);
        }
        if d.signum() == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

/// Stationary point of the order-`order` delta series of an oscillator.
///
/// The gap ratios are sampled once (nodes converged at `reference`) so the
/// objective is smooth in `s`.
pub fn optimize_series<T: Scalar>(
    potential: &Potential<T>,
    tp: &TurningPoints<T>,
    order: usize,
    bracket: (T, T),
    reference: T,
) -> Result<PmsResult<T>> {
    let family = InterpolationFamily::new(reference)?;
    let expansion = DeltaExpansion::converged(potential, tp, &family, order, DEFAULT_TERM_NODES)?;
    optimize(
        |s| Ok(expansion.partial_sum(&InterpolationFamily::new(s)?, order)),
        bracket,
        order,
    )
}

/// `λ_PMS = (√(3μ)/2) A` for the Duffing oscillator.
pub fn lambda_pms_duffing<T: Scalar>(mu: T, amplitude: T) -> T {
    (T::lit(3.0) * mu).sqrt() * T::lit(0.5) * amplitude
}

/// `Γ(N + ½) / (√π Γ(N + 1))`, written as `Π_{j ≤ N} (j − ½)/j` so large
/// `N` does not overflow.
pub fn anharmonic_gamma_ratio<T: Scalar>(exponent: u32) -> T {
    (1..=exponent as usize)
        .map(|j| (T::from_count(j) - T::lit(0.5)) / T::from_count(j))
        .fold(T::one(), |acc, r| acc * r)
}

/// `λ_PMS = √(2ρ Γ(N+½)/(√π Γ(N+1))) A^{N−1}` for `V = x²/2 + ρ x^{2N}`.
pub fn lambda_pms_anharmonic<T: Scalar>(rho: T, exponent: u32, amplitude: T) -> Result<T> {
    if exponent < 1 {
        return Err(Error::domain("N", T::zero(), "N >= 1"));
    }
    if !(rho >= T::zero()) {
        return Err(Error::domain("rho", rho, "rho >= 0"));
    }
    Ok(
        (T::lit(2.0) * rho * anharmonic_gamma_ratio::<T>(exponent)).sqrt()
            * amplitude.powi(exponent as i32 - 1),
    )
}

/// Pendulum stationary point, returned as `s = λ² = 2J₁(Θ)/Θ − 1`.
///
/// `s` is negative for every `0 < Θ < π` (`λ` is imaginary) but stays
/// above `−1`.
pub fn lambda_pms_pendulum<T: Scalar>(theta: T) -> Result<T> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::domain("theta", theta, "0 < theta < pi"));
    }
    Ok(T::lit(2.0) * bessel_j1(theta) / theta - T::one())
}

/// First-order stationary `s` from the closed-form catalogue, for an
/// oscillation of amplitude `A` about the origin. `None` for custom
/// potentials or out-of-range amplitudes.
pub fn closed_form_s<T: Scalar>(potential: &Potential<T>, amplitude: T) -> Option<T> {
    match potential {
        Potential::Harmonic { stiffness } => Some(*stiffness - T::one()),
        Potential::Duffing { mu } => Some(T::lit(0.75) * *mu * amplitude * amplitude),
        Potential::Anharmonic { rho, exponent } => {
            lambda_pms_anharmonic(*rho, *exponent, amplitude)
                .ok()
                .map(|l| l * l)
        }
        Potential::Pendulum => lambda_pms_pendulum(amplitude).ok(),
        Potential::Custom(_) => None,
    }
}
