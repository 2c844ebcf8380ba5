//! First-order PMS periods and the all-order Duffing series terms, evaluated
//! directly from their closed forms.

use crate::delta::{series_coefficients, series_term, InterpolationFamily, DEFAULT_TERM_NODES};
use crate::pms::anharmonic_gamma_ratio;
use crate::potential::Potential;
use crate::specfun::{bessel_j1, hyp2f1_terminating};
use crate::{Error, Result, Scalar};

fn check_family<T: Scalar>(s: T) -> Result<T> {
    InterpolationFamily::new(s).map(|f| f.stiffness())
}

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta > T::zero() && theta < T::PI() {
        Ok(())
    } else {
        Err(Error::domain("theta", theta, "0 < theta < pi"))
    }
}

/// `T_PMS = 4π / √(4 + 3μA²)`.
pub fn duffing_t_pms<T: Scalar>(mu: T, amplitude: T) -> T {
    T::lit(4.0) * T::PI() / (T::lit(4.0) + T::lit(3.0) * mu * amplitude * amplitude).sqrt()
}

/// `(2π/√(1+s)) {1 − [3μA²/8 − s/2]/(1+s)}`.
pub fn duffing_first_order<T: Scalar>(mu: T, amplitude: T, s: T) -> Result<T> {
    let stiffness = check_family(s)?;
    let bracket = T::lit(3.0) * mu * amplitude * amplitude / T::lit(8.0) - s * T::lit(0.5);
    Ok(T::TAU() / stiffness.sqrt() * (T::one() - bracket / stiffness))
}

/// Order-`n` Duffing term
///
/// ```text
/// T⁽ⁿ⁾ = (−1)ⁿ π (2n−1)!! / (2^{2n−1} n! √(1+s)) · ((μA² − 2s)/(1+s))ⁿ
///        · ₂F₁(½, −n; 1; μA²/(2s − μA²))
/// ```
///
/// At `2s = μA²` the hypergeometric argument has a removable pole; the term
/// is then integrated numerically instead.
pub fn duffing_series_term_closed<T: Scalar>(mu: T, amplitude: T, s: T, n: usize) -> Result<T> {
    let stiffness = check_family(s)?;
    let coupling = mu * amplitude * amplitude;
    let gap = coupling - s - s;
    if gap == T::zero() {
        let potential = Potential::duffing(mu)?;
        let tp = potential.turning_points_from_amplitude(amplitude)?;
        return series_term(
            &potential,
            &InterpolationFamily::new(s)?,
            &tp,
            n,
            DEFAULT_TERM_NODES,
        );
    }
    // (−1)ⁿ(2n−1)!!/(n! 2ⁿ) · 2/2ⁿ, kept as a ratio product
    let c = series_coefficients::<T>(n)[n] * T::lit(2.0) / T::lit(2.0).powi(n as i32);
    let f = hyp2f1_terminating(T::lit(0.5), n, T::one(), -coupling / gap)?;
    Ok(c * T::PI() / stiffness.sqrt() * (gap / stiffness).powi(n as i32) * f)
}

/// `T_PMS = 2π / √(1 + 2ρ A^{2(N−1)} Γ(N+½)/(√π Γ(N+1)))`.
pub fn anharmonic_t_pms<T: Scalar>(rho: T, exponent: u32, amplitude: T) -> Result<T> {
    if exponent < 1 {
        return Err(Error::domain("N", T::zero(), "N >= 1"));
    }
    let ratio = anharmonic_gamma_ratio::<T>(exponent);
    let a = amplitude.powi(2 * (exponent as i32 - 1));
    Ok(T::TAU() / (T::one() + T::lit(2.0) * rho * a * ratio).sqrt())
}

/// `(2π/√(1+s))(3/2) − 2π J₁(Θ) / ((1+s)^{3/2} Θ)`.
pub fn pendulum_first_order<T: Scalar>(theta: T, s: T) -> Result<T> {
    check_theta(theta)?;
    let stiffness = check_family(s)?;
    let root = stiffness.sqrt();
    Ok(T::TAU() / root * T::lit(1.5) - T::TAU() * bessel_j1(theta) / (stiffness * root * theta))
}

/// `T_PMS = π √(2Θ / J₁(Θ))`.
pub fn pendulum_t_pms<T: Scalar>(theta: T) -> Result<T> {
    check_theta(theta)?;
    Ok(T::PI() * (T::lit(2.0) * theta / bessel_j1(theta)).sqrt())
}
