//! Linear delta expansion of the period integral.
//!
//! The potential `V` is interpolated as `V_δ = V₀ + δ (V − V₀)` with the
//! harmonic reference `V₀(x) = (1 + s)(x − c)²/2`, centred on the midpoint
//! `c` of the turning points so that both share the same inversion points.
//! With `E₀ = V₀(x±)` the period becomes
//!
//! ```text
//! T_δ = Σₙ (−1)ⁿ (2n−1)!!/(n! 2ⁿ) δⁿ ∫ √2 Δ(x)ⁿ / √(E₀ − V₀(x)) dx
//! Δ(x) = (E − E₀ − V(x) + V₀(x)) / (E₀ − V₀(x))
//! ```
//!
//! and converges uniformly when `sup |Δ| < 1`. Because
//! `E₀ − V₀ = (1+s)/2 · (x₊ − x)(x − x₋)`, each term is a Chebyshev–Gauss
//! integral of `Δⁿ`, and `Δ = 2g/(1+s) − 1` where `g` is the potential's
//! [gap ratio](Potential::gap_ratio). Only `s` (i.e. `λ²`) ever enters, so
//! imaginary `λ` needs no complex arithmetic.

use crate::potential::{Potential, TurningPoints};
use crate::quadrature::{ChebyshevRule, MAX_NODES};
use crate::{Error, Result, Scalar};

/// Node count of the interior grid used to estimate `sup |Δ|`.
pub const SUP_GRID_POINTS: usize = 2048;
/// Default starting node count for series terms.
pub const DEFAULT_TERM_NODES: usize = 64;
/// Relative stability demanded of every term when doubling nodes.
pub const TERM_TOL: f64 = 1e-11;

/// Interpolation parameter `s` of the harmonic reference potential.
///
/// For oscillators `s = λ²`, stiffness `1 + s`; admissible while `s > −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationFamily<T> {
    s: T,
}

impl<T: Scalar> InterpolationFamily<T> {
    pub fn new(s: T) -> Result<Self> {
        if !(s > Self::s_min()) || !s.is_finite() {
            return Err(Error::domain("s", s, "s > -1"));
        }
        Ok(Self { s })
    }

    /// Real `λ`, `s = λ²`.
    pub fn from_lambda(lambda: T) -> Result<Self> {
        Self::new(lambda * lambda)
    }

    pub fn s_min() -> T {
        -T::one()
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn stiffness(&self) -> T {
        T::one() + self.s
    }

    /// `λ = √s` when `s ≥ 0`; `None` when `λ` is imaginary.
    pub fn lambda(&self) -> Option<T> {
        (self.s >= T::zero()).then(|| self.s.sqrt())
    }

    /// `V₀(x) = (1 + s)(x − c)²/2`.
    pub fn reference_potential(&self, tp: &TurningPoints<T>, x: T) -> T {
        let u = x - tp.midpoint();
        self.stiffness() * u * u * T::lit(0.5)
    }

    /// `E₀ = V₀(x±)`.
    pub fn reference_energy(&self, tp: &TurningPoints<T>) -> T {
        let h = tp.half_width();
        self.stiffness() * h * h * T::lit(0.5)
    }

    /// Zeroth-order period `2π / √(1 + s)`.
    pub fn reference_period(&self) -> T {
        T::TAU() / self.stiffness().sqrt()
    }
}

/// Truncated delta series of the period at `δ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSeries<T> {
    terms: Vec<T>,
    partial_sums: Vec<T>,
    sup_delta: T,
}

impl<T: Scalar> DeltaSeries<T> {
    pub(crate) fn from_terms(terms: Vec<T>, sup_delta: T) -> Self {
        let partial_sums = terms
            .iter()
            .scan(T::zero(), |acc, &t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        Self {
            terms,
            partial_sums,
            sup_delta,
        }
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn partial_sums(&self) -> &[T] {
        &self.partial_sums
    }

    /// Highest-order partial sum.
    pub fn value(&self) -> T {
        *self.partial_sums.last().expect("series has a zeroth term")
    }

    /// Grid estimate of `sup |Δ|` over the oscillation interval.
    pub fn sup_delta(&self) -> T {
        self.sup_delta
    }

    /// Uniform convergence criterion `sup |Δ| < 1`.
    pub fn convergent(&self) -> bool {
        self.sup_delta < T::one()
    }
}

/// Series coefficients `(−1)ⁿ (2n−1)!! / (n! 2ⁿ)` for `n = 0..=order`,
/// built by the ratio `−(2n−1)/(2n)` so nothing overflows.
pub fn series_coefficients<T: Scalar>(order: usize) -> Vec<T> {
    let mut c = T::one();
    let mut out = Vec::with_capacity(order + 1);
    out.push(c);
    for n in 1..=order {
        c *= -T::from_count(2 * n - 1) / T::from_count(2 * n);
        out.push(c);
    }
    out
}

/// Gap ratios of a potential sampled on a fixed Chebyshev rule.
///
/// Evaluating the series for a new `s` only rescales the stored samples, so
/// the truncated period is a smooth function of `s` (which the PMS search
/// relies on).
#[derive(Debug, Clone)]
pub struct DeltaExpansion<T> {
    tp: TurningPoints<T>,
    gap: Vec<T>,
    gap_min: T,
    gap_max: T,
}

impl<T: Scalar> DeltaExpansion<T> {
    /// Samples on an `nodes`-point rule without any convergence check.
    pub fn with_nodes(
        potential: &Potential<T>,
        tp: &TurningPoints<T>,
        nodes: usize,
    ) -> Result<Self> {
        let rule = ChebyshevRule::new(nodes)?;
        let gap = rule
            .abscissae(tp.x_minus(), tp.x_plus())
            .map(|x| potential.gap_ratio(tp, x))
            .collect();
        let grid = ChebyshevRule::new(SUP_GRID_POINTS)?;
        let (mut gap_min, mut gap_max) = (T::infinity(), T::neg_infinity());
        for x in grid.abscissae(tp.x_minus(), tp.x_plus()) {
            let g = potential.gap_ratio(tp, x);
            gap_min = gap_min.min(g);
            gap_max = gap_max.max(g);
        }
        Ok(Self {
            tp: *tp,
            gap,
            gap_min,
            gap_max,
        })
    }

    /// Doubles the node count from `start` until every term up to `order`
    /// is stable at `family` to [`TERM_TOL`].
    pub fn converged(
        potential: &Potential<T>,
        tp: &TurningPoints<T>,
        family: &InterpolationFamily<T>,
        order: usize,
        start: usize,
    ) -> Result<Self> {
        let tol = T::attainable(T::lit(TERM_TOL));
        let floor = T::epsilon() * T::lit(16.0);
        let mut nodes = start.max(1);
        let mut current = Self::with_nodes(potential, tp, nodes)?;
        let mut current_terms = current.terms(family, order);
        while nodes * 2 <= MAX_NODES {
            nodes *= 2;
            let next = Self::with_nodes(potential, tp, nodes)?;
            let next_terms = next.terms(family, order);
            let scale = next_terms[0].abs();
            let stable = current_terms
                .iter()
                .zip(&next_terms)
                .all(|(&a, &b)| (a - b).abs() <= tol * b.abs() + floor * scale);
            if stable {
                return Ok(next);
            }
            current = next;
            current_terms = next_terms;
        }
        let worst = current_terms.last().copied().unwrap_or_else(T::zero);
        Err(Error::NoConvergence {
            nodes,
            previous: worst.as_f64(),
            last: current
                .terms(family, order)
                .last()
                .copied()
                .unwrap_or_else(T::zero)
                .as_f64(),
        })
    }

    pub fn turning_points(&self) -> &TurningPoints<T> {
        &self.tp
    }

    pub fn nodes(&self) -> usize {
        self.gap.len()
    }

    /// Terms `T⁽ⁿ⁾`, `n = 0..=order`, at `δ = 1`.
    pub fn terms(&self, family: &InterpolationFamily<T>, order: usize) -> Vec<T> {
        let stiffness = family.stiffness();
        let scale = T::lit(2.0) / stiffness;
        let mut sums = vec![T::zero(); order + 1];
        for &g in &self.gap {
            let delta = scale * g - T::one();
            let mut power = T::one();
            for s in sums.iter_mut() {
                *s += power;
                power *= delta;
            }
        }
        // 2/√(1+s) · π/N · Σ Δⁿ
        let base = T::lit(2.0) / stiffness.sqrt() * T::PI() / T::from_count(self.gap.len());
        series_coefficients::<T>(order)
            .into_iter()
            .zip(sums)
            .map(|(c, s)| c * base * s)
            .collect()
    }

    /// `sup |Δ|` on the interior grid. `Δ` is monotone in the gap ratio, so
    /// only its extremes matter.
    pub fn sup_delta(&self, family: &InterpolationFamily<T>) -> T {
        let scale = T::lit(2.0) / family.stiffness();
        (scale * self.gap_min - T::one())
            .abs()
            .max((scale * self.gap_max - T::one()).abs())
    }

    pub fn series(&self, family: &InterpolationFamily<T>, order: usize) -> DeltaSeries<T> {
        DeltaSeries::from_terms(self.terms(family, order), self.sup_delta(family))
    }

    /// Truncated period `Σ_{n ≤ order} T⁽ⁿ⁾`.
    pub fn partial_sum(&self, family: &InterpolationFamily<T>, order: usize) -> T {
        self.terms(family, order).into_iter().sum()
    }
}

/// `Δ(x)` at an interior point.
pub fn delta_ratio<T: Scalar>(
    potential: &Potential<T>,
    family: &InterpolationFamily<T>,
    tp: &TurningPoints<T>,
    x: T,
) -> Result<T> {
    if !tp.contains_strictly(x) {
        return Err(Error::OutsideInterval {
            x: x.as_f64(),
            lo: tp.x_minus().as_f64(),
            hi: tp.x_plus().as_f64(),
        });
    }
    Ok(T::lit(2.0) / family.stiffness() * potential.gap_ratio(tp, x) - T::one())
}

/// Single term `T⁽ⁿ⁾`, starting from `nodes` quadrature points and doubling
/// until the term is stable.
pub fn series_term<T: Scalar>(
    potential: &Potential<T>,
    family: &InterpolationFamily<T>,
    tp: &TurningPoints<T>,
    n: usize,
    nodes: usize,
) -> Result<T> {
    let expansion = DeltaExpansion::converged(potential, tp, family, n, nodes)?;
    Ok(expansion.terms(family, n)[n])
}

/// Terms `0..=order` at `δ = 1` with partial sums and the `sup |Δ|`
/// convergence diagnostic. Divergent series are returned, flagged.
pub fn sum_series<T: Scalar>(
    potential: &Potential<T>,
    family: &InterpolationFamily<T>,
    tp: &TurningPoints<T>,
    order: usize,
) -> Result<DeltaSeries<T>> {
    let expansion = DeltaExpansion::converged(potential, tp, family, order, DEFAULT_TERM_NODES)?;
    Ok(expansion.series(family, order))
}

/// Duffing convergence threshold `λ₀ = √(μA²/2) √(1 − 1/(μA²))`.
///
/// `None` when `μA² < 1`, where the expression is imaginary; use the
/// `sup |Δ|` diagnostic directly in that regime.
pub fn duffing_lambda0<T: Scalar>(mu: T, amplitude: T) -> Option<T> {
    let coupling = mu * amplitude * amplitude;
    if coupling < T::one() {
        return None;
    }
    Some((coupling * T::lit(0.5)).sqrt() * (T::one() - T::one() / coupling).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{exact_duffing_period, exact_period_at};
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn duffing(mu: f64, a: f64) -> (Potential<f64>, TurningPoints<f64>) {
        let p = Potential::duffing(mu).unwrap();
        let tp = p.turning_points_from_amplitude(a).unwrap();
        (p, tp)
    }

    // Δ from its definition with E₀ = V₀(x₊)
    fn literal_delta(
        p: &Potential<f64>,
        fam: &InterpolationFamily<f64>,
        tp: &TurningPoints<f64>,
        x: f64,
    ) -> f64 {
        let e0 = fam.reference_potential(tp, tp.x_plus());
        let v0 = fam.reference_potential(tp, x);
        (tp.energy() - e0 - p.value(x) + v0) / (e0 - v0)
    }

    #[test]
    fn family_domain() {
        assert!(InterpolationFamily::new(-1.0).is_err());
        assert!(InterpolationFamily::new(-0.999).is_ok());
        assert!(InterpolationFamily::new(f64::NAN).is_err());
        assert_eq!(InterpolationFamily::from_lambda(3.0).unwrap().s(), 9.0);
        assert_eq!(InterpolationFamily::new(-0.5).unwrap().lambda(), None);
    }

    #[test]
    fn coefficients() {
        let c = series_coefficients::<f64>(4);
        assert_eq!(c, vec![1.0, -0.5, 0.375, -0.3125, 35.0 / 128.0]);
    }

    #[test]
    fn harmonic_reference_gives_zero_delta() {
        let p = Potential::harmonic(1.0).unwrap();
        let tp = p.turning_points_from_amplitude(2.0).unwrap();
        let fam = InterpolationFamily::new(0.0).unwrap();
        for x in [-1.9, -0.3, 0.0, 1.2] {
            assert_eq!(delta_ratio(&p, &fam, &tp, x).unwrap(), 0.0);
        }
        let series = sum_series(&p, &fam, &tp, 6).unwrap();
        assert_relative_eq!(series.terms()[0], TAU, max_relative = 1e-15);
        assert!(series.terms()[1..].iter().all(|&t| t == 0.0));
        assert_relative_eq!(series.value(), TAU, max_relative = 1e-15);
    }

    #[test]
    fn duffing_delta_at_pms() {
        let (p, tp) = duffing(1.0, 10.0);
        let fam = InterpolationFamily::new(75.0).unwrap();
        let d = delta_ratio(&p, &fam, &tp, 0.0).unwrap();
        // (2/76)(25 − 37.5)
        assert_relative_eq!(d, -0.328_947_368_421_052_6, max_relative = 1e-14);
    }

    #[test]
    fn delta_ratio_rejects_endpoints() {
        let (p, tp) = duffing(1.0, 10.0);
        let fam = InterpolationFamily::new(75.0).unwrap();
        assert!(matches!(
            delta_ratio(&p, &fam, &tp, 10.0),
            Err(Error::OutsideInterval { .. })
        ));
        assert!(delta_ratio(&p, &fam, &tp, -11.0).is_err());
    }

    #[test]
    fn generic_delta_matches_simplified_forms() {
        let (p, tp) = duffing(1.0, 10.0);
        for s in [10.0, 75.0, 300.0] {
            let fam = InterpolationFamily::new(s).unwrap();
            for i in 1..100 {
                let x = -10.0 + 20.0 * i as f64 / 100.0;
                // (2/(1+λ²)) (μ/4 (A² + x²) − λ²/2)
                let simplified = 2.0 / (1.0 + s) * (0.25 * (100.0 + x * x) - s / 2.0);
                let generic = delta_ratio(&p, &fam, &tp, x).unwrap();
                assert!((generic - simplified).abs() < 1e-12);
                assert!((literal_delta(&p, &fam, &tp, x) - simplified).abs() < 1e-12);
            }
        }
        let pend = Potential::pendulum();
        let theta = 2.0f64;
        let tp = pend.turning_points_from_amplitude(theta).unwrap();
        for s in [-0.4, 0.0, 0.8] {
            let fam = InterpolationFamily::new(s).unwrap();
            for i in 1..100 {
                let x = -theta + 2.0 * theta * i as f64 / 100.0;
                // −(2/(1+λ²)) (cos Θ − cos θ)/(Θ² − θ²) − 1
                let simplified =
                    -2.0 / (1.0 + s) * (theta.cos() - x.cos()) / (theta * theta - x * x) - 1.0;
                assert!((delta_ratio(&pend, &fam, &tp, x).unwrap() - simplified).abs() < 1e-12);
                assert!((literal_delta(&pend, &fam, &tp, x) - simplified).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zeroth_term_is_reference_period() {
        let (p, tp) = duffing(1.0, 10.0);
        for s in [-0.5, 0.0, 75.0] {
            let fam = InterpolationFamily::new(s).unwrap();
            let t0 = series_term(&p, &fam, &tp, 0, 64).unwrap();
            assert_relative_eq!(t0, TAU / (1.0 + s).sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn duffing_first_term_matches_moment() {
        // −(2π/√(1+λ²)) (1/(1+λ²)) (3μA²/8 − λ²/2), from ∫(A² + x²) against the weight
        let (p, tp) = duffing(1.0, 10.0);
        for s in [20.0, 75.0, 90.0] {
            let fam = InterpolationFamily::new(s).unwrap();
            let t1 = series_term(&p, &fam, &tp, 1, 64).unwrap();
            let expected = -(TAU / (1.0 + s).sqrt()) / (1.0 + s) * (3.0 * 100.0 / 8.0 - s / 2.0);
            assert_relative_eq!(t1, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn duffing_series_converges_to_exact() {
        let (p, tp) = duffing(1.0, 10.0);
        let exact = exact_duffing_period(1.0, 10.0).unwrap();
        let fam = InterpolationFamily::new(75.0).unwrap();
        let series = sum_series(&p, &fam, &tp, 20).unwrap();
        assert!(series.convergent());
        let errors: Vec<f64> = series
            .partial_sums()
            .iter()
            .map(|t| (t - exact).abs())
            .collect();
        assert!(errors[20] < 1e-11 * exact);
        // error(n) ≤ error(5) (sup|Δ| + 0.05)^{n−5}
        let ratio = series.sup_delta() + 0.05;
        for n in 6..=20 {
            assert!(errors[n] <= errors[5] * ratio.powi(n as i32 - 5), "n = {n}");
        }
    }

    #[test]
    fn divergence_below_threshold() {
        let (p, tp) = duffing(1.0, 10.0);
        let lambda0 = duffing_lambda0(1.0, 10.0).unwrap();
        let below = InterpolationFamily::from_lambda(0.5 * lambda0).unwrap();
        let series = sum_series(&p, &below, &tp, 4).unwrap();
        assert!(series.sup_delta() > 1.0);
        assert!(!series.convergent());
        let above = InterpolationFamily::from_lambda(1.01 * lambda0).unwrap();
        assert!(sum_series(&p, &above, &tp, 4).unwrap().convergent());
    }

    #[test]
    fn sup_delta_matches_grid_scan() {
        let p = Potential::pendulum();
        let tp = p.turning_points_from_amplitude(2.5).unwrap();
        let fam = InterpolationFamily::new(-0.3).unwrap();
        let expansion = DeltaExpansion::with_nodes(&p, &tp, 32).unwrap();
        let grid = ChebyshevRule::<f64>::new(SUP_GRID_POINTS).unwrap();
        let scanned = grid
            .abscissae(tp.x_minus(), tp.x_plus())
            .map(|x| delta_ratio(&p, &fam, &tp, x).unwrap().abs())
            .fold(0.0, f64::max);
        assert_relative_eq!(expansion.sup_delta(&fam), scanned, max_relative = 1e-14);
    }

    #[test]
    fn pendulum_series_reaches_exact_period() {
        let p = Potential::pendulum();
        let tp = p.turning_points_from_amplitude(2.0).unwrap();
        let exact = exact_period_at(&p, &tp, 1e-12).unwrap();
        let fam = InterpolationFamily::new(-0.3).unwrap();
        let series = sum_series(&p, &fam, &tp, 30).unwrap();
        assert!(series.convergent());
        assert_relative_eq!(series.value(), exact, max_relative = 1e-10);
    }

    #[test]
    fn lambda0_values() {
        assert_relative_eq!(
            duffing_lambda0(1.0, 10.0).unwrap(),
            50f64.sqrt() * 0.99f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            duffing_lambda0(1.0, 10.0).unwrap(),
            7.035_623_639_735_144,
            max_relative = 1e-14
        );
        assert_eq!(duffing_lambda0(1.0, 1.0), Some(0.0));
        assert_eq!(duffing_lambda0(1.0, 0.5), None);
    }

    #[test]
    fn single_precision_series() {
        let p = Potential::<f32>::duffing(1.0).unwrap();
        let tp = p.turning_points_from_amplitude(2.0).unwrap();
        let fam = InterpolationFamily::new(3.0f32).unwrap();
        let series = sum_series(&p, &fam, &tp, 8).unwrap();
        let exact = exact_duffing_period(1.0f64, 2.0).unwrap();
        assert!((series.value() as f64 - exact).abs() < 1e-4 * exact);
    }
}
