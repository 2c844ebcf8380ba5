//! One-dimensional potentials, turning points and energy bookkeeping.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::{Error, Result, Scalar};

/// Bisection steps used to polish a bracketed turning point.
const BISECTION_STEPS: usize = 60;
/// Maximum number of bracket doublings before motion is declared unbound.
const MAX_DOUBLINGS: usize = 200;

/// A single-well potential `V(x)` for a unit mass.
///
/// The catalog forms are even with `V(0) = 0`. A [`CustomPotential`] may be
/// asymmetric but must name the location of its minimum.
#[derive(Clone)]
pub enum Potential<T> {
    /// `V = k x² / 2`
    Harmonic {
        stiffness: T,
    },
    /// `V = x²/2 + μ x⁴/4`
    Duffing {
        mu: T,
    },
    /// `V = x²/2 + ρ x^{2N} / (2N)`
    Anharmonic {
        rho: T,
        exponent: u32,
    },
    /// `V = 1 − cos θ`, librations only (`E < 2`)
    Pendulum,
    Custom(CustomPotential<T>),
}

/// User-supplied potential with a known minimum.
#[derive(Clone)]
pub struct CustomPotential<T> {
    name: String,
    minimum: T,
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
}

impl<T: Scalar> CustomPotential<T> {
    pub fn new<F>(name: impl Into<String>, minimum: T, eval: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            minimum,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Inversion points `x₋ < x₊` of the motion at energy `E = V(x±)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints<T> {
    x_minus: T,
    x_plus: T,
    energy: T,
}

impl<T: Scalar> TurningPoints<T> {
    /// Builds an interval directly. Only the ordering can be checked here;
    /// prefer [`Potential::turning_points`] which also guarantees
    /// `V(x±) = E`.
    pub fn new(x_minus: T, x_plus: T, energy: T) -> Result<Self> {
        if !(x_minus < x_plus) || !x_minus.is_finite() || !x_plus.is_finite() {
            return Err(Error::domain("x_minus", x_minus, "finite and below x_plus"));
        }
        Ok(Self {
            x_minus,
            x_plus,
            energy,
        })
    }

    pub fn x_minus(&self) -> T {
        self.x_minus
    }

    pub fn x_plus(&self) -> T {
        self.x_plus
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn midpoint(&self) -> T {
        (self.x_minus + self.x_plus) * T::lit(0.5)
    }

    pub fn half_width(&self) -> T {
        (self.x_plus - self.x_minus) * T::lit(0.5)
    }

    pub fn is_symmetric(&self) -> bool {
        self.x_minus == -self.x_plus
    }

    pub fn contains_strictly(&self, x: T) -> bool {
        x > self.x_minus && x < self.x_plus
    }
}

impl<T: Scalar> Potential<T> {
    pub fn harmonic(stiffness: T) -> Result<Self> {
        if !(stiffness > T::zero()) {
            return Err(Error::domain("k", stiffness, "k > 0"));
        }
        Ok(Self::Harmonic { stiffness })
    }

    pub fn duffing(mu: T) -> Result<Self> {
        if !(mu >= T::zero()) || !mu.is_finite() {
            return Err(Error::domain("mu", mu, "mu >= 0"));
        }
        Ok(Self::Duffing { mu })
    }

    pub fn anharmonic(rho: T, exponent: u32) -> Result<Self> {
        if !(rho >= T::zero()) || !rho.is_finite() {
            return Err(Error::domain("rho", rho, "rho >= 0"));
        }
        if exponent < 1 {
            return Err(Error::domain(
                "n",
                T::from_count(exponent as usize),
                "integer n >= 1",
            ));
        }
        Ok(Self::Anharmonic { rho, exponent })
    }

    pub fn pendulum() -> Self {
        Self::Pendulum
    }

    pub fn custom(custom: CustomPotential<T>) -> Self {
        Self::Custom(custom)
    }

    pub fn value(&self, x: T) -> T {
        let half = T::lit(0.5);
        match self {
            Self::Harmonic { stiffness } => half * *stiffness * x * x,
            Self::Duffing { mu } => {
                let x2 = x * x;
                half * x2 + *mu * x2 * x2 * T::lit(0.25)
            }
            Self::Anharmonic { rho, exponent } => {
                let two_n = T::from_count(2 * *exponent as usize);
                half * x * x + *rho * x.powi(2 * *exponent as i32) / two_n
            }
            Self::Pendulum => {
                // 1 − cos θ = 2 sin²(θ/2), no cancellation at small θ
                let s = (x * half).sin();
                T::lit(2.0) * s * s
            }
            Self::Custom(c) => (c.eval)(x),
        }
    }

    /// Location of the well's minimum.
    pub fn minimum(&self) -> T {
        match self {
            Self::Custom(c) => c.minimum,
            _ => T::zero(),
        }
    }

    /// Catalog potentials are even about the origin.
    pub fn is_even(&self) -> bool {
        !matches!(self, Self::Custom(_))
    }

    /// Energy of an oscillation with amplitude `A`, i.e. `V(A)`.
    pub fn energy_from_amplitude(&self, amplitude: T) -> T {
        self.value(self.minimum() + amplitude)
    }

    /// Highest energy that still gives bounded motion, if finite.
    pub fn escape_energy(&self) -> Option<T> {
        match self {
            Self::Pendulum => Some(T::lit(2.0)),
            _ => None,
        }
    }

    /// Turning points of an even catalog potential oscillating with
    /// amplitude `A`: exactly `(−A, A)` at energy `V(A)`.
    pub fn turning_points_from_amplitude(&self, amplitude: T) -> Result<TurningPoints<T>> {
        if !(amplitude > T::zero()) || !amplitude.is_finite() {
            return Err(Error::domain("amplitude", amplitude, "A > 0"));
        }
        if !self.is_even() {
            let energy = self.energy_from_amplitude(amplitude);
            return self.turning_points(energy);
        }
        if matches!(self, Self::Pendulum) && amplitude >= T::PI() {
            return Err(Error::domain("theta", amplitude, "0 < theta < pi"));
        }
        TurningPoints::new(-amplitude, amplitude, self.energy_from_amplitude(amplitude))
    }

    /// Solves `E = V(x±)` on both sides of the minimum.
    ///
    /// The bracket grows geometrically from the minimum until `E − V`
    /// changes sign, then is bisected for a fixed number of steps.
    pub fn turning_points(&self, energy: T) -> Result<TurningPoints<T>> {
        let min = self.minimum();
        if !energy.is_finite() || !(energy > self.value(min)) {
            return Err(Error::domain("energy", energy, "E > min V"));
        }
        if let Some(escape) = self.escape_energy() {
            if energy >= escape {
                return Err(Error::Unbound {
                    energy: energy.as_f64(),
                });
            }
        }
        let x_plus = self.solve_side(energy, T::one())?;
        let x_minus = if self.is_even() {
            -x_plus
        } else {
            self.solve_side(energy, -T::one())?
        };
        TurningPoints::new(x_minus, x_plus, energy)
    }

    fn solve_side(&self, energy: T, direction: T) -> Result<T> {
        let min = self.minimum();
        let limit = match self {
            Self::Pendulum => Some(T::PI()),
            _ => None,
        };
        let gap = |x: T| energy - self.value(x);
        let mut inner = T::zero();
        let mut step = T::one();
        let mut outer = None;
        for _ in 0..MAX_DOUBLINGS {
            let offset = limit.map_or(step, |l| step.min(l));
            let x = min + direction * offset;
            let g = gap(x);
            if !g.is_finite() || !x.is_finite() {
                break;
            }
            if g <= T::zero() {
                outer = Some(offset);
                break;
            }
            inner = offset;
            step = step + step;
        }
        let Some(mut outer) = outer else {
            return Err(Error::Unbound {
                energy: energy.as_f64(),
            });
        };
        for _ in 0..BISECTION_STEPS {
            let mid = (inner + outer) * T::lit(0.5);
            if mid <= inner || mid >= outer {
                break;
            }
            if gap(min + direction * mid) > T::zero() {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        // the endpoint closer to the root
        let pick = if gap(min + direction * inner).abs() <= gap(min + direction * outer).abs() {
            inner
        } else {
            outer
        };
        Ok(min + direction * pick)
    }

    /// `(E − V(x)) / ((x₊ − x)(x − x₋))`, the smooth part of the kinetic
    /// energy once the turning-point zeros are divided out.
    ///
    /// For catalog potentials on symmetric turning points the quotient is
    /// evaluated in closed form (taking `E = V(x₊)`), so it stays accurate
    /// right up to the endpoints.
    pub fn gap_ratio(&self, tp: &TurningPoints<T>, x: T) -> T {
        let half = T::lit(0.5);
        if tp.is_symmetric() {
            let a = tp.x_plus();
            match self {
                Self::Harmonic { stiffness } => return half * *stiffness,
                Self::Duffing { mu } => return half + *mu * T::lit(0.25) * (a * a + x * x),
                Self::Anharmonic { rho, exponent } => {
                    // (A^{2N} − x^{2N}) / (A² − x²) = Σ_j A^{2j} x^{2(N−1−j)}
                    let (a2, x2) = (a * a, x * x);
                    let n = *exponent as usize;
                    let mut acc = T::zero();
                    let mut a_pow = T::one();
                    for j in 0..n {
                        acc += a_pow * x2.powi((n - 1 - j) as i32);
                        a_pow *= a2;
                    }
                    return half + *rho / T::from_count(2 * n) * acc;
                }
                Self::Pendulum => {
                    // (cos x − cos A)/(A² − x²) = ½ sinc((A−x)/2) sinc((A+x)/2)
                    return half * sinc((a - x) * half) * sinc((a + x) * half);
                }
                Self::Custom(_) => {}
            }
        }
        let below = x - tp.x_minus();
        let above = tp.x_plus() - x;
        (tp.energy() - self.value(x)) / (below * above)
    }

    /// Short parseable label, e.g. `duffing:mu=1`.
    pub fn label(&self) -> String {
        match self {
            Self::Harmonic { stiffness } => format!("harmonic:k={stiffness}"),
            Self::Duffing { mu } => format!("duffing:mu={mu}"),
            Self::Anharmonic { rho, exponent } => format!("anharmonic:rho={rho},n={exponent}"),
            Self::Pendulum => "pendulum".to_string(),
            Self::Custom(c) => format!("custom:{}", c.name),
        }
    }
}

fn sinc<T: Scalar>(u: T) -> T {
    if u.abs() < T::lit(1e-4) {
        let u2 = u * u;
        T::one() - u2 / T::lit(6.0) + u2 * u2 / T::lit(120.0)
    } else {
        u.sin() / u
    }
}

impl<T: Scalar> fmt::Debug for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl<T: Scalar> fmt::Display for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Failure to parse a potential specification string.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParsePotentialError {
    #[error("unknown potential kind `{0}` (expected harmonic, duffing, anharmonic or pendulum)")]
    UnknownKind(String),
    #[error("unknown parameter `{key}` for {kind}")]
    UnknownKey { kind: &'static str, key: String },
    #[error("missing parameter `{key}` for {kind}")]
    MissingKey {
        kind: &'static str,
        key: &'static str,
    },
    #[error("malformed parameter `{0}` (expected key=value)")]
    Malformed(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error(transparent)]
    Domain(#[from] Error),
}

impl<T: Scalar> FromStr for Potential<T> {
    type Err = ParsePotentialError;

    /// Parses `kind[:key=value,...]`, e.g. `duffing:mu=1`,
    /// `anharmonic:rho=0.5,n=3`, `harmonic:k=2` or `pendulum`.
    fn from_str(spec: &str) -> std::result::Result<Self, Self::Err> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| ParsePotentialError::Malformed(item.to_string()))?;
            pairs.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
        let kind_lc = kind.trim().to_ascii_lowercase();
        let (name, allowed): (&'static str, &[&'static str]) = match kind_lc.as_str() {
            "harmonic" => ("harmonic", &["k"]),
            "duffing" => ("duffing", &["mu"]),
            "anharmonic" => ("anharmonic", &["rho", "n"]),
            "pendulum" => ("pendulum", &[]),
            _ => return Err(ParsePotentialError::UnknownKind(kind.to_string())),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(ParsePotentialError::UnknownKey {
                kind: name,
                key: k.clone(),
            });
        }
        let get = |key: &'static str| -> std::result::Result<Option<f64>, ParsePotentialError> {
            match pairs.iter().find(|(k, _)| k == key) {
                None => Ok(None),
                Some((k, v)) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Some)
                    .ok_or_else(|| ParsePotentialError::BadValue {
                        key: k.clone(),
                        value: v.clone(),
                    }),
            }
        };
        let require = |key: &'static str| {
            get(key)?.ok_or(ParsePotentialError::MissingKey { kind: name, key })
        };
        let potential = match name {
            "harmonic" => Potential::harmonic(T::lit(get("k")?.unwrap_or(1.0)))?,
            "duffing" => Potential::duffing(T::lit(require("mu")?))?,
            "anharmonic" => {
                let n = require("n")?;
                if n.fract() != 0.0 || n < 1.0 || n > u32::MAX as f64 {
                    return Err(ParsePotentialError::BadValue {
                        key: "n".into(),
                        value: n.to_string(),
                    });
                }
                Potential::anharmonic(T::lit(require("rho")?), n as u32)?
            }
            _ => Potential::pendulum(),
        };
        Ok(potential)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn catalog() -> Vec<Potential<f64>> {
        vec![
            Potential::harmonic(1.0).unwrap(),
            Potential::harmonic(3.5).unwrap(),
            Potential::duffing(1.0).unwrap(),
            Potential::duffing(0.02).unwrap(),
            Potential::anharmonic(0.7, 3).unwrap(),
            Potential::anharmonic(2.0, 6).unwrap(),
            Potential::pendulum(),
        ]
    }

    #[test]
    fn energy_from_amplitude_examples() {
        assert_eq!(
            Potential::duffing(1.0).unwrap().energy_from_amplitude(10.0),
            2550.0
        );
        assert_eq!(
            Potential::harmonic(1.0).unwrap().energy_from_amplitude(1.0),
            0.5
        );
        assert_relative_eq!(Potential::<f64>::pendulum().energy_from_amplitude(PI), 2.0);
    }

    #[test]
    fn turning_point_examples() {
        let tp = Potential::harmonic(1.0)
            .unwrap()
            .turning_points(0.5)
            .unwrap();
        assert_relative_eq!(tp.x_minus(), -1.0, max_relative = 1e-14);
        assert_relative_eq!(tp.x_plus(), 1.0, max_relative = 1e-14);

        let tp = Potential::duffing(1.0)
            .unwrap()
            .turning_points(2550.0)
            .unwrap();
        assert_relative_eq!(tp.x_plus(), 10.0, max_relative = 1e-14);
        assert_relative_eq!(tp.x_minus(), -10.0, max_relative = 1e-14);

        let tp = Potential::<f64>::pendulum().turning_points(1.0).unwrap();
        assert_relative_eq!(tp.x_plus(), FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn catalog_potentials_are_even_and_vanish_at_origin() {
        for p in catalog() {
            assert_eq!(p.value(0.0), 0.0);
            for i in 0..50 {
                let x = 0.061 * i as f64;
                assert_eq!(p.value(x), p.value(-x), "{p}");
            }
        }
    }

    #[test]
    fn turning_points_invert_energy() {
        for p in catalog() {
            for &a in &[0.1, 0.5, 1.0, 2.0, 2.9] {
                let energy = p.energy_from_amplitude(a);
                let tp = p.turning_points(energy).unwrap();
                assert!((tp.x_plus() - a).abs() < 1e-10, "{p} A={a}");
                assert!((tp.x_minus() + a).abs() < 1e-10, "{p} A={a}");
                let tol = 1e-12 * energy.abs().max(1.0);
                assert!((p.value(tp.x_plus()) - energy).abs() <= tol);
                assert!((p.value(tp.x_minus()) - energy).abs() <= tol);
            }
        }
    }

    #[test]
    fn kinetic_energy_is_positive_inside() {
        for p in catalog() {
            let tp = p.turning_points(p.energy_from_amplitude(1.7)).unwrap();
            let width = tp.x_plus() - tp.x_minus();
            for i in 1..=1000 {
                let x = tp.x_minus() + width * i as f64 / 1001.0;
                assert!(tp.energy() - p.value(x) >= 0.0);
            }
        }
    }

    #[test]
    fn unbound_motion_is_reported() {
        let p = Potential::<f64>::pendulum();
        assert!(matches!(p.turning_points(2.0), Err(Error::Unbound { .. })));
        assert!(matches!(p.turning_points(3.0), Err(Error::Unbound { .. })));
        let falling = Potential::custom(CustomPotential::new("ramp", 0.0, |x: f64| {
            if x < 0.0 {
                x * x
            } else {
                -x
            }
        }));
        assert!(matches!(
            falling.turning_points(1.0),
            Err(Error::Unbound { .. })
        ));
    }

    #[test]
    fn energy_below_minimum_is_rejected() {
        let p = Potential::duffing(1.0).unwrap();
        assert!(p.turning_points(0.0).is_err());
        assert!(p.turning_points(-1.0).is_err());
    }

    #[test]
    fn asymmetric_custom_potential() {
        // V = (x − 1)² + (x − 1)³/3 around x = 1; asymmetric turning points
        let p = Potential::custom(CustomPotential::new("cubic", 1.0, |x: f64| {
            let u = x - 1.0;
            u * u + u * u * u / 3.0
        }));
        let tp = p.turning_points(0.2).unwrap();
        assert!(tp.x_minus() < 1.0 && tp.x_plus() > 1.0);
        assert!(!tp.is_symmetric());
        assert!((p.value(tp.x_minus()) - 0.2).abs() < 1e-14);
        assert!((p.value(tp.x_plus()) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn closed_form_gap_ratio_matches_direct_quotient() {
        for p in catalog() {
            let tp = p.turning_points_from_amplitude(1.3).unwrap();
            for i in 1..40 {
                let x = -1.3 + 2.6 * i as f64 / 40.0;
                let direct = (tp.energy() - p.value(x)) / ((x - tp.x_minus()) * (tp.x_plus() - x));
                assert_relative_eq!(p.gap_ratio(&tp, x), direct, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn parses_specs() {
        let p: Potential<f64> = "duffing:mu=1".parse().unwrap();
        assert!(matches!(p, Potential::Duffing { mu } if mu == 1.0));
        let p: Potential<f64> = "anharmonic:rho=0.5,n=3".parse().unwrap();
        assert!(matches!(p, Potential::Anharmonic { rho, exponent: 3 } if rho == 0.5));
        let p: Potential<f64> = "harmonic".parse().unwrap();
        assert!(matches!(p, Potential::Harmonic { stiffness } if stiffness == 1.0));
        assert!(matches!(
            "pendulum".parse::<Potential<f64>>(),
            Ok(Potential::Pendulum)
        ));
        let round: Potential<f64> = p.label().parse().unwrap();
        assert_eq!(round.label(), p.label());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            "duffing:mu=1,nu=2".parse::<Potential<f64>>(),
            Err(ParsePotentialError::UnknownKey { .. })
        ));
        assert!(matches!(
            "quartic".parse::<Potential<f64>>(),
            Err(ParsePotentialError::UnknownKind(_))
        ));
        assert!(matches!(
            "duffing".parse::<Potential<f64>>(),
            Err(ParsePotentialError::MissingKey { .. })
        ));
        assert!(matches!(
            "duffing:mu=-1".parse::<Potential<f64>>(),
            Err(ParsePotentialError::Domain(_))
        ));
        assert!("anharmonic:rho=1,n=2.5".parse::<Potential<f64>>().is_err());
        assert!("duffing:mu".parse::<Potential<f64>>().is_err());
    }
}
