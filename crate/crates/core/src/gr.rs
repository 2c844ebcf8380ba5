//! Light deflection and perihelion precession in the Schwarzschild metric
//! `B(r) = A⁻¹(r) = 1 − 2GM/r`, in geometric units (`GM` in meters, angles
//! in radians).

use crate::delta::{series_coefficients, DeltaSeries};
use crate::quadrature::{
    converge_by_doubling, ChebyshevRule, FejerRule, MAX_FEJER_NODES, MAX_NODES,
};
use crate::{Error, Result, Scalar};

const START_NODES: usize = 16;

fn check_gm<T: Scalar>(gm: T) -> Result<()> {
    if gm >= T::zero() && gm.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("gm", gm, "finite gm >= 0"))
    }
}

/// `x / (√(1−x)(1 + √(1−x))) = (1−x)^{−1/2} − 1` without cancellation.
fn inv_sqrt_minus_one<T: Scalar>(x: T) -> T {
    let r = (T::one() - x).sqrt();
    x / (r * (T::one() + r))
}

/// Light ray with closest approach `r0` past a mass `gm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightPath<T> {
    gm: T,
    r0: T,
}

impl<T: Scalar> LightPath<T> {
    /// Requires `r0` outside the horizon `2gm`.
    pub fn new(gm: T, r0: T) -> Result<Self> {
        check_gm(gm)?;
        if !(r0 > T::lit(2.0) * gm && r0 > T::zero() && r0.is_finite()) {
            return Err(Error::domain("r0", r0, "r0 > 2 gm"));
        }
        Ok(Self { gm, r0 })
    }

    pub fn gm(&self) -> T {
        self.gm
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    /// Compactness `GM/r0`.
    pub fn compactness(&self) -> T {
        self.gm / self.r0
    }
}

/// Bound orbit between perihelion `r_minus` and aphelion `r_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit<T> {
    gm: T,
    r_minus: T,
    r_plus: T,
}

/// Orbit constants `E`, `J²` and the inverse radii `z∓ = 1/r±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConstants<T> {
    pub energy: T,
    pub j_squared: T,
    pub z_minus: T,
    pub z_plus: T,
}

impl<T: Scalar> Orbit<T> {
    pub fn new(gm: T, r_minus: T, r_plus: T) -> Result<Self> {
        check_gm(gm)?;
        if !(r_minus > T::lit(2.0) * gm && r_minus > T::zero()) {
            return Err(Error::domain("r_minus", r_minus, "r_minus > 2 gm"));
        }
        if !(r_plus > r_minus && r_plus.is_finite()) {
            return Err(Error::domain("r_plus", r_plus, "r_minus < r_plus < inf"));
        }
        Ok(Self {
            gm,
            r_minus,
            r_plus,
        })
    }

    /// `r± = a(1 ± ε)`.
    pub fn from_semimajor(gm: T, semimajor: T, eccentricity: T) -> Result<Self> {
        if !(eccentricity > T::zero() && eccentricity < T::one()) {
            return Err(Error::domain("eccentricity", eccentricity, "0 < e < 1"));
        }
        if !(semimajor > T::zero()) {
            return Err(Error::domain("a", semimajor, "a > 0"));
        }
        Self::new(
            gm,
            semimajor * (T::one() - eccentricity),
            semimajor * (T::one() + eccentricity),
        )
    }

    /// Orbit with semilatus rectum `L` and eccentricity `ε`: `r± = L/(1 ∓ ε)`.
    pub fn from_semilatus(gm: T, semilatus: T, eccentricity: T) -> Result<Self> {
        if !(eccentricity > T::zero() && eccentricity < T::one()) {
            return Err(Error::domain("eccentricity", eccentricity, "0 < e < 1"));
        }
        Self::new(
            gm,
            semilatus / (T::one() + eccentricity),
            semilatus / (T::one() - eccentricity),
        )
    }

    pub fn gm(&self) -> T {
        self.gm
    }

    pub fn r_minus(&self) -> T {
        self.r_minus
    }

    pub fn r_plus(&self) -> T {
        self.r_plus
    }

    /// `1/L = (1/r₊ + 1/r₋)/2`.
    pub fn semilatus_rectum(&self) -> T {
        T::lit(2.0) * self.r_minus * self.r_plus / (self.r_minus + self.r_plus)
    }

    /// `a = (r₋ + r₊)/2`.
    pub fn semimajor_axis(&self) -> T {
        (self.r_minus + self.r_plus) * T::lit(0.5)
    }

    pub fn eccentricity(&self) -> T {
        (self.r_plus - self.r_minus) / (self.r_plus + self.r_minus)
    }

    /// `E = (r₊²/B₊ − r₋²/B₋)/(r₊² − r₋²)` and
    /// `J² = (1/B₊ − 1/B₋)/(1/r₊² − 1/r₋²)`.
    ///
    /// `J²` simplifies to `GM L / (B₊ B₋)`, which is what is evaluated.
    pub fn constants(&self) -> OrbitConstants<T> {
        let two = T::lit(2.0);
        let (rm, rp) = (self.r_minus, self.r_plus);
        let bm = T::one() - two * self.gm / rm;
        let bp = T::one() - two * self.gm / rp;
        let energy = (rp * rp / bp - rm * rm / bm) / ((rp - rm) * (rp + rm));
        let j_squared = self.gm * self.semilatus_rectum() / (bp * bm);
        OrbitConstants {
            energy,
            j_squared,
            z_minus: T::one() / rp,
            z_plus: T::one() / rm,
        }
    }

    /// `q(z) = 2GM(z + z₋ + z₊)`.
    fn q(&self, z: T) -> T {
        T::lit(2.0) * self.gm * (z + T::one() / self.r_plus + T::one() / self.r_minus)
    }

    fn check_stable(&self) -> Result<()> {
        // q is largest at z₊
        if self.q(T::one() / self.r_minus) < T::one() {
            Ok(())
        } else {
            Err(Error::UnstableOrbit {
                reason: "1 - 2GM(z + z- + z+) vanishes inside the orbit",
            })
        }
    }
}

/// `Δφ = 2∫_{r0}^∞ √A [(r/r0)² B(r0)/B(r) − 1]^{−1/2} dr/r − π`.
///
/// With `u = r0/r = 1 − w²` and `m = GM/r0` this is
/// `4∫₀¹ (h₀ − h)/(√h √h₀ (√h + √h₀)) dw` where
/// `h = (2 − 6m) + (6m − 1)w² − 2m w⁴` and `h₀ = 2 − w²`. The logarithmic
/// peak at `w = 0` near the photon sphere is flattened by `w = a sinh τ`.
pub fn deflection_exact<T: Scalar>(path: &LightPath<T>, tol: T) -> Result<T> {
    let radius = photon_sphere_exact(path.gm);
    if !(path.r0 > radius) {
        return Err(Error::InsidePhotonSphere {
            r0: path.r0.as_f64(),
            radius: radius.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let m = path.compactness();
    let eps = two * (path.r0 - radius) / path.r0;
    let b = T::lit(6.0) * m - T::one();
    let a = (eps / b.max(eps)).sqrt();
    let tau_max = (T::one() / a).asinh();
    let integrand = |tau: T| {
        let w = a * tau.sinh();
        let w2 = w * w;
        let h = eps + b * w2 - two * m * w2 * w2;
        let h0 = two - w2;
        let diff = two * m * (T::lit(3.0) - T::lit(3.0) * w2 + w2 * w2);
        let (sh, sh0) = (h.sqrt(), h0.sqrt());
        diff / (sh * sh0 * (sh + sh0)) * a * tau.cosh()
    };
    let (value, _) = converge_by_doubling(START_NODES, MAX_FEJER_NODES, tol, |n| {
        Ok(FejerRule::new(n)?.integrate(integrand, T::zero(), tau_max))
    })?;
    Ok(T::lit(4.0) * value)
}

/// First-order delta expansion at `δ = 1`, with `s = λ²/r0³`:
/// `−π + [π(2 + 3s) + 8GM/r0] / (2(1 + s)^{3/2})`.
pub fn deflection_first_order<T: Scalar>(path: &LightPath<T>, s: T) -> Result<T> {
    if !(s > -T::one()) {
        return Err(Error::domain("s", s, "s > -1"));
    }
    // 2(1+s)^{3/2} − 2 − 3s = (r − 1)²(2r + 1), r = √(1+s)
    let r = (T::one() + s).sqrt();
    let d = s / (T::one() + r);
    let numerator =
        T::lit(8.0) * path.compactness() - T::PI() * d * d * (T::lit(2.0) * r + T::one());
    Ok(numerator / (T::lit(2.0) * r * r * r))
}

/// PMS parameter of the first-order deflection, `s = λ²/r0³ = −8GM/(π r0)`.
pub fn lambda_pms_deflection<T: Scalar>(path: &LightPath<T>) -> T {
    -T::lit(8.0) * path.compactness() / T::PI()
}

/// `Δφ_PMS = −π + π (1 − 8GM/(π r0))^{−1/2}`; diverges at `r0 = 8GM/π`.
pub fn deflection_pms<T: Scalar>(path: &LightPath<T>) -> Result<T> {
    let radius = photon_sphere_predicted(path.gm);
    if !(path.r0 > radius) {
        return Err(Error::InsidePhotonSphere {
            r0: path.r0.as_f64(),
            radius: radius.as_f64(),
        });
    }
    Ok(T::PI() * inv_sqrt_minus_one(-lambda_pms_deflection(path)))
}

/// The PMS deflection in its literal closed form `−π + √(π/(1 − 8GM/(r0 π)))`,
/// which does not vanish in flat space. Kept for comparison only.
pub fn deflection_pms_literal<T: Scalar>(path: &LightPath<T>) -> Result<T> {
    let radius = photon_sphere_predicted(path.gm);
    if !(path.r0 > radius) {
        return Err(Error::InsidePhotonSphere {
            r0: path.r0.as_f64(),
            radius: radius.as_f64(),
        });
    }
    Ok(-T::PI() + (T::PI() / (T::one() + lambda_pms_deflection(path))).sqrt())
}

/// Weak-field limit `4GM/r0`.
pub fn deflection_asymptotic<T: Scalar>(path: &LightPath<T>) -> T {
    T::lit(4.0) * path.compactness()
}

/// Radius `8GM/π` at which the PMS deflection diverges.
pub fn photon_sphere_predicted<T: Scalar>(gm: T) -> T {
    T::lit(8.0) * gm / T::PI()
}

/// Schwarzschild photon sphere `3GM`.
pub fn photon_sphere_exact<T: Scalar>(gm: T) -> T {
    T::lit(3.0) * gm
}

/// Perihelion advance per orbit,
/// `Δθ = 2∫_{z₋}^{z₊} dz / (√((z₊−z)(z−z₋)) √(1 − 2GM(z + z₋ + z₊))) − 2π`,
/// evaluated as `2∫ w(z) [(1 − q)^{−1/2} − 1] dz` so nothing cancels.
pub fn precession_exact<T: Scalar>(orbit: &Orbit<T>, tol: T) -> Result<T> {
    orbit.check_stable()?;
    let c = orbit.constants();
    let (value, _) = converge_by_doubling(START_NODES, MAX_NODES, tol, |n| {
        Ok(ChebyshevRule::new(n)?.integrate(
            |z| inv_sqrt_minus_one(orbit.q(z)),
            c.z_minus,
            c.z_plus,
        ))
    })?;
    Ok(T::lit(2.0) * value)
}

/// Delta series of the precession with reference factor `1 − s`:
/// `Δ(z) = (s − q(z))/(1 − s)` is linear in `z`, so each term is an exact
/// Chebyshev–Gauss integral on `nodes > order/2` points.
///
/// Term 0 carries the `−2π`, so the partial sums are precession angles.
pub fn precession_delta_series<T: Scalar>(
    orbit: &Orbit<T>,
    order: usize,
    s: T,
    nodes: usize,
) -> Result<DeltaSeries<T>> {
    if !(s < T::one()) || !s.is_finite() {
        return Err(Error::domain("s", s, "s < 1"));
    }
    if nodes <= order / 2 {
        return Err(Error::domain(
            "nodes",
            T::from_count(nodes),
            "nodes > order / 2",
        ));
    }
    let c = orbit.constants();
    let base = T::one() - s;
    let rule = ChebyshevRule::new(nodes)?;
    let mut sums = vec![T::zero(); order + 1];
    for z in rule.abscissae(c.z_minus, c.z_plus) {
        let delta = (s - orbit.q(z)) / base;
        let mut power = T::one();
        for sum in sums.iter_mut() {
            *sum += power;
            power *= delta;
        }
    }
    let scale = T::lit(2.0) / base.sqrt() * rule.weight();
    let coefficients = series_coefficients::<T>(order);
    let mut terms: Vec<T> = coefficients
        .iter()
        .zip(&sums)
        .map(|(&k, &sum)| k * scale * sum)
        .collect();
    // 2π/√(1−s) − 2π
    terms[0] = T::TAU() * inv_sqrt_minus_one(s);
    let sup_delta = ((s - orbit.q(c.z_minus)) / base)
        .abs()
        .max(((s - orbit.q(c.z_plus)) / base).abs());
    Ok(DeltaSeries::from_terms(terms, sup_delta))
}

/// Precession from the delta series truncated at `order`.
pub fn precession_delta<T: Scalar>(orbit: &Orbit<T>, order: usize, s: T) -> Result<T> {
    Ok(precession_delta_series(orbit, order, s, order + START_NODES)?.value())
}

/// `s = λ² = 6GM/L`.
pub fn lambda_pms_precession<T: Scalar>(orbit: &Orbit<T>) -> T {
    T::lit(6.0) * orbit.gm / orbit.semilatus_rectum()
}

/// Leading-order advance `6πGM/L`.
pub fn precession_leading<T: Scalar>(orbit: &Orbit<T>) -> T {
    T::lit(6.0) * T::PI() * orbit.gm / orbit.semilatus_rectum()
}

fn check_semilatus<T: Scalar>(orbit: &Orbit<T>) -> Result<()> {
    if orbit.semilatus_rectum() > T::lit(6.0) * orbit.gm {
        Ok(())
    } else {
        Err(Error::UnstableOrbit {
            reason: "semilatus rectum L <= 6GM",
        })
    }
}

/// `π(3G²LM² + a(−4L² + 48GLM − 147G²M²)) / (4a(L − 6GM)² √(1 − 6GM/L))`
/// as a literal closed form.
///
/// This equals `−(Δθ₃ + 2π)/2`, where `Δθ₃` is the third-order delta series
/// at `s = 6GM/L`; its weak-field value is `−π − 3πGM/L`, not an advance.
/// [`precession_pms`] applies the map.
pub fn precession_pms_literal<T: Scalar>(orbit: &Orbit<T>) -> Result<T> {
    check_semilatus(orbit)?;
    let (gm, l, a) = (orbit.gm, orbit.semilatus_rectum(), orbit.semimajor_axis());
    let six_gm = T::lit(6.0) * gm;
    let numerator = T::lit(3.0) * gm * gm * l
        + a * (-T::lit(4.0) * l * l + T::lit(48.0) * gm * l - T::lit(147.0) * gm * gm);
    let denominator =
        T::lit(4.0) * a * (l - six_gm) * (l - six_gm) * (T::one() - six_gm / l).sqrt();
    Ok(T::PI() * numerator / denominator)
}

/// Third-order PMS precession, `−2P − 2π` with `P` the literal closed form
/// ([`precession_pms_literal`]), rearranged so the `2π` cancels exactly.
pub fn precession_pms<T: Scalar>(orbit: &Orbit<T>) -> Result<T> {
    check_semilatus(orbit)?;
    let g = orbit.gm / orbit.semilatus_rectum();
    let alpha = orbit.semilatus_rectum() / orbit.semimajor_axis();
    // P = π N/D with N = 3g²α − 4 + 48g − 147g², D = 4 r⁵, r = √(1 − 6g)
    let r = (T::one() - T::lit(6.0) * g).sqrt();
    let r_minus_one = -T::lit(6.0) * g / (T::one() + r);
    let geometric = T::one() + r + r * r + r * r * r + r * r * r * r;
    let n_plus_d = T::lit(3.0) * g * g * alpha + T::lit(48.0) * g - T::lit(147.0) * g * g
        + T::lit(4.0) * r_minus_one * geometric;
    let d = T::lit(4.0) * r.powi(5);
    Ok(-T::TAU() * n_plus_d / d)
}
