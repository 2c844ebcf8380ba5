//! Special functions needed by the closed forms and the series terms.
//!
//! Everything here is self-contained: Lanczos gamma, power-series and
//! Hankel-asymptotic Bessel functions of order 0 and 1, the terminating
//! Gauss hypergeometric sum and the complete elliptic integral of the first
//! kind by the arithmetic-geometric mean.
//!
//! **Elliptic convention:** [`elliptic_k`] takes the *modulus* `k`,
//! `K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ)`, not the parameter `m = k²`.

use crate::{Error, Result, Scalar};

/// Switch point between the Bessel power series and the Hankel expansion.
const BESSEL_SWITCH: f64 = 12.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `(2n − 1)!!` with the convention `(−1)!! = 1`.
pub fn double_factorial_odd<T: Scalar>(n: usize) -> Result<T> {
    let mut acc = T::one();
    for k in 1..=n {
        acc *= T::from_count(2 * k - 1);
        if !acc.is_finite() {
            return Err(Error::Overflow { n });
        }
    }
    Ok(acc)
}

/// Euler gamma function.
pub fn gamma<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::domain("x", x, "finite"));
    }
    if x <= T::zero() && x == x.floor() {
        return Err(Error::GammaPole { x: x.as_f64() });
    }
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return Ok(pi / ((pi * x).sin() * gamma(T::one() - x)?));
    }
    let z = x - T::one();
    let mut series = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += T::lit(c) / (z + T::from_count(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    Ok(T::TAU().sqrt() * t.powf(z + half) * (-t).exp() * series)
}

/// Bessel function of the first kind, order 0.
pub fn bessel_j0<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    if ax <= T::lit(BESSEL_SWITCH) {
        bessel_series(0, ax)
    } else {
        bessel_hankel(0, ax)
    }
}

/// Bessel function of the first kind, order 1.
///
/// Power series for `|x| ≤ 12`, Hankel's asymptotic expansion beyond.
pub fn bessel_j1<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    let value = if ax <= T::lit(BESSEL_SWITCH) {
        bessel_series(1, ax)
    } else {
        bessel_hankel(1, ax)
    };
    if x < T::zero() {
        -value
    } else {
        value
    }
}

// Σ (−1)^k (x/2)^{2k+ν} / (k! (k+ν)!)
fn bessel_series<T: Scalar>(order: usize, x: T) -> T {
    let half = x * T::lit(0.5);
    let q = -half * half;
    let mut term = if order == 0 { T::one() } else { half };
    let mut sum = term;
    for k in 1..200 {
        term *= q / (T::from_count(k) * T::from_count(k + order));
        sum += term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs().max(T::one()) {
            break;
        }
    }
    sum
}

// J_ν(x) = √(2/(πx)) (P cos χ − Q sin χ), χ = x − (2ν+1)π/4,
// truncated at the smallest term of the asymptotic series.
fn bessel_hankel<T: Scalar>(order: usize, x: T) -> T {
    let mu = T::from_count(4 * order * order);
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..100 {
        let odd = T::from_count(2 * k - 1);
        let next = term * (mu - odd * odd) / (T::from_count(k) * eight_x);
        if next.abs() >= last || next.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
        last = next.abs();
        term = next;
        // a_k / x^k enters P (even k) or Q (odd k) with alternating sign
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (T::from_count(2 * order + 1)) * T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Terminating Gauss hypergeometric function `₂F₁(a, −n; c; z)`.
///
/// Summed as the exact `n + 1` term polynomial by the ascending ratio
/// recurrence. Terms and the running sum are carried in double-word
/// arithmetic: for `|z| > 1` the terms alternate and cancel heavily.
pub fn hyp2f1_terminating<T: Scalar>(a: T, n: usize, c: T, z: T) -> Result<T> {
    if c <= T::zero() && c == c.floor() && c >= -T::from_count(n) {
        return Err(Error::HypergeometricParameter { c: c.as_f64(), n });
    }
    let z = Compensated::from(z);
    let mut term = Compensated::from(T::one());
    let mut sum = term;
    for k in 0..n {
        let kf = T::from_count(k);
        let numer = Compensated::sum(a, kf).scale(kf - T::from_count(n)).mul(z);
        let denom = Compensated::sum(c, kf).scale(T::from_count(k + 1));
        term = term.mul(numer).div(denom);
        sum = sum.add(term);
    }
    Ok(sum.value())
}

/// Complete elliptic integral of the first kind `K(k)` in the modulus
/// convention, via the arithmetic-geometric mean `K = π / (2 AGM(1, √(1−k²)))`.
pub fn elliptic_k<T: Scalar>(k: T) -> Result<T> {
    if !(k >= T::zero() && k < T::one()) {
        return Err(Error::domain("k", k, "0 <= k < 1"));
    }
    let mut a = T::one();
    let mut b = ((T::one() - k) * (T::one() + k)).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= T::epsilon() * a {
            break;
        }
        let next = (a + b) * T::lit(0.5);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(T::PI() / (a + b))
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Compensated<T> {
    hi: T,
    lo: T,
}

impl<T: Scalar> From<T> for Compensated<T> {
    fn from(hi: T) -> Self {
        Self { hi, lo: T::zero() }
    }
}

impl<T: Scalar> Compensated<T> {
    fn renormalize(hi: T, lo: T) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    // error-free a + b
    fn sum(a: T, b: T) -> Self {
        let s = a + b;
        let v = s - a;
        Self {
            hi: s,
            lo: (a - (s - v)) + (b - v),
        }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::sum(self.hi, other.hi);
        Self::renormalize(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        Self::renormalize(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    fn scale(self, factor: T) -> Self {
        self.mul(Self::from(factor))
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul(Self::from(-q1)));
        let q2 = r.hi / other.hi;
        Self::renormalize(q1, q2)
    }

    fn value(self) -> T {
        self.hi + self.lo
    }
}
