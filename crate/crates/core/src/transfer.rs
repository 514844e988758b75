//! Scalar transfer functions (rational times an optional dead-time factor)
//! and their evaluation on circles of the unit disk.
//!
//! Half-plane functions are read on the disk through the Cayley map
//! `s = (1 + z) / (1 - z)`, which sends the open unit disk onto the open
//! right half-plane and `z = 1` to `s = infinity`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NuError, Result};
use crate::poly::Poly;

/// Two roots closer than this (relative to `max(1, |root|)`) count as common.
pub const COMMON_ROOT_TOL: f64 = 1e-8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    HalfPlane,
    Disk,
}

/// `s = (1 + z) / (1 - z)`; `None` at `z = 1`.
pub fn cayley(z: Complex64) -> Option<Complex64> {
    let den = ONE - z;
    if den == Complex64::new(0.0, 0.0) {
        None
    } else {
        Some((ONE + z) / den)
    }
}

/// Inverse Cayley map `z = (s - 1) / (s + 1)`.
pub fn inverse_cayley(s: Complex64) -> Complex64 {
    (s - ONE) / (s + ONE)
}

/// Anything that can be evaluated at points of the closed unit disk.
pub trait CircleFunction: Sync {
    fn value_at(&self, z: Complex64) -> Result<Complex64>;
}

impl<F> CircleFunction for F
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn value_at(&self, z: Complex64) -> Result<Complex64> {
        self(z)
    }
}

/// `n(s) / d(s) * exp(-s T)` in the half-plane variable, or `n(z) / d(z)` on the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    numerator: Poly,
    denominator: Poly,
    delay: f64,
    domain: Domain,
}

impl TransferFunction {
    /// Validated constructor. Rejects fractions that are not in lowest terms.
    pub fn new(numerator: Poly, denominator: Poly, delay: f64, domain: Domain) -> Result<Self> {
        let tf = Self::unchecked(numerator, denominator, delay, domain)?;
        if tf.common_roots(COMMON_ROOT_TOL).is_empty() {
            Ok(tf)
        } else {
            Err(NuError::validation(
                "numerator and denominator share a common root",
            ))
        }
    }

    /// Like [`TransferFunction::new`] but cancels common roots instead of
    /// rejecting them. Returns the number of cancelled roots.
    pub fn reduced(
        numerator: Poly,
        denominator: Poly,
        delay: f64,
        domain: Domain,
    ) -> Result<(Self, usize)> {
        Self::reduced_with_tol(numerator, denominator, delay, domain, COMMON_ROOT_TOL)
    }

    pub fn reduced_with_tol(
        numerator: Poly,
        denominator: Poly,
        delay: f64,
        domain: Domain,
        tol: f64,
    ) -> Result<(Self, usize)> {
        let tf = Self::unchecked(numerator, denominator, delay, domain)?;
        let common = tf.common_roots(tol);
        if common.is_empty() {
            return Ok((tf, 0));
        }
        let factor = Poly::from_roots(&common, 1.0);
        let (num, _) = tf.numerator.div_rem(&factor);
        let (den, _) = tf.denominator.div_rem(&factor);
        let tf = Self::unchecked(num, den, tf.delay, tf.domain)?;
        Ok((tf, common.len()))
    }

    fn unchecked(numerator: Poly, denominator: Poly, delay: f64, domain: Domain) -> Result<Self> {
        if denominator.is_zero() {
            return Err(NuError::validation("denominator is the zero polynomial"));
        }
        if !numerator.is_finite() || !denominator.is_finite() {
            return Err(NuError::validation("coefficients must be finite"));
        }
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(NuError::validation("delay must be finite and nonnegative"));
        }
        if domain == Domain::Disk && delay > 0.0 {
            return Err(NuError::validation("disk-domain functions cannot carry a delay"));
        }
        Ok(TransferFunction {
            numerator,
            denominator,
            delay,
            domain,
        })
    }

    /// Rational half-plane function from ascending coefficients.
    pub fn rational(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Poly::new(num.to_vec()), Poly::new(den.to_vec()), 0.0, Domain::HalfPlane)
    }

    pub fn constant(c: f64) -> Self {
        TransferFunction {
            numerator: Poly::constant(c),
            denominator: Poly::constant(1.0),
            delay: 0.0,
            domain: Domain::HalfPlane,
        }
    }

    /// Same function in a new domain tag (no coefficient change).
    pub fn in_domain(mut self, domain: Domain) -> Result<Self> {
        if domain == Domain::Disk && self.delay > 0.0 {
            return Err(NuError::validation("disk-domain functions cannot carry a delay"));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_delay(mut self, delay: f64) -> Result<Self> {
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(NuError::validation("delay must be finite and nonnegative"));
        }
        if self.domain == Domain::Disk && delay > 0.0 {
            return Err(NuError::validation("disk-domain functions cannot carry a delay"));
        }
        self.delay = delay;
        Ok(self)
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn has_delay(&self) -> bool {
        self.delay > 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// `-f`.
    pub fn negated(&self) -> TransferFunction {
        TransferFunction {
            numerator: self.numerator.scale(-1.0),
            ..self.clone()
        }
    }

    /// Roots shared by numerator and denominator, paired greedily.
    pub fn common_roots(&self, tol: f64) -> Vec<Complex64> {
        if self.numerator.is_zero() {
            return Vec::new();
        }
        let num_roots = self.numerator.roots();
        let mut den_roots: Vec<Option<Complex64>> =
            self.denominator.roots().into_iter().map(Some).collect();
        let mut common = Vec::new();
        for r in num_roots {
            let hit = den_roots.iter_mut().find(|d| match d {
                Some(d) => (r - *d).norm() <= tol * r.norm().max(1.0),
                None => false,
            });
            if let Some(slot) = hit {
                let d = slot.take().unwrap();
                common.push((r + d) * 0.5);
            }
        }
        common
    }

    /// Evaluates at a point `z` of the closed unit disk.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self.domain {
            Domain::Disk => self.rational_at(z, z),
            Domain::HalfPlane => {
                let s = match cayley(z) {
                    Some(s) => s,
                    None => {
                        if self.has_delay() {
                            return Err(NuError::DomainError);
                        }
                        return self.at_infinity(z);
                    }
                };
                let base = if (ONE - z).norm() < (ONE + z).norm() {
                    // |s| > 1: evaluate in w = 1/s
                    self.rational_at_inverse((ONE - z) / (ONE + z), z)?
                } else {
                    self.rational_at(s, z)?
                };
                if self.has_delay() {
                    Ok(base * (-s * self.delay).exp())
                } else {
                    Ok(base)
                }
            }
        }
    }

    /// Evaluates the half-plane function directly at `s` (no Cayley map).
    pub fn evaluate_s(&self, s: Complex64) -> Result<Complex64> {
        let base = self.rational_at(s, inverse_cayley(s))?;
        if self.has_delay() {
            Ok(base * (-s * self.delay).exp())
        } else {
            Ok(base)
        }
    }

    fn den_floor(&self) -> f64 {
        1e-14 * self.denominator.max_abs_coeff()
    }

    fn rational_at(&self, x: Complex64, z: Complex64) -> Result<Complex64> {
        let d = self.denominator.eval(x);
        if d.norm() <= self.den_floor() {
            return Err(NuError::PoleHit { z, modulus: d.norm() });
        }
        Ok(self.numerator.eval(x) / d)
    }

    // n(s)/d(s) = w^(dd - dn) * n_rev(w) / d_rev(w) with w = 1/s
    fn rational_at_inverse(&self, w: Complex64, z: Complex64) -> Result<Complex64> {
        if self.numerator.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let d = self.denominator.eval_reversed(w);
        if d.norm() <= self.den_floor() {
            return Err(NuError::PoleHit { z, modulus: d.norm() });
        }
        let n = self.numerator.eval_reversed(w);
        let excess = self.denominator.degree() as i32 - self.numerator.degree() as i32;
        if excess < 0 && w.norm() == 0.0 {
            return Err(NuError::PoleHit { z, modulus: 0.0 });
        }
        Ok(n / d * w.powi(excess))
    }

    fn at_infinity(&self, z: Complex64) -> Result<Complex64> {
        self.rational_at_inverse(Complex64::new(0.0, 0.0), z)
    }

    /// Disk-rational form `f((1 + z) / (1 - z))` of a rational half-plane function.
    pub fn transplant(&self) -> Result<TransferFunction> {
        if self.domain != Domain::HalfPlane {
            return Err(NuError::validation("transplant expects a half-plane function"));
        }
        if self.has_delay() {
            return Err(NuError::UnsupportedDelay);
        }
        let plus = Poly::new(vec![1.0, 1.0]);
        let minus = Poly::new(vec![1.0, -1.0]);
        let (num, den) = moebius_substitute(&self.numerator, &self.denominator, &plus, &minus);
        let (tf, _) = TransferFunction::reduced(num, den, 0.0, Domain::Disk)?;
        Ok(tf)
    }

    /// Half-plane form `g((s - 1) / (s + 1))` of a disk-rational function.
    pub fn to_half_plane(&self) -> Result<TransferFunction> {
        match self.domain {
            Domain::HalfPlane => Ok(self.clone()),
            Domain::Disk => {
                let top = Poly::new(vec![-1.0, 1.0]);
                let bottom = Poly::new(vec![1.0, 1.0]);
                let (num, den) =
                    moebius_substitute(&self.numerator, &self.denominator, &top, &bottom);
                let (tf, _) = TransferFunction::reduced(num, den, 0.0, Domain::HalfPlane)?;
                Ok(tf)
            }
        }
    }
}

impl CircleFunction for TransferFunction {
    fn value_at(&self, z: Complex64) -> Result<Complex64> {
        self.evaluate(z)
    }
}

// Substitutes x = top(y) / bottom(y) into num(x) / den(x) and clears the
// common power of bottom(y).
fn moebius_substitute(num: &Poly, den: &Poly, top: &Poly, bottom: &Poly) -> (Poly, Poly) {
    let m = num.degree().max(den.degree());
    let sub = |p: &Poly| {
        p.coeffs()
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (k, c)| {
                acc.add(&top.pow(k).mul(&bottom.pow(m - k)).scale(*c))
            })
            .trim_relative(1e-14)
    };
    (sub(num), sub(den))
}

/// A sampled point on a circle `|z| = r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirclePoint {
    pub z: Complex64,
    /// Half-plane image `(1 + z) / (1 - z)`; `None` at `z = 1`.
    pub s: Option<Complex64>,
    pub value: Complex64,
}

/// Uniform sampling of a circle, optionally skipping an arc around `z = r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSampling {
    radius: f64,
    count: usize,
    exclusion_angle: f64,
}

impl CircleSampling {
    pub fn new(radius: f64, count: usize, exclusion_angle: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(NuError::validation(format!("radius {radius} outside (0, 1]")));
        }
        if !count.is_power_of_two() {
            return Err(NuError::LengthNotPowerOfTwo { len: count });
        }
        if !(0.0..PI / 4.0).contains(&exclusion_angle) {
            return Err(NuError::validation("exclusion angle must lie in [0, pi/4)"));
        }
        Ok(CircleSampling {
            radius,
            count,
            exclusion_angle,
        })
    }

    /// Default exclusion: `2 pi / 1024` for delay functions on circles with
    /// `r >= 0.999`, none otherwise.
    pub fn for_function(radius: f64, count: usize, has_delay: bool) -> Result<Self> {
        let excl = if has_delay && radius >= 0.999 {
            default_exclusion_angle()
        } else {
            0.0
        };
        Self::new(radius, count, excl)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn exclusion_angle(&self) -> f64 {
        self.exclusion_angle
    }

    /// Angles `2 pi j / count` in `[0, 2 pi)` that survive the exclusion arc.
    pub fn angles(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| 2.0 * PI * j as f64 / self.count as f64)
            .filter(|&t| {
                let wrapped = if t > PI { t - 2.0 * PI } else { t };
                // the relative slack keeps both arc endpoints despite rounding
                self.exclusion_angle == 0.0 || wrapped.abs() >= self.exclusion_angle * (1.0 - 1e-12)
            })
            .collect()
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(self.radius, theta)
    }
}

/// `count` points on the unit circle at half-step offsets, so `z = 1` is never hit.
pub fn boundary_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(1.0, PI * (2 * j + 1) as f64 / count as f64))
        .collect()
}

pub fn default_exclusion_angle() -> f64 {
    2.0 * PI / 1024.0
}

/// Evaluates `f` at every sampled point of the circle.
pub fn sample_circle<F: CircleFunction + ?Sized>(
    f: &F,
    sampling: &CircleSampling,
) -> Result<Vec<CirclePoint>> {
    sampling
        .angles()
        .into_iter()
        .map(|t| {
            let z = sampling.point(t);
            Ok(CirclePoint {
                z,
                s: cayley(z),
                value: f.value_at(z)?,
            })
        })
        .collect()
}
