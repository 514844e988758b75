//! Winding numbers of sampled closed curves, the annulus index of a function
//! on circles `|z| = r`, and the Poisson-smoothing Fredholm index of a
//! Toeplitz symbol.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{NuError, Result};
use crate::transfer::CircleFunction;

/// Maximum number of interval bisections when chasing a fast-turning curve.
pub const MAX_REFINEMENT_DEPTH: u32 = 12;
/// Invertibility floor for annulus scans.
pub const ANNULUS_FLOOR: f64 = 1e-9;
/// Invertibility floor for Poisson-smoothed symbols.
pub const POISSON_FLOOR: f64 = 1e-6;
/// Number of trailing radii that must agree for the Fredholm verdict.
pub const FREDHOLM_TAIL: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingResult {
    pub winding: i64,
    /// Total argument increment divided by `2 pi`.
    pub raw_turns: f64,
    pub min_modulus: f64,
    pub refinement_depth: u32,
}

impl WindingResult {
    fn from_total(total: f64, min_modulus: f64, refinement_depth: u32) -> Result<Self> {
        let raw_turns = total / (2.0 * PI);
        let winding = raw_turns.round();
        if (raw_turns - winding).abs() >= 0.01 {
            return Err(NuError::validation(format!(
                "argument sum {raw_turns} turns is not close to an integer"
            )));
        }
        Ok(WindingResult {
            winding: winding as i64,
            raw_turns,
            min_modulus,
            refinement_depth,
        })
    }
}

/// Winding number about 0 of the closed polygon through `samples`.
///
/// Fails with `NeedsRefinement` if any step turns by `pi/2` or more; the
/// caller is expected to resample more densely.
pub fn winding_number(samples: &[Complex64], floor: f64) -> Result<WindingResult> {
    if samples.is_empty() {
        return Err(NuError::validation("no samples"));
    }
    if floor.is_nan() || floor <= 0.0 {
        return Err(NuError::validation("floor must be positive"));
    }
    let n = samples.len();
    let mut min_modulus = f64::INFINITY;
    for (j, v) in samples.iter().enumerate() {
        let m = v.norm();
        if m.is_nan() || m < floor {
            return Err(NuError::CurveThroughZero {
                radius: f64::NAN,
                angle: 2.0 * PI * j as f64 / n as f64,
                modulus: m,
            });
        }
        min_modulus = min_modulus.min(m);
    }
    let mut total = 0.0;
    for j in 0..n {
        let step = (samples[(j + 1) % n] / samples[j]).arg();
        if step.abs() >= FRAC_PI_2 {
            return Err(NuError::NeedsRefinement { depth: 0 });
        }
        total += step;
    }
    WindingResult::from_total(total, min_modulus, 0)
}

struct CircleWalker<'a, F: ?Sized> {
    f: &'a F,
    radius: f64,
    floor: f64,
    min_modulus: f64,
    depth: u32,
}

impl<F: CircleFunction + ?Sized> CircleWalker<'_, F> {
    fn value(&mut self, theta: f64) -> Result<Complex64> {
        let v = self.f.value_at(Complex64::from_polar(self.radius, theta))?;
        let m = v.norm();
        if m.is_nan() || m < self.floor {
            return Err(NuError::CurveThroughZero {
                radius: self.radius,
                angle: theta,
                modulus: m,
            });
        }
        self.min_modulus = self.min_modulus.min(m);
        Ok(v)
    }

    fn increment(&mut self, ta: f64, va: Complex64, tb: f64, vb: Complex64, level: u32) -> Result<f64> {
        let step = (vb / va).arg();
        if step.abs() < FRAC_PI_2 {
            return Ok(step);
        }
        if level == MAX_REFINEMENT_DEPTH {
            return Err(NuError::NeedsRefinement { depth: level });
        }
        let tm = 0.5 * (ta + tb);
        let vm = self.value(tm)?;
        self.depth = self.depth.max(level + 1);
        Ok(self.increment(ta, va, tm, vm, level + 1)? + self.increment(tm, vm, tb, vb, level + 1)?)
    }
}

/// Winding number of `theta -> f(r e^{i theta})`.
///
/// Starts from `count` uniform samples and bisects only the steps whose
/// argument increment reaches `pi/2`, down to [`MAX_REFINEMENT_DEPTH`] levels.
pub fn circle_winding<F: CircleFunction + ?Sized>(
    f: &F,
    radius: f64,
    count: usize,
    floor: f64,
) -> Result<WindingResult> {
    if count < 3 {
        return Err(NuError::validation("need at least 3 samples per circle"));
    }
    let mut walker = CircleWalker {
        f,
        radius,
        floor,
        min_modulus: f64::INFINITY,
        depth: 0,
    };
    let thetas: Vec<f64> = (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect();
    let values = thetas
        .iter()
        .map(|&t| walker.value(t))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for j in 0..count {
        let (ta, va) = (thetas[j], values[j]);
        let (tb, vb) = if j + 1 == count {
            (2.0 * PI, values[0])
        } else {
            (thetas[j + 1], values[j + 1])
        };
        total += walker.increment(ta, va, tb, vb, 0)?;
    }
    WindingResult::from_total(total, walker.min_modulus, walker.depth)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusWinding {
    pub radius: f64,
    pub result: WindingResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusIndexResult {
    /// Common winding number, set only when every circle agrees.
    #[serde(rename = "W")]
    pub w: Option<i64>,
    pub per_radius: Vec<RadiusWinding>,
    pub consistent: bool,
    /// First radius where the function came within the floor of zero.
    pub not_invertible_at: Option<f64>,
}

/// Winding numbers of `f` on each circle `|z| = r`, `r` in `radii`.
pub fn annulus_index<F: CircleFunction + ?Sized>(
    f: &F,
    radii: &[f64],
    count: usize,
) -> Result<AnnulusIndexResult> {
    annulus_index_with_floor(f, radii, count, ANNULUS_FLOOR)
}

pub fn annulus_index_with_floor<F: CircleFunction + ?Sized>(
    f: &F,
    radii: &[f64],
    count: usize,
    floor: f64,
) -> Result<AnnulusIndexResult> {
    if radii.is_empty() {
        return Err(NuError::validation("no radii"));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NuError::validation("radii must be strictly increasing in (0, 1)"));
    }
    let outcomes: Vec<Result<WindingResult>> = radii
        .par_iter()
        .map(|&r| circle_winding(f, r, count, floor))
        .collect();
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut not_invertible_at = None;
    for (&radius, outcome) in radii.iter().zip(outcomes) {
        match outcome {
            Ok(result) => per_radius.push(RadiusWinding { radius, result }),
            Err(NuError::CurveThroughZero { .. }) => {
                not_invertible_at.get_or_insert(radius);
            }
            Err(e) => return Err(e),
        }
    }
    let first = per_radius.first().map(|p| p.result.winding);
    let consistent = not_invertible_at.is_none()
        && per_radius.iter().all(|p| Some(p.result.winding) == first);
    Ok(AnnulusIndexResult {
        w: if consistent { first } else { None },
        per_radius,
        consistent,
        not_invertible_at,
    })
}

/// Whether `w(fg) = w(f) + w(g)` on the circle `|z| = radius`.
pub fn index_product_check<F, G>(f: &F, g: &G, radius: f64, count: usize) -> Result<bool>
where
    F: CircleFunction + ?Sized,
    G: CircleFunction + ?Sized,
{
    let wf = circle_winding(f, radius, count, ANNULUS_FLOOR)?.winding;
    let wg = circle_winding(g, radius, count, ANNULUS_FLOOR)?.winding;
    let product = |z: Complex64| -> Result<Complex64> { Ok(f.value_at(z)? * g.value_at(z)?) };
    let wfg = circle_winding(&product, radius, count, ANNULUS_FLOOR)?.winding;
    Ok(wfg == wf + wg)
}

/// Whether the pointwise conjugate `z -> conj(f(z))` winds `-w(f)` times.
pub fn conjugate_index_check<F: CircleFunction + ?Sized>(f: &F, radius: f64, count: usize) -> Result<bool> {
    let wf = circle_winding(f, radius, count, ANNULUS_FLOOR)?.winding;
    let conj = |z: Complex64| -> Result<Complex64> { Ok(f.value_at(z)?.conj()) };
    let wc = circle_winding(&conj, radius, count, ANNULUS_FLOOR)?.winding;
    Ok(wc == -wf)
}

/// Poisson extension `sum_k r^|k| c_k e^{ik theta}` of uniform boundary
/// samples, evaluated at the same angles.
pub fn poisson_smooth(samples: &[Complex64], r: f64) -> Result<Vec<Complex64>> {
    let n = samples.len();
    if !n.is_power_of_two() {
        return Err(NuError::LengthNotPowerOfTwo { len: n });
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(NuError::validation("smoothing radius must lie in (0, 1]"));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if j <= n / 2 { j } else { n - j };
        *c *= r.powi(k as i32) / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "index")]
pub enum FredholmVerdict {
    Index(i64),
    NotFredholm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothedCircle {
    pub radius: f64,
    pub min_modulus: f64,
    pub winding: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FredholmReport {
    pub verdict: FredholmVerdict,
    pub per_radius: Vec<SmoothedCircle>,
    /// Trailing radii that had to agree (the "close enough to 1" heuristic).
    pub tail: usize,
}

/// Fredholm index of the Toeplitz operator with symbol given by uniform
/// samples on the unit circle, as minus the winding of its Poisson smoothings.
pub fn fredholm_index_toeplitz(samples: &[Complex64], r_schedule: &[f64]) -> Result<FredholmReport> {
    fredholm_index_toeplitz_with(samples, r_schedule, POISSON_FLOOR, FREDHOLM_TAIL)
}

pub fn fredholm_index_toeplitz_with(
    samples: &[Complex64],
    r_schedule: &[f64],
    eps: f64,
    tail: usize,
) -> Result<FredholmReport> {
    if !samples.len().is_power_of_two() {
        return Err(NuError::LengthNotPowerOfTwo { len: samples.len() });
    }
    if r_schedule.is_empty() || r_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NuError::validation("radius schedule must be nonempty and increasing"));
    }
    let mut per_radius = Vec::with_capacity(r_schedule.len());
    for &r in r_schedule {
        let smooth = poisson_smooth(samples, r)?;
        let min_modulus = smooth.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let winding = winding_number(&smooth, eps).ok().map(|w| w.winding);
        per_radius.push(SmoothedCircle {
            radius: r,
            min_modulus,
            winding,
        });
    }
    let tail = tail.clamp(1, per_radius.len());
    let last = &per_radius[per_radius.len() - tail..];
    let w0 = last[0].winding;
    let verdict = match w0 {
        Some(w) if last.iter().all(|c| c.winding == Some(w) && c.min_modulus >= eps) => {
            FredholmVerdict::Index(-w)
        }
        _ => FredholmVerdict::NotFredholm,
    };
    Ok(FredholmReport {
        verdict,
        per_radius,
        tail,
    })
}
