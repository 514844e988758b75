//! The extended nu-metric on stabilizable plants over H-infinity.
//!
//! For graph symbols `G1`, `G2` of two plants, condition (C) asks that
//! `det(G1* G2)` be bounded away from zero on an annulus `rho < |z| < 1`
//! with winding number 0 there. When it holds the distance is
//! `sup |G~2 G1|` (largest singular value), otherwise it is 1. The limit
//! metric takes `rho -> 1`; here that limit is certified on a dyadic radius
//! schedule `r_k = 1 - 2^-k` by requiring the last `tail` circles to agree.
//!
//! `G1*` is the pointwise conjugate transpose, so the determinant is not
//! holomorphic and its winding is computed circle by circle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NuError, Result};
use crate::factorization::{graph_symbols, normalize, CoprimeFactors, GraphSymbol, TfMatrix};
use crate::index::circle_winding;
use crate::transfer::{default_exclusion_angle, inverse_cayley, CircleSampling, TransferFunction};

/// Relative agreement required between consecutive tail values.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Resonant frequencies probed per delay difference.
pub const RESONANT_PROBES: usize = 50;
/// Golden-section refinement stops once the bracket is this narrow (radians).
const GOLDEN_BRACKET: f64 = 1e-11;
/// Local maxima of each sampled circle that get refined.
const REFINED_PEAKS: usize = 3;

/// Radius schedule and tolerances for annulus scans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusScan {
    radii: Vec<f64>,
    samples0: usize,
    eps_inv: f64,
    tail: usize,
}

impl Default for AnnulusScan {
    fn default() -> Self {
        AnnulusScan::dyadic(3, 14, 1024, 1e-9, 3).expect("default scan is valid")
    }
}

impl AnnulusScan {
    /// Radii `1 - 2^-k` for `k = k_min..=k_max`.
    pub fn dyadic(k_min: u32, k_max: u32, samples0: usize, eps_inv: f64, tail: usize) -> Result<Self> {
        if k_min == 0 || k_min > k_max || k_max > 52 {
            return Err(NuError::validation(format!(
                "need 1 <= k_min <= k_max <= 52, got {k_min}..{k_max}"
            )));
        }
        let radii = (k_min..=k_max).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect();
        Self::with_radii(radii, samples0, eps_inv, tail)
    }

    pub fn with_radii(radii: Vec<f64>, samples0: usize, eps_inv: f64, tail: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(NuError::validation("scan needs at least one radius"));
        }
        if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NuError::validation("scan radii must be strictly increasing in (0, 1)"));
        }
        if !samples0.is_power_of_two() || samples0 < 8 {
            return Err(NuError::LengthNotPowerOfTwo { len: samples0 });
        }
        if !(eps_inv > 0.0 && eps_inv.is_finite()) {
            return Err(NuError::validation("eps_inv must be positive"));
        }
        if tail == 0 || tail > radii.len() {
            return Err(NuError::validation(format!(
                "tail {tail} must lie in 1..={}",
                radii.len()
            )));
        }
        Ok(AnnulusScan {
            radii,
            samples0,
            eps_inv,
            tail,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn samples0(&self) -> usize {
        self.samples0
    }

    pub fn eps_inv(&self) -> f64 {
        self.eps_inv
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// The scan restricted to radii strictly above `rho`; the tail shrinks if needed.
    pub fn above(&self, rho: f64) -> Result<Self> {
        let radii: Vec<f64> = self.radii.iter().copied().filter(|&r| r > rho).collect();
        if radii.is_empty() {
            return Err(NuError::validation(format!("no scan radius above rho = {rho}")));
        }
        let tail = self.tail.min(radii.len());
        Self::with_radii(radii, self.samples0, self.eps_inv, tail)
    }
}

/// Inputs accepted wherever a plant is expected.
pub trait ToGraphSymbol {
    fn to_graph_symbol(&self) -> Result<GraphSymbol>;
}

impl ToGraphSymbol for TransferFunction {
    fn to_graph_symbol(&self) -> Result<GraphSymbol> {
        Ok(graph_symbols(&normalize(self)?, None))
    }
}

impl ToGraphSymbol for CoprimeFactors {
    fn to_graph_symbol(&self) -> Result<GraphSymbol> {
        Ok(graph_symbols(self, None))
    }
}

impl ToGraphSymbol for GraphSymbol {
    fn to_graph_symbol(&self) -> Result<GraphSymbol> {
        Ok(self.clone())
    }
}

/// A plant given either as a transfer function or as pre-made factor matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantInput {
    Plant(TransferFunction),
    Symbol(GraphSymbol),
}

impl ToGraphSymbol for PlantInput {
    fn to_graph_symbol(&self) -> Result<GraphSymbol> {
        match self {
            PlantInput::Plant(p) => p.to_graph_symbol(),
            PlantInput::Symbol(s) => Ok(s.clone()),
        }
    }
}

/// A matrix-valued function on the closed disk.
pub trait MatrixFunction: Sync {
    fn shape(&self) -> (usize, usize);

    fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>>;

    /// Whether boundary values fail to exist at `z = 1` (dead-time entries).
    fn has_delay(&self) -> bool {
        false
    }

    /// Extra boundary points where the supremum is known to be approached.
    fn probe_points(&self) -> Vec<Complex64> {
        Vec::new()
    }
}

impl MatrixFunction for TfMatrix {
    fn shape(&self) -> (usize, usize) {
        TfMatrix::shape(self)
    }

    fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        TfMatrix::eval(self, z)
    }

    fn has_delay(&self) -> bool {
        TfMatrix::has_delay(self)
    }
}

/// Matrix function backed by a closure.
pub struct FnMatrix<F> {
    rows: usize,
    cols: usize,
    f: F,
}

impl<F> FnMatrix<F>
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>> + Sync,
{
    pub fn new(rows: usize, cols: usize, f: F) -> Self {
        FnMatrix { rows, cols, f }
    }
}

impl<F> MatrixFunction for FnMatrix<F>
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>> + Sync,
{
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        (self.f)(z)
    }
}

/// `G~2 G1` for two graph symbols, with resonant probes for delay mismatches.
pub struct CrossSymbol<'a> {
    g1: &'a GraphSymbol,
    g2: &'a GraphSymbol,
}

impl<'a> CrossSymbol<'a> {
    pub fn new(g1: &'a GraphSymbol, g2: &'a GraphSymbol) -> Result<Self> {
        check_shapes(g1, g2)?;
        Ok(CrossSymbol { g1, g2 })
    }
}

impl MatrixFunction for CrossSymbol<'_> {
    fn shape(&self) -> (usize, usize) {
        (self.g2.outputs(), self.g1.inputs())
    }

    fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        Ok(self.g2.gtilde.eval(z)? * self.g1.g.eval(z)?)
    }

    fn has_delay(&self) -> bool {
        self.g1.has_delay() || self.g2.has_delay()
    }

    fn probe_points(&self) -> Vec<Complex64> {
        resonant_points(&self.g1.delays(), &self.g2.delays())
    }
}

/// Boundary points `z = (i w - 1) / (i w + 1)` (and conjugates) at the
/// frequencies `w_n = (2n + 1) pi / |T2 - T1|` where `exp(-i w (T2 - T1)) = -1`.
pub fn resonant_points(delays1: &[f64], delays2: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &t1 in delays1 {
        for &t2 in delays2 {
            let dt = (t2 - t1).abs();
            if dt <= 1e-12 * t1.max(t2).max(1.0) {
                continue;
            }
            for n in 0..RESONANT_PROBES {
                let w = (2 * n + 1) as f64 * PI / dt;
                let z = inverse_cayley(Complex64::new(0.0, w));
                out.push(z);
                out.push(z.conj());
            }
        }
    }
    out
}

fn check_shapes(g1: &GraphSymbol, g2: &GraphSymbol) -> Result<()> {
    if g1.g.shape() != g2.g.shape() || g1.gtilde.shape() != g2.gtilde.shape() {
        return Err(NuError::ShapeMismatch(format!(
            "plants have graph symbols of shapes {:?} and {:?}",
            g1.g.shape(),
            g2.g.shape()
        )));
    }
    Ok(())
}

/// Largest singular value.
pub fn sigma_max(m: &DMatrix<Complex64>) -> f64 {
    let (r, c) = m.shape();
    if r == 1 || c == 1 {
        return m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    }
    if r == 2 || c == 2 {
        // eigenvalues of the 2x2 Gram matrix
        let gram = if c == 2 { m.adjoint() * m } else { m * m.adjoint() };
        let a = gram[(0, 0)].re;
        let d = gram[(1, 1)].re;
        let b = gram[(0, 1)].norm_sqr();
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b).sqrt();
        return (half_tr + disc).max(0.0).sqrt();
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0, |acc, v| acc.max(*v))
}

/// `det(G1(z)* G2(z))`.
pub fn det_symbol(g1: &GraphSymbol, g2: &GraphSymbol, z: Complex64) -> Result<Complex64> {
    let a = g1.g.eval(z)?;
    let b = g2.g.eval(z)?;
    let prod = a.adjoint() * b;
    if prod.nrows() == 1 {
        Ok(prod[(0, 0)])
    } else {
        Ok(prod.lu().determinant())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleSup {
    pub radius: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupNormReport {
    pub value: f64,
    pub per_radius: Vec<CircleSup>,
    /// Supremum over the unit circle (minus the exclusion arc for delay symbols).
    pub boundary: f64,
    /// Largest value at the resonant probe points, if any were used.
    pub probe: Option<f64>,
    /// Largest value at the two edges of the exclusion arc, if one was used.
    pub arc_edge: Option<f64>,
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > GOLDEN_BRACKET {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Sampled-and-refined supremum of `sigma_max(M)` over one circle.
pub fn circle_sup<M: MatrixFunction + ?Sized>(m: &M, sampling: &CircleSampling) -> Result<f64> {
    let angles = sampling.angles();
    let excl = sampling.exclusion_angle();
    let sigma = |theta: f64| -> Result<f64> {
        let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
        if excl > 0.0 && wrapped.abs() < excl {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(sigma_max(&m.eval(sampling.point(theta))?))
    };
    let values = angles.iter().map(|&t| sigma(t)).collect::<Result<Vec<f64>>>()?;
    let n = values.len();
    let mut best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if n < 3 {
        return Ok(best);
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| values[j] >= values[(j + n - 1) % n] && values[j] >= values[(j + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let h = 2.0 * PI / sampling.count() as f64;
    for &j in peaks.iter().take(REFINED_PEAKS) {
        let (_, v) = golden_max(&sigma, angles[j] - h, angles[j] + h)?;
        best = best.max(v);
    }
    Ok(best)
}

/// `sup sigma_max(M(z))` over the scan circles and the unit circle.
pub fn sup_norm<M: MatrixFunction + ?Sized>(m: &M, scan: &AnnulusScan) -> Result<SupNormReport> {
    let delay = m.has_delay();
    let per_radius = scan
        .radii
        .par_iter()
        .map(|&r| {
            let sampling = CircleSampling::for_function(r, scan.samples0, delay)?;
            Ok(CircleSup {
                radius: r,
                sup: circle_sup(m, &sampling)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let boundary_sampling = CircleSampling::for_function(1.0, scan.samples0, delay)?;
    let boundary = circle_sup(m, &boundary_sampling)?;

    let probes = m.probe_points();
    let probe = if probes.is_empty() {
        None
    } else {
        let mut best = f64::NEG_INFINITY;
        for z in probes {
            best = best.max(sigma_max(&m.eval(z)?));
        }
        Some(best)
    };
    let arc_edge = if boundary_sampling.exclusion_angle() > 0.0 {
        let e = boundary_sampling.exclusion_angle();
        let a = sigma_max(&m.eval(Complex64::from_polar(1.0, e))?);
        let b = sigma_max(&m.eval(Complex64::from_polar(1.0, -e))?);
        Some(a.max(b))
    } else {
        None
    };
    let value = per_radius
        .iter()
        .map(|c| c.sup)
        .chain(std::iter::once(boundary))
        .chain(probe)
        .chain(arc_edge)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SupNormReport {
        value,
        per_radius,
        boundary,
        probe,
        arc_edge,
    })
}

/// Condition-(C) diagnostics for one circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub radius: f64,
    /// Smallest `|det(G1* G2)|` seen on the circle.
    pub min_modulus: f64,
    /// Winding number, when the curve could be resolved.
    pub winding: Option<i64>,
    pub refinement_depth: Option<u32>,
    pub passed: bool,
    /// `min_modulus` within a factor 10 of the floor.
    pub marginal: bool,
    /// `sup sigma_max(G~2 G1)` on this circle, when computed.
    pub partial_sup: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCVerdict {
    pub holds: bool,
    /// Smallest scanned radius from which every circle passes.
    pub rho_star: Option<f64>,
    pub marginal: bool,
    pub per_radius: Vec<RadiusCheck>,
}

impl ConditionCVerdict {
    fn from_checks(per_radius: Vec<RadiusCheck>, tail: usize) -> Self {
        let k = per_radius.len();
        let tail = tail.min(k);
        let holds = per_radius[k - tail..].iter().all(|c| c.passed);
        let start = per_radius
            .iter()
            .rposition(|c| !c.passed)
            .map_or(0, |i| i + 1);
        let rho_star = per_radius.get(start).map(|c| c.radius);
        let marginal = per_radius[k - tail..].iter().any(|c| c.marginal);
        ConditionCVerdict {
            holds,
            rho_star,
            marginal,
            per_radius,
        }
    }
}

fn radius_checks(g1: &GraphSymbol, g2: &GraphSymbol, scan: &AnnulusScan) -> Result<Vec<RadiusCheck>> {
    let det = |z: Complex64| det_symbol(g1, g2, z);
    let eps = scan.eps_inv;
    scan.radii
        .par_iter()
        .map(|&radius| {
            let base = RadiusCheck {
                radius,
                min_modulus: 0.0,
                winding: None,
                refinement_depth: None,
                passed: false,
                marginal: false,
                partial_sup: None,
                note: None,
            };
            match circle_winding(&det, radius, scan.samples0, eps) {
                Ok(w) => Ok(RadiusCheck {
                    min_modulus: w.min_modulus,
                    winding: Some(w.winding),
                    refinement_depth: Some(w.refinement_depth),
                    passed: w.winding == 0,
                    marginal: w.min_modulus < 10.0 * eps,
                    note: (w.winding != 0).then(|| format!("winding {}", w.winding)),
                    ..base
                }),
                Err(NuError::CurveThroughZero { modulus, angle, .. }) => Ok(RadiusCheck {
                    min_modulus: modulus,
                    note: Some(format!("det below floor at angle {angle:.6}")),
                    ..base
                }),
                Err(NuError::NeedsRefinement { depth }) => Ok(RadiusCheck {
                    note: Some(format!("winding unresolved after {depth} refinements")),
                    ..base
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Condition (C) on the tail of the scan: the last `tail` circles must each
/// keep `|det(G1* G2)| >= eps_inv` with winding number 0.
pub fn condition_c(g1: &GraphSymbol, g2: &GraphSymbol, scan: &AnnulusScan) -> Result<ConditionCVerdict> {
    check_shapes(g1, g2)?;
    Ok(ConditionCVerdict::from_checks(radius_checks(g1, g2, scan)?, scan.tail))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuMetricResult {
    pub value: f64,
    pub condition: ConditionCVerdict,
    /// `||G~2 G1||_inf`.
    pub sup_norm: Option<f64>,
    pub converged: bool,
    pub radii_used: Vec<f64>,
    /// Supremum details (boundary, probes, exclusion-arc edges).
    pub sup_detail: Option<SupNormReport>,
    pub warning: Option<String>,
}

/// Values this close to 1 are reported as exactly 1: a supremum of 1 is
/// typically approached along a sequence but not attained.
pub const UNIT_SNAP: f64 = 1e-9;

fn clamp_unit(v: f64) -> f64 {
    if v >= 1.0 - UNIT_SNAP {
        1.0
    } else {
        v.max(0.0)
    }
}

/// `d_nu^rho`: the metric on the annulus `rho < |z| < 1`, where condition
/// (C) must hold on every scanned circle above `rho`.
pub fn nu_rho<A, B>(p1: &A, p2: &B, rho: f64, scan: &AnnulusScan) -> Result<NuMetricResult>
where
    A: ToGraphSymbol + ?Sized,
    B: ToGraphSymbol + ?Sized,
{
    if !(rho > 0.0 && rho < 1.0) {
        return Err(NuError::validation("rho must lie in (0, 1)"));
    }
    let g1 = p1.to_graph_symbol()?;
    let g2 = p2.to_graph_symbol()?;
    let scan = scan.above(rho)?;
    let cross = CrossSymbol::new(&g1, &g2)?;
    let mut checks = radius_checks(&g1, &g2, &scan)?;
    let sup = sup_norm(&cross, &scan)?;
    for (c, s) in checks.iter_mut().zip(&sup.per_radius) {
        c.partial_sup = Some(s.sup);
    }
    let mut condition = ConditionCVerdict::from_checks(checks, scan.tail);
    condition.holds = condition.per_radius.iter().all(|c| c.passed);
    let value = if condition.holds { clamp_unit(sup.value) } else { 1.0 };
    Ok(NuMetricResult {
        value,
        condition,
        sup_norm: Some(sup.value),
        converged: true,
        radii_used: scan.radii.clone(),
        sup_detail: Some(sup),
        warning: None,
    })
}

/// `d_nu^inf = lim_{rho -> 1} d_nu^rho`, certified on the scan tail.
///
/// `d_nu^rho` is evaluated for `rho` just below each scan radius; the
/// result is converged when the last `tail` of these agree in verdict and
/// (to [`CONVERGENCE_TOL`]) in value.
pub fn nu_infinity<A, B>(p1: &A, p2: &B, scan: &AnnulusScan) -> Result<NuMetricResult>
where
    A: ToGraphSymbol + ?Sized,
    B: ToGraphSymbol + ?Sized,
{
    let g1 = p1.to_graph_symbol()?;
    let g2 = p2.to_graph_symbol()?;
    nu_infinity_symbols(&g1, &g2, scan)
}

pub fn nu_infinity_symbols(g1: &GraphSymbol, g2: &GraphSymbol, scan: &AnnulusScan) -> Result<NuMetricResult> {
    let cross = CrossSymbol::new(g1, g2)?;
    let mut checks = radius_checks(g1, g2, scan)?;
    let sup = sup_norm(&cross, scan)?;
    for (c, s) in checks.iter_mut().zip(&sup.per_radius) {
        c.partial_sup = Some(s.sup);
    }

    // d_nu^rho for rho just below r_j, j = 0..K
    let k = checks.len();
    let outer = [Some(sup.boundary), sup.probe, sup.arc_edge]
        .into_iter()
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sequence = Vec::with_capacity(k);
    let mut all_pass_from = true;
    let mut running_sup = outer;
    for j in (0..k).rev() {
        all_pass_from &= checks[j].passed;
        running_sup = running_sup.max(sup.per_radius[j].sup);
        let v = if all_pass_from { clamp_unit(running_sup) } else { 1.0 };
        sequence.push((all_pass_from, v));
    }
    sequence.reverse();

    let tail = scan.tail.min(k);
    let window = &sequence[k - tail..];
    let (v0, x0) = window[0];
    let converged = window
        .iter()
        .all(|&(v, x)| v == v0 && (x - x0).abs() <= CONVERGENCE_TOL * x0.abs().max(f64::MIN_POSITIVE));

    let condition = ConditionCVerdict::from_checks(checks, scan.tail);
    let value = if condition.holds { clamp_unit(sup.value) } else { 1.0 };
    let warning = if !converged {
        Some(format!(
            "tail of {tail} radii did not stabilize by r = {}",
            scan.radii[k - 1]
        ))
    } else if condition.marginal {
        Some("min |det| within a factor 10 of eps_inv on the tail".to_string())
    } else {
        None
    };
    Ok(NuMetricResult {
        value,
        condition,
        sup_norm: Some(sup.value),
        converged,
        radii_used: scan.radii.clone(),
        sup_detail: Some(sup),
        warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalResult {
    pub value: f64,
    /// Winding of `det(G1* G2)` around the unit circle, if it is invertible there.
    pub det_winding: Option<i64>,
    pub det_min_modulus: f64,
    pub sup_norm: f64,
}

/// The classical disk-algebra nu-metric: everything on the unit circle.
pub fn nu_classical(p1: &TransferFunction, p2: &TransferFunction, samples: usize) -> Result<ClassicalResult> {
    nu_classical_with_floor(p1, p2, samples, crate::index::ANNULUS_FLOOR)
}

pub fn nu_classical_with_floor(
    p1: &TransferFunction,
    p2: &TransferFunction,
    samples: usize,
    eps_inv: f64,
) -> Result<ClassicalResult> {
    if p1.has_delay() || p2.has_delay() {
        return Err(NuError::DelayNotAllowed);
    }
    let g1 = p1.to_graph_symbol()?;
    let g2 = p2.to_graph_symbol()?;
    let cross = CrossSymbol::new(&g1, &g2)?;
    let sampling = CircleSampling::new(1.0, samples, 0.0)?;
    let sup = circle_sup(&cross, &sampling)?;
    let det = |z: Complex64| det_symbol(&g1, &g2, z);
    let (det_winding, det_min_modulus) = match circle_winding(&det, 1.0, samples, eps_inv) {
        Ok(w) => (Some(w.winding), w.min_modulus),
        Err(NuError::CurveThroughZero { modulus, .. }) => (None, modulus),
        Err(NuError::NeedsRefinement { .. }) => (None, f64::NAN),
        Err(e) => return Err(e),
    };
    let value = if det_winding == Some(0) { clamp_unit(sup) } else { 1.0 };
    Ok(ClassicalResult {
        value,
        det_winding,
        det_min_modulus,
        sup_norm: sup,
    })
}

/// Default exclusion arc, re-exported for reports.
pub fn exclusion_angle() -> f64 {
    default_exclusion_angle()
}
