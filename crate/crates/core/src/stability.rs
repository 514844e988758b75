//! Closed loops, stabilization and the stability margin (SISO).
//!
//! With positive feedback `H(P, C) = [P; I] (I - C P)^{-1} [-C  I]` and
//! `P = N/D`, `C = N_C/D_C`:
//!
//!   `1 - C P = (D_C D - N_C N) / (D_C D) = Delta / (D_C D)`,
//!   `H = G [-N_C  D_C] / Delta`   with `G = [N; D]`.
//!
//! So `C` stabilizes `P` exactly when `Delta` is invertible in H-infinity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NuError, Result};
use crate::factorization::{normalize, CoprimeFactors};
use crate::index::circle_winding;
use crate::numetric::{nu_infinity, sup_norm, AnnulusScan, MatrixFunction};
use crate::transfer::TransferFunction;

/// Slack allowed in the robustness inequality.
pub const ROBUST_SLACK: f64 = 1e-6;
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ClosedLoop {
    plant: CoprimeFactors,
    controller: CoprimeFactors,
}

/// Normalized coprime factors of either kind of input.
pub trait ToFactors {
    fn to_factors(&self) -> Result<CoprimeFactors>;
}

impl ToFactors for TransferFunction {
    fn to_factors(&self) -> Result<CoprimeFactors> {
        normalize(self)
    }
}

impl ToFactors for CoprimeFactors {
    fn to_factors(&self) -> Result<CoprimeFactors> {
        Ok(self.clone())
    }
}

/// Builds the closed loop of `P` and `C`.
pub fn closed_loop<A, B>(plant: &A, controller: &B) -> Result<ClosedLoop>
where
    A: ToFactors + ?Sized,
    B: ToFactors + ?Sized,
{
    let cl = ClosedLoop {
        plant: plant.to_factors()?,
        controller: controller.to_factors()?,
    };
    // Delta is analytic, so vanishing on a circle means it vanishes identically
    let degenerate = (0..16).try_fold(true, |acc, j| {
        let z = Complex64::from_polar(0.5, std::f64::consts::TAU * j as f64 / 16.0);
        Ok::<_, NuError>(acc && cl.delta(z)?.norm() < DEGENERATE_TOL)
    })?;
    if degenerate {
        return Err(NuError::DegeneratePair);
    }
    Ok(cl)
}

impl ClosedLoop {
    pub fn plant(&self) -> &CoprimeFactors {
        &self.plant
    }

    pub fn controller(&self) -> &CoprimeFactors {
        &self.controller
    }

    /// `Delta = D_C D - N_C N`.
    pub fn delta(&self, z: Complex64) -> Result<Complex64> {
        let (p, c) = (&self.plant, &self.controller);
        Ok(c.d.evaluate(z)? * p.d.evaluate(z)? - c.n.evaluate(z)? * p.n.evaluate(z)?)
    }

    /// Closed-loop polynomial `d_C d - n_C n` in `s` for delay-free loops.
    ///
    /// Its roots are the closed-loop poles; the factor denominators only
    /// contribute stable roots.
    pub fn characteristic_polynomial(&self) -> Result<crate::poly::Poly> {
        let (p, c) = (&self.plant, &self.controller);
        if p.has_delay() || c.has_delay() {
            return Err(NuError::DelayNotAllowed);
        }
        // N = n/q and D = d/q share q, so clearing it leaves n and d
        let pd = p.d.numerator().mul(p.n.denominator());
        let pn = p.n.numerator().mul(p.d.denominator());
        let cd = c.d.numerator().mul(c.n.denominator());
        let cn = c.n.numerator().mul(c.d.denominator());
        Ok(cd.mul(&pd).sub(&cn.mul(&pn)))
    }
}

impl MatrixFunction for ClosedLoop {
    fn shape(&self) -> (usize, usize) {
        (2, 2)
    }

    fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        let (p, c) = (&self.plant, &self.controller);
        let n = p.n.evaluate(z)?;
        let d = p.d.evaluate(z)?;
        let nc = c.n.evaluate(z)?;
        let dc = c.d.evaluate(z)?;
        let delta = dc * d - nc * n;
        if delta.norm() == 0.0 {
            return Err(NuError::PoleHit { z, modulus: 0.0 });
        }
        Ok(DMatrix::from_row_slice(
            2,
            2,
            &[-n * nc / delta, n * dc / delta, -d * nc / delta, d * dc / delta],
        ))
    }

    fn has_delay(&self) -> bool {
        self.plant.has_delay() || self.controller.has_delay()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCircle {
    pub radius: f64,
    pub min_modulus: f64,
    pub winding: Option<i64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stabilized: bool,
    pub marginal: bool,
    pub per_radius: Vec<DeltaCircle>,
}

/// Annulus Nyquist test: on each tail circle `|Delta| >= eps_inv` and the
/// winding number of `Delta` is 0.
pub fn is_stabilized(cl: &ClosedLoop, scan: &AnnulusScan) -> Result<StabilityVerdict> {
    let radii = scan.radii();
    let tail = &radii[radii.len() - scan.tail()..];
    let delta = |z: Complex64| cl.delta(z);
    let mut per_radius = Vec::with_capacity(tail.len());
    for &radius in tail {
        let entry = match circle_winding(&delta, radius, scan.samples0(), scan.eps_inv()) {
            Ok(w) => DeltaCircle {
                radius,
                min_modulus: w.min_modulus,
                winding: Some(w.winding),
                note: None,
            },
            Err(NuError::CurveThroughZero { modulus, .. }) => DeltaCircle {
                radius,
                min_modulus: modulus,
                winding: None,
                note: Some("Delta below the invertibility floor".into()),
            },
            Err(NuError::NeedsRefinement { depth }) => DeltaCircle {
                radius,
                min_modulus: f64::NAN,
                winding: None,
                note: Some(format!("winding unresolved after {depth} refinements")),
            },
            Err(e) => return Err(e),
        };
        per_radius.push(entry);
    }
    let stabilized = per_radius.iter().all(|c| c.winding == Some(0));
    let marginal = per_radius
        .iter()
        .any(|c| c.min_modulus < 10.0 * scan.eps_inv());
    Ok(StabilityVerdict {
        stabilized,
        marginal,
        per_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginResult {
    pub mu: f64,
    #[serde(rename = "H_norm")]
    pub h_norm: Option<f64>,
    /// Plants within this nu-distance of `P` are also stabilized by `C`.
    pub robust_bound: Option<f64>,
    pub stability: StabilityVerdict,
}

/// `mu = 1 / ||H(P, C)||_inf` if `C` stabilizes `P`, else 0.
pub fn margin(cl: &ClosedLoop, scan: &AnnulusScan) -> Result<MarginResult> {
    let stability = is_stabilized(cl, scan)?;
    if !stability.stabilized {
        return Ok(MarginResult {
            mu: 0.0,
            h_norm: None,
            robust_bound: None,
            stability,
        });
    }
    let h = sup_norm(cl, scan)?.value;
    // normalized factors force ||H|| >= 1
    let mu = (1.0 / h).min(1.0);
    Ok(MarginResult {
        mu,
        h_norm: Some(h),
        robust_bound: Some(mu),
        stability,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub mu_p: f64,
    pub mu_p0: f64,
    pub distance: f64,
    /// `mu_p >= mu_p0 - distance - ROBUST_SLACK`.
    pub holds: bool,
    /// `mu_p - (mu_p0 - distance)`.
    pub slack: f64,
}

/// Checks `mu(P, C) >= mu(P0, C) - d_nu(P0, P)`.
pub fn robustness_check(
    p0: &TransferFunction,
    p: &TransferFunction,
    c: &TransferFunction,
    scan: &AnnulusScan,
) -> Result<RobustnessReport> {
    let f0 = normalize(p0)?;
    let f = normalize(p)?;
    let fc = normalize(c)?;
    let mu_p0 = margin(&closed_loop(&f0, &fc)?, scan)?.mu;
    let mu_p = match closed_loop(&f, &fc) {
        Ok(cl) => margin(&cl, scan)?.mu,
        Err(NuError::DegeneratePair) => 0.0,
        Err(e) => return Err(e),
    };
    let distance = nu_infinity(&f0, &f, scan)?.value;
    let slack = mu_p - (mu_p0 - distance);
    Ok(RobustnessReport {
        mu_p,
        mu_p0,
        distance,
        holds: slack >= -ROBUST_SLACK,
        slack,
    })
}
