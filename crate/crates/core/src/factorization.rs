//! Normalized coprime factorization `P = N / D` of SISO plants and the
//! graph-symbol blocks built from it.
//!
//! For `P = n / d * exp(-sT)` the factors are `N = n / q * exp(-sT)` and
//! `D = d / q`, where `q` is the Hurwitz spectral factor of
//! `p(s) = n(s) n(-s) + d(s) d(-s)`. On the imaginary axis
//! `|q|^2 = |n|^2 + |d|^2` and `|exp(-i w T)| = 1`, so `|N|^2 + |D|^2 = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NuError, Result};
use crate::poly::Poly;
use crate::transfer::{boundary_samples, cayley, Domain, TransferFunction};

/// Roots of `p` closer than this to the imaginary axis are rejected.
pub const AXIS_TOL: f64 = 1e-8;
/// Coprimeness floor for the corona gap.
pub const CORONA_FLOOR: f64 = 1e-6;
/// Boundary samples used for the normalization residual.
pub const RESIDUAL_SAMPLES: usize = 1024;
const CORONA_GRID: usize = 64;

/// Hurwitz polynomial `q` with `q(iw) conj(q(iw)) = |n(iw)|^2 + |d(iw)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFactor {
    q: Poly,
    scale: f64,
}

impl SpectralFactor {
    pub fn q(&self) -> &Poly {
        &self.q
    }

    /// Leading coefficient of `q` (always positive).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Largest relative mismatch of the defining identity over `freqs`.
    pub fn identity_residual(&self, n: &Poly, d: &Poly, freqs: &[f64]) -> f64 {
        freqs
            .iter()
            .map(|&w| {
                let s = Complex64::new(0.0, w);
                let lhs = self.q.eval(s).norm_sqr();
                let rhs = n.eval(s).norm_sqr() + d.eval(s).norm_sqr();
                (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Spectral factor of `n(s) n(-s) + d(s) d(-s)` by root pairing.
///
/// The para-Hermitian polynomial is even, so it is factored in `u = s^2`;
/// each root `u` gives the pair `+/- sqrt(u)` and the left member is kept.
pub fn spectral_factor(n: &Poly, d: &Poly) -> Result<SpectralFactor> {
    if n.is_zero() && d.is_zero() {
        return Err(NuError::validation("numerator and denominator are both zero"));
    }
    let m = n.degree().max(d.degree());
    let coeff = |p: &Poly, i: usize| p.coeffs().get(i).copied().unwrap_or(0.0);
    let even: Vec<f64> = (0..=m)
        .map(|k| {
            (0..=2 * k)
                .map(|i| {
                    let j = 2 * k - i;
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (coeff(n, i) * coeff(n, j) + coeff(d, i) * coeff(d, j))
                })
                .sum()
        })
        .collect();
    let pu = Poly::new(even);
    let lead = pu.leading().abs().sqrt();

    let mut roots = Vec::with_capacity(m);
    for u in pu.roots() {
        let s = u.sqrt();
        if s.re <= AXIS_TOL * s.norm().max(1.0) {
            return Err(NuError::AxisRoot { root: s });
        }
        roots.push(-s);
    }
    let q = Poly::from_roots(&roots, lead);
    Ok(SpectralFactor { q, scale: lead })
}

/// Normalized coprime factors of a SISO plant.
#[derive(Debug, Clone, PartialEq)]
pub struct CoprimeFactors {
    /// Numerator factor (carries the plant delay).
    pub n: TransferFunction,
    /// Denominator factor.
    pub d: TransferFunction,
    /// `max | |N|^2 + |D|^2 - 1 |` over boundary samples.
    pub normalization_residual: f64,
    /// `min (|N| + |D|)` over a polar grid plus boundary samples.
    pub corona_gap: f64,
}

impl CoprimeFactors {
    /// Wraps user-supplied factors after checking normalization and coprimeness.
    pub fn verified(n: TransferFunction, d: TransferFunction) -> Result<Self> {
        let normalization_residual = normalization_residual(&n, &d, RESIDUAL_SAMPLES)?;
        let corona_gap = corona_gap(&n, &d)?;
        if corona_gap < CORONA_FLOOR {
            return Err(NuError::NotCoprime { gap: corona_gap });
        }
        Ok(CoprimeFactors {
            n,
            d,
            normalization_residual,
            corona_gap,
        })
    }

    pub fn has_delay(&self) -> bool {
        self.n.has_delay() || self.d.has_delay()
    }

    /// `N(z) / D(z)`.
    pub fn plant_value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.n.evaluate(z)? / self.d.evaluate(z)?)
    }
}

fn normalization_residual(n: &TransferFunction, d: &TransferFunction, count: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in boundary_samples(count) {
        let v = boundary_value(n, z)?.norm_sqr() + boundary_value(d, z)?.norm_sqr();
        worst = worst.max((v - 1.0).abs());
    }
    Ok(worst)
}

/// Value at a unit-circle point; half-plane functions are evaluated at
/// `s = i w` exactly so `|exp(-i w T)| = 1` is not spoiled by rounding in `Re s`.
fn boundary_value(f: &TransferFunction, z: Complex64) -> Result<Complex64> {
    match (f.domain(), cayley(z)) {
        (Domain::HalfPlane, Some(s)) => f.evaluate_s(Complex64::new(0.0, s.im)),
        _ => f.evaluate(z),
    }
}

fn corona_gap(n: &TransferFunction, d: &TransferFunction) -> Result<f64> {
    let mut gap = f64::INFINITY;
    for i in 0..CORONA_GRID {
        let r = i as f64 / CORONA_GRID as f64;
        for j in 0..CORONA_GRID {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / CORONA_GRID as f64);
            gap = gap.min(n.evaluate(z)?.norm() + d.evaluate(z)?.norm());
        }
    }
    for z in boundary_samples(RESIDUAL_SAMPLES) {
        gap = gap.min(n.evaluate(z)?.norm() + d.evaluate(z)?.norm());
    }
    Ok(gap)
}

/// Normalized coprime factorization `P = N / D`.
pub fn normalize(plant: &TransferFunction) -> Result<CoprimeFactors> {
    let plant = plant.to_half_plane()?;
    let (num, den) = (plant.numerator(), plant.denominator());
    let sf = spectral_factor(num, den)?;
    let (n, _) = TransferFunction::reduced(num.clone(), sf.q.clone(), plant.delay(), Domain::HalfPlane)?;
    let (d, _) = TransferFunction::reduced(den.clone(), sf.q.clone(), 0.0, Domain::HalfPlane)?;
    CoprimeFactors::verified(n, d)
}

/// Row-major matrix of scalar transfer functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TfMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TransferFunction>,
}

impl TfMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TransferFunction>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(NuError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(TfMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TransferFunction>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(NuError::ShapeMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &TransferFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[TransferFunction] {
        &self.entries
    }

    pub fn has_delay(&self) -> bool {
        self.entries.iter().any(|e| e.has_delay())
    }

    pub fn eval(&self, z: Complex64) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).evaluate(z)?;
            }
        }
        Ok(out)
    }
}

/// `G = [N; D]`, `G~ = [-D~, N~]`, and for a controller `K = [D_C; N_C]`,
/// `K~ = [-N~_C, D~_C]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSymbol {
    pub g: TfMatrix,
    pub gtilde: TfMatrix,
    pub k: Option<TfMatrix>,
    pub ktilde: Option<TfMatrix>,
}

/// Tolerance for the checks on user-supplied factor matrices.
pub const SYMBOL_TOL: f64 = 1e-8;
const SYMBOL_CHECK_SAMPLES: usize = 256;

impl GraphSymbol {
    /// Builds a symbol from pre-made factor matrices (`G` of shape
    /// `(p + m) x m`, `G~` of shape `p x (p + m)`), checking `G* G = I`,
    /// `G~ G~* = I` and `G~ G = 0` on the unit circle.
    pub fn from_matrices(g: TfMatrix, gtilde: TfMatrix) -> Result<Self> {
        let (gr, m) = g.shape();
        let (p, gtc) = gtilde.shape();
        if gr != p + m || gtc != p + m {
            return Err(NuError::ShapeMismatch(format!(
                "G is {gr}x{m}, G~ is {p}x{gtc}; expected (p+m)xm and px(p+m)"
            )));
        }
        for z in boundary_samples(SYMBOL_CHECK_SAMPLES) {
            let gz = g.eval(z)?;
            let tz = gtilde.eval(z)?;
            let right = (gz.adjoint() * &gz - DMatrix::identity(m, m)).norm();
            let left = (&tz * tz.adjoint() - DMatrix::identity(p, p)).norm();
            let annihilation = (&tz * &gz).norm();
            if right > SYMBOL_TOL || left > SYMBOL_TOL {
                return Err(NuError::validation(format!(
                    "factor matrices are not normalized at z = {z} (residuals {right:e}, {left:e})"
                )));
            }
            if annihilation > SYMBOL_TOL {
                return Err(NuError::validation(format!(
                    "G~ G = 0 fails at z = {z} (|G~ G| = {annihilation:e})"
                )));
            }
        }
        Ok(GraphSymbol {
            g,
            gtilde,
            k: None,
            ktilde: None,
        })
    }

    /// Input dimension `m` of the plant.
    pub fn inputs(&self) -> usize {
        self.g.shape().1
    }

    /// Output dimension `p` of the plant.
    pub fn outputs(&self) -> usize {
        self.gtilde.shape().0
    }

    pub fn has_delay(&self) -> bool {
        self.g.has_delay() || self.gtilde.has_delay()
    }

    /// Distinct positive delays appearing in the entries of `G`.
    pub fn delays(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in self.g.entries() {
            let t = e.delay();
            if !out.iter().any(|&u| (u - t).abs() <= 1e-12 * t.max(1.0)) {
                out.push(t);
            }
        }
        out
    }
}

/// Assembles the block symbols from plant (and optionally controller) factors.
pub fn graph_symbols(plant: &CoprimeFactors, controller: Option<&CoprimeFactors>) -> GraphSymbol {
    let g = TfMatrix {
        rows: 2,
        cols: 1,
        entries: vec![plant.n.clone(), plant.d.clone()],
    };
    let gtilde = TfMatrix {
        rows: 1,
        cols: 2,
        entries: vec![plant.d.negated(), plant.n.clone()],
    };
    let (k, ktilde) = match controller {
        Some(c) => (
            Some(TfMatrix {
                rows: 2,
                cols: 1,
                entries: vec![c.d.clone(), c.n.clone()],
            }),
            Some(TfMatrix {
                rows: 1,
                cols: 2,
                entries: vec![c.n.negated(), c.d.clone()],
            }),
        ),
        None => (None, None),
    };
    GraphSymbol { g, gtilde, k, ktilde }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn delay_plant(t: f64, a: f64) -> TransferFunction {
        TransferFunction::rational(&[0.0, 1.0], &[-a, 1.0])
            .unwrap()
            .with_delay(t)
            .unwrap()
    }

    #[test]
    fn spectral_factor_of_delay_example() {
        let sf = spectral_factor(&Poly::new(vec![0.0, 1.0]), &Poly::new(vec![-1.0, 1.0])).unwrap();
        let q = sf.q().coeffs();
        assert!((q[0] - 1.0).abs() < 1e-14);
        assert!((q[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spectral_factor_trivial_cases() {
        let sf = spectral_factor(&Poly::zero(), &Poly::constant(1.0)).unwrap();
        assert_eq!(sf.q().coeffs(), &[1.0]);
        let sf = spectral_factor(&Poly::constant(1.0), &Poly::constant(1.0)).unwrap();
        assert!((sf.q().coeffs()[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(spectral_factor(&Poly::zero(), &Poly::zero()).is_err());
    }

    #[test]
    fn axis_root_rejected() {
        // n = 1, d = s^2 + 1 shares nothing, but n = 0, d = s^2 + 1 puts roots on the axis
        let err = spectral_factor(&Poly::zero(), &Poly::new(vec![1.0, 0.0, 1.0])).unwrap_err();
        assert!(matches!(err, NuError::AxisRoot { .. }));
        // a pole at the origin with no numerator
        let err = spectral_factor(&Poly::zero(), &Poly::x()).unwrap_err();
        assert!(matches!(err, NuError::AxisRoot { .. }));
    }

    #[test]
    fn normalize_delay_example() {
        let f = normalize(&delay_plant(1.0, 1.0)).unwrap();
        assert_eq!(f.n.delay(), 1.0);
        assert_eq!(f.d.delay(), 0.0);
        assert!(f.normalization_residual < 1e-13, "{}", f.normalization_residual);
        let s = c(0.3, 0.8);
        let want_n = s * (-s).exp() / (s * 2f64.sqrt() + 1.0);
        let want_d = (s - 1.0) / (s * 2f64.sqrt() + 1.0);
        assert!((f.n.evaluate_s(s).unwrap() - want_n).norm() < 1e-14);
        assert!((f.d.evaluate_s(s).unwrap() - want_d).norm() < 1e-14);
    }

    #[test]
    fn normalize_zero_plant() {
        let f = normalize(&TransferFunction::constant(0.0)).unwrap();
        assert!(f.n.is_zero());
        assert!((f.d.evaluate(c(0.2, 0.1)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.corona_gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_all_pass() {
        let p = TransferFunction::rational(&[-1.0, 1.0], &[1.0, 1.0]).unwrap();
        let f = normalize(&p).unwrap();
        let worst = boundary_samples(256)
            .into_iter()
            .map(|z| (f.n.evaluate(z).unwrap().norm_sqr() + f.d.evaluate(z).unwrap().norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn normalize_cancels_shared_roots_of_factors() {
        // (s + 1)/(s - 1): q = sqrt(2)(s + 1), so N = 1/sqrt(2) after cancellation
        let p = TransferFunction::rational(&[1.0, 1.0], &[-1.0, 1.0]).unwrap();
        let f = normalize(&p).unwrap();
        assert_eq!(f.n.numerator().degree(), 0);
        assert_eq!(f.n.denominator().degree(), 0);
        let v = f.n.evaluate(c(0.4, 0.4)).unwrap();
        assert!((v - c(0.5f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn graph_symbols_shapes_and_annihilation() {
        let f = normalize(&delay_plant(0.5, 2.0)).unwrap();
        let gs = graph_symbols(&f, None);
        assert_eq!(gs.g.shape(), (2, 1));
        assert_eq!(gs.gtilde.shape(), (1, 2));
        for z in boundary_samples(32) {
            let prod = gs.gtilde.eval(z).unwrap() * gs.g.eval(z).unwrap();
            assert!(prod[(0, 0)].norm() < 1e-14);
        }
        let zero = graph_symbols(&normalize(&TransferFunction::constant(0.0)).unwrap(), None);
        let z = c(0.1, -0.3);
        let gt = zero.gtilde.eval(z).unwrap();
        assert_eq!(gt[(0, 0)], c(-1.0, 0.0));
        assert_eq!(gt[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn controller_blocks() {
        let pf = normalize(&TransferFunction::constant(0.0)).unwrap();
        let cf = normalize(&TransferFunction::constant(2.0)).unwrap();
        let gs = graph_symbols(&pf, Some(&cf));
        let k = gs.k.unwrap().eval(c(0.0, 0.0)).unwrap();
        let kt = gs.ktilde.unwrap().eval(c(0.0, 0.0)).unwrap();
        let r = 5f64.sqrt();
        assert!((k[(0, 0)] - c(1.0 / r, 0.0)).norm() < 1e-15);
        assert!((k[(1, 0)] - c(2.0 / r, 0.0)).norm() < 1e-15);
        assert!((kt[(0, 0)] + c(2.0 / r, 0.0)).norm() < 1e-15);
        assert!((kt * k)[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn from_matrices_accepts_valid_and_rejects_bad() {
        let f = normalize(&TransferFunction::rational(&[1.0], &[2.0, 1.0]).unwrap()).unwrap();
        let gs = graph_symbols(&f, None);
        assert!(GraphSymbol::from_matrices(gs.g.clone(), gs.gtilde.clone()).is_ok());
        let bad_g = TfMatrix::new(2, 1, vec![f.n.clone(), f.n.clone()]).unwrap();
        assert!(GraphSymbol::from_matrices(bad_g, gs.gtilde.clone()).is_err());
        assert!(matches!(
            GraphSymbol::from_matrices(gs.gtilde.clone(), gs.g.clone()),
            Err(NuError::ShapeMismatch(_))
        ));
    }
}
