//! Real polynomials with ascending coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real polynomial `c[0] + c[1] x + ... + c[n] x^n`.
///
/// Trailing (highest-degree) exact zeros are dropped on construction, so the
/// last stored coefficient is the leading one unless the polynomial is zero,
/// which is stored as `[0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Poly {
    fn from(coeffs: Vec<f64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `w^deg * p(1/w)`, i.e. the polynomial with reversed coefficients.
    /// Evaluating this at `w = 1/x` is the stable way to evaluate for large `|x|`.
    pub fn eval_reversed(&self, w: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Poly::new(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { *c })
                .collect(),
        )
    }

    /// Drops leading coefficients below `rel_tol * max|c|`.
    pub fn trim_relative(&self, rel_tol: f64) -> Poly {
        let floor = rel_tol * self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c[c.len() - 1].abs() <= floor {
            c.pop();
        }
        Poly::new(c)
    }

    /// Polynomial long division: `self = q * divisor + r`, `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.degree() < dd || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
        }
        rem.truncate(dd.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    /// Builds `lead * prod (x - r)` from a root set closed under conjugation.
    pub fn from_roots(roots: &[Complex64], lead: f64) -> Poly {
        let mut acc = vec![Complex64::new(lead, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            acc = next;
        }
        Poly::new(acc.into_iter().map(|c| c.re).collect())
    }

    /// All complex roots, via companion-matrix eigenvalues followed by a few
    /// Newton steps against the original coefficients.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut roots = Vec::with_capacity(self.degree());
        let mut c: &[f64] = &self.coeffs;
        while c.len() > 1 && c[0] == 0.0 {
            roots.push(Complex64::new(0.0, 0.0));
            c = &c[1..];
        }
        let n = c.len() - 1;
        if n == 0 {
            return roots;
        }
        if n == 1 {
            roots.push(Complex64::new(-c[0] / c[1], 0.0));
            return roots;
        }
        if n == 2 {
            roots.extend(quadratic_roots(c[2], c[1], c[0]));
            return roots;
        }
        let lead = c[n];
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -c[i] / lead;
        }
        let reduced = Poly::new(c.to_vec());
        for z in companion.complex_eigenvalues().iter() {
            roots.push(reduced.polish_root(*z));
        }
        roots
    }

    fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub(crate) fn polish_root(&self, z0: Complex64) -> Complex64 {
        let dp = self.derivative();
        let mut z = z0;
        let mut res = self.eval(z).norm();
        for _ in 0..6 {
            let d = dp.eval(z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - self.eval(z) / d;
            let cres = self.eval(cand).norm();
            if cres.is_nan() || cres >= res {
                break;
            }
            z = cand;
            res = cres;
        }
        z
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut r: Vec<Complex64>) -> Vec<Complex64> {
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        r
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(Poly::new(vec![1.0, 2.0, 0.0, 0.0]).degree(), 1);
        assert!(Poly::new(vec![]).is_zero());
        assert!(Poly::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn mul_and_reflect() {
        // (1 + x)(1 - x) = 1 - x^2
        let p = Poly::new(vec![1.0, 1.0]);
        assert_eq!(p.mul(&p.reflect()).coeffs(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn div_rem_exact() {
        // (x^3 - 1) / (x - 1) = x^2 + x + 1
        let (q, r) = Poly::new(vec![-1.0, 0.0, 0.0, 1.0]).div_rem(&Poly::new(vec![-1.0, 1.0]));
        assert_eq!(q.coeffs(), &[1.0, 1.0, 1.0]);
        assert!(r.is_zero());
    }

    #[test]
    fn roots_of_cubic() {
        // (x - 1)(x + 2)(x - 3)
        let p = Poly::from_roots(
            &[Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(3.0, 0.0)],
            2.0,
        );
        let r = sorted_re(p.roots());
        for (got, want) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_complex_pair_and_zero() {
        // x (x^2 + 2x + 5), roots 0 and -1 +/- 2i
        let p = Poly::new(vec![0.0, 5.0, 2.0, 1.0]);
        let r = sorted_re(p.roots());
        assert!(r.iter().any(|z| z.norm() < 1e-14));
        assert!(r.iter().any(|z| (z - Complex64::new(-1.0, 2.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| (z - Complex64::new(-1.0, -2.0)).norm() < 1e-12));
    }

    #[test]
    fn from_roots_matches_eval() {
        let roots = [Complex64::new(-0.5, 1.5), Complex64::new(-0.5, -1.5), Complex64::new(2.0, 0.0)];
        let p = Poly::from_roots(&roots, 3.0);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-12);
        }
        assert_eq!(p.leading(), 3.0);
    }

    #[test]
    fn reversed_eval_agrees() {
        let p = Poly::new(vec![1.0, -2.0, 0.5]);
        let x = Complex64::new(3.0, -1.0);
        let w = 1.0 / x;
        let direct = p.eval(x);
        let rev = p.eval_reversed(w) / w.powu(p.degree() as u32);
        assert!((direct - rev).norm() < 1e-12 * direct.norm());
    }
}
