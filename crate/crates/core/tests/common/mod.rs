//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use nu_metric::{Domain, Poly, TransferFunction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `s exp(-sT) / (s - a)`.
pub fn delay_plant(t: f64, a: f64) -> TransferFunction {
    TransferFunction::rational(&[0.0, 1.0], &[-a, 1.0])
        .unwrap()
        .with_delay(t)
        .unwrap()
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64, allow_positive: bool) -> f64 {
    let m = rng.gen_range(lo..hi);
    if allow_positive && rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Conjugate-closed root set of size `deg` with real parts at least 0.3
/// away from the imaginary axis.
pub fn random_roots(rng: &mut ChaCha8Rng, deg: usize, allow_rhp: bool) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(deg);
    while roots.len() < deg {
        let re = signed(rng, 0.3, 3.0, allow_rhp);
        if deg - roots.len() >= 2 && rng.gen_bool(0.4) {
            let im = rng.gen_range(0.3..2.0);
            roots.push(c(re, im));
            roots.push(c(re, -im));
        } else {
            roots.push(c(re, 0.0));
        }
    }
    roots
}

/// Proper rational plant, denominator degree 1..=max_deg.
pub fn random_plant(rng: &mut ChaCha8Rng, max_deg: usize, allow_unstable: bool) -> TransferFunction {
    let dd = rng.gen_range(1..=max_deg);
    let nd = rng.gen_range(0..=dd);
    let gain = signed(rng, 0.5, 3.0, true);
    let den = Poly::from_roots(&random_roots(rng, dd, allow_unstable), 1.0);
    let num = Poly::from_roots(&random_roots(rng, nd, true), gain);
    TransferFunction::new(num, den, 0.0, Domain::HalfPlane).unwrap()
}

/// Multiplies each coefficient by `1 + eps u`, `u` uniform in [-1, 1].
pub fn perturb(rng: &mut ChaCha8Rng, tf: &TransferFunction, eps: f64) -> TransferFunction {
    let mut jitter = |p: &Poly| {
        Poly::new(
            p.coeffs()
                .iter()
                .map(|&x| x * (1.0 + eps * rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    };
    let num = jitter(tf.numerator());
    let den = jitter(tf.denominator());
    TransferFunction::new(num, den, tf.delay(), tf.domain()).unwrap()
}

/// Disk-rational `k prod (z - zeros) / prod (z - poles)`.
pub fn disk_rational(zeros: &[Complex64], poles: &[Complex64], k: f64) -> TransferFunction {
    TransferFunction::new(
        Poly::from_roots(zeros, k),
        Poly::from_roots(poles, 1.0),
        0.0,
        Domain::Disk,
    )
    .unwrap()
}

/// Conjugate-closed set with moduli drawn from the given band.
pub fn disk_roots(rng: &mut ChaCha8Rng, count: usize, r_lo: f64, r_hi: f64) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(count);
    while roots.len() < count {
        let r = rng.gen_range(r_lo..r_hi);
        if count - roots.len() >= 2 && rng.gen_bool(0.5) {
            let t = rng.gen_range(0.2..std::f64::consts::PI - 0.2);
            roots.push(Complex64::from_polar(r, t));
            roots.push(Complex64::from_polar(r, -t));
        } else {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            roots.push(c(sign * r, 0.0));
        }
    }
    roots
}

/// Argument-principle oracle: zeros minus poles strictly inside `|z| < r`.
pub fn count_inside(zeros: &[Complex64], poles: &[Complex64], r: f64) -> i64 {
    let z = zeros.iter().filter(|v| v.norm() < r).count() as i64;
    let p = poles.iter().filter(|v| v.norm() < r).count() as i64;
    z - p
}

/// Chordal distance at `s = i w`, the pointwise value of `|G~2 G1|`:
/// `|P1 - P2| / (sqrt(1 + |P1|^2) sqrt(1 + |P2|^2))`.
pub fn chordal(p1: &TransferFunction, p2: &TransferFunction, w: f64) -> f64 {
    let s = c(0.0, w);
    let v1 = p1.evaluate_s(s).unwrap();
    let v2 = p2.evaluate_s(s).unwrap();
    (v1 - v2).norm() / ((1.0 + v1.norm_sqr()).sqrt() * (1.0 + v2.norm_sqr()).sqrt())
}
