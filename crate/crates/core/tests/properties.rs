//! Property tests for the invariants of each module.

mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use nu_metric::index::{circle_winding, winding_number};
use nu_metric::numetric::{nu_rho, CrossSymbol, MatrixFunction};
use nu_metric::transfer::sample_circle;
use nu_metric::{normalize, nu_infinity, AnnulusScan, CircleSampling, Domain, Poly, ToGraphSymbol, TransferFunction};
use proptest::prelude::*;

fn scan() -> AnnulusScan {
    AnnulusScan::dyadic(3, 10, 256, 1e-9, 3).unwrap()
}

/// Roots kept at least 0.3 off the imaginary axis.
fn root() -> impl Strategy<Value = (f64, f64, bool)> {
    (0.3f64..3.0, 0.0f64..2.0, any::<bool>())
}

fn poly_from(spec: &[(f64, f64, bool)], allow_rhp: bool, lead: f64) -> Poly {
    let mut roots = Vec::new();
    for &(m, im, flip) in spec {
        let re = if allow_rhp && flip { m } else { -m };
        if im > 0.5 {
            roots.push(c(re, im));
            roots.push(c(re, -im));
        } else {
            roots.push(c(re, 0.0));
        }
    }
    Poly::from_roots(&roots, lead)
}

prop_compose! {
    fn plant()(den in prop::collection::vec(root(), 1..=2),
               num in prop::collection::vec(root(), 0..=1),
               gain in 0.3f64..3.0,
               neg in any::<bool>()) -> TransferFunction {
        let d = poly_from(&den, true, 1.0);
        let n = poly_from(&num, true, if neg { -gain } else { gain });
        let n = if n.degree() > d.degree() { Poly::constant(n.leading()) } else { n };
        TransferFunction::reduced(n, d, 0.0, Domain::HalfPlane).unwrap().0
    }
}

prop_compose! {
    fn disk_point(rmax: f64)(r in 0.0..rmax, t in 0.0..2.0 * PI) -> Complex64 {
        Complex64::from_polar(r, t)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transplant_consistency(p in plant(), zs in prop::collection::vec(disk_point(0.95), 100)) {
        let disk = p.transplant().unwrap();
        for z in zs {
            let (Ok(a), Ok(b)) = (p.evaluate(z), disk.evaluate(z)) else { continue };
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn conjugate_symmetry(p in plant(), t in 0.0f64..2.0, z in disk_point(1.0)) {
        let p = p.with_delay(t).unwrap();
        if let (Ok(a), Ok(b)) = (p.evaluate(z), p.evaluate(z.conj())) {
            prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn sampling_matches_pointwise(p in plant(), r in 0.1f64..1.0, t in 0.0f64..2.0) {
        let p = p.with_delay(t).unwrap();
        let sampling = CircleSampling::for_function(r, 64, p.has_delay()).unwrap();
        if let Ok(points) = sample_circle(&p, &sampling) {
            for pt in points {
                prop_assert_eq!(pt.value, p.evaluate(pt.z).unwrap());
            }
        }
    }

    #[test]
    fn factorization_invariants(p in plant(), t in 0.0f64..3.0, zs in prop::collection::vec(disk_point(0.95), 100)) {
        let f = normalize(&p).unwrap();
        prop_assert!(f.normalization_residual < 1e-8);
        for q in [f.n.denominator(), f.d.denominator()] {
            prop_assert!(q.roots().iter().all(|r| r.re < -1e-10));
        }
        // reconstruction N/D = P
        for z in zs {
            let (Ok(want), Ok(n), Ok(d)) = (p.evaluate(z), f.n.evaluate(z), f.d.evaluate(z)) else { continue };
            prop_assert!((n / d - want).norm() <= 1e-8 * want.norm().max(1.0));
        }
        // the dead-time factor has unit modulus on the axis
        let fd = normalize(&p.with_delay(t).unwrap()).unwrap();
        prop_assert!((fd.normalization_residual - f.normalization_residual).abs() <= 1e-12);
        // annihilation G~ G = 0 on the boundary
        let g = fd.to_graph_symbol().unwrap();
        for j in 0..64 {
            let z = Complex64::from_polar(1.0, PI * (2 * j + 1) as f64 / 64.0);
            let v = g.gtilde.eval(z).unwrap() * g.g.eval(z).unwrap();
            prop_assert!(v[(0, 0)].norm() < 1e-10);
        }
    }

    #[test]
    fn winding_integer_snap(zeros in prop::collection::vec(disk_point(2.0), 0..4), r in 0.2f64..0.95) {
        prop_assume!(zeros.iter().all(|z| (z.norm() - r).abs() > 0.05));
        let f = |z: Complex64| Ok(zeros.iter().fold(c(1.0, 0.0), |acc, w| acc * (z - w)));
        let w = circle_winding(&f, r, 256, 1e-12).unwrap();
        prop_assert!((w.raw_turns - w.raw_turns.round()).abs() < 0.01);
        prop_assert_eq!(w.winding, zeros.iter().filter(|z| z.norm() < r).count() as i64);
    }

    #[test]
    fn local_constancy(zeros in prop::collection::vec(disk_point(0.5), 0..4), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = rng(seed);
        let samples: Vec<Complex64> = (0..1024)
            .map(|j| {
                let z = Complex64::from_polar(0.8, 2.0 * PI * j as f64 / 1024.0);
                zeros.iter().fold(c(1.0, 0.0), |acc, w| acc * (z - w))
            })
            .collect();
        let base = winding_number(&samples, 1e-12).unwrap();
        let noisy: Vec<Complex64> = samples
            .iter()
            .map(|v| v + Complex64::from_polar(rng.gen_range(0.0..base.min_modulus / 4.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        prop_assert_eq!(winding_number(&noisy, 1e-12).unwrap().winding, base.winding);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_range_and_identity(p in plant(), q in plant(), t in 0.0f64..2.0) {
        let p = p.with_delay(t).unwrap();
        let r = nu_infinity(&p, &p, &scan()).unwrap();
        prop_assert_eq!(r.value, 0.0);
        let r = nu_infinity(&p, &q, &scan()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&r.value));
    }

    #[test]
    fn metric_symmetry(p in plant(), eps in 0.0f64..0.3, seed in any::<u64>()) {
        let q = perturb(&mut rng(seed), &p, eps);
        let a = nu_infinity(&p, &q, &scan()).unwrap().value;
        let b = nu_infinity(&q, &p, &scan()).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }

    /// Once condition (C) holds from some radius on, `d_nu^rho` no longer
    /// depends on `rho`.
    #[test]
    fn monotone_stabilization(p in plant(), eps in 0.0f64..0.2, seed in any::<u64>()) {
        let q = perturb(&mut rng(seed), &p, eps);
        let s = scan();
        let full = nu_infinity(&p, &q, &s).unwrap();
        if let Some(rho_star) = full.condition.rho_star {
            let later: Vec<f64> = s.radii().iter().copied().filter(|&r| r >= rho_star).collect();
            for w in later.windows(2) {
                let rho = 0.5 * (w[0] + w[1]);
                let v = nu_rho(&p, &q, rho, &s).unwrap();
                prop_assert!(v.condition.holds);
                prop_assert!((v.value - full.value).abs() <= 1e-9, "{} vs {}", v.value, full.value);
            }
        }
    }

    #[test]
    fn cross_symbol_bounded_by_one(p in plant(), q in plant(), z in disk_point(1.0)) {
        let g1 = p.to_graph_symbol().unwrap();
        let g2 = q.to_graph_symbol().unwrap();
        let cross = CrossSymbol::new(&g1, &g2).unwrap();
        if let Ok(m) = cross.eval(z) {
            prop_assert!(m[(0, 0)].norm() <= 1.0 + 1e-9);
        }
    }
}
