use bessel_delta::delta::*;
use bessel_delta::special_fn::{kernel_j_g, BesselKernel};
use bessel_delta::windows::SmoothBump;
use bessel_delta::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn holo() -> BesselKernel {
    BesselKernel::holomorphic(12).unwrap()
}

fn maass() -> BesselKernel {
    BesselKernel::maass(1.0, 1).unwrap()
}

/// Trapezoid rule on the original integral over x ∈ [X, 2X], with the kernel
/// evaluated directly: no substitution, no exponential split, no panels.
fn i_g_oracle(p: &DeltaParams, a: f64, b: f64, n: usize) -> Complex64 {
    let (lo, hi) = (p.x * p.window.lo, p.x * p.window.hi);
    let h = (hi - lo) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 1..n {
        let x = lo + i as f64 * h;
        let u = p.window.value(x / p.x);
        if u == 0.0 {
            continue;
        }
        let ph = TAU * 2.0 * a * x.sqrt();
        acc += u * Complex64::new(ph.cos(), ph.sin()) * kernel_j_g(p.kernel, 4.0 * PI * b * x.sqrt()).unwrap();
    }
    acc * h
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn i_g_matches_trapezoid_oracle() {
    for k in [holo(), maass()] {
        let p = DeltaParams::new(k, 400.0, 0).unwrap();
        // 4πb√X spans both the direct (< 30) and the split evaluation paths.
        for (a, b) in [(0.05, 0.05), (0.5, 0.5), (0.6, 0.5), (1.2, 1.0)] {
            let v = i_g(&p, a, b).unwrap();
            let o1 = i_g_oracle(&p, a, b, 8000);
            let o2 = i_g_oracle(&p, a, b, 16000);
            assert!((o1 - o2).norm() <= 1e-9 * o2.norm().max(1.0), "oracle not converged");
            assert!((v - o2).norm() <= 1e-8 * o2.norm().max(1.0), "{k} a={a} b={b}: {v} vs {o2}");
        }
    }
}

#[test]
fn diagonal_ratio_approaches_one() {
    for k in [holo(), maass()] {
        let p = DeltaParams::new(k, 1e4, 0).unwrap();
        let b = (1e4f64 / p.x).sqrt();
        let r = ratio(&p, b, b).unwrap();
        assert!((r - 1.0).norm() <= 10.0 * 1e-2, "{k}: {r}");
    }
}

#[test]
fn truncation_order_slopes() {
    let s = [100.0, 400.0, 1600.0];
    for j in 0..=2 {
        let p = DeltaParams::new(holo(), 1e4, j).unwrap();
        let e: Vec<f64> = s.iter().map(|&s| (ratio(&p, (s / p.x).sqrt(), (s / p.x).sqrt()).unwrap() - 1.0).norm()).collect();
        let m = slope(&s, &e);
        let want = -(j as f64 + 1.0) / 2.0;
        assert!((m - want).abs() <= 0.2, "J={j}: slope {m}");
    }
}

#[test]
fn off_diagonal_decay() {
    for k in [holo(), maass()] {
        let p = DeltaParams::new(k, 1e4, 0).unwrap();
        let b = 1.0;
        let v: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&d| ratio(&p, b + (d / p.x).sqrt(), b).unwrap().norm())
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
        assert!(v[1] <= 1e-2 * v[0] && v[2] <= 1e-2 * v[1], "{v:?}");
        // A = 3 decay bound.
        assert!(v[2] <= (1e4f64).powi(-3) * 1e6);
    }
}

#[test]
fn c_u_comparability_canonical_window() {
    let u = SmoothBump::canonical();
    for k in [holo(), maass()] {
        let p = DeltaParams::with_window(k, u, 1e4, 0).unwrap();
        for e in 1..=6 {
            let s = 10f64.powi(e);
            let b = (s / p.x).sqrt();
            let c = c_u(&p, b).norm() * s.powf(0.25) / p.x;
            assert!((0.05..=5.0).contains(&c), "{k} b²X={s}: {c}");
        }
    }
}

#[test]
fn c_u_inverse_derivative_bound() {
    let p = DeltaParams::with_window(holo(), SmoothBump::canonical(), 1e4, 2).unwrap();
    let f = |b: f64| 1.0 / c_u(&p, b);
    for b in [0.1, 0.5, 2.0] {
        let h = 1e-4 * b;
        let d1 = (f(b + h) - f(b - h)) / (2.0 * h);
        let d2 = (f(b + h) - 2.0 * f(b) + f(b - h)) / (h * h);
        let cap = 10.0 * b.sqrt() / p.x.powf(0.75);
        assert!(f(b).norm() <= cap);
        assert!(b * d1.norm() <= cap);
        assert!(b * b * d2.norm() <= cap);
    }
}

#[test]
fn single_modulus_examples() {
    for k in [holo(), maass()] {
        let p = DeltaParams::new(k, 1e5, 0).unwrap();
        let d = delta_single_modulus(&p, 7, 150, 150).unwrap();
        assert!((d - 1.0).norm() <= 0.05);
        assert_eq!(delta_single_modulus(&p, 7, 150, 151).unwrap(), Complex64::new(0.0, 0.0));
        assert!(delta_single_modulus(&p, 7, 150, 157).unwrap().norm() <= 0.05);
    }
}

#[test]
fn two_moduli_examples() {
    for k in [holo(), maass()] {
        let p = DeltaParams::new(k, 1e7, 0).unwrap();
        assert!((delta_two_moduli(&p, 7, 11, 3000, 3000).unwrap() - 1.0).norm() <= 0.05);
        assert_eq!(delta_two_moduli(&p, 7, 11, 3000, 3005).unwrap(), Complex64::new(0.0, 0.0));
        assert!(delta_two_moduli(&p, 7, 11, 3000, 3077).unwrap().norm() <= 0.05);
    }
}

#[test]
fn preconditions() {
    let p = DeltaParams::new(holo(), 1e5, 0).unwrap();
    match delta_two_moduli(&p, 7, 7, 3000, 3000) {
        Err(Error::Parameter(m)) => assert!(m.contains("distinct primes")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(delta_single_modulus(&p, 8, 150, 150), Err(Error::Parameter(_))));
    // N beyond X^0.9.
    assert!(matches!(delta_single_modulus(&p, 7, 100_000, 100_000), Err(Error::Parameter(_))));
    // p²/N beyond X^0.9.
    let small = DeltaParams::new(holo(), 50.0, 0).unwrap();
    assert!(matches!(delta_single_modulus(&small, 101, 2, 2), Err(Error::Parameter(_))));
    assert!(matches!(i_g(&p, -1.0, 1.0), Err(Error::Parameter(_))));
    assert!(DeltaParams::new(holo(), 0.5, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn non_progression_is_exactly_zero(r in 100u64..200, d in 1u64..100, pi in 0usize..3) {
        let p = [7u64, 11, 13][pi];
        prop_assume!(d % p != 0);
        let params = DeltaParams::new(maass(), 1e5, 0).unwrap();
        let v = delta_single_modulus(&params, p, r, r + d).unwrap();
        prop_assert_eq!(v, Complex64::new(0.0, 0.0));
    }
}
