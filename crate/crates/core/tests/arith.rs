use bessel_delta::arith::*;
use bessel_delta::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Naive summation in visiting order; the oracle for the histogram sums.
fn naive_frak(chi: &DirichletCharacter, q: u64, x: FrakCArgs, order: &[u64]) -> Complex64 {
    let qi = q as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for &z in order {
        let zi = mod_inverse(z as i64, q).unwrap() as i64;
        let t = (x.m + x.gamma * zi).rem_euclid(qi);
        if t == 0 {
            continue;
        }
        let ti = mod_inverse(t, q).unwrap() as i64;
        acc += chi.value(x.r1 + z as i64).conj() * chi.value(x.r2 + x.alpha * ti);
    }
    acc
}

#[test]
fn character_axioms() {
    for q in [5u64, 7, 11, 13, 31] {
        let chars = DirichletCharacter::all(q).unwrap();
        for chi in &chars {
            assert_eq!(chi.value(0), Complex64::new(0.0, 0.0));
            assert_eq!(chi.value(q as i64), Complex64::new(0.0, 0.0));
            for m in 1..q as i64 {
                for n in 1..q as i64 {
                    assert!((chi.value(m * n) - chi.value(m) * chi.value(n)).norm() < 1e-12);
                }
            }
        }
        // Orthogonality over characters.
        for a in 1..q as i64 {
            for b in 1..q as i64 {
                let s: Complex64 = chars.iter().map(|c| c.value(a) * c.value(b).conj()).sum();
                let want = if a == b { (q - 1) as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "q={q} a={a} b={b}");
            }
        }
    }
}

#[test]
fn gauss_sums() {
    for q in [5u64, 7, 11, 13, 101] {
        for chi in DirichletCharacter::all(q).unwrap().iter().skip(1) {
            let g = gauss_sum(chi).unwrap();
            assert!((g.norm() - (q as f64).sqrt()).abs() < 1e-10);
            let gc = gauss_sum(&chi.conj()).unwrap();
            assert!((gc - chi.value(-1) * g.conj()).norm() < 1e-10);
        }
    }
    // Quadratic mod 5: 4-term sum is √5.
    let g = gauss_sum(&DirichletCharacter::quadratic(5).unwrap()).unwrap();
    let t = |k: f64| (2.0 * PI * k / 5.0).cos();
    let oracle = t(1.0) - t(2.0) - t(3.0) + t(4.0);
    assert!((g.re - oracle).abs() < 1e-14 && g.im.abs() < 1e-14);
    assert!((g.re - 5f64.sqrt()).abs() < 1e-14);
    assert!(matches!(gauss_sum(&DirichletCharacter::new(7, 0).unwrap()), Err(Error::Degenerate(_))));
}

#[test]
fn ramanujan_closed_form_matches_brute_force() {
    for q in [2u64, 3, 5, 7, 11, 101] {
        for a in -5..=2 * q as i64 {
            assert!((ramanujan_sum(q, a).unwrap() as f64 - ramanujan_sum_brute(q, a)).abs() < 1e-10);
        }
    }
    assert!(ramanujan_sum(6, 2).is_err());
}

#[test]
fn kloosterman_identities() {
    for c in 1..=101u64 {
        for b in 0..c as i64 {
            assert_eq!(kloosterman(0, b, c).unwrap(), ramanujan_sum_brute(c, b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let c = rng.gen_range(1..=101u64);
        let (a, b) = (rng.gen_range(-200..200i64), rng.gen_range(-200..200i64));
        assert_eq!(kloosterman(a, b, c).unwrap(), kloosterman(b, a, c).unwrap());
    }
    // Weil bound at prime moduli.
    for c in [5u64, 7, 11, 13, 53, 101] {
        for a in 1..c as i64 {
            for b in 1..c as i64 {
                assert!(kloosterman(a, b, c).unwrap().abs() <= 2.0 * (c as f64).sqrt() + 1e-9);
            }
        }
    }
    let direct: f64 = [1i64, 2, 3, 4]
        .iter()
        .map(|&x| {
            let xi = mod_inverse(x, 5).unwrap() as f64;
            (2.0 * PI * (x as f64 + xi) / 5.0).cos()
        })
        .sum();
    assert!((kloosterman(1, 1, 5).unwrap() - direct).abs() < 1e-14);
}

#[test]
fn frak_c_q_divides_m() {
    let q = 7;
    let chi = DirichletCharacter::all(q).unwrap().into_iter().find(|c| c.order() == 6).unwrap();
    let x = FrakCArgs { r1: 1, r2: 2, alpha: 1, gamma: 1, m: 0 };
    let b = frak_c_bruteforce(&chi, q, x).unwrap();
    match frak_c_closed(&chi, q, x).unwrap() {
        FrakC::Value(v) => assert!((v - b).norm() < 1e-10),
        FrakC::NotApplicable => panic!("q | m is a closed-form case"),
    }
}

#[test]
fn frak_c_double_root() {
    for q in [7u64, 11, 13] {
        for chi in DirichletCharacter::all(q).unwrap().iter().skip(1) {
            for m in 1..q as i64 {
                let mi = mod_inverse(m, q).unwrap() as i64;
                let (alpha, gamma) = (3, 2);
                let x = FrakCArgs { r1: mi * gamma % q as i64, r2: (-mi * alpha).rem_euclid(q as i64), alpha, gamma, m };
                let b = frak_c_bruteforce(chi, q, x).unwrap();
                let FrakC::Value(v) = frak_c_closed(chi, q, x).unwrap() else { panic!("double root") };
                assert!((v - b).norm() < 1e-10, "q={q} k={} m={m}: {v} vs {b}", chi.index());
                if chi.is_quadratic() {
                    // Size about q - 1, from the degenerate root.
                    assert!(b.norm() >= (q - 2) as f64 - 1e-9);
                } else {
                    assert!((b.norm() - 1.0).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn frak_c_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [11u64, 31, 101] {
        let chars = DirichletCharacter::all(q).unwrap();
        let (mut closed, mut generic) = (0, 0);
        for _ in 0..500 {
            let chi = &chars[rng.gen_range(1..chars.len())];
            let u = |rng: &mut ChaCha8Rng| rng.gen_range(1..q as i64);
            let m = if rng.gen_bool(0.2) { q as i64 * rng.gen_range(0..3) } else { rng.gen_range(0..q as i64) };
            let x = FrakCArgs { r1: u(&mut rng), r2: u(&mut rng), alpha: u(&mut rng), gamma: u(&mut rng), m };
            let b = frak_c_bruteforce(chi, q, x).unwrap();
            match frak_c_closed(chi, q, x).unwrap() {
                FrakC::Value(v) => {
                    closed += 1;
                    assert!((v - b).norm() < 1e-10);
                }
                FrakC::NotApplicable => {
                    generic += 1;
                    assert!(b.norm() <= 3.0 * (q as f64).sqrt(), "q={q} {x:?}: {}", b.norm());
                }
            }
        }
        assert!(closed > 0 && generic > 0);
    }
}

#[test]
fn frak_c_bad_input() {
    let chi = DirichletCharacter::new(11, 1).unwrap();
    let x = FrakCArgs { r1: 1, r2: 1, alpha: 11, gamma: 1, m: 0 };
    assert!(matches!(frak_c_bruteforce(&chi, 11, x), Err(Error::Parameter(_))));
    let x = FrakCArgs { r1: 0, r2: 1, alpha: 1, gamma: 1, m: 0 };
    assert!(matches!(frak_c_closed(&chi, 11, x), Err(Error::Parameter(_))));
}

#[test]
fn permutation_invariance() {
    let q = 31;
    let chi = DirichletCharacter::new(q, 5).unwrap();
    let x = FrakCArgs { r1: 3, r2: 4, alpha: 5, gamma: 6, m: 7 };
    let b = frak_c_bruteforce(&chi, q, x).unwrap();
    let mut order: Vec<u64> = (1..q).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        order.shuffle(&mut rng);
        assert!((naive_frak(&chi, q, x, &order) - b).norm() < 1e-12);
    }
}

proptest! {
    #[test]
    fn generic_character_multiplicative(q in prop::sample::select(vec![11u64, 31, 101]), k in 0u64..100, m in -500i64..500, n in -500i64..500) {
        let chi = DirichletCharacter::new(q, k).unwrap();
        prop_assert!((chi.value(m * n) - chi.value(m) * chi.value(n)).norm() < 1e-12);
        prop_assert_eq!(chi.value(m) == Complex64::new(0.0, 0.0), m.rem_euclid(q as i64) == 0);
    }
}
