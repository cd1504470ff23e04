use bessel_delta::forms::tau::*;
use bessel_delta::forms::voronoi::*;
use bessel_delta::forms::*;
use bessel_delta::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::sync::OnceLock;

/// Schoolbook q ∏(1 - qⁿ)^24 in big integers: 24 dense multiplications by
/// the binomial-free factors, with no use of sparsity or modular arithmetic.
fn tau_oracle(n_max: usize) -> Vec<BigInt> {
    let mut prod = vec![BigInt::zero(); n_max];
    prod[0] = BigInt::from(1);
    for k in 1..n_max {
        for _ in 0..24 {
            // Multiply by (1 - q^k) in place, high to low.
            for i in (k..n_max).rev() {
                let t = prod[i - k].clone();
                prod[i] -= t;
            }
        }
    }
    let mut out = vec![BigInt::zero()];
    out.extend(prod);
    out
}

fn delta() -> &'static RamanujanDelta {
    static D: OnceLock<RamanujanDelta> = OnceLock::new();
    D.get_or_init(|| RamanujanDelta::from_table(tau_table(TABLE_SIZE).unwrap()))
}

#[test]
fn tau_matches_schoolbook_product() {
    let o = tau_oracle(400);
    let t = tau_table(400).unwrap();
    for n in 1..=400 {
        assert_eq!(BigInt::from(t[n]), o[n], "n={n}");
    }
    assert_eq!((t[1], t[2], t[3], t[6]), (1, -24, 252, -6048));
}

#[test]
fn tau_independent_of_residue_primes() {
    let a = tau_table_with_primes(30_000, &PRIMES).unwrap();
    let b = tau_table_with_primes(30_000, &ALT_PRIMES).unwrap();
    assert_eq!(a, b);
    assert_eq!(&tau_table(1000).unwrap()[..], &a[..=1000]);
}

#[test]
fn tau_cap() {
    assert!(matches!(tau_table(TAU_MAX + 1), Err(Error::Resource(_))));
}

#[test]
fn multiplicativity_and_deligne() {
    let d = delta();
    for m in 1..=10_000usize {
        for n in 1..=10_000 / m {
            if m.gcd(&n) == 1 {
                assert_eq!(BigInt::from(d.tau(m * n)), BigInt::from(d.tau(m)) * BigInt::from(d.tau(n)));
            }
        }
        // τ² ≤ d(n)² n^11, exactly.
        let t = BigInt::from(d.tau(m));
        let dn = BigInt::from(divisor_count(m as u64));
        assert!(&t * &t <= &dn * &dn * BigInt::from(m).pow(11), "n={m}");
        assert!(d.lambda(m).abs() <= divisor_count(m as u64) as f64 * (1.0 + 1e-12));
    }
}

#[test]
fn hecke_relations() {
    let d = delta();
    assert!(hecke_relation_check(d, 2, 3).unwrap());
    assert_eq!(d.tau(2) * d.tau(2), d.tau(4) + (1 << 11));
    assert!(hecke_relation_check(d, 2, 2).unwrap());
    for m in 1..=100 {
        for n in 1..=100 {
            assert!(hecke_relation_check(d, m, n).unwrap(), "({m}, {n})");
        }
    }
    // Prime power recursion.
    for p in [2usize, 3, 5, 7] {
        let mut pk = vec![1usize, p];
        while pk.last().unwrap() * p <= 10_000 {
            pk.push(pk.last().unwrap() * p);
        }
        for k in 1..pk.len() - 1 {
            let lhs = BigInt::from(d.tau(pk[k + 1]));
            let rhs = BigInt::from(d.tau(p)) * BigInt::from(d.tau(pk[k])) - BigInt::from(p).pow(11) * BigInt::from(d.tau(pk[k - 1]));
            assert_eq!(lhs, rhs);
        }
    }
    assert!(hecke_relation_check(d, 1000, 1000).is_err());
}

#[test]
fn rankin_selberg() {
    let d = delta();
    assert_eq!(rankin_selberg_ratio(d, 1).unwrap(), 1.0);
    let ns = [1000usize, 2000, 4000, 8000, 16_000, 32_000];
    let mut pts = Vec::new();
    for &n in &ns {
        let r = rankin_selberg_ratio(d, n).unwrap();
        assert!((0.1..=10.0).contains(&r), "N={n}: {r}");
        pts.push(((n as f64).ln(), (r * n as f64).ln()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 1.0).abs() <= 0.1, "slope {slope}");
    assert!(matches!(rankin_selberg_ratio(d, TABLE_SIZE + 1), Err(Error::Resource(_))));
}

#[test]
fn cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let t = tau_table(2000).unwrap();
    let p = cache_path(dir.path(), 2000);
    write_cache(&p, &t).unwrap();
    assert_eq!(read_cache(&p).unwrap(), t);
    // Signed bytes: check the layout of the first entries by hand.
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(u64::from_le_bytes(bytes[..8].try_into().unwrap()), 2001);
    assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
    assert_eq!(bytes[12], 0);
    assert_eq!(&bytes[13..17], &1u32.to_le_bytes());
    assert_eq!(bytes[17], 1);
    // τ(2) = -24
    assert_eq!(&bytes[18..22], &1u32.to_le_bytes());
    assert_eq!(bytes[22] as i8, -24);
    std::fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_cache(&p).is_err());
    assert!(read_cache(&dir.path().join("missing.bin")).is_err());
    // The cached loader tolerates both a missing directory and a corrupt file.
    std::env::set_var(CACHE_ENV, dir.path());
    assert_eq!(tau_table_cached(2000).unwrap(), t);
    assert_eq!(read_cache(&p).unwrap(), t, "rewritten after corruption");
    assert_eq!(tau_table_cached(2000).unwrap(), t);
    std::env::set_var(CACHE_ENV, dir.path().join("nowhere/deeper"));
    assert_eq!(tau_table_cached(50).unwrap(), tau_table(50).unwrap());
    std::env::remove_var(CACHE_ENV);
}

#[test]
fn voronoi_reference_cases() {
    let d = delta();
    let eta = determine_eta(d).unwrap();
    assert!((eta.norm() - 1.0).abs() <= 1e-6);
    assert!((eta - 1.0).norm() <= 1e-6, "weight 12, level 1: eta = 1");
    for (a, c) in [(0, 1), (1, 2)] {
        let r = voronoi_check(d, eta, a, c, 50.0, DEFAULT_TOL).unwrap();
        assert!(r.agrees(1e-6, 1e-8), "{r:?}");
        assert!(r.lhs.norm() > 1e-3, "nontrivial left side");
    }
    // a → -a conjugates both sides.
    let p = voronoi_check(d, eta, 1, 3, 100.0, DEFAULT_TOL).unwrap();
    let m = voronoi_check(d, eta, -1, 3, 100.0, DEFAULT_TOL).unwrap();
    assert!((p.lhs - m.lhs.conj()).norm() <= 1e-9);
    assert!((p.rhs - m.rhs.conj()).norm() <= 1e-9);
}

#[test]
fn voronoi_preconditions() {
    let d = delta();
    let one = num_complex::Complex64::new(1.0, 0.0);
    assert!(matches!(voronoi_check(d, one, 2, 4, 50.0, 1e-10), Err(Error::Parameter(_))));
    assert!(matches!(voronoi_check(d, one, 1, 7, 50.0, 1e-10), Err(Error::Parameter(_))));
    assert!(matches!(voronoi_check(d, one, 1, 2, 500.0, 1e-10), Err(Error::Parameter(_))));
    let small = RamanujanDelta::from_table(tau_table(300).unwrap());
    assert!(matches!(voronoi_check(&small, one, 1, 2, 50.0, 1e-10), Err(Error::Resource(_))));
    assert!(BigInt::from(small.tau(1)).is_positive());
}
