//! Hecke eigenvalues of the level-1 weight-12 form Δ and checks built on them.

pub mod tau;
pub mod voronoi;

use crate::error::{Error, Result};
use crate::quadrature::sum::Neumaier;
use crate::special_fn::BesselKernel;
use num_bigint::BigInt;
use num_integer::Integer;

pub use tau::{tau_table, tau_table_cached};
pub use voronoi::{determine_eta, voronoi_check, VoronoiReport};

/// Normalised coefficients λ(n), n ≥ 1, of a fixed GL(2) form.
pub trait CoefficientProvider: Sync {
    /// Largest n available.
    fn len(&self) -> usize;
    fn lambda(&self, n: usize) -> f64;
    fn kernel(&self) -> BesselKernel;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn checked_lambda(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.len() {
            return Err(Error::Resource(format!("coefficient table exhausted: need n = {n}, have {}", self.len())));
        }
        Ok(self.lambda(n))
    }
}

/// Δ = Σ τ(n) qⁿ, λ(n) = τ(n) / n^{11/2}.
#[derive(Debug, Clone)]
pub struct RamanujanDelta {
    tau: Vec<i128>,
    lambda: Vec<f64>,
}

impl RamanujanDelta {
    pub fn new(n_max: usize) -> Result<RamanujanDelta> {
        Ok(RamanujanDelta::from_table(tau_table_cached(n_max)?))
    }

    /// From τ(0..=n_max) with index 0 ignored.
    pub fn from_table(tau: Vec<i128>) -> RamanujanDelta {
        let lambda = tau
            .iter()
            .enumerate()
            .map(|(n, &t)| if n == 0 { 0.0 } else { t as f64 / (n as f64).powf(5.5) })
            .collect();
        RamanujanDelta { tau, lambda }
    }

    pub fn tau(&self, n: usize) -> i128 {
        self.tau[n]
    }

    pub fn table(&self) -> &[i128] {
        &self.tau
    }
}

impl CoefficientProvider for RamanujanDelta {
    fn len(&self) -> usize {
        self.tau.len().saturating_sub(1)
    }

    fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    fn kernel(&self) -> BesselKernel {
        BesselKernel::Holomorphic { kappa: 12 }
    }
}

/// λ(m)λ(n) = Σ_{d | (m,n)} λ(mn/d²): exactly, as
/// τ(m)τ(n) = Σ d^{11} τ(mn/d²), and in floating point to 1e-9 relative.
pub fn hecke_relation_check(delta: &RamanujanDelta, m: usize, n: usize) -> Result<bool> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter("hecke_relation_check needs m, n >= 1".into()));
    }
    let mn = m.checked_mul(n).filter(|&v| v <= delta.len()).ok_or_else(|| {
        Error::Parameter(format!("need mn <= table size {}, got {m}*{n}", delta.len()))
    })?;
    let g = m.gcd(&n);
    let lhs = BigInt::from(delta.tau(m)) * BigInt::from(delta.tau(n));
    let mut rhs = BigInt::from(0);
    let mut fl = Neumaier::default();
    for d in (1..=g).filter(|d| g % d == 0) {
        rhs += BigInt::from(d).pow(11) * BigInt::from(delta.tau(mn / (d * d)));
        fl.add(delta.lambda(mn / (d * d)));
    }
    let lf = delta.lambda(m) * delta.lambda(n);
    let close = (lf - fl.sum()).abs() <= 1e-9 * lf.abs().max(1.0);
    Ok(lhs == rhs && close)
}

/// Σ_{n≤N} λ(n)² / N.
pub fn rankin_selberg_ratio(coeffs: &dyn CoefficientProvider, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("N must be >= 1".into()));
    }
    coeffs.checked_lambda(n)?;
    let mut s = Neumaier::default();
    for k in 1..=n {
        let l = coeffs.lambda(k);
        s.add(l * l);
    }
    Ok(s.sum() / n as f64)
}

/// Number of divisors.
pub fn divisor_count(n: u64) -> u64 {
    let mut c = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            c += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    c
}
