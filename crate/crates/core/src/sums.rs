//! Exponential sums over Hecke eigenvalues: smoothed sums with phase
//! f(x) = Tφ(x/N) + γx, sharp-cut sums Σ_{n≤N} λ(n) e(αn^β + γn), twisted
//! sums Σ λ(n)χ(n)n^{-it}V(n/N), and the amplification split of the latter.

use crate::arith::DirichletCharacter;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::forms::CoefficientProvider;
use crate::jet::Jet;
use crate::quadrature::sum::{ComplexNeumaier, Neumaier};
use crate::windows::SmoothBump;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Exponent towards Ramanujan; 0 for holomorphic forms. Only enters the
/// unsmoothing term N^{1+θ}/T, which no routine here computes.
pub const THETA: f64 = 0.0;
pub const MAX_T: f64 = 1e4;
/// Sample grid for the |φ''| ≥ 1 check on [1/2, 5/2].
const PHI_GRID: usize = 401;

pub type PhiFn = Arc<dyn Fn(Jet) -> Jet + Send + Sync>;

/// f(x) = T φ(x/N) + γ x with |φ''| ≥ 1 on [1/2, 5/2].
#[derive(Clone)]
pub struct PhaseSpec {
    pub t: f64,
    pub phi: PhiFn,
    pub gamma: f64,
    pub n_scale: f64,
}

impl std::fmt::Debug for PhaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseSpec")
            .field("t", &self.t)
            .field("gamma", &self.gamma)
            .field("n_scale", &self.n_scale)
            .finish_non_exhaustive()
    }
}

impl PhaseSpec {
    pub fn new<F>(t: f64, phi: F, gamma: f64, n_scale: f64) -> Result<PhaseSpec>
    where
        F: Fn(Jet) -> Jet + Send + Sync + 'static,
    {
        if !(t >= 0.0 && t.is_finite()) || !(n_scale >= 1.0) || !gamma.is_finite() {
            return Err(Error::Parameter(format!("need T >= 0, N >= 1, finite gamma (got {t}, {n_scale}, {gamma})")));
        }
        let phi: PhiFn = Arc::new(phi);
        for i in 0..PHI_GRID {
            let x = 0.5 + 2.0 * i as f64 / (PHI_GRID - 1) as f64;
            let d2 = phi(Jet::var(x, 2)).deriv(2);
            if !(d2.abs() >= 0.99) {
                return Err(Error::Hypothesis { what: "phi".into(), order: 2, point: x });
            }
        }
        Ok(PhaseSpec { t, phi, gamma, n_scale })
    }

    /// φ(x) = x².
    pub fn quadratic(t: f64, gamma: f64, n_scale: f64) -> Result<PhaseSpec> {
        PhaseSpec::new(t, |x: Jet| x * x, gamma, n_scale)
    }

    /// f(n) mod 1, with γ reduced mod 1 before multiplying.
    pub fn frac(&self, n: u64) -> f64 {
        let main = self.t * (self.phi)(Jet::constant(n as f64 / self.n_scale, 0)).value();
        let g = self.gamma - self.gamma.floor();
        let lin = (Dd::from_f64(g) * Dd::from_f64(n as f64)).to_f64();
        let s = (main - main.floor()) + (lin - lin.floor());
        s - s.floor()
    }
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// n^{-it} with t·ln n reduced mod 2π in double-double.
pub fn n_pow_minus_it(n: u64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let ph = (Dd::from_f64(t) * Dd::from_f64(n as f64).ln()).rem_tau().to_f64();
    cis(-ph)
}

/// Integer n in the open support (lo·N, hi·N) of V(n/N).
fn support(window: &SmoothBump, n_scale: f64) -> std::ops::RangeInclusive<u64> {
    let lo = (window.lo * n_scale).floor().max(0.0) as u64 + 1;
    let hi = (window.hi * n_scale).ceil() as u64;
    lo..=hi
}

fn need(coeffs: &dyn CoefficientProvider, n: u64) -> Result<()> {
    if n as usize > coeffs.len() {
        return Err(Error::Resource(format!("coefficient table exhausted: need n = {n}, have {}", coeffs.len())));
    }
    Ok(())
}

/// Σ λ(n) e(f(n)) V(n/N).
pub fn smooth_exp_sum(coeffs: &dyn CoefficientProvider, phase: &PhaseSpec, window: &SmoothBump) -> Result<Complex64> {
    let r = support(window, phase.n_scale);
    need(coeffs, *r.end())?;
    let mut acc = ComplexNeumaier::default();
    for n in r {
        let v = window.value(n as f64 / phase.n_scale);
        if v != 0.0 {
            acc.add(cis(TAU * phase.frac(n)) * (coeffs.lambda(n as usize) * v));
        }
    }
    Ok(acc.sum())
}

/// Σ_{n ≤ N} λ(n) e(α n^β + γ n).
pub fn sharp_exp_sum(coeffs: &dyn CoefficientProvider, alpha: f64, beta: f64, gamma: f64, n_max: u64) -> Result<Complex64> {
    if alpha == 0.0 || beta == 1.0 || !alpha.is_finite() || !beta.is_finite() || !gamma.is_finite() {
        return Err(Error::Parameter(format!("need alpha != 0, beta != 1 (got {alpha}, {beta})")));
    }
    need(coeffs, n_max)?;
    let g = gamma - gamma.floor();
    let mut acc = ComplexNeumaier::default();
    for n in 1..=n_max {
        let a = alpha * (n as f64).powf(beta);
        let l = (Dd::from_f64(g) * Dd::from_f64(n as f64)).to_f64();
        let f = (a - a.floor()) + (l - l.floor());
        acc.add(cis(TAU * f) * coeffs.lambda(n as usize));
    }
    Ok(acc.sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Samples used after dropping zero or non-finite sums.
    pub used: usize,
}

/// Least squares of ln|S| against ln N.
pub fn exponent_fit(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(n, s)| *n > 0.0 && *s > 0.0 && n.is_finite() && s.is_finite())
        .map(|&(n, s)| (n.ln(), s.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 nonzero samples, got {}", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all samples share one N".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(ExponentFit { slope, intercept: my - slope * mx, r2, used: pts.len() })
}

fn check_t(t: f64) -> Result<()> {
    if !(t.abs() <= MAX_T) {
        return Err(Error::Parameter(format!("|t| must be <= {MAX_T}, got {t}")));
    }
    Ok(())
}

/// 𝒮(N) = Σ λ(n) χ(n) n^{-it} V(n/N).
pub fn twisted_sum(
    coeffs: &dyn CoefficientProvider,
    chi: &DirichletCharacter,
    t: f64,
    window: &SmoothBump,
    n_scale: f64,
) -> Result<Complex64> {
    check_t(t)?;
    let r = support(window, n_scale);
    need(coeffs, *r.end())?;
    let mut acc = ComplexNeumaier::default();
    for n in r {
        let v = window.value(n as f64 / n_scale);
        let c = chi.value(n as i64);
        if v != 0.0 && c.norm_sqr() != 0.0 {
            acc.add(c * n_pow_minus_it(n, t) * (coeffs.lambda(n as usize) * v));
        }
    }
    Ok(acc.sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationSplit {
    pub s: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
    pub residual: f64,
    /// L* = Σ_ℓ |λ(ℓ)|².
    pub l_star: f64,
}

/// 𝒮 = 𝒮₁ + 𝒮₂ from λ(ℓ)λ(r) = λ(ℓr) + λ(r/ℓ)1_{ℓ|r}, ℓ prime:
///
/// 𝒮₁ = (1/L*) Σ_ℓ λ̄(ℓ) Σ_r χ(r) r^{-it} V(r/N) λ(rℓ),
/// 𝒮₂ = (1/L*) Σ_ℓ λ̄(ℓ) χ(ℓ) ℓ^{-it} Σ_n λ(n) χ(n) n^{-it} V(ℓn/N).
pub fn amplification_split(
    coeffs: &dyn CoefficientProvider,
    chi: &DirichletCharacter,
    t: f64,
    window: &SmoothBump,
    n_scale: f64,
    primes_l: &[u64],
) -> Result<AmplificationSplit> {
    check_t(t)?;
    let q = chi.modulus();
    for &l in primes_l {
        if !crate::arith::is_prime(l) {
            return Err(Error::Parameter(format!("amplifier entries must be prime, got {l}")));
        }
        if l % q == 0 {
            return Err(Error::Parameter(format!("amplifier prime {l} is not coprime to q = {q}")));
        }
    }
    let mut ls = Neumaier::default();
    for &l in primes_l {
        need(coeffs, l)?;
        ls.add(coeffs.lambda(l as usize).powi(2));
    }
    let l_star = ls.sum();
    if !(l_star > 0.0) {
        return Err(Error::Degenerate("L* = 0: every amplifier coefficient vanishes".into()));
    }
    let s = twisted_sum(coeffs, chi, t, window, n_scale)?;
    let r = support(window, n_scale);
    let mut s1 = ComplexNeumaier::default();
    let mut s2 = ComplexNeumaier::default();
    for &l in primes_l {
        let ll = coeffs.lambda(l as usize);
        need(coeffs, *r.end() * l)?;
        let mut inner = ComplexNeumaier::default();
        for n in r.clone() {
            let v = window.value(n as f64 / n_scale);
            let c = chi.value(n as i64);
            if v != 0.0 && c.norm_sqr() != 0.0 {
                // δ(n' - rℓ) collapses the n'-sum to λ(rℓ).
                inner.add(c * n_pow_minus_it(n, t) * (v * coeffs.lambda((n * l) as usize)));
            }
        }
        s1.add(inner.sum() * ll);
        let scaled = n_scale / l as f64;
        let mut inner = ComplexNeumaier::default();
        for n in support(window, scaled) {
            let v = window.value(n as f64 / scaled);
            let c = chi.value(n as i64);
            if v != 0.0 && c.norm_sqr() != 0.0 {
                inner.add(c * n_pow_minus_it(n, t) * (v * coeffs.lambda(n as usize)));
            }
        }
        s2.add(inner.sum() * chi.value(l as i64) * n_pow_minus_it(l, t) * ll);
    }
    let (s1, s2) = (s1.sum() / l_star, s2.sum() / l_star);
    Ok(AmplificationSplit { s, s1, s2, residual: (s - s1 - s2).norm(), l_star })
}
