//! Both sides of the level-1 Voronoi formula
//!
//! ```text
//! Σ λ(n) e(an/c) F(n) = (η/c) Σ λ(n) e(-ā n/c) ∫ F(x) J_g(4π√(nx)/c) dx
//! ```
//!
//! with F a plateau window on [N, 2N]. For a holomorphic form of level 1 the
//! K-term is absent.

use super::CoefficientProvider;
use crate::arith::{e_frac, mod_inverse};
use crate::delta::{converged_expansion, SPLIT_THRESHOLD};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_fixed, integrate_fn};
use rayon::prelude::*;
use crate::quadrature::sum::ComplexNeumaier;
use crate::special_fn::{kernel_j_g, BesselKernel};
use crate::windows::{plateau_window, SmoothBump};
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MAX_MODULUS: u64 = 5;
pub const MAX_SCALE: f64 = 200.0;
/// Dual terms are summed until this many in a row fall below the cutoff.
const STOP_RUN: usize = 200;
pub const MAX_DUAL_TERMS: usize = 200_000;
const BLOCK: usize = 256;
const CHECK_EVERY: usize = 64;
/// Default truncation cutoff for dual terms.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Coefficients needed for c ≤ 5, N ≥ 50 at the default cutoff, with margin.
pub const TABLE_SIZE: usize = 60_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoronoiReport {
    pub a: i64,
    pub c: u64,
    pub n_scale: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    /// Dual terms summed before truncation.
    pub dual_terms: usize,
}

impl VoronoiReport {
    /// |lhs - rhs| ≤ rel·max(|lhs|, |rhs|) + abs.
    pub fn agrees(&self, rel: f64, abs: f64) -> bool {
        self.diff <= rel * self.lhs.norm().max(self.rhs.norm()) + abs
    }
}

/// The weight F: plateau on [N, 2N] with ramps of width N/4.
pub fn voronoi_weight(n_scale: f64) -> Result<SmoothBump> {
    plateau_window(n_scale, 2.0 * n_scale, 4.0 / n_scale)
}

/// ∫ F(x) J_g(k√x) dx, as 2∫ u F(u²) J_g(ku) du.
///
/// With `refined` false, a single pass on quarter-wavelength panels is
/// returned without the refinement check.
pub fn hankel_integral(kernel: BesselKernel, f: &SmoothBump, k: f64, tol: f64, refined: bool) -> Result<Complex64> {
    let (lo, hi) = (f.lo.sqrt(), f.hi.sqrt());
    let base = move |u: f64| 2.0 * u * f.value(u * u);
    let y0 = k * lo;
    let exp = if y0 >= SPLIT_THRESHOLD { converged_expansion(kernel, y0) } else { None };
    match exp {
        Some(exp) => {
            let mut total = Complex64::new(0.0, 0.0);
            for sign in [1.0, -1.0] {
                let exp = &exp;
                let w = move |u: f64| {
                    let v = base(u);
                    if v == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let (p, m) = exp.amplitudes(k * u);
                    v * if sign > 0.0 { p } else { m }
                };
                total += if refined {
                    integrate_fn(lo, hi, w, move |u| sign * k * u, move |_| k, 0.0, tol / 2.0)?.value
                } else {
                    integrate_fixed(lo, hi, w, move |u| sign * k * u, move |_| k, 0.0)?
                };
            }
            Ok(total)
        }
        None => {
            let w = move |u: f64| {
                let v = base(u);
                if v == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                kernel_j_g(kernel, k * u).map(|j| v * j).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            };
            let v = if refined {
                integrate_fn(lo, hi, w, |_| 0.0, |_| 0.0, k, tol)?.value
            } else {
                integrate_fixed(lo, hi, w, |_| 0.0, |_| 0.0, k)?
            };
            if !v.is_finite() {
                return Err(Error::PrecisionLoss { achieved: f64::INFINITY });
            }
            Ok(v)
        }
    }
}

fn check_args(coeffs: &dyn CoefficientProvider, a: i64, c: u64, n_scale: f64) -> Result<()> {
    if c == 0 || c > MAX_MODULUS {
        return Err(Error::Parameter(format!("need 1 <= c <= {MAX_MODULUS}, got {c}")));
    }
    if a.gcd(&(c as i64)) != 1 {
        return Err(Error::Parameter(format!("need gcd(a, c) = 1, got a = {a}, c = {c}")));
    }
    if !(n_scale >= 1.0 && n_scale <= MAX_SCALE) {
        return Err(Error::Parameter(format!("need 1 <= N <= {MAX_SCALE}, got {n_scale}")));
    }
    if !matches!(coeffs.kernel(), BesselKernel::Holomorphic { .. }) {
        return Err(Error::Parameter("Voronoi check covers holomorphic level-1 forms only".into()));
    }
    Ok(())
}

/// Σ λ(n) e(an/c) F(n).
fn lhs(coeffs: &dyn CoefficientProvider, a: i64, c: u64, f: &SmoothBump) -> Result<Complex64> {
    let mut acc = ComplexNeumaier::default();
    for n in (f.lo.floor() as usize).max(1)..=f.hi.ceil() as usize {
        let w = f.value(n as f64);
        if w != 0.0 {
            acc.add(e_frac(a * n as i64 % c as i64, c) * (coeffs.checked_lambda(n)? * w));
        }
    }
    Ok(acc.sum())
}

/// (1/c) Σ λ(n) e(-ā n/c) ∫ F(x) J_g(4π√(nx)/c) dx, without η.
///
/// Terms are computed in blocks (in parallel) and added in order of n. Every
/// CHECK_EVERY-th integral is recomputed with the refined integrator.
fn dual(coeffs: &dyn CoefficientProvider, a: i64, c: u64, f: &SmoothBump, cutoff: f64) -> Result<(Complex64, usize)> {
    let abar = mod_inverse(a, c).unwrap_or(0) as i64;
    let kernel = coeffs.kernel();
    let qtol = (1e-3 * cutoff).max(1e-14 * f.lo);
    let integral = |n: usize| -> Result<Complex64> {
        let k = 4.0 * PI * (n as f64).sqrt() / c as f64;
        let v = hankel_integral(kernel, f, k, qtol, false)?;
        if n % CHECK_EVERY == 1 {
            let r = hankel_integral(kernel, f, k, qtol, true)?;
            let d = (r - v).norm();
            if d > qtol.max(1e-13 * r.norm()) {
                return Err(Error::PrecisionLoss { achieved: d });
            }
        }
        Ok(v)
    };
    let mut acc = ComplexNeumaier::default();
    let mut quiet = 0;
    let mut start = 1;
    while start <= MAX_DUAL_TERMS {
        let end = (start + BLOCK).min(MAX_DUAL_TERMS + 1);
        let block: Vec<Result<Complex64>> = (start..end).into_par_iter().map(integral).collect();
        for (n, i) in (start..end).zip(block) {
            let i = i?;
            let l = coeffs.checked_lambda(n)?;
            acc.add(e_frac(-abar * n as i64 % c as i64, c) * i * (l / c as f64));
            // Judge the tail by the integral alone; λ(n) can vanish by accident.
            if i.norm() / c as f64 <= cutoff {
                quiet += 1;
                if quiet >= STOP_RUN {
                    return Ok((acc.sum(), n));
                }
            } else {
                quiet = 0;
            }
        }
        start = end;
    }
    Err(Error::Resource(format!(
        "dual sum not below {cutoff:.1e} after {MAX_DUAL_TERMS} terms"
    )))
}

/// η as the ratio of the two sides at (a, c) = (1, 2), N = 50. Errors
/// unless |η| = 1 to 1e-6.
pub fn determine_eta(coeffs: &dyn CoefficientProvider) -> Result<Complex64> {
    check_args(coeffs, 1, 2, 50.0)?;
    let f = voronoi_weight(50.0)?;
    let l = lhs(coeffs, 1, 2, &f)?;
    let (r, _) = dual(coeffs, 1, 2, &f, 1e-11)?;
    let eta = l / r;
    if (eta.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Degenerate(format!("|eta| = {} is not 1", eta.norm())));
    }
    Ok(eta)
}

/// Both sides at (a, c, N). `tol` is the per-term truncation cutoff of the
/// dual sum and scales the quadrature tolerance.
pub fn voronoi_check(
    coeffs: &dyn CoefficientProvider,
    eta: Complex64,
    a: i64,
    c: u64,
    n_scale: f64,
    tol: f64,
) -> Result<VoronoiReport> {
    check_args(coeffs, a, c, n_scale)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let f = voronoi_weight(n_scale)?;
    let l = lhs(coeffs, a, c, &f)?;
    let (d, terms) = dual(coeffs, a, c, &f, tol)?;
    let rhs = eta * d;
    Ok(VoronoiReport { a, c, n_scale, lhs: l, rhs, diff: (l - rhs).norm(), dual_terms: terms })
}
