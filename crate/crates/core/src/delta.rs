//! The Bessel integral I_g(a, b; X), its main term C_U(b, X), and the two
//! δ-identities built from them.
//!
//! After x → Xx² the integral is
//!
//! ```text
//! I_g(a, b; X) = 2X ∫_1^{√2} x U(x²) e(2a√X x) J_g(4πb√X x) dx.
//! ```
//!
//! For large 4πb√X the kernel is split into e^{±iy} times slowly varying
//! amplitudes, so the quadrature sees the explicit phases 2π(2a ± 2b)√X x.

pub use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::quadrature::integrate_fn;
use crate::special_fn::{asymptotic_kernel_expansion, kernel_j_g, AsymptoticCoefficients, BesselKernel};
use crate::windows::SmoothBump;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Below this value of 4πb√X the kernel is evaluated directly.
pub const SPLIT_THRESHOLD: f64 = 30.0;
/// Smallest b²X at which the asymptotic statements are tested.
pub const MIN_B2X: f64 = 10.0;
/// Exponent standing in for X^{1-ε} in the δ-identity preconditions.
pub const X_EXPONENT: f64 = 0.9;
/// Cap on the diagonal tolerance and on surviving off-diagonal values.
pub const OFF_DIAGONAL_CAP: f64 = 0.05;
pub const MAX_J: usize = 8;
/// Largest internal truncation for the amplitude expansion.
const J_INTERNAL_MAX: usize = 40;
const AMP_REL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub kernel: BesselKernel,
    pub window: SmoothBump,
    pub x: f64,
    /// Truncation order of C_U.
    pub j: usize,
}

impl DeltaParams {
    /// Default window: the peak-1 bump exp(4 - 4/(1-t²)) on (1, 2).
    pub fn new(kernel: BesselKernel, x: f64, j: usize) -> Result<DeltaParams> {
        let window = SmoothBump::sharpened(1.0, 2.0, 4.0)?;
        DeltaParams::with_window(kernel, window, x, j)
    }

    pub fn with_window(kernel: BesselKernel, window: SmoothBump, x: f64, j: usize) -> Result<DeltaParams> {
        if !(x > 1.0 && x.is_finite()) {
            return Err(Error::Parameter(format!("X must be a finite real > 1, got {x}")));
        }
        if j > MAX_J {
            return Err(Error::UnsupportedOrder(j));
        }
        if !(window.lo >= 1.0 && window.hi <= 2.0) {
            return Err(Error::Parameter(format!(
                "U must be supported in [1, 2], got ({}, {})",
                window.lo, window.hi
            )));
        }
        Ok(DeltaParams { kernel, window, x, j })
    }

    /// Errors unless b²X ≥ 10, the range where the asymptotics are claimed.
    pub fn check_asymptotic(&self, b: f64) -> Result<()> {
        let s = b * b * self.x;
        if !(s >= MIN_B2X) {
            return Err(Error::Parameter(format!("need b²X >= {MIN_B2X}, got {s:.6e}")));
        }
        Ok(())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Absolute quadrature tolerance 1e-9 · X · (b²X)^{-1/4}.
pub fn i_g_tolerance(params: &DeltaParams, b: f64) -> f64 {
    1e-9 * params.x * (b * b * params.x).powf(-0.25)
}

/// Expansion accurate to AMP_REL for every y ≥ y_min, if one exists.
pub(crate) fn converged_expansion(kernel: BesselKernel, y_min: f64) -> Option<AsymptoticCoefficients> {
    let full = asymptotic_kernel_expansion(kernel, J_INTERNAL_MAX);
    let lead = full.c[0].norm() + full.d[0].norm();
    let mut prev = f64::INFINITY;
    for j in 1..=J_INTERNAL_MAX {
        let t = (full.c[j].norm() + full.d[j].norm()) * y_min.powi(-(j as i32));
        if t > prev {
            // Terms started growing before reaching the target.
            return None;
        }
        if t <= AMP_REL * lead {
            let mut e = full;
            e.j_max = j;
            e.c.truncate(j + 1);
            e.d.truncate(j + 1);
            return Some(e);
        }
        prev = t;
    }
    None
}

/// I_g(a, b; X) by panelled quadrature.
pub fn i_g(params: &DeltaParams, a: f64, b: f64) -> Result<Complex64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let w = params.window;
    let rx = params.x.sqrt();
    let y0 = 4.0 * PI * b * rx;
    let tol = i_g_tolerance(params, b);
    let (lo, hi) = (w.lo.sqrt(), w.hi.sqrt());
    let base = move |x: f64| 2.0 * params.x * x * w.value(x * x);
    let split = if y0 >= SPLIT_THRESHOLD { converged_expansion(params.kernel, y0) } else { None };
    match split {
        Some(exp) => {
            // e(2a√X x) e^{±iy}, y = y0 x.
            let mut total = Complex64::new(0.0, 0.0);
            for sign in [1.0, -1.0] {
                let k = TAU * (2.0 * a + sign * 2.0 * b) * rx;
                let exp = &exp;
                let weight = move |x: f64| {
                    let v = base(x);
                    if v == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let (p, m) = exp.amplitudes(y0 * x);
                    v * if sign > 0.0 { p } else { m }
                };
                let r = integrate_fn(lo, hi, weight, move |x| k * x, move |_| k.abs(), 0.0, tol / 2.0)?;
                total += r.value;
            }
            Ok(total)
        }
        None => {
            let k = TAU * 2.0 * a * rx;
            let kernel = params.kernel;
            let weight = move |x: f64| {
                let v = base(x);
                if v == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                match kernel_j_g(kernel, y0 * x) {
                    Ok(j) => v * j,
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            };
            let r = integrate_fn(lo, hi, weight, move |x| k * x, move |_| k, y0, tol)?;
            if !r.value.is_finite() {
                return Err(Error::PrecisionLoss { achieved: f64::INFINITY });
            }
            Ok(r.value)
        }
    }
}

/// C_U(b, X) = X Σ_{j≤J} d_j (4πb√X)^{-j-1/2} Ũ(3/4 - j/2).
pub fn c_u(params: &DeltaParams, b: f64) -> Complex64 {
    let exp = asymptotic_kernel_expansion(params.kernel, params.j);
    let y0 = 4.0 * PI * b * params.x.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, d) in exp.d.iter().enumerate() {
        let m = params.window.mellin(Complex64::new(0.75 - 0.5 * j as f64, 0.0));
        acc += d * m * y0.powf(-(j as f64) - 0.5);
    }
    acc * params.x
}

/// I_g(a, b; X) / C_U(b, X).
pub fn ratio(params: &DeltaParams, a: f64, b: f64) -> Result<Complex64> {
    Ok(i_g(params, a, b)? / c_u(params, b))
}

/// Allowed |value - δ| for a δ-identity evaluation: 10 (min(m, n) X / c²)^{-1/2}
/// on the diagonal (capped at 0.05), and the flat 0.05 off it.
pub fn delta_tolerance(min_mn: u64, modulus: u64, x: f64, diagonal: bool) -> f64 {
    if !diagonal {
        return OFF_DIAGONAL_CAP;
    }
    let s = min_mn as f64 * x / (modulus as f64 * modulus as f64);
    (10.0 / s.sqrt()).min(OFF_DIAGONAL_CAP)
}

/// Checks that some N with m, n ∈ [N, 2N] satisfies X^{0.9} > max(N, c²/N).
fn check_scale(m: u64, n: u64, modulus: u64, x: f64) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter("arguments must be positive integers".into()));
    }
    let lo = m.max(n) as f64 / 2.0;
    let hi = m.min(n) as f64;
    if lo > hi {
        return Err(Error::Parameter(format!("{m} and {n} are not in a common dyadic range [N, 2N]")));
    }
    let xe = x.powf(X_EXPONENT);
    let c2 = modulus as f64 * modulus as f64;
    // N < X^0.9 and N > c²/X^0.9; the largest admissible N is the best one.
    if !(lo < xe) {
        return Err(Error::Parameter(format!(
            "need X^{X_EXPONENT} > N, but N >= {lo} and X^{X_EXPONENT} = {xe:.6e}"
        )));
    }
    let n_best = hi.min(xe * (1.0 - 1e-12));
    if !(n_best > c2 / xe) {
        return Err(Error::Parameter(format!(
            "need X^{X_EXPONENT} > modulus²/N, but modulus²/N >= {:.6e} and X^{X_EXPONENT} = {xe:.6e}",
            c2 / n_best
        )));
    }
    Ok(())
}

fn delta_value(params: &DeltaParams, c: u64, m: u64, n: u64) -> Result<Complex64> {
    if m.abs_diff(n) % c != 0 {
        // The a-sum vanishes identically.
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cf = c as f64;
    let (a, b) = ((m as f64).sqrt() / cf, (n as f64).sqrt() / cf);
    params.check_asymptotic(a)?;
    Ok(i_g(params, a, b)? / c_u(params, a))
}

/// (1/p) Σ_{a mod p} e(a(n-r)/p) I_g(√r/p, √n/p; X) / C_U(√r/p, X).
///
/// The a-sum is p·[p | n-r], so off the progression the result is exactly 0.
pub fn delta_single_modulus(params: &DeltaParams, p: u64, r: u64, n: u64) -> Result<Complex64> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("p must be prime, got {p}")));
    }
    check_scale(r, n, p, params.x)?;
    delta_value(params, p, r, n)
}

/// (1/pq) Σ_{c | pq} Σ*_{a mod c} e(a(n-m)/c) I_g(√m/pq, √n/pq; X) / C_U(√m/pq, X).
///
/// The double sum of Ramanujan sums is pq·[pq | n-m].
pub fn delta_two_moduli(params: &DeltaParams, p: u64, q: u64, m: u64, n: u64) -> Result<Complex64> {
    if p == q {
        return Err(Error::Parameter("p and q must be distinct primes".into()));
    }
    for (name, v) in [("p", p), ("q", q)] {
        if !is_prime(v) {
            return Err(Error::Parameter(format!("{name} must be prime, got {v}")));
        }
    }
    let c = p.checked_mul(q).ok_or_else(|| Error::Parameter("pq overflows".into()))?;
    check_scale(m, n, c, params.x)?;
    delta_value(params, c, m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_u_leading_term() {
        let k = BesselKernel::holomorphic(12).unwrap();
        let p = DeltaParams::new(k, 1e4, 0).unwrap();
        let b = 0.5;
        let want = p.window.mellin(Complex64::new(0.75, 0.0)) * Complex64::new(PI.sqrt(), -PI.sqrt()) * p.x
            / (4.0 * PI * b * p.x.sqrt()).sqrt();
        assert!((c_u(&p, b) - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn scale_preconditions() {
        assert!(check_scale(150, 150, 7, 1e5).is_ok());
        assert!(check_scale(150, 400, 7, 1e5).is_err());
        assert!(check_scale(1_000_000, 1_000_000, 7, 1e5).is_err());
        assert!(check_scale(2, 2, 101, 1e3).is_err());
    }
}
