//! Derivative-test certificates: the numerically computed integral next to
//! the bound a lemma predicts for it.
//!
//! Hypotheses are spot-checked on a 1024-point grid per dimension. A passing
//! grid check is necessary, not sufficient.

use super::{integrate_fixed, integrate_fn, integrate_oscillatory, OscillatorySpec};
use crate::error::{Error, Result};
use crate::windows::SmoothBump;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

pub const GRID: usize = 1024;
pub const SLACK_A1: f64 = 5.0;
pub const SLACK_A2: f64 = 1.0;
pub const SLACK_A3: f64 = 5.0;
/// Highest phase / window derivative order checked for the first lemma.
pub const A1_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lemma {
    A1,
    A2,
    A3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A1Params {
    pub q: f64,
    pub u: f64,
    pub y: f64,
    pub z: f64,
    pub r: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeTestCertificate {
    pub lemma: Lemma,
    pub parameters: BTreeMap<String, f64>,
    pub bound_value: f64,
    pub integral_value: Complex64,
    pub slack: f64,
    /// |I| / bound.
    pub ratio: f64,
    pub violated: bool,
}

impl DerivativeTestCertificate {
    fn new(lemma: Lemma, parameters: BTreeMap<String, f64>, bound: f64, integral: Complex64, slack: f64) -> Self {
        let ratio = integral.norm() / bound;
        DerivativeTestCertificate {
            lemma,
            parameters,
            bound_value: bound,
            integral_value: integral,
            slack,
            ratio,
            violated: ratio > slack,
        }
    }
}

fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (GRID + 1) as f64;
    (1..=GRID).map(move |i| lo + i as f64 * h)
}

fn pure_window(spec: &OscillatorySpec) -> Result<()> {
    if spec.amplitude.is_some() {
        return Err(Error::Parameter("certificates need a pure (real) window, not an amplitude".into()));
    }
    Ok(())
}

/// Smallest parameters under which the first lemma's hypotheses hold with
/// implied constant 1 on the grid (derivatives up to order 4).
pub fn fit_a1_params(spec: &OscillatorySpec, a: f64) -> Result<A1Params> {
    pure_window(spec)?;
    let (lo, hi) = (spec.window.lo, spec.window.hi);
    let q = hi - lo;
    let mut r = f64::INFINITY;
    let mut r_at = lo;
    let mut y = 0.0f64;
    let mut wmax = [0.0f64; A1_MAX_ORDER + 1];
    let mut sign = 0.0;
    for x in grid(lo, hi) {
        let pj = (spec.phase)(crate::jet::Jet::var(x, A1_MAX_ORDER));
        // A sign change of ρ' between samples hides a stationary point.
        if pj.deriv(1) * sign < 0.0 {
            return Err(Error::Hypothesis { what: "phase".into(), order: 1, point: x });
        }
        sign = pj.deriv(1).signum();
        let d1 = pj.deriv(1).abs();
        if d1 < r {
            r = d1;
            r_at = x;
        }
        for i in 2..=A1_MAX_ORDER {
            y = y.max(pj.deriv(i).abs() * q.powi(i as i32));
        }
        let wj = spec.window.jet(x, A1_MAX_ORDER);
        for (j, m) in wmax.iter_mut().enumerate() {
            *m = m.max(wj.deriv(j).abs());
        }
    }
    if !(r > 0.0) {
        return Err(Error::Hypothesis { what: "phase".into(), order: 1, point: r_at });
    }
    let z = wmax[0];
    let mut u = f64::INFINITY;
    for (j, &m) in wmax.iter().enumerate().skip(1) {
        if m > 0.0 {
            u = u.min((z / m).powf(1.0 / j as f64));
        }
    }
    Ok(A1Params { q, u, y, z, r, a })
}

/// Non-stationary phase bound (b-a) Z (Y/(R²Q²) + 1/(RQ) + 1/(RU))^A.
pub fn a1_bound(p: &A1Params, len: f64) -> f64 {
    len * p.z * (p.y / (p.r * p.r * p.q * p.q) + 1.0 / (p.r * p.q) + 1.0 / (p.r * p.u)).powf(p.a)
}

pub fn certify_a1(spec: &OscillatorySpec, params: A1Params) -> Result<DerivativeTestCertificate> {
    pure_window(spec)?;
    let A1Params { q, u, y, z, r, a } = params;
    if !(q > 0.0 && u > 0.0 && y >= 0.0 && z > 0.0 && r > 0.0 && a >= 0.0) {
        return Err(Error::Parameter(format!("invalid parameters {params:?} (need R > 0)")));
    }
    let (lo, hi) = (spec.window.lo, spec.window.hi);
    let tol = |v: f64| v * (1.0 + 1e-9) + 1e-300;
    let mut sign = 0.0;
    for x in grid(lo, hi) {
        let pj = (spec.phase)(crate::jet::Jet::var(x, A1_MAX_ORDER));
        if pj.deriv(1).abs() < r * (1.0 - 1e-9) || pj.deriv(1) * sign < 0.0 {
            return Err(Error::Hypothesis { what: "phase".into(), order: 1, point: x });
        }
        sign = pj.deriv(1).signum();
        for i in 2..=A1_MAX_ORDER {
            if pj.deriv(i).abs() > tol(y / q.powi(i as i32)) {
                return Err(Error::Hypothesis { what: "phase".into(), order: i, point: x });
            }
        }
        let wj = spec.window.jet(x, A1_MAX_ORDER);
        for j in 0..=A1_MAX_ORDER {
            if wj.deriv(j).abs() > tol(z / u.powi(j as i32)) {
                return Err(Error::Hypothesis { what: "window".into(), order: j, point: x });
            }
        }
    }
    let integral = integrate_oscillatory(spec)?.value;
    let bound = a1_bound(&params, hi - lo);
    let mut p = BTreeMap::new();
    for (k, v) in [("Q", q), ("U", u), ("Y", y), ("Z", z), ("R", r), ("A", a)] {
        p.insert(k.to_string(), v);
    }
    Ok(DerivativeTestCertificate::new(Lemma::A1, p, bound, integral, SLACK_A1))
}

/// One-dimensional second derivative test with its explicit constant.
///
/// The lemma is stated for ∫ e(f) w with f'' ≥ λ, while the engine's phase
/// is ρ = 2πf; λ here bounds f'' = ρ''/(2π).
pub fn certify_a2(spec: &OscillatorySpec, lambda: f64) -> Result<DerivativeTestCertificate> {
    pure_window(spec)?;
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let (lo, hi) = (spec.window.lo, spec.window.hi);
    for x in grid(lo, hi) {
        let f2 = spec.phase_deriv(x, 2) / TAU;
        if f2 < lambda * (1.0 - 1e-12) {
            return Err(Error::Hypothesis { what: "phase".into(), order: 2, point: x });
        }
    }
    let integral = integrate_oscillatory(spec)?.value;
    let v = spec.window.total_variation();
    let bound = 4.0 * v / (PI * lambda).sqrt();
    let mut p = BTreeMap::new();
    p.insert("lambda".to_string(), lambda);
    p.insert("V".to_string(), v);
    Ok(DerivativeTestCertificate::new(Lemma::A2, p, bound, integral, SLACK_A2))
}

pub type Fn2<'a, T> = Box<dyn Fn(f64, f64) -> T + Send + Sync + 'a>;

/// Product window w(x)w(y) and phase h with explicit gradient and Hessian.
/// The integrand is e(h) = e^{2πih}.
pub struct Spec2d<'a> {
    pub window_x: SmoothBump,
    pub window_y: SmoothBump,
    pub h: Fn2<'a, f64>,
    pub grad: Fn2<'a, [f64; 2]>,
    /// [h_xx, h_xy, h_yy]
    pub hessian: Fn2<'a, [f64; 3]>,
    pub tolerance: f64,
}

/// ∫∫ w(x) w(y) e(h(x, y)) dx dy by iterated panel quadrature.
pub fn integrate_2d(spec: &Spec2d) -> Result<Complex64> {
    let (wx, wy) = (spec.window_x, spec.window_y);
    let mut hx_max = 0.0f64;
    for x in grid(wx.lo, wx.hi).step_by(16) {
        for y in grid(wy.lo, wy.hi).step_by(16) {
            hx_max = hx_max.max((spec.grad)(x, y)[0].abs());
        }
    }
    let wmax = (0..=64).map(|i| wx.value(wx.lo + (wx.hi - wx.lo) * i as f64 / 64.0)).fold(0.0, f64::max);
    let inner_tol = spec.tolerance / (4.0 * (wx.hi - wx.lo) * wmax.max(1e-300));
    let inner_at = |x: f64| {
        (
            move |y: f64| Complex64::new(wy.value(y), 0.0),
            move |y: f64| TAU * (spec.h)(x, y),
            move |y: f64| TAU * (spec.grad)(x, y)[1],
        )
    };
    // Quarter-wavelength panels with 10 nodes are accurate far beyond the
    // tolerance, so the inner pass skips refinement; a handful of sample
    // rows are checked against the refined integrator instead.
    for i in 1..8 {
        let x = wx.lo + (wx.hi - wx.lo) * i as f64 / 8.0;
        let (w, p, s) = inner_at(x);
        let fixed = integrate_fixed(wy.lo, wy.hi, w, p, s, 0.0)?;
        let (w, p, s) = inner_at(x);
        let refined = integrate_fn(wy.lo, wy.hi, w, p, s, 0.0, inner_tol)?;
        let diff = (fixed - refined.value).norm();
        if diff > inner_tol {
            return Err(Error::PrecisionLoss { achieved: diff });
        }
    }
    let inner = |x: f64| -> Complex64 {
        let (w, p, s) = inner_at(x);
        match integrate_fixed(wy.lo, wy.hi, w, p, s, 0.0) {
            Ok(v) => v,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let out = integrate_fn(
        wx.lo,
        wx.hi,
        |x| {
            let w = wx.value(x);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                inner(x) * w
            }
        },
        |_| 0.0,
        |_| 0.0,
        TAU * hx_max * 1.25,
        spec.tolerance,
    )?;
    if !out.value.re.is_finite() || !out.value.im.is_finite() {
        return Err(Error::PrecisionLoss { achieved: f64::INFINITY });
    }
    Ok(out.value)
}

/// Two-dimensional second derivative test. The three displayed hypotheses
/// |h_xx| ≥ λ, |h_yy| ≥ ρ, |det h''| ≥ λρ are all checked.
pub fn certify_a3(spec: &Spec2d, lambda: f64, rho: f64) -> Result<DerivativeTestCertificate> {
    if !(lambda > 0.0 && rho > 0.0) {
        return Err(Error::Parameter(format!("lambda and rho must be positive, got {lambda}, {rho}")));
    }
    let (wx, wy) = (spec.window_x, spec.window_y);
    let slack = 1.0 - 1e-12;
    for x in grid(wx.lo, wx.hi) {
        for y in grid(wy.lo, wy.hi) {
            let [hxx, hxy, hyy] = (spec.hessian)(x, y);
            if hxx.abs() < lambda * slack {
                return Err(Error::Hypothesis { what: "h_xx".into(), order: 2, point: x });
            }
            if hyy.abs() < rho * slack {
                return Err(Error::Hypothesis { what: "h_yy".into(), order: 2, point: y });
            }
            if (hxx * hyy - hxy * hxy).abs() < lambda * rho * slack {
                return Err(Error::Hypothesis { what: "det h''".into(), order: 2, point: x });
            }
        }
    }
    let integral = integrate_2d(spec)?;
    let v = wx.total_variation() * wy.total_variation();
    let bound = v / (lambda * rho).sqrt();
    let mut p = BTreeMap::new();
    p.insert("lambda".to_string(), lambda);
    p.insert("rho".to_string(), rho);
    p.insert("V".to_string(), v);
    Ok(DerivativeTestCertificate::new(Lemma::A3, p, bound, integral, SLACK_A3))
}
