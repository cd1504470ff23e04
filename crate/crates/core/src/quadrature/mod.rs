//! Panelled Gauss–Legendre quadrature for ∫ w(y) e^{iρ(y)} dy.
//!
//! Panels are capped at a quarter of the local wavelength 2π/(|ρ'| + f_amp),
//! where f_amp bounds the oscillation of the amplitude itself. Each panel
//! gets 10 Gauss–Legendre nodes; the error estimate is the change under one
//! uniform halving of every panel.

pub mod certify;
pub mod gauss;
pub mod sum;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::windows::SmoothBump;
use num_complex::Complex64;
use rayon::prelude::*;
use sum::ComplexNeumaier;

/// Cap on total phase variation over the support, in radians.
pub const PHASE_BUDGET: f64 = 1e7;
const MAX_REFINE: usize = 8;
const MIN_PANELS: usize = 8;
const SAMPLE_CELLS: usize = 64;
const PAR_THRESHOLD: usize = 4096;

pub type PhaseFn<'a> = Box<dyn Fn(Jet) -> Jet + Send + Sync + 'a>;
pub type AmpFn<'a> = Box<dyn Fn(f64) -> Complex64 + Send + Sync + 'a>;

/// Window (times optional amplitude), real phase and absolute tolerance.
pub struct OscillatorySpec<'a> {
    pub window: SmoothBump,
    pub amplitude: Option<AmpFn<'a>>,
    /// Bound on the angular frequency of the amplitude (0 if slowly varying).
    pub amplitude_frequency: f64,
    pub phase: PhaseFn<'a>,
    pub tolerance: f64,
}

impl<'a> OscillatorySpec<'a> {
    pub fn new<P>(window: SmoothBump, phase: P, tolerance: f64) -> Self
    where
        P: Fn(Jet) -> Jet + Send + Sync + 'a,
    {
        OscillatorySpec {
            window,
            amplitude: None,
            amplitude_frequency: 0.0,
            phase: Box::new(phase),
            tolerance,
        }
    }

    pub fn with_amplitude<A>(mut self, amp: A, frequency: f64) -> Self
    where
        A: Fn(f64) -> Complex64 + Send + Sync + 'a,
    {
        self.amplitude = Some(Box::new(amp));
        self.amplitude_frequency = frequency;
        self
    }

    pub fn weight(&self, x: f64) -> Complex64 {
        let w = self.window.value(x);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.amplitude {
            Some(a) => a(x) * w,
            None => Complex64::new(w, 0.0),
        }
    }

    pub fn phase_value(&self, x: f64) -> f64 {
        (self.phase)(Jet::constant(x, 0)).value()
    }

    pub fn phase_deriv(&self, x: f64, k: usize) -> f64 {
        (self.phase)(Jet::var(x, k)).deriv(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

/// Breakpoints with every panel at most a quarter wavelength wide.
pub fn plan_panels<S>(lo: f64, hi: f64, speed: S, amp_freq: f64) -> Result<Vec<f64>>
where
    S: Fn(f64) -> f64,
{
    let cell = (hi - lo) / SAMPLE_CELLS as f64;
    let samples: Vec<f64> = (0..=SAMPLE_CELLS).map(|i| speed(lo + i as f64 * cell).abs()).collect();
    let mut variation = 0.0;
    let mut counts = Vec::with_capacity(SAMPLE_CELLS);
    for i in 0..SAMPLE_CELLS {
        // Local max over neighbouring samples, padded for curvature between them.
        let a = i.saturating_sub(1);
        let b = (i + 2).min(SAMPLE_CELLS);
        let s = samples[a..=b].iter().cloned().fold(0.0, f64::max) * 1.25;
        variation += s * cell;
        let n = (cell * (s + amp_freq) / (std::f64::consts::PI / 2.0)).ceil() as usize;
        counts.push(n.max(1));
    }
    if !(variation <= PHASE_BUDGET) {
        let total: usize = counts.iter().sum();
        return Err(Error::Resource(format!(
            "phase variation {variation:.3e} rad exceeds budget {PHASE_BUDGET:.0e}; would need {total} panels"
        )));
    }
    let total: usize = counts.iter().sum();
    let boost = MIN_PANELS.div_ceil(total).max(1);
    let mut pts = Vec::with_capacity(total * boost + 1);
    for (i, &n) in counts.iter().enumerate() {
        let a = lo + i as f64 * cell;
        let n = n * boost;
        for k in 0..n {
            pts.push(a + cell * k as f64 / n as f64);
        }
    }
    pts.push(hi);
    Ok(pts)
}

fn panel_sum<W, P>(a: f64, b: f64, split: usize, weight: &W, phase: &P) -> Complex64
where
    W: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let r = gauss::gl10();
    let h = (b - a) / split as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..split {
        let a0 = a + s as f64 * h;
        let mut part = Complex64::new(0.0, 0.0);
        for (z, w) in r.nodes.iter().zip(&r.weights) {
            let x = a0 + 0.5 * h * (z + 1.0);
            let v = weight(x);
            if v.re != 0.0 || v.im != 0.0 {
                let p = phase(x);
                part += v * Complex64::new(p.cos(), p.sin()) * *w;
            }
        }
        acc += part * (0.5 * h);
    }
    acc
}

fn sum_panels<W, P>(pts: &[f64], split: usize, weight: &W, phase: &P) -> Complex64
where
    W: Fn(f64) -> Complex64 + Sync,
    P: Fn(f64) -> f64 + Sync,
{
    let n = pts.len() - 1;
    let parts: Vec<Complex64> = if n * split >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(|i| panel_sum(pts[i], pts[i + 1], split, weight, phase)).collect()
    } else {
        (0..n).map(|i| panel_sum(pts[i], pts[i + 1], split, weight, phase)).collect()
    };
    // Fixed order, so results do not depend on the thread schedule.
    let mut acc = ComplexNeumaier::default();
    for p in parts {
        acc.add(p);
    }
    acc.sum()
}

/// Core routine on plain closures. `speed(y)` returns |ρ'(y)|.
pub fn integrate_fn<W, P, S>(
    lo: f64,
    hi: f64,
    weight: W,
    phase: P,
    speed: S,
    amp_freq: f64,
    tolerance: f64,
) -> Result<QuadResult>
where
    W: Fn(f64) -> Complex64 + Sync,
    P: Fn(f64) -> f64 + Sync,
    S: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::Parameter(format!("empty interval ({lo}, {hi})")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let pts = plan_panels(lo, hi, speed, amp_freq)?;
    let panels = pts.len() - 1;
    let mut split = 1;
    let mut coarse = sum_panels(&pts, split, &weight, &phase);
    let mut err = f64::INFINITY;
    for _ in 0..MAX_REFINE {
        split *= 2;
        let fine = sum_panels(&pts, split, &weight, &phase);
        err = (fine - coarse).norm();
        if err <= tolerance {
            return Ok(QuadResult { value: fine, error: err, panels: panels * split });
        }
        coarse = fine;
    }
    Err(Error::PrecisionLoss { achieved: err })
}

/// One pass at the planned resolution, without the refinement check. For
/// callers that validate accuracy another way (nested integrals).
pub fn integrate_fixed<W, P, S>(lo: f64, hi: f64, weight: W, phase: P, speed: S, amp_freq: f64) -> Result<Complex64>
where
    W: Fn(f64) -> Complex64 + Sync,
    P: Fn(f64) -> f64 + Sync,
    S: Fn(f64) -> f64,
{
    let pts = plan_panels(lo, hi, speed, amp_freq)?;
    Ok(sum_panels(&pts, 1, &weight, &phase))
}

/// ∫ w(y) e^{iρ(y)} dy over the window's support.
pub fn integrate_oscillatory(spec: &OscillatorySpec) -> Result<QuadResult> {
    integrate_fn(
        spec.window.lo,
        spec.window.hi,
        |x| spec.weight(x),
        |x| spec.phase_value(x),
        |x| spec.phase_deriv(x, 1),
        spec.amplitude_frequency,
        spec.tolerance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_is_enforced() {
        let spec = OscillatorySpec::new(SmoothBump::canonical(), |y: Jet| y * 2e7, 1e-8);
        assert!(matches!(integrate_oscillatory(&spec), Err(Error::Resource(_))));
    }

    #[test]
    fn constant_phase_gives_mass() {
        let u = SmoothBump::canonical();
        let spec = OscillatorySpec::new(u, |y: Jet| y * 0.0, 1e-13);
        let r = integrate_oscillatory(&spec).unwrap();
        let m = u.mellin(Complex64::new(1.0, 0.0));
        assert!((r.value - m).norm() < 1e-13);
    }
}
