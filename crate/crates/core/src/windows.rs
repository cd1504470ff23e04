//! Compactly supported smooth windows: bumps on an interval and plateau
//! windows with a derivative scale Δ.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::gauss::gl20;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MAX_DERIV: usize = 8;

/// Beyond this the exponential factor underflows and every derivative is 0
/// to double precision.
const EXP_CUTOFF: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `scale * exp(-k / (1 - t^2))`, t mapping the support onto (-1, 1).
    Bump { k: f64, scale: f64 },
    /// Equal to 1 away from ramps of width 1/Δ at each end.
    Plateau { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothBump {
    pub lo: f64,
    pub hi: f64,
    pub profile: Profile,
}

impl SmoothBump {
    /// exp(-1/(1-t²)), t = 2x - 3, on (1, 2). Peak e^{-1} at x = 3/2.
    pub fn canonical() -> SmoothBump {
        SmoothBump { lo: 1.0, hi: 2.0, profile: Profile::Bump { k: 1.0, scale: 1.0 } }
    }

    /// exp(k - k/(1-t²)) on (lo, hi): a bump with peak 1 whose mass
    /// concentrates at the centre as k grows.
    pub fn sharpened(lo: f64, hi: f64, k: f64) -> Result<SmoothBump> {
        SmoothBump::bump(lo, hi, k, k.exp())
    }

    pub fn bump(lo: f64, hi: f64, k: f64, scale: f64) -> Result<SmoothBump> {
        if !(lo < hi) || !(k > 0.0) || !(scale > 0.0) {
            return Err(Error::Parameter(format!(
                "bump needs lo < hi, k > 0, scale > 0 (got {lo}, {hi}, {k}, {scale})"
            )));
        }
        Ok(SmoothBump { lo, hi, profile: Profile::Bump { k, scale } })
    }

    /// Δ-scaled derivative scale; 1 for bumps.
    pub fn derivative_scale(&self) -> f64 {
        match self.profile {
            Profile::Bump { .. } => 1.0,
            Profile::Plateau { delta } => delta,
        }
    }

    /// Fast value (no derivatives).
    pub fn value(&self, x: f64) -> f64 {
        if !(x > self.lo && x < self.hi) {
            return 0.0;
        }
        match self.profile {
            Profile::Bump { k, scale } => {
                let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
                let u = (1.0 - t) * (1.0 + t);
                if k / u > EXP_CUTOFF {
                    0.0
                } else {
                    scale * (-k / u).exp()
                }
            }
            Profile::Plateau { delta } => ramp_value((x - self.lo) * delta) * ramp_value((self.hi - x) * delta),
        }
    }

    /// Taylor jet at x up to `order` (≤ 9).
    pub fn jet(&self, x: f64, order: usize) -> Jet {
        if !(x > self.lo && x < self.hi) {
            return Jet::zero(order);
        }
        let xj = Jet::var(x, order);
        match self.profile {
            Profile::Bump { k, scale } => {
                let t = (xj * 2.0 - (self.lo + self.hi)) * (1.0 / (self.hi - self.lo));
                let u = (t * -1.0 + 1.0) * (t + 1.0);
                if k / u.value() > EXP_CUTOFF {
                    return Jet::zero(order);
                }
                (u.recip() * -k).exp() * scale
            }
            Profile::Plateau { delta } => {
                let a = ramp_jet((xj - self.lo) * delta);
                let b = ramp_jet((xj * -1.0 + self.hi) * delta);
                a * b
            }
        }
    }

    /// j-th derivative at x, j ≤ 8.
    pub fn eval(&self, x: f64, deriv_order: usize) -> Result<f64> {
        if deriv_order > MAX_DERIV {
            return Err(Error::UnsupportedOrder(deriv_order));
        }
        if deriv_order == 0 {
            return Ok(self.value(x));
        }
        Ok(self.jet(x, deriv_order).deriv(deriv_order))
    }

    /// ∫ w(x) x^{s-1} dx to about 1e-13 absolute, by panelled Gauss–Legendre
    /// with one doubling as a check.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        let osc = s.im.abs() * (self.hi / self.lo).ln();
        let mut panels = 16 + (osc / 2.0).ceil() as usize;
        let mut prev = self.mellin_panels(s, panels);
        for _ in 0..8 {
            panels *= 2;
            let cur = self.mellin_panels(s, panels);
            if (cur - prev).norm() < 1e-14 * (1.0 + cur.norm()) {
                return cur;
            }
            prev = cur;
        }
        prev
    }

    fn mellin_panels(&self, s: Complex64, panels: usize) -> Complex64 {
        let r = gl20();
        let h = (self.hi - self.lo) / panels as f64;
        let sm1 = s - 1.0;
        let mut acc = crate::quadrature::sum::ComplexNeumaier::default();
        for p in 0..panels {
            let a = self.lo + p as f64 * h;
            let mut part = Complex64::new(0.0, 0.0);
            for (z, w) in r.nodes.iter().zip(&r.weights) {
                let x = a + 0.5 * h * (z + 1.0);
                let v = self.value(x);
                if v != 0.0 {
                    part += w * v * (sm1 * x.ln()).exp();
                }
            }
            acc.add(part * (0.5 * h));
        }
        acc.sum()
    }

    /// ∫ |w'(x)| dx.
    pub fn total_variation(&self) -> f64 {
        match self.profile {
            // Unimodal: twice the peak.
            Profile::Bump { k, scale } => 2.0 * scale * (-k).exp(),
            Profile::Plateau { .. } => 2.0,
        }
    }
}

/// Plateau window ≡ 1 on [lo + 1/Δ, hi - 1/Δ], ramping over width 1/Δ.
pub fn plateau_window(lo: f64, hi: f64, delta: f64) -> Result<SmoothBump> {
    if !(lo < hi) {
        return Err(Error::Parameter(format!("plateau window needs lo < hi, got ({lo}, {hi})")));
    }
    if !(delta >= 4.0 / (hi - lo)) {
        return Err(Error::Parameter(format!(
            "plateau window needs delta >= 4/(hi-lo) = {}, got {delta}",
            4.0 / (hi - lo)
        )));
    }
    Ok(SmoothBump { lo, hi, profile: Profile::Plateau { delta } })
}

/// ramp(u) = B(u) / (B(u) + B(1-u)), B(u) = e^{-1/u}.
fn ramp_value(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let w = 1.0 / u - 1.0 / (1.0 - u);
    if w >= 0.0 {
        let e = (-w).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + w.exp())
    }
}

fn ramp_jet(u: Jet) -> Jet {
    let n = u.order;
    let u0 = u.value();
    if u0 <= 0.0 {
        return Jet::zero(n);
    }
    if u0 >= 1.0 {
        return Jet::constant(1.0, n);
    }
    let w = u.recip() - (u * -1.0 + 1.0).recip();
    // Written as e/(1+e) or 1/(1+e) so the exponential never overflows.
    if w.value() >= 0.0 {
        if w.value() > EXP_CUTOFF {
            return Jet::zero(n);
        }
        let e = (w * -1.0).exp();
        e / (e + 1.0)
    } else {
        if -w.value() > EXP_CUTOFF {
            return Jet::constant(1.0, n);
        }
        let e = w.exp();
        (e + 1.0).recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_examples() {
        let u = SmoothBump::canonical();
        assert_eq!(u.eval(0.5, 0).unwrap(), 0.0);
        assert!((u.eval(1.5, 0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert!(u.eval(1.5, 1).unwrap().abs() < 1e-16);
        assert!(matches!(u.eval(1.5, 9), Err(Error::UnsupportedOrder(9))));
    }

    #[test]
    fn plateau_examples() {
        let v = plateau_window(1.0, 2.0, 8.0).unwrap();
        assert_eq!(v.eval(1.5, 0).unwrap(), 1.0);
        let mid = v.eval(1.0625, 0).unwrap();
        assert!((mid - 0.5).abs() < 1e-15);
        assert!(plateau_window(1.0, 2.0, 3.9).is_err());
    }
}
