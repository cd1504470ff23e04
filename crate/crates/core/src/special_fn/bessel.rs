use super::gamma::ln_gamma;
use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Order of a Bessel function: real (holomorphic kernels) or purely
/// imaginary (Maass kernels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Real(f64),
    Imaginary(f64),
}

impl Order {
    pub fn as_complex(self) -> Complex64 {
        match self {
            Order::Real(v) => Complex64::new(v, 0.0),
            Order::Imaginary(b) => Complex64::new(0.0, b),
        }
    }

    /// ν² is real for both families.
    pub fn nu_sq(self) -> f64 {
        match self {
            Order::Real(v) => v * v,
            Order::Imaginary(b) => -b * b,
        }
    }

    pub fn abs(self) -> f64 {
        match self {
            Order::Real(v) => v.abs(),
            Order::Imaginary(b) => b.abs(),
        }
    }
}

/// Value plus an estimate of its relative error (relative to the local
/// envelope of the function, so it stays meaningful near zeros).
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex64,
    pub rel_err: f64,
}

pub const CROSSOVER: f64 = 30.0;
pub const DEFAULT_TOL: f64 = 1e-11;

/// (ν, j) computed from ν², by the product formula.
pub fn hankel_from_nu_sq(nu_sq: f64, j: usize) -> f64 {
    let mut h = 1.0;
    for i in 1..=j {
        let odd = (2 * i - 1) as f64;
        h *= (4.0 * nu_sq - odd * odd) / (4.0 * i as f64);
    }
    h
}

fn prefactor(nu: Complex64, x: f64) -> Complex64 {
    (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp()
}

/// Ascending series, summed in double-double.
pub fn series(order: Order, x: f64) -> Estimate {
    let nu = order.as_complex();
    let nu_dd = CDd::from_f64(nu.re, nu.im);
    let xx = Dd::from_f64(x).sqr().ldexp(-2);
    let mz = CDd::new(-xx, Dd::ZERO);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut max_term = 1.0f64;
    let mut k = 1usize;
    loop {
        let kk = CDd::from_f64(k as f64, 0.0);
        term = term * mz / (kk * (kk + nu_dd));
        sum = sum + term;
        let t = term.abs_f64();
        max_term = max_term.max(t);
        if k as f64 > x && t < 1e-34 * sum.abs_f64().max(1e-300) {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    let s = sum.to_c64();
    let cancel = max_term / s.norm().max(f64::MIN_POSITIVE);
    Estimate {
        value: prefactor(nu, x) * s,
        rel_err: 4e-16 + 1e-31 * cancel * (k as f64).sqrt(),
    }
}

/// Large-argument Hankel expansion in exponential form, truncated at the
/// smallest term. The error estimate is the first omitted term.
pub fn asymptotic(order: Order, x: f64) -> Estimate {
    let nu = order.as_complex();
    let nu_sq = order.nu_sq();
    // e^{iω} with ω = x - νπ/2 - π/4, keeping x exact inside sin/cos.
    let eix = Complex64::new(x.cos(), x.sin());
    let shift = (-Complex64::i() * (nu * (PI / 2.0) + PI / 4.0)).exp();
    let ep = eix * shift;
    let em = eix.conj() / shift;
    let mut sp = Complex64::new(0.0, 0.0);
    let mut sm = Complex64::new(0.0, 0.0);
    let mut h = 1.0f64;
    let mut ik = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut omitted = f64::INFINITY;
    let lead = ep.norm() + em.norm();
    // Terms may grow at first (large |ν|); only after j passes |ν| is an
    // increase the start of the divergent tail.
    let j_turn = order.abs() + 1.0;
    let mut max_mag = lead;
    for j in 0..400usize {
        if j > 0 {
            let odd = (2 * j - 1) as f64;
            h *= (4.0 * nu_sq - odd * odd) / (4.0 * j as f64 * 2.0 * x);
            ik *= Complex64::i();
        }
        let mag = h.abs() * lead;
        if (j as f64 > j_turn && mag > prev) || mag > 1e30 * lead {
            omitted = mag;
            break;
        }
        sp += ik * h;
        sm += ik.conj() * h;
        prev = mag;
        max_mag = max_mag.max(mag);
        if mag < 1e-18 * lead {
            omitted = mag;
            break;
        }
    }
    let value = (ep * sp + em * sm) / (2.0 * PI * x).sqrt();
    Estimate {
        value,
        rel_err: omitted / lead + 4e-16 * max_mag / lead,
    }
}

/// Backward recurrence from far above the order, normalised by the Neumann
/// series (x/2)^ν / Γ(ν+1) = Σ_k w_k J_{ν+2k}(x).
pub fn miller(order: Order, x: f64) -> Result<Estimate> {
    let (nu0, n) = match order {
        Order::Real(v) => (Complex64::new(v.fract(), 0.0), v.trunc() as usize),
        Order::Imaginary(b) => (Complex64::new(0.0, b), 0usize),
    };
    let big = x.max(order.abs());
    let m = n + (big + 15.0 * big.cbrt() + 40.0).ceil() as usize;
    let m = m + (m % 2);
    if m > 2_000_000 {
        return Err(Error::Resource(format!("backward recurrence needs {m} steps")));
    }
    let mut f = vec![Complex64::new(0.0, 0.0); m + 2];
    f[m] = Complex64::new(1e-300, 0.0);
    for k in (1..=m).rev() {
        let v = (nu0 + k as f64) * (2.0 / x) * f[k] - f[k + 1];
        f[k - 1] = v;
        if v.norm() > 1e250 {
            for y in f[k - 1..].iter_mut() {
                *y *= 1e-250;
            }
        }
    }
    // Neumann normalisation.
    let mut s = f[0];
    let mut s_abs = f[0].norm();
    let mut c = Complex64::new(1.0, 0.0);
    let mut k = 1usize;
    while 2 * k <= m {
        let w = (nu0 + 2.0 * k as f64) * c;
        let t = w * f[2 * k];
        s += t;
        s_abs += t.norm();
        c *= (nu0 + k as f64) / (k as f64 + 1.0);
        k += 1;
    }
    let lhs = prefactor(nu0, x);
    // Divide by the real modulus first: s may be tiny enough that the
    // complex quotient underflows in its norm.
    let sn = s.norm();
    let cancel = s_abs / sn.max(f64::MIN_POSITIVE);
    Ok(Estimate {
        value: (f[n] / sn) * lhs / (s / sn),
        rel_err: 1e-15 * cancel * (m as f64).sqrt(),
    })
}

fn check_args(order: Order, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j needs x > 0, got {x}")));
    }
    match order {
        Order::Real(v) if !(v >= 0.0) => {
            Err(Error::Domain(format!("real order must be >= 0, got {v}")))
        }
        Order::Imaginary(b) if !b.is_finite() => Err(Error::Domain("non-finite order".into())),
        _ => Ok(()),
    }
}

/// J_ν(x) with relative error estimate at most `tol`, or a precision-loss
/// error carrying the best estimate achieved.
pub fn bessel_j_tol(order: Order, x: f64, tol: f64) -> Result<Estimate> {
    check_args(order, x)?;
    let first = if x < CROSSOVER {
        series(order, x)
    } else {
        asymptotic(order, x)
    };
    if first.rel_err <= tol {
        return Ok(first);
    }
    let mut best = first;
    if x >= CROSSOVER && x < 60.0 {
        let s = series(order, x);
        if s.rel_err < best.rel_err {
            best = s;
        }
    }
    if best.rel_err > tol {
        if let Ok(m) = miller(order, x) {
            if m.rel_err < best.rel_err {
                best = m;
            }
        }
    }
    if best.rel_err <= tol {
        Ok(best)
    } else {
        Err(Error::PrecisionLoss { achieved: best.rel_err })
    }
}

pub fn bessel_j(order: Order, x: f64) -> Result<Complex64> {
    bessel_j_tol(order, x, DEFAULT_TOL).map(|e| e.value)
}

/// K_{iβ}(x) from ∫_0^∞ e^{-x cosh t} cos(βt) dt by the trapezoid rule,
/// which converges geometrically for this analytic, doubly decaying integrand.
pub fn bessel_k_imag(beta: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    // Work with e^{x} K to dodge underflow, restore at the end.
    let f = |t: f64| {
        let s = (t / 2.0).sinh();
        (-2.0 * x * s * s).exp() * (beta * t).cos()
    };
    let t_max = 2.0 * (43.0 / (2.0 * x)).sqrt().asinh();
    let mut h = (0.25f64).min(0.5 / (1.0 + beta.abs()));
    let trap = |h: f64| {
        let n = (t_max / h).ceil() as usize;
        let mut s = 0.5 * f(0.0);
        let mut a = s.abs();
        for k in 1..=n {
            let v = f(k as f64 * h);
            s += v;
            a += v.abs();
        }
        (s * h, a * h)
    };
    let (mut prev, _) = trap(h);
    for _ in 0..12 {
        h /= 2.0;
        let (cur, abs) = trap(h);
        let diff = (cur - prev).abs();
        prev = cur;
        if diff <= 1e-15 * abs {
            let cancel = abs / cur.abs().max(f64::MIN_POSITIVE);
            let err = 1e-16 * cancel;
            if err > 1e-10 {
                return Err(Error::PrecisionLoss { achieved: err });
            }
            return Ok(cur * (-x).exp());
        }
    }
    Err(Error::PrecisionLoss { achieved: 1.0 })
}
