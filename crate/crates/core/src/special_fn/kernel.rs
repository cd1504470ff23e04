use super::bessel::{bessel_j_tol, bessel_k_imag, hankel_from_nu_sq, Order, DEFAULT_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// The Bessel kernel attached to a GL(2) cusp form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BesselKernel {
    Holomorphic { kappa: u32 },
    Maass { mu: f64, epsilon: i8 },
}

impl BesselKernel {
    pub fn holomorphic(kappa: u32) -> Result<Self> {
        if kappa < 4 || kappa % 2 != 0 {
            return Err(Error::Parameter(format!(
                "holomorphic weight must be an even integer >= 4, got {kappa}"
            )));
        }
        Ok(BesselKernel::Holomorphic { kappa })
    }

    /// Tempered Maass kernel. The complementary series is not supported.
    pub fn maass(mu: f64, epsilon: i8) -> Result<Self> {
        if !(mu > 0.0) || mu > 100.0 {
            return Err(Error::Parameter(format!(
                "spectral parameter must satisfy 0 < mu <= 100, got {mu}"
            )));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Parameter(format!("reflection sign must be +-1, got {epsilon}")));
        }
        Ok(BesselKernel::Maass { mu, epsilon })
    }

    /// ν² of the underlying Bessel order (the same for ±2iμ).
    pub fn nu_sq(&self) -> f64 {
        match *self {
            BesselKernel::Holomorphic { kappa } => {
                let nu = kappa as f64 - 1.0;
                nu * nu
            }
            BesselKernel::Maass { mu, .. } => -4.0 * mu * mu,
        }
    }

    /// Kernel parameter: κ or μ.
    pub fn parameter(&self) -> f64 {
        match *self {
            BesselKernel::Holomorphic { kappa } => kappa as f64,
            BesselKernel::Maass { mu, .. } => mu,
        }
    }
}

impl fmt::Display for BesselKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BesselKernel::Holomorphic { kappa } => write!(f, "holo:{kappa}"),
            BesselKernel::Maass { mu, epsilon } => write!(f, "maass:{mu}:{epsilon}"),
        }
    }
}

/// Parses `holo:<kappa>` or `maass:<mu>[:<epsilon>]`.
impl FromStr for BesselKernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parameter(format!("cannot parse kernel '{s}'"));
        match parts.as_slice() {
            ["holo", k] => BesselKernel::holomorphic(k.parse().map_err(|_| bad())?),
            ["maass", m] => BesselKernel::maass(m.parse().map_err(|_| bad())?, 1),
            ["maass", m, e] => {
                BesselKernel::maass(m.parse().map_err(|_| bad())?, e.parse().map_err(|_| bad())?)
            }
            _ => Err(bad()),
        }
    }
}

/// (ν, j) = (4ν²-1)(4ν²-9)...(4ν²-(2j-1)²) / (4^j j!).
pub fn hankel_symbol(nu: f64, j: usize) -> f64 {
    hankel_from_nu_sq(nu * nu, j)
}

fn e(z: Complex64) -> Complex64 {
    (Complex64::i() * 2.0 * PI * z).exp()
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficients a_j(ν), b_j(ν) of J_ν(x) ≈ Σ (a_j e^{ix} + b_j e^{-ix}) x^{-j-1/2}.
pub fn bessel_coefficients(nu: Complex64, j: usize) -> (Complex64, Complex64) {
    let h = hankel_from_nu_sq((nu * nu).re, j);
    let norm = h / ((2.0 * PI).sqrt() * 2f64.powi(j as i32));
    let a = i_pow(j as u32) * e(-(2.0 * nu + 1.0) / 8.0) * norm;
    let b = i_pow((4 - j % 4) as u32) * e((2.0 * nu + 1.0) / 8.0) * norm;
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub kernel: BesselKernel,
    pub j_max: usize,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
}

impl AsymptoticCoefficients {
    /// Σ_{j≤J} [c_j e^{iy} + d_j e^{-iy}] y^{-j-1/2}.
    pub fn eval(&self, y: f64) -> Complex64 {
        let (p, m) = self.amplitudes(y);
        let eiy = Complex64::new(y.cos(), y.sin());
        p * eiy + m * eiy.conj()
    }

    /// C_J with |J_g(y) - expansion_J(y)| ≈ C_J y^{-3/2-J}: the size of the
    /// first omitted pair, |c_{J+1}| + |d_{J+1}|.
    pub fn remainder_constant(&self) -> f64 {
        let next = asymptotic_kernel_expansion(self.kernel, self.j_max + 1);
        next.c[self.j_max + 1].norm() + next.d[self.j_max + 1].norm()
    }

    /// The two slowly varying amplitudes multiplying e^{±iy}.
    pub fn amplitudes(&self, y: f64) -> (Complex64, Complex64) {
        let r = 1.0 / y;
        let mut p = Complex64::new(0.0, 0.0);
        let mut m = Complex64::new(0.0, 0.0);
        for j in (0..=self.j_max).rev() {
            p = p * r + self.c[j];
            m = m * r + self.d[j];
        }
        let s = r.sqrt();
        (p * s, m * s)
    }
}

/// c_j, d_j for J_g(y) = Σ [c_j e(y/2π) + d_j e(-y/2π)] y^{-j-1/2} + O(y^{-3/2-J}).
pub fn asymptotic_kernel_expansion(kernel: BesselKernel, j_max: usize) -> AsymptoticCoefficients {
    let mut c = Vec::with_capacity(j_max + 1);
    let mut d = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let (cj, dj) = match kernel {
            BesselKernel::Holomorphic { kappa } => {
                let pre = i_pow(kappa) * 2.0 * PI;
                let (a, b) = bessel_coefficients(Complex64::new(kappa as f64 - 1.0, 0.0), j);
                (pre * a, pre * b)
            }
            BesselKernel::Maass { mu, .. } => {
                let pre = Complex64::new(0.0, PI / (PI * mu).sinh());
                let (ap, bp) = bessel_coefficients(Complex64::new(0.0, 2.0 * mu), j);
                let (am, bm) = bessel_coefficients(Complex64::new(0.0, -2.0 * mu), j);
                (pre * (ap - am), pre * (bp - bm))
            }
        };
        c.push(cj);
        d.push(dj);
    }
    AsymptoticCoefficients { kernel, j_max, c, d }
}

/// J_g(x): 2π i^κ J_{κ-1}(x), or (-π / sin(πiμ)) (J_{2iμ}(x) - J_{-2iμ}(x)).
pub fn kernel_j_g(kernel: BesselKernel, x: f64) -> Result<Complex64> {
    match kernel {
        BesselKernel::Holomorphic { kappa } => {
            let j = bessel_j_tol(Order::Real(kappa as f64 - 1.0), x, DEFAULT_TOL)?.value;
            Ok(i_pow(kappa) * 2.0 * PI * j)
        }
        BesselKernel::Maass { mu, .. } => {
            let jp = bessel_j_tol(Order::Imaginary(2.0 * mu), x, DEFAULT_TOL)?.value;
            let jm = bessel_j_tol(Order::Imaginary(-2.0 * mu), x, DEFAULT_TOL)?.value;
            // sin(πiμ) = i sinh(πμ)
            let pre = -PI / Complex64::new(0.0, (PI * mu).sinh());
            Ok(pre * (jp - jm))
        }
    }
}

/// K_g(x) = 4 ε cosh(πμ) K_{2iμ}(x); identically 0 for holomorphic forms.
pub fn kernel_k_g(kernel: BesselKernel, x: f64) -> Result<f64> {
    match kernel {
        BesselKernel::Holomorphic { .. } => {
            if !(x > 0.0) {
                return Err(Error::Domain(format!("kernel_k_g needs x > 0, got {x}")));
            }
            Ok(0.0)
        }
        BesselKernel::Maass { mu, epsilon } => {
            let k = bessel_k_imag(2.0 * mu, x)?;
            Ok(4.0 * epsilon as f64 * (PI * mu).cosh() * k)
        }
    }
}
