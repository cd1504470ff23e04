//! Batteries of derivative-test certificates over the phase families that
//! show up in the δ-method analysis.
//!
//! A grid expands to a list of cases. Each case is certified independently
//! (in parallel); hypothesis and integration failures are recorded on the
//! case rather than aborting the run. Records come back in grid order.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::certify::{certify_a1, certify_a2, certify_a3, fit_a1_params, Lemma, Spec2d};
use crate::quadrature::certify::DerivativeTestCertificate;
use crate::quadrature::OscillatorySpec;
use crate::windows::SmoothBump;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

const TOL_1D: f64 = 1e-10;
const TOL_2D: f64 = 1e-8;
/// Sample count used to fit λ and ρ before the certificate re-checks them.
const FIT_SAMPLES: usize = 4096;
const FIT_MARGIN: f64 = 1.0 - 1e-6;

/// Parameter grid. Every family lives on [1, 2] (or [1, 2]²) with the
/// canonical bump window, and every phase is in e(·) units: the integrand is
/// e(f) = exp(2πi f).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BoundGrid {
    /// f(y) = -(t/2π) log y + c1 √y + c2 y. For the first lemma, `a` lists
    /// the exponents A to certify.
    LogPhase { t: Vec<f64>, c1: Vec<f64>, c2: Vec<f64>, a: Vec<f64> },
    /// f(x) = t x² + g t x, with g drawn from `g`.
    Quadratic { t: Vec<f64>, g: Vec<f64> },
    /// h(v1, v2) = -(t/2π)(log v1 - log v2) + (t/2π)(c1 v1 + c2 v2)
    ///             + s (√v1 - √v2)² + u (√v1 - √v2), with s = σK.
    /// c = (1/x0, -1/y0) puts a stationary point near (x0, y0).
    HFamily { t: Vec<f64>, k: Vec<f64>, sigma: Vec<f64>, c: Vec<[f64; 2]>, u: Vec<f64> },
}

impl BoundGrid {
    /// Default grids: 36 log-phase cases, 30 quadratic cases, 12 h-family cases.
    pub fn default_for(lemma: Lemma) -> BoundGrid {
        match lemma {
            Lemma::A1 => BoundGrid::LogPhase {
                t: vec![1e2, 1e3, 1e4],
                c1: vec![-0.1, 0.0, 0.1],
                c2: vec![-1.0, 1.0],
                a: vec![1.0, 2.0],
            },
            Lemma::A2 => BoundGrid::Quadratic {
                t: vec![1e2, 1e3, 1e4],
                g: (0..10).map(|i| -0.5 * i as f64).collect(),
            },
            Lemma::A3 => BoundGrid::HFamily {
                t: vec![1e3],
                k: vec![1e2],
                sigma: vec![0.0, 1.0],
                c: vec![[1.0 / 1.5, -1.0 / 1.5], [1.0 / 1.2, -1.0 / 1.8], [1.0 / 1.8, -1.0 / 1.2]],
                u: vec![0.0, 10.0],
            },
        }
    }

    pub fn describe(&self) -> String {
        fn l(v: &[f64]) -> String {
            let s: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
            format!("{{{}}}", s.join(","))
        }
        match self {
            BoundGrid::LogPhase { t, c1, c2, a } => format!(
                "f = -(t/2pi) log y + c1 t sqrt(y) + c2 t y; t in {}, c1 in {}, c2 in {}, A in {}",
                l(t), l(c1), l(c2), l(a)
            ),
            BoundGrid::Quadratic { t, g } => format!("f = t x^2 + g t x; t in {}, g in {}", l(t), l(g)),
            BoundGrid::HFamily { t, k, sigma, c, u } => {
                let cs: Vec<String> = c.iter().map(|p| format!("({},{})", p[0], p[1])).collect();
                format!(
                    "h-family (c in units of t/2pi); t in {}, K in {}, sigma in {}, (c1,c2) in {{{}}}, u in {}",
                    l(t), l(k), l(sigma), cs.join(","), l(u)
                )
            }
        }
    }

    fn cases(&self) -> Vec<BTreeMap<String, f64>> {
        let mut out = Vec::new();
        let mk = |kv: &[(&str, f64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>();
        match self {
            BoundGrid::LogPhase { t, c1, c2, a } => {
                for &t in t {
                    for &c1 in c1 {
                        for &c2 in c2 {
                            for &a in a {
                                out.push(mk(&[("t", t), ("c1", c1 * t), ("c2", c2 * t), ("A", a)]));
                            }
                        }
                    }
                }
            }
            BoundGrid::Quadratic { t, g } => {
                for &t in t {
                    for &g in g {
                        out.push(mk(&[("t", t), ("g", g)]));
                    }
                }
            }
            BoundGrid::HFamily { t, k, sigma, c, u } => {
                for &t in t {
                    for &k in k {
                        for &s in sigma {
                            for c in c {
                                for &u in u {
                                    let a = t / TAU;
                                    out.push(mk(&[("t", t), ("K", k), ("s", s * k), ("c1", c[0] * a), ("c2", c[1] * a), ("u", u)]));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub parameters: BTreeMap<String, f64>,
    pub certificate: Option<DerivativeTestCertificate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBatteryReport {
    pub lemma: Lemma,
    pub cases: usize,
    pub certified: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub grid: String,
    pub records: Vec<CaseRecord>,
}

impl BoundBatteryReport {
    pub fn errors(&self) -> usize {
        self.cases - self.certified
    }
}

fn log_phase(p: &BTreeMap<String, f64>) -> impl Fn(Jet) -> Jet + Send + Sync {
    let (t, c1, c2) = (p["t"], p["c1"], p["c2"]);
    move |y: Jet| (y.ln() * (-t / TAU) + y.sqrt() * c1 + y * c2) * TAU
}

fn quadratic(p: &BTreeMap<String, f64>) -> impl Fn(Jet) -> Jet + Send + Sync {
    let (t, g) = (p["t"], p["g"]);
    move |x: Jet| (x.clone() * x.clone() * t + x * (g * t)) * TAU
}

/// min f'' = min ρ''/(2π) over a dense sample of the window.
fn fit_lambda<P: Fn(Jet) -> Jet>(phase: &P, w: &SmoothBump) -> Result<f64> {
    let h = (w.hi - w.lo) / FIT_SAMPLES as f64;
    let mut m = f64::INFINITY;
    let mut at = w.lo;
    for i in 0..=FIT_SAMPLES {
        let x = w.lo + i as f64 * h;
        let f2 = phase(Jet::var(x, 2)).deriv(2) / TAU;
        if f2 < m {
            m = f2;
            at = x;
        }
    }
    if !(m > 0.0) {
        return Err(Error::Hypothesis { what: "phase".into(), order: 2, point: at });
    }
    Ok(m * FIT_MARGIN)
}

fn one_dim(lemma: Lemma, p: &BTreeMap<String, f64>, quad: bool) -> Result<DerivativeTestCertificate> {
    let w = SmoothBump::canonical();
    let spec = if quad {
        OscillatorySpec::new(w, quadratic(p), TOL_1D)
    } else {
        OscillatorySpec::new(w, log_phase(p), TOL_1D)
    };
    match lemma {
        Lemma::A1 => {
            let a = p.get("A").copied().unwrap_or(1.0);
            let params = fit_a1_params(&spec, a)?;
            certify_a1(&spec, params)
        }
        Lemma::A2 => {
            let lambda = fit_lambda(&spec.phase, &w)?;
            certify_a2(&spec, lambda)
        }
        Lemma::A3 => Err(Error::Parameter("two-dimensional lemma needs the h-family grid".into())),
    }
}

fn h_family_spec<'a>(p: &BTreeMap<String, f64>) -> Spec2d<'a> {
    let (t, s, c1, c2, u) = (p["t"], p["s"], p["c1"], p["c2"], p["u"]);
    let a = t / TAU;
    Spec2d {
        window_x: SmoothBump::canonical(),
        window_y: SmoothBump::canonical(),
        h: Box::new(move |x, y| {
            let d = x.sqrt() - y.sqrt();
            -a * (x.ln() - y.ln()) + c1 * x + c2 * y + s * d * d + u * d
        }),
        grad: Box::new(move |x, y| {
            let (rx, ry) = (x.sqrt(), y.sqrt());
            [
                -a / x + c1 + s * (1.0 - ry / rx) + u / (2.0 * rx),
                a / y + c2 + s * (1.0 - rx / ry) - u / (2.0 * ry),
            ]
        }),
        hessian: Box::new(move |x, y| {
            let (rx, ry) = (x.sqrt(), y.sqrt());
            [
                a / (x * x) + 0.5 * s * ry / (x * rx) - 0.25 * u / (x * rx),
                -0.5 * s / (rx * ry),
                -a / (y * y) + 0.5 * s * rx / (y * ry) + 0.25 * u / (y * ry),
            ]
        }),
        tolerance: TOL_2D,
    }
}

fn two_dim(p: &BTreeMap<String, f64>) -> Result<DerivativeTestCertificate> {
    let spec = h_family_spec(p);
    let n = 256;
    let (mut lam, mut rho, mut det) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let x = 1.0 + i as f64 / n as f64;
            let y = 1.0 + j as f64 / n as f64;
            let [hxx, hxy, hyy] = (spec.hessian)(x, y);
            lam = lam.min(hxx.abs());
            rho = rho.min(hyy.abs());
            det = det.min((hxx * hyy - hxy * hxy).abs());
        }
    }
    if !(lam > 0.0 && rho > 0.0 && det > 0.0) {
        return Err(Error::Hypothesis { what: "det h''".into(), order: 2, point: f64::NAN });
    }
    // Shrink ρ if the determinant is the binding constraint.
    let rho = rho.min(det / lam);
    certify_a3(&spec, lam * FIT_MARGIN, rho * FIT_MARGIN)
}

/// Certify every case of `grid` under `lemma`.
pub fn run_battery(lemma: Lemma, grid: &BoundGrid) -> Result<BoundBatteryReport> {
    let cases = grid.cases();
    if cases.is_empty() {
        return Err(Error::Parameter("empty parameter grid".into()));
    }
    match (lemma, grid) {
        (Lemma::A3, BoundGrid::HFamily { .. }) => {}
        (Lemma::A3, _) | (_, BoundGrid::HFamily { .. }) => {
            return Err(Error::Parameter(format!("lemma {lemma:?} does not apply to this grid family")));
        }
        _ => {}
    }
    let quad = matches!(grid, BoundGrid::Quadratic { .. });
    let records: Vec<CaseRecord> = cases
        .into_par_iter()
        .enumerate()
        .map(|(index, parameters)| {
            let r = match lemma {
                Lemma::A3 => two_dim(&parameters),
                _ => one_dim(lemma, &parameters, quad),
            };
            let (certificate, error) = match r {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CaseRecord { index, parameters, certificate, error }
        })
        .collect();
    Ok(summarize(lemma, grid.describe(), records))
}

/// Fold records into a report. Records are sorted by index first.
pub fn summarize(lemma: Lemma, grid: String, mut records: Vec<CaseRecord>) -> BoundBatteryReport {
    records.sort_by_key(|r| r.index);
    let certs: Vec<&DerivativeTestCertificate> = records.iter().filter_map(|r| r.certificate.as_ref()).collect();
    BoundBatteryReport {
        lemma,
        cases: records.len(),
        certified: certs.len(),
        violations: certs.iter().filter(|c| c.violated).count(),
        max_ratio: certs.iter().map(|c| c.ratio).fold(0.0, f64::max),
        grid,
        records,
    }
}
