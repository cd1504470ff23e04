use bessel_delta::special_fn::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rat_to_f64(r: &BigRational) -> f64 {
    // Scale to a 40-digit integer so the final rounding is the only one.
    let scale = BigInt::from(10u32).pow(40);
    let q = (r.numer() * &scale) / r.denom();
    q.to_string().parse::<f64>().unwrap() / 1e40
}

/// Σ_k (-x²/4)^k / (k!)² exactly, x an integer.
fn j0_exact(x: i64) -> f64 {
    let z = BigRational::from_integer(BigInt::from(-x * x)) / BigRational::from_integer(BigInt::from(4));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 1..400i64 {
        let kk = BigRational::from_integer(BigInt::from(k * k));
        term = term * &z / kk;
        sum += &term;
    }
    rat_to_f64(&sum)
}

/// Gaussian rational for the order-2i series.
#[derive(Clone)]
struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

/// Σ_k (-x²/4)^k / (k! (1+ν)_k) for ν = 2i, exact.
fn series_2i_exact(x: i64, terms: i64) -> Complex64 {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let z = r(-x * x, 4);
    let mut term = GaussRat { re: BigRational::one(), im: BigRational::zero() };
    let mut sum = term.clone();
    for k in 1..terms {
        // 1 / (k (k + 2i)) = (k - 2i) / (k (k² + 4))
        let den = k * (k * k + 4);
        let f = GaussRat { re: &z * r(k, den), im: &z * r(-2, den) };
        term = term.mul(&f);
        sum.re += &term.re;
        sum.im += &term.im;
    }
    Complex64::new(rat_to_f64(&sum.re), rat_to_f64(&sum.im))
}

/// ln Γ(z) by Stirling's series after shifting z up by 30 (independent of
/// the library's Lanczos implementation).
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    for _ in 0..30 {
        shift += w.ln();
        w += 1.0;
    }
    let b = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0];
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let mut p = w;
    for (k, c) in b.iter().enumerate() {
        s += c / p;
        p *= w * w;
        let _ = k;
    }
    s - shift
}

#[test]
fn hankel_symbol_examples() {
    assert_eq!(hankel_symbol(2.7, 0), 1.0);
    assert!((hankel_symbol(1.0, 1) - 0.75).abs() < 1e-16);
    assert_eq!(hankel_symbol(0.5, 1), 0.0);
}

proptest! {
    #[test]
    fn hankel_recursion(nu in 0.0f64..60.0, j in 1usize..=20) {
        let prev = hankel_symbol(nu, j - 1);
        let odd = (2 * j - 1) as f64;
        let want = prev * (4.0 * nu * nu - odd * odd) / (4.0 * j as f64);
        let got = hankel_symbol(nu, j);
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }
}

#[test]
fn j0_against_exact_series() {
    for &x in &[1i64, 10, 100] {
        let want = j0_exact(x);
        let got = bessel_j(Order::Real(0.0), x as f64).unwrap().re;
        // J_0 at these points is O(x^{-1/2}); use an envelope-relative test.
        let env = (2.0 / (PI * x as f64)).sqrt().min(1.0);
        assert!((got - want).abs() <= 1e-10 * env, "x={x}: {got} vs {want}");
    }
}

#[test]
fn imaginary_order_series_and_asymptotic_agree_with_exact() {
    let nu = Complex64::new(0.0, 2.0);
    let x = 50.0f64;
    let pre = (nu * (x / 2.0).ln() - ln_gamma_stirling(nu + 1.0)).exp();
    let want = pre * series_2i_exact(50, 260);
    let asy = bessel_j_asymptotic(Order::Imaginary(2.0), x).value;
    let ser = bessel_j_series(Order::Imaginary(2.0), x).value;
    assert!((asy - want).norm() <= 1e-9 * want.norm(), "{asy} vs {want}");
    assert!((ser - want).norm() <= 1e-9 * want.norm(), "{ser} vs {want}");
}

#[test]
fn branch_consistency_band() {
    let orders = [
        Order::Real(0.0),
        Order::Real(0.5),
        Order::Real(3.3),
        Order::Real(11.0),
        Order::Imaginary(2.0),
        Order::Imaginary(-2.0),
        Order::Imaginary(1.0),
    ];
    for o in orders {
        let mut x = 25.0;
        while x <= 40.0 {
            let a = bessel_j_asymptotic(o, x).value;
            let s = bessel_j_series(o, x).value;
            let env = a.norm().max(s.norm()).max((2.0 / (PI * x)).sqrt() * 0.1);
            assert!((a - s).norm() <= 1e-9 * env, "{o:?} x={x}: {a} vs {s}");
            x += 0.75;
        }
    }
}

#[test]
fn large_order_uses_fallback() {
    // Order 59 at x = 40 is in neither branch's comfort zone.
    let v = bessel_j(Order::Real(59.0), 40.0).unwrap();
    let s = bessel_j_series(Order::Real(59.0), 40.0);
    assert!((v - s.value).norm() <= 1e-10 * s.value.norm());
    let v = bessel_j(Order::Real(59.0), 200.0).unwrap();
    let m = bessel_j_miller(Order::Real(59.0), 200.0).unwrap();
    assert!((v - m.value).norm() <= 1e-10 * (2.0 / (PI * 200.0)).sqrt());
}

#[test]
fn large_argument_against_recurrence() {
    // J_{ν-1} + J_{ν+1} = (2ν/x) J_ν holds far out on the asymptotic branch.
    for &x in &[1e3, 2.5e4, 1e5] {
        let j = |n: f64| bessel_j(Order::Real(n), x).unwrap().re;
        let lhs = j(10.0) + j(12.0);
        let rhs = 22.0 / x * j(11.0);
        assert!((lhs - rhs).abs() <= 1e-10 * (2.0 / (PI * x)).sqrt(), "x={x}");
    }
}

#[test]
fn precision_loss_carries_estimate() {
    // Very large imaginary order near the origin of the oscillatory range.
    match bessel_j_tol(Order::Imaginary(120.0), 31.0, 1e-14) {
        Err(bessel_delta::Error::PrecisionLoss { achieved }) => assert!(achieved > 1e-14),
        Ok(e) => assert!(e.rel_err <= 1e-14),
        Err(e) => panic!("unexpected {e}"),
    }
}

#[test]
fn holomorphic_kernel_is_real_multiple() {
    let k = BesselKernel::holomorphic(12).unwrap();
    let v = kernel_j_g(k, 10.0).unwrap();
    let j11 = bessel_j(Order::Real(11.0), 10.0).unwrap().re;
    assert!((v.re - 2.0 * PI * j11).abs() < 1e-15);
    assert_eq!(v.im, 0.0);
}

#[test]
fn maass_kernel_is_real() {
    let k = BesselKernel::maass(1.0, 1).unwrap();
    for &x in &[0.5, 3.0, 20.0, 29.9, 30.1, 75.0, 1e4] {
        let v = kernel_j_g(k, x).unwrap();
        assert!(v.im.abs() <= 1e-9 * v.norm(), "x={x}: {v}");
    }
}

#[test]
fn expansion_residuals() {
    let cases: [(BesselKernel, usize, f64); 4] = [
        (BesselKernel::holomorphic(12).unwrap(), 4, 200.0),
        (BesselKernel::maass(1.0, 1).unwrap(), 3, 500.0),
        (BesselKernel::holomorphic(12).unwrap(), 2, 1000.0),
        (BesselKernel::maass(1.0, -1).unwrap(), 1, 60.0),
    ];
    for (k, j, y) in cases {
        let exp = asymptotic_kernel_expansion(k, j);
        let direct = kernel_j_g(k, y).unwrap();
        let r = (direct - exp.eval(y)).norm();
        let bound = 1.1 * exp.remainder_constant() * y.powf(-1.5 - j as f64);
        assert!(r <= bound, "{k} J={j} y={y}: residual {r:e} > {bound:e}");
    }
}

#[test]
fn remainder_constants_per_kernel() {
    // The constant is the first omitted coefficient pair, so it grows with
    // the order: modest for Maass mu = 1, large for weight 12.
    let maass = BesselKernel::maass(1.0, 1).unwrap();
    let holo = BesselKernel::holomorphic(12).unwrap();
    assert!(asymptotic_kernel_expansion(maass, 0).remainder_constant() < 11.0);
    assert!(asymptotic_kernel_expansion(maass, 3).remainder_constant() < 60.0);
    assert!(asymptotic_kernel_expansion(holo, 4).remainder_constant() > 1e7);
    for k in [maass, holo] {
        for j in 0..4 {
            let exp = asymptotic_kernel_expansion(k, j);
            let cj = exp.remainder_constant();
            let mut y = 30.0f64;
            while y < 1e4 {
                let r = (kernel_j_g(k, y).unwrap() - exp.eval(y)).norm();
                // Below ~1e-15 y^{-1/2} the residual is rounding noise.
                let noise = 1e-14 * y.powf(-0.5);
                assert!(r <= 1.1 * cj * y.powf(-1.5 - j as f64) + noise, "{k} J={j} y={y}");
                y *= 1.37;
            }
        }
    }
}

#[test]
fn maass_leading_term_matches() {
    let k = BesselKernel::maass(1.0, 1).unwrap();
    let y = 5e4f64;
    let lead = PI.sqrt()
        * (Complex64::new(1.0, 1.0) * Complex64::new(y.cos(), y.sin())
            + Complex64::new(1.0, -1.0) * Complex64::new(y.cos(), -y.sin()))
        / y.sqrt();
    let v = kernel_j_g(k, y).unwrap();
    assert!((v - lead).norm() <= 10.0 * y.powf(-1.5));
}

/// ∫_0^∞ e^{-x cosh t} cos(βt) dt by adaptive Simpson on [0, 12].
fn k_oracle(beta: f64, x: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }
    let f = |t: f64| (-x * t.cosh()).exp() * (beta * t).cos();
    let (a, b) = (0.0, 12.0);
    simpson(&f, a, b, f(a), f(0.5 * (a + b)), f(b), 1e-15, 40)
}

#[test]
fn k_bessel_against_integral_oracle() {
    for &(mu, x) in &[(0.5, 1.0), (1.0, 0.3), (1.0, 4.0), (2.5, 2.0)] {
        let want = k_oracle(2.0 * mu, x);
        let got = bessel_k_imag(2.0 * mu, x).unwrap();
        assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-3), "mu={mu} x={x}: {got} vs {want}");
    }
    let k = BesselKernel::maass(0.5, 1).unwrap();
    let kg = kernel_k_g(k, 1.0).unwrap();
    assert!((kg - 4.0 * (PI * 0.5).cosh() * k_oracle(1.0, 1.0)).abs() < 1e-10);
}

#[test]
fn k_bessel_decay_bound() {
    let k = BesselKernel::maass(1.0, 1).unwrap();
    let v = kernel_k_g(k, 30.0).unwrap();
    let cap = 4.0 * PI.cosh() * (PI / 60.0).sqrt() * (-30.0f64).exp() * 1.1;
    assert!(v.abs() <= cap);
    assert!(v > 0.0);
    assert_eq!(kernel_k_g(BesselKernel::holomorphic(12).unwrap(), 3.0).unwrap(), 0.0);
}
