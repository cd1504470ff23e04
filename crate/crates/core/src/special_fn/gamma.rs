use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex log-gamma (Lanczos, g = 7). Imaginary part is only defined mod 2π.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_values() {
        assert!((gamma(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(Complex64::new(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(Complex64::new(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn modulus_on_imaginary_line() {
        // |Γ(1 + iy)|² = πy / sinh(πy)
        for &y in &[0.5, 2.0, 7.0, 30.0] {
            let g = gamma(Complex64::new(1.0, y)).norm_sqr();
            let r = PI * y / (PI * y).sinh();
            assert!((g / r - 1.0).abs() < 1e-12, "y = {y}");
        }
    }
}
