//! Dirichlet characters to prime moduli and complete exponential sums.
//!
//! Sums over residues first count how often each root of unity occurs, then
//! add the roots in a fixed order. The result does not depend on the order in
//! which the summation variable is visited.

use crate::error::{Error, Result};
use crate::quadrature::sum::ComplexNeumaier;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

pub const MAX_MODULUS: u64 = 1_000_000;

/// e(j/n) = exp(2πi j/n), reduced exactly before the float step.
pub fn e_frac(j: i64, n: u64) -> Complex64 {
    let r = j.rem_euclid(n as i64) as u64;
    // Fold into [0, n/2] on the real axis to keep the argument small.
    let t = TAU * r as f64 / n as f64;
    if 2 * r > n {
        let t = TAU * (n - r) as f64 / n as f64;
        Complex64::new(t.cos(), -t.sin())
    } else {
        Complex64::new(t.cos(), t.sin())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn reduce(a: i64, q: u64) -> u64 {
    a.rem_euclid(q as i64) as u64
}

/// Inverse of a mod q, if gcd(a, q) = 1.
pub fn mod_inverse(a: i64, q: u64) -> Option<u64> {
    let a = reduce(a, q) as i64;
    let g = a.extended_gcd(&(q as i64));
    if g.gcd != 1 {
        return None;
    }
    Some(reduce(g.x, q))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn primitive_root(q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::Parameter(format!("modulus must be prime, got {q}")));
    }
    if q == 2 {
        return Ok(1);
    }
    let fs = prime_factors(q - 1);
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= q;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        r
    };
    (2..q)
        .find(|&g| fs.iter().all(|&f| pow(g, (q - 1) / f) != 1))
        .ok_or_else(|| Error::Degenerate(format!("no primitive root mod {q}")))
}

#[derive(Debug, Serialize, Deserialize)]
struct LogTable {
    modulus: u64,
    generator: u64,
    /// log[n] for 1 ≤ n < q; log[0] unused.
    log: Vec<u32>,
}

/// χ(n) = e(k·log_g(n)/(q-1)) modulo a prime q, g the least primitive root.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    table: Arc<LogTable>,
    index: u64,
}

impl DirichletCharacter {
    pub fn new(q: u64, index: u64) -> Result<DirichletCharacter> {
        let table = Arc::new(log_table(q)?);
        Ok(DirichletCharacter { index: index % (q - 1), table })
    }

    /// Every character mod q, indices 0..q-1, sharing one table.
    pub fn all(q: u64) -> Result<Vec<DirichletCharacter>> {
        let table = Arc::new(log_table(q)?);
        Ok((0..q - 1).map(|k| DirichletCharacter { table: table.clone(), index: k }).collect())
    }

    pub fn quadratic(q: u64) -> Result<DirichletCharacter> {
        if q == 2 {
            return Err(Error::Parameter("no quadratic character mod 2".into()));
        }
        DirichletCharacter::new(q, (q - 1) / 2)
    }

    pub fn modulus(&self) -> u64 {
        self.table.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn generator(&self) -> u64 {
        self.table.generator
    }

    pub fn order(&self) -> u64 {
        let n = self.modulus() - 1;
        n / self.index.gcd(&n)
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    pub fn is_quadratic(&self) -> bool {
        self.order() == 2
    }

    pub fn conj(&self) -> DirichletCharacter {
        let n = self.modulus() - 1;
        DirichletCharacter { table: self.table.clone(), index: (n - self.index) % n }
    }

    /// Exponent j with χ(n) = e(j/(q-1)), or None when q | n.
    pub fn exponent(&self, n: i64) -> Option<u64> {
        let r = reduce(n, self.modulus());
        if r == 0 {
            return None;
        }
        let n1 = self.modulus() - 1;
        Some((self.table.log[r as usize] as u64 * self.index) % n1)
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.exponent(n) {
            None => Complex64::new(0.0, 0.0),
            Some(j) => e_frac(j as i64, self.modulus() - 1),
        }
    }
}

fn log_table(q: u64) -> Result<LogTable> {
    if q > MAX_MODULUS {
        return Err(Error::Resource(format!("modulus {q} above cap {MAX_MODULUS}")));
    }
    let g = primitive_root(q)?;
    let mut log = vec![0u32; q as usize];
    let mut x = 1u64;
    for k in 0..q - 1 {
        log[x as usize] = k as u32;
        x = x * g % q;
    }
    Ok(LogTable { modulus: q, generator: g, log })
}

/// Σ_j counts[j] e(j/n), added in index order.
fn histogram_sum(counts: &[i64], n: u64) -> Complex64 {
    let mut acc = ComplexNeumaier::default();
    for (j, &c) in counts.iter().enumerate() {
        if c != 0 {
            acc.add(e_frac(j as i64, n) * c as f64);
        }
    }
    acc.sum()
}

/// R_q(a) for prime q: q-1 if q | a, else -1.
pub fn ramanujan_sum(q: u64, a: i64) -> Result<i64> {
    if !is_prime(q) {
        return Err(Error::Parameter(format!("ramanujan_sum needs a prime modulus, got {q}; use ramanujan_sum_brute")));
    }
    Ok(if reduce(a, q) == 0 { q as i64 - 1 } else { -1 })
}

/// Σ*_{z mod c} e(az/c) by direct summation, any c ≥ 1.
pub fn ramanujan_sum_brute(c: u64, a: i64) -> f64 {
    let mut counts = vec![0i64; c as usize];
    for z in 1..=c {
        if z.gcd(&c) == 1 {
            counts[((reduce(a, c) as u128 * z as u128) % c as u128) as usize] += 1;
        }
    }
    histogram_sum(&counts, c).re
}

/// g_χ = Σ_{β mod q} χ(β) e(β/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::Degenerate("Gauss sum of the principal character".into()));
    }
    let q = chi.modulus();
    let mut acc = ComplexNeumaier::default();
    for b in 1..q {
        acc.add(chi.value(b as i64) * e_frac(b as i64, q));
    }
    Ok(acc.sum())
}

/// S(a, b; c) = Σ*_{x mod c} e((ax + b x̄)/c).
pub fn kloosterman(a: i64, b: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::Parameter("kloosterman needs c >= 1".into()));
    }
    let (a, b) = (reduce(a, c) as u128, reduce(b, c) as u128);
    let mut counts = vec![0i64; c as usize];
    for x in 1..=c {
        if let Some(xi) = mod_inverse(x as i64, c) {
            let t = (a * x as u128 + b * xi as u128) % c as u128;
            counts[t as usize] += 1;
        }
    }
    Ok(histogram_sum(&counts, c).re)
}

/// Arguments of the character sum 𝔠 with χ modulo a prime q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrakCArgs {
    pub r1: i64,
    pub r2: i64,
    pub alpha: i64,
    pub gamma: i64,
    pub m: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrakC {
    Value(Complex64),
    /// Generic case: only a bound O(q^{1/2}) is known.
    NotApplicable,
}

fn check_frak(chi: &DirichletCharacter, q: u64, x: &FrakCArgs) -> Result<()> {
    if chi.modulus() != q {
        return Err(Error::Parameter(format!("character modulus {} differs from q = {q}", chi.modulus())));
    }
    if q <= 3 {
        return Err(Error::Parameter(format!("q must be a prime > 3, got {q}")));
    }
    if reduce(x.alpha, q) == 0 || reduce(x.gamma, q) == 0 {
        return Err(Error::Parameter(format!("need gcd(alpha*gamma, q) = 1, got {x:?}")));
    }
    Ok(())
}

/// 𝔠 = Σ_{z ∈ F_q^×, (m + γ z̄, q) = 1} χ̄(r₁ + z) χ(r₂ + α·(m + γ z̄)⁻¹).
pub fn frak_c_bruteforce(chi: &DirichletCharacter, q: u64, x: FrakCArgs) -> Result<Complex64> {
    check_frak(chi, q, &x)?;
    let n1 = q - 1;
    let mut counts = vec![0i64; n1 as usize];
    let (m, g, al) = (reduce(x.m, q), reduce(x.gamma, q), reduce(x.alpha, q));
    for z in 1..q {
        let zi = mod_inverse(z as i64, q).expect("prime modulus");
        let t = (m + g * zi) % q;
        if t == 0 {
            continue;
        }
        let ti = mod_inverse(t as i64, q).expect("unit");
        let u = reduce(x.r1 + z as i64, q);
        let v = (reduce(x.r2, q) + al * ti) % q;
        if let (Some(eu), Some(ev)) = (chi.exponent(u as i64), chi.exponent(v as i64)) {
            counts[((ev + n1 - eu) % n1) as usize] += 1;
        }
    }
    Ok(histogram_sum(&counts, n1))
}

/// Closed forms where they exist: q | m, or the double-root case.
///
/// In the double-root case with χ quadratic the sum is
/// (q-1)χ(m̄r₂γ) - χ(mr₂γ̄); the non-quadratic value -χ(mr₂γ̄) is the same
/// expression without the first term.
pub fn frak_c_closed(chi: &DirichletCharacter, q: u64, x: FrakCArgs) -> Result<FrakC> {
    check_frak(chi, q, &x)?;
    if reduce(x.r1, q) == 0 || reduce(x.r2, q) == 0 {
        return Err(Error::Parameter(format!("need gcd(r1*r2, q) = 1, got {x:?}")));
    }
    let inv = |a: i64| mod_inverse(a, q).expect("checked unit") as i64;
    let qi = q as i64;
    if reduce(x.m, q) == 0 {
        let ag = x.alpha.rem_euclid(qi) * inv(x.gamma) % qi;
        let r = ramanujan_sum(q, x.r2 - x.r1.rem_euclid(qi) * ag % qi)? as f64;
        let v = chi.value(ag) * r - chi.value(x.r2.rem_euclid(qi) * inv(x.r1) % qi);
        return Ok(FrakC::Value(v));
    }
    let mi = inv(x.m);
    let c1 = reduce(x.r1 - mi * x.gamma.rem_euclid(qi), q);
    let c2 = reduce(x.r2 + mi * x.alpha.rem_euclid(qi), q);
    if c1 != 0 || c2 != 0 {
        return Ok(FrakC::NotApplicable);
    }
    let r2 = x.r2.rem_euclid(qi);
    let base = -chi.value(x.m.rem_euclid(qi) * r2 % qi * inv(x.gamma) % qi);
    if chi.is_quadratic() {
        let extra = chi.value(mi * r2 % qi * x.gamma.rem_euclid(qi) % qi) * (q - 1) as f64;
        Ok(FrakC::Value(extra + base))
    } else {
        Ok(FrakC::Value(base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(ramanujan_sum(5, 0).unwrap(), 4);
        assert_eq!(ramanujan_sum(5, 3).unwrap(), -1);
        assert!((ramanujan_sum_brute(6, 2) + 1.0).abs() < 1e-14);
        assert!((kloosterman(1, 1, 5).unwrap() - 0.381966011250105).abs() < 1e-12);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(4, 8), None);
    }
}
