//! Ramanujan τ(n) from Δ = q ∏(1 - qⁿ)^24.
//!
//! ∏(1 - qⁿ)³ = Σ_k (-1)^k (2k+1) q^{k(k+1)/2} is sparse, so the 8th power is
//! built with the power recurrence n f_n = Σ_j (9j - n) g_j f_{n-j}, which
//! costs O(n^{3/2}). The recurrence runs modulo four primes below 2³¹ and the
//! residues are recombined exactly; |τ(n)| ≤ d(n) n^{11/2} stays far below
//! half the product of the primes for n ≤ 10⁶.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const TAU_MAX: usize = 1_000_000;
pub const CACHE_ENV: &str = "BDELTA_CACHE_DIR";

/// Default residue primes (all below 2³¹).
pub const PRIMES: [u64; 4] = [2_147_483_647, 2_147_483_629, 2_147_483_587, 2_147_483_579];
/// A disjoint set, for cross-checking.
pub const ALT_PRIMES: [u64; 4] = [2_147_483_563, 2_147_483_549, 2_147_483_543, 2_147_483_497];

/// Nonzero coefficients (index, value) of ∏(1 - qⁿ)³ up to q^limit.
fn jacobi_cube(limit: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e > limit {
            break;
        }
        let v = (2 * k + 1) as i64;
        out.push((e, if k % 2 == 0 { v } else { -v }));
        k += 1;
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Coefficients of ∏(1 - qⁿ)^24 modulo each prime, indices 0..len. The four
/// residue channels are interleaved so one pass over the sparse factor
/// serves all of them.
fn eta24_mod(len: usize, primes: &[u64; 4]) -> Vec<[u32; 4]> {
    let g = jacobi_cube(len);
    let mut inv = vec![[0u64; 4]; len.max(2)];
    inv[1] = [1; 4];
    for n in 2..len {
        for (c, &p) in primes.iter().enumerate() {
            inv[n][c] = (p - (p / n as u64) * inv[(p % n as u64) as usize][c] % p) % p;
        }
    }
    let mut f = vec![[0u32; 4]; len];
    if len > 0 {
        f[0] = [1; 4];
    }
    for n in 1..len {
        // 9 Σ j g_j f_{n-j} - n Σ g_j f_{n-j}; each product stays below 2⁶³.
        let mut s0 = [0i64; 4];
        let mut s1 = [0i128; 4];
        for &(j, gj) in &g[1..] {
            if j > n {
                break;
            }
            let fv = f[n - j];
            for c in 0..4 {
                let t = gj * fv[c] as i64;
                s0[c] += t;
                s1[c] += (t * j as i64) as i128;
            }
        }
        for (c, &p) in primes.iter().enumerate() {
            let v = (9 * s1[c] - n as i128 * s0[c] as i128).rem_euclid(p as i128) as u64;
            f[n][c] = (v * inv[n][c] % p) as u32;
        }
    }
    f
}

/// Garner recombination to the symmetric range.
fn crt(res: &[u64], primes: &[u64]) -> i128 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for (&r, &p) in res.iter().zip(primes) {
        let xm = (x % p as u128) as u64;
        let minv = pow_mod((m % p as u128) as u64, p - 2, p);
        let t = ((r + p - xm) % p) * minv % p;
        x += t as u128 * m;
        m *= p as u128;
    }
    if x > m / 2 {
        -((m - x) as i128)
    } else {
        x as i128
    }
}

/// τ(1..=n_max) at indices 1..=n_max; index 0 holds 0.
pub fn tau_table(n_max: usize) -> Result<Vec<i128>> {
    tau_table_with_primes(n_max, &PRIMES)
}

pub fn tau_table_with_primes(n_max: usize, primes: &[u64; 4]) -> Result<Vec<i128>> {
    if n_max > TAU_MAX {
        return Err(Error::Resource(format!("tau table size {n_max} above cap {TAU_MAX}")));
    }
    let f = eta24_mod(n_max, primes);
    let mut out = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        out[n] = crt(&f[n - 1].map(u64::from), primes);
    }
    Ok(out)
}

pub fn cache_path(dir: &Path, n_max: usize) -> PathBuf {
    dir.join(format!("tau_{n_max}.bin"))
}

/// Cache layout: u64 count, then per value a u32 byte length and the
/// signed little-endian two's complement bytes. All integers little-endian.
pub fn encode_cache(table: &[i128]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(table.len() * 16);
    buf.extend_from_slice(&(table.len() as u64).to_le_bytes());
    for &v in table {
        let b = BigInt::from(v).to_signed_bytes_le();
        buf.extend_from_slice(&(b.len() as u32).to_le_bytes());
        buf.extend_from_slice(&b);
    }
    buf
}

pub fn write_cache(path: &Path, table: &[i128]) -> Result<()> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::File::create(&tmp)?.write_all(&encode_cache(table))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<Vec<i128>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_cache(&buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn decode_cache(buf: &[u8]) -> Result<Vec<i128>> {
    let bad = |what: &str| Error::Io(format!("malformed tau cache ({what})"));
    let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
        let s = buf.get(*pos..*pos + n).ok_or_else(|| bad("truncated"))?;
        *pos += n;
        Ok(s)
    };
    let mut pos = 0;
    let count = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
    if count > TAU_MAX + 1 {
        return Err(bad("count"));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let v = BigInt::from_signed_bytes_le(take(&mut pos, len)?);
        out.push(i128::try_from(v).map_err(|_| bad("value exceeds 128 bits"))?);
    }
    if pos != buf.len() {
        return Err(bad("trailing bytes"));
    }
    Ok(out)
}

/// Table from the cache directory in BDELTA_CACHE_DIR when present and
/// valid; otherwise computed, and written back on a best-effort basis.
pub fn tau_table_cached(n_max: usize) -> Result<Vec<i128>> {
    let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    Ok(tau_table_in(dir.as_deref(), n_max)?.0)
}

/// Like [`tau_table_cached`] with an explicit directory. The flag reports
/// whether the table came from the cache.
pub fn tau_table_in(dir: Option<&Path>, n_max: usize) -> Result<(Vec<i128>, bool)> {
    if let Some(d) = dir {
        if let Ok(t) = read_cache(&cache_path(d, n_max)) {
            if t.len() == n_max + 1 {
                return Ok((t, true));
            }
        }
    }
    let t = tau_table(n_max)?;
    if let Some(d) = dir {
        let _ = write_cache(&cache_path(d, n_max), &t);
    }
    Ok((t, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let t = tau_table(10).unwrap();
        assert_eq!(&t[1..], &[1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]);
    }

    #[test]
    fn crt_signs() {
        let p = [7u64, 11, 13, 17];
        for x in [-8508i128, -1, 0, 5, 8508] {
            let r: Vec<u64> = p.iter().map(|&q| x.rem_euclid(q as i128) as u64).collect();
            assert_eq!(crt(&r, &p), x);
        }
    }
}
