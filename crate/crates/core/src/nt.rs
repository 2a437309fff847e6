//! Exact integer number theory helpers shared by every module: valuations,
//! unit parts, Legendre symbols and small modular arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// l-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, l: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of 0");
    let l = BigInt::from(l);
    let mut v = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&l);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// l-adic valuation, with 0 mapped to u32::MAX as a stand-in for infinity.
pub fn valuation_or_inf(n: &BigInt, l: u64) -> u32 {
    if n.is_zero() {
        u32::MAX
    } else {
        valuation(n, l)
    }
}

/// Writes n = l^v * m with l not dividing m and returns (v, m mod l^k),
/// the residue normalized to [0, l^k).
pub fn tilde_parts(n: &BigInt, l: u64, k: u32) -> Result<(u32, u64)> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    assert!(k >= 1, "precision k must be at least 1");
    let v = valuation(n, l);
    let unit = n / BigInt::from(l).pow(v);
    let modulus = BigInt::from(l).pow(k);
    let r = unit.mod_floor(&modulus);
    Ok((v, r.to_u64().expect("residue fits in u64")))
}

/// Unit part of n at l as a full integer (n / l^v).
pub fn unit_part(n: &BigInt, l: u64) -> BigInt {
    n / BigInt::from(l).pow(valuation(n, l))
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> Result<i32> {
    if p == 2 || p < 2 {
        return Err(Error::EvenModulus(p));
    }
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb).to_u64().unwrap();
    Ok(legendre_u64(r, p))
}

/// Legendre symbol with a machine-word residue, a already reduced or not.
pub fn legendre_u64(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let e = pow_mod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Modular exponentiation on machine words (p^2 must fit in u128).
pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb: u128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m128;
        }
        bb = bb * bb % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of a mod m for gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "inverse of non-unit {a} mod {m}");
    t.rem_euclid(m as i128) as u64
}

/// Residue of a BigInt mod a machine word, in [0, m).
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Trial-division primality; adequate for the desk-scale primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 11u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Squarefree test for a small nonzero integer.
pub fn is_squarefree(n: &BigInt) -> bool {
    let mut m = n.abs();
    if m.is_zero() {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            m /= &d;
            if (&m % &d).is_zero() {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Integer square root test: returns Some(r) with r*r = n when n is a
/// perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Prime factorization by trial division (desk-scale inputs).
pub fn factor(n: &BigInt) -> Vec<(u64, u32)> {
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= m {
        if (&m % p).is_zero() {
            let mut e = 0;
            while (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > BigInt::from(1) {
        out.push((m.to_u64().expect("cofactor fits in u64"), 1));
    }
    out
}
