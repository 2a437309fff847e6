//! Exact Hilbert class polynomials via reduced binary quadratic forms and
//! high-precision evaluation of the modular j-function, using hand-rolled
//! fixed-point big-integer arithmetic (value = mantissa / 2^prec).

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// A class polynomial with exact integer coefficients, low degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPolynomial {
    pub discriminant: i64,
    /// Coefficients c0..cn with cn = 1 (monic), except the constants 0 / 1.
    pub coefficients: Vec<BigInt>,
}

impl ClassPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Evaluates the polynomial at x modulo l.
    pub fn eval_mod(&self, x: u64, l: u64) -> u64 {
        let mut acc: u64 = 0;
        for c in self.coefficients.iter().rev() {
            let cm = crate::nt::mod_u64(c, l);
            acc = ((acc as u128 * x as u128 + cm as u128) % l as u128) as u64;
        }
        acc
    }

    pub fn to_string_pretty(&self) -> String {
        if self.coefficients.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let term = match (i, c) {
                (0, c) => format!("{c}"),
                (1, c) if c.is_one() => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (i, c) if c.is_one() => format!("x^{i}"),
                (i, c) => format!("{c}*x^{i}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(t);
            } else if let Some(stripped) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

/// Reduced primitive binary quadratic forms (a, b, c) of discriminant D < 0:
/// b^2 - 4ac = D, -a < b <= a <= c, b >= 0 when a = c, gcd(a, b, c) = 1.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    assert!(d < 0 && (d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1));
    let mut out = Vec::new();
    let abs = -d;
    let amax = ((abs as f64 / 3.0).sqrt().floor()) as i64 + 1;
    for a in 1..=amax {
        for b in (-a + 1)..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            let g = num_integer::gcd(num_integer::gcd(a, b.abs()), c);
            if g != 1 {
                continue;
            }
            out.push((a, b, c));
        }
    }
    out
}

// ---- fixed-point real arithmetic: value = mantissa / 2^prec ----

fn fx_one(prec: u64) -> BigInt {
    BigInt::one() << prec
}

fn fx_mul(a: &BigInt, b: &BigInt, prec: u64) -> BigInt {
    (a * b) >> prec
}

fn fx_div(a: &BigInt, b: &BigInt, prec: u64) -> BigInt {
    (a << prec) / b
}

/// pi at the given precision (Machin's formula).
fn fx_pi(prec: u64) -> BigInt {
    let p = prec + 32;
    let atan_inv = |x: i64| -> BigInt {
        let x2 = BigInt::from(x) * x;
        let mut term = fx_one(p) / x;
        let mut sum = BigInt::zero();
        let mut k: i64 = 0;
        while !term.is_zero() {
            let contrib = &term / (2 * k + 1);
            if k % 2 == 0 {
                sum += &contrib;
            } else {
                sum -= &contrib;
            }
            term /= &x2;
            k += 1;
        }
        sum
    };
    let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
    pi >> 32
}

/// Integer square root of n at fixed precision: sqrt(n) * 2^prec.
fn fx_sqrt_int(n: u64, prec: u64) -> BigInt {
    (BigInt::from(n) << (2 * prec)).sqrt()
}

/// exp(x) in fixed point, any sign, by halving reduction + Taylor + squaring.
fn fx_exp(x: &BigInt, prec: u64) -> BigInt {
    let p = prec + 64;
    let x = x << 64u8;
    // Halve until |y| < 1/2.
    let half = fx_one(p) >> 1;
    let mut m = 0u32;
    let mut y = x;
    while y.abs() > half {
        y >>= 1;
        m += 1;
    }
    // Taylor.
    let mut term = fx_one(p);
    let mut sum = fx_one(p);
    let mut k: i64 = 1;
    loop {
        term = fx_mul(&term, &y, p) / k;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..m {
        sum = fx_mul(&sum, &sum, p);
    }
    sum >> 64u8
}

/// (cos x, sin x) in fixed point via halving + Taylor + double-angle.
fn fx_sincos(x: &BigInt, prec: u64) -> (BigInt, BigInt) {
    let p = prec + 64;
    let mut y = x << 64u8;
    let half = fx_one(p) >> 1;
    let mut m = 0u32;
    while y.abs() > half {
        y >>= 1;
        m += 1;
    }
    // cos = sum (-1)^k y^(2k)/(2k)!, sin = sum (-1)^k y^(2k+1)/(2k+1)!.
    let y2 = fx_mul(&y, &y, p);
    let mut cos = fx_one(p);
    let mut term = fx_one(p);
    let mut k: i64 = 1;
    loop {
        term = fx_mul(&term, &y2, p) / ((2 * k - 1) * 2 * k);
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            cos -= &term;
        } else {
            cos += &term;
        }
        k += 1;
    }
    let mut sin = y.clone();
    let mut term = y;
    let mut k: i64 = 1;
    loop {
        term = fx_mul(&term, &y2, p) / ((2 * k) * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sin -= &term;
        } else {
            sin += &term;
        }
        k += 1;
    }
    for _ in 0..m {
        let c2 = (fx_mul(&cos, &cos, p) << 1) - fx_one(p);
        let s2 = fx_mul(&cos, &sin, p) << 1;
        cos = c2;
        sin = s2;
    }
    (cos >> 64u8, sin >> 64u8)
}

// ---- fixed-point complex arithmetic ----

#[derive(Debug, Clone)]
struct Cx {
    re: BigInt,
    im: BigInt,
}

impl Cx {
    fn zero() -> Cx {
        Cx {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }
    fn one(prec: u64) -> Cx {
        Cx {
            re: fx_one(prec),
            im: BigInt::zero(),
        }
    }
    fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn sub(&self, o: &Cx) -> Cx {
        Cx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn mul(&self, o: &Cx, prec: u64) -> Cx {
        Cx {
            re: fx_mul(&self.re, &o.re, prec) - fx_mul(&self.im, &o.im, prec),
            im: fx_mul(&self.re, &o.im, prec) + fx_mul(&self.im, &o.re, prec),
        }
    }
    fn scale(&self, k: i64) -> Cx {
        Cx {
            re: &self.re * k,
            im: &self.im * k,
        }
    }
    fn div(&self, o: &Cx, prec: u64) -> Cx {
        let norm = fx_mul(&o.re, &o.re, prec) + fx_mul(&o.im, &o.im, prec);
        let re = fx_mul(&self.re, &o.re, prec) + fx_mul(&self.im, &o.im, prec);
        let im = fx_mul(&self.im, &o.re, prec) - fx_mul(&self.re, &o.im, prec);
        Cx {
            re: fx_div(&re, &norm, prec),
            im: fx_div(&im, &norm, prec),
        }
    }
}

/// j(tau) for tau = (-b + i sqrt(|D|)) / (2a), via the q-expansion
/// j = E4^3 / Delta with Delta = q prod (1 - q^n)^24.
fn j_of_form(a: i64, b: i64, abs_d: u64, prec: u64, pi: &BigInt) -> Cx {
    // q = R (cos t + i sin t), R = exp(-pi sqrt(|D|)/a), t = -pi b / a.
    let sqrt_d = fx_sqrt_int(abs_d, prec);
    let r = fx_exp(&(-(fx_mul(pi, &sqrt_d, prec)) / a), prec);
    let (c, s) = fx_sincos(&(-(pi * b) / a), prec);
    let q = Cx {
        re: fx_mul(&r, &c, prec),
        im: fx_mul(&r, &s, prec),
    };
    // Truncation length: R^N < 2^-(prec+32).
    let rate = std::f64::consts::PI * (abs_d as f64).sqrt() / a as f64; // -ln R
    let nterms = (((prec + 32) as f64) * std::f64::consts::LN_2 / rate).ceil() as usize + 2;
    // sigma_3 values.
    let mut sigma3 = vec![0u64; nterms + 1];
    for d in 1..=nterms {
        let d3 = (d as u64).pow(3);
        let mut m = d;
        while m <= nterms {
            sigma3[m] += d3;
            m += d;
        }
    }
    let mut e4 = Cx::one(prec);
    let mut prod = Cx::one(prec);
    let mut qn = Cx::one(prec);
    for s3 in sigma3.iter().take(nterms + 1).skip(1) {
        qn = qn.mul(&q, prec);
        e4 = e4.add(&qn.scale(240 * *s3 as i64));
        prod = prod.mul(&Cx::one(prec).sub(&qn), prec);
    }
    // Delta = q * prod^24.
    let mut p24 = Cx::one(prec);
    let mut base = prod;
    let mut e = 24u32;
    while e > 0 {
        if e & 1 == 1 {
            p24 = p24.mul(&base, prec);
        }
        base = base.mul(&base, prec);
        e >>= 1;
    }
    let delta = q.mul(&p24, prec);
    let e4cube = e4.mul(&e4, prec).mul(&e4, prec);
    e4cube.div(&delta, prec)
}

/// The classical (ring) class polynomial of one discriminant D < 0,
/// D = 0 or 1 mod 4: the minimal polynomial over the reduced forms of
/// discriminant exactly D. Returns None on precision failure (caller
/// escalates).
fn single_class_poly(d: i64, prec: u64) -> Option<Vec<BigInt>> {
    let forms = reduced_forms(d);
    let pi = fx_pi(prec);
    // Polynomial product (x - j_form), complex fixed-point coefficients.
    let mut coeffs: Vec<Cx> = vec![Cx::one(prec)];
    for (a, b, _c) in &forms {
        let j = j_of_form(*a, *b, (-d) as u64, prec, &pi);
        let mut next: Vec<Cx> = vec![Cx::zero(); coeffs.len() + 1];
        for (i, co) in coeffs.iter().enumerate() {
            // x * co contributes to next[i+1]; -j*co to next[i].
            next[i + 1] = next[i + 1].add(co);
            let t = co.mul(&j, prec);
            next[i] = next[i].sub(&t);
        }
        coeffs = next;
    }
    // Round to integers; verify residuals.
    let tol = BigInt::one() << (prec - 16);
    let mut out = Vec::with_capacity(coeffs.len());
    let half = BigInt::one() << (prec - 1);
    for c in &coeffs {
        if c.im.abs() > tol {
            return None;
        }
        let shifted = &c.re + &half;
        let rounded = shifted >> prec;
        let resid = (&c.re - (&rounded << prec)).abs();
        if resid > tol {
            return None;
        }
        out.push(rounded);
    }
    Some(out)
}

/// Aggregated class polynomial: the product over all orders containing the
/// order of discriminant D, i.e. over D/g^2 with g^2 | D and
/// D/g^2 = 0 or 1 mod 4. By convention the result is 0 for D = 0 and the
/// constant 1 for D = 2, 3 mod 4.
pub fn hilbert_class_poly(d: i64) -> Result<ClassPolynomial> {
    if d > 0 {
        return Err(Error::InvalidInput(format!(
            "class polynomial needs D <= 0, got {d}"
        )));
    }
    if d == 0 {
        return Ok(ClassPolynomial {
            discriminant: 0,
            coefficients: vec![],
        });
    }
    if d.rem_euclid(4) == 2 || d.rem_euclid(4) == 3 {
        return Ok(ClassPolynomial {
            discriminant: d,
            coefficients: vec![BigInt::one()],
        });
    }
    static CACHE: Lazy<Mutex<HashMap<i64, ClassPolynomial>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(hit) = CACHE.lock().unwrap().get(&d) {
        return Ok(hit.clone());
    }
    let mut poly = vec![BigInt::one()];
    let mut g = 1i64;
    while g * g <= -d {
        if d % (g * g) == 0 {
            let e = d / (g * g);
            if e.rem_euclid(4) == 0 || e.rem_euclid(4) == 1 {
                let factor = single_with_escalation(e)?;
                poly = poly_mul(&poly, &factor);
            }
        }
        g += 1;
    }
    let result = ClassPolynomial {
        discriminant: d,
        coefficients: poly,
    };
    CACHE.lock().unwrap().insert(d, result.clone());
    Ok(result)
}

fn single_with_escalation(d: i64) -> Result<Vec<BigInt>> {
    let forms = reduced_forms(d);
    if forms.is_empty() {
        return Ok(vec![BigInt::one()]);
    }
    let sum_inv_a: f64 = forms.iter().map(|(a, _, _)| 1.0 / *a as f64).sum();
    let base = 128.0
        + (std::f64::consts::PI * ((-d) as f64).sqrt() * sum_inv_a / std::f64::consts::LN_2);
    let mut prec = base.ceil() as u64;
    for _ in 0..5 {
        if let Some(poly) = single_class_poly(d, prec) {
            return Ok(poly);
        }
        prec *= 2;
    }
    Err(Error::PrecisionFailure(prec as f64))
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
