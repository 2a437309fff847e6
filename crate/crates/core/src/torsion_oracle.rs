//! Brute-force ground truth: explicit p-torsion of elliptic curves over
//! finite fields, the Weil pairing via Miller's algorithm, Frobenius
//! matrices in symplectic bases, and direct symplectic-type determination
//! by enumerating intertwining matrices and inspecting their determinants.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::curve_core::WeierstrassModel;
use crate::error::{Error, Result};
use crate::goodred::FpCurve;
use crate::nt;

/// Oracle guard: torsion primes above this are refused.
pub const MAX_ORACLE_P: u64 = 19;
/// Oracle guard: torsion-field degrees above this are refused.
pub const MAX_FIELD_DEGREE: usize = 64;

/// The two possible symplectic types of a p-torsion isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymplecticType {
    Symplectic,
    AntiSymplectic,
}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over F_l (dense, low-degree-first coefficient vectors)
// ---------------------------------------------------------------------------

fn ptrim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + *x as u128 * *y as u128) % l as u128) as u64;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial m.
fn prem(a: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    let d = m.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, c) in m.iter().enumerate().take(d) {
                let t = (lead as u128 * *c as u128) % l as u128;
                r[shift + i] = ((r[shift + i] as u128 + l as u128 - t) % l as u128) as u64;
            }
        }
        r.pop();
        ptrim(&mut r);
        if r.len() <= d {
            break;
        }
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        // Make b monic, then replace (a, b) by (b, a mod b).
        let inv = nt::inv_mod(*b.last().unwrap(), l);
        let monic: Vec<u64> = b
            .iter()
            .map(|c| ((*c as u128 * inv as u128) % l as u128) as u64)
            .collect();
        let mut r = prem(&a, &monic, l);
        ptrim(&mut r);
        a = monic;
        b = r;
    }
    if let Some(lead) = a.last().copied() {
        if lead != 1 {
            let inv = nt::inv_mod(lead, l);
            for c in a.iter_mut() {
                *c = ((*c as u128 * inv as u128) % l as u128) as u64;
            }
        }
    }
    a
}

fn psub(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + l - y) % l;
    }
    ptrim(&mut out);
    out
}

/// base^(l) mod m by square-and-multiply on the exponent l.
fn ppow_l(base: &[u64], e: u64, m: &[u64], l: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = prem(base, m, l);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = prem(&pmul(&result, &b, l), m, l);
        }
        b = prem(&pmul(&b, &b, l), m, l);
        e >>= 1;
    }
    result
}

/// Is x^k + sum coeffs[i] x^i irreducible over F_l?
fn is_irreducible(coeffs_low: &[u64], l: u64) -> bool {
    let k = coeffs_low.len();
    let mut m = coeffs_low.to_vec();
    m.push(1);
    // powers[i] = x^(l^(i+1)) mod m, i = 0..k-1.
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut powers = Vec::with_capacity(k);
    for _ in 0..k {
        h = ppow_l(&h, l, &m, l);
        powers.push(h.clone());
    }
    if powers[k - 1] != prem(&x, &m, l) {
        return false;
    }
    let mut kk = k;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= kk {
        if kk % d == 0 {
            primes.push(d);
            while kk % d == 0 {
                kk /= d;
            }
        }
        d += 1;
    }
    if kk > 1 {
        primes.push(kk);
    }
    for r in primes {
        let g = pgcd(&psub(&powers[k / r - 1], &x, l), &m, l);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// The finite field F_{l^k} with canonical modulus
// ---------------------------------------------------------------------------

/// An element is a coefficient vector of length k, low degree first.
pub type Fq = Vec<u64>;

/// F_{l^k} represented as F_l[x] modulo the lexicographically smallest monic
/// irreducible of degree k (coefficients compared constant term first).
#[derive(Debug, Clone)]
pub struct FqField {
    pub l: u64,
    pub k: usize,
    /// Monic modulus, low degree first, length k + 1.
    pub modulus: Vec<u64>,
    /// Cached quadratic non-residue (lex-smallest), used by sqrt.
    nonresidue: std::cell::OnceCell<Fq>,
}

impl FqField {
    pub fn new(l: u64, k: usize) -> Result<FqField> {
        if k == 0 || k > MAX_FIELD_DEGREE {
            return Err(Error::ResourceBound(format!(
                "field degree {k} outside 1..={MAX_FIELD_DEGREE}"
            )));
        }
        if !nt::is_prime(l) {
            return Err(Error::InvalidInput(format!("{l} is not prime")));
        }
        // Lexicographic scan over (a_0, ..., a_{k-1}), a_0 most significant.
        // For k >= 2 a zero constant term means divisibility by x, so the
        // scan starts at a_0 = 1 (skipping l^(k-1) reducible candidates).
        let mut digits = vec![0u64; k];
        if k >= 2 {
            digits[0] = 1;
        }
        loop {
            if is_irreducible(&digits, l) {
                let mut modulus = digits.clone();
                modulus.push(1);
                return Ok(FqField {
                    l,
                    k,
                    modulus,
                    nonresidue: std::cell::OnceCell::new(),
                });
            }
            // Increment the least significant digit a_{k-1}.
            let mut i = k;
            loop {
                if i == 0 {
                    return Err(Error::ResourceBound(format!(
                        "no irreducible of degree {k} over F_{l} found"
                    )));
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < l {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.k]
    }
    pub fn one(&self) -> Fq {
        let mut e = vec![0; self.k];
        e[0] = 1;
        e
    }
    pub fn from_u64(&self, n: u64) -> Fq {
        let mut e = vec![0; self.k];
        e[0] = n % self.l;
        e
    }
    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|c| *c == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        (0..self.k).map(|i| (a[i] + b[i]) % self.l).collect()
    }
    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        (0..self.k).map(|i| (a[i] + self.l - b[i]) % self.l).collect()
    }
    pub fn neg(&self, a: &Fq) -> Fq {
        (0..self.k).map(|i| (self.l - a[i]) % self.l).collect()
    }
    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let prod = pmul(a, b, self.l);
        self.pad(prem(&prod, &self.modulus, self.l))
    }
    fn pad(&self, mut v: Vec<u64>) -> Fq {
        v.resize(self.k, 0);
        v
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: &Fq) -> Result<Fq> {
        if self.is_zero(a) {
            return Err(Error::ZeroInput);
        }
        let l = self.l;
        // Extended gcd of a and modulus over F_l[x].
        let mut r0 = self.modulus.clone();
        let mut r1 = a.clone();
        ptrim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // Divide r0 by r1.
            let mut q: Vec<u64> = vec![];
            let mut rem = r0.clone();
            let inv_lead = nt::inv_mod(*r1.last().unwrap(), l);
            while rem.len() >= r1.len() && !rem.is_empty() {
                let shift = rem.len() - r1.len();
                let coef = ((*rem.last().unwrap() as u128 * inv_lead as u128) % l as u128) as u64;
                if q.len() < shift + 1 {
                    q.resize(shift + 1, 0);
                }
                q[shift] = (q[shift] + coef) % l;
                for (i, c) in r1.iter().enumerate() {
                    let t = (coef as u128 * *c as u128 % l as u128) as u64;
                    rem[shift + i] = (rem[shift + i] + l - t) % l;
                }
                ptrim(&mut rem);
            }
            let s_new = psub(&s0, &pmul(&q, &s1, l), l);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_new;
        }
        // r0 = gcd (a nonzero constant since modulus is irreducible).
        debug_assert_eq!(r0.len(), 1);
        let c = nt::inv_mod(r0[0], l);
        let out: Vec<u64> = s0
            .iter()
            .map(|x| ((*x as u128 * c as u128) % l as u128) as u64)
            .collect();
        Ok(self.pad(prem(&out, &self.modulus, l)))
    }

    pub fn div(&self, a: &Fq, b: &Fq) -> Result<Fq> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Fq, e: &BigUint) -> Fq {
        let mut result = self.one();
        let mut base = a.clone();
        for i in 0..e.bits() {
            if e.bit(i) {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
        }
        result
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.l).pow(self.k as u32)
    }

    /// Lexicographic comparison, coefficient a_0 most significant.
    pub fn lex_less(&self, a: &Fq, b: &Fq) -> bool {
        a < b
    }

    /// Advances e to the lexicographic successor; false on wrap-around.
    pub fn next_elem(&self, e: &mut Fq) -> bool {
        let mut i = self.k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            e[i] += 1;
            if e[i] < self.l {
                return true;
            }
            e[i] = 0;
        }
    }

    /// Square root by Tonelli–Shanks; None for non-residues.
    pub fn sqrt(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let one = self.one();
        let minus_one = self.neg(&one);
        let q1 = self.order() - BigUint::one();
        let half = &q1 >> 1u8;
        let euler = self.pow(a, &half);
        if euler == minus_one {
            return None;
        }
        debug_assert_eq!(euler, one, "field element outside the unit group");
        // q - 1 = 2^s * m with m odd.
        let s = q1.trailing_zeros().unwrap_or(0);
        let m = &q1 >> s;
        // Deterministic non-residue, cached: scan in lexicographic order.
        let nonres = self
            .nonresidue
            .get_or_init(|| {
                let mut z = self.zero();
                loop {
                    if !self.next_elem(&mut z) {
                        unreachable!("finite field has quadratic non-residues");
                    }
                    if self.pow(&z, &half) == minus_one {
                        break z;
                    }
                }
            })
            .clone();
        let mut c = self.pow(&nonres, &m);
        let mut t = self.pow(a, &m);
        let mut r = self.pow(a, &((&m + BigUint::one()) >> 1u8));
        let mut s = s;
        loop {
            if t == one {
                return Some(r);
            }
            // Least i with t^(2^i) = 1.
            let mut i = 0u64;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(s - i - 1) {
                b = self.mul(&b, &b);
            }
            r = self.mul(&r, &b);
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            s = i;
        }
    }

    /// The canonical primitive p-th root of unity: the lexicographically
    /// smallest field element of multiplicative order exactly p.
    pub fn canonical_zeta(&self, p: u64) -> Result<Fq> {
        let q1 = self.order() - BigUint::one();
        if (&q1 % p).to_u64().unwrap() != 0 {
            return Err(Error::PreconditionFailed(format!(
                "field has no {p}-th roots of unity"
            )));
        }
        let cof = &q1 / p;
        let one = self.one();
        // Find any element of order p, then minimize over the subgroup.
        let mut z = self.zero();
        let w = loop {
            if !self.next_elem(&mut z) {
                return Err(Error::PreconditionFailed("no p-th root found".into()));
            }
            if self.is_zero(&z) {
                continue;
            }
            let w = self.pow(&z, &cof);
            if w != one {
                break w;
            }
        };
        let mut best = w.clone();
        let mut cur = w.clone();
        for _ in 2..p {
            cur = self.mul(&cur, &w);
            if self.lex_less(&cur, &best) {
                best = cur.clone();
            }
        }
        Ok(best)
    }
}

// ---------------------------------------------------------------------------
// Short Weierstrass curves over F_q and point arithmetic
// ---------------------------------------------------------------------------

/// Affine point; None is the point at infinity.
pub type Point = Option<(Fq, Fq)>;

/// y^2 = x^3 + a x + b over an explicit F_{l^k}.
#[derive(Debug, Clone)]
pub struct CurveFq {
    pub field: FqField,
    pub a: Fq,
    pub b: Fq,
}

impl CurveFq {
    pub fn on_curve(&self, pt: &Point) -> bool {
        match pt {
            None => true,
            Some((x, y)) => {
                let f = &self.field;
                let lhs = f.mul(y, y);
                let x2 = f.mul(x, x);
                let rhs = f.add(&f.add(&f.mul(&x2, x), &f.mul(&self.a, x)), &self.b);
                lhs == rhs
            }
        }
    }

    pub fn neg_point(&self, p: &Point) -> Point {
        p.as_ref().map(|(x, y)| (x.clone(), self.field.neg(y)))
    }

    pub fn add_points(&self, p: &Point, q: &Point) -> Point {
        let f = &self.field;
        let (x1, y1) = match p {
            None => return q.clone(),
            Some(t) => t,
        };
        let (x2, y2) = match q {
            None => return p.clone(),
            Some(t) => t,
        };
        let lambda = if x1 == x2 {
            if *y1 != *y2 || f.is_zero(y1) {
                return None;
            }
            // Tangent: (3 x1^2 + a) / (2 y1).
            let num = f.add(
                &f.mul(&f.from_u64(3), &f.mul(x1, x1)),
                &self.a,
            );
            let den = f.mul(&f.from_u64(2), y1);
            f.div(&num, &den).expect("2y nonzero")
        } else {
            let num = f.sub(y2, y1);
            let den = f.sub(x2, x1);
            f.div(&num, &den).expect("x2 - x1 nonzero")
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Some((x3, y3))
    }

    pub fn scalar_mul(&self, n: &BigUint, p: &Point) -> Point {
        let mut result: Point = None;
        let mut base = p.clone();
        for i in 0..n.bits() {
            if n.bit(i) {
                result = self.add_points(&result, &base);
            }
            base = self.add_points(&base, &base);
        }
        result
    }

    pub fn scalar_mul_u64(&self, n: u64, p: &Point) -> Point {
        self.scalar_mul(&BigUint::from(n), p)
    }

    /// Coordinate-wise field Frobenius x -> x^l (an endomorphism of the
    /// curve because a, b have coefficients in F_l).
    pub fn frobenius_point(&self, p: &Point) -> Point {
        let lbig = BigUint::from(self.field.l);
        p.as_ref()
            .map(|(x, y)| (self.field.pow(x, &lbig), self.field.pow(y, &lbig)))
    }

    /// Deterministic point enumeration: scans x in lexicographic order and
    /// yields each affine point, lex-smaller y first.
    pub fn points(&self) -> PointIter<'_> {
        PointIter {
            curve: self,
            x: Some(self.field.zero()),
            pending: None,
        }
    }
}

/// Stateful iterator over the affine points of a curve, in the deterministic
/// order used for auxiliary-point selection.
pub struct PointIter<'c> {
    curve: &'c CurveFq,
    x: Option<Fq>,
    pending: Option<Point>,
}

impl Iterator for PointIter<'_> {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        if let Some(p) = self.pending.take() {
            return Some(p);
        }
        loop {
            let x = self.x.as_ref()?.clone();
            let mut nx = x.clone();
            self.x = if self.curve.field.next_elem(&mut nx) {
                Some(nx)
            } else {
                None
            };
            let f = &self.curve.field;
            let rhs = f.add(
                &f.add(&f.mul(&f.mul(&x, &x), &x), &f.mul(&self.curve.a, &x)),
                &self.curve.b,
            );
            if let Some(y) = f.sqrt(&rhs) {
                let ny = f.neg(&y);
                if y == ny {
                    return Some(Some((x, y)));
                }
                let (first, second) = if f.lex_less(&y, &ny) { (y, ny) } else { (ny, y) };
                self.pending = Some(Some((x.clone(), second)));
                return Some(Some((x, first)));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Division polynomials
// ---------------------------------------------------------------------------

/// The odd-index reduced division polynomials f_n in x for y^2 = x^3 + ax + b
/// over F_l (f_n = psi_n with the factor 2y removed from even indices).
/// Returns f_p for odd prime p: degree (p^2 - 1)/2, leading coefficient p.
pub fn division_polynomial_fp(l: u64, a: u64, b: u64, p: u64) -> Result<Vec<u64>> {
    if l == 2 || l == 3 {
        return Err(Error::CharacteristicClash);
    }
    if p % 2 == 0 || p == l {
        return Err(Error::CharacteristicClash);
    }
    if p > MAX_ORACLE_P {
        return Err(Error::ResourceBound(format!("oracle limited to p <= {MAX_ORACLE_P}")));
    }
    let a = a % l;
    let b = b % l;
    let m = |x: u64, y: u64| ((x as u128 * y as u128) % l as u128) as u64;
    let n = |x: u64| (l - x % l) % l;
    // phi = 4x^3 + 4ax + 4b = psi_2^2.
    let phi: Vec<u64> = vec![m(4, b), m(4, a), 0, 4 % l];
    let phi2 = pmul(&phi, &phi, l);
    let mut f: Vec<Vec<u64>> = Vec::with_capacity(p as usize + 3);
    f.push(vec![]); // f_0 = 0
    f.push(vec![1]); // f_1
    f.push(vec![1]); // f_2 (psi_2 / psi_2)
    f.push(vec![n(m(a, a)), m(12, b), m(6, a), 0, 3 % l]); // f_3
    // f_4 = 2(x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - a^3 - 8b^2).
    let a2 = m(a, a);
    let f4: Vec<u64> = vec![
        n((m(a, a2) + m(8, m(b, b))) % l),
        n(m(4, m(a, b))),
        n(m(5, a2)),
        m(20, b),
        m(5, a),
        0,
        1,
    ]
    .iter()
    .map(|c| m(2, *c))
    .collect();
    f.push(f4);
    for nidx in 5..=(p as usize) {
        let poly = if nidx % 2 == 1 {
            let mm = (nidx - 1) / 2;
            let t1 = pmul(&f[mm + 2], &pmul(&f[mm], &pmul(&f[mm], &f[mm], l), l), l);
            let t2 = pmul(
                &f[mm - 1],
                &pmul(&f[mm + 1], &pmul(&f[mm + 1], &f[mm + 1], l), l),
                l,
            );
            if mm % 2 == 0 {
                psub(&pmul(&phi2, &t1, l), &t2, l)
            } else {
                psub(&t1, &pmul(&phi2, &t2, l), l)
            }
        } else {
            let mm = nidx / 2;
            let t1 = pmul(&f[mm + 2], &pmul(&f[mm - 1], &f[mm - 1], l), l);
            let t2 = pmul(&f[mm - 2], &pmul(&f[mm + 1], &f[mm + 1], l), l);
            pmul(&f[mm], &psub(&t1, &t2, l), l)
        };
        f.push(poly);
    }
    let out = f[p as usize].clone();
    debug_assert_eq!(out.len() as u64, (p * p - 1) / 2 + 1);
    Ok(out)
}

/// Division polynomial of a curve over Q (converted to the short model
/// y^2 = x^3 + Ax + B with A = -c4/48, B = -c6/864 when necessary).
/// Coefficients low degree first.
pub fn division_polynomial(model: &WeierstrassModel, p: u64) -> Result<Vec<BigRational>> {
    if p % 2 == 0 {
        return Err(Error::CharacteristicClash);
    }
    if p > MAX_ORACLE_P {
        return Err(Error::ResourceBound(format!("oracle limited to p <= {MAX_ORACLE_P}")));
    }
    let inv = crate::curve_core::standard_invariants(model)?;
    let a = -&inv.c4 / BigRational::from(BigInt::from(48));
    let b = -&inv.c6 / BigRational::from(BigInt::from(864));
    let zero = BigRational::zero();
    let rat = |n: i64| BigRational::from(BigInt::from(n));
    let mul = |x: &[BigRational], y: &[BigRational]| -> Vec<BigRational> {
        if x.is_empty() || y.is_empty() {
            return vec![];
        }
        let mut out = vec![BigRational::zero(); x.len() + y.len() - 1];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                out[i + j] += xi * yj;
            }
        }
        out
    };
    let sub = |x: &[BigRational], y: &[BigRational]| -> Vec<BigRational> {
        let n = x.len().max(y.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let xi = x.get(i).cloned().unwrap_or_else(BigRational::zero);
            let yi = y.get(i).cloned().unwrap_or_else(BigRational::zero);
            out.push(xi - yi);
        }
        while out.last().map(|c| c.is_zero()).unwrap_or(false) {
            out.pop();
        }
        out
    };
    let phi = vec![&rat(4) * &b, &rat(4) * &a, zero.clone(), rat(4)];
    let phi2 = mul(&phi, &phi);
    let mut f: Vec<Vec<BigRational>> = vec![
        vec![],
        vec![rat(1)],
        vec![rat(1)],
        vec![-(&a * &a), &rat(12) * &b, &rat(6) * &a, zero.clone(), rat(3)],
        vec![
            &rat(2) * &(-(&a * &a * &a) - &rat(8) * &b * &b),
            &rat(-8) * &(&a * &b),
            &rat(-10) * &(&a * &a),
            &rat(40) * &b,
            &rat(10) * &a,
            zero.clone(),
            rat(2),
        ],
    ];
    for nidx in 5..=(p as usize) {
        let poly = if nidx % 2 == 1 {
            let mm = (nidx - 1) / 2;
            let cube = |v: &[BigRational]| mul(v, &mul(v, v));
            let t1 = mul(&f[mm + 2], &cube(&f[mm]));
            let t2 = mul(&f[mm - 1], &cube(&f[mm + 1]));
            if mm % 2 == 0 {
                sub(&mul(&phi2, &t1), &t2)
            } else {
                sub(&t1, &mul(&phi2, &t2))
            }
        } else {
            let mm = nidx / 2;
            let t1 = mul(&f[mm + 2], &mul(&f[mm - 1], &f[mm - 1]));
            let t2 = mul(&f[mm - 2], &mul(&f[mm + 1], &f[mm + 1]));
            mul(&f[mm], &sub(&t1, &t2))
        };
        f.push(poly);
    }
    Ok(f[p as usize].clone())
}

// ---------------------------------------------------------------------------
// Miller's algorithm and the Weil pairing
// ---------------------------------------------------------------------------

/// f_{n,P} evaluated at the finite point X; None when a zero or pole is hit
/// (the caller retries with a different auxiliary offset).
fn miller(curve: &CurveFq, n: u64, p: &Point, x_pt: &Point) -> Option<Fq> {
    let f = &curve.field;
    p.as_ref()?;
    let (xx, xy) = x_pt.as_ref()?;
    let mut acc = f.one();
    let mut t = p.clone();
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        // Doubling step.
        let (tx, ty) = t.clone()?;
        acc = f.mul(&acc, &acc);
        if f.is_zero(&ty) {
            // Vertical tangent: l(X) = x_X - x_T, 2T = O.
            let v = f.sub(xx, &tx);
            if f.is_zero(&v) {
                return None;
            }
            acc = f.mul(&acc, &v);
            t = None;
        } else {
            let three = f.from_u64(3);
            let lam = f
                .div(
                    &f.add(&f.mul(&three, &f.mul(&tx, &tx)), &curve.a),
                    &f.mul(&f.from_u64(2), &ty),
                )
                .ok()?;
            let t2 = curve.add_points(&t, &t);
            let lnum = f.sub(&f.sub(xy, &ty), &f.mul(&lam, &f.sub(xx, &tx)));
            if f.is_zero(&lnum) {
                return None;
            }
            acc = f.mul(&acc, &lnum);
            match &t2 {
                None => {}
                Some((t2x, _)) => {
                    let v = f.sub(xx, t2x);
                    if f.is_zero(&v) {
                        return None;
                    }
                    acc = f.mul(&acc, &f.inv(&v).ok()?);
                }
            }
            t = t2;
        }
        if (n >> i) & 1 == 1 {
            // Addition step: T + P.
            match (&t, p) {
                (None, _) => {
                    t = p.clone();
                }
                (Some((tx, ty)), Some((qx, qy))) => {
                    if tx == qx {
                        if ty == qy && !f.is_zero(ty) {
                            // Would be a doubling; generic Miller for prime n
                            // never hits this, treat as failure.
                            return None;
                        }
                        // T + P = O: vertical line.
                        let v = f.sub(xx, tx);
                        if f.is_zero(&v) {
                            return None;
                        }
                        acc = f.mul(&acc, &v);
                        t = None;
                    } else {
                        let lam = f.div(&f.sub(qy, ty), &f.sub(qx, tx)).ok()?;
                        let tp = curve.add_points(&t, p);
                        let lnum = f.sub(&f.sub(xy, ty), &f.mul(&lam, &f.sub(xx, tx)));
                        if f.is_zero(&lnum) {
                            return None;
                        }
                        acc = f.mul(&acc, &lnum);
                        if let Some((tpx, _)) = &tp {
                            let v = f.sub(xx, tpx);
                            if f.is_zero(&v) {
                                return None;
                            }
                            acc = f.mul(&acc, &f.inv(&v).ok()?);
                        }
                        t = tp;
                    }
                }
                _ => return None,
            }
        }
    }
    // n * P = O for torsion input, so T ends at infinity.
    if t.is_some() {
        return None;
    }
    Some(acc)
}

/// The Weil pairing e_p(P, Q) for P, Q in E[p], computed with an auxiliary
/// offset S and deterministic retry:
/// e(P, Q) = [f_P(Q+S)/f_P(S)] * [f_Q(-S)/f_Q(P-S)].
pub fn weil_pairing(curve: &CurveFq, p: u64, pt_p: &Point, pt_q: &Point) -> Result<Fq> {
    let f = &curve.field;
    if pt_p.is_none() || pt_q.is_none() {
        return Ok(f.one());
    }
    let mut points = curve.points();
    let mut attempts = 0u32;
    while attempts < 512 {
        let s = match points.next() {
            Some(pt) => pt,
            None => break,
        };
        attempts += 1;
        if s.is_none() {
            continue;
        }
        let qs = curve.add_points(pt_q, &s);
        let ps = curve.add_points(pt_p, &curve.neg_point(&s));
        let ns = curve.neg_point(&s);
        if qs.is_none() || ps.is_none() {
            continue;
        }
        let n1 = match miller(curve, p, pt_p, &qs) {
            Some(v) => v,
            None => continue,
        };
        let d1 = match miller(curve, p, pt_p, &s) {
            Some(v) => v,
            None => continue,
        };
        let n2 = match miller(curve, p, pt_q, &ns) {
            Some(v) => v,
            None => continue,
        };
        let d2 = match miller(curve, p, pt_q, &ps) {
            Some(v) => v,
            None => continue,
        };
        if f.is_zero(&d1) || f.is_zero(&d2) {
            continue;
        }
        let value = f.mul(
            &f.div(&n1, &d1).expect("nonzero"),
            &f.div(&n2, &d2).expect("nonzero"),
        );
        // Sanity: the result is a p-th root of unity.
        let check = f.pow(&value, &BigUint::from(p));
        if check != f.one() {
            continue;
        }
        return Ok(value);
    }
    Err(Error::PairingDegenerate)
}

// ---------------------------------------------------------------------------
// Torsion bases, Frobenius matrices, symplectic type
// ---------------------------------------------------------------------------

/// A symplectic basis of the p-torsion of a curve over F_{l^k}.
#[derive(Debug, Clone)]
pub struct TorsionBasis {
    pub p: u64,
    pub k: usize,
    pub a_l: i64,
    pub curve: CurveFq,
    pub pt_p: Point,
    pub pt_q: Point,
    /// e_p(P, Q); equals `zeta`.
    pub pairing: Fq,
    /// Canonical primitive p-th root of unity of the field.
    pub zeta: Fq,
    pub symplectic: bool,
}

/// Multiplicative order computations mod p and in F_{p^2} = F_p(sqrt(d)).
fn ord_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    let mut x = a % p;
    let mut n = 1;
    while x != 1 {
        x = (x as u128 * a as u128 % p as u128) as u64;
        n += 1;
    }
    n
}

fn ord_fp2(a0: u64, a1: u64, d: u64, p: u64) -> u64 {
    // Order of a0 + a1*w with w^2 = d in F_{p^2}.
    let mul = |x: (u64, u64), y: (u64, u64)| -> (u64, u64) {
        let m = |u: u64, v: u64| (u as u128 * v as u128 % p as u128) as u64;
        (
            (m(x.0, y.0) + m(d, m(x.1, y.1))) % p,
            (m(x.0, y.1) + m(x.1, y.0)) % p,
        )
    };
    let start = (a0 % p, a1 % p);
    let mut cur = start;
    let mut n = 1u64;
    while cur != (1, 0) {
        cur = mul(cur, start);
        n += 1;
        assert!(n <= p * p, "order computation runaway");
    }
    n
}

/// The minimal k with E[p] rational over F_{l^k}: the multiplicative order of
/// the mod-p Frobenius matrix, computed from the trace and determinant.
pub fn torsion_field_degree(curve: &FpCurve, p: u64) -> Result<usize> {
    let l = curve.l;
    if p > MAX_ORACLE_P {
        return Err(Error::ResourceBound(format!("oracle limited to p <= {MAX_ORACLE_P}")));
    }
    if l == 2 || l == 3 {
        return Err(Error::CharacteristicClash);
    }
    if p == l {
        return Err(Error::CharacteristicClash);
    }
    let data = crate::goodred::FrobeniusData::from_fp_curve(curve)?;
    let a = data.a_l.rem_euclid(p as i64) as u64;
    let disc = data.delta_l.rem_euclid(p as i64) as u64;
    let half = nt::inv_mod(2, p);
    let mulp = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let k = if disc == 0 {
        let lam = mulp(a, half);
        let base = ord_mod(lam, p);
        if data.beta_l % p == 0 {
            base // scalar matrix
        } else {
            base * p // nontrivial unipotent part
        }
    } else {
        match nt::legendre_u64(disc, p) {
            1 => {
                // Two rational eigenvalues (a ± s)/2.
                let s = (0..p).find(|s| mulp(*s, *s) == disc).unwrap();
                let l1 = mulp((a + s) % p, half);
                let l2 = mulp((a + p - s) % p, half);
                num_integer::lcm(ord_mod(l1, p), ord_mod(l2, p))
            }
            _ => {
                // Conjugate eigenvalues (a ± sqrt(disc))/2 in F_{p^2}.
                ord_fp2(mulp(a, half), half, disc, p)
            }
        }
    };
    let k = k as usize;
    if k > MAX_FIELD_DEGREE {
        return Err(Error::ResourceBound(format!(
            "torsion field degree {k} exceeds {MAX_FIELD_DEGREE}"
        )));
    }
    Ok(k)
}

/// Group order of the short model over F_{l^k} from the trace over F_l.
fn group_order(l: u64, a_l: i64, k: usize) -> BigUint {
    // t_j = alpha^j + beta^j: t_0 = 2, t_1 = a_l, t_j = a_l t_{j-1} - l t_{j-2}.
    let mut t0 = BigInt::from(2);
    let mut t1 = BigInt::from(a_l);
    if k == 0 {
        unreachable!();
    }
    for _ in 2..=k {
        let t2 = BigInt::from(a_l) * &t1 - BigInt::from(l) * &t0;
        t0 = t1;
        t1 = t2;
    }
    let tk = if k == 1 { BigInt::from(a_l) } else { t1 };
    let n: BigInt = BigInt::from(l).pow(k as u32) + 1 - tk;
    n.to_biguint().expect("group order positive")
}

/// Short model of the reduction: y^2 = x^3 + Ax + B with A = -27 c4,
/// B = -54 c6 (an F_l-isomorphic model for l >= 5).
pub fn short_model(curve: &FpCurve) -> Result<(u64, u64)> {
    let l = curve.l;
    if l == 2 || l == 3 {
        return Err(Error::CharacteristicClash);
    }
    let c4 = curve.c4();
    let (b2, b4, b6, _) = curve.b_invariants();
    let m = |x: u64, y: u64| (x as u128 * y as u128 % l as u128) as u64;
    let b2c = m(m(b2, b2), b2);
    let c6 = (m(36 % l, m(b2, b4)) + 2 * l - (b2c + m(216 % l, b6)) % l) % l;
    let a = (l - m(27 % l, c4) % l) % l;
    let b = (l - m(54 % l, c6) % l) % l;
    Ok((a, b))
}

/// Builds a symplectic p-torsion basis over F_{l^k} for the given k (which
/// must be a multiple of the minimal torsion field degree).
pub fn torsion_basis_in_degree(curve: &FpCurve, p: u64, k: usize) -> Result<TorsionBasis> {
    let l = curve.l;
    let (a_short, b_short) = short_model(curve)?;
    let data = crate::goodred::FrobeniusData::from_fp_curve(curve)?;
    let field = FqField::new(l, k)?;
    let cfq = CurveFq {
        a: field.from_u64(a_short),
        b: field.from_u64(b_short),
        field,
    };
    let n = group_order(l, data.a_l, k);
    // p-primary cofactor.
    let mut v = 0u32;
    let mut cof = n.clone();
    let pb = BigUint::from(p);
    while (&cof % &pb).is_zero() {
        cof /= &pb;
        v += 1;
    }
    if v < 2 {
        return Err(Error::BasisNotFound);
    }
    let mut pt_p: Point = None;
    let mut pt_q: Point = None;
    let limit = 400 + 16 * (p as usize) * (p as usize);
    let mut scan = cfq.points();
    let mut seen = 0usize;
    while seen < limit {
        let r = match scan.next() {
            Some(pt) => pt,
            None => break,
        };
        seen += 1;
        let mut s = cfq.scalar_mul(&cof, &r);
        if s.is_none() {
            continue;
        }
        // Reduce to a point of exact order p.
        loop {
            let ps = cfq.scalar_mul_u64(p, &s);
            if ps.is_none() {
                break;
            }
            s = ps;
        }
        if s.is_none() {
            continue;
        }
        if pt_p.is_none() {
            pt_p = s;
            continue;
        }
        let w = weil_pairing(&cfq, p, &pt_p, &s)?;
        if w != cfq.field.one() {
            pt_q = s;
            break;
        }
    }
    if pt_p.is_none() || pt_q.is_none() {
        return Err(Error::BasisNotFound);
    }
    // Normalize Q so that e(P, Q) equals the canonical zeta.
    let zeta = cfq.field.canonical_zeta(p)?;
    let w = weil_pairing(&cfq, p, &pt_p, &pt_q)?;
    let a_exp = dlog_root_of_unity(&cfq.field, &zeta, &w).ok_or(Error::PairingDegenerate)?;
    if a_exp == 0 {
        return Err(Error::PairingDegenerate);
    }
    let inv = nt::inv_mod(a_exp, p);
    let pt_q = cfq.scalar_mul_u64(inv, &pt_q);
    let pairing = weil_pairing(&cfq, p, &pt_p, &pt_q)?;
    assert_eq!(pairing, zeta, "normalized basis pairing must be canonical");
    // Cross-check against the division polynomial: the p^2 combinations are
    // distinct and their x-coordinates are exactly the division-poly roots.
    verify_against_division_polynomial(&cfq, p, &pt_p, &pt_q, a_short, b_short)?;
    Ok(TorsionBasis {
        p,
        k,
        a_l: data.a_l,
        curve: cfq,
        pt_p,
        pt_q,
        pairing,
        zeta: zeta.clone(),
        symplectic: true,
    })
}

/// Minimal-field symplectic torsion basis.
pub fn torsion_basis(curve: &FpCurve, p: u64) -> Result<TorsionBasis> {
    let k = torsion_field_degree(curve, p)?;
    torsion_basis_in_degree(curve, p, k)
}

fn verify_against_division_polynomial(
    cfq: &CurveFq,
    p: u64,
    pt_p: &Point,
    pt_q: &Point,
    a_short: u64,
    b_short: u64,
) -> Result<()> {
    let f = &cfq.field;
    let divpol = division_polynomial_fp(f.l, a_short, b_short, p)?;
    let eval = |x: &Fq| -> Fq {
        let mut acc = f.zero();
        for c in divpol.iter().rev() {
            acc = f.add(&f.mul(&acc, x), &f.from_u64(*c));
        }
        acc
    };
    let mut points: Vec<Point> = Vec::with_capacity((p * p) as usize);
    let mut xs: BTreeSet<Fq> = BTreeSet::new();
    let mut ip: Point = None;
    for _ in 0..p {
        let mut cur = ip.clone();
        for _ in 0..p {
            points.push(cur.clone());
            if let Some((x, _)) = &cur {
                assert!(
                    f.is_zero(&eval(x)),
                    "torsion x-coordinate must be a division polynomial root"
                );
                xs.insert(x.clone());
            }
            cur = cfq.add_points(&cur, pt_q);
        }
        ip = cfq.add_points(&ip, pt_p);
    }
    // Distinctness: p^2 points, (p^2 - 1)/2 distinct x-coordinates.
    let distinct: BTreeSet<_> = points.iter().cloned().collect();
    if distinct.len() != (p * p) as usize || xs.len() as u64 != (p * p - 1) / 2 {
        return Err(Error::BasisNotFound);
    }
    Ok(())
}

/// Discrete logarithm in mu_p: smallest i >= 0 with zeta^i = w.
fn dlog_root_of_unity(f: &FqField, zeta: &Fq, w: &Fq) -> Option<u64> {
    let mut cur = f.one();
    for i in 0..MAX_ORACLE_P + 1 {
        if &cur == w {
            return Some(i);
        }
        cur = f.mul(&cur, zeta);
    }
    None
}

/// Coordinates (alpha, beta) of a torsion point R = alpha P + beta Q relative
/// to a symplectic basis, extracted through pairings.
fn coordinates(basis: &TorsionBasis, r: &Point) -> Result<(u64, u64)> {
    let f = &basis.curve.field;
    let p = basis.p;
    let e_rq = weil_pairing(&basis.curve, p, r, &basis.pt_q)?;
    let e_pr = weil_pairing(&basis.curve, p, &basis.pt_p, r)?;
    let alpha = dlog_root_of_unity(f, &basis.zeta, &e_rq).ok_or(Error::PairingDegenerate)?;
    let beta = dlog_root_of_unity(f, &basis.zeta, &e_pr).ok_or(Error::PairingDegenerate)?;
    Ok((alpha % p, beta % p))
}

/// Matrix of the l-power Frobenius acting on the symplectic basis, columns
/// the coordinate vectors of Frob(P) and Frob(Q).
pub fn frobenius_matrix_on(basis: &TorsionBasis) -> Result<[[u64; 2]; 2]> {
    let p = basis.p;
    let fp = basis.curve.frobenius_point(&basis.pt_p);
    let fq = basis.curve.frobenius_point(&basis.pt_q);
    let (a11, a21) = coordinates(basis, &fp)?;
    let (a12, a22) = coordinates(basis, &fq)?;
    let m = [[a11, a12], [a21, a22]];
    let mulp = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let tr = (m[0][0] + m[1][1]) % p;
    let det = (mulp(m[0][0], m[1][1]) + p - mulp(m[0][1], m[1][0])) % p;
    assert_eq!(tr as i64, basis.a_l.rem_euclid(p as i64), "trace must be a_l");
    assert_eq!(det, basis.curve.field.l % p, "determinant must be l");
    Ok(m)
}

/// Frobenius matrix of a curve's p-torsion in the minimal-field symplectic
/// basis.
pub fn frobenius_matrix(curve: &FpCurve, p: u64) -> Result<[[u64; 2]; 2]> {
    let basis = torsion_basis(curve, p)?;
    frobenius_matrix_on(&basis)
}

/// The set of symplectic types realized by G_{Q_l}-equivariant isomorphisms
/// E[p] -> E'[p] for curves with good reduction at l, determined by solving
/// X M' = M X over F_p in fixed symplectic bases over a common torsion field
/// and classifying determinants into square classes.
pub fn oracle_symplectic_type(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    p: u64,
) -> Result<BTreeSet<SymplecticType>> {
    let c1 = FpCurve::reduce(e1, l)?;
    let c2 = FpCurve::reduce(e2, l)?;
    let k1 = torsion_field_degree(&c1, p)?;
    let k2 = torsion_field_degree(&c2, p)?;
    let k = num_integer::lcm(k1, k2);
    if k > MAX_FIELD_DEGREE {
        return Err(Error::ResourceBound(format!(
            "common torsion field degree {k} exceeds {MAX_FIELD_DEGREE}"
        )));
    }
    let b1 = torsion_basis_in_degree(&c1, p, k)?;
    let b2 = torsion_basis_in_degree(&c2, p, k)?;
    let m = frobenius_matrix_on(&b1)?;
    let mp = frobenius_matrix_on(&b2)?;
    symplectic_types_of_matrices(m, mp, p)
}

/// Square classes of determinants of invertible X with X M' = M X over F_p.
pub fn symplectic_types_of_matrices(
    m: [[u64; 2]; 2],
    mp: [[u64; 2]; 2],
    p: u64,
) -> Result<BTreeSet<SymplecticType>> {
    let mulp = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let matmul = |a: [[u64; 2]; 2], b: [[u64; 2]; 2]| -> [[u64; 2]; 2] {
        let mut c = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = (mulp(a[i][0], b[0][j]) + mulp(a[i][1], b[1][j])) % p;
            }
        }
        c
    };
    let mut out = BTreeSet::new();
    for x00 in 0..p {
        for x01 in 0..p {
            for x10 in 0..p {
                for x11 in 0..p {
                    let x = [[x00, x01], [x10, x11]];
                    let det = (mulp(x00, x11) + p - mulp(x01, x10)) % p;
                    if det == 0 {
                        continue;
                    }
                    if matmul(x, mp) != matmul(m, x) {
                        continue;
                    }
                    if nt::legendre_u64(det, p) == 1 {
                        out.insert(SymplecticType::Symplectic);
                    } else {
                        out.insert(SymplecticType::AntiSymplectic);
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NotIsomorphic);
    }
    Ok(out)
}
