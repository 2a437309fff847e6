//! Good-reduction Frobenius machinery: point counts over prime fields,
//! the trace/discriminant/denominator data attached to a curve with good
//! reduction at l, and explicit 2x2 Frobenius matrices modulo p expressed
//! in terms of that data.

pub mod classpoly;

use num_bigint::BigInt;

use crate::curve_core::WeierstrassModel;
use crate::error::{Error, Result};
use crate::nt;

pub use classpoly::{hilbert_class_poly, ClassPolynomial};

/// Upper bound on the residue characteristic for exhaustive point counting.
pub const MAX_COUNT_PRIME: u64 = 10_000;

/// A Weierstrass curve over the prime field F_l, coefficients reduced mod l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpCurve {
    pub l: u64,
    pub a: [u64; 5],
}

impl FpCurve {
    pub fn new(l: u64, a: [u64; 5]) -> FpCurve {
        FpCurve {
            l,
            a: [a[0] % l, a[1] % l, a[2] % l, a[3] % l, a[4] % l],
        }
    }

    /// Reduction of a global integral model at l. Errors if the reduction is
    /// singular (the caller should have checked good reduction first).
    pub fn reduce(model: &WeierstrassModel, l: u64) -> Result<FpCurve> {
        let coeffs = model.integer_coefficients()?;
        let a: Vec<u64> = coeffs.iter().map(|c| nt::mod_u64(c, l)).collect();
        let curve = FpCurve::new(l, [a[0], a[1], a[2], a[3], a[4]]);
        if curve.discriminant() == 0 {
            return Err(Error::SingularReduction);
        }
        Ok(curve)
    }

    fn m(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.l as u128) as u64
    }
    fn addm(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.l
    }
    fn subm(&self, x: u64, y: u64) -> u64 {
        (x + self.l - y % self.l) % self.l
    }

    /// b-invariants mod l.
    pub fn b_invariants(&self) -> (u64, u64, u64, u64) {
        let [a1, a2, a3, a4, a6] = self.a;
        let b2 = self.addm(self.m(a1, a1), self.m(4 % self.l, a2));
        let b4 = self.addm(self.m(2 % self.l, a4), self.m(a1, a3));
        let b6 = self.addm(self.m(a3, a3), self.m(4 % self.l, a6));
        let b8 = {
            let t1 = self.m(self.m(a1, a1), a6);
            let t2 = self.m(self.m(4 % self.l, a2), a6);
            let t3 = self.m(self.m(a1, a3), a4);
            let t4 = self.m(self.m(a2, a3), a3);
            let t5 = self.m(a4, a4);
            self.subm(self.addm(self.addm(t1, t2), t4), self.addm(t3, t5))
        };
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> u64 {
        let (b2, b4, b6, b8) = self.b_invariants();
        let t1 = self.m(self.m(b2, b2), b8);
        let t2 = self.m(8 % self.l, self.m(self.m(b4, b4), b4));
        let t3 = self.m(27 % self.l, self.m(b6, b6));
        let t4 = self.m(9 % self.l, self.m(self.m(b2, b4), b6));
        self.subm(t4, self.addm(self.addm(t1, t2), t3))
    }

    pub fn c4(&self) -> u64 {
        let (b2, b4, _, _) = self.b_invariants();
        self.subm(self.m(b2, b2), self.m(24 % self.l, b4))
    }

    pub fn j_invariant(&self) -> u64 {
        let c4 = self.c4();
        let delta = self.discriminant();
        assert!(delta != 0, "singular curve has no j-invariant");
        let c4cube = self.m(self.m(c4, c4), c4);
        self.m(c4cube, nt::inv_mod(delta, self.l))
    }

    /// Tests whether (x, y) satisfies the Weierstrass equation mod l.
    pub fn contains(&self, x: u64, y: u64) -> bool {
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = self.addm(
            self.m(y, y),
            self.addm(self.m(self.m(a1, x), y), self.m(a3, y)),
        );
        let x2 = self.m(x, x);
        let rhs = self.addm(
            self.addm(self.m(x2, x), self.m(a2, x2)),
            self.addm(self.m(a4, x), a6),
        );
        lhs == rhs
    }

    /// Number of F_l-points including the point at infinity.
    pub fn count_points(&self) -> Result<u64> {
        let l = self.l;
        if l >= MAX_COUNT_PRIME {
            return Err(Error::ResourceBound(format!(
                "point counting limited to residue characteristic below {MAX_COUNT_PRIME}, got {l}"
            )));
        }
        if self.discriminant() == 0 {
            return Err(Error::SingularReduction);
        }
        let mut n: u64 = 1;
        if l == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    if self.contains(x, y) {
                        n += 1;
                    }
                }
            }
            return Ok(n);
        }
        // Complete the square: the affine count is
        // l + sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6).
        let (b2, b4, b6, _) = self.b_invariants();
        n += l;
        for x in 0..l {
            let x2 = self.m(x, x);
            let v = self.addm(
                self.addm(self.m(4 % l, self.m(x2, x)), self.m(b2, x2)),
                self.addm(self.m(self.m(2, b4), x), b6),
            );
            match nt::legendre_u64(v, l) {
                1 => n += 1,
                -1 => n -= 1,
                _ => {}
            }
        }
        Ok(n)
    }
}

/// Frobenius data of a curve with good reduction at l: the trace a_l, the
/// discriminant of the characteristic polynomial, the largest h whose square
/// divides that discriminant with j a root of the aggregated class polynomial
/// of the quotient discriminant, and j mod l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrobeniusData {
    pub l: u64,
    pub a_l: i64,
    pub delta_l: i64,
    pub beta_l: u64,
    pub j_mod_l: u64,
}

impl FrobeniusData {
    pub fn from_fp_curve(curve: &FpCurve) -> Result<FrobeniusData> {
        let l = curve.l;
        let n = curve.count_points()?;
        let a_l = l as i64 + 1 - n as i64;
        // Hasse bound sanity check.
        assert!(a_l * a_l <= 4 * l as i64, "trace outside the Hasse bound");
        let delta_l = a_l * a_l - 4 * l as i64;
        let j = curve.j_invariant();
        let beta_l = beta(delta_l, j, l)?;
        Ok(FrobeniusData {
            l,
            a_l,
            delta_l,
            beta_l,
            j_mod_l: j,
        })
    }

    pub fn from_model(model: &WeierstrassModel, l: u64) -> Result<FrobeniusData> {
        FrobeniusData::from_fp_curve(&FpCurve::reduce(model, l)?)
    }

    /// p divides the order of Frobenius in PGL2 iff p | delta_l and
    /// p does not divide beta_l.
    pub fn order_divisible_by(&self, p: u64) -> bool {
        self.delta_l % p as i64 == 0 && self.beta_l % p != 0
    }

    /// Frobenius mod p is scalar iff p | delta_l and p | beta_l.
    pub fn scalar_mod(&self, p: u64) -> bool {
        self.delta_l % p as i64 == 0 && self.beta_l % p == 0
    }

    /// Explicit matrix of Frobenius on the p-torsion, in a suitable basis:
    /// entries mod p. Requires p odd.
    ///
    /// When p | delta_l and p does not divide beta_l the matrix is the
    /// non-semisimple [[a/2, 0], [b, a/2]]; otherwise the general closed form
    /// applies and needs p not dividing 2*beta_l.
    pub fn frobenius_matrix(&self, p: u64) -> Result<[[u64; 2]; 2]> {
        if p < 3 {
            return Err(Error::UnsupportedReduction);
        }
        let pm = |x: i64| -> u64 { x.rem_euclid(p as i64) as u64 };
        let mulp = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
        let a = pm(self.a_l);
        let d = pm(self.delta_l);
        let b = self.beta_l % p;
        let matrix = if d == 0 && b != 0 {
            let half = nt::inv_mod(2, p);
            let ah = mulp(a, half);
            [[ah, 0], [b, ah]]
        } else if b != 0 {
            // [[ (a b - D)/(2b), D (b^2 - D)/(4 b^3) ], [ b, (a b + D)/(2b) ]]
            let inv2b = nt::inv_mod(mulp(2, b), p);
            let ab = mulp(a, b);
            let m11 = mulp((ab + p - d) % p, inv2b);
            let m22 = mulp((ab + d) % p, inv2b);
            let b2 = mulp(b, b);
            let inv4b3 = nt::inv_mod(mulp(mulp(4 % p, b2), b), p);
            let m12 = mulp(mulp(d, (b2 + p - d) % p), inv4b3);
            [[m11, m12], [b, m22]]
        } else {
            return Err(Error::UnsupportedReduction);
        };
        // Trace and determinant must reproduce a_l and l mod p.
        let tr = (matrix[0][0] + matrix[1][1]) % p;
        let det = (mulp(matrix[0][0], matrix[1][1]) + p - mulp(matrix[0][1], matrix[1][0]) % p)
            % p;
        assert_eq!(tr, a, "frobenius matrix trace mismatch");
        assert_eq!(det, self.l % p, "frobenius matrix determinant mismatch");
        Ok(matrix)
    }
}

/// The largest h > 0 with h^2 | delta and j a root mod l of the aggregated
/// class polynomial of delta / h^2. h = 1 always qualifies because every
/// supersingular or ordinary j satisfies its own class polynomial; if no h
/// works the invariant data is inconsistent.
pub fn beta(delta: i64, j: u64, l: u64) -> Result<u64> {
    assert!(delta < 0, "frobenius discriminant must be negative");
    let mut best: Option<u64> = None;
    let mut h: u64 = 1;
    while (h * h) as i64 <= -delta {
        if delta % (h * h) as i64 == 0 {
            let d = delta / (h * h) as i64;
            let poly = hilbert_class_poly(d)?;
            if !poly.coefficients.is_empty() && poly.eval_mod(j, l) == 0 {
                best = Some(h);
            }
        }
        h += 1;
    }
    best.ok_or(Error::NoValidH)
}

/// Exhaustive test for F_l-isomorphism of two nonsingular Weierstrass curves
/// over F_l: some change of variables (u, r, s, t) with u invertible maps one
/// onto the other. A j-invariant comparison short-circuits the search.
pub fn residual_iso_check(e1: &FpCurve, e2: &FpCurve) -> bool {
    assert_eq!(e1.l, e2.l);
    let l = e1.l;
    if e1.j_invariant() != e2.j_invariant() {
        return false;
    }
    let m = |x: u64, y: u64| ((x as u128 * y as u128) % l as u128) as u64;
    let [a1, a2, a3, a4, a6] = e1.a;
    for u in 1..l {
        let ui = nt::inv_mod(u, l);
        let ui2 = m(ui, ui);
        let ui3 = m(ui2, ui);
        let ui4 = m(ui2, ui2);
        let ui6 = m(ui3, ui3);
        for r in 0..l {
            for s in 0..l {
                // The first two transformed coefficients must match;
                // check them before looping over t.
                let na1 = m(ui, (a1 + 2 * s) % l);
                if na1 != e2.a[0] {
                    continue;
                }
                let sa1 = m(s, a1);
                let s2 = m(s, s);
                let na2 = m(
                    ui2,
                    (a2 + 3 * r + 2 * l * l + l - sa1 % l + l - s2 % l) % l,
                );
                if na2 != e2.a[1] {
                    continue;
                }
                for t in 0..l {
                    let na3 = m(ui3, (a3 + m(r, a1) + 2 * t) % l);
                    if na3 != e2.a[2] {
                        continue;
                    }
                    let rs = m(r, s);
                    let na4raw = (a4 + 2 * m(r, a2) + 3 * m(r, r)) % l
                        + 5 * l
                        - (m(s, a3) + m((t + rs) % l, a1) + 2 * m(s, t)) % l;
                    let na4 = m(ui4, na4raw % l);
                    if na4 != e2.a[3] {
                        continue;
                    }
                    let r2 = m(r, r);
                    let pos = (a6 + m(r, a4) + m(r2, a2) + m(r2, r)) % l;
                    let neg = (m(t, a3) + m(t, t) + m(m(r, t), a1)) % l;
                    let na6 = m(ui6, (pos + l - neg) % l);
                    if na6 == e2.a[4] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Reduction of an integral model mod l as raw residues (no minimality
/// assumed); convenience for direct construction from big integers.
pub fn fp_curve_from_bigints(coeffs: &[BigInt; 5], l: u64) -> FpCurve {
    let a: Vec<u64> = coeffs.iter().map(|c| nt::mod_u64(c, l)).collect();
    FpCurve::new(l, [a[0], a[1], a[2], a[3], a[4]])
}
