//! Weierstrass models over Q, their standard invariants, coordinate changes,
//! quadratic twists, and per-prime minimal models with local invariants.

pub mod tate;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nt;

/// A long Weierstrass equation y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
///
/// Coefficients are rational so that arbitrary coordinate changes stay inside
/// the type; every entry point that needs an integral model (reduction mod a
/// prime, Tate's algorithm) clears denominators first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: BigRational,
    pub a2: BigRational,
    pub a3: BigRational,
    pub a4: BigRational,
    pub a6: BigRational,
}

/// The classical b-, c-invariants, discriminant and j-invariant of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardInvariants {
    pub b2: BigRational,
    pub b4: BigRational,
    pub b6: BigRational,
    pub b8: BigRational,
    pub c4: BigRational,
    pub c6: BigRational,
    pub delta: BigRational,
    pub j: BigRational,
}

/// Kodaira symbol of the special fibre at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KodairaType {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for KodairaType {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KodairaType::I0 => write!(fm, "I0"),
            KodairaType::In(n) => write!(fm, "I{n}"),
            KodairaType::II => write!(fm, "II"),
            KodairaType::III => write!(fm, "III"),
            KodairaType::IV => write!(fm, "IV"),
            KodairaType::I0Star => write!(fm, "I0*"),
            KodairaType::InStar(n) => write!(fm, "I{n}*"),
            KodairaType::IVStar => write!(fm, "IV*"),
            KodairaType::IIIStar => write!(fm, "III*"),
            KodairaType::IIStar => write!(fm, "II*"),
        }
    }
}

/// Minimal-model data at one prime: valuations of c4, c6, Delta (None means
/// the invariant vanishes), their unit residues modulo l^k, the Kodaira type
/// and the conductor exponent. The l-minimal model itself is carried along
/// because the reduction tables sometimes need to twist and reclassify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInvariants {
    pub prime: u64,
    pub v_c4: Option<u32>,
    pub v_c6: Option<u32>,
    pub v_delta: u32,
    /// Residue of the unit part of c4 modulo `modulus`; None when c4 = 0.
    pub c4_res: Option<u64>,
    /// Residue of the unit part of c6 modulo `modulus`; None when c6 = 0.
    pub c6_res: Option<u64>,
    /// Residue of the unit part of Delta modulo `modulus`.
    pub delta_res: u64,
    /// l^k for the default precision k (k = 5 at l = 2, k = 2 at l = 3,
    /// k = 1 otherwise).
    pub modulus: u64,
    pub kodaira: KodairaType,
    pub conductor_exponent: u32,
    pub minimal_model: WeierstrassModel,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl WeierstrassModel {
    pub fn new(
        a1: BigRational,
        a2: BigRational,
        a3: BigRational,
        a4: BigRational,
        a6: BigRational,
    ) -> Self {
        WeierstrassModel { a1, a2, a3, a4, a6 }
    }

    /// Model from integer long-Weierstrass coefficients [a1, a2, a3, a4, a6].
    pub fn from_integers(a: [BigInt; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a;
        WeierstrassModel {
            a1: BigRational::from_integer(a1),
            a2: BigRational::from_integer(a2),
            a3: BigRational::from_integer(a3),
            a4: BigRational::from_integer(a4),
            a6: BigRational::from_integer(a6),
        }
    }

    /// Short model y^2 = x^3 + ax + b.
    pub fn short(a: BigInt, b: BigInt) -> Self {
        WeierstrassModel::from_integers([
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            a,
            b,
        ])
    }

    pub fn coefficients(&self) -> [&BigRational; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_integer())
    }

    /// Integer coefficients of an integral model.
    pub fn integer_coefficients(&self) -> Result<[BigInt; 5]> {
        if !self.is_integral() {
            return Err(Error::NonIntegralTransform(format!(
                "model has non-integral coefficients: {self:?}"
            )));
        }
        Ok([
            self.a1.to_integer(),
            self.a2.to_integer(),
            self.a3.to_integer(),
            self.a4.to_integer(),
            self.a6.to_integer(),
        ])
    }

    /// An integral model of the same curve, obtained by scaling with
    /// u = 1/n for the least common denominator n.
    pub fn integral_model(&self) -> WeierstrassModel {
        if self.is_integral() {
            return self.clone();
        }
        let mut n = BigInt::one();
        for c in self.coefficients() {
            n = num_integer::lcm(n, c.denom().clone());
        }
        let u = BigRational::new(BigInt::one(), n);
        transform(self, &u, &rat(0), &rat(0), &rat(0)).expect("u = 1/n is nonzero")
    }
}

/// b-, c-invariants, discriminant and j of a model. Fails on singular input.
pub fn standard_invariants(model: &WeierstrassModel) -> Result<StandardInvariants> {
    let (a1, a2, a3, a4, a6) = (&model.a1, &model.a2, &model.a3, &model.a4, &model.a6);
    let b2 = a1 * a1 + rat(4) * a2;
    let b4 = rat(2) * a4 + a1 * a3;
    let b6 = a3 * a3 + rat(4) * a6;
    let b8 = a1 * a1 * a6 + rat(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = &b2 * &b2 - rat(24) * &b4;
    let c6 = -(&b2 * &b2 * &b2) + rat(36) * &b2 * &b4 - rat(216) * &b6;
    let delta =
        -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6 + rat(9) * &b2 * &b4 * &b6;
    if delta.is_zero() {
        return Err(Error::SingularModel);
    }
    debug_assert_eq!(rat(1728) * &delta, &c4 * &c4 * &c4 - &c6 * &c6);
    let j = &c4 * &c4 * &c4 / &delta;
    Ok(StandardInvariants {
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        delta,
        j,
    })
}

/// Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t. The new
/// coefficients satisfy u a1' = a1 + 2s and its four companions; the
/// invariants scale as c4 = u^4 c4', c6 = u^6 c6', Delta = u^12 Delta'.
pub fn transform(
    model: &WeierstrassModel,
    u: &BigRational,
    r: &BigRational,
    s: &BigRational,
    t: &BigRational,
) -> Result<WeierstrassModel> {
    if u.is_zero() {
        return Err(Error::ZeroScale);
    }
    let (a1, a2, a3, a4, a6) = (&model.a1, &model.a2, &model.a3, &model.a4, &model.a6);
    let u2 = u * u;
    let u3 = &u2 * u;
    let u4 = &u2 * &u2;
    let u6 = &u4 * &u2;
    let na1 = (a1 + rat(2) * s) / u;
    let na2 = (a2 - s * a1 + rat(3) * r - s * s) / &u2;
    let na3 = (a3 + r * a1 + rat(2) * t) / &u3;
    let na4 = (a4 - s * a3 + rat(2) * r * a2 - (t + r * s) * a1 + rat(3) * r * r
        - rat(2) * s * t)
        / &u4;
    let na6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / &u6;
    Ok(WeierstrassModel::new(na1, na2, na3, na4, na6))
}

/// The quadratic twist by a squarefree nonzero integer d, as the model
/// y^2 = x^3 - (d^2 c4 / 48) x - (d^3 c6 / 864), so that
/// c4(dE) = d^2 c4 and c6(dE) = d^3 c6 exactly.
pub fn quadratic_twist(model: &WeierstrassModel, d: &BigInt) -> Result<WeierstrassModel> {
    if d.is_zero() {
        return Err(Error::ZeroTwist);
    }
    if !nt::is_squarefree(d) {
        return Err(Error::TwistNotSquarefree(d.to_string()));
    }
    let inv = standard_invariants(model)?;
    let d = BigRational::from_integer(d.clone());
    let d2 = &d * &d;
    let d3 = &d2 * &d;
    let a = -(d2 * &inv.c4) / rat(48);
    let b = -(d3 * &inv.c6) / rat(864);
    Ok(WeierstrassModel::new(rat(0), rat(0), rat(0), a, b))
}

/// Valuation and unit residue, re-exported from the integer helpers so this
/// module exposes the full invariant toolkit.
pub fn tilde_parts(n: &BigInt, l: u64, k: u32) -> Result<(u32, u64)> {
    nt::tilde_parts(n, l, k)
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> Result<i32> {
    nt::legendre(a, p)
}

/// Default residue precision exponent k at a prime: the criteria consume at
/// most residues mod 32 at l = 2 and mod 9 at l = 3.
pub fn default_precision(l: u64) -> u32 {
    match l {
        2 => 5,
        3 => 2,
        _ => 1,
    }
}

/// An l-minimal model of the curve together with its local invariants
/// (valuation triple, unit residues, Kodaira type, conductor exponent).
pub fn minimal_model_at(model: &WeierstrassModel, l: u64) -> Result<(WeierstrassModel, LocalInvariants)> {
    standard_invariants(model)?;
    assert!(nt::is_prime(l), "minimal_model_at needs a prime, got {l}");
    let integral = model.integral_model();
    let coeffs = integral.integer_coefficients().expect("cleared denominators");
    let out = tate::tate_algorithm(&coeffs, l);
    let minimal = WeierstrassModel::from_integers(out.coefficients.clone());
    let local = local_invariants_of_minimal(&minimal, l, out.kodaira, out.conductor_exponent)?;
    Ok((minimal, local))
}

/// Builds LocalInvariants from a model already known to be l-minimal.
pub(crate) fn local_invariants_of_minimal(
    minimal: &WeierstrassModel,
    l: u64,
    kodaira: KodairaType,
    conductor_exponent: u32,
) -> Result<LocalInvariants> {
    let inv = standard_invariants(minimal)?;
    let k = default_precision(l);
    let modulus = l.pow(k);
    let c4 = inv.c4.to_integer();
    let c6 = inv.c6.to_integer();
    let delta = inv.delta.to_integer();
    let (v_c4, c4_res) = if c4.is_zero() {
        (None, None)
    } else {
        let (v, r) = nt::tilde_parts(&c4, l, k)?;
        (Some(v), Some(r))
    };
    let (v_c6, c6_res) = if c6.is_zero() {
        (None, None)
    } else {
        let (v, r) = nt::tilde_parts(&c6, l, k)?;
        (Some(v), Some(r))
    };
    let (v_delta, delta_res) = nt::tilde_parts(&delta, l, k)?;
    Ok(LocalInvariants {
        prime: l,
        v_c4,
        v_c6,
        v_delta,
        c4_res,
        c6_res,
        delta_res,
        modulus,
        kodaira,
        conductor_exponent,
        minimal_model: minimal.clone(),
    })
}

impl LocalInvariants {
    /// Valuation of j at the prime; None encodes +infinity (c4 = 0).
    pub fn v_j(&self) -> Option<i64> {
        self.v_c4
            .map(|v| 3 * v as i64 - self.v_delta as i64)
    }

    /// Whether v(c4) >= bound, counting the c4 = 0 case as satisfying it.
    pub fn v_c4_at_least(&self, bound: u32) -> bool {
        match self.v_c4 {
            None => true,
            Some(v) => v >= bound,
        }
    }

    /// Whether v(c6) >= bound, counting the c6 = 0 case as satisfying it.
    pub fn v_c6_at_least(&self, bound: u32) -> bool {
        match self.v_c6 {
            None => true,
            Some(v) => v >= bound,
        }
    }

    /// Exact valuation triple match; None in the pattern means "any".
    pub fn triple_is(&self, v4: u32, v6: u32, vd: u32) -> bool {
        self.v_c4 == Some(v4) && self.v_c6 == Some(v6) && self.v_delta == vd
    }
}
