//! Local symplectic criteria: one function per criterion, a per-prime
//! dispatcher keyed on the reduction classification, the usable-prime list,
//! and a whole-pair comparison report.
//!
//! Every criterion consumes a pair of curves assumed to have isomorphic
//! p-torsion as local Galois modules (a caller assertion, since verifying it
//! in general is exactly what the finite-field oracle does at small p) and
//! decides whether the isomorphism is symplectic, anti-symplectic, or outside
//! the criterion's hypotheses.

use num_bigint::BigInt;
use serde::Serialize;

use crate::curve_core::{minimal_model_at, quadratic_twist, LocalInvariants, WeierstrassModel};
use crate::error::{Error, Result};
use crate::goodred::{residual_iso_check, FpCurve, FrobeniusData, MAX_COUNT_PRIME};
use crate::nt::{inv_mod, is_prime, is_squarefree, legendre_u64};
use crate::reduction::{
    classify_local, dicyclic_case, inertial_field_tag, quaternionic_case, ReductionClass,
    ReductionKind, TableRow,
};
use crate::torsion_oracle::SymplecticType;

/// Final outcome of a criterion evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Symplectic,
    AntiSymplectic,
    /// Only the existence gate can produce this: no criterion can separate
    /// the two types for the given local image.
    BothPossible,
    NotApplicable,
}

impl Outcome {
    pub fn is_determined(&self) -> bool {
        matches!(self, Outcome::Symplectic | Outcome::AntiSymplectic)
    }
}

/// The data that produced a determined outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub prime: u64,
    pub criterion: String,
    /// Exponent of the (l/p) factor, when the criterion has one.
    pub r: Option<u32>,
    /// Exponent of the auxiliary factor ((3/p) or (2/p)), when present.
    pub t: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymplecticVerdict {
    pub outcome: Outcome,
    pub reason: String,
    pub witness: Option<Witness>,
}

impl SymplecticVerdict {
    fn determined(
        symplectic: bool,
        prime: u64,
        criterion: &str,
        r: Option<u32>,
        t: Option<u32>,
        reason: impl Into<String>,
    ) -> SymplecticVerdict {
        SymplecticVerdict {
            outcome: if symplectic {
                Outcome::Symplectic
            } else {
                Outcome::AntiSymplectic
            },
            reason: reason.into(),
            witness: Some(Witness {
                prime,
                criterion: criterion.to_string(),
                r,
                t,
            }),
        }
    }

    fn not_applicable(reason: impl Into<String>) -> SymplecticVerdict {
        SymplecticVerdict {
            outcome: Outcome::NotApplicable,
            reason: reason.into(),
            witness: None,
        }
    }
}

/// Invariant bundle for one criterion evaluation at a shared prime l.
/// The local p-torsion isomorphism hypothesis is carried as a caller
/// assertion; no criterion can verify it from invariants alone.
#[derive(Debug, Clone)]
pub struct CriterionInput<'a> {
    pub p: u64,
    pub e1: &'a LocalInvariants,
    pub e2: &'a LocalInvariants,
    pub iso_asserted: bool,
}

impl<'a> CriterionInput<'a> {
    pub fn new(p: u64, e1: &'a LocalInvariants, e2: &'a LocalInvariants) -> CriterionInput<'a> {
        CriterionInput {
            p,
            e1,
            e2,
            iso_asserted: true,
        }
    }

    fn shared_prime(&self) -> Result<u64> {
        if self.e1.prime != self.e2.prime {
            return Err(Error::PreconditionFailed(format!(
                "curves carry invariants at different primes {} and {}",
                self.e1.prime, self.e2.prime
            )));
        }
        Ok(self.e1.prime)
    }

    fn check_odd_p(&self) -> Result<()> {
        if self.p < 3 || self.p % 2 == 0 || !is_prime(self.p) {
            return Err(Error::PreconditionFailed(format!(
                "p = {} is not an odd prime",
                self.p
            )));
        }
        if !self.iso_asserted {
            return Err(Error::PreconditionFailed(
                "local p-torsion isomorphism not asserted by caller".to_string(),
            ));
        }
        Ok(())
    }
}

fn defect_of(local: &LocalInvariants) -> Result<ReductionClass> {
    classify_local(local)
}

fn require_defect(local: &LocalInvariants, e: u32) -> Result<ReductionClass> {
    let class = defect_of(local)?;
    if class.kind != ReductionKind::PotentiallyGood || class.e != Some(e) {
        return Err(Error::PreconditionFailed(format!(
            "curve does not have potentially good reduction with defect {e} at {} (found {:?}, e = {:?})",
            local.prime, class.kind, class.e
        )));
    }
    Ok(class)
}

fn legendre_sign(a: u64, p: u64) -> i32 {
    legendre_u64(a % p, p)
}

/// Whether the curve acquires a rational 3-torsion point over Q_l, read off
/// the minimal-model residues. For l >= 5 this is the squareness of -6*c6~;
/// at l = 2 it is keyed on the defect-3 classification row.
pub fn has_rational_3torsion_local(local: &LocalInvariants, row: Option<TableRow>) -> Result<bool> {
    let l = local.prime;
    if l >= 5 {
        let c6 = local.c6_res.ok_or_else(|| {
            Error::PreconditionFailed(format!("c6 = 0 at l = {l}: 3-torsion test undefined"))
        })?;
        let arg = ((2 * l - 6) % l) * (c6 % l) % l;
        return Ok(legendre_u64(arg, l) == 1);
    }
    if l == 2 {
        let c4 = local
            .c4_res
            .ok_or_else(|| Error::PreconditionFailed("c4 = 0 at l = 2".to_string()))?;
        let c6 = local
            .c6_res
            .ok_or_else(|| Error::PreconditionFailed("c6 = 0 at l = 2".to_string()))?;
        let row = row.ok_or_else(|| {
            Error::PreconditionFailed(
                "no defect-3 classification row available at l = 2".to_string(),
            )
        })?;
        return match row {
            TableRow::C3i => Ok(matches!((c4 % 8, c6 % 8), (7, 1) | (3, 5))),
            TableRow::C3ii | TableRow::C3iv => Ok(c6 % 8 == 5),
            TableRow::C3iii => Ok(matches!(
                (c4 % 32, c6 % 16),
                (29, 15) | (5, 3) | (13, 7) | (21, 11)
            )),
            other => Err(Error::PreconditionFailed(format!(
                "row {other:?} is not a defect-3 row at l = 2"
            ))),
        };
    }
    Err(Error::PreconditionFailed(
        "local 3-torsion test is only defined away from l = 3".to_string(),
    ))
}

/// Tame defect-3 criterion: l = 2 mod 3, both curves with e = 3 at l, p odd
/// and different from l. The type is decided by (l/p)^r (3/p)^t where r
/// compares v(Delta_m) mod 3 and t counts (mod 2) which curves gain a
/// rational 3-torsion point over Q_l.
pub fn crit_tame3(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l % 3 != 2 {
        return Err(Error::PreconditionFailed(format!(
            "l = {l} is not 2 mod 3"
        )));
    }
    if input.p == l {
        return Err(Error::PreconditionFailed("p = l".to_string()));
    }
    let c1 = require_defect(input.e1, 3)?;
    let c2 = require_defect(input.e2, 3)?;
    let r = u32::from(input.e1.v_delta % 3 != input.e2.v_delta % 3);
    let t1 = has_rational_3torsion_local(input.e1, c1.row)?;
    let t2 = has_rational_3torsion_local(input.e2, c2.row)?;
    let t = u32::from(t1 != t2);
    if input.p == 3 && t == 1 {
        return Ok(SymplecticVerdict::not_applicable(
            "the 3-torsion parity factor (3/p) is undefined at p = 3",
        ));
    }
    let mut sign = 1;
    if r == 1 {
        sign *= legendre_sign(l, input.p);
    }
    if t == 1 {
        sign *= legendre_sign(3, input.p);
    }
    Ok(SymplecticVerdict::determined(
        sign == 1,
        l,
        "tame-e3",
        Some(r),
        Some(t),
        format!(
            "defect 3 at l = {l}: v(Dm) = {} vs {}, local 3-torsion {} vs {}",
            input.e1.v_delta, input.e2.v_delta, t1, t2
        ),
    ))
}

/// Defect-3 criterion at p = 3 for l = 1 mod 3: the type is symplectic
/// exactly when the minimal discriminant valuations agree mod 3.
pub fn crit_e3_p3(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l % 3 != 1 {
        return Err(Error::PreconditionFailed(format!(
            "l = {l} is not 1 mod 3"
        )));
    }
    if input.p != 3 {
        return Err(Error::PreconditionFailed(format!(
            "criterion requires p = 3, got p = {}",
            input.p
        )));
    }
    require_defect(input.e1, 3)?;
    require_defect(input.e2, 3)?;
    let same = input.e1.v_delta % 3 == input.e2.v_delta % 3;
    Ok(SymplecticVerdict::determined(
        same,
        l,
        "e3-p3",
        Some(u32::from(!same)),
        None,
        format!(
            "v(Dm) = {} vs {} mod 3 at l = {l}, p = 3",
            input.e1.v_delta, input.e2.v_delta
        ),
    ))
}

/// Wild defect-3 criterion at l = 3 (valuation triples (2,3,4) or (5,8,12),
/// unit discriminant 2 mod 3 on both curves), p >= 5: symplectic iff
/// (3/p)^r = 1 with r comparing c6~ mod 3.
pub fn crit_wild3(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l != 3 {
        return Err(Error::PreconditionFailed(format!("l = {l}, need l = 3")));
    }
    if input.p < 5 {
        return Err(Error::PreconditionFailed(
            "wild defect-3 criterion requires p >= 5".to_string(),
        ));
    }
    for local in [input.e1, input.e2] {
        if !(local.triple_is(2, 3, 4) || local.triple_is(5, 8, 12)) {
            return Err(Error::PreconditionFailed(format!(
                "valuation triple ({:?}, {:?}, {}) is not (2,3,4) or (5,8,12)",
                local.v_c4, local.v_c6, local.v_delta
            )));
        }
        if local.delta_res % 3 != 2 {
            return Err(Error::PreconditionFailed(
                "unit discriminant is not 2 mod 3 (torsion field is abelian)".to_string(),
            ));
        }
    }
    let c6a = input.e1.c6_res.expect("v(c6) = 3 or 8 implies c6 != 0") % 3;
    let c6b = input.e2.c6_res.expect("v(c6) = 3 or 8 implies c6 != 0") % 3;
    let r = u32::from(c6a != c6b);
    let symplectic = r == 0 || legendre_sign(3, input.p) == 1;
    Ok(SymplecticVerdict::determined(
        symplectic,
        3,
        "wild-e3",
        Some(r),
        None,
        format!("c6~ = {c6a} vs {c6b} mod 3 at l = 3"),
    ))
}

/// Tame defect-4 criterion: l = 3 mod 4, both curves with e = 4, p >= 5.
/// Symplectic iff (l/p)^r (2/p)^t = 1 where r compares v(Delta_m) mod 4 and
/// t counts which unit discriminants are squares mod l.
pub fn crit_tame4(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l % 4 != 3 {
        return Err(Error::PreconditionFailed(format!(
            "l = {l} is not 3 mod 4"
        )));
    }
    if input.p == l {
        return Err(Error::PreconditionFailed("p = l".to_string()));
    }
    if input.p == 3 {
        return Ok(SymplecticVerdict::not_applicable(
            "tame defect-4 criterion is only stated for p >= 5",
        ));
    }
    require_defect(input.e1, 4)?;
    require_defect(input.e2, 4)?;
    let r = u32::from(input.e1.v_delta % 4 != input.e2.v_delta % 4);
    let s1 = legendre_u64(input.e1.delta_res % l, l) == 1;
    let s2 = legendre_u64(input.e2.delta_res % l, l) == 1;
    let t = u32::from(s1 != s2);
    let mut sign = 1;
    if r == 1 {
        sign *= legendre_sign(l, input.p);
    }
    if t == 1 {
        sign *= legendre_sign(2, input.p);
    }
    Ok(SymplecticVerdict::determined(
        sign == 1,
        l,
        "tame-e4",
        Some(r),
        Some(t),
        format!(
            "defect 4 at l = {l}: v(Dm) = {} vs {}, D~ square {} vs {}",
            input.e1.v_delta, input.e2.v_delta, s1, s2
        ),
    ))
}

/// Wild defect-4 criterion at l = 2 (triples (5,8,9) or (7,11,15) and
/// c4~ = 5*D~ mod 8), odd p: symplectic iff (2/p)^r = 1 with r comparing
/// c6~ mod 4. The hypothesis transfers to the partner curve; a violation
/// there contradicts the assumed torsion isomorphism.
pub fn crit_wild4(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l != 2 {
        return Err(Error::PreconditionFailed(format!("l = {l}, need l = 2")));
    }
    let check_triple = |local: &LocalInvariants| {
        local.triple_is(5, 8, 9) || local.triple_is(7, 11, 15)
    };
    if !check_triple(input.e1) || !check_triple(input.e2) {
        return Err(Error::PreconditionFailed(
            "valuation triples are not (5,8,9) or (7,11,15) at l = 2".to_string(),
        ));
    }
    let hyp = |local: &LocalInvariants| {
        let c4 = local.c4_res.expect("finite v(c4)");
        c4 % 8 == (5 * local.delta_res) % 8
    };
    if !hyp(input.e1) {
        return Err(Error::PreconditionFailed(
            "c4~ = 5*D~ mod 8 fails on the first curve".to_string(),
        ));
    }
    if !hyp(input.e2) {
        return Err(Error::InconsistentPair(
            "c4~ = 5*D~ mod 8 holds for the first curve but not the second; \
             this contradicts the asserted torsion isomorphism"
                .to_string(),
        ));
    }
    let c6a = input.e1.c6_res.expect("finite v(c6)") % 4;
    let c6b = input.e2.c6_res.expect("finite v(c6)") % 4;
    let r = u32::from(c6a != c6b);
    let symplectic = r == 0 || legendre_sign(2, input.p) == 1;
    Ok(SymplecticVerdict::determined(
        symplectic,
        2,
        "wild-e4",
        Some(r),
        None,
        format!("c6~ = {c6a} vs {c6b} mod 4 at l = 2"),
    ))
}

/// Defect-24 criterion at l = 2, assuming (caller assertion, recorded in the
/// verdict) that both curves acquire good reduction over the same field.
/// If (2/p) = 1 the type is symplectic; otherwise it is symplectic exactly
/// when the minimal discriminant valuations agree mod 3.
pub fn crit_e24(input: &CriterionInput, same_inertial_field: bool) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l != 2 {
        return Err(Error::PreconditionFailed(format!("l = {l}, need l = 2")));
    }
    if !same_inertial_field {
        return Err(Error::PreconditionFailed(
            "defect-24 criterion requires the caller to assert a shared inertial field"
                .to_string(),
        ));
    }
    require_defect(input.e1, 24)?;
    require_defect(input.e2, 24)?;
    let note = "shared inertial field caller-asserted";
    if legendre_sign(2, input.p) == 1 {
        return Ok(SymplecticVerdict::determined(
            true,
            2,
            "e24",
            Some(0),
            None,
            format!("(2/{}) = 1; {note}", input.p),
        ));
    }
    let same = input.e1.v_delta % 3 == input.e2.v_delta % 3;
    Ok(SymplecticVerdict::determined(
        same,
        2,
        "e24",
        Some(u32::from(!same)),
        None,
        format!(
            "(2/{}) = -1, v2(Dm) = {} vs {} mod 3; {note}",
            input.p, input.e1.v_delta, input.e2.v_delta
        ),
    ))
}

/// Quaternionic defect-8 criterion at l = 2. Conductors are normalized by
/// twisting both curves by 2 when needed so both land at 2^5 or both at 2^8;
/// the shared inertial field is verified through the lookup-table tags.
/// If (2/p) = 1 the type is symplectic; otherwise conductor 2^5 compares the
/// two-case table membership and conductor 2^8 compares c4~ mod 4.
pub fn crit_e8(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l != 2 {
        return Err(Error::PreconditionFailed(format!("l = {l}, need l = 2")));
    }
    let c1 = require_defect(input.e1, 8)?;
    let c2 = require_defect(input.e2, 8)?;
    let f1 = input.e1.conductor_exponent;
    let f2 = input.e2.conductor_exponent;

    // Normalize so that both conductor exponents agree and are 5 or 8.
    let mut locals: Option<(LocalInvariants, LocalInvariants)> = None;
    let mut twisted = false;
    if !(f1 == f2 && (f1 == 5 || f1 == 8)) {
        let t1 = quadratic_twist(&input.e1.minimal_model, &BigInt::from(2))?;
        let t2 = quadratic_twist(&input.e2.minimal_model, &BigInt::from(2))?;
        let (_, l1) = minimal_model_at(&t1, 2)?;
        let (_, l2) = minimal_model_at(&t2, 2)?;
        let g1 = l1.conductor_exponent;
        let g2 = l2.conductor_exponent;
        if !(g1 == g2 && (g1 == 5 || g1 == 8)) {
            return Err(Error::PreconditionFailed(format!(
                "conductor exponents {f1}, {f2} do not normalize to a common 5 or 8 \
                 after twisting both curves by 2 (got {g1}, {g2})"
            )));
        }
        require_defect(&l1, 8)?;
        require_defect(&l2, 8)?;
        locals = Some((l1, l2));
        twisted = true;
    }
    let (la, lb) = match &locals {
        Some((a, b)) => (a, b),
        None => (input.e1, input.e2),
    };
    let ca = if twisted { classify_local(la)? } else { c1 };
    let cb = if twisted { classify_local(lb)? } else { c2 };

    let tag_a = inertial_field_tag(la, 8)?;
    let tag_b = inertial_field_tag(lb, 8)?;
    if tag_a != tag_b {
        return Err(Error::PreconditionFailed(format!(
            "curves acquire good reduction over different fields ({tag_a:?} vs {tag_b:?})"
        )));
    }
    let note = if twisted {
        "; both curves twisted by 2 to normalize conductors"
    } else {
        ""
    };
    if legendre_sign(2, input.p) == 1 {
        return Ok(SymplecticVerdict::determined(
            true,
            2,
            "e8",
            Some(0),
            None,
            format!("(2/{}) = 1{note}", input.p),
        ));
    }
    let f = la.conductor_exponent;
    let symplectic = if f == 5 {
        let case_a = ca.row.and_then(quaternionic_case).ok_or(Error::TableMiss)?;
        let case_b = cb.row.and_then(quaternionic_case).ok_or(Error::TableMiss)?;
        case_a == case_b
    } else {
        let c4a = la.c4_res.expect("finite v(c4) in defect-8 rows") % 4;
        let c4b = lb.c4_res.expect("finite v(c4) in defect-8 rows") % 4;
        c4a == c4b
    };
    Ok(SymplecticVerdict::determined(
        symplectic,
        2,
        "e8",
        Some(u32::from(!symplectic)),
        None,
        format!(
            "(2/{}) = -1, conductor 2^{f}, table comparison{note}",
            input.p
        ),
    ))
}

/// Dicyclic defect-12 criterion at l = 3, p >= 5, shared inertial field via
/// the lookup-table tags. If (3/p) = 1 the type is symplectic; otherwise it
/// is symplectic exactly when both curves land in the same four-way case.
pub fn crit_e12(input: &CriterionInput) -> Result<SymplecticVerdict> {
    input.check_odd_p()?;
    let l = input.shared_prime()?;
    if l != 3 {
        return Err(Error::PreconditionFailed(format!("l = {l}, need l = 3")));
    }
    if input.p < 5 {
        return Err(Error::PreconditionFailed(
            "defect-12 criterion requires p >= 5".to_string(),
        ));
    }
    let c1 = require_defect(input.e1, 12)?;
    let c2 = require_defect(input.e2, 12)?;
    let tag_a = inertial_field_tag(input.e1, 12)?;
    let tag_b = inertial_field_tag(input.e2, 12)?;
    if tag_a != tag_b {
        return Err(Error::PreconditionFailed(format!(
            "curves acquire good reduction over different fields ({tag_a:?} vs {tag_b:?})"
        )));
    }
    if legendre_sign(3, input.p) == 1 {
        return Ok(SymplecticVerdict::determined(
            true,
            3,
            "e12",
            Some(0),
            None,
            format!("(3/{}) = 1", input.p),
        ));
    }
    let case_a = c1.row.and_then(dicyclic_case).ok_or(Error::TableMiss)?;
    let case_b = c2.row.and_then(dicyclic_case).ok_or(Error::TableMiss)?;
    let symplectic = case_a == case_b;
    Ok(SymplecticVerdict::determined(
        symplectic,
        3,
        "e12",
        Some(u32::from(!symplectic)),
        None,
        format!(
            "(3/{}) = -1, four-way cases {case_a} vs {case_b}",
            input.p
        ),
    ))
}

/// Good-reduction criterion: both curves reduce to F_l-isomorphic curves,
/// p divides the Frobenius discriminant Delta_l, and p does not divide
/// beta_l. Under these hypotheses the torsion isomorphism is necessarily
/// symplectic; the criterion never emits AntiSymplectic.
pub fn crit_good(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    p: u64,
) -> Result<SymplecticVerdict> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::PreconditionFailed(format!(
            "p = {p} is not an odd prime"
        )));
    }
    if l == p {
        return Err(Error::PreconditionFailed("p = l".to_string()));
    }
    if l >= MAX_COUNT_PRIME {
        return Err(Error::ResourceBound(format!(
            "good-reduction criterion counts points; l = {l} exceeds the bound {MAX_COUNT_PRIME}"
        )));
    }
    let (m1, l1) = minimal_model_at(e1, l)?;
    let (m2, l2) = minimal_model_at(e2, l)?;
    if l1.v_delta != 0 || l2.v_delta != 0 {
        return Err(Error::PreconditionFailed(format!(
            "both curves must have good reduction at {l}"
        )));
    }
    let r1 = FpCurve::reduce(&m1, l)?;
    let r2 = FpCurve::reduce(&m2, l)?;
    if !residual_iso_check(&r1, &r2) {
        return Err(Error::PreconditionFailed(format!(
            "residual curves are not F_{l}-isomorphic"
        )));
    }
    let fd = FrobeniusData::from_fp_curve(&r1)?;
    if !fd.order_divisible_by(p) {
        if fd.delta_l.unsigned_abs() % p != 0 {
            return Ok(SymplecticVerdict::not_applicable(format!(
                "p = {p} does not divide Delta_{l} = {}",
                fd.delta_l
            )));
        }
        return Ok(SymplecticVerdict::not_applicable(format!(
            "p = {p} divides beta_{l} = {} (Frobenius is scalar mod p)",
            fd.beta_l
        )));
    }
    Ok(SymplecticVerdict::determined(
        true,
        l,
        "good",
        None,
        None,
        format!(
            "good reduction at {l}: a_{l} = {}, Delta_{l} = {} divisible by {p}, beta_{l} = {} coprime to {p}",
            fd.a_l, fd.delta_l, fd.beta_l
        ),
    ))
}

/// Multiplicative-reduction criterion. Both curves must be multiplicative at
/// l after twisting both by the same squarefree d (d = 1 when they already
/// are); the type is symplectic exactly when the ratio of the minimal
/// discriminant valuations is a square mod p.
pub fn crit_pot_mult(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    p: u64,
) -> Result<SymplecticVerdict> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::PreconditionFailed(format!(
            "p = {p} is not an odd prime"
        )));
    }
    if l == p {
        return Err(Error::PreconditionFailed("p = l".to_string()));
    }
    let (d, l1, l2) = common_multiplicative_twist(e1, e2, l)?;
    let v1 = l1.v_delta as u64;
    let v2 = l2.v_delta as u64;
    if v1 % p == 0 || v2 % p == 0 {
        return Ok(SymplecticVerdict::not_applicable(format!(
            "p = {p} divides a minimal discriminant valuation ({v1} or {v2}) at l = {l}"
        )));
    }
    let ratio = (v1 % p) * inv_mod(v2 % p, p) % p;
    let symplectic = legendre_u64(ratio, p) == 1;
    let twist_note = if d == 1 {
        String::new()
    } else {
        format!("; both curves twisted by {d}")
    };
    Ok(SymplecticVerdict::determined(
        symplectic,
        l,
        "pot-mult",
        None,
        None,
        format!(
            "multiplicative at {l}: v(Dm) = {v1} vs {v2}, ratio = {ratio} mod {p}{twist_note}"
        ),
    ))
}

/// Finds a single squarefree twist d in {1, -1, 2, -2, l, -l, 2l, -2l}
/// making both curves multiplicative at l; returns d with both minimal
/// local-invariant bundles of the twisted curves.
fn common_multiplicative_twist(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
) -> Result<(i64, LocalInvariants, LocalInvariants)> {
    let li = l as i64;
    for d in [1, -1, 2, -2, li, -li, 2 * li, -2 * li] {
        if !is_squarefree(&BigInt::from(d)) {
            continue;
        }
        let t1 = quadratic_twist(e1, &BigInt::from(d))?;
        let t2 = quadratic_twist(e2, &BigInt::from(d))?;
        let (_, l1) = minimal_model_at(&t1, l)?;
        let (_, l2) = minimal_model_at(&t2, l)?;
        if l1.conductor_exponent == 1 && l2.conductor_exponent == 1 {
            return Ok((d, l1, l2));
        }
    }
    Err(Error::PreconditionFailed(format!(
        "no common quadratic twist makes both curves multiplicative at {l}"
    )))
}

/// Symplectic type carried by an isogeny of degree n acting on p-torsion:
/// symplectic exactly when (n/p) = 1.
pub fn isogeny_type(n: u64, p: u64) -> Result<SymplecticType> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::PreconditionFailed(format!(
            "p = {p} is not an odd prime"
        )));
    }
    if n % p == 0 {
        return Err(Error::DegreeDivisibleByP);
    }
    Ok(if legendre_u64(n % p, p) == 1 {
        SymplecticType::Symplectic
    } else {
        SymplecticType::AntiSymplectic
    })
}

// ---------------------------------------------------------------------------
// Criterion existence gate
// ---------------------------------------------------------------------------

pub type Mat = [[u64; 2]; 2];

/// Shape of the local image that makes a criterion exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExistencePattern {
    /// The generated subgroup is non-abelian.
    NonAbelian,
    /// Abelian, conjugate to the group generated by [[a,1],[0,a]]: every
    /// element has a double eigenvalue and some element is non-scalar.
    ScalarUnipotent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistenceReport {
    pub exists: bool,
    pub pattern: Option<ExistencePattern>,
    pub group_order: u64,
    pub centralizer_order: u64,
}

pub fn mat_mul(a: &Mat, b: &Mat, p: u64) -> Mat {
    let mut out = [[0u64; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % p;
        }
    }
    out
}

pub fn mat_det(a: &Mat, p: u64) -> u64 {
    (a[0][0] * a[1][1] % p + p * p - a[0][1] * a[1][0] % p) % p
}

pub fn mat_trace(a: &Mat, p: u64) -> u64 {
    (a[0][0] + a[1][1]) % p
}

fn mat_reduce(a: &Mat, p: u64) -> Mat {
    [[a[0][0] % p, a[0][1] % p], [a[1][0] % p, a[1][1] % p]]
}

fn commutes(a: &Mat, b: &Mat, p: u64) -> bool {
    mat_mul(a, b, p) == mat_mul(b, a, p)
}

/// Closure of the generator set under multiplication: the generated subgroup
/// of GL2(F_p) (generators are invertible, so no inverses are needed beyond
/// powers).
pub fn generated_subgroup(generators: &[Mat], p: u64) -> Result<Vec<Mat>> {
    use std::collections::HashSet;
    let id: Mat = [[1, 0], [0, 1]];
    let mut seen: HashSet<Mat> = HashSet::new();
    seen.insert(id);
    let mut frontier = vec![id];
    let gens: Vec<Mat> = generators.iter().map(|g| mat_reduce(g, p)).collect();
    for g in &gens {
        if mat_det(g, p) == 0 {
            return Err(Error::InvalidInput(format!(
                "generator {g:?} is singular mod {p}"
            )));
        }
    }
    while let Some(m) = frontier.pop() {
        for g in &gens {
            let next = mat_mul(&m, g, p);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    let mut out: Vec<Mat> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Decides whether a symplectic criterion exists for a local image generated
/// by the given matrices: it does exactly when every element of the
/// centralizer of the image in GL2(F_p) has square determinant. Also reports
/// which of the two sufficient shapes (non-abelian image, or conjugate to
/// the scalar-unipotent group) the image matches, if any.
pub fn criterion_exists(generators: &[Mat], p: u64) -> Result<ExistenceReport> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} is not an odd prime")));
    }
    if p > 23 {
        return Err(Error::ResourceBound(format!(
            "existence gate enumerates GL2(F_p); p = {p} exceeds the bound 23"
        )));
    }
    if generators.is_empty() {
        return Err(Error::InvalidInput("empty generator list".to_string()));
    }
    let group = generated_subgroup(generators, p)?;
    let gens: Vec<Mat> = generators.iter().map(|g| mat_reduce(g, p)).collect();

    let mut exists = true;
    let mut centralizer_order = 0u64;
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m: Mat = [[a, b], [c, d]];
                    if mat_det(&m, p) == 0 {
                        continue;
                    }
                    if gens.iter().all(|g| commutes(&m, g, p)) {
                        centralizer_order += 1;
                        if legendre_u64(mat_det(&m, p), p) != 1 {
                            exists = false;
                        }
                    }
                }
            }
        }
    }

    let abelian = group
        .iter()
        .enumerate()
        .all(|(i, a)| group[i..].iter().all(|b| commutes(a, b, p)));
    let pattern = if !abelian {
        Some(ExistencePattern::NonAbelian)
    } else {
        let double_eigenvalue = group.iter().all(|m| {
            let t = mat_trace(m, p);
            let d = mat_det(m, p);
            t * t % p == 4 * d % p
        });
        let has_non_scalar = group
            .iter()
            .any(|m| !(m[0][1] == 0 && m[1][0] == 0 && m[0][0] == m[1][1]));
        if double_eigenvalue && has_non_scalar {
            Some(ExistencePattern::ScalarUnipotent)
        } else {
            None
        }
    };

    Ok(ExistenceReport {
        exists,
        pattern,
        group_order: group.len() as u64,
        centralizer_order,
    })
}

// ---------------------------------------------------------------------------
// Dispatch and comparison
// ---------------------------------------------------------------------------

/// Evaluates the applicable criterion (if any) at one prime l for a pair of
/// curves with asserted isomorphic p-torsion. Errors from individual
/// criteria are absorbed into NotApplicable verdicts so callers always get a
/// report.
pub fn dispatch_at_prime(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    p: u64,
) -> SymplecticVerdict {
    match dispatch_inner(e1, e2, l, p) {
        Ok(v) => v,
        Err(err) => SymplecticVerdict::not_applicable(format!("[{}] {err}", err.code())),
    }
}

fn dispatch_inner(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    p: u64,
) -> Result<SymplecticVerdict> {
    if l == p {
        return Ok(SymplecticVerdict::not_applicable(
            "criteria require l different from p",
        ));
    }
    let (_, l1) = minimal_model_at(e1, l)?;
    let (_, l2) = minimal_model_at(e2, l)?;
    let c1 = classify_local(&l1)?;
    let c2 = classify_local(&l2)?;
    use ReductionKind::*;
    let mult = |k: ReductionKind| matches!(k, Multiplicative | PotentiallyMultiplicative);
    match (c1.kind, c2.kind) {
        (Good, Good) => crit_good(e1, e2, l, p),
        (a, b) if mult(a) && mult(b) => crit_pot_mult(e1, e2, l, p),
        (PotentiallyGood, PotentiallyGood) => {
            let (ea, eb) = (c1.e.unwrap_or(0), c2.e.unwrap_or(0));
            if ea != eb {
                return Ok(SymplecticVerdict::not_applicable(format!(
                    "semistability defects differ at {l}: {ea} vs {eb}"
                )));
            }
            match ea {
                2 => {
                    let (d, t1, t2) = common_twist_with(e1, e2, l, |loc| {
                        Ok(loc.v_delta == 0)
                    })?;
                    let mut v = crit_good(&t1, &t2, l, p)?;
                    v.reason = format!("{} (after twisting both curves by {d})", v.reason);
                    Ok(v)
                }
                3 => dispatch_defect3(&l1, &l2, l, p, None),
                4 => {
                    let input = CriterionInput::new(p, &l1, &l2);
                    if l == 2 {
                        crit_wild4(&input)
                    } else if l % 4 == 3 {
                        crit_tame4(&input)
                    } else {
                        Ok(SymplecticVerdict::not_applicable(format!(
                            "no defect-4 criterion at l = {l} (l = 1 mod 4)"
                        )))
                    }
                }
                6 => {
                    let (d, t1, t2) = common_twist_with(e1, e2, l, |loc| {
                        Ok(matches!(classify_local(loc)?.e, Some(3)))
                    })?;
                    let (_, m1) = minimal_model_at(&t1, l)?;
                    let (_, m2) = minimal_model_at(&t2, l)?;
                    dispatch_defect3(&m1, &m2, l, p, Some(d))
                }
                8 => crit_e8(&CriterionInput::new(p, &l1, &l2)),
                12 => crit_e12(&CriterionInput::new(p, &l1, &l2)),
                24 => crit_e24(&CriterionInput::new(p, &l1, &l2), true),
                other => Ok(SymplecticVerdict::not_applicable(format!(
                    "no criterion for semistability defect {other} at {l}"
                ))),
            }
        }
        (a, b) => Ok(SymplecticVerdict::not_applicable(format!(
            "reduction kinds differ at {l}: {a:?} vs {b:?}"
        ))),
    }
}

fn dispatch_defect3(
    l1: &LocalInvariants,
    l2: &LocalInvariants,
    l: u64,
    p: u64,
    twist: Option<i64>,
) -> Result<SymplecticVerdict> {
    let input = CriterionInput::new(p, l1, l2);
    let mut v = if l == 3 {
        crit_wild3(&input)?
    } else if l % 3 == 2 {
        crit_tame3(&input)?
    } else if p == 3 {
        crit_e3_p3(&input)?
    } else {
        return Ok(SymplecticVerdict::not_applicable(format!(
            "no defect-3 criterion at l = {l} for p = {p} (l = 1 mod 3, p != 3)"
        )));
    };
    if let Some(d) = twist {
        v.reason = format!("{} (after twisting both curves by {d})", v.reason);
    }
    Ok(v)
}

/// Finds one squarefree d in {-1, 2, -2, l, -l, 2l, -2l} such that the
/// minimal local invariants of both d-twists satisfy the predicate; returns
/// d with the twisted models.
fn common_twist_with(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    l: u64,
    pred: impl Fn(&LocalInvariants) -> Result<bool>,
) -> Result<(i64, WeierstrassModel, WeierstrassModel)> {
    let li = l as i64;
    for d in [-1, 2, -2, li, -li, 2 * li, -2 * li] {
        if !is_squarefree(&BigInt::from(d)) {
            continue;
        }
        let t1 = quadratic_twist(e1, &BigInt::from(d))?;
        let t2 = quadratic_twist(e2, &BigInt::from(d))?;
        let (_, m1) = minimal_model_at(&t1, l)?;
        let (_, m2) = minimal_model_at(&t2, l)?;
        if pred(&m1)? && pred(&m2)? {
            return Ok((d, t1, t2));
        }
    }
    Err(Error::PreconditionFailed(format!(
        "no common quadratic twist at {l} reaches the required reduction type"
    )))
}

/// Primes of bad reduction of the model, read off the minimal discriminant
/// valuations at the prime divisors of the discriminant.
pub fn bad_primes(model: &WeierstrassModel) -> Result<Vec<u64>> {
    let integral = model.integral_model();
    let inv = crate::curve_core::standard_invariants(&integral)?;
    let delta = inv.delta.to_integer();
    let mut out = Vec::new();
    for (q, _) in crate::nt::factor(&delta) {
        let (_, local) = minimal_model_at(model, q)?;
        if local.v_delta > 0 {
            out.push(q);
        }
    }
    Ok(out)
}

/// The usable-prime list: every prime (bad primes of either curve plus
/// caller-supplied good-reduction candidates) at which some criterion yields
/// a determined outcome, paired with the criterion id.
pub fn criterion_prime_list(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    p: u64,
    good_candidates: &[u64],
) -> Result<Vec<(u64, String)>> {
    let mut primes: Vec<u64> = bad_primes(e1)?;
    primes.extend(bad_primes(e2)?);
    primes.extend_from_slice(good_candidates);
    primes.sort_unstable();
    primes.dedup();
    let mut out = Vec::new();
    for l in primes {
        if l == p {
            continue;
        }
        let v = dispatch_at_prime(e1, e2, l, p);
        if v.outcome.is_determined() {
            let id = v.witness.expect("determined outcomes carry a witness").criterion;
            out.push((l, id));
        }
    }
    Ok(out)
}

/// One row of the comparison report, in the flat serialization shape
/// {prime, criterion, r, t, outcome, reason}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    pub prime: u64,
    pub criterion: Option<String>,
    pub r: Option<u32>,
    pub t: Option<u32>,
    pub outcome: Outcome,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub p: u64,
    pub verdicts: Vec<PrimeVerdict>,
    /// Primes with a determined outcome, with the criterion that fired.
    pub usable: Vec<(u64, String)>,
    /// The common determined outcome, when all determined verdicts agree.
    pub consensus: Option<Outcome>,
    /// True when determined verdicts disagree: impossible under correct
    /// hypotheses, hence a diagnostic for a broken isomorphism assertion.
    pub inconsistent: bool,
}

/// Runs every applicable criterion for the pair at all bad primes and all
/// good primes up to `good_bound`, and aggregates a consensus verdict.
/// Per-prime failures become NotApplicable rows; this never aborts.
pub fn compare(
    e1: &WeierstrassModel,
    e2: &WeierstrassModel,
    p: u64,
    good_bound: u64,
) -> Result<ComparisonReport> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} is not an odd prime")));
    }
    let mut primes: Vec<u64> = bad_primes(e1)?;
    primes.extend(bad_primes(e2)?);
    primes.extend((2..=good_bound).filter(|&q| is_prime(q)));
    primes.sort_unstable();
    primes.dedup();
    primes.retain(|&q| q != p);

    use rayon::prelude::*;
    let mut verdicts: Vec<PrimeVerdict> = primes
        .par_iter()
        .map(|&l| {
            let v = dispatch_at_prime(e1, e2, l, p);
            let (criterion, r, t) = match &v.witness {
                Some(w) => (Some(w.criterion.clone()), w.r, w.t),
                None => (None, None, None),
            };
            PrimeVerdict {
                prime: l,
                criterion,
                r,
                t,
                outcome: v.outcome,
                reason: v.reason,
            }
        })
        .collect();
    verdicts.sort_by_key(|v| v.prime);

    let usable: Vec<(u64, String)> = verdicts
        .iter()
        .filter(|v| v.outcome.is_determined())
        .map(|v| (v.prime, v.criterion.clone().expect("determined => criterion")))
        .collect();
    let determined: Vec<Outcome> = verdicts
        .iter()
        .filter(|v| v.outcome.is_determined())
        .map(|v| v.outcome)
        .collect();
    let (consensus, inconsistent) = match determined.split_first() {
        None => (None, false),
        Some((first, rest)) => {
            if rest.iter().all(|o| o == first) {
                (Some(*first), false)
            } else {
                (None, true)
            }
        }
    };
    Ok(ComparisonReport {
        p,
        verdicts,
        usable,
        consensus,
        inconsistent,
    })
}
