//! Reduction-type classification at a prime: good / multiplicative /
//! potentially multiplicative / potentially good, the semistability defect e
//! (degree of the minimal unramified-base extension giving good reduction),
//! the inertia-group shape, and the inertial-field tag for the wild
//! quaternionic (l = 2, e = 8) and dicyclic (l = 3, e = 12) cases.

use num_bigint::BigInt;
use serde::Serialize;

use crate::curve_core::{minimal_model_at, quadratic_twist, LocalInvariants, WeierstrassModel};
use crate::error::{Error, Result};

pub use crate::criteria::criterion_prime_list;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionKind {
    Good,
    Multiplicative,
    PotentiallyMultiplicative,
    PotentiallyGood,
}

/// Shape of the inertia image acting on torsion: cyclic of order e for
/// e <= 6, quaternion of order 8, dicyclic of order 12, or SL2(F3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InertiaTag {
    C1,
    C2,
    C3,
    C4,
    C6,
    H8,
    Dic12,
    SL2F3,
}

/// Row of the valuation-triple classification tables for l = 2, 3.
/// The letter groups by defect: C* rows live at l = 2 (e = 3 or 4),
/// B* rows at l = 3 (e = 3 or 4), D* rows are l = 2 with e = 8 and
/// G* rows are l = 3 with e = 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum TableRow {
    B3,
    B4i,
    B4ii,
    B4iii,
    C4Row,
    C3i,
    C3ii,
    C3iii,
    C3iv,
    Da,
    Db,
    Dc,
    Dd,
    De,
    Df,
    Ga,
    Gb,
    Gc,
    Gd,
    Ge,
    Gf,
    Gg,
    Gh,
    Gi,
    Gj,
}

/// Which field of good reduction applies in the two-field / many-field
/// cases: f1/f2 for (l, e) = (2, 4), g1..g4 for (2, 8), h1..h5 for (3, 12),
/// and Unique when the theorem pins a single field (tame cases and wild
/// e = 3 at l = 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InertialFieldTag {
    Unique,
    F1,
    F2,
    G1,
    G2,
    G3,
    G4,
    H1,
    H2,
    H3,
    H4,
    H5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionClass {
    pub prime: u64,
    pub kind: ReductionKind,
    /// Semistability defect; None for potentially multiplicative reduction.
    pub e: Option<u32>,
    pub inertia: Option<InertiaTag>,
    pub conductor_exponent: u32,
    /// Matched classification-table row, when one applied directly.
    pub row: Option<TableRow>,
    /// Twist d used to recognize e in {2, 6} via the table search.
    pub twist: Option<i64>,
}

fn inertia_of(e: u32) -> InertiaTag {
    match e {
        1 => InertiaTag::C1,
        2 => InertiaTag::C2,
        3 => InertiaTag::C3,
        4 => InertiaTag::C4,
        6 => InertiaTag::C6,
        8 => InertiaTag::H8,
        12 => InertiaTag::Dic12,
        24 => InertiaTag::SL2F3,
        _ => unreachable!("defect {e} out of range"),
    }
}

/// Classifies the reduction of an integral model at a prime.
pub fn classify(model: &WeierstrassModel, l: u64) -> Result<ReductionClass> {
    let (_, local) = minimal_model_at(model, l)?;
    classify_local(&local)
}

/// Same as `classify`, starting from already-computed local invariants.
pub fn classify_local(local: &LocalInvariants) -> Result<ReductionClass> {
    let l = local.prime;
    if local.v_delta == 0 {
        return Ok(ReductionClass {
            prime: l,
            kind: ReductionKind::Good,
            e: Some(1),
            inertia: Some(InertiaTag::C1),
            conductor_exponent: 0,
            row: None,
            twist: None,
        });
    }
    if local.conductor_exponent == 1 {
        return Ok(ReductionClass {
            prime: l,
            kind: ReductionKind::Multiplicative,
            e: Some(1),
            inertia: Some(InertiaTag::C1),
            conductor_exponent: 1,
            row: None,
            twist: None,
        });
    }
    // Additive from here on. v(j) < 0 <=> 3 v(c4) < v(delta).
    if let Some(vj) = local.v_j() {
        if vj < 0 {
            return Ok(ReductionClass {
                prime: l,
                kind: ReductionKind::PotentiallyMultiplicative,
                e: None,
                inertia: None,
                conductor_exponent: local.conductor_exponent,
                row: None,
                twist: None,
            });
        }
    }
    let (e, row, twist) = semistability_defect(local)?;
    Ok(ReductionClass {
        prime: l,
        kind: ReductionKind::PotentiallyGood,
        e: Some(e),
        inertia: Some(inertia_of(e)),
        conductor_exponent: local.conductor_exponent,
        row,
        twist,
    })
}

/// Semistability defect for a curve with potentially good reduction,
/// together with the table row that matched (l = 2, 3 only) and the twist
/// used when e in {2, 6} was detected through the twisted curve.
pub fn semistability_defect(
    local: &LocalInvariants,
) -> Result<(u32, Option<TableRow>, Option<i64>)> {
    let l = local.prime;
    if l >= 5 {
        let g = num_integer::gcd(local.v_delta as u64, 12);
        return Ok(((12 / g) as u32, None, None));
    }
    if let Some((row, e)) = match_row(local) {
        return Ok((e, Some(row), None));
    }
    // e = 2 and e = 6 reduce to e = 1 and e = 3 after one of finitely many
    // quadratic twists.
    let li = l as i64;
    for d in [-1, 2, -2, li, -li, 2 * li, -2 * li] {
        if !crate::nt::is_squarefree(&BigInt::from(d)) {
            continue;
        }
        let twisted = quadratic_twist(&local.minimal_model, &BigInt::from(d))?;
        let (_, tl) = minimal_model_at(&twisted, l)?;
        if tl.v_delta == 0 {
            return Ok((2, None, Some(d)));
        }
        if let Some((row, 3)) = match_row(&tl) {
            return Ok((6, Some(row), Some(d)));
        }
    }
    if l == 2 {
        // Remaining additive potentially good shape at 2: the inertia image
        // is the full SL2(F3), i.e. e = 24.
        return Ok((24, None, None));
    }
    Err(Error::UnclassifiedReduction {
        prime: l,
        vc4: local
            .v_c4
            .map(|v| v.to_string())
            .unwrap_or_else(|| "inf".to_string()),
        vc6: local
            .v_c6
            .map(|v| v.to_string())
            .unwrap_or_else(|| "inf".to_string()),
        vdelta: local.v_delta as u64,
    })
}

/// Matches the valuation triple (v(c4), v(c6), v(delta)) plus residue
/// side-conditions against the l = 2, 3 classification rows. Returns the
/// row and its defect e.
pub fn match_row(local: &LocalInvariants) -> Option<(TableRow, u32)> {
    let vd = local.v_delta;
    let f = local.conductor_exponent;
    let v6_is = |x: u32| local.v_c6 == Some(x);
    let v4_is = |x: u32| local.v_c4 == Some(x);
    match local.prime {
        2 => {
            let c4m4 = local.c4_res.map(|r| r % 4);
            let c4m8 = local.c4_res.map(|r| r % 8);
            let c6m4 = local.c6_res.map(|r| r % 4);
            let dm4 = local.delta_res % 4;
            let _ = c4m8;
            // e = 4.
            if local.triple_is(5, 8, 9) || local.triple_is(7, 11, 15) {
                return Some((TableRow::C4Row, 4));
            }
            // e = 3.
            if local.triple_is(4, 5, 4) && c4m4 == Some(3) && c6m4 == Some(1) {
                return Some((TableRow::C3i, 3));
            }
            if local.v_c4_at_least(6) && v6_is(5) && vd == 4 && c6m4 == Some(1) {
                return Some((TableRow::C3ii, 3));
            }
            if local.triple_is(4, 6, 8) && c6m4 == Some(3) && dm4 == 3 {
                return Some((TableRow::C3iii, 3));
            }
            if local.v_c4_at_least(7) && v6_is(7) && vd == 8 && c6m4 == Some(1) {
                return Some((TableRow::C3iv, 3));
            }
            // e = 8, conductor 2^5.
            if v4_is(4) && local.v_c6_at_least(7) && vd == 6 && c4m4 == Some(3) && f == 5 {
                return Some((TableRow::Da, 8));
            }
            if v4_is(6) && local.v_c6_at_least(10) && vd == 12 && c4m4 == Some(1) && f == 5 {
                return Some((TableRow::Db, 8));
            }
            if local.triple_is(7, 9, 12) && f == 5 {
                return Some((TableRow::Dc, 8));
            }
            if local.triple_is(4, 6, 9) && f == 5 {
                return Some((TableRow::Dd, 8));
            }
            // e = 8, conductor 2^8.
            if v4_is(5) && local.v_c6_at_least(9) && vd == 9 && f == 8 {
                return Some((TableRow::De, 8));
            }
            if v4_is(7) && local.v_c6_at_least(12) && vd == 15 && f == 8 {
                return Some((TableRow::Df, 8));
            }
            None
        }
        3 => {
            let dm9 = local.delta_res % 9;
            let special = dm9 == 2 || dm9 == 4;
            // e = 3 (wild).
            if local.triple_is(2, 3, 4) || local.triple_is(5, 8, 12) {
                return Some((TableRow::B3, 3));
            }
            // e = 4.
            if v4_is(2) && local.v_c6_at_least(5) && vd == 3 {
                return Some((TableRow::B4i, 4));
            }
            if v4_is(4) && local.v_c6_at_least(8) && vd == 9 {
                return Some((TableRow::B4i, 4));
            }
            if local.v_c4_at_least(2) && v6_is(3) && vd == 3 && special {
                return Some((TableRow::B4ii, 4));
            }
            if local.v_c4_at_least(4) && v6_is(6) && vd == 9 && special {
                return Some((TableRow::B4iii, 4));
            }
            // e = 12, conductor 3^3.
            if local.v_c4_at_least(2) && v6_is(3) && vd == 3 && !special && f == 3 {
                return Some((TableRow::Ga, 12));
            }
            if local.v_c4_at_least(4) && v6_is(6) && vd == 9 && !special && f == 3 {
                return Some((TableRow::Gb, 12));
            }
            if local.triple_is(2, 4, 3) && f == 3 {
                return Some((TableRow::Gc, 12));
            }
            if local.triple_is(2, 3, 5) && f == 3 {
                return Some((TableRow::Gd, 12));
            }
            if local.triple_is(4, 7, 9) && f == 3 {
                return Some((TableRow::Ge, 12));
            }
            if local.triple_is(4, 6, 11) && f == 3 {
                return Some((TableRow::Gf, 12));
            }
            // e = 12, conductor 3^5.
            if local.v_c4_at_least(3) && v6_is(4) && vd == 5 && f == 5 {
                return Some((TableRow::Gg, 12));
            }
            if local.v_c4_at_least(4) && v6_is(5) && vd == 7 && f == 5 {
                return Some((TableRow::Gh, 12));
            }
            if local.v_c4_at_least(5) && v6_is(7) && vd == 11 && f == 5 {
                return Some((TableRow::Gi, 12));
            }
            if local.v_c4_at_least(6) && v6_is(8) && vd == 13 && f == 5 {
                return Some((TableRow::Gj, 12));
            }
            None
        }
        _ => None,
    }
}

/// Case (a)/(b) of the e = 8, conductor 2^5 pairing table.
pub fn quaternionic_case(row: TableRow) -> Option<char> {
    match row {
        TableRow::Da | TableRow::Dc => Some('a'),
        TableRow::Db | TableRow::Dd => Some('b'),
        _ => None,
    }
}

/// Case (a)-(d) of the e = 12 pairing table at l = 3.
pub fn dicyclic_case(row: TableRow) -> Option<char> {
    match row {
        TableRow::Ga | TableRow::Gc | TableRow::Gf => Some('a'),
        TableRow::Gb | TableRow::Gd | TableRow::Ge => Some('b'),
        TableRow::Gg | TableRow::Gj => Some('c'),
        TableRow::Gh | TableRow::Gi => Some('d'),
        _ => None,
    }
}

/// The inertial-field tag: which of the finitely many candidate fields of
/// good reduction applies, keyed on the table row and unit residues.
pub fn inertial_field_tag(local: &LocalInvariants, e: u32) -> Result<InertialFieldTag> {
    let l = local.prime;
    // Tame cases (e coprime to l) and the wild e = 3 at l = 3 have a unique
    // field.
    if (l != 2 || e % 2 != 0) && (l != 3 || e % 3 != 0) {
        return Ok(InertialFieldTag::Unique);
    }
    if l == 3 && e == 3 {
        return Ok(InertialFieldTag::Unique);
    }
    let row = match match_row(local) {
        Some((row, re)) if re == e => row,
        _ => return Err(Error::TableMiss),
    };
    let c4m3 = local.c4_res.map(|r| r % 3);
    let c4m4 = local.c4_res.map(|r| r % 4);
    let c4m8 = local.c4_res.map(|r| r % 8);
    let c6m4 = local.c6_res.map(|r| r % 4);
    let dm3 = local.delta_res % 3;
    let dm4 = local.delta_res % 4;
    let dm9 = local.delta_res % 9;
    match (l, e, row) {
        // l = 2, e = 4: two candidate fields keyed on (c4 mod 8, c6 mod 4).
        (2, 4, TableRow::C4Row) => {
            let key = (c4m8, c6m4);
            let first_triple = local.triple_is(5, 8, 9);
            match key {
                (Some(1), Some(1)) | (Some(5), Some(3)) => Ok(if first_triple {
                    InertialFieldTag::F2
                } else {
                    InertialFieldTag::F1
                }),
                (Some(1), Some(3)) | (Some(5), Some(1)) => Ok(if first_triple {
                    InertialFieldTag::F1
                } else {
                    InertialFieldTag::F2
                }),
                _ => Err(Error::TableMiss),
            }
        }
        // l = 2, e = 8, conductor 2^5.
        (2, 8, TableRow::Da) | (2, 8, TableRow::Db) => {
            let bound = if row == TableRow::Da { 8 } else { 11 };
            if local.v_c6_at_least(bound) {
                Ok(InertialFieldTag::G1)
            } else {
                Ok(InertialFieldTag::G2)
            }
        }
        (2, 8, TableRow::Dc) => match c4m4 {
            Some(1) => Ok(InertialFieldTag::G1),
            Some(3) => Ok(InertialFieldTag::G2),
            _ => Err(Error::TableMiss),
        },
        (2, 8, TableRow::Dd) => match dm4 {
            1 => Ok(InertialFieldTag::G1),
            3 => Ok(InertialFieldTag::G2),
            _ => Err(Error::TableMiss),
        },
        // l = 2, e = 8, conductor 2^8.
        (2, 8, TableRow::De) => match c4m8 {
            Some(1) | Some(3) => Ok(InertialFieldTag::G3),
            Some(5) | Some(7) => Ok(InertialFieldTag::G4),
            _ => Err(Error::TableMiss),
        },
        (2, 8, TableRow::Df) => match c4m8 {
            Some(1) | Some(3) => Ok(InertialFieldTag::G4),
            Some(5) | Some(7) => Ok(InertialFieldTag::G3),
            _ => Err(Error::TableMiss),
        },
        // l = 3, e = 12, conductor 3^3: G_a/G_b keyed on v(c4), the exact
        // triples on delta mod 3.
        (3, 12, TableRow::Ga) | (3, 12, TableRow::Gb) => {
            let low = if row == TableRow::Ga { 2 } else { 4 };
            if local.v_c4 == Some(low) {
                Ok(InertialFieldTag::H1)
            } else {
                Ok(InertialFieldTag::H2)
            }
        }
        (3, 12, TableRow::Gc)
        | (3, 12, TableRow::Gd)
        | (3, 12, TableRow::Ge)
        | (3, 12, TableRow::Gf) => match dm3 {
            1 => Ok(InertialFieldTag::H1),
            2 => Ok(InertialFieldTag::H2),
            _ => Err(Error::TableMiss),
        },
        // l = 3, e = 12, conductor 3^5.
        (3, 12, TableRow::Gh) | (3, 12, TableRow::Gj) => match dm9 {
            8 => Ok(InertialFieldTag::H4),
            5 => Ok(InertialFieldTag::H3),
            2 => Ok(InertialFieldTag::H5),
            _ => Err(Error::TableMiss),
        },
        (3, 12, TableRow::Gg) | (3, 12, TableRow::Gi) => {
            let boundary = if row == TableRow::Gg { 3 } else { 5 };
            if local.v_c4 == Some(boundary) {
                match (dm9, c4m3) {
                    (2, Some(2)) | (5, Some(1)) => Ok(InertialFieldTag::H3),
                    (2, Some(1)) | (8, Some(2)) => Ok(InertialFieldTag::H4),
                    (5, Some(2)) | (8, Some(1)) => Ok(InertialFieldTag::H5),
                    _ => Err(Error::TableMiss),
                }
            } else {
                match dm9 {
                    8 => Ok(InertialFieldTag::H3),
                    5 => Ok(InertialFieldTag::H4),
                    2 => Ok(InertialFieldTag::H5),
                    _ => Err(Error::TableMiss),
                }
            }
        }
        _ => Err(Error::TableMiss),
    }
}
