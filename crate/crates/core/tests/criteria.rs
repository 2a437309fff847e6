//! Criterion-level regression tests: the eight reference fixture pairs with
//! their published symplectic signs, per-criterion unit checks on frozen
//! witness models, the existence gate, and the structural properties
//! (swap symmetry, common-twist invariance).

use num_bigint::BigInt;
use symplectic_core::criteria::{
    compare, crit_e12, crit_e24, crit_e3_p3, crit_e8, crit_good, crit_pot_mult, crit_tame3,
    crit_tame4, crit_wild3, crit_wild4, criterion_exists, criterion_prime_list, dispatch_at_prime,
    isogeny_type, CriterionInput, ExistencePattern, Outcome,
};
use symplectic_core::curve_core::{minimal_model_at, quadratic_twist, LocalInvariants};
use symplectic_core::fixtures::fixture;
use symplectic_core::torsion_oracle::SymplecticType;
use symplectic_core::{Error, WeierstrassModel};

fn model(a: [i64; 5]) -> WeierstrassModel {
    WeierstrassModel::from_integers(a.map(BigInt::from))
}

fn local(m: &WeierstrassModel, l: u64) -> LocalInvariants {
    minimal_model_at(m, l).unwrap().1
}

const PAIRS: [(&str, &str, &str, u64, Outcome); 8] = [
    ("a", "2116a1", "10580a1", 7, Outcome::AntiSymplectic),
    ("b", "648a1", "12312a1", 7, Outcome::Symplectic),
    ("c", "12696e1", "12696f1", 11, Outcome::Symplectic),
    ("d", "4536c1", "648b1", 11, Outcome::AntiSymplectic),
    ("e", "52a2", "988b1", 13, Outcome::Symplectic),
    ("f", "52a1", "988b1", 13, Outcome::AntiSymplectic),
    ("g", "3675k1", "47775cq1", 17, Outcome::AntiSymplectic),
    ("h", "882a1", "441b1", 3, Outcome::AntiSymplectic),
];

#[test]
fn reference_pairs_reach_published_consensus() {
    for (tag, l1, l2, p, expected) in PAIRS {
        let e1 = fixture(l1).unwrap();
        let e2 = fixture(l2).unwrap();
        let rep = compare(&e1, &e2, p, 0).unwrap();
        assert!(!rep.inconsistent, "pair ({tag}) inconsistent: {rep:?}");
        assert_eq!(rep.consensus, Some(expected), "pair ({tag})");
    }
}

#[test]
fn reference_pairs_per_prime_verdicts() {
    // The determined verdicts, with the criterion that fired, for each pair.
    let expected: [(&str, &[(u64, &str, Outcome)]); 8] = [
        (
            "a",
            &[
                (2, "tame-e3", Outcome::AntiSymplectic),
                (23, "tame-e3", Outcome::AntiSymplectic),
            ],
        ),
        (
            "b",
            &[
                (2, "e24", Outcome::Symplectic),
                (3, "wild-e3", Outcome::Symplectic),
            ],
        ),
        (
            "c",
            &[
                (2, "e24", Outcome::Symplectic),
                (3, "pot-mult", Outcome::Symplectic),
                (23, "tame-e3", Outcome::Symplectic),
            ],
        ),
        ("d", &[(2, "e24", Outcome::AntiSymplectic)]),
        ("e", &[(2, "tame-e3", Outcome::Symplectic)]),
        ("f", &[(2, "tame-e3", Outcome::AntiSymplectic)]),
        (
            "g",
            &[
                (3, "pot-mult", Outcome::AntiSymplectic),
                (5, "tame-e3", Outcome::AntiSymplectic),
            ],
        ),
        ("h", &[(7, "e3-p3", Outcome::AntiSymplectic)]),
    ];
    for ((tag, l1, l2, p, _), (tag2, rows)) in PAIRS.iter().zip(expected.iter()) {
        assert_eq!(tag, tag2);
        let e1 = fixture(l1).unwrap();
        let e2 = fixture(l2).unwrap();
        let rep = compare(&e1, &e2, *p, 0).unwrap();
        let determined: Vec<(u64, String, Outcome)> = rep
            .verdicts
            .iter()
            .filter(|v| v.outcome.is_determined())
            .map(|v| (v.prime, v.criterion.clone().unwrap(), v.outcome))
            .collect();
        let want: Vec<(u64, String, Outcome)> = rows
            .iter()
            .map(|(l, c, o)| (*l, c.to_string(), *o))
            .collect();
        assert_eq!(determined, want, "pair ({tag})");
    }
}

#[test]
fn reference_pair_exponents() {
    // Pair (a) at 23: discriminant valuations 8 vs 4 and opposite local
    // 3-torsion, so r = t = 1 and (23/7)(3/7) = -1.
    let e1 = fixture("2116a1").unwrap();
    let e2 = fixture("10580a1").unwrap();
    let rep = compare(&e1, &e2, 7, 0).unwrap();
    let at23 = rep.verdicts.iter().find(|v| v.prime == 23).unwrap();
    assert_eq!((at23.r, at23.t), (Some(1), Some(1)));
    let at2 = rep.verdicts.iter().find(|v| v.prime == 2).unwrap();
    assert_eq!((at2.r, at2.t), (Some(0), Some(1)));
}

#[test]
fn tame3_identity_pair_is_symplectic() {
    let e = fixture("2116a1").unwrap();
    let loc = local(&e, 23);
    let v = crit_tame3(&CriterionInput::new(7, &loc, &loc)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    let w = v.witness.unwrap();
    assert_eq!((w.r, w.t), (Some(0), Some(0)));
}

#[test]
fn tame3_at_p3_with_torsion_imbalance_is_not_applicable() {
    // 52a2 and 988b1 differ in local 3-torsion at 2 (t = 1), and the (3/p)
    // factor is undefined at p = 3.
    let l1 = local(&fixture("52a2").unwrap(), 2);
    let l2 = local(&fixture("988b1").unwrap(), 2);
    let v = crit_tame3(&CriterionInput::new(3, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::NotApplicable);
}

#[test]
fn e3_p3_requires_l_1_mod_3_and_p_3() {
    let l1 = local(&fixture("882a1").unwrap(), 7);
    let l2 = local(&fixture("441b1").unwrap(), 7);
    // 8 vs 4 mod 3 differ.
    let v = crit_e3_p3(&CriterionInput::new(3, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic);
    let v = crit_e3_p3(&CriterionInput::new(3, &l1, &l1)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    assert!(matches!(
        crit_e3_p3(&CriterionInput::new(5, &l1, &l2)),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn wild3_sign_tracks_c6_residue() {
    // Frozen witnesses with triple (2,3,4) at 3 and unit discriminant
    // 2 mod 3, one from each c6~ mod 3 class.
    let m1 = model([0, 0, 0, -12, -5]); // c6~ = 1 mod 3
    let m2 = model([0, 0, 0, -12, -4]); // c6~ = 2 mod 3
    let (l1, l2) = (local(&m1, 3), local(&m2, 3));
    let v = crit_wild3(&CriterionInput::new(5, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic); // (3/5) = -1
    let v = crit_wild3(&CriterionInput::new(13, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // (3/13) = 1
    let v = crit_wild3(&CriterionInput::new(5, &l1, &l1)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // r = 0

    // Unit discriminant 1 mod 3 falls outside the criterion (abelian case).
    let bad = local(&fixture("4536c1").unwrap(), 3);
    assert!(matches!(
        crit_wild3(&CriterionInput::new(5, &bad, &bad)),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn tame4_sign_and_p3_gap() {
    // y^2 = x^3 + 7x and y^2 = x^3 + 343x both have defect 4 at 7 with
    // non-square unit discriminants (t = 0) and v(D) = 3 vs 9 (r = 1).
    let m1 = model([0, 0, 0, 7, 0]);
    let m2 = model([0, 0, 0, 343, 0]);
    let (l1, l2) = (local(&m1, 7), local(&m2, 7));
    let v = crit_tame4(&CriterionInput::new(5, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic); // (7/5) = -1
    let w = v.witness.unwrap();
    assert_eq!((w.r, w.t), (Some(1), Some(0)));
    let v = crit_tame4(&CriterionInput::new(29, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // (7/29) = 1
    let v = crit_tame4(&CriterionInput::new(5, &l1, &l1)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    // No defect-4 statement covers p = 3.
    let v = crit_tame4(&CriterionInput::new(3, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::NotApplicable);
}

#[test]
fn wild4_sign_and_hypothesis_transfer() {
    // Frozen witnesses with triple (5,8,9) at 2 and c4~ = 5*D~ mod 8,
    // differing in c6~ mod 4 (27 vs 5).
    let m1 = model([0, 0, 0, -14, -8]);
    let m2 = model([0, 0, 0, -14, 8]);
    let (l1, l2) = (local(&m1, 2), local(&m2, 2));
    let v = crit_wild4(&CriterionInput::new(5, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic); // r = 1, (2/5) = -1
    let v = crit_wild4(&CriterionInput::new(7, &l1, &l2)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // (2/7) = 1
    let v = crit_wild4(&CriterionInput::new(5, &l1, &l1)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // r = 0

    // A curve violating c4~ = 5*D~ mod 8 in the first slot fails the
    // precondition; in the second slot it contradicts the asserted torsion
    // isomorphism.
    let bad = local(&model([0, 0, 0, -18, 8]), 2);
    assert!(matches!(
        crit_wild4(&CriterionInput::new(5, &bad, &l1)),
        Err(Error::PreconditionFailed(_))
    ));
    assert!(matches!(
        crit_wild4(&CriterionInput::new(5, &l1, &bad)),
        Err(Error::InconsistentPair(_))
    ));
}

#[test]
fn e24_requires_field_assertion() {
    let l1 = local(&fixture("648a1").unwrap(), 2);
    let l2 = local(&fixture("12312a1").unwrap(), 2);
    let v = crit_e24(&CriterionInput::new(7, &l1, &l2), true).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // (2/7) = 1
    assert!(v.reason.contains("caller-asserted"));
    assert!(matches!(
        crit_e24(&CriterionInput::new(7, &l1, &l2), false),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn e8_two_case_table() {
    // 864a1 sits in the second quaternionic case, 864b1 in the first; both
    // acquire good reduction over the same field. With (2/3) = -1 the types
    // separate, with (2/7) = 1 they do not.
    let la = local(&fixture("864a1").unwrap(), 2);
    let lb = local(&fixture("864b1").unwrap(), 2);
    let v = crit_e8(&CriterionInput::new(3, &la, &lb)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic);
    let v = crit_e8(&CriterionInput::new(7, &la, &lb)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);

    // 96a1 and 160a1 share the same case and the same field tag.
    let lc = local(&fixture("96a1").unwrap(), 2);
    let ld = local(&fixture("160a1").unwrap(), 2);
    let v = crit_e8(&CriterionInput::new(3, &lc, &ld)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);

    // 864a1 and 96a1 acquire good reduction over different fields.
    assert!(matches!(
        crit_e8(&CriterionInput::new(3, &la, &lc)),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn e12_four_case_table() {
    // 864a1 (first case) vs 54a1 (second case), same field tag: the sign is
    // (3/p) when the cases differ.
    let la = local(&fixture("864a1").unwrap(), 3);
    let lb = local(&fixture("54a1").unwrap(), 3);
    let v = crit_e12(&CriterionInput::new(5, &la, &lb)).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic); // (3/5) = -1
    let v = crit_e12(&CriterionInput::new(11, &la, &lb)).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic); // (3/11) = 1

    // 864a1 vs 864b1 share the case but not the field tag.
    let lc = local(&fixture("864b1").unwrap(), 3);
    assert!(matches!(
        crit_e12(&CriterionInput::new(5, &la, &lc)),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn good_reduction_criterion_gates() {
    let e = fixture("864a1").unwrap();
    // At l = 5: a_5 = -1, Delta_5 = -19, beta_5 = 1.
    let v = crit_good(&e, &e, 5, 19).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    assert_eq!(v.witness.unwrap().criterion, "good");
    let v = crit_good(&e, &e, 5, 7).unwrap();
    assert_eq!(v.outcome, Outcome::NotApplicable);

    // Non-isomorphic residual curves fail the precondition.
    let other = fixture("27a1").unwrap();
    assert!(matches!(
        crit_good(&e, &other, 5, 19),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn pot_mult_ratio_sign() {
    let e1 = fixture("12696e1").unwrap();
    let e2 = fixture("12696f1").unwrap();
    // v_3 = 3 vs 5: the ratio is a square mod 11 but not mod 13.
    let v = crit_pot_mult(&e1, &e2, 3, 11).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    let v = crit_pot_mult(&e1, &e2, 3, 13).unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic);
    // v_3 = 5 vs 2: the ratio is 11 mod 17, a non-square.
    let v = crit_pot_mult(
        &fixture("3675k1").unwrap(),
        &fixture("47775cq1").unwrap(),
        3,
        17,
    )
    .unwrap();
    assert_eq!(v.outcome, Outcome::AntiSymplectic);
    // Equal valuations give ratio 1.
    let v = crit_pot_mult(&e1, &e1, 3, 11).unwrap();
    assert_eq!(v.outcome, Outcome::Symplectic);
    // p dividing a valuation deactivates the criterion (v' = 5 here).
    let v = crit_pot_mult(&e1, &e2, 3, 5).unwrap();
    assert_eq!(v.outcome, Outcome::NotApplicable);
}

#[test]
fn isogeny_degree_sign() {
    assert_eq!(isogeny_type(2, 13).unwrap(), SymplecticType::AntiSymplectic);
    assert_eq!(isogeny_type(3, 7).unwrap(), SymplecticType::AntiSymplectic);
    assert_eq!(isogeny_type(4, 7).unwrap(), SymplecticType::Symplectic);
    assert!(matches!(
        isogeny_type(21, 7),
        Err(Error::DegreeDivisibleByP)
    ));
    // Pair (f) factors through a 2-isogeny from the pair (e) curve, so its
    // sign is the pair (e) sign flipped by (2/13) = -1.
    let rep_e = compare(
        &fixture("52a2").unwrap(),
        &fixture("988b1").unwrap(),
        13,
        0,
    )
    .unwrap();
    let rep_f = compare(
        &fixture("52a1").unwrap(),
        &fixture("988b1").unwrap(),
        13,
        0,
    )
    .unwrap();
    assert_eq!(rep_e.consensus, Some(Outcome::Symplectic));
    assert_eq!(rep_f.consensus, Some(Outcome::AntiSymplectic));
}

#[test]
fn existence_gate_patterns() {
    // Scalar-unipotent generator: criterion exists.
    let r = criterion_exists(&[[[2, 1], [0, 2]]], 7).unwrap();
    assert!(r.exists);
    assert_eq!(r.pattern, Some(ExistencePattern::ScalarUnipotent));

    // Split Cartan: centralizer is the full split Cartan, which contains
    // elements of non-square determinant.
    let r = criterion_exists(&[[[2, 0], [0, 1]]], 5).unwrap();
    assert!(!r.exists);
    assert_eq!(r.pattern, None);

    // Scalars only: the centralizer is all of GL2.
    let r = criterion_exists(&[[[2, 0], [0, 2]]], 5).unwrap();
    assert!(!r.exists);

    // Non-abelian image: generators of GL2(F_3) (a transvection and the
    // coordinate swap, which has determinant -1).
    let r = criterion_exists(&[[[1, 1], [0, 1]], [[0, 1], [1, 0]]], 3).unwrap();
    assert!(r.exists);
    assert_eq!(r.pattern, Some(ExistencePattern::NonAbelian));
    assert_eq!(r.group_order, 48);

    assert!(matches!(
        criterion_exists(&[[[1, 1], [0, 1]]], 29),
        Err(Error::ResourceBound(_))
    ));
    assert!(matches!(
        criterion_exists(&[[[1, 1], [1, 1]]], 5),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn dispatch_skips_l_equal_p() {
    let e = fixture("52a2").unwrap();
    let v = dispatch_at_prime(&e, &e, 13, 13);
    assert_eq!(v.outcome, Outcome::NotApplicable);
}

#[test]
fn usable_prime_list_matches_reference_pairs() {
    let e1 = fixture("648a1").unwrap();
    let e2 = fixture("12312a1").unwrap();
    let list = criterion_prime_list(&e1, &e2, 7, &[]).unwrap();
    assert_eq!(
        list,
        vec![(2, "e24".to_string()), (3, "wild-e3".to_string())]
    );

    let e1 = fixture("3675k1").unwrap();
    let e2 = fixture("47775cq1").unwrap();
    let list = criterion_prime_list(&e1, &e2, 17, &[]).unwrap();
    assert_eq!(
        list,
        vec![(3, "pot-mult".to_string()), (5, "tame-e3".to_string())]
    );

    // A pair where nothing applies yields the empty list.
    let e1 = fixture("26a1").unwrap();
    let e2 = fixture("27a1").unwrap();
    assert!(criterion_prime_list(&e1, &e2, 5, &[]).unwrap().is_empty());
}

#[test]
fn swapping_the_pair_preserves_every_consensus() {
    for (tag, l1, l2, p, expected) in PAIRS {
        let e1 = fixture(l1).unwrap();
        let e2 = fixture(l2).unwrap();
        let rep = compare(&e2, &e1, p, 0).unwrap();
        assert_eq!(rep.consensus, Some(expected), "swapped pair ({tag})");
        assert!(!rep.inconsistent);
    }
}

#[test]
fn twisting_both_curves_preserves_the_consensus() {
    let cases = [
        ("882a1", "441b1", 3u64, 5i64, Outcome::AntiSymplectic),
        ("648a1", "12312a1", 7, -1, Outcome::Symplectic),
        ("52a2", "988b1", 13, -7, Outcome::Symplectic),
    ];
    for (l1, l2, p, d, expected) in cases {
        let e1 = quadratic_twist(&fixture(l1).unwrap(), &BigInt::from(d)).unwrap();
        let e2 = quadratic_twist(&fixture(l2).unwrap(), &BigInt::from(d)).unwrap();
        let rep = compare(&e1, &e2, p, 0).unwrap();
        assert_eq!(rep.consensus, Some(expected), "{l1}/{l2} twisted by {d}");
        assert!(!rep.inconsistent);
    }
}

#[test]
fn existence_gate_matches_direct_definition_on_gl2_f3() {
    use symplectic_core::criteria::{generated_subgroup, mat_det, mat_mul, Mat};
    use symplectic_core::nt::legendre_u64;
    let p = 3u64;
    let mut gl2: Vec<Mat> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = [[a, b], [c, d]];
                    if mat_det(&m, p) != 0 {
                        gl2.push(m);
                    }
                }
            }
        }
    }
    assert_eq!(gl2.len(), 48);

    // Every subgroup of GL2(F_3) is generated by at most two elements, so
    // closing all ordered pairs enumerates all subgroups.
    let mut seen = std::collections::HashSet::new();
    let mut checked = 0;
    for g in &gl2 {
        for h in &gl2 {
            let subgroup = generated_subgroup(&[*g, *h], p).unwrap();
            if !seen.insert(subgroup.clone()) {
                continue;
            }
            checked += 1;
            // Direct definition: every element of GL2 commuting with the
            // whole subgroup has square determinant.
            let mut direct = true;
            for m in &gl2 {
                let centralizes = subgroup
                    .iter()
                    .all(|s| mat_mul(m, s, p) == mat_mul(s, m, p));
                if centralizes && legendre_u64(mat_det(m, p), p) != 1 {
                    direct = false;
                    break;
                }
            }
            let gate = criterion_exists(&[*g, *h], p).unwrap();
            assert_eq!(gate.exists, direct, "subgroup from {g:?}, {h:?}");
            assert_eq!(gate.group_order as usize, subgroup.len());
        }
    }
    assert!(checked > 10, "expected many distinct subgroups, saw {checked}");
}

#[test]
fn report_serializes_with_flat_verdict_rows() {
    let e1 = fixture("648a1").unwrap();
    let e2 = fixture("12312a1").unwrap();
    let rep = compare(&e1, &e2, 7, 0).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    let row = &json["verdicts"][0];
    for key in ["prime", "criterion", "r", "t", "outcome", "reason"] {
        assert!(row.get(key).is_some(), "missing key {key}");
    }
}
