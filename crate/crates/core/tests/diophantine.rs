use num_bigint::BigInt;
use num_traits::Zero;
use symplectic_core::diophantine::{
    frey_hyperelliptic, frey_x2y3zp, hyperelliptic_parity_argument, level_lowering_congruence,
    scan_residual_pairs, FreyVariant, ScanVerdict,
};
use symplectic_core::error::Error;
use symplectic_core::fixtures::fixture;
use symplectic_core::goodred::{residual_iso_check, FpCurve, FrobeniusData};

fn bi(n: i64) -> BigInt {
    BigInt::from(n)
}

#[test]
fn frey_curve_invariant_identities() {
    for (a, b) in [(3i64, 5i64), (-7, 2), (10, -3), (1, 1)] {
        let spec = frey_x2y3zp(&bi(a), &bi(b)).expect("non-degenerate");
        assert_eq!(spec.c4, bi(-144 * b));
        assert_eq!(spec.c6, bi(1728 * a));
        // c4^3 - c6^2 = 1728 * Delta.
        let lhs = &spec.c4 * &spec.c4 * &spec.c4 - &spec.c6 * &spec.c6;
        assert_eq!(lhs, bi(1728) * &spec.delta);
    }
    assert!(matches!(
        frey_x2y3zp(&bi(1), &bi(-1)),
        Err(Error::DegenerateFrey)
    ));
    assert!(frey_x2y3zp(&bi(2), &bi(4)).unwrap().coprimality_ok == false);
    assert!(frey_x2y3zp(&bi(3), &bi(5)).unwrap().coprimality_ok);
}

#[test]
fn frey_curve_reduction_example() {
    // (a, b) = (2, 4): y^2 = x^3 + 12x - 4, which is x^3 + 2x + 1 over F_5.
    let spec = frey_x2y3zp(&bi(2), &bi(4)).unwrap();
    let coeffs = spec.model.integer_coefficients().unwrap();
    assert_eq!(coeffs[3], bi(12));
    assert_eq!(coeffs[4], bi(-4));
    let reduced = FpCurve::reduce(&spec.model, 5).unwrap();
    let direct = FpCurve::new(5, [0, 0, 0, 2, 1]);
    assert!(residual_iso_check(&reduced, &direct));
    assert_eq!(
        FrobeniusData::from_fp_curve(&reduced).unwrap().a_l,
        FrobeniusData::from_fp_curve(&direct).unwrap().a_l
    );
}

#[test]
fn level_lowering_congruence_examples() {
    // a_5(864a1) = -1: not congruent to +-6 mod 19.
    assert!(!level_lowering_congruence(-1, 5, 19));
    assert!(level_lowering_congruence(6, 5, 19));
    assert!(level_lowering_congruence(-6, 5, 19));
    // 6 = -13 mod 19 as well.
    assert!(level_lowering_congruence(13, 5, 19));
    // Small p wraps: l + 1 = 6 = 1 mod 5.
    assert!(level_lowering_congruence(1, 5, 5));
    assert!(!level_lowering_congruence(2, 5, 5));
}

#[test]
fn hyperelliptic_frey_construction_and_guards() {
    // u^3 - 11 = 16: (u, v, w) = (3, 1, 4) solves u^p + l(-v^2)^p = w^2
    // with l = 11, p = 3.
    let e1 = frey_hyperelliptic(&bi(3), &bi(1), &bi(4), 11, 3, FreyVariant::HyperE1).unwrap();
    assert_eq!(e1.delta, bi(-64 * 11 * 729));
    let c1 = e1.model.integer_coefficients().unwrap();
    assert_eq!(c1[1], bi(8));
    assert_eq!(c1[3], bi(27));
    assert!(c1[4].is_zero());

    let e2 = frey_hyperelliptic(&bi(3), &bi(1), &bi(4), 11, 3, FreyVariant::HyperE2).unwrap();
    assert_eq!(e2.delta, bi(64 * 121 * 27));
    assert_eq!(e2.model.integer_coefficients().unwrap()[3], bi(-11));

    // u^3 - 2*13 = 1: (3, 1, 1) solves the second equation with l = 13.
    let h2 = frey_hyperelliptic(&bi(3), &bi(1), &bi(1), 13, 3, FreyVariant::Hyper2E2).unwrap();
    assert_eq!(h2.delta, bi(-128 * 13 * 729));
    assert_eq!(h2.triple_at_2.unwrap().2, 7);

    assert!(matches!(
        frey_hyperelliptic(&bi(3), &bi(1), &bi(5), 11, 3, FreyVariant::HyperE1),
        Err(Error::EquationViolated)
    ));
    assert!(matches!(
        frey_hyperelliptic(&bi(3), &bi(3), &bi(4), 11, 3, FreyVariant::HyperE1),
        Err(Error::GcdViolated)
    ));
    // u even contradicts the parity facts: 2^3 + 4*(-1) = 4 = 2^2.
    assert!(matches!(
        frey_hyperelliptic(&bi(2), &bi(1), &bi(2), 4, 3, FreyVariant::HyperE1),
        Err(Error::HypothesisFailed(_))
    ));
    assert!(matches!(
        frey_hyperelliptic(&bi(3), &bi(1), &bi(4), 11, 3, FreyVariant::X2Y3Zp),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn scan_eliminates_conductor_864_first_curve_at_5_mod_19() {
    let w = fixture("864a1").unwrap();
    let report = scan_residual_pairs(&w, 5, 19).unwrap();
    assert!(!report.multiplicative_possible);
    assert!(report.criterion_applies);
    assert_eq!(report.verdict, ScanVerdict::Eliminated);
    let cells: Vec<(u64, u64, u64)> = report.matches.iter().map(|m| (m.d, m.a, m.b)).collect();
    assert_eq!(cells, vec![(1, 2, 4), (1, 3, 4), (2, 1, 1), (2, 4, 1)]);
    assert!(report.matches.iter().all(|m| m.isomorphic));
}

#[test]
fn scan_match_set_is_invariant_under_weighted_scaling() {
    // The residual pair (a, b) and (a s^3, b s^2) give F_l-isomorphic
    // curves when s is a nonzero square, so the match set is stable under
    // that action and the isomorphy flags agree.
    let w = fixture("864a1").unwrap();
    let report = scan_residual_pairs(&w, 5, 19).unwrap();
    let l = 5u64;
    for s in (1..l).map(|t| t * t % l) {
        for m in &report.matches {
            let a2 = m.a * (s * s % l) % l * s % l;
            let b2 = m.b * (s * s % l) % l;
            let image = report
                .matches
                .iter()
                .find(|n| n.d == m.d && n.a == a2 && n.b == b2)
                .expect("scaled cell must also match");
            assert_eq!(image.isomorphic, m.isomorphic);
        }
    }
}

#[test]
fn scan_keeps_non_isomorphic_match_at_47_mod_19() {
    let w = fixture("54a1").unwrap();
    let report = scan_residual_pairs(&w, 47, 19).unwrap();
    assert_eq!(report.verdict, ScanVerdict::NotEliminated);
    assert!(report.matches.iter().any(|m| !m.isomorphic));
}

#[test]
fn scan_rejects_bad_inputs() {
    let w = fixture("864a1").unwrap();
    assert!(matches!(
        scan_residual_pairs(&w, 4, 5),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        scan_residual_pairs(&w, 19, 19),
        Err(Error::InvalidInput(_))
    ));
    // 864a1 has bad reduction at 2 and 3.
    assert!(matches!(
        scan_residual_pairs(&w, 19, 4),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn parity_chain_variant_one() {
    for l in [3u64, 5, 37] {
        let force = hyperelliptic_parity_argument(l, 1).unwrap();
        assert_eq!(force.forced_symbol, 1);
        assert_eq!(force.variant, 1);
    }
    assert_eq!(
        hyperelliptic_parity_argument(3, 1)
            .unwrap()
            .comparison_curves,
        vec!["96a1".to_string()]
    );
    assert_eq!(
        hyperelliptic_parity_argument(5, 1)
            .unwrap()
            .comparison_curves,
        vec!["160a1".to_string()]
    );
    // 29 - 1 = 28 is not a perfect square.
    assert!(matches!(
        hyperelliptic_parity_argument(29, 1),
        Err(Error::HypothesisFailed(_))
    ));
    // 13 = 5 mod 8 but 12 is not a square.
    assert!(matches!(
        hyperelliptic_parity_argument(13, 1),
        Err(Error::HypothesisFailed(_))
    ));
    // 7 = 7 mod 8.
    assert!(matches!(
        hyperelliptic_parity_argument(7, 1),
        Err(Error::HypothesisFailed(_))
    ));
}

#[test]
fn parity_chain_variant_two() {
    // 83 = 3 mod 8 and 81 = 9^2.
    let force = hyperelliptic_parity_argument(83, 2).unwrap();
    assert_eq!(force.forced_symbol, 1);
    assert_eq!(force.comparison_curves.len(), 2);
    // 43 - 2 = 41 is not a square.
    assert!(matches!(
        hyperelliptic_parity_argument(43, 2),
        Err(Error::HypothesisFailed(_))
    ));
    // 11 satisfies the square condition but is below the bound.
    assert!(matches!(
        hyperelliptic_parity_argument(11, 2),
        Err(Error::HypothesisFailed(_))
    ));
    assert!(matches!(
        hyperelliptic_parity_argument(5, 3),
        Err(Error::InvalidInput(_))
    ));
}
