//! Model arithmetic: invariants, coordinate changes, twists, minimal models
//! and conductors, checked against a catalogue of curves with known data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use symplectic_core::curve_core::{
    minimal_model_at, quadratic_twist, standard_invariants, transform, KodairaType,
};
use symplectic_core::fixtures;
use symplectic_core::nt;
use symplectic_core::Error;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn invariants_of_known_curves() {
    // y^2 = x^3 + x^2 - 2x: c4 = 112, c6 = -640, delta = 576.
    let e = fixtures::fixture("96a1").unwrap();
    let inv = standard_invariants(&e).unwrap();
    assert_eq!(inv.c4, rat(112));
    assert_eq!(inv.c6, rat(-640));
    assert_eq!(inv.delta, rat(576));

    // y^2 = x^3 + x^2 - 6x + 4: c4 = 304, c6 = -5248, delta = 2^6 * 5.
    let e = fixtures::fixture("160a1").unwrap();
    let inv = standard_invariants(&e).unwrap();
    assert_eq!(inv.c4, rat(304));
    assert_eq!(inv.c6, rat(-5248));
    assert_eq!(inv.delta, rat(320));
}

#[test]
fn invariant_identity_holds_on_catalogue() {
    for label in fixtures::all().keys() {
        let e = fixtures::fixture(label).unwrap();
        let inv = standard_invariants(&e).unwrap();
        assert_eq!(
            rat(1728) * &inv.delta,
            &inv.c4 * &inv.c4 * &inv.c4 - &inv.c6 * &inv.c6,
            "identity fails for {label}"
        );
        assert_eq!(&inv.j * &inv.delta, &inv.c4 * &inv.c4 * &inv.c4);
    }
}

#[test]
fn singular_model_is_rejected() {
    let e = symplectic_core::WeierstrassModel::short(BigInt::zero(), BigInt::zero());
    assert_eq!(standard_invariants(&e), Err(Error::SingularModel));
}

#[test]
fn transform_scales_invariants_and_round_trips() {
    let e = fixtures::fixture("882a1").unwrap();
    let inv = standard_invariants(&e).unwrap();
    let (u, r, s, t) = (rat(3) / rat(2), rat(-7), rat(5), rat(11) / rat(4));
    let f = transform(&e, &u, &r, &s, &t).unwrap();
    let finv = standard_invariants(&f).unwrap();
    let u4 = &u * &u * &u * &u;
    let u6 = &u4 * &u * &u;
    assert_eq!(inv.c4, &u4 * &finv.c4);
    assert_eq!(inv.c6, &u6 * &finv.c6);
    assert_eq!(inv.delta, &u6 * &u6 * &finv.delta);
    assert_eq!(inv.j, finv.j);

    // Invert: x = u^2 x' + r, y = u^3 y' + s u^2 x' + t undoes with
    // (1/u, -r/u^2, -s/u, (rs - t)/u^3).
    let back = transform(
        &f,
        &(rat(1) / &u),
        &(-&r / (&u * &u)),
        &(-&s / &u),
        &((&r * &s - &t) / (&u * &u * &u)),
    )
    .unwrap();
    assert_eq!(back, e);
}

#[test]
fn zero_scale_is_rejected() {
    let e = fixtures::fixture("26a1").unwrap();
    assert_eq!(
        transform(&e, &rat(0), &rat(0), &rat(0), &rat(0)),
        Err(Error::ZeroScale)
    );
}

#[test]
fn quadratic_twist_scales_c_invariants() {
    let e = fixtures::fixture("52a1").unwrap();
    let inv = standard_invariants(&e).unwrap();
    for d in [-1i64, 2, -2, 5, -7, 13] {
        let f = quadratic_twist(&e, &BigInt::from(d)).unwrap();
        let finv = standard_invariants(&f).unwrap();
        assert_eq!(finv.c4, rat(d) * rat(d) * &inv.c4);
        assert_eq!(finv.c6, rat(d) * rat(d) * rat(d) * &inv.c6);
    }
    assert_eq!(
        quadratic_twist(&e, &BigInt::zero()),
        Err(Error::ZeroTwist)
    );
    assert!(matches!(
        quadratic_twist(&e, &BigInt::from(12)),
        Err(Error::TwistNotSquarefree(_))
    ));
}

#[test]
fn integral_model_clears_denominators() {
    let e = fixtures::fixture("27a1").unwrap();
    let f = transform(&e, &rat(2), &rat(0), &rat(0), &rat(0)).unwrap();
    assert!(!f.is_integral());
    let g = f.integral_model();
    assert!(g.is_integral());
    let fi = standard_invariants(&f).unwrap();
    let gi = standard_invariants(&g).unwrap();
    assert_eq!(fi.j, gi.j);
}

/// Conductor of a curve, assembled from the per-prime conductor exponents.
fn conductor(label: &str) -> BigInt {
    let e = fixtures::fixture(label).unwrap();
    let delta = standard_invariants(&e).unwrap().delta.to_integer();
    let mut n = BigInt::one();
    for (l, _) in nt::factor(&delta) {
        let (_, local) = minimal_model_at(&e, l).unwrap();
        n *= BigInt::from(l).pow(local.conductor_exponent);
    }
    n
}

#[test]
fn conductors_match_labels() {
    for label in fixtures::all().keys() {
        let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
        let expected: BigInt = digits.parse().unwrap();
        assert_eq!(conductor(label), expected, "conductor mismatch for {label}");
    }
}

#[test]
fn minimal_discriminant_valuations() {
    let cases: [(&str, u64, u32); 8] = [
        ("2116a1", 2, 8),
        ("2116a1", 23, 8),
        ("10580a1", 5, 7),
        ("10580a1", 23, 4),
        ("648a1", 2, 10),
        ("648a1", 3, 4),
        ("988b1", 19, 13),
        ("4536c1", 7, 11),
    ];
    for (label, l, v) in cases {
        let e = fixtures::fixture(label).unwrap();
        let (_, local) = minimal_model_at(&e, l).unwrap();
        assert_eq!(local.v_delta, v, "v_{l}(delta_min) for {label}");
    }
}

#[test]
fn kodaira_types_of_samples() {
    // 96a1 at 2: v(delta) = 6, conductor exponent 5, type III.
    let e = fixtures::fixture("96a1").unwrap();
    let (_, local) = minimal_model_at(&e, 2).unwrap();
    assert_eq!(local.kodaira, KodairaType::III);
    assert_eq!(local.conductor_exponent, 5);
    // ... and at 3 it is multiplicative of type I2.
    let (_, local) = minimal_model_at(&e, 3).unwrap();
    assert_eq!(local.kodaira, KodairaType::In(2));
    assert_eq!(local.conductor_exponent, 1);
    // A prime of good reduction.
    let (_, local) = minimal_model_at(&e, 7).unwrap();
    assert_eq!(local.kodaira, KodairaType::I0);
    assert_eq!(local.conductor_exponent, 0);
}

#[test]
fn minimal_model_reduces_non_minimal_input() {
    // Scale 26a1 up by u = 1/5 (valuation of delta grows by 12 at 5).
    let e = fixtures::fixture("26a1").unwrap();
    let big = transform(&e, &(rat(1) / rat(5)), &rat(0), &rat(0), &rat(0)).unwrap();
    let (m, local) = minimal_model_at(&big, 5).unwrap();
    assert!(m.is_integral());
    assert_eq!(local.v_delta, 0);
    assert_eq!(local.kodaira, KodairaType::I0);
}

#[test]
fn residue_precision_by_prime() {
    let e = fixtures::fixture("648a1").unwrap();
    let (_, l2) = minimal_model_at(&e, 2).unwrap();
    assert_eq!(l2.modulus, 32);
    let (_, l3) = minimal_model_at(&e, 3).unwrap();
    assert_eq!(l3.modulus, 9);
    let (_, l5) = minimal_model_at(&e, 5).unwrap();
    assert_eq!(l5.modulus, 5);
    // Residues reconstruct the invariant modulo l^k * l^v.
    let inv = standard_invariants(&l2.minimal_model).unwrap();
    let c4 = inv.c4.to_integer();
    let v = l2.v_c4.unwrap();
    let r = l2.c4_res.unwrap();
    let recon = BigInt::from(r) * BigInt::from(2u64).pow(v);
    let modulus = BigInt::from(32u64) * BigInt::from(2u64).pow(v);
    assert!(((c4 - recon) % modulus).is_zero());
}
