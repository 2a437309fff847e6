//! Tate's algorithm: given an integral Weierstrass model and a prime, produce
//! a minimal model at that prime together with the Kodaira type of the special
//! fibre and the conductor exponent.

use num_bigint::BigInt;
use num_traits::Zero;

use super::KodairaType;
use crate::nt;

/// Result of running the algorithm at one prime.
#[derive(Debug, Clone)]
pub struct TateOutput {
    /// Coefficients [a1, a2, a3, a4, a6] of a minimal model at the prime.
    pub coefficients: [BigInt; 5],
    pub kodaira: KodairaType,
    pub conductor_exponent: u32,
}

/// Runs Tate's algorithm on integer coefficients at the prime `l`.
/// The input must be nonsingular (nonzero discriminant).
pub fn tate_algorithm(coefficients: &[BigInt; 5], l: u64) -> TateOutput {
    let mut a = coefficients.clone();
    let pi = BigInt::from(l);
    loop {
        let (b2, _, _, _, c4, _, delta) = b_invariants(&a);
        assert!(!delta.is_zero(), "tate_algorithm needs a nonsingular model");
        let n = nt::valuation(&delta, l);
        // Step 1: good reduction.
        if n == 0 {
            return TateOutput {
                coefficients: a,
                kodaira: KodairaType::I0,
                conductor_exponent: 0,
            };
        }
        // Step 2: multiplicative reduction (the reduced curve has a node).
        if val_or_inf(&c4, l) == 0 {
            return TateOutput {
                coefficients: a,
                kodaira: KodairaType::In(n),
                conductor_exponent: 1,
            };
        }
        // The reduced curve has a cusp; move it to the origin.
        let (x0, y0) = singular_point(&a, &b2, l);
        shift(&mut a, &BigInt::from(x0), &BigInt::zero(), &BigInt::from(y0));
        // Step 3.
        if nt::valuation_or_inf(&a[4], l) < 2 {
            return TateOutput {
                coefficients: a,
                kodaira: KodairaType::II,
                conductor_exponent: n,
            };
        }
        // Step 4.
        let (_, _, _, b8, _, _, _) = b_invariants(&a);
        if val_or_inf(&b8, l) < 3 {
            return TateOutput {
                coefficients: a,
                kodaira: KodairaType::III,
                conductor_exponent: n - 1,
            };
        }
        // Step 5.
        let (_, _, b6, _, _, _, _) = b_invariants(&a);
        if val_or_inf(&b6, l) < 3 {
            return TateOutput {
                coefficients: a,
                kodaira: KodairaType::IV,
                conductor_exponent: n - 2,
            };
        }
        // Step 6 entry condition: arrange pi | a1, a2; pi^2 | a3, a4;
        // pi^3 | a6.
        normalize_for_star_steps(&mut a, l);
        // Step 7: the cubic T^3 + (a2/pi) T^2 + (a4/pi^2) T + (a6/pi^3).
        let p2 = red(&exact_div(&a[1], l, 1), l);
        let p4 = red(&exact_div(&a[3], l, 2), l);
        let p6 = red(&exact_div(&a[4], l, 3), l);
        match cubic_multiple_root(p2, p4, p6, l) {
            CubicRoots::Distinct => {
                return TateOutput {
                    coefficients: a,
                    kodaira: KodairaType::I0Star,
                    conductor_exponent: n - 4,
                };
            }
            CubicRoots::Double(alpha) => {
                shift_r(&mut a, &(BigInt::from(alpha) * &pi));
                // Subprocedure for I_nu* with nu >= 1.
                let mut q: u32 = 2;
                loop {
                    // Odd stage: Y^2 + (a3/pi^q) Y - a6/pi^(2q).
                    let a3q = exact_div(&a[2], l, q);
                    let a62q = exact_div(&a[4], l, 2 * q);
                    let disc = &a3q * &a3q + BigInt::from(4) * &a62q;
                    if val_or_inf(&disc, l) == 0 {
                        let nu = 2 * q - 3;
                        return TateOutput {
                            coefficients: a,
                            kodaira: KodairaType::InStar(nu),
                            conductor_exponent: n - 4 - nu,
                        };
                    }
                    let y0 = if l == 2 {
                        red(&a62q, 2)
                    } else {
                        mul_red(red(&a3q, l), l - nt::inv_mod(2, l) % l, l)
                    };
                    shift(
                        &mut a,
                        &BigInt::zero(),
                        &BigInt::zero(),
                        &(BigInt::from(y0) * pi.pow(q)),
                    );
                    // Even stage: (a2/pi) X^2 + (a4/pi^(q+1)) X + a6/pi^(2q+1).
                    let a21 = red(&exact_div(&a[1], l, 1), l);
                    debug_assert_ne!(a21, 0);
                    let a4q = exact_div(&a[3], l, q + 1);
                    let a6q = exact_div(&a[4], l, 2 * q + 1);
                    let disc = &a4q * &a4q
                        - BigInt::from(4) * BigInt::from(a21) * &a6q;
                    if val_or_inf(&disc, l) == 0 {
                        let nu = 2 * q - 2;
                        return TateOutput {
                            coefficients: a,
                            kodaira: KodairaType::InStar(nu),
                            conductor_exponent: n - 4 - nu,
                        };
                    }
                    let x0 = if l == 2 {
                        mul_red(red(&a6q, 2), a21, 2)
                    } else {
                        let inv = nt::inv_mod(mul_red(2 % l, a21, l), l);
                        mul_red(mul_red(red(&a4q, l), inv, l), l - 1, l)
                    };
                    shift_r(&mut a, &(BigInt::from(x0) * pi.pow(q)));
                    q += 1;
                }
            }
            CubicRoots::Triple(alpha) => {
                shift_r(&mut a, &(BigInt::from(alpha) * &pi));
                // Step 8: Y^2 + (a3/pi^2) Y - a6/pi^4.
                let a32 = exact_div(&a[2], l, 2);
                let a64 = exact_div(&a[4], l, 4);
                let disc = &a32 * &a32 + BigInt::from(4) * &a64;
                if val_or_inf(&disc, l) == 0 {
                    return TateOutput {
                        coefficients: a,
                        kodaira: KodairaType::IVStar,
                        conductor_exponent: n - 6,
                    };
                }
                let y0 = if l == 2 {
                    red(&a64, 2)
                } else {
                    mul_red(red(&a32, l), l - nt::inv_mod(2, l) % l, l)
                };
                shift(
                    &mut a,
                    &BigInt::zero(),
                    &BigInt::zero(),
                    &(BigInt::from(y0) * &pi * &pi),
                );
                // Step 9.
                if nt::valuation_or_inf(&a[3], l) < 4 {
                    return TateOutput {
                        coefficients: a,
                        kodaira: KodairaType::IIIStar,
                        conductor_exponent: n - 7,
                    };
                }
                // Step 10.
                if nt::valuation_or_inf(&a[4], l) < 6 {
                    return TateOutput {
                        coefficients: a,
                        kodaira: KodairaType::IIStar,
                        conductor_exponent: n - 8,
                    };
                }
                // Step 11: the model was not minimal; rescale by u = pi.
                a[0] = exact_div(&a[0], l, 1);
                a[1] = exact_div(&a[1], l, 2);
                a[2] = exact_div(&a[2], l, 3);
                a[3] = exact_div(&a[3], l, 4);
                a[4] = exact_div(&a[4], l, 6);
            }
        }
    }
}

/// b-invariants, c-invariants, and the discriminant from [a1, a2, a3, a4, a6].
#[allow(clippy::type_complexity)]
fn b_invariants(
    a: &[BigInt; 5],
) -> (BigInt, BigInt, BigInt, BigInt, BigInt, BigInt, BigInt) {
    let (a1, a2, a3, a4, a6) = (&a[0], &a[1], &a[2], &a[3], &a[4]);
    let b2: BigInt = a1 * a1 + 4 * a2;
    let b4: BigInt = 2 * a4 + a1 * a3;
    let b6: BigInt = a3 * a3 + 4 * a6;
    let b8: BigInt = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4: BigInt = &b2 * &b2 - 24 * &b4;
    let b2cube: BigInt = &b2 * &b2 * &b2;
    let c6: BigInt = 36 * &b2 * &b4 - 216 * &b6 - b2cube;
    let delta: BigInt = 9 * &b2 * &b4 * &b6
        - &b2 * &b2 * &b8
        - 8 * &b4 * &b4 * &b4
        - 27 * &b6 * &b6;
    (b2, b4, b6, b8, c4, c6, delta)
}

fn val_or_inf(n: &BigInt, l: u64) -> u32 {
    nt::valuation_or_inf(n, l)
}

/// n / l^k, assuming exact divisibility (or n = 0).
fn exact_div(n: &BigInt, l: u64, k: u32) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let d = BigInt::from(l).pow(k);
    let (q, r) = num_integer::Integer::div_rem(n, &d);
    debug_assert!(r.is_zero(), "expected {l}^{k} | {n}");
    q
}

fn red(n: &BigInt, l: u64) -> u64 {
    nt::mod_u64(n, l)
}

fn mul_red(x: u64, y: u64, l: u64) -> u64 {
    ((x as u128 * y as u128) % l as u128) as u64
}

/// Coordinate change x = x' + r, y = y' + s x' + t on integer coefficients.
fn shift(a: &mut [BigInt; 5], r: &BigInt, s: &BigInt, t: &BigInt) {
    let (a1, a2, a3, a4, a6) =
        (a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone());
    a[0] = &a1 + 2 * s;
    a[1] = &a2 - s * &a1 + 3 * r - s * s;
    a[2] = &a3 + r * &a1 + 2 * t;
    a[3] = &a4 - s * &a3 + 2 * r * &a2 - (t + r * s) * &a1 + 3 * r * r - 2 * s * t;
    a[4] = &a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1;
}

fn shift_r(a: &mut [BigInt; 5], r: &BigInt) {
    shift(a, r, &BigInt::zero(), &BigInt::zero());
}

/// The singular point of the reduced curve (known to be a cusp), as residues.
fn singular_point(a: &[BigInt; 5], b2: &BigInt, l: u64) -> (u64, u64) {
    if l >= 5 {
        // Cusp at x0 = -b2/12, y0 = -(a1 x0 + a3)/2.
        let inv12 = nt::inv_mod(12 % l, l);
        let x0 = mul_red(mul_red(red(&(-b2), l), inv12, l), 1, l);
        let inv2 = nt::inv_mod(2, l);
        let y0 = mul_red(
            red(&-(&a[0] * BigInt::from(x0) + &a[2]), l),
            inv2,
            l,
        );
        return (x0, y0);
    }
    // l in {2, 3}: search the few residue pairs for the singular point of
    // F = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6.
    let am: Vec<u64> = a.iter().map(|c| red(c, l)).collect();
    for x in 0..l {
        for y in 0..l {
            let fval = ((y * y + am[0] * x * y + am[2] * y) as i128
                - (x * x * x) as i128
                - (am[1] * x * x + am[3] * x + am[4]) as i128)
                .rem_euclid(l as i128);
            let fx = ((am[0] * y) as i128
                - (3 * x * x + 2 * am[1] * x + am[3]) as i128)
                .rem_euclid(l as i128);
            let fy = ((2 * y + am[0] * x + am[2]) as i128).rem_euclid(l as i128);
            if fval == 0 && fx == 0 && fy == 0 {
                return (x, y);
            }
        }
    }
    unreachable!("additive reduction must have a singular point over F_{l}")
}

/// Arranges pi | a1, a2; pi^2 | a3, a4; pi^3 | a6 by a coordinate change,
/// assuming the cusp is at the origin and steps II/III/IV did not apply.
fn normalize_for_star_steps(a: &mut [BigInt; 5], l: u64) {
    if l != 2 {
        let l2 = BigInt::from(l).pow(2);
        let l3 = BigInt::from(l).pow(3);
        let inv2_l2 = BigInt::from(nt::inv_mod(2, l * l));
        let s = num_integer::Integer::mod_floor(&(-&a[0] * &inv2_l2), &l2);
        let inv2_l3 = BigInt::from(nt::inv_mod(2, l * l * l));
        let t = num_integer::Integer::mod_floor(&(-&a[2] * &inv2_l3), &l3);
        shift(a, &BigInt::zero(), &s, &t);
    } else {
        let mut found = false;
        'search: for rk in 0..4u64 {
            for s in 0..4u64 {
                for t in 0..8u64 {
                    let mut b = a.clone();
                    shift(
                        &mut b,
                        &BigInt::from(2 * rk),
                        &BigInt::from(s),
                        &BigInt::from(t),
                    );
                    if conditions_hold(&b, 2) {
                        *a = b;
                        found = true;
                        break 'search;
                    }
                }
            }
        }
        assert!(found, "normalization before the I* steps must succeed at 2");
        return;
    }
    assert!(
        conditions_hold(a, l),
        "normalization before the I* steps must succeed at {l}"
    );
}

fn conditions_hold(a: &[BigInt; 5], l: u64) -> bool {
    nt::valuation_or_inf(&a[0], l) >= 1
        && nt::valuation_or_inf(&a[1], l) >= 1
        && nt::valuation_or_inf(&a[2], l) >= 2
        && nt::valuation_or_inf(&a[3], l) >= 2
        && nt::valuation_or_inf(&a[4], l) >= 3
}

/// Root structure of a monic cubic T^3 + p T^2 + q T + r over F_l.
enum CubicRoots {
    Distinct,
    Double(u64),
    Triple(u64),
}

fn cubic_multiple_root(p: u64, q: u64, r: u64, l: u64) -> CubicRoots {
    if l <= 10_000 {
        // Scan for a root of multiplicity >= 2 by synthetic division.
        for alpha in 0..l {
            let m = root_multiplicity(&[r, q, p, 1], alpha, l);
            if m >= 3 {
                return CubicRoots::Triple(alpha);
            }
            if m == 2 {
                return CubicRoots::Double(alpha);
            }
        }
        return CubicRoots::Distinct;
    }
    // Large prime (so characteristic >= 5): discriminant test, then a
    // polynomial gcd to locate the multiple root, which is rational.
    let disc = cubic_discriminant(p, q, r, l);
    if disc != 0 {
        return CubicRoots::Distinct;
    }
    let pp = vec![r, q, p, 1];
    let dp = vec![q, mul_red(2, p, l), 3 % l];
    let g = poly_gcd(pp, dp, l);
    match g.len() {
        2 => {
            // g = T + g0 (monic): double root -g0.
            CubicRoots::Double((l - g[0]) % l)
        }
        3 => {
            // g = (T - alpha)^2 = T^2 + g1 T + g0 with g1 = -2 alpha.
            let alpha = mul_red(l - g[1] % l, nt::inv_mod(2, l), l);
            CubicRoots::Triple(alpha)
        }
        _ => unreachable!("vanishing discriminant forces a repeated root"),
    }
}

/// Multiplicity of `alpha` as a root of the polynomial with coefficients
/// `c` (low to high degree) over F_l.
fn root_multiplicity(c: &[u64], alpha: u64, l: u64) -> u32 {
    let mut coeffs: Vec<u64> = c.iter().map(|x| x % l).collect();
    let mut m = 0;
    loop {
        // Synthetic division by (T - alpha); remainder is the evaluation.
        let mut acc: u64 = 0;
        let mut quot = vec![0u64; coeffs.len().saturating_sub(1)];
        for i in (0..coeffs.len()).rev() {
            acc = (mul_red(acc, alpha, l) + coeffs[i]) % l;
            if i > 0 {
                quot[i - 1] = acc;
            }
        }
        if acc != 0 || coeffs.len() <= 1 {
            return m;
        }
        m += 1;
        coeffs = quot;
    }
}

fn cubic_discriminant(p: u64, q: u64, r: u64, l: u64) -> u64 {
    // disc = 18 p q r - 4 p^3 r + p^2 q^2 - 4 q^3 - 27 r^2 mod l.
    let t1 = mul_red(mul_red(mul_red(18 % l, p, l), q, l), r, l);
    let p3 = mul_red(mul_red(p, p, l), p, l);
    let t2 = mul_red(mul_red(4 % l, p3, l), r, l);
    let t3 = mul_red(mul_red(p, p, l), mul_red(q, q, l), l);
    let q3 = mul_red(mul_red(q, q, l), q, l);
    let t4 = mul_red(4 % l, q3, l);
    let t5 = mul_red(27 % l, mul_red(r, r, l), l);
    let pos = (t1 + t3) % l;
    let neg = ((t2 + t4) % l + t5) % l;
    (pos + l - neg % l) % l
}

/// Monic gcd of two polynomials over F_l (coefficients low to high).
fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, l: u64) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b.
        let lead_inv = nt::inv_mod(*b.last().unwrap(), l);
        while a.len() >= b.len() && !a.is_empty() {
            let factor = mul_red(*a.last().unwrap(), lead_inv, l);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                let sub = mul_red(factor, *bc, l);
                a[i + shift] = (a[i + shift] + l - sub) % l;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    trim(&mut a);
    if let Some(&lead) = a.last() {
        let inv = nt::inv_mod(lead, l);
        for c in a.iter_mut() {
            *c = mul_red(*c, inv, l);
        }
    }
    a
}
