//! Symplectic-type determination for p-torsion isomorphisms between
//! elliptic curves over Q.
//!
//! The library is organized around local criteria: for a pair of curves with
//! isomorphic p-torsion and a prime l of shared reduction behaviour, a
//! criterion reads off minimal-model invariants at l and decides whether the
//! torsion isomorphism is symplectic (its Weil-pairing multiplier is a square
//! mod p) or anti-symplectic. Supporting machinery includes Tate's algorithm,
//! reduction-type classification tables at l = 2, 3, Hilbert class
//! polynomials and Frobenius matrices for the good-reduction criterion, a
//! brute-force finite-field torsion oracle for cross-validation, and the
//! Frey-curve application layer.

pub mod criteria;
pub mod curve_core;
pub mod diophantine;
pub mod error;
pub mod fixtures;
pub mod goodred;
pub mod nt;
pub mod reduction;
pub mod torsion_oracle;

pub use curve_core::{LocalInvariants, StandardInvariants, WeierstrassModel};
pub use error::{Error, Result};
