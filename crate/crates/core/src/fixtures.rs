//! A small frozen catalogue of named curves used throughout the tests and
//! the worked examples, keyed by their usual database labels.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use once_cell::sync::Lazy;

use crate::curve_core::WeierstrassModel;
use crate::error::{Error, Result};

static RAW: &str = include_str!("../data/fixtures.json");

static TABLE: Lazy<BTreeMap<String, [i64; 5]>> =
    Lazy::new(|| serde_json::from_str(RAW).expect("fixtures.json is well-formed"));

/// The built-in catalogue, label -> [a1, a2, a3, a4, a6].
pub fn all() -> &'static BTreeMap<String, [i64; 5]> {
    &TABLE
}

/// Looks up a curve by label in a caller-supplied catalogue.
pub fn fixture_from(table: &BTreeMap<String, [i64; 5]>, label: &str) -> Result<WeierstrassModel> {
    let c = table
        .get(label)
        .ok_or_else(|| Error::UnknownFixture(label.to_string()))?;
    Ok(WeierstrassModel::from_integers([
        BigInt::from(c[0]),
        BigInt::from(c[1]),
        BigInt::from(c[2]),
        BigInt::from(c[3]),
        BigInt::from(c[4]),
    ]))
}

/// Looks up a curve by label in the built-in catalogue.
pub fn fixture(label: &str) -> Result<WeierstrassModel> {
    fixture_from(all(), label)
}

/// Parses an external catalogue with the same JSON shape as the built-in one.
pub fn parse_catalogue(json: &str) -> Result<BTreeMap<String, [i64; 5]>> {
    serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("bad catalogue: {e}")))
}
