//! Built-in polynomials, angle sets and zeta data.
//!
//! Polynomials are stored as written in their worked examples; the
//! `exclusion-quadratic-q2` entry is `(cos θ − 1/2)(cos θ + √2/2)` and has to be
//! rescaled to `u₀ = 1` before use in a `u₀ = 1` regime.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;

use crate::cosine_poly::CosinePoly;
use crate::error::{Error, Result};
use crate::theta_sets::ThetaSet;
use crate::zeta::WeilPoly;

const POLYNOMIALS: &str = include_str!("../data/polynomials.json");
const THETA_SETS: &str = include_str!("../data/theta_sets.json");
const CURVES: &str = include_str!("../data/curves.json");

fn table<T: DeserializeOwned>(src: &str) -> BTreeMap<String, T> {
    serde_json::from_str(src).expect("embedded dataset is valid")
}

fn lookup<T: DeserializeOwned>(src: &str, kind: &str, name: &str) -> Result<T> {
    table(src).remove(name).ok_or_else(|| Error::Parse(format!("no built-in {} named '{}'", kind, name)))
}

pub fn polynomial(name: &str) -> Result<CosinePoly> {
    lookup(POLYNOMIALS, "polynomial", name)
}

pub fn theta_set(name: &str) -> Result<ThetaSet> {
    lookup(THETA_SETS, "angle set", name)
}

pub fn curve(name: &str) -> Result<WeilPoly> {
    lookup(CURVES, "curve", name)
}

pub fn polynomial_names() -> Vec<String> {
    table::<CosinePoly>(POLYNOMIALS).into_keys().collect()
}

pub fn theta_set_names() -> Vec<String> {
    table::<ThetaSet>(THETA_SETS).into_keys().collect()
}

pub fn curve_names() -> Vec<String> {
    table::<WeilPoly>(CURVES).into_keys().collect()
}
