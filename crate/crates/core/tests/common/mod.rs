#![allow(dead_code)]

use std::sync::OnceLock;

use orbitscope::group::{catalog, FiniteGroupRep, GroupSpec, DEFAULT_MAX_ORDER};
use orbitscope::invariants::{compute_mib, IntegrityBasis};
use orbitscope::poly::{Monomial, Polynomial, VarKind};
use orbitscope::rational::{q_frac, Q};
use proptest::prelude::*;

pub const GROUPS: [&str; 8] = ["z2", "z2-r2", "z2xz2", "z4", "d4", "s3", "s4", "d4-skew"];

pub fn spec_path(name: &str) -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(format!("{name}.json"))
}

pub fn load(name: &str) -> FiniteGroupRep {
    let text = std::fs::read_to_string(spec_path(name)).expect("spec file");
    GroupSpec::from_json(&text).unwrap().build(DEFAULT_MAX_ORDER).unwrap()
}

/// Groups and their integrity bases, computed once per test binary.
pub fn fixtures() -> &'static [(String, FiniteGroupRep, IntegrityBasis)] {
    static CELL: OnceLock<Vec<(String, FiniteGroupRep, IntegrityBasis)>> = OnceLock::new();
    CELL.get_or_init(|| {
        GROUPS
            .iter()
            .map(|n| {
                let rep = load(n);
                let basis = compute_mib(&rep, None).unwrap();
                (n.to_string(), rep, basis)
            })
            .collect()
    })
}

pub fn fixture(name: &str) -> &'static (String, FiniteGroupRep, IntegrityBasis) {
    fixtures().iter().find(|f| f.0 == name).expect("known group")
}

pub fn catalog_group(i: usize) -> FiniteGroupRep {
    catalog::by_name(catalog::names()[i % catalog::names().len()]).unwrap()
}

pub fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q_frac(n, d))
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(rational(), n)
}

pub fn float_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
}

/// Polynomial in `n` variables with up to `terms` terms of degree ≤ `max_exp·n`.
pub fn polynomial(kind: VarKind, n: usize, terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((proptest::collection::vec(0..=max_exp, n), rational()), 0..=terms)
        .prop_map(move |ts| Polynomial::from_terms(kind, n, ts.into_iter().map(|(e, c)| (Monomial(e), c))))
}
