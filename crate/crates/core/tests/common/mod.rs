#![allow(dead_code)]

pub mod algebra;
pub mod classes;
pub mod subst;
pub mod text;

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use toricity_core::{FieldElement, FieldSpec, Monomial, OrderKind, PolyRing, Polynomial};

pub const Q: FieldSpec = FieldSpec::RATIONALS;

/// Raw term data: coefficient and exponent vector.
pub type RawPoly = Vec<(i64, Vec<u32>)>;

/// Exponent vectors of total degree at most `max_deg`.
pub fn exponents(nvars: usize, max_deg: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..=max_deg, nvars)
        .prop_filter("total degree", move |e| e.iter().sum::<u32>() <= max_deg)
}

pub fn raw_poly(
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
    coeff: i64,
) -> impl Strategy<Value = RawPoly> {
    let c = prop_oneof![-coeff..=-1i64, 1..=coeff];
    proptest::collection::vec((c, exponents(nvars, max_deg)), 1..=max_terms)
}

pub fn build(ring: &Arc<PolyRing>, raw: &RawPoly) -> Polynomial {
    let f = ring.field();
    Polynomial::from_terms(
        ring,
        raw.iter()
            .map(|(c, e)| (f.from_i64(*c), Monomial::new(e.clone()))),
    )
    .unwrap()
}

pub fn ring(nvars: usize, field: FieldSpec, kind: OrderKind) -> Arc<PolyRing> {
    PolyRing::new((1..=nvars).map(|i| format!("x{i}")), field, kind).unwrap()
}

pub fn kind(grevlex: bool) -> OrderKind {
    if grevlex {
        OrderKind::Grevlex
    } else {
        OrderKind::Lex
    }
}

/// Keeps the first `n` exponents of every term.
pub fn trim(p: &RawPoly, n: usize) -> RawPoly {
    p.iter().map(|(c, e)| (*c, e[..n].to_vec())).collect()
}

pub fn rat(num: i64, den: i64) -> FieldElement {
    Q.from_i64(num).try_div(&Q.from_i64(den)).unwrap()
}

/// Works from any crate of the workspace.
pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub const FIXTURES: [&str; 8] = [
    "bio092.poly",
    "x2m2.poly",
    "x2p2.poly",
    "x4m4.poly",
    "x4px2m6.poly",
    "hyperbola.poly",
    "xy.poly",
    "xp1.poly",
];

/// Property-test config with `n` cases, a fixed seed and no failure files.
pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x7031_5eed),
        ..ProptestConfig::default()
    }
}
