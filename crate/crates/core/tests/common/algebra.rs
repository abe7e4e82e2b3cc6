//! Groebner basis and radical membership checks.

use std::sync::Arc;
use std::time::Duration;

use proptest::prelude::*;
use toricity_core::groebner::s_polynomial;
use toricity_core::{
    buchberger, contains_unit, normal_form, radical_membership, Budget, GroebnerBasis, OrderKind,
    PolyRing, Polynomial, RadicalQuery, TestStatus,
};

use super::*;

pub fn basis_of(ring: &Arc<PolyRing>, gens: &[Polynomial]) -> GroebnerBasis {
    buchberger(ring, gens, &Budget::unlimited()).unwrap()
}

/// Up to 4 generators over 1..=3 variables, each of degree at most `deg`.
pub fn system_of_degree(deg: u32) -> impl Strategy<Value = (usize, Vec<RawPoly>)> {
    (1usize..=3).prop_flat_map(move |n| {
        (
            Just(n),
            proptest::collection::vec(raw_poly(n, deg, 3, 5), 1..=4),
        )
    })
}

pub fn system() -> impl Strategy<Value = (usize, Vec<RawPoly>)> {
    system_of_degree(4)
}

/// Inputs and pairwise S-polynomials reduce to zero.
pub fn check_groebner(kind: OrderKind, n: usize, raw: &[RawPoly]) -> Result<(), TestCaseError> {
    let r = ring(n, Q, kind);
    let gens: Vec<Polynomial> = raw.iter().map(|p| build(&r, p)).collect();
    let basis = basis_of(&r, &gens);
    let b = basis.elements();
    for g in &gens {
        prop_assert!(
            normal_form(g, b).unwrap().is_zero(),
            "input {g} does not reduce"
        );
    }
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let s = s_polynomial(&b[i], &b[j]).unwrap();
            prop_assert!(normal_form(&s, b).unwrap().is_zero());
        }
    }
    prop_assert_eq!(
        contains_unit(&basis),
        normal_form(&Polynomial::one(&r), b).unwrap().is_zero()
    );
    Ok(())
}

/// `sum h_i f_i` lies in the ideal.
pub fn check_combination(
    n: usize,
    raw: &[RawPoly],
    cofactors: &[RawPoly],
) -> Result<(), TestCaseError> {
    let r = ring(n, Q, OrderKind::Grevlex);
    let gens: Vec<Polynomial> = raw.iter().map(|p| build(&r, p)).collect();
    let basis = basis_of(&r, &gens);
    let mut combo = Polynomial::zero(&r);
    for (g, h) in gens.iter().zip(cofactors) {
        combo = &combo + &(&build(&r, &trim(h, n)) * g);
    }
    prop_assert!(basis.contains(&combo).unwrap());
    Ok(())
}

/// Rotating, reversing and rescaling the generators leaves the reduced basis alone.
pub fn check_permutation(
    n: usize,
    raw: &[RawPoly],
    seed: u64,
    scales: &[i64],
) -> Result<(), TestCaseError> {
    let r = ring(n, Q, OrderKind::Grevlex);
    let gens: Vec<Polynomial> = raw.iter().map(|p| build(&r, p)).collect();
    let mut permuted: Vec<Polynomial> = gens
        .iter()
        .zip(scales)
        .map(|(g, &c)| g.scale(&rat(c, 3)))
        .collect();
    let k = (seed as usize) % permuted.len().max(1);
    permuted.rotate_left(k);
    if seed & 1 == 1 {
        permuted.reverse();
    }
    let (a, b) = (basis_of(&r, &gens), basis_of(&r, &permuted));
    prop_assert_eq!(a.elements(), b.elements());
    Ok(())
}

pub fn with_aux(base: &Arc<PolyRing>) -> Arc<PolyRing> {
    let mut names: Vec<String> = base.names().map(str::to_string).collect();
    names.push("t".into());
    PolyRing::new(names, Q, OrderKind::Grevlex).unwrap()
}

pub fn member(g: &Polynomial, gens: &[Polynomial], aux: usize) -> TestStatus {
    let budget = Budget::with_timeout(Duration::from_secs(5));
    radical_membership(&RadicalQuery {
        candidate: g,
        generators: gens,
        aux,
        budget: &budget,
    })
    .unwrap()
    .status
}

/// Does `g^k` reduce to zero for some `k <= 12`?
pub fn power_oracle(g: &Polynomial, basis: &GroebnerBasis) -> bool {
    let mut r = normal_form(g, basis.elements()).unwrap();
    for _ in 1..12 {
        if r.is_zero() {
            return true;
        }
        r = normal_form(&(&r * g), basis.elements()).unwrap();
    }
    r.is_zero()
}

/// Radical membership against the power oracle, plus idempotence and
/// monotonicity in the generators.
pub fn check_radical(
    n: usize,
    raw: &[RawPoly],
    cand: &RawPoly,
    force: u32,
    extra: &RawPoly,
) -> Result<(), TestCaseError> {
    let base = ring(n, Q, OrderKind::Grevlex);
    let g = build(&base, &trim(cand, n));
    let mut gens: Vec<Polynomial> = raw.iter().map(|p| build(&base, p)).collect();
    // a power of the candidate as generator forces membership
    if force > 0 {
        gens[0] = g.pow(force);
    }
    let oracle = power_oracle(&g, &basis_of(&base, &gens));

    let ext = with_aux(&base);
    let lift = |fs: &[Polynomial]| -> Vec<Polynomial> {
        fs.iter().map(|f| f.embed(&ext).unwrap()).collect()
    };
    let gens = lift(&gens);
    let g = g.embed(&ext).unwrap();
    let status = member(&g, &gens, n);
    // rare instances are too slow for Buchberger; they are redrawn, not counted
    prop_assume!(status != TestStatus::Timeout);

    if oracle || force > 0 {
        prop_assert_eq!(status, TestStatus::True);
    }
    if status == TestStatus::True && !oracle {
        eprintln!(
            "membership needs a power above 12: {g} over {} generators",
            gens.len()
        );
    }
    prop_assert_eq!(member(&g, &gens, n), status);
    if status == TestStatus::True {
        let mut larger = gens.clone();
        larger.push(build(&base, &trim(extra, n)).embed(&ext).unwrap());
        let widened = member(&g, &larger, n);
        prop_assert!(
            widened != TestStatus::False,
            "membership lost after adding a generator"
        );
    }
    Ok(())
}
