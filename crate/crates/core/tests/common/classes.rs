//! Coset and group classification checks.

use std::time::Duration;

use proptest::prelude::*;
use toricity_core::toricity::{test_eta, test_gamma};
use toricity_core::{
    classify, parse_system_file, Budget, ClassifyConfig, FieldElement, OrderKind, PolyRing,
    PolySystem, Polynomial, TestStatus, ToricityReport, Verdict,
};

use super::*;

pub fn system_of(n: usize, raw: &[RawPoly]) -> PolySystem {
    let r = ring(n, Q, OrderKind::Grevlex);
    PolySystem::new(&r, raw.iter().map(|p| build(&r, p)).collect()).unwrap()
}

/// `f - f(1, ..., 1)` for every `f`.
pub fn through_ones(n: usize, raw: &[RawPoly]) -> PolySystem {
    let r = ring(n, Q, OrderKind::Grevlex);
    let ones = vec![Q.one(); n];
    let polys = raw
        .iter()
        .map(|p| {
            let f = build(&r, p);
            let c = Polynomial::constant(&r, f.evaluate(&ones).unwrap()).unwrap();
            &f - &c
        })
        .collect();
    PolySystem::new(&r, polys).unwrap()
}

pub fn timed(secs: u64) -> ClassifyConfig {
    ClassifyConfig {
        test_timeout: Some(Duration::from_secs(secs)),
        ..ClassifyConfig::default()
    }
}

pub fn statuses(r: &ToricityReport) -> [TestStatus; 4] {
    [r.iota.status, r.mu.status, r.eta.status, r.gamma.status]
}

pub fn fixture(name: &str) -> PolySystem {
    parse_system_file(&fixture_dir().join(name), Q).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, PolySystem)> {
    FIXTURES.iter().map(|&name| (name, fixture(name))).collect()
}

pub fn run(sys: &PolySystem) -> ToricityReport {
    classify(sys, &ClassifyConfig::default())
}

/// The system with `x_j` replaced by `c_j x_j`.
pub fn scale_coordinates(sys: &PolySystem, c: &[FieldElement]) -> PolySystem {
    let polys = sys
        .polys()
        .iter()
        .map(|f| {
            let terms = f.terms().iter().map(|t| {
                let k = t
                    .monomial
                    .exponents()
                    .iter()
                    .zip(c)
                    .fold(t.coeff.clone(), |acc, (&e, cj)| &acc * &cj.pow(e));
                (k, t.monomial.clone())
            });
            Polynomial::from_terms(sys.ring(), terms).unwrap()
        })
        .collect();
    PolySystem::new(sys.ring(), polys).unwrap()
}

/// Moves the system onto fresh names, reversing the variable order. The
/// names collide with the ones used for partner variables.
pub fn renamed(sys: &PolySystem) -> PolySystem {
    let n = sys.n();
    let names: Vec<String> = (1..=n)
        .map(|i| format!("g{i}_"))
        .chain(["t_".to_string()])
        .collect();
    let target = PolyRing::new(names, sys.field(), OrderKind::Grevlex).unwrap();
    let images: Vec<usize> = if n == 1 {
        vec![n]
    } else {
        (0..n).rev().collect()
    };
    let polys = sys
        .polys()
        .iter()
        .map(|f| f.rename_into(&target, &images).unwrap())
        .collect();
    PolySystem::new(&target, polys).unwrap()
}

pub fn small_system() -> impl Strategy<Value = (usize, Vec<RawPoly>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec(raw_poly(n, 3, 3, 5), 1..=3),
        )
    })
}

/// A system through `(1, ..., 1)` has gamma true and eta false.
pub fn check_gamma_excludes_eta(n: usize, raw: &[RawPoly]) -> Result<(), TestCaseError> {
    let sys = through_ones(n, raw);
    prop_assume!(sys.m() > 0);
    prop_assert_eq!(test_gamma(&sys).status, TestStatus::True);
    let eta = test_eta(&sys, &Budget::with_timeout(Duration::from_secs(5))).status;
    prop_assume!(eta != TestStatus::Timeout);
    prop_assert_eq!(eta, TestStatus::False);
    Ok(())
}

pub fn group_implies_coset(r: &ToricityReport) -> bool {
    (r.group != Verdict::True || r.coset == Verdict::True)
        && (r.coset != Verdict::False || r.group != Verdict::True)
}

/// Classifies random small systems, half of them through `(1, ..., 1)`.
pub fn check_group_implies_coset(
    n: usize,
    raw: &[RawPoly],
    anchored: bool,
) -> Result<(), TestCaseError> {
    let raw: Vec<RawPoly> = raw.iter().map(|p| trim(p, n)).collect();
    let sys = if anchored {
        through_ones(n, &raw)
    } else {
        system_of(n, &raw)
    };
    let r = classify(&sys, &timed(5));
    prop_assert!(group_implies_coset(&r), "{:?} {:?}", r.coset, r.group);
    Ok(())
}

fn same(name: &str, what: &str, a: &ToricityReport, b: &ToricityReport) -> Result<(), String> {
    if statuses(a) == statuses(b) && (a.coset, a.group) == (b.coset, b.group) {
        Ok(())
    } else {
        Err(format!(
            "{name}: {what} changed {:?} into {:?}",
            statuses(a),
            statuses(b)
        ))
    }
}

/// Generator order and scaling, variable names and the monomial order do
/// not change any status.
pub fn check_invariance(name: &str, sys: &PolySystem) -> Result<(), String> {
    let base = run(sys);
    if !group_implies_coset(&base) {
        return Err(format!("{name}: group without coset"));
    }

    let mut polys = sys.polys().to_vec();
    polys.reverse();
    same(
        name,
        "reversing",
        &base,
        &run(&PolySystem::new(sys.ring(), polys.clone()).unwrap()),
    )?;
    polys.rotate_left(1);
    same(
        name,
        "rotating",
        &base,
        &run(&PolySystem::new(sys.ring(), polys).unwrap()),
    )?;

    let scales = [rat(-3, 7), rat(5, 1), rat(1, 9), rat(-2, 1)];
    let scaled = sys
        .polys()
        .iter()
        .zip(scales.iter().cycle())
        .map(|(f, c)| f.scale(c))
        .collect();
    same(
        name,
        "scaling",
        &base,
        &run(&PolySystem::new(sys.ring(), scaled).unwrap()),
    )?;

    let other = renamed(sys);
    if other.variable_names() == sys.variable_names() {
        return Err(format!("{name}: renaming kept the names"));
    }
    same(name, "renaming", &base, &run(&other))?;

    let lex = classify(
        sys,
        &ClassifyConfig {
            order: OrderKind::Lex,
            ..ClassifyConfig::default()
        },
    );
    same(name, "lex", &base, &lex)
}
