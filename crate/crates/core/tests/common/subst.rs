//! Partner-variable substitution checks.

use std::sync::Arc;

use proptest::prelude::*;
use toricity_core::poly::{subst_inverse_cleared, subst_scale, subst_scale_pair, PartnerMap};
use toricity_core::{FieldElement, Monomial, OrderKind, PolyRing, Polynomial};

use super::*;

pub struct Setup {
    source: Arc<PolyRing>,
    target: Arc<PolyRing>,
    map: PartnerMap,
    n: usize,
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Source `x1..xn`; target `x1..xn, g1..gn, y1..yn`.
pub fn setup(n: usize, kind: OrderKind) -> Setup {
    let source = ring(n, Q, kind);
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let gs: Vec<String> = (1..=n).map(|i| format!("g{i}")).collect();
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let names: Vec<String> = xs.iter().chain(&gs).chain(&ys).cloned().collect();
    let target = PolyRing::new(names, Q, kind).unwrap();
    let map = PartnerMap::new(&target, &strs(&xs), &strs(&gs), Some(&strs(&ys))).unwrap();
    Setup {
        source,
        target,
        map,
        n,
    }
}

/// Moves exponents of target block `from` (0 = x, 1 = g, 2 = y) onto block
/// `to`, or drops them when `to` is `None`. Substitutes `g := x` or `g := 1`.
fn collapse(p: &Polynomial, n: usize, from: usize, to: Option<usize>) -> Polynomial {
    let terms = p.terms().iter().map(|t| {
        let mut e = t.monomial.exponents().to_vec();
        for j in 0..n {
            let moved = std::mem::take(&mut e[from * n + j]);
            if let Some(b) = to {
                e[b * n + j] += moved;
            }
        }
        (t.coeff.clone(), Monomial::new(e))
    });
    Polynomial::from_terms(p.ring(), terms).unwrap()
}

pub fn nonzero_rational() -> impl Strategy<Value = (i64, i64)> {
    (prop_oneof![-9i64..=-1, 1..=9i64], 1i64..=7)
}

pub fn poly_case() -> impl Strategy<Value = (usize, RawPoly, bool)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), raw_poly(n, 4, 5, 20), any::<bool>()))
}

/// `g := 1` undoes both scaling substitutions.
pub fn check_unit_recovery(n: usize, raw: &RawPoly, grevlex: bool) -> Result<(), TestCaseError> {
    let s = setup(n, kind(grevlex));
    let f = build(&s.source, raw);
    let embedded = f.embed(&s.target).unwrap();
    let scaled = subst_scale(&f, &s.map).unwrap();
    prop_assert_eq!(collapse(&scaled, s.n, 1, None), embedded.clone());
    let pair = subst_scale_pair(&f, &s.map).unwrap();
    prop_assert_eq!(
        collapse(&collapse(&pair, s.n, 1, None), s.n, 2, None),
        embedded
    );
    Ok(())
}

/// The cleared inverse substitution at `g := x` is `f(1, ..., 1) x^d`.
pub fn check_inverse_at_x(n: usize, raw: &RawPoly, grevlex: bool) -> Result<(), TestCaseError> {
    let s = setup(n, kind(grevlex));
    let f = build(&s.source, raw);
    let cleared = subst_inverse_cleared(&f, &s.map).unwrap();
    let at_x = collapse(&cleared, s.n, 1, Some(0));
    let ones = vec![Q.one(); n];
    let mut d = f.degree_vector();
    d.resize(3 * n, 0);
    let expected =
        Polynomial::from_terms(&s.target, [(f.evaluate(&ones).unwrap(), Monomial::new(d))])
            .unwrap();
    prop_assert_eq!(at_x, expected);
    Ok(())
}

/// All three substitutions evaluated at a point with non-zero coordinates.
pub fn check_numeric(
    n: usize,
    raw: &RawPoly,
    grevlex: bool,
    point: &[(i64, i64)],
) -> Result<(), TestCaseError> {
    let s = setup(n, kind(grevlex));
    let f = build(&s.source, raw);
    let v: Vec<FieldElement> = point.iter().map(|&(a, b)| rat(a, b)).collect();
    let (x, g, y) = (&v[0..n], &v[3..3 + n], &v[6..6 + n]);
    let mut at = Vec::with_capacity(3 * n);
    at.extend_from_slice(x);
    at.extend_from_slice(g);
    at.extend_from_slice(y);

    let gx: Vec<FieldElement> = (0..n).map(|j| &g[j] * &x[j]).collect();
    let lhs = subst_scale(&f, &s.map).unwrap().evaluate(&at).unwrap();
    prop_assert_eq!(lhs, f.evaluate(&gx).unwrap());

    let gxy: Vec<FieldElement> = (0..n).map(|j| &gx[j] * &y[j]).collect();
    let lhs = subst_scale_pair(&f, &s.map).unwrap().evaluate(&at).unwrap();
    prop_assert_eq!(lhs, f.evaluate(&gxy).unwrap());

    let g_over_x: Vec<FieldElement> = (0..n).map(|j| g[j].try_div(&x[j]).unwrap()).collect();
    let xd = f
        .degree_vector()
        .iter()
        .zip(x)
        .fold(Q.one(), |acc, (&d, xj)| &acc * &xj.pow(d));
    let lhs = subst_inverse_cleared(&f, &s.map)
        .unwrap()
        .evaluate(&at)
        .unwrap();
    prop_assert_eq!(lhs, &xd * &f.evaluate(&g_over_x).unwrap());
    Ok(())
}
