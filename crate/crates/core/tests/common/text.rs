//! Render and parse round trips.

use proptest::prelude::*;
use toricity_core::{
    parse_polynomial_in, parse_system_file, parse_system_str, render, FieldSpec, PolySystem,
};

use super::*;

pub fn field_case() -> impl Strategy<Value = (usize, RawPoly, FieldSpec, bool)> {
    let field = prop_oneof![
        3 => Just(FieldSpec::RATIONALS),
        1 => Just(FieldSpec::new(2).unwrap()),
        1 => Just(FieldSpec::new(32003).unwrap()),
    ];
    (1usize..=4).prop_flat_map(move |n| {
        (
            Just(n),
            raw_poly(n, 6, 8, 1_000_000_007),
            field.clone(),
            any::<bool>(),
        )
    })
}

/// Inserts spaces around every operator and parenthesis.
fn spaced(text: &str) -> String {
    let mut out = String::new();
    for c in text.chars() {
        if "+-*^()".contains(c) {
            out.push(' ');
            out.push(c);
            out.push(' ');
        } else if c != ' ' {
            out.push(c);
        }
    }
    out
}

pub fn check_round_trip(
    n: usize,
    raw: &RawPoly,
    field: FieldSpec,
    grevlex: bool,
) -> Result<(), TestCaseError> {
    let r = ring(n, field, kind(grevlex));
    let f = build(&r, raw);
    let text = render(&f);
    prop_assert_eq!(parse_polynomial_in(&text, &r).unwrap(), f.clone());
    prop_assert_eq!(parse_polynomial_in(&spaced(&text), &r).unwrap(), f);
    Ok(())
}

/// Renders every polynomial of a fixture and parses the result again.
pub fn rerendered(name: &str) -> (PolySystem, PolySystem) {
    let sys = parse_system_file(&fixture_dir().join(name), Q).unwrap();
    let text: String = sys.polys().iter().map(|f| render(f) + "\n").collect();
    let again = parse_system_str(&text, Q).unwrap();
    (sys, again)
}
