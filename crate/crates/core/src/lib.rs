//! Group and coset tests for the torus part of an algebraic variety, decided
//! by radical ideal membership over exact arithmetic.

pub mod arith;
pub mod budget;
pub mod groebner;
pub mod parser;
pub mod poly;
pub mod radical;
pub mod toricity;
mod zpoly;

pub use arith::{ArithError, FieldElement, FieldSpec, Integer, Rational};
pub use budget::Budget;
pub use groebner::{
    buchberger, contains_unit, normal_form, reduce_basis, GroebnerBasis, GroebnerError,
};
pub use parser::{
    parse_polynomial, parse_polynomial_in, parse_system_file, parse_system_str, render, ParseError,
    SystemFile, SystemFileError,
};
pub use poly::{Monomial, MonomialOrder, OrderKind, PolyError, PolyRing, Polynomial, Term};
pub use radical::{radical_membership, RadicalError, RadicalQuery, TestOutcome, TestStatus};
pub use toricity::{classify, ClassifyConfig, PolySystem, ToricityReport, Verdict};
