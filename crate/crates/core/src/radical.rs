//! Radical ideal membership via an auxiliary variable.
//!
//! `g` lies in the radical of `<f_1, ..., f_m>` iff `<f_1, ..., f_m, 1 - t g>`
//! is the unit ideal, where `t` is a variable absent from all inputs. One
//! Groebner basis computation decides it.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::budget::Budget;
use crate::groebner::{buchberger, contains_unit, GroebnerError};
use crate::poly::{Monomial, PolyError, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestStatus {
    True,
    False,
    /// The budget ran out before a decision.
    Timeout,
    /// Not run because an earlier test already settled every verdict.
    Skipped,
}

impl TestStatus {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TestStatus::True
        } else {
            TestStatus::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            TestStatus::True => Some(true),
            TestStatus::False => Some(false),
            TestStatus::Timeout | TestStatus::Skipped => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TestStatus::True => "true",
            TestStatus::False => "false",
            TestStatus::Timeout => "timeout",
            TestStatus::Skipped => "skipped",
        }
    }
}

impl fmt::Display for TestStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A status with the wall-clock time it took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestOutcome {
    pub status: TestStatus,
    pub elapsed: Duration,
}

impl TestOutcome {
    pub fn new(status: TestStatus, elapsed: Duration) -> Self {
        TestOutcome { status, elapsed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadicalError {
    #[error("auxiliary variable `{0}` occurs in the query")]
    AuxiliaryOccurs(String),
    #[error("auxiliary variable index {0} is out of range")]
    AuxiliaryOutOfRange(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Is `candidate` in the radical of the ideal spanned by `generators`?
///
/// All polynomials share one ring whose variable `aux` is reserved for the
/// construction.
#[derive(Debug, Clone, Copy)]
pub struct RadicalQuery<'a> {
    pub candidate: &'a Polynomial,
    pub generators: &'a [Polynomial],
    pub aux: usize,
    pub budget: &'a Budget,
}

pub fn radical_membership(query: &RadicalQuery<'_>) -> Result<TestOutcome, RadicalError> {
    let start = Instant::now();
    let ring = query.candidate.ring();
    if query.aux >= ring.nvars() {
        return Err(RadicalError::AuxiliaryOutOfRange(query.aux));
    }
    let aux_name = &ring.variables()[query.aux].name;
    for f in query
        .generators
        .iter()
        .chain(std::iter::once(query.candidate))
    {
        query.candidate.check_ring(f)?;
        if f.degree_vector()[query.aux] > 0 {
            return Err(RadicalError::AuxiliaryOccurs(aux_name.clone()));
        }
    }

    let t = Monomial::variable(ring.nvars(), query.aux);
    let one = Polynomial::one(ring);
    let rabinowitsch = &one - &query.candidate.mul_term(&ring.field().one(), &t);
    let mut input = query.generators.to_vec();
    input.push(rabinowitsch);

    let status = match buchberger(ring, &input, query.budget) {
        Ok(basis) => TestStatus::from_bool(contains_unit(&basis)),
        Err(GroebnerError::Timeout) => TestStatus::Timeout,
        Err(GroebnerError::Poly(e)) => return Err(e.into()),
        Err(GroebnerError::ZeroPolynomial) => unreachable!("buchberger skips zero generators"),
    };
    Ok(TestOutcome::new(status, start.elapsed()))
}
