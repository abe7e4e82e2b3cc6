//! Fraction-free polynomial reduction over Q.
//!
//! Polynomials are kept primitive with integer coefficients and a positive
//! leading coefficient. A reduction step computes `a p - b m g` with `a, b`
//! cofactors of the two leading coefficients, so no rational arithmetic (and
//! no gcd per coefficient) happens in the inner loop.

use std::cmp::Ordering;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::{FieldElement, Integer, Rational};
use crate::budget::Budget;
use crate::poly::{Monomial, MonomialOrder, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ZTerm {
    pub c: Integer,
    pub m: Monomial,
}

/// Content is stripped every this many reduction steps.
const CONTENT_EVERY: usize = 8;

/// Primitive integer multiple of a descending rational term list.
pub(crate) fn from_terms(terms: &[Term]) -> Vec<ZTerm> {
    let mut den = Integer::one();
    for t in terms {
        den = den.lcm(t.coeff.as_rational().expect("rational coefficient").denom());
    }
    let mut out: Vec<ZTerm> = terms
        .iter()
        .map(|t| {
            let r = t.coeff.as_rational().unwrap();
            ZTerm {
                c: r.numer() * (&den / r.denom()),
                m: t.monomial.clone(),
            }
        })
        .collect();
    make_primitive(&mut out);
    out
}

/// Monic rational terms with the same zero set.
pub(crate) fn to_monic(z: &[ZTerm]) -> Vec<Term> {
    let Some(lead) = z.first() else {
        return Vec::new();
    };
    z.iter()
        .map(|t| Term {
            coeff: FieldElement::Rational(Rational::new(t.c.clone(), lead.c.clone())),
            monomial: t.m.clone(),
        })
        .collect()
}

fn content(z: &[ZTerm]) -> Integer {
    let mut g = Integer::zero();
    for t in z {
        g = g.gcd(&t.c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_all(z: &mut [ZTerm], d: &Integer) {
    if !d.is_one() && !d.is_zero() {
        for t in z.iter_mut() {
            t.c = &t.c / d;
        }
    }
}

pub(crate) fn make_primitive(z: &mut [ZTerm]) {
    let g = content(z);
    divide_all(z, &g);
    if z.first().is_some_and(|t| t.c.is_negative()) {
        for t in z.iter_mut() {
            t.c = -&t.c;
        }
    }
}

/// `a * x + b * m * y` for descending term lists; `m` multiplies `y` only.
pub(crate) fn combine(
    order: &MonomialOrder,
    x: &[ZTerm],
    a: &Integer,
    x_shift: Option<&Monomial>,
    y: &[ZTerm],
    b: &Integer,
    y_shift: Option<&Monomial>,
) -> Vec<ZTerm> {
    let scale = |t: &ZTerm, f: &Integer, s: Option<&Monomial>| ZTerm {
        c: if f.is_one() { t.c.clone() } else { &t.c * f },
        m: match s {
            Some(m) => t.m.mul(m),
            None => t.m.clone(),
        },
    };
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let mut xt = x.first().map(|t| scale(t, a, x_shift));
    let mut yt = y.first().map(|t| scale(t, b, y_shift));
    loop {
        match (xt.take(), yt.take()) {
            (None, None) => break,
            (Some(p), None) => {
                out.push(p);
                out.extend(x[i + 1..].iter().map(|t| scale(t, a, x_shift)));
                break;
            }
            (None, Some(q)) => {
                out.push(q);
                out.extend(y[j + 1..].iter().map(|t| scale(t, b, y_shift)));
                break;
            }
            (Some(p), Some(q)) => match order.cmp(&p.m, &q.m) {
                Ordering::Greater => {
                    out.push(p);
                    i += 1;
                    xt = x.get(i).map(|t| scale(t, a, x_shift));
                    yt = Some(q);
                }
                Ordering::Less => {
                    out.push(q);
                    j += 1;
                    yt = y.get(j).map(|t| scale(t, b, y_shift));
                    xt = Some(p);
                }
                Ordering::Equal => {
                    let c = p.c + q.c;
                    if !c.is_zero() {
                        out.push(ZTerm { c, m: p.m });
                    }
                    i += 1;
                    j += 1;
                    xt = x.get(i).map(|t| scale(t, a, x_shift));
                    yt = y.get(j).map(|t| scale(t, b, y_shift));
                }
            },
        }
    }
    out
}

/// Cofactors `(a, b)` with `a * p = b * g` for leading coefficients `p, g`, `a > 0`.
fn cofactors(p: &Integer, g: &Integer) -> (Integer, Integer) {
    let d = p.gcd(g);
    let (mut a, mut b) = (g / &d, p / &d);
    if a.is_negative() {
        a = -a;
        b = -b;
    }
    (a, b)
}

/// Primitive S-polynomial of two primitive polynomials.
pub(crate) fn s_polynomial(
    order: &MonomialOrder,
    f: &[ZTerm],
    g: &[ZTerm],
    lcm: &Monomial,
) -> Vec<ZTerm> {
    let (a, b) = cofactors(&f[0].c, &g[0].c);
    let fs = lcm.div(&f[0].m).expect("lcm");
    let gs = lcm.div(&g[0].m).expect("lcm");
    let mut s = combine(order, &f[1..], &a, Some(&fs), &g[1..], &-b, Some(&gs));
    make_primitive(&mut s);
    s
}

/// Full reduction modulo primitive divisors; the result is primitive.
///
/// `None` means the budget ran out.
pub(crate) fn reduce(
    order: &MonomialOrder,
    mut pending: Vec<ZTerm>,
    divisors: &[&[ZTerm]],
    budget: Option<&Budget>,
) -> Option<Vec<ZTerm>> {
    let mut remainder: Vec<ZTerm> = Vec::new();
    let mut pos = 0;
    let mut steps = 0usize;
    while pos < pending.len() {
        let lead = &pending[pos];
        match divisors.iter().find(|g| g[0].m.divides(&lead.m)) {
            Some(g) => {
                let shift = lead.m.div(&g[0].m).unwrap();
                let (a, b) = cofactors(&lead.c, &g[0].c);
                pending = combine(
                    order,
                    &pending[pos + 1..],
                    &a,
                    None,
                    &g[1..],
                    &-b,
                    Some(&shift),
                );
                pos = 0;
                if !a.is_one() {
                    for t in remainder.iter_mut() {
                        t.c *= &a;
                    }
                }
                steps += 1;
                if steps % CONTENT_EVERY == 0 {
                    let mut c = content(&remainder);
                    if !c.is_one() {
                        for t in &pending {
                            c = c.gcd(&t.c);
                            if c.is_one() {
                                break;
                            }
                        }
                        divide_all(&mut remainder, &c);
                        divide_all(&mut pending, &c);
                    }
                }
                if budget.is_some_and(Budget::exhausted) {
                    return None;
                }
            }
            None => {
                remainder.push(pending[pos].clone());
                pos += 1;
            }
        }
    }
    make_primitive(&mut remainder);
    Some(remainder)
}
