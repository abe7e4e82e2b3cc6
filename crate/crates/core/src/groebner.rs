//! Buchberger's algorithm with the Gebauer-Moeller pair update.
//!
//! The update applies both classical criteria: pairs with coprime leading
//! monomials are dropped, and so are pairs whose lcm is covered by a chain
//! through a third element. Pairs are taken by the normal strategy: smallest
//! lcm under the ring's order, ties by index. For graded orders that is also
//! the smallest lcm degree. All basis elements are kept monic.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::FieldElement;
use crate::budget::Budget;
use crate::poly::{add_scaled, Monomial, PolyError, PolyRing, Polynomial, Term};
use crate::zpoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("time budget exhausted")]
    Timeout,
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Leading coefficient and monomial under the ring's order.
pub fn leading_term(f: &Polynomial) -> Result<(&FieldElement, &Monomial), GroebnerError> {
    f.leading_term()
        .map(|t| (&t.coeff, &t.monomial))
        .ok_or(GroebnerError::ZeroPolynomial)
}

/// Full remainder of `f` on division by `divisors`, tried in list order.
pub fn normal_form(f: &Polynomial, divisors: &[Polynomial]) -> Result<Polynomial, GroebnerError> {
    for g in divisors {
        f.check_ring(g)?;
    }
    let refs: Vec<&Polynomial> = divisors.iter().filter(|g| !g.is_zero()).collect();
    let terms = reduce_terms(f.ring(), f.terms().to_vec(), &refs, None)?;
    Ok(Polynomial::from_sorted_terms(f.ring(), terms))
}

/// `lcm/lt(f) * f - lcm/lt(g) * g`.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, GroebnerError> {
    f.check_ring(g)?;
    let (fc, fm) = leading_term(f)?;
    let (gc, gm) = leading_term(g)?;
    let lcm = fm.lcm(gm);
    let left = f.mul_term(&fc.inv().expect("non-zero"), &lcm.div(fm).expect("lcm"));
    let right = g.mul_term(&gc.inv().expect("non-zero"), &lcm.div(gm).expect("lcm"));
    Ok(&left - &right)
}

/// A pending S-pair of basis elements `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub i: usize,
    pub j: usize,
    pub lcm: Monomial,
}

impl CriticalPair {
    pub fn degree(&self) -> u32 {
        self.lcm.total_degree()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    elements: Vec<Polynomial>,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, GroebnerError> {
        let f = self.adopt(f)?;
        normal_form(&f, &self.elements)
    }

    /// Ideal membership.
    pub fn contains(&self, f: &Polynomial) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    fn adopt(&self, f: &Polynomial) -> Result<Polynomial, GroebnerError> {
        if f.ring().variables() != self.ring.variables() || f.ring().field() != self.ring.field() {
            return Err(PolyError::AmbientMismatch.into());
        }
        Ok(f.reorder_into(&self.ring))
    }

    fn unit(ring: &Arc<PolyRing>) -> Self {
        GroebnerBasis {
            ring: ring.clone(),
            elements: vec![Polynomial::one(ring)],
            reduced: true,
        }
    }
}

/// True iff some element is a non-zero constant, i.e. the ideal is the whole ring.
pub fn contains_unit(basis: &GroebnerBasis) -> bool {
    basis
        .elements
        .iter()
        .any(|g| !g.is_zero() && g.is_constant())
}

/// Reduced Groebner basis of the ideal generated by `generators`, under the
/// order of `ring`.
///
/// Generators may come from a ring that differs from `ring` only in its
/// order; they are re-sorted first. The budget is polled between reduction
/// steps. Over Q the work is done fraction-free on primitive integer
/// polynomials; the returned elements are monic either way.
pub fn buchberger(
    ring: &Arc<PolyRing>,
    generators: &[Polynomial],
    budget: &Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    let mut sorted = Vec::with_capacity(generators.len());
    for g in generators {
        if g.ring().variables() != ring.variables() || g.ring().field() != ring.field() {
            return Err(PolyError::AmbientMismatch.into());
        }
        sorted.push(g.reorder_into(ring));
    }
    if ring.field().is_rational() {
        run::<Integral>(ring, &sorted, budget)
    } else {
        run::<Monic>(ring, &sorted, budget)
    }
}

/// The unique reduced basis: minimal, inter-reduced, monic, sorted by
/// ascending leading monomial.
pub fn reduce_basis(basis: &GroebnerBasis) -> GroebnerBasis {
    let budget = Budget::unlimited();
    let result = if basis.ring.field().is_rational() {
        let elements = basis
            .elements
            .iter()
            .filter(|g| !g.is_zero())
            .map(Integral::load)
            .collect();
        finish::<Integral>(&basis.ring, elements, &budget)
    } else {
        let elements = basis
            .elements
            .iter()
            .filter(|g| !g.is_zero())
            .map(Monic::load)
            .collect();
        finish::<Monic>(&basis.ring, elements, &budget)
    };
    result.expect("unlimited budget")
}

/// Working representation of basis elements inside the engine.
trait Repr {
    type P: Clone;
    /// Normalized copy of a non-zero polynomial.
    fn load(f: &Polynomial) -> Self::P;
    fn store(ring: &Arc<PolyRing>, p: &Self::P) -> Polynomial;
    fn lm(p: &Self::P) -> Option<&Monomial>;
    fn s_poly(ring: &Arc<PolyRing>, f: &Self::P, g: &Self::P, lcm: &Monomial) -> Self::P;
    /// Normalized remainder; `Timeout` if the budget runs out.
    fn reduce(
        ring: &Arc<PolyRing>,
        p: Self::P,
        divisors: &[&Self::P],
        budget: &Budget,
    ) -> Result<Self::P, GroebnerError>;

    fn is_constant(p: &Self::P) -> bool {
        Self::lm(p).is_some_and(Monomial::is_one)
    }
}

/// Monic polynomials over the field itself; used for prime fields.
struct Monic;

impl Repr for Monic {
    type P = Polynomial;

    fn load(f: &Polynomial) -> Polynomial {
        f.monic()
    }

    fn store(_: &Arc<PolyRing>, p: &Polynomial) -> Polynomial {
        p.clone()
    }

    fn lm(p: &Polynomial) -> Option<&Monomial> {
        p.leading_monomial()
    }

    fn s_poly(_: &Arc<PolyRing>, f: &Polynomial, g: &Polynomial, _: &Monomial) -> Polynomial {
        s_polynomial(f, g).expect("same ring, non-zero")
    }

    fn reduce(
        ring: &Arc<PolyRing>,
        p: Polynomial,
        divisors: &[&Polynomial],
        budget: &Budget,
    ) -> Result<Polynomial, GroebnerError> {
        let terms = reduce_terms(ring, p.terms().to_vec(), divisors, Some(budget))?;
        Ok(Polynomial::from_sorted_terms(ring, terms).monic())
    }
}

/// Primitive integer polynomials; used over Q.
struct Integral;

impl Repr for Integral {
    type P = Vec<zpoly::ZTerm>;

    fn load(f: &Polynomial) -> Self::P {
        zpoly::from_terms(f.terms())
    }

    fn store(ring: &Arc<PolyRing>, p: &Self::P) -> Polynomial {
        Polynomial::from_sorted_terms(ring, zpoly::to_monic(p))
    }

    fn lm(p: &Self::P) -> Option<&Monomial> {
        p.first().map(|t| &t.m)
    }

    fn s_poly(ring: &Arc<PolyRing>, f: &Self::P, g: &Self::P, lcm: &Monomial) -> Self::P {
        zpoly::s_polynomial(ring.order(), f, g, lcm)
    }

    fn reduce(
        ring: &Arc<PolyRing>,
        p: Self::P,
        divisors: &[&Self::P],
        budget: &Budget,
    ) -> Result<Self::P, GroebnerError> {
        let divisors: Vec<&[zpoly::ZTerm]> = divisors.iter().map(|d| d.as_slice()).collect();
        zpoly::reduce(ring.order(), p, &divisors, Some(budget)).ok_or(GroebnerError::Timeout)
    }
}

fn run<R: Repr>(
    ring: &Arc<PolyRing>,
    generators: &[Polynomial],
    budget: &Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    let mut state: Engine<R> = Engine {
        ring: ring.clone(),
        basis: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    for g in generators.iter().filter(|g| !g.is_zero()) {
        let h = state.reduce(R::load(g), budget)?;
        if R::lm(&h).is_none() {
            continue;
        }
        if R::is_constant(&h) {
            return Ok(GroebnerBasis::unit(ring));
        }
        state.update(h);
    }
    while let Some(pair) = state.select() {
        if budget.exhausted() {
            return Err(GroebnerError::Timeout);
        }
        let s = R::s_poly(ring, &state.basis[pair.i], &state.basis[pair.j], &pair.lcm);
        let h = state.reduce(s, budget)?;
        if R::lm(&h).is_none() {
            continue;
        }
        if R::is_constant(&h) {
            return Ok(GroebnerBasis::unit(ring));
        }
        state.update(h);
    }
    let elements = state
        .basis
        .into_iter()
        .zip(state.active)
        .filter_map(|(g, a)| a.then_some(g))
        .collect();
    finish::<R>(ring, elements, budget)
}

/// Minimalizes and inter-reduces, then converts to sorted monic polynomials.
fn finish<R: Repr>(
    ring: &Arc<PolyRing>,
    mut elements: Vec<R::P>,
    budget: &Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    let order = ring.order();
    elements.retain(|g| R::lm(g).is_some());
    if elements.iter().any(R::is_constant) {
        return Ok(GroebnerBasis::unit(ring));
    }
    elements.sort_by(|a, b| order.cmp(R::lm(a).unwrap(), R::lm(b).unwrap()));
    // Ascending order puts every proper divisor of a leading monomial first.
    let mut minimal: Vec<R::P> = Vec::new();
    for g in elements {
        let lm = R::lm(&g).unwrap();
        if !minimal.iter().any(|h| R::lm(h).unwrap().divides(lm)) {
            minimal.push(g);
        }
    }
    for k in 0..minimal.len() {
        let others: Vec<&R::P> = minimal
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, g)| g)
            .collect();
        let reduced = R::reduce(ring, minimal[k].clone(), &others, budget)?;
        minimal[k] = reduced;
    }
    let elements = minimal.iter().map(|g| R::store(ring, g)).collect();
    Ok(GroebnerBasis {
        ring: ring.clone(),
        elements,
        reduced: true,
    })
}

/// Division with remainder on a descending term list.
///
/// Terms moved to the remainder are larger than everything still pending, so
/// the remainder comes out sorted.
fn reduce_terms(
    ring: &Arc<PolyRing>,
    mut pending: Vec<Term>,
    divisors: &[&Polynomial],
    budget: Option<&Budget>,
) -> Result<Vec<Term>, GroebnerError> {
    let order = ring.order();
    let mut remainder = Vec::new();
    let mut pos = 0;
    while pos < pending.len() {
        let lead = &pending[pos];
        let divisor = divisors.iter().find(|g| {
            g.leading_monomial()
                .is_some_and(|m| m.divides(&lead.monomial))
        });
        match divisor {
            Some(g) => {
                let g_lead = g.leading_term().unwrap();
                let shift = lead.monomial.div(&g_lead.monomial).unwrap();
                let factor = -(&lead.coeff * &g_lead.coeff.inv().expect("non-zero"));
                pending = add_scaled(
                    order,
                    &pending[pos + 1..],
                    &g.terms()[1..],
                    &factor,
                    Some(&shift),
                );
                pos = 0;
                if budget.is_some_and(Budget::exhausted) {
                    return Err(GroebnerError::Timeout);
                }
            }
            None => {
                remainder.push(pending[pos].clone());
                pos += 1;
            }
        }
    }
    Ok(remainder)
}

struct Engine<R: Repr> {
    ring: Arc<PolyRing>,
    basis: Vec<R::P>,
    active: Vec<bool>,
    pairs: Vec<CriticalPair>,
}

impl<R: Repr> Engine<R> {
    fn reduce(&self, p: R::P, budget: &Budget) -> Result<R::P, GroebnerError> {
        let divisors: Vec<&R::P> = self
            .basis
            .iter()
            .zip(&self.active)
            .filter_map(|(g, &a)| a.then_some(g))
            .collect();
        R::reduce(&self.ring, p, &divisors, budget)
    }

    fn select(&mut self) -> Option<CriticalPair> {
        let order = self.ring.order();
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| order.cmp(&a.lcm, &b.lcm).then((a.i, a.j).cmp(&(b.i, b.j))))
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }

    fn lm(&self, i: usize) -> &Monomial {
        R::lm(&self.basis[i]).expect("basis elements are non-zero")
    }

    /// Gebauer-Moeller installation of a new element `h`.
    fn update(&mut self, h: R::P) {
        let new = self.basis.len();
        let h_lm = R::lm(&h).unwrap().clone();
        self.basis.push(h);
        self.active.push(true);

        let mut candidates: Vec<(usize, Monomial, bool)> = (0..new)
            .filter(|&g| self.active[g])
            .map(|g| {
                let lm = self.lm(g);
                (g, h_lm.lcm(lm), h_lm.is_coprime(lm))
            })
            .collect();

        // Chain criterion among the new pairs; coprime pairs are kept here so
        // they can still shadow others, then dropped below.
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        while let Some((g, lcm, coprime)) = candidates.pop() {
            let shadowed = candidates
                .iter()
                .chain(kept.iter())
                .any(|(_, other, _)| other.divides(&lcm));
            if coprime || !shadowed {
                kept.push((g, lcm, coprime));
            }
        }

        // Old pairs made redundant by h.
        let old = std::mem::take(&mut self.pairs);
        for p in old {
            let lcm_ih = self.lm(p.i).lcm(&h_lm);
            let lcm_jh = self.lm(p.j).lcm(&h_lm);
            if !h_lm.divides(&p.lcm) || lcm_ih == p.lcm || lcm_jh == p.lcm {
                self.pairs.push(p);
            }
        }
        self.pairs.extend(
            kept.into_iter()
                .filter(|(_, _, coprime)| !coprime)
                .map(|(g, lcm, _)| CriticalPair { i: g, j: new, lcm }),
        );

        for g in 0..new {
            if self.active[g] && h_lm.divides(self.lm(g)) {
                self.active[g] = false;
            }
        }
    }
}
