//! Sparse multivariate polynomials in distributed representation.
//!
//! Every [`Polynomial`] lives in a [`PolyRing`]: an ordered list of variable
//! names, a coefficient field and a monomial order. Terms are stored strictly
//! descending in that order with no zero coefficients, so structural equality
//! is polynomial equality.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{ArithError, FieldElement, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    AmbientMismatch,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no partner variable `{0}` in the target ring")]
    MissingPartner(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("monomial order ranking is not a permutation of the variables")]
    BadRanking,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub index: usize,
}

/// Exponent vector with its cached total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        Monomial { exponents, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial {
            exponents: vec![0; nvars],
            degree: 0,
        }
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut exponents = vec![0; nvars];
        exponents[index] = 1;
        Monomial {
            exponents,
            degree: 1,
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        Monomial {
            exponents,
            degree: self.degree + other.degree,
        }
    }

    /// True if `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree
            && self
                .exponents
                .iter()
                .zip(&other.exponents)
                .all(|(a, b)| a <= b)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a - b)
            .collect();
        Some(Monomial {
            exponents,
            degree: self.degree - other.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// No variable occurs in both.
    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exponents
            .iter()
            .zip(&other.exponents)
            .all(|(a, b)| *a == 0 || *b == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    Grevlex,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Lex => "lex",
            OrderKind::Grevlex => "grevlex",
        })
    }
}

/// A monomial order: `ranking[0]` is the index of the largest variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    ranking: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, ranking: Vec<usize>) -> Result<Self, PolyError> {
        let mut seen = vec![false; ranking.len()];
        for &v in &ranking {
            if v >= ranking.len() || std::mem::replace(&mut seen[v], true) {
                return Err(PolyError::BadRanking);
            }
        }
        Ok(MonomialOrder { kind, ranking })
    }

    /// Variables ranked by their position in the ring.
    pub fn natural(kind: OrderKind, nvars: usize) -> Self {
        MonomialOrder {
            kind,
            ranking: (0..nvars).collect(),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.ranking {
                    match a.exponents[v].cmp(&b.exponents[v]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => {
                match a.degree.cmp(&b.degree) {
                    Ordering::Equal => {}
                    other => return other,
                }
                for &v in self.ranking.iter().rev() {
                    match a.exponents[v].cmp(&b.exponents[v]) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// Ambient context shared by polynomials that may be combined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    variables: Vec<Variable>,
    field: FieldSpec,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        field: FieldSpec,
        kind: OrderKind,
    ) -> Result<Arc<Self>, PolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let order = MonomialOrder::natural(kind, names.len());
        Self::with_order_and_names(names, field, order)
    }

    pub fn with_order_and_names(
        names: Vec<String>,
        field: FieldSpec,
        order: MonomialOrder,
    ) -> Result<Arc<Self>, PolyError> {
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        if order.ranking.len() != names.len() {
            return Err(PolyError::BadRanking);
        }
        let variables = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| Variable { name, index })
            .collect();
        Ok(Arc::new(PolyRing {
            variables,
            field,
            order,
        }))
    }

    /// Same variables and field under a different order.
    pub fn with_order(&self, order: MonomialOrder) -> Result<Arc<Self>, PolyError> {
        if order.ranking.len() != self.variables.len() {
            return Err(PolyError::BadRanking);
        }
        Ok(Arc::new(PolyRing {
            variables: self.variables.clone(),
            field: self.field,
            order,
        }))
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: FieldElement,
    pub monomial: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, ring.field.one()).expect("field of the ring")
    }

    pub fn from_i64(ring: &Arc<PolyRing>, c: i64) -> Self {
        Self::constant(ring, ring.field.from_i64(c)).expect("field of the ring")
    }

    pub fn constant(ring: &Arc<PolyRing>, c: FieldElement) -> Result<Self, PolyError> {
        Self::from_terms(ring, [(c, Monomial::one(ring.nvars()))])
    }

    pub fn variable(ring: &Arc<PolyRing>, index: usize) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: vec![Term {
                coeff: ring.field.one(),
                monomial: Monomial::variable(ring.nvars(), index),
            }],
        }
    }

    /// Builds a canonical polynomial from arbitrary (coefficient, monomial) pairs.
    pub fn from_terms(
        ring: &Arc<PolyRing>,
        terms: impl IntoIterator<Item = (FieldElement, Monomial)>,
    ) -> Result<Self, PolyError> {
        let mut out = Vec::new();
        for (coeff, monomial) in terms {
            if coeff.field() != ring.field {
                return Err(ArithError::FieldMismatch {
                    left: ring.field.characteristic(),
                    right: coeff.field().characteristic(),
                }
                .into());
            }
            if monomial.exponents.len() != ring.nvars() {
                return Err(PolyError::LengthMismatch {
                    expected: ring.nvars(),
                    got: monomial.exponents.len(),
                });
            }
            out.push(Term { coeff, monomial });
        }
        Ok(Polynomial {
            ring: ring.clone(),
            terms: normalize_terms(&ring.order, out),
        })
    }

    /// Wraps terms that are already canonical for `ring`.
    pub(crate) fn from_sorted_terms(ring: &Arc<PolyRing>, terms: Vec<Term>) -> Self {
        debug_assert!(terms
            .windows(2)
            .all(|w| ring.order.cmp(&w[0].monomial, &w[1].monomial).is_gt()));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`Polynomial::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Non-zero constant or zero.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.monomial.is_one())
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.monomial)
    }

    pub fn leading_coeff(&self) -> Option<&FieldElement> {
        self.terms.first().map(|t| &t.coeff)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.monomial.degree)
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::AmbientMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let one = self.ring.field.one();
        Ok(self.with_terms(add_scaled(
            &self.ring.order,
            &self.terms,
            &other.terms,
            &one,
            None,
        )))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let minus_one = -self.ring.field.one();
        Ok(self.with_terms(add_scaled(
            &self.ring.order,
            &self.terms,
            &other.terms,
            &minus_one,
            None,
        )))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let (short, long) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: Vec<Term> = Vec::new();
        for t in &short.terms {
            acc = add_scaled(
                &self.ring.order,
                &acc,
                &long.terms,
                &t.coeff,
                Some(&t.monomial),
            );
        }
        Ok(self.with_terms(acc))
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: &t.coeff * c,
                monomial: t.monomial.clone(),
            })
            .collect();
        self.with_terms(terms)
    }

    pub fn mul_term(&self, c: &FieldElement, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: &t.coeff * c,
                monomial: t.monomial.mul(m),
            })
            .collect();
        self.with_terms(terms)
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ring);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coeff() {
            Some(lc) if !lc.is_one() => {
                self.scale(&lc.inv().expect("non-zero leading coefficient"))
            }
            _ => self.clone(),
        }
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.ring.nvars() {
            return Err(PolyError::LengthMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        let field = self.ring.field;
        for v in point {
            if v.field() != field {
                return Err(ArithError::FieldMismatch {
                    left: field.characteristic(),
                    right: v.field().characteristic(),
                }
                .into());
            }
        }
        let mut total = field.zero();
        for t in &self.terms {
            let mut value = t.coeff.clone();
            for (x, &e) in point.iter().zip(&t.monomial.exponents) {
                if e > 0 {
                    value = &value * &x.pow(e);
                }
            }
            total = &total + &value;
        }
        Ok(total)
    }

    /// Slot `j` holds the largest exponent of variable `j`.
    pub fn degree_vector(&self) -> Vec<u32> {
        let mut d = vec![0; self.ring.nvars()];
        for t in &self.terms {
            for (slot, &e) in d.iter_mut().zip(&t.monomial.exponents) {
                *slot = (*slot).max(e);
            }
        }
        d
    }

    /// Re-sorts the terms under `order`; the result lives in the re-ordered ring.
    pub fn canonicalize(&self, order: &MonomialOrder) -> Result<Polynomial, PolyError> {
        if *order == self.ring.order {
            return Ok(self.clone());
        }
        let ring = self.ring.with_order(order.clone())?;
        Ok(self.reorder_into(&ring))
    }

    /// Moves into a ring that differs from ours at most in its order.
    pub(crate) fn reorder_into(&self, ring: &Arc<PolyRing>) -> Polynomial {
        debug_assert_eq!(ring.variables, self.ring.variables);
        let mut terms = self.terms.clone();
        if ring.order != self.ring.order {
            terms.sort_by(|a, b| ring.order.cmp(&b.monomial, &a.monomial));
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Sends variable `j` to variable `images[j]` of `target`.
    pub fn rename_into(
        &self,
        target: &Arc<PolyRing>,
        images: &[usize],
    ) -> Result<Polynomial, PolyError> {
        self.check_target(target, images.len())?;
        self.map_terms(target, |exps, out| {
            for (j, &e) in exps.iter().enumerate() {
                out[images[j]] += e;
            }
        })
    }

    /// Moves into `target` by matching variable names. Variables that do not
    /// occur in `self` may be missing from `target`.
    pub fn embed(&self, target: &Arc<PolyRing>) -> Result<Polynomial, PolyError> {
        let degrees = self.degree_vector();
        let mut images = Vec::with_capacity(degrees.len());
        for (v, &d) in self.ring.variables.iter().zip(&degrees) {
            match target.index_of(&v.name) {
                Some(i) => images.push(Some(i)),
                None if d == 0 => images.push(None),
                None => return Err(PolyError::MissingPartner(v.name.clone())),
            }
        }
        self.check_target(target, images.len())?;
        self.map_terms(target, |exps, out| {
            for (j, &e) in exps.iter().enumerate() {
                if let Some(i) = images[j] {
                    out[i] += e;
                }
            }
        })
    }

    fn check_target(&self, target: &Arc<PolyRing>, images: usize) -> Result<(), PolyError> {
        if target.field != self.ring.field {
            return Err(ArithError::FieldMismatch {
                left: self.ring.field.characteristic(),
                right: target.field.characteristic(),
            }
            .into());
        }
        if images != self.ring.nvars() {
            return Err(PolyError::LengthMismatch {
                expected: self.ring.nvars(),
                got: images,
            });
        }
        Ok(())
    }

    fn map_terms(
        &self,
        target: &Arc<PolyRing>,
        mut image: impl FnMut(&[u32], &mut [u32]),
    ) -> Result<Polynomial, PolyError> {
        let n = target.nvars();
        let terms = self.terms.iter().map(|t| {
            let mut exps = vec![0; n];
            image(&t.monomial.exponents, &mut exps);
            Term {
                coeff: t.coeff.clone(),
                monomial: Monomial::new(exps),
            }
        });
        Ok(Polynomial {
            ring: target.clone(),
            terms: normalize_terms(&target.order, terms.collect()),
        })
    }

    fn with_terms(&self, terms: Vec<Term>) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }
}

/// Resolves names to indices in `ring`, failing on the first missing one.
pub fn lookup<'a>(
    ring: &PolyRing,
    names: impl IntoIterator<Item = &'a str>,
) -> Result<Vec<usize>, PolyError> {
    names
        .into_iter()
        .map(|n| {
            ring.index_of(n)
                .ok_or_else(|| PolyError::MissingPartner(n.to_string()))
        })
        .collect()
}

/// Variable images for the scaling substitutions.
///
/// For source variable `j`, `base[j]` is the image of `x_j` itself, `scale[j]`
/// its multiplicative partner `g_j`, and `extra[j]` (when present) a second
/// partner `y_j`. All indices point into `target`.
#[derive(Debug, Clone)]
pub struct PartnerMap {
    target: Arc<PolyRing>,
    base: Vec<usize>,
    scale: Vec<usize>,
    extra: Option<Vec<usize>>,
}

impl PartnerMap {
    /// Resolves partner names against `target`.
    pub fn new(
        target: &Arc<PolyRing>,
        base: &[&str],
        scale: &[&str],
        extra: Option<&[&str]>,
    ) -> Result<Self, PolyError> {
        let base_idx = lookup(target, base.iter().copied())?;
        let scale_idx = lookup(target, scale.iter().copied())?;
        let extra_idx = extra
            .map(|e| lookup(target, e.iter().copied()))
            .transpose()?;
        if scale_idx.len() != base_idx.len() {
            return Err(PolyError::LengthMismatch {
                expected: base_idx.len(),
                got: scale_idx.len(),
            });
        }
        if let Some(e) = &extra_idx {
            if e.len() != base_idx.len() {
                return Err(PolyError::LengthMismatch {
                    expected: base_idx.len(),
                    got: e.len(),
                });
            }
        }
        Ok(PartnerMap {
            target: target.clone(),
            base: base_idx,
            scale: scale_idx,
            extra: extra_idx,
        })
    }

    pub fn target(&self) -> &Arc<PolyRing> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// `f(g_1 x_1, ..., g_n x_n)`, term by term.
pub fn subst_scale(f: &Polynomial, partners: &PartnerMap) -> Result<Polynomial, PolyError> {
    f.check_target(&partners.target, partners.len())?;
    f.map_terms(&partners.target, |exps, out| {
        for (j, &e) in exps.iter().enumerate() {
            out[partners.base[j]] += e;
            out[partners.scale[j]] += e;
        }
    })
}

/// `f(g_1 x_1 y_1, ..., g_n x_n y_n)`; needs the second partner set.
pub fn subst_scale_pair(f: &Polynomial, partners: &PartnerMap) -> Result<Polynomial, PolyError> {
    f.check_target(&partners.target, partners.len())?;
    let extra = partners.extra.as_ref().ok_or_else(|| {
        PolyError::MissingPartner(
            f.ring
                .names()
                .next()
                .unwrap_or("<second partner>")
                .to_string(),
        )
    })?;
    f.map_terms(&partners.target, |exps, out| {
        for (j, &e) in exps.iter().enumerate() {
            out[partners.base[j]] += e;
            out[partners.scale[j]] += e;
            out[extra[j]] += e;
        }
    })
}

/// `x^d f(g_1 / x_1, ..., g_n / x_n)` with `d` the degree vector of `f`.
///
/// Computed as an exponent complement: `c x^e` becomes `c g^e x^(d - e)`, so
/// no rational function is ever formed.
pub fn subst_inverse_cleared(
    f: &Polynomial,
    partners: &PartnerMap,
) -> Result<Polynomial, PolyError> {
    f.check_target(&partners.target, partners.len())?;
    let d = f.degree_vector();
    f.map_terms(&partners.target, |exps, out| {
        for (j, &e) in exps.iter().enumerate() {
            out[partners.scale[j]] += e;
            out[partners.base[j]] += d[j] - e;
        }
    })
}

/// Variables occurring with positive exponent somewhere in `polys`.
///
/// When all polynomials share one ring the result follows that ring's
/// variable order; otherwise names are appended in scan order.
pub fn variables_of(polys: &[Polynomial]) -> Vec<String> {
    let mut found: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for f in polys {
        let d = f.degree_vector();
        for (v, e) in f.ring.variables.iter().zip(d) {
            if e > 0 && seen.insert(v.name.clone()) {
                found.push(v.name.clone());
            }
        }
    }
    if let Some(first) = polys.first() {
        let rank = |name: &String| first.ring.index_of(name).unwrap_or(usize::MAX);
        found.sort_by_key(rank);
    }
    found
}

/// Sorts descending, merges equal monomials and drops zeros.
fn normalize_terms(order: &MonomialOrder, mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| order.cmp(&b.monomial, &a.monomial));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.monomial == t.monomial => last.coeff = &last.coeff + &t.coeff,
            _ => out.push(t),
        }
        if out.last().is_some_and(|l| l.coeff.is_zero()) {
            out.pop();
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}

/// Merges `a + c * m * b` for descending term lists.
///
/// Multiplying by a monomial preserves any admissible order, so the shifted
/// `b` stays sorted and a linear merge suffices.
pub(crate) fn add_scaled(
    order: &MonomialOrder,
    a: &[Term],
    b: &[Term],
    c: &FieldElement,
    shift: Option<&Monomial>,
) -> Vec<Term> {
    if c.is_zero() {
        return a.to_vec();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut bi = b.iter().map(|t| Term {
        coeff: &t.coeff * c,
        monomial: match shift {
            Some(m) => t.monomial.mul(m),
            None => t.monomial.clone(),
        },
    });
    let mut ai = a.iter();
    let mut next_a = ai.next();
    let mut next_b = bi.next();
    loop {
        match (next_a, next_b.take()) {
            (None, None) => break,
            (Some(x), None) => {
                out.push(x.clone());
                out.extend(ai.by_ref().cloned());
                break;
            }
            (None, Some(y)) => {
                out.push(y);
                out.extend(bi.by_ref());
                break;
            }
            (Some(x), Some(y)) => match order.cmp(&x.monomial, &y.monomial) {
                Ordering::Greater => {
                    out.push(x.clone());
                    next_a = ai.next();
                    next_b = Some(y);
                }
                Ordering::Less => {
                    out.push(y);
                    next_b = bi.next();
                }
                Ordering::Equal => {
                    let coeff = &x.coeff + &y.coeff;
                    if !coeff.is_zero() {
                        out.push(Term {
                            coeff,
                            monomial: y.monomial,
                        });
                    }
                    next_a = ai.next();
                    next_b = bi.next();
                }
            },
        }
    }
    out
}

macro_rules! forward_poly_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs)
                    .expect("polynomials from different rings")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_poly_op!(Add, add, try_add);
forward_poly_op!(Sub, sub, try_sub);
forward_poly_op!(Mul, mul, try_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.with_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: -&t.coeff,
                    monomial: t.monomial.clone(),
                })
                .collect(),
        )
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_normalize;
    use crate::parser::parse_polynomial_in;

    fn ring(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(
            names.iter().copied(),
            FieldSpec::RATIONALS,
            OrderKind::Grevlex,
        )
        .unwrap()
    }

    fn p(r: &Arc<PolyRing>, s: &str) -> Polynomial {
        parse_polynomial_in(s, r).unwrap()
    }

    fn q(v: i64) -> FieldElement {
        FieldSpec::RATIONALS.from_i64(v)
    }

    #[test]
    fn addition_examples() {
        let r = ring(&["x", "y"]);
        assert_eq!(&p(&r, "x^2 - 2") + &p(&r, "2"), p(&r, "x^2"));
        assert_eq!(&p(&r, "x^2 - 2") + &Polynomial::zero(&r), p(&r, "x^2 - 2"));
        assert_eq!(&p(&r, "x + y") + &p(&r, "x - y"), p(&r, "2*x"));
        let other = ring(&["x"]);
        assert_eq!(
            p(&r, "x").try_add(&p(&other, "x")),
            Err(PolyError::AmbientMismatch)
        );
    }

    #[test]
    fn multiplication_examples() {
        let r = ring(&["x"]);
        assert_eq!(&p(&r, "x - 1") * &p(&r, "x + 1"), p(&r, "x^2 - 1"));
        assert_eq!(
            &p(&r, "x^3 - 7*x") * &Polynomial::one(&r),
            p(&r, "x^3 - 7*x")
        );
        assert_eq!(&p(&r, "x^2 - 2") * &p(&r, "x^2 + 2"), p(&r, "x^4 - 4"));
        let other = ring(&["y"]);
        assert_eq!(
            p(&r, "x").try_mul(&p(&other, "y")),
            Err(PolyError::AmbientMismatch)
        );
    }

    #[test]
    fn evaluation_examples() {
        let r = ring(&["x1", "x2", "x4"]);
        let p1 = p(&r, "-100000000*x1*x2 - 400*x1 + 21*x4");
        // -100000000 - 400 + 21
        assert_eq!(p1.evaluate(&[q(1), q(1), q(1)]).unwrap(), q(-100_000_379));
        let rx = ring(&["x"]);
        assert_eq!(p(&rx, "x^2 - 2").evaluate(&[q(1)]).unwrap(), q(-1));
        assert_eq!(
            Polynomial::zero(&r).evaluate(&[q(3), q(4), q(5)]).unwrap(),
            q(0)
        );
        assert_eq!(
            p1.evaluate(&[q(1)]),
            Err(PolyError::LengthMismatch {
                expected: 3,
                got: 1
            })
        );
    }

    #[test]
    fn degree_vector_examples() {
        let r = ring(&["x", "y"]);
        assert_eq!(p(&r, "x^2*y + y^3").degree_vector(), vec![2, 3]);
        assert_eq!(p(&r, "5").degree_vector(), vec![0, 0]);
        assert_eq!(Polynomial::zero(&r).degree_vector(), vec![0, 0]);
        let r = ring(&["x1", "x2", "x4"]);
        assert_eq!(p(&r, "4000000*x1*x2 - 3*x4").degree_vector(), vec![1, 1, 1]);
    }

    fn partner_ring(xs: &[&str]) -> (Arc<PolyRing>, Arc<PolyRing>, Vec<String>, Vec<String>) {
        let gs: Vec<String> = xs.iter().map(|x| format!("g_{x}")).collect();
        let ys: Vec<String> = xs.iter().map(|x| format!("y_{x}")).collect();
        let mut all: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
        all.extend(gs.iter().cloned());
        all.extend(ys.iter().cloned());
        (
            ring(xs),
            ring(&all.iter().map(String::as_str).collect::<Vec<_>>()),
            gs,
            ys,
        )
    }

    fn pm(target: &Arc<PolyRing>, xs: &[&str], gs: &[String], ys: Option<&[String]>) -> PartnerMap {
        let gs: Vec<&str> = gs.iter().map(String::as_str).collect();
        let ys: Option<Vec<&str>> = ys.map(|v| v.iter().map(String::as_str).collect());
        PartnerMap::new(target, xs, &gs, ys.as_deref()).unwrap()
    }

    #[test]
    fn scaling_substitutions() {
        let (src, tgt, gs, ys) = partner_ring(&["x", "y"]);
        let m = pm(&tgt, &["x", "y"], &gs, Some(&ys));
        assert_eq!(
            subst_scale(&p(&src, "x^2 - 2"), &m).unwrap(),
            p(&tgt, "g_x^2*x^2 - 2")
        );
        assert_eq!(subst_scale(&p(&src, "7"), &m).unwrap(), p(&tgt, "7"));
        assert_eq!(
            subst_scale(&p(&src, "x*y"), &m).unwrap(),
            p(&tgt, "g_x*g_y*x*y")
        );
        assert_eq!(
            subst_scale_pair(&p(&src, "x^2 - 2"), &m).unwrap(),
            p(&tgt, "g_x^2*x^2*y_x^2 - 2")
        );
        assert_eq!(subst_scale_pair(&p(&src, "7"), &m).unwrap(), p(&tgt, "7"));
        assert_eq!(
            subst_scale_pair(&p(&src, "x*y"), &m).unwrap(),
            p(&tgt, "g_x*g_y*x*y*y_x*y_y")
        );
        let no_pair = pm(&tgt, &["x", "y"], &gs, None);
        assert!(matches!(
            subst_scale_pair(&p(&src, "x"), &no_pair),
            Err(PolyError::MissingPartner(_))
        ));
    }

    #[test]
    fn missing_partner_is_reported() {
        let (_, tgt, _, _) = partner_ring(&["x"]);
        let err = PartnerMap::new(&tgt, &["x"], &["h_x"], None).unwrap_err();
        assert_eq!(err, PolyError::MissingPartner("h_x".into()));
    }

    #[test]
    fn inverse_cleared_examples() {
        let (src, tgt, gs, _) = partner_ring(&["x"]);
        let m = pm(&tgt, &["x"], &gs, None);
        assert_eq!(
            subst_inverse_cleared(&p(&src, "x^2 - 2"), &m).unwrap(),
            p(&tgt, "g_x^2 - 2*x^2")
        );
        assert_eq!(
            subst_inverse_cleared(&p(&src, "5*x"), &m).unwrap(),
            p(&tgt, "5*g_x")
        );

        let names = ["x1", "x2", "x4"];
        let (src, tgt, gs, _) = partner_ring(&names);
        let m = pm(&tgt, &names, &gs, None);
        let p4 = p(&src, "4000000*x1*x2 - 3*x4");
        assert_eq!(
            subst_inverse_cleared(&p4, &m).unwrap(),
            p(&tgt, "4000000*g_x1*g_x2*x4 - 3*g_x4*x1*x2")
        );
    }

    #[test]
    fn variables_of_examples() {
        let r = ring(&["x1", "x2", "x3", "x4"]);
        let sys: Vec<_> = [
            "-100000000*x1*x2 - 400*x1 + 21*x4",
            "-100000000*x1*x2 + 400*x1 + 129*x4",
            "200*x1 + 27*x4",
            "4000000*x1*x2 - 3*x4",
        ]
        .iter()
        .map(|s| p(&r, s))
        .collect();
        assert_eq!(variables_of(&sys), vec!["x1", "x2", "x4"]);
        let rx = ring(&["x"]);
        assert_eq!(variables_of(&[p(&rx, "x^2 - 2")]), vec!["x"]);
        assert!(variables_of(&[p(&rx, "5")]).is_empty());
        assert!(variables_of(&[]).is_empty());
    }

    #[test]
    fn canonicalize_examples() {
        let r = ring(&["x", "y"]);
        let f = Polynomial::from_terms(
            &r,
            [(q(0), Monomial::new(vec![1, 0])), (q(3), Monomial::one(2))],
        )
        .unwrap();
        assert_eq!(f, p(&r, "3"));
        let f = Polynomial::from_terms(
            &r,
            [
                (q(1), Monomial::new(vec![1, 0])),
                (q(1), Monomial::new(vec![1, 0])),
            ],
        )
        .unwrap();
        assert_eq!(f, p(&r, "2*x"));
        let lex = MonomialOrder::natural(OrderKind::Lex, 2);
        let f = p(&r, "y + x").canonicalize(&lex).unwrap();
        assert_eq!(f.terms()[0].monomial, Monomial::new(vec![1, 0]));
        assert_eq!(f.ring().order(), &lex);
    }

    #[test]
    fn grevlex_and_lex_compare_as_defined() {
        let grevlex = MonomialOrder::natural(OrderKind::Grevlex, 3);
        let lex = MonomialOrder::natural(OrderKind::Lex, 3);
        let m = |v: [u32; 3]| Monomial::new(v.to_vec());
        // x*y^2 vs x^2: degree 3 beats 2
        assert_eq!(grevlex.cmp(&m([1, 2, 0]), &m([2, 0, 0])), Ordering::Greater);
        assert_eq!(lex.cmp(&m([1, 2, 0]), &m([2, 0, 0])), Ordering::Less);
        // x*z vs y^2: same degree, x*z has the larger z exponent so it is smaller
        assert_eq!(grevlex.cmp(&m([1, 0, 1]), &m([0, 2, 0])), Ordering::Less);
        // reversed ranking z > y > x
        let rev = MonomialOrder::new(OrderKind::Lex, vec![2, 1, 0]).unwrap();
        assert_eq!(rev.cmp(&m([1, 0, 0]), &m([0, 0, 1])), Ordering::Less);
        assert_eq!(
            MonomialOrder::new(OrderKind::Lex, vec![0, 0, 1]),
            Err(PolyError::BadRanking)
        );
    }

    #[test]
    fn duplicate_variables_rejected() {
        let err = PolyRing::new(["x", "x"], FieldSpec::RATIONALS, OrderKind::Lex).unwrap_err();
        assert_eq!(err, PolyError::DuplicateVariable("x".into()));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let r = ring(&["x", "y"]);
        let f = p(&r, "x - 2*y + 1");
        let mut acc = Polynomial::one(&r);
        for k in 0..6 {
            assert_eq!(f.pow(k), acc);
            acc = &acc * &f;
        }
    }

    #[test]
    fn rational_coefficients_survive_monic() {
        let r = ring(&["x"]);
        let f = p(&r, "3*x + 1").monic();
        let third = FieldElement::Rational(rat_normalize(1.into(), 3.into()).unwrap());
        assert_eq!(f.terms()[1].coeff, third);
    }
}
