//! Group and coset tests for the torus part `V(F)*` of a variety.
//!
//! Four universal statements about `F` are decided over the algebraic closure
//! of the coefficient field, each by radical membership:
//!
//! * iota: `V(F)*` is closed under division relative to a base point `g`;
//! * mu: closed under multiplication relative to `g`;
//! * eta: `V(F)*` is empty;
//! * gamma: `(1, ..., 1)` lies on `V(F)`.
//!
//! `V(F)*` is a coset iff iota, mu and not eta hold, and a group iff iota, mu
//! and gamma hold.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::arith::FieldSpec;
use crate::budget::Budget;
use crate::poly::{
    subst_inverse_cleared, subst_scale, subst_scale_pair, variables_of, MonomialOrder, OrderKind,
    PartnerMap, PolyError, PolyRing, Polynomial,
};
use crate::radical::{radical_membership, RadicalQuery, TestOutcome, TestStatus};

/// The input system: non-zero polynomials over exactly the variables that occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    ring: Arc<PolyRing>,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    /// Drops zero polynomials and shrinks the ring to the occurring variables,
    /// keeping their relative order.
    pub fn new(ring: &Arc<PolyRing>, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        let mut kept = Vec::with_capacity(polys.len());
        for f in polys {
            if *f.ring() != *ring {
                return Err(PolyError::AmbientMismatch);
            }
            if !f.is_zero() {
                kept.push(f);
            }
        }
        let names = variables_of(&kept);
        let shrunk = PolyRing::new(names, ring.field(), ring.order().kind())?;
        let polys = kept
            .iter()
            .map(|f| f.embed(&shrunk))
            .collect::<Result<_, _>>()?;
        Ok(PolySystem {
            ring: shrunk,
            polys,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn field(&self) -> FieldSpec {
        self.ring.field()
    }

    pub fn m(&self) -> usize {
        self.polys.len()
    }

    pub fn n(&self) -> usize {
        self.ring.nvars()
    }

    pub fn variable_names(&self) -> Vec<&str> {
        self.ring.names().collect()
    }

    /// The same system with terms sorted under another order kind.
    pub fn with_order(&self, kind: OrderKind) -> PolySystem {
        if self.ring.order().kind() == kind {
            return self.clone();
        }
        let order = MonomialOrder::natural(kind, self.n());
        let ring = self
            .ring
            .with_order(order.clone())
            .expect("ranking length matches");
        let polys = self.polys.iter().map(|f| f.reorder_into(&ring)).collect();
        PolySystem { ring, polys }
    }
}

/// Fresh names for the base point `g`, the second point `y` and the
/// auxiliary radical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerContext {
    pub originals: Vec<String>,
    pub g: Vec<String>,
    pub y: Vec<String>,
    pub aux: String,
}

/// Names partners by position: `g<i>_`, `y<i>_` and `t_`, each extended
/// with underscores until it is unused.
pub fn make_partners(system: &PolySystem) -> PartnerContext {
    let originals: Vec<String> = system.ring.names().map(str::to_string).collect();
    let mut taken: HashSet<String> = originals.iter().cloned().collect();
    let mut fresh = |base: String| {
        let mut name = base;
        while taken.contains(&name) {
            name.push('_');
        }
        taken.insert(name.clone());
        name
    };
    let n = originals.len();
    let g = (1..=n).map(|i| fresh(format!("g{i}_"))).collect();
    let y = (1..=n).map(|i| fresh(format!("y{i}_"))).collect();
    let aux = fresh("t_".to_string());
    PartnerContext {
        originals,
        g,
        y,
        aux,
    }
}

/// Radical-membership instance: every candidate must lie in the radical of
/// the generators' ideal.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ring: Arc<PolyRing>,
    pub aux: usize,
    pub generators: Vec<Polynomial>,
    pub candidates: Vec<Polynomial>,
}

impl PartnerContext {
    /// Originals first, then `g`, then `y` if requested, then the auxiliary
    /// variable lowest.
    fn ring(&self, system: &PolySystem, with_g: bool, with_y: bool) -> Arc<PolyRing> {
        let mut names = self.originals.clone();
        if with_g {
            names.extend(self.g.iter().cloned());
        }
        if with_y {
            names.extend(self.y.iter().cloned());
        }
        names.push(self.aux.clone());
        PolyRing::new(names, system.field(), system.ring.order().kind())
            .expect("partner names are fresh")
    }

    fn map(&self, ring: &Arc<PolyRing>, base: &[String], extra: Option<&[String]>) -> PartnerMap {
        let base: Vec<&str> = base.iter().map(String::as_str).collect();
        let g: Vec<&str> = self.g.iter().map(String::as_str).collect();
        let extra: Option<Vec<&str>> = extra.map(|e| e.iter().map(String::as_str).collect());
        PartnerMap::new(ring, &base, &g, extra.as_deref())
            .expect("partners live in the instance ring")
    }
}

fn product_of(ring: &Arc<PolyRing>, names: &[&[String]]) -> Polynomial {
    let mut p = Polynomial::one(ring);
    for group in names {
        for name in group.iter() {
            let v = ring.index_of(name).expect("name in ring");
            p = &p * &Polynomial::variable(ring, v);
        }
    }
    p
}

fn rename_to(f: &Polynomial, ring: &Arc<PolyRing>, names: &[String]) -> Polynomial {
    let images: Vec<usize> = names
        .iter()
        .map(|n| ring.index_of(n).expect("name in ring"))
        .collect();
    f.rename_into(ring, &images).expect("image count matches")
}

/// Generators `f_i(g), f_i(g x)`; candidates `x^d_k f_k(g / x) * prod g_j x_j`.
pub fn iota_instance(system: &PolySystem, partners: &PartnerContext) -> Instance {
    let ring = partners.ring(system, true, false);
    let scale = partners.map(&ring, &partners.originals, None);
    let mut generators = Vec::with_capacity(2 * system.m());
    for f in &system.polys {
        generators.push(rename_to(f, &ring, &partners.g));
    }
    for f in &system.polys {
        generators.push(subst_scale(f, &scale).expect("partner map fits"));
    }
    let cofactor = product_of(&ring, &[&partners.g, &partners.originals]);
    let candidates = system
        .polys
        .iter()
        .map(|f| &subst_inverse_cleared(f, &scale).expect("partner map fits") * &cofactor)
        .collect();
    Instance {
        aux: ring.nvars() - 1,
        ring,
        generators,
        candidates,
    }
}

/// Generators `f_i(g), f_i(g x), f_i(g y)`; candidates `f_k(g x y) * prod g_j x_j y_j`.
pub fn mu_instance(system: &PolySystem, partners: &PartnerContext) -> Instance {
    let ring = partners.ring(system, true, true);
    let by_x = partners.map(&ring, &partners.originals, Some(&partners.y));
    let by_y = partners.map(&ring, &partners.y, None);
    let mut generators = Vec::with_capacity(3 * system.m());
    for f in &system.polys {
        generators.push(rename_to(f, &ring, &partners.g));
    }
    for f in &system.polys {
        generators.push(subst_scale(f, &by_x).expect("partner map fits"));
    }
    for f in &system.polys {
        generators.push(subst_scale(f, &by_y).expect("partner map fits"));
    }
    let cofactor = product_of(&ring, &[&partners.g, &partners.originals, &partners.y]);
    let candidates = system
        .polys
        .iter()
        .map(|f| &subst_scale_pair(f, &by_x).expect("partner map fits") * &cofactor)
        .collect();
    Instance {
        aux: ring.nvars() - 1,
        ring,
        generators,
        candidates,
    }
}

/// Generators `F`; the single candidate `prod x_j`.
pub fn eta_instance(system: &PolySystem, partners: &PartnerContext) -> Instance {
    let ring = partners.ring(system, false, false);
    let generators = system
        .polys
        .iter()
        .map(|f| rename_to(f, &ring, &partners.originals))
        .collect();
    let candidates = vec![product_of(&ring, &[&partners.originals])];
    Instance {
        aux: ring.nvars() - 1,
        ring,
        generators,
        candidates,
    }
}

/// All candidates in the radical? Stops at the first `false`.
pub fn decide_instance(instance: &Instance, budget: &Budget) -> TestOutcome {
    let start = Instant::now();
    let mut status = TestStatus::True;
    for c in &instance.candidates {
        let q = RadicalQuery {
            candidate: c,
            generators: &instance.generators,
            aux: instance.aux,
            budget,
        };
        let out = radical_membership(&q).expect("instance is well-formed");
        match out.status {
            TestStatus::True => continue,
            other => {
                status = other;
                break;
            }
        }
    }
    TestOutcome::new(status, start.elapsed())
}

pub fn test_iota(system: &PolySystem, partners: &PartnerContext, budget: &Budget) -> TestOutcome {
    let start = Instant::now();
    let out = decide_instance(&iota_instance(system, partners), budget);
    TestOutcome::new(out.status, start.elapsed())
}

pub fn test_mu(system: &PolySystem, partners: &PartnerContext, budget: &Budget) -> TestOutcome {
    let start = Instant::now();
    let out = decide_instance(&mu_instance(system, partners), budget);
    TestOutcome::new(out.status, start.elapsed())
}

/// True iff `V(F)*` is empty over the algebraic closure.
pub fn test_eta(system: &PolySystem, budget: &Budget) -> TestOutcome {
    let start = Instant::now();
    let partners = make_partners(system);
    let out = decide_instance(&eta_instance(system, &partners), budget);
    TestOutcome::new(out.status, start.elapsed())
}

/// True iff every `f_k(1, ..., 1) = 0`; plain evaluation, no basis needed.
pub fn test_gamma(system: &PolySystem) -> TestOutcome {
    let start = Instant::now();
    let ones = vec![system.field().one(); system.n()];
    let holds = system
        .polys
        .iter()
        .all(|f| f.evaluate(&ones).expect("point length").is_zero());
    TestOutcome::new(TestStatus::from_bool(holds), start.elapsed())
}

/// Three-valued verdict; `Unknown` when a deciding test timed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        }
    }

    fn from_status(s: TestStatus) -> Self {
        match s.as_bool() {
            Some(true) => Verdict::True,
            Some(false) => Verdict::False,
            None => Verdict::Unknown,
        }
    }

    fn not(self) -> Self {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    /// Kleene conjunction: any `False` decides.
    fn all(items: &[Verdict]) -> Self {
        if items.contains(&Verdict::False) {
            Verdict::False
        } else if items.contains(&Verdict::Unknown) {
            Verdict::Unknown
        } else {
            Verdict::True
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub order: OrderKind,
    /// Per-test wall-clock limit.
    pub test_timeout: Option<Duration>,
    /// Limit for all four tests together.
    pub model_timeout: Option<Duration>,
    /// Skip the remaining tests once iota or mu is false.
    pub fail_fast: bool,
    /// Run the four tests on separate threads. Fail-fast is ignored then.
    pub concurrent: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            order: OrderKind::Grevlex,
            test_timeout: None,
            model_timeout: None,
            fail_fast: false,
            concurrent: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricityReport {
    pub m: usize,
    pub n: usize,
    /// Verdicts hold over the algebraic closure of this field.
    pub field: FieldSpec,
    pub iota: TestOutcome,
    pub mu: TestOutcome,
    pub eta: TestOutcome,
    pub gamma: TestOutcome,
    pub coset: Verdict,
    pub group: Verdict,
    pub elapsed: Duration,
}

impl ToricityReport {
    /// Human-readable field of validity.
    pub fn valid_over(&self) -> String {
        match self.field.characteristic() {
            0 => "algebraic closure of Q".to_string(),
            p => format!("algebraic closure of F_{p}"),
        }
    }

    pub fn any_timeout(&self) -> bool {
        [self.iota, self.mu, self.eta, self.gamma]
            .iter()
            .any(|o| o.status == TestStatus::Timeout)
    }
}

fn combine(
    iota: TestStatus,
    mu: TestStatus,
    eta: TestStatus,
    gamma: TestStatus,
) -> (Verdict, Verdict) {
    let (i, m) = (Verdict::from_status(iota), Verdict::from_status(mu));
    // (1, ..., 1) in V(F) is a torus point, so gamma settles eta when eta did not finish
    let eta = match (eta.as_bool(), gamma) {
        (None, TestStatus::True) => Verdict::False,
        _ => Verdict::from_status(eta),
    };
    let coset = Verdict::all(&[i, m, eta.not()]);
    let group = Verdict::all(&[i, m, Verdict::from_status(gamma)]);
    (coset, group)
}

fn skipped() -> TestOutcome {
    TestOutcome::new(TestStatus::Skipped, Duration::ZERO)
}

/// Runs all four tests and combines them into coset and group verdicts.
pub fn classify(system: &PolySystem, config: &ClassifyConfig) -> ToricityReport {
    let start = Instant::now();
    let system = system.with_order(config.order);
    let partners = make_partners(&system);
    let model_budget = Budget::unlimited().narrowed(config.model_timeout);
    let budget = || model_budget.narrowed(config.test_timeout);
    let guarded = |run: &dyn Fn(&Budget) -> TestOutcome| {
        let b = budget();
        if b.exhausted() {
            TestOutcome::new(TestStatus::Timeout, Duration::ZERO)
        } else {
            run(&b)
        }
    };

    let (iota, mu, eta, gamma) = if config.concurrent {
        std::thread::scope(|s| {
            let iota = s.spawn(|| guarded(&|b| test_iota(&system, &partners, b)));
            let mu = s.spawn(|| guarded(&|b| test_mu(&system, &partners, b)));
            let eta = s.spawn(|| guarded(&|b| test_eta(&system, b)));
            let gamma = test_gamma(&system);
            (
                iota.join().unwrap(),
                mu.join().unwrap(),
                eta.join().unwrap(),
                gamma,
            )
        })
    } else {
        let iota = guarded(&|b| test_iota(&system, &partners, b));
        if config.fail_fast && iota.status == TestStatus::False {
            (iota, skipped(), skipped(), skipped())
        } else {
            let mu = guarded(&|b| test_mu(&system, &partners, b));
            if config.fail_fast && mu.status == TestStatus::False {
                (iota, mu, skipped(), skipped())
            } else {
                let eta = guarded(&|b| test_eta(&system, b));
                (iota, mu, eta, test_gamma(&system))
            }
        }
    };

    let (coset, group) = combine(iota.status, mu.status, eta.status, gamma.status);
    ToricityReport {
        m: system.m(),
        n: system.n(),
        field: system.field(),
        iota,
        mu,
        eta,
        gamma,
        coset,
        group,
        elapsed: start.elapsed(),
    }
}
