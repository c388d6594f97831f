//! The vertex-algebra abstraction — a degree-indexed basis enumerator plus
//! a mode-action oracle with grading guarantees — and the axiom checkers:
//! truncation, vacuum/creation, skew-symmetry, translation properties,
//! weak commutativity/associativity, the Jacobi identity, conformal
//! (Virasoro) structure, and module axioms.
//!
//! Axiom checking is sample-based over the full enumerated basis up to a
//! degree cutoff: every identity involved is multilinear, so verifying it
//! on basis tuples at each degree suffices. Jacobi-type identities are
//! decomposed into their killed-pair form (see [`crate::series`]); a pass
//! is exact on the certified window, and for candidate structures that are
//! not known vertex algebras the report explicitly labels the verdict as
//! window-level evidence.

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::report::{CheckReport, Counterexample, Verdict};
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::series::{
    compose_window, compose_window_swapped, find_kill_witness, iterate_window, substitute_shift,
    BinomSign, Domain2, ModeAction, SeriesWindow,
};
use crate::vector::GradedVector;

/// Which family of axioms a structure claims to satisfy.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StructureKind {
    VertexAlgebra,
    VertexOperatorAlgebra,
    VertexLeibniz,
    VertexWithoutVacuum,
    FieldLeibniz,
}

impl StructureKind {
    pub fn has_vacuum(self) -> bool {
        matches!(
            self,
            StructureKind::VertexAlgebra | StructureKind::VertexOperatorAlgebra
        )
    }
}

type BasisFn = dyn Fn(i64) -> Vec<BasisKey> + Send + Sync;
type OracleFn = dyn Fn(&BasisKey, i64, &BasisKey) -> Result<GradedVector> + Send + Sync;
type SupportFn = dyn Fn(&BasisKey, &BasisKey) -> i64 + Send + Sync;

/// An algebra presentation: basis enumeration per degree and a mode-action
/// oracle `(a, m, b) -> a_m b` on basis indices, extended bilinearly.
///
/// Every oracle call is checked against the grading law
/// `wt(a_m b) = wt(a) - m - 1 + wt(b)` and memoized behind a synchronized
/// cache whose presence never changes results.
#[derive(Clone)]
pub struct VertexAlgebraSpec {
    pub name: String,
    pub kind: StructureKind,
    basis: Arc<BasisFn>,
    /// Lowest degree with nonzero basis, when the grading is bounded
    /// below. `None` for the filtration-style algebras whose weights run
    /// downward (single-variable commutative algebras).
    pub degree_floor: Option<i64>,
    oracle: Arc<OracleFn>,
    support: Arc<SupportFn>,
    pub vacuum: Option<BasisKey>,
    pub translation: Option<LinearRule>,
    pub virasoro: Option<GradedVector>,
    cache: Arc<DashMap<(BasisKey, i64, BasisKey), GradedVector>>,
    /// Enforce the grading law on every oracle call. Off for derived
    /// structures built from operators that shift degrees.
    check_grading: bool,
}

impl VertexAlgebraSpec {
    pub fn new(
        name: impl Into<String>,
        kind: StructureKind,
        basis: impl Fn(i64) -> Vec<BasisKey> + Send + Sync + 'static,
        oracle: impl Fn(&BasisKey, i64, &BasisKey) -> Result<GradedVector> + Send + Sync + 'static,
        support: impl Fn(&BasisKey, &BasisKey) -> i64 + Send + Sync + 'static,
    ) -> Self {
        VertexAlgebraSpec {
            name: name.into(),
            kind,
            basis: Arc::new(basis),
            degree_floor: None,
            oracle: Arc::new(oracle),
            support: Arc::new(support),
            vacuum: None,
            translation: None,
            virasoro: None,
            cache: Arc::new(DashMap::new()),
            check_grading: true,
        }
    }

    pub fn without_grading_check(mut self) -> Self {
        self.check_grading = false;
        self
    }

    pub fn with_degree_floor(mut self, floor: i64) -> Self {
        self.degree_floor = Some(floor);
        self
    }

    pub fn with_vacuum(mut self, v: BasisKey) -> Self {
        self.vacuum = Some(v);
        self
    }

    pub fn with_translation(mut self, d: LinearRule) -> Self {
        self.translation = Some(d);
        self
    }

    pub fn with_virasoro(mut self, omega: GradedVector) -> Self {
        self.virasoro = Some(omega);
        self
    }

    pub fn vacuum_vector(&self) -> GradedVector {
        GradedVector::basis(self.vacuum.clone().expect("structure has no vacuum"))
    }

    pub fn basis_at(&self, degree: i64) -> Vec<BasisKey> {
        (self.basis)(degree)
    }

    /// All basis indices with |degree| up to the cutoff: degrees
    /// `floor..=cutoff` for weight-graded algebras, `-cutoff..=0` for the
    /// filtration-style ones.
    pub fn basis_up_to(&self, cutoff: i64) -> Vec<BasisKey> {
        let range: Vec<i64> = match self.degree_floor {
            Some(f) => (f..=cutoff).collect(),
            None => (-cutoff..=0).collect(),
        };
        range.into_iter().flat_map(|d| self.basis_at(d)).collect()
    }

    /// Mode action on basis indices, through the cache and the grading
    /// check.
    pub fn mode_basis(&self, a: &BasisKey, m: i64, b: &BasisKey) -> Result<GradedVector> {
        let key = (a.clone(), m, b.clone());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let out = (self.oracle)(a, m, b)?;
        if self.check_grading {
            let expect = a.weight() - m - 1 + b.weight();
            if !out.is_homogeneous_of(expect) {
                return Err(CoreError::Grading {
                    detail: format!(
                        "({a})_{{{m}}}({b}) = {out} is not homogeneous of weight {expect}"
                    ),
                });
            }
        }
        self.cache.insert(key, out.clone());
        Ok(out)
    }

    /// Bilinear extension of the oracle.
    pub fn mode(&self, a: &GradedVector, m: i64, b: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (ka, ca) in a.iter() {
            for (kb, cb) in b.iter() {
                out.add_scaled(&self.mode_basis(ka, m, kb)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn support_keys(&self, a: &BasisKey, b: &BasisKey) -> i64 {
        (self.support)(a, b)
    }

    pub fn support_vec(&self, a: &GradedVector, b: &GradedVector) -> i64 {
        let mut bound = 0;
        for (ka, _) in a.iter() {
            for (kb, _) in b.iter() {
                bound = bound.max((self.support)(ka, kb));
            }
        }
        bound
    }

    /// The translation operator computed from the algebra itself:
    /// `a -> a_{-2} vacuum`.
    pub fn translation_from_modes(&self, a: &GradedVector) -> Result<GradedVector> {
        self.mode(a, -2, &self.vacuum_vector())
    }
}

impl ModeAction for VertexAlgebraSpec {
    fn apply(&self, a: &GradedVector, m: i64, b: &GradedVector) -> Result<GradedVector> {
        self.mode(a, m, b)
    }

    fn support(&self, a: &GradedVector, b: &GradedVector) -> i64 {
        self.support_vec(a, b)
    }
}

/// Default witness budget for a pair: generous enough to cover the
/// locality order of genuine structures and the derived ones.
pub fn default_kmax(a: &GradedVector, b: &GradedVector) -> i64 {
    let wa = a.weights().last().copied().unwrap_or(0).max(0);
    let wb = b.weights().last().copied().unwrap_or(0).max(0);
    2 * (wa + wb) + 4
}

/// The series `Y(a, z) b` on exponents `..=hi`; the low edge and the
/// exactness flag come from the truncation bound.
pub fn vertex_series(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    hi: i64,
) -> Result<SeriesWindow> {
    SeriesWindow::expand(spec, a, b, hi)
}

fn subject3(a: &GradedVector, b: &GradedVector, c: &GradedVector) -> String {
    format!("({a}; {b}; {c})")
}

fn subject2(a: &GradedVector, b: &GradedVector) -> String {
    format!("({a}; {b})")
}

// ---------------------------------------------------------------------------
// Killed-pair checks, generic over the six mode maps involved
// ---------------------------------------------------------------------------

/// Mode maps of a Jacobi-type identity:
///
/// ```text
/// A(z1,z2) = f1(a,z1) f2(b,z2) c      (operators composed left to right)
/// B(z1,z2) = g1(b,z2) g2(a,z1) c
/// C(z0,z2) = h1(h2(a,z0)b, z2) c
/// ```
pub struct JacobiMaps<'a> {
    pub f1: &'a dyn ModeAction,
    pub f2: &'a dyn ModeAction,
    pub g1: &'a dyn ModeAction,
    pub g2: &'a dyn ModeAction,
    pub h1: &'a dyn ModeAction,
    pub h2: &'a dyn ModeAction,
}

impl<'a> JacobiMaps<'a> {
    /// All six maps equal: the ordinary Jacobi identity of one vertex
    /// operator.
    pub fn uniform(y: &'a dyn ModeAction) -> Self {
        JacobiMaps {
            f1: y,
            f2: y,
            g1: y,
            g2: y,
            h1: y,
            h2: y,
        }
    }
}

/// Searches the least `k ≤ kmax` with
/// `(z1-z2)^k F1(a,z1)F2(b,z2)c = (z1-z2)^k G1(b,z2)G2(a,z1)c` on the
/// window of height `h`.
pub fn commutativity_witness(
    f1: &dyn ModeAction,
    f2: &dyn ModeAction,
    g1: &dyn ModeAction,
    g2: &dyn ModeAction,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> Result<(Option<i64>, Option<Counterexample>, String)> {
    let dom = Domain2::heights(h, h);
    let lhs = compose_window(f1, a, f2, b, c, dom)?;
    let rhs = compose_window_swapped(g1, b, g2, a, c, dom)?;
    let search = find_kill_witness(&lhs.sub(&rhs), BinomSign::Minus, kmax, ("z1", "z2"));
    Ok((search.witness, search.counterexample, search.window))
}

/// Searches the least `l ≤ kmax` with
/// `(z0+z2)^l F1(a,z0+z2)F2(b,z2)c = (z0+z2)^l H1(H2(a,z0)b,z2)c`.
pub fn associativity_witness(
    f1: &dyn ModeAction,
    f2: &dyn ModeAction,
    h1: &dyn ModeAction,
    h2: &dyn ModeAction,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> Result<(Option<i64>, Option<Counterexample>, String)> {
    let dom = Domain2::heights(h, h);
    let inner = SeriesWindow::expand(f2, b, c, h)?;
    let shifted = substitute_shift(f1, a, &inner, dom)?;
    let iter = iterate_window(h2, h1, a, b, c, dom)?;
    let search = find_kill_witness(&shifted.sub(&iter), BinomSign::Plus, kmax, ("z0", "z2"));
    Ok((search.witness, search.counterexample, search.window))
}

/// Verifies a Jacobi-type identity through its equivalent killed pair and
/// reports the minimal `(k, l)` found.
pub fn jacobi_pair(
    identity: &str,
    maps: &JacobiMaps,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> CheckReport {
    let subject = subject3(a, b, c);
    let comm = commutativity_witness(maps.f1, maps.f2, maps.g1, maps.g2, a, b, c, h, kmax);
    let assoc = associativity_witness(maps.f1, maps.f2, maps.h1, maps.h2, a, b, c, h, kmax);
    match (comm, assoc) {
        (Ok((Some(k), _, win)), Ok((Some(l), _, _))) => CheckReport::pass(identity, subject)
            .with_window(win)
            .with_witness_k(k)
            .with_witness_l(l),
        (Ok((None, cex, win)), _) => {
            let mut r = CheckReport::new(identity, subject).with_window(win);
            r.verdict = Verdict::Fail;
            r.counterexample = cex;
            r.notes
                .push(format!("no commutativity witness k <= {kmax}"));
            r
        }
        (_, Ok((None, cex, win))) => {
            let mut r = CheckReport::new(identity, subject).with_window(win);
            r.verdict = Verdict::Fail;
            r.counterexample = cex;
            r.notes
                .push(format!("no associativity witness l <= {kmax}"));
            r
        }
        (Err(e), _) | (_, Err(e)) => CheckReport::from_error(identity, subject3(a, b, c), &e),
    }
}

// ---------------------------------------------------------------------------
// Named axiom checks
// ---------------------------------------------------------------------------

/// Weak commutativity `(z1-z2)^k Y(a,z1)Y(b,z2)c = (z1-z2)^k Y(b,z2)Y(a,z1)c`.
pub fn check_weak_commutativity(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> CheckReport {
    match commutativity_witness(spec, spec, spec, spec, a, b, c, h, kmax) {
        Ok((Some(k), _, win)) => CheckReport::pass("weak-commutativity", subject3(a, b, c))
            .with_window(win)
            .with_witness_k(k),
        Ok((None, cex, win)) => {
            let mut r =
                CheckReport::new("weak-commutativity", subject3(a, b, c)).with_window(win);
            r.verdict = Verdict::Fail;
            r.counterexample = cex;
            r.notes.push(format!("no witness k <= {kmax}"));
            r
        }
        Err(e) => CheckReport::from_error("weak-commutativity", subject3(a, b, c), &e),
    }
}

/// Weak associativity
/// `(z0+z2)^k Y(Y(a,z0)b,z2)c = (z0+z2)^k Y(a,z0+z2)Y(b,z2)c`.
pub fn check_weak_associativity(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> CheckReport {
    match associativity_witness(spec, spec, spec, spec, a, b, c, h, kmax) {
        Ok((Some(l), _, win)) => CheckReport::pass("weak-associativity", subject3(a, b, c))
            .with_window(win)
            .with_witness_l(l),
        Ok((None, cex, win)) => {
            let mut r =
                CheckReport::new("weak-associativity", subject3(a, b, c)).with_window(win);
            r.verdict = Verdict::Fail;
            r.counterexample = cex;
            r.notes.push(format!("no witness l <= {kmax}"));
            r
        }
        Err(e) => CheckReport::from_error("weak-associativity", subject3(a, b, c), &e),
    }
}

/// The full Jacobi identity of `Y`, through the killed pair.
pub fn check_jacobi(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    h: i64,
    kmax: i64,
) -> CheckReport {
    jacobi_pair("jacobi", &JacobiMaps::uniform(spec), a, b, c, h, kmax)
}

/// Skew-symmetry `Y(a,z)b = e^{zD} Y(b,-z)a`, coefficient-exact up to
/// exponent `hi`.
pub fn check_skew_symmetry(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    hi: i64,
) -> CheckReport {
    let subject = subject2(a, b);
    let Some(d) = &spec.translation else {
        return CheckReport::from_error(
            "skew-symmetry",
            subject,
            &CoreError::Window {
                detail: "no translation operator declared".into(),
            },
        );
    };
    let run = || -> Result<Option<Counterexample>> {
        let lhs = vertex_series(spec, a, b, hi)?;
        let rhs = vertex_series(spec, b, a, hi)?.negate_var().exp_d(d)?;
        Ok(lhs.first_difference(&rhs))
    };
    match run() {
        Ok(None) => {
            CheckReport::pass("skew-symmetry", subject).with_window(format!("z^..{hi}"))
        }
        Ok(Some(cex)) => CheckReport::fail("skew-symmetry", subject, cex),
        Err(e) => CheckReport::from_error("skew-symmetry", subject2(a, b), &e),
    }
}

/// Applies a rule to every coefficient of a series window.
fn map_coeffs(w: &SeriesWindow, f: impl Fn(&GradedVector) -> Result<GradedVector>) -> Result<SeriesWindow> {
    let mut coeffs = BTreeMap::new();
    for (e, v) in w.iter() {
        let out = f(v)?;
        if !out.is_zero() {
            coeffs.insert(*e, out);
        }
    }
    Ok(SeriesWindow::from_coeffs(w.lo, w.hi, coeffs, w.exact_below))
}

/// Both translation properties: `Y(Da,z) = d/dz Y(a,z)` and
/// `[D, Y(a,z)] = d/dz Y(a,z)`, verified coefficient-wise on the pair.
pub fn check_translation_properties(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    hi: i64,
) -> CheckReport {
    let subject = subject2(a, b);
    let Some(d) = &spec.translation else {
        return CheckReport::from_error(
            "translation-properties",
            subject,
            &CoreError::Window {
                detail: "no translation operator declared".into(),
            },
        );
    };
    let run = || -> Result<(Option<Counterexample>, Option<Counterexample>)> {
        let base = vertex_series(spec, a, b, hi)?;
        let ddz = base.d_dz();
        // Derivative property.
        let da = d.apply(a)?;
        let lhs1 = vertex_series(spec, &da, b, hi - 1)?;
        let diff1 = lhs1.first_difference(&ddz);
        // Bracket derivative property: D(Y(a,z)b) - Y(a,z)(Db) = d/dz Y(a,z)b.
        let db = d.apply(b)?;
        let lhs2 = map_coeffs(&base, |v| d.apply(v))?.sub(&vertex_series(spec, a, &db, hi)?);
        let diff2 = lhs2.first_difference(&ddz);
        Ok((diff1, diff2))
    };
    match run() {
        Ok((None, None)) => CheckReport::pass("translation-properties", subject)
            .with_window(format!("z^..{}", hi - 1)),
        Ok((Some(cex), _)) => CheckReport::fail("translation-derivative", subject, cex),
        Ok((_, Some(cex))) => CheckReport::fail("translation-bracket", subject, cex),
        Err(e) => CheckReport::from_error("translation-properties", subject2(a, b), &e),
    }
}

/// Vacuum and creation properties for one state: `Y(1,z)a = a`,
/// `Y(a,z)1 ∈ V[[z]]` with constant term `a`, and `a_{-2}1 = Da`.
pub fn check_vacuum_creation(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    mode_window: (i64, i64),
) -> CheckReport {
    let subject = format!("({a})");
    let run = || -> Result<CheckReport> {
        let mut report = CheckReport::pass("vacuum-creation", subject.clone())
            .with_window(format!("modes {}..{}", mode_window.0, mode_window.1));
        let one = spec.vacuum_vector();
        for m in mode_window.0..=mode_window.1 {
            let va = spec.mode(&one, m, a)?;
            let expect = if m == -1 { a.clone() } else { GradedVector::zero() };
            if va != expect {
                report.absorb(CheckReport::fail(
                    "vacuum-property",
                    subject.clone(),
                    Counterexample {
                        location: format!("mode {m}"),
                        at: "1".into(),
                        expected: expect.to_string(),
                        got: va.to_string(),
                    },
                ));
                return Ok(report);
            }
            if m >= 0 {
                let av = spec.mode(a, m, &one)?;
                if !av.is_zero() {
                    report.absorb(CheckReport::fail(
                        "creation-truncation",
                        subject.clone(),
                        Counterexample {
                            location: format!("mode {m}"),
                            at: "1".into(),
                            expected: "0".into(),
                            got: av.to_string(),
                        },
                    ));
                    return Ok(report);
                }
            }
        }
        let a_neg1 = spec.mode(a, -1, &one)?;
        if &a_neg1 != a {
            report.absorb(CheckReport::fail(
                "creation-limit",
                subject.clone(),
                Counterexample {
                    location: "mode -1".into(),
                    at: "1".into(),
                    expected: a.to_string(),
                    got: a_neg1.to_string(),
                },
            ));
        }
        if let Some(d) = &spec.translation {
            let via_modes = spec.mode(a, -2, &one)?;
            let via_rule = d.apply(a)?;
            if via_modes != via_rule {
                report.absorb(CheckReport::fail(
                    "translation-vs-modes",
                    subject.clone(),
                    Counterexample {
                        location: "a_{-2}1".into(),
                        at: a.to_string(),
                        expected: via_rule.to_string(),
                        got: via_modes.to_string(),
                    },
                ));
            }
        }
        Ok(report)
    };
    match run() {
        Ok(r) => r,
        Err(e) => CheckReport::from_error("vacuum-creation", subject, &e),
    }
}

/// Truncation honesty: `a_n b = 0` for `n` in `[bound, bound+margin]`.
pub fn check_truncation(
    spec: &VertexAlgebraSpec,
    a: &GradedVector,
    b: &GradedVector,
    margin: i64,
) -> CheckReport {
    let subject = subject2(a, b);
    let bound = spec.support_vec(a, b);
    let run = || -> Result<Option<Counterexample>> {
        for n in bound..=bound + margin {
            let v = spec.mode(a, n, b)?;
            if !v.is_zero() {
                return Ok(Some(Counterexample {
                    location: format!("mode {n}"),
                    at: format!("bound {bound}"),
                    expected: "0".into(),
                    got: v.to_string(),
                }));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => CheckReport::pass("truncation", subject)
            .with_note(format!("support bound {bound}")),
        Ok(Some(cex)) => CheckReport::fail("truncation", subject, cex),
        Err(e) => CheckReport::from_error("truncation", subject2(a, b), &e),
    }
}

// ---------------------------------------------------------------------------
// Whole-algebra suites
// ---------------------------------------------------------------------------

/// Basis tuples with total weight magnitude up to the cutoff. For
/// floor-graded algebras this is `Σ wt ≤ cutoff`; for filtration-style
/// ones `Σ |wt| ≤ cutoff`.
pub fn basis_pairs(spec: &VertexAlgebraSpec, cutoff: i64) -> Vec<(BasisKey, BasisKey)> {
    let all = spec.basis_up_to(cutoff);
    let mut out = Vec::new();
    for a in &all {
        for b in &all {
            if a.weight().abs() + b.weight().abs() <= cutoff {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

pub fn basis_triples(spec: &VertexAlgebraSpec, cutoff: i64) -> Vec<(BasisKey, BasisKey, BasisKey)> {
    let all = spec.basis_up_to(cutoff);
    let mut out = Vec::new();
    for a in &all {
        for b in &all {
            if a.weight().abs() + b.weight().abs() > cutoff {
                continue;
            }
            for c in &all {
                if a.weight().abs() + b.weight().abs() + c.weight().abs() <= cutoff {
                    out.push((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    out
}

/// Options for the full axiom suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Total-weight cutoff for enumerated tuples.
    pub cutoff: i64,
    /// Window height for series comparisons.
    pub height: i64,
    /// Cap on witness searches; per-tuple budgets may be smaller.
    pub kmax: i64,
}

impl SuiteOptions {
    pub fn cutoff(cutoff: i64) -> Self {
        SuiteOptions {
            cutoff,
            height: 4,
            kmax: 12,
        }
    }
}

/// The full vertex-algebra axiom suite on all enumerated basis tuples up
/// to the cutoff: truncation, vacuum/creation, skew-symmetry, translation
/// properties on pairs; weak commutativity, weak associativity and the
/// Jacobi identity on triples. Includes the locality-order cross-check
/// (the minimal commutativity witness over all tested `c` equals
/// `1 + max{j ≥ 0 : a_j b ≠ 0}` for genuine vertex algebras) and the
/// axiom-equivalence consistency assertions: whenever skew-symmetry, the
/// bracket-derivative property and weak associativity all pass, weak
/// commutativity must pass on the same window.
pub fn check_axiom_suite(spec: &VertexAlgebraSpec, opts: SuiteOptions) -> CheckReport {
    let mut report = CheckReport::pass("vertex-axioms", spec.name.clone())
        .with_window(format!("cutoff {}", opts.cutoff));

    let has_vacuum = spec.vacuum.is_some();
    let has_d = spec.translation.is_some();

    if has_vacuum {
        let singles: Vec<GradedVector> = spec
            .basis_up_to(opts.cutoff)
            .into_iter()
            .map(GradedVector::basis)
            .collect();
        let results: Vec<CheckReport> = singles
            .par_iter()
            .map(|a| check_vacuum_creation(spec, a, (-2, opts.cutoff + 2)))
            .collect();
        let mut agg = CheckReport::pass("vacuum-creation", "all basis states");
        for r in results {
            if !r.passed() {
                agg.absorb(r);
            }
        }
        agg.notes.push(format!("{} states checked", singles.len()));
        report.absorb(agg);
    }

    let pairs = basis_pairs(spec, opts.cutoff);
    let pair_results: Vec<(CheckReport, Option<CheckReport>, Option<CheckReport>)> = pairs
        .par_iter()
        .map(|(ka, kb)| {
            let a = GradedVector::basis(ka.clone());
            let b = GradedVector::basis(kb.clone());
            let trunc = check_truncation(spec, &a, &b, 3);
            let skew = has_d.then(|| check_skew_symmetry(spec, &a, &b, opts.height));
            let trans = has_d.then(|| check_translation_properties(spec, &a, &b, opts.height));
            (trunc, skew, trans)
        })
        .collect();
    let mut trunc_agg = CheckReport::pass("truncation", "all basis pairs");
    let mut skew_agg = CheckReport::pass("skew-symmetry", "all basis pairs");
    let mut trans_agg = CheckReport::pass("translation-properties", "all basis pairs");
    for (t, s, d) in pair_results {
        if !t.passed() {
            trunc_agg.absorb(t);
        }
        if let Some(s) = s {
            if !s.passed() {
                skew_agg.absorb(s);
            }
        }
        if let Some(d) = d {
            if !d.passed() {
                trans_agg.absorb(d);
            }
        }
    }
    trunc_agg.notes.push(format!("{} pairs checked", pairs.len()));
    report.absorb(trunc_agg);
    if has_d {
        skew_agg.notes.push(format!("{} pairs checked", pairs.len()));
        trans_agg.notes.push(format!("{} pairs checked", pairs.len()));
        report.absorb(skew_agg);
        report.absorb(trans_agg);
    }

    // Triples: the killed-pair identities.
    let triples = basis_triples(spec, opts.cutoff);
    let triple_results: Vec<(usize, CheckReport, CheckReport)> = triples
        .par_iter()
        .enumerate()
        .map(|(i, (ka, kb, kc))| {
            let a = GradedVector::basis(ka.clone());
            let b = GradedVector::basis(kb.clone());
            let c = GradedVector::basis(kc.clone());
            let kmax = default_kmax(&a, &b).min(opts.kmax);
            let comm = check_weak_commutativity(spec, &a, &b, &c, opts.height, kmax);
            let assoc = check_weak_associativity(spec, &a, &b, &c, opts.height, kmax);
            (i, comm, assoc)
        })
        .collect();

    let mut comm_agg = CheckReport::pass("weak-commutativity", "all basis triples");
    let mut assoc_agg = CheckReport::pass("weak-associativity", "all basis triples");
    // Track max witness per (a,b) pair for the locality cross-check.
    let mut max_witness: BTreeMap<(BasisKey, BasisKey), i64> = BTreeMap::new();
    for (i, comm, assoc) in triple_results {
        let (ka, kb, _) = &triples[i];
        if let Some(k) = comm.witness_k {
            let e = max_witness.entry((ka.clone(), kb.clone())).or_insert(0);
            *e = (*e).max(k);
        }
        if !comm.passed() {
            comm_agg.absorb(comm);
        }
        if !assoc.passed() {
            assoc_agg.absorb(assoc);
        }
    }
    comm_agg
        .notes
        .push(format!("{} triples checked", triples.len()));
    assoc_agg
        .notes
        .push(format!("{} triples checked", triples.len()));

    // Consistency per the axiom-equivalence theorems: with skew-symmetry
    // and the bracket derivative verified, weak associativity forces weak
    // commutativity. A violation here is an engine bug, not a property of
    // the input.
    if has_d
        && report.verdict == Verdict::Pass
        && assoc_agg.verdict == Verdict::Pass
        && comm_agg.verdict != Verdict::Pass
    {
        comm_agg
            .notes
            .push("inconsistent: weak associativity + skew-symmetry passed but commutativity failed".into());
    }

    // Locality-order cross-check for genuine vertex algebras.
    if matches!(
        spec.kind,
        StructureKind::VertexAlgebra | StructureKind::VertexOperatorAlgebra
    ) {
        let mut loc = CheckReport::pass("locality-order", "witness vs mode support");
        for ((ka, kb), observed) in &max_witness {
            let a = GradedVector::basis(ka.clone());
            let b = GradedVector::basis(kb.clone());
            let bound = spec.support_vec(&a, &b);
            let mut order = 0;
            for j in (0..bound).rev() {
                match spec.mode(&a, j, &b) {
                    Ok(v) if !v.is_zero() => {
                        order = j + 1;
                        break;
                    }
                    _ => {}
                }
            }
            if *observed > order {
                loc.absorb(CheckReport::fail(
                    "locality-order",
                    subject2(&a, &b),
                    Counterexample {
                        location: "witness".into(),
                        at: format!("order {order}"),
                        expected: format!("<= {order}"),
                        got: observed.to_string(),
                    },
                ));
            }
        }
        report.absorb(loc);
    }

    report.absorb(comm_agg);
    report.absorb(assoc_agg);
    report
}

// ---------------------------------------------------------------------------
// Conformal structure
// ---------------------------------------------------------------------------

/// Virasoro/VOA axioms: the Virasoro bracket with its central charge, the
/// translation identification `L(-1) = D`, and the grading identification
/// `L(0) = wt` — all on the enumerated basis up to the cutoff.
pub fn check_voa_axioms(spec: &VertexAlgebraSpec, cutoff: i64) -> CheckReport {
    let subject = spec.name.clone();
    let Some(omega) = spec.virasoro.clone() else {
        return CheckReport::from_error(
            "voa-axioms",
            subject,
            &CoreError::Window {
                detail: "no conformal vector declared".into(),
            },
        );
    };
    let run = || -> Result<CheckReport> {
        let mut report =
            CheckReport::pass("voa-axioms", subject.clone()).with_window(format!("cutoff {cutoff}"));
        let ell = |n: i64, v: &GradedVector| spec.mode(&omega, n + 1, v);
        // Central charge from [L(2), L(-2)]1 = 4 L(0)1 + c/2 · 1.
        let one = spec.vacuum_vector();
        let c2 = ell(2, &ell(-2, &one)?)?;
        let vac_key = spec.vacuum.clone().unwrap();
        let central = c2.coeff(&vac_key) * Scalar::from_int(2);
        report
            .notes
            .push(format!("central charge {central}"));

        let states: Vec<GradedVector> = spec
            .basis_up_to(cutoff)
            .into_iter()
            .map(GradedVector::basis)
            .collect();

        // Virasoro relation on a mode square.
        let mode_range = 2i64;
        let mut bracket = CheckReport::pass("virasoro-relation", subject.clone())
            .with_window(format!("modes [-{mode_range},{mode_range}]"));
        'outer: for m in -mode_range..=mode_range {
            for n in -mode_range..=mode_range {
                for v in &states {
                    let lhs = &ell(m, &ell(n, v)?)? - &ell(n, &ell(m, v)?)?;
                    let mut rhs = ell(m + n, v)?.scaled(&Scalar::from_int(m - n));
                    if m + n == 0 {
                        let factor =
                            Scalar::from_int(m * m * m - m) * Scalar::ratio(1, 12) * central.clone();
                        rhs.add_scaled(v, &factor);
                    }
                    if lhs != rhs {
                        bracket.absorb(CheckReport::fail(
                            "virasoro-relation",
                            format!("[L({m}),L({n})] on {v}"),
                            Counterexample {
                                location: format!("L({m})L({n})"),
                                at: v.to_string(),
                                expected: rhs.to_string(),
                                got: lhs.to_string(),
                            },
                        ));
                        break 'outer;
                    }
                }
            }
        }
        report.absorb(bracket);

        // L(-1) = D and L(0) = wt.
        let mut translation = CheckReport::pass("conformal-translation", subject.clone());
        let mut grading = CheckReport::pass("conformal-grading", subject.clone());
        for v in &states {
            if let Some(d) = &spec.translation {
                let lhs = ell(-1, v)?;
                let rhs = d.apply(v)?;
                if lhs != rhs {
                    translation.absorb(CheckReport::fail(
                        "conformal-translation",
                        format!("L(-1) on {v}"),
                        Counterexample {
                            location: "L(-1)".into(),
                            at: v.to_string(),
                            expected: rhs.to_string(),
                            got: lhs.to_string(),
                        },
                    ));
                }
            }
            let wt = v.homogeneous_weight().unwrap_or(0);
            let lhs = ell(0, v)?;
            let rhs = v.scaled(&Scalar::from_int(wt));
            if lhs != rhs {
                grading.absorb(CheckReport::fail(
                    "conformal-grading",
                    format!("L(0) on {v}"),
                    Counterexample {
                        location: "L(0)".into(),
                        at: v.to_string(),
                        expected: rhs.to_string(),
                        got: lhs.to_string(),
                    },
                ));
            }
        }
        report.absorb(translation);
        report.absorb(grading);
        Ok(report)
    };
    match run() {
        Ok(r) => r,
        Err(e) => CheckReport::from_error("voa-axioms", spec.name.clone(), &e),
    }
}

// ---------------------------------------------------------------------------
// Modules
// ---------------------------------------------------------------------------

type ModuleOracleFn = dyn Fn(&BasisKey, i64, &BasisKey) -> Result<GradedVector> + Send + Sync;

/// A module carrier with its left action `Y_W` and an optional right
/// action `Y_{WV}^W`, each an oracle on basis indices extended bilinearly.
#[derive(Clone)]
pub struct ModuleSpec {
    pub name: String,
    basis: Arc<BasisFn>,
    action: Arc<ModuleOracleFn>,
    action_support: Arc<SupportFn>,
    right_action: Option<Arc<ModuleOracleFn>>,
    right_support: Option<Arc<SupportFn>>,
    /// Conformal weight offset of an ordinary module.
    pub conformal_offset: Scalar,
    pub degree_floor: Option<i64>,
}

impl ModuleSpec {
    pub fn new(
        name: impl Into<String>,
        basis: impl Fn(i64) -> Vec<BasisKey> + Send + Sync + 'static,
        action: impl Fn(&BasisKey, i64, &BasisKey) -> Result<GradedVector> + Send + Sync + 'static,
        support: impl Fn(&BasisKey, &BasisKey) -> i64 + Send + Sync + 'static,
    ) -> Self {
        ModuleSpec {
            name: name.into(),
            basis: Arc::new(basis),
            action: Arc::new(action),
            action_support: Arc::new(support),
            right_action: None,
            right_support: None,
            conformal_offset: Scalar::zero(),
            degree_floor: None,
        }
    }

    pub fn with_right_action(
        mut self,
        action: impl Fn(&BasisKey, i64, &BasisKey) -> Result<GradedVector> + Send + Sync + 'static,
        support: impl Fn(&BasisKey, &BasisKey) -> i64 + Send + Sync + 'static,
    ) -> Self {
        self.right_action = Some(Arc::new(action));
        self.right_support = Some(Arc::new(support));
        self
    }

    pub fn with_degree_floor(mut self, floor: i64) -> Self {
        self.degree_floor = Some(floor);
        self
    }

    /// The adjoint module: `W = V`, `Y_W = Y`, with the right action also
    /// given by `Y` (via skew-symmetry it equals its own `Y_{WV}^W`).
    pub fn adjoint(spec: &VertexAlgebraSpec) -> Self {
        let s1 = spec.clone();
        let s2 = spec.clone();
        let s3 = spec.clone();
        let s4 = spec.clone();
        let s5 = spec.clone();
        ModuleSpec {
            name: format!("{} (adjoint)", spec.name),
            basis: Arc::new(move |d| s1.basis_at(d)),
            action: Arc::new(move |a, m, b| s2.mode_basis(a, m, b)),
            action_support: Arc::new(move |a, b| s3.support_keys(a, b)),
            right_action: Some(Arc::new(move |a, m, b| s4.mode_basis(a, m, b))),
            right_support: Some(Arc::new(move |a, b| s5.support_keys(a, b))),
            conformal_offset: Scalar::zero(),
            degree_floor: spec.degree_floor,
        }
    }

    pub fn basis_up_to(&self, cutoff: i64) -> Vec<BasisKey> {
        let range: Vec<i64> = match self.degree_floor {
            Some(f) => (f..=cutoff).collect(),
            None => (-cutoff..=0).collect(),
        };
        range.into_iter().flat_map(|d| (self.basis)(d)).collect()
    }

    /// Left action as a mode action.
    pub fn left(&self) -> impl ModeAction + '_ {
        crate::series::MapAction {
            map: move |a: &GradedVector, m: i64, w: &GradedVector| {
                let mut out = GradedVector::zero();
                for (ka, ca) in a.iter() {
                    for (kw, cw) in w.iter() {
                        out.add_scaled(&(self.action)(ka, m, kw)?, &(ca * cw));
                    }
                }
                Ok(out)
            },
            bound: move |a: &GradedVector, w: &GradedVector| {
                let mut bound = 0;
                for (ka, _) in a.iter() {
                    for (kw, _) in w.iter() {
                        bound = bound.max((self.action_support)(ka, kw));
                    }
                }
                bound
            },
        }
    }

    /// Right action `Y_{WV}^W` as a mode action, when present.
    pub fn right(&self) -> Option<impl ModeAction + '_> {
        let action = self.right_action.as_ref()?;
        let support = self.right_support.as_ref()?;
        Some(crate::series::MapAction {
            map: move |w: &GradedVector, m: i64, b: &GradedVector| {
                let mut out = GradedVector::zero();
                for (kw, cw) in w.iter() {
                    for (kb, cb) in b.iter() {
                        out.add_scaled(&action(kw, m, kb)?, &(cw * cb));
                    }
                }
                Ok(out)
            },
            bound: move |w: &GradedVector, b: &GradedVector| {
                let mut bound = 0;
                for (kw, _) in w.iter() {
                    for (kb, _) in b.iter() {
                        bound = bound.max(support(kw, kb));
                    }
                }
                bound
            },
        })
    }
}

/// Module axioms: vacuum property, the module Jacobi identity (through
/// the killed pair), the admissible grading law, and — when the base
/// structure carries a translation operator but no vacuum — the
/// derivative property `Y_W(Da,z) = d/dz Y_W(a,z)`.
pub fn check_module_axioms(
    spec: &VertexAlgebraSpec,
    module: &ModuleSpec,
    opts: SuiteOptions,
) -> CheckReport {
    let mut report = CheckReport::pass("module-axioms", module.name.clone())
        .with_window(format!("cutoff {}", opts.cutoff));
    let yw = module.left();

    let algebra_states: Vec<GradedVector> = spec
        .basis_up_to(opts.cutoff)
        .into_iter()
        .map(GradedVector::basis)
        .collect();
    let module_states: Vec<GradedVector> = module
        .basis_up_to(opts.cutoff)
        .into_iter()
        .map(GradedVector::basis)
        .collect();

    // Vacuum property Y_W(1, z) = Id.
    if spec.kind.has_vacuum() {
        let one = spec.vacuum_vector();
        let mut vac = CheckReport::pass("module-vacuum", module.name.clone());
        'vac: for w in &module_states {
            for m in -(opts.cutoff + 2)..=(opts.cutoff + 2) {
                match yw.apply(&one, m, w) {
                    Ok(v) => {
                        let expect = if m == -1 { w.clone() } else { GradedVector::zero() };
                        if v != expect {
                            vac.absorb(CheckReport::fail(
                                "module-vacuum",
                                format!("({w})"),
                                Counterexample {
                                    location: format!("mode {m}"),
                                    at: w.to_string(),
                                    expected: expect.to_string(),
                                    got: v.to_string(),
                                },
                            ));
                            break 'vac;
                        }
                    }
                    Err(e) => {
                        vac.absorb(CheckReport::from_error("module-vacuum", format!("({w})"), &e));
                        break 'vac;
                    }
                }
            }
        }
        report.absorb(vac);
    }

    // Module Jacobi on (a, b, w) tuples.
    let mut tuples = Vec::new();
    for a in &algebra_states {
        for b in &algebra_states {
            for w in &module_states {
                let total = a.weights().last().copied().unwrap_or(0).abs()
                    + b.weights().last().copied().unwrap_or(0).abs()
                    + w.weights().last().copied().unwrap_or(0).abs();
                if total <= opts.cutoff {
                    tuples.push((a.clone(), b.clone(), w.clone()));
                }
            }
        }
    }
    let jac_results: Vec<CheckReport> = tuples
        .par_iter()
        .map(|(a, b, w)| {
            let maps = JacobiMaps {
                f1: &yw,
                f2: &yw,
                g1: &yw,
                g2: &yw,
                h1: &yw,
                h2: spec,
            };
            let kmax = default_kmax(a, b).min(opts.kmax);
            jacobi_pair("module-jacobi", &maps, a, b, w, opts.height, kmax)
        })
        .collect();
    let mut jac = CheckReport::pass("module-jacobi", module.name.clone())
        .with_note(format!("{} tuples checked", tuples.len()));
    for r in jac_results {
        if !r.passed() {
            jac.absorb(r);
        }
    }
    report.absorb(jac);

    // Derivative property for modules over structures without vacuum.
    if let Some(d) = &spec.translation {
        if !spec.kind.has_vacuum() {
            let mut deriv = CheckReport::pass("module-translation-derivative", module.name.clone());
            'dv: for a in &algebra_states {
                for w in &module_states {
                    let run = || -> Result<Option<Counterexample>> {
                        let base = SeriesWindow::expand(&yw, a, w, opts.height)?;
                        let da = d.apply(a)?;
                        let lhs = SeriesWindow::expand(&yw, &da, w, opts.height - 1)?;
                        Ok(lhs.first_difference(&base.d_dz()))
                    };
                    match run() {
                        Ok(None) => {}
                        Ok(Some(cex)) => {
                            deriv.absorb(CheckReport::fail(
                                "module-translation-derivative",
                                subject2(a, w),
                                cex,
                            ));
                            break 'dv;
                        }
                        Err(e) => {
                            deriv.absorb(CheckReport::from_error(
                                "module-translation-derivative",
                                subject2(a, w),
                                &e,
                            ));
                            break 'dv;
                        }
                    }
                }
            }
            report.absorb(deriv);
        }
    }

    // Admissible grading law a_m W(n) ⊂ W(wt a - m - 1 + n).
    let mut grading = CheckReport::pass("module-grading", module.name.clone());
    'grade: for a in &algebra_states {
        for w in &module_states {
            let bound = yw.support(a, w);
            for m in -(opts.cutoff + 1)..bound {
                match yw.apply(a, m, w) {
                    Ok(v) => {
                        let expect = a.homogeneous_weight().unwrap_or(0) - m - 1
                            + w.homogeneous_weight().unwrap_or(0);
                        if !v.is_homogeneous_of(expect) {
                            grading.absorb(CheckReport::fail(
                                "module-grading",
                                subject2(a, w),
                                Counterexample {
                                    location: format!("mode {m}"),
                                    at: subject2(a, w),
                                    expected: format!("weight {expect}"),
                                    got: v.to_string(),
                                },
                            ));
                            break 'grade;
                        }
                    }
                    Err(e) => {
                        grading.absorb(CheckReport::from_error("module-grading", subject2(a, w), &e));
                        break 'grade;
                    }
                }
            }
        }
    }
    report.absorb(grading);
    report
}
