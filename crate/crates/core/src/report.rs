//! Structured verdicts for identity checks.
//!
//! Every check produces a `CheckReport`. A failing report always carries
//! a concrete counterexample coefficient; a passing report always carries
//! the window it was certified on and any witness exponents found.

use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// fail dominates, then inconclusive, then pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn combine_all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts
            .into_iter()
            .fold(Verdict::Pass, Verdict::combine)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "FAIL"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// First offending coefficient of a refuted identity, rendered exactly.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    /// Where the mismatch sits: variable exponents or a mode number.
    pub location: String,
    /// The basis index whose coefficient differs (or a vector summary).
    pub at: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at {} [{}]: expected {}, got {}",
            self.location, self.at, self.expected, self.got
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    /// Which identity was checked.
    pub identity: String,
    /// The pair/triple (or operator) it was checked on.
    pub subject: String,
    /// Human-readable description of the verification window.
    pub window: Option<String>,
    pub verdict: Verdict,
    /// Witness exponent for a `(z1-z2)^k`-type identity.
    pub witness_k: Option<i64>,
    /// Witness exponent for a `(z0+z2)^l`-type identity.
    pub witness_l: Option<i64>,
    pub counterexample: Option<Counterexample>,
    /// Extra structured notes (vacuous-case counts, forced ranges, ...).
    pub notes: Vec<String>,
    /// Sub-reports for composite checks.
    pub children: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(identity: impl Into<String>, subject: impl Into<String>) -> Self {
        CheckReport {
            identity: identity.into(),
            subject: subject.into(),
            window: None,
            verdict: Verdict::Pass,
            witness_k: None,
            witness_l: None,
            counterexample: None,
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn pass(identity: impl Into<String>, subject: impl Into<String>) -> Self {
        CheckReport::new(identity, subject)
    }

    pub fn fail(
        identity: impl Into<String>,
        subject: impl Into<String>,
        cex: Counterexample,
    ) -> Self {
        let mut r = CheckReport::new(identity, subject);
        r.verdict = Verdict::Fail;
        r.counterexample = Some(cex);
        r
    }

    pub fn inconclusive(
        identity: impl Into<String>,
        subject: impl Into<String>,
        why: impl Into<String>,
    ) -> Self {
        let mut r = CheckReport::new(identity, subject);
        r.verdict = Verdict::Inconclusive;
        r.notes.push(why.into());
        r
    }

    pub fn with_window(mut self, w: impl Into<String>) -> Self {
        self.window = Some(w.into());
        self
    }

    pub fn with_witness_k(mut self, k: i64) -> Self {
        self.witness_k = Some(k);
        self
    }

    pub fn with_witness_l(mut self, l: i64) -> Self {
        self.witness_l = Some(l);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Appends a child and folds its verdict into this report.
    pub fn absorb(&mut self, child: CheckReport) {
        self.verdict = self.verdict.combine(child.verdict);
        self.children.push(child);
    }

    /// Converts a structural error into a failing leaf report.
    pub fn from_error(
        identity: impl Into<String>,
        subject: impl Into<String>,
        err: &crate::error::CoreError,
    ) -> Self {
        let mut r = CheckReport::new(identity, subject);
        r.verdict = Verdict::Fail;
        r.notes.push(format!("error: {err}"));
        r
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One line per leaf, indented by depth.
    pub fn render(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let pad = "  ".repeat(depth);
        let mut line = format!("{pad}{} [{}] {}", self.verdict, self.identity, self.subject);
        if let Some(k) = self.witness_k {
            line.push_str(&format!(" k={k}"));
        }
        if let Some(l) = self.witness_l {
            line.push_str(&format!(" l={l}"));
        }
        if let Some(w) = &self.window {
            line.push_str(&format!(" window {w}"));
        }
        let _ = writeln!(out, "{line}");
        if let Some(cex) = &self.counterexample {
            let _ = writeln!(out, "{pad}  counterexample: {cex}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{pad}  note: {n}");
        }
        for c in &self.children {
            c.render(out, depth + 1);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&mut s, 0);
        write!(f, "{}", s.trim_end())
    }
}
