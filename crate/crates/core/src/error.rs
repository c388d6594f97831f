//! Crate-wide error type. Checks distinguish a *failed identity* (a
//! `CheckReport` with a counterexample) from a *structural error* (below):
//! the latter means the question itself was ill-posed on the given data.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A basis index outside the declared domain of a rule was hit.
    #[error("domain breach in `{rule}` at basis index {key}")]
    Domain { rule: String, key: String },

    /// Membership was queried at a degree the subspace does not enumerate
    /// completely.
    #[error("membership undecidable: degree {degree} not covered by `{subspace}`")]
    Coverage { subspace: String, degree: i64 },

    /// An oracle result violated the grading law wt(a_m b) = wt(a)-m-1+wt(b).
    #[error("grading law violated: {detail}")]
    Grading { detail: String },

    /// A computation required basis vectors beyond the enumerated cutoff.
    #[error("degree cutoff exceeded: {detail}")]
    Cutoff { detail: String },

    /// A series window could not be certified complete.
    #[error("window not certifiable: {detail}")]
    Window { detail: String },

    /// A derivation failed to be nilpotent within the declared bound.
    #[error("derivation not nilpotent at {key} within {bound} steps")]
    NonNilpotent { key: String, bound: u32 },

    /// An exact linear solve was impossible (image enumeration incomplete
    /// at a cutoff boundary, or inconsistent system).
    #[error("linear solve failed: {detail}")]
    Solve { detail: String },

    /// Spanning sets handed to a projection constructor do not form a
    /// direct sum per degree.
    #[error("not a direct-sum split: {detail}")]
    Split { detail: String },

    /// A subspace handed to a projection constructor is not closed under
    /// the mode products; carries a concrete witness.
    #[error("subspace V{side} not mode-closed: ({a})_{{{mode}}}({b}) = {value} escapes")]
    Closure {
        side: u8,
        a: String,
        mode: i64,
        b: String,
        value: String,
    },

    /// A witness search could not certify any exponent within the budget
    /// on the available window (distinct from a refuted identity).
    #[error("inconclusive: {detail}")]
    Inconclusive { detail: String },
}

pub type Result<T> = std::result::Result<T, CoreError>;
