//! Commutative differential unital algebras and their embedding as vertex
//! algebras via `Y(a,z)b := (e^{zd}a)·b`.
//!
//! The reference example is the divided power algebra `A = ⊕ ℚ t_m` with
//! `t_m·t_n = C(m+n,n) t_{m+n}` and `d(t_m) = t_{m-1}`; the polynomial
//! algebra `ℚ[t]` is its realization under `t_n = tⁿ/n!` and ships as a
//! separate instance. Weights follow the vertex grading `wt(t_m) = -m`,
//! so these algebras are enumerated by the filtration index `m` and have
//! no degree floor.

use std::sync::Arc;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::kernel::{StructureKind, VertexAlgebraSpec};
use crate::report::{CheckReport, Counterexample};
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::vector::GradedVector;

type ProductFn = dyn Fn(&BasisKey, &BasisKey) -> Result<GradedVector> + Send + Sync;
type BoundFn = dyn Fn(&BasisKey) -> u32 + Send + Sync;

/// A commutative unital differential algebra presented on a basis.
#[derive(Clone)]
pub struct CommDiffAlgebraSpec {
    pub name: String,
    basis: Arc<dyn Fn(i64) -> Vec<BasisKey> + Send + Sync>,
    product: Arc<ProductFn>,
    pub derivation: LinearRule,
    pub unit: BasisKey,
    /// Per-basis nilpotency bound: `d^{bound(b)+1} b = 0` is claimed.
    nilpotency: Arc<BoundFn>,
}

impl CommDiffAlgebraSpec {
    pub fn product(&self, a: &BasisKey, b: &BasisKey) -> Result<GradedVector> {
        (self.product)(a, b)
    }

    pub fn product_vec(&self, a: &GradedVector, b: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (ka, ca) in a.iter() {
            for (kb, cb) in b.iter() {
                out.add_scaled(&(self.product)(ka, kb)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn basis_at(&self, degree: i64) -> Vec<BasisKey> {
        (self.basis)(degree)
    }

    pub fn nilpotency_bound(&self, key: &BasisKey) -> u32 {
        (self.nilpotency)(key)
    }
}

/// The divided power algebra: `t_m·t_n = C(m+n,n) t_{m+n}`, `d t_m = t_{m-1}`.
pub fn divided_power_algebra() -> CommDiffAlgebraSpec {
    CommDiffAlgebraSpec {
        name: "divided-power".into(),
        basis: Arc::new(|d| {
            if d > 0 {
                vec![]
            } else {
                vec![BasisKey::Mono((-d) as u32)]
            }
        }),
        product: Arc::new(|a, b| match (a, b) {
            (BasisKey::Mono(m), BasisKey::Mono(n)) => Ok(GradedVector::term(
                BasisKey::Mono(m + n),
                Scalar::binomial((m + n) as i64, *n as u64),
            )),
            _ => Err(CoreError::Domain {
                rule: "divided-power product".into(),
                key: format!("{a}·{b}"),
            }),
        }),
        derivation: LinearRule::new("d", |k| match k {
            BasisKey::Mono(0) => Ok(GradedVector::zero()),
            BasisKey::Mono(m) => Ok(GradedVector::basis(BasisKey::Mono(m - 1))),
            other => Err(CoreError::Domain {
                rule: "d".into(),
                key: other.to_string(),
            }),
        })
        .with_homogeneity(1),
        unit: BasisKey::Mono(0),
        nilpotency: Arc::new(|k| match k {
            BasisKey::Mono(m) => *m,
            _ => 0,
        }),
    }
}

/// The polynomial algebra `ℚ[t]`: `t^m·t^n = t^{m+n}`, `d = d/dt`.
pub fn polynomial_algebra() -> CommDiffAlgebraSpec {
    CommDiffAlgebraSpec {
        name: "polynomial".into(),
        basis: Arc::new(|d| {
            if d > 0 {
                vec![]
            } else {
                vec![BasisKey::Pow((-d) as u32)]
            }
        }),
        product: Arc::new(|a, b| match (a, b) {
            (BasisKey::Pow(m), BasisKey::Pow(n)) => {
                Ok(GradedVector::basis(BasisKey::Pow(m + n)))
            }
            _ => Err(CoreError::Domain {
                rule: "polynomial product".into(),
                key: format!("{a}·{b}"),
            }),
        }),
        derivation: LinearRule::new("d/dt", |k| match k {
            BasisKey::Pow(0) => Ok(GradedVector::zero()),
            BasisKey::Pow(m) => Ok(GradedVector::term(
                BasisKey::Pow(m - 1),
                Scalar::from_int(*m as i64),
            )),
            other => Err(CoreError::Domain {
                rule: "d/dt".into(),
                key: other.to_string(),
            }),
        })
        .with_homogeneity(1),
        unit: BasisKey::Pow(0),
        nilpotency: Arc::new(|k| match k {
            BasisKey::Pow(m) => *m,
            _ => 0,
        }),
    }
}

/// Embeds a commutative differential unital algebra as a vertex algebra
/// with `Y(a,z)b = (e^{zd}a)·b`. The series has no negative powers of z,
/// so every mode-support bound is 0.
pub fn borcherds_embed(algebra: CommDiffAlgebraSpec) -> VertexAlgebraSpec {
    let oracle_algebra = algebra.clone();
    let oracle = move |a: &BasisKey, m: i64, b: &BasisKey| -> Result<GradedVector> {
        if m >= 0 {
            return Ok(GradedVector::zero());
        }
        let j = (-m - 1) as u32;
        let bound = oracle_algebra.nilpotency_bound(a);
        let da = oracle_algebra
            .derivation
            .apply_power(&GradedVector::basis(a.clone()), j)?;
        if j > bound && !da.is_zero() {
            return Err(CoreError::NonNilpotent {
                key: a.to_string(),
                bound,
            });
        }
        let da = da.scaled(&Scalar::factorial(j as u64).inverse().unwrap());
        oracle_algebra.product_vec(&da, &GradedVector::basis(b.clone()))
    };
    let basis_algebra = algebra.clone();
    VertexAlgebraSpec::new(
        algebra.name.clone(),
        StructureKind::VertexAlgebra,
        move |d| basis_algebra.basis_at(d),
        oracle,
        |_, _| 0,
    )
    .with_vacuum(algebra.unit.clone())
    .with_translation(algebra.derivation.clone())
}

/// Commutativity, associativity and the Leibniz rule on the enumerated
/// basis up to the cutoff.
pub fn check_comm_diff_axioms(algebra: &CommDiffAlgebraSpec, cutoff: i64) -> CheckReport {
    let mut report = CheckReport::pass("comm-diff-axioms", algebra.name.clone())
        .with_window(format!("cutoff {cutoff}"));
    let keys: Vec<BasisKey> = (-cutoff..=0)
        .flat_map(|d| algebra.basis_at(d))
        .collect();
    let run = || -> Result<Option<Counterexample>> {
        for a in &keys {
            for b in &keys {
                if a.weight().abs() + b.weight().abs() > cutoff {
                    continue;
                }
                let ab = algebra.product(a, b)?;
                let ba = algebra.product(b, a)?;
                if ab != ba {
                    return Ok(Some(Counterexample {
                        location: "commutativity".into(),
                        at: format!("({a}; {b})"),
                        expected: ab.to_string(),
                        got: ba.to_string(),
                    }));
                }
                // Leibniz: d(ab) = (da)b + a(db).
                let va = GradedVector::basis(a.clone());
                let vb = GradedVector::basis(b.clone());
                let lhs = algebra.derivation.apply(&ab)?;
                let rhs = &algebra.product_vec(&algebra.derivation.apply(&va)?, &vb)?
                    + &algebra.product_vec(&va, &algebra.derivation.apply(&vb)?)?;
                if lhs != rhs {
                    return Ok(Some(Counterexample {
                        location: "leibniz".into(),
                        at: format!("({a}; {b})"),
                        expected: rhs.to_string(),
                        got: lhs.to_string(),
                    }));
                }
                for c in &keys {
                    if a.weight().abs() + b.weight().abs() + c.weight().abs() > cutoff {
                        continue;
                    }
                    let lhs =
                        algebra.product_vec(&ab, &GradedVector::basis(c.clone()))?;
                    let rhs = algebra.product_vec(
                        &GradedVector::basis(a.clone()),
                        &algebra.product(b, c)?,
                    )?;
                    if lhs != rhs {
                        return Ok(Some(Counterexample {
                            location: "associativity".into(),
                            at: format!("({a}; {b}; {c})"),
                            expected: rhs.to_string(),
                            got: lhs.to_string(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => report,
        Ok(Some(cex)) => {
            report.absorb(CheckReport::fail(
                "comm-diff-axioms",
                algebra.name.clone(),
                cex,
            ));
            report
        }
        Err(e) => {
            report.absorb(CheckReport::from_error(
                "comm-diff-axioms",
                algebra.name.clone(),
                &e,
            ));
            report
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::vertex_series;

    fn t(m: u32) -> GradedVector {
        GradedVector::basis(BasisKey::Mono(m))
    }

    fn tp(m: u32) -> GradedVector {
        GradedVector::basis(BasisKey::Pow(m))
    }

    #[test]
    fn algebra_axioms_hold() {
        assert!(check_comm_diff_axioms(&divided_power_algebra(), 8).passed());
        assert!(check_comm_diff_axioms(&polynomial_algebra(), 8).passed());
    }

    #[test]
    fn polynomial_modes_follow_binomials() {
        // Y(t^m,z)t^n = Σ_j C(m,j) t^{m+n-j} z^j; at m=2, n=1, j=1 the
        // coefficient is C(2,1) t².
        let v = borcherds_embed(polynomial_algebra());
        let out = v.mode(&tp(2), -2, &tp(1)).unwrap();
        assert_eq!(out, tp(2).scaled(&Scalar::from_int(2)));
        // Unit field acts as the identity.
        assert_eq!(v.mode(&tp(0), -1, &tp(3)).unwrap(), tp(3));
        assert!(v.mode(&tp(0), 0, &tp(3)).unwrap().is_zero());
    }

    #[test]
    fn divided_power_series_window() {
        // Y(t_1,z)t_1 = 2t_2 + t_1 z.
        let v = borcherds_embed(divided_power_algebra());
        let w = vertex_series(&v, &t(1), &t(1), 2).unwrap();
        assert_eq!(w.coeff(0).unwrap(), t(2).scaled(&Scalar::from_int(2)));
        assert_eq!(w.coeff(1).unwrap(), t(1));
        assert!(w.coeff(2).unwrap().is_zero());
        assert_eq!(w.lo, 0);
    }

    #[test]
    fn embeddings_have_no_negative_powers() {
        let v = borcherds_embed(divided_power_algebra());
        for m in 0..5 {
            assert!(v
                .mode(&t(3), m, &t(2))
                .unwrap()
                .is_zero());
        }
        assert_eq!(v.support_vec(&t(3), &t(2)), 0);
    }

    #[test]
    fn divided_power_realizes_polynomials() {
        // Under t_n = tⁿ/n! the two products agree.
        let dp = borcherds_embed(divided_power_algebra());
        let pl = borcherds_embed(polynomial_algebra());
        for m in 0u32..5 {
            for n in 0u32..4 {
                for mode in -6i64..1 {
                    let lhs = dp.mode(&t(m), mode, &t(n)).unwrap();
                    // Convert: t_m ⊗ t_n → t^m t^n / (m! n!).
                    let rhs = pl.mode(&tp(m), mode, &tp(n)).unwrap();
                    let mut converted = GradedVector::zero();
                    for (k, c) in rhs.iter() {
                        let BasisKey::Pow(p) = k else { panic!() };
                        converted.add_term(
                            BasisKey::Mono(*p),
                            c * &Scalar::factorial(*p as u64)
                                * (Scalar::factorial(m as u64) * Scalar::factorial(n as u64))
                                    .inverse()
                                    .unwrap(),
                        );
                    }
                    assert_eq!(lhs, converted, "t_{m} mode {mode} t_{n}");
                }
            }
        }
    }

    #[test]
    fn vertex_axioms_on_window() {
        use crate::kernel::{check_axiom_suite, SuiteOptions};
        let v = borcherds_embed(divided_power_algebra());
        let report = check_axiom_suite(
            &v,
            SuiteOptions {
                cutoff: 4,
                height: 4,
                kmax: 6,
            },
        );
        assert!(report.passed(), "{report}");
    }
}
