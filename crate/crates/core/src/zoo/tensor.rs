//! The tensor construction `V ⊗ A`: a vertex algebra tensored with a
//! commutative unital algebra, `(a⊗f)_m (b⊗g) = (a_m b) ⊗ (f·g)`, with
//! translation `D(a⊗f) = D(a)⊗f`. The right factor is presented on a
//! finite basis window; products leaving the window are a window error,
//! which closure checks count as boundary skips.

use std::sync::Arc;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::kernel::VertexAlgebraSpec;
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::vector::GradedVector;

type RightProductFn = dyn Fn(&BasisKey, &BasisKey) -> Result<GradedVector> + Send + Sync;

/// A commutative unital algebra on an explicit finite basis.
#[derive(Clone)]
pub struct RightFactor {
    pub name: String,
    pub basis: Vec<BasisKey>,
    pub unit: BasisKey,
    product: Arc<RightProductFn>,
}

impl RightFactor {
    pub fn product(&self, f: &BasisKey, g: &BasisKey) -> Result<GradedVector> {
        (self.product)(f, g)
    }

    /// Laurent monomials `t^n` for `n` in `lo..=hi`; products falling
    /// outside the window are a window error.
    pub fn laurent_window(lo: i64, hi: i64) -> Self {
        RightFactor {
            name: format!("laurent[{lo},{hi}]"),
            basis: (lo..=hi).map(BasisKey::Laurent).collect(),
            unit: BasisKey::Laurent(0),
            product: Arc::new(move |f, g| match (f, g) {
                (BasisKey::Laurent(p), BasisKey::Laurent(q)) => {
                    let s = p + q;
                    if s < lo || s > hi {
                        Err(CoreError::Window {
                            detail: format!("t^{p}·t^{q} leaves the window [{lo},{hi}]"),
                        })
                    } else {
                        Ok(GradedVector::basis(BasisKey::Laurent(s)))
                    }
                }
                _ => Err(CoreError::Domain {
                    rule: "laurent product".into(),
                    key: format!("{f}·{g}"),
                }),
            }),
        }
    }

    /// Divided powers `s_0..s_hi` as a plain commutative algebra (used as
    /// a right factor carrying the classical integration operator).
    pub fn divided_window(hi: u32) -> Self {
        RightFactor {
            name: format!("divided[0,{hi}]"),
            basis: (0..=hi).map(BasisKey::Mono).collect(),
            unit: BasisKey::Mono(0),
            product: Arc::new(move |f, g| match (f, g) {
                (BasisKey::Mono(p), BasisKey::Mono(q)) => {
                    let s = p + q;
                    if s > hi {
                        Err(CoreError::Window {
                            detail: format!("t_{p}·t_{q} leaves the window [0,{hi}]"),
                        })
                    } else {
                        Ok(GradedVector::term(
                            BasisKey::Mono(s),
                            Scalar::binomial(s as i64, *q as u64),
                        ))
                    }
                }
                _ => Err(CoreError::Domain {
                    rule: "divided product".into(),
                    key: format!("{f}·{g}"),
                }),
            }),
        }
    }
}

/// Tensor parameters.
#[derive(Clone)]
pub struct TensorSpec {
    pub left: VertexAlgebraSpec,
    pub right: RightFactor,
}

/// Builds `V ⊗ A` with grading from the left factor.
pub fn tensor_build(spec: &TensorSpec) -> VertexAlgebraSpec {
    let left = spec.left.clone();
    let right = spec.right.clone();
    let name = format!("{}⊗{}", left.name, right.name);

    let basis_left = left.clone();
    let basis_right = right.clone();
    let oracle_left = left.clone();
    let oracle_right = right.clone();
    let support_left = left.clone();

    let translation = {
        let d = left
            .translation
            .clone()
            .expect("tensor construction needs a translation on the left factor");
        LinearRule::new(format!("{}⊗id", d.name()), move |k| {
            let BasisKey::Pair(l, r) = k else {
                return Err(CoreError::Domain {
                    rule: "tensor translation".into(),
                    key: k.to_string(),
                });
            };
            let dl = d.apply_basis(l)?;
            let mut out = GradedVector::zero();
            for (kl, c) in dl.iter() {
                out.add_term(BasisKey::pair(kl.clone(), (**r).clone()), c.clone());
            }
            Ok(out)
        })
        .with_homogeneity(1)
    };

    let mut built = VertexAlgebraSpec::new(
        name,
        left.kind,
        move |d| {
            basis_left
                .basis_at(d)
                .into_iter()
                .flat_map(|l| {
                    basis_right
                        .basis
                        .iter()
                        .map(move |r| BasisKey::pair(l.clone(), r.clone()))
                })
                .collect()
        },
        move |a, m, b| {
            let (BasisKey::Pair(al, ar), BasisKey::Pair(bl, br)) = (a, b) else {
                return Err(CoreError::Domain {
                    rule: "tensor oracle".into(),
                    key: format!("{a}, {b}"),
                });
            };
            let left_part = oracle_left.mode_basis(al, m, bl)?;
            if left_part.is_zero() {
                return Ok(GradedVector::zero());
            }
            let right_part = oracle_right.product(ar, br)?;
            let mut out = GradedVector::zero();
            for (kl, cl) in left_part.iter() {
                for (kr, cr) in right_part.iter() {
                    out.add_term(BasisKey::pair(kl.clone(), kr.clone()), cl * cr);
                }
            }
            Ok(out)
        },
        move |a, b| {
            let (BasisKey::Pair(al, _), BasisKey::Pair(bl, _)) = (a, b) else {
                return 0;
            };
            support_left.support_keys(al, bl)
        },
    )
    .with_translation(translation);
    built.degree_floor = left.degree_floor;
    if let Some(v) = &left.vacuum {
        built = built.with_vacuum(BasisKey::pair(v.clone(), right.unit.clone()));
    }
    built
}

/// Lifts an operator on the right factor to `Id ⊗ P` on the tensor
/// algebra.
pub fn lift_right_operator(p: LinearRule) -> LinearRule {
    let hom = p.homogeneity;
    let mut rule = LinearRule::new(format!("id⊗{}", p.name()), move |k| {
        let BasisKey::Pair(l, r) = k else {
            return Err(CoreError::Domain {
                rule: "id⊗P".into(),
                key: k.to_string(),
            });
        };
        let pr = p.apply_basis(r)?;
        let mut out = GradedVector::zero();
        for (kr, c) in pr.iter() {
            out.add_term(BasisKey::pair((**l).clone(), kr.clone()), c.clone());
        }
        Ok(out)
    });
    // Right-factor keys have weight 0, so the lift is level preserving
    // regardless of the right operator's own index shift.
    rule.homogeneity = hom.map(|_| 0);
    rule
}

/// The projection of a Laurent window onto strictly negative powers: the
/// classical weight -1 splitting of `ℚ((t))`.
pub fn laurent_negative_projection() -> LinearRule {
    LinearRule::new("proj(t⁻¹ℚ[t⁻¹])", |k| match k {
        BasisKey::Laurent(p) if *p < 0 => Ok(GradedVector::basis(k.clone())),
        BasisKey::Laurent(_) => Ok(GradedVector::zero()),
        other => Err(CoreError::Domain {
            rule: "laurent projection".into(),
            key: other.to_string(),
        }),
    })
    .with_homogeneity(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::commutative::{borcherds_embed, divided_power_algebra};

    fn dp_tensor() -> VertexAlgebraSpec {
        tensor_build(&TensorSpec {
            left: borcherds_embed(divided_power_algebra()),
            right: RightFactor::laurent_window(-4, 4),
        })
    }

    fn pair(m: u32, n: i64) -> GradedVector {
        GradedVector::basis(BasisKey::pair(BasisKey::Mono(m), BasisKey::Laurent(n)))
    }

    #[test]
    fn unit_right_factor_reduces_to_left_modes() {
        let v = dp_tensor();
        // (t_1 ⊗ 1)_{-1} (t_1 ⊗ 1) = (t_1)_{-1}t_1 ⊗ 1 = 2 t_2 ⊗ 1.
        let a = pair(1, 0);
        assert_eq!(
            v.mode(&a, -1, &a).unwrap(),
            pair(2, 0).scaled(&Scalar::from_int(2))
        );
    }

    #[test]
    fn right_products_multiply() {
        let v = dp_tensor();
        // (t_0⊗t)_{-1}(t_0⊗t) = t_0 ⊗ t².
        let a = pair(0, 1);
        assert_eq!(v.mode(&a, -1, &a).unwrap(), pair(0, 2));
    }

    #[test]
    fn translation_acts_on_left() {
        let v = dp_tensor();
        let d = v.translation.as_ref().unwrap();
        assert_eq!(d.apply(&pair(1, -1)).unwrap(), pair(0, -1));
        assert!(d.apply(&pair(0, 3)).unwrap().is_zero());
    }

    #[test]
    fn window_breach_is_reported() {
        let v = dp_tensor();
        let a = pair(0, 3);
        match v.mode(&a, -1, &a) {
            Err(CoreError::Window { .. }) => {}
            other => panic!("expected window error, got {other:?}"),
        }
    }
}
