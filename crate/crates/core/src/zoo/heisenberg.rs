//! The rank-r level-k free boson (Heisenberg) vertex operator algebra.
//!
//! States are monomials in creation operators `α_g(-n)`, n ≥ 1, applied to
//! the vacuum. The mode oracle moves annihilation modes to the right and
//! collects central terms from `[α(m), β(n)] = m (α|β) δ_{m+n,0} k`,
//! through the iterate identity
//!
//! ```text
//! (α_g(-n) u)_m = Σ_{i≥0} C(n+i-1, i) ( α_g(-n-i) ∘ u_{m+i}
//!                                        - (-1)^n u_{m-n-i} ∘ α_g(i) )
//! ```
//!
//! which strips one creation factor per step; every sum is finite by the
//! truncation bounds, so results are exact.

use std::sync::Arc;

use dashmap::DashMap;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::kernel::{StructureKind, VertexAlgebraSpec};
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::vector::GradedVector;

/// Construction parameters of a free boson algebra.
#[derive(Clone, Debug)]
pub struct HeisenbergSpec {
    pub rank: u8,
    pub level: Scalar,
    /// Symmetric nondegenerate Gram matrix of the generator pairings.
    pub gram: Vec<Vec<Scalar>>,
}

impl HeisenbergSpec {
    pub fn rank1(level: Scalar) -> Self {
        HeisenbergSpec {
            rank: 1,
            level,
            gram: vec![vec![Scalar::one()]],
        }
    }
}

/// All Fock monomials of the given total weight, canonically sorted.
pub fn fock_basis(rank: u8, degree: i64) -> Vec<BasisKey> {
    if degree < 0 {
        return vec![];
    }
    let mut out = Vec::new();
    // Factors chosen in non-increasing (mode, generator) order.
    fn rec(
        rank: u8,
        remaining: i64,
        max_mode: u32,
        max_gen: u8,
        acc: &mut Vec<(u8, u32)>,
        out: &mut Vec<BasisKey>,
    ) {
        if remaining == 0 {
            out.push(BasisKey::fock(acc.clone()));
            return;
        }
        let mut n = max_mode.min(remaining as u32);
        while n >= 1 {
            let g_top = if n == max_mode { max_gen } else { rank - 1 };
            for g in (0..=g_top).rev() {
                acc.push((g, n));
                rec(rank, remaining - n as i64, n, g, acc, out);
                acc.pop();
            }
            n -= 1;
        }
    }
    let mut acc = Vec::new();
    rec(rank, degree, degree as u32, rank - 1, &mut acc, &mut out);
    out.sort();
    out
}

/// Exact inverse of a small rational matrix by Gauss-Jordan elimination.
pub fn invert_matrix(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let lead = a[col][col].clone().inverse().unwrap();
        for j in 0..n {
            a[col][j] = &a[col][j] * &lead;
            inv[col][j] = &inv[col][j] * &lead;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = &a[col][j] * &f;
                    a[r][j] -= x;
                    let y = &inv[col][j] * &f;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

struct FockOracle {
    level: Scalar,
    gram: Vec<Vec<Scalar>>,
    cache: DashMap<(BasisKey, i64, BasisKey), GradedVector>,
}

impl FockOracle {
    /// α_s(i), i ≥ 1: contraction against every matching creation factor.
    fn annihilate(&self, s: u8, i: u32, factors: &[(u8, u32)]) -> GradedVector {
        let mut out = GradedVector::zero();
        for (r, &(g, n)) in factors.iter().enumerate() {
            if n == i {
                let pairing = &self.gram[s as usize][g as usize];
                if pairing.is_zero() {
                    continue;
                }
                let mut rest = factors.to_vec();
                rest.remove(r);
                out.add_term(
                    BasisKey::Fock(rest),
                    Scalar::from_int(i as i64) * pairing * &self.level,
                );
            }
        }
        out
    }

    /// α_s(-n), n ≥ 1: append a creation factor to every term.
    fn create(&self, s: u8, n: u32, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in v.iter() {
            let BasisKey::Fock(factors) = k else { continue };
            let mut f = factors.clone();
            f.push((s, n));
            f.sort_unstable();
            out.add_term(BasisKey::Fock(f), c.clone());
        }
        out
    }

    fn mode_vec(&self, a: &BasisKey, m: i64, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (k, c) in v.iter() {
            out.add_scaled(&self.mode(a, m, k)?, c);
        }
        Ok(out)
    }

    fn mode(&self, a: &BasisKey, m: i64, b: &BasisKey) -> Result<GradedVector> {
        let cache_key = (a.clone(), m, b.clone());
        if let Some(hit) = self.cache.get(&cache_key) {
            return Ok(hit.clone());
        }
        let (BasisKey::Fock(fa), BasisKey::Fock(fb)) = (a, b) else {
            return Err(CoreError::Domain {
                rule: "free-boson oracle".into(),
                key: format!("{a}, {b}"),
            });
        };
        let out = if fa.is_empty() {
            if m == -1 {
                GradedVector::basis(b.clone())
            } else {
                GradedVector::zero()
            }
        } else {
            let (g, n) = fa[0];
            let u = BasisKey::Fock(fa[1..].to_vec());
            let n_i = n as i64;
            let mut acc = GradedVector::zero();
            // Creation half: i ranges until u_{m+i} b vanishes by truncation.
            let u_support = u.weight() + b.weight();
            let mut i = 0i64;
            while m + i < u_support {
                let w = self.mode(&u, m + i, b)?;
                if !w.is_zero() {
                    let created = self.create(g, (n_i + i) as u32, &w);
                    acc.add_scaled(&created, &Scalar::binomial(n_i + i - 1, i as u64));
                }
                i += 1;
            }
            // Annihilation half: only modes present in b contract.
            let sign = if n % 2 == 0 {
                Scalar::from_int(-1)
            } else {
                Scalar::one()
            };
            let mut modes: Vec<u32> = fb.iter().map(|&(_, mm)| mm).collect();
            modes.sort_unstable();
            modes.dedup();
            for i_mode in modes {
                let contracted = self.annihilate(g, i_mode, fb);
                if contracted.is_zero() {
                    continue;
                }
                let i = i_mode as i64;
                let w = self.mode_vec(&u, m - n_i - i, &contracted)?;
                acc.add_scaled(&w, &(Scalar::binomial(n_i + i - 1, i as u64) * sign.clone()));
            }
            acc
        };
        self.cache.insert(cache_key, out.clone());
        Ok(out)
    }
}

/// Translation operator: `D` bumps each creation mode by one with a
/// factor of the mode, `D(... α(-n) ...) = Σ n · (... α(-n-1) ...)`.
pub fn translation_rule() -> LinearRule {
    LinearRule::new("L(-1)", |k| {
        let BasisKey::Fock(factors) = k else {
            return Err(CoreError::Domain {
                rule: "L(-1)".into(),
                key: k.to_string(),
            });
        };
        let mut out = GradedVector::zero();
        for (r, &(g, n)) in factors.iter().enumerate() {
            let mut f = factors.clone();
            f[r] = (g, n + 1);
            f.sort_unstable();
            out.add_term(BasisKey::Fock(f), Scalar::from_int(n as i64));
        }
        Ok(out)
    })
    .with_homogeneity(1)
}

/// Builds the free boson VOA. The conformal vector is the level-normalized
/// quadratic `(1/2k) Σ_{i,j} (G⁻¹)_{ij} α_i(-1)α_j(-1)1`.
pub fn heisenberg_build(spec: &HeisenbergSpec) -> Result<VertexAlgebraSpec> {
    if spec.level.is_zero() {
        return Err(CoreError::Solve {
            detail: "level must be nonzero".into(),
        });
    }
    let r = spec.rank as usize;
    if spec.gram.len() != r || spec.gram.iter().any(|row| row.len() != r) {
        return Err(CoreError::Solve {
            detail: "Gram matrix shape does not match the rank".into(),
        });
    }
    for i in 0..r {
        for j in 0..r {
            if spec.gram[i][j] != spec.gram[j][i] {
                return Err(CoreError::Solve {
                    detail: "Gram matrix is not symmetric".into(),
                });
            }
        }
    }
    let gram_inv = invert_matrix(&spec.gram).ok_or_else(|| CoreError::Solve {
        detail: "Gram matrix is degenerate".into(),
    })?;

    let oracle = Arc::new(FockOracle {
        level: spec.level.clone(),
        gram: spec.gram.clone(),
        cache: DashMap::new(),
    });

    let mut omega = GradedVector::zero();
    let half_inv_level = Scalar::ratio(1, 2) * spec.level.clone().inverse().unwrap();
    for i in 0..r {
        for j in 0..r {
            if !gram_inv[i][j].is_zero() {
                omega.add_term(
                    BasisKey::fock(vec![(i as u8, 1), (j as u8, 1)]),
                    &gram_inv[i][j] * &half_inv_level,
                );
            }
        }
    }

    let rank = spec.rank;
    let name = format!("heisenberg(rank {}, level {})", spec.rank, spec.level);
    let o = oracle.clone();
    Ok(VertexAlgebraSpec::new(
        name,
        StructureKind::VertexOperatorAlgebra,
        move |d| fock_basis(rank, d),
        move |a, m, b| o.mode(a, m, b),
        |a, b| a.weight() + b.weight(),
    )
    .with_degree_floor(0)
    .with_vacuum(BasisKey::fock(vec![]))
    .with_translation(translation_rule())
    .with_virasoro(omega))
}

/// The level-k integration operator in the direction of generator `s`:
///
/// ```text
/// u·α_s(-1)^m 1  ↦  u·α_s(-1)^{m+1} 1 / (k (α_s|α_s) (m+1))
/// ```
///
/// where `u` collects every factor other than `α_s(-1)`. It is a right
/// inverse of `d = α_s(1)`, which acts as `k (α_s|α_s) ∂/∂α_s(-1)`;
/// the pairing normalization makes `d∘P = Id` exact for any Gram matrix.
pub fn integration_operator(spec: &HeisenbergSpec, s: u8) -> LinearRule {
    let norm = (&spec.level * &spec.gram[s as usize][s as usize])
        .inverse()
        .expect("nondegenerate direction");
    LinearRule::new(format!("∫ dα_{s}"), move |k| {
        let BasisKey::Fock(factors) = k else {
            return Err(CoreError::Domain {
                rule: "integration".into(),
                key: k.to_string(),
            });
        };
        let m = factors.iter().filter(|&&(g, n)| g == s && n == 1).count() as i64;
        let mut f = factors.clone();
        f.push((s, 1));
        f.sort_unstable();
        Ok(GradedVector::term(
            BasisKey::Fock(f),
            &norm * &Scalar::ratio(1, m + 1),
        ))
    })
    .with_homogeneity(1)
}

/// The annihilation derivation `d = α_s(1)`.
pub fn annihilation_operator(spec: &HeisenbergSpec, s: u8) -> LinearRule {
    let oracle = FockOracle {
        level: spec.level.clone(),
        gram: spec.gram.clone(),
        cache: DashMap::new(),
    };
    LinearRule::new(format!("α_{s}(1)"), move |k| {
        let BasisKey::Fock(factors) = k else {
            return Err(CoreError::Domain {
                rule: "annihilation".into(),
                key: k.to_string(),
            });
        };
        Ok(oracle.annihilate(s, 1, factors))
    })
    .with_homogeneity(-1)
}

/// The lift of `α ↦ -α` on every generator: a sign per creation factor.
pub fn sign_involution() -> LinearRule {
    LinearRule::new("σ", |k| {
        let BasisKey::Fock(factors) = k else {
            return Err(CoreError::Domain {
                rule: "σ".into(),
                key: k.to_string(),
            });
        };
        let sign = if factors.len() % 2 == 0 {
            Scalar::one()
        } else {
            Scalar::from_int(-1)
        };
        Ok(GradedVector::term(k.clone(), sign))
    })
    .with_homogeneity(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(factors: &[(u8, u32)]) -> GradedVector {
        GradedVector::basis(BasisKey::fock(factors.to_vec()))
    }

    fn build(level: i64) -> VertexAlgebraSpec {
        heisenberg_build(&HeisenbergSpec::rank1(Scalar::from_int(level))).unwrap()
    }

    #[test]
    fn basis_counts_match_partitions() {
        // rank 1: p(0..6) = 1,1,2,3,5,7,11.
        let expect = [1, 1, 2, 3, 5, 7, 11];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(fock_basis(1, d as i64).len(), *e, "degree {d}");
        }
        // rank 2, degree 2: {a(-2)}, {b(-2)}, {a(-1)^2}, {a(-1)b(-1)}, {b(-1)^2}.
        assert_eq!(fock_basis(2, 2).len(), 5);
    }

    #[test]
    fn single_contraction() {
        // (α(-1)1)_1 (α(-1)1) = k·1 at Gram [[1]].
        for level in [1, 2] {
            let v = build(level);
            let a = gen(&[(0, 1)]);
            assert_eq!(
                v.mode(&a, 1, &a).unwrap(),
                gen(&[]).scaled(&Scalar::from_int(level))
            );
            assert!(v.mode(&a, 0, &a).unwrap().is_zero());
        }
    }

    #[test]
    fn pure_creation() {
        let v = build(1);
        let a = gen(&[(0, 1)]);
        assert_eq!(v.mode(&a, -1, &a).unwrap(), gen(&[(0, 1), (0, 1)]));
        // D a = a_{-2} 1 = α(-2)1, matching the translation rule.
        assert_eq!(v.translation_from_modes(&a).unwrap(), gen(&[(0, 2)]));
        assert_eq!(
            v.translation.as_ref().unwrap().apply(&a).unwrap(),
            gen(&[(0, 2)])
        );
    }

    #[test]
    fn orthogonal_rank2_has_no_contraction() {
        let spec = HeisenbergSpec {
            rank: 2,
            level: Scalar::one(),
            gram: vec![
                vec![Scalar::one(), Scalar::zero()],
                vec![Scalar::zero(), Scalar::one()],
            ],
        };
        let v = heisenberg_build(&spec).unwrap();
        let a = gen(&[(0, 1)]);
        let b = gen(&[(1, 1)]);
        for j in 0..4 {
            assert!(v.mode(&a, j, &b).unwrap().is_zero(), "mode {j}");
        }
        assert_eq!(v.mode(&a, -1, &b).unwrap(), gen(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn integration_is_right_inverse_of_annihilation() {
        let spec = HeisenbergSpec::rank1(Scalar::from_int(2));
        let p = integration_operator(&spec, 0);
        let d = annihilation_operator(&spec, 0);
        // P(1) = (1/k) α(-1)1 and P(α(-1)1) = (1/2k) α(-1)²1.
        assert_eq!(
            p.apply(&gen(&[])).unwrap(),
            gen(&[(0, 1)]).scaled(&Scalar::ratio(1, 2))
        );
        assert_eq!(
            p.apply(&gen(&[(0, 1)])).unwrap(),
            gen(&[(0, 1), (0, 1)]).scaled(&Scalar::ratio(1, 4))
        );
        for degree in 0..5 {
            for key in fock_basis(1, degree) {
                let x = GradedVector::basis(key);
                assert_eq!(d.apply(&p.apply(&x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn virasoro_axioms() {
        use crate::kernel::check_voa_axioms;
        for level in [1, 2] {
            let v = build(level);
            let report = check_voa_axioms(&v, 4);
            assert!(report.passed(), "{report}");
            assert!(
                report.notes.iter().any(|n| n == "central charge 1"),
                "notes: {:?}",
                report.notes
            );
        }
    }

    #[test]
    fn axiom_suite_small_window() {
        use crate::kernel::{check_axiom_suite, SuiteOptions};
        let v = build(1);
        let report = check_axiom_suite(
            &v,
            SuiteOptions {
                cutoff: 3,
                height: 4,
                kmax: 8,
            },
        );
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn weak_commutativity_witness_is_two() {
        use crate::kernel::check_weak_commutativity;
        let v = build(1);
        let a = gen(&[(0, 1)]);
        let one = gen(&[]);
        let r = check_weak_commutativity(&v, &a, &a, &one, 4, 8);
        assert_eq!(r.witness_k, Some(2), "{r}");
    }

    #[test]
    fn jacobi_on_generator_triple() {
        use crate::kernel::check_jacobi;
        let v = build(1);
        let a = gen(&[(0, 1)]);
        let r = check_jacobi(&v, &a, &a, &a, 4, 8);
        assert!(r.passed(), "{r}");
        assert_eq!(r.witness_k, Some(2));
        // l = 0 fails: at the z0^{-2} z2^0 cell the shifted product gives
        // α(1)α(-1)²1 = 2α(-1)1 while the iterate gives (α(1)α(-1)1)_{-1}·
        // α(-1)1 = α(-1)1; two powers of (z0+z2) telescope the mismatch.
        assert_eq!(r.witness_l, Some(2));
    }
}
