//! The rank-one even lattice vertex algebra: states `u·e^{mα}` with `u` a
//! monomial in `α(-n)` and `(α|α) = 2N`, level 1, trivial two-cocycle
//! (admissible for rank one since every pairing `(mα|nα) = 2Nmn` is even).
//!
//! The vertex operator of a pure exponential is computed from the
//! exponential operator product
//!
//! ```text
//! Y(e^{mα}, z) = E⁻(-mα, z) E⁺(-mα, z) e_{mα} z^{mα},
//! E^±(α,z) = exp( Σ_{n ∈ ℤ±} (α(n)/n) z^{-n} ),
//! ```
//!
//! expanded exactly per z-coefficient: the annihilation exponential
//! truncates against the finitely many creation factors of the argument,
//! and the creation exponential contributes one partition sum per target
//! exponent. General states reduce to this base case by the same factor
//! stripping recursion as the free boson oracle.

use std::sync::Arc;

use dashmap::DashMap;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::kernel::{StructureKind, VertexAlgebraSpec};
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::vector::GradedVector;

/// Construction parameters: `(α|α) = 2N`.
#[derive(Clone, Copy, Debug)]
pub struct LatticeRank1Spec {
    pub n: u32,
}

/// All partitions of `total` into parts ≥ 1, ascending part order.
pub fn partitions(total: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            let mut p = acc.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        let top = max_part.min(remaining);
        for part in (1..=top).rev() {
            acc.push(part);
            rec(remaining - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec(total, total, &mut acc, &mut out);
    out
}

/// Basis of the given weight: `(partition, label m)` with
/// `Σ parts + N m² = degree`.
pub fn lattice_basis(n: u32, degree: i64) -> Vec<BasisKey> {
    if degree < 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut m = 0i64;
    while (n as i64) * m * m <= degree {
        for label in [m, -m] {
            if label == 0 && m != 0 {
                continue;
            }
            let rest = degree - (n as i64) * label * label;
            for p in partitions(rest as u32) {
                out.push(BasisKey::lattice(p, label, n));
            }
            if m == 0 {
                break;
            }
        }
        m += 1;
    }
    out.sort();
    out
}

struct LatticeOracle {
    /// `(α|α) = 2N`.
    norm: i64,
    n: u32,
    cache: DashMap<(BasisKey, i64, BasisKey), GradedVector>,
}

impl LatticeOracle {
    fn key(&self, modes: Vec<u32>, label: i64) -> BasisKey {
        BasisKey::lattice(modes, label, self.n)
    }

    /// `α(i)`, i ≥ 1: contraction with every matching creation factor
    /// (the exponential part is annihilated).
    fn annihilate(&self, i: u32, modes: &[u32], label: i64) -> GradedVector {
        let mut out = GradedVector::zero();
        for (r, &mm) in modes.iter().enumerate() {
            if mm == i {
                let mut rest = modes.to_vec();
                rest.remove(r);
                out.add_term(
                    self.key(rest, label),
                    Scalar::from_int(i as i64 * self.norm),
                );
            }
        }
        out
    }

    fn create(&self, j: u32, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in v.iter() {
            let BasisKey::Lattice { modes, label, .. } = k else { continue };
            let mut f = modes.clone();
            f.push(j);
            f.sort_unstable();
            out.add_term(self.key(f, *label), c.clone());
        }
        out
    }

    /// One mode of the pure exponential:
    /// `(e^{Mα})_mode (u·e^{Lα})`, i.e. the coefficient of
    /// `z^{-mode-1}` in `E⁻ E⁺ e_{Mα} z^{2NML} (u·e^{Lα})`.
    fn exponential_mode(
        &self,
        m_label: i64,
        mode: i64,
        modes: &[u32],
        l_label: i64,
    ) -> GradedVector {
        let e = -mode - 1;
        let shift = self.norm * m_label * l_label;
        let new_label = m_label + l_label;

        // Annihilation exponential: for each distinct creation mode j with
        // count c_j in the argument, removing t copies contributes
        // C(c_j, t) (-2NM)^t and lowers the z-exponent by j·t.
        let mut states: Vec<(i64, Scalar, Vec<u32>)> =
            vec![(0, Scalar::one(), modes.to_vec())];
        let mut distinct: Vec<u32> = modes.to_vec();
        distinct.dedup();
        for j in distinct {
            let count = modes.iter().filter(|&&x| x == j).count() as i64;
            let mut next = Vec::new();
            for (offset, coeff, rem) in &states {
                for t in 0..=count {
                    let factor = Scalar::binomial(count, t as u64)
                        * crate::scalar::Scalar::from_int(-self.norm * m_label)
                            .pow_u(t as u32);
                    if factor.is_zero() {
                        continue;
                    }
                    let mut rem2 = rem.clone();
                    for _ in 0..t {
                        let pos = rem2.iter().position(|&x| x == j).unwrap();
                        rem2.remove(pos);
                    }
                    next.push((offset - (j as i64) * t, coeff * &factor, rem2));
                }
            }
            states = next;
        }

        // Creation exponential: one partition sum per state reaching the
        // target exponent.
        let mut out = GradedVector::zero();
        for (offset, coeff, rem) in states {
            let need = e - shift - offset;
            if need < 0 {
                continue;
            }
            if need == 0 {
                out.add_term(self.key(rem.clone(), new_label), coeff.clone());
                continue;
            }
            for p in partitions(need as u32) {
                let mut c = coeff.clone();
                let mut i = 0;
                while i < p.len() {
                    let j = p[i];
                    let k_j = p[i..].iter().take_while(|&&x| x == j).count();
                    let base = Scalar::ratio(m_label, j as i64);
                    c = c * base.pow_u(k_j as u32)
                        * Scalar::factorial(k_j as u64).inverse().unwrap();
                    i += k_j;
                }
                if c.is_zero() {
                    continue;
                }
                let mut f = rem.clone();
                f.extend_from_slice(&p);
                f.sort_unstable();
                out.add_term(self.key(f, new_label), c);
            }
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
        let (
            BasisKey::Lattice {
                modes: fa,
                label: la,
                ..
            },
            BasisKey::Lattice {
                modes: fb,
                label: lb,
                ..
            },
        ) = (a, b)
        else {
            return Err(CoreError::Domain {
                rule: "lattice oracle".into(),
                key: format!("{a}, {b}"),
            });
        };
        let out = if fa.is_empty() {
            self.exponential_mode(*la, m, fb, *lb)
        } else {
            // Strip one creation factor, as in the free boson oracle, with
            // the zero-mode term included: α(0) acts as 2N·label.
            let n = fa[0];
            let u = self.key(fa[1..].to_vec(), *la);
            let n_i = n as i64;
            let mut acc = GradedVector::zero();
            let u_support = u.weight() + b.weight();
            let mut i = 0i64;
            while m + i < u_support {
                let w = self.mode(&u, m + i, b)?;
                if !w.is_zero() {
                    let created = self.create((n_i + i) as u32, &w);
                    acc.add_scaled(&created, &Scalar::binomial(n_i + i - 1, i as u64));
                }
                i += 1;
            }
            let sign = if n % 2 == 0 {
                Scalar::from_int(-1)
            } else {
                Scalar::one()
            };
            // i = 0: the zero mode is scalar on each label sector.
            if *lb != 0 {
                let zero_mode = GradedVector::term(
                    b.clone(),
                    Scalar::from_int(self.norm * lb),
                );
                let w = self.mode_vec(&u, m - n_i, &zero_mode)?;
                acc.add_scaled(&w, &sign);
            }
            let mut distinct: Vec<u32> = fb.clone();
            distinct.dedup();
            for i_mode in distinct {
                let contracted = self.annihilate(i_mode, fb, *lb);
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

/// Translation operator: mode bumps on the monomial plus
/// `D e^{mα} = m·α(-1) e^{mα}`.
pub fn lattice_translation(n: u32) -> LinearRule {
    LinearRule::new("L(-1)", move |k| {
        let BasisKey::Lattice { modes, label, .. } = k else {
            return Err(CoreError::Domain {
                rule: "L(-1)".into(),
                key: k.to_string(),
            });
        };
        let mut out = GradedVector::zero();
        for (r, &mm) in modes.iter().enumerate() {
            let mut f = modes.clone();
            f[r] = mm + 1;
            out.add_term(BasisKey::lattice(f, *label, n), Scalar::from_int(mm as i64));
        }
        if *label != 0 {
            let mut f = modes.clone();
            f.push(1);
            out.add_term(BasisKey::lattice(f, *label, n), Scalar::from_int(*label));
        }
        Ok(out)
    })
    .with_homogeneity(1)
}

/// Builds the rank-one lattice vertex operator algebra.
pub fn lattice_rank1_build(spec: &LatticeRank1Spec) -> Result<VertexAlgebraSpec> {
    if spec.n == 0 {
        return Err(CoreError::Solve {
            detail: "the lattice norm parameter must be positive".into(),
        });
    }
    let n = spec.n;
    let oracle = Arc::new(LatticeOracle {
        norm: 2 * n as i64,
        n,
        cache: DashMap::new(),
    });
    let omega = GradedVector::term(
        BasisKey::lattice(vec![1, 1], 0, n),
        Scalar::ratio(1, 4 * n as i64),
    );
    let o = oracle.clone();
    Ok(VertexAlgebraSpec::new(
        format!("lattice(2N={})", 2 * n),
        StructureKind::VertexOperatorAlgebra,
        move |d| lattice_basis(n, d),
        move |a, m, b| o.mode(a, m, b),
        |a, b| a.weight() + b.weight(),
    )
    .with_degree_floor(0)
    .with_vacuum(BasisKey::lattice(vec![], 0, n))
    .with_translation(lattice_translation(n))
    .with_virasoro(omega))
}

/// The lattice label of a basis state.
pub fn label_of(key: &BasisKey) -> Option<i64> {
    match key {
        BasisKey::Lattice { label, .. } => Some(*label),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(modes: &[u32], label: i64) -> GradedVector {
        GradedVector::basis(BasisKey::lattice(modes.to_vec(), label, 1))
    }

    fn build() -> VertexAlgebraSpec {
        lattice_rank1_build(&LatticeRank1Spec { n: 1 }).unwrap()
    }

    #[test]
    fn basis_enumeration() {
        // degree 0: only the vacuum; degree 1: α(-1)1 and e^{±α}.
        assert_eq!(lattice_basis(1, 0).len(), 1);
        assert_eq!(lattice_basis(1, 1).len(), 3);
        // degree 4 includes e^{±2α}.
        assert!(lattice_basis(1, 4)
            .iter()
            .any(|k| label_of(k) == Some(2)));
    }

    #[test]
    fn exponential_leading_modes() {
        let v = build();
        let ea = st(&[], 1);
        let eminus = st(&[], -1);
        // (e^α)_1 e^{-α} = 1 and (e^α)_0 e^{-α} = α(-1)1.
        assert_eq!(v.mode(&ea, 1, &eminus).unwrap(), st(&[], 0));
        assert_eq!(v.mode(&ea, 0, &eminus).unwrap(), st(&[1], 0));
        // Y(e^α, z) e^α ∈ z^{2N} V[[z]]: all modes ≥ -2N vanish.
        for j in -2..3 {
            assert!(v.mode(&ea, j, &ea).unwrap().is_zero(), "mode {j}");
        }
        assert_eq!(v.mode(&ea, -3, &ea).unwrap(), st(&[], 2));
    }

    #[test]
    fn label_sectors_add() {
        let v = build();
        let ea = st(&[1], 1);
        let eb = st(&[], -1);
        for m in -4..4 {
            let out = v.mode(&ea, m, &eb).unwrap();
            for (k, _) in out.iter() {
                assert_eq!(label_of(k), Some(0));
            }
        }
    }

    #[test]
    fn creation_and_vacuum() {
        let v = build();
        let ea = st(&[], 1);
        let one = st(&[], 0);
        assert_eq!(v.mode(&ea, -1, &one).unwrap(), ea);
        for m in 0..4 {
            assert!(v.mode(&ea, m, &one).unwrap().is_zero());
        }
        // D e^α = α(-1) e^α via modes and via the rule.
        assert_eq!(v.translation_from_modes(&ea).unwrap(), st(&[1], 1));
        assert_eq!(
            v.translation.as_ref().unwrap().apply(&ea).unwrap(),
            st(&[1], 1)
        );
    }

    #[test]
    fn conformal_structure() {
        use crate::kernel::check_voa_axioms;
        let v = build();
        let report = check_voa_axioms(&v, 3);
        assert!(report.passed(), "{report}");
        assert!(report.notes.iter().any(|n| n == "central charge 1"));
    }

    #[test]
    fn axiom_suite_small_window() {
        use crate::kernel::{check_axiom_suite, SuiteOptions};
        let v = build();
        let report = check_axiom_suite(
            &v,
            SuiteOptions {
                cutoff: 2,
                height: 4,
                kmax: 10,
            },
        );
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn exponential_locality_witness() {
        use crate::kernel::check_weak_commutativity;
        let v = build();
        let ea = st(&[], 1);
        let eminus = st(&[], -1);
        // a_j b = 0 for j ≥ 2 but a_1 b = 1 ≠ 0, so the minimal witness on
        // (e^α, e^{-α}, e^α) is 1 + 1 = 2.
        let r = check_weak_commutativity(&v, &ea, &eminus, &ea, 4, 10);
        assert_eq!(r.witness_k, Some(2), "{r}");
        // For the pair (e^α, e^α) every nonnegative mode vanishes, so the
        // fields already commute: witness 0.
        let r0 = check_weak_commutativity(&v, &ea, &ea, &eminus, 4, 10);
        assert_eq!(r0.witness_k, Some(0), "{r0}");
    }
}
