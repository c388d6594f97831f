//! Rule-based linear maps: a total function on basis indices, extended
//! linearly. Rules carry optional metadata — a declared homogeneity degree
//! and a domain predicate. Declared metadata is a claim for checkers to
//! verify, not an assumption.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::vector::GradedVector;

type RuleFn = dyn Fn(&BasisKey) -> Result<GradedVector> + Send + Sync;
type DomainFn = dyn Fn(&BasisKey) -> bool + Send + Sync;

/// A linear map given by its action on basis indices.
#[derive(Clone)]
pub struct LinearRule {
    name: String,
    rule: Arc<RuleFn>,
    /// Claimed homogeneity degree N: wt(f(b)) = wt(b) + N on the domain.
    pub homogeneity: Option<i64>,
    domain: Option<Arc<DomainFn>>,
}

impl std::fmt::Debug for LinearRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinearRule({})", self.name)
    }
}

impl LinearRule {
    pub fn new(
        name: impl Into<String>,
        rule: impl Fn(&BasisKey) -> Result<GradedVector> + Send + Sync + 'static,
    ) -> Self {
        LinearRule {
            name: name.into(),
            rule: Arc::new(rule),
            homogeneity: None,
            domain: None,
        }
    }

    pub fn with_homogeneity(mut self, n: i64) -> Self {
        self.homogeneity = Some(n);
        self
    }

    pub fn with_domain(
        mut self,
        pred: impl Fn(&BasisKey) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.domain = Some(Arc::new(pred));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Applies the rule to a single basis index, enforcing the domain
    /// predicate.
    pub fn apply_basis(&self, key: &BasisKey) -> Result<GradedVector> {
        if let Some(pred) = &self.domain {
            if !pred(key) {
                return Err(CoreError::Domain {
                    rule: self.name.clone(),
                    key: key.to_string(),
                });
            }
        }
        (self.rule)(key)
    }

    /// Linear extension to vectors.
    pub fn apply(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (k, c) in v.iter() {
            out.add_scaled(&self.apply_basis(k)?, c);
        }
        Ok(out)
    }

    /// f^j(v).
    pub fn apply_power(&self, v: &GradedVector, j: u32) -> Result<GradedVector> {
        let mut acc = v.clone();
        for _ in 0..j {
            if acc.is_zero() {
                break;
            }
            acc = self.apply(&acc)?;
        }
        Ok(acc)
    }

    /// f^j(v)/j!.
    pub fn apply_divided_power(&self, v: &GradedVector, j: u32) -> Result<GradedVector> {
        let pow = self.apply_power(v, j)?;
        Ok(pow.scaled(&Scalar::factorial(j as u64).inverse().unwrap()))
    }

    pub fn zero() -> Self {
        LinearRule::new("0", |_| Ok(GradedVector::zero()))
    }

    pub fn identity() -> Self {
        LinearRule::new("id", |k| Ok(GradedVector::basis(k.clone()))).with_homogeneity(0)
    }

    /// c·Id.
    pub fn scalar(c: Scalar) -> Self {
        let name = format!("{c}·id");
        LinearRule::new(name, move |k| {
            Ok(GradedVector::term(k.clone(), c.clone()))
        })
        .with_homogeneity(0)
    }

    /// A linear combination Σ cᵢ·fᵢ.
    pub fn combine(name: impl Into<String>, parts: Vec<(Scalar, LinearRule)>) -> Self {
        LinearRule::new(name, move |k| {
            let mut out = GradedVector::zero();
            for (c, f) in &parts {
                out.add_scaled(&f.apply_basis(k)?, c);
            }
            Ok(out)
        })
    }

    /// g∘f.
    pub fn compose(name: impl Into<String>, f: LinearRule, g: LinearRule) -> Self {
        let hom = match (f.homogeneity, g.homogeneity) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let mut rule = LinearRule::new(name, move |k| g.apply(&f.apply_basis(k)?));
        rule.homogeneity = hom;
        rule
    }

    /// A finite rule table; indices missing from the table map to zero
    /// (`strict = false`) or are a domain breach (`strict = true`).
    pub fn from_table(
        name: impl Into<String>,
        table: BTreeMap<BasisKey, GradedVector>,
        strict: bool,
    ) -> Self {
        let name = name.into();
        if strict {
            let keys: std::collections::BTreeSet<BasisKey> = table.keys().cloned().collect();
            LinearRule::new(name, move |k| {
                Ok(table.get(k).cloned().unwrap_or_default())
            })
            .with_domain(move |k| keys.contains(k))
        } else {
            LinearRule::new(name, move |k| {
                Ok(table.get(k).cloned().unwrap_or_default())
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: u32) -> BasisKey {
        BasisKey::Mono(m)
    }

    /// Divided-power shift t_m -> t_{m+1}.
    fn shift() -> LinearRule {
        LinearRule::new("P", |k| match k {
            BasisKey::Mono(m) => Ok(GradedVector::basis(t(m + 1))),
            _ => Ok(GradedVector::zero()),
        })
        .with_homogeneity(-1)
    }

    #[test]
    fn shift_applied_to_multiple() {
        let p = shift();
        let x = GradedVector::term(t(0), Scalar::from_int(3));
        assert_eq!(
            p.apply(&x).unwrap(),
            GradedVector::term(t(1), Scalar::from_int(3))
        );
    }

    #[test]
    fn zero_rule_annihilates() {
        let z = LinearRule::zero();
        let x = GradedVector::from_terms([(t(0), Scalar::one()), (t(5), Scalar::ratio(1, 3))]);
        assert!(z.apply(&x).unwrap().is_zero());
    }

    #[test]
    fn domain_breach_is_reported() {
        let p = shift().with_domain(|k| matches!(k, BasisKey::Mono(m) if *m >= 1));
        let bad = GradedVector::basis(t(0));
        match p.apply(&bad) {
            Err(CoreError::Domain { key, .. }) => assert_eq!(key, "t_0"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn linearity_of_extension() {
        let p = shift();
        let x = GradedVector::from_terms([(t(0), Scalar::ratio(2, 3)), (t(2), Scalar::one())]);
        let y = GradedVector::from_terms([(t(0), Scalar::ratio(1, 3)), (t(3), Scalar::from_int(-2))]);
        let lhs = p.apply(&(&x + &y)).unwrap();
        let rhs = &p.apply(&x).unwrap() + &p.apply(&y).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn divided_powers_of_derivation() {
        let d = LinearRule::new("d", |k| match k {
            BasisKey::Mono(0) => Ok(GradedVector::zero()),
            BasisKey::Mono(m) => Ok(GradedVector::basis(t(m - 1))),
            _ => Ok(GradedVector::zero()),
        });
        let x = GradedVector::basis(t(3));
        assert_eq!(d.apply_power(&x, 3).unwrap(), GradedVector::basis(t(0)));
        assert_eq!(d.apply_power(&x, 4).unwrap(), GradedVector::zero());
        assert_eq!(
            d.apply_divided_power(&x, 2).unwrap(),
            GradedVector::term(t(1), Scalar::ratio(1, 2))
        );
    }
}
