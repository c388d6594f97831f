//! Sparse graded vectors: finitely supported rational combinations of
//! basis indices. Zero coefficients are never stored, so map equality is
//! vector equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::basis::BasisKey;
use crate::scalar::Scalar;

/// A finitely supported map `BasisKey -> nonzero Scalar`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct GradedVector {
    terms: BTreeMap<BasisKey, Scalar>,
}

impl GradedVector {
    pub fn zero() -> Self {
        GradedVector::default()
    }

    /// The single term `c·key`; zero if `c` is zero.
    pub fn term(key: BasisKey, c: Scalar) -> Self {
        let mut v = GradedVector::zero();
        v.add_term(key, c);
        v
    }

    pub fn basis(key: BasisKey) -> Self {
        GradedVector::term(key, Scalar::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisKey, Scalar)>) -> Self {
        let mut v = GradedVector::zero();
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.terms.keys()
    }

    /// Coefficient of `key` (zero when absent).
    pub fn coeff(&self, key: &BasisKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c·key` in place, pruning a resulting zero.
    pub fn add_term(&mut self, key: BasisKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GradedVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, x) in other.iter() {
            self.add_term(k.clone(), c * x);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> GradedVector {
        let mut out = GradedVector::zero();
        out.add_scaled(self, c);
        out
    }

    /// The component of weight `w`.
    pub fn component(&self, w: i64) -> GradedVector {
        GradedVector {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.weight() == w)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into weight-homogeneous components, keyed by weight.
    pub fn components(&self) -> BTreeMap<i64, GradedVector> {
        let mut out: BTreeMap<i64, GradedVector> = BTreeMap::new();
        for (k, c) in self.iter() {
            out.entry(k.weight())
                .or_default()
                .add_term(k.clone(), c.clone());
        }
        out
    }

    /// The set of weights carrying a nonzero component.
    pub fn weights(&self) -> Vec<i64> {
        let mut ws: Vec<i64> = self.terms.keys().map(|k| k.weight()).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// `Some(w)` if the vector is zero or homogeneous of a single weight.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let ws = self.weights();
        match ws.len() {
            0 => None,
            1 => Some(ws[0]),
            _ => None,
        }
    }

    pub fn is_homogeneous_of(&self, w: i64) -> bool {
        self.terms.keys().all(|k| k.weight() == w)
    }
}

impl Add for &GradedVector {
    type Output = GradedVector;
    fn add(self, rhs: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Sub for &GradedVector {
    type Output = GradedVector;
    fn sub(self, rhs: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::from_int(-1));
        out
    }
}

impl Neg for &GradedVector {
    type Output = GradedVector;
    fn neg(self) -> GradedVector {
        self.scaled(&Scalar::from_int(-1))
    }
}

impl AddAssign<&GradedVector> for GradedVector {
    fn add_assign(&mut self, rhs: &GradedVector) {
        self.add_scaled(rhs, &Scalar::one());
    }
}

impl fmt::Display for GradedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "{c}·{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: u32) -> BasisKey {
        BasisKey::Mono(m)
    }

    #[test]
    fn cancellation_prunes_zeros() {
        let x = GradedVector::term(t(2), Scalar::one());
        let y = GradedVector::term(t(2), Scalar::from_int(-1));
        assert!((&x + &y).is_zero());
    }

    #[test]
    fn halves_sum_to_one() {
        let x = GradedVector::term(t(1), Scalar::ratio(1, 2));
        let sum = &x + &x;
        assert_eq!(sum, GradedVector::basis(t(1)));
    }

    #[test]
    fn disjoint_support_unions() {
        let x = GradedVector::term(t(2), Scalar::from_int(2));
        let y = GradedVector::term(t(1), Scalar::one());
        let sum = &x + &y;
        assert_eq!(sum.len(), 2);
        assert_eq!(sum.coeff(&t(2)), Scalar::from_int(2));
        assert_eq!(sum.coeff(&t(1)), Scalar::one());
    }

    #[test]
    fn component_split() {
        let v = GradedVector::from_terms([
            (t(1), Scalar::one()),
            (t(2), Scalar::from_int(3)),
        ]);
        assert_eq!(v.component(-1), GradedVector::basis(t(1)));
        assert_eq!(v.components().len(), 2);
        assert!(v.homogeneous_weight().is_none());
        assert!(v.component(-2).is_homogeneous_of(-2));
    }
}
