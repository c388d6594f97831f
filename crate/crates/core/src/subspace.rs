//! Graded subspaces in reduced echelon form, with exact membership
//! certificates, and linear maps defined on such subspaces.
//!
//! A subspace is stored degree by degree. Within a degree the spanning
//! rows are kept in reduced row echelon form over the rationals with a
//! deterministic pivot order (the `Ord` on basis keys), so membership
//! queries produce reproducible coordinate certificates.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::vector::GradedVector;

/// Exact coordinates of a vector in a subspace: one `(degree, row, coeff)`
/// entry per contributing echelon row.
pub type Coords = Vec<(i64, usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct GradedSubspace {
    name: String,
    /// Per-degree reduced echelon rows, each normalized to pivot
    /// coefficient 1, ordered by pivot key.
    rows: BTreeMap<i64, Vec<GradedVector>>,
    /// Degrees on which the stored rows are known to span the whole
    /// intersection of the subspace with that degree. `None` means every
    /// degree (the subspace is exactly the span of what was supplied).
    complete_range: Option<(i64, i64)>,
}

impl GradedSubspace {
    /// Reduces an arbitrary family of vectors to echelon form. Inputs are
    /// split into weight-homogeneous components first, so the result is
    /// the graded span.
    pub fn echelon_reduce(name: impl Into<String>, vectors: &[GradedVector]) -> Self {
        let mut s = GradedSubspace {
            name: name.into(),
            rows: BTreeMap::new(),
            complete_range: None,
        };
        for v in vectors {
            for (_, comp) in v.components() {
                s.insert(comp);
            }
        }
        s
    }

    pub fn empty(name: impl Into<String>) -> Self {
        GradedSubspace::echelon_reduce(name, &[])
    }

    /// Declares that outside `lo..=hi` the enumeration is incomplete, so
    /// membership queries touching such degrees are undecidable.
    pub fn with_complete_range(mut self, lo: i64, hi: i64) -> Self {
        self.complete_range = Some((lo, hi));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn complete_range(&self) -> Option<(i64, i64)> {
        self.complete_range
    }

    fn insert(&mut self, mut v: GradedVector) {
        let Some(w) = v.homogeneous_weight() else {
            return; // zero vector
        };
        let rows = self.rows.entry(w).or_default();
        loop {
            if v.is_zero() {
                return;
            }
            let pivot = v.keys().next().unwrap().clone();
            match rows.iter().position(|r| r.keys().next().unwrap() == &pivot) {
                Some(i) => {
                    let c = v.coeff(&pivot);
                    let row = rows[i].clone();
                    v.add_scaled(&row, &-&c);
                }
                None => {
                    let lead = v.coeff(&pivot);
                    let v = v.scaled(&lead.inverse().unwrap());
                    // Back-eliminate the new pivot from existing rows.
                    for r in rows.iter_mut() {
                        let c = r.coeff(&pivot);
                        if !c.is_zero() {
                            r.add_scaled(&v, &-&c);
                        }
                    }
                    let at = rows
                        .iter()
                        .position(|r| r.keys().next().unwrap() > &pivot)
                        .unwrap_or(rows.len());
                    rows.insert(at, v);
                    return;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        self.rows.get(&degree).map_or(0, Vec::len)
    }

    pub fn rows_at(&self, degree: i64) -> &[GradedVector] {
        self.rows.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.rows.keys().copied()
    }

    fn degree_decidable(&self, d: i64) -> bool {
        match self.complete_range {
            None => true,
            Some((lo, hi)) => lo <= d && d <= hi,
        }
    }

    /// Exact decomposition of `x` in the echelon rows, or `None` when `x`
    /// is not a member. Errors if `x` touches a degree whose enumeration
    /// is declared incomplete.
    pub fn membership(&self, x: &GradedVector) -> Result<Option<Coords>> {
        let mut coords = Coords::new();
        for (w, comp) in x.components() {
            if !self.degree_decidable(w) {
                return Err(CoreError::Coverage {
                    subspace: self.name.clone(),
                    degree: w,
                });
            }
            let rows = self.rows_at(w);
            let mut rem = comp;
            // Rows are in reduced form: subtract each row's pivot share.
            for (i, row) in rows.iter().enumerate() {
                let pivot = row.keys().next().unwrap();
                let c = rem.coeff(pivot);
                if !c.is_zero() {
                    rem.add_scaled(row, &-&c);
                    coords.push((w, i, c));
                }
            }
            if !rem.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(coords))
    }

    pub fn contains(&self, x: &GradedVector) -> Result<bool> {
        Ok(self.membership(x)?.is_some())
    }

    /// Reconstructs the vector from membership coordinates.
    pub fn from_coords(&self, coords: &Coords) -> GradedVector {
        let mut out = GradedVector::zero();
        for (w, i, c) in coords {
            out.add_scaled(&self.rows_at(*w)[*i], c);
        }
        out
    }
}

impl fmt::Display for GradedSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.name, self.rank())
    }
}

/// Tracked per-degree row reduction over a fixed family of homogeneous
/// vectors: solves exact decompositions in the family and extracts the
/// kernel of its coefficient matrix. Inserting a vector that reduces to
/// zero records the vanishing combination as a kernel element.
pub struct SpanSolver {
    /// Per degree: reduced rows with their combination coordinates over
    /// the original family.
    rows: BTreeMap<i64, Vec<(GradedVector, Vec<Scalar>)>>,
    kernel: Vec<Vec<Scalar>>,
    n: usize,
}

impl SpanSolver {
    /// Builds the solver; every input must be weight-homogeneous or zero.
    pub fn new(vectors: &[GradedVector]) -> Result<Self> {
        let n = vectors.len();
        let mut solver = SpanSolver {
            rows: BTreeMap::new(),
            kernel: Vec::new(),
            n,
        };
        for (idx, v) in vectors.iter().enumerate() {
            let mut combo = vec![Scalar::zero(); n];
            combo[idx] = Scalar::one();
            if v.is_zero() {
                solver.kernel.push(combo);
                continue;
            }
            let Some(w) = v.homogeneous_weight() else {
                return Err(CoreError::Solve {
                    detail: format!("span solver needs homogeneous inputs, got {v}"),
                });
            };
            let mut vec = v.clone();
            let rows = solver.rows.entry(w).or_default();
            loop {
                if vec.is_zero() {
                    solver.kernel.push(combo);
                    break;
                }
                let pivot = vec.keys().next().unwrap().clone();
                match rows
                    .iter()
                    .position(|(r, _)| r.keys().next().unwrap() == &pivot)
                {
                    Some(i) => {
                        let c = vec.coeff(&pivot);
                        let (row, row_combo) = rows[i].clone();
                        vec.add_scaled(&row, &-&c);
                        for (t, rc) in combo.iter_mut().zip(row_combo.iter()) {
                            *t -= &c * rc;
                        }
                    }
                    None => {
                        let lead = vec.coeff(&pivot).inverse().unwrap();
                        let vec = vec.scaled(&lead);
                        let combo: Vec<Scalar> =
                            combo.iter().map(|c| c * &lead).collect();
                        let at = rows
                            .iter()
                            .position(|(r, _)| r.keys().next().unwrap() > &pivot)
                            .unwrap_or(rows.len());
                        rows.insert(at, (vec, combo));
                        break;
                    }
                }
            }
        }
        Ok(solver)
    }

    /// Exact coordinates of `x` over the original family, or `None` when
    /// `x` is outside the span. Non-pivot directions get coefficient zero,
    /// so the answer is the deterministic (lexicographically pivoted)
    /// section.
    pub fn solve(&self, x: &GradedVector) -> Option<Vec<Scalar>> {
        let mut coords = vec![Scalar::zero(); self.n];
        for (w, comp) in x.components() {
            let rows = self.rows.get(&w)?;
            let mut rem = comp;
            for (row, combo) in rows {
                let pivot = row.keys().next().unwrap();
                let c = rem.coeff(pivot);
                if !c.is_zero() {
                    rem.add_scaled(row, &-&c);
                    for (t, rc) in coords.iter_mut().zip(combo.iter()) {
                        *t += &c * rc;
                    }
                }
            }
            if !rem.is_zero() {
                return None;
            }
        }
        Some(coords)
    }

    /// Combinations of the input family that vanish.
    pub fn kernel(&self) -> &[Vec<Scalar>] {
        &self.kernel
    }
}

/// A linear map defined on a graded subspace: each echelon row of the
/// domain is assigned an image vector, and arbitrary members are mapped
/// through their exact coordinates.
#[derive(Clone, Debug)]
pub struct SubspaceMap {
    name: String,
    domain: GradedSubspace,
    images: BTreeMap<i64, Vec<GradedVector>>,
    pub homogeneity: Option<i64>,
}

impl SubspaceMap {
    /// Builds the map from `(domain row, image)` assignments produced by
    /// `row_image`.
    pub fn new(
        name: impl Into<String>,
        domain: GradedSubspace,
        mut row_image: impl FnMut(i64, usize, &GradedVector) -> GradedVector,
    ) -> Self {
        let mut images = BTreeMap::new();
        for d in domain.degrees().collect::<Vec<_>>() {
            let imgs: Vec<GradedVector> = domain
                .rows_at(d)
                .iter()
                .enumerate()
                .map(|(i, row)| row_image(d, i, row))
                .collect();
            images.insert(d, imgs);
        }
        SubspaceMap {
            name: name.into(),
            domain,
            images,
            homogeneity: None,
        }
    }

    pub fn with_homogeneity(mut self, n: i64) -> Self {
        self.homogeneity = Some(n);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &GradedSubspace {
        &self.domain
    }

    /// Applies the map; a vector outside the domain is a domain breach.
    pub fn apply(&self, x: &GradedVector) -> Result<GradedVector> {
        match self.domain.membership(x)? {
            None => Err(CoreError::Domain {
                rule: self.name.clone(),
                key: x.to_string(),
            }),
            Some(coords) => {
                let mut out = GradedVector::zero();
                for (w, i, c) in coords {
                    out.add_scaled(&self.images[&w][i], &c);
                }
                Ok(out)
            }
        }
    }

    /// The image subspace, echelon-reduced, inheriting the domain's
    /// completeness window shifted by the homogeneity degree.
    pub fn image(&self) -> GradedSubspace {
        let all: Vec<GradedVector> = self
            .images
            .values()
            .flat_map(|v| v.iter().cloned())
            .collect();
        let mut img =
            GradedSubspace::echelon_reduce(format!("{}(dom)", self.name), &all);
        if let Some((lo, hi)) = self.domain.complete_range {
            let n = self.homogeneity.unwrap_or(0);
            img = img.with_complete_range(lo + n, hi + n);
        }
        img
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKey;

    fn t(m: u32) -> BasisKey {
        BasisKey::Mono(m)
    }

    fn v(pairs: &[(u32, i64)]) -> GradedVector {
        GradedVector::from_terms(
            pairs
                .iter()
                .map(|&(m, c)| (t(m), Scalar::from_int(c))),
        )
    }

    #[test]
    fn dependent_rows_collapse() {
        let s = GradedSubspace::echelon_reduce("S", &[v(&[(1, 1)]), v(&[(1, 2)])]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn empty_span_has_rank_zero() {
        let s = GradedSubspace::echelon_reduce("S", &[]);
        assert_eq!(s.rank(), 0);
        assert_eq!(s.membership(&GradedVector::zero()).unwrap(), Some(vec![]));
    }

    #[test]
    fn mixed_weight_vector_spans_both_components() {
        // {t:1, t²:1} and {t²:1} span rank 2 with echelon basis {t}, {t²}.
        let s = GradedSubspace::echelon_reduce("S", &[v(&[(1, 1), (2, 1)]), v(&[(2, 1)])]);
        assert_eq!(s.rank(), 2);
        assert_eq!(s.rows_at(-1), &[GradedVector::basis(t(1))]);
        assert_eq!(s.rows_at(-2), &[GradedVector::basis(t(2))]);
    }

    #[test]
    fn membership_coordinates_are_exact() {
        let s = GradedSubspace::echelon_reduce("S", &[v(&[(1, 1)])]);
        let x = v(&[(1, 5)]);
        let coords = s.membership(&x).unwrap().expect("member");
        assert_eq!(coords, vec![(-1, 0, Scalar::from_int(5))]);
        assert_eq!(s.from_coords(&coords), x);
        assert_eq!(s.membership(&v(&[(2, 1)])).unwrap(), None);
    }

    #[test]
    fn coverage_error_outside_complete_range() {
        let s = GradedSubspace::echelon_reduce("S", &[v(&[(1, 1)])]).with_complete_range(-3, 0);
        match s.membership(&v(&[(4, 1)])) {
            Err(CoreError::Coverage { degree, .. }) => assert_eq!(degree, -4),
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn subspace_map_applies_by_coordinates() {
        let dom = GradedSubspace::echelon_reduce("U", &[v(&[(1, 2)]), v(&[(2, 1)])]);
        let shift = SubspaceMap::new("P", dom, |_, _, row| {
            let mut out = GradedVector::zero();
            for (k, c) in row.iter() {
                if let BasisKey::Mono(m) = k {
                    out.add_term(t(m + 1), c.clone());
                }
            }
            out
        });
        assert_eq!(shift.apply(&v(&[(1, 4)])).unwrap(), v(&[(2, 4)]));
        assert!(matches!(
            shift.apply(&v(&[(3, 1)])),
            Err(CoreError::Domain { .. })
        ));
        assert_eq!(shift.image().rank(), 2);
    }
}
