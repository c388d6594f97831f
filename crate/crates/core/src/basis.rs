//! Canonical basis indices for every algebra shipped by this crate.
//!
//! A `BasisKey` is a purely symbolic, canonical (sorted, deduplicated)
//! description of one basis vector, so syntactic equality of keys is
//! semantic equality of basis vectors. Each key determines its integer
//! weight; graded bookkeeping (subspaces, homogeneity, grading laws) is
//! built on that.
//!
//! Weights follow the vertex-operator grading convention
//! `wt(a_m b) = wt(a) - m - 1 + wt(b)`. For the single-variable
//! commutative algebras this forces `wt(t_m) = -m`; their basis is
//! enumerated by the filtration index `m` instead (degree `-m`).

use std::fmt;

use serde::Serialize;

/// Names for free-boson generators: α, β, γ, δ, then h5, h6, ...
fn generator_name(g: u8) -> String {
    match g {
        0 => "α".to_string(),
        1 => "β".to_string(),
        2 => "γ".to_string(),
        3 => "δ".to_string(),
        n => format!("h{}", n + 1),
    }
}

/// A canonical symbolic basis index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum BasisKey {
    /// Divided-power basis element `t_m`.
    Mono(u32),
    /// Plain monomial `t^m` of the polynomial algebra.
    Pow(u32),
    /// Laurent monomial `t^n` (right tensor factor), weight 0.
    Laurent(i64),
    /// Free-boson Fock monomial: sorted `(generator, mode)` factors, each
    /// factor standing for the creation operator `α_g(-mode)` with
    /// `mode >= 1`, applied to the vacuum.
    Fock(Vec<(u8, u32)>),
    /// Rank-one lattice state: creation modes in the single direction α,
    /// the lattice label `m` of `e^{mα}`, and the norm parameter `N` with
    /// `(α|α) = 2N` (carried so the weight is a function of the key).
    Lattice {
        modes: Vec<u32>,
        label: i64,
        n: u32,
    },
    /// Tensor basis vector `left ⊗ right`.
    Pair(Box<BasisKey>, Box<BasisKey>),
}

impl BasisKey {
    /// Fock monomial from unsorted factors; canonicalizes the order.
    pub fn fock(mut factors: Vec<(u8, u32)>) -> Self {
        factors.sort_unstable();
        BasisKey::Fock(factors)
    }

    /// Lattice state from unsorted modes; canonicalizes the order.
    pub fn lattice(mut modes: Vec<u32>, label: i64, n: u32) -> Self {
        modes.sort_unstable();
        BasisKey::Lattice { modes, label, n }
    }

    pub fn pair(left: BasisKey, right: BasisKey) -> Self {
        BasisKey::Pair(Box::new(left), Box::new(right))
    }

    /// Integer weight (degree) of the basis vector.
    pub fn weight(&self) -> i64 {
        match self {
            BasisKey::Mono(m) | BasisKey::Pow(m) => -(*m as i64),
            BasisKey::Laurent(_) => 0,
            BasisKey::Fock(factors) => factors.iter().map(|&(_, n)| n as i64).sum(),
            BasisKey::Lattice { modes, label, n } => {
                let fock: i64 = modes.iter().map(|&m| m as i64).sum();
                fock + (*n as i64) * label * label
            }
            BasisKey::Pair(left, _) => left.weight(),
        }
    }
}

/// Renders repeated factors with exponents: α(-2)^2 α(-1).
fn fmt_factors(
    f: &mut fmt::Formatter<'_>,
    factors: &mut dyn Iterator<Item = (String, u32)>,
) -> fmt::Result {
    let mut groups: Vec<(String, u32, usize)> = Vec::new();
    for (name, mode) in factors {
        match groups.last_mut() {
            Some((n, m, count)) if *n == name && *m == mode => *count += 1,
            _ => groups.push((name, mode, 1)),
        }
    }
    // Highest modes first reads like the usual normal-ordered monomial.
    groups.reverse();
    for (name, mode, count) in groups {
        write!(f, "{name}(-{mode})")?;
        if count > 1 {
            write!(f, "^{count}")?;
        }
    }
    Ok(())
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKey::Mono(m) => write!(f, "t_{m}"),
            BasisKey::Pow(0) => write!(f, "1"),
            BasisKey::Pow(m) => write!(f, "t^{m}"),
            BasisKey::Laurent(0) => write!(f, "1"),
            BasisKey::Laurent(n) => write!(f, "t^{n}"),
            BasisKey::Fock(factors) => {
                if factors.is_empty() {
                    return write!(f, "1");
                }
                fmt_factors(
                    f,
                    &mut factors.iter().map(|&(g, m)| (generator_name(g), m)),
                )?;
                write!(f, "1")
            }
            BasisKey::Lattice { modes, label, .. } => {
                fmt_factors(f, &mut modes.iter().map(|&m| ("α".to_string(), m)))?;
                match label {
                    0 if modes.is_empty() => write!(f, "1"),
                    0 => write!(f, "1"),
                    1 => write!(f, "e^α"),
                    -1 => write!(f, "e^-α"),
                    m => write!(f, "e^{m}α"),
                }
            }
            BasisKey::Pair(l, r) => write!(f, "{l}⊗{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_keys_are_canonical() {
        let a = BasisKey::fock(vec![(0, 1), (0, 2), (0, 1)]);
        let b = BasisKey::fock(vec![(0, 2), (0, 1), (0, 1)]);
        assert_eq!(a, b);
        assert_eq!(a.weight(), 4);
        assert_eq!(a.to_string(), "α(-2)α(-1)^21");
    }

    #[test]
    fn weights() {
        assert_eq!(BasisKey::Mono(3).weight(), -3);
        assert_eq!(BasisKey::Pow(0).weight(), 0);
        assert_eq!(BasisKey::Laurent(-2).weight(), 0);
        assert_eq!(BasisKey::fock(vec![]).weight(), 0);
        // Σ n_i + N m² with N = 1, m = -2.
        assert_eq!(BasisKey::lattice(vec![1], -2, 1).weight(), 5);
        let pair = BasisKey::pair(BasisKey::fock(vec![(0, 2)]), BasisKey::Laurent(-5));
        assert_eq!(pair.weight(), 2);
    }

    #[test]
    fn display_forms() {
        assert_eq!(BasisKey::Mono(0).to_string(), "t_0");
        assert_eq!(BasisKey::Pow(2).to_string(), "t^2");
        assert_eq!(BasisKey::fock(vec![]).to_string(), "1");
        assert_eq!(BasisKey::lattice(vec![], 1, 1).to_string(), "e^α");
        assert_eq!(BasisKey::lattice(vec![1, 1], -1, 1).to_string(), "α(-1)^2e^-α");
        assert_eq!(
            BasisKey::pair(BasisKey::Mono(1), BasisKey::Laurent(-1)).to_string(),
            "t_1⊗t^-1"
        );
    }
}
