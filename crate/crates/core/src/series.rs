//! Truncated uni- and bivariate Laurent windows with vector coefficients,
//! and the delta-function-free machinery for Jacobi-type identities.
//!
//! Identities of the Jacobi family are never checked through three-variable
//! delta-function distributions. Each one is decomposed into the equivalent
//! pair of killed identities
//!
//! ```text
//! (z1-z2)^k A(z1,z2) = (z1-z2)^k B(z1,z2)
//! (z0+z2)^l A(z0+z2,z2) = (z0+z2)^l C(z0,z2)
//! ```
//!
//! evaluated coefficient-exactly on finite windows. A window records the
//! rectangle of exponents it stores together with `exact_below` flags per
//! axis: when set, every coefficient below the stored low edge of that axis
//! is known to vanish identically, so the window is an honest truncation of
//! an element of `V((z))` (or `V((z1))((z2))`) from above only.
//!
//! Binomial expansion convention: `(x+y)^n` is always expanded as
//! `Σ_{j≥0} C(n,j) x^{n-j} y^j`, i.e. in nonnegative powers of the *second*
//! listed variable, for all integers n. For n ≥ 0 the sum is finite and the
//! direction is immaterial; for n < 0 the direction is semantically
//! significant (`(z1-z2)^n` and `(-z2+z1)^n` are different series) and only
//! the declared direction is ever used.

use std::collections::BTreeMap;

use crate::basis::BasisKey;
use crate::error::{CoreError, Result};
use crate::report::Counterexample;
use crate::rule::LinearRule;
use crate::scalar::Scalar;
use crate::vector::GradedVector;

/// Marker for the expansion direction of binomial powers; see the module
/// documentation. The second listed variable carries nonnegative powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpansionConvention;

impl ExpansionConvention {
    /// Coefficient of `x^{n-j} y^j` in `(x+y)^n`, any integer `n`.
    pub fn coefficient(n: i64, j: u64) -> Scalar {
        Scalar::binomial(n, j)
    }
}

/// Sign of the binomial `(u + v)^k` vs `(u - v)^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinomSign {
    Plus,
    Minus,
}

/// One bilinear family of mode products `(a, m, b) -> a_m b`, together
/// with an honest truncation bound.
pub trait ModeAction: Sync {
    fn apply(&self, a: &GradedVector, m: i64, b: &GradedVector) -> Result<GradedVector>;

    /// An upper bound `M` with `apply(a, n, b) = 0` for all `n >= M`.
    fn support(&self, a: &GradedVector, b: &GradedVector) -> i64;
}

/// A mode action given by closures.
pub struct MapAction<F, S>
where
    F: Fn(&GradedVector, i64, &GradedVector) -> Result<GradedVector> + Sync,
    S: Fn(&GradedVector, &GradedVector) -> i64 + Sync,
{
    pub map: F,
    pub bound: S,
}

impl<F, S> ModeAction for MapAction<F, S>
where
    F: Fn(&GradedVector, i64, &GradedVector) -> Result<GradedVector> + Sync,
    S: Fn(&GradedVector, &GradedVector) -> i64 + Sync,
{
    fn apply(&self, a: &GradedVector, m: i64, b: &GradedVector) -> Result<GradedVector> {
        (self.map)(a, m, b)
    }

    fn support(&self, a: &GradedVector, b: &GradedVector) -> i64 {
        (self.bound)(a, b)
    }
}

/// The pointwise sum of two mode actions.
pub struct SumAction<'a>(pub &'a dyn ModeAction, pub &'a dyn ModeAction);

impl ModeAction for SumAction<'_> {
    fn apply(&self, a: &GradedVector, m: i64, b: &GradedVector) -> Result<GradedVector> {
        Ok(&self.0.apply(a, m, b)? + &self.1.apply(a, m, b)?)
    }

    fn support(&self, a: &GradedVector, b: &GradedVector) -> i64 {
        self.0.support(a, b).max(self.1.support(a, b))
    }
}

// ---------------------------------------------------------------------------
// Univariate windows
// ---------------------------------------------------------------------------

/// A truncated Laurent series window in one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesWindow {
    pub lo: i64,
    pub hi: i64,
    /// Nonzero coefficients with exponent in `lo..=hi`.
    coeffs: BTreeMap<i64, GradedVector>,
    /// All coefficients below `lo` vanish identically.
    pub exact_below: bool,
}

impl SeriesWindow {
    pub fn from_coeffs(
        lo: i64,
        hi: i64,
        coeffs: BTreeMap<i64, GradedVector>,
        exact_below: bool,
    ) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(e, v)| *e >= lo && *e <= hi && !v.is_zero())
            .collect();
        SeriesWindow {
            lo,
            hi,
            coeffs,
            exact_below,
        }
    }

    /// `Y(a,z)b`-style expansion of one mode action: the coefficient of
    /// `z^e` is `a_{-e-1} b`. The window's low edge is the exact truncation
    /// bound, so `exact_below` always holds.
    pub fn expand(
        action: &dyn ModeAction,
        a: &GradedVector,
        b: &GradedVector,
        hi: i64,
    ) -> Result<Self> {
        let lo = -action.support(a, b);
        let mut coeffs = BTreeMap::new();
        for e in lo..=hi {
            let v = action.apply(a, -e - 1, b)?;
            if !v.is_zero() {
                coeffs.insert(e, v);
            }
        }
        Ok(SeriesWindow {
            lo,
            hi,
            coeffs,
            exact_below: true,
        })
    }

    /// Is the coefficient of `z^e` determined by this window?
    pub fn knows(&self, e: i64) -> bool {
        e <= self.hi && (e >= self.lo || self.exact_below)
    }

    /// The coefficient of `z^e`; `None` when the window does not determine
    /// it.
    pub fn coeff(&self, e: i64) -> Option<GradedVector> {
        if !self.knows(e) {
            return None;
        }
        Some(self.coeffs.get(&e).cloned().unwrap_or_default())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &GradedVector)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Substitutes `z -> -z`: the coefficient of `z^e` picks up `(-1)^e`.
    pub fn negate_var(&self) -> Self {
        SeriesWindow {
            lo: self.lo,
            hi: self.hi,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, v)| {
                    let sign = if e.rem_euclid(2) == 0 {
                        Scalar::one()
                    } else {
                        Scalar::from_int(-1)
                    };
                    (*e, v.scaled(&sign))
                })
                .collect(),
            exact_below: self.exact_below,
        }
    }

    /// Formal derivative d/dz. The top coefficient needs exponent `hi+1`,
    /// so the window shrinks by one from above.
    pub fn d_dz(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, v) in &self.coeffs {
            if *e != 0 {
                coeffs.insert(e - 1, v.scaled(&Scalar::from_int(*e)));
            }
        }
        SeriesWindow {
            lo: self.lo - 1,
            hi: self.hi - 1,
            coeffs,
            exact_below: self.exact_below,
        }
    }

    /// Applies `e^{zD}` to the series: the coefficient of `z^e` becomes
    /// `Σ_j D^j/j! (coeff(e-j))`, a finite sum because the series is
    /// truncated from below. `D` is evaluated lazily per output
    /// coefficient.
    pub fn exp_d(&self, d: &LinearRule) -> Result<Self> {
        if !self.exact_below {
            return Err(CoreError::Window {
                detail: "e^{zD} needs a series exact below its window".into(),
            });
        }
        let mut coeffs = BTreeMap::new();
        for e in self.lo..=self.hi {
            let mut acc = GradedVector::zero();
            for j in 0..=(e - self.lo).max(0) as u32 {
                if let Some(w) = self.coeffs.get(&(e - j as i64)) {
                    acc += &d.apply_divided_power(w, j)?;
                }
            }
            if !acc.is_zero() {
                coeffs.insert(e, acc);
            }
        }
        Ok(SeriesWindow {
            lo: self.lo,
            hi: self.hi,
            coeffs,
            exact_below: true,
        })
    }

    /// Linear-in-place sum of windows; the result is known where both are.
    pub fn sub(&self, other: &Self) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi.min(other.hi);
        let exact = self.exact_below && other.exact_below;
        let lo_eff = if exact { lo } else { self.lo.max(other.lo) };
        let mut coeffs: BTreeMap<i64, GradedVector> = BTreeMap::new();
        for e in lo_eff..=hi {
            let a = self.coeff(e).unwrap_or_default();
            let b = other.coeff(e).unwrap_or_default();
            let d = &a - &b;
            if !d.is_zero() {
                coeffs.insert(e, d);
            }
        }
        SeriesWindow {
            lo: lo_eff,
            hi,
            coeffs,
            exact_below: exact,
        }
    }

    /// First exponent/basis-index where the two windows differ on their
    /// common known region.
    pub fn first_difference(&self, other: &Self) -> Option<Counterexample> {
        let d = self.sub(other);
        let (e, v) = d.coeffs.iter().next()?;
        let key: &BasisKey = v.keys().next().unwrap();
        Some(Counterexample {
            location: format!("z^{e}"),
            at: key.to_string(),
            expected: self
                .coeff(*e)
                .map(|c| c.coeff(key).to_string())
                .unwrap_or_else(|| "?".into()),
            got: other
                .coeff(*e)
                .map(|c| c.coeff(key).to_string())
                .unwrap_or_else(|| "?".into()),
        })
    }
}

// ---------------------------------------------------------------------------
// Bivariate windows
// ---------------------------------------------------------------------------

/// Requested extent of a bivariate computation. Low edges default to the
/// exact truncation bounds derived from mode supports.
#[derive(Clone, Copy, Debug)]
pub struct Domain2 {
    pub hi1: i64,
    pub hi2: i64,
    pub lo1: Option<i64>,
    pub lo2: Option<i64>,
}

impl Domain2 {
    pub fn heights(hi1: i64, hi2: i64) -> Self {
        Domain2 {
            hi1,
            hi2,
            lo1: None,
            lo2: None,
        }
    }
}

/// A rectangular window of exact coefficients of a formal series in two
/// variables.
#[derive(Clone, Debug)]
pub struct BivariateWindow {
    pub lo1: i64,
    pub hi1: i64,
    pub lo2: i64,
    pub hi2: i64,
    coeffs: BTreeMap<(i64, i64), GradedVector>,
    pub exact_below_1: bool,
    pub exact_below_2: bool,
}

impl BivariateWindow {
    pub fn empty(lo1: i64, hi1: i64, lo2: i64, hi2: i64) -> Self {
        BivariateWindow {
            lo1,
            hi1,
            lo2,
            hi2,
            coeffs: BTreeMap::new(),
            exact_below_1: true,
            exact_below_2: true,
        }
    }

    pub fn insert(&mut self, p: i64, q: i64, v: GradedVector) {
        if !v.is_zero() {
            self.coeffs.insert((p, q), v);
        }
    }

    pub fn knows(&self, p: i64, q: i64) -> bool {
        p <= self.hi1
            && q <= self.hi2
            && (p >= self.lo1 || self.exact_below_1)
            && (q >= self.lo2 || self.exact_below_2)
    }

    pub fn coeff(&self, p: i64, q: i64) -> Option<GradedVector> {
        if !self.knows(p, q) {
            return None;
        }
        Some(self.coeffs.get(&(p, q)).cloned().unwrap_or_default())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &GradedVector)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn window_str(&self) -> String {
        format!(
            "[{},{}]x[{},{}]",
            self.lo1, self.hi1, self.lo2, self.hi2
        )
    }

    /// First stored nonzero coefficient, for counterexample reports.
    pub fn first_nonzero(&self, vars: (&str, &str)) -> Option<Counterexample> {
        let ((p, q), v) = self.coeffs.iter().next()?;
        let key = v.keys().next().unwrap();
        Some(Counterexample {
            location: format!("{}^{} {}^{}", vars.0, p, vars.1, q),
            at: key.to_string(),
            expected: "0".into(),
            got: v.coeff(key).to_string(),
        })
    }

    /// Difference known on the intersection of the known regions.
    pub fn sub(&self, other: &Self) -> Self {
        let exact1 = self.exact_below_1 && other.exact_below_1;
        let exact2 = self.exact_below_2 && other.exact_below_2;
        let lo1 = if exact1 {
            self.lo1.min(other.lo1)
        } else {
            self.lo1.max(other.lo1)
        };
        let lo2 = if exact2 {
            self.lo2.min(other.lo2)
        } else {
            self.lo2.max(other.lo2)
        };
        let hi1 = self.hi1.min(other.hi1);
        let hi2 = self.hi2.min(other.hi2);
        let mut out = BivariateWindow {
            lo1,
            hi1,
            lo2,
            hi2,
            coeffs: BTreeMap::new(),
            exact_below_1: exact1,
            exact_below_2: exact2,
        };
        let mut cells: std::collections::BTreeSet<(i64, i64)> = std::collections::BTreeSet::new();
        for (&c, _) in self.coeffs.iter().chain(other.coeffs.iter()) {
            cells.insert(c);
        }
        for (p, q) in cells {
            if p > hi1 || q > hi2 {
                continue;
            }
            if (p < lo1 && !exact1) || (q < lo2 && !exact2) {
                continue;
            }
            let a = self.coeff(p, q);
            let b = other.coeff(p, q);
            if let (Some(a), Some(b)) = (a, b) {
                out.insert(p, q, &a - &b);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let negated = BivariateWindow {
            coeffs: other
                .coeffs
                .iter()
                .map(|(c, v)| (*c, -v))
                .collect(),
            ..other.clone()
        };
        self.sub(&negated)
    }

    /// Multiplies by `(u ± v)^k` where `u` is the first axis variable and
    /// `v` the second; `k >= 0` so the expansion is finite. On an axis
    /// without `exact_below` the valid window shrinks by `k` from below.
    pub fn mul_binomial_power(&self, sign: BinomSign, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let lo1 = if self.exact_below_1 {
            self.lo1
        } else {
            self.lo1 + k as i64
        };
        let lo2 = if self.exact_below_2 {
            self.lo2
        } else {
            self.lo2 + k as i64
        };
        let mut out = BivariateWindow {
            lo1,
            hi1: self.hi1,
            lo2,
            hi2: self.hi2,
            coeffs: BTreeMap::new(),
            exact_below_1: self.exact_below_1,
            exact_below_2: self.exact_below_2,
        };
        // Accumulate shifted copies: (u ± v)^k = Σ_j C(k,j) (±1)^j u^{k-j} v^j.
        let mut cells: std::collections::BTreeMap<(i64, i64), GradedVector> = BTreeMap::new();
        for j in 0..=k {
            let mut c = Scalar::binomial(k as i64, j as u64);
            if sign == BinomSign::Minus && j % 2 == 1 {
                c = -c;
            }
            for (&(p, q), v) in &self.coeffs {
                let cell = (p + (k - j) as i64, q + j as i64);
                if cell.0 > self.hi1 || cell.1 > self.hi2 {
                    continue;
                }
                let entry = cells.entry(cell).or_default();
                entry.add_scaled(v, &c);
            }
        }
        for ((p, q), v) in cells {
            if p >= lo1 || out.exact_below_1 {
                if q >= lo2 || out.exact_below_2 {
                    out.insert(p, q, v);
                }
            }
        }
        out
    }

    /// Is every *determined* coefficient in the window zero?
    pub fn all_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Substitutes `z1 -> z0 + z2` inside the window itself (no oracle
    /// access): coefficient of `z0^p z2^q` becomes
    /// `Σ_{m ≤ q} C(p+q-m, q-m) · coeff(p+q-m, m)`. Requires the second
    /// axis to be exact below, and enough first-axis width to certify the
    /// requested extent.
    pub fn substitute_shift_window(&self, hi_p: i64, hi_q: i64) -> Result<BivariateWindow> {
        if !self.exact_below_2 {
            return Err(CoreError::Window {
                detail: "shift substitution needs exact_below on the inner variable".into(),
            });
        }
        let needed_row = hi_p + hi_q - self.lo2;
        if needed_row > self.hi1 {
            return Err(CoreError::Window {
                detail: format!(
                    "shift substitution needs first-axis coefficients up to {needed_row}, window has {}",
                    self.hi1
                ),
            });
        }
        if !self.exact_below_1 {
            return Err(CoreError::Window {
                detail: "shift substitution needs exact_below on the outer variable".into(),
            });
        }
        let lo1 = self.lo1 + self.lo2 - hi_q;
        let mut out = BivariateWindow {
            lo1,
            hi1: hi_p,
            lo2: self.lo2,
            hi2: hi_q,
            coeffs: BTreeMap::new(),
            exact_below_1: true,
            exact_below_2: true,
        };
        for p in lo1..=hi_p {
            for q in self.lo2..=hi_q {
                let mut acc = GradedVector::zero();
                for m in self.lo2..=q {
                    let r = p + q - m;
                    if let Some(v) = self.coeff(r, m) {
                        if !v.is_zero() {
                            acc.add_scaled(
                                &v,
                                &ExpansionConvention::coefficient(r, (q - m) as u64),
                            );
                        }
                    }
                }
                out.insert(p, q, acc);
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Window builders over mode actions
// ---------------------------------------------------------------------------

/// `outer(a, z1) inner(b, z2) c`: coefficient of `z1^p z2^q` is
/// `outer(a, -p-1, inner(b, -q-1, c))`. Both low edges are derived from
/// the actions' truncation bounds, so the result is exact below on both
/// axes.
pub fn compose_window(
    outer: &dyn ModeAction,
    a: &GradedVector,
    inner: &dyn ModeAction,
    b: &GradedVector,
    c: &GradedVector,
    dom: Domain2,
) -> Result<BivariateWindow> {
    let lo2 = dom.lo2.unwrap_or_else(|| -inner.support(b, c));
    let mut inner_cols: Vec<(i64, GradedVector)> = Vec::new();
    for q in lo2..=dom.hi2 {
        let w = inner.apply(b, -q - 1, c)?;
        if !w.is_zero() {
            inner_cols.push((q, w));
        }
    }
    let lo1 = dom.lo1.unwrap_or_else(|| {
        inner_cols
            .iter()
            .map(|(_, w)| -outer.support(a, w))
            .min()
            .unwrap_or(0)
    });
    let mut out = BivariateWindow::empty(lo1, dom.hi1, lo2, dom.hi2);
    out.exact_below_1 = dom.lo1.is_none();
    out.exact_below_2 = dom.lo2.is_none();
    for (q, w) in &inner_cols {
        for p in lo1..=dom.hi1 {
            let v = outer.apply(a, -p - 1, w)?;
            out.insert(p, *q, v);
        }
    }
    Ok(out)
}

/// Same product with the operator order swapped:
/// `outer(b, z2) inner(a, z1) c`, coefficient of `z1^p z2^q` equal to
/// `outer(b, -q-1, inner(a, -p-1, c))`.
pub fn compose_window_swapped(
    outer: &dyn ModeAction,
    b: &GradedVector,
    inner: &dyn ModeAction,
    a: &GradedVector,
    c: &GradedVector,
    dom: Domain2,
) -> Result<BivariateWindow> {
    let lo1 = dom.lo1.unwrap_or_else(|| -inner.support(a, c));
    let mut inner_rows: Vec<(i64, GradedVector)> = Vec::new();
    for p in lo1..=dom.hi1 {
        let w = inner.apply(a, -p - 1, c)?;
        if !w.is_zero() {
            inner_rows.push((p, w));
        }
    }
    let lo2 = dom.lo2.unwrap_or_else(|| {
        inner_rows
            .iter()
            .map(|(_, w)| -outer.support(b, w))
            .min()
            .unwrap_or(0)
    });
    let mut out = BivariateWindow::empty(lo1, dom.hi1, lo2, dom.hi2);
    out.exact_below_1 = dom.lo1.is_none();
    out.exact_below_2 = dom.lo2.is_none();
    for (p, w) in &inner_rows {
        for q in lo2..=dom.hi2 {
            let v = outer.apply(b, -q - 1, w)?;
            out.insert(*p, q, v);
        }
    }
    Ok(out)
}

/// `outer(prod(a, z0) b, z2) c`: coefficient of `z0^p z2^q` is
/// `outer(prod(a,-p-1,b), -q-1, c)`.
pub fn iterate_window(
    prod: &dyn ModeAction,
    outer: &dyn ModeAction,
    a: &GradedVector,
    b: &GradedVector,
    c: &GradedVector,
    dom: Domain2,
) -> Result<BivariateWindow> {
    let lo1 = dom.lo1.unwrap_or_else(|| -prod.support(a, b));
    let mut rows: Vec<(i64, GradedVector)> = Vec::new();
    for p in lo1..=dom.hi1 {
        let x = prod.apply(a, -p - 1, b)?;
        if !x.is_zero() {
            rows.push((p, x));
        }
    }
    let lo2 = dom.lo2.unwrap_or_else(|| {
        rows.iter()
            .map(|(_, x)| -outer.support(x, c))
            .min()
            .unwrap_or(0)
    });
    let mut out = BivariateWindow::empty(lo1, dom.hi1, lo2, dom.hi2);
    out.exact_below_1 = dom.lo1.is_none();
    out.exact_below_2 = dom.lo2.is_none();
    for (p, x) in &rows {
        for q in lo2..=dom.hi2 {
            let v = outer.apply(x, -q - 1, c)?;
            out.insert(*p, q, v);
        }
    }
    Ok(out)
}

/// `outer(a, z0+z2)` applied to a series in `z2` that is exact below:
/// coefficient of `z0^p z2^q` is
/// `Σ_{m ≤ q} C(p+q-m, q-m) · outer(a, -(p+q-m)-1, inner_m)`, expanding
/// `(z0+z2)^n` in nonnegative powers of the second variable.
pub fn substitute_shift(
    outer: &dyn ModeAction,
    a: &GradedVector,
    inner: &SeriesWindow,
    dom: Domain2,
) -> Result<BivariateWindow> {
    if !inner.exact_below {
        return Err(CoreError::Window {
            detail: "substitute_shift needs an inner series exact below its window".into(),
        });
    }
    if dom.hi2 > inner.hi {
        return Err(CoreError::Window {
            detail: format!(
                "substitute_shift needs inner coefficients up to {}, series stops at {}",
                dom.hi2, inner.hi
            ),
        });
    }
    // True truncation on the first axis: every term with mode index
    // >= support vanishes, and the mode index of the (p,q) cell ranges over
    // -(p+q-m)-1 for m in [inner.lo, q].
    let lo1 = dom.lo1.unwrap_or_else(|| {
        let mut lo = 0i64;
        for (m, w) in inner.iter() {
            lo = lo.min(-outer.support(a, w) + m - dom.hi2);
        }
        lo
    });
    let lo2 = inner.lo;
    let mut out = BivariateWindow::empty(lo1, dom.hi1, lo2, dom.hi2);
    out.exact_below_1 = dom.lo1.is_none();
    out.exact_below_2 = true;
    for p in lo1..=dom.hi1 {
        for q in lo2..=dom.hi2 {
            let mut acc = GradedVector::zero();
            for (m, w) in inner.iter() {
                if *m > q {
                    break;
                }
                let n = p + q - m;
                let c = ExpansionConvention::coefficient(n, (q - m) as u64);
                if c.is_zero() {
                    continue;
                }
                let v = outer.apply(a, -n - 1, w)?;
                acc.add_scaled(&v, &c);
            }
            out.insert(p, q, acc);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Witness searches
// ---------------------------------------------------------------------------

/// Result of searching the least `k ≤ kmax` with `(u ± v)^k · W = 0` on
/// the window.
pub struct KillSearch {
    pub witness: Option<i64>,
    pub counterexample: Option<Counterexample>,
    pub window: String,
}

/// Finds the minimal `k` killing the difference window, scanning
/// incrementally: `W_{k+1} = (u ± v) · W_k`.
pub fn find_kill_witness(
    diff: &BivariateWindow,
    sign: BinomSign,
    kmax: i64,
    vars: (&str, &str),
) -> KillSearch {
    let window = diff.window_str();
    let mut current = diff.clone();
    for k in 0..=kmax {
        if current.all_zero() {
            return KillSearch {
                witness: Some(k),
                counterexample: None,
                window,
            };
        }
        current = current.mul_binomial_power(sign, 1);
    }
    KillSearch {
        witness: None,
        counterexample: current.first_nonzero(vars),
        window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: u32) -> BasisKey {
        BasisKey::Mono(m)
    }

    /// Independent divided-power mode products, straight from the closed
    /// formula: (t_m)_{-j-1} t_n = (m+n-j)!/((m-j)! n! j!) t_{m+n-j} for
    /// 0 <= j <= m, all other modes zero.
    fn divided_action() -> impl ModeAction {
        MapAction {
            map: |a: &GradedVector, mode: i64, b: &GradedVector| {
                let mut out = GradedVector::zero();
                let j = -mode - 1;
                if j < 0 {
                    return Ok(out);
                }
                for (ka, ca) in a.iter() {
                    for (kb, cb) in b.iter() {
                        let (BasisKey::Mono(m), BasisKey::Mono(n)) = (ka, kb) else {
                            continue;
                        };
                        let (m, n) = (*m as i64, *n as i64);
                        if j > m {
                            continue;
                        }
                        let c = Scalar::factorial((m + n - j) as u64)
                            * (Scalar::factorial((m - j) as u64)
                                * Scalar::factorial(n as u64)
                                * Scalar::factorial(j as u64))
                            .inverse()
                            .unwrap();
                        out.add_term(t((m + n - j) as u32), ca * cb * c);
                    }
                }
                Ok(out)
            },
            bound: |_: &GradedVector, _: &GradedVector| 0,
        }
    }

    #[test]
    fn expand_divided_power_series() {
        // Y(t_1, z) t_1 = 2 t_2 + t_1 z.
        let y = divided_action();
        let a = GradedVector::basis(t(1));
        let w = SeriesWindow::expand(&y, &a, &a, 3).unwrap();
        assert_eq!(w.lo, 0);
        assert!(w.exact_below);
        assert_eq!(
            w.coeff(0).unwrap(),
            GradedVector::term(t(2), Scalar::from_int(2))
        );
        assert_eq!(w.coeff(1).unwrap(), GradedVector::basis(t(1)));
        assert!(w.coeff(2).unwrap().is_zero());
    }

    #[test]
    fn binomial_power_identity_on_single_term() {
        // (z1 - z2) · (single cell at (0,0)) = cell at (1,0) minus cell (0,1).
        let mut w = BivariateWindow::empty(0, 2, 0, 2);
        let x = GradedVector::basis(t(0));
        w.insert(0, 0, x.clone());
        let out = w.mul_binomial_power(BinomSign::Minus, 1);
        assert_eq!(out.coeff(1, 0).unwrap(), x);
        assert_eq!(out.coeff(0, 1).unwrap(), -&x);
        // k = 0 is the identity.
        let same = w.mul_binomial_power(BinomSign::Minus, 0);
        assert_eq!(same.coeff(0, 0).unwrap(), x);
    }

    #[test]
    fn binomial_power_composes() {
        let mut w = BivariateWindow::empty(0, 6, 0, 6);
        w.insert(0, 0, GradedVector::basis(t(0)));
        w.insert(1, 2, GradedVector::term(t(1), Scalar::ratio(2, 3)));
        let twice = w
            .mul_binomial_power(BinomSign::Minus, 1)
            .mul_binomial_power(BinomSign::Minus, 2);
        let once = w.mul_binomial_power(BinomSign::Minus, 3);
        for p in 0..=6 {
            for q in 0..=6 {
                assert_eq!(twice.coeff(p, q), once.coeff(p, q), "cell ({p},{q})");
            }
        }
    }

    #[test]
    fn window_shrinks_without_exact_below() {
        let mut w = BivariateWindow::empty(0, 4, 0, 4);
        w.exact_below_1 = false;
        w.exact_below_2 = false;
        w.insert(0, 0, GradedVector::basis(t(0)));
        let out = w.mul_binomial_power(BinomSign::Plus, 2);
        assert_eq!((out.lo1, out.lo2), (2, 2));
        assert!(!out.knows(1, 3));
        assert!(out.knows(2, 2));
    }

    #[test]
    fn commutative_weak_commutativity_has_witness_zero() {
        let y = divided_action();
        let a = GradedVector::basis(t(1));
        let b = GradedVector::basis(t(2));
        let c = GradedVector::basis(t(1));
        let dom = Domain2::heights(4, 4);
        let lhs = compose_window(&y, &a, &y, &b, &c, dom).unwrap();
        let rhs = compose_window_swapped(&y, &b, &y, &a, &c, dom).unwrap();
        let search = find_kill_witness(&lhs.sub(&rhs), BinomSign::Minus, 4, ("z1", "z2"));
        assert_eq!(search.witness, Some(0));
    }

    #[test]
    fn commutative_weak_associativity_has_witness_zero() {
        // (e^{z2 d}((e^{z0 d}a)b))c = (e^{(z0+z2)d}a)(e^{z2 d}b)c for the
        // commutative differential structure, so the killed identity holds
        // with l = 0 on the whole window.
        let y = divided_action();
        let a = GradedVector::basis(t(1));
        let b = GradedVector::basis(t(1));
        let c = GradedVector::basis(t(2));
        let dom = Domain2::heights(4, 4);
        let lhs = iterate_window(&y, &y, &a, &b, &c, dom).unwrap();
        let inner = SeriesWindow::expand(&y, &b, &c, 4).unwrap();
        let rhs = substitute_shift(&y, &a, &inner, dom).unwrap();
        let search = find_kill_witness(&rhs.sub(&lhs), BinomSign::Plus, 4, ("z0", "z2"));
        assert_eq!(search.witness, Some(0));
    }

    #[test]
    fn shift_coefficient_example() {
        // With Y(t_1, z0+z2) applied to Y(t_1, z2) t_0: the (z0^0, z2^0)
        // coefficient is 2 t_2.
        let y = divided_action();
        let a = GradedVector::basis(t(1));
        let inner = SeriesWindow::expand(&y, &a, &GradedVector::basis(t(0)), 4).unwrap();
        let out = substitute_shift(&y, &a, &inner, Domain2::heights(3, 3)).unwrap();
        assert_eq!(
            out.coeff(0, 0).unwrap(),
            GradedVector::term(t(2), Scalar::from_int(2))
        );
    }

    #[test]
    fn window_substitution_matches_oracle_substitution() {
        let y = divided_action();
        let a = GradedVector::basis(t(2));
        let b = GradedVector::basis(t(1));
        let c = GradedVector::basis(t(1));
        // Direct product window, wide on the first axis.
        let wide = compose_window(&y, &a, &y, &b, &c, Domain2::heights(10, 4)).unwrap();
        let shifted = wide.substitute_shift_window(3, 3).unwrap();
        let inner = SeriesWindow::expand(&y, &b, &c, 3).unwrap();
        let direct = substitute_shift(&y, &a, &inner, Domain2::heights(3, 3)).unwrap();
        for p in 0..=3 {
            for q in 0..=3 {
                assert_eq!(shifted.coeff(p, q), direct.coeff(p, q), "cell ({p},{q})");
            }
        }
    }

    #[test]
    fn vacuum_shift_is_identity() {
        // a = unit: Y(t_0, z0+z2) fixes every coefficient, viewed
        // bivariately: coefficient (p, q) is inner_q when p = 0.
        let y = divided_action();
        let unit = GradedVector::basis(t(0));
        let b = GradedVector::basis(t(2));
        let c = GradedVector::basis(t(1));
        let inner = SeriesWindow::expand(&y, &b, &c, 4).unwrap();
        let out = substitute_shift(&y, &unit, &inner, Domain2::heights(4, 4)).unwrap();
        for q in 0..=4 {
            assert_eq!(out.coeff(0, q).unwrap(), inner.coeff(q).unwrap(), "q={q}");
            assert!(out.coeff(2, q).unwrap().is_zero());
        }
    }

    #[test]
    fn exp_d_and_negate_var() {
        // Series t_1 + t_0 z with d(t_m) = t_{m-1}: e^{zD} shifts tails up.
        let d = LinearRule::new("d", |k| match k {
            BasisKey::Mono(0) => Ok(GradedVector::zero()),
            BasisKey::Mono(m) => Ok(GradedVector::basis(t(m - 1))),
            _ => Ok(GradedVector::zero()),
        });
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, GradedVector::basis(t(1)));
        coeffs.insert(1, GradedVector::basis(t(0)));
        let w = SeriesWindow::from_coeffs(0, 2, coeffs, true);
        let out = w.exp_d(&d).unwrap();
        // coefficient of z^1: d(t_1) + t_0 = 2 t_0.
        assert_eq!(
            out.coeff(1).unwrap(),
            GradedVector::term(t(0), Scalar::from_int(2))
        );
        let neg = w.negate_var();
        assert_eq!(neg.coeff(1).unwrap(), -&GradedVector::basis(t(0)));
    }
}
