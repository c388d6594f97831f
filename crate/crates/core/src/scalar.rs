//! Exact rational scalars.
//!
//! Every coefficient in this crate is an arbitrary-precision rational
//! number; there is no floating point anywhere. `Scalar` wraps
//! [`num_rational::BigRational`], which keeps values in lowest terms with a
//! positive denominator, so equality of scalars is exact equality of
//! reduced fractions.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` as an exact fraction. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Scalar(self.0.recip()))
        }
    }

    /// Nonnegative integer power.
    pub fn pow_u(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc *= self.clone();
        }
        acc
    }

    /// n! as a scalar.
    pub fn factorial(n: u64) -> Self {
        let mut acc = BigInt::one();
        for i in 2..=n {
            acc *= BigInt::from(i);
        }
        Scalar(BigRational::from_integer(acc))
    }

    /// Generalized binomial coefficient C(n, j) for integer `n` (possibly
    /// negative) and `j >= 0`: n(n-1)...(n-j+1)/j!. Always an integer.
    pub fn binomial(n: i64, j: u64) -> Self {
        let mut num = BigInt::one();
        for i in 0..j {
            num *= BigInt::from(n) - BigInt::from(i);
        }
        let mut den = BigInt::one();
        for i in 2..=j {
            den *= BigInt::from(i);
        }
        Scalar(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses `"p"` or `"p/q"`.
impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let q = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Scalar(BigRational::new(p, q)))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        Scalar(self.0 / rhs.0)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        Scalar(&self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        self.0 *= rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_reduced_fraction() {
        assert_eq!(Scalar::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Scalar::ratio(-3, -6).to_string(), "1/2");
        assert_eq!(Scalar::ratio(3, -6).to_string(), "-1/2");
        assert_eq!(Scalar::from_int(7).to_string(), "7");
    }

    #[test]
    fn parse_round_trips() {
        for s in ["0", "-4", "3/2", "-7/3", "22/7"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn binomial_handles_negative_upper_index() {
        // C(-1, j) = (-1)^j
        for j in 0..6 {
            let expect = if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(Scalar::binomial(-1, j), Scalar::from_int(expect));
        }
        assert_eq!(Scalar::binomial(-3, 2), Scalar::from_int(6));
        assert_eq!(Scalar::binomial(4, 2), Scalar::from_int(6));
        assert_eq!(Scalar::binomial(2, 5), Scalar::zero());
    }

    #[test]
    fn factorials() {
        assert_eq!(Scalar::factorial(0), Scalar::one());
        assert_eq!(Scalar::factorial(5), Scalar::from_int(120));
    }
}
