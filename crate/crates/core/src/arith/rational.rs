use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ArithError, Natural};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, ArithError> {
        if denom.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self(BigRational::new(numer, denom)))
    }

    /// `numer / denom` for naturals; `denom` must be nonzero.
    pub fn from_naturals(numer: &Natural, denom: &Natural) -> Result<Self, ArithError> {
        Self::new(
            BigInt::from_biguint(Sign::Plus, numer.clone()),
            BigInt::from_biguint(Sign::Plus, denom.clone()),
        )
    }

    pub fn from_u64s(numer: u64, denom: u64) -> Result<Self, ArithError> {
        Self::new(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn from_integer(value: BigInt) -> Self {
        Self(BigRational::from_integer(value))
    }

    /// `1/d`.
    pub fn unit(d: &Natural) -> Result<Self, ArithError> {
        Self::from_naturals(&Natural::one(), d)
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `Some(d)` when the value is exactly `1/d`.
    pub fn unit_denominator(&self) -> Option<Natural> {
        if self.numer().is_one() {
            self.denom().to_biguint()
        } else {
            None
        }
    }

    /// Numerator and denominator as naturals, for non-negative values.
    pub fn to_naturals(&self) -> Option<(BigUint, BigUint)> {
        Some((self.numer().to_biguint()?, self.denom().to_biguint()?))
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self(self.0.recip()))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

/// Exact reduced difference `x - y`.
pub fn rational_sub(x: &ExactRational, y: &ExactRational) -> ExactRational {
    x - y
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Self::new(n, d)
            }
            None => Ok(Self::from_integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division by zero panics, as it does for BigRational.
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn subtraction_examples() {
        assert_eq!(rational_sub(&r("4/73"), &r("1/20")), r("7/1460"));
        assert_eq!(rational_sub(&r("4/9"), &r("1/6")), r("5/18"));
        assert_eq!(rational_sub(&r("4/2521"), &r("1/636")), r("23/1603356"));
    }

    #[test]
    fn normalized_storage() {
        let x = ExactRational::new(BigInt::from(6), BigInt::from(-4)).unwrap();
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2");
        assert!(ExactRational::new(BigInt::one(), BigInt::zero()).is_err());
    }

    #[test]
    fn unit_detection() {
        assert_eq!(r("3/1387").unit_denominator(), None);
        assert_eq!(r("2/10").unit_denominator(), Some(BigUint::from(5u32)));
    }
}
