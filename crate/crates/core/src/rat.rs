//! Exact nonnegative rational arithmetic.
//!
//! All measure values in this crate are finite nonnegative rationals in
//! canonical reduced form. Arithmetic never rounds; subtraction is checked
//! so that negativity is a visible error at the call site instead of a
//! silent wrap.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// A nonnegative rational number in reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

/// Errors from constructing or parsing a `Rat`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative value `{0}`")]
    Negative(String),
    #[error("malformed rational `{0}`, expected `p` or `p/q`")]
    Malformed(String),
}

impl Rat {
    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// Builds `num / den`; `den` must be nonzero.
    pub fn new(num: u64, den: u64) -> Result<Rat, RatError> {
        if den == 0 {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_int(n: u64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `num / 2^shift` without intermediate overflow.
    pub fn dyadic(num: u64, shift: u32) -> Rat {
        let den = BigInt::one() << shift;
        Rat(BigRational::new(BigInt::from(num), den))
    }

    /// Builds `num / 2^shift` from an arbitrary-size numerator.
    pub fn dyadic_big(num: BigInt, shift: u64) -> Result<Rat, RatError> {
        if num.is_negative() {
            return Err(RatError::Negative(num.to_string()));
        }
        let den = BigInt::one() << shift;
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `self - rhs` when the difference is nonnegative.
    pub fn checked_sub(&self, rhs: &Rat) -> Option<Rat> {
        if self.0 >= rhs.0 {
            Some(Rat(&self.0 - &rhs.0))
        } else {
            None
        }
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// Decimal approximation for display alongside the exact form.
    pub fn to_f64(&self) -> f64 {
        let n = self.0.numer();
        let d = self.0.denom();
        str::parse::<f64>(&n.to_string()).unwrap_or(f64::NAN)
            / str::parse::<f64>(&d.to_string()).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `p` or `p/q` with optional surrounding whitespace.
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let t = s.trim();
        if t.starts_with('-') {
            return Err(RatError::Negative(t.to_string()));
        }
        match t.split_once('/') {
            None => {
                let n: u64 = t.parse().map_err(|_| RatError::Malformed(s.to_string()))?;
                Ok(Rat::from_int(n))
            }
            Some((p, q)) => {
                let p = p.trim();
                let q = q.trim();
                if p.starts_with('-') || q.starts_with('-') {
                    return Err(RatError::Negative(t.to_string()));
                }
                let num: u64 = p.parse().map_err(|_| RatError::Malformed(s.to_string()))?;
                let den: u64 = q.parse().map_err(|_| RatError::Malformed(s.to_string()))?;
                Rat::new(num, den)
            }
        }
    }
}

impl std::ops::Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl std::ops::Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_canonical_form() {
        let a = Rat::new(2, 4).unwrap();
        let b = Rat::new(1, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Rat::new(1, 0), Err(RatError::ZeroDenominator));
        assert_eq!("1/0".parse::<Rat>(), Err(RatError::ZeroDenominator));
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!("-1/2".parse::<Rat>(), Err(RatError::Negative(_))));
        assert!(matches!("1/-2".parse::<Rat>(), Err(RatError::Negative(_))));
    }

    #[test]
    fn parse_integer_shorthand() {
        assert_eq!("3".parse::<Rat>().unwrap(), Rat::from_int(3));
        assert_eq!(" 9/16 ".parse::<Rat>().unwrap(), Rat::new(9, 16).unwrap());
        assert!(matches!("a/b".parse::<Rat>(), Err(RatError::Malformed(_))));
    }

    #[test]
    fn checked_sub_guards_negativity() {
        let half = Rat::new(1, 2).unwrap();
        let one = Rat::one();
        assert_eq!(one.checked_sub(&half), Some(half.clone()));
        assert_eq!(half.checked_sub(&one), None);
    }

    #[test]
    fn ordering_is_numeric() {
        let a = Rat::new(1, 3).unwrap();
        let b = Rat::new(1, 2).unwrap();
        assert!(a < b);
        assert!(Rat::zero() < a);
    }

    #[test]
    fn dyadic_values() {
        assert_eq!(Rat::dyadic(3, 2), Rat::new(3, 4).unwrap());
        assert_eq!(Rat::dyadic(0, 10), Rat::zero());
        let big = Rat::dyadic_big(num::BigInt::from(1u8), 41).unwrap();
        assert_eq!(big.denominator().to_string(), (1u64 << 41).to_string());
    }

    #[test]
    fn display_integral_without_denominator() {
        assert_eq!(Rat::from_int(7).to_string(), "7");
        assert_eq!(Rat::new(6, 3).unwrap().to_string(), "2");
    }
}
