//! Exact Gaussian-rational coefficients.
//!
//! Rationals are stored as `Ratio<i64>` while they fit and promoted to
//! `BigRational` on overflow. A value that fits in `i64` is always kept in
//! the small form, so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::CrError;

#[derive(Clone, Debug)]
pub enum Rat {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::Small(Ratio::new(num, den))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat::Small(Ratio::from_integer(n))
    }

    pub fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rat::Small(Ratio::new_raw(n, d)),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rat::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_zero(),
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(r) if r.is_one())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_negative(),
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_integer(),
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn numer_string(&self) -> String {
        match self {
            Rat::Small(r) => r.numer().to_string(),
            Rat::Big(b) => b.numer().to_string(),
        }
    }

    pub fn denom_string(&self) -> String {
        match self {
            Rat::Small(r) => r.denom().to_string(),
            Rat::Big(b) => b.denom().to_string(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Rat::Small(r) if *r.numer() != i64::MIN => Rat::Small(r.recip()),
            _ => Rat::from_big(self.to_big().recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Rat::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                if let (Rat::Small(a), Rat::Small(b)) = (self, rhs) {
                    if let Some(c) = a.$checked(b) {
                        return Rat::Small(c);
                    }
                }
                Rat::from_big(self.to_big().$method(rhs.to_big()))
            }
        }
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
    };
}

rat_binop!(Add, add, checked_add);
rat_binop!(Sub, sub, checked_sub);
rat_binop!(Mul, mul, checked_mul);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self * &rhs.recip()
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(r) if *r.numer() != i64::MIN => Rat::Small(-r),
            other => Rat::from_big(-other.to_big()),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a == b,
            (Rat::Big(a), Rat::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(r) => write!(f, "{}", r),
            Rat::Big(b) => write!(f, "{}", b),
        }
    }
}

impl FromStr for Rat {
    type Err = CrError;
    fn from_str(s: &str) -> Result<Rat, CrError> {
        let bad = || CrError::Parse(format!("invalid rational `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::from_big(BigRational::new(n, d)))
    }
}

/// An element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub re: Rat,
    pub im: Rat,
}

impl Coefficient {
    pub fn new(re: Rat, im: Rat) -> Coefficient {
        Coefficient { re, im }
    }

    pub fn zero() -> Coefficient {
        Coefficient { re: Rat::from_int(0), im: Rat::from_int(0) }
    }

    pub fn one() -> Coefficient {
        Coefficient::from_int(1)
    }

    pub fn i() -> Coefficient {
        Coefficient { re: Rat::from_int(0), im: Rat::from_int(1) }
    }

    pub fn from_int(n: i64) -> Coefficient {
        Coefficient { re: Rat::from_int(n), im: Rat::from_int(0) }
    }

    pub fn from_ratio(num: i64, den: i64) -> Coefficient {
        Coefficient { re: Rat::new(num, den), im: Rat::from_int(0) }
    }

    pub fn gaussian(re: i64, im: i64) -> Coefficient {
        Coefficient { re: Rat::from_int(re), im: Rat::from_int(im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Coefficient {
        Coefficient { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Result<Coefficient, CrError> {
        if self.is_zero() {
            return Err(CrError::DivisionByZero);
        }
        let n = self.norm_sqr().recip();
        Ok(Coefficient { re: &self.re * &n, im: &(-self.im.clone()) * &n })
    }

    pub fn scale_int(&self, k: i64) -> Coefficient {
        let k = Rat::from_int(k);
        Coefficient { re: &self.re * &k, im: &self.im * &k }
    }

    /// Canonical exact form `a/b+c/d*i` used by reports.
    pub fn to_exact_string(&self) -> String {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        let im = self.im.abs();
        format!(
            "{}/{}{}{}/{}*i",
            self.re.numer_string(),
            self.re.denom_string(),
            sign,
            im.numer_string(),
            im.denom_string()
        )
    }

    pub fn parse_exact(s: &str) -> Result<Coefficient, CrError> {
        let bad = || CrError::Parse(format!("invalid coefficient `{s}`"));
        let body = s.trim().strip_suffix("*i").ok_or_else(bad)?;
        // split at the sign separating the two parts (skip a leading sign)
        let bytes = body.as_bytes();
        let pos = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/')
            .ok_or_else(bad)?;
        let re: Rat = body[..pos].parse()?;
        let im_str = &body[pos..];
        let im: Rat = im_str.trim_start_matches('+').parse()?;
        Ok(Coefficient { re, im })
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}i", self.im)
                }
            }
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}i)", self.re, self.im.abs())
                } else {
                    write!(f, "({}+{}i)", self.re, self.im)
                }
            }
        }
    }
}

impl Add<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Coefficient { re: &self.re * &rhs.re, im: Rat::from_int(0) };
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        Coefficient { re, im }
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Coefficient) -> Coefficient {
        &self + &rhs
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Coefficient) -> Coefficient {
        &self - &rhs
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { re: -self.re, im: -self.im }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -self.clone()
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Coefficient> for Coefficient {
    fn mul_assign(&mut self, rhs: &Coefficient) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sum = &big + &big;
        assert!(matches!(sum, Rat::Big(_)));
        let back = &sum - &big;
        assert_eq!(back, Rat::from_int(i64::MAX));
        assert!(matches!(back, Rat::Small(_)));
    }

    #[test]
    fn gaussian_arithmetic() {
        let a = Coefficient::gaussian(1, 2);
        let b = Coefficient::gaussian(3, -1);
        assert_eq!(&a * &b, Coefficient::gaussian(5, 5));
        let q = a.inv().unwrap();
        assert_eq!(&q * &a, Coefficient::one());
        assert_eq!(Coefficient::i().conj(), -Coefficient::i());
    }

    #[test]
    fn exact_string_round_trip() {
        for c in [
            Coefficient::gaussian(0, 0),
            Coefficient::new(Rat::new(-3, 4), Rat::new(5, 7)),
            Coefficient::new(Rat::new(2, 1), Rat::new(-1, 3)),
        ] {
            let s = c.to_exact_string();
            assert_eq!(Coefficient::parse_exact(&s).unwrap(), c, "{s}");
        }
        assert_eq!(Coefficient::gaussian(1, -2).to_exact_string(), "1/1-2/1*i");
    }
}
