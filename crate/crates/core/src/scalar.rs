//! Exact rational and Gaussian-rational scalars.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational number, always kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
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

    /// `num / den`; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Input("zero denominator".into()));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Scalar(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn pow(&self, e: i32) -> Self {
        if e >= 0 {
            let mut r = Scalar::one();
            for _ in 0..e {
                r = &r * self;
            }
            r
        } else {
            self.pow(-e).recip()
        }
    }

    /// Canonical `p/q` text form.
    pub fn to_frac_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Input(format!("invalid fraction string {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Scalar::from_big(n, d)
            }
            None => {
                let n = BigInt::from_str(s).map_err(|_| bad())?;
                Ok(Scalar(BigRational::from_integer(n)))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_frac_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::from_str(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar(self.0 $op rhs.0)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0 $op &rhs.0)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar(&self.0 $op rhs.0)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
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

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl GScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        GScalar { re, im }
    }

    pub fn zero() -> Self {
        GScalar::default()
    }

    pub fn one() -> Self {
        GScalar::real(Scalar::one())
    }

    pub fn i() -> Self {
        GScalar::new(Scalar::zero(), Scalar::one())
    }

    pub fn real(re: Scalar) -> Self {
        GScalar::new(re, Scalar::zero())
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GScalar::new(Scalar::from_int(re), Scalar::from_int(im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GScalar::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        GScalar::new(&self.re * s, &self.im * s)
    }

    /// `|z|²`
    pub fn norm_sqr(&self) -> Scalar {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "reciprocal of zero");
        GScalar::new(&self.re / &n, -(&self.im / &n))
    }
}

impl fmt::Debug for GScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add<&GScalar> for &GScalar {
    type Output = GScalar;
    fn add(self, r: &GScalar) -> GScalar {
        GScalar::new(&self.re + &r.re, &self.im + &r.im)
    }
}

impl Sub<&GScalar> for &GScalar {
    type Output = GScalar;
    fn sub(self, r: &GScalar) -> GScalar {
        GScalar::new(&self.re - &r.re, &self.im - &r.im)
    }
}

impl Mul<&GScalar> for &GScalar {
    type Output = GScalar;
    fn mul(self, r: &GScalar) -> GScalar {
        GScalar::new(
            &self.re * &r.re - &self.im * &r.im,
            &self.re * &r.im + &self.im * &r.re,
        )
    }
}

impl Div<&GScalar> for &GScalar {
    type Output = GScalar;
    fn div(self, r: &GScalar) -> GScalar {
        self * &r.recip()
    }
}

impl Neg for &GScalar {
    type Output = GScalar;
    fn neg(self) -> GScalar {
        GScalar::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&GScalar> for GScalar {
    fn add_assign(&mut self, r: &GScalar) {
        self.re += &r.re;
        self.im += &r.im;
    }
}
