//! Exact dyadic rationals `num / 2^exp` and points built from them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A dyadic rational `num / 2^exp` kept in lowest terms (`num` odd, or `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic { num: num.into(), exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: BigInt::from(v), exp: 0 }
    }

    /// Exact conversion: every finite double is a dyadic rational.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exponent == 0 {
            (mantissa, -1074)
        } else {
            (mantissa | (1u64 << 52), exponent - 1075)
        };
        let mut num = BigInt::from(m);
        if negative {
            num = -num;
        }
        Some(if e >= 0 {
            Dyadic::new(num << (e as usize), 0)
        } else {
            Dyadic::new(num, (-e) as u32)
        })
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp == 0 {
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Power of two in the denominator.
    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num.clone(), self.exp + 1)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Dyadic::new(&self.num * k, self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        // Scale in two steps to avoid overflow of the numerator conversion.
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        if self.exp <= 1000 {
            n / 2f64.powi(self.exp as i32)
        } else {
            n / 2f64.powi(1000) / 2f64.powi(self.exp as i32 - 1000)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    /// Exact decimal expansion (dyadics always terminate in base ten).
    pub fn to_decimal_string(&self) -> String {
        if self.exp == 0 {
            return self.num.to_string();
        }
        let scaled = self.num.abs() * num_traits::pow(BigInt::from(5), self.exp as usize);
        let digits = scaled.to_string();
        let e = self.exp as usize;
        let (int_part, frac_part) = if digits.len() > e {
            (digits[..digits.len() - e].to_string(), digits[digits.len() - e..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(e - digits.len()), digits))
        };
        let sign = if self.is_negative() { "-" } else { "" };
        format!("{sign}{int_part}.{frac_part}")
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &other.num << (e - other.exp) as usize;
        (a, b, e)
    }

    /// Exact quotient as a rational; `None` when dividing by zero.
    pub fn div_rational(&self, other: &Dyadic) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        let (a, b, _) = self.aligned(other);
        Some(BigRational::new(a, b))
    }

    /// Integer part towards negative infinity.
    pub fn floor(&self) -> BigInt {
        let d = BigInt::one() << self.exp as usize;
        self.num.div_floor(&d)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A point of `ℝ^N` with exact dyadic coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicPoint(pub Vec<Dyadic>);

impl DyadicPoint {
    pub fn new(coords: Vec<Dyadic>) -> Self {
        DyadicPoint(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DyadicPoint(coords.iter().map(|&c| Dyadic::from_int(c)).collect())
    }

    pub fn from_f64(coords: &[f64]) -> Option<Self> {
        coords.iter().map(|&c| Dyadic::from_f64(c)).collect::<Option<Vec<_>>>().map(DyadicPoint)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Dyadic] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Dyadic::to_f64).collect()
    }

    pub fn sub(&self, other: &DyadicPoint) -> DyadicPoint {
        DyadicPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &DyadicPoint) -> DyadicPoint {
        DyadicPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Dyadic) -> DyadicPoint {
        DyadicPoint(self.0.iter().map(|a| a * s).collect())
    }

    pub fn midpoint(&self, other: &DyadicPoint) -> DyadicPoint {
        DyadicPoint(self.0.iter().zip(&other.0).map(|(a, b)| (a + b).half()).collect())
    }

    /// Appends one coordinate (used for products with an interval and for cones).
    pub fn extended(&self, last: Dyadic) -> DyadicPoint {
        let mut c = self.0.clone();
        c.push(last);
        DyadicPoint(c)
    }

    pub fn norm_squared(&self) -> Dyadic {
        self.0.iter().fold(Dyadic::zero(), |acc, c| &acc + &(c * c))
    }

    pub fn dist_squared(&self, other: &DyadicPoint) -> Dyadic {
        self.sub(other).norm_squared()
    }

    pub fn dist(&self, other: &DyadicPoint) -> f64 {
        self.dist_squared(other).to_f64().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_to_lowest_terms() {
        let d = Dyadic::new(12, 3);
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 1);
        assert_eq!(Dyadic::new(0, 7), Dyadic::zero());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Dyadic::new(1, 2);
        let b = Dyadic::new(3, 1);
        assert_eq!(&a + &b, Dyadic::new(7, 2));
        assert_eq!(&a - &b, Dyadic::new(-5, 2));
        assert_eq!(&a * &b, Dyadic::new(3, 3));
        assert_eq!(Dyadic::from_int(1).half().half(), a);
        assert!(a < b);
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for v in [0.1, -3.75, 1e-300, 123456.789, 5e-324] {
            let d = Dyadic::from_f64(v).unwrap();
            assert_eq!(d.to_f64(), v);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn decimal_strings_terminate() {
        assert_eq!(Dyadic::new(3, 2).to_decimal_string(), "0.75");
        assert_eq!(Dyadic::new(-5, 1).to_decimal_string(), "-2.5");
        assert_eq!(Dyadic::new(1, 3).to_decimal_string(), "0.125");
        assert_eq!(Dyadic::from_int(-4).to_decimal_string(), "-4");
    }

    #[test]
    fn floor_rounds_down() {
        assert_eq!(Dyadic::new(-1, 1).floor(), BigInt::from(-1));
        assert_eq!(Dyadic::new(7, 1).floor(), BigInt::from(3));
    }
}
