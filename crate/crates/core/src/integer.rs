//! Unbounded integers with an `i64` fast path.
//!
//! Values that fit in an `i64` are always stored as `Small`; arithmetic
//! promotes to `BigInt` on overflow and demotes whenever the result fits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Integer {
    Small(i64),
    Big(BigInt),
}

use Integer::{Big, Small};

impl Integer {
    pub fn zero() -> Self {
        Small(0)
    }

    pub fn one() -> Self {
        Small(1)
    }

    fn from_big(b: BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Small(v),
            None => Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Small(v) => BigInt::from(*v),
            Big(b) => b.clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Small(v) => Some(*v),
            Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Small(0))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Small(1) | Small(-1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Small(v) => *v < 0,
            Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Integer {
        match self {
            Small(v) => match v.checked_abs() {
                Some(a) => Small(a),
                None => Big(BigInt::from(*v).abs()),
            },
            Big(b) => Big(b.abs()),
        }
    }

    /// Compares absolute values.
    pub fn cmp_abs(&self, other: &Integer) -> Ordering {
        match (self, other) {
            (Small(a), Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            _ => self.to_big().abs().cmp(&other.to_big().abs()),
        }
    }

    /// Floor division, `other` non-zero.
    pub fn div_floor(&self, other: &Integer) -> Integer {
        match (self, other) {
            (Small(a), Small(b)) if !(*a == i64::MIN && *b == -1) => Small(a.div_floor(b)),
            _ => Integer::from_big(self.to_big().div_floor(&other.to_big())),
        }
    }

    /// Quotient rounded to nearest (ties toward floor); keeps remainders small.
    pub fn div_round(&self, other: &Integer) -> Integer {
        let q = self.div_floor(other);
        let r = self - &(&q * other);
        // r has the sign of `other`; when |2r| > |other| the remainder
        // r - other is the smaller one
        let two_r = &r + &r;
        if two_r.cmp_abs(other) == Ordering::Greater {
            &q + &Integer::one()
        } else {
            q
        }
    }

    pub fn rem_floor(&self, other: &Integer) -> Integer {
        self - &(&self.div_floor(other) * other)
    }

    pub fn is_divisible_by(&self, other: &Integer) -> bool {
        if other.is_zero() {
            return self.is_zero();
        }
        self.rem_floor(other).is_zero()
    }

    pub fn gcd(&self, other: &Integer) -> Integer {
        match (self, other) {
            (Small(a), Small(b)) if *a != i64::MIN && *b != i64::MIN => Small(a.gcd(b)),
            _ => Integer::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// `(g, s, t)` with `g = gcd >= 0` and `s*self + t*other = g`.
    pub fn extended_gcd(&self, other: &Integer) -> (Integer, Integer, Integer) {
        let e = self.to_big().extended_gcd(&other.to_big());
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if g.is_negative() {
            g = -g;
            s = -s;
            t = -t;
        }
        (Integer::from_big(g), Integer::from_big(s), Integer::from_big(t))
    }

    pub fn lcm(&self, other: &Integer) -> Integer {
        if self.is_zero() || other.is_zero() {
            return Integer::zero();
        }
        (&(self / &self.gcd(other)) * other).abs()
    }

    /// Residue in `0..p`.
    pub fn mod_u64(&self, p: u64) -> u64 {
        match self {
            Small(v) => v.rem_euclid(p as i64) as u64,
            Big(b) => b.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits"),
        }
    }
}

impl From<i64> for Integer {
    fn from(v: i64) -> Self {
        Small(v)
    }
}

impl From<i32> for Integer {
    fn from(v: i32) -> Self {
        Small(v as i64)
    }
}

impl From<BigInt> for Integer {
    fn from(b: BigInt) -> Self {
        Integer::from_big(b)
    }
}

impl Default for Integer {
    fn default() -> Self {
        Small(0)
    }
}

impl<'a> Add<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn add(self, rhs: &Integer) -> Integer {
        if let (Small(a), Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_add(*b) {
                return Small(c);
            }
        }
        Integer::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn sub(self, rhs: &Integer) -> Integer {
        if let (Small(a), Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_sub(*b) {
                return Small(c);
            }
        }
        Integer::from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn mul(self, rhs: &Integer) -> Integer {
        if let (Small(a), Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_mul(*b) {
                return Small(c);
            }
        }
        Integer::from_big(self.to_big() * rhs.to_big())
    }
}

/// Exact division (truncating); callers divide only by known divisors.
impl<'a> std::ops::Div<&'a Integer> for &'a Integer {
    type Output = Integer;
    fn div(self, rhs: &Integer) -> Integer {
        if let (Small(a), Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_div(*b) {
                return Small(c);
            }
        }
        Integer::from_big(self.to_big() / rhs.to_big())
    }
}

impl Neg for &Integer {
    type Output = Integer;
    fn neg(self) -> Integer {
        match self {
            Small(v) => match v.checked_neg() {
                Some(n) => Small(n),
                None => Big(-BigInt::from(*v)),
            },
            Big(b) => Integer::from_big(-b.clone()),
        }
    }
}

impl Neg for Integer {
    type Output = Integer;
    fn neg(self) -> Integer {
        -&self
    }
}

impl PartialOrd for Integer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Integer {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Small(a), Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Integer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Small(v) => write!(f, "{v}"),
            Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Integer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Integer {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<BigInt>().map(Integer::from_big)
    }
}

/// Serialized as a JSON number when it fits in `i64`, else as a decimal string.
impl Serialize for Integer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Small(v) => s.serialize_i64(*v),
            Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Integer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(i64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(v) => Ok(Small(v)),
            Repr::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Zero for Integer {
    fn zero() -> Self {
        Small(0)
    }
    fn is_zero(&self) -> bool {
        Integer::is_zero(self)
    }
}

impl Add for Integer {
    type Output = Integer;
    fn add(self, rhs: Integer) -> Integer {
        &self + &rhs
    }
}

impl Mul for Integer {
    type Output = Integer;
    fn mul(self, rhs: Integer) -> Integer {
        &self * &rhs
    }
}

impl One for Integer {
    fn one() -> Self {
        Small(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let a = Integer::from(i64::MAX);
        let b = &a + &Integer::one();
        assert!(matches!(b, Big(_)));
        let c = &b - &Integer::one();
        assert_eq!(c, Small(i64::MAX));
        let sq = &a * &a;
        assert_eq!(sq.to_big(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        assert_eq!(-Integer::from(i64::MIN), Integer::from_big(-BigInt::from(i64::MIN)));
    }

    #[test]
    fn gcd_and_division() {
        let a = Integer::from(84);
        let b = Integer::from(-36);
        assert_eq!(a.gcd(&b), Integer::from(12));
        let (g, s, t) = a.extended_gcd(&b);
        assert_eq!(g, Integer::from(12));
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert_eq!(Integer::from(-7).div_floor(&Integer::from(2)), Integer::from(-4));
        assert_eq!(Integer::from(7).div_round(&Integer::from(4)), Integer::from(2));
        assert_eq!(Integer::from(7).div_round(&Integer::from(-5)), Integer::from(-1));
        assert_eq!(Integer::from(-8).div_round(&Integer::from(-5)), Integer::from(2));
        assert_eq!(Integer::from(6).lcm(&Integer::from(4)), Integer::from(12));
        assert_eq!(Integer::from(-4).mod_u64(3), 2);
    }

    #[test]
    fn serde_forms() {
        let big: Integer = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&vec![Integer::from(7), big.clone()]).unwrap();
        assert_eq!(json, r#"[7,"123456789012345678901234567890"]"#);
        let back: Vec<Integer> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Integer::from(7), big]);
    }
}
