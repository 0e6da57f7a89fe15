//! Exact rationals viewed as elements of the p-adic field.
//!
//! Every lattice admits a basis with rational entries, so all computations
//! stay inside `Q ⊂ Q_p` and are exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The prime `p` shared by every object built on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
}

impl PadicContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(PadicContext { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn check_same(&self, other: &PadicContext) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ContextMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    /// `p^k` for any integer `k`.
    pub fn power(&self, k: i64) -> Scalar {
        let base = BigInt::from(self.p).pow(k.unsigned_abs());
        if k >= 0 {
            Scalar(BigRational::from_integer(base))
        } else {
            Scalar(BigRational::new(BigInt::one(), base))
        }
    }

    fn int_power(&self, k: u64) -> BigInt {
        BigInt::from(self.p).pow(k)
    }

    /// `v_p(numerator) - v_p(denominator)`, or `+∞` for zero.
    pub fn valuation(&self, x: &Scalar) -> Valuation {
        if x.is_zero() {
            return Valuation::Infinite;
        }
        let p = BigInt::from(self.p);
        let v = strip_p(x.0.numer(), &p).0 as i64 - strip_p(x.0.denom(), &p).0 as i64;
        Valuation::Finite(v)
    }

    /// Finite valuation of a nonzero scalar.
    ///
    /// Panics on zero; callers use it only on pivots.
    pub(crate) fn val(&self, x: &Scalar) -> i64 {
        match self.valuation(x) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => panic!("valuation of zero requested as an integer"),
        }
    }

    /// Splits a nonzero scalar into `p^v · u` with `u` a unit.
    pub fn split_unit(&self, x: &Scalar) -> (i64, Scalar) {
        let v = self.val(x);
        (v, x * &self.power(-v))
    }

    /// The canonical representative `m / p^t` of the coset `x + p^k O_p`,
    /// where `t = max(0, -v(x))` and `0 <= m < p^(k+t)`.
    pub fn reduce_mod_power(&self, x: &Scalar, k: i64) -> Scalar {
        let v = match self.valuation(x) {
            Valuation::Infinite => return Scalar::zero(),
            Valuation::Finite(v) => v,
        };
        if k <= v {
            return Scalar::zero();
        }
        let t = (-v).max(0);
        let shifted = x * &self.power(t);
        // `shifted` has non-negative valuation, so its denominator is a unit.
        let modulus = self.int_power((k + t) as u64);
        let inv = mod_inverse(shifted.0.denom(), &modulus);
        let m = (shifted.0.numer() * inv).mod_floor(&modulus);
        Scalar(BigRational::new(m, self.int_power(t as u64)))
    }

    /// True when `x` lies in the valuation ring.
    pub fn is_integral(&self, x: &Scalar) -> bool {
        self.valuation(x) >= Valuation::Finite(0)
    }
}

fn strip_p(n: &BigInt, p: &BigInt) -> (u64, BigInt) {
    let mut count = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return (count, rest);
        }
        rest = q;
        count += 1;
    }
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    if modulus.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(modulus).extended_gcd(modulus);
    debug_assert!(e.gcd.is_one(), "denominator is not a unit");
    e.x.mod_floor(modulus)
}

/// p-adic valuation, with `Infinite` for zero. Ordered so that
/// `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// An exact rational, always in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
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

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar(BigRational::from_integer(n))
    }

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(num.into(), den.into())))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(self.0.recip()))
    }

    pub fn div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
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

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::parse("scalar", format!("{msg}: {s:?}"));
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = match den {
            Some(d) => {
                let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                if d.is_negative() {
                    return Err(bad("negative denominator"));
                }
                d
            }
            None => BigInt::one(),
        };
        Ok(Scalar(BigRational::new(num, den)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

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

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}
