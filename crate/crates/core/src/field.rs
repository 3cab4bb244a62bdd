//! Exact coefficient fields.
//!
//! Everything downstream is generic over [`Field`]. Two families are provided:
//! arbitrary-precision rationals ([`Rational`]) and prime fields [`Fp<P>`]
//! with the modulus fixed at compile time.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Rational = BigRational;

/// A commutative field with exact arithmetic.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Short tag used in reports, e.g. `"Q"` or `"F_7"`.
    fn tag() -> String;

    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;

    /// Image of an integer.
    fn from_i64(v: i64) -> Self;

    /// Serialized form: `"p/q"` or `"p"` for rationals, the residue for prime fields.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self>;
}

impl Field for BigRational {
    fn tag() -> String {
        "Q".to_string()
    }

    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.recip()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(p, q))
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(p))
            }
        }
    }
}

/// Element of the prime field with `P` elements. `P` must be prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u128;
        let mut acc: u128 = 1;
        let m = P as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Fp(acc as u64)
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp(((self.0 as u128 + o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp(((self.0 as u128 + P as u128 - o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp((self.0 as u128 * o.0 as u128 % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inv()
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn tag() -> String {
        format!("F_{P}")
    }

    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(P - 2)
    }

    fn from_i64(v: i64) -> Self {
        Fp::new(v)
    }

    fn to_text(&self) -> String {
        self.0.to_string()
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        // Accept rationals too, so dumps written over Q can be read mod p.
        if let Some((p, q)) = s.split_once('/') {
            let a = Self::parse_text(p)?;
            let b = Self::parse_text(q)?;
            if b.is_zero() {
                return Err(Error::Parse(format!("denominator vanishes mod {P}: {s:?}")));
            }
            return Ok(a / b);
        }
        let v: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))?;
        let r = ((v % BigInt::from(P)) + BigInt::from(P)) % BigInt::from(P);
        let r: u64 = r.abs().try_into().expect("residue fits u64");
        Ok(Fp(r))
    }
}

/// Prime moduli accepted by `fp:<p>` field selectors.
pub const SUPPORTED_PRIMES: &[u64] = &[2, 3, 5, 7, 11, 13, 101, 32003, 65521, 2147483647];

/// Parsed `--field` selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Rational,
    Prime(u64),
}

impl FieldChoice {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldChoice::Rational);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Input(format!("bad prime in field selector {s:?}")))?;
            if !SUPPORTED_PRIMES.contains(&p) {
                return Err(Error::Input(format!(
                    "prime {p} not supported; choose one of {SUPPORTED_PRIMES:?}"
                )));
            }
            return Ok(FieldChoice::Prime(p));
        }
        Err(Error::Input(format!("unknown field selector {s:?}")))
    }

    pub fn tag(&self) -> String {
        match self {
            FieldChoice::Rational => "Q".into(),
            FieldChoice::Prime(p) => format!("F_{p}"),
        }
    }
}

impl Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rational => write!(f, "q"),
            FieldChoice::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let x = Rational::new(BigInt::from(-6), BigInt::from(4));
        assert_eq!(x.to_text(), "-3/2");
        assert_eq!(Rational::parse_text("-3/2").unwrap(), x);
        assert_eq!(Rational::parse_text("7").unwrap(), Rational::from_i64(7));
        assert!(Rational::parse_text("1/0").is_err());
        assert!(Rational::parse_text("x").is_err());
    }

    #[test]
    fn prime_field_inverse() {
        type F = Fp<7>;
        for v in 1..7 {
            let x = F::new(v);
            assert_eq!(x * x.inv(), F::one());
        }
        assert_eq!(F::new(-1), F::new(6));
        assert_eq!(F::parse_text("1/2").unwrap() * F::new(2), F::one());
    }

    #[test]
    fn field_selector() {
        assert_eq!(FieldChoice::parse("q").unwrap(), FieldChoice::Rational);
        assert_eq!(FieldChoice::parse("fp:101").unwrap(), FieldChoice::Prime(101));
        assert!(FieldChoice::parse("fp:4").is_err());
        assert!(FieldChoice::parse("r").is_err());
    }
}
