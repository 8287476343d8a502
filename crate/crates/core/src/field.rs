//! Ground fields: prime fields F_p and the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field tag shared by every scalar of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    /// Prime field with the given characteristic (at most `2^31`).
    Fp(u64),
    /// Arbitrary-precision rationals.
    Q,
}

/// Element of a [`Field`].
///
/// Prime-field values are reduced to `[0, p)`; rationals are kept in lowest
/// terms with positive denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp { v: u64, p: u64 },
    Q(BigRational),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Validated prime field.
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::Input(format!("{p} is not a supported prime")));
        }
        Ok(Field::Fp(p))
    }

    /// Characteristic; 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Fp(p) => *p,
            Field::Q => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        match *self {
            Field::Fp(p) => Scalar::Fp { v: x.rem_euclid(p as i64) as u64, p },
            Field::Q => Scalar::Q(BigRational::from_integer(BigInt::from(x))),
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        n * d.inv().expect("denominator divisible by the characteristic")
    }

    /// Parses a coefficient string: a decimal integer for F_p, `num/den`
    /// (or a bare integer) for the rationals.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Input(format!("bad coefficient {s:?} for field {self}"));
        match *self {
            Field::Fp(p) => {
                let x: BigInt = s.parse().map_err(|_| bad())?;
                let r = ((x % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                let v: u64 = r.try_into().map_err(|_| bad())?;
                Ok(Scalar::Fp { v, p })
            }
            Field::Q => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s, "1"),
                };
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Q(BigRational::new(n, d)))
            }
        }
    }

    /// Enumerates all field elements (prime fields only).
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match *self {
            Field::Fp(p) => Some((0..p).map(|v| Scalar::Fp { v, p }).collect()),
            Field::Q => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Fp(p) => write!(f, "F_{p}"),
            Field::Q => write!(f, "Q"),
        }
    }
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Fp { p, .. } => Field::Fp(*p),
            Scalar::Q(_) => Field::Q,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Q(q) => q.is_one(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: pow_mod(*v, p - 2, *p), p: *p },
            Scalar::Q(q) => Scalar::Q(q.recip()),
        })
    }

    /// `(-1)^e · self`.
    pub fn signed(self, odd: bool) -> Scalar {
        if odd {
            -self
        } else {
            self
        }
    }

    /// Canonical coefficient string: decimal for F_p, `num/den` for Q.
    pub fn to_coeff_string(&self) -> String {
        match self {
            Scalar::Fp { v, .. } => v.to_string(),
            Scalar::Q(q) => format!("{}/{}", q.numer(), q.denom()),
        }
    }

    fn check(&self, other: &Scalar) {
        if let (Scalar::Fp { p, .. }, Scalar::Fp { p: q, .. }) = (self, other) {
            assert_eq!(p, q, "scalars from different prime fields");
        } else {
            assert_eq!(self.field(), other.field(), "scalars from different fields");
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { v, .. } => write!(f, "{v}"),
            Scalar::Q(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Q(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Fp { v, p }, Scalar::Fp { v: w, .. }) => Scalar::Fp { v: (v + w) % p, p: *p },
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Fp { v, p }, Scalar::Fp { v: w, .. }) => {
                Scalar::Fp { v: (v + p - w) % p, p: *p }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Fp { v, p }, Scalar::Fp { v: w, .. }) => Scalar::Fp { v: v * w % p, p: *p },
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: (p - v) % p, p: *p },
            Scalar::Q(a) => Scalar::Q(-a),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Sign of a rational, used only for display-oriented normalisation.
pub fn rational_is_negative(s: &Scalar) -> bool {
    matches!(s, Scalar::Q(q) if q.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic_reduces() {
        let f = Field::Fp(7);
        assert_eq!(f.from_i64(-1), f.from_i64(6));
        assert_eq!(f.from_i64(3) * f.from_i64(5), f.one());
        assert_eq!(f.from_i64(3).inv().unwrap(), f.from_i64(5));
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rational_parse_and_print() {
        let q = Field::Q;
        let x = q.parse("6/-4").unwrap();
        assert_eq!(x.to_coeff_string(), "-3/2");
        assert_eq!(q.parse("5").unwrap().to_coeff_string(), "5/1");
        assert!(q.parse("1/0").is_err());
        assert_eq!(Field::Fp(5).parse("-2").unwrap(), Field::Fp(5).from_i64(3));
    }

    #[test]
    fn prime_validation() {
        assert!(Field::prime(7).is_ok());
        assert!(Field::prime(9).is_err());
    }
}
