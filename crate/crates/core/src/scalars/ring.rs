use alloc::format;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ScalarError;

/// Carrier descriptor for a [`Scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// The field ℚ.
    Rationals,
    /// The ring ℤ.
    Integers,
    /// ℤ/m for m ≥ 2. When m is prime this is the field 𝔽_m.
    Zmod(u64),
}

impl Ring {
    /// ℤ/m, rejecting m < 2.
    pub fn zmod(m: u64) -> Result<Ring, ScalarError> {
        if m < 2 {
            return Err(ScalarError::Invalid(format!("Zmod({m}) needs m >= 2")));
        }
        Ok(Ring::Zmod(m))
    }

    /// 𝔽_p, rejecting composite p.
    pub fn prime_field(p: u64) -> Result<Ring, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::Invalid(format!("Fp({p}) needs a prime")));
        }
        Ok(Ring::Zmod(p))
    }

    pub fn is_field(&self) -> bool {
        match *self {
            Ring::Rationals => true,
            Ring::Integers => false,
            Ring::Zmod(m) => is_prime(m),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ring::Zmod(_))
    }

    /// Number of elements, for finite carriers.
    pub fn order(&self) -> Option<u64> {
        match *self {
            Ring::Zmod(m) => Some(m),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Ring::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Ring::Integers => Scalar::Integer(BigInt::from(n)),
            Ring::Zmod(m) => Scalar::Residue {
                value: reduce_i64(n, m),
                modulus: m,
            },
        }
    }

    /// Embeds a rational. Fails for ℤ on non-integers and for ℤ/m when the
    /// denominator is not invertible.
    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar, ScalarError> {
        match *self {
            Ring::Rationals => Ok(Scalar::Rational(r.clone())),
            Ring::Integers => {
                if r.is_integer() {
                    Ok(Scalar::Integer(r.to_integer()))
                } else {
                    Err(ScalarError::Invalid(format!("{r} is not an integer")))
                }
            }
            Ring::Zmod(m) => {
                let num = reduce_big(r.numer(), m);
                let den = reduce_big(r.denom(), m);
                let inv = mod_inverse(den, m).ok_or(ScalarError::ZeroInverse)?;
                Ok(Scalar::Residue {
                    value: mul_mod(num, inv, m),
                    modulus: m,
                })
            }
        }
    }

    /// All elements in ascending residue order, for finite carriers.
    pub fn elements(&self) -> Option<impl Iterator<Item = Scalar>> {
        let m = self.order()?;
        Some((0..m).map(move |value| Scalar::Residue { value, modulus: m }))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Ring::Rationals => write!(f, "Q"),
            Ring::Integers => write!(f, "Z"),
            Ring::Zmod(m) if is_prime(m) => write!(f, "Fp({m})"),
            Ring::Zmod(m) => write!(f, "Zmod({m})"),
        }
    }
}

/// An exact element of one of ℚ, ℤ, ℤ/m.
///
/// Values are kept canonical: fractions reduced, residues in `[0, m)`.
/// Arithmetic between different carriers is a logic error and panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Integer(BigInt),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Rational(_) => Ring::Rationals,
            Scalar::Integer(_) => Ring::Integers,
            Scalar::Residue { modulus, .. } => Ring::Zmod(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Integer(n) => n.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Integer(n) => n.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse in a field carrier.
    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        let ring = self.ring();
        if !ring.is_field() {
            return Err(ScalarError::NotAField(ring));
        }
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: mod_inverse(*value, *modulus).expect("prime modulus"),
                modulus: *modulus,
            },
            Scalar::Integer(_) => unreachable!(),
        })
    }

    /// `self / other` in a field carrier.
    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.inverse()?)
    }

    /// The value as a rational, when the carrier is ℚ or ℤ.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Integer(n) => Some(BigRational::from_integer(n.clone())),
            Scalar::Residue { .. } => None,
        }
    }

    /// Small integer representative, when one exists.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.is_integer() => r.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Integer(n) => n.to_i64(),
            Scalar::Residue { value, .. } => i64::try_from(*value).ok(),
        }
    }

    fn combine(
        &self,
        other: &Scalar,
        big: impl Fn(&BigRational, &BigRational) -> BigRational,
        int: impl Fn(&BigInt, &BigInt) -> BigInt,
        residue: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(big(a, b)),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(int(a, b)),
            (
                Scalar::Residue { value: a, modulus: m },
                Scalar::Residue { value: b, modulus: n },
            ) if m == n => Scalar::Residue {
                value: residue(*a, *b, *m),
                modulus: *m,
            },
            _ => panic!("mixed carriers: {} and {}", self.ring(), other.ring()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Integer(n) => write!(f, "{n}"),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.combine(rhs, |a, b| a + b, |a, b| a + b, add_mod)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.combine(
            rhs,
            |a, b| a - b,
            |a, b| a - b,
            |a, b, m| add_mod(a, m - b, m),
        )
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.combine(rhs, |a, b| a * b, |a, b| a * b, mul_mod)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Integer(n) => Scalar::Integer(-n),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn reduce_i64(n: i64, m: u64) -> u64 {
    (i128::from(n).rem_euclid(i128::from(m))) as u64
}

fn reduce_big(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.abs().to_u64().expect("residue fits")
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) + u128::from(b)) % u128::from(m)) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}
