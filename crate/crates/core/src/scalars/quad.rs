use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{qq, ScalarError};

/// An element `re + im·√−d` of ℚ(√−d), d ∈ {1, 3}.
///
/// Re(value) = `re` and sign(Im(value)) = sign(`im`) exactly, which is all the
/// group orderings need.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadImaginary {
    re: BigRational,
    im: BigRational,
    d: u8,
}

impl QuadImaginary {
    /// `re + im·√−d`. Only d = 1 and d = 3 are supported.
    pub fn new(re: BigRational, im: BigRational, d: u8) -> Result<Self, ScalarError> {
        if d != 1 && d != 3 {
            return Err(ScalarError::Invalid(alloc::format!(
                "Q(sqrt(-{d})) is not supported; use d = 1 or d = 3"
            )));
        }
        Ok(QuadImaginary { re, im, d })
    }

    /// The Gaussian rational `re + im·i`.
    pub fn gauss(re: BigRational, im: BigRational) -> Self {
        QuadImaginary { re, im, d: 1 }
    }

    /// The rational `r` inside ℚ(√−d).
    pub fn rational(r: BigRational, d: u8) -> Self {
        QuadImaginary::new(r, BigRational::zero(), d).expect("d validated by caller")
    }

    pub fn from_i64(n: i64, d: u8) -> Self {
        QuadImaginary::rational(BigRational::from_integer(BigInt::from(n)), d)
    }

    pub fn zero(d: u8) -> Self {
        QuadImaginary::from_i64(0, d)
    }

    pub fn one(d: u8) -> Self {
        QuadImaginary::from_i64(1, d)
    }

    /// ω = e^{2πi/3} = −1/2 + (1/2)√−3.
    pub fn zeta3() -> Self {
        QuadImaginary {
            re: qq(-1, 2),
            im: qq(1, 2),
            d: 3,
        }
    }

    /// ζ₆ = e^{πi/3} = 1/2 + (1/2)√−3.
    pub fn zeta6() -> Self {
        QuadImaginary {
            re: qq(1, 2),
            im: qq(1, 2),
            d: 3,
        }
    }

    /// The basis element `w` used by the literal grammar: i when d = 1, ω when d = 3.
    pub fn basis_unit(d: u8) -> Self {
        if d == 3 {
            QuadImaginary::zeta3()
        } else {
            QuadImaginary::gauss(BigRational::zero(), BigRational::one())
        }
    }

    /// `a + b·w` where `w` is [`QuadImaginary::basis_unit`].
    pub fn from_basis(a: BigRational, b: BigRational, d: u8) -> Result<Self, ScalarError> {
        let w = QuadImaginary::basis_unit(d);
        let base = QuadImaginary::new(a, BigRational::zero(), d)?;
        Ok(&base + &w.scale(&b))
    }

    /// Coordinates `(a, b)` with value `a + b·w`.
    pub fn basis_coords(&self) -> (BigRational, BigRational) {
        if self.d == 3 {
            // re + im√−3 = a + bω with ω = −1/2 + √−3/2
            let b = &self.im * BigRational::from_integer(BigInt::from(2));
            let a = &self.re + &self.im;
            (a, b)
        } else {
            (self.re.clone(), self.im.clone())
        }
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    /// Re(value).
    pub fn re(&self) -> &BigRational {
        &self.re
    }

    /// Coefficient of √−d; its sign is the sign of Im(value).
    pub fn im_coeff(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// |value|² = re² + d·im².
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im * self.d_rat()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        QuadImaginary {
            re: self.re.clone(),
            im: -&self.im,
            d: self.d,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadImaginary {
            re: &self.re * r,
            im: &self.im * r,
            d: self.d,
        }
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        Ok(self.conj().scale(&self.norm().recip()))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = QuadImaginary::one(self.d);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &sq;
            }
            exp >>= 1;
            if exp > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Compares by real part, then by imaginary part.
    pub fn cmp_re_im(&self, other: &Self) -> Ordering {
        self.re
            .cmp(&other.re)
            .then_with(|| self.im.cmp(&other.im))
    }

    fn d_rat(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d))
    }

    fn check_d(&self, other: &Self) {
        assert_eq!(self.d, other.d, "mixed quadratic fields");
    }
}

impl<'a> Add<&'a QuadImaginary> for &'a QuadImaginary {
    type Output = QuadImaginary;
    fn add(self, rhs: &'a QuadImaginary) -> QuadImaginary {
        self.check_d(rhs);
        QuadImaginary {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
            d: self.d,
        }
    }
}

impl<'a> Sub<&'a QuadImaginary> for &'a QuadImaginary {
    type Output = QuadImaginary;
    fn sub(self, rhs: &'a QuadImaginary) -> QuadImaginary {
        self.check_d(rhs);
        QuadImaginary {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
            d: self.d,
        }
    }
}

impl<'a> Mul<&'a QuadImaginary> for &'a QuadImaginary {
    type Output = QuadImaginary;
    fn mul(self, rhs: &'a QuadImaginary) -> QuadImaginary {
        self.check_d(rhs);
        // (a + b√−d)(c + e√−d) = (ac − d·be) + (ae + bc)√−d
        let re = &self.re * &rhs.re - &self.im * &rhs.im * self.d_rat();
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        QuadImaginary { re, im, d: self.d }
    }
}

impl Neg for &QuadImaginary {
    type Output = QuadImaginary;
    fn neg(self) -> QuadImaginary {
        QuadImaginary {
            re: -&self.re,
            im: -&self.im,
            d: self.d,
        }
    }
}

impl fmt::Display for QuadImaginary {
    /// Prints `a+b*w` in the literal grammar's basis (`w` = i or ω).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.basis_coords();
        if b.is_zero() {
            return write!(f, "{a}");
        }
        if a.is_zero() {
            return write!(f, "{b}*w");
        }
        if b.is_negative() {
            write!(f, "{a}-{}*w", -b)
        } else {
            write!(f, "{a}+{b}*w")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    #[test]
    fn zeta3_is_a_primitive_cube_root() {
        let w = QuadImaginary::zeta3();
        assert_ne!(w, QuadImaginary::one(3));
        assert_ne!(w.pow(2).unwrap(), QuadImaginary::one(3));
        assert_eq!(w.pow(3).unwrap(), QuadImaginary::one(3));
        assert_eq!(w.norm(), q(1));
        // 1 + ω + ω² = 0
        let sum = &(&QuadImaginary::one(3) + &w) + &w.pow(2).unwrap();
        assert!(sum.is_zero());
        assert_eq!(w.pow(2).unwrap().re(), &qq(-1, 2));
    }

    #[test]
    fn gaussian_unit_of_modulus_one() {
        let c = QuadImaginary::gauss(qq(3, 5), qq(4, 5));
        assert_eq!(c.norm(), q(1));
        let inv = c.inverse().unwrap();
        assert_eq!(inv, c.conj());
        assert_eq!(&c * &inv, QuadImaginary::one(1));
        assert_eq!(c.pow(-3).unwrap(), inv.pow(3).unwrap());
    }

    #[test]
    fn basis_round_trip() {
        for d in [1u8, 3] {
            let v = QuadImaginary::from_basis(qq(2, 3), qq(-5, 7), d).unwrap();
            assert_eq!(v.basis_coords(), (qq(2, 3), qq(-5, 7)));
        }
        assert_eq!(
            QuadImaginary::from_basis(q(0), q(1), 3).unwrap(),
            QuadImaginary::zeta3()
        );
    }

    #[test]
    fn rejects_other_discriminants() {
        assert!(QuadImaginary::new(q(1), q(1), 2).is_err());
        assert_eq!(
            QuadImaginary::zero(1).inverse(),
            Err(ScalarError::ZeroInverse)
        );
    }

    #[test]
    fn field_axioms_on_samples() {
        let samples: alloc::vec::Vec<QuadImaginary> = [(1, 2), (-3, 1), (0, 5), (7, -2)]
            .iter()
            .map(|&(a, b)| QuadImaginary::new(qq(a, 3), qq(b, 2), 3).unwrap())
            .collect();
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    assert_eq!(&(a * b) * c, a * &(b * c));
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
                assert_eq!(a * b, b * a);
            }
            if !a.is_zero() {
                assert_eq!(a * &a.inverse().unwrap(), QuadImaginary::one(3));
            }
        }
    }
}
