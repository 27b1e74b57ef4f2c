//! Exact complex rationals `a/b + i c/d` over arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    /// `num/den` as a real number. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn i() -> Self {
        Self::int(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Zero for QComplex {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for QComplex {
    fn one() -> Self {
        Self::int(1, 0)
    }
}

impl From<i64> for QComplex {
    fn from(v: i64) -> Self {
        Self::int(v, 0)
    }
}

impl From<BigRational> for QComplex {
    fn from(v: BigRational) -> Self {
        Self::real(v)
    }
}

impl Add for QComplex {
    type Output = QComplex;
    fn add(self, rhs: QComplex) -> QComplex {
        QComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn add(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&QComplex> for QComplex {
    fn add_assign(&mut self, rhs: &QComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for QComplex {
    type Output = QComplex;
    fn sub(self, rhs: QComplex) -> QComplex {
        QComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<'a> Sub<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn sub(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl SubAssign<&QComplex> for QComplex {
    fn sub_assign(&mut self, rhs: &QComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for QComplex {
    type Output = QComplex;
    fn mul(self, rhs: QComplex) -> QComplex {
        &self * &rhs
    }
}

impl<'a> Mul<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn mul(self, rhs: &QComplex) -> QComplex {
        QComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re, -self.im)
    }
}

impl Neg for &QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for QComplex {
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
                let sign = if self.im.is_negative() { '-' } else { '+' };
                let mag = self.im.abs();
                if mag.is_one() {
                    write!(f, "({}{}i)", self.re, sign)
                } else {
                    write!(f, "({}{}{}i)", self.re, sign, mag)
                }
            }
        }
    }
}
