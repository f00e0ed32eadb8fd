//! Exact arithmetic in the quadratic field Q(√2).

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type Rat = Rational64;

/// The number `a + b√2` with rational `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub a: Rat,
    pub b: Rat,
}

impl QSqrt2 {
    pub fn new(a: Rat, b: Rat) -> Self {
        QSqrt2 { a, b }
    }

    pub fn from_int(k: i64) -> Self {
        QSqrt2 { a: Rat::from_integer(k), b: Rat::zero() }
    }

    pub fn from_rat(a: Rat) -> Self {
        QSqrt2 { a, b: Rat::zero() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn sqrt2() -> Self {
        QSqrt2 { a: Rat::zero(), b: Rat::one() }
    }

    /// 1/√2 = √2/2.
    pub fn inv_sqrt2() -> Self {
        QSqrt2 { a: Rat::zero(), b: Rat::new(1, 2) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = *self.a.numer() as f64 / *self.a.denom() as f64;
        let b = *self.b.numer() as f64 / *self.b.denom() as f64;
        a + b * std::f64::consts::SQRT_2
    }

    /// Galois conjugate `a - b√2`.
    pub fn conj(&self) -> Self {
        QSqrt2 { a: self.a, b: -self.b }
    }

    /// Field norm `a² - 2b²`.
    pub fn norm(&self) -> Rat {
        self.a * self.a - Rat::from_integer(2) * self.b * self.b
    }

    pub fn inverse(&self) -> Option<Self> {
        let nrm = self.norm();
        if nrm.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QSqrt2 { a: c.a / nrm, b: c.b / nrm })
    }

    /// Sign of the real number, exact.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sa >= 0 && sb >= 0 {
            return 1;
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        // opposite signs: compare a² with 2b²
        let a2 = self.a * self.a;
        let b2 = Rat::from_integer(2) * self.b * self.b;
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }
}

fn sgn(r: &Rat) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl AddAssign for QSqrt2 {
    fn add_assign(&mut self, o: QSqrt2) {
        self.a += o.a;
        self.b += o.b;
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { a: -self.a, b: -self.b }
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        let two = Rat::from_integer(2);
        QSqrt2 {
            a: self.a * o.a + two * self.b * o.b,
            b: self.a * o.b + self.b * o.a,
        }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}√2", self.a, -self.b)
                } else {
                    write!(f, "{}+{}√2", self.a, self.b)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inv_sqrt2_squares_to_half() {
        let h = QSqrt2::inv_sqrt2() * QSqrt2::inv_sqrt2();
        assert_eq!(h, QSqrt2::from_rat(Rat::new(1, 2)));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = QSqrt2::new(Rat::new(3, 2), Rat::new(-1, 3));
        assert_eq!(x * x.inverse().unwrap(), QSqrt2::one());
    }

    #[test]
    fn signum_mixed() {
        assert_eq!(QSqrt2::new(Rat::from_integer(1), Rat::from_integer(-1)).signum(), -1);
        assert_eq!(QSqrt2::new(Rat::from_integer(2), Rat::from_integer(-1)).signum(), 1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }

    #[test]
    fn to_f64_matches() {
        let x = QSqrt2::new(Rat::new(1, 2), Rat::from_integer(1));
        assert!((x.to_f64() - (0.5 + 2f64.sqrt())).abs() < 1e-15);
    }
}
