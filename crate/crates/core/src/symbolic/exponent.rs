use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, Signed, ToPrimitive, Zero};

/// Exponents closer than this are merged when at least one side is real-valued.
pub const EXPONENT_TOLERANCE: f64 = 1e-12;

/// A monomial exponent: exact rational when the model supplies one, real otherwise.
#[derive(Clone, Copy, Debug)]
pub enum Exponent {
    Rational(Rational64),
    Real(f64),
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Rational(Rational64::new_raw(0, 1));
    pub const ONE: Exponent = Exponent::Rational(Rational64::new_raw(1, 1));

    pub fn int(n: i64) -> Self {
        Exponent::Rational(Rational64::from_integer(n))
    }

    /// `num/den` in lowest terms. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Rational(Rational64::new(num, den))
    }

    /// Real exponent, snapped to exact zero inside the tolerance band.
    pub fn real(value: f64) -> Self {
        if value.abs() < EXPONENT_TOLERANCE {
            Exponent::ZERO
        } else {
            Exponent::Real(value)
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Real(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exponent::Rational(r) => r.is_zero(),
            Exponent::Real(x) => x.abs() < EXPONENT_TOLERANCE,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Exponent::Rational(_))
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Exponent::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Exponent::Rational(r) => Exponent::Rational(-r),
            Exponent::Real(x) => Exponent::Real(-x),
        }
    }

    /// Sum, staying exact while both sides are rational and no overflow occurs.
    pub fn add(self, other: Exponent) -> Self {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => match a.checked_add(&b) {
                Some(r) => Exponent::Rational(r),
                None => Exponent::real(a.to_f64().unwrap_or(f64::NAN) + b.to_f64().unwrap_or(f64::NAN)),
            },
            (a, b) => Exponent::real(a.value() + b.value()),
        }
    }

    pub fn sub(self, other: Exponent) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Exponent) -> Self {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => match a.checked_mul(&b) {
                Some(r) => Exponent::Rational(r),
                None => Exponent::real(a.to_f64().unwrap_or(f64::NAN) * b.to_f64().unwrap_or(f64::NAN)),
            },
            (a, b) => Exponent::real(a.value() * b.value()),
        }
    }

    /// Total order used for canonical term sorting. Rational pairs compare exactly;
    /// anything involving a real exponent compares within [`EXPONENT_TOLERANCE`].
    pub fn compare(&self, other: &Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a.cmp(b),
            (a, b) => {
                let (x, y) = (a.value(), b.value());
                if (x - y).abs() <= EXPONENT_TOLERANCE {
                    Ordering::Equal
                } else {
                    x.partial_cmp(&y).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// Representative kept when two matching exponents merge: prefer the exact one.
    pub(crate) fn merge(self, other: Exponent) -> Exponent {
        if self.is_rational() {
            self
        } else {
            other
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Exponent::Rational(r) => r.is_negative(),
            Exponent::Real(x) => *x < 0.0,
        }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl From<Rational64> for Exponent {
    fn from(r: Rational64) -> Self {
        Exponent::Rational(r)
    }
}

/// Grammar form used inside `V^...`: bare for non-negative integers, parenthesized otherwise.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if r.is_integer() && !r.is_negative() => write!(f, "{}", r.numer()),
            Exponent::Rational(r) if r.is_integer() => write!(f, "({})", r.numer()),
            Exponent::Rational(r) => write!(f, "({}/{})", r.numer(), r.denom()),
            Exponent::Real(x) => write!(f, "({:?})", x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_rational() {
        let e = Exponent::ratio(2, 3).add(Exponent::ratio(1, 3));
        assert_eq!(e.as_integer(), Some(1));
        assert!(Exponent::ratio(1, 12).sub(Exponent::ratio(1, 12)).is_zero());
    }

    #[test]
    fn real_and_rational_match_within_tolerance() {
        assert_eq!(Exponent::real(0.5), Exponent::ratio(1, 2));
        assert_ne!(Exponent::real(0.5 + 1e-9), Exponent::ratio(1, 2));
        assert!(Exponent::real(1e-13).is_rational());
    }

    #[test]
    fn overflow_falls_back_to_real() {
        let big = Exponent::ratio(3, (1 << 40) + 1);
        let other = Exponent::ratio(5, (1 << 40) + 3);
        let sum = big.add(other);
        assert!(!sum.is_rational());
        assert!((sum.value() - (big.value() + other.value())).abs() < 1e-24);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Exponent::int(2).to_string(), "2");
        assert_eq!(Exponent::int(-1).to_string(), "(-1)");
        assert_eq!(Exponent::ratio(-5, 4).to_string(), "(-5/4)");
        assert_eq!(Exponent::Real(0.25).to_string(), "(0.25)");
    }
}
