//! Scalar fields used by the kernel: `f64` for sampling and meshing, and
//! arbitrary-precision rationals for the exact certification paths.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::{Abs, CheckedSqrt, Sign};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;

/// Alias for the exact scalar type.
pub type Rational = malachite_q::Rational;

/// A real scalar field with an optional tolerance-aware sign test.
///
/// Exact implementations ignore every tolerance argument.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Square root when it is representable in the field.
    fn try_sqrt(&self) -> Option<Self>;

    /// Sign of `self` where values within `tol` of zero count as zero.
    fn sign_tol(&self, tol: f64) -> Ordering;

    fn is_zero(&self) -> bool {
        self.sign_tol(0.0) == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.sign_tol(0.0) == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.sign_tol(0.0) == Ordering::Less
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn two() -> Self {
        Self::from_i64(2)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign_tol(tol) == Ordering::Equal
    }

    fn is_pos_tol(&self, tol: f64) -> bool {
        self.sign_tol(tol) == Ordering::Greater
    }

    fn is_neg_tol(&self, tol: f64) -> bool {
        self.sign_tol(tol) == Ordering::Less
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn sign_tol(&self, tol: f64) -> Ordering {
        if f64::abs(*self) <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational::from(0u32)
    }

    fn one() -> Self {
        Rational::from(1u32)
    }

    /// Exact binary expansion of a finite double.
    fn from_f64(x: f64) -> Self {
        Rational::try_from(x).expect("finite input")
    }

    fn from_i64(n: i64) -> Self {
        Rational::from(n)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn abs(&self) -> Self {
        Abs::abs(self)
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        CheckedSqrt::checked_sqrt(self)
    }

    fn sign_tol(&self, _tol: f64) -> Ordering {
        Sign::sign(self)
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (p.trim(), q.trim());
        let digits = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_ascii_digit());
        let p_ok = digits(p.strip_prefix('-').unwrap_or(p));
        let q_ok = digits(q.strip_prefix('-').unwrap_or(q));
        if !p_ok || !q_ok {
            return None;
        }
        let (p, q) = (Rational::from_str(p).ok()?, Rational::from_str(q).ok()?);
        return (!q.is_zero()).then(|| p / q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let r = Rational::from_str(&format!("{digits}/1{}", "0".repeat(frac_part.len()))).ok()?;
    Some(if neg { -r } else { r })
}

/// Convenience constructor for small exact constants.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_signeds(num, den)
}

/// Nearest double; saturates to infinity and underflows to zero.
pub fn rational_to_f64(r: &Rational) -> f64 {
    f64::rounding_from(r, RoundingMode::Nearest).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rat(9, 4).try_sqrt(), Some(rat(3, 2)));
        assert_eq!(rat(3, 1).try_sqrt(), None);
        assert_eq!(rat(-1, 1).try_sqrt(), None);
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("107/12"), Some(rat(107, 12)));
        assert_eq!(parse_rational("-3"), Some(rat(-3, 1)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn float_sign_respects_tolerance() {
        assert_eq!(1e-13_f64.sign_tol(1e-12), Ordering::Equal);
        assert_eq!((-1e-11_f64).sign_tol(1e-12), Ordering::Less);
        assert_eq!(rat(1, 1_000_000_000_000_000).sign_tol(1.0), Ordering::Greater);
    }
}
