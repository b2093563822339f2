//! Exact scalar arithmetic over the rationals and real quadratic extensions.
//!
//! All solver arithmetic runs over `Q` or over a single fixed `Q(sqrt(d))`
//! with `d` a squarefree integer >= 2.  Values from extensions with distinct
//! `d` may never be combined; the checked entry points report this as an
//! error while the operator impls treat it as a programming bug and panic.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

/// Convenience constructor for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Convenience constructor for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Two values from distinct quadratic extensions met in one operation.
    #[error("mixed quadratic discriminants: sqrt({0}) and sqrt({1})")]
    MixedDiscriminants(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    /// The requested extension generator is not `sqrt` of a squarefree
    /// integer >= 2 (or squarefreeness could not be certified).
    #[error("invalid quadratic discriminant {0}: must be a certified squarefree integer >= 2")]
    BadDiscriminant(u64),
}

/// An element of `Q` or of a real quadratic field `Q(sqrt(d))`.
///
/// Invariants: the `Quadratic` variant always has `b != 0` (a vanishing
/// irrational part normalizes to `Rational`) and `d` squarefree `>= 2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(Rat),
    /// `a + b*sqrt(d)` with `b != 0`.
    Quadratic { a: Rat, b: Rat, d: u64 },
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem::Rational(Rat::zero())
    }

    pub fn one() -> Self {
        FieldElem::Rational(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        FieldElem::Rational(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        FieldElem::Rational(rat(n, d))
    }

    pub fn from_rat(r: Rat) -> Self {
        FieldElem::Rational(r)
    }

    /// Builds `a + b*sqrt(d)`, normalizing `b == 0` to the rational variant.
    pub fn quadratic(a: Rat, b: Rat, d: u64) -> Result<Self, FieldError> {
        if b.is_zero() {
            return Ok(FieldElem::Rational(a));
        }
        if !certify_squarefree(d) {
            return Err(FieldError::BadDiscriminant(d));
        }
        Ok(FieldElem::Quadratic { a, b, d })
    }

    /// `sqrt(d)` itself as a field element.
    pub fn sqrt_of(d: u64) -> Result<Self, FieldError> {
        Self::quadratic(Rat::zero(), Rat::one(), d)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_zero(),
            // b != 0 by invariant, so a quadratic element is never zero.
            FieldElem::Quadratic { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, FieldElem::Rational(r) if r.is_one())
    }

    /// The discriminant of the extension this value lives in, if any.
    pub fn discriminant(&self) -> Option<u64> {
        match self {
            FieldElem::Rational(_) => None,
            FieldElem::Quadratic { d, .. } => Some(*d),
        }
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            FieldElem::Rational(r) => Some(r),
            FieldElem::Quadratic { .. } => None,
        }
    }

    /// Rational and irrational parts `(a, b)` of `a + b*sqrt(d)`.
    pub fn parts(&self) -> (Rat, Rat) {
        match self {
            FieldElem::Rational(r) => (r.clone(), Rat::zero()),
            FieldElem::Quadratic { a, b, .. } => (a.clone(), b.clone()),
        }
    }

    fn merged_disc(&self, other: &Self) -> Result<Option<u64>, FieldError> {
        match (self.discriminant(), other.discriminant()) {
            (None, x) | (x, None) => Ok(x),
            (Some(d1), Some(d2)) if d1 == d2 => Ok(Some(d1)),
            (Some(d1), Some(d2)) => Err(FieldError::MixedDiscriminants(d1, d2)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.merged_disc(other)?;
        let (a1, b1) = self.parts();
        let (a2, b2) = other.parts();
        Ok(rebuild(a1 + a2, b1 + b2, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.merged_disc(other)?;
        let (a1, b1) = self.parts();
        let (a2, b2) = other.parts();
        Ok(rebuild(a1 - a2, b1 - b2, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.merged_disc(other)?;
        let (a1, b1) = self.parts();
        let (a2, b2) = other.parts();
        match d {
            None => Ok(FieldElem::Rational(a1 * a2)),
            Some(d) => {
                let dr = rat_int(d as i64);
                let a = &a1 * &a2 + &b1 * &b2 * dr;
                let b = a1 * b2 + a2 * b1;
                Ok(rebuild(a, b, Some(d)))
            }
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn checked_inv(&self) -> Result<Self, FieldError> {
        match self {
            FieldElem::Rational(r) => {
                if r.is_zero() {
                    Err(FieldError::DivisionByZero)
                } else {
                    Ok(FieldElem::Rational(r.recip()))
                }
            }
            FieldElem::Quadratic { a, b, d } => {
                // (a + b sqrt d)^-1 = (a - b sqrt d) / (a^2 - b^2 d); the norm
                // is nonzero because d is not a perfect square.
                let norm = a * a - b * b * rat_int(*d as i64);
                debug_assert!(!norm.is_zero());
                Ok(rebuild(a / &norm, -(b / &norm), Some(*d)))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = FieldElem::one();
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    /// Exact sign: -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self {
            FieldElem::Rational(r) => sign_rat(r),
            FieldElem::Quadratic { a, b, d } => {
                // sign(a + b sqrt d) via rationalization: when a and b have
                // mixed signs, compare a^2 against b^2 d.
                match (sign_rat(a), sign_rat(b)) {
                    (s, 0) => s,
                    (0, s) => s,
                    (1, 1) => 1,
                    (-1, -1) => -1,
                    (1, -1) => sign_rat(&(a * a - b * b * rat_int(*d as i64))),
                    (-1, 1) => -sign_rat(&(a * a - b * b * rat_int(*d as i64))),
                    _ => unreachable!(),
                }
            }
        }
    }

    /// Total order among comparable values (same extension or rational);
    /// `None` when the discriminants differ.
    pub fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(match diff.signum() {
            x if x < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

fn sign_rat(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rebuild(a: Rat, b: Rat, d: Option<u64>) -> FieldElem {
    match d {
        Some(d) if !b.is_zero() => FieldElem::Quadratic { a, b, d },
        _ => FieldElem::Rational(a),
    }
}

/// Certifies that `d` is squarefree and `>= 2`.
///
/// Trial division covers every prime square up to `10^8`; beyond that the
/// remaining cofactor is accepted only if it is certainly squarefree (prime
/// or 1) and rejected otherwise, so the function never wrongly certifies.
pub fn certify_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut rest = d;
    let mut p: u64 = 2;
    while p <= 10_000 && p * p <= rest {
        if rest % (p * p) == 0 {
            return false;
        }
        if rest % p == 0 {
            rest /= p;
        }
        p += 1;
    }
    if rest == 1 {
        return true;
    }
    // rest has no prime factor <= 10^4 and is not a perfect square.  A
    // non-squarefree value of that shape must contain p^2*q or p^3 with
    // p, q > 10^4, which forces rest > 10^12; anything smaller is certainly
    // squarefree, anything larger is accepted only when prime.
    let r = rest.sqrt();
    if r * r == rest {
        return false;
    }
    rest < 1_000_000_000_000 || is_prime_u64(rest)
}

/// Deterministic Miller-Rabin for u64 (the chosen bases are exact for all
/// 64-bit inputs).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("field operation failed: {e}"))
            }
        }
        impl $trait for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let (a, b) = self.parts();
        rebuild(-a, -b, self.discriminant())
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        FieldElem::from_int(n)
    }
}

impl From<Rat> for FieldElem {
    fn from(r: Rat) -> Self {
        FieldElem::Rational(r)
    }
}

/// Renders a rational in canonical `p` / `p/q` form.
pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(r) => write!(f, "{}", render_rat(r)),
            FieldElem::Quadratic { a, b, d } => {
                let sign = if b.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}*sqrt({})", render_rat(a), sign, render_rat(&b.abs()), d)
            }
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt19() -> FieldElem {
        FieldElem::sqrt_of(19).unwrap()
    }

    #[test]
    fn rational_arithmetic_round_trip() {
        let x = FieldElem::from_ratio(3, 2);
        let y = FieldElem::from_int(-2);
        assert_eq!(&x + &y, FieldElem::from_ratio(-1, 2));
        assert_eq!(&x * &y, FieldElem::from_int(-3));
        assert_eq!(x.checked_div(&y).unwrap(), FieldElem::from_ratio(-3, 4));
    }

    #[test]
    fn quadratic_inverse_and_norm() {
        // (1 + sqrt(2))^-1 = sqrt(2) - 1
        let x = FieldElem::quadratic(rat_int(1), rat_int(1), 2).unwrap();
        let inv = x.checked_inv().unwrap();
        assert_eq!(inv, FieldElem::quadratic(rat_int(-1), rat_int(1), 2).unwrap());
        assert!((&x * &inv).is_one());
    }

    #[test]
    fn quadratic_collapses_to_rational() {
        let x = FieldElem::quadratic(rat_int(2), rat_int(3), 5).unwrap();
        let y = FieldElem::quadratic(rat_int(1), rat_int(-3), 5).unwrap();
        assert_eq!(&x + &y, FieldElem::from_int(3));
        assert_eq!((&x + &y).discriminant(), None);
    }

    #[test]
    fn mixed_discriminants_error() {
        let x = FieldElem::sqrt_of(2).unwrap();
        let y = FieldElem::sqrt_of(3).unwrap();
        assert_eq!(
            x.checked_add(&y),
            Err(FieldError::MixedDiscriminants(2, 3))
        );
    }

    #[test]
    fn non_squarefree_discriminant_rejected() {
        assert!(FieldElem::sqrt_of(12).is_err());
        assert!(FieldElem::sqrt_of(1).is_err());
        assert!(FieldElem::sqrt_of(19).is_ok());
    }

    #[test]
    fn root_of_known_quadratic_polynomial() {
        // t^2 + 5t + 3/2 vanishes at -5/2 + 1/2 sqrt(19).
        let t = FieldElem::quadratic(rat(-5, 2), rat(1, 2), 19).unwrap();
        let val = &(&t * &t) + &(&FieldElem::from_int(5) * &t);
        assert_eq!(&val + &FieldElem::from_ratio(3, 2), FieldElem::zero());
    }

    #[test]
    fn exact_sign_of_quadratic_values() {
        // 3 - sqrt(2) > 0, 1 - sqrt(2) < 0, sqrt(19) - 4 > 0.
        let pos = FieldElem::quadratic(rat_int(3), rat_int(-1), 2).unwrap();
        let neg = FieldElem::quadratic(rat_int(1), rat_int(-1), 2).unwrap();
        assert_eq!(pos.signum(), 1);
        assert_eq!(neg.signum(), -1);
        assert_eq!(sqrt19().checked_sub(&FieldElem::from_int(4)).unwrap().signum(), 1);
        assert_eq!(sqrt19().try_cmp(&FieldElem::from_int(5)), Some(Ordering::Less));
    }

    #[test]
    fn rendering_matches_grammar() {
        assert_eq!(FieldElem::from_ratio(-3, 2).to_string(), "-3/2");
        let r = FieldElem::quadratic(rat(-5, 2), rat(1, 2), 19).unwrap();
        assert_eq!(r.to_string(), "-5/2+1/2*sqrt(19)");
        let s = FieldElem::quadratic(rat_int(0), rat_int(-1), 2).unwrap();
        assert_eq!(s.to_string(), "0-1*sqrt(2)");
    }

    #[test]
    fn primality_and_squarefree_certification() {
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        assert!(certify_squarefree(19));
        assert!(certify_squarefree(2 * 3 * 5 * 7));
        assert!(!certify_squarefree(9));
        assert!(!certify_squarefree(4 * 19));
    }
}
