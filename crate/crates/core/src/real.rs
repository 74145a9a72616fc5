//! Exact-when-possible real numbers.
//!
//! Generator parameters and grid points are exact rationals. Values that come
//! out of root isolation or transcendental functions are plain `f64`. Mixing
//! the two degrades to `f64`; rational overflow degrades the same way.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Exact rational used for generator parameters.
pub type Q = Ratio<i128>;

#[derive(Clone, Copy, Debug)]
pub enum Real {
    Exact(Q),
    Approx(f64),
}

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn q_to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

/// Parses `3`, `-2.75`, `1/3` or `1e-3` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational number: `{s}`"),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_q(n)?;
        let d = parse_q(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return n.checked_div(&d).ok_or_else(bad);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: i128 = joined.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(10);
    let factor = if scale >= 0 {
        num_traits::checked_pow(ten, scale as usize)
    } else {
        num_traits::checked_pow(ten, (-scale) as usize).map(|p| p.recip())
    }
    .ok_or_else(bad)?;
    let v = Q::from_integer(numer).checked_mul(&factor).ok_or_else(bad)?;
    Ok(if neg { -v } else { v })
}

impl Real {
    pub fn int(n: i128) -> Self {
        Real::Exact(Q::from_integer(n))
    }

    pub fn zero() -> Self {
        Real::Exact(Q::zero())
    }

    /// Wraps a float. Non-finite inputs are a logic error upstream.
    pub fn approx(x: f64) -> Self {
        debug_assert!(x.is_finite(), "non-finite real: {x}");
        Real::Approx(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn exact(&self) -> Option<Q> {
        match self {
            Real::Exact(q) => Some(*q),
            Real::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q_to_f64(q),
            Real::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(q) => q.is_zero(),
            Real::Approx(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Real::Exact(q) => q.is_negative(),
            Real::Approx(x) => *x < 0.0,
        }
    }

    pub fn abs(self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    /// Largest integer not above the value.
    pub fn floor_int(&self) -> Option<i128> {
        match self {
            Real::Exact(q) => Some(q.floor().to_integer()),
            Real::Approx(x) => {
                let f = x.floor();
                (f.abs() < 1.7e38).then_some(f as i128)
            }
        }
    }

    /// The integer value, if this is exactly an integer.
    pub fn as_integer(&self) -> Option<i128> {
        match self {
            Real::Exact(q) if q.is_integer() => Some(q.to_integer()),
            Real::Exact(_) => None,
            Real::Approx(x) => (x.fract() == 0.0 && x.abs() < 1.7e38).then_some(*x as i128),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn lift(
        self,
        rhs: Self,
        int_op: impl FnOnce(i128, i128) -> Option<i128>,
        exact: impl FnOnce(&Q, &Q) -> Option<Q>,
        approx: impl FnOnce(f64, f64) -> f64,
    ) -> Self {
        if let (Real::Exact(a), Real::Exact(b)) = (&self, &rhs) {
            if a.is_integer() && b.is_integer() {
                if let Some(v) = int_op(*a.numer(), *b.numer()) {
                    return Real::Exact(Q::from_integer(v));
                }
            }
            if let Some(v) = exact(a, b) {
                return Real::Exact(v);
            }
        }
        Real::Approx(approx(self.to_f64(), rhs.to_f64()))
    }
}

impl From<Q> for Real {
    fn from(q: Q) -> Self {
        Real::Exact(q)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n as i128)
    }
}

impl From<i32> for Real {
    fn from(n: i32) -> Self {
        Real::int(n as i128)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::approx(x)
    }
}

impl FromStr for Real {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_q(s).map(Real::Exact)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        self.lift(rhs, i128::checked_add, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        self.lift(rhs, i128::checked_sub, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        self.lift(rhs, i128::checked_mul, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

/// Division by an exact zero panics like integer division; callers guard it.
impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        self.lift(
            rhs,
            |a, b| if a.checked_rem(b)? == 0 { a.checked_div(b) } else { None },
            |a, b| {
                assert!(!b.is_zero(), "division of reals by zero");
                a.checked_div(b)
            },
            |a, b| a / b,
        )
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(x) => Real::Approx(-x),
        }
    }
}

impl PartialEq for Real {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            // Denominators of reduced ratios are positive.
            (Real::Exact(a), Real::Exact(b)) if a.denom() == b.denom() => Some(a.numer().cmp(b.numer())),
            (Real::Exact(a), Real::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Real::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Real::Exact(q) if q.is_integer() => match q.numer().to_i64() {
                Some(n) => s.serialize_i64(n),
                None => s.serialize_str(&self.to_string()),
            },
            Real::Exact(_) => s.serialize_str(&self.to_string()),
            Real::Approx(x) => s.serialize_f64(*x),
        }
    }
}

/// Least common multiple of two positive rationals: the smallest positive
/// rational that is an integer multiple of both.
pub fn lcm_q(a: &Q, b: &Q) -> Option<Q> {
    // a = p/q, b = r/s  ->  lcm = lcm(p*s, r*q) / (q*s)
    let ps = a.numer().checked_mul(b.denom())?;
    let rq = b.numer().checked_mul(a.denom())?;
    let qs = a.denom().checked_mul(b.denom())?;
    let g = ps.gcd(&rq);
    let l = (ps / g).checked_mul(rq)?;
    Some(Q::new(l, qs))
}

pub fn is_integer_multiple(x: &Q, unit: &Q) -> bool {
    !unit.is_zero() && (x / unit).is_integer()
}

/// Running sum that stays exact while every addend is exact, then switches to
/// Neumaier-compensated floating point.
#[derive(Clone, Debug)]
pub struct RealSum {
    exact: Option<Q>,
    sum: f64,
    comp: f64,
}

impl Default for RealSum {
    fn default() -> Self {
        RealSum {
            exact: Some(Q::zero()),
            sum: 0.0,
            comp: 0.0,
        }
    }
}

impl RealSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Real) {
        if let (Some(acc), Real::Exact(v)) = (&self.exact, &x) {
            if let Some(s) = acc.checked_add(v) {
                self.exact = Some(s);
                return;
            }
        }
        if let Some(acc) = self.exact.take() {
            self.sum = q_to_f64(&acc);
            self.comp = 0.0;
        }
        self.add_f64(x.to_f64());
    }

    fn add_f64(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> Real {
        match &self.exact {
            Some(q) => Real::Exact(*q),
            None => Real::Approx(self.sum + self.comp),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal_and_fraction() {
        assert_eq!(parse_q("2.5").unwrap(), q(5, 2));
        assert_eq!(parse_q("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_q("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_q("1e3").unwrap(), q(1000, 1));
        assert_eq!(parse_q("2.5e-1").unwrap(), q(1, 4));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Real::from(q(1, 3));
        let b = Real::from(q(2, 3));
        assert_eq!(a + b, Real::int(1));
        assert!((a + b).is_exact());
        assert!(!(a + Real::approx(0.5)).is_exact());
    }

    #[test]
    fn overflow_degrades_to_float() {
        let big = Real::Exact(Q::from_integer(i128::MAX / 2));
        let s = big + big + big;
        assert!(!s.is_exact());
        assert!(s.to_f64() > 2.0e38);
    }

    #[test]
    fn lcm_of_rationals() {
        assert_eq!(lcm_q(&q(1, 2), &q(1, 3)).unwrap(), q(1, 1));
        assert_eq!(lcm_q(&q(3, 1), &q(2, 1)).unwrap(), q(6, 1));
        assert_eq!(lcm_q(&q(3, 2), &q(1, 1)).unwrap(), q(3, 1));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = RealSum::new();
        s.add(Real::approx(1e16));
        for _ in 0..1000 {
            s.add(Real::approx(1.0));
        }
        s.add(Real::approx(-1e16));
        assert_eq!(s.value().to_f64(), 1000.0);
    }
}
