//! Scalar backends: exact rationals for identity checks, `f64` for quadrature.
//!
//! Conversion between the two is always explicit (`to_f64`, [`Scalar::from_f64_exact`]).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::clifford::blade_sign;
use crate::error::{Result, RsqError};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + SubAssign
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_f64(&self) -> f64;

    /// Equality within `tol` for floats, exact equality for rationals.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// Parses `"p/q"`, `"p"` or a decimal literal.
    fn parse_literal(s: &str) -> Result<Self>;

    /// Square root when representable; `None` otherwise (irrational in exact mode).
    fn sqrt_opt(&self) -> Option<Self>;

    /// Explicit float import; rationals take the exact binary value.
    fn from_f64(v: f64) -> Self;

    /// JSON form: floats as numbers, rationals as `"p/q"` strings.
    fn to_json(&self) -> serde_json::Value;

    /// Dense Clifford product of coefficient arrays indexed by blade mask.
    fn clifford_product(a: &[Self], b: &[Self]) -> Vec<Self> {
        let mut out = vec![Self::zero(); a.len()];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let p = ca.clone() * cb.clone();
                if blade_sign(i, j) > 0 {
                    out[i ^ j] += p;
                } else {
                    out[i ^ j] -= p;
                }
            }
        }
        out
    }
}

/// Integer numerators over a common denominator.
fn clear_denominators(a: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = a.iter().filter(|c| !c.is_zero()).fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let nums = a.iter().map(|c| if c.is_zero() { BigInt::zero() } else { c.numer() * (&l / c.denom()) }).collect();
    (nums, l)
}

fn small_product(a: &[BigInt], b: &[BigInt]) -> Option<Vec<i128>> {
    let a: Vec<i64> = a.iter().map(|c| c.to_i64()).collect::<Option<_>>()?;
    let b: Vec<i64> = b.iter().map(|c| c.to_i64()).collect::<Option<_>>()?;
    let mut out = vec![0i128; a.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y == 0 {
                continue;
            }
            let p = x as i128 * y as i128;
            let slot = &mut out[i ^ j];
            *slot = if blade_sign(i, j) > 0 { slot.checked_add(p)? } else { slot.checked_sub(p)? };
        }
    }
    Some(out)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn parse_literal(s: &str) -> Result<Self> {
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| RsqError::Parse(s.to_string()))?;
            let q: f64 = q.trim().parse().map_err(|_| RsqError::Parse(s.to_string()))?;
            return Ok(p / q);
        }
        s.trim().parse().map_err(|_| RsqError::Parse(s.to_string()))
    }

    fn sqrt_opt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn clifford_product(a: &[Self], b: &[Self]) -> Vec<Self> {
        let (na, la) = clear_denominators(a);
        let (nb, lb) = clear_denominators(b);
        let den = la * lb;
        let nums: Vec<BigInt> = match small_product(&na, &nb) {
            Some(v) => v.into_iter().map(BigInt::from).collect(),
            None => {
                let mut out = vec![BigInt::zero(); a.len()];
                for (i, x) in na.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in nb.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        if blade_sign(i, j) > 0 {
                            out[i ^ j] += x * y;
                        } else {
                            out[i ^ j] -= x * y;
                        }
                    }
                }
                out
            }
        };
        nums.into_iter().map(|x| if x.is_zero() { Self::zero() } else { BigRational::new(x, den.clone()) }).collect()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        if n.is_finite() && d.is_finite() {
            n / d
        } else {
            // very large numerators/denominators: scale down first
            let shift = self.numer().bits().max(self.denom().bits()) as i64 - 900;
            let shift = shift.max(0) as usize;
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('.') || s.contains('e') || s.contains('E') {
            let v: f64 = s.parse().map_err(|_| RsqError::Parse(s.to_string()))?;
            return BigRational::from_float(v).ok_or_else(|| RsqError::Parse(s.to_string()));
        }
        BigRational::from_str(s).map_err(|_| RsqError::Parse(s.to_string()))
    }

    fn sqrt_opt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        let r = BigRational::new(n, d);
        (&r * &r == *self).then_some(r)
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational_string(self))
    }
}

pub fn rational_string(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn abs<S: Scalar>(v: &S) -> S {
    if v.to_f64() < 0.0 {
        -v.clone()
    } else {
        v.clone()
    }
}

/// Product of the odd numbers `(m-1)!!` for even `m`, the sphere-moment building block.
pub fn double_factorial_odd(m: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut j = m as i64 - 1;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// Parses a JSON number or `"p/q"` string into a scalar.
pub fn from_json<S: Scalar>(v: &serde_json::Value) -> Result<S> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(S::from_i64(i))
            } else {
                Ok(S::from_f64(n.as_f64().unwrap_or(f64::NAN)))
            }
        }
        serde_json::Value::String(s) => S::parse_literal(s),
        other => Err(RsqError::Parse(format!("expected scalar, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let r = Rational::parse_literal("-3/6").unwrap();
        assert_eq!(r, Rational::from_ratio(-1, 2));
        assert_eq!(rational_string(&r), "-1/2");
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(Rational::parse_literal("0.5").unwrap(), Rational::from_ratio(1, 2));
        assert!(f64::parse_literal("x").is_err());
    }

    #[test]
    fn sqrt_exactness() {
        assert_eq!(Rational::from_ratio(9, 4).sqrt_opt(), Some(Rational::from_ratio(3, 2)));
        assert_eq!(Rational::from_i64(2).sqrt_opt(), None);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((Scalar::to_f64(&r) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn odd_double_factorial() {
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(2), BigInt::from(1));
        assert_eq!(double_factorial_odd(4), BigInt::from(3));
        assert_eq!(double_factorial_odd(6), BigInt::from(15));
    }
}
