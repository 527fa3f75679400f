//! Real Clifford algebra Cl_m with e_j^2 = -1, dense blade-bitmask storage.

use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Result, RsqError};
use crate::scalar::{from_json, Scalar};

pub const MAX_DIM: usize = 6;

/// Sign of e_A e_B for blade bitmasks `a`, `b` under e_j^2 = -1.
pub fn blade_sign(a: usize, b: usize) -> i32 {
    let mut swaps = 0u32;
    let mut t = a >> 1;
    while t != 0 {
        swaps += (t & b).count_ones();
        t >>= 1;
    }
    let squares = (a & b).count_ones();
    if (swaps + squares) % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn grade_of(blade: usize) -> usize {
    blade.count_ones() as usize
}

fn conj_sign(r: usize) -> i32 {
    if (r * (r + 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn rev_sign(r: usize) -> i32 {
    if (r * r.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Grade involution sign (-1)^r.
fn main_sign(r: usize) -> i32 {
    if r % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    Conjugate,
    Reverse,
    Main,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<S> {
    dim: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Multivector<S> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "algebra dimension {dim} > {MAX_DIM}");
        Multivector { dim, coeffs: vec![S::zero(); 1 << dim] }
    }

    pub fn try_zero(dim: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(RsqError::UnsupportedDimension(dim));
        }
        Ok(Self::zero(dim))
    }

    pub fn scalar(dim: usize, s: S) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = s;
        m
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, S::one())
    }

    pub fn blade(dim: usize, mask: usize, s: S) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[mask] = s;
        m
    }

    /// Generator e_i, 1-based.
    pub fn e(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "generator e_{i} outside Cl_{dim}");
        Self::blade(dim, 1 << (i - 1), S::one())
    }

    /// Grade-1 element Σ v_i e_i.
    pub fn vector(dim: usize, v: &[S]) -> Self {
        assert!(v.len() <= dim);
        let mut m = Self::zero(dim);
        for (i, c) in v.iter().enumerate() {
            m.coeffs[1 << i] = c.clone();
        }
        m
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<S>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(RsqError::UnsupportedDimension(dim));
        }
        if coeffs.len() != 1 << dim {
            return Err(RsqError::Config(format!(
                "expected {} coefficients, got {}",
                1 << dim,
                coeffs.len()
            )));
        }
        Ok(Multivector { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> &S {
        &self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, s: S) {
        self.coeffs[mask] = s;
    }

    pub fn scalar_part(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn try_gp(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(RsqError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Multivector { dim: self.dim, coeffs: S::clifford_product(&self.coeffs, &other.coeffs) })
    }

    /// Geometric product; panics on dimension mismatch (use [`Self::try_gp`] to handle it).
    pub fn gp(&self, other: &Self) -> Self {
        self.try_gp(other).expect("geometric product of mismatched algebras")
    }

    fn map_sign(&self, f: impl Fn(usize) -> i32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| if f(grade_of(m)) > 0 { c.clone() } else { -c.clone() })
            .collect();
        Multivector { dim: self.dim, coeffs }
    }

    pub fn involution(&self, kind: Involution) -> Self {
        match kind {
            Involution::Conjugate => self.map_sign(conj_sign),
            Involution::Reverse => self.map_sign(rev_sign),
            Involution::Main => self.map_sign(main_sign),
        }
    }

    pub fn conj(&self) -> Self {
        self.involution(Involution::Conjugate)
    }

    pub fn rev(&self) -> Self {
        self.involution(Involution::Reverse)
    }

    /// Scalar part of conj(a)·a, computed as the coefficient sum of squares.
    pub fn norm_sq(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn grade_part(&self, r: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| if grade_of(m) == r { c.clone() } else { S::zero() })
            .collect();
        Multivector { dim: self.dim, coeffs }
    }

    pub fn is_grade(&self, r: usize) -> bool {
        self.coeffs.iter().enumerate().all(|(m, c)| grade_of(m) == r || c.is_zero())
    }

    pub fn is_vector(&self) -> bool {
        self.is_grade(1)
    }

    /// Components (v_1..v_m) of the grade-1 part.
    pub fn vector_coords(&self) -> Vec<S> {
        (0..self.dim).map(|i| self.coeffs[1 << i].clone()).collect()
    }

    /// Embeds into a larger algebra (same blade masks).
    pub fn lift(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let mut m = Self::zero(dim);
        m.coeffs[..self.coeffs.len()].clone_from_slice(&self.coeffs);
        m
    }

    /// Inverse of a versor (product of nonzero vectors) or a scalar: rev(a)/(a·rev(a)).
    pub fn versor_inverse(&self) -> Result<Self> {
        let r = self.rev();
        let n = self.gp(&r);
        let s = n.scalar_part().clone();
        if s.is_zero() || !n.sub(&Self::scalar(self.dim, s.clone())).is_zero_tol(1e-12) {
            return Err(RsqError::NotInvertible);
        }
        Ok(r.scale(&(S::one() / s)))
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.near(&S::zero(), tol))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn norm_f64(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn to_f64(&self) -> Multivector<f64> {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect() }
    }

    pub fn from_f64(m: &Multivector<f64>) -> Self {
        Multivector { dim: m.dim, coeffs: m.coeffs.iter().map(|c| S::from_f64(*c)).collect() }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| json!({"blade": m, "coeff": c.to_json()}))
            .collect();
        json!({"dim": self.dim, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v["dim"].as_u64().ok_or_else(|| RsqError::Parse("missing dim".into()))? as usize;
        let mut m = Self::try_zero(dim)?;
        if let Some(terms) = v["terms"].as_array() {
            for t in terms {
                let blade = t["blade"].as_u64().ok_or_else(|| RsqError::Parse("missing blade".into()))? as usize;
                if blade >= 1 << dim {
                    return Err(RsqError::Parse(format!("blade {blade} outside Cl_{dim}")));
                }
                let c: S = from_json(&t["coeff"])?;
                m.coeffs[blade] = m.coeffs[blade].clone() + c;
            }
        }
        Ok(m)
    }
}

impl<S: Scalar> Add for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, o: &Multivector<S>) -> Multivector<S> {
        assert_eq!(self.dim, o.dim);
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, o: &Multivector<S>) -> Multivector<S> {
        assert_eq!(self.dim, o.dim);
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, o: &Multivector<S>) -> Multivector<S> {
        self.gp(o)
    }
}

impl<S: Scalar> Neg for &Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<S: Scalar> Multivector<S> {
    pub fn add(&self, o: &Self) -> Self {
        self + o
    }

    pub fn sub(&self, o: &Self) -> Self {
        self - o
    }

    pub fn neg(&self) -> Self {
        -self
    }
}

/// Product of unit vectors, acting on vectors by x ↦ a x ã.
#[derive(Debug, Clone, PartialEq)]
pub struct PinElement<S> {
    factors: Vec<Multivector<S>>,
    product: Multivector<S>,
}

impl<S: Scalar> PinElement<S> {
    pub fn new(factors: Vec<Multivector<S>>, tol: f64) -> Result<Self> {
        let first = factors.first().ok_or_else(|| RsqError::Config("empty Pin factor list".into()))?;
        let dim = first.dim();
        let mut product = Multivector::one(dim);
        for (i, y) in factors.iter().enumerate() {
            if y.dim() != dim {
                return Err(RsqError::DimensionMismatch(dim, y.dim()));
            }
            if !y.is_vector() {
                return Err(RsqError::NotGradeOne);
            }
            if !y.norm_sq().near(&S::one(), tol) {
                return Err(RsqError::NotUnit(i));
            }
            product = product.gp(y);
        }
        Ok(PinElement { factors, product })
    }

    pub fn factors(&self) -> &[Multivector<S>] {
        &self.factors
    }

    pub fn product(&self) -> &Multivector<S> {
        &self.product
    }

    pub fn reflect(&self, x: &Multivector<S>) -> Result<Multivector<S>> {
        if x.dim() != self.product.dim() {
            return Err(RsqError::DimensionMismatch(self.product.dim(), x.dim()));
        }
        if !x.is_vector() {
            return Err(RsqError::NotGradeOne);
        }
        Ok(self.product.gp(x).gp(&self.product.rev()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Multivector<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn generator_relations() {
        for m in 1..=MAX_DIM {
            for i in 1..=m {
                for j in 1..=m {
                    let a = Q::e(m, i).gp(&Q::e(m, j));
                    let b = Q::e(m, j).gp(&Q::e(m, i));
                    let expect = if i == j { Q::scalar(m, q(-2)) } else { Q::zero(m) };
                    assert_eq!(&a + &b, expect);
                }
            }
        }
    }

    #[test]
    fn bivector_example() {
        let b = Q::blade(2, 0b11, q(1));
        let one = Q::one(2);
        assert_eq!((&one + &b).gp(&(&one - &b)), Q::scalar(2, q(2)));
    }

    #[test]
    fn involution_examples() {
        assert_eq!(Q::e(3, 1).conj(), -&Q::e(3, 1));
        let e12 = Q::blade(3, 0b11, q(1));
        assert_eq!(e12.rev(), -&e12);
        assert_eq!(e12.conj(), -&e12);
        let e123 = Q::blade(3, 0b111, q(1));
        assert_eq!(e123.conj(), e123);
        assert_eq!(e123.rev(), -&e123);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Q::e(3, 1).norm_sq(), q(1));
        assert_eq!(Q::zero(3).norm_sq(), q(0));
        assert_eq!((&Q::one(3) + &Q::e(3, 1)).norm_sq(), q(2));
    }

    #[test]
    fn reflect_examples() {
        let a = PinElement::new(vec![Q::e(3, 1)], 0.0).unwrap();
        assert_eq!(a.reflect(&Q::e(3, 1)).unwrap(), -&Q::e(3, 1));
        assert_eq!(a.reflect(&Q::e(3, 2)).unwrap(), Q::e(3, 2));
        assert_eq!(a.reflect(&Q::one(3)), Err(RsqError::NotGradeOne));
    }

    #[test]
    fn pin_rejects_non_unit() {
        let two = Q::e(3, 1).scale(&q(2));
        assert_eq!(PinElement::new(vec![two], 0.0), Err(RsqError::NotUnit(0)));
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(Q::e(2, 1).try_gp(&Q::e(3, 1)), Err(RsqError::DimensionMismatch(2, 3)));
    }

    #[test]
    fn json_roundtrip() {
        let mut a = Q::e(3, 2);
        a.set(0b101, Rational::from_ratio(-3, 7));
        let v = a.to_json();
        assert_eq!(v["terms"][1]["coeff"], "-3/7");
        assert_eq!(Q::from_json(&v).unwrap(), a);
    }

    #[test]
    fn versor_inverse_of_vector() {
        let v = Q::vector(3, &[q(1), q(2), q(0)]);
        let inv = v.versor_inverse().unwrap();
        assert_eq!(v.gp(&inv), Q::one(3));
        assert_eq!(inv, v.scale(&Rational::from_ratio(-1, 5)));
    }
}
