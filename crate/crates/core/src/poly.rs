//! Polynomials in named vector-variable blocks with Clifford coefficients.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::clifford::Multivector;
use crate::error::{Result, RsqError};
use crate::scalar::{from_json, Scalar};

pub const MAX_TOTAL_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

pub type Exponent = Vec<u8>;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<S> {
    dim: usize,
    blocks: Vec<(String, usize)>,
    terms: BTreeMap<Exponent, Multivector<S>>,
}

fn add_exp(a: &[u8], b: &[u8]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(dim: usize, blocks: &[(&str, usize)]) -> Self {
        MultiPoly {
            dim,
            blocks: blocks.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            terms: BTreeMap::new(),
        }
    }

    fn empty_like(&self) -> Self {
        MultiPoly { dim: self.dim, blocks: self.blocks.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, blocks: &[(&str, usize)], c: Multivector<S>) -> Self {
        let mut p = Self::zero(dim, blocks);
        let nv = p.nvars();
        p.add_term(vec![0; nv], c);
        p
    }

    /// The scalar variable `block_i` (1-based `i`).
    pub fn var(dim: usize, blocks: &[(&str, usize)], block: &str, i: usize) -> Result<Self> {
        let mut p = Self::zero(dim, blocks);
        let (off, ar) = p.block_range(block)?;
        assert!(i >= 1 && i <= ar, "variable index {i} outside block arity {ar}");
        let mut e = vec![0; p.nvars()];
        e[off + i - 1] = 1;
        p.add_term(e, Multivector::one(dim));
        Ok(p)
    }

    /// Σ_j x_j e_j for the block.
    pub fn vector_var(dim: usize, blocks: &[(&str, usize)], block: &str) -> Result<Self> {
        let mut p = Self::zero(dim, blocks);
        let (off, ar) = p.block_range(block)?;
        if ar > dim {
            return Err(RsqError::Config(format!("block `{block}` arity {ar} exceeds algebra dimension {dim}")));
        }
        for j in 0..ar {
            let mut e = vec![0; p.nvars()];
            e[off + j] = 1;
            p.add_term(e, Multivector::e(dim, j + 1));
        }
        Ok(p)
    }

    pub fn monomial(dim: usize, blocks: &[(&str, usize)], exp: Exponent, c: Multivector<S>) -> Self {
        let mut p = Self::zero(dim, blocks);
        assert_eq!(exp.len(), p.nvars());
        p.add_term(exp, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[(String, usize)] {
        &self.blocks
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Multivector<S>> {
        &self.terms
    }

    pub fn nvars(&self) -> usize {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// (offset, arity) of a block in the flat exponent vector.
    pub fn block_range(&self, name: &str) -> Result<(usize, usize)> {
        let mut off = 0;
        for (n, a) in &self.blocks {
            if n == name {
                return Ok((off, *a));
            }
            off += a;
        }
        Err(RsqError::UnknownBlock(name.to_string()))
    }

    pub fn add_term(&mut self, exp: Exponent, c: Multivector<S>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    fn check_compat(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(RsqError::DimensionMismatch(self.dim, o.dim));
        }
        if self.blocks != o.blocks {
            return Err(RsqError::BlockMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_compat(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible polynomials")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Multivector<S>) -> Multivector<S>) -> Self {
        let mut r = self.empty_like();
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    /// Coefficientwise conjugation (variables are real).
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn rev(&self) -> Self {
        self.map_coeffs(|c| c.rev())
    }

    /// a·p
    pub fn left_mul(&self, a: &Multivector<S>) -> Self {
        self.map_coeffs(|c| a.gp(c))
    }

    /// p·a
    pub fn right_mul(&self, a: &Multivector<S>) -> Self {
        self.map_coeffs(|c| c.gp(a))
    }

    pub fn try_pmul(&self, o: &Self) -> Result<Self> {
        self.check_compat(o)?;
        let mut r = self.empty_like();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = add_exp(ea, eb);
                if e.iter().map(|&x| x as usize).sum::<usize>() > MAX_TOTAL_DEGREE {
                    return Err(RsqError::Config(format!("total degree exceeds {MAX_TOTAL_DEGREE}")));
                }
                r.add_term(e, ca.gp(cb));
            }
        }
        Ok(r)
    }

    pub fn pmul(&self, o: &Self) -> Self {
        self.try_pmul(o).expect("polynomial product failed")
    }

    /// ∂/∂(block_j), 0-based `j`.
    pub fn partial(&self, block: &str, j: usize) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        assert!(j < ar);
        let idx = off + j;
        let mut r = self.empty_like();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            r.add_term(ne, c.scale(&S::from_i64(e[idx] as i64)));
        }
        Ok(r)
    }

    /// Multiplication by the scalar variable block_j (0-based).
    pub fn mul_var(&self, block: &str, j: usize) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        assert!(j < ar);
        let mut r = self.empty_like();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[off + j] += 1;
            r.add_term(ne, c.clone());
        }
        Ok(r)
    }

    fn check_arity(&self, block: &str) -> Result<(usize, usize)> {
        let (off, ar) = self.block_range(block)?;
        if ar > self.dim {
            return Err(RsqError::Config(format!(
                "block `{block}` arity {ar} exceeds algebra dimension {}",
                self.dim
            )));
        }
        Ok((off, ar))
    }

    /// Left: Σ e_j ∂_j p. Right: Σ (∂_j p) e_j.
    pub fn dirac(&self, block: &str, side: Side) -> Result<Self> {
        let (_, ar) = self.check_arity(block)?;
        let mut r = self.empty_like();
        for j in 0..ar {
            let d = self.partial(block, j)?;
            let ej = Multivector::e(self.dim, j + 1);
            let t = match side {
                Side::Left => d.left_mul(&ej),
                Side::Right => d.right_mul(&ej),
            };
            r = r.add(&t);
        }
        Ok(r)
    }

    pub fn laplacian(&self, block: &str) -> Result<Self> {
        let (_, ar) = self.block_range(block)?;
        let mut r = self.empty_like();
        for j in 0..ar {
            r = r.add(&self.partial(block, j)?.partial(block, j)?);
        }
        Ok(r)
    }

    pub fn euler(&self, block: &str) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        let mut r = self.empty_like();
        for (e, c) in &self.terms {
            let deg: i64 = e[off..off + ar].iter().map(|&x| x as i64).sum();
            r.add_term(e.clone(), c.scale(&S::from_i64(deg)));
        }
        Ok(r)
    }

    /// L_ij p = w_i ∂_j p − w_j ∂_i p (0-based indices).
    pub fn angular(&self, block: &str, i: usize, j: usize) -> Result<Self> {
        let a = self.partial(block, j)?.mul_var(block, i)?;
        let b = self.partial(block, i)?.mul_var(block, j)?;
        Ok(a.sub(&b))
    }

    /// Γ p = Σ_{i<j} e_i e_j L_ij p.
    pub fn gamma(&self, block: &str) -> Result<Self> {
        let (_, ar) = self.check_arity(block)?;
        let mut r = self.empty_like();
        for i in 0..ar {
            for j in i + 1..ar {
                let eij = Multivector::e(self.dim, i + 1).gp(&Multivector::e(self.dim, j + 1));
                r = r.add(&self.angular(block, i, j)?.left_mul(&eij));
            }
        }
        Ok(r)
    }

    /// Right-sided Γ: Σ_{i<j} (L_ij p) e_j e_i.
    pub fn gamma_right(&self, block: &str) -> Result<Self> {
        let (_, ar) = self.check_arity(block)?;
        let mut r = self.empty_like();
        for i in 0..ar {
            for j in i + 1..ar {
                let eji = Multivector::e(self.dim, j + 1).gp(&Multivector::e(self.dim, i + 1));
                r = r.add(&self.angular(block, i, j)?.right_mul(&eji));
            }
        }
        Ok(r)
    }

    /// Left: (Σ x_j e_j)·p. Right: p·(Σ x_j e_j).
    pub fn vector_embed(&self, block: &str, side: Side) -> Result<Self> {
        let (_, ar) = self.check_arity(block)?;
        let mut r = self.empty_like();
        for j in 0..ar {
            let ej = Multivector::e(self.dim, j + 1);
            let t = self.mul_var(block, j)?;
            r = r.add(&match side {
                Side::Left => t.left_mul(&ej),
                Side::Right => t.right_mul(&ej),
            });
        }
        Ok(r)
    }

    /// Σ x_j^2 over a block, as a scalar-coefficient polynomial with this layout.
    pub fn rho2(&self, block: &str) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        let mut r = self.empty_like();
        for j in 0..ar {
            let mut e = vec![0; self.nvars()];
            e[off + j] = 2;
            r.add_term(e, Multivector::one(self.dim));
        }
        Ok(r)
    }

    /// Block-degree if homogeneous in `block`; `None` for the zero polynomial.
    pub fn block_degree(&self, block: &str) -> Result<Option<usize>> {
        let (off, ar) = self.block_range(block)?;
        let mut deg = None;
        for e in self.terms.keys() {
            let d: usize = e[off..off + ar].iter().map(|&x| x as usize).sum();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return Err(RsqError::NotHomogeneous(block.to_string())),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    /// Re-expresses the polynomial over a superset block layout (missing blocks get exponent 0).
    pub fn with_blocks(&self, blocks: &[(&str, usize)]) -> Result<Self> {
        let mut r = Self::zero(self.dim, blocks);
        let mut map = Vec::new();
        for (name, ar) in &self.blocks {
            let (off, ar2) = r.block_range(name)?;
            if ar2 != *ar {
                return Err(RsqError::BlockMismatch);
            }
            map.push(off);
        }
        for (e, c) in &self.terms {
            let mut ne = vec![0; r.nvars()];
            let mut src = 0;
            for (bi, (_, ar)) in self.blocks.iter().enumerate() {
                ne[map[bi]..map[bi] + ar].copy_from_slice(&e[src..src + ar]);
                src += ar;
            }
            r.add_term(ne, c.clone());
        }
        Ok(r)
    }

    /// Renames a block; arity unchanged.
    pub fn rename_block(&self, from: &str, to: &str) -> Result<Self> {
        self.block_range(from)?;
        let mut r = self.clone();
        for b in &mut r.blocks {
            if b.0 == from {
                b.0 = to.to_string();
            }
        }
        Ok(r)
    }

    /// Substitutes the block variables by an affine image: x ↦ M x + t.
    pub fn affine_substitute(&self, block: &str, m: &[Vec<S>], t: &[S]) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        if m.len() != ar || t.len() != ar || m.iter().any(|row| row.len() != ar) {
            return Err(RsqError::Config("affine map shape mismatch".into()));
        }
        let layout: Vec<(&str, usize)> = self.blocks.iter().map(|(n, a)| (n.as_str(), *a)).collect();
        // images of each variable
        let mut images = Vec::with_capacity(ar);
        for i in 0..ar {
            let mut img = Self::zero(self.dim, &layout);
            let mut e0 = vec![0; self.nvars()];
            img.add_term(e0.clone(), Multivector::scalar(self.dim, t[i].clone()));
            for j in 0..ar {
                e0[off + j] = 1;
                img.add_term(e0.clone(), Multivector::scalar(self.dim, m[i][j].clone()));
                e0[off + j] = 0;
            }
            images.push(img);
        }
        let mut r = self.empty_like();
        for (e, c) in &self.terms {
            let mut base = e.clone();
            for x in &mut base[off..off + ar] {
                *x = 0;
            }
            let mut acc = Self::monomial(self.dim, &layout, base, c.clone());
            for i in 0..ar {
                for _ in 0..e[off + i] {
                    acc = acc.pmul(&images[i]);
                }
            }
            r = r.add(&acc);
        }
        Ok(r)
    }

    /// Divides by Σ x_j^2 over `block` exactly; errors if not divisible.
    pub fn divide_by_rho2(&self, block: &str) -> Result<Self> {
        let (off, ar) = self.block_range(block)?;
        let mut rem = self.clone();
        let mut quo = self.empty_like();
        loop {
            let lead = rem
                .terms
                .iter()
                .filter(|(e, _)| e[off] >= 2)
                .max_by_key(|(e, _)| e[off])
                .map(|(e, c)| (e.clone(), c.clone()));
            let Some((e, c)) = lead else { break };
            let mut q = e.clone();
            q[off] -= 2;
            quo.add_term(q.clone(), c.clone());
            for j in 0..ar {
                let mut t = q.clone();
                t[off + j] += 2;
                rem.add_term(t, c.neg());
            }
        }
        if !rem.is_zero() {
            return Err(RsqError::Config(format!("polynomial not divisible by |{block}|^2")));
        }
        Ok(quo)
    }

    fn point_coords<'a>(&self, block: &str, pt: &'a [S]) -> Result<&'a [S]> {
        let (_, ar) = self.block_range(block)?;
        if pt.len() == ar || pt.len() == ar + 1 {
            Ok(&pt[..ar])
        } else {
            Err(RsqError::PointArity { block: block.to_string(), arity: ar, got: pt.len() })
        }
    }

    /// Substitutes the given blocks; the result keeps only the unassigned blocks.
    /// A point with one extra trailing coordinate is accepted and that coordinate ignored.
    pub fn eval_partial(&self, assign: &[(&str, &[S])]) -> Result<Self> {
        let mut fixed: Vec<Option<&[S]>> = vec![None; self.blocks.len()];
        for (name, pt) in assign {
            let idx = self
                .blocks
                .iter()
                .position(|b| b.0 == *name)
                .ok_or_else(|| RsqError::UnknownBlock(name.to_string()))?;
            fixed[idx] = Some(self.point_coords(name, pt)?);
        }
        let remaining: Vec<(&str, usize)> = self
            .blocks
            .iter()
            .zip(&fixed)
            .filter(|(_, f)| f.is_none())
            .map(|((n, a), _)| (n.as_str(), *a))
            .collect();
        // power tables
        let mut r = Self::zero(self.dim, &remaining);
        let maxdeg = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        let mut pows: Vec<Vec<S>> = Vec::new();
        for (bi, f) in fixed.iter().enumerate() {
            let _ = bi;
            if let Some(pt) = f {
                for x in pt.iter() {
                    let mut row = vec![S::one()];
                    for k in 1..=maxdeg {
                        let v = row[k - 1].clone() * x.clone();
                        row.push(v);
                    }
                    pows.push(row);
                }
            }
        }
        for (e, c) in &self.terms {
            let mut val = S::one();
            let mut ne = Vec::with_capacity(r.nvars());
            let mut src = 0;
            let mut pi = 0;
            for (bi, (_, ar)) in self.blocks.iter().enumerate() {
                if fixed[bi].is_some() {
                    for j in 0..*ar {
                        let k = e[src + j] as usize;
                        if k > 0 {
                            val = val * pows[pi + j][k].clone();
                        }
                    }
                    pi += ar;
                } else {
                    ne.extend_from_slice(&e[src..src + ar]);
                }
                src += ar;
            }
            if !val.is_zero() {
                r.add_term(ne, c.scale(&val));
            }
        }
        Ok(r)
    }

    /// Full evaluation; every block must be assigned.
    pub fn eval(&self, assign: &[(&str, &[S])]) -> Result<Multivector<S>> {
        let p = self.eval_partial(assign)?;
        if !p.blocks.is_empty() {
            return Err(RsqError::Config(format!("unassigned block `{}`", p.blocks[0].0)));
        }
        Ok(p.terms.get(&Vec::new()).cloned().unwrap_or_else(|| Multivector::zero(self.dim)))
    }

    /// Explicit conversion to the float backend.
    pub fn to_f64(&self) -> MultiPoly<f64> {
        let mut r = MultiPoly { dim: self.dim, blocks: self.blocks.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c.to_f64());
        }
        r
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|c| c.coeffs().iter().map(|x| x.to_f64().abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            for (m, s) in c.coeffs().iter().enumerate() {
                if !s.is_zero() {
                    terms.push(json!({"exp": e, "blade": m, "coeff": s.to_json()}));
                }
            }
        }
        let blocks: Vec<Value> = self.blocks.iter().map(|(n, a)| json!([n, a])).collect();
        json!({"dim": self.dim, "blocks": blocks, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v["dim"].as_u64().ok_or_else(|| RsqError::Parse("missing dim".into()))? as usize;
        Multivector::<S>::try_zero(dim)?;
        let mut blocks = Vec::new();
        for b in v["blocks"].as_array().ok_or_else(|| RsqError::Parse("missing blocks".into()))? {
            let name = b[0].as_str().ok_or_else(|| RsqError::Parse("block name".into()))?;
            let ar = b[1].as_u64().ok_or_else(|| RsqError::Parse("block arity".into()))? as usize;
            blocks.push((name.to_string(), ar));
        }
        let mut p = MultiPoly { dim, blocks, terms: BTreeMap::new() };
        let nv = p.nvars();
        for t in v["terms"].as_array().ok_or_else(|| RsqError::Parse("missing terms".into()))? {
            let exp: Vec<u8> = t["exp"]
                .as_array()
                .ok_or_else(|| RsqError::Parse("missing exp".into()))?
                .iter()
                .map(|x| x.as_u64().map(|y| y as u8).ok_or_else(|| RsqError::Parse("exp entry".into())))
                .collect::<Result<_>>()?;
            if exp.len() != nv {
                return Err(RsqError::Parse(format!("exponent length {} != {}", exp.len(), nv)));
            }
            let blade = t["blade"].as_u64().ok_or_else(|| RsqError::Parse("missing blade".into()))? as usize;
            if blade >= 1 << dim {
                return Err(RsqError::Parse(format!("blade {blade} outside Cl_{dim}")));
            }
            let c: S = from_json(&t["coeff"])?;
            p.add_term(exp, Multivector::blade(dim, blade, c));
        }
        Ok(p)
    }
}
