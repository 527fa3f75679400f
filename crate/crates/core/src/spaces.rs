//! Harmonic and monogenic polynomial spaces, the Almansi–Fischer split and P_k.

use num_integer::binomial;
use num_traits::Zero;

use crate::clifford::Multivector;
use crate::error::{Result, RsqError};
use crate::linalg::{nullspace, rank};
use crate::poly::{Exponent, MultiPoly, Side};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    HarmonicScalar,
    MonogenicLeft,
    MonogenicRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Projection {
    #[serde(rename = "Pk")]
    Pk,
    #[serde(rename = "IminusPk")]
    IminusPk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceBasis<S> {
    pub n: usize,
    pub k: usize,
    pub kind: BasisKind,
    /// Multiset labels σ (entries in 2..=n) for Fueter elements; empty for harmonic bases.
    pub labels: Vec<Vec<usize>>,
    pub elements: Vec<MultiPoly<S>>,
}

impl<S: Scalar> SpaceBasis<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "kind": self.kind,
            "labels": self.labels,
            "elements": self.elements.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Exponent vectors of total degree `k` in `n` variables, in lexicographically decreasing order.
pub fn monomials(n: usize, k: usize) -> Vec<Exponent> {
    fn rec(n: usize, k: usize, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if n == 1 {
            prefix.push(k as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a as u8);
            rec(n - 1, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `k` from {2,…,n}, as nondecreasing lists.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(lo: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in lo..=n {
            cur.push(i);
            rec(i, n, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2, n, k, &mut Vec::new(), &mut out);
    out
}

/// Distinct orderings of a multiset.
pub fn distinct_permutations(sigma: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rem: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut seen = Vec::new();
        for i in 0..rem.len() {
            if seen.contains(&rem[i]) {
                continue;
            }
            seen.push(rem[i]);
            let x = rem.remove(i);
            cur.push(x);
            rec(rem, cur, out);
            cur.pop();
            rem.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut sigma.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(RsqError::AmbientDimension(n));
    }
    Ok(())
}

/// z_i = u_i − u_1 e_1^{-1} e_i.
pub fn fueter_variable<S: Scalar>(n: usize, dim: usize, block: &str, i: usize) -> Result<MultiPoly<S>> {
    let blocks = [(block, n)];
    let ui = MultiPoly::var(dim, &blocks, block, i)?;
    let u1 = MultiPoly::var(dim, &blocks, block, 1)?;
    let e1inv = Multivector::e(dim, 1).versor_inverse()?;
    let c = e1inv.gp(&Multivector::e(dim, i));
    Ok(ui.sub(&u1.left_mul(&c)))
}

/// P_σ = (1/k!) Σ over distinct orderings of σ of z_{i_1}⋯z_{i_k}, in block `block` of arity n,
/// with coefficients in Cl_dim (dim ≥ n).
pub fn fueter_polynomial<S: Scalar>(n: usize, dim: usize, block: &str, sigma: &[usize]) -> Result<MultiPoly<S>> {
    let blocks = [(block, n)];
    let zs: Vec<MultiPoly<S>> = (2..=n).map(|i| fueter_variable(n, dim, block, i)).collect::<Result<_>>()?;
    let mut acc = MultiPoly::zero(dim, &blocks);
    for perm in distinct_permutations(sigma) {
        let mut t = MultiPoly::constant(dim, &blocks, Multivector::one(dim));
        for &i in &perm {
            t = t.pmul(&zs[i - 2]);
        }
        acc = acc.add(&t);
    }
    let kf: i64 = (1..=sigma.len() as i64).product();
    Ok(acc.scale(&(S::one() / S::from_i64(kf))))
}

/// Fueter basis of M_k (right-module basis) in `Cl_dim`, block `u` of arity n.
pub fn monogenic_basis_in<S: Scalar>(n: usize, k: usize, dim: usize, block: &str) -> Result<SpaceBasis<S>> {
    check_n(n)?;
    if dim < n {
        return Err(RsqError::Config(format!("algebra dimension {dim} < n = {n}")));
    }
    let labels = multisets(n, k);
    let elements = labels.iter().map(|s| fueter_polynomial(n, dim, block, s)).collect::<Result<_>>()?;
    Ok(SpaceBasis { n, k, kind: BasisKind::MonogenicLeft, labels, elements })
}

pub fn monogenic_basis<S: Scalar>(n: usize, k: usize) -> Result<SpaceBasis<S>> {
    monogenic_basis_in(n, k, n, "u")
}

/// Conjugated Fueter basis; spans the right-monogenic polynomials of degree k.
pub fn right_monogenic_basis<S: Scalar>(n: usize, k: usize) -> Result<SpaceBasis<S>> {
    let mut b = monogenic_basis::<S>(n, k)?;
    b.elements = b.elements.iter().map(|p| p.conj()).collect();
    b.kind = BasisKind::MonogenicRight;
    Ok(b)
}

/// Real scalar harmonic polynomials of degree k in n variables (nullspace of Δ).
pub fn harmonic_basis<S: Scalar>(n: usize, k: usize, dim: usize, block: &str) -> Result<SpaceBasis<S>> {
    let blocks = [(block, n)];
    let src = monomials(n, k);
    let elements = if k < 2 {
        src.iter().map(|e| MultiPoly::monomial(dim, &blocks, e.clone(), Multivector::one(dim))).collect()
    } else {
        let dst = monomials(n, k - 2);
        let mut m = vec![vec![S::zero(); src.len()]; dst.len()];
        for (c, e) in src.iter().enumerate() {
            let lap = MultiPoly::monomial(dim, &blocks, e.clone(), Multivector::<S>::one(dim)).laplacian(block)?;
            for (ex, co) in lap.terms() {
                let r = dst.iter().position(|d| d == ex).expect("degree k-2 monomial");
                m[r][c] = co.scalar_part().clone();
            }
        }
        nullspace(&m, src.len())
            .into_iter()
            .map(|v| {
                let mut p = MultiPoly::zero(dim, &blocks);
                for (e, c) in src.iter().zip(v) {
                    p.add_term(e.clone(), Multivector::scalar(dim, c));
                }
                p
            })
            .collect()
    };
    Ok(SpaceBasis { n, k, kind: BasisKind::HarmonicScalar, labels: Vec::new(), elements })
}

/// Real dimension of Cl_n-valued harmonics of degree k, by rank of the Laplacian system.
pub fn harmonic_dimension_rank(n: usize, k: usize) -> Result<usize> {
    let scalar = harmonic_basis::<Rational>(n, k, n, "u")?.elements.len();
    Ok(scalar << n)
}

/// Real dimension of left-monogenic Cl_n-valued polynomials of degree k, by rank of D.
pub fn monogenic_dimension_rank(n: usize, k: usize) -> Result<usize> {
    let blocks = [("u", n)];
    let src = monomials(n, k);
    let nb = 1usize << n;
    let cols = src.len() * nb;
    if k == 0 {
        return Ok(cols);
    }
    let dst = monomials(n, k - 1);
    let mut m = vec![vec![Rational::from_i64(0); cols]; dst.len() * nb];
    for (ci, e) in src.iter().enumerate() {
        for blade in 0..nb {
            let p = MultiPoly::monomial(n, &blocks, e.clone(), Multivector::<Rational>::blade(n, blade, Rational::from_i64(1)));
            let d = p.dirac("u", Side::Left)?;
            for (ex, co) in d.terms() {
                let r = dst.iter().position(|x| x == ex).expect("degree k-1 monomial");
                for (b2, c) in co.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        m[r * nb + b2][ci * nb + blade] = c.clone();
                    }
                }
            }
        }
    }
    Ok(cols - rank(&m))
}

/// Real rank of the family {P e_A} over all basis elements P and blades A.
pub fn real_span_rank<S: Scalar>(elements: &[MultiPoly<S>]) -> usize {
    let Some(first) = elements.first() else { return 0 };
    let dim = first.dim();
    let mut keys: Vec<Exponent> = Vec::new();
    for p in elements {
        for e in p.terms().keys() {
            if !keys.contains(e) {
                keys.push(e.clone());
            }
        }
    }
    let nb = 1usize << dim;
    let mut rows = Vec::new();
    for p in elements {
        for blade in 0..nb {
            let q = p.right_mul(&Multivector::blade(dim, blade, S::one()));
            let mut row = vec![S::zero(); keys.len() * nb];
            for (e, c) in q.terms() {
                let ki = keys.iter().position(|x| x == e).unwrap();
                for (b2, s) in c.coeffs().iter().enumerate() {
                    row[ki * nb + b2] = s.clone();
                }
            }
            rows.push(row);
        }
    }
    rank(&rows)
}

pub fn expected_monogenic_count(n: usize, k: usize) -> u64 {
    binomial((n + k - 2) as u64, k as u64)
}

/// 2^n [C(n+k−2,k) + C(n+k−3,k−1)].
pub fn expected_harmonic_dimension(n: usize, k: usize) -> u64 {
    let lower = if k == 0 { 0 } else { binomial((n + k - 3) as u64, (k - 1) as u64) };
    (1u64 << n) * (expected_monogenic_count(n, k) + lower)
}

fn harmonic_residual<S: Scalar>(h: &MultiPoly<S>, block: &str) -> Result<()> {
    let lap = h.laplacian(block)?;
    if !lap.is_zero() {
        let residual = lap.max_coeff_abs();
        if S::EXACT || residual > 1e-9 * h.max_coeff_abs().max(1.0) {
            return Err(RsqError::NotHarmonic { block: block.to_string(), residual });
        }
    }
    Ok(())
}

/// Almansi–Fischer split of a harmonic h homogeneous of degree k in `block`.
/// Left: h = p_k + u·p_{k−1}. Right: h = p_k + p_{k−1}·u. Returns (p_k, p_{k−1}).
pub fn almansi_fischer_side<S: Scalar>(h: &MultiPoly<S>, block: &str, side: Side) -> Result<(MultiPoly<S>, MultiPoly<S>)> {
    harmonic_residual(h, block)?;
    let (_, nn) = h.block_range(block)?;
    let Some(k) = h.block_degree(block)? else {
        return Ok((h.clone(), h.clone()));
    };
    if k == 0 {
        return Ok((h.clone(), h.sub(h)));
    }
    let denom = S::from_i64(-(nn as i64) - 2 * k as i64 + 2);
    let pkm1 = h.dirac(block, side)?.scale(&(S::one() / denom));
    let pk = h.sub(&pkm1.vector_embed(block, side)?);
    Ok((pk, pkm1))
}

pub fn almansi_fischer<S: Scalar>(h: &MultiPoly<S>, block: &str) -> Result<(MultiPoly<S>, MultiPoly<S>)> {
    almansi_fischer_side(h, block, Side::Left)
}

/// P_k or I − P_k applied in `block`; coefficients may depend on other blocks.
pub fn project<S: Scalar>(h: &MultiPoly<S>, block: &str, which: Projection, side: Side) -> Result<MultiPoly<S>> {
    let (pk, _) = almansi_fischer_side(h, block, side)?;
    Ok(match which {
        Projection::Pk => pk,
        Projection::IminusPk => h.sub(&pk),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = MultiPoly<Rational>;
    type M = Multivector<Rational>;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn counts_and_monogenicity() {
        for n in 3..=5 {
            for k in 0..=3 {
                let b = monogenic_basis::<Rational>(n, k).unwrap();
                assert_eq!(b.elements.len() as u64, expected_monogenic_count(n, k));
                for p in &b.elements {
                    assert!(p.dirac("u", Side::Left).unwrap().is_zero());
                    assert_eq!(p.block_degree("u").unwrap(), Some(k));
                }
            }
        }
    }

    #[test]
    fn fueter_degree_one_n3() {
        let b = monogenic_basis::<Rational>(3, 1).unwrap();
        let blocks = [("u", 3)];
        let u = |i| P::var(3, &blocks, "u", i).unwrap();
        let e1inv = M::e(3, 1).versor_inverse().unwrap();
        for (idx, i) in [2usize, 3].iter().enumerate() {
            let expect = u(*i).sub(&u(1).left_mul(&e1inv.gp(&M::e(3, *i))));
            assert_eq!(b.elements[idx], expect);
        }
        assert_eq!(monogenic_basis::<Rational>(3, 0).unwrap().elements, vec![P::constant(3, &blocks, M::one(3))]);
    }

    #[test]
    fn rejects_small_n() {
        assert_eq!(monogenic_basis::<Rational>(2, 1), Err(RsqError::AmbientDimension(2)));
    }

    #[test]
    fn right_basis_is_right_monogenic() {
        let b = right_monogenic_basis::<Rational>(4, 2).unwrap();
        assert_eq!(b.elements.len(), 6);
        for p in &b.elements {
            assert!(p.dirac("u", Side::Right).unwrap().is_zero());
        }
    }

    #[test]
    fn split_of_u1() {
        let blocks = [("u", 3)];
        let u = |i| P::var(3, &blocks, "u", i).unwrap();
        let (p1, p0) = almansi_fischer(&u(1), "u").unwrap();
        assert_eq!(p0, P::constant(3, &blocks, M::e(3, 1).scale(&q(-1, 3))));
        let e21 = M::e(3, 2).gp(&M::e(3, 1));
        let e31 = M::e(3, 3).gp(&M::e(3, 1));
        let expect = u(1).scale(&q(2, 3)).add(&u(2).left_mul(&e21).add(&u(3).left_mul(&e31)).scale(&q(1, 3)));
        assert_eq!(p1, expect);
        assert!(p1.dirac("u", Side::Left).unwrap().is_zero());
    }

    #[test]
    fn split_of_monogenic_and_embedded() {
        let b = monogenic_basis::<Rational>(3, 2).unwrap();
        let p = &b.elements[1];
        let (pk, pkm1) = almansi_fischer(p, "u").unwrap();
        assert_eq!(&pk, p);
        assert!(pkm1.is_zero());
        let g = &monogenic_basis::<Rational>(3, 1).unwrap().elements[0];
        let ug = g.vector_embed("u", Side::Left).unwrap();
        let (pk, pkm1) = almansi_fischer(&ug, "u").unwrap();
        assert!(pk.is_zero());
        assert_eq!(&pkm1, g);
    }

    #[test]
    fn project_example() {
        let blocks = [("u", 3)];
        let uu = P::vector_var(3, &blocks, "u").unwrap();
        let e1 = M::e(3, 1);
        let h = uu.left_mul(&e1);
        let r = project(&h, "u", Projection::IminusPk, Side::Left).unwrap();
        assert_eq!(r, uu.right_mul(&e1).scale(&q(-1, 3)));
    }

    #[test]
    fn non_harmonic_rejected() {
        let blocks = [("u", 3)];
        let u1 = P::var(3, &blocks, "u", 1).unwrap();
        let h = u1.pmul(&u1);
        assert!(matches!(almansi_fischer(&h, "u"), Err(RsqError::NotHarmonic { .. })));
    }

    #[test]
    fn dimension_identity_small() {
        for n in 3..=4 {
            for k in 0..=3 {
                let dm = monogenic_dimension_rank(n, k).unwrap() as u64;
                assert_eq!(dm, (1u64 << n) * expected_monogenic_count(n, k));
                assert_eq!(harmonic_dimension_rank(n, k).unwrap() as u64, expected_harmonic_dimension(n, k));
            }
        }
    }

    #[test]
    fn fueter_real_span_is_full() {
        let b = monogenic_basis::<Rational>(3, 2).unwrap();
        assert_eq!(real_span_rank(&b.elements), 8 * 3);
    }

    #[test]
    fn multiset_helpers() {
        assert_eq!(multisets(3, 2), vec![vec![2, 2], vec![2, 3], vec![3, 3]]);
        assert_eq!(distinct_permutations(&[2, 2, 3]).len(), 3);
        assert_eq!(monomials(3, 2).len(), 6);
    }
}
