//! Exact sphere/ball moments and float quadrature on spheres, balls, spherical caps and cap rims.
//!
//! Exact integrals are returned in units of ω_n (the area of S^{n−1}).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clifford::Multivector;
use crate::error::{Result, RsqError};
use crate::poly::MultiPoly;
use crate::scalar::{double_factorial_odd, Rational, Scalar};

/// ∫_{S^{n−1}} u^α ds / ω_n.
pub fn sphere_monomial(n: usize, alpha: &[u8]) -> Rational {
    if alpha.iter().any(|a| a % 2 == 1) {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    for &a in alpha {
        num *= double_factorial_odd(a as u32);
    }
    let total: usize = alpha.iter().map(|&a| a as usize).sum();
    let mut den = BigInt::one();
    let mut j = n;
    while j < n + total {
        den *= j;
        j += 2;
    }
    Rational::new(num, den)
}

/// ∫_{B(0,R)} x^α dx / ω_n = R^{n+|α|}/(n+|α|) · sphere_monomial.
pub fn ball_monomial(n: usize, alpha: &[u8], r: &Rational) -> Rational {
    let total: usize = alpha.iter().map(|&a| a as usize).sum();
    let mut rp = Rational::one();
    for _ in 0..n + total {
        rp *= r;
    }
    rp / Rational::from_integer(BigInt::from(n + total)) * sphere_monomial(n, alpha)
}

/// Area of S^{n−1}: 2π^{n/2}/Γ(n/2).
pub fn omega(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Γ(n/2) for positive integer n.
fn gamma_half(n: usize) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(|j| j as f64).product()
    } else {
        // Γ(m + 1/2) = (2m−1)!!/2^m √π
        let m = (n - 1) / 2;
        let mut g = PI.sqrt();
        for j in 0..m {
            g *= (2 * j + 1) as f64 / 2.0;
        }
        g
    }
}

/// Mean over S^{n−1} in `block` (∫ ds / ω_n); other blocks pass through.
pub fn sphere_mean<S: Scalar>(p: &MultiPoly<S>, block: &str) -> Result<MultiPoly<S>> {
    integrate_block(p, block, |n, a| sphere_monomial(n, a))
}

/// ∫_{B(0,R)} p dx / ω_n in `block`.
pub fn ball_mean<S: Scalar>(p: &MultiPoly<S>, block: &str, r: &Rational) -> Result<MultiPoly<S>> {
    integrate_block(p, block, |n, a| ball_monomial(n, a, r))
}

fn integrate_block<S: Scalar>(
    p: &MultiPoly<S>,
    block: &str,
    moment: impl Fn(usize, &[u8]) -> Rational,
) -> Result<MultiPoly<S>> {
    let (off, ar) = p.block_range(block)?;
    let rest: Vec<(&str, usize)> =
        p.blocks().iter().filter(|(n, _)| n != block).map(|(n, a)| (n.as_str(), *a)).collect();
    let mut out = MultiPoly::zero(p.dim(), &rest);
    for (e, c) in p.terms() {
        let m = moment(ar, &e[off..off + ar]);
        if m.is_zero() {
            continue;
        }
        let s = rational_into::<S>(&m);
        let mut ne = e[..off].to_vec();
        ne.extend_from_slice(&e[off + ar..]);
        out.add_term(ne, c.scale(&s));
    }
    Ok(out)
}

pub fn rational_into<S: Scalar>(r: &Rational) -> S {
    if S::EXACT {
        S::parse_literal(&crate::scalar::rational_string(r)).expect("rational literal")
    } else {
        S::from_f64(Scalar::to_f64(r))
    }
}

/// Clifford inner product (P, Q)_block / ω_n = mean of P·Q over the unit sphere in `block`.
pub fn inner_product<S: Scalar>(p: &MultiPoly<S>, q: &MultiPoly<S>, block: &str) -> Result<MultiPoly<S>> {
    sphere_mean(&p.try_pmul(q)?, block)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            x[0] = 0.0;
            w[0] = 2.0;
            break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre mapped to [a, b].
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| a + h * (t + 1.0)).collect(), w.iter().map(|t| t * h).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "surface", rename_all = "snake_case")]
pub enum Surface {
    /// Sphere of radius R in ℝ^n.
    Sphere { n: usize, #[serde(rename = "R")] r: f64, center: Vec<f64> },
    Ball { n: usize, #[serde(rename = "R")] r: f64, center: Vec<f64> },
    /// Geodesic cap on S^n ⊂ ℝ^{n+1} around `center` with polar radius `angle`.
    Cap { n: usize, center: Vec<f64>, angle: f64 },
    CapBoundary { n: usize, center: Vec<f64>, angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    #[serde(flatten)]
    pub surface: Surface,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    /// Outward unit normal (surfaces and cap rims); empty for volume rules.
    pub normal: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub spec: RuleSpec,
    pub nodes: Vec<Node>,
}

/// Unit-sphere rule on S^{m−1} ⊂ ℝ^m: Gauss in the polar angles, trapezoid in the azimuth.
fn unit_sphere_nodes(m: usize, polar: usize, azim: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if m < 2 {
        return Err(RsqError::Quadrature(format!("sphere in dimension {m}")));
    }
    if polar == 0 || azim == 0 {
        return Err(RsqError::Quadrature("zero quadrature order".into()));
    }
    let mut pts: Vec<(Vec<f64>, f64)> = (0..azim)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / azim as f64;
            (vec![phi.cos(), phi.sin()], 2.0 * PI / azim as f64)
        })
        .collect();
    // build S^{d} from S^{d-1} by x = (cos θ, sin θ ω), weight sin^{d-1} θ
    for d in 2..m {
        let mut next = Vec::with_capacity(pts.len() * polar);
        if d == 2 {
            let (t, w) = gauss_legendre(polar);
            for (ti, wi) in t.iter().zip(&w) {
                let s = (1.0 - ti * ti).sqrt();
                for (p, pw) in &pts {
                    let mut x = vec![*ti];
                    x.extend(p.iter().map(|c| c * s));
                    next.push((x, wi * pw));
                }
            }
        } else {
            let (th, w) = gauss_legendre_on(polar, 0.0, PI);
            for (ti, wi) in th.iter().zip(&w) {
                let (c, s) = (ti.cos(), ti.sin());
                let jac = s.powi(d as i32 - 1);
                for (p, pw) in &pts {
                    let mut x = vec![c];
                    x.extend(p.iter().map(|q| q * s));
                    next.push((x, wi * jac * pw));
                }
            }
        }
        pts = next;
    }
    Ok(pts)
}

/// Orthonormal basis of the complement of unit `c` in ℝ^{len}, by Gram–Schmidt on e_1, e_2, ….
fn complement_basis(c: &[f64]) -> Vec<Vec<f64>> {
    let m = c.len();
    let mut basis: Vec<Vec<f64>> = vec![c.to_vec()];
    for i in 0..m {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-8 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
        if basis.len() == m {
            break;
        }
    }
    basis.remove(0);
    basis
}

fn order(orders: &[usize], i: usize) -> Result<usize> {
    orders
        .get(i)
        .or(orders.last())
        .copied()
        .ok_or_else(|| RsqError::Quadrature("no orders given".into()))
}

fn normalize(c: &[f64]) -> Result<Vec<f64>> {
    let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (nc - 1.0).abs() > 1e-12 {
        return Err(RsqError::OffSphere(nc - 1.0));
    }
    Ok(c.iter().map(|x| x / nc).collect())
}

impl QuadratureRule {
    /// Orders: sphere `[polar, azimuth]`; ball `[radial, polar, azimuth]`;
    /// cap `[polar-about-center, polar, azimuth]`; cap boundary `[polar, azimuth]`.
    pub fn build(spec: RuleSpec) -> Result<Self> {
        let o = &spec.orders;
        let nodes = match &spec.surface {
            Surface::Sphere { n, r, center } => {
                check_center(*n, center)?;
                let pts = unit_sphere_nodes(*n, order(o, 0)?, order(o, 1)?)?;
                let rn = r.powi(*n as i32 - 1);
                pts.into_iter()
                    .map(|(w, wt)| Node {
                        point: w.iter().zip(center).map(|(a, c)| c + r * a).collect(),
                        normal: w,
                        weight: wt * rn,
                    })
                    .collect()
            }
            Surface::Ball { n, r, center } => {
                check_center(*n, center)?;
                let (rad, rw) = gauss_legendre_on(order(o, 0)?, 0.0, *r);
                let pts = unit_sphere_nodes(*n, order(o, 1)?, order(o, 2)?)?;
                let mut v = Vec::with_capacity(rad.len() * pts.len());
                for (ri, wi) in rad.iter().zip(&rw) {
                    let jac = ri.powi(*n as i32 - 1);
                    for (w, wt) in &pts {
                        v.push(Node {
                            point: w.iter().zip(center).map(|(a, c)| c + ri * a).collect(),
                            normal: Vec::new(),
                            weight: wi * jac * wt,
                        });
                    }
                }
                v
            }
            Surface::Cap { n, center, angle } => {
                let c = cap_center(*n, center, *angle)?;
                let basis = complement_basis(&c);
                let (th, tw) = gauss_legendre_on(order(o, 0)?, 0.0, *angle);
                let pts = unit_sphere_nodes(*n, order(o, 1)?, order(o, 2)?)?;
                let mut v = Vec::with_capacity(th.len() * pts.len());
                for (ti, wi) in th.iter().zip(&tw) {
                    let (ct, st) = (ti.cos(), ti.sin());
                    let jac = st.powi(*n as i32 - 1);
                    for (w, wt) in &pts {
                        let om = embed(&basis, w);
                        v.push(Node {
                            point: c.iter().zip(&om).map(|(a, b)| ct * a + st * b).collect(),
                            normal: Vec::new(),
                            weight: wi * jac * wt,
                        });
                    }
                }
                v
            }
            Surface::CapBoundary { n, center, angle } => {
                let c = cap_center(*n, center, *angle)?;
                let basis = complement_basis(&c);
                let pts = unit_sphere_nodes(*n, order(o, 0)?, order(o, 1)?)?;
                let (ct, st) = (angle.cos(), angle.sin());
                let jac = st.powi(*n as i32 - 1);
                pts.iter()
                    .map(|(w, wt)| {
                        let om = embed(&basis, w);
                        Node {
                            point: c.iter().zip(&om).map(|(a, b)| ct * a + st * b).collect(),
                            normal: c.iter().zip(&om).map(|(a, b)| -st * a + ct * b).collect(),
                            weight: wt * jac,
                        }
                    })
                    .collect()
            }
        };
        Ok(QuadratureRule { spec, nodes })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let spec: RuleSpec = serde_json::from_value(v.clone())?;
        Self::build(spec)
    }

    /// Closed-form measure of the surface.
    pub fn exact_measure(&self) -> f64 {
        match &self.spec.surface {
            Surface::Sphere { n, r, .. } => omega(*n) * r.powi(*n as i32 - 1),
            Surface::Ball { n, r, .. } => omega(*n) * r.powi(*n as i32) / *n as f64,
            Surface::Cap { n, angle, .. } => {
                // ω_n ∫_0^θ sin^{n−1}: use a high-order rule on the single integral
                let (t, w) = gauss_legendre_on(64, 0.0, *angle);
                omega(*n) * t.iter().zip(&w).map(|(x, y)| y * x.sin().powi(*n as i32 - 1)).sum::<f64>()
            }
            Surface::CapBoundary { n, angle, .. } => omega(*n) * angle.sin().powi(*n as i32 - 1),
        }
    }

    pub fn total_weight(&self) -> f64 {
        let mut k = Kahan::default();
        for nd in &self.nodes {
            k.add(nd.weight);
        }
        k.sum
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn check_center(n: usize, center: &[f64]) -> Result<()> {
    if center.len() != n {
        return Err(RsqError::Quadrature(format!("center has {} coordinates, expected {n}", center.len())));
    }
    Ok(())
}

fn cap_center(n: usize, center: &[f64], angle: f64) -> Result<Vec<f64>> {
    if center.len() != n + 1 {
        return Err(RsqError::Quadrature(format!("cap center needs {} coordinates", n + 1)));
    }
    if !(angle > 0.0 && angle < PI) {
        return Err(RsqError::Quadrature(format!("cap angle {angle} outside (0, π)")));
    }
    normalize(center)
}

fn embed(basis: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let m = basis[0].len();
    let mut out = vec![0.0; m];
    for (b, c) in basis.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Kahan {
    pub sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Σ w_i f(node_i) with compensated summation in node order.
pub fn surface_quadrature<F>(rule: &QuadratureRule, dim: usize, mut f: F) -> Result<Multivector<f64>>
where
    F: FnMut(&Node) -> Result<Multivector<f64>>,
{
    let mut acc = vec![Kahan::default(); 1 << dim];
    let mut bad = 0;
    for nd in &rule.nodes {
        let v = f(nd)?;
        if v.dim() != dim {
            return Err(RsqError::DimensionMismatch(dim, v.dim()));
        }
        if v.coeffs().iter().any(|c| !c.is_finite()) {
            bad += 1;
            continue;
        }
        for (a, c) in acc.iter_mut().zip(v.coeffs()) {
            a.add(nd.weight * c);
        }
    }
    if bad > 0 {
        return Err(RsqError::NonFinite(bad));
    }
    Multivector::from_coeffs(dim, acc.iter().map(|k| k.sum).collect())
}

/// Quadrature of a polynomial-valued integrand (e.g. symbolic in v), summed coefficientwise.
pub fn poly_quadrature<F>(rule: &QuadratureRule, mut f: F) -> Result<MultiPoly<f64>>
where
    F: FnMut(&Node) -> Result<MultiPoly<f64>>,
{
    let mut acc: std::collections::BTreeMap<Vec<u8>, Vec<Kahan>> = std::collections::BTreeMap::new();
    let mut layout: Option<(usize, Vec<(String, usize)>)> = None;
    let mut bad = 0;
    for nd in &rule.nodes {
        let p = f(nd)?;
        let l = (p.dim(), p.blocks().to_vec());
        match &layout {
            None => layout = Some(l),
            Some(l0) if *l0 != l => return Err(RsqError::BlockMismatch),
            _ => {}
        }
        if p.terms().values().any(|c| c.coeffs().iter().any(|x| !x.is_finite())) {
            bad += 1;
            continue;
        }
        for (e, c) in p.terms() {
            let slot = acc.entry(e.clone()).or_insert_with(|| vec![Kahan::default(); 1 << p.dim()]);
            for (a, x) in slot.iter_mut().zip(c.coeffs()) {
                a.add(nd.weight * x);
            }
        }
    }
    if bad > 0 {
        return Err(RsqError::NonFinite(bad));
    }
    let (dim, blocks) = layout.ok_or_else(|| RsqError::Quadrature("empty rule".into()))?;
    let bl: Vec<(&str, usize)> = blocks.iter().map(|(n, a)| (n.as_str(), *a)).collect();
    let mut out = MultiPoly::zero(dim, &bl);
    for (e, ks) in acc {
        out.add_term(e, Multivector::from_coeffs(dim, ks.iter().map(|k| k.sum).collect())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn moment_examples() {
        assert_eq!(sphere_monomial(3, &[2, 0, 0]), q(1, 3));
        assert_eq!(sphere_monomial(3, &[1, 2, 0]), q(0, 1));
        assert_eq!(sphere_monomial(4, &[0, 0, 0, 0]), q(1, 1));
        assert_eq!(ball_monomial(3, &[0, 0, 0], &q(1, 1)), q(1, 3));
        assert_eq!(ball_monomial(3, &[2, 0, 0], &q(1, 1)), q(1, 15));
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((omega(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn moments_match_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = 200_000;
        let mut acc = [0.0f64; 3];
        for _ in 0..samples {
            // Gaussian via Box–Muller, normalized
            let g: Vec<f64> = (0..3)
                .map(|_| {
                    let a: f64 = rng.gen_range(1e-12..1.0);
                    let b: f64 = rng.gen();
                    (-2.0 * a.ln()).sqrt() * (2.0 * PI * b).cos()
                })
                .collect();
            let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u: Vec<f64> = g.iter().map(|x| x / r).collect();
            acc[0] += u[0] * u[0];
            acc[1] += u[0].powi(4);
            acc[2] += u[0] * u[0] * u[1] * u[1];
        }
        let mc: Vec<f64> = acc.iter().map(|a| a / samples as f64).collect();
        assert!((mc[0] - Scalar::to_f64(&sphere_monomial(3, &[2, 0, 0]))).abs() < 5e-3);
        assert!((mc[1] - Scalar::to_f64(&sphere_monomial(3, &[4, 0, 0]))).abs() < 5e-3);
        assert!((mc[2] - Scalar::to_f64(&sphere_monomial(3, &[2, 2, 0]))).abs() < 5e-3);
    }

    #[test]
    fn ball_derivative_is_sphere() {
        // d/dR [R^{n+|α|}/(n+|α|) m] = R^{n+|α|−1} m
        for alpha in [[0u8, 0, 0], [2, 0, 0], [2, 2, 0], [4, 0, 2]] {
            let total: usize = alpha.iter().map(|&a| a as usize).sum();
            let b = ball_monomial(3, &alpha, &q(1, 1)) * Rational::from_integer(BigInt::from(3 + total));
            assert_eq!(b, sphere_monomial(3, &alpha));
        }
    }

    fn sphere_rule(n: usize, o: Vec<usize>) -> QuadratureRule {
        QuadratureRule::build(RuleSpec { surface: Surface::Sphere { n, r: 1.0, center: vec![0.0; n] }, orders: o })
            .unwrap()
    }

    #[test]
    fn sphere_rules() {
        let r = sphere_rule(3, vec![32, 64]);
        let one = surface_quadrature(&r, 3, |_| Ok(Multivector::one(3))).unwrap();
        assert!((one.scalar_part() / (4.0 * PI) - 1.0).abs() < 1e-12);
        let x1 = surface_quadrature(&r, 3, |nd| Ok(Multivector::scalar(3, nd.point[0] * nd.point[0]))).unwrap();
        assert!((x1.scalar_part() / (4.0 * PI / 3.0) - 1.0).abs() < 1e-10);
        for n in 3..=5 {
            let r = sphere_rule(n, vec![16, 32]);
            assert!((r.total_weight() / omega(n) - 1.0).abs() < 1e-10);
            for nd in &r.nodes {
                let norm: f64 = nd.point.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            let alpha: Vec<u8> = (0..n).map(|i| if i < 2 { 2 } else { 0 }).collect();
            let exact = Scalar::to_f64(&sphere_monomial(n, &alpha)) * omega(n);
            let num = surface_quadrature(&r, 1, |nd| {
                Ok(Multivector::scalar(1, nd.point[0].powi(2) * nd.point[1].powi(2)))
            })
            .unwrap();
            assert!((num.scalar_part() / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn smooth_rational_converges() {
        let f = |nd: &Node| Ok(Multivector::scalar(1, 1.0 / (2.0 - nd.point[2]).powi(3)));
        let exact = {
            // ∫_{S²} (2−z)^{-3} = 2π ∫_{-1}^{1} (2−t)^{-3} dt = π [(2−t)^{-2}]_{-1}^{1} = π(1 − 1/9)
            PI * (1.0 - 1.0 / 9.0)
        };
        let e1 = (surface_quadrature(&sphere_rule(3, vec![4, 8]), 1, f).unwrap().scalar_part() - exact).abs();
        let e2 = (surface_quadrature(&sphere_rule(3, vec![8, 16]), 1, f).unwrap().scalar_part() - exact).abs();
        assert!(e2 * 10.0 <= e1, "{e1} {e2}");
    }

    #[test]
    fn ball_cap_measures() {
        let b = QuadratureRule::build(RuleSpec {
            surface: Surface::Ball { n: 3, r: 2.0, center: vec![1.0, 0.0, 0.0] },
            orders: vec![8, 16, 32],
        })
        .unwrap();
        assert!((b.total_weight() / b.exact_measure() - 1.0).abs() < 1e-12);
        let c = QuadratureRule::build(RuleSpec {
            surface: Surface::Cap { n: 3, center: vec![0.0, 0.0, 1.0, 0.0], angle: PI / 3.0 },
            orders: vec![16, 16, 32],
        })
        .unwrap();
        // cap area on S³: 4π ∫_0^θ sin² = 2π(θ − sinθ cosθ)
        let t = PI / 3.0;
        assert!((c.total_weight() / (2.0 * PI * (t - t.sin() * t.cos())) - 1.0).abs() < 1e-12);
        for nd in &c.nodes {
            assert!((nd.point.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let cb = QuadratureRule::build(RuleSpec {
            surface: Surface::CapBoundary { n: 3, center: vec![0.0, 0.0, 1.0, 0.0], angle: t },
            orders: vec![16, 32],
        })
        .unwrap();
        assert!((cb.total_weight() / cb.exact_measure() - 1.0).abs() < 1e-12);
        for nd in &cb.nodes {
            let dot: f64 = nd.point.iter().zip(&nd.normal).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-12);
            assert!(nd.normal[2] < 0.0);
        }
    }

    #[test]
    fn rule_json() {
        let v = serde_json::json!({"surface":"sphere","n":3,"R":1.0,"center":[0,0,0],"orders":[32,64]});
        let r = QuadratureRule::from_json(&v).unwrap();
        assert_eq!(r.len(), 32 * 64);
        assert!(QuadratureRule::from_json(&serde_json::json!({"surface":"sphere","n":3,"R":1.0,"center":[0,0],"orders":[4]})).is_err());
    }

    #[test]
    fn nonfinite_flagged() {
        let r = sphere_rule(3, vec![4, 4]);
        let res = surface_quadrature(&r, 1, |nd| Ok(Multivector::scalar(1, if nd.point[0] > 0.0 { f64::NAN } else { 1.0 })));
        assert!(matches!(res, Err(RsqError::NonFinite(k)) if k > 0));
    }

    #[test]
    fn inner_product_examples() {
        let blocks = [("u", 3)];
        let one = MultiPoly::<Rational>::constant(3, &blocks, Multivector::one(3));
        assert_eq!(inner_product(&one, &one, "u").unwrap().terms().values().next().unwrap(), &Multivector::one(3));
        let g = crate::spaces::right_monogenic_basis::<Rational>(3, 0).unwrap().elements[0].clone();
        let f = &crate::spaces::monogenic_basis::<Rational>(3, 1).unwrap().elements[1];
        let gu = g.vector_embed("u", crate::poly::Side::Right).unwrap();
        assert!(inner_product(&gu, f, "u").unwrap().is_zero());
    }
}
