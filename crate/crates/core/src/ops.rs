//! R_k, Q_k (left and right) in ℝ^n, Q_k^S on S^n and the transform T_k.
//!
//! Functions of (x, u) use blocks `x` and `u`; kernels add a `v` block.

use crate::clifford::Multivector;
use crate::conformal::check_on_sphere;
use crate::error::{Result, RsqError};
use crate::integrate::{omega, sphere_mean, QuadratureRule, Surface};
use crate::kernels::{FundamentalSolution, ModelParams};
use crate::poly::{MultiPoly, Side};
use crate::scalar::Scalar;
use crate::spaces::{project, Projection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OperatorTag {
    #[serde(rename = "Rk")]
    RkLeft,
    #[serde(rename = "Qk")]
    QkLeft,
    #[serde(rename = "Qk_right")]
    QkRight,
    #[serde(rename = "QkS")]
    QkSLeft,
}

impl std::str::FromStr for OperatorTag {
    type Err = RsqError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Rk" | "Rk_left" => Ok(OperatorTag::RkLeft),
            "Qk" | "Qk_left" => Ok(OperatorTag::QkLeft),
            "Qk_right" | "Qkr" => Ok(OperatorTag::QkRight),
            "QkS" | "QkS_left" => Ok(OperatorTag::QkSLeft),
            _ => Err(RsqError::Config(format!("unknown operator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKind {
    pub tag: OperatorTag,
    pub params: ModelParams,
}

impl OperatorKind {
    pub fn new(tag: OperatorTag, n: usize, k: usize) -> Result<Self> {
        if k == 0 && tag != OperatorTag::RkLeft {
            return Err(RsqError::OperatorIndex(0));
        }
        Ok(OperatorKind { tag, params: ModelParams::new(n, k)? })
    }

    fn side(&self) -> Side {
        if self.tag == OperatorTag::QkRight {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn output_projection(&self) -> Projection {
        if self.tag == OperatorTag::RkLeft {
            Projection::Pk
        } else {
            Projection::IminusPk
        }
    }
}

fn negligible<S: Scalar>(p: &MultiPoly<S>, scale: f64) -> bool {
    if S::EXACT {
        p.is_zero()
    } else {
        p.to_f64().max_coeff_abs() <= 1e-9 * scale.max(1.0)
    }
}

fn coeff_scale<S: Scalar>(p: &MultiPoly<S>) -> f64 {
    p.to_f64().max_coeff_abs()
}

/// Checks that f lies in the operator's domain: M_k for R_k, u·M_{k−1} (or M_{k−1}·u) for Q_k.
pub fn check_domain<S: Scalar>(kind: &OperatorKind, f: &MultiPoly<S>) -> Result<()> {
    let k = kind.params.k;
    if f.is_zero() {
        return Ok(());
    }
    match f.block_degree("u")? {
        Some(d) if d == k => {}
        Some(d) => return Err(RsqError::OutsideDomain(format!("degree {d} in u, expected {k}"))),
        None => return Err(RsqError::NotHomogeneous("u".into())),
    }
    let scale = coeff_scale(f);
    let side = kind.side();
    // the component that must vanish
    let (bad, label) = match kind.tag {
        OperatorTag::RkLeft => (project(f, "u", Projection::IminusPk, side)?, "u·M_{k-1} component"),
        _ => (project(f, "u", Projection::Pk, side)?, "M_k component"),
    };
    if !negligible(&bad, scale) {
        return Err(RsqError::OutsideDomain(format!("nonzero {label} (max coefficient {:.3e})", coeff_scale(&bad))));
    }
    Ok(())
}

/// Symbolic application on polynomials in (x, u).
pub fn apply_euclidean<S: Scalar>(kind: &OperatorKind, f: &MultiPoly<S>) -> Result<MultiPoly<S>> {
    if kind.tag == OperatorTag::QkSLeft {
        return Err(RsqError::Config("Q_k^S acts on the sphere; use apply_spherical".into()));
    }
    check_domain(kind, f)?;
    let d = f.dirac("x", kind.side())?;
    project(&d, "u", kind.output_projection(), kind.side())
}

fn axis_step(x0: &[f64], j: usize, h: f64) -> Vec<f64> {
    let mut p = x0.to_vec();
    p[j] += h;
    p
}

fn finite(p: &MultiPoly<f64>, at: &[f64]) -> Result<()> {
    let bad = p.terms().values().any(|c| c.coeffs().iter().any(|x| !x.is_finite()));
    if bad {
        return Err(RsqError::Singular(format!("stencil hits a singularity at {at:?}")));
    }
    Ok(())
}

fn eval_checked<F>(f: &F, p: &[f64]) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    let v = f(p).map_err(|e| match e {
        RsqError::Singular(_) => RsqError::Singular(format!("stencil hits a singularity at {p:?}")),
        other => other,
    })?;
    finite(&v, p)?;
    Ok(v)
}

/// Central-difference Dirac operator in x at x0 (left or right), symbolic in the remaining blocks.
pub fn dirac_fd<F>(f: &F, x0: &[f64], h: f64, side: Side) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    let n = x0.len();
    let mut acc: Option<MultiPoly<f64>> = None;
    for j in 0..n {
        let fp = eval_checked(f, &axis_step(x0, j, h))?;
        let fm = eval_checked(f, &axis_step(x0, j, -h))?;
        let diff = fp.sub(&fm).scale(&(0.5 / h));
        let ej = Multivector::e(diff.dim(), j + 1);
        let term = match side {
            Side::Left => diff.left_mul(&ej),
            Side::Right => diff.right_mul(&ej),
        };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.ok_or(RsqError::AmbientDimension(0))
}

/// Finite-difference D_x followed by exact projection in u.
pub fn apply_euclidean_fd<F>(kind: &OperatorKind, f: F, x0: &[f64], h: f64) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    if x0.len() != kind.params.n {
        return Err(RsqError::PointArity { block: "x".into(), arity: kind.params.n, got: x0.len() });
    }
    let d = dirac_fd(&f, x0, h, kind.side())?;
    project(&d, "u", kind.output_projection(), kind.side())
}

/// Q_k applied to H_k(· − y, u, v) at x0 by central differences.
pub fn fundamental_solution_residual(h: &FundamentalSolution, x0: &[f64], y: &[f64], step: f64) -> Result<MultiPoly<f64>> {
    let kind = OperatorKind::new(OperatorTag::QkLeft, h.params.n, h.params.k)?;
    apply_euclidean_fd(
        &kind,
        |x: &[f64]| {
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            h.partial(&d)
        },
        x0,
        step,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphericalMode {
    Symbolic,
    RotationalFd,
}

/// Σ_{i<j} e_i e_j L_ij F at xs0 with L_ij F = d/dt F(rotation of xs0 in the (i,j)-plane).
fn gamma_fd<F>(f: &F, xs0: &[f64], h: f64, side: Side) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    let m = xs0.len();
    let mut acc: Option<MultiPoly<f64>> = None;
    for i in 0..m {
        for j in (i + 1)..m {
            let rot = |t: f64| {
                let mut p = xs0.to_vec();
                let (c, s) = (t.cos(), t.sin());
                p[i] = xs0[i] * c - xs0[j] * s;
                p[j] = xs0[i] * s + xs0[j] * c;
                p
            };
            let fp = eval_checked(f, &rot(h))?;
            let fm = eval_checked(f, &rot(-h))?;
            let lij = fp.sub(&fm).scale(&(0.5 / h));
            let dim = lij.dim();
            let term = match side {
                Side::Left => lij.left_mul(&Multivector::e(dim, i + 1).gp(&Multivector::e(dim, j + 1))),
                Side::Right => lij.right_mul(&Multivector::e(dim, j + 1).gp(&Multivector::e(dim, i + 1))),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
    }
    acc.ok_or(RsqError::AmbientDimension(m))
}

/// D_s F = x_s(Γ + n/2)F at xs0 by rotational differences; S^n with n = xs0.len() − 1.
pub fn spherical_dirac_fd<F>(f: &F, xs0: &[f64], h: f64) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    check_on_sphere(xs0)?;
    let n = xs0.len() - 1;
    let g = gamma_fd(f, xs0, h, Side::Left)?;
    let f0 = eval_checked(f, xs0)?;
    let x = Multivector::vector(xs0.len(), xs0);
    Ok(g.add(&f0.scale(&(n as f64 / 2.0))).left_mul(&x))
}

/// Right spherical Dirac: G D_s = (Γ_r G + (n/2) G) x_s at xs0.
pub fn spherical_dirac_right_fd<F>(f: &F, xs0: &[f64], h: f64) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    check_on_sphere(xs0)?;
    let n = xs0.len() - 1;
    let g = gamma_fd(f, xs0, h, Side::Right)?;
    let f0 = eval_checked(f, xs0)?;
    let x = Multivector::vector(xs0.len(), xs0);
    Ok(g.add(&f0.scale(&(n as f64 / 2.0))).right_mul(&x))
}

/// Symbolic D_s = x(Γ_x + n/2) on a polynomial in the ambient block `x` of arity n + 1.
pub fn spherical_dirac_symbolic<S: Scalar>(f: &MultiPoly<S>) -> Result<MultiPoly<S>> {
    let (_, m) = f.block_range("x")?;
    let n = S::from_ratio(m as i64 - 1, 2);
    f.gamma("x")?.add(&f.scale(&n)).vector_embed("x", Side::Left)
}

/// Q_k^S F at a point of S^n: (I − P_k) in u of D_s F.
pub fn apply_spherical<F>(kind: &OperatorKind, f: F, xs0: &[f64], h: f64) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    if kind.tag != OperatorTag::QkSLeft {
        return Err(RsqError::Config("apply_spherical needs the Q_k^S operator".into()));
    }
    if xs0.len() != kind.params.n + 1 {
        return Err(RsqError::PointArity { block: "x_s".into(), arity: kind.params.n + 1, got: xs0.len() });
    }
    let d = spherical_dirac_fd(&f, xs0, h)?;
    project(&d, "u", Projection::IminusPk, Side::Left)
}

/// Symbolic Q_k^S on a polynomial in (x, u) with x ambient in ℝ^{n+1}, evaluated at xs0.
pub fn apply_spherical_symbolic(kind: &OperatorKind, f: &MultiPoly<f64>, xs0: &[f64]) -> Result<MultiPoly<f64>> {
    if kind.tag != OperatorTag::QkSLeft {
        return Err(RsqError::Config("apply_spherical needs the Q_k^S operator".into()));
    }
    check_on_sphere(xs0)?;
    let d = spherical_dirac_symbolic(f)?.eval_partial(&[("x", xs0)])?;
    project(&d, "u", Projection::IminusPk, Side::Left)
}

pub fn apply_spherical_mode<F>(kind: &OperatorKind, f: F, poly: Option<&MultiPoly<f64>>, xs0: &[f64], mode: SphericalMode, h: f64) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    match mode {
        SphericalMode::RotationalFd => apply_spherical(kind, f, xs0, h),
        SphericalMode::Symbolic => {
            let p = poly.ok_or_else(|| RsqError::Config("symbolic mode needs a polynomial input".into()))?;
            apply_spherical_symbolic(kind, p, xs0)
        }
    }
}

/// (T_k v f)(y, v) = −∫_Ω (H_k(x − y, u, v), u f(x, u))_u dx over a ball Ω.
/// `f` returns a polynomial in block `v`; the result is a polynomial in `v`.
pub fn cauchy_transform_tk<F>(h: &FundamentalSolution, f: F, y: &[f64], rule: &QuadratureRule) -> Result<MultiPoly<f64>>
where
    F: Fn(&[f64]) -> Result<MultiPoly<f64>>,
{
    let n = h.params.n;
    let Surface::Ball { n: bn, r: radius, center } = &rule.spec.surface else {
        return Err(RsqError::Quadrature("T_k needs a ball rule".into()));
    };
    if *bn != n || center.len() != n {
        return Err(RsqError::DimensionMismatch(*bn, n));
    }
    let dist: f64 = y.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if dist >= *radius {
        return Err(RsqError::OutsideDomain(format!("y = {y:?} is not inside the ball")));
    }
    let blocks = [("u", n), ("v", n)];
    let om = omega(n);
    let mut acc = MultiPoly::zero(n, &[("v", n)]);
    let mut bad = 0usize;
    for node in &rule.nodes {
        let d: Vec<f64> = node.point.iter().zip(y).map(|(a, b)| a - b).collect();
        if d.iter().all(|c| *c == 0.0) {
            continue;
        }
        let kern = h.partial(&d)?;
        let fu = f(&node.point)?.rename_block("v", "u")?.vector_embed("u", Side::Left)?.with_blocks(&blocks)?;
        let paired = sphere_mean(&kern.pmul(&fu), "u")?.scale(&(om * node.weight));
        if paired.terms().values().any(|c| c.coeffs().iter().any(|x| !x.is_finite())) {
            bad += 1;
            continue;
        }
        acc = acc.add(&paired);
    }
    if bad > 0 {
        return Err(RsqError::NonFinite(bad));
    }
    Ok(acc.neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::RuleSpec;
    use crate::scalar::Rational;
    use crate::spaces::monogenic_basis_in;

    type P = MultiPoly<Rational>;

    fn xu(n: usize) -> [(&'static str, usize); 2] {
        [("x", n), ("u", n)]
    }

    #[test]
    fn q1_of_u_x1() {
        let n = 3;
        let b = xu(n);
        let f = P::vector_var(n, &b, "u").unwrap().pmul(&P::var(n, &b, "x", 1).unwrap());
        let kind = OperatorKind::new(OperatorTag::QkLeft, n, 1).unwrap();
        let out = apply_euclidean(&kind, &f).unwrap();
        let expect = P::vector_var(n, &b, "u").unwrap().right_mul(&Multivector::e(n, 1)).scale(&Rational::from_ratio(-1, 3));
        assert_eq!(out, expect);
        assert_eq!(project(&out, "u", Projection::IminusPk, Side::Left).unwrap(), out);
    }

    #[test]
    fn constant_in_x_is_annihilated() {
        let n = 3;
        let p = monogenic_basis_in::<Rational>(n, 1, n, "u").unwrap().elements[0].with_blocks(&xu(n)).unwrap();
        let kind = OperatorKind::new(OperatorTag::RkLeft, n, 1).unwrap();
        assert!(apply_euclidean(&kind, &p).unwrap().is_zero());
        let q = OperatorKind::new(OperatorTag::QkLeft, n, 1).unwrap();
        assert!(matches!(apply_euclidean(&q, &p), Err(RsqError::OutsideDomain(_))));
    }

    #[test]
    fn hk_fd_residual_small() {
        let hk = FundamentalSolution::new(3, 1).unwrap();
        let y = [0.1, -0.2, 0.3];
        let x0 = [0.7, 0.2, 0.3 + 0.5];
        let r = fundamental_solution_residual(&hk, &x0, &y, 1e-4).unwrap();
        assert!(r.max_coeff_abs() < 1e-6, "{}", r.max_coeff_abs());
        assert!(matches!(
            fundamental_solution_residual(&hk, &[1e-4, 0.0, 0.0], &[0.0; 3], 1e-4),
            Err(RsqError::Singular(_))
        ));
    }

    #[test]
    fn spherical_symbolic_on_monogenic() {
        // p_k restricted to the sphere: D_s p = x (k + n/2) p
        let n = 3;
        let m = n + 1;
        let p = monogenic_basis_in::<Rational>(m, 2, m, "x").unwrap().elements[1].clone();
        let ds = spherical_dirac_symbolic(&p).unwrap();
        let expect = p.vector_embed("x", Side::Left).unwrap().scale(&Rational::from_ratio(2 * 2 + n as i64, 2));
        assert_eq!(ds, expect);
        let pf = p.to_f64();
        let xs = {
            let v = [0.3, -0.1, 0.5, 0.8];
            let r = (v.iter().map(|c| c * c).sum::<f64>()).sqrt();
            v.map(|c| c / r)
        };
        let fd = spherical_dirac_fd(&|x: &[f64]| pf.eval_partial(&[("x", x)]), &xs, 1e-5).unwrap();
        let sym = ds.to_f64().eval_partial(&[("x", &xs)]).unwrap();
        assert!(fd.sub(&sym).max_coeff_abs() < 1e-8);
    }

    #[test]
    fn tk_of_zero_is_zero() {
        let hk = FundamentalSolution::new(3, 1).unwrap();
        let rule = QuadratureRule::build(RuleSpec {
            surface: Surface::Ball { n: 3, r: 1.0, center: vec![0.0; 3] },
            orders: vec![4, 4, 4],
        })
        .unwrap();
        let z = |_: &[f64]| Ok(MultiPoly::<f64>::zero(3, &[("v", 3)]));
        assert!(cauchy_transform_tk(&hk, z, &[0.0; 3], &rule).unwrap().max_coeff_abs() == 0.0);
        assert!(matches!(cauchy_transform_tk(&hk, z, &[2.0, 0.0, 0.0], &rule), Err(RsqError::OutsideDomain(_))));
    }
}
