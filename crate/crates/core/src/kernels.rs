//! Reproducing kernels Z_k, the fundamental solution H_k and the spherical kernels.
//!
//! Kernels are stored as Ẑ = ω_n Z_k, a rational polynomial; Z_0 = 1/ω_n corresponds to Ẑ = 1.
//! The reproducing property reads mean_v(Ẑ(u,v) p(v)) = p(u).

use num_traits::Zero;

use crate::clifford::{Multivector, PinElement};
use crate::conformal::{cayley_inverse_weight_closed, check_on_sphere};
use crate::error::{Result, RsqError};
use crate::integrate::{omega, sphere_mean};
use crate::linalg::solve_many;
use crate::poly::{MultiPoly, Side};
use crate::scalar::{Rational, Scalar};
use crate::spaces::{monogenic_basis, multisets};

fn uv(n: usize) -> [(&'static str, usize); 2] {
    [("u", n), ("v", n)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub c_k: Rational,
    pub omega_n: f64,
}

impl ModelParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(RsqError::AmbientDimension(n));
        }
        Ok(ModelParams {
            n,
            k,
            c_k: Rational::from_ratio(n as i64 - 2, n as i64 - 2 + 2 * k as i64),
            omega_n: omega(n),
        })
    }

    pub fn c_k_f64(&self) -> f64 {
        Scalar::to_f64(&self.c_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Gram,
    Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZonalKernel {
    pub n: usize,
    pub k: usize,
    pub method: KernelMethod,
    /// ω_n Z_k as a polynomial in blocks (u, v).
    pub zhat: MultiPoly<Rational>,
    /// Scalar applied to the raw formula sum (formula method only).
    pub rescale: Option<Rational>,
}

impl ZonalKernel {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "method": self.method,
            "normalization": "omega_n * Z_k",
            "rescale": self.rescale.as_ref().map(crate::scalar::rational_string),
            "kernel": self.zhat.to_json(),
        })
    }
}

fn lift(p: &MultiPoly<Rational>, from: &str, to: &str, n: usize) -> Result<MultiPoly<Rational>> {
    p.rename_block("u", from)?.rename_block(from, to)?.with_blocks(&uv(n))
}

/// Gram matrix G_{τρ} = mean(conj(P_τ) P_ρ) over the Fueter basis.
pub fn gram_matrix(n: usize, k: usize) -> Result<Vec<Vec<Multivector<Rational>>>> {
    let basis = monogenic_basis::<Rational>(n, k)?.elements;
    basis
        .iter()
        .map(|pt| {
            basis
                .iter()
                .map(|pr| {
                    let m = sphere_mean(&pt.conj().pmul(pr), "u")?;
                    Ok(m.terms().values().next().cloned().unwrap_or_else(|| Multivector::zero(n)))
                })
                .collect()
        })
        .collect()
}

/// Ẑ = Σ_{σ,τ} P_σ(u) A_{στ} conj(P_τ)(v) with Σ_τ A_{στ} G_{τρ} = δ_{σρ}.
pub fn zonal_kernel_gram_with_order(n: usize, k: usize, order: &[usize]) -> Result<MultiPoly<Rational>> {
    let full = monogenic_basis::<Rational>(n, k)?.elements;
    let basis: Vec<_> = order.iter().map(|&i| full[i].clone()).collect();
    let d = basis.len();
    let nb = 1usize << n;
    let g: Vec<Vec<Multivector<Rational>>> = basis
        .iter()
        .map(|pt| {
            basis
                .iter()
                .map(|pr| {
                    let m = sphere_mean(&pt.conj().pmul(pr), "u")?;
                    Ok(m.terms().values().next().cloned().unwrap_or_else(|| Multivector::zero(n)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // unknown (τ, B) ↦ coefficient of e_B in A_τ; equation (ρ, C)
    let size = d * nb;
    let mut mat = vec![vec![Rational::zero(); size]; size];
    for tau in 0..d {
        for b in 0..nb {
            let eb = Multivector::blade(n, b, Rational::from_i64(1));
            for rho in 0..d {
                let prod = eb.gp(&g[tau][rho]);
                for (c, val) in prod.coeffs().iter().enumerate() {
                    mat[rho * nb + c][tau * nb + b] = val.clone();
                }
            }
        }
    }
    let rhs: Vec<Vec<Rational>> = (0..d)
        .map(|sigma| {
            let mut r = vec![Rational::zero(); size];
            r[sigma * nb] = Rational::from_i64(1);
            r
        })
        .collect();
    let sols = solve_many(&mat, &rhs)?;
    let mut z = MultiPoly::zero(n, &uv(n));
    let pu: Vec<_> = basis.iter().map(|p| lift(p, "u", "u", n)).collect::<Result<_>>()?;
    let pv: Vec<_> = basis.iter().map(|p| lift(&p.conj(), "w", "v", n)).collect::<Result<_>>()?;
    for (sigma, sol) in sols.iter().enumerate() {
        for tau in 0..d {
            let a = Multivector::from_coeffs(n, sol[tau * nb..(tau + 1) * nb].to_vec())?;
            if a.is_zero() {
                continue;
            }
            z = z.add(&pu[sigma].right_mul(&a).pmul(&pv[tau]));
        }
    }
    Ok(z)
}

pub fn zonal_kernel_gram(n: usize, k: usize) -> Result<MultiPoly<Rational>> {
    let d = multisets(n, k).len();
    zonal_kernel_gram_with_order(n, k, &(0..d).collect::<Vec<_>>())
}

/// ∂_{i_1}⋯∂_{i_k} of v/|v|^n, as coefficient polynomials q_j of |v|^{−n−2j}.
fn cauchy_kernel_derivative(n: usize, tuple: &[usize]) -> Result<Vec<MultiPoly<Rational>>> {
    let blocks = [("v", n)];
    let mut q = vec![MultiPoly::vector_var(n, &blocks, "v")?];
    for &i in tuple {
        let mut next = vec![MultiPoly::zero(n, &blocks); q.len() + 1];
        for (j, qj) in q.iter().enumerate() {
            next[j] = next[j].add(&qj.partial("v", i - 1)?);
            let f = Rational::from_i64(-(n as i64) - 2 * j as i64);
            next[j + 1] = next[j + 1].add(&qj.mul_var("v", i - 1)?.scale(&f));
        }
        q = next;
    }
    Ok(q)
}

/// |v|^{n+2k−2} V_σ(v) v as a homogeneous polynomial of degree k.
pub fn formula_factor(n: usize, sigma: &[usize]) -> Result<MultiPoly<Rational>> {
    let k = sigma.len();
    let q = cauchy_kernel_derivative(n, sigma)?;
    let blocks = [("v", n)];
    let rho2 = MultiPoly::<Rational>::zero(n, &blocks).rho2("v")?;
    let mut w = MultiPoly::zero(n, &blocks);
    for (j, qj) in q.iter().enumerate() {
        let mut t = qj.clone();
        for _ in 0..(k - j) {
            t = t.pmul(&rho2);
        }
        w = w.add(&t);
    }
    w.vector_embed("v", Side::Right)?.divide_by_rho2("v")
}

/// Σ over multisets σ of P_σ(u) |v|^{n+2k−2} V_σ(v) v, before rescaling.
pub fn zonal_kernel_formula_raw(n: usize, k: usize) -> Result<MultiPoly<Rational>> {
    let basis = monogenic_basis::<Rational>(n, k)?;
    let mut z = MultiPoly::zero(n, &uv(n));
    for (sigma, p) in basis.labels.iter().zip(&basis.elements) {
        let pu = lift(p, "u", "u", n)?;
        let wv = formula_factor(n, sigma)?.with_blocks(&uv(n))?;
        z = z.add(&pu.pmul(&wv));
    }
    Ok(z)
}

/// mean_v(Ẑ(u,v) p(v)) for p given in block `u`; returns a polynomial in `u`.
pub fn reproduce(zhat: &MultiPoly<Rational>, p: &MultiPoly<Rational>) -> Result<MultiPoly<Rational>> {
    let n = zhat.dim();
    let pv = lift(p, "w", "v", n)?;
    let r = sphere_mean(&zhat.pmul(&pv), "v")?;
    Ok(r)
}

pub fn zonal_kernel(n: usize, k: usize, method: KernelMethod) -> Result<ZonalKernel> {
    match method {
        KernelMethod::Gram => Ok(ZonalKernel { n, k, method, zhat: zonal_kernel_gram(n, k)?, rescale: None }),
        KernelMethod::Formula => {
            let raw = zonal_kernel_formula_raw(n, k)?;
            let p0 = monogenic_basis::<Rational>(n, k)?.elements.remove(0);
            let r = reproduce(&raw, &p0)?;
            let (e, c) = p0.terms().iter().next().ok_or(RsqError::SingularSystem)?;
            let mask = c.coeffs().iter().position(|x| !x.is_zero()).unwrap();
            let rc = r.terms().get(e).map(|m| m.coeff(mask).clone()).unwrap_or_else(Rational::zero);
            if rc.is_zero() {
                return Err(RsqError::SingularSystem);
            }
            let lambda = c.coeff(mask).clone() / rc;
            let zhat = raw.scale(&lambda);
            if reproduce(&zhat, &p0)? != p0 {
                return Err(RsqError::Config("formula kernel is not a scalar multiple of the reproducing kernel".into()));
            }
            Ok(ZonalKernel { n, k, method, zhat, rescale: Some(lambda) })
        }
    }
}

fn vec_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Matrix of u ↦ x u x/|x|^2 acting on ℝ^m, columns are images of e_j.
fn reflection_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let xv = Multivector::vector(m, x);
    let r2 = xv.norm_sq();
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| xv.gp(&Multivector::e(m, j + 1)).gp(&xv).scale(&(1.0 / r2)).vector_coords())
        .collect();
    (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect()
}

fn reflect_point(x: &[f64], u: &[f64]) -> Vec<f64> {
    let xv = Multivector::vector(x.len(), x);
    let uv = Multivector::vector(x.len(), u);
    xv.gp(&uv).gp(&xv).scale(&(1.0 / xv.norm_sq())).vector_coords()
}

/// H_k(x,u,v) = −1/(ω_n c_k) · u · x/|x|^n · Z_{k−1}(x u x/|x|^2, v) · v.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub params: ModelParams,
    /// ω_n Z_{k−1} in (u, v).
    pub zhat: MultiPoly<f64>,
}

impl FundamentalSolution {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(RsqError::OperatorIndex(0));
        }
        let params = ModelParams::new(n, k)?;
        let zhat = zonal_kernel_gram(n, k - 1)?.to_f64();
        Ok(FundamentalSolution { params, zhat })
    }

    pub fn prefactor(&self) -> f64 {
        -1.0 / (self.params.omega_n * self.params.omega_n * self.params.c_k_f64())
    }

    fn check(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.params.n {
            return Err(RsqError::PointArity { block: "x".into(), arity: self.params.n, got: x.len() });
        }
        let r = vec_norm(x);
        if r == 0.0 || !r.is_finite() {
            return Err(RsqError::Singular("H_k at x = 0".into()));
        }
        Ok(r)
    }

    pub fn eval(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        let n = self.params.n;
        let r = self.check(x)?;
        let xn = Multivector::vector(n, x).scale(&r.powi(-(n as i32)));
        let z = self.zhat.eval(&[("u", &reflect_point(x, u)), ("v", v)])?;
        let uv = Multivector::vector(n, &u[..n.min(u.len())]);
        let vv = Multivector::vector(n, &v[..n.min(v.len())]);
        Ok(uv.gp(&xn).gp(&z).gp(&vv).scale(&self.prefactor()))
    }

    /// −1/(ω_n c_k) · u · Z_{k−1}(u, x v x/|x|^2) · x/|x|^n · v.
    pub fn eval_right(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        let n = self.params.n;
        let r = self.check(x)?;
        let xn = Multivector::vector(n, x).scale(&r.powi(-(n as i32)));
        let z = self.zhat.eval(&[("u", u), ("v", &reflect_point(x, v))])?;
        let uv = Multivector::vector(n, &u[..n.min(u.len())]);
        let vv = Multivector::vector(n, &v[..n.min(v.len())]);
        Ok(uv.gp(&z).gp(&xn).gp(&vv).scale(&self.prefactor()))
    }

    /// H_k(x,·,·) as a polynomial in (u, v) for fixed x.
    pub fn partial(&self, x: &[f64]) -> Result<MultiPoly<f64>> {
        let n = self.params.n;
        let r = self.check(x)?;
        let xn = Multivector::vector(n, x).scale(&r.powi(-(n as i32)));
        let zs = self.zhat.affine_substitute("u", &reflection_matrix(x), &vec![0.0; n])?;
        Ok(zs
            .left_mul(&xn)
            .vector_embed("u", Side::Left)?
            .vector_embed("v", Side::Right)?
            .scale(&self.prefactor()))
    }

    /// The right representation as a polynomial in (u, v) for fixed x.
    pub fn partial_right(&self, x: &[f64]) -> Result<MultiPoly<f64>> {
        let n = self.params.n;
        let r = self.check(x)?;
        let xn = Multivector::vector(n, x).scale(&r.powi(-(n as i32)));
        let zs = self.zhat.affine_substitute("v", &reflection_matrix(x), &vec![0.0; n])?;
        Ok(zs
            .right_mul(&xn)
            .vector_embed("u", Side::Left)?
            .vector_embed("v", Side::Right)?
            .scale(&self.prefactor()))
    }
}

/// Spherical kernels on S^n ⊂ ℝ^{n+1}. The u, v variables live in ℝ^{n+1}, so Z_{k−1} is the
/// reproducing kernel of dimension N = n + 1 with values in Cl_{n+1}.
#[derive(Debug, Clone)]
pub struct SphericalKernel {
    pub n: usize,
    pub k: usize,
    /// ω_N Z_{k−1}, N = n + 1.
    pub zhat: MultiPoly<f64>,
}

impl SphericalKernel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(RsqError::OperatorIndex(0));
        }
        if n < 2 {
            return Err(RsqError::AmbientDimension(n));
        }
        let zhat = zonal_kernel_gram(n + 1, k - 1)?.to_f64();
        Ok(SphericalKernel { n, k, zhat })
    }

    fn dim(&self) -> usize {
        self.n + 1
    }

    fn z(&self, u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        Ok(self.zhat.eval(&[("u", u), ("v", v)])?.scale(&(1.0 / omega(self.n + 1))))
    }

    /// −1/(ω_n c_k) with c_k = (n−2)/(n−2+2k) as printed for the sphere.
    pub fn printed_prefactor(&self) -> f64 {
        let n = self.n as f64;
        let ck = (n - 2.0) / (n - 2.0 + 2.0 * self.k as f64);
        -1.0 / (omega(self.n) * ck)
    }

    fn points(&self, xs: &[f64], ys: &[f64]) -> Result<(Multivector<f64>, f64)> {
        check_on_sphere(xs)?;
        check_on_sphere(ys)?;
        let d: Vec<f64> = xs.iter().zip(ys).map(|(a, b)| a - b).collect();
        let r = vec_norm(&d);
        if r < 1e-14 {
            return Err(RsqError::Singular("x_s = y_s".into()));
        }
        Ok((Multivector::vector(self.dim(), &d), r))
    }

    /// a(x_s,y_s) = J_x^{-1}(x_s−y_s)J_y^{-1}/(|J_x^{-1}||x_s−y_s||J_y^{-1}|), as a Pin element.
    pub fn pin_a(&self, xs: &[f64], ys: &[f64]) -> Result<PinElement<f64>> {
        let (d, r) = self.points(xs, ys)?;
        let jx = cayley_inverse_weight_closed(xs).versor_inverse()?;
        let jy = cayley_inverse_weight_closed(ys).versor_inverse()?;
        let unit = |m: &Multivector<f64>| m.scale(&(1.0 / m.norm_f64()));
        PinElement::new(vec![unit(&jx), d.scale(&(1.0 / r)), unit(&jy)], 1e-10)
    }

    /// Form with the kernel on the u side:
    /// K · u · (x_s−y_s)/|x_s−y_s|^n · J(C^{-1},y_s)^{-1} · Z_{k−1}(a u ã, v) · v.
    pub fn form_left(&self, xs: &[f64], ys: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        let m = self.dim();
        let (d, r) = self.points(xs, ys)?;
        let g = d.scale(&r.powi(-(self.n as i32)));
        let jyi = cayley_inverse_weight_closed(ys).versor_inverse()?;
        let a = self.pin_a(xs, ys)?;
        let au = a.reflect(&Multivector::vector(m, u))?.vector_coords();
        let z = self.z(&au, v)?;
        Ok(Multivector::vector(m, u).gp(&g).gp(&jyi).gp(&z).gp(&Multivector::vector(m, v)).scale(&self.printed_prefactor()))
    }

    /// Form with the kernel on the v side:
    /// K · u · Z_{k−1}(u, ã v a) · J(C^{-1},y_s)^{-1} · (x_s−y_s)/|x_s−y_s|^n · v.
    pub fn form_right(&self, xs: &[f64], ys: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        let m = self.dim();
        let (d, r) = self.points(xs, ys)?;
        let g = d.scale(&r.powi(-(self.n as i32)));
        let jyi = cayley_inverse_weight_closed(ys).versor_inverse()?;
        let a = self.pin_a(xs, ys)?;
        let p = a.product();
        let va = p.rev().gp(&Multivector::vector(m, v)).gp(p).vector_coords();
        let z = self.z(u, &va)?;
        Ok(Multivector::vector(m, u).gp(&z).gp(&jyi).gp(&g).gp(&Multivector::vector(m, v)).scale(&self.printed_prefactor()))
    }

    /// The right form rewritten through Z(u, ã v a) = −ã Z(a u ã, v) a:
    /// −K · u · J_y^{-1} · G · b · Z_{k−1}(a u ã, v) · b · v, with b = J_x^{-1}/|J_x^{-1}|.
    pub fn form_left_reflected(&self, xs: &[f64], ys: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
        let m = self.dim();
        let (d, r) = self.points(xs, ys)?;
        let g = d.scale(&r.powi(-(self.n as i32)));
        let jyi = cayley_inverse_weight_closed(ys).versor_inverse()?;
        let jxi = cayley_inverse_weight_closed(xs).versor_inverse()?;
        let b = jxi.scale(&(1.0 / jxi.norm_f64()));
        let a = self.pin_a(xs, ys)?;
        let au = a.reflect(&Multivector::vector(m, u))?.vector_coords();
        let z = self.z(&au, v)?;
        Ok(Multivector::vector(m, u)
            .gp(&jyi)
            .gp(&g)
            .gp(&b)
            .gp(&z)
            .gp(&b)
            .gp(&Multivector::vector(m, v))
            .scale(&-self.printed_prefactor()))
    }

    /// Reproducing kernel for the spherical Cauchy and Borel–Pompeiu formulas at k = 1:
    /// −1/(ω_n c̃_1) · u · (x_s−y_s)/|x_s−y_s|^n · Z̃_0 · v with c̃_1 = (N−2)/N, Z̃_0 = 1/ω_N.
    pub fn cauchy_kernel(&self, xs: &[f64], ys: &[f64]) -> Result<MultiPoly<f64>> {
        if self.k != 1 {
            return Err(RsqError::OperatorIndex(self.k));
        }
        let m = self.dim();
        let (d, r) = self.points(xs, ys)?;
        let g = d.scale(&r.powi(-(self.n as i32)));
        let nn = m as f64;
        let ck = (nn - 2.0) / nn;
        let pref = -1.0 / (omega(self.n) * ck * omega(m));
        let blocks = uv(m);
        MultiPoly::constant(m, &blocks, g.scale(&pref))
            .vector_embed("u", Side::Left)?
            .vector_embed("v", Side::Right)
    }
}
