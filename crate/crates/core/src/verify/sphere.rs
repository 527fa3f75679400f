//! Spherical suites on S^n ⊂ ℝ^{n+1}: Cayley transport, Stokes on a cap, Borel–Pompeiu, Cauchy.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{poly_compare, rand_mv, random_unit_f64, Acc, Check, SuiteConfig};
use crate::clifford::Multivector;
use crate::conformal::{cayley_forward, cayley_inverse, cayley_inverse_weight_closed};
use crate::error::Result;
use crate::integrate::{omega, poly_quadrature, sphere_mean, Node, QuadratureRule, RuleSpec, Surface};
use crate::kernels::SphericalKernel;
use crate::ops::{apply_spherical, spherical_dirac_fd, spherical_dirac_right_fd, OperatorKind, OperatorTag};
use crate::poly::{MultiPoly, Side};
use crate::scalar::Rational;
use crate::spaces::{monogenic_basis_in, project, Projection};

const FD_STEP: f64 = 1e-5;

type Field = Box<dyn Fn(&[f64]) -> Result<Multivector<f64>>>;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Constant polynomial in block `u` of arity dim.
fn const_u(c: &Multivector<f64>) -> MultiPoly<f64> {
    let m = c.dim();
    MultiPoly::constant(m, &[("u", m)], c.clone())
}

fn left_u(c: &Multivector<f64>) -> Result<MultiPoly<f64>> {
    const_u(c).vector_embed("u", Side::Left)
}

fn right_u(c: &Multivector<f64>) -> Result<MultiPoly<f64>> {
    const_u(c).vector_embed("u", Side::Right)
}

/// (A, B)_u = ω_N mean_u(A B).
fn pair(a: &MultiPoly<f64>, b: &MultiPoly<f64>, block: &str) -> Result<MultiPoly<f64>> {
    let (_, m) = a.block_range(block)?;
    Ok(sphere_mean(&a.pmul(b), block)?.scale(&omega(m)))
}

fn base_point_sphere(cfg: &SuiteConfig) -> Result<Vec<f64>> {
    match &cfg.base_point {
        Some(p) => {
            let r = norm(p);
            Ok(p.iter().map(|c| c / r).collect())
        }
        None => {
            let mut y = vec![0.0; cfg.n];
            y[0] = 0.1;
            y[1] = -0.2;
            y[2] = 0.3;
            cayley_forward(&y)
        }
    }
}

fn cap(n: usize, c: &[f64], angle: f64, orders: &[usize]) -> Result<QuadratureRule> {
    QuadratureRule::build(RuleSpec { surface: Surface::Cap { n, center: c.to_vec(), angle }, orders: orders.to_vec() })
}

fn cap_boundary(n: usize, c: &[f64], angle: f64, orders: &[usize]) -> Result<QuadratureRule> {
    QuadratureRule::build(RuleSpec { surface: Surface::CapBoundary { n, center: c.to_vec(), angle }, orders: orders.to_vec() })
}

/// Euclidean monogenic f on ℝ^n transported to S^n: F(x_s) = J(C^{-1},x_s) f(C^{-1}(x_s)).
fn transported(f: impl Fn(&[f64]) -> Result<Multivector<f64>> + 'static) -> Field {
    Box::new(move |xs: &[f64]| {
        let x = cayley_inverse(xs)?;
        Ok(cayley_inverse_weight_closed(xs).gp(&f(&x)?.lift(xs.len())))
    })
}

/// Menu of spherical monogenic test functions: a transported Cauchy kernel with its pole at p
/// and transported Fueter polynomials of degrees 1 and 2.
fn transported_menu(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<(String, Field)>> {
    let p: Vec<f64> = random_unit_f64(rng, n).iter().map(|c| 3.0 * c).collect();
    let mut out: Vec<(String, Field)> = vec![(
        "transported_kernel".into(),
        transported(move |x: &[f64]| {
            let d: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
            Ok(Multivector::vector(n, &d).scale(&norm(&d).powi(-(n as i32))))
        }),
    )];
    for deg in 1..=2 {
        let b = monogenic_basis_in::<Rational>(n, deg, n, "x")?.elements;
        let c = rand_mv(rng, n, 0.5);
        let q = b[rng.gen_range(0..b.len())].right_mul(&c).to_f64();
        out.push((format!("transported_fueter_deg{deg}"), transported(move |x: &[f64]| q.eval(&[("x", x)]))));
    }
    Ok(out)
}

/// Random Clifford-valued polynomial of degree ≤ 2 in the ambient coordinates of ℝ^{n+1}.
fn ambient_poly(rng: &mut ChaCha8Rng, m: usize) -> Field {
    let mut p = MultiPoly::<Rational>::constant(m, &[("x", m)], rand_mv(rng, m, 0.5));
    for _ in 0..4 {
        let mut e = vec![0u8; m];
        for _ in 0..rng.gen_range(1..=2) {
            e[rng.gen_range(0..m)] += 1;
        }
        p.add_term(e, rand_mv(rng, m, 0.4));
    }
    let p = p.to_f64();
    Box::new(move |x: &[f64]| p.eval(&[("x", x)]))
}

fn random_on_sphere_below(rng: &mut ChaCha8Rng, m: usize, max_last: f64) -> Vec<f64> {
    loop {
        let x = random_unit_f64(rng, m);
        if x[m - 1] < max_last {
            return x;
        }
    }
}

fn rel(a: &MultiPoly<f64>, b: &MultiPoly<f64>) -> f64 {
    let (_, rn, err, _) = poly_compare(a, b);
    if rn > super::NOISE_FLOOR {
        err / rn
    } else {
        err
    }
}

fn levels(cfg: &SuiteConfig) -> Vec<Vec<usize>> {
    let fine = cfg.orders_or(&[16, 32]);
    let coarse: Vec<usize> = fine.iter().map(|o| (o / 2).max(2)).collect();
    vec![coarse, fine]
}

pub(super) fn cayley_intertwining(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.n;
    let m = n + 1;
    let mut checks = Vec::new();

    let mut fwd = Acc::float();
    let mut back = Acc::float();
    for _ in 0..1000 {
        let r: f64 = rng.gen_range(0.0..5.0);
        let x: Vec<f64> = random_unit_f64(rng, n).iter().map(|c| r * c).collect();
        let xs = cayley_forward(&x)?;
        let x2 = cayley_inverse(&xs)?;
        let err = norm(&x.iter().zip(&x2).map(|(a, b)| a - b).collect::<Vec<_>>());
        fwd.values(norm(&x2), norm(&x).max(1.0), err * norm(&x).max(1.0));
        let ys = random_on_sphere_below(rng, m, 0.9);
        let ys2 = cayley_forward(&cayley_inverse(&ys)?)?;
        back.values(1.0, 1.0, norm(&ys.iter().zip(&ys2).map(|(a, b)| a - b).collect::<Vec<_>>()));
    }
    checks.push(fwd.finish("cayley_round_trip_euclidean", "C^{-1}(C(x))=x", 1e-12));
    checks.push(back.finish("cayley_round_trip_sphere", "C(C^{-1}(x_s))=x_s", 1e-12));

    let kind = OperatorKind::new(OperatorTag::QkSLeft, n, 1)?;
    let tol = cfg.tol_or(1e-5);
    let menu = transported_menu(rng, n)?;
    let points: Vec<Vec<f64>> = (0..20).map(|_| random_on_sphere_below(rng, m, 0.5)).collect();
    for (name, f) in &menu {
        let mut acc = Acc::float();
        for xs in &points {
            let q = apply_spherical(&kind, |p: &[f64]| left_u(&f(p)?), xs, FD_STEP)?;
            let scale = super::poly_norm(&left_u(&f(xs)?)?);
            acc.values(super::poly_norm(&q), scale, super::poly_norm(&q));
        }
        checks.push(
            acc.finish(&format!("{name}_annihilated_by_QkS"), "-J_{-1}(C^{-1},x_s)Q_{k,u}uf(x,u)", tol)
                .with_detail("Q_1^S(u F) relative to |u F| at 20 points, rotational differences h = 1e-5"),
        );
    }

    for k in 1..=2 {
        let sk = SphericalKernel::new(n, k)?;
        let mut acc = Acc::float();
        let mut printed: f64 = 0.0;
        for _ in 0..100 {
            let xs = random_on_sphere_below(rng, m, 0.9);
            let ys = random_on_sphere_below(rng, m, 0.9);
            let u = random_unit_f64(rng, m);
            let v = random_unit_f64(rng, m);
            let right = sk.form_right(&xs, &ys, &u, &v)?;
            let rewritten = sk.form_left_reflected(&xs, &ys, &u, &v)?;
            acc.mv(&rewritten, &right);
            let left = sk.form_left(&xs, &ys, &u, &v)?;
            printed = printed.max(left.sub(&right).norm_f64() / right.norm_f64().max(super::NOISE_FLOOR));
        }
        checks.push(
            acc.finish(&format!("kernel_forms_agree_k{k}"), "H_k^S kernel on the u side vs the v side", 1e-10).with_detail(
                format!("v-side form vs -K u J_y^-1 G b Z(a u a~, v) b v; the direct u-side form differs by rel {printed:.3e}"),
            ),
        );
    }
    Ok(checks)
}

pub(super) fn sphere_stokes(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.n;
    let m = n + 1;
    let c = base_point_sphere(cfg)?;
    let tol = cfg.tol_or(1e-2);
    let anchor_q = "(g(x_s,u)u, Q_k^Suf(x_s,u))_u";
    let anchor_7 = "(I-P_k)n(x_s)uf(x_s,u)";
    let mut checks = Vec::new();
    for pair_i in 0..3 {
        let f = ambient_poly(rng, m);
        let g = ambient_poly(rng, m);
        let uf = |p: &[f64]| left_u(&f(p)?);
        let gu = |p: &[f64]| right_u(&g(p)?);
        let mut errs = Vec::new();
        let mut last = None;
        for ord in levels(cfg) {
            let vrule = cap(n, &c, cfg.cap_angle, &[ord[0], ord[0], ord[1]])?;
            let brule = cap_boundary(n, &c, cfg.cap_angle, &ord)?;
            let vol = poly_quadrature(&vrule, |nd: &Node| {
                let xs = &nd.point;
                let qf = project(&spherical_dirac_fd(&uf, xs, FD_STEP)?, "u", Projection::IminusPk, Side::Left)?;
                let gq = project(&spherical_dirac_right_fd(&gu, xs, FD_STEP)?, "u", Projection::IminusPk, Side::Right)?;
                Ok(pair(&gq, &uf(xs)?, "u")?.add(&pair(&gu(xs)?, &qf, "u")?))
            })?;
            let bnd = poly_quadrature(&brule, |nd: &Node| {
                let nuf = uf(&nd.point)?.left_mul(&Multivector::vector(m, &nd.normal));
                Ok(pair(&gu(&nd.point)?, &project(&nuf, "u", Projection::IminusPk, Side::Left)?, "u")?.neg())
            })?;
            let plain = poly_quadrature(&brule, |nd: &Node| {
                let nuf = uf(&nd.point)?.left_mul(&Multivector::vector(m, &nd.normal));
                Ok(pair(&gu(&nd.point)?, &nuf, "u")?.neg())
            })?;
            errs.push(rel(&vol, &bnd));
            last = Some((vol, bnd, plain));
        }
        let (vol, bnd, plain) = last.expect("two levels");
        let (ln, rn, err, _) = poly_compare(&vol, &bnd);
        checks.push(
            Check::from_norms(&format!("cap_stokes_pair{pair_i}"), anchor_q, ln, rn, err, tol)
                .with_detail("volume = -boundary; the minus sign comes from D_s = x(Gamma + n/2)"),
        );
        let (ln, rn, err, _) = poly_compare(&plain, &bnd);
        checks.push(Check::from_norms(&format!("projection_removable_pair{pair_i}"), anchor_7, ln, rn, err, tol));
        checks.push(Check::refinement(&format!("refinement_monotone_pair{pair_i}"), anchor_q, &errs, 2.0));
    }
    Ok(checks)
}

/// ∫_∂V (K(x_s,y_s,u,v), (I − P_1) n v F(x_s))_v dΣ with the k = 1 spherical kernel K.
fn boundary_term(sk: &SphericalKernel, rule: &QuadratureRule, ys: &[f64], f: &Field) -> Result<MultiPoly<f64>> {
    let m = ys.len();
    poly_quadrature(rule, |nd: &Node| {
        let nu = Multivector::vector(m, &nd.normal);
        let w = project(&left_u(&f(&nd.point)?)?.left_mul(&nu), "u", Projection::IminusPk, Side::Left)?
            .rename_block("u", "v")?
            .with_blocks(&[("u", m), ("v", m)])?;
        pair(&sk.cauchy_kernel(&nd.point, ys)?, &w, "v")
    })
}

pub(super) fn sphere_cauchy(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.n;
    let m = n + 1;
    let ys = base_point_sphere(cfg)?;
    let tol = cfg.tol_or(1e-2);
    let anchor = "supp f\\subset V_s: u'f(y_s, u') from boundary values";
    let sk = SphericalKernel::new(n, 1)?;
    let mut checks = Vec::new();
    for (name, f) in transported_menu(rng, n)? {
        let lhs = left_u(&f(&ys)?)?;
        let mut errs = Vec::new();
        let mut last = None;
        for ord in levels(cfg) {
            let rule = cap_boundary(n, &ys, cfg.cap_angle, &ord)?;
            let val = boundary_term(&sk, &rule, &ys, &f)?;
            errs.push(rel(&val, &lhs));
            last = Some((val, rule));
        }
        let (val, rule) = last.expect("two levels");
        let (ln, rn, err, _) = poly_compare(&val, &lhs);
        checks.push(
            Check::from_norms(&format!("{name}_reconstruction"), anchor, ln, rn, err, tol)
                .with_detail("kernel -1/(omega_n c~_1 omega_N) u (x_s-y_s)/|x_s-y_s|^n v, c~_1 = (N-2)/N"),
        );
        checks.push(Check::refinement(&format!("{name}_refinement_monotone"), anchor, &errs, 2.0));

        // scalar form: f(y_s) = −(1/ω_n) ∫_∂V G n f dΣ
        let mut acc = Multivector::zero(m);
        for nd in &rule.nodes {
            let d: Vec<f64> = nd.point.iter().zip(&ys).map(|(a, b)| a - b).collect();
            let g = Multivector::vector(m, &d).scale(&norm(&d).powi(-(n as i32)));
            acc = acc.add(&g.gp(&Multivector::vector(m, &nd.normal)).gp(&f(&nd.point)?).scale(&nd.weight));
        }
        let acc = acc.scale(&(-1.0 / omega(n)));
        let want = f(&ys)?;
        let (ln, rn, err, _) = super::mv_compare(&acc, &want);
        checks.push(Check::from_norms(&format!("{name}_scalar_form"), "f(y_s)=-\\frac{1}{\\omega_n}\\int_{\\partial V}G n f", ln, rn, err, tol));
    }
    Ok(checks)
}

pub(super) fn sphere_bp(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.n;
    let m = n + 1;
    let ys = base_point_sphere(cfg)?;
    let tol = cfg.tol_or(1e-2);
    let anchor = "u'f(y_s, u')";
    let sk = SphericalKernel::new(n, 1)?;
    let kind = OperatorKind::new(OperatorTag::QkSLeft, n, 1)?;
    let mut menu: Vec<(String, Field)> = Vec::new();
    for i in 0..2 {
        menu.push((format!("ambient_poly{i}"), ambient_poly(rng, m)));
    }
    let (_, t) = transported_menu(rng, n)?.swap_remove(0);
    menu.push(("x1_times_transported_kernel".into(), Box::new(move |xs: &[f64]| Ok(t(xs)?.scale(&(1.0 + xs[0]))))));
    let mut checks = Vec::new();
    for (name, f) in &menu {
        let lhs = left_u(&f(&ys)?)?;
        let mut errs = Vec::new();
        let mut last = None;
        for ord in levels(cfg) {
            let brule = cap_boundary(n, &ys, cfg.cap_angle, &ord)?;
            let vrule = cap(n, &ys, cfg.cap_angle, &[ord[0], ord[0], ord[1]])?;
            let bnd = boundary_term(&sk, &brule, &ys, f)?;
            let vol = poly_quadrature(&vrule, |nd: &Node| {
                let q = apply_spherical(&kind, |p: &[f64]| left_u(&f(p)?), &nd.point, FD_STEP)?
                    .rename_block("u", "v")?
                    .with_blocks(&[("u", m), ("v", m)])?;
                pair(&sk.cauchy_kernel(&nd.point, &ys)?, &q, "v")
            })?;
            let val = bnd.add(&vol);
            errs.push(rel(&val, &lhs));
            last = Some(val);
        }
        let val = last.expect("two levels");
        let (ln, rn, err, _) = poly_compare(&val, &lhs);
        checks.push(
            Check::from_norms(&format!("{name}_reconstruction"), anchor, ln, rn, err, tol)
                .with_detail("u f(y_s,u) = boundary term + volume term (K, Q_1^S v f)_v"),
        );
        checks.push(Check::refinement(&format!("{name}_refinement_monotone"), anchor, &errs, 2.0));
    }
    Ok(checks)
}
