//! Exact suites: Clifford identities, harmonic splitting, reproducing kernels, Cauchy on spheres.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rand_homogeneous, rand_mv, random_unit_f64, rational_unit_vector, Acc, Check, SuiteConfig};
use crate::clifford::{Involution, Multivector, PinElement, MAX_DIM};
use crate::error::Result;
use crate::integrate::sphere_mean;
use crate::kernels::{reproduce, zonal_kernel, zonal_kernel_gram_with_order, FundamentalSolution, KernelMethod};
use crate::ops::fundamental_solution_residual;
use crate::poly::{MultiPoly, Side};
use crate::scalar::{Rational, Scalar};
use crate::spaces::{
    almansi_fischer_side, expected_harmonic_dimension, expected_monogenic_count, harmonic_basis, harmonic_dimension_rank,
    monogenic_basis, monogenic_dimension_rank, project, Projection,
};

type Q = Rational;
type P = MultiPoly<Rational>;

fn q(n: i64) -> Q {
    Q::from_i64(n)
}

pub(super) fn algebra(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let _ = cfg;
    let mut checks = Vec::new();
    for m in 1..=MAX_DIM {
        let mut anti = Acc::exact();
        for i in 1..=m {
            let ei = Multivector::<Q>::e(m, i);
            anti.mv(&ei.gp(&ei), &Multivector::scalar(m, q(-1)));
            for j in (i + 1)..=m {
                let ej = Multivector::<Q>::e(m, j);
                anti.mv(&ei.gp(&ej), &ej.gp(&ei).neg());
            }
        }
        checks.push(anti.finish(&format!("anticommutation_m{m}"), "e_ie_j+e_je_i=-2\\delta_{ij}", 0.0));

        let triples = 1000;
        let density = if m >= 5 { 0.25 } else { 0.6 };
        let mut assoc = Acc::exact();
        for _ in 0..triples {
            let (a, b, c) = (rand_mv(rng, m, density), rand_mv(rng, m, density), rand_mv(rng, m, density));
            assoc.mv(&a.gp(&b).gp(&c), &a.gp(&b.gp(&c)));
        }
        checks.push(assoc.finish(&format!("associativity_m{m}"), "(ab)c=a(bc)", 0.0));

        let mut conj = Acc::exact();
        let mut rev = Acc::exact();
        let mut main = Acc::exact();
        let mut invol = Acc::exact();
        let mut norm = Acc::exact();
        for _ in 0..100 {
            let (a, b) = (rand_mv(rng, m, 0.5), rand_mv(rng, m, 0.5));
            let ab = a.gp(&b);
            conj.mv(&ab.conj(), &b.conj().gp(&a.conj()));
            rev.mv(&ab.rev(), &b.rev().gp(&a.rev()));
            main.mv(&ab.involution(Involution::Main), &a.involution(Involution::Main).gp(&b.involution(Involution::Main)));
            invol.mv(&a.conj().conj(), &a);
            invol.mv(&a.rev().rev(), &a);
            norm.mv(&Multivector::scalar(m, a.gp(&a.conj()).scalar_part().clone()), &Multivector::scalar(m, a.norm_sq()));
            let x = Multivector::vector(m, &(0..m).map(|_| super::rand_rational(rng)).collect::<Vec<_>>());
            norm.mv(&x.gp(&x), &Multivector::scalar(m, -x.norm_sq()));
        }
        checks.push(conj.finish(&format!("conjugation_anti_automorphism_m{m}"), "\\overline{ab}=\\bar{b}\\bar{a}", 0.0));
        checks.push(rev.finish(&format!("reversion_anti_automorphism_m{m}"), "\\widetilde{ab}=\\tilde{b}\\tilde{a}", 0.0));
        checks.push(main.finish(&format!("main_involution_automorphism_m{m}"), "a'b'=(ab)'", 0.0));
        checks.push(invol.finish(&format!("involutions_square_to_identity_m{m}"), "\\bar{\\bar a}=a", 0.0));
        checks.push(norm.finish(&format!("norm_formula_m{m}"), "x^2=-\\|x\\|^2", 0.0));

        let mut pin = Acc::exact();
        for _ in 0..20 {
            let nf = rng.gen_range(1..=3);
            let factors: Vec<_> = (0..nf).map(|_| Multivector::vector(m, &rational_unit_vector(rng, m))).collect();
            let a = PinElement::new(factors, 0.0)?;
            let x = Multivector::vector(m, &(0..m).map(|_| super::rand_rational(rng)).collect::<Vec<_>>());
            let y = a.reflect(&x)?;
            pin.mv(&y.grade_part(1), &y);
            pin.mv(&Multivector::scalar(m, y.norm_sq()), &Multivector::scalar(m, x.norm_sq()));
        }
        checks.push(pin.finish(&format!("pin_reflection_isometry_m{m}"), "ax\\tilde{a}=O_a(x)", 0.0));
    }
    Ok(checks)
}

fn random_harmonic(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<P> {
    let hb = harmonic_basis::<Q>(n, k, n, "u")?.elements;
    let mut h = P::zero(n, &[("u", n)]);
    for b in &hb {
        if rng.gen_bool(0.5) {
            h = h.add(&b.right_mul(&rand_mv(rng, n, 0.3)));
        }
    }
    if h.is_zero() {
        h = hb[0].right_mul(&rand_mv(rng, n, 1.0));
    }
    Ok(h)
}

pub(super) fn spaces(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (n, k) = (cfg.n, cfg.k);
    let mut checks = Vec::new();
    let blocks = [("u", n)];
    let u = P::vector_var(n, &blocks, "u")?;

    let mut split = Acc::exact();
    let mut mono = Acc::exact();
    let mut idem = Acc::exact();
    let mut right = Acc::exact();
    for _ in 0..5 {
        let h = random_harmonic(rng, n, k)?;
        let (pk, pkm1) = almansi_fischer_side(&h, "u", Side::Left)?;
        split.poly(&pk.add(&pkm1.vector_embed("u", Side::Left)?), &h);
        let zero = P::zero(n, &blocks);
        mono.poly(&pk.dirac("u", Side::Left)?, &zero);
        mono.poly(&pkm1.dirac("u", Side::Left)?, &zero);
        let ph = project(&h, "u", Projection::Pk, Side::Left)?;
        let qh = project(&h, "u", Projection::IminusPk, Side::Left)?;
        idem.poly(&ph.add(&qh), &h);
        idem.poly(&project(&ph, "u", Projection::Pk, Side::Left)?, &ph);
        idem.poly(&project(&qh, "u", Projection::IminusPk, Side::Left)?, &qh);
        idem.poly(&project(&ph, "u", Projection::IminusPk, Side::Left)?, &zero);
        idem.poly(&project(&qh, "u", Projection::Pk, Side::Left)?, &zero);
        let (rk, rkm1) = almansi_fischer_side(&h, "u", Side::Right)?;
        right.poly(&rk.add(&rkm1.vector_embed("u", Side::Right)?), &h);
        right.poly(&rk.dirac("u", Side::Right)?, &zero);
        // conjugating coefficients exchanges the two sides
        let (ck, _) = almansi_fischer_side(&h.conj(), "u", Side::Right)?;
        right.poly(&ck, &pk.conj());
    }
    checks.push(split.finish("almansi_fischer_split", "H_k=M_k\\oplus u\\mathcal{M}_{k-1}", 0.0));
    checks.push(mono.finish("almansi_fischer_parts_monogenic", "D_up_k=D_up_{k-1}=0", 0.0));
    checks.push(idem.finish("projection_idempotents", "I-P_k: \\mathcal{H}_k\\rightarrow u\\mathcal{M}_{k-1}", 0.0));
    checks.push(right.finish("right_split_mirrors_left", "right monogenic polynomials", 0.0));

    let hd = harmonic_dimension_rank(n, k)? as f64;
    let ex = expected_harmonic_dimension(n, k) as f64;
    checks.push(Check::exact("dimension_identity_harmonic", "dim H_k = dim M_k + dim uM_{k-1}", hd, ex, (hd - ex).abs(), hd == ex));
    let md = monogenic_dimension_rank(n, k)? as f64;
    let mx = ((1u64 << n) * expected_monogenic_count(n, k)) as f64;
    checks.push(Check::exact("dimension_monogenic", "dim M_k = 2^n C(n+k-2,k)", md, mx, (md - mx).abs(), md == mx));

    // D^2 = -Δ and Γ = uD + E on random polynomials
    let mut lap = Acc::exact();
    let mut gam = Acc::exact();
    for _ in 0..20 {
        let deg = rng.gen_range(0..=k.max(1) + 1);
        let p = rand_homogeneous(rng, n, &blocks, "u", deg, 4);
        lap.poly(&p.dirac("u", Side::Left)?.dirac("u", Side::Left)?, &p.laplacian("u")?.neg());
        gam.poly(&p.gamma("u")?, &p.dirac("u", Side::Left)?.vector_embed("u", Side::Left)?.add(&p.euler("u")?));
    }
    checks.push(lap.finish("dirac_squares_to_minus_laplacian", "D^2=-\\Delta", 0.0));
    checks.push(gam.finish("gamma_equals_uD_plus_euler", "\\Gamma = wD + E", 0.0));

    let mut eig = Acc::exact();
    for p in monogenic_basis::<Q>(n, k)?.elements {
        eig.poly(&p.gamma("u")?, &p.scale(&q(k as i64)));
    }
    if k >= 1 {
        for p in monogenic_basis::<Q>(n, k - 1)?.elements {
            let up = u.pmul(&p);
            eig.poly(&up.gamma("u")?, &up.scale(&q(2 - n as i64 - k as i64)));
        }
    }
    checks.push(eig.finish("gamma_eigenvalues", "\\Gamma p_k=kp_k, \\Gamma(uq_{k-1})=(2-n-k)uq_{k-1}", 0.0));
    Ok(checks)
}

pub(super) fn kernel(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (n, k) = (cfg.n, cfg.k);
    let mut checks = Vec::new();
    let gram = zonal_kernel(n, k, KernelMethod::Gram)?;
    let basis = monogenic_basis::<Q>(n, k)?.elements;

    let mut repro = Acc::exact();
    for p in &basis {
        repro.poly(&reproduce(&gram.zhat, p)?, p);
    }
    for _ in 0..20 {
        let mut comb = P::zero(n, &[("u", n)]);
        for p in &basis {
            comb = comb.add(&p.right_mul(&rand_mv(rng, n, 0.4)));
        }
        repro.poly(&reproduce(&gram.zhat, &comb)?, &comb);
    }
    checks.push(repro.finish("reproducing_property", "p_k(u)=(Z_k(u,v), p_k(v))_v", 0.0));

    let zero = P::zero(n, &[("u", n), ("v", n)]);
    let mut mono = Acc::exact();
    mono.poly(&gram.zhat.dirac("u", Side::Left)?, &zero);
    mono.poly(&gram.zhat.dirac("v", Side::Right)?, &zero);
    checks.push(mono.finish("kernel_bimonogenic", "left monogenic in u and right monogenic polynomial in v", 0.0));

    let d = basis.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.reverse();
    if d > 2 {
        order.swap(0, d / 2);
    }
    let permuted = zonal_kernel_gram_with_order(n, k, &order)?;
    let mut uniq = Acc::exact();
    uniq.poly(&permuted, &gram.zhat);
    checks.push(uniq.finish("kernel_basis_order_independent", "reproducing kernel of \\mathcal{M}_k", 0.0));

    let formula = zonal_kernel(n, k, KernelMethod::Formula)?;
    let mut fm = Acc::exact();
    fm.poly(&formula.zhat, &gram.zhat);
    let lambda = formula.rescale.as_ref().map(crate::scalar::rational_string).unwrap_or_default();
    checks.push(
        fm.finish("formula_matches_gram_after_rescale", "Z_k(u,v):=\\sum_\\sigma P_\\sigma(u)V_\\sigma(v)v", 0.0)
            .with_detail(format!("global rescale {lambda}")),
    );

    if k >= 1 {
        checks.extend(fundamental_checks(cfg, rng)?);
    }
    Ok(checks)
}

fn fundamental_checks(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (n, k) = (cfg.n, cfg.k);
    let anchor = "H_k(x,u,v):=\\frac{-1}{\\omega_n c_k}u\\frac{x}{\\|x\\|^n}Z_{k-1}(\\frac{xux}{\\|x\\|^2},v)v";
    let h = FundamentalSolution::new(n, k)?;
    let mut checks = Vec::new();
    if n == 3 && k == 1 {
        let val = h.eval(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0])?;
        let expect = Multivector::blade(3, 0b111, 3.0 / (16.0 * std::f64::consts::PI.powi(2)));
        let (ln, rn, err, _) = super::mv_compare(&val, &expect);
        checks.push(Check::from_norms("h1_reference_value", anchor, ln, rn, err, 1e-14));
    }
    let y: Vec<f64> = cfg.base_point.clone().unwrap_or_else(|| (0..n).map(|i| 0.1 * (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 }).collect());

    let mut harm = Acc::float();
    let mut lr = Acc::float();
    let mut scal = Acc::float();
    for _ in 0..10 {
        let r = rng.gen_range(0.5..2.0);
        let x: Vec<f64> = random_unit_f64(rng, n).iter().map(|c| c * r).collect();
        let p = h.partial(&x)?;
        let scale = p.max_coeff_abs();
        harm.values(0.0, scale, p.laplacian("u")?.max_coeff_abs());
        harm.values(0.0, scale, p.laplacian("v")?.max_coeff_abs());
        lr.poly(&h.partial_right(&x)?, &p);
        let x2: Vec<f64> = x.iter().map(|c| 2.0 * c).collect();
        scal.poly(&h.partial(&x2)?, &p.scale(&2f64.powi(1 - n as i32)));
    }
    checks.push(harm.finish("hk_harmonic_in_u_and_v", "harmonic, homogeneous degree of k in both u and v", 1e-12));
    checks.push(lr.finish("hk_left_and_right_representations_agree", "two representations of the solutions are equal", 1e-12));
    checks.push(scal.finish("hk_homogeneity_in_x", anchor, 1e-12));

    let step = 1e-4;
    let mut res = Acc::float();
    for _ in 0..50 {
        let r = rng.gen_range(0.5..2.0);
        let x0: Vec<f64> = random_unit_f64(rng, n).iter().zip(&y).map(|(c, yi)| yi + c * r).collect();
        let out = fundamental_solution_residual(&h, &x0, &y, step)?;
        res.values(out.max_coeff_abs(), 0.0, out.max_coeff_abs());
    }
    checks.push(res.finish("qk_annihilates_hk_fd", "H_k(x,u,v) is the fundamental solution to the Q_k operator", cfg.tol_or(1e-6)));

    // observed order of the central difference on a point where truncation dominates rounding
    let x0: Vec<f64> = y.iter().enumerate().map(|(i, c)| c + if i == 0 { 0.6 } else { 0.0 }).collect();
    let coarse = fundamental_solution_residual(&h, &x0, &y, 2e-3)?.max_coeff_abs();
    let fine = fundamental_solution_residual(&h, &x0, &y, 1e-3)?.max_coeff_abs();
    let order = (coarse / fine).log2();
    checks.push(
        Check::from_norms("hk_fd_second_order", "central differences, error O(h^2)", order, 2.0, (order - 2.0).abs(), 0.1)
            .with_detail(format!("residual {coarse:.3e} at h=2e-3, {fine:.3e} at h=1e-3")),
    );
    Ok(checks)
}

pub(super) fn monogenic_cauchy(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (n, k) = (cfg.n, cfg.k);
    let blocks = [("u", n)];
    let u = P::vector_var(n, &blocks, "u")?;
    let mut checks = Vec::new();
    let basis = monogenic_basis::<Q>(n, k)?.elements;
    let zero = P::zero(n, &[]);

    let mut direct = Acc::exact();
    for p in &basis {
        direct.poly(&sphere_mean(&u.pmul(p), "u")?, &zero);
    }
    checks.push(direct.finish("cauchy_on_unit_sphere", "\\int_{\\partial U}{n(u)f(u)d\\sigma(u)} = 0", 0.0));

    let mut rotated = Acc::exact();
    let mut dirac = Acc::exact();
    for _ in 0..5 {
        let nf = rng.gen_range(1..=3);
        let factors: Vec<_> = (0..nf).map(|_| Multivector::vector(n, &rational_unit_vector(rng, n))).collect();
        let a = PinElement::new(factors, 0.0)?;
        let mut mat = vec![vec![q(0); n]; n];
        for j in 0..n {
            let img = a.reflect(&Multivector::e(n, j + 1))?.vector_coords();
            for i in 0..n {
                mat[i][j] = img[i].clone();
            }
        }
        let at = a.product().rev();
        for p in &basis {
            let moved = p.affine_substitute("u", &mat, &vec![q(0); n])?;
            let g = moved.left_mul(&at);
            dirac.poly(&g.dirac("u", Side::Left)?, &P::zero(n, &blocks));
            // a n(w) ã F(a w ã) integrated over the sphere
            let an = u.affine_substitute("u", &mat, &vec![q(0); n])?;
            rotated.poly(&sphere_mean(&an.pmul(&moved), "u")?, &zero);
        }
    }
    checks.push(rotated.finish("cauchy_after_pin_change_of_variable", "\\int an(w)\\tilde{a}F(aw\\tilde{a})d\\sigma(w) = 0", 0.0));
    checks.push(dirac.finish("pin_pullback_monogenic", "D_a \\tilde{a}F(aw\\tilde{a}) = 0", 0.0));
    Ok(checks)
}
