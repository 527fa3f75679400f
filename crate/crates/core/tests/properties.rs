use proptest::prelude::*;

use rsq_core::clifford::Multivector;
use rsq_core::conformal::{cayley_forward, cayley_inverse};
use rsq_core::kernels::{reproduce, zonal_kernel, FundamentalSolution, KernelMethod};
use rsq_core::poly::{MultiPoly, Side};
use rsq_core::scalar::{Rational, Scalar};
use rsq_core::spaces::{almansi_fischer, harmonic_basis, monogenic_basis, project, Projection};

type M = Multivector<Rational>;
type P = MultiPoly<Rational>;

fn mv(dim: usize, c: &[i64]) -> M {
    let coeffs = (0..1usize << dim).map(|i| Rational::from_i64(c[i % c.len()] - 3 * (i as i64 % 2))).collect();
    M::from_coeffs(dim, coeffs).unwrap()
}

fn ints(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

/// Random Clifford-valued combination of the harmonic basis in `u`.
fn harmonic_combo(n: usize, k: usize, c: &[i64]) -> P {
    let basis = harmonic_basis::<Rational>(n, k, n, "u").unwrap().elements;
    let mut h = P::zero(n, &[("u", n)]);
    for (i, b) in basis.iter().enumerate() {
        let a = mv(n, &c[i % c.len()..]);
        h = h.add(&b.left_mul(&a));
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(m in 1usize..=5, a in ints(8), b in ints(8), c in ints(8)) {
        let (a, b, c) = (mv(m, &a), mv(m, &b), mv(m, &c));
        prop_assert_eq!(a.gp(&b).gp(&c), a.gp(&b.gp(&c)));
    }

    #[test]
    fn reversion_and_conjugation_reverse_products(m in 1usize..=5, a in ints(8), b in ints(8)) {
        let (a, b) = (mv(m, &a), mv(m, &b));
        let ab = a.gp(&b);
        prop_assert_eq!(ab.rev(), b.rev().gp(&a.rev()));
        prop_assert_eq!(ab.conj(), b.conj().gp(&a.conj()));
        prop_assert_eq!(a.rev().rev(), a.clone());
    }

    #[test]
    fn vectors_square_to_minus_norm(m in 1usize..=6, v in ints(6)) {
        let x: Vec<Rational> = (0..m).map(|i| Rational::from_i64(v[i])).collect();
        let xv = M::vector(m, &x);
        let sq: Rational = x.iter().map(|t| t * t).sum();
        prop_assert_eq!(xv.gp(&xv), M::scalar(m, -sq));
    }

    #[test]
    fn split_reconstructs_and_left_part_is_monogenic(nk in (3usize..=4, 1usize..=3), c in ints(12)) {
        let (n, k) = nk;
        let h = harmonic_combo(n, k, &c);
        let (pk, pkm1) = almansi_fischer(&h, "u").unwrap();
        prop_assert_eq!(pk.add(&pkm1.vector_embed("u", Side::Left).unwrap()), h);
        prop_assert!(pk.dirac("u", Side::Left).unwrap().is_zero());
        prop_assert!(pkm1.dirac("u", Side::Left).unwrap().is_zero());
    }

    #[test]
    fn projections_are_idempotent_and_complementary(nk in (3usize..=4, 1usize..=3), c in ints(12)) {
        let (n, k) = nk;
        let h = harmonic_combo(n, k, &c);
        for side in [Side::Left, Side::Right] {
            let p = project(&h, "u", Projection::Pk, side).unwrap();
            let q = project(&h, "u", Projection::IminusPk, side).unwrap();
            prop_assert_eq!(project(&p, "u", Projection::Pk, side).unwrap(), p.clone());
            prop_assert!(project(&q, "u", Projection::Pk, side).unwrap().is_zero());
            prop_assert_eq!(p.add(&q), h.clone());
        }
    }

    #[test]
    fn cayley_round_trip(x in prop::collection::vec(-20.0f64..20.0, 3..=5)) {
        let xs = cayley_forward(&x).unwrap();
        let r: f64 = xs.iter().map(|t| t * t).sum::<f64>().sqrt();
        prop_assert!((r - 1.0).abs() < 1e-12);
        let back = cayley_inverse(&xs).unwrap();
        let scale = 1.0 + x.iter().map(|t| t * t).sum::<f64>();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fundamental_solution_is_homogeneous(
        k in 1usize..=2,
        x in prop::collection::vec(-2.0f64..2.0, 3),
        u in prop::collection::vec(-1.0f64..1.0, 3),
        v in prop::collection::vec(-1.0f64..1.0, 3),
        t in 0.3f64..3.0,
        s in 0.3f64..3.0,
    ) {
        prop_assume!(x.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let n = 3;
        let h = FundamentalSolution::new(n, k).unwrap();
        let base = h.eval(&x, &u, &v).unwrap();
        let sc = |w: &[f64], f: f64| w.iter().map(|a| a * f).collect::<Vec<_>>();
        let tx = h.eval(&sc(&x, t), &u, &v).unwrap();
        let su = h.eval(&x, &sc(&u, s), &sc(&v, s)).unwrap();
        let bound = 1e-10 * (1.0 + base.norm_f64());
        let t_deg = t.powi(1 - n as i32);
        prop_assert!(tx.max_abs_diff(&base.scale(&t_deg)) <= bound * t_deg.max(1.0));
        let s_deg = s.powi(2 * k as i32);
        prop_assert!(su.max_abs_diff(&base.scale(&s_deg)) <= bound * s_deg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_reproduces_random_combinations(nk in (3usize..=4, 1usize..=2), c in ints(16)) {
        let (n, k) = nk;
        let z = zonal_kernel(n, k, KernelMethod::Gram).unwrap();
        let basis = monogenic_basis::<Rational>(n, k).unwrap().elements;
        let mut p = P::zero(n, &[("u", n)]);
        for (i, b) in basis.iter().enumerate() {
            p = p.add(&b.right_mul(&mv(n, &c[i % c.len()..])));
        }
        prop_assert_eq!(reproduce(&z.zhat, &p).unwrap(), p);
    }
}
