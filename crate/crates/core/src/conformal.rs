//! Möbius transformations as Vahlen quadruples, conformal weights and the Cayley transform.

use serde_json::{json, Value};

use crate::clifford::Multivector;
use crate::error::{Result, RsqError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Translation,
    Dilation,
    Orthogonal,
    Inversion,
    Cayley,
    CayleyInverse,
    Custom,
}

/// (ax + b)(cx + d)^{-1}. `n` is the exponent used by the conformal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VahlenMap<S> {
    pub kind: MapKind,
    pub n: usize,
    pub a: Multivector<S>,
    pub b: Multivector<S>,
    pub c: Multivector<S>,
    pub d: Multivector<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    J,
    Jminus1,
}

fn grade_le1<S: Scalar>(m: &Multivector<S>, tol: f64) -> bool {
    m.coeffs().iter().enumerate().all(|(b, c)| b.count_ones() <= 1 || c.near(&S::zero(), tol))
}

fn versor_like<S: Scalar>(m: &Multivector<S>, tol: f64) -> bool {
    let p = m.gp(&m.rev());
    p.coeffs().iter().skip(1).all(|c| c.near(&S::zero(), tol))
}

impl<S: Scalar> VahlenMap<S> {
    /// Validates the quadruple. Products a·rev(b), c·rev(d), rev(b)·c, rev(d)·a must have grade ≤ 1 and
    /// a·rev(d) − b·rev(c) must be a nonzero real.
    pub fn new(
        kind: MapKind,
        n: usize,
        a: Multivector<S>,
        b: Multivector<S>,
        c: Multivector<S>,
        d: Multivector<S>,
        tol: f64,
    ) -> Result<Self> {
        let dim = a.dim();
        if [&b, &c, &d].iter().any(|m| m.dim() != dim) {
            return Err(RsqError::InvalidVahlen("entries live in different algebras".into()));
        }
        for (name, m) in [("a", &a), ("b", &b), ("c", &c), ("d", &d)] {
            if !versor_like(m, tol) {
                return Err(RsqError::InvalidVahlen(format!("{name} is not a product of vectors")));
            }
        }
        let pairs = [
            ("a rev(b)", a.gp(&b.rev())),
            ("c rev(d)", c.gp(&d.rev())),
            ("rev(b) c", b.rev().gp(&c)),
            ("rev(d) a", d.rev().gp(&a)),
        ];
        for (name, p) in &pairs {
            if !grade_le1(p, tol) {
                return Err(RsqError::InvalidVahlen(format!("{name} is not in R + R^n")));
            }
        }
        let m = VahlenMap { kind, n, a, b, c, d };
        let pd = m.pseudo_determinant();
        if pd.coeffs().iter().skip(1).any(|x| !x.near(&S::zero(), tol)) || pd.scalar_part().near(&S::zero(), tol) {
            return Err(RsqError::InvalidVahlen("pseudo-determinant is not a nonzero real".into()));
        }
        Ok(m)
    }

    pub fn pseudo_determinant(&self) -> Multivector<S> {
        self.a.gp(&self.d.rev()).sub(&self.b.gp(&self.c.rev()))
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn translation(n: usize, t: &[S]) -> Result<Self> {
        let one = Multivector::one(n);
        Self::new(MapKind::Translation, n, one.clone(), Multivector::vector(n, t), Multivector::zero(n), one, 0.0)
    }

    /// x ↦ λx via (s, 0, 0, 1/s) with s² = λ; `s` is passed directly.
    pub fn dilation(n: usize, s: S) -> Result<Self> {
        let a = Multivector::scalar(n, s.clone());
        let d = Multivector::scalar(n, S::one() / s);
        Self::new(MapKind::Dilation, n, a, Multivector::zero(n), Multivector::zero(n), d, 1e-12)
    }

    /// x ↦ a x ã for a product of unit vectors, via (a, 0, 0, ã^{-1}).
    pub fn orthogonal(n: usize, a: Multivector<S>) -> Result<Self> {
        let d = a.rev().versor_inverse()?;
        Self::new(MapKind::Orthogonal, n, a, Multivector::zero(n), Multivector::zero(n), d, 1e-12)
    }

    /// x ↦ x^{-1} via (0, 1, 1, 0).
    pub fn inversion(n: usize) -> Result<Self> {
        let one = Multivector::one(n);
        Self::new(MapKind::Inversion, n, Multivector::zero(n), one.clone(), one, Multivector::zero(n), 0.0)
    }

    /// Cayley transform ℝ^n → S^n over Cl_{n+1}: (e_{n+1}, 1, 1, e_{n+1}).
    pub fn cayley(n: usize) -> Result<Self> {
        let e = Multivector::e(n + 1, n + 1);
        let one = Multivector::one(n + 1);
        Self::new(MapKind::Cayley, n, e.clone(), one.clone(), one, e, 0.0)
    }

    /// Inverse Cayley transform: (−e_{n+1}, 1, 1, −e_{n+1}).
    pub fn cayley_inverse(n: usize) -> Result<Self> {
        let e = Multivector::e(n + 1, n + 1).neg();
        let one = Multivector::one(n + 1);
        Self::new(MapKind::CayleyInverse, n, e.clone(), one.clone(), one, e, 0.0)
    }

    /// Matrix product self ∘ other.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        let a = self.a.gp(&o.a).add(&self.b.gp(&o.c));
        let b = self.a.gp(&o.b).add(&self.b.gp(&o.d));
        let c = self.c.gp(&o.a).add(&self.d.gp(&o.c));
        let d = self.c.gp(&o.b).add(&self.d.gp(&o.d));
        Self::new(MapKind::Custom, self.n, a, b, c, d, 1e-10)
    }

    /// cx + d for a point x.
    pub fn denominator(&self, x: &[S]) -> Multivector<S> {
        let xv = Multivector::vector(self.dim(), x);
        self.c.gp(&xv).add(&self.d)
    }

    pub fn apply_mv(&self, x: &[S]) -> Result<Multivector<S>> {
        let xv = Multivector::vector(self.dim(), x);
        let den = self.denominator(x);
        if den.norm_sq().near(&S::zero(), 0.0) || den.norm_f64() < 1e-300 {
            return Err(RsqError::PointAtInfinity);
        }
        let inv = den.versor_inverse()?;
        Ok(self.a.gp(&xv).add(&self.b).gp(&inv))
    }

    /// (ax + b)(cx + d)^{-1} as a point with `dim` coordinates.
    pub fn apply(&self, x: &[S]) -> Result<Vec<S>> {
        let y = self.apply_mv(x)?;
        if !y.is_vector() && !(!S::EXACT && y.grade_part(1).sub(&y).is_zero_tol(1e-9 * y.norm_f64().max(1.0))) {
            return Err(RsqError::InvalidVahlen("image is not a vector".into()));
        }
        Ok(y.vector_coords())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "n": self.n,
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
            "d": self.d.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind: MapKind = serde_json::from_value(v["kind"].clone())?;
        let n = v["n"].as_u64().ok_or_else(|| RsqError::Parse("missing n".into()))? as usize;
        let get = |k: &str| Multivector::<S>::from_json(&v[k]);
        Self::new(kind, n, get("a")?, get("b")?, get("c")?, get("d")?, 1e-10)
    }
}

impl VahlenMap<f64> {
    /// J = rev(cx+d)/|cx+d|^n or J_{−1} = (cx+d)/|cx+d|^{n+2}.
    pub fn weight(&self, x: &[f64], kind: Weight) -> Result<Multivector<f64>> {
        let den = self.denominator(x);
        let r = den.norm_f64();
        if r < 1e-300 {
            return Err(RsqError::Singular("cx + d = 0".into()));
        }
        Ok(match kind {
            Weight::J => den.rev().scale(&r.powi(-(self.n as i32))),
            Weight::Jminus1 => den.scale(&r.powi(-(self.n as i32) - 2)),
        })
    }

    /// rev(cx+d)·w·(cx+d)/|cx+d|^2.
    pub fn transform_w(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        let den = self.denominator(x);
        let r2 = den.norm_sq();
        if r2 < 1e-300 {
            return Err(RsqError::Singular("cx + d = 0".into()));
        }
        let wv = Multivector::vector(self.dim(), w);
        Ok(den.rev().gp(&wv).gp(&den).scale(&(1.0 / r2)).vector_coords())
    }

    /// J(m,x)·f(m(x), rev(cx+d) w (cx+d)/|cx+d|^2).
    pub fn pullback<F>(&self, f: F, x: &[f64], w: &[f64]) -> Result<Multivector<f64>>
    where
        F: Fn(&[f64], &[f64]) -> Result<Multivector<f64>>,
    {
        let y = self.apply(x)?;
        let w2 = self.transform_w(x, w)?;
        Ok(self.weight(x, Weight::J)?.gp(&f(&y, &w2)?))
    }
}

/// C(x) for x ∈ ℝ^n; returns a point of S^n ⊂ ℝ^{n+1}.
pub fn cayley_forward(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let m = VahlenMap::<f64>::cayley(n)?;
    let mut p = x.to_vec();
    p.push(0.0);
    let y = m.apply(&p)?;
    renormalize(y)
}

/// C^{-1}(x_s) for x_s ∈ S^n \ {e_{n+1}}; returns a point of ℝ^n.
pub fn cayley_inverse(xs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len() - 1;
    check_on_sphere(xs)?;
    let pole: f64 = xs[..n].iter().map(|c| c * c).sum::<f64>() + (xs[n] - 1.0).powi(2);
    if pole.sqrt() < 1e-12 {
        return Err(RsqError::Singular("x_s at the pole e_{n+1}".into()));
    }
    let m = VahlenMap::<f64>::cayley_inverse(n)?;
    let y = m.apply(xs)?;
    Ok(y[..n].to_vec())
}

pub fn check_on_sphere(xs: &[f64]) -> Result<()> {
    let r = xs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (r - 1.0).abs() > 1e-12 {
        return Err(RsqError::OffSphere(r - 1.0));
    }
    Ok(())
}

fn renormalize(y: Vec<f64>) -> Result<Vec<f64>> {
    let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (r - 1.0).abs() >= 1e-10 {
        return Err(RsqError::OffSphere(r - 1.0));
    }
    Ok(y.iter().map(|c| c / r).collect())
}

/// J(C^{-1}, x_s) = (x_s − e_{n+1})/|x_s − e_{n+1}|^n.
pub fn cayley_inverse_weight_closed(xs: &[f64]) -> Multivector<f64> {
    let n = xs.len() - 1;
    let mut b = xs.to_vec();
    b[n] -= 1.0;
    let r = b.iter().map(|c| c * c).sum::<f64>().sqrt();
    Multivector::vector(n + 1, &b).scale(&r.powi(-(n as i32)))
}

/// u' = (y_s − e_{n+1}) u (y_s − e_{n+1})/|y_s − e_{n+1}|^2.
pub fn u_prime(ys: &[f64], u: &[f64]) -> Vec<f64> {
    let n = ys.len() - 1;
    let mut b = ys.to_vec();
    b[n] -= 1.0;
    let bv = Multivector::vector(n + 1, &b);
    let uv = Multivector::vector(n + 1, u);
    bv.gp(&uv).gp(&bv).scale(&(1.0 / bv.norm_sq())).vector_coords()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn translation_and_inversion() {
        let q = |a| Rational::from_i64(a);
        let t = VahlenMap::translation(3, &[q(1), q(2), q(3)]).unwrap();
        assert_eq!(t.apply(&[q(1), q(0), q(0)]).unwrap(), vec![q(2), q(2), q(3)]);
        let inv = VahlenMap::<Rational>::inversion(3).unwrap();
        assert_eq!(inv.apply(&[q(1), q(0), q(0)]).unwrap(), vec![q(-1), q(0), q(0)]);
        assert_eq!(inv.apply(&[q(0), q(0), q(0)]), Err(RsqError::PointAtInfinity));
        let tf = VahlenMap::<f64>::translation(3, &[1.0, 2.0, 3.0]).unwrap();
        let j = tf.weight(&[0.3, 0.1, 0.2], Weight::J).unwrap();
        assert_eq!(j, Multivector::one(3));
    }

    #[test]
    fn inversion_weight() {
        let inv = VahlenMap::<f64>::inversion(3).unwrap();
        let j = inv.weight(&[2.0, 0.0, 0.0], Weight::J).unwrap();
        assert!(j.max_abs_diff(&Multivector::e(3, 1).scale(&0.25)) < 1e-15);
    }

    #[test]
    fn rejects_bad_quadruple() {
        let one = Multivector::<f64>::one(3);
        let z = Multivector::<f64>::zero(3);
        assert!(VahlenMap::new(MapKind::Custom, 3, one.clone(), z.clone(), z.clone(), z.clone(), 1e-12).is_err());
        let e12 = Multivector::<f64>::blade(3, 0b11, 1.0);
        let mixed = one.add(&Multivector::e(3, 1)).add(&e12);
        assert!(VahlenMap::new(MapKind::Custom, 3, mixed, z.clone(), z, one, 1e-12).is_err());
    }

    #[test]
    fn cayley_examples() {
        let c0 = cayley_forward(&[0.0, 0.0, 0.0]).unwrap();
        assert!(dist(&c0, &[0.0, 0.0, 0.0, -1.0]) < 1e-15);
        let x = [0.3, -1.2, 2.0];
        let xs = cayley_forward(&x).unwrap();
        assert!((xs.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(dist(&cayley_inverse(&xs).unwrap(), &x) < 1e-12);
        assert!(matches!(cayley_inverse(&[0.0, 0.0, 0.0, 1.0]), Err(RsqError::Singular(_))));
        assert!(matches!(cayley_inverse(&[0.0, 0.0, 0.0, 1.1]), Err(RsqError::OffSphere(_))));
        let m = VahlenMap::<f64>::cayley_inverse(3).unwrap();
        let j = m.weight(&xs, Weight::J).unwrap();
        assert!(j.max_abs_diff(&cayley_inverse_weight_closed(&xs)) < 1e-14);
        assert_eq!(m.pseudo_determinant(), Multivector::scalar(4, -2.0));
    }

    #[test]
    fn weight_norms() {
        let inv = VahlenMap::<f64>::inversion(4).unwrap();
        let x = [0.3, -0.7, 0.2, 1.1];
        let r = inv.denominator(&x).norm_f64();
        assert!((inv.weight(&x, Weight::J).unwrap().norm_f64() - r.powi(-3)).abs() < 1e-13);
        assert!((inv.weight(&x, Weight::Jminus1).unwrap().norm_f64() - r.powi(-5)).abs() < 1e-13);
    }

    #[test]
    fn orthogonal_matches_iwasawa() {
        let y = Multivector::vector(3, &[0.6, 0.8, 0.0]);
        let m = VahlenMap::orthogonal(3, y.clone()).unwrap();
        let x = [0.1, 0.5, -0.3];
        let img = m.apply(&x).unwrap();
        let xv = Multivector::vector(3, &x);
        let direct = y.gp(&xv).gp(&y.rev());
        // c = 0: a x d^{-1} = ± a x ã
        let sign = if (img[0] - direct.vector_coords()[0]).abs() < 1e-12 { 1.0 } else { -1.0 };
        assert!(dist(&img, &direct.scale(&sign).vector_coords()) < 1e-14);
    }

    #[test]
    fn composition_acts_as_product() {
        let t = VahlenMap::<f64>::translation(3, &[0.5, 0.0, -1.0]).unwrap();
        let d = VahlenMap::<f64>::dilation(3, 2f64.sqrt()).unwrap();
        let x = [0.2, 0.4, 0.6];
        let td = t.compose(&d).unwrap();
        let lhs = t.apply(&d.apply(&x).unwrap()).unwrap();
        assert!(dist(&lhs, &td.apply(&x).unwrap()) < 1e-14);
    }

    #[test]
    fn u_prime_preserves_norm() {
        let ys = cayley_forward(&[0.4, 0.1, -0.3]).unwrap();
        let u = [0.2, -0.5, 0.7, 0.1];
        let up = u_prime(&ys, &u);
        let nu = u.iter().map(|c| c * c).sum::<f64>();
        assert!((up.iter().map(|c| c * c).sum::<f64>() - nu).abs() < 1e-14);
    }

    #[test]
    fn json_roundtrip() {
        let m = VahlenMap::<f64>::cayley(3).unwrap();
        assert_eq!(VahlenMap::<f64>::from_json(&m.to_json()).unwrap(), m);
    }
}
