//! Dense Gaussian elimination over exact or float scalars.

use crate::error::{Result, RsqError};
use crate::scalar::Scalar;

/// Tolerance for treating a float pivot as zero; exact scalars ignore it.
const FLOAT_PIVOT_TOL: f64 = 1e-11;

fn is_negligible<S: Scalar>(x: &S, scale: f64) -> bool {
    if S::EXACT {
        x.is_zero()
    } else {
        x.to_f64().abs() <= FLOAT_PIVOT_TOL * scale.max(1.0)
    }
}

/// Reduced row-echelon form in place; returns pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let scale = m.iter().flat_map(|r| r.iter().map(|x| x.to_f64().abs())).fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if S::EXACT {
            (r..rows).find(|&i| !m[i][c].is_zero())
        } else {
            (r..rows)
                .max_by(|&a, &b| m[a][c].to_f64().abs().total_cmp(&m[b][c].to_f64().abs()))
                .filter(|&i| !is_negligible(&m[i][c], scale))
        };
        let Some(p) = pick else { continue };
        m.swap(r, p);
        let inv = S::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..cols {
                let v = m[r][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &[Vec<S>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of {x : M x = 0} for an `rows × cols` matrix.
pub fn nullspace<S: Scalar>(m: &[Vec<S>], cols: usize) -> Vec<Vec<S>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![S::zero(); cols];
        v[free] = S::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves the square system A x = b.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(RsqError::Config("solve needs a square system".into()));
    }
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(RsqError::SingularSystem);
    }
    Ok(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Solves A X = B for several right-hand sides at once (columns of `rhs`).
pub fn solve_many<S: Scalar>(a: &[Vec<S>], rhs: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || rhs.iter().any(|b| b.len() != n) {
        return Err(RsqError::Config("solve needs a square system".into()));
    }
    let m = rhs.len();
    let mut aug: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(rhs.iter().map(|b| b[i].clone()));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(RsqError::SingularSystem);
    }
    Ok((0..m).map(|j| (0..n).map(|i| aug[i][n + j].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn exact_solve() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![Rational::from_ratio(4, 5), Rational::from_ratio(7, 5)]);
    }

    #[test]
    fn singular_detected() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(solve(&a, &[q(1), q(1)]), Err(RsqError::SingularSystem));
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn nullspace_annihilates() {
        let a = vec![vec![q(1), q(1), q(1)], vec![q(0), q(1), q(-1)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let s = row.iter().zip(&ns[0]).fold(q(0), |acc, (x, y)| acc + x.clone() * y.clone());
            assert_eq!(s, q(0));
        }
    }

    #[test]
    fn float_solve() {
        let a = vec![vec![1e-3, 1.0], vec![1.0, 1.0]];
        let x = solve(&a, &[1.0, 2.0]).unwrap();
        assert!((x[0] - 1.001_001).abs() < 1e-5 && (x[1] - 0.998_999).abs() < 1e-5);
    }
}
