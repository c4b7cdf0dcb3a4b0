//! Exact dense linear algebra over the rationals.
//!
//! Ranks and determinants use fraction-free (Bareiss) elimination on
//! integer-scaled rows; echelon forms and null spaces use rational
//! Gauss-Jordan elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;
pub type Matrix = Vec<Vec<Scalar>>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(s: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| s * x).collect()
}

/// `acc += s * a`
pub fn axpy(acc: &mut [Scalar], s: &Scalar, a: &[Scalar]) {
    if s.is_zero() {
        return;
    }
    for (x, y) in acc.iter_mut().zip(a) {
        if !y.is_zero() {
            *x += &(s * y);
        }
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut s = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = zero_vec(n);
            for (k, x) in row.iter().enumerate() {
                axpy(&mut out, x, &b[k]);
            }
            out
        })
        .collect()
}

pub fn transpose(m: &Matrix, ncols: usize) -> Matrix {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| unit_vec(n, i)).collect()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vector], ncols: usize) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        if !inv.is_one() {
            for x in m[r].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = -&m[i][c];
                axpy(&mut m[i], &f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Basis of `{x : M x = 0}` where `M` has `ncols` columns.
pub fn nullspace(rows: &[Vector], ncols: usize) -> Matrix {
    let (r, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vec(ncols);
        v[free] = Scalar::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -&row[free];
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `M x = b`, if one exists.
pub fn solve(rows: &[Vector], b: &[Scalar], ncols: usize) -> Option<Vector> {
    let aug: Matrix = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = zero_vec(ncols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend(unit_vec(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn integer_rows(rows: &[Vector]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Rank by fraction-free Gaussian elimination.
pub fn rank(rows: &[Vector], ncols: usize) -> usize {
    let mut m = integer_rows(rows);
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let piv_row = &head[r];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                for j in c + 1..ncols {
                    if !row[j].is_zero() {
                        row[j] = &row[j] * &piv_row[c] / &prev;
                    }
                }
                continue;
            }
            let f = row[c].clone();
            for j in c + 1..ncols {
                row[j] = (&row[j] * &piv_row[c] - &f * &piv_row[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = head[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant by fraction-free elimination.
pub fn det(m: &Matrix) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    // Track the row scalings applied to clear denominators.
    let mut scale = Scalar::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m {
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale = scale * Scalar::from_big(l.clone(), BigInt::one()).expect("nonzero");
        a.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
    }
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Scalar::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = Scalar::from_big(a[n - 1][n - 1].clone() * sign, BigInt::one()).expect("nonzero");
    d / scale
}

/// All leading principal minors strictly positive.
pub fn is_positive_definite(m: &Matrix) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let sub: Matrix = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        det(&sub).is_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| s(x)).collect())
            .collect()
    }

    #[test]
    fn rank_matches_rref() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        assert_eq!(rref(&a, 3).1.len(), 2);
        let b = m(&[&[0, 0], &[0, 0]]);
        assert_eq!(rank(&b, 2), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let a = vec![
            vec![Scalar::frac(1, 2), Scalar::frac(1, 3)],
            vec![Scalar::frac(3, 2), Scalar::one()],
        ];
        assert_eq!(rank(&a, 2), 1);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&[&[1, 2, 3, 4], &[0, 1, 1, 0]]);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(is_zero_vec(&mat_vec(&a, v)));
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), s(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(is_positive_definite(&a));
        let sing = m(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&sing).is_none());
        assert_eq!(det(&sing), Scalar::zero());
        let swap = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&swap), s(-1));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[s(3), s(1)], 2).unwrap();
        assert_eq!(x, vec![s(2), s(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[s(1), s(3)], 2).is_none());
    }
}
