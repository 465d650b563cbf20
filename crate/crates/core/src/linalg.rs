//! Dense exact linear algebra over `Rat` for the small systems used by the
//! geometry kernel.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::rat::Rat;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Rat>], ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : rows * x = 0}`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    match n {
        0 => Rat::one(),
        1 => a[0][0].clone(),
        2 => &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0],
        3 => {
            &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1])
                - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
                + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
        }
        _ => {
            let mut m = a.to_vec();
            let mut d = Rat::one();
            for c in 0..n {
                let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                    return Rat::zero();
                };
                if p != c {
                    m.swap(p, c);
                    d = -d;
                }
                d *= &m[c][c];
                let pivot_row = m[c].clone();
                for row in m.iter_mut().skip(c + 1) {
                    if !row[c].is_zero() {
                        let f = &row[c] / &pivot_row[c];
                        for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                            *x -= &f * y;
                        }
                    }
                }
            }
            d
        }
    }
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    if n <= 3 {
        let d = det(a);
        if d.is_zero() {
            return None;
        }
        // Cramer
        return Some(
            (0..n)
                .map(|j| {
                    let mj: Vec<Vec<Rat>> = a
                        .iter()
                        .zip(b)
                        .map(|(row, bi)| {
                            let mut r = row.clone();
                            r[j] = bi.clone();
                            r
                        })
                        .collect();
                    det(&mj) / &d
                })
                .collect(),
        );
    }
    let aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, n + 1);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

/// Integer matrix-vector product.
pub fn mat_vec_i64(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn det_i64(m: &[Vec<i64>]) -> Rat {
    let q: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&x| crate::rat::int(x)).collect())
        .collect();
    det(&q)
}

/// Integer determinant by Bareiss' fraction-free elimination.
pub fn det_int(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Generalized cross product of `dim - 1` integer vectors: the cofactor
/// vector orthogonal to all of them, zero iff they are dependent.
pub fn cofactor_vector(rows: &[&Vec<BigInt>], dim: usize) -> Vec<BigInt> {
    (0..dim)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = det_int(&minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Integer row `lambda (a, b)` with `lambda > 0` the least common denominator.
pub fn clear_denominators(a: &[Rat], b: &Rat) -> (Vec<BigInt>, BigInt) {
    let l = a.iter().chain([b]).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scale = |x: &Rat| x.numer() * (&l / x.denom());
    (a.iter().map(scale).collect(), scale(b))
}

/// Solution of the integer system `A x = c` as numerators over a common
/// positive denominator, `None` if `A` is singular.
pub fn solve_int(a: &[Vec<BigInt>], c: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let d = det_int(a);
    if d.is_zero() {
        return None;
    }
    let n = a.len();
    let mut nums: Vec<BigInt> = (0..n)
        .map(|j| {
            let mj: Vec<Vec<BigInt>> = a
                .iter()
                .zip(c)
                .map(|(row, ci)| {
                    let mut r = row.clone();
                    r[j] = ci.clone();
                    r
                })
                .collect();
            det_int(&mj)
        })
        .collect();
    if d.is_negative() {
        nums.iter_mut().for_each(|x| *x = -&*x);
        return Some((nums, -d));
    }
    Some((nums, d))
}
