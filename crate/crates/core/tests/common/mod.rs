//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own lattice or matrix code.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn big_rows(rows: &[Vec<i128>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact Gram-Schmidt: returns `(mu, |b*_i|^2)`.
pub fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let r = basis.len();
    let b: Vec<Vec<BigRational>> = basis.iter().map(|row| row.iter().map(rat).collect()).collect();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(r);
    let mut norms: Vec<BigRational> = Vec::with_capacity(r);
    let mut mu = vec![vec![BigRational::zero(); r]; r];
    for i in 0..r {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot_q(&b[i], &star[j]) / &norms[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &mu[i][j] * sk;
            }
        }
        norms.push(dot_q(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

pub fn is_size_reduced(mu: &[Vec<BigRational>]) -> bool {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    (0..mu.len()).all(|i| (0..i).all(|j| mu[i][j].abs() <= half))
}

pub fn lovasz_holds(mu: &[Vec<BigRational>], norms: &[BigRational], delta: &BigRational) -> bool {
    (1..norms.len()).all(|k| {
        let m = &mu[k][k - 1];
        norms[k] >= (delta - m * m) * &norms[k - 1]
    })
}

/// Row-echelon form over Q; returns `(echelon rows, pivot columns)`.
fn echelon(rows: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let q: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(rat).collect()).collect();
    echelon(&q).0.len()
}

fn det_q(m: &[Vec<BigRational>]) -> BigRational {
    let mut a = m.to_vec();
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            let pivot_row = a[c].clone();
            for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    det
}

fn inverse_q(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row = m[i].clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let (e, piv) = echelon(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(
        e.iter()
            .enumerate()
            .map(|(i, row)| row[n..].iter().map(|x| x / &row[i]).collect())
            .collect(),
    )
}

/// `T` with `to = T · from` when both have full row rank and span the same
/// rational space; verified exactly on every column.
pub fn transform(from: &[Vec<BigInt>], to: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let f: Vec<Vec<BigRational>> = from.iter().map(|r| r.iter().map(rat).collect()).collect();
    let t: Vec<Vec<BigRational>> = to.iter().map(|r| r.iter().map(rat).collect()).collect();
    if f.len() != t.len() {
        return None;
    }
    let (_, piv) = echelon(&f);
    if piv.len() != f.len() {
        return None;
    }
    let sub = |m: &[Vec<BigRational>]| -> Vec<Vec<BigRational>> {
        m.iter().map(|r| piv.iter().map(|&c| r[c].clone()).collect()).collect()
    };
    let s_inv = inverse_q(&sub(&f))?;
    let ts = sub(&t);
    let r = f.len();
    let tm: Vec<Vec<BigRational>> = (0..r)
        .map(|i| (0..r).map(|j| (0..r).map(|k| &ts[i][k] * &s_inv[k][j]).sum()).collect())
        .collect();
    let cols = f[0].len();
    for i in 0..r {
        for c in 0..cols {
            let v: BigRational = (0..r).map(|k| &tm[i][k] * &f[k][c]).sum();
            if v != t[i][c] {
                return None;
            }
        }
    }
    Some(tm)
}

pub fn is_unimodular(t: &[Vec<BigRational>]) -> bool {
    t.iter().all(|r| r.iter().all(BigRational::is_integer)) && det_q(t).abs().is_one()
}

/// Squared length of a shortest nonzero lattice vector, by Fincke-Pohst
/// enumeration over the given (not necessarily reduced) basis. Float
/// Gram-Schmidt drives the search; the reported norm is an exact integer.
pub fn shortest_norm2(basis: &[Vec<i128>]) -> i128 {
    let r = basis.len();
    let bf: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    let mut star: Vec<Vec<f64>> = Vec::new();
    let mut bn = vec![0.0; r];
    let mut mu = vec![vec![0.0; r]; r];
    for i in 0..r {
        let mut v = bf[i].clone();
        for j in 0..i {
            mu[i][j] = bf[i].iter().zip(&star[j]).map(|(a, b)| a * b).sum::<f64>() / bn[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        bn[i] = v.iter().map(|x| x * x).sum();
        star.push(v);
    }
    let exact = |x: &[i128]| -> i128 {
        let cols = basis[0].len();
        (0..cols)
            .map(|c| (0..r).map(|i| x[i] * basis[i][c]).sum::<i128>())
            .map(|v| v * v)
            .sum()
    };
    let mut best = basis.iter().map(|v| v.iter().map(|x| x * x).sum::<i128>()).min().unwrap_or(0);
    let mut x = vec![0i128; r];

    fn walk(
        i: usize,
        partial: f64,
        x: &mut Vec<i128>,
        mu: &[Vec<f64>],
        bn: &[f64],
        best: &mut i128,
        exact: &dyn Fn(&[i128]) -> i128,
    ) {
        let r = bn.len();
        let c: f64 = -(i + 1..r).map(|j| x[j] as f64 * mu[j][i]).sum::<f64>();
        let room = (*best as f64) * (1.0 + 1e-9) + 1e-6 - partial;
        if room < 0.0 {
            return;
        }
        let w = (room / bn[i]).sqrt();
        let lo = (c - w).ceil() as i128;
        let hi = (c + w).floor() as i128;
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - c;
            let p = partial + d * d * bn[i];
            if i == 0 {
                if x.iter().any(|&t| t != 0) {
                    let n2 = exact(x);
                    if n2 > 0 && n2 < *best {
                        *best = n2;
                    }
                }
            } else {
                walk(i - 1, p, x, mu, bn, best, exact);
            }
        }
        x[i] = 0;
    }

    if r > 0 {
        walk(r - 1, 0.0, &mut x, &mu, &bn, &mut best, &exact);
    }
    best
}

/// Schoolbook `a·b mod (F, q)` on plain coefficient vectors; `big_f` monic,
/// ascending, degree `n`.
pub fn naive_mulmod(a: &[i128], b: &[i128], big_f: &[i128], q: i128) -> Vec<i128> {
    let n = big_f.len() - 1;
    let mut prod = vec![0i128; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y).rem_euclid(q);
        }
    }
    for d in (n..prod.len()).rev() {
        let lead = prod[d];
        if lead != 0 {
            for i in 0..=n {
                prod[d - n + i] = (prod[d - n + i] - lead * big_f[i]).rem_euclid(q);
            }
        }
    }
    prod.resize(n, 0);
    prod
}

/// `g(a)` in `(Z/q)[x]/(F)` by Horner's rule, residues in `[0, q)`.
pub fn naive_eval(g: &[i128], a: &[i128], big_f: &[i128], q: i128) -> Vec<i128> {
    let n = big_f.len() - 1;
    let mut acc = vec![0i128; n];
    for &c in g.iter().rev() {
        acc = naive_mulmod(&acc, a, big_f, q);
        acc[0] = (acc[0] + c).rem_euclid(q);
    }
    acc
}

/// Decides whether `c ≡ uP (mod q)` has a solution, `q = p^s`, using the
/// first set of columns of `P` (an `n × k` matrix) that is invertible mod
/// `p`. Returns `None` when `P` has no such column set.
pub fn in_row_space_mod(p_rows: &[Vec<i128>], c: &[i128], p: i128, q: i128) -> Option<bool> {
    let n = p_rows.len();
    let k = c.len();
    // pick pivot columns greedily by elimination mod p
    let mut cols = Vec::new();
    let mut basis: Vec<Vec<i128>> = Vec::new();
    for j in 0..k {
        let mut v: Vec<i128> = (0..n).map(|i| p_rows[i][j].rem_euclid(p)).collect();
        for b in &basis {
            let lead = b.iter().position(|&x| x != 0).unwrap();
            let f = v[lead] * modinv(b[lead], p) % p;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = (*vi - f * bi).rem_euclid(p);
            }
        }
        if v.iter().any(|&x| x != 0) {
            basis.push(v);
            cols.push(j);
            if cols.len() == n {
                break;
            }
        }
    }
    if cols.len() < n {
        return None;
    }
    // solve u · P_J = c_J mod q by Gauss-Jordan on the transposed system
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|r| {
            let mut row: Vec<i128> = (0..n).map(|i| p_rows[i][cols[r]].rem_euclid(q)).collect();
            row.push(c[cols[r]].rem_euclid(q));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] % p != 0)?;
        a.swap(col, piv);
        let inv = modinv(a[col][col], q);
        for x in a[col].iter_mut() {
            *x = (*x * inv).rem_euclid(q);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = (*x - f * y).rem_euclid(q);
                }
            }
        }
    }
    let u: Vec<i128> = (0..n).map(|r| a[r][n]).collect();
    Some((0..k).all(|j| {
        let v: i128 = (0..n).map(|i| u[i] * p_rows[i][j]).sum::<i128>();
        (v - c[j]).rem_euclid(q) == 0
    }))
}

fn modinv(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r, 1, "not invertible");
    old_s.rem_euclid(m)
}
