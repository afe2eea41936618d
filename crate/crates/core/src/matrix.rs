//! Dense matrices over `Z/p^sZ`.

use crate::error::{Error, Result};
use crate::zmod::Modulus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
    modulus: Modulus,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: Modulus) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(n: usize, modulus: Modulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors, reducing every entry.
    pub fn from_rows(rows: Vec<Vec<i128>>, modulus: Modulus) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        let n = rows.len();
        let data = rows
            .into_iter()
            .flatten()
            .map(|v| modulus.reduce(v))
            .collect();
        Ok(Self {
            rows: n,
            cols,
            data,
            modulus,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = self.modulus.reduce(v);
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DegreeMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let m = self.modulus;
        let mut out = Self::zeros(self.rows, other.cols, m);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = m.add(out.data[idx], m.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        if v.len() != self.rows {
            return Err(Error::DegreeMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let m = self.modulus;
        let mut out = vec![0i128; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = m.add(*o, m.mul(a, self.get(i, j)));
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == (i == j) as i128))
    }

    /// Gauss-Jordan inversion. Each column needs a pivot that is a unit; one
    /// exists exactly when the matrix is invertible mod `p`.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DegreeMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let m = self.modulus;
        let mut a = self.clone();
        let mut inv = Self::identity(n, m);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| m.is_unit(a.get(r, col)))
                .ok_or(Error::NotAUnit)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let pinv = m.inv(a.get(col, col))?;
            a.scale_row(col, pinv);
            inv.scale_row(col, pinv);
            for r in 0..n {
                if r != col {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        a.add_row_multiple(r, col, -factor);
                        inv.add_row_multiple(r, col, -factor);
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Solves `u * self = target` for a row vector `u` of length `rows`,
    /// assuming `self` has full row rank mod `p`. Returns `None` when the
    /// system is inconsistent.
    pub fn solve_left(&self, target: &[i128]) -> Result<Option<Vec<i128>>> {
        if target.len() != self.cols {
            return Err(Error::DegreeMismatch {
                expected: self.cols,
                found: target.len(),
            });
        }
        // Transposed system selfᵀ uᵀ = targetᵀ, augmented with the target.
        let m = self.modulus;
        let (n, k) = (self.rows, self.cols);
        let mut aug = Self::zeros(k, n + 1, m);
        for i in 0..k {
            for j in 0..n {
                aug.set(i, j, self.get(j, i));
            }
            aug.set(i, n, target[i]);
        }
        for col in 0..n {
            let pivot = match (col..k).find(|&r| m.is_unit(aug.get(r, col))) {
                Some(r) => r,
                None => return Err(Error::NotAUnit),
            };
            aug.swap_rows(col, pivot);
            let pinv = m.inv(aug.get(col, col))?;
            aug.scale_row(col, pinv);
            for r in 0..k {
                if r != col {
                    let factor = aug.get(r, col);
                    if factor != 0 {
                        aug.add_row_multiple(r, col, -factor);
                    }
                }
            }
        }
        if (n..k).any(|r| aug.get(r, n) != 0) {
            return Ok(None);
        }
        Ok(Some((0..n).map(|i| aug.get(i, n)).collect()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: i128) {
        for j in 0..self.cols {
            let v = self.modulus.mul(self.get(r, j), c);
            self.data[r * self.cols + j] = v;
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: i128) {
        let m = self.modulus;
        for j in 0..self.cols {
            let v = m.add(self.get(dst, j), m.mul(c, self.get(src, j)));
            self.data[dst * self.cols + j] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_two_by_two_mod_four() {
        let m4 = Modulus::new(2, 2).unwrap();
        let m = ModMatrix::from_rows(vec![vec![1, 0], vec![1, 1]], m4).unwrap();
        let n = m.inverse().unwrap();
        assert_eq!(n.to_rows(), vec![vec![1, 0], vec![-1, 1]]);
        assert!(m.mul(&n).unwrap().is_identity());
    }

    #[test]
    fn singular_mod_p_is_rejected() {
        let m8 = Modulus::new(2, 3).unwrap();
        let m = ModMatrix::from_rows(vec![vec![2, 1], vec![4, 2]], m8).unwrap();
        assert_eq!(m.inverse(), Err(Error::NotAUnit));
    }

    #[test]
    fn solve_left_detects_inconsistency() {
        let m9 = Modulus::new(3, 2).unwrap();
        let p = ModMatrix::from_rows(vec![vec![1, 0, 1], vec![0, 1, 1]], m9).unwrap();
        assert_eq!(p.solve_left(&[2, 3, 5]).unwrap(), Some(vec![2, 3]));
        assert_eq!(p.solve_left(&[2, 3, 4]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn inverse_round_trip(entries in prop::collection::vec(-50i128..50, 16)) {
            let m = Modulus::new(5, 3).unwrap();
            let rows: Vec<Vec<i128>> = entries.chunks(4).map(<[i128]>::to_vec).collect();
            let a = ModMatrix::from_rows(rows, m).unwrap();
            if let Ok(inv) = a.inverse() {
                prop_assert!(a.mul(&inv).unwrap().is_identity());
                prop_assert!(inv.mul(&a).unwrap().is_identity());
            }
        }
    }
}
