//! Dense matrices over the coefficient rings, with division-free determinants
//! and characteristic polynomials (Berkowitz) so they work over affinoid rings too.

use crate::coeff::{CoeffError, Coefficient, PadicScalar, Ring};

pub mod eigen;

pub use eigen::{isolated_eigenpair, isolated_root, residual_digits, solve, EigenError, EigenPair, NewtonPolygon, Segment};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type PadicMatrix = Matrix<PadicScalar>;

impl<T: Coefficient> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(like: &T, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| like.zero_like())
    }

    pub fn identity(like: &T, n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { like.one_like() } else { like.zero_like() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible matrix shapes");
        let zero = self.data.first().or(other.data.first()).expect("nonempty matrix").zero_like();
        Self::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(other.get(k, c)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = v[0].zero_like();
                for (k, x) in v.iter().enumerate() {
                    acc = acc.add(&self.get(r, k).mul(x));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Coefficients c_0..c_n of det(x·1 − A) = Σ c_k x^k, by Berkowitz's algorithm.
    pub fn charpoly(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let one = self.data.first().map(|x| x.one_like());
        let Some(one) = one else {
            return Vec::new();
        };
        let zero = one.zero_like();
        // Coefficients stored highest degree first while building.
        let mut poly = vec![one.clone()];
        for k in 0..n {
            // Leading principal block of size k+1: A_kk, row R, column C, block M.
            let a_kk = self.get(k, k).clone();
            let r_row: Vec<T> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let c_col: Vec<T> = (0..k).map(|i| self.get(i, k).clone()).collect();
            // Toeplitz column: 1, −a_kk, −R C, −R M C, −R M² C, …
            let mut toeplitz = vec![one.clone(), zero.sub(&a_kk)];
            let mut v = c_col;
            for _ in 0..k {
                let rv = r_row.iter().zip(&v).fold(zero.clone(), |acc, (a, b)| acc.add(&a.mul(b)));
                toeplitz.push(zero.sub(&rv));
                v = (0..k)
                    .map(|i| (0..k).fold(zero.clone(), |acc, j| acc.add(&self.get(i, j).mul(&v[j]))))
                    .collect();
            }
            let mut next = vec![zero.clone(); poly.len() + 1];
            for (i, t) in toeplitz.iter().enumerate().take(k + 2) {
                for (j, c) in poly.iter().enumerate() {
                    if i + j < next.len() {
                        next[i + j] = next[i + j].add(&t.mul(c));
                    }
                }
            }
            poly = next;
        }
        poly.reverse();
        poly
    }

    pub fn det(&self) -> T {
        let n = self.rows;
        let cp = self.charpoly();
        let c0 = cp[0].clone();
        if n.is_multiple_of(2) {
            c0
        } else {
            c0.zero_like().sub(&c0)
        }
    }

    /// Inverse via Cayley–Hamilton; needs a unit determinant.
    pub fn inverse(&self) -> Result<Self, CoeffError> {
        let n = self.rows;
        let cp = self.charpoly();
        // A^{-1} = −(A^{n−1} + c_{n−1}A^{n−2} + … + c_1) / c_0.
        let like = &self.data[0];
        let mut acc = Self::identity(like, n);
        for k in (1..n).rev() {
            acc = acc.mul(self).add(&Self::identity(like, n).scale(&cp[k]));
        }
        let c0_inv = cp[0].try_inverse()?;
        Ok(acc.scale(&c0_inv.zero_like().sub(&c0_inv)))
    }
}

impl PadicMatrix {
    pub fn from_ints(ring: &Ring, rows: usize, cols: usize, values: &[i64]) -> Self {
        Self::from_vec(rows, cols, values.iter().map(|&v| PadicScalar::from_int(ring, v)).collect())
    }

    pub fn ring(&self) -> &Ring {
        self.data[0].ring()
    }

    /// Smallest p-divisibility among the entries.
    pub fn p_divisibility(&self) -> u32 {
        self.data.iter().map(|x| x.p_divisibility()).min().unwrap_or(0)
    }

    pub fn eq_mod(&self, other: &Self, k: u32) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a.eq_mod(b, k))
    }

    /// LDU factorisation A = L·D·U with L lower unipotent, D diagonal, U upper unipotent;
    /// exists over the ring when every leading principal minor is a unit.
    pub fn ldu(&self) -> Option<(Self, Vec<PadicScalar>, Self)> {
        let n = self.rows;
        let ring = self.ring().clone();
        let one = PadicScalar::one(&ring);
        let mut work = self.clone();
        let mut lower = Self::identity(&one, n);
        let mut diag = Vec::with_capacity(n);
        for k in 0..n {
            let pivot = work.get(k, k).clone();
            let inv = pivot.unit_inverse().ok()?;
            for r in k + 1..n {
                let f = work.get(r, k).mul(&inv);
                lower.set(r, k, f.clone());
                for c in k..n {
                    let v = work.get(r, c).sub(&f.mul(work.get(k, c)));
                    work.set(r, c, v);
                }
            }
            diag.push(pivot);
        }
        let mut upper = Self::identity(&one, n);
        for (k, d) in diag.iter().enumerate() {
            let inv = d.unit_inverse().ok()?;
            for c in k + 1..n {
                upper.set(k, c, work.get(k, c).mul(&inv));
            }
        }
        Some((lower, diag, upper))
    }

    pub fn is_upper_triangular_mod_p(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| self.get(r, c).p_divisibility() >= 1))
    }

    pub fn diagonal(ring: &Ring, values: &[PadicScalar]) -> Self {
        let n = values.len();
        let zero = PadicScalar::zero(ring);
        Self::from_fn(n, n, |r, c| if r == c { values[r].clone() } else { zero.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ring_make;

    #[test]
    fn charpoly_and_det_of_small_matrix() {
        let r = ring_make(5, 6, 1, 0, 0).unwrap();
        let a = PadicMatrix::from_ints(&r, 2, 2, &[1, 2, 3, 4]);
        let cp = a.charpoly();
        // x² − 5x − 2
        assert_eq!(cp, vec![PadicScalar::from_int(&r, -2), PadicScalar::from_int(&r, -5), PadicScalar::one(&r)]);
        assert_eq!(a.det(), PadicScalar::from_int(&r, -2));
        let b = PadicMatrix::from_ints(&r, 3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 1]);
        assert_eq!(b.det(), PadicScalar::from_int(&r, 2 + (1 - 3)));
    }

    #[test]
    fn inverse_round_trip() {
        let r = ring_make(3, 8, 1, 0, 0).unwrap();
        let a = PadicMatrix::from_ints(&r, 3, 3, &[1, 3, 5, 0, 2, 7, 3, 1, 1]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), PadicMatrix::identity(&PadicScalar::one(&r), 3));
    }

    #[test]
    fn ldu_reconstructs() {
        let r = ring_make(3, 8, 1, 0, 0).unwrap();
        let a = PadicMatrix::from_ints(&r, 3, 3, &[2, 1, 4, 3, 5, 1, 6, 1, 7]);
        let (l, d, u) = a.ldu().unwrap();
        let dm = PadicMatrix::diagonal(&r, &d);
        assert_eq!(l.mul(&dm).mul(&u), a);
    }
}
