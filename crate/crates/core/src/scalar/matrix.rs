use alloc::vec;
use alloc::vec::Vec;

use super::{Field, ScalarError};

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F: Field> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![field.zero(); rows * cols],
            field: field.clone(),
            rows,
            cols,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self, ScalarError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ScalarError::Ragged);
        }
        let n = rows.len();
        Ok(Matrix {
            field: field.clone(),
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from integer entries; convenient for tests and fixtures.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, data).expect("rectangular literal")
    }

    /// `rows x columns.len()` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                if !field.is_zero(x) {
                    m.data[i * m.cols + j] = x.clone();
                }
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F::Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F::Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !self.field.is_zero(x) {
                    t.data[j * self.rows + i] = x.clone();
                }
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Result<Matrix<F>, ScalarError> {
        if self.cols != rhs.rows {
            return Err(ScalarError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            let (lo, hi) = (i * rhs.cols, (i + 1) * rhs.cols);
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                f.axpy(&mut out.data[lo..hi], a, rhs.row(k));
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(x) {
                        acc = f.add(&acc, &f.mul(a, x));
                    }
                }
                acc
            })
            .collect()
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix<F>) -> Result<Matrix<F>, ScalarError> {
        if self.rows != rhs.rows {
            return Err(ScalarError::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(rhs.row(i));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        Rref { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate on the smaller orientation
        if self.rows > self.cols {
            self.transpose().rref().rank()
        } else {
            self.rref().rank()
        }
    }

    /// Gauss-Jordan elimination. The pivot of each column is the first
    /// nonzero entry at or below the current row, so the output depends only
    /// on the input.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in c..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            f.scale(&mut self.data[r * cols + c..(r + 1) * cols], &inv);
            for i in 0..rows {
                if i == r || f.is_zero(self.get(i, c)) {
                    continue;
                }
                let factor = f.neg(self.get(i, c));
                let (pivot_row, other) = if i < r {
                    let (a, b) = self.data.split_at_mut(r * cols);
                    (&b[c..cols], &mut a[i * cols + c..(i + 1) * cols])
                } else {
                    let (a, b) = self.data.split_at_mut(i * cols);
                    (&a[r * cols + c..(r + 1) * cols], &mut b[c..cols])
                };
                f.axpy(other, &factor, pivot_row);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right null space, one column per free variable in
    /// increasing column order; the free variable itself carries a 1.
    pub fn kernel_basis(&self) -> Matrix<F> {
        let f = &self.field;
        let Rref { reduced, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                let x = reduced.get(row, fc);
                if !f.is_zero(x) {
                    k.set(pc, j, f.neg(x));
                }
            }
        }
        k
    }

    /// The null space as a [`Subspace`] whose coordinates are read off at the
    /// free columns.
    pub fn kernel_subspace(&self) -> Subspace<F> {
        let k = self.kernel_basis();
        let Rref { pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        Subspace {
            ambient: self.cols,
            basis: k.columns(),
            pivots: (0..self.cols).filter(|&c| !is_pivot[c]).collect(),
        }
    }

    /// Solves `self * x = b`; free variables are set to zero. `Ok(None)`
    /// means the system is inconsistent.
    pub fn solve(&self, b: &Matrix<F>) -> Result<Option<Matrix<F>>, ScalarError> {
        if self.rows != b.rows {
            return Err(ScalarError::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: b.shape(),
            });
        }
        let f = &self.field;
        let n = self.cols;
        let aug = self.hstack(b)?.rref();
        if aug.pivots.last().is_some_and(|&p| p >= n) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(f, n, b.cols);
        for (row, &pc) in aug.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, aug.reduced.get(row, n + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix<F> {
        let mut m = Matrix::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.data[i * cols.len() + j] = self.get(i, c).clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix<F> {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field.clone(),
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Canonical free-variable-zero solution of `a x = b` for a single vector.
pub fn solve_vec<F: Field>(a: &Matrix<F>, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>, ScalarError> {
    let rhs = Matrix::from_columns(a.field(), b.len(), &[b.to_vec()]);
    Ok(a.solve(&rhs)?.map(|x| x.column(0)))
}

/// Basis of a subspace in which basis vector `i` is 1 at `pivots[i]` and 0 at
/// every other pivot, so coordinates of a member are read off at the pivots.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    pub ambient: usize,
    pub basis: Vec<Vec<F::Elem>>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    /// Reduced echelon basis of the span.
    pub fn span(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        if vectors.is_empty() {
            return Subspace {
                ambient,
                basis: Vec::new(),
                pivots: Vec::new(),
            };
        }
        let m = Matrix::from_rows(field, vectors.to_vec()).expect("equal-length vectors");
        let Rref { reduced, pivots } = m.rref();
        let basis = (0..pivots.len()).map(|i| reduced.row(i).to_vec()).collect();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = field.zeros(ambient);
                e[i] = field.one();
                e
            })
            .collect();
        Subspace {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// Coordinates without the membership check.
    pub fn coordinates_unchecked(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_matrix(&self, field: &F) -> Matrix<F> {
        Matrix::from_columns(field, self.ambient, &self.basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in this basis, or `None` when `v` is not a member.
    pub fn coordinates(&self, field: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let coords: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            field.axpy(&mut rest, &field.neg(c), b);
        }
        field.is_zero_vec(&rest).then_some(coords)
    }

    /// Reduces `v` modulo the subspace; the result vanishes at every pivot.
    pub fn reduce(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut rest = v.to_vec();
        for (p, b) in self.pivots.iter().zip(&self.basis) {
            if !field.is_zero(&rest[*p]) {
                let c = field.neg(&rest[*p]);
                field.axpy(&mut rest, &c, b);
            }
        }
        rest
    }

    /// Positions that are not pivots: a canonical complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals};

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn rref_of_empty_matrix() {
        let m = Matrix::zeros(&f7(), 0, 0);
        let r = m.rref();
        assert_eq!(r.rank(), 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let f = PrimeField::new(5).unwrap();
        let id = Matrix::identity(&f, 3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.rank(), 3);
    }

    #[test]
    fn rref_of_rank_one_matrix() {
        let f = f7();
        let m = Matrix::from_i64(&f, &[&[1, 2], &[2, 4]]);
        let r = m.rref();
        assert_eq!(r.reduced, Matrix::from_i64(&f, &[&[1, 2], &[0, 0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let f = f7();
        assert_eq!(Matrix::identity(&f, 4).kernel_basis().cols(), 0);
        let k = Matrix::zeros(&f, 2, 3).kernel_basis();
        assert_eq!(k, Matrix::identity(&f, 3));
    }

    #[test]
    fn kernel_over_rationals() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[&[1, 2]]);
        let k = m.kernel_basis();
        assert_eq!(k, Matrix::from_i64(&q, &[&[-2], &[1]]));
    }

    #[test]
    fn solve_cases() {
        let f = PrimeField::new(5).unwrap();
        let b = Matrix::from_i64(&f, &[&[1, 4], &[3, 0]]);
        assert_eq!(Matrix::identity(&f, 2).solve(&b).unwrap(), Some(b.clone()));

        let q = Rationals;
        let a = Matrix::from_i64(&q, &[&[1], &[1]]);
        let b = Matrix::from_i64(&q, &[&[1], &[2]]);
        assert_eq!(a.solve(&b).unwrap(), None);

        let a = Matrix::from_i64(&f, &[&[2]]);
        let b = Matrix::from_i64(&f, &[&[1]]);
        assert_eq!(a.solve(&b).unwrap(), Some(Matrix::from_i64(&f, &[&[3]])));
    }

    #[test]
    fn solve_dimension_mismatch_is_an_error() {
        let f = f7();
        let a = Matrix::zeros(&f, 2, 2);
        let b = Matrix::zeros(&f, 3, 1);
        assert!(matches!(
            a.solve(&b),
            Err(ScalarError::DimensionMismatch { op: "solve", .. })
        ));
    }

    #[test]
    fn subspace_coordinates() {
        let f = f7();
        let s = Subspace::span(&f, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(s.dim(), 2);
        let v = vec![2, 5, 3];
        let c = s.coordinates(&f, &v).unwrap();
        let mut back = vec![0; 3];
        for (ci, b) in c.iter().zip(&s.basis) {
            f.axpy(&mut back, ci, b);
        }
        assert_eq!(back, v);
        assert!(s.coordinates(&f, &[1, 0, 0]).is_none());
    }
}
