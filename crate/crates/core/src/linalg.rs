//! Small dense linear algebra over a [`Field`].
//!
//! Matrices are immutable values: every operation returns a new matrix.

use std::fmt;
use std::ops::Index;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Field;

pub type Vector<F> = Vec<F>;

/// Largest supported side length.
pub const MAX_DIM: usize = 64;

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::Dimension(format!("unsupported shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        assert!(rows > 0 && cols > 0 && rows <= MAX_DIM && cols <= MAX_DIM);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| F::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { F::zero() })
    }

    pub fn column(v: &[F]) -> Self {
        Matrix::from_fn(v.len(), 1, |r, _| v[r].clone())
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

    pub fn try_get(&self, row: usize, col: usize) -> Result<&F> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(&self.data[row * self.cols + col])
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vector<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    fn check_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip(other, F::add))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip(other, F::sub))
    }

    fn zip(&self, other: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn neg(&self) -> Self {
        self.map(F::neg)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = F::zero();
                for k in 0..self.cols {
                    let a = &self[(r, k)];
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(&other[(k, c)]));
                }
                data.push(acc);
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vector<F>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "mul_vec: {}x{} by length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    /// Commutator `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add(&self[(i, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let x = &self[(r, c)];
                    if r == c {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)].sub(&self[(c, r)]).is_zero()))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (r..self.cols).all(|c| self[(r, c)].add(&self[(c, r)]).is_zero()))
    }

    /// Sum of squared entries.
    pub fn frobenius_sq(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, x| acc.add(&x.square()))
    }

    /// Entry-wise equality under the field's zero test.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.sub(b).is_zero())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let c0 = cols.start;
        let r0 = rows.start;
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self[(r0 + r, c0 + c)].clone())
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let candidates = (row..m.rows).filter(|&r| !m[(r, col)].is_zero());
            let pivot = if F::EXACT {
                candidates.min()
            } else {
                candidates.max_by(|&a, &b| {
                    m[(a, col)]
                        .magnitude()
                        .partial_cmp(&m[(b, col)].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
            };
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = m[(row, c)].mul(&inv);
                m.set(row, c, v);
            }
            m.set(row, col, F::one());
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = m[(r, c)].sub(&factor.mul(&m[(row, c)]));
                    m.set(r, c, v);
                }
                m.set(r, col, F::zero());
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vector<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = r[(i, f)].neg();
                }
                v
            })
            .collect()
    }

    /// Solves `self · x = b`; `Ok(None)` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vector<F>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "solve: {} rows, rhs length {}",
                self.rows,
                b.len()
            )));
        }
        if self.cols + 1 > MAX_DIM * 2 {
            return Err(Error::Dimension("system too wide".into()));
        }
        let aug = Matrix {
            rows: self.rows,
            cols: self.cols + 1,
            data: (0..self.rows)
                .flat_map(|r| self.row(r).iter().cloned().chain(std::iter::once(b[r].clone())))
                .collect(),
        };
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Ok(Some(x))
    }

    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::Dimension("det of non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = F::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(F::zero());
            };
            if p != col {
                m.swap_rows(col, p);
                det = det.neg();
            }
            let pivot = m[(col, col)].clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = m[(r, col)].mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m[(r, c)].sub(&factor.mul(&m[(col, c)]));
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                F::one()
            } else {
                F::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    /// Leading principal minors, top-left first.
    pub fn leading_minors(&self) -> Result<Vec<F>> {
        if !self.is_square() {
            return Err(Error::Dimension("minors of non-square matrix".into()));
        }
        (1..=self.rows).map(|k| self.submatrix(0..k, 0..k).det()).collect()
    }

    /// Symmetric with all leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self
                .leading_minors()
                .map(|m| m.iter().all(|x| x.signum() > 0))
                .unwrap_or(false)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (r, c): (usize, usize)) -> &F {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of range for {}x{} matrix",
            self.rows,
            self.cols
        );
        &self.data[r * self.cols + c]
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[r * self.cols + c])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serialized as a row-major nested array.
impl<F: Serialize> Serialize for Matrix<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[F]> = (0..self.rows)
            .map(|r| &self.data[r * self.cols..(r + 1) * self.cols])
            .collect();
        rows.serialize(serializer)
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Orthonormal coframe of a Gram matrix by Gram–Schmidt on the dual basis.
///
/// Returns the lower-triangular `L` with positive diagonal whose rows are the
/// coframe: `f^i = Σ_j L[i][j] e^j`, so that `gram = Lᵀ·L` (equivalently
/// `L·gram⁻¹·Lᵀ = Id`). This is the shape `f¹ = a₁e¹, f² = a₂f¹ + a₃e², …`.
///
/// In exact mode the diagonal entries are square roots; if one of them is
/// irrational the coframe does not exist over ℚ and
/// [`Error::IrrationalCoframe`] is returned.
pub fn orthonormal_coframe<F: Field>(gram: &Matrix<F>) -> Result<Matrix<F>> {
    if !gram.is_positive_definite() {
        return Err(Error::NotPositiveDefinite(
            "leading principal minors must all be positive".into(),
        ));
    }
    let n = gram.rows();
    // Cholesky of the dual Gram matrix H = gram⁻¹ = C·Cᵀ; then L = C⁻¹.
    let h = gram.inverse()?;
    let mut c = Matrix::<F>::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].clone();
        for k in 0..j {
            d = d.sub(&c[(j, k)].square());
        }
        let root = d.sqrt().ok_or_else(|| {
            Error::IrrationalCoframe(format!("pivot {} = {d} has no square root in the field", j + 1))
        })?;
        let inv = root.inv().ok_or(Error::Singular)?;
        c.set(j, j, root);
        for i in j + 1..n {
            let mut s = h[(i, j)].clone();
            for k in 0..j {
                s = s.sub(&c[(i, k)].mul(&c[(j, k)]));
            }
            c.set(i, j, s.mul(&inv));
        }
    }
    c.inverse()
}

/// Orthogonal matrix whose first column is the unit vector `x`
/// (a Householder reflection, rational whenever `x` is).
pub fn orthonormal_completion<F: Field>(x: &[F]) -> Result<Matrix<F>> {
    let n = x.len();
    if !dot(x, x).is_one() {
        return Err(Error::Parameter("completion needs a unit vector".into()));
    }
    let mut v: Vec<F> = x.iter().map(F::neg).collect();
    v[0] = v[0].add(&F::one());
    let vv = dot(&v, &v);
    if vv.is_zero() {
        return Ok(Matrix::identity(n));
    }
    let two_over = F::from_int(2).div(&vv).ok_or(Error::Singular)?;
    Ok(Matrix::from_fn(n, n, |r, c| {
        let id = if r == c { F::one() } else { F::zero() };
        id.sub(&two_over.mul(&v[r].mul(&v[c])))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Float, Q};

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn nullspace_of_zero_and_identity() {
        assert_eq!(Matrix::<Q>::zeros(3, 3).nullspace().len(), 3);
        assert!(Matrix::<Q>::identity(4).nullspace().is_empty());
    }

    #[test]
    fn nullspace_vectors_are_in_kernel() {
        let m = qm(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).unwrap().iter().all(Field::is_zero));
        }
        assert_eq!(Matrix::from_rows(ns).unwrap().rank(), 2);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = vec![q(1), q(-2), Q::ratio(1, 3)];
        assert_eq!(Matrix::identity(3).solve(&b).unwrap(), Some(b.clone()));
        let singular = qm(&[&[1, 1], &[1, 1]]);
        assert_eq!(singular.solve(&[q(1), q(2)]).unwrap(), None);
    }

    #[test]
    fn solve_homogeneous_rotation_system() {
        // λ·x34 − 3·x24 = 0, λ·x24 + 3·x34 = 0 with λ = 2; unknowns (x24, x34)
        let m = qm(&[&[-3, 2], &[2, 3]]);
        assert_eq!(m.solve(&[q(0), q(0)]).unwrap(), Some(vec![q(0), q(0)]));
        assert!(m.nullspace().is_empty());
    }

    #[test]
    fn dimension_errors() {
        let a = Matrix::<Q>::zeros(2, 3);
        assert!(a.mul(&a).is_err());
        assert!(a.add(&Matrix::zeros(3, 2)).is_err());
        assert!(a.solve(&[q(1)]).is_err());
        assert!(matches!(a.try_get(2, 0), Err(Error::OutOfRange { .. })));
        assert!(Matrix::<Q>::new(2, 2, vec![q(1)]).is_err());
        assert!(Matrix::<Q>::new(MAX_DIM + 1, 1, vec![q(0); MAX_DIM + 1]).is_err());
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn index_out_of_range_panics() {
        let a = Matrix::<Q>::zeros(2, 2);
        let _ = &a[(0, 2)];
    }

    #[test]
    fn inverse_and_det() {
        let m = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det().unwrap(), q(18));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert_eq!(qm(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn coframe_of_identity_and_diagonal() {
        assert!(orthonormal_coframe(&Matrix::<Q>::identity(4)).unwrap().is_identity());
        let l = orthonormal_coframe(&qm(&[&[4, 0], &[0, 1]])).unwrap();
        assert_eq!(l, qm(&[&[2, 0], &[0, 1]]));
    }

    #[test]
    fn coframe_reconstructs_gram_exactly() {
        let l0 = Matrix::from_rows(vec![
            vec![q(2), q(0), q(0), q(0)],
            vec![Q::ratio(1, 2), q(3), q(0), q(0)],
            vec![q(-1), Q::ratio(2, 3), Q::ratio(1, 2), q(0)],
            vec![q(4), q(-2), Q::ratio(5, 7), q(1)],
        ])
        .unwrap();
        let gram = l0.transpose().mul(&l0).unwrap();
        let l = orthonormal_coframe(&gram).unwrap();
        assert_eq!(l, l0);
        assert_eq!(l.transpose().mul(&l).unwrap(), gram);
        assert!(l
            .mul(&gram.inverse().unwrap())
            .unwrap()
            .mul(&l.transpose())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn coframe_rejects_non_spd_and_irrational() {
        assert!(matches!(
            orthonormal_coframe(&qm(&[&[1, 2], &[2, 1]])),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(matches!(
            orthonormal_coframe(&qm(&[&[2, 0], &[0, 1]])),
            Err(Error::IrrationalCoframe(_))
        ));
        // Float mode always has a coframe.
        let g = qm(&[&[2, 1], &[1, 3]]).map(|x| Float::from_q_tol(x, 1e-12));
        let l = orthonormal_coframe(&g).unwrap();
        assert!(l.transpose().mul(&l).unwrap().approx_eq(&g));
    }

    #[test]
    fn householder_completion_is_orthogonal() {
        let x = vec![Q::ratio(2, 3), Q::ratio(-1, 3), Q::ratio(2, 3)];
        let h = orthonormal_completion(&x).unwrap();
        assert_eq!(h.col(0), x);
        assert!(h.transpose().mul(&h).unwrap().is_identity());
        let e = vec![q(1), q(0), q(0)];
        assert!(orthonormal_completion(&e).unwrap().is_identity());
        assert!(orthonormal_completion(&[q(1), q(1), q(0)]).is_err());
    }
}
