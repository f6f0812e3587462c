//! Lie algebras given by structure constants, and invariant forms on them.
//!
//! Brackets are `[e_i, e_j] = Σ_k c^k_{ij} e_k`. On invariant forms the
//! exterior derivative is the Chevalley–Eilenberg differential
//!
//! ```text
//! dα(X_0, …, X_p) = Σ_{i<j} (−1)^{i+j} α([X_i, X_j], X_0, …, X̂_i, …, X̂_j, …, X_p)
//! ```
//!
//! so that `dα(X, Y) = −α([X, Y])` for 1-forms and `de^k = −Σ_{i<j} c^k_{ij} e^{ij}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Field, Q};

pub const MAX_LIE_DIM: usize = 6;

#[derive(Clone, PartialEq)]
pub struct LieAlgebra<F> {
    dim: usize,
    // c[(i * dim + j) * dim + k] = c^k_{ij}
    c: Vec<F>,
}

impl<F: Field> std::fmt::Debug for LieAlgebra<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieAlgebra(dim={}", self.dim)?;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = self.bracket_basis(i, j);
                if v.iter().any(|x| !x.is_zero()) {
                    write!(f, ", [e{},e{}]={:?}", i + 1, j + 1, v)?;
                }
            }
        }
        write!(f, ")")
    }
}

impl<F: Field> LieAlgebra<F> {
    pub fn abelian(dim: usize) -> Result<Self> {
        Self::from_brackets(dim, &[])
    }

    /// Builds the algebra from `(i, j, k, c^k_{ij})` with 0-based indices and
    /// `i < j`; the `(j, i)` entries are filled in by antisymmetry.
    pub fn from_brackets(dim: usize, entries: &[(usize, usize, usize, F)]) -> Result<Self> {
        if dim == 0 || dim > MAX_LIE_DIM {
            return Err(Error::InvalidAlgebra(format!(
                "dimension {dim} outside 1..={MAX_LIE_DIM}"
            )));
        }
        let mut c = vec![F::zero(); dim * dim * dim];
        let mut seen = std::collections::BTreeSet::new();
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket index ({}, {}, {}) out of range",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if i >= j {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket entries need i < j, got ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            if !seen.insert((i, j, k)) {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate entry for c^{}_{{{}{}}}",
                    k + 1,
                    i + 1,
                    j + 1
                )));
            }
            c[(i * dim + j) * dim + k] = v.clone();
            c[(j * dim + i) * dim + k] = v.neg();
        }
        Ok(LieAlgebra { dim, c })
    }

    /// Brackets dual to structure equations `de^k = Σ_{i<j} s^k_{ij} e^{ij}`,
    /// i.e. `c^k_{ij} = −s^k_{ij}`.
    pub fn from_structure_equations(differentials: &[InvariantForm<F>]) -> Result<Self> {
        let dim = differentials.len();
        let mut entries = Vec::new();
        for (k, de) in differentials.iter().enumerate() {
            if de.degree() != 2 || de.dim() != dim {
                return Err(Error::InvalidAlgebra(format!(
                    "de^{} must be a 2-form in dimension {dim}",
                    k + 1
                )));
            }
            for (idx, (i, j)) in pairs(dim).into_iter().enumerate() {
                let v = &de.coeffs()[idx];
                if !v.is_zero() {
                    entries.push((i, j, k, v.neg()));
                }
            }
        }
        Self::from_brackets(dim, &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &F {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector<F> {
        (0..self.dim)
            .map(|k| self.structure_constant(i, j, k).clone())
            .collect()
    }

    pub fn bracket(&self, x: &[F], y: &[F]) -> Vector<F> {
        let n = self.dim;
        let mut out = vec![F::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let xy = x[i].mul(&y[j]);
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        *o = o.add(&xy.mul(c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(e_i)`, columns indexed by the input basis vector.
    pub fn ad(&self, i: usize) -> Matrix<F> {
        Matrix::from_fn(self.dim, self.dim, |k, j| self.structure_constant(i, j, k).clone())
    }

    /// `Ok(())` if Jacobi holds exactly, otherwise the first violating triple.
    pub fn jacobi_check(&self) -> Result<()> {
        let n = self.dim;
        let e = |i: usize| basis_vector::<F>(n, i);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.bracket(&self.bracket_basis(i, j), &e(k));
                    let b = self.bracket(&self.bracket_basis(j, k), &e(i));
                    let c = self.bracket(&self.bracket_basis(k, i), &e(j));
                    if (0..n).any(|m| !a[m].add(&b[m]).add(&c[m]).is_zero()) {
                        return Err(Error::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.dim).all(|i| self.ad(i).trace().is_zero())
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(F::is_zero)
    }

    /// The same algebra in the basis `f_a = Σ_j P[j][a] e_j` (columns of `p`).
    pub fn change_basis(&self, p: &Matrix<F>) -> Result<Self> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(Error::Dimension("change of basis must be square".into()));
        }
        let pinv = p.inverse()?;
        let cols: Vec<Vector<F>> = (0..n).map(|a| p.col(a)).collect();
        let mut c = vec![F::zero(); n * n * n];
        for a in 0..n {
            for b in a + 1..n {
                let v = pinv.mul_vec(&self.bracket(&cols[a], &cols[b]))?;
                for (m, x) in v.into_iter().enumerate() {
                    c[(b * n + a) * n + m] = x.neg();
                    c[(a * n + b) * n + m] = x;
                }
            }
        }
        Ok(LieAlgebra { dim: n, c })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LieAlgebra<G> {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(f).collect(),
        }
    }

    /// `de^k` for every basis 1-form.
    pub fn structure_equations(&self) -> Vec<InvariantForm<F>> {
        (0..self.dim)
            .map(|k| exterior_d(self, &InvariantForm::basis(self.dim, &[k])).expect("degree 1 < dim"))
            .collect()
    }

    /// Nonzero `(i, j, k, c^k_{ij})` with `i < j`.
    pub fn bracket_entries(&self) -> Vec<(usize, usize, usize, F)> {
        let mut out = Vec::new();
        for (i, j) in pairs(self.dim) {
            for k in 0..self.dim {
                let v = self.structure_constant(i, j, k);
                if !v.is_zero() {
                    out.push((i, j, k, v.clone()));
                }
            }
        }
        out
    }
}

pub fn basis_vector<F: Field>(n: usize, i: usize) -> Vector<F> {
    (0..n).map(|k| if k == i { F::one() } else { F::zero() }).collect()
}

/// Strictly increasing index tuples of length `k` from `0..n`, lexicographic.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The 2-form index pairs `(0,1), (0,2), …` in the canonical order 12, 13, 14, 23, 24, 34.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    multi_indices(n, 2).into_iter().map(|v| (v[0], v[1])).collect()
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &[usize]) -> Option<(i8, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// A left-invariant exterior form, stored by its coefficients on `e^{i₁…i_p}`
/// for strictly increasing multi-indices in lexicographic order.
#[derive(Clone, PartialEq)]
pub struct InvariantForm<F> {
    dim: usize,
    degree: usize,
    coeffs: Vec<F>,
}

impl<F: Field> std::fmt::Debug for InvariantForm<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = multi_indices(self.dim, self.degree)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| {
                let label: String = idx.iter().map(|i| (i + 1).to_string()).collect();
                format!("{c}·e^{label}")
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<F: Field> InvariantForm<F> {
    pub fn new(dim: usize, degree: usize, coeffs: Vec<F>) -> Result<Self> {
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let expected = multi_indices(dim, degree).len();
        if coeffs.len() != expected {
            return Err(Error::Dimension(format!(
                "a {degree}-form in dimension {dim} has {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(InvariantForm { dim, degree, coeffs })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let n = multi_indices(dim, degree).len();
        InvariantForm {
            dim,
            degree,
            coeffs: vec![F::zero(); n],
        }
    }

    /// `e^{i₁} ∧ … ∧ e^{i_p}` for 0-based indices in any order.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut form = Self::zero(dim, idx.len());
        if let Some((sign, sorted)) = sort_sign(idx) {
            let pos = multi_indices(dim, idx.len())
                .iter()
                .position(|m| *m == sorted)
                .expect("indices in range");
            form.coeffs[pos] = F::from_int(sign as i64);
        }
        form
    }

    /// 2-form with matrix `ω_{ij} = ω(e_i, e_j)`; the matrix must be antisymmetric.
    pub fn from_matrix(m: &Matrix<F>) -> Result<Self> {
        if !m.is_square() || !m.is_antisymmetric() {
            return Err(Error::Parameter("2-form matrix must be antisymmetric".into()));
        }
        let coeffs = pairs(m.rows()).into_iter().map(|(i, j)| m[(i, j)].clone()).collect();
        Self::new(m.rows(), 2, coeffs)
    }

    /// Antisymmetric matrix of a 2-form.
    pub fn to_matrix(&self) -> Result<Matrix<F>> {
        if self.degree != 2 {
            return Err(Error::Parameter("only 2-forms have a matrix".into()));
        }
        let mut rows = vec![vec![F::zero(); self.dim]; self.dim];
        for ((i, j), v) in pairs(self.dim).into_iter().zip(&self.coeffs) {
            rows[i][j] = v.clone();
            rows[j][i] = v.neg();
        }
        Matrix::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    /// Value on basis vectors `(e_{i₁}, …, e_{i_p})`.
    pub fn eval_basis(&self, idx: &[usize]) -> F {
        assert_eq!(idx.len(), self.degree);
        match sort_sign(idx) {
            None => F::zero(),
            Some((sign, sorted)) => {
                let pos = multi_indices(self.dim, self.degree)
                    .iter()
                    .position(|m| *m == sorted)
                    .expect("indices in range");
                let v = self.coeffs[pos].clone();
                if sign < 0 {
                    v.neg()
                } else {
                    v
                }
            }
        }
    }

    /// Value on arbitrary vectors, by multilinear expansion.
    pub fn eval(&self, vectors: &[Vector<F>]) -> F {
        assert_eq!(vectors.len(), self.degree);
        let mut acc = F::zero();
        let n = self.dim;
        let total = n.pow(self.degree as u32);
        for flat in 0..total {
            let mut idx = Vec::with_capacity(self.degree);
            let mut rem = flat;
            for _ in 0..self.degree {
                idx.push(rem % n);
                rem /= n;
            }
            let mut w = F::one();
            for (v, &i) in vectors.iter().zip(&idx) {
                w = w.mul(&v[i]);
                if w.is_zero() {
                    break;
                }
            }
            if w.is_zero() {
                continue;
            }
            acc = acc.add(&w.mul(&self.eval_basis(&idx)));
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Dimension("adding forms of different type".into()));
        }
        Ok(InvariantForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn scale(&self, s: &F) -> Self {
        InvariantForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension("wedge of forms in different dimensions".into()));
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let left = multi_indices(self.dim, self.degree);
        let right = multi_indices(self.dim, other.degree);
        let mut out = Self::zero(self.dim, degree);
        let targets = multi_indices(self.dim, degree);
        for (a, ca) in left.iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in right.iter().zip(&other.coeffs) {
                if cb.is_zero() {
                    continue;
                }
                let joined: Vec<usize> = a.iter().chain(b).copied().collect();
                if let Some((sign, sorted)) = sort_sign(&joined) {
                    let pos = targets.iter().position(|m| *m == sorted).expect("in range");
                    let term = ca.mul(cb);
                    out.coeffs[pos] = if sign < 0 {
                        out.coeffs[pos].sub(&term)
                    } else {
                        out.coeffs[pos].add(&term)
                    };
                }
            }
        }
        Ok(out)
    }
}

/// Exterior derivative of an invariant form.
pub fn exterior_d<F: Field>(g: &LieAlgebra<F>, form: &InvariantForm<F>) -> Result<InvariantForm<F>> {
    let n = g.dim();
    if form.dim() != n {
        return Err(Error::Dimension("form and algebra dimensions differ".into()));
    }
    let p = form.degree();
    if p + 1 > n {
        return Err(Error::DegreeOverflow { degree: p + 1, dim: n });
    }
    let coeffs = multi_indices(n, p + 1)
        .into_iter()
        .map(|x| {
            let mut acc = F::zero();
            for i in 0..=p {
                for j in i + 1..=p {
                    let rest: Vec<usize> = x
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| *t != i && *t != j)
                        .map(|(_, &v)| v)
                        .collect();
                    let br = g.bracket_basis(x[i], x[j]);
                    let mut term = F::zero();
                    for (k, ck) in br.iter().enumerate() {
                        if ck.is_zero() {
                            continue;
                        }
                        let mut idx = Vec::with_capacity(p);
                        idx.push(k);
                        idx.extend_from_slice(&rest);
                        term = term.add(&ck.mul(&form.eval_basis(&idx)));
                    }
                    acc = if (i + j) % 2 == 0 {
                        acc.add(&term)
                    } else {
                        acc.sub(&term)
                    };
                }
            }
            acc
        })
        .collect();
    InvariantForm::new(n, p + 1, coeffs)
}

/// Matrix of `d` from `degree`-forms to `(degree+1)`-forms in the lexicographic bases.
pub fn exterior_d_matrix<F: Field>(g: &LieAlgebra<F>, degree: usize) -> Result<Matrix<F>> {
    let n = g.dim();
    let src = multi_indices(n, degree);
    let images: Vec<InvariantForm<F>> = src
        .iter()
        .map(|idx| exterior_d(g, &InvariantForm::basis(n, idx)))
        .collect::<Result<_>>()?;
    let rows = multi_indices(n, degree + 1).len();
    Ok(Matrix::from_fn(rows, src.len(), |r, c| images[c].coeffs()[r].clone()))
}

/// JSON layout: `{"dim": n, "brackets": [{"i","j","k","value"}]}` with
/// 1-based indices, `i < j`, and `value = c^k_{ij}` as a rational string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub brackets: Vec<BracketJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Q,
}

impl From<&LieAlgebra<Q>> for AlgebraJson {
    fn from(g: &LieAlgebra<Q>) -> Self {
        AlgebraJson {
            dim: g.dim(),
            brackets: g
                .bracket_entries()
                .into_iter()
                .map(|(i, j, k, value)| BracketJson {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    value,
                })
                .collect(),
        }
    }
}

impl TryFrom<&AlgebraJson> for LieAlgebra<Q> {
    type Error = Error;

    fn try_from(js: &AlgebraJson) -> Result<Self> {
        let entries: Vec<_> = js
            .brackets
            .iter()
            .map(|b| {
                if b.i == 0 || b.j == 0 || b.k == 0 {
                    return Err(Error::InvalidAlgebra("indices are 1-based".into()));
                }
                Ok((b.i - 1, b.j - 1, b.k - 1, b.value.clone()))
            })
            .collect::<Result<_>>()?;
        LieAlgebra::from_brackets(js.dim, &entries)
    }
}
