//! Riemannian curvature of left-invariant metrics.
//!
//! Conventions (see `docs/CONVENTIONS.md`):
//!
//! * `∇_{e_i} e_j = Σ_k Γ^k_{ij} e_k`; a connection is stored as the matrices
//!   `A_i = (Γ^k_{ij})_{kj}` of `∇_{e_i}` acting on left-invariant fields.
//! * `R_{X,Y} = −[∇_X, ∇_Y] + ∇_{[X,Y]}` and `R_{ijkl} = g(R_{e_i,e_j} e_k, e_l)`,
//!   so `R(X,Y,X,Y)` is the sectional curvature of an orthonormal pair.
//! * `Ric_{jk} = Σ g^{il} R_{ijlk}`, `s = g^{jk} Ric_{jk}`.
//! * The curvature operator on 2-forms has entries `R_{ijkl}` in an
//!   orthonormal basis `f^{ij}` (`i<j`), so its trace is `s/2` and its
//!   diagonal Λ± blocks are `W± + (s/12) Id`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{multi_indices, pairs, LieAlgebra};
use crate::linalg::{dot, orthonormal_coframe, Matrix, Vector};
use crate::scalar::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn from_sign(sign: i64) -> Result<Orientation> {
        match sign {
            1 => Ok(Orientation::Positive),
            -1 => Ok(Orientation::Negative),
            other => Err(Error::Parameter(format!("orientation must be +1 or -1, got {other}"))),
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

/// A left-invariant metric: SPD Gram matrix `g_{ij} = g(e_i, e_j)` and an
/// orientation relative to `e¹∧…∧eⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFrame<F> {
    gram: Matrix<F>,
    gram_inv: Matrix<F>,
    orientation: Orientation,
    coframe: Option<Matrix<F>>,
}

impl<F: Field> MetricFrame<F> {
    pub fn new(gram: Matrix<F>, orientation: Orientation) -> Result<Self> {
        if !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(format!("{gram:?}")));
        }
        let coframe = match orthonormal_coframe(&gram) {
            Ok(l) => Some(l),
            Err(Error::IrrationalCoframe(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(MetricFrame {
            gram_inv: gram.inverse()?,
            gram,
            orientation,
            coframe,
        })
    }

    /// Metric making the rows of `coframe` orthonormal: `gram = Lᵀ·L`.
    pub fn from_coframe(coframe: Matrix<F>, orientation: Orientation) -> Result<Self> {
        if !coframe.is_square() {
            return Err(Error::Dimension("coframe must be square".into()));
        }
        if coframe.det()?.is_zero() {
            return Err(Error::Singular);
        }
        let gram = coframe.transpose().mul(&coframe)?;
        Ok(MetricFrame {
            gram_inv: gram.inverse()?,
            gram,
            orientation,
            coframe: Some(coframe),
        })
    }

    pub fn identity(n: usize) -> Self {
        MetricFrame {
            gram: Matrix::identity(n),
            gram_inv: Matrix::identity(n),
            orientation: Orientation::Positive,
            coframe: Some(Matrix::identity(n)),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &Matrix<F> {
        &self.gram_inv
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        MetricFrame {
            orientation,
            ..self.clone()
        }
    }

    pub fn flipped(&self) -> Self {
        self.with_orientation(self.orientation.flipped())
    }

    /// Rows are an orthonormal coframe in the `e^j` basis.
    pub fn coframe(&self) -> Result<&Matrix<F>> {
        self.coframe
            .as_ref()
            .ok_or_else(|| Error::IrrationalCoframe("Gram matrix has no rational orthonormal coframe".into()))
    }

    /// Columns are the orthonormal frame `f_a` dual to [`MetricFrame::coframe`].
    pub fn frame(&self) -> Result<Matrix<F>> {
        self.coframe()?.inverse()
    }

    /// Orientation of `f¹∧…∧fⁿ` relative to the stored orientation.
    pub fn frame_orientation(&self) -> Result<i8> {
        Ok(self.orientation.sign() * self.coframe()?.det()?.signum())
    }

    /// Homothety `g ↦ c²g`.
    pub fn scaled(&self, c: &F) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Parameter("scale factor must be nonzero".into()));
        }
        let c2 = c.square();
        Ok(MetricFrame {
            gram: self.gram.scale(&c2),
            gram_inv: self.gram_inv.scale(&c2.inv().expect("nonzero")),
            orientation: self.orientation,
            coframe: self.coframe.as_ref().map(|l| l.scale(c)),
        })
    }

    pub fn inner(&self, x: &[F], y: &[F]) -> F {
        dot(x, &self.gram.mul_vec(y).expect("dimension"))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> MetricFrame<G> {
        MetricFrame {
            gram: self.gram.map(f),
            gram_inv: self.gram_inv.map(f),
            orientation: self.orientation,
            coframe: self.coframe.as_ref().map(|l| l.map(f)),
        }
    }
}

/// A left-invariant connection.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<F> {
    a: Vec<Matrix<F>>,
}

impl<F: Field> Connection<F> {
    pub fn new(a: Vec<Matrix<F>>) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Dimension("connection matrices must be n x n".into()));
        }
        Ok(Connection { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Matrix of `∇_{e_i}`.
    pub fn matrix(&self, i: usize) -> &Matrix<F> {
        &self.a[i]
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.a
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &F {
        &self.a[i][(k, j)]
    }

    /// `∇_X` for an arbitrary left-invariant `X`.
    pub fn along(&self, x: &[F]) -> Matrix<F> {
        let n = self.dim();
        x.iter()
            .zip(&self.a)
            .filter(|(c, _)| !c.is_zero())
            .fold(Matrix::zeros(n, n), |acc, (c, m)| {
                acc.add(&m.scale(c)).expect("same shape")
            })
    }

    /// `T(e_i, e_j) − [e_i, e_j] = 0` is checked as `Γ^k_{ij} − Γ^k_{ji} = c^k_{ij}`.
    pub fn is_torsion_free(&self, g: &LieAlgebra<F>) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    self.gamma(i, j, k)
                        .sub(self.gamma(j, i, k))
                        .sub(g.structure_constant(i, j, k))
                        .is_zero()
                })
            })
        })
    }

    /// Torsion `T(e_i, e_j) = ∇_{e_i}e_j − ∇_{e_j}e_i − [e_i, e_j]`.
    pub fn torsion(&self, g: &LieAlgebra<F>, i: usize, j: usize) -> Vector<F> {
        (0..self.dim())
            .map(|k| {
                self.gamma(i, j, k)
                    .sub(self.gamma(j, i, k))
                    .sub(g.structure_constant(i, j, k))
            })
            .collect()
    }

    /// `g(A_i X, Y) + g(X, A_i Y) = 0` for all `i`.
    pub fn is_metric(&self, gram: &Matrix<F>) -> bool {
        self.a.iter().all(|m| {
            let gm = gram.mul(m).expect("dimension");
            gm.transpose().add(&gm).expect("dimension").is_zero()
        })
    }

    /// `∇J = 0`, i.e. every `A_i` commutes with `J`.
    pub fn preserves(&self, j: &Matrix<F>) -> bool {
        self.a.iter().all(|m| m.commutator(j).expect("dimension").is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> Connection<G> {
        Connection {
            a: self.a.iter().map(|m| m.map(f)).collect(),
        }
    }
}

/// Levi-Civita connection from the Koszul formula for left-invariant fields:
/// `2g(∇_X Y, Z) = g([X,Y],Z) − g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita<F: Field>(g: &LieAlgebra<F>, m: &MetricFrame<F>) -> Result<Connection<F>> {
    let n = g.dim();
    if m.dim() != n {
        return Err(Error::Dimension("metric and algebra dimensions differ".into()));
    }
    let gram = m.gram();
    // b[i][j][l] = g([e_i, e_j], e_l)
    let mut b = vec![F::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                b[(i * n + j) * n + l] = (0..n).fold(F::zero(), |acc, k| {
                    acc.add(&g.structure_constant(i, j, k).mul(&gram[(k, l)]))
                });
            }
        }
    }
    let bb = |i: usize, j: usize, l: usize| &b[(i * n + j) * n + l];
    let ginv = m.gram_inv();
    let mats = (0..n)
        .map(|i| {
            Matrix::from_fn(n, n, |k, j| {
                let mut acc = F::zero();
                for l in 0..n {
                    let gi = &ginv[(k, l)];
                    if gi.is_zero() {
                        continue;
                    }
                    let koszul = bb(i, j, l).sub(bb(j, l, i)).add(bb(l, i, j));
                    acc = acc.add(&gi.mul(&koszul));
                }
                acc.half()
            })
        })
        .collect();
    Connection::new(mats)
}

/// A tensor with four covariant indices, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct FourTensor<F> {
    dim: usize,
    data: Vec<F>,
}

pub type RiemannTensor<F> = FourTensor<F>;

impl<F: Field> FourTensor<F> {
    pub fn zeros(dim: usize) -> Self {
        FourTensor {
            dim,
            data: vec![F::zero(); dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        FourTensor { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &F {
        &self.data[self.idx(i, j, k, l)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn sub(&self, other: &Self) -> Self {
        FourTensor {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        FourTensor {
            dim: self.dim,
            data: self.data.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data.iter().zip(&other.data).all(|(a, b)| a.sub(b).is_zero())
    }

    /// Multilinear evaluation on four vectors.
    pub fn eval(&self, x: &[F], y: &[F], z: &[F], t: &[F]) -> F {
        let n = self.dim;
        let mut acc = F::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].mul(&y[j]);
                for k in 0..n {
                    if z[k].is_zero() {
                        continue;
                    }
                    let xyz = xy.mul(&z[k]);
                    for l in 0..n {
                        if t[l].is_zero() {
                            continue;
                        }
                        let v = self.get(i, j, k, l);
                        if !v.is_zero() {
                            acc = acc.add(&xyz.mul(&t[l]).mul(v));
                        }
                    }
                }
            }
        }
        acc
    }

    /// Components in the basis `f_a = Σ_i P[i][a] e_i`.
    pub fn transform(&self, p: &Matrix<F>) -> Self {
        let n = self.dim;
        let mut cur = self.data.clone();
        // contract one slot at a time
        for slot in 0..4 {
            let mut next = vec![F::zero(); n.pow(4)];
            for (flat, out) in next.iter_mut().enumerate() {
                let mut idx = [flat / (n * n * n), (flat / (n * n)) % n, (flat / n) % n, flat % n];
                let a = idx[slot];
                let mut acc = F::zero();
                for i in 0..n {
                    let pia = &p[(i, a)];
                    if pia.is_zero() {
                        continue;
                    }
                    idx[slot] = i;
                    let src = ((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3];
                    acc = acc.add(&pia.mul(&cur[src]));
                }
                *out = acc;
            }
            cur = next;
        }
        FourTensor { dim: n, data: cur }
    }

    /// `R_{ijkl} = −R_{jikl} = −R_{ijlk} = R_{klij}`.
    pub fn has_curvature_symmetries(&self) -> bool {
        let n = self.dim;
        let all = multi_indices_full(n);
        all.iter().all(|&(i, j, k, l)| {
            let r = self.get(i, j, k, l);
            r.add(self.get(j, i, k, l)).is_zero()
                && r.add(self.get(i, j, l, k)).is_zero()
                && r.sub(self.get(k, l, i, j)).is_zero()
        })
    }

    /// `R_{ijkl} + R_{jkil} + R_{kijl} = 0`.
    pub fn satisfies_first_bianchi(&self) -> bool {
        multi_indices_full(self.dim).iter().all(|&(i, j, k, l)| {
            self.get(i, j, k, l)
                .add(self.get(j, k, i, l))
                .add(self.get(k, i, j, l))
                .is_zero()
        })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> FourTensor<G> {
        FourTensor {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn norm_sq(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, x| acc.add(&x.square()))
    }
}

/// Serialized as a nested `[i][j][k][l]` array.
impl<F: Field + Serialize> Serialize for FourTensor<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim;
        let nested: Vec<Vec<Vec<Vec<&F>>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| (0..n).map(|l| self.get(i, j, k, l)).collect()).collect())
                    .collect()
            })
            .collect();
        nested.serialize(s)
    }
}

fn multi_indices_full(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.push((i, j, k, l));
                }
            }
        }
    }
    out
}

/// Endomorphisms `R_{e_i,e_j} = −[A_i, A_j] + Σ_m c^m_{ij} A_m`, indexed `i * n + j`.
pub fn curvature_endomorphisms<F: Field>(g: &LieAlgebra<F>, conn: &Connection<F>) -> Result<Vec<Matrix<F>>> {
    let n = g.dim();
    if conn.dim() != n {
        return Err(Error::Dimension("connection and algebra dimensions differ".into()));
    }
    let mut out = vec![Matrix::zeros(n, n); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let mut r = conn.matrix(i).commutator(conn.matrix(j))?.neg();
            for m in 0..n {
                let c = g.structure_constant(i, j, m);
                if !c.is_zero() {
                    r = r.add(&conn.matrix(m).scale(c))?;
                }
            }
            out[j * n + i] = r.neg();
            out[i * n + j] = r;
        }
    }
    Ok(out)
}

/// `R_{ijkl} = g(R_{e_i,e_j} e_k, e_l)` for any left-invariant connection.
pub fn riemann<F: Field>(g: &LieAlgebra<F>, m: &MetricFrame<F>, conn: &Connection<F>) -> Result<RiemannTensor<F>> {
    let n = g.dim();
    let ends = curvature_endomorphisms(g, conn)?;
    let lowered: Vec<Matrix<F>> = ends.iter().map(|r| m.gram().mul(r)).collect::<Result<_>>()?;
    Ok(FourTensor::from_fn(n, |i, j, k, l| lowered[i * n + j][(l, k)].clone()))
}

/// Ricci tensor and scalar curvature.
pub fn ricci_scalar<F: Field>(m: &MetricFrame<F>, r: &RiemannTensor<F>) -> (Matrix<F>, F) {
    let n = r.dim();
    let ginv = m.gram_inv();
    let ricci = Matrix::from_fn(n, n, |j, k| {
        let mut acc = F::zero();
        for i in 0..n {
            for l in 0..n {
                let gi = &ginv[(i, l)];
                if !gi.is_zero() {
                    acc = acc.add(&gi.mul(r.get(i, j, l, k)));
                }
            }
        }
        acc
    });
    let s = (0..n).fold(F::zero(), |acc, j| {
        (0..n).fold(acc, |acc, k| acc.add(&ginv[(j, k)].mul(&ricci[(j, k)])))
    });
    (ricci, s)
}

/// `r₀ = Ric − (s/n)·g`.
pub fn trace_free_ricci<F: Field>(m: &MetricFrame<F>, ricci: &Matrix<F>, s: &F) -> Matrix<F> {
    let n = F::from_int(m.dim() as i64);
    let factor = s.div(&n).expect("n > 0");
    ricci.sub(&m.gram().scale(&factor)).expect("same shape")
}

/// Kulkarni–Nomizu product
/// `(h ⊙ k)_{ijkl} = h_{ik}k_{jl} + h_{jl}k_{ik} − h_{il}k_{jk} − h_{jk}k_{il}`.
pub fn kulkarni_nomizu<F: Field>(h: &Matrix<F>, k: &Matrix<F>) -> FourTensor<F> {
    FourTensor::from_fn(h.rows(), |i, j, a, b| {
        h[(i, a)]
            .mul(&k[(j, b)])
            .add(&h[(j, b)].mul(&k[(i, a)]))
            .sub(&h[(i, b)].mul(&k[(j, a)]))
            .sub(&h[(j, a)].mul(&k[(i, b)]))
    })
}

/// Weyl tensor `W = R − (1/(n−2)) (Ric − s/(2(n−1)) g) ⊙ g`.
pub fn weyl_tensor<F: Field>(m: &MetricFrame<F>, r: &RiemannTensor<F>) -> Result<FourTensor<F>> {
    let n = r.dim();
    if n < 3 {
        return Err(Error::Dimension("Weyl tensor needs dimension >= 3".into()));
    }
    let (ricci, s) = ricci_scalar(m, r);
    let nf = n as i64;
    let schouten_factor = s.div(&F::from_int(2 * (nf - 1))).expect("n > 1");
    let h = ricci.sub(&m.gram().scale(&schouten_factor))?;
    let correction = kulkarni_nomizu(&h, m.gram()).scale(&F::from_int(nf - 2).inv().expect("n > 2"));
    Ok(r.sub(&correction))
}

/// `W(X, Y, Z, T)` for the Levi-Civita curvature of `m`.
pub fn weyl_component<F: Field>(
    g: &LieAlgebra<F>,
    m: &MetricFrame<F>,
    x: &[F],
    y: &[F],
    z: &[F],
    t: &[F],
) -> Result<F> {
    let n = g.dim();
    if [x, y, z, t].iter().any(|v| v.len() != n) {
        return Err(Error::Dimension("vectors must match the algebra dimension".into()));
    }
    let conn = levi_civita(g, m)?;
    let r = riemann(g, m, &conn)?;
    Ok(weyl_tensor(m, &r)?.eval(x, y, z, t))
}

fn levi_civita_symbol(idx: &[usize]) -> i64 {
    let mut sign = 1;
    let mut v = idx.to_vec();
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Hodge star on 2-forms (dimension 4) in the basis `e¹², e¹³, e¹⁴, e²³, e²⁴, e³⁴`;
/// column `c` holds the coefficients of `*(basis_c)`.
///
/// `(*β)_{kl} = ε·√det g · Σ_{i<j} β^{ij} ε_{ijkl}` with indices raised by `g⁻¹`.
pub fn hodge_star_2<F: Field>(m: &MetricFrame<F>) -> Result<Matrix<F>> {
    if m.dim() != 4 {
        return Err(Error::Dimension(
            "Hodge star on 2-forms is implemented in dimension 4".into(),
        ));
    }
    let vol = m
        .gram()
        .det()?
        .sqrt()
        .ok_or_else(|| Error::IrrationalCoframe("volume form needs a rational sqrt(det g)".into()))?;
    let vol = if m.orientation() == Orientation::Negative {
        vol.neg()
    } else {
        vol
    };
    let ginv = m.gram_inv();
    let basis = pairs(4);
    let mut cols = Vec::with_capacity(6);
    for &(p, q) in &basis {
        let raised = |i: usize, j: usize| ginv[(i, p)].mul(&ginv[(j, q)]).sub(&ginv[(i, q)].mul(&ginv[(j, p)]));
        let col: Vec<F> = basis
            .iter()
            .map(|&(k, l)| {
                let mut acc = F::zero();
                for &(i, j) in &basis {
                    let eps = levi_civita_symbol(&[i, j, k, l]);
                    if eps != 0 {
                        acc = acc.add(&raised(i, j).mul(&F::from_int(eps)));
                    }
                }
                acc.mul(&vol)
            })
            .collect();
        cols.push(col);
    }
    Ok(Matrix::from_fn(6, 6, |r, c| cols[c][r].clone()))
}

/// Unnormalized bases of Λ⁺ and Λ⁻ in an oriented orthonormal coframe,
/// as coefficient vectors on `f¹², …, f³⁴`. Each vector has norm² 2.
pub fn self_dual_bases<F: Field>(frame_orientation: i8) -> (Vec<Vector<F>>, Vec<Vector<F>>) {
    let e = F::from_int(frame_orientation as i64);
    let z = F::zero;
    let o = F::one;
    // *f¹² = f³⁴, *f¹³ = −f²⁴, *f¹⁴ = f²³ for vol = f¹²³⁴
    let star_partner = [
        vec![z(), z(), z(), z(), z(), o()],
        vec![z(), z(), z(), z(), o().neg(), z()],
        vec![z(), z(), z(), o(), z(), z()],
    ];
    let firsts = [0usize, 1, 2];
    let build = |sign: i64| {
        firsts
            .iter()
            .zip(&star_partner)
            .map(|(&first, partner)| {
                let mut v: Vec<F> = partner.iter().map(|x| x.mul(&e).mul(&F::from_int(sign))).collect();
                v[first] = F::one();
                v
            })
            .collect::<Vec<_>>()
    };
    (build(1), build(-1))
}

/// Curvature operator on 2-forms and its Λ⁺ ⊕ Λ⁻ blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureBlocks<F> {
    /// Operator in the orthonormal basis `f¹², …, f³⁴`.
    pub operator: Matrix<F>,
    pub wplus: Matrix<F>,
    pub wminus: Matrix<F>,
    /// Λ⁻ → Λ⁺ block (rows Λ⁺).
    pub offdiag: Matrix<F>,
    pub scalar: F,
    /// Ricci tensor in the algebra basis.
    pub ricci: Matrix<F>,
    pub trace_free_ricci: Matrix<F>,
    /// Orientation of the orthonormal frame the blocks are expressed in.
    #[serde(skip)]
    pub frame_orientation: i8,
}

impl<F: Field> CurvatureBlocks<F> {
    pub fn is_conformally_flat(&self) -> bool {
        self.wplus.is_zero() && self.wminus.is_zero()
    }

    /// Weyl tensor rebuilt from `W±`, in the orthonormal frame.
    pub fn weyl_from_blocks(&self) -> FourTensor<F> {
        let (plus, minus) = self_dual_bases::<F>(self.frame_orientation);
        let mut op = Matrix::<F>::zeros(6, 6);
        for (w, basis) in [(&self.wplus, &plus), (&self.wminus, &minus)] {
            for a in 0..3 {
                for b in 0..3 {
                    let coef = w[(a, b)].half();
                    if coef.is_zero() {
                        continue;
                    }
                    let outer = Matrix::from_fn(6, 6, |r, c| basis[a][r].mul(&basis[b][c]).mul(&coef));
                    op = op.add(&outer).expect("6x6");
                }
            }
        }
        operator_to_tensor(&op)
    }
}

/// 4-tensor with `T_{ijkl} = op[(ij),(kl)]`, extended by antisymmetry.
fn operator_to_tensor<F: Field>(op: &Matrix<F>) -> FourTensor<F> {
    let index = |i: usize, j: usize| -> Option<(usize, bool)> {
        if i == j {
            return None;
        }
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        let pos = pairs(4).iter().position(|&p| p == (a, b)).expect("in range");
        Some((pos, neg))
    };
    FourTensor::from_fn(4, |i, j, k, l| match (index(i, j), index(k, l)) {
        (Some((p, n1)), Some((q, n2))) => {
            let v = op[(p, q)].clone();
            if n1 ^ n2 {
                v.neg()
            } else {
                v
            }
        }
        _ => F::zero(),
    })
}

/// Block decomposition of the curvature operator of `m` (dimension 4).
///
/// Needs an orthonormal coframe over the field (always available in float
/// mode; in exact mode the Gram matrix must factor rationally).
pub fn curvature_blocks<F: Field>(g: &LieAlgebra<F>, m: &MetricFrame<F>) -> Result<CurvatureBlocks<F>> {
    if g.dim() != 4 {
        return Err(Error::Dimension("curvature blocks are defined in dimension 4".into()));
    }
    let conn = levi_civita(g, m)?;
    let r = riemann(g, m, &conn)?;
    blocks_from_riemann(m, &r)
}

pub fn blocks_from_riemann<F: Field>(m: &MetricFrame<F>, r: &RiemannTensor<F>) -> Result<CurvatureBlocks<F>> {
    let frame = m.frame()?;
    let eps = m.frame_orientation()?;
    let rf = r.transform(&frame);
    let basis = pairs(4);
    let operator = Matrix::from_fn(6, 6, |p, q| {
        let (i, j) = basis[p];
        let (k, l) = basis[q];
        rf.get(i, j, k, l).clone()
    });
    let (ricci, scalar) = ricci_scalar(m, r);
    let trace_free_ricci = trace_free_ricci(m, &ricci, &scalar);
    let (plus, minus) = self_dual_bases::<F>(eps);
    let block = |left: &[Vector<F>], right: &[Vector<F>]| -> Result<Matrix<F>> {
        let mut rows = Vec::with_capacity(3);
        for u in left {
            let mut row = Vec::with_capacity(3);
            for v in right {
                row.push(dot(u, &operator.mul_vec(v)?).half());
            }
            rows.push(row);
        }
        Matrix::from_rows(rows)
    };
    let shift = Matrix::identity(3).scale(&scalar.div(&F::from_int(12)).expect("12 != 0"));
    let wplus = block(&plus, &plus)?.sub(&shift)?;
    let wminus = block(&minus, &minus)?.sub(&shift)?;
    let offdiag = block(&plus, &minus)?;
    Ok(CurvatureBlocks {
        operator,
        wplus,
        wminus,
        offdiag,
        scalar,
        ricci,
        trace_free_ricci,
        frame_orientation: eps,
    })
}

/// Everything computed for one `(algebra, metric)` pair.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport<F: Field + Serialize> {
    pub mode: crate::scalar::Mode,
    pub dim: usize,
    pub orientation: Orientation,
    pub gram: Matrix<F>,
    /// `gamma[i][j][k] = Γ^k_{ij}`.
    pub gamma: Vec<Vec<Vec<F>>>,
    /// `riemann[i][j][k][l] = R_{ijkl}`.
    pub riemann: FourTensor<F>,
    pub ricci: Matrix<F>,
    pub scalar: F,
    pub weyl: FourTensor<F>,
    /// Present when an orthonormal coframe exists over the field.
    pub blocks: Option<CurvatureBlocks<F>>,
    pub flags: CurvatureFlags,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CurvatureFlags {
    pub flat: bool,
    pub conformally_flat: bool,
    pub wplus_zero: Option<bool>,
    pub wminus_zero: Option<bool>,
    pub einstein: bool,
}

impl<F: Field + Serialize> CurvatureReport<F> {
    pub fn compute(g: &LieAlgebra<F>, m: &MetricFrame<F>) -> Result<Self> {
        let n = g.dim();
        let conn = levi_civita(g, m)?;
        let r = riemann(g, m, &conn)?;
        let (ricci, scalar) = ricci_scalar(m, &r);
        let weyl = weyl_tensor(m, &r)?;
        let blocks = if n == 4 && m.coframe().is_ok() {
            Some(blocks_from_riemann(m, &r)?)
        } else {
            None
        };
        let gamma = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| conn.gamma(i, j, k).clone()).collect())
                    .collect()
            })
            .collect();
        let flags = CurvatureFlags {
            flat: r.is_zero(),
            conformally_flat: weyl.is_zero(),
            wplus_zero: blocks.as_ref().map(|b| b.wplus.is_zero()),
            wminus_zero: blocks.as_ref().map(|b| b.wminus.is_zero()),
            einstein: trace_free_ricci(m, &ricci, &scalar).is_zero(),
        };
        Ok(CurvatureReport {
            mode: scalar.mode(),
            dim: n,
            orientation: m.orientation(),
            gram: m.gram().clone(),
            gamma,
            riemann: r,
            ricci,
            scalar,
            weyl,
            blocks,
            flags,
        })
    }
}

/// Index set for 2-form coefficients, re-exported for report layouts.
pub fn two_form_labels() -> Vec<String> {
    multi_indices(4, 2)
        .into_iter()
        .map(|v| format!("{}{}", v[0] + 1, v[1] + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ds_gram, Family};
    use crate::scalar::Q;

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    #[test]
    fn abelian_is_flat() {
        let g = Family::Abelian.algebra(None).unwrap();
        let m = MetricFrame::new(ds_gram(&q(3)), Orientation::Positive).unwrap();
        let conn = levi_civita(&g, &m).unwrap();
        assert!(conn.matrices().iter().all(Matrix::is_zero));
        let r = riemann(&g, &m, &conn).unwrap();
        assert!(r.is_zero());
        let b = curvature_blocks(&g, &m).unwrap();
        assert!(b.operator.is_zero() && b.wplus.is_zero() && b.wminus.is_zero() && b.offdiag.is_zero());
        assert!(b.scalar.is_zero());
    }

    #[test]
    fn rejects_non_spd() {
        let bad = Matrix::diagonal(&[q(1), q(-1), q(1), q(1)]);
        assert!(matches!(
            MetricFrame::new(bad, Orientation::Positive),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn hodge_star_identity_metric() {
        let m = MetricFrame::<Q>::identity(4);
        let s = hodge_star_2(&m).unwrap();
        // e12 ↦ e34
        assert_eq!(s.col(0), vec![q(0), q(0), q(0), q(0), q(0), q(1)]);
        let sm = hodge_star_2(&m.flipped()).unwrap();
        assert_eq!(sm.col(0), vec![q(0), q(0), q(0), q(0), q(0), q(-1)]);
        assert!(s.mul(&s).unwrap().is_identity());
    }

    #[test]
    fn hodge_star_needs_rational_volume() {
        let m = MetricFrame::new(Matrix::diagonal(&[q(2), q(1), q(1), q(1)]), Orientation::Positive).unwrap();
        assert!(matches!(hodge_star_2(&m), Err(Error::IrrationalCoframe(_))));
        assert!(m.coframe().is_err());
    }

    #[test]
    fn ds_metric_is_anti_self_dual_in_natural_orientation() {
        for k in [q(1), q(2)] {
            let g = Family::DeSmedtSalamon.algebra(Some(&q(1))).unwrap();
            let m = MetricFrame::new(ds_gram(&k), Orientation::Positive).unwrap();
            let b = curvature_blocks(&g, &m).unwrap();
            assert!(b.wplus.is_zero());
            assert!(!b.wminus.is_zero());
        }
    }

    #[test]
    fn operator_trace_is_half_scalar() {
        let g = Family::DeSmedtSalamon.algebra(Some(&Q::ratio(1, 2))).unwrap();
        let m = MetricFrame::new(ds_gram(&q(2)), Orientation::Positive).unwrap();
        let b = curvature_blocks(&g, &m).unwrap();
        assert_eq!(b.operator.trace(), b.scalar.half());
        assert!(b.wplus.trace().is_zero() && b.wminus.trace().is_zero());
    }

    #[test]
    fn operator_tensor_round_trip() {
        let op = Matrix::from_fn(6, 6, |r, c| Q::int((r * 6 + c) as i64));
        let t = operator_to_tensor(&op);
        assert_eq!(*t.get(0, 1, 2, 3), op[(0, 5)]);
        assert_eq!(*t.get(1, 0, 2, 3), op[(0, 5)].neg());
        assert!(t.get(1, 1, 2, 3).is_zero());
    }

    #[test]
    fn orientation_parsing() {
        assert_eq!(Orientation::from_sign(-1).unwrap(), Orientation::Negative);
        assert!(Orientation::from_sign(0).is_err());
    }
}
