//! Almost-Hermitian structures `(g, J, ω)` on 4-dimensional Lie algebras.
//!
//! `J` acts on column vectors in the algebra basis (row = output component).
//! `ω(X, Y) = g(JX, Y)`, so with `Ω_{ij} = ω(e_i, e_j)` and Gram matrix `G`
//! we have `Ω = JᵀG` and `J = −G⁻¹Ω`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    curvature_blocks, curvature_endomorphisms, levi_civita, self_dual_bases, Connection, CurvatureBlocks, MetricFrame,
    Orientation,
};
use crate::error::{Error, Result};
use crate::lie::{basis_vector, exterior_d, exterior_d_matrix, pairs, InvariantForm, LieAlgebra};
use crate::linalg::{dot, orthonormal_completion, Matrix, Vector};
use crate::poly::{Poly, PolySystem, SolutionSet};
use crate::scalar::{Field, Q};

/// Normalization of the Nijenhuis tensor:
/// `N(X,Y) = κ_N ([JX,JY] − J[JX,Y] − J[X,JY] − [X,Y])`.
pub const NIJENHUIS_SCALE: (i64, i64) = (1, 4);

pub fn nijenhuis_scale<F: Field>() -> F {
    F::from_q(&Q::ratio(NIJENHUIS_SCALE.0, NIJENHUIS_SCALE.1))
}

/// Pfaffian of a 4×4 antisymmetric matrix; `ω∧ω = 2·pf(Ω)·e¹²³⁴`.
pub fn pfaffian<F: Field>(omega: &Matrix<F>) -> F {
    let w = |i: usize, j: usize| &omega[(i, j)];
    w(0, 1)
        .mul(w(2, 3))
        .sub(&w(0, 2).mul(w(1, 3)))
        .add(&w(0, 3).mul(w(1, 2)))
}

#[derive(Clone, PartialEq)]
pub struct AlmostHermitianStructure<F> {
    metric: MetricFrame<F>,
    j: Matrix<F>,
    omega: InvariantForm<F>,
    /// Sign of `ω∧ω` relative to the metric's orientation.
    volume_sign: i8,
}

impl<F: Field> std::fmt::Debug for AlmostHermitianStructure<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlmostHermitianStructure")
            .field("gram", self.metric.gram())
            .field("j", &self.j)
            .field("omega", &self.omega)
            .field("volume_sign", &self.volume_sign)
            .finish()
    }
}

/// Outcome of trying to build a structure from `(g, ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Compatibility<F: Field> {
    Compatible(AlmostHermitianStructure<F>),
    /// `A² + Id ≠ 0` for the endomorphism `A` with `ω = g(A·, ·)`.
    Incompatible {
        defect: Matrix<F>,
    },
}

impl<F: Field> Compatibility<F> {
    pub fn structure(self) -> Option<AlmostHermitianStructure<F>> {
        match self {
            Compatibility::Compatible(s) => Some(s),
            Compatibility::Incompatible { .. } => None,
        }
    }

    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible(_))
    }
}

impl<F: Field> AlmostHermitianStructure<F> {
    pub fn from_metric_and_omega(
        g: &LieAlgebra<F>,
        m: &MetricFrame<F>,
        omega: &InvariantForm<F>,
    ) -> Result<Compatibility<F>> {
        if g.dim() != 4 || m.dim() != 4 || omega.dim() != 4 || omega.degree() != 2 {
            return Err(Error::Dimension(
                "almost-Hermitian structures need a 2-form in dimension 4".into(),
            ));
        }
        let om = omega.to_matrix()?;
        let pf = pfaffian(&om);
        if pf.is_zero() {
            return Err(Error::DegenerateForm);
        }
        let a = m.gram_inv().mul(&om)?.neg();
        let defect = a.mul(&a)?.add(&Matrix::identity(4))?;
        if !defect.is_zero() {
            return Ok(Compatibility::Incompatible { defect });
        }
        Ok(Compatibility::Compatible(AlmostHermitianStructure {
            metric: m.clone(),
            j: a,
            omega: omega.clone(),
            volume_sign: pf.signum() * m.orientation().sign(),
        }))
    }

    /// Structure from a compatible `J`; `ω` is derived.
    pub fn from_j(m: &MetricFrame<F>, j: Matrix<F>) -> Result<Self> {
        if m.dim() != 4 || j.rows() != 4 || j.cols() != 4 {
            return Err(Error::Dimension("J must be 4x4".into()));
        }
        if !j.mul(&j)?.add(&Matrix::identity(4))?.is_zero() {
            return Err(Error::Parameter("J^2 != -Id".into()));
        }
        let jtg = j.transpose().mul(m.gram())?;
        if !jtg.mul(&j)?.sub(m.gram())?.is_zero() {
            return Err(Error::Parameter("J is not g-orthogonal".into()));
        }
        let omega = InvariantForm::from_matrix(&jtg)?;
        let pf = pfaffian(&jtg);
        Ok(AlmostHermitianStructure {
            metric: m.clone(),
            j,
            omega,
            volume_sign: pf.signum() * m.orientation().sign(),
        })
    }

    pub fn metric(&self) -> &MetricFrame<F> {
        &self.metric
    }

    pub fn j(&self) -> &Matrix<F> {
        &self.j
    }

    pub fn omega(&self) -> &InvariantForm<F> {
        &self.omega
    }

    /// `+1` when `ω∧ω` is a positive multiple of the metric volume form.
    pub fn volume_sign(&self) -> i8 {
        self.volume_sign
    }

    /// Same `(g, J, ω)` with the metric orientation replaced.
    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        let flip = if orientation == self.metric.orientation() {
            1
        } else {
            -1
        };
        AlmostHermitianStructure {
            metric: self.metric.with_orientation(orientation),
            volume_sign: self.volume_sign * flip,
            ..self.clone()
        }
    }

    /// Orientation in which `ω` is self-dual.
    pub fn induced_orientation(&self) -> Orientation {
        if self.volume_sign == self.metric.orientation().sign() {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    /// `J² = −Id`, `JᵀGJ = G` and `ω = g(J·,·)`, all exactly.
    pub fn invariants_hold(&self) -> bool {
        let g = self.metric.gram();
        let sq = self.j.mul(&self.j).and_then(|s| s.add(&Matrix::identity(4)));
        let orth = self
            .j
            .transpose()
            .mul(g)
            .and_then(|t| t.mul(&self.j))
            .and_then(|t| t.sub(g));
        let om = self.j.transpose().mul(g).ok();
        matches!((sq, orth), (Ok(a), Ok(b)) if a.is_zero() && b.is_zero())
            && om.as_ref() == self.omega.to_matrix().ok().as_ref()
    }

    pub fn is_almost_kahler(&self, g: &LieAlgebra<F>) -> Result<bool> {
        Ok(exterior_d(g, &self.omega)?.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> AlmostHermitianStructure<G> {
        AlmostHermitianStructure {
            metric: self.metric.map(f),
            j: self.j.map(f),
            omega: InvariantForm::new(4, 2, self.omega.coeffs().iter().map(f).collect()).expect("shape"),
            volume_sign: self.volume_sign,
        }
    }
}

/// Basis of the closed invariant 2-forms.
pub fn closed_forms<F: Field>(g: &LieAlgebra<F>) -> Result<Vec<InvariantForm<F>>> {
    let d = exterior_d_matrix(g, 2)?;
    d.nullspace()
        .into_iter()
        .map(|v| InvariantForm::new(g.dim(), 2, v))
        .collect()
}

/// Values `N(e_i, e_j)`, indexed `i * 4 + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nijenhuis<F> {
    table: Vec<Vector<F>>,
}

impl<F: Field> Nijenhuis<F> {
    pub fn get(&self, i: usize, j: usize) -> &Vector<F> {
        &self.table[i * 4 + j]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| v.iter().all(F::is_zero))
    }

    pub fn eval(&self, x: &[F], y: &[F]) -> Vector<F> {
        let mut out = vec![F::zero(); 4];
        for i in 0..4 {
            for j in 0..4 {
                let c = x[i].mul(&y[j]);
                if c.is_zero() {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(self.get(i, j)) {
                    *o = o.add(&c.mul(v));
                }
            }
        }
        out
    }

    /// `Σ g^{ik} g^{jl} g(N(e_i,e_j), N(e_k,e_l))`: the sum of `|N(f_a,f_b)|²`
    /// over an orthonormal frame.
    pub fn norm_sq(&self, m: &MetricFrame<F>) -> F {
        let ginv = m.gram_inv();
        let mut acc = F::zero();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let w = ginv[(i, k)].mul(&ginv[(j, l)]);
                        if !w.is_zero() {
                            acc = acc.add(&w.mul(&m.inner(self.get(i, j), self.get(k, l))));
                        }
                    }
                }
            }
        }
        acc
    }

    pub fn table(&self) -> Vec<Vec<Vector<F>>> {
        (0..4)
            .map(|i| (0..4).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }
}

pub fn nijenhuis<F: Field>(g: &LieAlgebra<F>, s: &AlmostHermitianStructure<F>) -> Result<Nijenhuis<F>> {
    let j = s.j();
    let kappa = nijenhuis_scale::<F>();
    let jv = |v: &[F]| j.mul_vec(v);
    let mut table = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            let x = basis_vector::<F>(4, a);
            let y = basis_vector::<F>(4, b);
            let jx = jv(&x)?;
            let jy = jv(&y)?;
            let t1 = g.bracket(&jx, &jy);
            let t2 = jv(&g.bracket(&jx, &y))?;
            let t3 = jv(&g.bracket(&x, &jy))?;
            let t4 = g.bracket(&x, &y);
            table.push(
                (0..4)
                    .map(|k| t1[k].sub(&t2[k]).sub(&t3[k]).sub(&t4[k]).mul(&kappa))
                    .collect(),
            );
        }
    }
    Ok(Nijenhuis { table })
}

/// `∇_X = D_X − ½ J (D_X J)` with `D` the Levi-Civita connection.
pub fn canonical_connection<F: Field>(
    g: &LieAlgebra<F>,
    m: &MetricFrame<F>,
    s: &AlmostHermitianStructure<F>,
) -> Result<Connection<F>> {
    let lc = levi_civita(g, m)?;
    let j = s.j();
    let mats = lc
        .matrices()
        .iter()
        .map(|a| {
            let dj = a.commutator(j)?;
            a.sub(&j.mul(&dj)?.scale(&F::one().half()))
        })
        .collect::<Result<Vec<_>>>()?;
    Connection::new(mats)
}

/// Curvature of the canonical connection, cached for repeated `H` evaluations.
#[derive(Debug, Clone)]
pub struct HermitianCurvature<F: Field> {
    structure: AlmostHermitianStructure<F>,
    connection: Connection<F>,
    /// `R^∇_{e_i,e_j}` lowered with `g`: `lowered[i*4+j][(l, k)] = g(R_{ij} e_k, e_l)`.
    lowered: Vec<Matrix<F>>,
}

impl<F: Field> HermitianCurvature<F> {
    pub fn new(g: &LieAlgebra<F>, s: &AlmostHermitianStructure<F>) -> Result<Self> {
        let m = s.metric();
        let connection = canonical_connection(g, m, s)?;
        let lowered = curvature_endomorphisms(g, &connection)?
            .iter()
            .map(|r| m.gram().mul(r))
            .collect::<Result<_>>()?;
        Ok(HermitianCurvature {
            structure: s.clone(),
            connection,
            lowered,
        })
    }

    pub fn connection(&self) -> &Connection<F> {
        &self.connection
    }

    /// `g(R^∇_{e_a,e_b} e_c, e_d)`.
    fn r(&self, a: usize, b: usize, c: usize, d: usize) -> &F {
        &self.lowered[a * 4 + b][(d, c)]
    }

    /// `g(R^∇_{X,JX} X, JX)`.
    pub fn quartic(&self, x: &[F]) -> F {
        let jx = self.structure.j().mul_vec(x).expect("dimension");
        let mut acc = F::zero();
        for a in 0..4 {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..4 {
                if jx[b].is_zero() {
                    continue;
                }
                let ab = x[a].mul(&jx[b]);
                for c in 0..4 {
                    if x[c].is_zero() {
                        continue;
                    }
                    let abc = ab.mul(&x[c]);
                    for d in 0..4 {
                        let v = self.r(a, b, c, d);
                        if !v.is_zero() && !jx[d].is_zero() {
                            acc = acc.add(&abc.mul(&jx[d]).mul(v));
                        }
                    }
                }
            }
        }
        acc
    }

    /// Hermitian holomorphic sectional curvature `H(X)`.
    pub fn h(&self, x: &[F]) -> Result<F> {
        if x.len() != 4 {
            return Err(Error::Dimension("H needs a 4-vector".into()));
        }
        let n = self.structure.metric().inner(x, x);
        if n.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.quartic(x).div(&n.square()).expect("nonzero"))
    }

    /// Coefficients `T_{abcd}` of the quartic `X ↦ g(R^∇_{X,JX}X, JX)`, unsymmetrized.
    fn quartic_coefficients(&self) -> Vec<F> {
        let j = self.structure.j();
        let mut t = vec![F::zero(); 256];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut acc = F::zero();
                        for mm in 0..4 {
                            let jm = &j[(mm, b)];
                            if jm.is_zero() {
                                continue;
                            }
                            for nn in 0..4 {
                                let jn = &j[(nn, d)];
                                if jn.is_zero() {
                                    continue;
                                }
                                let v = self.r(a, mm, c, nn);
                                if !v.is_zero() {
                                    acc = acc.add(&jm.mul(jn).mul(v));
                                }
                            }
                        }
                        t[((a * 4 + b) * 4 + c) * 4 + d] = acc;
                    }
                }
            }
        }
        t
    }
}

/// Full symmetrization of a 4-tensor in dimension 4.
pub fn symmetrize4<F: Field>(t: &[F]) -> Vec<F> {
    const PERMS: [[usize; 4]; 24] = permutations4();
    let inv = F::from_int(24).inv().expect("nonzero");
    let mut out = vec![F::zero(); 256];
    for (flat, o) in out.iter_mut().enumerate() {
        let idx = [flat / 64, (flat / 16) % 4, (flat / 4) % 4, flat % 4];
        let mut acc = F::zero();
        for p in PERMS {
            let src = ((idx[p[0]] * 4 + idx[p[1]]) * 4 + idx[p[2]]) * 4 + idx[p[3]];
            acc = acc.add(&t[src]);
        }
        *o = acc.mul(&inv);
    }
    out
}

const fn permutations4() -> [[usize; 4]; 24] {
    let mut out = [[0usize; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    out[n] = [a, b, c, 6 - a - b - c];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

pub fn hermitian_h<F: Field>(g: &LieAlgebra<F>, s: &AlmostHermitianStructure<F>, x: &[F]) -> Result<F> {
    HermitianCurvature::new(g, s)?.h(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConstantH<F: Field + Serialize> {
    Constant {
        kappa: F,
    },
    /// Two directions with different `H`. Frame vectors are unit; otherwise the
    /// vectors are basis or small integer vectors (`H` is scale-invariant).
    NonConstant {
        x1: Vector<F>,
        x2: Vector<F>,
        h1: F,
        h2: F,
    },
}

impl<F: Field + Serialize> ConstantH<F> {
    pub fn is_constant(&self) -> bool {
        matches!(self, ConstantH::Constant { .. })
    }
}

/// Exact decision of pointwise constancy of `H` by polarization:
/// `H ≡ κ` iff `Sym(T) = κ·Sym(g⊗g)`.
pub fn constant_h_test<F: Field + Serialize>(
    g: &LieAlgebra<F>,
    s: &AlmostHermitianStructure<F>,
) -> Result<ConstantH<F>> {
    let curv = HermitianCurvature::new(g, s)?;
    let m = s.metric();
    let gram = m.gram();
    let t = symmetrize4(&curv.quartic_coefficients());
    let p = symmetrize4(
        &(0..256)
            .map(|flat| gram[(flat / 64, (flat / 16) % 4)].mul(&gram[((flat / 4) % 4, flat % 4)]))
            .collect::<Vec<_>>(),
    );
    let kappa = t[0].div(&p[0]).ok_or(Error::Singular)?;
    if t.iter().zip(&p).all(|(a, b)| a.sub(&b.mul(&kappa)).is_zero()) {
        return Ok(ConstantH::Constant { kappa });
    }
    let candidates: Vec<Vector<F>> = match m.frame() {
        Ok(frame) => (0..4).map(|a| frame.col(a)).collect(),
        Err(_) => (0..4).map(|a| basis_vector(4, a)).collect(),
    };
    let hs = candidates.iter().map(|x| curv.h(x)).collect::<Result<Vec<_>>>()?;
    for a in 0..4 {
        for b in a + 1..4 {
            if !hs[a].sub(&hs[b]).is_zero() {
                return Ok(ConstantH::NonConstant {
                    x1: candidates[a].clone(),
                    x2: candidates[b].clone(),
                    h1: hs[a].clone(),
                    h2: hs[b].clone(),
                });
            }
        }
    }
    // H agrees on the frame; search small integer directions deterministically.
    let mut rng = crate::sampling::rng(0);
    let h0 = hs[0].clone();
    for _ in 0..10_000 {
        let x: Vector<F> = (0..4).map(|_| F::from_int(rng.gen_range(-3..=3))).collect();
        if x.iter().all(F::is_zero) {
            continue;
        }
        let hx = curv.h(&x)?;
        if !hx.sub(&h0).is_zero() {
            return Ok(ConstantH::NonConstant {
                x1: candidates[0].clone(),
                x2: x,
                h1: h0,
                h2: hx,
            });
        }
    }
    Err(Error::Parameter("no witness found for non-constant H".into()))
}

/// `W⁺` written in an orthonormal basis of Λ⁺ whose first vector is `ω/|ω|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JBlockDecomposition<F> {
    /// `⟨W⁺ω̂, ω̂⟩`; equals `‖N_J‖² + s/6` in the block formula.
    pub topleft: F,
    /// Component mapping `Λ^{J,−}` to the `ω` line.
    pub womega: Vector<F>,
    /// Trace-free part on `Λ^{J,−}`.
    pub w00: Matrix<F>,
    /// `ω` direction in the Λ⁺ basis used by [`CurvatureBlocks`].
    pub omega_direction: Vector<F>,
    /// Orthogonal change of basis; first column is `omega_direction`.
    pub basis: Matrix<F>,
    pub scalar: F,
}

impl<F: Field> JBlockDecomposition<F> {
    /// `topleft − s/6`, the operational value of `‖N_J‖²`.
    pub fn nj_norm_sq(&self) -> F {
        self.topleft.sub(&self.scalar.div(&F::from_int(6)).expect("6 != 0"))
    }

    /// Rebuilds `W⁺` in the basis of [`CurvatureBlocks::wplus`].
    pub fn reassemble(&self) -> Matrix<F> {
        let t = &self.topleft;
        let half_t = t.half();
        let inner = Matrix::from_fn(3, 3, |r, c| match (r, c) {
            (0, 0) => t.clone(),
            (0, c) => self.womega[c - 1].clone(),
            (r, 0) => self.womega[r - 1].clone(),
            (r, c) => {
                let v = self.w00[(r - 1, c - 1)].clone();
                if r == c {
                    v.sub(&half_t)
                } else {
                    v
                }
            }
        });
        let q = &self.basis;
        q.mul(&inner).and_then(|x| x.mul(&q.transpose())).expect("3x3")
    }

    /// `2‖W⁺_ω‖² + ‖W⁺₀₀‖² + (3/2)·topleft²`.
    pub fn block_norm_sq(&self) -> F {
        let womega = dot(&self.womega, &self.womega).mul(&F::from_int(2));
        let three_halves = F::from_q(&Q::ratio(3, 2));
        womega
            .add(&self.w00.frobenius_sq())
            .add(&three_halves.mul(&self.topleft.square()))
    }
}

/// `ω` expressed on the orthonormal coframe, as coefficients on `f¹², …, f³⁴`.
pub fn omega_in_frame<F: Field>(s: &AlmostHermitianStructure<F>) -> Result<Vector<F>> {
    let p = s.metric().frame()?;
    let om = s.omega().to_matrix()?;
    let of = p.transpose().mul(&om)?.mul(&p)?;
    Ok(pairs(4).into_iter().map(|(i, j)| of[(i, j)].clone()).collect())
}

pub fn wplus_j_blocks<F: Field>(g: &LieAlgebra<F>, s: &AlmostHermitianStructure<F>) -> Result<JBlockDecomposition<F>> {
    let blocks = curvature_blocks(g, s.metric())?;
    wplus_j_blocks_from(&blocks, s)
}

pub fn wplus_j_blocks_from<F: Field>(
    blocks: &CurvatureBlocks<F>,
    s: &AlmostHermitianStructure<F>,
) -> Result<JBlockDecomposition<F>> {
    let w = omega_in_frame(s)?;
    let (plus, minus) = self_dual_bases::<F>(s.metric().frame_orientation()?);
    if minus.iter().any(|v| !dot(v, &w).is_zero()) {
        return Err(Error::OrientationMismatch);
    }
    // σ± have norm² 2 and |ω|² = 2, so these coordinates form a unit vector.
    let x: Vector<F> = plus.iter().map(|v| dot(v, &w).half()).collect();
    let q = orthonormal_completion(&x)?;
    let rotated = q.transpose().mul(&blocks.wplus)?.mul(&q)?;
    let topleft = rotated[(0, 0)].clone();
    let half_t = topleft.half();
    let w00 = Matrix::from_fn(2, 2, |r, c| {
        let v = rotated[(r + 1, c + 1)].clone();
        if r == c {
            v.add(&half_t)
        } else {
            v
        }
    });
    Ok(JBlockDecomposition {
        topleft,
        womega: vec![rotated[(0, 1)].clone(), rotated[(0, 2)].clone()],
        w00,
        omega_direction: x,
        basis: q,
        scalar: blocks.scalar.clone(),
    })
}

/// Polynomial system in the coefficients `t` of `ω = Σ t_i basis_i`
/// expressing `(−G⁻¹Ω)² = −Id`.
pub fn compatibility_system(m: &MetricFrame<Q>, basis: &[InvariantForm<Q>]) -> Result<PolySystem> {
    let n = basis.len();
    let ginv = m.gram_inv();
    let a: Vec<Matrix<Q>> = basis.iter().map(|f| ginv.mul(&f.to_matrix()?)).collect::<Result<_>>()?;
    let mut eqs = Vec::with_capacity(16);
    for r in 0..4 {
        for c in 0..4 {
            let mut p = if r == c {
                Poly::constant(n, Q::one())
            } else {
                Poly::zero(n)
            };
            for i in 0..n {
                for j in 0..n {
                    let prod = a[i].mul(&a[j])?;
                    let coef = &prod[(r, c)];
                    if coef.is_zero() {
                        continue;
                    }
                    p = p.add(&Poly::var(n, i).mul(&Poly::var(n, j)).scale(coef));
                }
            }
            eqs.push(p);
        }
    }
    PolySystem::new(n, eqs)
}

/// All almost-Kähler structures compatible with `m`, when they form a finite set.
///
/// Returns [`Error::Underdetermined`] when the compatible closed forms form a
/// continuous family or need irrational coefficients.
pub fn almost_kahler_structures(g: &LieAlgebra<Q>, m: &MetricFrame<Q>) -> Result<Vec<AlmostHermitianStructure<Q>>> {
    let basis = closed_forms(g)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let points = match compatibility_system(m, &basis)?.solve_finite()? {
        SolutionSet::Empty => return Ok(Vec::new()),
        SolutionSet::Points(p) => p,
    };
    let mut out = Vec::with_capacity(points.len());
    for t in points {
        let omega = combine(&basis, &t)?;
        if let Compatibility::Compatible(s) = AlmostHermitianStructure::from_metric_and_omega(g, m, &omega)? {
            out.push(s);
        }
    }
    Ok(out)
}

pub fn combine<F: Field>(basis: &[InvariantForm<F>], coeffs: &[F]) -> Result<InvariantForm<F>> {
    let dim = basis.first().map_or(4, InvariantForm::dim);
    basis
        .iter()
        .zip(coeffs)
        .try_fold(InvariantForm::zero(dim, 2), |acc, (f, c)| acc.add(&f.scale(c)))
}

/// Structure file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub gram: Vec<Vec<Q>>,
    pub orientation: i64,
    /// Keys `"12"`, `"13"`, …, `"34"`; missing keys are zero.
    pub omega: BTreeMap<String, Q>,
}

impl StructureJson {
    pub fn metric(&self) -> Result<MetricFrame<Q>> {
        MetricFrame::new(
            Matrix::from_rows(self.gram.clone())?,
            Orientation::from_sign(self.orientation)?,
        )
    }

    pub fn omega_form(&self) -> Result<InvariantForm<Q>> {
        let labels = omega_labels();
        if let Some(bad) = self.omega.keys().find(|k| !labels.contains(k)) {
            return Err(Error::Parse(format!("unknown 2-form index {bad:?}")));
        }
        let coeffs = labels
            .iter()
            .map(|l| self.omega.get(l).cloned().unwrap_or_else(Q::zero))
            .collect();
        InvariantForm::new(4, 2, coeffs)
    }

    pub fn from_structure(s: &AlmostHermitianStructure<Q>) -> StructureJson {
        StructureJson {
            gram: s.metric().gram().to_rows(),
            orientation: s.metric().orientation().sign() as i64,
            omega: omega_labels()
                .into_iter()
                .zip(s.omega().coeffs())
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, c)| (l, c.clone()))
                .collect(),
        }
    }
}

fn omega_labels() -> Vec<String> {
    pairs(4)
        .into_iter()
        .map(|(i, j)| format!("{}{}", i + 1, j + 1))
        .collect()
}

/// Summary of one structure for reports.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport<F: Field + Serialize> {
    pub j: Matrix<F>,
    pub omega: Vector<F>,
    pub almost_kahler: bool,
    /// `nijenhuis[i][j] = N(e_i, e_j)`.
    pub nijenhuis: Vec<Vec<Vector<F>>>,
    pub integrable: bool,
    /// `H(e_i)` on the algebra basis.
    pub h_basis: Vec<F>,
    /// `H(f_a)` on the orthonormal frame, when it exists over the field.
    pub h_frame: Option<Vec<F>>,
    pub constant_h: ConstantH<F>,
}

impl<F: Field + Serialize> StructureReport<F> {
    pub fn compute(g: &LieAlgebra<F>, s: &AlmostHermitianStructure<F>) -> Result<Self> {
        let n = nijenhuis(g, s)?;
        let curv = HermitianCurvature::new(g, s)?;
        let h_basis = (0..4)
            .map(|i| curv.h(&basis_vector(4, i)))
            .collect::<Result<Vec<_>>>()?;
        let h_frame = match s.metric().frame() {
            Ok(p) => Some((0..4).map(|a| curv.h(&p.col(a))).collect::<Result<Vec<_>>>()?),
            Err(_) => None,
        };
        Ok(StructureReport {
            j: s.j().clone(),
            omega: s.omega().coeffs().to_vec(),
            almost_kahler: s.is_almost_kahler(g)?,
            nijenhuis: n.table(),
            integrable: n.is_zero(),
            h_basis,
            h_frame,
            constant_h: constant_h_test(g, s)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ds_gram, Family};

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    fn form(coeffs: [i64; 6]) -> InvariantForm<Q> {
        InvariantForm::new(4, 2, coeffs.iter().map(|&c| q(c)).collect()).unwrap()
    }

    fn standard() -> (LieAlgebra<Q>, AlmostHermitianStructure<Q>) {
        let g = Family::Abelian.algebra(None).unwrap();
        let m = MetricFrame::identity(4);
        let s = AlmostHermitianStructure::from_metric_and_omega(&g, &m, &form([1, 0, 0, 0, 0, 1]))
            .unwrap()
            .structure()
            .unwrap();
        (g, s)
    }

    #[test]
    fn ds_compatible_forms() {
        let g = Family::DeSmedtSalamon.algebra(Some(&q(1))).unwrap();
        let m = MetricFrame::new(ds_gram(&q(2)), Orientation::Positive).unwrap();
        for sign in [1, -1] {
            let omega = form([0, 0, -2 * sign, sign, 0, 0]);
            let s = AlmostHermitianStructure::from_metric_and_omega(&g, &m, &omega)
                .unwrap()
                .structure()
                .unwrap();
            assert_eq!(s.j().col(0), vec![q(0), q(0), q(0), q(-2 * sign)]);
            assert_eq!(s.j().col(1), vec![q(0), q(0), q(sign), q(0)]);
            assert!(s.invariants_hold());
        }
        let bad = AlmostHermitianStructure::from_metric_and_omega(&g, &m, &form([1, 0, 0, 0, 0, 1])).unwrap();
        assert!(!bad.is_compatible());
    }

    #[test]
    fn degenerate_omega_is_an_error() {
        let g = Family::Abelian.algebra(None).unwrap();
        let m = MetricFrame::identity(4);
        assert_eq!(
            AlmostHermitianStructure::from_metric_and_omega(&g, &m, &form([1, 0, 0, 0, 0, 0])),
            Err(Error::DegenerateForm)
        );
    }

    #[test]
    fn abelian_standard_structure_is_flat_kahler() {
        let (g, s) = standard();
        assert_eq!(closed_forms(&g).unwrap().len(), 6);
        assert!(nijenhuis(&g, &s).unwrap().is_zero());
        let c = canonical_connection(&g, s.metric(), &s).unwrap();
        assert!(c.matrices().iter().all(Matrix::is_zero));
        assert_eq!(constant_h_test(&g, &s).unwrap(), ConstantH::Constant { kappa: q(0) });
        let b = wplus_j_blocks(&g, &s).unwrap();
        assert!(b.topleft.is_zero() && b.w00.is_zero() && b.womega.iter().all(Q::is_zero));
    }

    #[test]
    fn zero_vector_rejected() {
        let (g, s) = standard();
        assert_eq!(hermitian_h(&g, &s, &[q(0), q(0), q(0), q(0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn orientation_mismatch() {
        let (g, s) = standard();
        let flipped = s.with_orientation(Orientation::Negative);
        assert_eq!(wplus_j_blocks(&g, &flipped), Err(Error::OrientationMismatch));
        assert_eq!(flipped.induced_orientation(), Orientation::Positive);
    }

    #[test]
    fn ds_closed_forms_and_structures() {
        for lambda in [q(0), Q::ratio(1, 2), q(1), q(3)] {
            let g = Family::DeSmedtSalamon.algebra(Some(&lambda)).unwrap();
            assert_eq!(closed_forms(&g).unwrap().len(), 3);
            let m1 = MetricFrame::new(ds_gram(&q(1)), Orientation::Positive).unwrap();
            assert!(almost_kahler_structures(&g, &m1).unwrap().is_empty());
            let m2 = MetricFrame::new(ds_gram(&q(2)), Orientation::Positive).unwrap();
            let found = almost_kahler_structures(&g, &m2).unwrap();
            assert_eq!(found.len(), 2);
            for s in &found {
                assert!(nijenhuis(&g, s).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn permutations_are_distinct() {
        let p = permutations4();
        let set: std::collections::BTreeSet<_> = p.iter().collect();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn structure_json_round_trip() {
        let (_, s) = standard();
        let j = StructureJson::from_structure(&s);
        let text = serde_json::to_string(&j).unwrap();
        let back: StructureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.omega_form().unwrap(), *s.omega());
        assert_eq!(back.metric().unwrap().gram(), s.metric().gram());
    }
}
