//! The four-dimensional algebra families used throughout, and the
//! Gram–Schmidt coframe parametrization of metrics on `r2prime`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{InvariantForm, LieAlgebra};
use crate::linalg::Matrix;
use crate::scalar::{Field, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    #[serde(rename = "abelian")]
    Abelian,
    #[serde(rename = "rr30")]
    Rr30,
    #[serde(rename = "r2prime")]
    R2Prime,
    #[serde(rename = "dS")]
    DeSmedtSalamon,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Abelian, Family::Rr30, Family::R2Prime, Family::DeSmedtSalamon];

    pub fn name(self) -> &'static str {
        match self {
            Family::Abelian => "abelian",
            Family::Rr30 => "rr30",
            Family::R2Prime => "r2prime",
            Family::DeSmedtSalamon => "dS",
        }
    }

    pub fn from_name(name: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parameter(format!("unknown family {name:?}")))
    }

    pub fn has_lambda(self) -> bool {
        self == Family::DeSmedtSalamon
    }

    /// Instantiates the family; `lambda` is required (and must be ≥ 0) for `dS` only.
    pub fn algebra(self, lambda: Option<&Q>) -> Result<LieAlgebra<Q>> {
        let one = Q::one;
        let m1 = || Q::int(-1);
        match (self, lambda) {
            (Family::DeSmedtSalamon, Some(l)) => {
                if l.is_negative() {
                    return Err(Error::Parameter(format!("lambda must be >= 0, got {l}")));
                }
                LieAlgebra::from_structure_equations(&ds_structure_equations(l))
            }
            (Family::DeSmedtSalamon, None) => Err(Error::Parameter("dS needs --lambda".into())),
            (_, Some(_)) => Err(Error::Parameter(format!("{} takes no lambda", self.name()))),
            (Family::Abelian, None) => LieAlgebra::abelian(4),
            // [e1,e3] = −e2, [e2,e3] = e1
            (Family::Rr30, None) => LieAlgebra::from_brackets(4, &[(0, 2, 1, m1()), (1, 2, 0, one())]),
            // [e1,e3] = e3, [e1,e4] = e4, [e2,e3] = e4, [e2,e4] = −e3
            (Family::R2Prime, None) => LieAlgebra::from_brackets(
                4,
                &[(0, 2, 2, one()), (0, 3, 3, one()), (1, 2, 3, one()), (1, 3, 2, m1())],
            ),
        }
    }
}

/// `de¹ = 0, de² = −e¹² − λe¹³, de³ = λe¹² − e¹³, de⁴ = −2e¹⁴ + e²³`.
pub fn ds_structure_equations(lambda: &Q) -> Vec<InvariantForm<Q>> {
    let two_form = |c: [Q; 6]| InvariantForm::new(4, 2, c.to_vec()).expect("six coefficients");
    let z = Q::zero;
    vec![
        InvariantForm::zero(4, 2),
        two_form([Q::int(-1), lambda.neg(), z(), z(), z(), z()]),
        two_form([lambda.clone(), Q::int(-1), z(), z(), z(), z()]),
        two_form([z(), z(), Q::int(-2), Q::one(), z(), z()]),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSlot {
    pub name: &'static str,
    pub constraint: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub family: Family,
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: Vec<ParamSlot>,
    pub notes: &'static str,
    pub unimodular: bool,
}

impl CatalogEntry {
    pub fn instantiate(&self, lambda: Option<&Q>) -> Result<LieAlgebra<Q>> {
        self.family.algebra(lambda)
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            family: Family::Abelian,
            name: "abelian",
            description: "abelian Lie algebra R^4",
            parameters: vec![],
            notes: "symplectic and conformally flat; all brackets vanish",
            unimodular: true,
        },
        CatalogEntry {
            family: Family::Rr30,
            name: "rr30",
            description: "rr_{3,0}: [e1,e3] = -e2, [e2,e3] = e1",
            parameters: vec![],
            notes: "symplectic and conformally flat",
            unimodular: true,
        },
        CatalogEntry {
            family: Family::R2Prime,
            name: "r2prime",
            description: "r_2': [e1,e3] = e3, [e1,e4] = e4, [e2,e3] = e4, [e2,e4] = -e3",
            parameters: vec![],
            notes: "symplectic and conformally flat, not unimodular",
            unimodular: false,
        },
        CatalogEntry {
            family: Family::DeSmedtSalamon,
            name: "dS",
            description: "de1 = 0, de2 = -e12 - l e13, de3 = l e12 - e13, de4 = -2 e14 + e23",
            parameters: vec![ParamSlot {
                name: "lambda",
                constraint: "rational, >= 0",
            }],
            notes: "carries non-conformally-flat metrics with W+ = 0 for the orthonormal basis {e1/k, e2, e3, e4}, k in {1, 2}",
            unimodular: false,
        },
    ]
}

/// Gram matrix `diag(k², 1, 1, 1)`: orthonormal basis `{e₁/k, e₂, e₃, e₄}`.
pub fn ds_gram(k: &Q) -> Matrix<Q> {
    Matrix::diagonal(&[k.square(), Q::one(), Q::one(), Q::one()])
}

/// Coefficients `a₁ … a₁₀` of the coframe
///
/// ```text
/// f¹ = a₁e¹
/// f² = a₂f¹ + a₃e²
/// f³ = a₄f¹ + a₅f² + a₆e³
/// f⁴ = a₇f¹ + a₈f² + a₉f³ + a₁₀e⁴
/// ```
///
/// with `a₁, a₃, a₆, a₁₀ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoframeParams {
    pub a: [Q; 10],
}

impl CoframeParams {
    pub fn new(a: [Q; 10]) -> Result<CoframeParams> {
        for i in [0, 2, 5, 9] {
            if !a[i].is_positive() {
                return Err(Error::Parameter(format!("a{} must be positive, got {}", i + 1, a[i])));
            }
        }
        Ok(CoframeParams { a })
    }

    /// Imposes the four conformal-flatness relations on `(a₁, …, a₆)`:
    /// `a₁₀ = a₆`, `a₉ = 0`, `a₈ = (a₁a₂a₅ + a₁a₄)/a₃`,
    /// `a₇ = (−a₁²a₂²a₅ − a₁²a₂a₄ − a₃²a₅)/(a₁a₃)`.
    pub fn conformally_flat(a1: Q, a2: Q, a3: Q, a4: Q, a5: Q, a6: Q) -> Result<CoframeParams> {
        for (name, v) in [("a1", &a1), ("a3", &a3), ("a6", &a6)] {
            if !v.is_positive() {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        let a8 = a1.mul(&a2).mul(&a5).add(&a1.mul(&a4)).div(&a3).expect("a3 > 0");
        let a1sq = a1.square();
        let a7 = a1sq
            .mul(&a2.square())
            .mul(&a5)
            .neg()
            .sub(&a1sq.mul(&a2).mul(&a4))
            .sub(&a3.square().mul(&a5))
            .div(&a1.mul(&a3))
            .expect("a1 a3 > 0");
        CoframeParams::new([a1, a2, a3, a4, a5, a6.clone(), a7, a8, Q::zero(), a6])
    }

    pub fn get(&self, i: usize) -> &Q {
        &self.a[i - 1]
    }

    pub fn with(&self, i: usize, value: Q) -> Result<CoframeParams> {
        let mut a = self.a.clone();
        a[i - 1] = value;
        CoframeParams::new(a)
    }

    /// Rows are the coframe `f^i` in the `e^j` basis (lower triangular).
    pub fn coframe(&self) -> Matrix<Q> {
        let a = &self.a;
        let z = Q::zero;
        let r1 = [a[0].clone(), z(), z(), z()];
        let r2 = lin(&[(&a[1], &r1)], [z(), a[2].clone(), z(), z()]);
        let r3 = lin(&[(&a[3], &r1), (&a[4], &r2)], [z(), z(), a[5].clone(), z()]);
        let r4 = lin(
            &[(&a[6], &r1), (&a[7], &r2), (&a[8], &r3)],
            [z(), z(), z(), a[9].clone()],
        );
        Matrix::from_rows(vec![r1.to_vec(), r2.to_vec(), r3.to_vec(), r4.to_vec()]).expect("4x4")
    }
}

fn lin(terms: &[(&Q, &[Q; 4])], base: [Q; 4]) -> [Q; 4] {
    let mut out = base;
    for (c, row) in terms {
        for (o, r) in out.iter_mut().zip(row.iter()) {
            *o = o.add(&c.mul(r));
        }
    }
    out
}
