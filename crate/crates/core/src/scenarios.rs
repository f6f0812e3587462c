//! Verifiers that replay the case analysis behind "almost-Kähler with
//! pointwise constant Hermitian holomorphic sectional curvature implies
//! Kähler" on 4-dimensional Lie algebras. Each returns a
//! [`VerificationReport`] whose status is `pass` only when every exact check
//! holds.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::catalog::{ds_gram, CoframeParams, Family};
use crate::curvature::{curvature_blocks, levi_civita, riemann, weyl_tensor, FourTensor, MetricFrame, Orientation};
use crate::error::{Error, Result};
use crate::hermitian::{
    closed_forms, combine, compatibility_system, constant_h_test, nijenhuis, omega_in_frame, wplus_j_blocks,
    AlmostHermitianStructure, Compatibility, ConstantH, HermitianCurvature,
};
use crate::lie::{basis_vector, exterior_d, exterior_d_matrix, InvariantForm, LieAlgebra};
use crate::linalg::Matrix;
use crate::poly::{Poly, SolutionSet};
use crate::sampling;
use crate::scalar::{Field, Q};

pub const REPORT_SCHEMA: &str = "lieherm-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub claim: String,
    pub params: Value,
    pub status: Status,
    pub checks: Vec<Check>,
    pub evidence: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Only set on request; omitted by default so reports are reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn sub_claims(&self) -> Vec<&str> {
        self.sub_reports.iter().map(|r| r.claim.as_str()).collect()
    }
}

struct Recorder {
    claim: String,
    params: Value,
    checks: Vec<Check>,
    evidence: Map<String, Value>,
    subs: Vec<VerificationReport>,
    seed: Option<u64>,
}

impl Recorder {
    fn new(claim: ClaimId, params: Value) -> Recorder {
        Recorder {
            claim: claim.to_string(),
            params,
            checks: Vec::new(),
            evidence: Map::new(),
            subs: Vec::new(),
            seed: None,
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    fn evidence(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.evidence.insert(key.to_string(), v);
    }

    fn push_evidence(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        match self
            .evidence
            .entry(key.to_string())
            .or_insert_with(|| Value::Array(Vec::new()))
        {
            Value::Array(items) => items.push(v),
            other => *other = Value::Array(vec![v]),
        }
    }

    fn insufficient(mut self) -> VerificationReport {
        self.check(
            "insufficient samples",
            false,
            "no samples supplied; refusing a vacuous pass",
        );
        self.finish()
    }

    fn finish(self) -> VerificationReport {
        let ok = !self.checks.is_empty()
            && self.checks.iter().all(|c| c.passed)
            && self.subs.iter().all(VerificationReport::passed);
        VerificationReport {
            schema: REPORT_SCHEMA.to_string(),
            claim: self.claim,
            params: self.params,
            status: if ok { Status::Pass } else { Status::Fail },
            checks: self.checks,
            evidence: Value::Object(self.evidence),
            sub_reports: self.subs,
            seed: self.seed,
            elapsed_ms: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimId {
    DsKahler,
    AbelianRr30,
    R2PrimeConfFlat,
    R2PrimeAk,
    MainTheorem,
}

impl ClaimId {
    pub const ALL: [ClaimId; 5] = [
        ClaimId::DsKahler,
        ClaimId::AbelianRr30,
        ClaimId::R2PrimeConfFlat,
        ClaimId::R2PrimeAk,
        ClaimId::MainTheorem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::DsKahler => "dS-kahler",
            ClaimId::AbelianRr30 => "abelian-rr30",
            ClaimId::R2PrimeConfFlat => "r2prime-conf-flat",
            ClaimId::R2PrimeAk => "r2prime-ak",
            ClaimId::MainTheorem => "main-theorem",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClaimId> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown claim {s:?}")))
    }
}

// ---------------------------------------------------------------------------
// Shared helpers

fn q(n: i64) -> Q {
    Q::int(n)
}

fn form(coeffs: [Q; 6]) -> InvariantForm<Q> {
    InvariantForm::new(4, 2, coeffs.to_vec()).expect("six coefficients")
}

/// Rank of a family of forms, as coefficient vectors.
fn span_rank(forms: &[InvariantForm<Q>]) -> usize {
    if forms.is_empty() {
        return 0;
    }
    Matrix::from_rows(forms.iter().map(|f| f.coeffs().to_vec()).collect())
        .map(|m| m.rank())
        .unwrap_or(0)
}

fn same_span(a: &[InvariantForm<Q>], b: &[InvariantForm<Q>]) -> bool {
    let ra = span_rank(a);
    let rb = span_rank(b);
    let joint: Vec<InvariantForm<Q>> = a.iter().chain(b).cloned().collect();
    ra == rb && span_rank(&joint) == ra
}

/// `(algebra in the orthonormal frame, frame matrix P)` for an `r2prime` coframe.
fn r2prime_in_frame(params: &CoframeParams) -> Result<(LieAlgebra<Q>, Matrix<Q>)> {
    let g = Family::R2Prime.algebra(None)?;
    let p = params.coframe().inverse()?;
    Ok((g.change_basis(&p)?, p))
}

/// Weyl tensor of the metric given by `params`, in its orthonormal frame.
pub fn r2prime_frame_weyl(params: &CoframeParams) -> Result<FourTensor<Q>> {
    let (gf, _) = r2prime_in_frame(params)?;
    let m = MetricFrame::identity(4);
    let conn = levi_civita(&gf, &m)?;
    let r = riemann(&gf, &m, &conn)?;
    weyl_tensor(&m, &r)
}

/// Reference rational expressions for individual Weyl components of the
/// `r2prime` coframe metrics, as functions of `a = (a₁, …, a₁₀)`.
pub mod expressions {
    use super::*;

    fn a(p: &CoframeParams, i: usize) -> Q {
        p.get(i).clone()
    }

    /// `[a₂((a₉²−1)a₆²+a₁₀²)((a₉²+1)a₆²+a₁₀²)a₁ − 2a₁₀a₃a₆³a₉] / (a₁a₃²a₁₀²a₆²)`.
    pub fn w1323_generic(p: &CoframeParams) -> Q {
        let (a1, a2, a3, a6, a9, a10) = (a(p, 1), a(p, 2), a(p, 3), a(p, 6), a(p, 9), a(p, 10));
        let a6s = a6.square();
        let u = a9.square().sub(&q(1)).mul(&a6s).add(&a10.square());
        let v = a9.square().add(&q(1)).mul(&a6s).add(&a10.square());
        let num = a2
            .mul(&u)
            .mul(&v)
            .mul(&a1)
            .sub(&q(2).mul(&a10).mul(&a3).mul(&a6.pow(3)).mul(&a9));
        let den = a1.mul(&a3.square()).mul(&a10.square()).mul(&a6s);
        num.div(&den).expect("positive parameters")
    }

    /// The value of `a₂` that makes [`w1323_generic`] vanish, or `None` when
    /// `(a₉²−1)a₆² + a₁₀² = 0`.
    pub fn a2_solving_w1323(p: &CoframeParams) -> Option<Q> {
        let (a1, a3, a6, a9, a10) = (a(p, 1), a(p, 3), a(p, 6), a(p, 9), a(p, 10));
        let a6s = a6.square();
        let u = a9.square().sub(&q(1)).mul(&a6s).add(&a10.square());
        let v = a9.square().add(&q(1)).mul(&a6s).add(&a10.square());
        q(2).mul(&a10)
            .mul(&a3)
            .mul(&a6.pow(3))
            .mul(&a9)
            .div(&u.mul(&v).mul(&a1))
    }

    /// `(a₆²a₉²+a₁₀²−2a₁₀a₆+a₆²)(a₆²a₉²+a₁₀²+2a₁₀a₆+a₆²) / (−2a₃a₁₀(a₆²a₉²+a₁₀²−a₆²)a₆a₁)`,
    /// valid once `a₂` is given by [`a2_solving_w1323`].
    pub fn w1324_after_a2(p: &CoframeParams) -> Option<Q> {
        let (a1, a3, a6, a9, a10) = (a(p, 1), a(p, 3), a(p, 6), a(p, 9), a(p, 10));
        let base = a6.square().mul(&a9.square()).add(&a10.square());
        let cross = q(2).mul(&a10).mul(&a6);
        let num = base
            .sub(&cross)
            .add(&a6.square())
            .mul(&base.add(&cross).add(&a6.square()));
        let den = q(-2).mul(&a3).mul(&a10).mul(&base.sub(&a6.square())).mul(&a6).mul(&a1);
        num.div(&den)
    }

    /// `±a₆√(1 − a₁₀²/a₆²)/(a₁a₃a₁₀)` on the branch `(a₉²−1)a₆² + a₁₀² = 0`;
    /// returned as the magnitude `a₆|a₉|/(a₁a₃a₁₀)`.
    pub fn w1323_branch_magnitude(p: &CoframeParams) -> Q {
        let (a1, a3, a6, a9, a10) = (a(p, 1), a(p, 3), a(p, 6), a(p, 9), a(p, 10));
        a6.mul(&a9.abs())
            .div(&a1.mul(&a3).mul(&a10))
            .expect("positive parameters")
    }

    /// `(a₁a₂a₅ + a₁a₄ − a₃a₈)/(−4a₃²a₁)`, valid for `a₉ = 0`, `a₁₀ = a₆`.
    pub fn w1223_on_branch(p: &CoframeParams) -> Q {
        let (a1, a2, a3, a4, a5, a8) = (a(p, 1), a(p, 2), a(p, 3), a(p, 4), a(p, 5), a(p, 8));
        a1.mul(&a2)
            .mul(&a5)
            .add(&a1.mul(&a4))
            .sub(&a3.mul(&a8))
            .div(&q(-4).mul(&a3.square()).mul(&a1))
            .expect("positive parameters")
    }

    /// `(a₁²a₂²a₅ + a₁²a₂a₄ + a₁a₃a₇ + a₃²a₅)/(−4a₃²a₁²)`, valid for `a₉ = 0`,
    /// `a₁₀ = a₆` and `a₈ = (a₁a₂a₅ + a₁a₄)/a₃`.
    pub fn w2434_on_branch(p: &CoframeParams) -> Q {
        let (a1, a2, a3, a4, a5, a7) = (a(p, 1), a(p, 2), a(p, 3), a(p, 4), a(p, 5), a(p, 7));
        let a1s = a1.square();
        a1s.mul(&a2.square())
            .mul(&a5)
            .add(&a1s.mul(&a2).mul(&a4))
            .add(&a1.mul(&a3).mul(&a7))
            .add(&a3.square().mul(&a5))
            .div(&q(-4).mul(&a3.square()).mul(&a1s))
            .expect("positive parameters")
    }

    /// Closedness values `(b₄, b₅)` in terms of `(b₂, b₃)` (with `b₆ = 0`).
    pub fn closed_b4_b5(p: &CoframeParams, b2: &Q, b3: &Q) -> (Q, Q) {
        let (a1, a2, a3, a6) = (a(p, 1), a(p, 2), a(p, 3), a(p, 6));
        let b4 = a1
            .square()
            .mul(&a2)
            .mul(b2)
            .neg()
            .add(&a1.mul(&a3).mul(b3))
            .div(&a1.square().mul(&a2.square()).add(&a3.square()))
            .expect("a3 > 0");
        let b5 = a1
            .mul(&a2)
            .mul(&a6)
            .mul(&b4)
            .neg()
            .sub(&a1.mul(&a6).mul(b2))
            .div(&a3.mul(&a6))
            .expect("positive parameters");
        (b4, b5)
    }

    /// Expected `H(f₁), …, H(f₄)` on the conformally flat almost-Kähler family.
    pub fn h_list(a1: &Q, b2: &Q, b3: &Q) -> [Q; 4] {
        let a1s = a1.square();
        let two_a1s = q(2).mul(&a1s);
        [
            q(-1).div(&a1s).expect("a1 > 0"),
            q(-1).div(&two_a1s).expect("a1 > 0"),
            q(1).add(&b2.square()).neg().div(&two_a1s).expect("a1 > 0"),
            q(1).add(&b3.square()).neg().div(&two_a1s).expect("a1 > 0"),
        ]
    }
}

// ---------------------------------------------------------------------------
// dS: closed forms, compatibility, integrability, self-duality

/// Closed 2-forms `a e¹² + b e¹³ + c(−2e¹⁴ + e²³)` on the dS algebras.
pub fn ds_closed_basis() -> Vec<InvariantForm<Q>> {
    let z = Q::zero;
    vec![
        form([q(1), z(), z(), z(), z(), z()]),
        form([z(), q(1), z(), z(), z(), z()]),
        form([z(), z(), q(-2), q(1), z(), z()]),
    ]
}

/// The dS algebra with the sign of `[e₂, e₃]` flipped, for negative controls.
pub fn corrupted_ds_algebra(lambda: &Q) -> Result<LieAlgebra<Q>> {
    let g = Family::DeSmedtSalamon.algebra(Some(lambda))?;
    let entries: Vec<_> = g
        .bracket_entries()
        .into_iter()
        .map(|(i, j, k, v)| {
            if (i, j) == (1, 2) {
                (i, j, k, v.neg())
            } else {
                (i, j, k, v)
            }
        })
        .collect();
    LieAlgebra::from_brackets(4, &entries)
}

pub fn verify_ds_kahler(lambda: &Q) -> Result<VerificationReport> {
    let g = Family::DeSmedtSalamon.algebra(Some(lambda))?;
    verify_ds_kahler_with(lambda, &g)
}

/// Same checks on a caller-supplied algebra (used for negative controls).
pub fn verify_ds_kahler_with(lambda: &Q, g: &LieAlgebra<Q>) -> Result<VerificationReport> {
    if lambda.is_negative() {
        return Err(Error::Parameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let mut rec = Recorder::new(ClaimId::DsKahler, json!({ "lambda": lambda }));
    if let Err(e) = g.jacobi_check() {
        rec.check("jacobi", false, e.to_string());
        return Ok(rec.finish());
    }
    rec.check("jacobi", true, "");

    // dω for ω = Σ α_ij e^ij, rows e¹²³, e¹²⁴, e¹³⁴, e²³⁴
    let z = Q::zero;
    let expected = Matrix::from_rows(vec![
        vec![z(), z(), q(-1), q(-2), z(), z()],
        vec![z(), z(), z(), z(), q(-3), lambda.clone()],
        vec![z(), z(), z(), z(), lambda.neg(), q(-3)],
        vec![z(), z(), z(), z(), z(), z()],
    ])?;
    let d2 = exterior_d_matrix(g, 2)?;
    rec.check("d on 2-forms", d2 == expected, format!("{d2:?}"));

    let closed = closed_forms(g)?;
    let basis = ds_closed_basis();
    rec.check(
        "closed 2-forms = span{e12, e13, -2e14+e23}",
        closed.len() == 3 && same_span(&closed, &basis),
        format!("dimension {}", closed.len()),
    );

    let mut found = Vec::new();
    for k in [q(1), q(2)] {
        let m = MetricFrame::new(ds_gram(&k), Orientation::Positive)?;
        let solutions = compatibility_system(&m, &basis)?.solve_finite()?;
        let points = match &solutions {
            SolutionSet::Empty => Vec::new(),
            SolutionSet::Points(p) => p.clone(),
        };
        rec.push_evidence("compatible_abc", json!({ "k": k, "solutions": points }));
        for p in points {
            found.push((k.clone(), p));
        }
    }
    let expected_points = vec![(q(2), vec![q(0), q(0), q(-1)]), (q(2), vec![q(0), q(0), q(1)])];
    rec.check(
        "compatibility forces a = b = 0, c = +-1, k = 2",
        found == expected_points,
        format!("{} solutions", found.len()),
    );

    for (k, p) in &found {
        let m = MetricFrame::new(ds_gram(k), Orientation::Positive)?;
        let omega = combine(&basis, p)?;
        let Compatibility::Compatible(s) = AlmostHermitianStructure::from_metric_and_omega(g, &m, &omega)? else {
            rec.check("solution is compatible", false, format!("{omega:?}"));
            continue;
        };
        let n = nijenhuis(g, &s)?;
        let kahler = n.is_zero() && s.is_almost_kahler(g)?;
        rec.check(format!("J integrable (c = {})", p[2]), kahler, "");
        let lc = levi_civita(g, &m)?;
        let canon = crate::hermitian::canonical_connection(g, &m, &s)?;
        rec.check(format!("canonical = Levi-Civita (c = {})", p[2]), canon == lc, "");
        let induced = s.with_orientation(s.induced_orientation());
        let blocks = curvature_blocks(g, induced.metric())?;
        rec.check(
            format!("self-dual in the orientation of omega (c = {})", p[2]),
            blocks.wminus.is_zero() && !blocks.wplus.is_zero(),
            "",
        );
        let jb = wplus_j_blocks(g, &induced)?;
        rec.check(
            format!("W+ J-blocks reassemble (c = {})", p[2]),
            jb.reassemble() == blocks.wplus,
            "",
        );
        let verdict = constant_h_test(g, &s)?;
        rec.push_evidence(
            "kahler_structures",
            json!({
                "c": p[2],
                "omega": s.omega().coeffs(),
                "J": s.j(),
                "J_e1": s.j().col(0),
                "J_e2": s.j().col(1),
                "induced_orientation": induced.metric().orientation(),
                "constant_h": verdict,
                "j_blocks": jb,
            }),
        );
    }

    for k in [q(1), q(2)] {
        let m = MetricFrame::new(ds_gram(&k), Orientation::Positive)?;
        let natural = curvature_blocks(g, &m)?;
        let flipped = curvature_blocks(g, &m.flipped())?;
        rec.check(
            format!("W+ = 0, W- != 0 in natural orientation (k = {k})"),
            natural.wplus.is_zero() && !natural.wminus.is_zero(),
            "",
        );
        rec.check(
            format!("orientation flip swaps W+ and W- (k = {k})"),
            flipped.wplus == natural.wminus && flipped.wminus == natural.wplus,
            "",
        );
        rec.push_evidence(
            "blocks",
            json!({ "k": k, "wplus": natural.wplus, "wminus": natural.wminus, "scalar": natural.scalar }),
        );
    }
    Ok(rec.finish())
}

/// `dS-kahler` over a list of `λ` values.
pub fn verify_ds_kahler_all(lambdas: &[Q], corrupt: bool) -> Result<VerificationReport> {
    let mut rec = Recorder::new(ClaimId::DsKahler, json!({ "lambdas": lambdas }));
    if lambdas.is_empty() {
        return Ok(rec.insufficient());
    }
    for l in lambdas {
        let report = if corrupt {
            verify_ds_kahler_with(l, &corrupted_ds_algebra(l)?)?
        } else {
            verify_ds_kahler(l)?
        };
        rec.check(format!("lambda = {l}"), report.passed(), "");
        rec.subs.push(report);
    }
    Ok(rec.finish())
}

// ---------------------------------------------------------------------------
// abelian and rr30

/// `rr30` with the sign of `[e₂, e₃]` flipped, for negative controls.
pub fn corrupted_rr30_algebra() -> Result<LieAlgebra<Q>> {
    LieAlgebra::from_brackets(4, &[(0, 2, 1, q(-1)), (1, 2, 0, q(-1))])
}

fn fixed_flat_metrics(family: Family) -> Vec<Matrix<Q>> {
    let d = |v: [i64; 4]| Matrix::diagonal(&v.map(q));
    match family {
        Family::Rr30 => vec![d([1, 1, 1, 1]), d([4, 4, 1, 1]), d([1, 1, 9, 4])],
        _ => vec![d([1, 1, 1, 1]), d([9, 1, 4, 1])],
    }
}

pub fn verify_abelian_rr30(seed: u64, random_metrics: usize) -> Result<VerificationReport> {
    verify_abelian_rr30_with(seed, random_metrics, &Family::Rr30.algebra(None)?)
}

/// Same checks with a caller-supplied algebra in place of `rr30`.
pub fn verify_abelian_rr30_with(seed: u64, random_metrics: usize, rr30: &LieAlgebra<Q>) -> Result<VerificationReport> {
    let mut rec = Recorder::new(ClaimId::AbelianRr30, json!({ "random_metrics": random_metrics }));
    rec.seed = Some(seed);
    let mut rng = sampling::rng(seed);
    let algebras = [
        (Family::Abelian, Family::Abelian.algebra(None)?),
        (Family::Rr30, rr30.clone()),
    ];
    for (family, g) in &algebras {
        let name = family.name();
        if let Err(e) = g.jacobi_check() {
            rec.check(format!("{name}: jacobi"), false, e.to_string());
            continue;
        }
        let identity = MetricFrame::identity(4);
        let id_blocks = curvature_blocks(g, &identity)?;
        rec.check(
            format!("{name}: identity metric has zero curvature operator"),
            id_blocks.operator.is_zero(),
            "",
        );
        let mut metrics: Vec<MetricFrame<Q>> = fixed_flat_metrics(*family)
            .into_iter()
            .map(|gram| MetricFrame::new(gram, Orientation::Positive))
            .collect::<Result<_>>()?;
        for _ in 0..random_metrics {
            metrics.push(sampling::metric(&mut rng, 4, 5).with_orientation(Orientation::Positive));
        }
        let mut included = Vec::new();
        let mut excluded = 0usize;
        let mut flat_when_cf = true;
        for m in &metrics {
            let conn = levi_civita(g, m)?;
            let r = riemann(g, m, &conn)?;
            let w = weyl_tensor(m, &r)?;
            if w.is_zero() {
                flat_when_cf &= r.is_zero();
                included.push(m.clone());
            } else {
                excluded += 1;
            }
        }
        rec.check(
            format!("{name}: conformally flat samples have zero curvature operator"),
            flat_when_cf && !included.is_empty(),
            format!("{} included, {} excluded (W != 0)", included.len(), excluded),
        );
        rec.evidence(
            &format!("{name}_metrics"),
            json!({ "included": included.len(), "excluded": excluded }),
        );

        let mut structures = Vec::new();
        for m in &included {
            match crate::hermitian::almost_kahler_structures(g, m) {
                Ok(found) => structures.extend(found),
                Err(Error::Underdetermined(_)) => {
                    for _ in 0..2 {
                        let s = sampling::compatible_structure(&mut rng, m, 5)?;
                        if s.is_almost_kahler(g)? {
                            structures.push(s);
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let mut all_ok = !structures.is_empty();
        for s in &structures {
            let induced = s.with_orientation(s.induced_orientation());
            let jb = wplus_j_blocks(g, &induced)?;
            let n = nijenhuis(g, s)?;
            all_ok &= jb.topleft.is_zero() && n.is_zero();
        }
        rec.check(
            format!("{name}: almost-Kahler structures have topleft = 0 and N = 0"),
            all_ok,
            format!("{} structures", structures.len()),
        );
    }
    Ok(rec.finish())
}

// ---------------------------------------------------------------------------
// r2prime: conformally flat metrics

pub type ConfFlatSample = [Q; 6];

fn check_positive(sample: &ConfFlatSample) -> Result<()> {
    for i in [0, 2, 5] {
        if !sample[i].is_positive() {
            return Err(Error::Parameter(format!(
                "a{} must be positive, got {}",
                i + 1,
                sample[i]
            )));
        }
    }
    Ok(())
}

fn conf_flat_params(s: &ConfFlatSample) -> Result<CoframeParams> {
    let [a1, a2, a3, a4, a5, a6] = s.clone();
    CoframeParams::conformally_flat(a1, a2, a3, a4, a5, a6)
}

/// `n` tuples `(a₁, …, a₆)` with numerators and denominators at most 10.
pub fn default_conf_flat_samples(seed: u64, n: usize) -> Vec<ConfFlatSample> {
    let mut rng = sampling::rng(seed);
    (0..n)
        .map(|_| {
            let a1 = sampling::positive_rational(&mut rng, 10);
            let a2 = sampling::rational(&mut rng, 10);
            let a3 = sampling::positive_rational(&mut rng, 10);
            let a4 = sampling::rational(&mut rng, 10);
            let a5 = sampling::rational(&mut rng, 10);
            let a6 = sampling::positive_rational(&mut rng, 10);
            [a1, a2, a3, a4, a5, a6]
        })
        .collect()
}

/// Parameters `a₇, …, a₁₀` used to turn a conformally flat tuple into a
/// generic one for the component checks.
const GENERIC_TAILS: [[(i64, i64); 4]; 6] = [
    [(1, 3), (-2, 5), (2, 7), (3, 4)],
    [(-1, 2), (1, 1), (1, 3), (2, 1)],
    [(2, 1), (3, 7), (-3, 4), (1, 2)],
    [(0, 1), (-1, 1), (1, 5), (5, 3)],
    [(5, 2), (1, 6), (-2, 3), (7, 5)],
    [(-3, 8), (4, 9), (4, 5), (1, 1)],
];

fn generic_params(sample: &ConfFlatSample, tail: &[(i64, i64); 4]) -> Result<CoframeParams> {
    let mut a: Vec<Q> = sample.to_vec();
    a.extend(tail.iter().map(|&(n, d)| Q::ratio(n, d)));
    CoframeParams::new(a.try_into().expect("ten parameters"))
}

/// Degree in `a₂` of the frame Weyl components along the conformally flat
/// family (frame structure constants have degree ≤ 14, curvature is quadratic).
pub const CONF_FLAT_A2_DEGREE: usize = 28;

pub fn verify_r2prime_conf_flat(samples: &[ConfFlatSample]) -> Result<VerificationReport> {
    let params = samples
        .iter()
        .map(|s| {
            check_positive(s)?;
            conf_flat_params(s)
        })
        .collect::<Result<Vec<_>>>()?;
    verify_r2prime_conf_flat_params(samples, &params)
}

/// Runs the checks on explicit coframe parameters; `samples[i]` must be the
/// `(a₁, …, a₆)` part of `params[i]`.
pub fn verify_r2prime_conf_flat_params(
    samples: &[ConfFlatSample],
    params: &[CoframeParams],
) -> Result<VerificationReport> {
    let mut rec = Recorder::new(ClaimId::R2PrimeConfFlat, json!({ "samples": samples }));
    if params.is_empty() {
        return Ok(rec.insufficient());
    }
    let seventh = Q::ratio(1, 7);
    for (idx, p) in params.iter().enumerate() {
        let w = r2prime_frame_weyl(p)?;
        rec.check(format!("sample {idx}: relations give W = 0"), w.is_zero(), "");
        let g = Family::R2Prime.algebra(None)?;
        let m = MetricFrame::from_coframe(p.coframe(), Orientation::Positive)?;
        let blocks = curvature_blocks(&g, &m)?;
        rec.check(
            format!("sample {idx}: W+ = W- = 0"),
            blocks.wplus.is_zero() && blocks.wminus.is_zero(),
            "",
        );
        rec.check(
            format!("sample {idx}: scalar curvature < 0"),
            blocks.scalar.is_negative(),
            format!("s = {}", blocks.scalar),
        );
        rec.push_evidence("scalar_curvature", &blocks.scalar);
        for i in [10, 9, 8, 7] {
            let perturbed = p.with(i, p.get(i).add(&seventh))?;
            let wp = r2prime_frame_weyl(&perturbed)?;
            rec.check(format!("sample {idx}: a{i} + 1/7 gives W != 0"), !wp.is_zero(), "");
        }
    }

    // One-parameter sweep in a₂ along the conformally flat family.
    let base = &samples[0];
    let mut sweep_ok = true;
    for step in 0..=CONF_FLAT_A2_DEGREE as i64 {
        let mut s = base.clone();
        s[1] = Q::ratio(step - 14, 3);
        sweep_ok &= r2prime_frame_weyl(&conf_flat_params(&s)?)?.is_zero();
    }
    rec.check(
        "W = 0 identically in a2 (degree bound sweep)",
        sweep_ok,
        format!(
            "{} distinct a2 values, degree <= {}",
            CONF_FLAT_A2_DEGREE + 1,
            CONF_FLAT_A2_DEGREE
        ),
    );
    rec.evidence("a2_degree_bound", CONF_FLAT_A2_DEGREE);

    component_checks(&mut rec, samples)?;
    Ok(rec.finish())
}

/// Intermediate component formulas along the elimination.
fn component_checks(rec: &mut Recorder, samples: &[ConfFlatSample]) -> Result<()> {
    let (f1, f2, f3, f4) = (0, 1, 2, 3);
    let mut ratios = Vec::new();
    let mut w1324_ok = true;
    let mut w1324_count = 0;
    for (idx, tail) in GENERIC_TAILS.iter().enumerate() {
        let sample = &samples[idx % samples.len()];
        let p = generic_params(sample, tail)?;
        let w = r2prime_frame_weyl(&p)?;
        let reference = expressions::w1323_generic(&p);
        let computed = w.get(f1, f3, f2, f3).clone();
        ratios.push(if reference.is_zero() {
            None
        } else {
            computed.div(&reference)
        });

        if let Some(a2) = expressions::a2_solving_w1323(&p) {
            let p2 = p.with(2, a2)?;
            let w2 = r2prime_frame_weyl(&p2)?;
            if let Some(expected) = expressions::w1324_after_a2(&p2) {
                w1324_count += 1;
                w1324_ok &= w2.get(f1, f3, f2, f3).is_zero() && *w2.get(f1, f3, f2, f4) == expected;
            }
        }
    }
    let constant_ratio = ratios.iter().all(|r| r.is_some() && *r == ratios[0]);
    rec.check(
        "W(f1,f3,f2,f3) is a constant multiple of the reference quotient",
        constant_ratio,
        format!("ratios {ratios:?}"),
    );
    rec.evidence("w1323_ratio_to_reference", &ratios[0]);
    rec.check(
        "W(f1,f3,f2,f4) matches the reference quotient after solving for a2",
        w1324_ok && w1324_count > 0,
        format!("{w1324_count} tuples"),
    );

    // Branch (a₉²−1)a₆² + a₁₀² = 0 at a Pythagorean point.
    let mut branch_ok = true;
    let mut a2_undefined = true;
    for a9 in [Q::ratio(3, 5), Q::ratio(-3, 5)] {
        let mut s = samples[0].clone();
        s[5] = q(5);
        let p = generic_params(&s, &[(1, 2), (-1, 3), (0, 1), (4, 1)])?.with(9, a9)?;
        let w = r2prime_frame_weyl(&p)?;
        let v = w.get(f1, f3, f2, f3);
        branch_ok &= !v.is_zero() && v.abs() == expressions::w1323_branch_magnitude(&p);
        a2_undefined &= expressions::a2_solving_w1323(&p).is_none();
    }
    rec.check(
        "a6 = 5, a10 = 4, a9 = +-3/5: W(f1,f3,f2,f3) != 0 with the branch magnitude",
        branch_ok,
        "",
    );
    rec.evidence("branch_a2_substitution_undefined", a2_undefined);

    let mut w1223_ok = true;
    let mut w2434_ok = true;
    for (idx, tail) in GENERIC_TAILS.iter().enumerate() {
        let sample = &samples[idx % samples.len()];
        let mut p = generic_params(sample, tail)?;
        p = p.with(9, Q::zero())?.with(10, p.get(6).clone())?;
        let w = r2prime_frame_weyl(&p)?;
        w1223_ok &= *w.get(f1, f2, f2, f3) == expressions::w1223_on_branch(&p);
        let cf = conf_flat_params(sample)?;
        let p8 = p.with(8, cf.get(8).clone())?;
        let w8 = r2prime_frame_weyl(&p8)?;
        w2434_ok &= w8.get(f1, f2, f2, f3).is_zero() && *w8.get(f2, f4, f3, f4) == expressions::w2434_on_branch(&p8);
    }
    rec.check(
        "W(f1,f2,f2,f3) matches the reference quotient for a9 = 0, a10 = a6",
        w1223_ok,
        "",
    );
    rec.check(
        "W(f2,f4,f3,f4) matches the reference quotient once a8 is fixed",
        w2434_ok,
        "",
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// r2prime: almost-Kähler structures

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkSample {
    pub base: ConfFlatSample,
    pub t: Q,
}

/// The closed family `b₁f¹² + b₂f¹³ + b₃f¹⁴ + b₄f²³ + b₅f²⁴` with `(b₄, b₅)`
/// given by [`expressions::closed_b4_b5`], as a basis over `(b₁, b₂, b₃)`.
fn ak_family(p: &CoframeParams) -> Vec<InvariantForm<Q>> {
    let z = Q::zero;
    let mut out = vec![form([q(1), z(), z(), z(), z(), z()])];
    for (b2, b3) in [(q(1), q(0)), (q(0), q(1))] {
        let (b4, b5) = expressions::closed_b4_b5(p, &b2, &b3);
        out.push(form([z(), b2, b3, b4, b5, z()]));
    }
    out
}

/// Whether `(−Ω)² = −Id` admits a real solution over the closed family.
fn compatibility_feasible(p: &CoframeParams) -> Result<bool> {
    let sys = compatibility_system(&MetricFrame::identity(4), &ak_family(p))?;
    Ok(sys.relax()?.is_some())
}

pub fn verify_r2prime_ak(samples: &[AkSample]) -> Result<VerificationReport> {
    let mut rec = Recorder::new(ClaimId::R2PrimeAk, json!({ "samples": samples }));
    if samples.is_empty() {
        return Ok(rec.insufficient());
    }
    for s in samples {
        check_positive(&s.base)?;
    }
    let bases: Vec<ConfFlatSample> = samples.iter().map(|s| s.base.clone()).collect();
    rec.subs.push(verify_r2prime_conf_flat(&bases)?);

    let kappa = crate::hermitian::nijenhuis_scale::<Q>();
    rec.evidence("nijenhuis_scale", &kappa);
    for (idx, sample) in samples.iter().enumerate() {
        let general = conf_flat_params(&sample.base)?;
        let (gf, _) = r2prime_in_frame(&general)?;

        // closedness
        let closed = closed_forms(&gf)?;
        let family = ak_family(&general);
        let family_closed = family
            .iter()
            .map(|f| exterior_d(&gf, f).map(|d| d.is_zero()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        rec.check(
            format!("sample {idx}: closedness forces b6 = 0 and the reference b4, b5"),
            family_closed && closed.len() == 3 && same_span(&closed, &family),
            format!("closed dimension {}", closed.len()),
        );

        // compatibility rules out a2 != 0 and a3 != a1
        let [a1, _, _, a4, a5, a6] = sample.base.clone();
        let special =
            CoframeParams::conformally_flat(a1.clone(), q(0), a1.clone(), a4.clone(), a5.clone(), a6.clone())?;
        let off_a2 = CoframeParams::conformally_flat(a1.clone(), q(1), a1.clone(), a4.clone(), a5.clone(), a6.clone())?;
        let off_a3 =
            CoframeParams::conformally_flat(a1.clone(), q(0), a1.add(&q(1)), a4.clone(), a5.clone(), a6.clone())?;
        let generic_is_special = general.get(2).is_zero() && general.get(3) == general.get(1);
        rec.check(
            format!("sample {idx}: J^2 = -Id forces a2 = 0 and a3 = a1"),
            compatibility_feasible(&general)? == generic_is_special
                && compatibility_feasible(&special)?
                && !compatibility_feasible(&off_a2)?
                && !compatibility_feasible(&off_a3)?,
            "",
        );
        let sys = compatibility_system(&MetricFrame::identity(4), &ak_family(&special))?;
        let relax = sys
            .relax()?
            .ok_or_else(|| Error::Parameter("special family infeasible".into()))?;
        let b = |i: usize| Poly::var(3, i);
        let b1_sq = relax.implied_value(&b(0).mul(&b(0)));
        let circle = relax.implied_value(&b(1).mul(&b(1)).add(&b(2).mul(&b(2))));
        rec.check(
            format!("sample {idx}: J^2 = -Id forces b1 = 0 and b2^2 + b3^2 = 1"),
            b1_sq == Some(q(0)) && circle == Some(q(1)),
            format!("b1^2 = {b1_sq:?}, b2^2 + b3^2 = {circle:?}"),
        );
        let (gs, _) = r2prime_in_frame(&special)?;
        let id = MetricFrame::identity(4);
        let degenerate = AlmostHermitianStructure::from_metric_and_omega(&gs, &id, &ak_family(&special)[0]);
        rec.check(
            format!("sample {idx}: b1 != 0 forces b2 = b3 = 0 and a degenerate omega"),
            degenerate == Err(Error::DegenerateForm),
            "",
        );

        // the structure at (b₂, b₃) on the unit circle
        let (b2, b3) = sampling::circle_point(&sample.t);
        let (b4, b5) = expressions::closed_b4_b5(&special, &b2, &b3);
        let omega = form([q(0), b2.clone(), b3.clone(), b4.clone(), b5.clone(), q(0)]);
        let Compatibility::Compatible(st) = AlmostHermitianStructure::from_metric_and_omega(&gs, &id, &omega)? else {
            rec.check(format!("sample {idx}: omega compatible"), false, format!("{omega:?}"));
            continue;
        };
        rec.check(
            format!("sample {idx}: almost-Kahler"),
            st.is_almost_kahler(&gs)? && st.invariants_hold(),
            "",
        );
        let n = nijenhuis(&gs, &st)?;
        let f = |i: usize| basis_vector::<Q>(4, i);
        let n12 = n.eval(&f(0), &f(1));
        let factor = b2.square().add(&b3.square()).div(&q(2).mul(&a1)).expect("a1 > 0");
        let expected_n12: Vec<Q> = f(1).iter().map(|x| x.mul(&factor)).collect();
        rec.check(
            format!("sample {idx}: N(f1,f2) = (b2^2+b3^2)/(2a1) f2"),
            n12 == expected_n12 && !n.is_zero(),
            format!("{n12:?}"),
        );
        let curv = HermitianCurvature::new(&gs, &st)?;
        let hs = (0..4).map(|i| curv.h(&f(i))).collect::<Result<Vec<_>>>()?;
        let expected_h = expressions::h_list(&a1, &b2, &b3);
        rec.check(format!("sample {idx}: H(f1..f4)"), hs == expected_h, format!("{hs:?}"));
        let verdict = constant_h_test(&gs, &st)?;
        let witness_ok = matches!(
            &verdict,
            ConstantH::NonConstant { x1, x2, .. } if *x1 == f(0) && *x2 == f(1)
        );
        rec.check(
            format!("sample {idx}: H is not pointwise constant (witness f1, f2)"),
            witness_ok,
            "",
        );
        let jb = wplus_j_blocks(&gs, &st)?;
        let blocks = curvature_blocks(&gs, &id)?;
        rec.check(
            format!("sample {idx}: W+ J-blocks: topleft = 0, reassembly, norm identity"),
            jb.topleft.is_zero()
                && jb.reassemble() == blocks.wplus
                && jb.block_norm_sq() == blocks.wplus.frobenius_sq(),
            "",
        );
        let naive = n.norm_sq(&id);
        rec.push_evidence(
            "structures",
            json!({
                "a1": a1,
                "t": sample.t,
                "b": [q(0), b2, b3, b4, b5, q(0)],
                "omega_frame": omega_in_frame(&st)?,
                "J": st.j(),
                "N_f1_f2": n12,
                "H": hs,
                "constant_h": verdict,
                "scalar": blocks.scalar,
                "nj_norm_sq_operational": jb.nj_norm_sq(),
                "nj_norm_sq_naive": naive,
                "operational_over_naive": jb.nj_norm_sq().div(&naive),
            }),
        );
    }
    Ok(rec.finish())
}

// ---------------------------------------------------------------------------
// composition

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeControl {
    /// Flip the sign of one dS bracket.
    DsBracketSign,
    /// Replace `rr30` by an algebra with a flipped bracket sign.
    Rr30BracketSign,
    /// Perturb `a₉` by 1/7 in every conformally flat sample.
    R2PrimeRelation,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub lambdas: Vec<Q>,
    pub conf_flat: Vec<ConfFlatSample>,
    pub circle: Vec<Q>,
    pub random_metrics: usize,
    pub negative_control: Option<NegativeControl>,
}

impl ScenarioConfig {
    pub fn with_seed(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            seed,
            lambdas: vec![q(0), Q::ratio(1, 2), q(1), q(3)],
            conf_flat: default_conf_flat_samples(seed, 5),
            circle: vec![q(0), Q::ratio(1, 2), q(1), q(3), Q::ratio(-2, 3)],
            random_metrics: 4,
            negative_control: None,
        }
    }

    /// Conformally flat tuples paired with circle parameters (cycling the shorter list).
    pub fn ak_samples(&self) -> Vec<AkSample> {
        if self.conf_flat.is_empty() || self.circle.is_empty() {
            return Vec::new();
        }
        let n = self.conf_flat.len().max(self.circle.len());
        (0..n)
            .map(|i| AkSample {
                base: self.conf_flat[i % self.conf_flat.len()].clone(),
                t: self.circle[i % self.circle.len()].clone(),
            })
            .collect()
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig::with_seed(0)
    }
}

/// The three cases in proof order: non-conformally-flat (dS), then the
/// conformally flat algebras.
pub const PROOF_ORDER: [ClaimId; 3] = [ClaimId::DsKahler, ClaimId::AbelianRr30, ClaimId::R2PrimeAk];

pub fn verify_main_theorem(cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let mut rec = Recorder::new(
        ClaimId::MainTheorem,
        json!({
            "lambdas": cfg.lambdas,
            "conf_flat": cfg.conf_flat,
            "circle": cfg.circle,
            "random_metrics": cfg.random_metrics,
            "negative_control": cfg.negative_control.map(|c| format!("{c:?}")),
        }),
    );
    rec.seed = Some(cfg.seed);
    if cfg.lambdas.is_empty() || cfg.conf_flat.is_empty() || cfg.circle.is_empty() {
        return Ok(rec.insufficient());
    }
    let control = cfg.negative_control;
    let ds = verify_ds_kahler_all(&cfg.lambdas, control == Some(NegativeControl::DsBracketSign))?;
    let ab = if control == Some(NegativeControl::Rr30BracketSign) {
        verify_abelian_rr30_with(cfg.seed, cfg.random_metrics, &corrupted_rr30_algebra()?)?
    } else {
        verify_abelian_rr30(cfg.seed, cfg.random_metrics)?
    };
    let ak = if control == Some(NegativeControl::R2PrimeRelation) {
        let samples = cfg.ak_samples();
        let mut report = verify_r2prime_ak(&samples)?;
        let params = cfg
            .conf_flat
            .iter()
            .map(|s| conf_flat_params(s).and_then(|p| p.with(9, Q::ratio(1, 7))))
            .collect::<Result<Vec<_>>>()?;
        report.sub_reports[0] = verify_r2prime_conf_flat_params(&cfg.conf_flat, &params)?;
        if !report.sub_reports[0].passed() {
            report.status = Status::Fail;
        }
        report
    } else {
        verify_r2prime_ak(&cfg.ak_samples())?
    };
    let mut failed = Vec::new();
    for report in [ds, ab, ak] {
        let passed = report.passed();
        if !passed {
            failed.push(report.claim.clone());
        }
        rec.check(report.claim.clone(), passed, "");
        rec.subs.push(report);
    }
    rec.evidence(
        "proof_order",
        PROOF_ORDER.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
    );
    rec.evidence("failed_sub_claims", &failed);
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_ids_round_trip() {
        for c in ClaimId::ALL {
            assert_eq!(c.as_str().parse::<ClaimId>().unwrap(), c);
        }
        assert!("bogus".parse::<ClaimId>().is_err());
    }

    #[test]
    fn ds_kahler_passes() {
        let r = verify_ds_kahler(&q(1)).unwrap();
        assert!(r.passed(), "{:#?}", r.failed_checks());
    }

    #[test]
    fn negative_lambda_is_rejected() {
        assert!(verify_ds_kahler(&q(-1)).is_err());
    }

    #[test]
    fn empty_samples_fail() {
        let r = verify_r2prime_conf_flat(&[]).unwrap();
        assert!(!r.passed());
        assert!(r.check("insufficient samples").is_some());
    }
}
