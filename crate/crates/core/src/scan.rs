//! Seeded sweeps over one catalog family: sample metrics, look for
//! almost-Kähler structures on each, and classify their Hermitian
//! holomorphic sectional curvature.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{ds_gram, CoframeParams, Family};
use crate::curvature::{curvature_blocks, MetricFrame, Orientation};
use crate::error::{Error, Result};
use crate::hermitian::{
    almost_kahler_structures, constant_h_test, nijenhuis, AlmostHermitianStructure, Compatibility, ConstantH,
};
use crate::lie::{InvariantForm, LieAlgebra};
use crate::linalg::Matrix;
use crate::sampling::{self, SampleRng};
use crate::scalar::{Field, Q};
use crate::scenarios::expressions;

pub const SCAN_SCHEMA: &str = "lieherm-scan/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFind {
    pub omega: Vec<Q>,
    pub kahler: bool,
    pub constant_h: ConstantH<Q>,
    /// `W⁻ = 0` in the orientation induced by the structure.
    pub self_dual: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub index: usize,
    pub params: Value,
    pub gram: Matrix<Q>,
    pub orientation: Orientation,
    pub scalar: Q,
    pub flat: bool,
    pub wplus_zero: bool,
    pub wminus_zero: bool,
    pub structures: Vec<StructureFind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCounts {
    pub metrics: usize,
    pub flat: usize,
    pub conformally_flat: usize,
    pub wplus_zero: usize,
    pub wminus_zero: usize,
    pub almost_kahler: usize,
    pub kahler: usize,
    pub constant_h: usize,
    pub non_constant_h: usize,
    /// Every structure with constant `H` found is self-dual.
    pub constant_h_self_dual: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub schema: String,
    pub family: Family,
    pub seed: u64,
    pub samples: usize,
    pub counts: ScanCounts,
    pub entries: Vec<ScanEntry>,
}

struct Sample {
    params: Value,
    algebra: LieAlgebra<Q>,
    metric: MetricFrame<Q>,
    /// Structures known in closed form; `None` means search.
    structures: Option<Vec<AlmostHermitianStructure<Q>>>,
}

fn draw(family: Family, rng: &mut SampleRng) -> Result<Sample> {
    match family {
        Family::DeSmedtSalamon => {
            // W⁺ = 0 is claimed for the diagonal family, so sample that family
            // up to homothety rather than arbitrary metrics.
            let lambda = Q::ratio(rng.gen_range(0..=10), rng.gen_range(1..=10));
            let k = Q::int(rng.gen_range(1..=2));
            let c = sampling::positive_rational(rng, 5);
            let algebra = family.algebra(Some(&lambda))?;
            let metric = MetricFrame::new(ds_gram(&k), Orientation::Positive)?.scaled(&c)?;
            Ok(Sample {
                params: json!({ "lambda": lambda, "k": k, "scale": c }),
                algebra,
                metric,
                structures: None,
            })
        }
        Family::R2Prime => {
            let a1 = sampling::positive_rational(rng, 10);
            let a4 = sampling::rational(rng, 10);
            let a5 = sampling::rational(rng, 10);
            let a6 = sampling::positive_rational(rng, 10);
            let t = sampling::rational(rng, 10);
            let params =
                CoframeParams::conformally_flat(a1.clone(), Q::zero(), a1.clone(), a4.clone(), a5.clone(), a6.clone())?;
            let algebra = family.algebra(None)?.change_basis(&params.coframe().inverse()?)?;
            let metric = MetricFrame::identity(4);
            let (b2, b3) = sampling::circle_point(&t);
            let (b4, b5) = expressions::closed_b4_b5(&params, &b2, &b3);
            let omega = InvariantForm::new(4, 2, vec![Q::zero(), b2, b3, b4, b5, Q::zero()])?;
            let structures = match AlmostHermitianStructure::from_metric_and_omega(&algebra, &metric, &omega)? {
                Compatibility::Compatible(s) => vec![s],
                Compatibility::Incompatible { .. } => Vec::new(),
            };
            Ok(Sample {
                params: json!({ "a": [a1.clone(), Q::zero(), a1, a4, a5, a6], "t": t, "frame": "orthonormal" }),
                algebra,
                metric,
                structures: Some(structures),
            })
        }
        Family::Abelian | Family::Rr30 => {
            let algebra = family.algebra(None)?;
            let metric = sampling::metric(rng, 4, 5);
            let structures = if family == Family::Abelian {
                Some(vec![sampling::compatible_structure(rng, &metric, 5)?])
            } else {
                None
            };
            Ok(Sample {
                params: json!({}),
                algebra,
                metric,
                structures,
            })
        }
    }
}

fn evaluate(index: usize, sample: Sample) -> Result<ScanEntry> {
    let Sample {
        params,
        algebra: g,
        metric: m,
        structures,
    } = sample;
    let blocks = curvature_blocks(&g, &m)?;
    let structures = match structures {
        Some(s) => s,
        None => match almost_kahler_structures(&g, &m) {
            Ok(s) => s,
            Err(Error::Underdetermined(_)) => Vec::new(),
            Err(e) => return Err(e),
        },
    };
    let mut finds = Vec::with_capacity(structures.len());
    for s in structures {
        let kahler = s.is_almost_kahler(&g)? && nijenhuis(&g, &s)?.is_zero();
        let induced = curvature_blocks(&g, &m.with_orientation(s.induced_orientation()))?;
        finds.push(StructureFind {
            omega: s.omega().coeffs().to_vec(),
            kahler,
            constant_h: constant_h_test(&g, &s)?,
            self_dual: induced.wminus.is_zero(),
        });
    }
    Ok(ScanEntry {
        index,
        params,
        gram: m.gram().clone(),
        orientation: m.orientation(),
        scalar: blocks.scalar.clone(),
        flat: blocks.operator.is_zero(),
        wplus_zero: blocks.wplus.is_zero(),
        wminus_zero: blocks.wminus.is_zero(),
        structures: finds,
    })
}

fn count(entries: &[ScanEntry]) -> ScanCounts {
    let finds = || entries.iter().flat_map(|e| &e.structures);
    let constant = |f: &StructureFind| matches!(f.constant_h, ConstantH::Constant { .. });
    ScanCounts {
        metrics: entries.len(),
        flat: entries.iter().filter(|e| e.flat).count(),
        conformally_flat: entries.iter().filter(|e| e.wplus_zero && e.wminus_zero).count(),
        wplus_zero: entries.iter().filter(|e| e.wplus_zero).count(),
        wminus_zero: entries.iter().filter(|e| e.wminus_zero).count(),
        almost_kahler: finds().count(),
        kahler: finds().filter(|f| f.kahler).count(),
        constant_h: finds().filter(|f| constant(f)).count(),
        non_constant_h: finds().filter(|f| !constant(f)).count(),
        constant_h_self_dual: finds().filter(|f| constant(f)).all(|f| f.self_dual),
    }
}

/// Samples are drawn serially from one seeded stream and evaluated in parallel,
/// so the summary depends only on `(family, samples, seed)`.
pub fn scan(family: Family, samples: usize, seed: u64) -> Result<ScanSummary> {
    let mut rng = sampling::rng(seed);
    let drawn = (0..samples)
        .map(|_| draw(family, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let entries = drawn
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| evaluate(i, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanSummary {
        schema: SCAN_SCHEMA.to_string(),
        family,
        seed,
        samples,
        counts: count(&entries),
        entries,
    })
}
