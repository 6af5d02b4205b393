//! JSON-serializable analysis of a scheme's parties.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::sym_eigen_sorted;
use crate::sharing::{decoding_plan, recoverable_count, AccessClass, PlayerSubset, SharingScheme};
use crate::Result;

/// A dense matrix as `rows`, `cols` and row-major `data`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixJson {
    fn from(a: &DMatrix<f64>) -> Self {
        Self { rows: a.nrows(), cols: a.ncols(), data: a.transpose().as_slice().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderReport {
    pub d: MatrixJson,
    pub b: MatrixJson,
    pub trace_bbt: f64,
    pub lambda_max_bbt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetReport {
    pub subset: String,
    pub players: PlayerSubset,
    pub decodable: bool,
    pub recoverable: usize,
    pub class: AccessClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<DecoderReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub m: usize,
    pub threshold: usize,
    pub subsets: Vec<SubsetReport>,
}

/// Largest eigenvalue of `B B^T`.
pub fn lambda_max_bbt(b: &DMatrix<f64>) -> f64 {
    let gram = b * b.transpose();
    sym_eigen_sorted(&gram).0.last().copied().unwrap_or(0.0)
}

pub fn analyze_subset(scheme: &SharingScheme, subset: &PlayerSubset) -> Result<SubsetReport> {
    let recoverable = recoverable_count(scheme, subset)?;
    let plan = decoding_plan(scheme, subset)?;
    let decoder = plan.matrices.as_ref().map(|dec| DecoderReport {
        d: (&dec.d).into(),
        b: (&dec.b).into(),
        trace_bbt: (&dec.b * dec.b.transpose()).trace(),
        lambda_max_bbt: lambda_max_bbt(&dec.b),
    });
    Ok(SubsetReport {
        subset: subset.label(),
        players: subset.clone(),
        decodable: plan.decodable(),
        recoverable,
        class: AccessClass::from_count(recoverable, scheme.secret_modes()),
        decoder,
    })
}

/// Analyze the given subsets in parallel; output keeps the input order.
pub fn analyze(scheme: &SharingScheme, subsets: &[PlayerSubset]) -> Result<AnalysisReport> {
    let subsets = subsets.par_iter().map(|s| analyze_subset(scheme, s)).collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        n: scheme.ancillas(),
        m: scheme.secret_modes(),
        threshold: scheme.threshold(),
        subsets,
    })
}
