//! Turning a decoding matrix `D` into an explicit Gaussian decoder.
//!
//! A decoder is a symplectic matrix on the party's `k` modes whose rows
//! `0..m` and `k..k+m` are the rows of `D`, stored together with a sequence
//! of physically meaningful factors. Completion strategies implement
//! [`DecoderSynthesizer`] and are selected by name from a
//! [`SynthesizerRegistry`].

mod generic;
mod purification;
mod single_mode;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linalg::{j_matrix, max_abs_diff};
use crate::symplectic::{bloch_messiah, symplectic_defect, SymplecticMatrix};
use crate::{Error, Result};

pub use generic::{complete_symplectic_generic, GenericSynthesizer};
pub use purification::{purification_completion, purify_decoder, Purification, PurificationSynthesizer};
pub use single_mode::{complete_m1, SingleModeSynthesizer};

/// Tolerance for the embedding and symplecticity contracts.
pub const SYNTHESIS_TOL: f64 = 1e-8;

/// Squeezing magnitudes at or below this are numerical residue.
pub const SQUEEZER_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Passive,
    Squeezer,
    Shear,
    ControlledZ,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub kind: StageKind,
    pub matrix: SymplecticMatrix,
}

impl Stage {
    pub fn new(kind: StageKind, matrix: DMatrix<f64>) -> Self {
        Self { kind, matrix: SymplecticMatrix::trusted(matrix) }
    }
}

/// A synthesized decoder. `stages` are listed in the order they act, so
/// `composed = stages[last] * ... * stages[0]`.
#[derive(Debug, Clone)]
pub struct FactoredDecoder {
    stages: Vec<Stage>,
    composed: SymplecticMatrix,
    source: DMatrix<f64>,
}

impl FactoredDecoder {
    /// Compose the stages and check the decoder contract against `source`.
    pub fn new(stages: Vec<Stage>, source: DMatrix<f64>) -> Result<Self> {
        let dim = source.ncols();
        let mut composed = DMatrix::identity(dim, dim);
        for stage in &stages {
            if stage.matrix.matrix().nrows() != dim {
                return Err(Error::Synthesis(format!(
                    "stage of dimension {} does not act on {dim} quadratures",
                    stage.matrix.matrix().nrows()
                )));
            }
            composed = stage.matrix.matrix() * composed;
        }
        let out = Self { stages, composed: SymplecticMatrix::trusted(composed), source };
        let embed = out.embedding_error();
        let sympl = symplectic_defect(out.composed.matrix())?;
        if embed > SYNTHESIS_TOL || sympl > SYNTHESIS_TOL {
            return Err(Error::Synthesis(format!(
                "decoder contract violated: embedding error {embed:.3e}, symplectic defect {sympl:.3e}"
            )));
        }
        Ok(out)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn composed(&self) -> &SymplecticMatrix {
        &self.composed
    }

    pub fn source(&self) -> &DMatrix<f64> {
        &self.source
    }

    /// Max-abs difference between `D` and the designated rows of `composed`.
    pub fn embedding_error(&self) -> f64 {
        let picked = designated_rows(self.composed.matrix(), self.source.nrows() / 2);
        max_abs_diff(&picked, &self.source)
    }

    pub fn squeezer_budget(&self) -> Result<SqueezerBudget> {
        squeezer_budget(&self.composed)
    }
}

/// Rows `0..m` and `k..k+m` of a `2k x 2k` matrix.
pub fn designated_rows(s: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let k = s.nrows() / 2;
    DMatrix::from_fn(2 * m, s.ncols(), |r, c| {
        let src = if r < m { r } else { k + r - m };
        s[(src, c)]
    })
}

/// Check `D J D^T = J` and the shape of `D`; returns `(m, k)`.
pub(crate) fn check_decoder_rows(d: &DMatrix<f64>) -> Result<(usize, usize)> {
    if d.nrows() == 0 || d.nrows() % 2 != 0 || d.ncols() % 2 != 0 || d.ncols() < d.nrows() {
        return Err(Error::Dimension(format!("D must be 2m x 2k with k >= m, got {:?}", d.shape())));
    }
    let (m, k) = (d.nrows() / 2, d.ncols() / 2);
    let defect = max_abs_diff(&(d * j_matrix(k) * d.transpose()), &j_matrix(m));
    if defect > SYNTHESIS_TOL {
        return Err(Error::Validation(format!(
            "rows of D are not a partial symplectic basis: |DJD^T - J|max = {defect:.3e}"
        )));
    }
    Ok((m, k))
}

/// Rows of a `2k`-column matrix as vectors.
pub(crate) fn rows_of(d: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..d.nrows()).map(|r| d.row(r).transpose()).collect()
}

/// `-J x`: the momentum partner of a position row under a passive frame.
pub(crate) fn partner(x: &DVector<f64>) -> DVector<f64> {
    let k = x.len() / 2;
    DVector::from_fn(2 * k, |i, _| if i < k { -x[k + i] } else { x[i - k] })
}

/// Stack `q_rows` then `p_rows` into a matrix.
pub(crate) fn stack_rows(q_rows: &[DVector<f64>], p_rows: &[DVector<f64>]) -> DMatrix<f64> {
    let dim = q_rows.first().or(p_rows.first()).map_or(0, |v| v.len());
    let mut out = DMatrix::zeros(q_rows.len() + p_rows.len(), dim);
    for (i, r) in q_rows.iter().chain(p_rows.iter()).enumerate() {
        out.set_row(i, &r.transpose());
    }
    out
}

/// Factor an arbitrary completion into passive, squeezer, passive stages.
pub(crate) fn bloch_messiah_stages(s: &SymplecticMatrix) -> Result<Vec<Stage>> {
    let f = bloch_messiah(s, SYNTHESIS_TOL)?;
    Ok(vec![
        Stage::new(StageKind::Passive, f.right.matrix()),
        Stage::new(StageKind::Squeezer, crate::symplectic::squeezer_matrix(&f.squeeze).into_inner()),
        Stage::new(StageKind::Passive, f.left.matrix()),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezerBudget {
    pub count: usize,
    pub magnitudes: Vec<f64>,
}

/// Count single-mode squeezers in the Bloch-Messiah form of `s`.
pub fn squeezer_budget(s: &SymplecticMatrix) -> Result<SqueezerBudget> {
    let f = bloch_messiah(s, SYNTHESIS_TOL)?;
    let mut magnitudes: Vec<f64> =
        f.squeeze.r.iter().map(|r| r.abs()).filter(|&r| r > SQUEEZER_THRESHOLD).collect();
    magnitudes.sort_by(|a, b| b.total_cmp(a));
    Ok(SqueezerBudget { count: magnitudes.len(), magnitudes })
}

/// A strategy for completing `D` to a factored decoder.
pub trait DecoderSynthesizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn synthesize(&self, d: &DMatrix<f64>) -> Result<FactoredDecoder>;
}

pub struct SynthesizerRegistry {
    entries: Vec<Box<dyn DecoderSynthesizer>>,
}

impl SynthesizerRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(GenericSynthesizer));
        reg.register(Box::new(SingleModeSynthesizer));
        reg.register(Box::new(PurificationSynthesizer));
        reg
    }

    pub fn register(&mut self, s: Box<dyn DecoderSynthesizer>) {
        self.entries.retain(|e| e.name() != s.name());
        self.entries.push(s);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn DecoderSynthesizer> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "synthesizer",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

pub fn synthesizers() -> &'static SynthesizerRegistry {
    static REGISTRY: OnceLock<SynthesizerRegistry> = OnceLock::new();
    REGISTRY.get_or_init(SynthesizerRegistry::with_defaults)
}

/// Run the named synthesizer, falling back to `generic` if it fails with a
/// synthesis error.
pub fn synthesize_with_fallback(name: &str, d: &DMatrix<f64>) -> Result<FactoredDecoder> {
    match synthesizers().get(name)?.synthesize(d) {
        Err(Error::Synthesis(_)) if name != "generic" => GenericSynthesizer.synthesize(d),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{squeezer_matrix, SqueezerProfile};

    #[test]
    fn budget_examples() {
        let b = squeezer_budget(&SymplecticMatrix::identity(3)).unwrap();
        assert_eq!(b.count, 0);
        let b = squeezer_budget(&squeezer_matrix(&SqueezerProfile::new(vec![0.3, 0.0]))).unwrap();
        assert_eq!(b.count, 1);
        assert!((b.magnitudes[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(synthesizers().names(), vec!["generic", "single-mode", "purification"]);
        assert!(synthesizers().get("magic").is_err());
    }

    #[test]
    fn bad_rows_rejected() {
        let d = DMatrix::from_row_slice(2, 4, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        for name in synthesizers().names() {
            assert!(synthesizers().get(name).unwrap().synthesize(&d).is_err(), "{name}");
        }
    }

    #[test]
    fn designated_rows_pick() {
        let s = DMatrix::from_fn(6, 6, |r, c| (10 * r + c) as f64);
        let p = designated_rows(&s, 1);
        assert_eq!(p.row(0)[0], 0.0);
        assert_eq!(p.row(1)[0], 30.0);
    }
}
