use nalgebra::{DMatrix, DVector};

use super::{bloch_messiah_stages, check_decoder_rows, partner, rows_of, stack_rows, DecoderSynthesizer, FactoredDecoder};
use crate::symplectic::SymplecticMatrix;
use crate::{Error, Result};

fn sp(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let k = x.len() / 2;
    (0..k).map(|i| x[i] * y[k + i] - x[k + i] * y[i]).sum()
}

/// Remove the symplectic components of `c` along the pairs `(es[i], fs[i])`.
fn symplectic_project(c: &DVector<f64>, es: &[DVector<f64>], fs: &[DVector<f64>]) -> DVector<f64> {
    let mut r = c.clone();
    for _ in 0..2 {
        for (e, f) in es.iter().zip(fs) {
            let a = sp(&r, f);
            let b = sp(&r, e);
            r.axpy(-a, e, 1.0);
            r.axpy(b, f, 1.0);
        }
    }
    r
}

/// Symplectic Gram-Schmidt: grow the conjugate pairs `(es, fs)` to `target`
/// pairs using the candidate with the largest projected norm at each step.
pub(crate) fn extend_symplectic_pairs(
    es: &mut Vec<DVector<f64>>,
    fs: &mut Vec<DVector<f64>>,
    candidates: &[DVector<f64>],
    target: usize,
) -> Result<()> {
    while es.len() < target {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for c in candidates {
            let res = symplectic_project(c, es, fs);
            let norm = res.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
                best = Some((norm, res));
            }
        }
        let (norm, res) = best.ok_or_else(|| Error::Synthesis("no completion candidates".into()))?;
        if norm < 1e-8 {
            return Err(Error::Synthesis("candidates exhausted before completing the basis".into()));
        }
        let e = res / norm;
        let f = symplectic_project(&partner(&e), es, fs);
        let f = &f / sp(&e, &f);
        es.push(e);
        fs.push(f);
    }
    Ok(())
}

/// Complete `D` (rows with `D J D^T = J`) to a symplectic matrix on `k`
/// modes, with `D` at rows `0..m` and `k..k+m`.
pub fn complete_symplectic_generic(d: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    let (m, k) = check_decoder_rows(d)?;
    let rows = rows_of(d);
    let mut es: Vec<DVector<f64>> = rows[..m].to_vec();
    let mut fs: Vec<DVector<f64>> = rows[m..].to_vec();
    let coords: Vec<DVector<f64>> =
        (0..2 * k).map(|i| DVector::from_fn(2 * k, |r, _| if r == i { 1.0 } else { 0.0 })).collect();
    extend_symplectic_pairs(&mut es, &mut fs, &coords, k)?;
    Ok(SymplecticMatrix::trusted(stack_rows(&es, &fs)))
}

/// Symplectic Gram-Schmidt completion, factored by Bloch-Messiah.
pub struct GenericSynthesizer;

impl DecoderSynthesizer for GenericSynthesizer {
    fn name(&self) -> &'static str {
        "generic"
    }

    fn synthesize(&self, d: &DMatrix<f64>) -> Result<FactoredDecoder> {
        let s = complete_symplectic_generic(d)?;
        FactoredDecoder::new(bloch_messiah_stages(&s)?, d.clone())
    }
}
