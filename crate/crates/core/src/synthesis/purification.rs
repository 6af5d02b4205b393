use nalgebra::{DMatrix, DVector};

use super::{
    bloch_messiah_stages, check_decoder_rows, partner, stack_rows, DecoderSynthesizer, FactoredDecoder, Stage,
    StageKind,
};
use crate::linalg::{best_coordinate_complement, j_matrix, project_out};
use crate::symplectic::{williamson, SymplecticMatrix};
use crate::synthesis::complete_symplectic_generic;
use crate::{Error, Result};

const SUBSPACE_RTOL: f64 = 1e-10;

/// Symplectic eigenvalues of `D D^T` above this count as mixed modes.
const MIXED_EPS: f64 = 1e-9;

/// A completion whose squeezing is confined to the modes spanned by `D`
/// and `J D^T`.
#[derive(Debug, Clone)]
pub struct Purification {
    pub decoder: FactoredDecoder,
    /// Symplectic eigenvalues of `D D^T`, descending.
    pub nu: Vec<f64>,
    /// Number of mixed modes of `D D^T` (`nu > 1`).
    pub mixed_modes: usize,
    /// Conjugate pairs added to `D` inside the invariant subspace.
    pub added_pairs: usize,
}

/// Orthonormal pairs `(x_i, -J x_i)` spanning the column space of
/// `[D^T | J D^T]`.
fn invariant_frame(d: &DMatrix<f64>, k: usize) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let dt = d.transpose();
    let jdt = j_matrix(k) * &dt;
    let mut gen = DMatrix::zeros(2 * k, 2 * dt.ncols());
    gen.columns_mut(0, dt.ncols()).copy_from(&dt);
    gen.columns_mut(dt.ncols(), dt.ncols()).copy_from(&jdt);
    let svd = gen.svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let basis: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > SUBSPACE_RTOL * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if basis.len() % 2 != 0 {
        return Err(Error::Synthesis(format!("invariant subspace has odd dimension {}", basis.len())));
    }

    let mut xs: Vec<DVector<f64>> = Vec::new();
    let mut ys: Vec<DVector<f64>> = Vec::new();
    while 2 * xs.len() < basis.len() {
        let span: Vec<DVector<f64>> = xs.iter().chain(ys.iter()).cloned().collect();
        let mut best: Option<(f64, DVector<f64>)> = None;
        for b in &basis {
            let res = project_out(b, &span);
            let norm = res.norm();
            if best.as_ref().map_or(true, |(n, _)| norm > *n + 1e-12) {
                best = Some((norm, res));
            }
        }
        let (norm, res) = best.expect("basis is non-empty");
        if norm < 1e-6 {
            return Err(Error::Synthesis("invariant subspace is not closed under J".into()));
        }
        let x = res / norm;
        let y = project_out(&partner(&x), &span);
        if (y.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Synthesis("invariant subspace is not closed under J".into()));
        }
        ys.push(y.normalize());
        xs.push(x);
    }
    Ok((xs, ys))
}

/// Complete `D` to a decoder whose active part lives on `p <= 2m` modes.
///
/// The rows of `D` lie in a J-invariant subspace of dimension `2p`. An
/// orthogonal-symplectic `O` rotates that subspace onto the first `p`
/// modes, where `D O^T` is completed symplectically; the remaining modes
/// pass through untouched.
pub fn purify_decoder(d: &DMatrix<f64>) -> Result<Purification> {
    let (m, k) = check_decoder_rows(d)?;
    let nu = williamson(&(d * d.transpose()))?.nu;
    let mixed_modes = nu.iter().filter(|&&v| v > 1.0 + MIXED_EPS).count();

    let (mut xs, mut ys) = invariant_frame(d, k)?;
    let p = xs.len();
    if p < m {
        return Err(Error::Synthesis(format!("invariant subspace too small: {p} < {m} modes")));
    }
    let frame = stack_rows(&xs, &ys);
    let local = d * frame.transpose();
    let small = complete_symplectic_generic(&local)?;

    while xs.len() < k {
        let span: Vec<DVector<f64>> = xs.iter().chain(ys.iter()).cloned().collect();
        let next = best_coordinate_complement(2 * k, &span)
            .ok_or_else(|| Error::Synthesis("orthogonal complement unexpectedly empty".into()))?;
        let next = project_out(&next, &span).normalize();
        ys.push(partner(&next));
        xs.push(next);
    }
    let o = stack_rows(&xs, &ys);

    let embed = |i: usize| if i < p { i } else { k + i - p };
    let mut active = DMatrix::identity(2 * k, 2 * k);
    for r in 0..2 * p {
        for c in 0..2 * p {
            active[(embed(r), embed(c))] = small.matrix()[(r, c)];
        }
    }

    let mut stages = vec![Stage::new(StageKind::Passive, o)];
    stages.extend(bloch_messiah_stages(&SymplecticMatrix::trusted(active))?);
    let decoder = FactoredDecoder::new(stages, d.clone())?;
    Ok(Purification { decoder, nu, mixed_modes, added_pairs: p - m })
}

/// The composed matrix of [`purify_decoder`].
pub fn purification_completion(d: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    Ok(purify_decoder(d)?.decoder.composed().clone())
}

pub struct PurificationSynthesizer;

impl DecoderSynthesizer for PurificationSynthesizer {
    fn name(&self) -> &'static str {
        "purification"
    }

    fn synthesize(&self, d: &DMatrix<f64>) -> Result<FactoredDecoder> {
        Ok(purify_decoder(d)?.decoder)
    }
}
