use nalgebra::{DMatrix, DVector};

use super::{check_decoder_rows, partner, stack_rows, DecoderSynthesizer, FactoredDecoder, Stage, StageKind};
use crate::linalg::{best_coordinate_complement, project_out};
use crate::{Error, Result};

/// Strength of the controlled-Z below which it is dropped.
const CZ_EPS: f64 = 1e-12;

/// Structured decoder for a single-mode secret.
///
/// Stages, in order: the orthogonal-symplectic frame `O1` built from
/// `x/|x|`; a squeezer rescaling mode 1 by `|x|`; a shear removing the `x`
/// component of the momentum row; a passive stage rotating modes `2..k` so
/// the leftover momentum correction sits on mode 2 alone; and one
/// controlled-Z between modes 1 and 2. All squeezing acts on modes 1 and 2,
/// so the decoder needs at most two single-mode squeezers.
pub fn complete_m1(d: &DMatrix<f64>) -> Result<FactoredDecoder> {
    let (m, k) = check_decoder_rows(d)?;
    if m != 1 {
        return Err(Error::Dimension(format!("complete_m1 needs a 2-row D, got {} rows", d.nrows())));
    }
    let x: DVector<f64> = d.row(0).transpose();
    let y: DVector<f64> = d.row(1).transpose();
    let dim = 2 * k;

    // O1: orthonormal frame x_1..x_k with partners y_j = -J x_j.
    let x_norm = x.norm();
    let mut xs = vec![&x / x_norm];
    let mut ys = vec![partner(&xs[0])];
    while xs.len() < k {
        let span: Vec<DVector<f64>> = xs.iter().chain(ys.iter()).cloned().collect();
        let next = best_coordinate_complement(dim, &span)
            .ok_or_else(|| Error::Synthesis("orthogonal complement unexpectedly empty".into()))?;
        let next = project_out(&next, &span).normalize();
        ys.push(partner(&next));
        xs.push(next);
    }
    let o1 = stack_rows(&xs, &ys);

    let mut k1 = DMatrix::identity(dim, dim);
    k1[(0, 0)] = x_norm;
    k1[(k, k)] = 1.0 / x_norm;

    // y = alpha_1 x + sum_j (alpha_j x_j + beta_j y_j) + y_1 / |x|
    let alpha1 = y.dot(&xs[0]) / x_norm;
    let mut shear = DMatrix::identity(dim, dim);
    shear[(k, 0)] = alpha1;

    let mut stages = vec![
        Stage::new(StageKind::Passive, o1),
        Stage::new(StageKind::Squeezer, k1),
        Stage::new(StageKind::Shear, shear),
    ];
    if k == 1 {
        return FactoredDecoder::new(stages, d.clone());
    }

    // Mode-wise rotations: alpha_j x_j + beta_j y_j = eta_j (cos t x_j - sin t y_j).
    let mut eta = Vec::with_capacity(k - 1);
    let mut o2 = DMatrix::identity(dim, dim);
    for j in 1..k {
        let a = y.dot(&xs[j]);
        let b = y.dot(&ys[j]);
        let e = a.hypot(b);
        let theta = (-b).atan2(a);
        let (s, c) = theta.sin_cos();
        o2[(j, j)] = c;
        o2[(j, k + j)] = -s;
        o2[(k + j, j)] = s;
        o2[(k + j, k + j)] = c;
        eta.push(e);
    }
    let strength = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
    if strength <= CZ_EPS {
        stages.push(Stage::new(StageKind::Passive, o2));
        return FactoredDecoder::new(stages, d.clone());
    }

    // O3: orthogonal Q on modes 2..k whose first row is eta / |eta|.
    let eta_hat = DVector::from_vec(eta) / strength;
    let mut q_rows = vec![eta_hat];
    while q_rows.len() < k - 1 {
        let next = best_coordinate_complement(k - 1, &q_rows)
            .ok_or_else(|| Error::Synthesis("failed to complete the mode rotation".into()))?;
        let next = project_out(&next, &q_rows).normalize();
        q_rows.push(next);
    }
    let mut o3 = DMatrix::identity(dim, dim);
    for (a, row) in q_rows.iter().enumerate() {
        for b in 0..k - 1 {
            o3[(1 + a, 1 + b)] = row[b];
            o3[(k + 1 + a, k + 1 + b)] = row[b];
        }
    }
    stages.push(Stage::new(StageKind::Passive, o3 * o2));

    let mut cz = DMatrix::identity(dim, dim);
    cz[(k, 1)] = strength;
    cz[(k + 1, 0)] = strength;
    stages.push(Stage::new(StageKind::ControlledZ, cz));
    FactoredDecoder::new(stages, d.clone())
}

pub struct SingleModeSynthesizer;

impl DecoderSynthesizer for SingleModeSynthesizer {
    fn name(&self) -> &'static str {
        "single-mode"
    }

    fn synthesize(&self, d: &DMatrix<f64>) -> Result<FactoredDecoder> {
        complete_m1(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::symplectic::{is_symplectic, orthogonal_defect};

    #[test]
    fn k_equals_one() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.1, 0.515]);
        let f = complete_m1(&d).unwrap();
        assert_eq!(f.stages().len(), 3);
        assert!(max_abs_diff(f.composed().matrix(), &d) < 1e-12);
        let kinds: Vec<_> = f.stages().iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StageKind::Passive, StageKind::Squeezer, StageKind::Shear]);
    }

    #[test]
    fn orthosymplectic_rows_need_no_squeezing() {
        // rows of a passive 3-mode matrix at positions 0 and 3
        let c = 0.6f64;
        let s = 0.8f64;
        let d = DMatrix::from_row_slice(2, 6, &[c, 0.0, 0.0, -s, 0.0, 0.0, s, 0.0, 0.0, c, 0.0, 0.0]);
        let f = complete_m1(&d).unwrap();
        assert!((f.stages()[1].matrix.matrix()[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(f.squeezer_budget().unwrap().count, 0);
        for st in f.stages() {
            assert!(is_symplectic(st.matrix.matrix(), 1e-12).unwrap());
            if st.kind == StageKind::Passive {
                assert!(orthogonal_defect(st.matrix.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_multimode_d() {
        let d = DMatrix::<f64>::identity(4, 4);
        assert!(complete_m1(&d).is_err());
    }
}
