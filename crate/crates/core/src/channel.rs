//! Quality of the encode-decode channel seen by an access party.
//!
//! After decoding, the secret passes through a Gaussian channel that adds
//! the covariance `N = B diag(sigma^2(r)) B^T`, where `sigma^2(r) = e^{-2r}/2`
//! is the momentum variance of a squeezed ancilla.

use std::f64::consts::LN_10;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{max_abs, max_abs_diff, sym_eigen_sorted};
use crate::sharing::{decoding_plan, PlayerSubset, SharingScheme};
use crate::symplectic::SqueezerProfile;
use crate::{Error, Result};

/// Momentum variance of an ancilla squeezed by `r`.
pub fn squeezed_variance(r: f64) -> f64 {
    (-2.0 * r).exp() / 2.0
}

pub fn db_to_r(db: f64) -> f64 {
    db * LN_10 / 20.0
}

pub fn r_to_db(r: f64) -> f64 {
    20.0 / LN_10 * r
}

/// Additive noise covariance of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMatrix(DMatrix<f64>);

impl NoiseMatrix {
    pub fn new(n: DMatrix<f64>) -> Result<Self> {
        if n.nrows() != n.ncols() || n.nrows() % 2 != 0 {
            return Err(Error::Dimension(format!("noise matrix must be 2m x 2m, got {:?}", n.shape())));
        }
        let scale = max_abs(&n).max(1.0);
        if max_abs_diff(&n, &n.transpose()) > 1e-12 * scale {
            return Err(Error::Validation("noise matrix is not symmetric".into()));
        }
        if n.nrows() > 0 {
            let (vals, _) = sym_eigen_sorted(&n);
            if vals[0] < -1e-10 * scale {
                return Err(Error::Validation(format!("noise matrix has negative eigenvalue {:.3e}", vals[0])));
            }
        }
        Ok(Self(n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn secret_modes(&self) -> usize {
        self.0.nrows() / 2
    }
}

/// `N = B diag(sigma^2(r_1), ..., sigma^2(r_n)) B^T`.
pub fn noise_matrix(b: &DMatrix<f64>, profile: &SqueezerProfile) -> Result<NoiseMatrix> {
    if b.ncols() != profile.modes() {
        return Err(Error::Dimension(format!(
            "B has {} columns but the squeezer profile has {} modes",
            b.ncols(),
            profile.modes()
        )));
    }
    let var = DVector::from_iterator(profile.modes(), profile.r.iter().map(|&r| squeezed_variance(r)));
    let n = b * DMatrix::from_diagonal(&var) * b.transpose();
    NoiseMatrix::new((&n + n.transpose()) * 0.5)
}

/// Gaussian channel with `T = I`, `d = 0`: `(cov, mean) -> (cov + N, mean)`.
pub fn apply_channel(
    cov: &DMatrix<f64>,
    mean: &DVector<f64>,
    noise: &NoiseMatrix,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let dim = noise.matrix().nrows();
    if cov.shape() != (dim, dim) || mean.len() != dim {
        return Err(Error::Dimension(format!(
            "state of shape {:?} / {} does not match a {dim}-dimensional channel",
            cov.shape(),
            mean.len()
        )));
    }
    if max_abs_diff(cov, &cov.transpose()) > 1e-12 * max_abs(cov).max(1.0) {
        return Err(Error::Validation("covariance matrix is not symmetric".into()));
    }
    if dim > 0 && sym_eigen_sorted(cov).0[0] <= 0.0 {
        return Err(Error::Validation("covariance matrix is not positive definite".into()));
    }
    Ok((cov + noise.matrix(), mean.clone()))
}

/// Fidelity between a coherent secret and its reconstruction:
/// `1 / sqrt(det(I + N))`. Independent of the coherent amplitude.
pub fn fidelity_gaussian(noise: &NoiseMatrix) -> f64 {
    let dim = noise.matrix().nrows();
    let det = (DMatrix::identity(dim, dim) + noise.matrix()).determinant();
    1.0 / det.sqrt()
}

/// Single-mode fidelity in closed form: `1 / sqrt(1 + sigma^2 eta + sigma^4 zeta)`
/// with `eta = Tr(BB^T)` and `zeta = det(BB^T)`.
pub fn fidelity_coherent(b: &DMatrix<f64>, r: f64) -> Result<f64> {
    if b.nrows() != 2 {
        return Err(Error::Dimension(format!("fidelity_coherent needs a 2-row B, got {}", b.nrows())));
    }
    let gram = b * b.transpose();
    let eta = gram.trace();
    let zeta = gram.determinant();
    let s2 = squeezed_variance(r);
    Ok(1.0 / (1.0 + s2 * eta + s2 * s2 * zeta).sqrt())
}

/// Largest eigenvalue of `N`.
pub fn nu_max(noise: &NoiseMatrix) -> f64 {
    if noise.matrix().nrows() == 0 {
        return 0.0;
    }
    *sym_eigen_sorted(noise.matrix()).0.last().expect("non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    EntanglementBreaking,
    Intermediate,
    BestCopy,
}

impl ChannelClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelClass::EntanglementBreaking => "entanglement_breaking",
            ChannelClass::Intermediate => "intermediate",
            ChannelClass::BestCopy => "best_copy",
        }
    }
}

pub fn classify_channel(nu: f64) -> Result<ChannelClass> {
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::Validation(format!("nu_max must be non-negative, got {nu}")));
    }
    Ok(if nu > 1.0 {
        ChannelClass::EntanglementBreaking
    } else if nu < 0.5 {
        ChannelClass::BestCopy
    } else {
        ChannelClass::Intermediate
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyQuality {
    pub party: PlayerSubset,
    pub nu_max: f64,
    pub fidelity: f64,
    pub class: ChannelClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezeGridPoint {
    pub db: f64,
    pub r: f64,
    /// In the order the parties were given.
    pub parties: Vec<PartyQuality>,
    /// Party with the largest `nu_max` (first one on ties).
    pub worst: PlayerSubset,
    /// Party with the smallest `nu_max` (first one on ties).
    pub best: PlayerSubset,
}

impl SqueezeGridPoint {
    pub fn quality(&self, party: &PlayerSubset) -> Option<&PartyQuality> {
        self.parties.iter().find(|q| &q.party == party)
    }

    pub fn worst_quality(&self) -> &PartyQuality {
        self.quality(&self.worst).expect("worst party is listed")
    }

    pub fn best_quality(&self) -> &PartyQuality {
        self.quality(&self.best).expect("best party is listed")
    }
}

/// `len` evenly spaced values from `lo` to `hi` inclusive.
pub fn db_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    match len {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..len).map(|i| lo + (hi - lo) * i as f64 / (len - 1) as f64).collect(),
    }
}

/// Evaluate every party at every grid point under uniform squeezing.
pub fn sweep(scheme: &SharingScheme, parties: &[PlayerSubset], db_grid: &[f64]) -> Result<Vec<SqueezeGridPoint>> {
    if parties.is_empty() {
        return Err(Error::Validation("sweep needs at least one party".into()));
    }
    let bs = parties
        .iter()
        .map(|p| {
            let plan = decoding_plan(scheme, p)?;
            plan.decoder().map(|d| d.b.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let n = scheme.ancillas();

    db_grid
        .par_iter()
        .map(|&db| {
            let r = db_to_r(db);
            let profile = SqueezerProfile::uniform(n, r);
            let qualities = parties
                .iter()
                .zip(&bs)
                .map(|(party, b)| {
                    let noise = noise_matrix(b, &profile)?;
                    let nu = nu_max(&noise);
                    Ok(PartyQuality {
                        party: party.clone(),
                        nu_max: nu,
                        fidelity: fidelity_gaussian(&noise),
                        class: classify_channel(nu.max(0.0))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut worst = 0;
            let mut best = 0;
            for (i, q) in qualities.iter().enumerate() {
                if q.nu_max > qualities[worst].nu_max {
                    worst = i;
                }
                if q.nu_max < qualities[best].nu_max {
                    best = i;
                }
            }
            Ok(SqueezeGridPoint {
                db,
                r,
                worst: qualities[worst].party.clone(),
                best: qualities[best].party.clone(),
                parties: qualities,
            })
        })
        .collect()
}
