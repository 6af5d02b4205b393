#![allow(dead_code)]

use cvqss::haar::{sample_haar, RngSeed};
use cvqss::sharing::{PlayerSubset, SharingScheme};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Kolmogorov asymptotic critical value at significance 0.01.
pub const KS_C_001: f64 = 1.628;

pub fn scheme(n: usize, m: usize, seed: u64) -> SharingScheme {
    let u = sample_haar(n + m, RngSeed(seed), "orthonormalize").unwrap();
    SharingScheme::new(n, m, u).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, total: usize, size: usize) -> PlayerSubset {
    let mut idx: Vec<usize> = sample(rng, total, size).into_iter().map(|i| i + 1).collect();
    idx.sort_unstable();
    PlayerSubset::new(idx, total).unwrap()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random PSD `dim x dim` matrix with largest eigenvalue `top`.
pub fn random_psd(rng: &mut ChaCha8Rng, dim: usize, top: f64) -> DMatrix<f64> {
    let a = gaussian_matrix(rng, dim, dim);
    let g = &a * a.transpose();
    let lmax = g.clone().symmetric_eigen().eigenvalues.max();
    g * (top / lmax)
}

/// Sup distance between the empirical CDF of `xs` and `cdf`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_critical(n: usize) -> f64 {
    KS_C_001 / (n as f64).sqrt()
}

pub fn ks_critical_two(n: usize, m: usize) -> f64 {
    KS_C_001 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Overlap `(2 pi)^m * integral W_in W_out` of a coherent state and its image
/// under the additive channel, by the trapezoid rule on `[-half, half]^{2m}`.
/// Both Wigner functions are zero-mean Gaussians; the displacement cancels.
pub fn wigner_overlap(noise: &DMatrix<f64>, half: f64, step: f64) -> f64 {
    let dim = noise.nrows();
    let cov_in = DMatrix::identity(dim, dim) * 0.5;
    let cov_out = &cov_in + noise;
    let two_pi = 2.0 * std::f64::consts::PI;
    let norm = two_pi.powi(dim as i32) * (cov_in.determinant() * cov_out.determinant()).sqrt();
    let q = cov_in.try_inverse().unwrap() + cov_out.try_inverse().unwrap();
    let ticks = (2.0 * half / step).round() as usize + 1;
    let mut idx = vec![0usize; dim];
    let mut xi = DVector::zeros(dim);
    let mut total = 0.0;
    loop {
        for (x, &i) in xi.iter_mut().zip(&idx) {
            *x = -half + i as f64 * step;
        }
        total += (-0.5 * xi.dot(&(&q * &xi))).exp();
        let mut d = 0;
        while d < dim {
            idx[d] += 1;
            if idx[d] < ticks {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == dim {
            break;
        }
    }
    two_pi.powi((dim / 2) as i32) * total * step.powi(dim as i32) / norm
}
