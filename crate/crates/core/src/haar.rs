//! Euler-angle parametrization of `U(n)` and Haar-random interferometers.
//!
//! Samplers are strategies behind [`UnitarySampler`], looked up by name in a
//! [`SamplerRegistry`]. The default registry holds:
//!
//! * `orthonormalize`: complex Ginibre matrix, QR, phase-fixed `R` diagonal.
//! * `euler`: Euler angles with `phi_jk` drawn from `sin(phi) cos^{2(k-j)-1}(phi)`,
//!   the Haar marginal for the rotation layout used by [`compose_from_angles`].
//! * `euler-literal`: Euler angles with `phi_jk` drawn from the sine-only weight
//!   `sin^{2j-1}(phi)` of [`haar_density`]. It is not Haar; it is kept so the
//!   statistical tests can show the difference.
//!
//! Every sampler is driven by [`ProjectRng`] (ChaCha8) seeded from a `u64`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::symplectic::{unitary_to_symplectic, PassiveInterferometer};
use crate::{Error, Result};

/// The project-wide random generator.
pub type ProjectRng = ChaCha8Rng;

/// Seed for a deterministic sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ProjectRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed for the `index`-th parallel task.
    pub fn child(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(index)))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Euler angles for `U(n)`; indices are zero-based with `j < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerAngles {
    n: usize,
    /// `phi[pair_index(j, k)]`
    phi: Vec<f64>,
    psi: Vec<f64>,
    /// `chi[k - 1]` for `k = 1..n`
    chi: Vec<f64>,
    eta: f64,
}

/// Position of the pair `(j, k)` in the flat angle arrays (`k`-major).
pub fn pair_index(j: usize, k: usize) -> usize {
    debug_assert!(j < k);
    k * (k - 1) / 2 + j
}

fn in_range(v: f64, hi: f64) -> bool {
    (0.0..hi).contains(&v)
}

impl EulerAngles {
    pub fn new(n: usize, phi: Vec<f64>, psi: Vec<f64>, chi: Vec<f64>, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("Euler angles need n >= 1".into()));
        }
        let pairs = n * (n - 1) / 2;
        if phi.len() != pairs || psi.len() != pairs || chi.len() != n - 1 {
            return Err(Error::Dimension(format!(
                "expected {pairs} phi, {pairs} psi and {} chi values, got {}, {}, {}",
                n - 1,
                phi.len(),
                psi.len(),
                chi.len()
            )));
        }
        let ok = phi.iter().all(|&v| in_range(v, FRAC_PI_2))
            && psi.iter().all(|&v| in_range(v, 2.0 * PI))
            && chi.iter().all(|&v| in_range(v, 2.0 * PI))
            && in_range(eta, 2.0 * PI);
        if !ok {
            return Err(Error::Validation("Euler angle out of range".into()));
        }
        Ok(Self { n, phi, psi, chi, eta })
    }

    pub fn zeros(n: usize) -> Self {
        let pairs = n * (n - 1) / 2;
        Self { n, phi: vec![0.0; pairs], psi: vec![0.0; pairs], chi: vec![0.0; n.saturating_sub(1)], eta: 0.0 }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn phi(&self, j: usize, k: usize) -> f64 {
        self.phi[pair_index(j, k)]
    }

    pub fn psi(&self, j: usize, k: usize) -> f64 {
        self.psi[pair_index(j, k)]
    }

    pub fn parameter_count(&self) -> usize {
        self.phi.len() + self.psi.len() + self.chi.len() + 1
    }
}

/// The two-level rotation `E^{(j,k)}` (zero-based `j < k < n`).
pub fn elementary_rotation(
    n: usize,
    j: usize,
    k: usize,
    phi: f64,
    psi: f64,
    chi: f64,
) -> Result<DMatrix<Complex64>> {
    if j >= k || k >= n {
        return Err(Error::Dimension(format!("invalid rotation indices ({j}, {k}) for n = {n}")));
    }
    let mut e = DMatrix::<Complex64>::identity(n, n);
    let (s, c) = phi.sin_cos();
    e[(j, j)] = Complex64::from_polar(c, psi);
    e[(j, k)] = Complex64::from_polar(s, chi);
    e[(k, j)] = -Complex64::from_polar(s, -chi);
    e[(k, k)] = Complex64::from_polar(c, -psi);
    Ok(e)
}

/// `e^{i eta} E_1 E_2 ... E_{n-1}` with
/// `E_l = E^{(l-1,l)} E^{(l-2,l)} ... E^{(0,l)}` and `chi_l` on the last factor.
pub fn compose_from_angles(angles: &EulerAngles) -> DMatrix<Complex64> {
    let n = angles.n;
    let mut u = DMatrix::<Complex64>::identity(n, n);
    for k in 1..n {
        for j in (0..k).rev() {
            let chi = if j == 0 { angles.chi[k - 1] } else { 0.0 };
            let e = elementary_rotation(n, j, k, angles.phi(j, k), angles.psi(j, k), chi)
                .expect("indices in range");
            u *= e;
        }
    }
    u * Complex64::from_polar(1.0, angles.eta)
}

/// Surface area of the unit sphere `S^{2k-1}` in `R^{2k}`: `2 pi^k / (k-1)!`.
pub fn sphere_volume(k: usize) -> f64 {
    let fact: f64 = (1..k).map(|i| i as f64).product();
    2.0 * PI.powi(k as i32) / fact
}

/// The sine-only weight `[prod_k Vol(S^{2k-1})]^{-1} prod_{j<k} sin^{2j-1}(phi_jk)`
/// (one-based `j` in the exponent).
pub fn haar_density(angles: &EulerAngles) -> f64 {
    let n = angles.n;
    let norm: f64 = (1..=n).map(sphere_volume).product();
    let mut w = 1.0 / norm;
    for k in 1..n {
        for j in 0..k {
            w *= angles.phi(j, k).sin().powi(2 * (j as i32 + 1) - 1);
        }
    }
    w
}

/// Tabulated inverse CDF of a density on `[0, pi/2)`.
#[derive(Debug)]
pub struct InverseCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

const CDF_POINTS: usize = 1 << 14;

impl InverseCdf {
    /// Cumulative trapezoid rule of `density` on `CDF_POINTS` intervals.
    pub fn tabulate(density: impl Fn(f64) -> f64) -> Self {
        let h = FRAC_PI_2 / CDF_POINTS as f64;
        let grid: Vec<f64> = (0..=CDF_POINTS).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| density(x)).collect();
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in vals.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Self { grid, cdf }
    }

    /// Linear interpolation of the inverse at `u` in `[0, 1)`.
    pub fn invert(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let x = x0 + t * (x1 - x0);
        // keep strictly inside [0, pi/2)
        x.min(FRAC_PI_2 * (1.0 - f64::EPSILON))
    }
}

/// A strategy for drawing `n x n` unitaries.
pub trait UnitarySampler: Send + Sync {
    fn name(&self) -> &'static str;
    fn sample_unitary(&self, n: usize, rng: &mut ProjectRng) -> DMatrix<Complex64>;
}

/// Ginibre matrix followed by QR with the phases of `diag(R)` moved into `Q`.
pub struct OrthonormalizeSampler;

impl UnitarySampler for OrthonormalizeSampler {
    fn name(&self) -> &'static str {
        "orthonormalize"
    }

    fn sample_unitary(&self, n: usize, rng: &mut ProjectRng) -> DMatrix<Complex64> {
        let z = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        let qr = z.qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        q
    }
}

/// Marginal weight of `phi_jk` (zero-based `j < k`).
pub type PhiWeight = fn(usize, usize, f64) -> f64;

fn hurwitz_weight(j: usize, _k: usize, phi: f64) -> f64 {
    phi.sin() * phi.cos().powi(2 * j as i32 + 1)
}

fn sine_only_weight(j: usize, _k: usize, phi: f64) -> f64 {
    phi.sin().powi(2 * (j as i32 + 1) - 1)
}

/// Euler-angle sampler: uniform phases, `phi_jk` by inverse CDF of a weight.
pub struct EulerSampler {
    name: &'static str,
    weight: PhiWeight,
    tables: Mutex<HashMap<(usize, usize), Arc<InverseCdf>>>,
}

impl EulerSampler {
    pub fn new(name: &'static str, weight: PhiWeight) -> Self {
        Self { name, weight, tables: Mutex::new(HashMap::new()) }
    }

    pub fn hurwitz() -> Self {
        Self::new("euler", hurwitz_weight)
    }

    pub fn sine_only() -> Self {
        Self::new("euler-literal", sine_only_weight)
    }

    fn table(&self, j: usize, k: usize) -> Arc<InverseCdf> {
        let mut tables = self.tables.lock().expect("table cache poisoned");
        let weight = self.weight;
        tables
            .entry((j, k))
            .or_insert_with(|| Arc::new(InverseCdf::tabulate(|x| weight(j, k, x))))
            .clone()
    }

    pub fn sample_angles(&self, n: usize, rng: &mut ProjectRng) -> EulerAngles {
        let pairs = n * (n - 1) / 2;
        let mut phi = vec![0.0; pairs];
        let mut psi = vec![0.0; pairs];
        for k in 1..n {
            for j in 0..k {
                let u: f64 = rng.random();
                phi[pair_index(j, k)] = self.table(j, k).invert(u);
                psi[pair_index(j, k)] = rng.random::<f64>() * 2.0 * PI;
            }
        }
        let chi = (1..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        let eta = rng.random::<f64>() * 2.0 * PI;
        EulerAngles { n, phi, psi, chi, eta }
    }
}

impl UnitarySampler for EulerSampler {
    fn name(&self) -> &'static str {
        self.name
    }

    fn sample_unitary(&self, n: usize, rng: &mut ProjectRng) -> DMatrix<Complex64> {
        compose_from_angles(&self.sample_angles(n, rng))
    }
}

/// Name-indexed collection of samplers.
pub struct SamplerRegistry {
    entries: Vec<Box<dyn UnitarySampler>>,
}

impl SamplerRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(EulerSampler::hurwitz()));
        reg.register(Box::new(OrthonormalizeSampler));
        reg.register(Box::new(EulerSampler::sine_only()));
        reg
    }

    /// Add a sampler, replacing any existing entry with the same name.
    pub fn register(&mut self, sampler: Box<dyn UnitarySampler>) {
        self.entries.retain(|s| s.name() != sampler.name());
        self.entries.push(sampler);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn UnitarySampler> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "sampling method",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

/// Process-wide default registry.
pub fn samplers() -> &'static SamplerRegistry {
    static REGISTRY: OnceLock<SamplerRegistry> = OnceLock::new();
    REGISTRY.get_or_init(SamplerRegistry::with_defaults)
}

/// Tolerance every sampled interferometer must meet.
pub const SAMPLE_TOL: f64 = 1e-10;

/// Draw an `n`-mode interferometer with the named method.
pub fn sample_haar(n: usize, seed: RngSeed, method: &str) -> Result<PassiveInterferometer> {
    if n == 0 {
        return Err(Error::Dimension("cannot sample a 0-mode interferometer".into()));
    }
    let sampler = samplers().get(method)?;
    let mut rng = seed.rng();
    let u = sampler.sample_unitary(n, &mut rng);
    unitary_to_symplectic(&u, SAMPLE_TOL)
}
