//! Encoding blocks, decodability and access structure of a sharing scheme.
//!
//! Interferometer inputs are ordered ancillas first (modes `1..=n`), then
//! secret modes (`n+1..=n+m`), so the input quadrature vector is
//! `(q_sqz, q_s, p_sqz, p_s)`. Output mode `a` goes to player `a`.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{j_matrix, left_null_space, max_abs, max_abs_diff, pinv, rank, RANK_RTOL};
use crate::symplectic::PassiveInterferometer;
use crate::{Error, Result};

/// Smallest access-party size `m + ceil(n/2)`.
pub fn threshold(n: usize, m: usize) -> usize {
    m + n.div_ceil(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharingScheme {
    n: usize,
    m: usize,
    interferometer: PassiveInterferometer,
    /// Cached `[[X, -Y], [Y, X]]`.
    matrix: DMatrix<f64>,
}

impl SharingScheme {
    pub fn new(n: usize, m: usize, interferometer: PassiveInterferometer) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Validation("a scheme needs n >= 1 ancillas and m >= 1 secret modes".into()));
        }
        if interferometer.modes() != n + m {
            return Err(Error::Dimension(format!(
                "interferometer acts on {} modes, expected n + m = {}",
                interferometer.modes(),
                n + m
            )));
        }
        let matrix = interferometer.matrix();
        Ok(Self { n, m, interferometer, matrix })
    }

    pub fn ancillas(&self) -> usize {
        self.n
    }

    pub fn secret_modes(&self) -> usize {
        self.m
    }

    pub fn total_modes(&self) -> usize {
        self.n + self.m
    }

    pub fn threshold(&self) -> usize {
        threshold(self.n, self.m)
    }

    pub fn interferometer(&self) -> &PassiveInterferometer {
        &self.interferometer
    }

    /// The encoding symplectic matrix `S_L`.
    pub fn encoding_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// All subsets of the given size, in lexicographic order.
    pub fn subsets_of_size(&self, k: usize) -> Vec<PlayerSubset> {
        combinations(self.total_modes(), k)
            .into_iter()
            .map(|c| PlayerSubset { indices: c.into_iter().map(|i| i + 1).collect() })
            .collect()
    }

    /// All `2^(n+m) - 1` nonempty subsets ordered by size, then lexicographically.
    pub fn all_subsets(&self) -> Result<Vec<PlayerSubset>> {
        let total = self.total_modes();
        if total > MAX_ENUMERATION_MODES {
            return Err(Error::TooManyModes(total));
        }
        Ok((1..=total).flat_map(|k| self.subsets_of_size(k)).collect())
    }
}

pub const MAX_ENUMERATION_MODES: usize = 16;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
    out
}

/// Sorted, distinct, one-based player indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PlayerSubset {
    indices: Vec<usize>,
}

impl PlayerSubset {
    /// Validate one-based indices against `total` modes. Input must already
    /// be strictly increasing.
    pub fn new(indices: Vec<usize>, total: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > total) {
            return Err(Error::Validation(format!("player index {bad} outside 1..={total}")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "player indices must be strictly increasing and distinct: {indices:?}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_subset_of(&self, other: &PlayerSubset) -> bool {
        self.indices.iter().all(|i| other.indices.binary_search(i).is_ok())
    }

    /// Dash-joined label such as `1-2-4`.
    pub fn label(&self) -> String {
        self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-")
    }

    fn check(&self, scheme: &SharingScheme) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last > scheme.total_modes() => Err(Error::Validation(format!(
                "player index {last} outside 1..={}",
                scheme.total_modes()
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PlayerSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Coefficients of a party's quadratures on the antisqueezed (`m_block`),
/// squeezed (`n_block`) and secret (`h_block`) input quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingBlocks {
    /// `2k x n`
    pub m_block: DMatrix<f64>,
    /// `2k x n`
    pub n_block: DMatrix<f64>,
    /// `2k x 2m`
    pub h_block: DMatrix<f64>,
}

impl EncodingBlocks {
    /// `[M | H]`
    pub fn m_h(&self) -> DMatrix<f64> {
        let rows = self.m_block.nrows();
        let (n, h) = (self.m_block.ncols(), self.h_block.ncols());
        let mut out = DMatrix::zeros(rows, n + h);
        out.view_mut((0, 0), (rows, n)).copy_from(&self.m_block);
        out.view_mut((0, n), (rows, h)).copy_from(&self.h_block);
        out
    }
}

pub fn extract_blocks(scheme: &SharingScheme, party: &PlayerSubset) -> Result<EncodingBlocks> {
    party.check(scheme)?;
    let (n, m, total) = (scheme.n, scheme.m, scheme.total_modes());
    let k = party.len();
    let rows: Vec<usize> = party
        .indices
        .iter()
        .map(|a| a - 1)
        .chain(party.indices.iter().map(|a| total + a - 1))
        .collect();
    let s = &scheme.matrix;
    let pick = |cols: &[usize]| DMatrix::from_fn(2 * k, cols.len(), |r, c| s[(rows[r], cols[c])]);
    let q_sqz: Vec<usize> = (0..n).collect();
    let p_sqz: Vec<usize> = (total..total + n).collect();
    let secret: Vec<usize> = (n..total).chain(total + n..2 * total).collect();
    debug_assert_eq!(secret.len(), 2 * m);
    Ok(EncodingBlocks { m_block: pick(&q_sqz), n_block: pick(&p_sqz), h_block: pick(&secret) })
}

/// Orthonormal rows spanning `ker(M^T)`.
pub fn kernel_basis(m_block: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    left_null_space(m_block, rtol)
}

fn recoverable_from_blocks(blocks: &EncodingBlocks, m: usize) -> usize {
    if blocks.m_block.nrows() == 0 {
        return 0;
    }
    let joint = rank(&blocks.m_h(), RANK_RTOL);
    let own = rank(&blocks.m_block, RANK_RTOL);
    joint.saturating_sub(own).min(2 * m)
}

/// `rank([M | H]) == rank(M) + 2m`.
pub fn decodability(scheme: &SharingScheme, party: &PlayerSubset) -> Result<bool> {
    if party.len() < scheme.m {
        return Ok(false);
    }
    let blocks = extract_blocks(scheme, party)?;
    Ok(recoverable_from_blocks(&blocks, scheme.m) == 2 * scheme.m)
}

/// Number of independent antisqueezing-free secret combinations available
/// to the party, in `0..=2m`.
pub fn recoverable_count(scheme: &SharingScheme, party: &PlayerSubset) -> Result<usize> {
    if party.is_empty() {
        return Ok(0);
    }
    let blocks = extract_blocks(scheme, party)?;
    Ok(recoverable_from_blocks(&blocks, scheme.m))
}

/// Decoding matrices for one party.
#[derive(Debug, Clone)]
pub struct DecodingPlan {
    pub party: PlayerSubset,
    pub blocks: EncodingBlocks,
    /// `d x 2k`, orthonormal rows spanning `ker(M^T)`.
    pub kernel_basis: DMatrix<f64>,
    /// `D` (`2m x 2k`) and `B = D N` (`2m x n`), present iff decodable.
    pub matrices: Option<Decoder>,
}

#[derive(Debug, Clone)]
pub struct Decoder {
    pub d: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

/// Algebraic residuals of a decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoderResiduals {
    /// `|D M|max`
    pub kills_antisqueezing: f64,
    /// `|D H - I|max`
    pub recovers_secret: f64,
    /// `|D J D^T - J|max`
    pub symplectic_rows: f64,
}

impl DecoderResiduals {
    pub fn max(&self) -> f64 {
        self.kills_antisqueezing.max(self.recovers_secret).max(self.symplectic_rows)
    }
}

impl DecodingPlan {
    pub fn decodable(&self) -> bool {
        self.matrices.is_some()
    }

    pub fn decoder(&self) -> Result<&Decoder> {
        self.matrices
            .as_ref()
            .ok_or_else(|| Error::NotDecodable(format!("party {} cannot decode", self.party)))
    }

    pub fn residuals(&self) -> Option<DecoderResiduals> {
        let dec = self.matrices.as_ref()?;
        let k = self.party.len();
        let m = self.blocks.h_block.ncols() / 2;
        Some(DecoderResiduals {
            kills_antisqueezing: max_abs(&(&dec.d * &self.blocks.m_block)),
            recovers_secret: max_abs_diff(&(&dec.d * &self.blocks.h_block), &DMatrix::identity(2 * m, 2 * m)),
            symplectic_rows: max_abs_diff(&(&dec.d * j_matrix(k) * dec.d.transpose()), &j_matrix(m)),
        })
    }
}

/// Build `D = pinv(R H) R` and `B = D N` from the full kernel basis `R`.
pub fn decoding_plan(scheme: &SharingScheme, party: &PlayerSubset) -> Result<DecodingPlan> {
    let blocks = extract_blocks(scheme, party)?;
    let kernel = kernel_basis(&blocks.m_block, RANK_RTOL);
    let decodable = party.len() >= scheme.m && recoverable_from_blocks(&blocks, scheme.m) == 2 * scheme.m;
    let matrices = if decodable && kernel.nrows() >= 2 * scheme.m {
        let t = &kernel * &blocks.h_block;
        let d = pinv(&t, RANK_RTOL) * &kernel;
        let b = &d * &blocks.n_block;
        Some(Decoder { d, b })
    } else {
        None
    };
    Ok(DecodingPlan { party: party.clone(), blocks, kernel_basis: kernel, matrices })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessClass {
    Full,
    Partial,
    None,
}

impl AccessClass {
    pub fn from_count(recoverable: usize, m: usize) -> Self {
        if recoverable >= 2 * m {
            AccessClass::Full
        } else if recoverable == 0 {
            AccessClass::None
        } else {
            AccessClass::Partial
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AccessClass::Full => "full",
            AccessClass::Partial => "partial",
            AccessClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessReport {
    pub subset: PlayerSubset,
    pub class: AccessClass,
    pub recoverable: usize,
}

/// Classify every nonempty subset. Subsets are evaluated in parallel and
/// returned by size, then lexicographically.
pub fn access_structure(scheme: &SharingScheme) -> Result<Vec<AccessReport>> {
    let subsets = scheme.all_subsets()?;
    subsets
        .into_par_iter()
        .map(|subset| {
            let recoverable = recoverable_count(scheme, &subset)?;
            Ok(AccessReport { class: AccessClass::from_count(recoverable, scheme.m), subset, recoverable })
        })
        .collect()
}
