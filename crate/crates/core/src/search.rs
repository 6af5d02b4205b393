//! Random search for interferometers with low reconstruction noise.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::haar::{sample_haar, RngSeed};
use crate::report::lambda_max_bbt;
use crate::scheme_file::{Provenance, SchemeFile};
use crate::sharing::{decoding_plan, SharingScheme};
use crate::{Error, Result, DEFAULT_TOL};

/// Scores a scheme; lower is better.
pub trait SearchCriterion: Send + Sync {
    fn name(&self) -> &'static str;
    fn score(&self, scheme: &SharingScheme) -> Result<f64>;
}

/// Worst threshold-size party's `lambda_max(B B^T)`, which is `nu_max` at
/// zero squeezing times two. Uniform squeezing rescales every party by the
/// same factor, so the ranking holds at any squeezing. A scheme with a
/// non-decodable threshold party scores `+inf`.
pub struct MinNuMax;

impl SearchCriterion for MinNuMax {
    fn name(&self) -> &'static str {
        "min-numax"
    }

    fn score(&self, scheme: &SharingScheme) -> Result<f64> {
        let mut worst = 0.0f64;
        for party in scheme.subsets_of_size(scheme.threshold()) {
            let plan = decoding_plan(scheme, &party)?;
            match &plan.matrices {
                Some(dec) => worst = worst.max(lambda_max_bbt(&dec.b)),
                None => return Ok(f64::INFINITY),
            }
        }
        Ok(worst)
    }
}

pub struct CriterionRegistry {
    entries: Vec<Box<dyn SearchCriterion>>,
}

impl CriterionRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(MinNuMax));
        reg
    }

    pub fn register(&mut self, c: Box<dyn SearchCriterion>) {
        self.entries.retain(|e| e.name() != c.name());
        self.entries.push(c);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn SearchCriterion> {
        self.entries.iter().find(|e| e.name() == name).map(|b| b.as_ref()).ok_or_else(|| Error::Unknown {
            kind: "criterion",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }
}

pub fn criteria() -> &'static CriterionRegistry {
    static REGISTRY: OnceLock<CriterionRegistry> = OnceLock::new();
    REGISTRY.get_or_init(CriterionRegistry::with_defaults)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub ancillas: usize,
    pub secret: usize,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
    pub criterion: String,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    pub winner_index: usize,
    pub winner: SharingScheme,
    pub score: f64,
    /// Score of every sample, by index.
    pub scores: Vec<f64>,
}

impl SearchOutcome {
    pub fn scheme_file(&self) -> SchemeFile {
        SchemeFile::from_scheme(
            &self.winner,
            DEFAULT_TOL,
            Provenance::Search {
                seed: self.config.seed,
                method: self.config.method.clone(),
                samples: self.config.samples,
                index: self.winner_index,
                criterion: self.config.criterion.clone(),
                score: self.score,
            },
        )
    }
}

fn sample_scheme(config: &SearchConfig, index: usize) -> Result<SharingScheme> {
    let seed = RngSeed(config.seed).child(index as u64);
    let u = sample_haar(config.ancillas + config.secret, seed, &config.method)?;
    SharingScheme::new(config.ancillas, config.secret, u)
}

/// Sample `config.samples` schemes, sample `i` drawn from `seed.child(i)`,
/// and keep the lowest score (lowest index on ties). The result does not
/// depend on the number of worker threads.
pub fn search(config: &SearchConfig) -> Result<SearchOutcome> {
    if config.samples == 0 {
        return Err(Error::Validation("search needs at least one sample".into()));
    }
    let criterion = criteria().get(&config.criterion)?;
    let scores = (0..config.samples)
        .into_par_iter()
        .map(|i| criterion.score(&sample_scheme(config, i)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut winner_index = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.total_cmp(&scores[winner_index]).is_lt() {
            winner_index = i;
        }
    }
    Ok(SearchOutcome {
        winner: sample_scheme(config, winner_index)?,
        score: scores[winner_index],
        winner_index,
        scores,
        config: config.clone(),
    })
}
