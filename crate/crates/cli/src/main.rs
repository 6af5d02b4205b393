use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvqss::channel::{db_grid, sweep};
use cvqss::curve::{curve_rows, to_csv};
use cvqss::haar::{sample_haar, samplers, RngSeed};
use cvqss::report::analyze;
use cvqss::scheme_file::{fixture, sampled, SchemeFile};
use cvqss::search::{search, SearchConfig};
use cvqss::sharing::{decoding_plan, PlayerSubset, SharingScheme};
use cvqss::synthesis::{synthesize_with_fallback, synthesizers};
use cvqss::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cvqss", version, about = "Continuous-variable secret sharing with random interferometers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Haar-random scheme
    Sample(SampleArgs),
    /// Write one of the built-in example schemes
    Fixtures(FixtureArgs),
    /// Report decodability and decoding matrices for player subsets
    Analyze(AnalyzeArgs),
    /// Reconstruction quality of threshold parties over a squeezing grid
    Sweep(SweepArgs),
    /// Keep the best of many sampled schemes
    Search(SearchArgs),
    /// Build an explicit Gaussian decoder for one party
    Synthesize(SynthesizeArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    ancillas: usize,
    #[arg(long)]
    secret: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "euler")]
    method: String,
    /// Output path; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    scheme: PathBuf,
    /// Comma-separated one-based player indices, e.g. 1,2,4
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    subset: Option<String>,
    /// Every nonempty subset
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct SweepArgs {
    scheme: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    db_min: f64,
    #[arg(long, default_value_t = 40.0)]
    db_max: f64,
    #[arg(long, default_value_t = 41)]
    steps: usize,
    #[arg(long, default_value = "all-threshold")]
    parties: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    ancillas: usize,
    #[arg(long)]
    secret: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "min-numax")]
    criterion: String,
    #[arg(long, default_value = "euler")]
    method: String,
    /// Worker threads; 0 uses all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Where to write the winning scheme; the report goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthesizeArgs {
    scheme: PathBuf,
    #[arg(long)]
    subset: String,
    #[arg(long, default_value = "generic")]
    synthesizer: String,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::Unknown { .. }) => 2,
            Failure::Core(Error::Io(_)) => 4,
            Failure::Core(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_scheme(path: &Path) -> CliResult<SharingScheme> {
    Ok(SchemeFile::load(path)?.to_scheme()?)
}

fn parse_subset(text: &str, scheme: &SharingScheme) -> CliResult<PlayerSubset> {
    let mut idx = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad player index '{t}'"))))
        .collect::<CliResult<Vec<_>>>()?;
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::Usage(format!("repeated player index in '{text}'")));
    }
    PlayerSubset::new(idx, scheme.total_modes()).map_err(|e| Failure::Usage(e.to_string()))
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn cmd_sample(a: SampleArgs) -> CliResult {
    if a.ancillas == 0 || a.secret == 0 {
        return Err(Failure::Usage("--ancillas and --secret must be at least 1".into()));
    }
    let u = sample_haar(a.ancillas + a.secret, RngSeed(a.seed), &a.method)?;
    let scheme = SharingScheme::new(a.ancillas, a.secret, u)?;
    emit(&sampled(&scheme, a.seed, &a.method).to_json()?, a.out.as_deref())
}

fn cmd_fixtures(a: FixtureArgs) -> CliResult {
    emit(&fixture(&a.name)?.to_json()?, a.out.as_deref())
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult {
    let scheme = load_scheme(&a.scheme)?;
    let subsets = match &a.subset {
        Some(text) => vec![parse_subset(text, &scheme)?],
        None => scheme.all_subsets()?,
    };
    emit(&to_json(&analyze(&scheme, &subsets)?)?, None)
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    if a.parties != "all-threshold" {
        return Err(Failure::Usage(format!("unknown party selection '{}' (available: all-threshold)", a.parties)));
    }
    if a.steps == 0 || !(a.db_min <= a.db_max) {
        return Err(Failure::Usage("need --steps >= 1 and --db-min <= --db-max".into()));
    }
    let scheme = load_scheme(&a.scheme)?;
    let mut parties = Vec::new();
    for p in scheme.subsets_of_size(scheme.threshold()) {
        if decoding_plan(&scheme, &p)?.decodable() {
            parties.push(p);
        }
    }
    if parties.is_empty() {
        return Err(Error::NotDecodable("no threshold-size party can decode".into()).into());
    }
    let points = sweep(&scheme, &parties, &db_grid(a.db_min, a.db_max, a.steps))?;
    emit(&to_csv(&curve_rows(&points)), a.out.as_deref())
}

fn cmd_search(a: SearchArgs) -> CliResult {
    if a.ancillas == 0 || a.secret == 0 || a.samples == 0 {
        return Err(Failure::Usage("--ancillas, --secret and --samples must be at least 1".into()));
    }
    samplers().get(&a.method)?;
    let config = SearchConfig {
        ancillas: a.ancillas,
        secret: a.secret,
        samples: a.samples,
        seed: a.seed,
        method: a.method,
        criterion: a.criterion,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {} worker threads: {e}", a.threads)))?;
    let outcome = pool.install(|| search(&config))?;
    let file = outcome.scheme_file();
    if let Some(path) = &a.out {
        file.save(path)?;
    }
    let mut sorted = outcome.scores.clone();
    sorted.sort_by(f64::total_cmp);
    let report = json!({
        "config": config,
        "winner_index": outcome.winner_index,
        "score": outcome.score,
        "median_score": sorted[sorted.len() / 2],
        "non_decodable_samples": sorted.iter().filter(|s| s.is_infinite()).count(),
        "scheme": file,
    });
    emit(&to_json(&report)?, None)
}

fn cmd_synthesize(a: SynthesizeArgs) -> CliResult {
    synthesizers().get(&a.synthesizer)?;
    let scheme = load_scheme(&a.scheme)?;
    let party = parse_subset(&a.subset, &scheme)?;
    let plan = decoding_plan(&scheme, &party)?;
    let decoder = synthesize_with_fallback(&a.synthesizer, &plan.decoder()?.d)?;
    let stages: Vec<_> = decoder.stages().iter().map(|s| s.kind).collect();
    let report = json!({
        "subset": party.label(),
        "synthesizer": a.synthesizer,
        "stages": stages,
        "squeezer_budget": decoder.squeezer_budget()?,
        "embedding_error": decoder.embedding_error(),
    });
    emit(&to_json(&report)?, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Fixtures(a) => cmd_fixtures(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Search(a) => cmd_search(a),
        Command::Synthesize(a) => cmd_synthesize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
