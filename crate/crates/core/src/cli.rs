//! Command dispatch for the `scenery` binary.
//!
//! A run is described by a [`RunConfig`], read from a JSON file and
//! overridden by command-line flags. Every command writes its artifacts to
//! the output directory under fixed file names (see `docs/schema.md`).

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distinguish::{self, PeriodicScenery, DEFAULT_TOL};
use crate::error::Error;
use crate::measures::{SceneryMeasure, StepMeasure, DEFAULT_EPS};
use crate::reconstruct::{self, ReconstructionKind};
use crate::record::{self, CylinderVector, RecordSequence};
use crate::words::{canonical_order, ColourAlphabet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Order,
    Forward,
    Matrix,
    Reconstruct,
    Simulate,
    Estimate,
    Distinguish,
}

/// Everything one command needs. Fields not used by a command are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub mu: Option<StepMeasure>,
    pub lambda: Option<SceneryMeasure>,
    /// Periodic scenery word (forward, simulate, distinguish).
    pub x: Option<String>,
    /// Second periodic scenery word (distinguish).
    pub y: Option<String>,
    pub alphabet: Option<ColourAlphabet>,
    pub depth: Option<usize>,
    pub length: Option<usize>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
    /// Input artifact: a vector CSV (reconstruct) or a record file (estimate).
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Command-line flags; each overrides the matching config field.
#[derive(Debug, Parser)]
#[command(name = "scenery", version, about = "Colour records of random walks in random scenery")]
pub struct Args {
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Word length n (n_max for distinguish)
    #[arg(long)]
    pub depth: Option<usize>,
    /// Record length T for simulate
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Singularity threshold for the solvers
    #[arg(long)]
    pub eps: Option<f64>,
    /// Divergence threshold for distinguish
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory (default: current directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this
    #[arg(long)]
    pub threads: Option<usize>,
    /// Vector CSV (reconstruct) or record file (estimate)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Step measure as inline JSON
    #[arg(long)]
    pub mu: Option<String>,
    /// Scenery measure as inline JSON
    #[arg(long)]
    pub lambda: Option<String>,
    /// Period word of the scenery x
    #[arg(long)]
    pub x: Option<String>,
    /// Period word of the scenery y (distinguish)
    #[arg(long)]
    pub y: Option<String>,
    /// Colour symbols, e.g. "01" (the default)
    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(e) => match e {
                Error::Io(_) => 1,
                Error::Parse(_) | Error::InvalidMeasure(_) => 2,
                Error::InvalidDepth(_)
                | Error::DepthExceeded { .. }
                | Error::Contract(_)
                | Error::NotSampleable
                | Error::InsufficientData { .. } => 3,
                Error::SingularSystem { .. } => 4,
                Error::InconclusiveDepth { .. } => 5,
                Error::UnsupportedRegime { .. } => 6,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Loads `--config` (if any) and applies the flag overrides.
    pub fn from_args(args: Args) -> CliResult<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::from_json_file(p)?,
            None => Self::default(),
        };
        let json = |what: &str, s: &str| usage(format!("invalid --{what} JSON: {s}"));
        if let Some(s) = args.mu {
            cfg.mu = Some(serde_json::from_str(&s).map_err(|e| json("mu", &e.to_string()))?);
        }
        if let Some(s) = args.lambda {
            cfg.lambda = Some(serde_json::from_str(&s).map_err(|e| json("lambda", &e.to_string()))?);
        }
        if let Some(s) = args.alphabet {
            cfg.alphabet = Some(s.parse().map_err(|e: Error| usage(e.to_string()))?);
        }
        cfg.command = args.command.or(cfg.command);
        cfg.depth = args.depth.or(cfg.depth);
        cfg.length = args.length.or(cfg.length);
        cfg.seed = args.seed.or(cfg.seed);
        cfg.eps = args.eps.or(cfg.eps);
        cfg.tol = args.tol.or(cfg.tol);
        cfg.out = args.out.or(cfg.out);
        cfg.threads = args.threads.or(cfg.threads);
        cfg.input = args.input.or(cfg.input);
        cfg.x = args.x.or(cfg.x);
        cfg.y = args.y.or(cfg.y);
        Ok(cfg)
    }

    fn alphabet(&self) -> ColourAlphabet {
        self.alphabet.clone().unwrap_or_default()
    }

    fn depth(&self) -> CliResult<usize> {
        match self.depth {
            Some(0) => Err(usage("depth must be at least 1")),
            Some(n) => Ok(n),
            None => Err(usage("--depth is required for this command")),
        }
    }

    fn mu(&self) -> CliResult<&StepMeasure> {
        self.mu.as_ref().ok_or_else(|| usage("a step measure `mu` is required for this command"))
    }

    fn input(&self) -> CliResult<&Path> {
        self.input.as_deref().ok_or_else(|| usage("--input is required for this command"))
    }

    fn scenery_word(&self, which: &str) -> CliResult<PeriodicScenery> {
        let word = match which {
            "x" => self.x.as_deref(),
            _ => self.y.as_deref(),
        }
        .ok_or_else(|| usage(format!("periodic scenery word `{which}` is required for this command")))?;
        let alphabet = self.alphabet();
        Ok(PeriodicScenery::new(&alphabet, alphabet.parse(word)?)?)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Files written by one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

struct Output {
    dir: PathBuf,
    outcome: RunOutcome,
}

impl Output {
    fn new(dir: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&dir).map_err(Error::from)?;
        Ok(Self { dir, outcome: RunOutcome::default() })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> crate::Result<()>) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(Error::from)?);
        f(&mut w)?;
        w.flush().map_err(Error::from)?;
        self.outcome.artifacts.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

#[derive(Serialize)]
struct ReconstructReport {
    kind: ReconstructionKind,
    depth: usize,
    eps: f64,
    residual: f64,
}

/// Runs one command, using `config.threads` worker threads when given.
pub fn run(config: &RunConfig) -> CliResult<RunOutcome> {
    match config.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| usage(format!("cannot start thread pool: {e}")))?;
            pool.install(|| dispatch(config))
        }
        None => dispatch(config),
    }
}

fn dispatch(cfg: &RunConfig) -> CliResult<RunOutcome> {
    let command = cfg.command.ok_or_else(|| usage("--command is required"))?;
    let eps = cfg.eps.unwrap_or(DEFAULT_EPS);
    let mut out = Output::new(cfg.out_dir())?;
    match command {
        Command::Order => {
            let order = canonical_order(&cfg.alphabet(), cfg.depth()?)?;
            let alphabet = order.alphabet().clone();
            out.write("order.txt", |w| {
                for word in order.entries() {
                    writeln!(w, "{}", alphabet.render(word))?;
                }
                Ok(())
            })?;
            out.outcome.summary = format!("{} words", order.len());
        }
        Command::Forward => {
            let lambda = match (&cfg.lambda, &cfg.x) {
                (Some(l), _) => l.clone(),
                (None, Some(_)) => distinguish::orbit_measure(&cfg.scenery_word("x")?),
                (None, None) => return Err(usage("forward needs `lambda` or a periodic word `x`")),
            };
            let rho = record::exact_record_vector(cfg.mu()?, &lambda, cfg.depth()?)?;
            out.write("forward.csv", |w| rho.write_csv(w))?;
            out.outcome.summary = format!("{} cylinder probabilities", rho.values.len());
        }
        Command::Matrix => {
            let mu = cfg.mu()?;
            let a = reconstruct::build_matrix(mu, &cfg.alphabet(), cfg.depth()?)?;
            let report = reconstruct::verify_structure(&a, mu)?;
            out.write("matrix.csv", |w| a.write_csv(w))?;
            out.write_json("matrix_blocks.json", &a.descriptor())?;
            out.write_json("structure_report.json", &report)?;
            out.outcome.summary = format!("{}x{} matrix, {} structure violations", a.dim(), a.dim(), report.violations.len());
        }
        Command::Reconstruct => {
            let path = cfg.input()?;
            let file = File::open(path).map_err(Error::from)?;
            let rho = CylinderVector::read_csv(BufReader::new(file), &cfg.alphabet())?;
            let rho = match cfg.depth {
                Some(n) if n < rho.depth() => rho.truncate(n)?,
                _ => rho,
            };
            let rec = reconstruct::reconstruct(cfg.mu()?, &rho, eps)?;
            out.write("reconstruct.csv", |w| rec.values.write_csv(w))?;
            out.write_json(
                "reconstruct_report.json",
                &ReconstructReport { kind: rec.kind, depth: rho.depth(), eps, residual: rec.residual },
            )?;
            out.outcome.summary = format!("residual {:e}", rec.residual);
        }
        Command::Simulate => {
            let t = cfg.length.ok_or_else(|| usage("--length is required for simulate"))?;
            let seed = cfg.seed.ok_or_else(|| usage("--seed is required for simulate"))?;
            let alphabet = cfg.alphabet();
            // kept unreduced: the word fixes which site is x_0
            let word = alphabet.parse(cfg.x.as_deref().ok_or_else(|| usage("simulate needs a periodic word `x`"))?)?;
            let rec = record::simulate_record(cfg.mu()?, &alphabet, &word, t, seed)?;
            out.write("record.txt", |w| Ok(w.write_all(rec.to_text().as_bytes())?))?;
            out.outcome.summary = format!("{t} record symbols");
        }
        Command::Estimate => {
            let n = cfg.depth()?;
            let file = File::open(cfg.input()?).map_err(Error::from)?;
            let rec = RecordSequence::read(BufReader::new(file), &cfg.alphabet())?;
            let est = record::empirical_cylinders(&rec, n)?;
            out.write("estimate.csv", |w| est.write_csv(w))?;
            out.outcome.summary = format!("estimated from {} symbols", rec.len());
        }
        Command::Distinguish => {
            let (x, y) = (cfg.scenery_word("x")?, cfg.scenery_word("y")?);
            let n_max = cfg.depth.unwrap_or_else(|| distinguish::default_depth(&x, &y));
            let verdict = distinguish::distinguish(&x, &y, cfg.mu()?, n_max, cfg.tol.unwrap_or(DEFAULT_TOL))?;
            out.write_json("verdict.json", &verdict)?;
            out.outcome.summary = serde_json::to_string(&verdict.relation).map_err(Error::from)?;
        }
    }
    Ok(out.outcome)
}
