//! The `spd` command line.
//!
//! Settings resolve as flags over `--config` file over defaults; the
//! `SPD_CACHE_DIR` environment variable overrides the cache directory of the
//! config file. Exit status is 0 on success, 1 on usage errors, 2 on data errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classifier::Metric;
use crate::error::Error;
use crate::evaluation::{
    asymmetry_by_label, asymmetry_csv, asymmetry_svg, confusion_svg, loocv_corpus, sweep, Corpus, DatasetManifest,
    EvalConfig, SweepGrid,
};
use crate::fsutil::{read_to_string, write_atomic};
use crate::ingest::{GridConfig, BINS_PER_OCTAVE, DEFAULT_REF_FREQ, OCTAVES};
use crate::pipeline::Extractor;
use crate::spd::Relaxation;
use crate::store::{self, StoreConfig};
use crate::synth::{demo_grammars, write_corpus, RagaGrammar};

pub const CACHE_ENV: &str = "SPD_CACHE_DIR";

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub r: u8,
    pub k: usize,
    pub metric: Metric,
    pub bins_per_octave: usize,
    pub octaves: usize,
    pub ref_freq: f64,
    pub conf_threshold: f64,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r: 4,
            k: 5,
            metric: Metric::Bhattacharyya,
            bins_per_octave: BINS_PER_OCTAVE,
            octaves: OCTAVES,
            ref_freq: DEFAULT_REF_FREQ,
            conf_threshold: 0.0,
            cache_dir: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Applies `key = value` lines over the current values.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
            let value = value.trim();
            let bad = || format!("config line {}: bad value `{value}` for `{}`", i + 1, key.trim());
            match key.trim() {
                "r" => self.r = value.parse().map_err(|_| bad())?,
                "k" => self.k = value.parse().map_err(|_| bad())?,
                "metric" => self.metric = value.parse().map_err(|_| bad())?,
                "bins_per_octave" => self.bins_per_octave = value.parse().map_err(|_| bad())?,
                "octaves" => self.octaves = value.parse().map_err(|_| bad())?,
                "ref_freq" => self.ref_freq = value.parse().map_err(|_| bad())?,
                "conf_threshold" => self.conf_threshold = value.parse().map_err(|_| bad())?,
                "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
                "seed" => self.seed = value.parse().map_err(|_| bad())?,
                other => return Err(format!("config line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        Relaxation::new(self.r).map_err(|e| e.to_string())?;
        if self.k < 1 {
            return Err("k must be at least 1".into());
        }
        self.grid().validate().map_err(|e| e.to_string())
    }

    pub fn grid(&self) -> GridConfig {
        GridConfig {
            ref_freq: self.ref_freq,
            bins_per_octave: self.bins_per_octave,
            octaves: self.octaves,
            conf_threshold: self.conf_threshold,
        }
    }

    pub fn relaxation(&self) -> Relaxation {
        Relaxation::new(self.r).expect("validated")
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig {
            r: self.relaxation(),
            k: self.k,
            metric: self.metric,
        }
    }

    pub fn extractor(&self) -> Extractor {
        Extractor::new(self.grid(), self.relaxation()).with_cache_dir(self.cache_dir.clone())
    }
}

#[derive(Debug, Parser)]
#[command(name = "spd", about = "Sequential pitch distribution raga recognition")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// key = value settings file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for extraction and leave-one-out folds
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    r: Option<u8>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// db (Bhattacharyya) or l1 (Manhattan)
    #[arg(long, global = true)]
    metric: Option<String>,
    #[arg(long, global = true)]
    ref_freq: Option<f64>,
    #[arg(long, global = true)]
    conf_threshold: Option<f64>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract and cache features for every manifest entry
    Extract {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Fit an ensemble and write a model store
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one pitch/tonic pair with a model store
    Predict {
        #[arg(long)]
        pitch: PathBuf,
        #[arg(long)]
        tonic: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Leave-one-out evaluation report
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Also write confusion.svg
        #[arg(long)]
        svg: bool,
    },
    /// Accuracy for k in {1,3,5,7}, metric in {L1,DB}, r in {0,2,4}
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        /// CSV destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-label direction asymmetry scores
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "analysis")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Write a synthetic corpus with pitch files, tonic files and a manifest
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Grammar definition files; the built-in set when omitted
        #[arg(long = "grammar")]
        grammars: Vec<PathBuf>,
        #[arg(long, default_value_t = 12)]
        recordings: usize,
        #[arg(long, default_value_t = 4000)]
        frames: usize,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn resolve(opts: &GlobalOpts, env_cache: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = read_to_string(path)?;
        cfg.apply_file(&text).map_err(Failure::Usage)?;
    }
    if let Some(dir) = env_cache {
        cfg.cache_dir = Some(dir);
    }
    if let Some(r) = opts.r {
        cfg.r = r;
    }
    if let Some(k) = opts.k {
        cfg.k = k;
    }
    if let Some(m) = &opts.metric {
        cfg.metric = m.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    }
    if let Some(f) = opts.ref_freq {
        cfg.ref_freq = f;
    }
    if let Some(c) = opts.conf_threshold {
        cfg.conf_threshold = c;
    }
    if let Some(d) = &opts.cache_dir {
        cfg.cache_dir = Some(d.clone());
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(Failure::Usage)?;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    Ok(write_atomic(path, text.as_bytes())?)
}

fn execute(command: Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Data(Error::io("stdout", e));
    match command {
        Command::Extract { manifest } => {
            let m = DatasetManifest::load(&manifest)?;
            let dir = cfg
                .cache_dir
                .clone()
                .unwrap_or_else(|| m.base_dir.join("spd-cache"));
            let extractor = cfg.extractor().with_cache_dir(Some(dir.clone()));
            let tensors = extractor.extract_all(&m)?;
            writeln!(out, "extracted {} recordings into {}", tensors.len(), dir.display()).map_err(io)?;
        }
        Command::Train { manifest, out: store_dir } => {
            let m = DatasetManifest::load(&manifest)?;
            let corpus = Corpus::from_manifest(&m, &cfg.extractor())?;
            let config = StoreConfig {
                eval: cfg.eval(),
                grid: cfg.grid(),
            };
            let ensemble = store::save(&store_dir, &m, &corpus, config)?;
            writeln!(
                out,
                "trained on {} recordings, {} labels; store written to {}",
                corpus.len(),
                ensemble.labels.len(),
                store_dir.display()
            )
            .map_err(io)?;
        }
        Command::Predict { pitch, tonic, model } => {
            let (ensemble, config) = store::load(&model)?;
            let extractor = Extractor::new(config.grid, config.eval.r);
            let spd = extractor.extract_files(&pitch, &tonic)?;
            let prediction = ensemble.predict(&spd)?;
            writeln!(out, "label: {}", ensemble.labels[prediction.label]).map_err(io)?;
            let mut ranked: Vec<(usize, f64)> = prediction.probabilities.iter().copied().enumerate().collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            for (label, p) in ranked.into_iter().take(5) {
                writeln!(out, "{}\t{p:.6}", ensemble.labels[label]).map_err(io)?;
            }
        }
        Command::Evaluate { manifest, out: dir, svg } => {
            let m = DatasetManifest::load(&manifest)?;
            let corpus = Corpus::from_manifest(&m, &cfg.extractor())?;
            let report = loocv_corpus(&corpus, cfg.k, cfg.metric)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_text(&dir.join("predictions.csv"), &report.predictions_csv()?)?;
            write_text(&dir.join("confusion.csv"), &report.confusion_csv()?)?;
            write_text(&dir.join("weights.txt"), &report.weights_text())?;
            if svg {
                write_text(&dir.join("confusion.svg"), &confusion_svg(&report))?;
            }
            writeln!(
                out,
                "accuracy: {:.4} ({}/{} correct, r={} k={} metric={})",
                report.accuracy(),
                report.rows.len() - report.misclassified(),
                report.rows.len(),
                cfg.r,
                cfg.k,
                cfg.metric.short_name()
            )
            .map_err(io)?;
        }
        Command::Sweep { manifest, out: dest } => {
            let m = DatasetManifest::load(&manifest)?;
            let grid = SweepGrid {
                base: cfg.eval(),
                ..SweepGrid::default()
            };
            let table = sweep(&m, &grid, &cfg.extractor())?;
            match dest {
                Some(path) => write_text(&path, &table.to_csv())?,
                None => write!(out, "{}", table.to_csv()).map_err(io)?,
            }
        }
        Command::Analyze { manifest, out: dir, svg } => {
            let m = DatasetManifest::load(&manifest)?;
            let corpus = Corpus::from_manifest(&m, &cfg.extractor())?;
            let rows = asymmetry_by_label(&corpus)?;
            write_text(&dir.join("asymmetry.csv"), &asymmetry_csv(&rows)?)?;
            if svg {
                write_text(&dir.join("asymmetry.svg"), &asymmetry_svg(&rows))?;
            }
            for r in &rows {
                writeln!(out, "{}\t{:.6}", r.label, r.score).map_err(io)?;
            }
        }
        Command::Synth {
            out: dir,
            grammars,
            recordings,
            frames,
        } => {
            let grammars = if grammars.is_empty() {
                demo_grammars()
            } else {
                grammars
                    .iter()
                    .map(|p| RagaGrammar::parse(&read_to_string(p)?))
                    .collect::<Result<Vec<_>, Error>>()?
            };
            let m = write_corpus(&dir, &grammars, recordings, frames, cfg.seed, &cfg.grid())?;
            writeln!(out, "wrote {} recordings to {}", m.len(), dir.join("manifest.csv").display()).map_err(io)?;
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let env_cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let result = resolve(&cli.opts, env_cache).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.opts.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let mut buf = Vec::new();
        let res = pool.install(|| execute(cli.command, &cfg, &mut buf));
        out.write_all(&buf).map_err(|e| Failure::Data(Error::io("stdout", e)))?;
        res
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}
