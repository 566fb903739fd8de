use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use proxauth_core::ml::Algo;
use serde::{Deserialize, Serialize};

/// Comma-separated algorithm names, or `all`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoList(pub Vec<Algo>);

impl Default for AlgoList {
    fn default() -> Self {
        AlgoList(Algo::ALL.to_vec())
    }
}

impl FromStr for AlgoList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(AlgoList::default());
        }
        let mut out = Vec::new();
        for part in s.split(',') {
            let a: Algo = part.parse().map_err(|e: proxauth_core::Error| e.to_string())?;
            if !out.contains(&a) {
                out.push(a);
            }
        }
        Ok(AlgoList(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AttackName {
    Evasion,
    Extraction,
    Interference,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "proxauth", version, about = "Wi-Fi proximity two-factor authentication: simulator, models, attacks, service")]
pub struct Cli {
    /// TOML config file with optional [sim], [hyperparams], [evaluation],
    /// [[attacks]] and [service] tables. Flags override it.
    #[arg(long, global = true, env = "PROXAUTH_CONFIG")]
    pub config: Option<PathBuf>,

    /// Seed for every random draw. Defaults to the config's sim.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Simulate an environment and write a labeled dataset plus the
    /// environment description.
    GenData(GenDataArgs),
    /// Train models and write one JSON model file per algorithm.
    Train(TrainArgs),
    /// Stratified holdout evaluation.
    Eval(EvalArgs),
    /// Stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Per-feature importance for each model.
    Importance(ImportanceArgs),
    /// Median batch inference time per model.
    Bench(BenchArgs),
    /// Run the evasion, extraction and interference experiments.
    Attack(AttackArgs),
    /// Run the authentication service.
    Serve(ServeArgs),
    /// Script a login followed by continuous checks, separating the devices
    /// at a chosen tick.
    DemoSession(DemoArgs),
    /// Re-run the command recorded in a run manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenDataArgs {
    /// Authentic rows. Defaults to the config's sim.n_authentic.
    #[arg(long)]
    pub authentic: Option<usize>,
    /// Unauthorized rows. Defaults to the config's sim.n_unauthorized.
    #[arg(long)]
    pub unauthorized: Option<usize>,
    /// Number of access points.
    #[arg(long)]
    pub aps: Option<usize>,
    /// Dataset file; `.jsonl` writes JSON lines, anything else CSV.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Environment JSON. Defaults to `<output stem>.env.json` next to the
    /// dataset.
    #[arg(long)]
    pub env_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// Dataset file (CSV or JSON lines).
    pub data: PathBuf,
    /// Algorithms: comma-separated names or `all`.
    #[arg(long, default_value = "all")]
    pub algo: AlgoList,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Hold out this fraction (stratified) and train on the rest. Without
    /// it, models see the whole dataset.
    #[arg(long)]
    pub holdout: Option<f64>,
    /// Directory for `<algo>.json` model files.
    #[arg(short, long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Test fraction. Defaults to the config's evaluation.test_fraction.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of folds. Defaults to the config's evaluation.folds.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Test fraction. Defaults to the config's evaluation.test_fraction.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Timed repetitions per model; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// The held-out part is the timed batch.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AttackArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Experiments to run. Defaults to the config's [[attacks]], or all
    /// three.
    #[arg(long, value_delimiter = ',')]
    pub attacks: Vec<AttackName>,
    /// Evasion noise levels in dB.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Vec<f64>,
    /// Extraction RSSI shift half-width in dB.
    #[arg(long)]
    pub range_db: Option<f64>,
    /// Extraction query count; every row when absent.
    #[arg(long)]
    pub query_budget: Option<usize>,
    /// Interference noise standard deviation.
    #[arg(long)]
    pub interference_sigma: Option<f64>,
    /// Held-out fraction the attacks are scored on.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Directory for attack_report.csv and attack_report.json.
    #[arg(short, long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ServeArgs {
    /// Listen address. Defaults to the config's service.bind.
    #[arg(long)]
    pub bind: Option<String>,
    /// Environment JSON written by gen-data.
    #[arg(long)]
    pub environment: Option<PathBuf>,
    /// Model files; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<PathBuf>,
    /// JSON-lines user store; in memory when absent.
    #[arg(long)]
    pub user_store: Option<PathBuf>,
    /// Mail spool directory; stdout when absent.
    #[arg(long)]
    pub mail_spool: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DemoArgs {
    /// Tick at which the devices move apart.
    #[arg(long, default_value_t = 4)]
    pub separate_at: usize,
    /// Distance between the devices after they separate, in meters.
    #[arg(long, default_value_t = 10.0)]
    pub separation_m: f64,
    /// Distance while together, in meters.
    #[arg(long, default_value_t = 0.5)]
    pub together_m: f64,
    /// Last tick to run if the session survives.
    #[arg(long)]
    pub max_ticks: Option<usize>,
    /// Training rows per class for the demo models.
    #[arg(long, default_value_t = 1200)]
    pub per_class: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
