use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lobimpact::impact::ResponseMode;
use lobimpact::regress::{LinearRegion, ModelKind, TreeParams};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lobimpact", version, about = "Market-impact estimation from LOBSTER order-book data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate daily file pairs and summarize their events.
    Ingest(IngestArgs),
    /// Lag-1 response, spread and dispersion per day.
    Impact(ImpactArgs),
    /// Order-flow imbalance samples and the aggregate impact curve.
    Imbalance(ImbalanceArgs),
    /// Time, tick, volume or dollar bars.
    Bars(BarsArgs),
    /// Train/test fit of an impact model and Kyle's lambda.
    Fit(FitArgs),
    /// k-fold cross-validation of an impact model.
    Cv(CvArgs),
    /// Write synthetic LOBSTER files.
    Synth(SynthArgs),
    /// Full pipeline over a directory of daily files.
    Reproduce(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Impact(_) => "impact",
            Command::Imbalance(_) => "imbalance",
            Command::Bars(_) => "bars",
            Command::Fit(_) => "fit",
            Command::Cv(_) => "cv",
            Command::Synth(_) => "synth",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Days processed in parallel; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Key-value file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Inputs {
    /// Message files, or directories holding `*_message*.csv[.gz]` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Book depth when the file name does not carry it.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    /// Keep only this ticker.
    #[arg(long)]
    pub ticker: Option<String>,
    /// First date to include (YYYY-MM-DD).
    #[arg(long)]
    pub date_from: Option<String>,
    /// Last date to include (YYYY-MM-DD).
    #[arg(long)]
    pub date_to: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct Session {
    #[arg(long, default_value = "10:30")]
    pub session_start: String,
    #[arg(long, default_value = "15:00")]
    pub session_end: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Signed,
    Clipped,
}

impl From<Mode> for ResponseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Signed => ResponseMode::Signed,
            Mode::Clipped => ResponseMode::Clipped,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Imbalance {
    /// Market orders per imbalance window.
    #[arg(long = "T", default_value_t = 10)]
    pub window: usize,
    /// Orders between window starts; defaults to T.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Drop samples beyond this many standard deviations; 0 disables.
    #[arg(long, default_value_t = 3.0)]
    pub outlier_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ols,
    Tree,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelOpts {
    #[arg(long, value_enum, default_value_t = Model::Ols)]
    pub model: Model,
    #[arg(long, default_value_t = 5)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 5)]
    pub min_samples_leaf: usize,
}

impl ModelOpts {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::Ols => ModelKind::Ols,
            Model::Tree => ModelKind::Tree(self.tree_params()),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Region {
    /// Linear region for Kyle's lambda: |dV| up to this quantile.
    #[arg(long, default_value_t = 0.5)]
    pub region_quantile: f64,
    /// Linear region as an absolute |dV| bound in shares; overrides the quantile.
    #[arg(long)]
    pub region_cutoff: Option<f64>,
}

impl Region {
    pub fn region(&self) -> LinearRegion {
        match self.region_cutoff {
            Some(c) => LinearRegion::AbsCutoff(c),
            None => LinearRegion::Quantile(self.region_quantile),
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct IngestArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ImpactArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[arg(long, value_enum, default_value_t = Mode::Signed)]
    pub mode: Mode,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ImbalanceArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[command(flatten)]
    pub imbalance: Imbalance,
    /// Equal-width bins of the aggregate impact curve.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BarKindArg {
    Time,
    Tick,
    Volume,
    Dollar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TradeSource {
    /// Every execution row.
    Executions,
    /// One trade per reconstructed market order.
    Orders,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct BarsArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[arg(long, value_enum, default_value_t = BarKindArg::Volume)]
    pub kind: BarKindArg,
    /// Seconds, trades, shares or dollars depending on --kind.
    #[arg(long)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = TradeSource::Executions)]
    pub source: TradeSource,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct FitArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[command(flatten)]
    pub imbalance: Imbalance,
    #[command(flatten)]
    pub model: ModelOpts,
    #[command(flatten)]
    pub region: Region,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CvArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[command(flatten)]
    pub imbalance: Imbalance,
    #[command(flatten)]
    pub model: ModelOpts,
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Poisson limit, market and cancel order flow.
    Zi,
    /// Linear-impact world with a known lambda.
    Kyle,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Generator::Zi)]
    pub generator: Generator,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "SYNTH")]
    pub ticker: String,
    #[arg(long, default_value = "2015-01-02")]
    pub date: String,
    /// Fractional digits of the written timestamps.
    #[arg(long, default_value_t = 9)]
    pub decimals: u8,
    /// Limit orders per second.
    #[arg(long, default_value_t = 1.0)]
    pub lo_rate: f64,
    /// Market orders per second.
    #[arg(long, default_value_t = 0.2)]
    pub mo_rate: f64,
    /// Cancellations per second.
    #[arg(long, default_value_t = 0.5)]
    pub cancel_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long, default_value = "09:30")]
    pub start: String,
    #[arg(long, default_value = "16:00")]
    pub end: String,
    /// Kyle world: impact in cents per share.
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    /// Kyle world: mid noise in cents.
    #[arg(long, default_value_t = 1.0)]
    pub noise_sd: f64,
    /// Kyle world: number of market orders.
    #[arg(long, default_value_t = 50_000)]
    pub n_mo: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub session: Session,
    #[arg(long, value_enum, default_value_t = Mode::Signed)]
    pub mode: Mode,
    #[command(flatten)]
    pub imbalance: Imbalance,
    #[arg(long, default_value_t = 5)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 5)]
    pub min_samples_leaf: usize,
    #[command(flatten)]
    pub region: Region,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}
