use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "surveyerr",
    version,
    about = "Survey error diagnostics: data defect correlation, rank-based effective sample size, nonresponse bias models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for stochastic subcommands: an unsigned 64-bit integer, or `auto`
    /// to pick one (printed to stderr).
    #[arg(long, global = true)]
    pub seed: Option<String>,

    /// Units of rate-valued inputs; percentages are divided by 100 on the way in.
    #[arg(long, value_enum, default_value_t = Units::Proportion, global = true)]
    pub units: Units,

    /// Maximum worker threads (also read from SURVEYERR_THREADS).
    #[arg(long, global = true, env = "SURVEYERR_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Percent,
    Proportion,
}

impl Units {
    pub fn scale(self) -> f64 {
        match self {
            Units::Percent => 0.01,
            Units::Proportion => 1.0,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split an observed error into data quality, quantity and difficulty.
    Decompose(MeanArgs),
    /// Size of a simple random sample with the same expected squared error.
    Neff(NeffArgs),
    /// Z statistic (ddc times sqrt(N)).
    Zstat(MeanArgs),
    /// Measurement-error scenarios contrasting plug-in ddc, corr(R, Y) and design effect.
    Scenario {
        #[command(subcommand)]
        kind: ScenarioKind,
    },
    /// Kendall tau-b between two panels.
    Tau {
        #[command(subcommand)]
        kind: TauKind,
    },
    /// Expected Kendall tau of a national simple random sample with the truth.
    RankSim(RankSimArgs),
    /// Smallest simple random sample whose expected tau reaches a target.
    RankNeff(RankNeffArgs),
    /// Two-group response/vaccination model.
    Twogroup {
        #[command(subcommand)]
        kind: TwoGroupKind,
    },
    /// Trailing-window average of a panel.
    Avg7(AvgArgs),
    /// Data behind the standard figures.
    Repro {
        #[command(subcommand)]
        kind: ReproKind,
    },
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    /// Respondent (or reported) mean.
    #[arg(long)]
    pub sample_mean: f64,
    /// Population mean.
    #[arg(long)]
    pub pop_mean: f64,
    /// Number of respondents.
    #[arg(long = "n")]
    pub n: u64,
    /// Population size.
    #[arg(long = "N")]
    pub population: u64,
    /// Population standard deviation of the outcome (1/N convention).
    #[arg(long)]
    pub sigma: f64,
}

#[derive(Debug, Args)]
pub struct NeffArgs {
    /// Observed error of the estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub error: f64,
    /// Population standard deviation of the outcome.
    #[arg(long)]
    pub sigma: f64,
    /// Population size.
    #[arg(long = "N")]
    pub population: u64,
}

#[derive(Debug, Args)]
pub struct ScenarioCommon {
    /// Population size.
    #[arg(long, default_value_t = 1_000_000)]
    pub population: u64,
    /// Share of the population with Y = 1.
    #[arg(long, default_value_t = 0.5)]
    pub true_rate: f64,
    /// Replications used to estimate the design effect.
    #[arg(long, default_value_t = surveyerr_core::decomposition::DEFAULT_SCENARIO_REPLICATIONS)]
    pub reps: u32,
}

#[derive(Debug, Subcommand)]
pub enum ScenarioKind {
    /// SRS where every respondent reports Y = 1.
    Intimidating {
        #[command(flatten)]
        common: ScenarioCommon,
        /// SRS size (default: population / 20).
        #[arg(long)]
        sample_size: Option<u64>,
    },
    /// Only Y = 1 members respond and half of them answer backwards.
    Misread {
        #[command(flatten)]
        common: ScenarioCommon,
    },
    /// Arbitrary response and reporting probabilities.
    Custom {
        #[command(flatten)]
        common: ScenarioCommon,
        /// Use an SRS of this size instead of Bernoulli response.
        #[arg(long, conflicts_with_all = ["p_respond_one", "p_respond_zero"])]
        srs_n: Option<u64>,
        /// Response probability when Y = 1.
        #[arg(long, default_value_t = 1.0)]
        p_respond_one: f64,
        /// Response probability when Y = 0.
        #[arg(long, default_value_t = 1.0)]
        p_respond_zero: f64,
        /// Probability a respondent with Y = 1 reports 1.
        #[arg(long, default_value_t = 1.0)]
        p_report_one_if_one: f64,
        /// Probability a respondent with Y = 0 reports 1.
        #[arg(long, default_value_t = 0.0)]
        p_report_one_if_zero: f64,
    },
}

#[derive(Debug, Args)]
pub struct PanelColumns {
    /// Geo column name.
    #[arg(long, default_value = "geo")]
    pub geo_col: String,
    /// Date column name (YYYY-MM-DD).
    #[arg(long, default_value = "date")]
    pub date_col: String,
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct PanelPair {
    /// First panel (e.g. survey estimates).
    #[arg(long)]
    pub a: PathBuf,
    /// Second panel (e.g. benchmark).
    #[arg(long)]
    pub b: PathBuf,
    /// Value column in the first panel.
    #[arg(long, default_value = "value")]
    pub a_value_col: String,
    /// Value column in the second panel.
    #[arg(long, default_value = "value")]
    pub b_value_col: String,
    #[command(flatten)]
    pub columns: PanelColumns,
    /// Apply a trailing average of this many days to both panels first.
    #[arg(long)]
    pub window: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum TauKind {
    /// Per date, across geos.
    Cross(PanelPair),
    /// Per geo, across dates.
    Temporal(PanelPair),
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    /// Truth table with columns geo,population,true_rate. Without it a
    /// synthetic table of US state populations is used.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Lowest true rate of the synthetic table.
    #[arg(long, default_value_t = 0.2)]
    pub synthetic_lo: f64,
    /// Highest true rate of the synthetic table.
    #[arg(long, default_value_t = 0.4)]
    pub synthetic_hi: f64,
}

#[derive(Debug, Args)]
pub struct RankSimArgs {
    #[command(flatten)]
    pub truth: TruthArgs,
    /// National sample size(s), comma separated.
    #[arg(long = "n", required = true, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Replications per sample size.
    #[arg(long, default_value_t = surveyerr_core::ranking::DEFAULT_REPLICATIONS)]
    pub reps: u32,
}

#[derive(Debug, Args)]
pub struct RankNeffArgs {
    #[command(flatten)]
    pub truth: TruthArgs,
    /// Target expected Kendall tau.
    #[arg(long, required_unless_present = "survey", conflicts_with = "survey")]
    pub target_tau: Option<f64>,
    /// Survey panel; the target is its tau with the truth on --date.
    #[arg(long, requires = "date")]
    pub survey: Option<PathBuf>,
    /// Date of the survey snapshot (YYYY-MM-DD).
    #[arg(long)]
    pub date: Option<String>,
    /// Value column of the survey panel.
    #[arg(long, default_value = "value")]
    pub value_col: String,
    #[command(flatten)]
    pub columns: PanelColumns,
    /// Lower end of the search bracket.
    #[arg(long, default_value_t = 100)]
    pub n_lo: u64,
    /// Upper end of the search bracket.
    #[arg(long, default_value_t = 250_000)]
    pub n_hi: u64,
    /// Ratio between successive lattice points.
    #[arg(long, default_value_t = surveyerr_core::ranking::DEFAULT_LATTICE_RATIO)]
    pub ratio: f64,
    /// Replications per candidate sample size.
    #[arg(long, default_value_t = surveyerr_core::ranking::DEFAULT_REPLICATIONS)]
    pub reps: u32,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Share of group 1.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Differential vaccination rate.
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    /// Differential response rate.
    #[arg(long, default_value_t = 4.0)]
    pub gamma: f64,
    /// Response probability in group 1.
    #[arg(long, default_value_t = 0.02)]
    pub base_response: f64,
    /// Nominal sample size.
    #[arg(long = "n", default_value_t = 30_000)]
    pub n: u64,
    /// Population size.
    #[arg(long = "N", default_value_t = 250_000_000)]
    pub population: u64,
}

#[derive(Debug, Subcommand)]
pub enum TwoGroupKind {
    /// ddc as a function of group-1 vaccination rate rho.
    Curve {
        #[command(flatten)]
        model: ModelArgs,
        /// Largest rho on the grid.
        #[arg(long, default_value_t = 0.9)]
        rho_max: f64,
        /// Number of grid steps (steps + 1 points).
        #[arg(long, default_value_t = 90)]
        steps: usize,
    },
    /// Finite-population simulation of the model.
    Sim {
        #[command(flatten)]
        model: ModelArgs,
        /// Group-1 vaccination rate.
        #[arg(long)]
        rho: f64,
        /// Number of simulated populations.
        #[arg(long, default_value_t = 1)]
        populations: u64,
    },
    /// Slope of respondent rate against true rate.
    Slope {
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Args)]
pub struct AvgArgs {
    /// Input panel.
    #[arg(long)]
    pub input: PathBuf,
    /// Value column.
    #[arg(long, default_value = "value")]
    pub value_col: String,
    /// Optional sample size column.
    #[arg(long)]
    pub sample_size_col: Option<String>,
    #[command(flatten)]
    pub columns: PanelColumns,
    /// Window length in days.
    #[arg(long, default_value_t = 7)]
    pub window: u32,
}

#[derive(Debug, Subcommand)]
pub enum ReproKind {
    /// Expected tau against national sample size.
    FigRankPower {
        #[command(flatten)]
        truth: TruthArgs,
        /// Sample sizes (default: 500 to 64000, doubling).
        #[arg(long = "n", value_delimiter = ',')]
        n: Vec<u64>,
        #[arg(long, default_value_t = surveyerr_core::ranking::DEFAULT_REPLICATIONS)]
        reps: u32,
    },
    /// ddc against rho for the default two-group parameters.
    FigDdcCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.9)]
        rho_max: f64,
        #[arg(long, default_value_t = 90)]
        steps: usize,
    },
    /// Per-date and per-geo tau between a survey panel and a benchmark panel.
    FigCorrPanel {
        /// Survey panel.
        #[arg(long)]
        survey: PathBuf,
        /// Benchmark panel.
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long, default_value = "value")]
        survey_value_col: String,
        #[arg(long, default_value = "value")]
        benchmark_value_col: String,
        #[command(flatten)]
        columns: PanelColumns,
        /// Trailing average applied to both panels first.
        #[arg(long)]
        window: Option<u32>,
    },
}
