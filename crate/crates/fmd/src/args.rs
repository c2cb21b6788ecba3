use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmd_core::{CompletionKind, PanAssertion};

use crate::error::{CliError, Result};
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "fmd", version, about = "Frequency-mimicking predictive distributions for finite exchangeable sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn parse_kind(s: &str) -> std::result::Result<CompletionKind, String> {
    s.parse().map_err(|_| format!("unknown completion `{s}` (linear|quartic|weak|strict)"))
}

/// Flags shared by every verb.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of conditioning events N.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Lower end of the frequency-mimicking window.
    #[arg(long)]
    pub a1: Option<usize>,
    /// Upper end of the frequency-mimicking window.
    #[arg(long)]
    pub a2: Option<usize>,
    /// Asserted p(0, N).
    #[arg(long = "pL")]
    pub p_lower: Option<f64>,
    /// Asserted p(N, N).
    #[arg(long = "pU")]
    pub p_upper: Option<f64>,
    #[arg(long, default_value = "linear", value_parser = parse_kind)]
    pub completion: CompletionKind,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write masses and densities as natural logs.
    #[arg(long)]
    pub log_output: bool,
}

impl Common {
    pub fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| CliError::missing("N"))
    }

    pub fn assertion(&self) -> Result<PanAssertion> {
        let n = self.require_n()?;
        let a1 = self.a1.ok_or_else(|| CliError::missing("a1"))?;
        let a2 = self.a2.ok_or_else(|| CliError::missing("a2"))?;
        let pl = self.p_lower.ok_or_else(|| CliError::missing("pL"))?;
        let pu = self.p_upper.ok_or_else(|| CliError::missing("pU"))?;
        Ok(PanAssertion::new(n, a1, a2, pl, pu)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Theorem5,
    Theorem6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetName {
    Fig1,
    #[value(name = "fig2-top")]
    Fig2Top,
    #[value(name = "fig2-bottom")]
    Fig2Bottom,
    Fig3,
    Fig4,
    Fig8,
    Appendix1,
    Appendix2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predictive vector p(a, N) under a completion.
    Predict(Common),
    /// Mass function and density histogram of S(N+1).
    Mass(Common),
    /// Mass function reduced to M conditioning events.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long = "M")]
        m: usize,
    },
    /// Mass function of the assertion extended by K events.
    Extend {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K")]
        k: usize,
        /// Lower bound at N + K; defaults to half the admissible maximum.
        #[arg(long = "pL-ext")]
        p_lower_ext: Option<f64>,
        /// Upper bound at N + K; defaults to the midpoint of the admissible range.
        #[arg(long = "pU-ext")]
        p_upper_ext: Option<f64>,
    },
    /// Mass over the window [N theta1, N theta2] next to the Incomplete Beta limit.
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
    },
    /// Mass functions for several values of pU.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long = "pU-list", value_delimiter = ',', required = true)]
        p_upper_list: Vec<f64>,
    },
    /// Parametric lines of the implied frequency-mimicking triples.
    Geometry(Common),
    /// Checks one theorem numerically; exit 3 when it does not hold.
    Verify {
        theorem: Theorem,
        #[command(flatten)]
        common: Common,
        /// q(0, N+1) for the first two theorems.
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        /// Partial-sum length for the second theorem.
        #[arg(long = "M")]
        m: Option<usize>,
        /// Extension length for the fifth theorem.
        #[arg(long = "K", default_value_t = 1000)]
        k: usize,
        /// Added frequency-mimicking count for the fourth theorem.
        #[arg(long)]
        a_star: Option<usize>,
        #[arg(long, default_value_t = 0.2)]
        theta1: f64,
        #[arg(long, default_value_t = 0.6)]
        theta2: f64,
    },
    /// Data behind one of the published figures.
    Preset {
        name: PresetName,
        #[command(flatten)]
        common: Common,
    },
    /// Runs one command per line of FILE (blank lines and `#` comments skipped).
    Batch { file: PathBuf },
}

impl Command {
    pub fn common(&self) -> Option<&Common> {
        Some(match self {
            Command::Predict(c) | Command::Mass(c) | Command::Geometry(c) => c,
            Command::Reduce { common, .. }
            | Command::Extend { common, .. }
            | Command::Limit { common, .. }
            | Command::Sensitivity { common, .. }
            | Command::Verify { common, .. }
            | Command::Preset { common, .. } => common,
            Command::Batch { .. } => return None,
        })
    }
}
