use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::field::{Field, DEFAULT_ORDER_CAP};
use crate::search::DEFAULT_BUDGET;
use crate::setalg::FSet;

/// Environment variable overriding the largest accepted field order.
pub const ORDER_CAP_VAR: &str = "SUMPROD_ORDER_CAP";

pub const DEFAULT_EPSILON: &str = "1/10";
pub const DEFAULT_ITERS: u64 = 10_000;
pub const DEFAULT_MAX_SIZE: usize = 3;

/// The cap from `SUMPROD_ORDER_CAP`, or the built-in default.
pub fn order_cap() -> Result<u64> {
    match std::env::var(ORDER_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c >= 2)
            .ok_or_else(|| Error::InvalidArgument(format!("{ORDER_CAP_VAR} must be an integer >= 2, got `{v}`"))),
        Err(_) => Ok(DEFAULT_ORDER_CAP),
    }
}

pub fn parse_field(spec: &str) -> Result<Field> {
    Field::parse_with_cap(spec, order_cap()?)
}

pub fn parse_epsilon(text: &str) -> Result<exact::Rational> {
    let eps = exact::parse(text).ok_or_else(|| Error::BadEpsilon(text.to_string()))?;
    if !exact::is_open_unit(&eps) {
        return Err(Error::BadEpsilon(text.to_string()));
    }
    Ok(eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    Pluennecke,
    Refine,
    Cover,
    Rudnev,
    Subfield,
    All,
}

impl Lemma {
    pub fn as_str(self) -> &'static str {
        match self {
            Lemma::Pluennecke => "pluennecke",
            Lemma::Refine => "refine",
            Lemma::Cover => "cover",
            Lemma::Rudnev => "rudnev",
            Lemma::Subfield => "subfield",
            Lemma::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    /// A + B
    Sum,
    /// A - B
    Diff,
    /// A · B
    Product,
    /// A / B over nonzero denominators
    Ratio,
    /// (A - A) / (A - A)
    Quotient,
    /// c · A
    Dilate,
    /// t + A
    Translate,
    /// additive energy of A and B
    Energy,
    /// multiplicative energy of A
    Menergy,
    /// max{|A+A|, |A·A|} / |A|
    K,
    /// |A ∩ cG| <= |G|^{1/2} over subfields G and dilates c
    Admissible,
    /// subfield generated by A
    Closure,
}

/// One fully specified run. Written and read as TOML by `--save-config`
/// and `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Command {
    Field {
        field: String,
    },
    Setops {
        field: String,
        op: SetOp,
        a: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scalar: Option<u64>,
    },
    Verify {
        lemma: Lemma,
        field: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        b: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<String>,
        epsilon: String,
        max_size: usize,
    },
    Trace {
        field: String,
        set: String,
        epsilon: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trace_out: Option<PathBuf>,
    },
    Search {
        field: String,
        m: usize,
        exhaustive: bool,
        admissible: bool,
        iters: u64,
        budget: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output: Option<PathBuf>,
    },
    Chart {
        fields: Vec<String>,
        m: Vec<usize>,
        admissible: bool,
        iters: u64,
        budget: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output: Option<PathBuf>,
    },
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Parses every field spec, set literal and ε in the config.
    pub fn validate(&self) -> Result<()> {
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        // config files store integers as TOML's signed 64-bit values
        let budget = match &self.command {
            Command::Search { budget, .. } | Command::Chart { budget, .. } => *budget,
            _ => 0,
        };
        if self.seed > i64::MAX as u64 || budget > i64::MAX as u64 {
            return Err(Error::InvalidArgument(format!("seed and budget must not exceed {}", i64::MAX)));
        }
        match &self.command {
            Command::Field { field } => {
                parse_field(field)?;
            }
            Command::Setops { field, op, a, b, scalar } => {
                let f = parse_field(field)?;
                FSet::parse(&f, a)?;
                if let Some(b) = b {
                    FSet::parse(&f, b)?;
                }
                if let Some(s) = scalar {
                    f.elem(*s)?;
                }
                let needs_b = matches!(op, SetOp::Sum | SetOp::Diff | SetOp::Product | SetOp::Ratio | SetOp::Energy);
                if needs_b && b.is_none() {
                    return Err(Error::InvalidArgument(format!("--b is required for {op:?}").to_lowercase()));
                }
                if matches!(op, SetOp::Dilate | SetOp::Translate) && scalar.is_none() {
                    return Err(Error::InvalidArgument("--scalar is required for dilate and translate".into()));
                }
            }
            Command::Verify { lemma, field, x, b, y, epsilon, max_size } => {
                let f = parse_field(field)?;
                for s in x.iter().chain(b.iter()).chain(y.iter()) {
                    FSet::parse(&f, s)?;
                }
                parse_epsilon(epsilon)?;
                let instance = x.is_some() || y.is_some() || !b.is_empty();
                if instance && *lemma == Lemma::All {
                    return Err(Error::InvalidArgument("`verify all` runs suites and takes no sets".into()));
                }
                if !instance && *max_size == 0 {
                    return Err(Error::InvalidArgument("max-size must be at least 1".into()));
                }
            }
            Command::Trace { field, set, epsilon, .. } => {
                let f = parse_field(field)?;
                FSet::parse(&f, set)?;
                parse_epsilon(epsilon)?;
            }
            Command::Search { field, m, iters, .. } => {
                parse_field(field)?;
                if *m == 0 {
                    return Err(Error::InvalidArgument("m must be at least 1".into()));
                }
                if *iters == 0 {
                    return Err(Error::InvalidArgument("iters must be at least 1".into()));
                }
            }
            Command::Chart { fields, m, iters, .. } => {
                if fields.is_empty() || m.is_empty() {
                    return Err(Error::Empty);
                }
                for f in fields {
                    parse_field(f)?;
                }
                if m.contains(&0) {
                    return Err(Error::InvalidArgument("m must be at least 1".into()));
                }
                if *iters == 0 {
                    return Err(Error::InvalidArgument("iters must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sumprod",
    version,
    about = "Exact sum-product workbench over finite fields F_{p^n}",
    long_about = "Exact sum-product workbench over finite fields F_{p^n}.\n\n\
        Fields are written `p`, `p^n` or `p^n/[c0,...,cn]` with the modulus \
        coefficients listed from the constant term up. Sets are bracketed lists \
        of element indices, where the index of c0 + c1 x + ... is c0 + c1 p + ...\n\n\
        Exit status: 0 on success, 1 on an operational error, 2 when a check \
        finds a violated inequality or invariant."
)]
pub struct Cli {
    /// Output format; search and chart default to csv, the rest to text
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every randomized step [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for searches and suites
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run the TOML config in FILE instead of a subcommand
    #[arg(long, value_name = "FILE", conflicts_with = "save_config")]
    pub config: Option<PathBuf>,
    /// Write the parsed run as TOML to FILE before running it
    #[arg(long, value_name = "FILE")]
    pub save_config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<CliCommand>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Describe F_{p^n}: modulus, order and the subfield lattice
    #[command(long_about = "Describe F_{p^n} = F_p[x]/(m): characteristic, degree, modulus, and every \
        subfield F_{p^d} for d | n, computed as the fixed points of z -> z^(p^d).")]
    Field(FieldArgs),
    /// Compute sumsets, productsets, quotient sets, energies and closures
    #[command(long_about = "Set algebra on subsets of F_{p^n}: A+B, A-B, A·B, A/B, the quotient set \
        R(A) = (A-A)/(A-A), dilates cA, translates t+A, the additive energy \
        #{a1+b1 = a2+b2}, the multiplicative energy #{a1/a2 = a3/a4}, the \
        expansion ratio max{|A+A|,|A·A|}/|A|, the admissibility check \
        |A ∩ cG| <= |G|^{1/2}, and the subfield generated by A.")]
    Setops(SetopsArgs),
    /// Check a lemma on one instance, or exhaustively over small sets
    #[command(long_about = "Check a lemma exactly.\n\n\
        pluennecke: |B1+...+Bk| <= |X+B1|...|X+Bk| / |X|^{k-1}.\n\
        refine: some X' ⊆ X with |X'| >= (1-ε)|X| has |X'+B1+...+Bk| within a \
        constant of the same bound; reports the minimizing X'.\n\
        cover: (1-ε) of X is covered by O(min{|X+Y|,|X-Y|}/|Y|) translates of Y.\n\
        rudnev: the sum over r in R(B) of E(B, rB) is at most |B|^2|R(B)| + |B|^4, \
        and some r in R(B) has E(B, rB) at most the average.\n\
        subfield: closing B under + and · yields the smallest subfield containing B, \
        with a replayable straight-line program.\n\n\
        With --x/--b/--y a single instance is checked. Without them, or with `all`, \
        every subset of size <= --max-size is checked.")]
    Verify(VerifyArgs),
    /// Run the five-case sum-product argument on a set and audit each step
    #[command(long_about = "Trace the sum-product argument on A ⊆ F*: refine A so that |4A| is \
        controlled, pick the dominant dyadic class of lines through the origin, find a popular \
        abscissa and ordinate, classify into cases 1.1, 1.2, 2, 3, 4 or 5, and evaluate every \
        inequality used with exact rationals. K = max{|A+A|,|A·A|}/|A| is compared against \
        |A|^{1/11}/(log2|A|)^{5/11}.")]
    Trace(TraceArgs),
    /// Search m-subsets of F* minimizing max{|A+A|, |A·A|}
    #[command(long_about = "Minimize max{|A+A|, |A·A|} over m-subsets A of F*, exactly by exhaustive \
        enumeration or heuristically by simulated annealing. Emits one CSV row \
        (field,p,n,m,method,seed,best_value,K_num,K_den,exponent,benchmark_12_11,admissible,evaluations).")]
    Search(SearchArgs),
    /// Tabulate extremal values and exponents across fields and sizes
    #[command(long_about = "For every field and m, minimize max{|A+A|, |A·A|}: exhaustively when the \
        candidate count fits the budget, otherwise by annealing. Rows are sorted by field order \
        and m, with exponent log(best)/log(m) and benchmark m^{12/11}/(log2 m)^{5/11}.")]
    Chart(ChartArgs),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Field spec such as 7, 3^2 or 2^4/[1,1,0,0,1]
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct SetopsArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, value_enum)]
    pub op: SetOp,
    /// First operand, e.g. [1,2,4]
    #[arg(long)]
    pub a: String,
    /// Second operand for binary operations
    #[arg(long)]
    pub b: Option<String>,
    /// Element index for dilate and translate
    #[arg(long)]
    pub scalar: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub lemma: Lemma,
    #[arg(long)]
    pub field: String,
    /// The set X
    #[arg(long)]
    pub x: Option<String>,
    /// A summand B_i (repeatable); the set B for rudnev and subfield
    #[arg(long)]
    pub b: Vec<String>,
    /// The set Y for cover
    #[arg(long)]
    pub y: Option<String>,
    /// ε in (0,1) as a fraction such as 1/10
    #[arg(long, default_value = DEFAULT_EPSILON)]
    pub epsilon: String,
    /// Largest set size in suite mode
    #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
    pub max_size: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub field: String,
    /// The set A ⊆ F*
    #[arg(long)]
    pub set: String,
    /// ε for the refinement step
    #[arg(long, default_value = DEFAULT_EPSILON)]
    pub epsilon: String,
    /// Write the full trace as JSON to this path
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub field: String,
    /// Set size
    #[arg(long)]
    pub m: usize,
    /// Enumerate every candidate instead of annealing
    #[arg(long)]
    pub exhaustive: bool,
    /// Restrict to admissible sets
    #[arg(long)]
    pub admissible: bool,
    /// Annealing steps
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: u64,
    /// Largest candidate count enumerated exhaustively
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    /// Field spec (repeatable)
    #[arg(long = "field", required = true)]
    pub fields: Vec<String>,
    /// Set sizes, e.g. --m 3 --m 4 or --m 3,4,5
    #[arg(long, required = true, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long)]
    pub admissible: bool,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Command {
        match c {
            CliCommand::Field(a) => Command::Field { field: a.field },
            CliCommand::Setops(a) => Command::Setops { field: a.field, op: a.op, a: a.a, b: a.b, scalar: a.scalar },
            CliCommand::Verify(a) => Command::Verify {
                lemma: a.lemma,
                field: a.field,
                x: a.x,
                b: a.b,
                y: a.y,
                epsilon: a.epsilon,
                max_size: a.max_size,
            },
            CliCommand::Trace(a) => Command::Trace { field: a.field, set: a.set, epsilon: a.epsilon, trace_out: a.trace_out },
            CliCommand::Search(a) => Command::Search {
                field: a.field,
                m: a.m,
                exhaustive: a.exhaustive,
                admissible: a.admissible,
                iters: a.iters,
                budget: a.budget,
                output: a.output,
            },
            CliCommand::Chart(a) => Command::Chart {
                fields: a.fields,
                m: a.m,
                admissible: a.admissible,
                iters: a.iters,
                budget: a.budget,
                output: a.output,
            },
        }
    }
}

/// What the command line asked for: a run, or a usage message to print.
#[derive(Debug)]
pub enum Parsed {
    Run {
        config: RunConfig,
        save_to: Option<PathBuf>,
    },
    /// Help or version text; exit 0.
    Info(String),
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.to_string())),
                ErrorKind::InvalidSubcommand => {
                    let name = e
                        .get(clap::error::ContextKind::InvalidSubcommand)
                        .map(|v| v.to_string())
                        .unwrap_or_default();
                    Err(Error::UnknownCommand(name))
                }
                _ => Err(Error::InvalidArgument(e.to_string().trim_end().to_string())),
            };
        }
    };
    let config = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)?;
            let mut config = RunConfig::from_toml(&text)?;
            // flags given on the command line win over the file
            if cli.format.is_some() {
                config.format = cli.format;
            }
            if cli.jobs.is_some() {
                config.jobs = cli.jobs;
            }
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            config
        }
        (Some(_), Some(_)) => return Err(Error::InvalidArgument("--config cannot be combined with a subcommand".into())),
        (None, None) => return Err(Error::InvalidArgument("a subcommand or --config is required".into())),
        (None, Some(command)) => RunConfig {
            format: cli.format,
            seed: cli.seed.unwrap_or(0),
            jobs: cli.jobs,
            command: command.into(),
        },
    };
    config.validate()?;
    Ok(Parsed::Run { config, save_to: cli.save_config })
}
