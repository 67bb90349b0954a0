use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEFAULT_N: usize = 2;
pub const DEFAULT_SAMPLE: usize = 1000;
pub const DEFAULT_PAIRS: usize = 5;

const GRAMMAR: &str = "\
Semi-polynomial grammar (EBNF):
  poly   = term { '+' term } | '0' ;
  term   = [ coeff '*' ] factor { '*' factor } ;
  factor = ident '{' [ int { ',' int } ] '}' ;
  coeff  = int ;   (* element index: sum of c_i p^i over the coefficients of the element *)
  ident  = letter { letter | digit | '_' } ;
Braces hold the Frobenius powers of the exponent sum, repeats adding up: t{0,0,1} is t^(2 id + frob).
Unknowns are ordered by first appearance.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand; unset values fall back to `--config`, then to defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Field characteristic.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Extension degree.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Monic modulus, coefficients from the constant term up, e.g. 1,1,0,1.
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
    /// Projective dimension.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Sample size for sampled sweeps.
    #[arg(long, global = true)]
    pub sample: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with [field] p, k, modulus and [run] n, sample, seed.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record wall time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Build the flag geometry and report its statistics.
    Geometry {
        /// Include every flag and line in the report.
        #[arg(long)]
        dump: bool,
    },
    /// Twisted-embedding hyperplane campaign.
    Main1,
    /// Cross-twist solutions have rank 1.
    Main3,
    /// Lemma scaffolding for distance-3 pairs.
    Vlemmas {
        /// Frobenius power of the twist growing the third hyperplane.
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        /// Frobenius power of the twist defining the second hyperplane.
        #[arg(long, default_value_t = 0)]
        rho: u32,
        /// Seeded distance-3 pairs beyond the first one.
        #[arg(long, default_value_t = DEFAULT_PAIRS)]
        pairs: usize,
    },
    /// Polarized one-dimensional-kernel quotients.
    Quot2,
    /// Whether a named embedding is polarized.
    Polarized {
        /// natural, twist:J, or either followed by /I for the quotient by the identity matrix.
        #[arg(long, default_value = "natural")]
        embedding: String,
    },
    /// Nonvanishing witness for a semi-polynomial.
    #[command(after_help = GRAMMAR)]
    Identity {
        #[arg(long)]
        expr: String,
    },
    /// Exhaustive geometric-hyperplane search with maximality checks.
    Hyperscan,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    field: FileField,
    #[serde(default)]
    run: FileRun,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileField {
    p: Option<u32>,
    k: Option<u32>,
    modulus: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRun {
    n: Option<usize>,
    sample: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    pub modulus: Option<Vec<u32>>,
}

/// Fully resolved run parameters, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub field: FieldSpec,
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub config_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub kind: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { kind: kind.into(), message: message.into() }
    }
}

fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("ConfigRead", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError::new("ConfigParse", format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: Command, args: CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let p = args.p.or(file.field.p).ok_or_else(|| ConfigError::new("MissingField", "--p is required"))?;
        let k = args.k.or(file.field.k).unwrap_or(1);
        let n = args.n.or(file.run.n).unwrap_or(DEFAULT_N);
        let sample = args.sample.or(file.run.sample).unwrap_or(DEFAULT_SAMPLE);
        if sample == 0 {
            return Err(ConfigError::new("InvalidSample", "--sample must be positive"));
        }
        Ok(RunConfig {
            command,
            field: FieldSpec { p, k, modulus: args.modulus.or(file.field.modulus) },
            n,
            sample,
            seed: args.seed.or(file.run.seed).unwrap_or(0),
            out: args.out,
            format: args.format.unwrap_or(Format::Json),
            timing: args.timing,
            config_file: args.config,
        })
    }
}
