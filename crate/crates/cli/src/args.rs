use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "cadist",
    version,
    about = "Cayley automatic structures and their distance functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON file with option values; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub global: GlobalArgs,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalArgs {
    /// Artifact path; relative paths are taken inside `--out-dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Seed for sampled loops.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on enumerated normal forms.
    #[arg(long, global = true)]
    pub max_words: Option<usize>,
    /// Cap on the area searched for.
    #[arg(long, global = true)]
    pub max_area: Option<u32>,
    /// Cap on nodes per area search.
    #[arg(long, global = true)]
    pub node_budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalogued structures, group models and growth functions.
    List(ListArgs),
    /// Checks the defining conditions of a structure on bounded data.
    Verify(VerifyArgs),
    /// Distance profile `h(0..=n)`.
    Hfun(HfunArgs),
    /// Corridor fillings of loops with their checks.
    Fill(FillArgs),
    /// Areas of words over a finite presentation.
    Area(AreaArgs),
    /// Dehn inequality on sampled loops.
    DehnCheck(DehnArgs),
    /// Dense witness loops in the lamplighter group.
    DenseLoops(DenseArgs),
    /// Step function built from loop lengths.
    Phi(PhiArgs),
    /// Compares growth functions under `g(n) <= K f(M n)`.
    Compare(CompareArgs),
    /// Re-expresses a structure over doubled generators and compares profiles.
    Transport(TransportArgs),
    /// Writes a structure bundle.
    Export(ExportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::List(_) => "list",
            Command::Verify(_) => "verify",
            Command::Hfun(_) => "hfun",
            Command::Fill(_) => "fill",
            Command::Area(_) => "area",
            Command::DehnCheck(_) => "dehn-check",
            Command::DenseLoops(_) => "dense-loops",
            Command::Phi(_) => "phi",
            Command::Compare(_) => "compare",
            Command::Transport(_) => "transport",
            Command::Export(_) => "export",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ListArgs {}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long)]
    pub structure: Option<String>,
    /// Bundle manifest to load instead of a catalogued structure.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub ball_radius: Option<u64>,
    /// Also check `|ψ⁻¹(π(w))|` against the state bound up to this length.
    #[arg(long)]
    pub length_bound: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HfunArgs {
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// `csv` or `json`.
    #[arg(long)]
    pub format: Option<String>,
    /// Cap on individual distances.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FillArgs {
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long = "loop")]
    #[serde(rename = "loop")]
    pub loop_word: Option<String>,
    /// One loop per line; `#` starts a comment line.
    #[arg(long)]
    pub loop_file: Option<PathBuf>,
    /// Dense witness loops `1..=k`.
    #[arg(long)]
    pub dense_n: Option<usize>,
    /// Number of random loops.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Profile length used for the perimeter check.
    #[arg(long)]
    pub profile_n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaArgs {
    /// Presentation JSON: `{"model": ..., "relators": [...]}`.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    /// Standard presentation of this model.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub word: Vec<String>,
    /// Every freely reduced identity word up to this length.
    #[arg(long)]
    pub identity_words: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DehnArgs {
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub cell_max_area: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenseArgs {
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiArgs {
    #[arg(long, value_delimiter = ',')]
    pub lengths: Vec<u64>,
    /// Use the lengths of the first `k` dense witness loops.
    #[arg(long)]
    pub dense_n: Option<usize>,
    #[arg(long)]
    pub upto: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareArgs {
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    /// `KxM`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub range: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub breakpoints_only: bool,
    /// `auto`, `exhaustive`, `breakpoints` or `sampled`.
    #[arg(long)]
    pub mode: Option<String>,
    /// `K,M,N`: check one witness instead of the grid.
    #[arg(long)]
    pub witness: Option<String>,
    /// Superquadratic and strongly superpolynomial evidence for `f`, or for
    /// the whole function catalog without `--f`.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub classify: bool,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportArgs {
    #[arg(long)]
    pub structure: Option<String>,
    /// `doubled`, or `doubled-identity` to add an identity letter.
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportArgs {
    #[arg(long)]
    pub structure: Option<String>,
}
