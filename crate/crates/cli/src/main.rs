//! `mdpd`: field synthesis, pipeline artifacts, distances and corpus evaluation.

mod commands;
mod config;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "mdpd",
    version,
    about = "Topological distances between multi-fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Geodesic,
    Euclidean,
    Both,
}

/// Flags shared by `pipeline` and `matrix`.
#[derive(Args, Debug, Clone)]
pub struct Quantization {
    /// Field sources: `geodesic`, `euclidean` or CSV paths for meshes; field names for grids.
    #[arg(long, value_delimiter = ',')]
    pub fields: Vec<String>,
    /// Levels per field, or one count for all.
    #[arg(long, default_value = "16")]
    pub levels: String,
    /// `f<i>:<min>:<max>` per input field, or `corpus` for joint ranges.
    #[arg(long)]
    pub range: Vec<String>,
    /// Degeneracy offset; defaults to 1e-6 of each level width.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Bisect mesh edges until no edge skips a level.
    #[arg(long)]
    pub refine: bool,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write normalized geodesic and/or Euclidean descriptor fields of a mesh as CSV.
    Fields {
        mesh: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        which: Which,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build jcn.json, mdrg.json and mdpd.json for one object.
    Pipeline {
        input: PathBuf,
        #[command(flatten)]
        quant: Quantization,
        /// Field permutation, e.g. `1,0`.
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
        /// Include member vertices of each joint contour in jcn.json.
        #[arg(long)]
        members: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Distance between two mdpd.json files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Write the per-level matching as JSON.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Pairwise distance matrix over a manifest of `id, path, label` lines.
    Matrix {
        manifest: PathBuf,
        #[command(flatten)]
        quant: Quantization,
        /// Field permutation; repeat to average the matrices of several orderings.
        #[arg(long)]
        order: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value = "matrix.csv")]
        out: PathBuf,
    },
    /// Retrieval scores of a distance matrix against manifest labels.
    Eval {
        matrix: PathBuf,
        manifest: PathBuf,
        /// Cut-off of the E-measure.
        #[arg(long, default_value_t = mdpd::retrieval::DEFAULT_E_MEASURE_K)]
        e_k: usize,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grayscale (PGM) and colour (PPM) images of a distance matrix.
    Heatmap {
        matrix: PathBuf,
        /// Output prefix; `.pgm` and `.ppm` are appended.
        #[arg(long, default_value = "heatmap")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Fields { mesh, which, out } => commands::fields(&mesh, which, &out),
        Command::Pipeline {
            input,
            quant,
            order,
            members,
            out,
        } => commands::pipeline(&input, &quant, &order, members, &out),
        Command::Dist {
            a,
            b,
            q,
            transcript,
        } => commands::dist(&a, &b, q, transcript.as_deref()),
        Command::Matrix {
            manifest,
            quant,
            order,
            q,
            out,
        } => commands::matrix(&manifest, &quant, &order, q, &out),
        Command::Eval {
            matrix,
            manifest,
            e_k,
            out,
        } => commands::eval(&matrix, &manifest, e_k, out.as_deref()),
        Command::Heatmap { matrix, out } => commands::heatmap(&matrix, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
