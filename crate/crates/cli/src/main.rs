//! `reslat`: command-line front end for the finite residuated lattice
//! workbench. JSON reports go to stdout; human summaries go to stderr.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod report;

use report::{ErrorBody, Report};

#[derive(Parser)]
#[command(name = "reslat", version, about = "Finite residuated lattices: sums, morphisms, free algebras, projectivity")]
struct Cli {
    /// JSON config with caps and worker count; defaults to $RESLAT_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// No human summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(flatten)]
    caps: CapFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct CapFlags {
    #[arg(long, global = true)]
    pub max_product_size: Option<usize>,
    #[arg(long, global = true)]
    pub max_closure_size: Option<usize>,
    #[arg(long, global = true)]
    pub max_model_size: Option<usize>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate an algebra and check (quasi)equations on it.
    Check {
        algebra: String,
        /// Equation or quasiequation, e.g. "(x->y)|(y->x)=1"; repeatable.
        #[arg(long = "eq")]
        equations: Vec<String>,
    },
    /// Structural properties.
    Props { algebra: String },
    /// Ordinal sum of two or more algebras.
    Ordsum {
        #[arg(required = true, num_args = 2..)]
        algebras: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decomposition into sum-irreducible components.
    Decompose { algebra: String },
    /// Homomorphisms from A to B.
    Homs {
        source: String,
        target: String,
        #[arg(long, conflicts_with_all = ["injective", "bijective"])]
        surjective: bool,
        #[arg(long, conflicts_with = "bijective")]
        injective: bool,
        #[arg(long)]
        bijective: bool,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// An isomorphism, if any.
    Iso { a: String, b: String },
    /// A retraction of B onto A, if any.
    Retract { a: String, b: String },
    /// Direct product.
    Prod {
        #[arg(required = true, num_args = 1..)]
        algebras: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subalgebra generated by comma-separated elements (labels or indices).
    Subgen { algebra: String, elements: String },
    /// All deductive filters.
    Filters { algebra: String },
    /// Quotient by the filter generated by the given elements.
    Quotient { algebra: String, elements: String },
    /// Subdirect irreducibility.
    Si { algebra: String },
    /// Free algebra on k generators.
    Free {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of B in a variety.
    Member {
        algebra: String,
        #[arg(long)]
        variety: String,
    },
    /// Finitely presented algebra.
    Fp {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        gens: usize,
        /// Relation "t1=t2"; repeatable.
        #[arg(long = "rel")]
        relations: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate algebras up to isomorphism.
    Gen {
        /// Largest size.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        /// Comma-separated properties, e.g. divisible,prelinear.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        #[arg(long)]
        signature: Option<String>,
        #[arg(long)]
        satisfy: Vec<String>,
        #[arg(long)]
        refute: Vec<String>,
        /// Permit sizes beyond the configured cap.
        #[arg(long)]
        allow_large: bool,
        /// Directory for one algebra file per model.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projectivity verdict in a locally finite variety.
    Projective {
        algebra: String,
        #[arg(long)]
        variety: String,
        /// Always use the retract-of-free search.
        #[arg(long)]
        general: bool,
    },
    /// Projectivity of a finite Heyting algebra from its decomposition.
    ClassifyHeyting { algebra: String },
    /// Lifting f: A → B with g∘f = h.
    Zeroproj {
        algebra: String,
        /// h: A → C, as a map array or homomorphism object.
        h: PathBuf,
        /// g: B → C.
        g: PathBuf,
        /// B, if the file for g does not name it.
        #[arg(long)]
        via: Option<String>,
        /// C, if the file for h does not name it.
        #[arg(long)]
        onto: Option<String>,
    },
    /// Unification report for a finitely presented algebra.
    Unify {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        gens: usize,
        #[arg(long = "rel")]
        relations: Vec<String>,
        /// Largest projective target considered.
        #[arg(long, default_value_t = 4)]
        cap: usize,
    },
    /// Built-in algebras.
    Catalog,
}

fn exit_code(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<reslat::Error>() {
            return match e {
                reslat::Error::SizeLimitExceeded { .. } => (3, "cap_exceeded"),
                reslat::Error::Inconsistent(_) => (1, "internal"),
                _ => (2, "malformed_input"),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return (2, "malformed_input");
        }
    }
    (2, "malformed_input")
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let started = Instant::now();
    let mut report = Report::new(argv[1..].to_vec());
    let outcome = config::load(cli.config.as_deref(), &cli.caps)
        .and_then(|limits| commands::run(&cli.command, limits));
    let code = match outcome {
        Ok(out) => {
            report.inputs = out.inputs;
            report.result = Some(out.result);
            if !cli.quiet {
                for line in &out.summary {
                    eprintln!("{line}");
                }
            }
            0
        }
        Err(err) => {
            let (code, kind) = exit_code(&err);
            report.error = Some(ErrorBody { kind, message: format!("{err:#}") });
            if !cli.quiet {
                eprintln!("error: {err:#}");
            }
            code
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serialises");
    // a closed pipe on stdout is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if !cli.quiet {
        eprintln!("time: {:.1} ms", started.elapsed().as_secs_f64() * 1000.0);
    }
    ExitCode::from(code)
}
