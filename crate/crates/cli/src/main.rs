//! `dieudonne`: command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure (always for `verify`, in
//! `--strict` mode otherwise) or an internal error, 2 bad arguments or
//! unparsable input, 3 a refused computation (cap exceeded).

mod commands;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dieudonne::report::Report;
use dieudonne::{Caps, Error};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "dieudonne", version, about = "Witt vectors, finite group schemes and Dieudonné modules over F_p")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Exit with code 1 when any attached check fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Directory for cached Witt laws (default: $DIEUDONNE_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Overrides for the refusal thresholds; the defaults are those of
/// `Caps::default()`.
#[derive(Args, Debug, Default)]
struct CapArgs {
    /// Largest Hopf-algebra dimension [default: 4096].
    #[arg(long, global = true)]
    cap_dim: Option<usize>,
    /// Largest dimension given to the isomorphism search [default: 256].
    #[arg(long, global = true)]
    cap_iso_dim: Option<usize>,
    /// Node budget of the isomorphism search [default: 5000000].
    #[arg(long, global = true)]
    cap_iso_nodes: Option<u64>,
    /// Largest Dieudonné module enumerated [default: 65536].
    #[arg(long, global = true)]
    cap_enumeration: Option<u64>,
    /// Largest free A-module enumerated by `dieudonne inverse` [default: 65536].
    #[arg(long, global = true)]
    cap_free_module: Option<u64>,
    /// Largest field size.
    #[arg(long, global = true)]
    cap_field_size: Option<u64>,
    /// Witt level cap [default: 6 for p=2, 4 for p=3, 3 for p=5, else 2].
    #[arg(long, global = true)]
    cap_witt_level: Option<u32>,
    /// λ level cap [default: 2 for p ≤ 3, else 1].
    #[arg(long, global = true)]
    cap_lambda_level: Option<u32>,
}

impl CapArgs {
    fn to_caps(&self) -> Caps {
        let mut c = Caps::default();
        if let Some(v) = self.cap_dim {
            c.dim = v;
        }
        if let Some(v) = self.cap_iso_dim {
            c.iso_dim = v;
        }
        if let Some(v) = self.cap_iso_nodes {
            c.iso_nodes = v;
        }
        if let Some(v) = self.cap_enumeration {
            c.enumeration = v;
        }
        if let Some(v) = self.cap_free_module {
            c.free_module = v;
        }
        if let Some(v) = self.cap_field_size {
            c.field_size = v;
        }
        c.witt_level = self.cap_witt_level;
        c.lambda_level = self.cap_lambda_level;
        c
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Witt-vector laws and arithmetic.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Finite group schemes from the catalog.
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Dieudonné modules and the inverse functor.
    #[command(subcommand)]
    Dieudonne(DieudonneCmd),
    /// Cartier duality and the Dieudonné pairing.
    #[command(subcommand)]
    Dual(DualCmd),
    /// The Leibniz polynomial λ_r of the divided power D^(p^r).
    Lambda {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: u32,
    },
    /// Runs a named verification suite; exits 0 iff every check passes.
    Verify {
        #[arg(value_enum)]
        suite: suites::Suite,
        /// Restrict to one prime (default: 2 and 3).
        #[arg(long)]
        p: Option<u32>,
        /// Restrict to one level n.
        #[arg(long)]
        n: Option<u32>,
        /// Restrict to one level m.
        #[arg(long)]
        m: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum WittCmd {
    /// Prints φ (add), ψ (mul) or the negation law up to level n.
    Law {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "add")]
        kind: String,
    },
    /// Adds or multiplies two vectors of W_n(F_p).
    Eval {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        /// Components a0,a1,..,an.
        #[arg(long)]
        lhs: String,
        /// Components b0,b1,..,bn.
        #[arg(long)]
        rhs: String,
        #[arg(long, value_enum, default_value_t = commands::WittOp::Add)]
        op: commands::WittOp,
    },
}

#[derive(Subcommand, Debug)]
enum SchemeCmd {
    /// Builds a scheme (alpha:N, witt:n,m, ep, zero, dual(…), products with *)
    /// and checks the Hopf axioms.
    Build {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        p: u32,
    },
}

#[derive(Subcommand, Debug)]
enum DieudonneCmd {
    /// Enumerates D(G) and prints its size, generators and presentation.
    Enumerate {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        p: u32,
    },
    /// Builds the scheme of a presented module, e.g. "A/(F-V,p)".
    Inverse {
        #[arg(long)]
        module: String,
        #[arg(long)]
        p: u32,
        /// Catalog expression to test the result against for isomorphism.
        #[arg(long)]
        compare: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum DualCmd {
    /// The standard functional y on W_{n,m} and the isomorphism W_{n,m}^D ≅ W_{m,n}.
    Standard {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
    },
    /// The pairing D(G) × D(G^D) → W(F_p) of a catalog scheme.
    Pairing {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        p: u32,
    },
}

/// What a command produces: a text rendering, a JSON payload, and the
/// checks that ran along the way.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub reports: Vec<Report>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Parse(_) | Error::InvalidArgument(_) | Error::InvalidField(_) => 2,
        _ => 1,
    }
}

fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = out.text.clone();
            if !s.is_empty() && !s.ends_with('\n') {
                s.push('\n');
            }
            for r in &out.reports {
                s.push_str(&r.summary_line());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let pass = out.reports.iter().all(|r| r.pass);
            let reports: Vec<Value> = out.reports.iter().map(Report::to_json).collect();
            let v = json!({ "result": out.json, "reports": reports, "pass": pass });
            serde_json::to_string_pretty(&v).expect("json renders") + "\n"
        }
    }
}

fn run(cli: &Cli) -> dieudonne::Result<(Output, bool)> {
    let caps = cli.caps.to_caps();
    let cache = cli.cache_dir.clone().or_else(dieudonne::witt::cache_dir_from_env);
    let out = match &cli.command {
        Command::Witt(WittCmd::Law { p, n, kind }) => commands::witt_law(*p, *n, kind, &caps, cache.as_deref())?,
        Command::Witt(WittCmd::Eval { p, n, lhs, rhs, op }) => commands::witt_eval(*p, *n, lhs, rhs, *op, &caps)?,
        Command::Scheme(SchemeCmd::Build { kind, p }) => commands::scheme_build(kind, *p, &caps)?,
        Command::Dieudonne(DieudonneCmd::Enumerate { scheme, p }) => commands::dieudonne_enumerate(scheme, *p, &caps)?,
        Command::Dieudonne(DieudonneCmd::Inverse { module, p, compare }) => {
            commands::dieudonne_inverse(module, *p, compare.as_deref(), &caps)?
        }
        Command::Dual(DualCmd::Standard { n, m, p }) => commands::dual_standard(*n, *m, *p, &caps)?,
        Command::Dual(DualCmd::Pairing { scheme, p }) => commands::dual_pairing(scheme, *p, &caps)?,
        Command::Lambda { p, r } => commands::lambda(*p, *r, &caps)?,
        Command::Verify { suite, p, n, m } => {
            let grid = suites::Grid { p: *p, n: *n, m: *m };
            return Ok((suites::run(*suite, &grid, &caps)?, true));
        }
    };
    Ok((out, cli.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, enforce)) => {
            print!("{}", render(&out, cli.format));
            if enforce && out.reports.iter().any(|r| !r.pass) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
