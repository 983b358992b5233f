use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cshallow::harness::{self, HarnessConfig, EXIT_INPUT, EXIT_IO, EXIT_OK};

#[derive(Parser)]
#[command(name = "cshallow", about = "Translate functional IR to C and validate the translation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the C translation and print fuel bounds.
    Gen {
        ir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Parse, check and statically check only.
    Check {
        ir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Differentially validate every function and loop.
    Validate {
        ir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run one generated C function on the given arguments.
    Run {
        ir: PathBuf,
        /// Function to run.
        #[arg(long = "fn")]
        fun: String,
        /// Arguments such as `int:3`, `uchar[]:1,2,3` or bare `3`.
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tests: Option<usize>,
    #[arg(long = "fuel-cap")]
    fuel_cap: Option<u64>,
    /// File of `bits_* = N` lines.
    #[arg(long)]
    sizes: Option<PathBuf>,
}

struct Fail(i32, String);

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn config(o: &Opts) -> Result<HarnessConfig, Fail> {
    let mut c = HarnessConfig::default();
    let bad = |p: &Path, e: harness::ConfigError| Fail(EXIT_INPUT, format!("{}: {e}", p.display()));
    if let Some(p) = &o.config {
        c.apply_file(&read(p)?).map_err(|e| bad(p, e))?;
    }
    if let Some(p) = &o.sizes {
        c.apply_sizes(&read(p)?).map_err(|e| bad(p, e))?;
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    if let Some(t) = o.tests {
        c.tests = t;
    }
    if let Some(f) = o.fuel_cap {
        c.fuel_cap = f;
    }
    Ok(c)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stage(e: harness::HarnessError) -> Fail {
    Fail(EXIT_INPUT, e.to_string())
}

fn real_main(cli: Cli) -> Result<i32, Fail> {
    match cli.cmd {
        Cmd::Gen { ir, opts } => {
            let cfg = config(&opts)?;
            let (c, table) = harness::cmd_gen(&read(&ir)?, &cfg).map_err(stage)?;
            let out = opts.out.clone().unwrap_or_else(|| ir.with_extension("c"));
            emit(&Some(out), &c)?;
            print!("{table}");
            Ok(EXIT_OK)
        }
        Cmd::Check { ir, opts } => {
            let cfg = config(&opts)?;
            harness::load(&read(&ir)?, &cfg.params).map_err(stage)?;
            println!("wellformed");
            Ok(EXIT_OK)
        }
        Cmd::Validate { ir, opts } => {
            let cfg = config(&opts)?;
            let id = ir.file_name().map_or_else(|| ir.display().to_string(), |n| n.to_string_lossy().into_owned());
            let r = harness::cmd_validate(&read(&ir)?, &id, &cfg).map_err(stage)?;
            emit(&opts.out, &r.to_json())?;
            Ok(r.exit_code())
        }
        Cmd::Run { ir, fun, args, opts } => {
            let cfg = config(&opts)?;
            let r = harness::cmd_run(&read(&ir)?, &fun, &args, &cfg).map_err(stage)?;
            emit(&opts.out, &r.text)?;
            Ok(r.exit)
        }
    }
}

fn main() -> ExitCode {
    let code = match real_main(Cli::parse()) {
        Ok(c) => c,
        Err(Fail(c, msg)) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            c
        }
    };
    ExitCode::from(code as u8)
}
