//! cohstruct CLI entrypoint.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cohstruct::cli::{self, Diagnostic, EXIT_CONFIG, EXIT_PASS};

#[derive(Debug, Parser)]
#[command(name = "cohstruct", version)]
#[command(about = "Numerical checks for coherent-state quantization on phase space")]
struct Cli {
    #[command(subcommand)]
    command: Action,
}

#[derive(Debug, Subcommand)]
enum Action {
    /// Run the checks named by a config and write a JSON report
    Run {
        #[arg(long)]
        config: PathBuf,

        /// Report path; overrides the config's `output`. Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,

        /// Suppress the human-readable summary.
        #[arg(long)]
        quiet: bool,
    },

    /// Report schema and semantic problems in a config
    Validate {
        #[arg(long)]
        config: PathBuf,

        #[arg(long)]
        quiet: bool,
    },
}

fn read_config(path: &PathBuf) -> Result<String, Vec<Diagnostic>> {
    fs::read_to_string(path).map_err(|e| {
        vec![Diagnostic {
            path: String::new(),
            message: format!("cannot read {}: {e}", path.display()),
        }]
    })
}

fn print_diagnostics(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("config error: {d}");
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, quiet: bool) -> i32 {
    let parsed = read_config(&config).and_then(|src| {
        let cfg = cli::load(&src)?;
        let hash = cli::config_hash(&src).map_err(|e| {
            vec![Diagnostic {
                path: String::new(),
                message: e.to_string(),
            }]
        })?;
        Ok((cfg, hash))
    });
    let (cfg, hash) = match parsed {
        Ok(x) => x,
        Err(d) => {
            print_diagnostics(&d);
            return EXIT_CONFIG;
        }
    };
    let report = cli::run(&cfg, hash);
    let target = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
    let json = report.to_json();
    let to_stdout = target.is_none();
    match &target {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{json}"),
    }
    if !quiet {
        let mut lines: Vec<String> = report.records.iter().map(|r| r.summary()).collect();
        lines.push(format!(
            "{} {}: {} records, {:.3} s",
            if report.overall_pass { "PASS" } else { "FAIL" },
            report.command,
            report.records.len(),
            report.wall_clock_seconds
        ));
        for line in lines {
            if to_stdout {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        }
    }
    cli::exit_code(&report)
}

fn validate(config: PathBuf, quiet: bool) -> i32 {
    let diagnostics = match read_config(&config) {
        Ok(src) => cli::validate_source(&src),
        Err(d) => d,
    };
    for d in &diagnostics {
        println!("{d}");
    }
    if diagnostics.is_empty() {
        if !quiet {
            println!("valid: {}", config.display());
        }
        EXIT_PASS
    } else {
        EXIT_CONFIG
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Action::Run { config, out, quiet } => run(config, out, quiet),
        Action::Validate { config, quiet } => validate(config, quiet),
    };
    ExitCode::from(code as u8)
}
