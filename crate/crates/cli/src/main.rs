//! `preproj`: Hilbert series, flatness checks, rewriting completion and
//! moment-map verification for decorated preprojective algebras.

mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use preproj_core::degeneration::{flatness_check, flatness_check_degrees};
use preproj_core::parse::parse_quiver_spec;
use preproj_core::preprojective::default_cutoff;
use preproj_core::repvariety::moment_check;
use preproj_core::rewriting::parse_rule_file;
use preproj_core::{hilbert_series, DecoratedQuiver, Error, Field, SignConvention};
use serde_json::Value;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "preproj", version, about = "Decorated preprojective algebra toolkit")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Coefficient field: `rationals` or `gf:<p>` for a prime p.
    #[arg(long, global = true, default_value = "rationals", value_parser = parse_field)]
    pub field: Field,
    /// Highest path degree computed; defaults depend on the command.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Sign convention for the preprojective relation.
    #[arg(long, global = true, value_enum, default_value_t = Signs::Signed)]
    pub signs: Signs,
    /// Base seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the machine-readable result to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signs {
    Signed,
    Plus,
}

impl RunConfig {
    pub fn convention(&self) -> SignConvention {
        match self.signs {
            Signs::Signed => SignConvention::Signed,
            Signs::Plus => SignConvention::AllPlus,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the matrix Hilbert series of a quiver spec.
    Hilbert {
        spec: PathBuf,
        /// Print the total series at s = 1 instead of the matrix.
        #[arg(long = "s-at-1")]
        s_at_1: bool,
    },
    /// Compare a deformed (left) and a degenerate (right) quiver.
    Flatness {
        left: PathBuf,
        right: PathBuf,
        /// Compare total dimensions per degree; shapes may differ.
        #[arg(long)]
        per_degree: bool,
    },
    /// Complete a rewriting system and count irreducible words.
    Confluence { rules: PathBuf },
    /// Check that the moment map equals the evaluation of r.
    MomentCheck {
        spec: PathBuf,
        /// Dimension vector, one entry per vertex.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Number of seeded random representations.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
    /// Run a named bundle of checks and print PASS/FAIL per item.
    Reproduce {
        #[arg(value_enum)]
        suite: suites::Suite,
    },
}

fn parse_field(s: &str) -> Result<Field, String> {
    match s {
        "rationals" | "q" | "Q" => Ok(Field::Rational),
        _ => {
            let p = s.strip_prefix("gf:").ok_or_else(|| format!("expected `rationals` or `gf:<p>`, got `{s}`"))?;
            let p: u32 = p.parse().map_err(|_| format!("`{p}` is not a prime"))?;
            Field::prime(p).map_err(|e| e.to_string())
        }
    }
}

/// A failed command: message and exit status.
struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn input(e: Error) -> Failure {
    usage(e.to_string())
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_quiver(path: &Path, field: Field) -> Result<DecoratedQuiver, Failure> {
    parse_quiver_spec(&read(path)?, field).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_json(config: &RunConfig, value: &Value) -> Result<(), Failure> {
    if let Some(path) = &config.json {
        let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
        std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_hilbert(spec: &Path, s_at_1: bool, config: &RunConfig) -> CmdResult {
    let dq = load_quiver(spec, config.field)?;
    let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(&dq));
    let h = hilbert_series(&dq, config.convention(), cutoff).map_err(input)?;
    if s_at_1 {
        println!("{}", h.render_s_at_1());
    } else {
        println!("{}", h.render());
    }
    if !h.stabilized {
        eprintln!("note: series not stabilized by degree {cutoff}");
    }
    write_json(config, &h.to_json())?;
    Ok(0)
}

fn cmd_flatness(left: &Path, right: &Path, per_degree: bool, config: &RunConfig) -> CmdResult {
    let l = load_quiver(left, config.field)?;
    let r = load_quiver(right, config.field)?;
    let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(&l).max(default_cutoff(&r)));
    let report = if per_degree {
        flatness_check_degrees(&l, &r, cutoff, config.convention())
    } else {
        flatness_check(&l, &r, cutoff, config.convention())
    }
    .map_err(input)?;
    let value = serde_json::to_value(&report).expect("reports serialize");
    println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    write_json(config, &value)?;
    Ok(if report.flat { 0 } else { EXIT_FAILURE })
}

fn cmd_confluence(rules: &Path, config: &RunConfig) -> CmdResult {
    let mut sys = parse_rule_file(&read(rules)?, config.field).map_err(|e| usage(format!("{}: {e}", rules.display())))?;
    let report = match sys.complete() {
        Ok(r) => r,
        Err(e) => {
            return Err(Failure {
                code: EXIT_FAILURE,
                msg: format!("completion failed: {e}"),
            })
        }
    };
    let value = sys.report_json(&report).map_err(input)?;
    println!("rules: {} initial, {} final ({} added)", report.initial_rules, report.final_rules, report.added.len());
    println!("ambiguities checked: {} in {} rounds", report.ambiguities_checked, report.rounds);
    if report.beyond_bound > 0 {
        println!("ambiguities beyond degree {}: {}", sys.degree_bound, report.beyond_bound);
    }
    println!("irreducible words: {}", value["irreducible_total"]);
    write_json(config, &value)?;
    Ok(0)
}

fn cmd_moment_check(spec: &Path, dims: &[usize], seeds: usize, config: &RunConfig) -> CmdResult {
    let dq = load_quiver(spec, config.field)?;
    let case = spec.file_stem().map_or_else(|| "quiver".into(), |s| s.to_string_lossy().into_owned());
    let report = moment_check(&case, &dq, dims, config.seed, seeds).map_err(input)?;
    let value = serde_json::to_value(&report).expect("reports serialize");
    println!("{}", serde_json::to_string(&value).expect("JSON values serialize"));
    write_json(config, &value)?;
    Ok(if report.all_equal { 0 } else { EXIT_FAILURE })
}

fn cmd_reproduce(suite: suites::Suite, config: &RunConfig) -> CmdResult {
    let items = suites::run(suite, config).map_err(input)?;
    let mut failed = 0;
    for item in &items {
        match &item.detail {
            None => println!("PASS  {}", item.name),
            Some(d) => {
                failed += 1;
                println!("FAIL  {}: {d}", item.name);
            }
        }
    }
    println!("{}: {} passed, {} failed", suite.name(), items.len() - failed, failed);
    write_json(config, &suites::to_json(suite, config, &items))?;
    Ok(if failed == 0 { 0 } else { EXIT_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = &cli.config;
    let result = match &cli.command {
        Command::Hilbert { spec, s_at_1 } => cmd_hilbert(spec, *s_at_1, config),
        Command::Flatness { left, right, per_degree } => cmd_flatness(left, right, *per_degree, config),
        Command::Confluence { rules } => cmd_confluence(rules, config),
        Command::MomentCheck { spec, dims, seeds } => cmd_moment_check(spec, dims, *seeds, config),
        Command::Reproduce { suite } => cmd_reproduce(*suite, config),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
