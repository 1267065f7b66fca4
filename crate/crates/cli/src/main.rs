use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iwasawa_cyc::tables::{regenerate_tables, render};
use iwasawa_cyc::{analyze, classify, load_case, render_analysis, Options, PipelineError};
use iwasawa_cyc_core::lambda_class::{koike_partner, ModuleClass};
use iwasawa_cyc_core::oracle::{self, Corruption};
use iwasawa_cyc_core::padic::splitting_type;
use iwasawa_cyc_core::{IwasawaPoly, SplittingData};

#[derive(Parser)]
#[command(name = "iwasawa-cyc", version, about = "Cyclicity of unramified Iwasawa modules over imaginary quadratic fields")]
struct Cli {
    /// Use only this many p-adic digits of the Iwasawa polynomial.
    #[arg(long, global = true)]
    precision_override: Option<u32>,
    /// Emit JSON instead of the text trace.
    #[arg(long, global = true)]
    json_report: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one case file.
    Analyze { file: PathBuf },
    /// Determine k only.
    Classify { file: PathBuf },
    /// Check a case file against the schema and standing hypotheses.
    Validate { file: PathBuf },
    /// Regenerate the verdict tables from a corpus directory.
    Tables { dir: PathBuf },
    /// Brute-force verifiers.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Args, Clone)]
struct PolyArgs {
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// Digits of the coefficients.
    #[arg(long, default_value_t = 8)]
    prec: u32,
    #[arg(long, allow_hyphen_values = true)]
    c1: i128,
    #[arg(long, allow_hyphen_values = true)]
    c0: i128,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Count isomorphism classes of S-stable lattices.
    Classes {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Fitting ideals of M(k) under random presentations.
    Fitting {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Swap two entries of the presentation as a negative control.
        #[arg(long)]
        corrupt: bool,
    },
    /// Isomorphism between M(k) and its Koike partner.
    Koike {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Closed-form action of S on random generator frames.
    Mainlem {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn splitting(poly: &PolyArgs) -> Result<SplittingData, String> {
    let f = IwasawaPoly::new(poly.p, poly.prec, poly.c1, poly.c0).map_err(|e| e.to_string())?;
    let sd = splitting_type(&f).map_err(|e| format!("{f}: {e}"))?;
    if sd.roots.is_none() {
        return Err(format!("{f}: roots are not materialized"));
    }
    Ok(sd)
}

fn run_oracle(cmd: OracleCmd) -> Result<bool, String> {
    match cmd {
        OracleCmd::Classes { poly, budget } => {
            let sd = splitting(&poly)?;
            let (a, b) = sd.roots.expect("checked");
            let n = oracle::enumerate_classes(&a, &b, budget).map_err(|e| e.to_string())?;
            println!("{} classes, ord(beta - alpha) + 1 = {}", n, sd.ord_diff + 1);
            Ok(n as u32 == sd.ord_diff + 1)
        }
        OracleCmd::Fitting { poly, k, trials, seed, corrupt } => {
            let sd = splitting(&poly)?;
            let mc = ModuleClass::new(k, sd).map_err(|e| e.to_string())?;
            let mode = if corrupt { Corruption::SwapFirstRow } else { Corruption::None };
            match oracle::verify_fitting(&mc, trials, seed, mode) {
                Ok(()) => {
                    println!("{trials} presentations agree with the closed forms");
                    Ok(true)
                }
                Err(c) => {
                    println!("counterexample: {c}");
                    Ok(false)
                }
            }
        }
        OracleCmd::Koike { poly, budget } => {
            let sd = splitting(&poly)?;
            let (a, b) = sd.roots.expect("checked");
            let mut all = true;
            for k in 0..=sd.ord_diff {
                let x = koike_partner(&ModuleClass::new(k, sd).map_err(|e| e.to_string())?).x;
                let ok = oracle::verify_koike_iso(&a, &b, k, x, budget).map_err(|e| e.to_string())?;
                println!("k = {k}: N_{x} {}", if ok { "isomorphic" } else { "NOT isomorphic" });
                all &= ok;
            }
            Ok(all)
        }
        OracleCmd::Mainlem { poly, trials, seed } => {
            let sd = splitting(&poly)?;
            let mut all = true;
            for k in 0..=sd.ord_diff {
                let mc = ModuleClass::new(k, sd).map_err(|e| e.to_string())?;
                match oracle::verify_main_lem(&mc, trials, seed) {
                    Ok(rejected) => println!("k = {k}: {trials} frames agree ({rejected} singular draws skipped)"),
                    Err(c) => {
                        println!("k = {k}: counterexample {c}");
                        all = false;
                    }
                }
            }
            Ok(all)
        }
    }
}

fn fail(e: &PipelineError, json: bool) -> ExitCode {
    match e {
        PipelineError::Invalid(vs) if json => println!("{}", serde_json::json!({ "violations": vs })),
        PipelineError::Invalid(vs) => {
            for v in vs {
                eprintln!("{v}");
            }
        }
        other => eprintln!("{other}"),
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { precision_override: cli.precision_override };
    match cli.command {
        Command::Analyze { file } => {
            let case = match load_case(&file) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(3);
                }
            };
            match analyze(&case, &opts) {
                Ok(a) => {
                    if cli.json_report {
                        println!("{}", serde_json::to_string_pretty(&a).expect("report serializes"));
                    } else {
                        print!("{}", render_analysis(&a));
                    }
                    ExitCode::from(a.exit_code() as u8)
                }
                Err(e) => fail(&e, cli.json_report),
            }
        }
        Command::Classify { file } => {
            let case = match load_case(&file) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(3);
                }
            };
            match classify(&case, &opts) {
                Ok((ks, trace)) => {
                    if cli.json_report {
                        println!("{}", serde_json::json!({ "k_candidates": ks, "trace": trace }));
                    } else {
                        for t in &trace {
                            println!("  {t}");
                        }
                        println!("k: {ks:?}");
                    }
                    ExitCode::from(if ks.len() == 1 { 0 } else { 2 })
                }
                Err(e) => fail(&e, cli.json_report),
            }
        }
        Command::Validate { file } => {
            let case = match load_case(&file) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(3);
                }
            };
            match iwasawa_cyc::validate(&case, &opts) {
                Ok(()) => {
                    println!("valid");
                    ExitCode::SUCCESS
                }
                Err(vs) => fail(&PipelineError::Invalid(vs), cli.json_report),
            }
        }
        Command::Tables { dir } => match regenerate_tables(&dir, &opts) {
            Ok(rows) => {
                if cli.json_report {
                    println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
                } else {
                    print!("{}", render(&rows));
                }
                if rows.iter().any(|r| r.error.is_some()) {
                    ExitCode::from(4)
                } else if rows.iter().all(|r| r.ok()) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(3)
            }
        },
        Command::Oracle(cmd) => match run_oracle(cmd) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(4),
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(3)
            }
        },
    }
}
