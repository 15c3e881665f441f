//! `modvar`: non-overlap windows, figure data and the verification suite.
//!
//! Exit codes: 0 success, 1 gate or computation failure, 2 configuration error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use modvar::cl::B2Reading;
use modvar::sim::{self, FigureName, RunConfig, Suite, VerifyOptions};
use modvar::window::{overlap_window, WindowModel};
use modvar::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "modvar",
    version,
    about = "Modular-variable dynamics of a separated Gaussian superposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Latest time at which the two packets' supports are still disjoint.
    Window {
        /// Use the shared-bath width law of the two-particle problem.
        #[arg(long)]
        common_bath: bool,
        #[command(flatten)]
        params: Params,
    },
    /// Write the CSV data behind one figure.
    Figure {
        #[arg(value_enum)]
        name: FigureArg,
        #[command(flatten)]
        params: Params,
    },
    /// Run the verification gates.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
        /// Replace the friction rate in every damped gate.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<String>,
        /// Directory holding the committed golden files.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Read the constant `h` in `b_2` as 1 instead of ħ (a deliberate
        /// mutation that the residual gate must catch).
        #[arg(long)]
        mutate_h: bool,
        /// Run only these gates.
        #[arg(long = "gate")]
        gates: Vec<u8>,
        /// Print per-gate details.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Regenerate or check the golden figure files.
    Golden {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Compare instead of writing.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl From<FigureArg> for FigureName {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig1 => FigureName::Fig1,
            FigureArg::Fig2 => FigureName::Fig2,
            FigureArg::Fig3 => FigureName::Fig3,
            FigureArg::Fig4 => FigureName::Fig4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

/// Parameter overrides. Values are kept as text and parsed by the config
/// layer, so `pi/4` works everywhere.
#[derive(Args, Default)]
struct Params {
    /// Config file of `key = value` lines, or a CSV written by this tool.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    framework: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<String>,
    /// Repeat for several temperatures.
    #[arg(long = "temperature", allow_negative_numbers = true)]
    temperatures: Vec<String>,
    /// Repeat for several phases.
    #[arg(long = "alpha", allow_negative_numbers = true)]
    alphas: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    separation: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    kick: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gravity: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Trajectory start in widths from the left packet centre; repeatable.
    #[arg(long = "x0-offset", allow_negative_numbers = true)]
    x0_offsets: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    support_factor: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Params {
    /// Layer the config file and then the flags over `cfg`.
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Error> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let single = [
            ("framework", &self.framework),
            ("gamma", &self.gamma),
            ("separation", &self.separation),
            ("sigma0", &self.sigma0),
            ("kick", &self.kick),
            ("gravity", &self.gravity),
            ("tmax", &self.tmax),
            ("samples", &self.samples),
            ("support_factor", &self.support_factor),
        ];
        for (key, value) in single {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        let lists = [
            ("temperature", &self.temperatures),
            ("alpha", &self.alphas),
            ("x0_offset", &self.x0_offsets),
        ];
        for (key, values) in lists {
            if !values.is_empty() {
                cfg.set(key, &values.join(","))?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(())
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("modvar: {e}");
    match e {
        Error::Config(_) | Error::Parameter { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn window(common_bath: bool, params: &Params) -> Result<(), Error> {
    let mut cfg = RunConfig {
        framework: sim::FrameworkChoice::Schrodinger,
        ..RunConfig::default()
    };
    params.apply(&mut cfg)?;
    cfg.validate()?;
    let c = cfg.constants()?;
    let spec = cfg.superposition(cfg.alphas[0])?;
    let mut models = Vec::new();
    if cfg.framework.includes_schrodinger() && !common_bath {
        models.push(WindowModel::Schrodinger);
    }
    if cfg.framework.includes_cl() || common_bath {
        for &t in &cfg.temperatures {
            let b = cfg.bath(t)?;
            models.push(if common_bath {
                WindowModel::CommonBath(b)
            } else {
                WindowModel::CaldeiraLeggett(b)
            });
        }
    }
    for model in &models {
        let w = overlap_window(model, &spec, &c, cfg.support_factor)?;
        println!("{:.6}\t{}", w.t_max, w.criterion);
    }
    Ok(())
}

fn figure(name: FigureName, params: &Params) -> Result<(), Error> {
    let mut cfg = RunConfig::for_figure(name);
    params.apply(&mut cfg)?;
    let tables = sim::generate_figure(name, &cfg)?;
    for table in &tables {
        for line in table.header.iter().filter(|l| l.starts_with("note: ")) {
            eprintln!("{}: {line}", table.file_name);
        }
    }
    for path in sim::write_tables(&tables, &cfg.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Window { common_bath, params } => window(common_bath, &params),
        Command::Figure { name, params } => figure(name.into(), &params),
        Command::Verify {
            suite,
            gamma,
            golden,
            mutate_h,
            gates,
            verbose,
        } => {
            let gamma_override = match gamma.as_deref().map(|g| sim::parse_number(g).filter(|v| *v >= 0.0)) {
                None => None,
                Some(Some(v)) => Some(v),
                Some(None) => {
                    return fail(&Error::Config(format!(
                        "`gamma`: `{}` is not a non-negative number",
                        gamma.unwrap_or_default()
                    )))
                }
            };
            let opts = VerifyOptions {
                suite: match suite {
                    SuiteArg::Fast => Suite::Fast,
                    SuiteArg::Full => Suite::Full,
                },
                reading: if mutate_h {
                    B2Reading::Unit
                } else {
                    B2Reading::default()
                },
                gamma_override,
                golden_dir: golden.unwrap_or_else(|| sim::default_golden_dir().to_path_buf()),
            };
            let ids: Vec<u8> = if gates.is_empty() {
                (1..=sim::GATE_COUNT).collect()
            } else {
                gates
            };
            let mut failed = 0;
            for id in ids {
                let Some(result) = sim::run_gate(id, &opts) else {
                    return fail(&Error::Config(format!(
                        "no gate {id}; gates are 1..={}",
                        sim::GATE_COUNT
                    )));
                };
                println!("{result}");
                if verbose || !result.passed {
                    for d in &result.details {
                        println!("        {d}");
                    }
                }
                failed += usize::from(!result.passed);
            }
            if failed > 0 {
                eprintln!("modvar: {failed} gate(s) failed");
                return ExitCode::from(1);
            }
            Ok(())
        }
        Command::Golden { dir, check } => {
            let dir = dir.unwrap_or_else(|| sim::default_golden_dir().to_path_buf());
            if check {
                match sim::check_golden(&dir) {
                    Ok(report) if report.passed() => {
                        println!("{} files match {}", report.checked, dir.display());
                        Ok(())
                    }
                    Ok(report) => {
                        for (file, why) in &report.mismatches {
                            eprintln!("{file}: {why}");
                        }
                        return ExitCode::from(1);
                    }
                    Err(e) => Err(e),
                }
            } else {
                sim::write_golden(&dir).map(|names| {
                    for n in names {
                        println!("{}", dir.join(n).display());
                    }
                })
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
