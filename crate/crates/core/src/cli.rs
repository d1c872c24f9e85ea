//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O or file-format error,
//! 3 numeric failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::accel::{self, AccelKind};
use crate::bench::{self, DriverSpec, NoiseSpec, RunReport};
use crate::error::{Error, Result};
use crate::filters::{BoundaryMode, FilterSpec};
use crate::io;
use crate::signal::Signal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "graph-smooth",
    version,
    about = "Accelerated self-guided smoothing filters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterKind {
    Bilateral,
    Guided,
    Tv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Driver {
    Repeated,
    Pcg,
    Nesterov,
}

impl From<Driver> for AccelKind {
    fn from(d: Driver) -> Self {
        match d {
            Driver::Repeated => AccelKind::Repeated,
            Driver::Pcg => AccelKind::Pcg,
            Driver::Nesterov => AccelKind::Nesterov,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Boundary {
    Truncated,
    Symmetric,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an N x N Modified Shepp-Logan phantom as PGM.
    Phantom {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 65535)]
        maxval: u16,
    },
    /// Add seeded Gaussian noise.
    Addnoise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        variance: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mean: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep values outside [0, 1].
        #[arg(long)]
        no_clip: bool,
        #[arg(long, default_value_t = 65535)]
        maxval: u16,
        /// Read and write GSIG graph signals instead of PGM.
        #[arg(long)]
        graph: bool,
    },
    /// Denoise with a self-guided filter and an iteration driver.
    Denoise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        filter: FilterKind,
        #[arg(long, value_enum)]
        accel: Driver,
        /// Total basic-filter calls (a multiple of --restart-k for pcg).
        #[arg(long)]
        iters: usize,
        #[arg(long)]
        restart_k: Option<usize>,
        #[arg(long)]
        sigma_d: Option<f64>,
        #[arg(long)]
        sigma_r: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Mean-filter border handling for the guided filter.
        #[arg(long, value_enum)]
        boundary: Option<Boundary>,
        /// Clean reference; enables the PSNR trace.
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 65535)]
        maxval: u16,
        #[arg(long)]
        graph: bool,
    },
    /// Print the PSNR between two signals.
    Psnr {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        peak: f64,
        #[arg(long)]
        graph: bool,
    },
    /// Run an experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::Numeric { .. } | Error::NonFinite { .. } => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

fn read_signal(path: &Path, graph: bool) -> Result<Signal> {
    if graph {
        io::read_graph_signal(path)
    } else {
        io::read_pgm(path)
    }
}

fn write_output(path: &Path, signal: &Signal, maxval: u16) -> Result<()> {
    if signal.topology().as_graph().is_some() {
        io::write_graph_signal(path, signal)
    } else {
        io::write_pgm(path, signal, maxval)
    }
}

fn check_maxval(maxval: u16) -> Result<()> {
    if maxval == 255 || maxval == 65535 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "--maxval must be 255 or 65535, got {maxval}"
        )))
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Phantom { size, out, maxval } => {
            check_maxval(maxval)?;
            let p = bench::phantom(size)?;
            io::write_pgm(&out, &p, maxval)
        }
        Command::Addnoise {
            input,
            out,
            variance,
            mean,
            seed,
            no_clip,
            maxval,
            graph,
        } => {
            check_maxval(maxval)?;
            let spec = NoiseSpec {
                mean,
                variance,
                seed,
                clip: !no_clip,
            };
            spec.validate()?;
            let x = read_signal(&input, graph)?;
            write_output(&out, &bench::add_noise(&x, &spec)?, maxval)
        }
        Command::Psnr { a, b, peak, graph } => {
            let a = read_signal(&a, graph)?;
            let b = read_signal(&b, graph)?;
            let p = bench::psnr_signals(&a, &b, peak)?;
            if p.is_finite() {
                println!("{p:.4}");
            } else {
                println!("inf");
            }
            Ok(())
        }
        Command::Bench { config } => {
            let cfg = bench::load_experiment(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let outcome = bench::run_experiment(&cfg, base)?;
            print_summary(&outcome.report);
            Ok(())
        }
        Command::Denoise {
            input,
            out,
            filter,
            accel,
            iters,
            restart_k,
            sigma_d,
            sigma_r,
            window,
            eps,
            boundary,
            clean,
            report,
            maxval,
            graph,
        } => {
            check_maxval(maxval)?;
            let spec = filter_spec(filter, sigma_d, sigma_r, window, eps, boundary)?;
            if graph && filter == FilterKind::Guided {
                return Err(Error::Config(
                    "--filter guided works on images only, not with --graph".into(),
                ));
            }
            let driver = DriverSpec {
                kind: accel.into(),
                iters,
                restart_k,
            };
            let accel_config = driver.to_accel_config().map_err(|e| {
                Error::Config(
                    e.to_string()
                        .replace("accel.iters", "--iters")
                        .replace("accel.restart_k", "--restart-k"),
                )
            })?;
            let f = spec.build()?;

            let noisy = read_signal(&input, graph)?;
            let reference = clean
                .as_deref()
                .map(|p| read_signal(p, graph))
                .transpose()?;
            if let Some(r) = &reference {
                if !r.same_topology(&noisy) {
                    return Err(Error::Config("--clean: size differs from --in".into()));
                }
            }

            let run = accel::run(f.as_ref(), &noisy, &accel_config, reference.as_ref())?;
            write_output(&out, &run.output, maxval)?;

            let echo = json!({
                "input": input,
                "clean": clean,
                "filter": spec,
                "accel": driver,
            });
            let noisy_psnr = reference
                .as_ref()
                .map(|r| bench::psnr_signals(r, &noisy, 1.0))
                .transpose()?;
            let rep = RunReport::new(echo, noisy_psnr, &run);
            if let Some(path) = report {
                rep.write(path)?;
            }
            print_summary(&rep);
            Ok(())
        }
    }
}

fn print_summary(report: &RunReport) {
    match (&report.noisy_psnr, &report.final_psnr) {
        (Some(n), Some(f)) => println!(
            "calls={} noisy_psnr={:.4} final_psnr={:.4}",
            report.basic_filter_calls, n.0, f.0
        ),
        _ => println!("calls={}", report.basic_filter_calls),
    }
}

fn filter_spec(
    kind: FilterKind,
    sigma_d: Option<f64>,
    sigma_r: Option<f64>,
    window: Option<usize>,
    eps: Option<f64>,
    boundary: Option<Boundary>,
) -> Result<FilterSpec> {
    let reject = |flag: &str, present: bool, name: &str| {
        if present {
            Err(Error::Config(format!(
                "{flag} does not apply to --filter {name}"
            )))
        } else {
            Ok(())
        }
    };
    match kind {
        FilterKind::Bilateral => {
            reject("--eps", eps.is_some(), "bilateral")?;
            reject("--boundary", boundary.is_some(), "bilateral")?;
            let FilterSpec::Bilateral {
                window: w0,
                sigma_d: d0,
                sigma_r: r0,
            } = FilterSpec::bilateral()
            else {
                unreachable!()
            };
            Ok(FilterSpec::Bilateral {
                window: window.unwrap_or(w0),
                sigma_d: sigma_d.unwrap_or(d0),
                sigma_r: sigma_r.unwrap_or(r0),
            })
        }
        FilterKind::Guided => {
            reject("--sigma-d", sigma_d.is_some(), "guided")?;
            reject("--sigma-r", sigma_r.is_some(), "guided")?;
            let FilterSpec::Guided {
                window: w0,
                epsilon: e0,
                boundary: b0,
            } = FilterSpec::guided()
            else {
                unreachable!()
            };
            Ok(FilterSpec::Guided {
                window: window.unwrap_or(w0),
                epsilon: eps.unwrap_or(e0),
                boundary: match boundary {
                    Some(Boundary::Truncated) => BoundaryMode::Truncated,
                    Some(Boundary::Symmetric) => BoundaryMode::Symmetric,
                    None => b0,
                },
            })
        }
        FilterKind::Tv => {
            reject("--sigma-d", sigma_d.is_some(), "tv")?;
            reject("--sigma-r", sigma_r.is_some(), "tv")?;
            reject("--window", window.is_some(), "tv")?;
            reject("--boundary", boundary.is_some(), "tv")?;
            let FilterSpec::Tv { epsilon: e0 } = FilterSpec::tv() else {
                unreachable!()
            };
            Ok(FilterSpec::Tv {
                epsilon: eps.unwrap_or(e0),
            })
        }
    }
}
