//! Scripted denoising experiments and their JSON reports.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::accel::{self, AccelConfig, AccelKind, DenoiseReport};
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::io;
use crate::signal::{Signal, Topology};

use super::metrics::{best_in_trace, psnr_signals};
use super::noise::{add_noise, NoiseSpec};
use super::phantom::phantom;

/// A PSNR value in dB. Serializes as a number, or `"inf"` for identical
/// images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Db(pub f64);

impl Serialize for Db {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

impl<'de> Deserialize<'de> for Db {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Db(v)),
            Raw::Text(t) if t == "inf" => Ok(Db(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid PSNR `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSpec {
    /// Built-in `n x n` phantom.
    Phantom(usize),
    Pgm(PathBuf),
    Gsig(PathBuf),
}

impl InputSpec {
    pub fn load(&self, base: &Path) -> Result<Signal> {
        match self {
            InputSpec::Phantom(n) => phantom(*n),
            InputSpec::Pgm(p) => io::read_pgm(resolve(base, p)),
            InputSpec::Gsig(p) => io::read_graph_signal(resolve(base, p)),
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Driver selection with the budget in basic-filter calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverSpec {
    pub kind: AccelKind,
    /// Total basic-filter calls. For PCG a multiple of `restart_k`.
    pub iters: usize,
    /// PCG restart length; only valid with `kind = "pcg"` (default 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_k: Option<usize>,
}

pub const DEFAULT_RESTART_K: usize = 3;

impl DriverSpec {
    pub fn to_accel_config(&self) -> Result<AccelConfig> {
        if self.iters == 0 {
            return Err(Error::Config("accel.iters: must be at least 1".into()));
        }
        match self.kind {
            AccelKind::Repeated | AccelKind::Nesterov => {
                if self.restart_k.is_some() {
                    return Err(Error::Config(format!(
                        "accel.restart_k: only meaningful for pcg, not {}",
                        self.kind.as_str()
                    )));
                }
                Ok(if self.kind == AccelKind::Repeated {
                    AccelConfig::repeated(self.iters)
                } else {
                    AccelConfig::nesterov(self.iters)
                })
            }
            AccelKind::Pcg => {
                let k = self.restart_k.unwrap_or(DEFAULT_RESTART_K);
                if k < 2 {
                    return Err(Error::Config(format!(
                        "accel.restart_k: must be at least 2, got {k}"
                    )));
                }
                if !self.iters.is_multiple_of(k) {
                    return Err(Error::Config(format!(
                        "accel.iters: {} is not a multiple of the restart length {k}",
                        self.iters
                    )));
                }
                Ok(AccelConfig::pcg(k, self.iters / k))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noisy: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

/// One experiment. Relative paths resolve against the config file's
/// directory.
///
/// ```json
/// {
///   "input": {"phantom": 512},
///   "noise": {"variance": 0.01, "seed": 1},
///   "filter": {"kind": "tv", "epsilon": 0.001},
///   "accel": {"kind": "pcg", "iters": 135, "restart_k": 3},
///   "outputs": {"image": "tv_pcg.pgm", "report": "tv_pcg.json"}
/// }
/// ```
///
/// Without `reference`, PSNR is measured against the input whenever noise is
/// injected, and not at all otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub input: InputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<InputSpec>,
    pub filter: FilterSpec,
    pub accel: DriverSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

pub fn load_experiment(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            Error::Format {
                path: path.to_path_buf(),
                line: e.line(),
                message: format!("invalid JSON: {e}"),
            }
        } else {
            Error::Config(format!("{}: {e}", path.display()))
        }
    })
}

/// Machine-readable record of one denoising run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: serde_json::Value,
    pub basic_filter_calls: usize,
    pub noisy_psnr: Option<Db>,
    pub final_psnr: Option<Db>,
    /// `[calls, psnr]` of the best iterate in the trace.
    pub best_psnr: Option<(usize, Db)>,
    pub psnr_trace: Vec<(usize, Db)>,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn new(config: serde_json::Value, noisy_psnr: Option<f64>, run: &DenoiseReport) -> Self {
        let trace = run.psnr_trace.clone().unwrap_or_default();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            basic_filter_calls: run.basic_filter_calls,
            noisy_psnr: noisy_psnr.map(Db),
            final_psnr: run.final_psnr().map(Db),
            best_psnr: best_in_trace(&trace).map(|(c, p)| (c, Db(p))),
            psnr_trace: trace.into_iter().map(|(c, p)| (c, Db(p))).collect(),
            elapsed_ms: run.elapsed.as_secs_f64() * 1e3,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Writes a signal in the format matching its topology: 16-bit PGM for
/// grids, GSIG for graphs.
pub fn write_signal(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    match signal.topology().as_ref() {
        Topology::Grid(_) => io::write_pgm(path, signal, 65535),
        Topology::Graph(_) => io::write_graph_signal(path, signal),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: RunReport,
    pub run: DenoiseReport,
    pub noisy: Signal,
    pub reference: Option<Signal>,
}

pub fn run_experiment(config: &ExperimentConfig, base: &Path) -> Result<ExperimentOutcome> {
    let accel_config = config.accel.to_accel_config()?;
    let filter = config
        .filter
        .build()
        .map_err(|e| Error::Config(format!("filter: {e}")))?;
    if let Some(noise) = &config.noise {
        noise
            .validate()
            .map_err(|e| Error::Config(format!("noise: {e}")))?;
    }

    let input = config.input.load(base)?;
    let noisy = match &config.noise {
        Some(spec) => add_noise(&input, spec)?,
        None => input.clone(),
    };
    let reference = match (&config.reference, &config.noise) {
        (Some(r), _) => Some(r.load(base)?),
        (None, Some(_)) => Some(input),
        (None, None) => None,
    };
    if let Some(r) = &reference {
        if !r.same_topology(&noisy) {
            return Err(Error::Config(
                "reference: topology differs from input".into(),
            ));
        }
    }

    let run = accel::run(filter.as_ref(), &noisy, &accel_config, reference.as_ref())?;
    let noisy_psnr = reference
        .as_ref()
        .map(|r| psnr_signals(r, &noisy, 1.0))
        .transpose()?;
    let echo = serde_json::to_value(config).expect("config serializes");
    let report = RunReport::new(echo, noisy_psnr, &run);

    if let Some(p) = &config.outputs.image {
        write_signal(resolve(base, p), &run.output)?;
    }
    if let Some(p) = &config.outputs.noisy {
        write_signal(resolve(base, p), &noisy)?;
    }
    if let Some(p) = &config.outputs.report {
        report.write(resolve(base, p))?;
    }
    Ok(ExperimentOutcome {
        report,
        run,
        noisy,
        reference,
    })
}
