//! Experiment configuration: defaults, a flat `key=value` file format and
//! per-key overrides shared by the file and the command line.

use std::path::PathBuf;

use k4free_core::params::Constants;
use k4free_core::{Mode, ParamSet, StopRule};
use serde::{Deserialize, Serialize};

use crate::error::{config, LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Sweep,
    Track,
    DemCheck,
    DensityCheck,
    Certify,
}

impl Command {
    pub fn parse(s: &str) -> Result<Command> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "sweep" => Command::Sweep,
            "track" => Command::Track,
            "dem-check" => Command::DemCheck,
            "density-check" => Command::DensityCheck,
            "certify" => Command::Certify,
            _ => return Err(config(format!("unknown command {s:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Track => "track",
            Command::DemCheck => "dem-check",
            Command::DensityCheck => "density-check",
            Command::Certify => "certify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaSource {
    /// Greedy construction on the empty graph for a random `U`.
    Auto,
    /// JSON object with `U`, `A`, `B`, `C` vertex arrays.
    File(PathBuf),
}

/// Parses `termination`, `steps=K` or `t=X`.
pub fn parse_stop(s: &str) -> Result<StopRule> {
    let s = s.trim();
    if s == "termination" {
        return Ok(StopRule::Termination);
    }
    if let Some(k) = s.strip_prefix("steps=") {
        let k = k
            .parse()
            .map_err(|_| config(format!("bad step count in {s:?}")))?;
        return Ok(StopRule::AfterSteps(k));
    }
    if let Some(t) = s.strip_prefix("t=") {
        let t: f64 = t
            .parse()
            .map_err(|_| config(format!("bad scaled time in {s:?}")))?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(config(format!("scaled time must be non-negative, got {t}")));
        }
        return Ok(StopRule::AfterScaledTime(t));
    }
    Err(config(format!(
        "stop rule must be termination, steps=K or t=X, got {s:?}"
    )))
}

pub fn stop_name(stop: StopRule) -> String {
    match stop {
        StopRule::Termination => "termination".into(),
        StopRule::AfterSteps(k) => format!("steps={k}"),
        StopRule::AfterScaledTime(t) => format!("t={t}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub ns: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub mode: Mode,
    pub epsilon: Option<f64>,
    pub w: Option<f64>,
    pub mu: Option<f64>,
    pub gamma: Option<f64>,
    pub stop: StopRule,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub sigma: SigmaSource,
    pub subset_samples: usize,
    pub pair_samples: usize,
    pub check_interval: Option<usize>,
    pub workers: usize,
    /// Edge list to read (`certify`).
    pub input: Option<PathBuf>,
    /// Edge list to write (`simulate`).
    pub edges: Option<PathBuf>,
}

/// Keys accepted by [`ExperimentConfig::apply`], matching the long flags.
pub const KEYS: &[&str] = &[
    "n",
    "runs",
    "seed",
    "mode",
    "epsilon",
    "W",
    "mu",
    "gamma",
    "stop",
    "out",
    "format",
    "sigma",
    "subset-samples",
    "pair-samples",
    "check-interval",
    "workers",
    "input",
    "edges",
];

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            ns: vec![1024],
            runs: 1,
            seed: 1,
            mode: Mode::Desk,
            epsilon: None,
            w: None,
            mu: None,
            gamma: None,
            stop: StopRule::Termination,
            out: None,
            format: None,
            sigma: SigmaSource::Auto,
            subset_samples: 200,
            pair_samples: 64,
            check_interval: None,
            workers: 0,
            input: None,
            edges: None,
        }
    }

    /// Sets one key from its textual value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |what: &str| -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| config(format!("{what} must be a number, got {value:?}")))
        };
        let int = |what: &str| -> Result<usize> {
            value.parse::<usize>().map_err(|_| {
                config(format!(
                    "{what} must be a non-negative integer, got {value:?}"
                ))
            })
        };
        match key {
            "n" => {
                self.ns = value
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<usize>().map_err(|_| {
                            config(format!(
                                "n must be a comma-separated list of integers, got {value:?}"
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            "runs" => self.runs = int("runs")?,
            "seed" => {
                self.seed = value.parse().map_err(|_| {
                    config(format!("seed must be an unsigned integer, got {value:?}"))
                })?
            }
            "mode" => self.mode = Mode::parse(value)?,
            "epsilon" => self.epsilon = Some(num("epsilon")?),
            "W" | "w" => self.w = Some(num("W")?),
            "mu" => self.mu = Some(num("mu")?),
            "gamma" => self.gamma = Some(num("gamma")?),
            "stop" => self.stop = parse_stop(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = Some(match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(config(format!("format must be csv or json, got {value:?}"))),
                })
            }
            "sigma" => {
                self.sigma = if value == "auto" {
                    SigmaSource::Auto
                } else {
                    SigmaSource::File(PathBuf::from(value))
                }
            }
            "subset-samples" => self.subset_samples = int("subset-samples")?,
            "pair-samples" => self.pair_samples = int("pair-samples")?,
            "check-interval" => self.check_interval = Some(int("check-interval")?),
            "workers" => self.workers = int("workers")?,
            "input" => self.input = Some(PathBuf::from(value)),
            "edges" => self.edges = Some(PathBuf::from(value)),
            _ => return Err(config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key=value` file. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn apply_file_text(&mut self, origin: &str, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(LabError::Parse {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("expected key=value, got {line:?}"),
                });
            };
            self.apply(key.trim(), value).map_err(|e| LabError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(config("need at least one n"));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(config(format!("n must be at least 2, got {n}")));
        }
        if self.runs == 0 {
            return Err(config("runs must be at least 1"));
        }
        if self.check_interval == Some(0) {
            return Err(config("check-interval must be at least 1"));
        }
        for &n in &self.ns {
            self.params(n)?;
        }
        Ok(())
    }

    pub fn constants(&self) -> Constants {
        let mut c = Constants::for_mode(self.mode);
        if let Some(e) = self.epsilon {
            c.epsilon = e;
        }
        if let Some(w) = self.w {
            c.w = w;
        }
        if let Some(mu) = self.mu {
            c.mu = mu;
        }
        if self.gamma.is_some() {
            c.gamma = self.gamma;
        }
        c
    }

    pub fn params(&self, n: usize) -> Result<ParamSet> {
        Ok(ParamSet::new(n, self.constants())?)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_rules_parse() {
        assert_eq!(parse_stop("termination").unwrap(), StopRule::Termination);
        assert_eq!(parse_stop("steps=12").unwrap(), StopRule::AfterSteps(12));
        assert_eq!(parse_stop("t=0.5").unwrap(), StopRule::AfterScaledTime(0.5));
        for bad in ["", "steps=", "steps=-1", "t=-0.1", "t=nan", "forever"] {
            assert!(parse_stop(bad).is_err(), "{bad}");
        }
        for s in ["termination", "steps=7", "t=0.25"] {
            assert_eq!(stop_name(parse_stop(s).unwrap()), s);
        }
    }

    #[test]
    fn every_key_is_accepted() {
        let mut c = ExperimentConfig::new(Command::Track);
        let values = [
            "8,16",
            "2",
            "9",
            "paper",
            "0.001",
            "500",
            "0.12",
            "7",
            "t=1",
            "o.csv",
            "json",
            "sigma.json",
            "5",
            "6",
            "7",
            "3",
            "in.txt",
            "e.txt",
        ];
        for (k, v) in KEYS.iter().zip(values) {
            c.apply(k, v).unwrap();
        }
        assert_eq!(c.ns, [8, 16]);
        assert_eq!(c.sigma, SigmaSource::File("sigma.json".into()));
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.check_interval, Some(7));
        assert!(c.apply("nope", "1").is_err());
    }

    #[test]
    fn file_then_overrides() {
        let mut c = ExperimentConfig::new(Command::Simulate);
        c.apply_file_text("f", "# c\n\nn=64\nmode = desk\nmu=0.25\n")
            .unwrap();
        c.apply("mu", "0.2").unwrap();
        assert_eq!(c.ns, [64]);
        assert_eq!(c.constants().mu, 0.2);
        let err = c
            .apply_file_text("f", "n=64\nno equals sign\n")
            .unwrap_err();
        assert!(err.to_string().contains("f:2"));
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut c = ExperimentConfig::new(Command::Sweep);
        c.validate().unwrap();
        c.runs = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Command::Sweep);
        c.ns = vec![1];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Command::Sweep);
        c.apply("mode", "paper").unwrap();
        c.apply("mu", "0.3").unwrap();
        assert!(c.validate().is_err());
        c.apply("mode", "desk").unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn gamma_override_reaches_params() {
        let mut c = ExperimentConfig::new(Command::Simulate);
        c.apply("gamma", "3").unwrap();
        let p = c.params(1024).unwrap();
        assert_eq!(p.gamma, 3.0);
        assert!(p.gamma_overridden);
    }
}
