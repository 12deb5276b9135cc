//! Experiment runner for the K4-free process: configuration, output
//! formats and the experiments behind each command.

pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod render;

pub use config::{Command, ExperimentConfig, Format, SigmaSource};
pub use error::{LabError, Result};

use std::time::Instant;

use crate::formats::{emit, write_edge_list};

/// Result of one command: the main artifact plus what the caller needs to
/// pick an exit status.
pub struct Execution {
    pub bytes: Vec<u8>,
    /// `false` only when `certify` found a K4 or a non-maximal terminal state.
    pub certified: bool,
    pub elapsed_secs: f64,
}

/// `<edges>.params.json`, next to an edge list whose format has no room for
/// the parameter set.
pub fn params_sidecar(path: &std::path::Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(".params.json");
    name.into()
}

/// Runs the configured command and renders its output. Side files such as
/// the `simulate` edge list are written here; the main artifact is returned.
pub fn execute(cfg: &ExperimentConfig) -> Result<Execution> {
    cfg.validate()?;
    let started = Instant::now();
    let mut certified = true;
    let bytes = match cfg.command {
        Command::Simulate => {
            let (out, history, _) = experiments::simulate(cfg)?;
            if let Some(path) = &cfg.edges {
                let mut buf = Vec::new();
                write_edge_list(&mut buf, out.summary.n, cfg.seed, &history).map_err(|source| {
                    LabError::Io {
                        path: path.clone(),
                        source,
                    }
                })?;
                emit(Some(path), &buf)?;
                emit(
                    Some(&params_sidecar(path)),
                    &formats::json_document(&out.params)?,
                )?;
            }
            render::simulate(&out, cfg.format_or(Format::Json))?
        }
        Command::Sweep => render::sweep(&experiments::sweep(cfg)?, cfg.format_or(Format::Csv))?,
        Command::Track => render::track(&experiments::track(cfg)?, cfg.format_or(Format::Csv))?,
        Command::DemCheck => {
            render::dem_check(&experiments::dem_check(cfg)?, cfg.format_or(Format::Csv))?
        }
        Command::DensityCheck => render::density_check(
            &experiments::density_check(cfg)?,
            cfg.format_or(Format::Json),
        )?,
        Command::Certify => {
            let out = experiments::certify(cfg)?;
            certified = out.certificate.passed();
            render::certify(&out, cfg.format_or(Format::Json))?
        }
    };
    Ok(Execution {
        bytes,
        certified,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}
