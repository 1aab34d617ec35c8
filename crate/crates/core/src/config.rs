//! TOML run configuration.
//!
//! ```toml
//! p_t = 10.0
//! schemes = ["statistical-csit", "time-sharing"]
//! output_path = "out"
//!
//! user1.mean_re = [0.0, 0.0]
//! user1.cov = [[0.2, 0.0], [0.0, 0.0],
//!              [0.0, 0.0], [0.04, 0.0]]
//!
//! user2.mean_re = [0.0, 0.0]
//! user2.cov = [[0.1, 0.0], [0.08, 0.0],
//!              [0.08, 0.0], [0.1, 0.0]]
//! ```
//!
//! `cov` is row-major with one `[re, im]` pair per entry. `mean_im` may be
//! omitted. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel::{
    ChannelStats, Scenario, StopRule, DEFAULT_ALPHA_GRID, DEFAULT_EPSILON, DEFAULT_MAX_ITERS, DEFAULT_MC_SAMPLES,
    DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::region::Scheme;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    label: Option<String>,
    mean_re: Vec<f64>,
    mean_im: Option<Vec<f64>>,
    cov: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    user1: RawUser,
    user2: RawUser,
    p_t: f64,
    mc_samples: Option<usize>,
    alpha_grid: Option<usize>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    max_iters: Option<usize>,
    stop_rule: Option<String>,
    schemes: Option<Vec<String>>,
    output_path: Option<PathBuf>,
    emit_raw: Option<bool>,
}

/// A validated scenario plus what to compute and where to write it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub schemes: Vec<Scheme>,
    pub output_path: PathBuf,
    pub emit_raw: bool,
}

pub const DEFAULT_OUTPUT_PATH: &str = "out";

fn user_stats(raw: RawUser, key: &str) -> Result<ChannelStats> {
    let n = raw.mean_re.len();
    let mean_im = raw.mean_im.unwrap_or_else(|| vec![0.0; n]);
    if mean_im.len() != n {
        return Err(Error::dims(format!("{key}.mean_im"), n, mean_im.len()));
    }
    if raw.cov.len() != n * n {
        return Err(Error::dims(format!("{key}.cov entries"), n * n, raw.cov.len()));
    }
    let mean = CVector::from_iterator(n, raw.mean_re.iter().zip(&mean_im).map(|(&r, &i)| C64::new(r, i)));
    let cov = CMatrix::from_row_iterator(n, n, raw.cov.iter().map(|&[r, i]| C64::new(r, i)));
    ChannelStats::new(raw.label.unwrap_or_else(|| key.to_string()), mean, cov).map_err(|e| prefix(e, key))
}

fn prefix(e: Error, key: &str) -> Error {
    match e {
        Error::NonHermitian { field, deviation } => Error::NonHermitian {
            field: format!("{key}.{field}"),
            deviation,
        },
        Error::NotPsd { field, min_eigenvalue } => Error::NotPsd {
            field: format!("{key}.{field}"),
            min_eigenvalue,
        },
        Error::DimensionMismatch { field, expected, found } => Error::DimensionMismatch {
            field: format!("{key}.{field}"),
            expected,
            found,
        },
        other => other,
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Parses and validates a configuration document. `origin` names it in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                format!("{origin}:{line}:{col}")
            }
            None => origin.to_string(),
        };
        Error::Config {
            location,
            message: e.message().to_string(),
        }
    })?;

    let stop_rule = match raw.stop_rule.as_deref() {
        None | Some("absolute") => StopRule::Absolute,
        Some("relative") => StopRule::Relative,
        Some(other) => {
            return Err(Error::Config {
                location: format!("{origin}: stop_rule"),
                message: format!("expected `absolute` or `relative`, found `{other}`"),
            })
        }
    };
    let schemes = match raw.schemes {
        None => vec![Scheme::StatisticalCsit],
        Some(names) => names
            .iter()
            .map(|s| {
                s.parse::<Scheme>().map_err(|_| Error::Config {
                    location: format!("{origin}: schemes"),
                    message: format!("unknown scheme `{s}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    if schemes.is_empty() {
        return Err(Error::Config {
            location: format!("{origin}: schemes"),
            message: "at least one scheme is required".into(),
        });
    }
    let mut unique = Vec::new();
    for s in schemes {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }

    let user1 = user_stats(raw.user1, "user1")?;
    let user2 = user_stats(raw.user2, "user2")?;
    let scenario = Scenario {
        user1,
        user2,
        total_power: raw.p_t,
        mc_samples: raw.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        epsilon: raw.epsilon.unwrap_or(DEFAULT_EPSILON),
        alpha_grid: raw.alpha_grid.unwrap_or(DEFAULT_ALPHA_GRID),
        max_iters: raw.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
        stop_rule,
    };
    scenario.validate()?;
    Ok(RunConfig {
        scenario,
        schemes: unique,
        output_path: raw.output_path.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_PATH)),
        emit_raw: raw.emit_raw.unwrap_or(false),
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text, &path.display().to_string())
}
