//! CSV and summary output for a configured run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::channel::User;
use crate::classifier::{classify, Classification};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::optimizer::{build_region_with, draw_batches, wiretap_rate, RegionResult};
use crate::region::{RatePair, Scheme};
use crate::sampling::ScenarioBatches;

pub const CSV_HEADER: &str =
    "scheme,order,alpha,r1_bits,r2_bits,r1_stderr,r2_stderr,b_iterations,b_residual,converged";

/// `%.12g`: 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// The `order` column: the encoding order for sweeps, `share=<beta>` for
/// time sharing, `aligned` for the low-SNR sweep, `axis` for hull anchors.
fn order_cell(p: &RatePair) -> String {
    if let Some(beta) = p.meta.share {
        return format!("share={}", format_sig(beta));
    }
    match (p.meta.order, p.meta.scheme, p.meta.alpha) {
        (Some(order), _, _) => order.to_string(),
        (None, Scheme::LowSnr, Some(_)) => "aligned".into(),
        _ => "axis".into(),
    }
}

pub fn csv_row(p: &RatePair) -> String {
    let alpha = p.meta.alpha.map(format_sig).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        p.meta.scheme,
        order_cell(p),
        alpha,
        format_sig(p.r1),
        format_sig(p.r2),
        format_sig(p.meta.r1_stderr),
        format_sig(p.meta.r2_stderr),
        p.meta.b_iterations,
        format_sig(p.meta.b_residual),
        p.meta.converged
    )
}

pub fn to_csv(points: &[RatePair]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&csv_row(p));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub classification: Classification,
    pub regions: Vec<RegionResult>,
    pub files: Vec<PathBuf>,
}

pub fn classification_text(c: &Classification) -> String {
    let mut out = format!("verdict: {}\n", c.verdict);
    let _ = writeln!(out, "low-snr difference: {:?}", c.low_snr_indefinite);
    for r in &c.reasons {
        let _ = writeln!(out, "rule {}: {} ({})", r.rule, r.verdict, r.detail);
    }
    out
}

fn summary_text(config: &RunConfig, report: &RunReport) -> String {
    let s = &config.scenario;
    let mut out = classification_text(&report.classification);
    let _ = writeln!(
        out,
        "p_t: {}\nmc_samples: {}\nalpha_grid: {}\nseed: {}\nepsilon: {}\nmax_iters: {}",
        format_sig(s.total_power),
        s.mc_samples,
        s.alpha_grid,
        s.seed,
        format_sig(s.epsilon),
        s.max_iters
    );
    for region in &report.regions {
        let max1 = region.frontier.iter().map(|p| p.r1).fold(0.0, f64::max);
        let max2 = region.frontier.iter().map(|p| p.r2).fold(0.0, f64::max);
        let unconverged = region.raw_points.iter().filter(|p| !p.meta.converged).count();
        let _ = writeln!(
            out,
            "{}: points={} frontier={} max_r1={} max_r2={} max_stderr={} unconverged={}",
            region.scheme,
            region.raw_points.len(),
            region.frontier.len(),
            format_sig(max1),
            format_sig(max2),
            format_sig(region.max_stderr()),
            unconverged
        );
    }
    out
}

/// Classifies, builds every requested region over one set of batches and
/// writes `<scheme>.csv` (frontier), optionally `<scheme>_raw.csv`, and `summary.txt`.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let scenario = &config.scenario;
    scenario.validate()?;
    let classification = classify(&scenario.user1, &scenario.user2)?;
    let batches = draw_batches(scenario)?;
    let regions = config
        .schemes
        .iter()
        .map(|&scheme| build_region_with(scenario, scheme, &batches))
        .collect::<Result<Vec<_>>>()?;

    let dir = &config.output_path;
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut files = Vec::new();
    for region in &regions {
        let path = dir.join(format!("{}.csv", region.scheme));
        write_file(&path, &to_csv(&region.frontier))?;
        files.push(path);
        if config.emit_raw {
            let path = dir.join(format!("{}_raw.csv", region.scheme));
            write_file(&path, &to_csv(&region.raw_points))?;
            files.push(path);
        }
    }
    let mut report = RunReport {
        classification,
        regions,
        files,
    };
    let path = dir.join("summary.txt");
    write_file(&path, &summary_text(config, &report))?;
    report.files.push(path);
    Ok(report)
}

/// Single-user wiretap rates with the whole power budget, user 1 then user 2.
pub fn wiretap_endpoints(config: &RunConfig) -> Result<[RatePair; 2]> {
    let scenario = &config.scenario;
    let batches: ScenarioBatches = draw_batches(scenario)?;
    let p = scenario.total_power;
    Ok([
        wiretap_rate(scenario, User::One, p, &batches)?,
        wiretap_rate(scenario, User::Two, p, &batches)?,
    ])
}
