//! Subcommand implementations behind the command-line binary. Each returns a
//! process exit code: 0 success, 1 check failure, 2 config error, 3 numeric
//! or i/o failure.

use serde::Serialize;

use crate::analysis::{self, Feature, FeatureReport};
use crate::check::{self, Corruption};
use crate::config::{defaults, Resolved, RunConfig, ScanConfig};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::nms;
use crate::output::{self, format_sig};
use crate::probe;
use crate::series::linspace;
use crate::steady_state::{self, SwitchingMetrics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

fn classify(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    classify(e)
}

#[derive(Serialize)]
struct BistabilityJson {
    turning_points: Vec<f64>,
    switching: Option<SwitchingMetrics>,
    not_bistable: Option<String>,
    coeffs: steady_state::SteadyCoeffs,
    config_echo: RunConfig,
}

fn bistability_run(resolved: &Resolved) -> Result<()> {
    let grid = linspace(
        resolved.scan.x_min,
        resolved.scan.x_max,
        resolved.scan.points,
    );
    let branch = steady_state::sweep_pump(&resolved.params, &grid)?;

    let prec = resolved.precision;
    let mut rows = Vec::with_capacity(branch.pump.len());
    for (e_p, roots) in branch.pump.iter().zip(&branch.roots) {
        let mut row = vec![format_sig(*e_p, prec)];
        for k in 0..3 {
            row.push(
                roots
                    .get(k)
                    .map(|r| format_sig(r.n, prec))
                    .unwrap_or_default(),
            );
        }
        for k in 0..3 {
            row.push(
                roots
                    .get(k)
                    .map(|r| r.stable.to_string())
                    .unwrap_or_default(),
            );
        }
        rows.push(row);
    }
    if resolved.csv_path.is_some() {
        let mut buf = Vec::new();
        output::write_csv(
            &mut buf,
            &[
                "e_p", "n_root_1", "n_root_2", "n_root_3", "stable_1", "stable_2", "stable_3",
            ],
            &rows,
        )?;
        output::emit(
            resolved.csv_path.as_deref(),
            &String::from_utf8(buf).unwrap(),
        )?;
    }

    let (switching, not_bistable) = match steady_state::switching_metrics(&branch) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let doc = BistabilityJson {
        turning_points: branch.turning_points.clone(),
        switching,
        not_bistable,
        coeffs: branch.coeffs,
        config_echo: resolved.echo(),
    };
    output::emit(
        resolved.json_path.as_deref(),
        &output::to_json_document(&doc)?,
    )
}

pub fn run_bistability(cfg: &RunConfig) -> i32 {
    let resolved = match cfg.resolve(defaults::BISTABILITY) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    match bistability_run(&resolved) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

#[derive(Serialize)]
struct ProbeJson {
    pole_residues: probe::PoleResidueSet,
    predictions: Predictions,
    skipped: Vec<(f64, String)>,
    config_echo: RunConfig,
}

#[derive(Serialize)]
struct Predictions {
    omit_minima: Option<(f64, f64)>,
    omia_peaks: (f64, f64, f64),
}

fn predictions_for(p: &SystemParams) -> Predictions {
    Predictions {
        omit_minima: probe::omit_minima_prediction(p).ok(),
        omia_peaks: probe::omia_peak_prediction(p),
    }
}

fn probe_run(resolved: &Resolved) -> Result<()> {
    let grid = linspace(
        resolved.scan.x_min,
        resolved.scan.x_max,
        resolved.scan.points,
    );
    let series = probe::probe_spectrum(&resolved.params, &grid);

    let prec = resolved.precision;
    if resolved.csv_path.is_some() {
        let rows: Vec<Vec<String>> = series
            .x
            .iter()
            .zip(&series.y)
            .map(|(x, y)| {
                vec![
                    format_sig(*x, prec),
                    format_sig(y.re, prec),
                    format_sig(y.im, prec),
                    format_sig((y - 1.0).norm(), prec),
                ]
            })
            .collect();
        let mut buf = Vec::new();
        output::write_csv(&mut buf, &["x", "re_eps_t", "im_eps_t", "abs_t_pr"], &rows)?;
        output::emit(
            resolved.csv_path.as_deref(),
            &String::from_utf8(buf).unwrap(),
        )?;
    }

    let doc = ProbeJson {
        pole_residues: probe::hybrid_poles(&resolved.params)?,
        predictions: predictions_for(&resolved.params),
        skipped: series.skipped.clone(),
        config_echo: resolved.echo(),
    };
    output::emit(
        resolved.json_path.as_deref(),
        &output::to_json_document(&doc)?,
    )
}

pub fn run_probe(cfg: &RunConfig) -> i32 {
    let resolved = match cfg.resolve(defaults::PROBE) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    match probe_run(&resolved) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

#[derive(Serialize)]
struct NmsJson {
    peak_count: usize,
    peaks: Vec<PeakJson>,
    skipped: Vec<(f64, String)>,
    config_echo: RunConfig,
}

#[derive(Serialize)]
struct PeakJson {
    omega: f64,
    height: f64,
}

fn nms_run(resolved: &Resolved) -> Result<()> {
    let grid = linspace(
        resolved.scan.x_min,
        resolved.scan.x_max,
        resolved.scan.points,
    );
    let spectrum = nms::nms_spectrum(&resolved.params, &grid)?;

    let prec = resolved.precision;
    if resolved.csv_path.is_some() {
        let rows: Vec<Vec<String>> = spectrum
            .omega
            .iter()
            .zip(&spectrum.s_x)
            .map(|(om, s)| vec![format_sig(*om, prec), format_sig(*s, prec)])
            .collect();
        let mut buf = Vec::new();
        output::write_csv(&mut buf, &["omega", "s_x"], &rows)?;
        output::emit(
            resolved.csv_path.as_deref(),
            &String::from_utf8(buf).unwrap(),
        )?;
    }

    let doc = NmsJson {
        peak_count: spectrum.peak_count,
        peaks: spectrum
            .peak_positions
            .iter()
            .map(|e| PeakJson {
                omega: e.x,
                height: e.value,
            })
            .collect(),
        skipped: spectrum.skipped.clone(),
        config_echo: resolved.echo(),
    };
    output::emit(
        resolved.json_path.as_deref(),
        &output::to_json_document(&doc)?,
    )
}

pub fn run_nms(cfg: &RunConfig) -> i32 {
    let resolved = match cfg.resolve(defaults::NMS) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    match nms_run(&resolved) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

#[derive(Serialize)]
struct FeaturesJson {
    probe: FeatureReport,
    pole_residues: probe::PoleResidueSet,
    predictions: Predictions,
    nms: NmsFeaturesJson,
    config_echo: RunConfig,
}

#[derive(Serialize)]
struct NmsFeaturesJson {
    peak_count: usize,
    peaks: Vec<Feature>,
    expected_peak_count: Option<usize>,
    /// Found minus expected; reported whenever an expectation was given.
    count_deviation: Option<i64>,
}

fn features_run(resolved: &Resolved) -> Result<()> {
    let grid = linspace(
        resolved.scan.x_min,
        resolved.scan.x_max,
        resolved.scan.points,
    );
    let series = probe::probe_spectrum(&resolved.params, &grid);
    let report = analysis::extract_probe_features(&series)?;
    let compared = analysis::compare_predictions(&report, &resolved.params, &resolved.tolerances);

    let nms_grid = linspace(
        defaults::NMS.x_min,
        defaults::NMS.x_max,
        defaults::NMS.points,
    );
    let spectrum = nms::nms_spectrum(&resolved.params, &nms_grid)?;
    let count = analysis::count_nms_peaks(&spectrum);
    let doc = FeaturesJson {
        probe: compared,
        pole_residues: probe::hybrid_poles(&resolved.params)?,
        predictions: predictions_for(&resolved.params),
        nms: NmsFeaturesJson {
            peak_count: count,
            peaks: analysis::nms_features(&spectrum),
            expected_peak_count: resolved.nms_expected_peaks,
            count_deviation: resolved
                .nms_expected_peaks
                .map(|want| count as i64 - want as i64),
        },
        config_echo: resolved.echo(),
    };
    output::emit(
        resolved.json_path.as_deref(),
        &output::to_json_document(&doc)?,
    )
}

pub fn run_features(cfg: &RunConfig) -> i32 {
    let resolved = match cfg.resolve(defaults::PROBE) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    match features_run(&resolved) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

/// Runs every oracle suite and prints a pass/fail table.
pub fn run_check(cfg: Option<&RunConfig>) -> i32 {
    run_check_with(cfg, Corruption::None)
}

/// Check entry point with fault injection, for negative-control tests.
#[doc(hidden)]
pub fn run_check_with(cfg: Option<&RunConfig>, corruption: Corruption) -> i32 {
    let params = match cfg {
        Some(c) => match c.resolve(defaults::PROBE) {
            Ok(r) => Some(r.params),
            Err(e) => return report_error(&e),
        },
        None => None,
    };
    let results = check::run_suites(params.as_ref(), corruption);
    let mut all_pass = true;
    println!("{:<42} {:<6} detail", "suite", "status");
    for r in &results {
        all_pass &= r.pass;
        println!(
            "{:<42} {:<6} {}",
            r.name,
            if r.pass { "pass" } else { "FAIL" },
            r.detail
        );
    }
    if all_pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Scan-config helper for the binary: flag overrides applied to a config.
pub fn apply_scan_overrides(
    cfg: &mut RunConfig,
    default_scan: ScanConfig,
    x_min: Option<f64>,
    x_max: Option<f64>,
    points: Option<usize>,
) {
    if x_min.is_none() && x_max.is_none() && points.is_none() {
        return;
    }
    let base = cfg.scan.unwrap_or(default_scan);
    cfg.scan = Some(ScanConfig {
        x_min: x_min.unwrap_or(base.x_min),
        x_max: x_max.unwrap_or(base.x_max),
        points: points.unwrap_or(base.points),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_error_exit_code() {
        let cfg =
            RunConfig::from_json(r#"{"scan": {"x_min": 0, "x_max": 1, "points": 1}}"#).unwrap();
        assert_eq!(run_bistability(&cfg), EXIT_CONFIG);
    }

    #[test]
    fn check_passes_by_default() {
        assert_eq!(run_check(None), EXIT_OK);
    }

    #[test]
    fn corrupted_check_fails_with_exit_one() {
        assert_eq!(
            run_check_with(None, Corruption::ResidueFormula),
            EXIT_CHECK_FAILED
        );
    }
}
