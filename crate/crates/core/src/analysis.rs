//! Feature extraction from computed spectra and comparison against the
//! closed-form predictions: transparency windows, absorption peaks, window
//! widths, and normal-mode peak counts, each with a tolerance verdict.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::SystemParams;
use crate::nms::NmsSpectrum;
use crate::numerics::{find_extrema, ExtremaFilter, Extremum};
use crate::probe;
use crate::series::SpectrumSeries;

/// What a located extremum represents physically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    TransparencyMinimum,
    AbsorptionPeak,
    NmsPeak,
}

/// Where a closed-form prediction comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionSource {
    OmitMinima,
    OmiaPeaks,
    ZeroDampingPoles,
}

/// A classified spectral feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub kind: FeatureKind,
    pub x: f64,
    pub value: f64,
    /// Half-depth width (dips) or half-height width (peaks), when the
    /// flanking structure allows one to be measured.
    pub width: Option<f64>,
}

/// One prediction matched (or not) against a found feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatch {
    pub source: PredictionSource,
    pub predicted: f64,
    /// Position of the nearest matching feature, when one exists.
    pub found: Option<f64>,
    /// |found - predicted|.
    pub deviation: Option<f64>,
    /// Verdict at the configured tolerance; None when unmatched.
    pub pass: Option<bool>,
}

/// Feature report: the machine-readable comparison surface.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureReport {
    pub features: Vec<Feature>,
    pub matches: Vec<PredictionMatch>,
    /// Predictions with no feature to match (count mismatch); recorded, not
    /// fatal.
    pub unmatched_predictions: Vec<f64>,
}

impl FeatureReport {
    /// True when every matched prediction passed and nothing was left
    /// unmatched.
    pub fn all_pass(&self) -> bool {
        self.unmatched_predictions.is_empty() && self.matches.iter().all(|m| m.pass == Some(true))
    }
}

/// Per-class matching tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance on transparency-minimum positions.
    pub omit_minima_abs: f64,
    /// Absolute tolerance on the central absorption peak position.
    pub omia_center_abs: f64,
    /// Relative tolerance on the side absorption peak positions.
    pub omia_side_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            omit_minima_abs: 0.02,
            omia_center_abs: 0.005,
            omia_side_rel: 0.05,
        }
    }
}

impl Tolerances {
    /// One absolute tolerance applied to every class.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            omit_minima_abs: tol,
            omia_center_abs: tol,
            omia_side_rel: 0.0,
        }
    }
}

/// Linear-interpolated crossing of `level` between two samples.
fn cross(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return x0;
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Half-depth width of a dip: distance between the two crossings of
/// floor + depth/2, where the depth is measured to the lower of the two
/// flanking shoulders (nearest maxima or series endpoints).
fn half_depth_width(xs: &[f64], ys: &[f64], dip: usize, maxima: &[Extremum]) -> Option<f64> {
    let left_ref = maxima
        .iter()
        .rfind(|m| m.index < dip)
        .map(|m| ys[m.index])
        .unwrap_or(ys[0]);
    let right_ref = maxima
        .iter()
        .find(|m| m.index > dip)
        .map(|m| ys[m.index])
        .unwrap_or(*ys.last().unwrap());
    let floor = ys[dip];
    let reference = left_ref.min(right_ref);
    if reference <= floor {
        return None;
    }
    let level = floor + (reference - floor) / 2.0;

    let mut left = None;
    for i in (0..dip).rev() {
        if ys[i] >= level {
            left = Some(cross(xs[i], ys[i], xs[i + 1], ys[i + 1], level));
            break;
        }
    }
    let mut right = None;
    for i in dip + 1..xs.len() {
        if ys[i] >= level {
            right = Some(cross(xs[i - 1], ys[i - 1], xs[i], ys[i], level));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    }
}

/// Half-height width of a peak, mirrored logic of [`half_depth_width`].
fn half_height_width(xs: &[f64], ys: &[f64], peak: usize, minima: &[Extremum]) -> Option<f64> {
    let left_ref = minima
        .iter()
        .rfind(|m| m.index < peak)
        .map(|m| ys[m.index])
        .unwrap_or(ys[0]);
    let right_ref = minima
        .iter()
        .find(|m| m.index > peak)
        .map(|m| ys[m.index])
        .unwrap_or(*ys.last().unwrap());
    let top = ys[peak];
    let reference = left_ref.max(right_ref);
    if reference >= top {
        return None;
    }
    let level = top - (top - reference) / 2.0;

    let mut left = None;
    for i in (0..peak).rev() {
        if ys[i] <= level {
            left = Some(cross(xs[i], ys[i], xs[i + 1], ys[i + 1], level));
            break;
        }
    }
    let mut right = None;
    for i in peak + 1..xs.len() {
        if ys[i] <= level {
            right = Some(cross(xs[i - 1], ys[i - 1], xs[i], ys[i], level));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    }
}

/// Classifies the extrema of an absorption spectrum (Re eps_T over the scan
/// grid): minima become transparency windows with half-depth widths, maxima
/// become absorption peaks with half-height widths.
pub fn extract_probe_features(s: &SpectrumSeries) -> Result<FeatureReport> {
    let re = s.re();
    let minima = find_extrema(&s.x, &re, ExtremaFilter::Minima)?;
    let maxima = find_extrema(&s.x, &re, ExtremaFilter::Maxima)?;

    let mut features = Vec::new();
    for m in &minima {
        features.push(Feature {
            kind: FeatureKind::TransparencyMinimum,
            x: m.x,
            value: m.value,
            width: half_depth_width(&s.x, &re, m.index, &maxima),
        });
    }
    for m in &maxima {
        features.push(Feature {
            kind: FeatureKind::AbsorptionPeak,
            x: m.x,
            value: m.value,
            width: half_height_width(&s.x, &re, m.index, &minima),
        });
    }
    features.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    Ok(FeatureReport {
        features,
        ..Default::default()
    })
}

fn match_one(
    predictions: &[(PredictionSource, f64, f64)],
    features: &mut [(f64, bool)],
    report: &mut FeatureReport,
) {
    for &(source, predicted, tol) in predictions {
        // nearest unused feature
        let best = features
            .iter()
            .enumerate()
            .filter(|(_, (_, used))| !used)
            .min_by(|(_, (xa, _)), (_, (xb, _))| {
                (xa - predicted)
                    .abs()
                    .partial_cmp(&(xb - predicted).abs())
                    .unwrap()
            })
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                features[i].1 = true;
                let found = features[i].0;
                let deviation = (found - predicted).abs();
                report.matches.push(PredictionMatch {
                    source,
                    predicted,
                    found: Some(found),
                    deviation: Some(deviation),
                    pass: Some(deviation <= tol),
                });
            }
            None => report.unmatched_predictions.push(predicted),
        }
    }
}

/// Matches the closed-form predictions for `p` against the extracted
/// features (nearest neighbour, never forcing a 1:1 match) and attaches
/// pass/fail verdicts at the given tolerances.
pub fn compare_predictions(
    report: &FeatureReport,
    p: &SystemParams,
    tol: &Tolerances,
) -> FeatureReport {
    let mut out = report.clone();
    out.matches.clear();
    out.unmatched_predictions.clear();

    if let Ok((lo, hi)) = probe::omit_minima_prediction(p) {
        let mut dips: Vec<(f64, bool)> = out
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::TransparencyMinimum)
            .map(|f| (f.x, false))
            .collect();
        let preds = [
            (PredictionSource::OmitMinima, lo, tol.omit_minima_abs),
            (PredictionSource::OmitMinima, hi, tol.omit_minima_abs),
        ];
        match_one(&preds, &mut dips, &mut out);
    }

    let (center, side_hi, side_lo) = probe::omia_peak_prediction(p);
    let mut peaks: Vec<(f64, bool)> = out
        .features
        .iter()
        .filter(|f| f.kind == FeatureKind::AbsorptionPeak)
        .map(|f| (f.x, false))
        .collect();
    let side_tol = if tol.omia_side_rel > 0.0 {
        tol.omia_side_rel * side_hi.abs()
    } else {
        tol.omia_center_abs
    };
    let preds = [
        (PredictionSource::OmiaPeaks, center, tol.omia_center_abs),
        (PredictionSource::OmiaPeaks, side_hi, side_tol),
        (PredictionSource::OmiaPeaks, side_lo, side_tol),
    ];
    match_one(&preds, &mut peaks, &mut out);
    out
}

/// Prominence-filtered peak count of a displacement spectrum.
pub fn count_nms_peaks(s: &NmsSpectrum) -> usize {
    s.peak_count
}

/// Features of a displacement spectrum, as a report fragment.
pub fn nms_features(s: &NmsSpectrum) -> Vec<Feature> {
    s.peak_positions
        .iter()
        .map(|e| Feature {
            kind: FeatureKind::NmsPeak,
            x: e.x,
            value: e.value,
            width: None,
        })
        .collect()
}
