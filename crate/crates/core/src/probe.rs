//! Probe-field response of the dressed cavity: the scaled intracavity
//! quadrature eps_T (absorption = Re, dispersion = Im), the transmission
//! coefficient, the pole/residue form of the response denominator, and the
//! closed-form window/peak predictions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::numerics::{self, CubicRoots};
use crate::series::SpectrumSeries;

/// Magnitude below which the inner response denominator counts as a pole hit.
const POLE_EPS: f64 = 1e-300;

/// The probe response at a single probe detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    /// eps_T = 2 kappa_a <delta a_+> / E_pr.
    pub value: Complex64,
    /// Probe detuning delta from the pump.
    pub detuning: f64,
    /// Shared offset lambda = delta - omega_b (the single detuning left on
    /// the red sideband).
    pub lambda: f64,
}

impl ComplexResponse {
    /// Absorption profile: Re eps_T.
    pub fn absorption(&self) -> f64 {
        self.value.re
    }

    /// Dispersion profile: Im eps_T.
    pub fn dispersion(&self) -> f64 {
        self.value.im
    }
}

/// Inner denominator chi(delta): the mechanical response dressed by the
/// microwave cavity and the qubit.
fn inner_denominator(p: &SystemParams, delta: f64) -> Complex64 {
    let lb = delta - p.omega_b;
    let lc = delta - p.delta_c;
    let lz = delta - p.omega_q;
    Complex64::new(p.gamma_b / 2.0, -lb) + p.g_em * p.g_em / Complex64::new(p.kappa_c / 2.0, -lc)
        - 2.0 * p.g * p.g * p.sigma_z / Complex64::new(p.gamma_d / 2.0, -lz)
}

/// Full response denominator D(delta) = (kappa_a/2 - i lambda_a) + G_om^2/chi.
fn denominator(p: &SystemParams, delta: f64) -> Result<Complex64> {
    let la = delta - p.delta_a_eff;
    let outer = Complex64::new(p.kappa_a / 2.0, -la);
    if p.g_om == 0.0 {
        return Ok(outer);
    }
    let chi = inner_denominator(p, delta);
    if chi.norm() < POLE_EPS {
        return Err(Error::PoleHit(delta));
    }
    Ok(outer + p.g_om * p.g_om / chi)
}

/// Probe response eps_T at detuning `delta`.
pub fn epsilon_t(p: &SystemParams, delta: f64) -> Result<ComplexResponse> {
    let den = denominator(p, delta)?;
    Ok(ComplexResponse {
        value: 2.0 * p.kappa_a / den,
        detuning: delta,
        lambda: delta - p.omega_b,
    })
}

/// Transmission coefficient of the probe, T_pr = eps_T - 1.
pub fn transmission(p: &SystemParams, delta: f64) -> Result<Complex64> {
    Ok(epsilon_t(p, delta)?.value - 1.0)
}

/// Output field at the probe frequency for probe amplitude `e_pr`.
pub fn output_field(p: &SystemParams, delta: f64, e_pr: f64) -> Result<Complex64> {
    Ok(e_pr * transmission(p, delta)?)
}

/// Evaluates eps_T across a scan grid of normalized offsets
/// x = (delta - omega_b)/omega_b. Pole hits are recorded and skipped.
pub fn probe_spectrum(p: &SystemParams, x_grid: &[f64]) -> SpectrumSeries {
    debug_assert!(x_grid.windows(2).all(|w| w[0] < w[1]));
    let mut series = SpectrumSeries::new(Vec::new(), Vec::new());
    series.x.reserve(x_grid.len());
    series.y.reserve(x_grid.len());
    for &x in x_grid {
        let delta = p.omega_b * (1.0 + x);
        match epsilon_t(p, delta) {
            Ok(resp) => {
                series.x.push(x);
                series.y.push(resp.value);
            }
            Err(e) => series.skipped.push((x, e.to_string())),
        }
    }
    series
}

/// Slope of the dispersion profile, d(Im eps_T)/d(delta), by central
/// difference with positive step `h` (1e-5 is a good default).
pub fn dispersion_slope(p: &SystemParams, delta: f64, h: f64) -> Result<f64> {
    debug_assert!(h > 0.0);
    let hi = epsilon_t(p, delta + h)?;
    let lo = epsilon_t(p, delta - h)?;
    Ok((hi.value.im - lo.value.im) / (2.0 * h))
}

/// Hybrid-mode poles and residues of the probe response on the red sideband.
///
/// In the variable s = -i lambda the inner denominator clears to the monic
/// cubic C(s) = (gamma_b/2+s)(kappa_c/2+s)(gamma_d/2+s)
///            + G_em^2 (gamma_d/2+s) - 2 g^2 sigma_z (kappa_c/2+s),
/// whose roots s_i are the hybrid poles; the pole constants of the
/// partial-fraction form are lambda_i = -s_i, and the residues belong to the
/// numerator N(s) = G_om^2 (kappa_c/2+s)(gamma_d/2+s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleResidueSet {
    /// Pole constants lambda_i = -s_i, ordered by the root order of s_i.
    pub poles: [Complex64; 3],
    /// Residues from the numeric partial-fraction oracle (ground truth).
    pub residues_numeric: [Complex64; 3],
    /// Residues from the printed closed forms; kept as a diagnostic because
    /// their signs are mutually inconsistent.
    pub residues_printed: [Complex64; 3],
    /// max_i |printed_i - numeric_i| / |numeric_i|.
    pub max_printed_deviation: f64,
}

/// Coefficients (c3, c2, c1, c0) of the monic pole cubic in s.
pub fn pole_cubic_coeffs(p: &SystemParams) -> (f64, f64, f64, f64) {
    let (gb, kc, gd) = (p.gamma_b, p.kappa_c, p.gamma_d);
    let c2 = (gb + kc + gd) / 2.0;
    let c1 = (gb * kc + gb * gd + kc * gd) / 4.0 + p.g_em * p.g_em - 2.0 * p.g * p.g * p.sigma_z;
    let c0 = gb * kc * gd / 8.0 + p.g_em * p.g_em * gd / 2.0 - p.g * p.g * kc * p.sigma_z;
    (1.0, c2, c1, c0)
}

/// Solves the pole cubic and builds both residue sets.
///
/// Assumes the red-sideband configuration, where all four detuning offsets
/// collapse onto the shared lambda.
pub fn hybrid_poles(p: &SystemParams) -> Result<PoleResidueSet> {
    let (c3, c2, c1, c0) = pole_cubic_coeffs(p);
    let CubicRoots { roots: s } = numerics::solve_cubic(c3, c2, c1, c0)?;

    let g_om2 = p.g_om * p.g_om;
    let numerator =
        |s_val: Complex64| g_om2 * (s_val + p.kappa_c / 2.0) * (s_val + p.gamma_d / 2.0);
    let residues_numeric = numerics::numeric_residues(&s, numerator)?;

    let poles = [-s[0], -s[1], -s[2]];
    let residues_printed = printed_residues(p, &poles);

    let mut max_dev = 0.0f64;
    for i in 0..3 {
        let denom = residues_numeric[i].norm().max(1e-300);
        max_dev = max_dev.max((residues_printed[i] - residues_numeric[i]).norm() / denom);
    }
    Ok(PoleResidueSet {
        poles,
        residues_numeric,
        residues_printed,
        max_printed_deviation: max_dev,
    })
}

/// The residue closed forms evaluated verbatim (with the stray gamma_c decay
/// read as kappa_c). Diagnostic only; see `PoleResidueSet::residues_printed`.
fn printed_residues(p: &SystemParams, l: &[Complex64; 3]) -> [Complex64; 3] {
    let g_om2 = p.g_om * p.g_om;
    let half_sum = (p.kappa_c + p.gamma_d) / 2.0;
    let quarter_prod = p.kappa_c * p.gamma_d / 4.0;
    let a1 =
        g_om2 * (l[0] * half_sum - quarter_prod - l[0] * l[0]) / ((l[0] - l[2]) * (l[0] - l[1]));
    let a2 =
        g_om2 * (-l[1] * half_sum + quarter_prod + l[1] * l[1]) / ((l[0] - l[1]) * (l[1] - l[2]));
    let a3 =
        g_om2 * (l[2] * half_sum - quarter_prod + l[2] * l[2]) / ((l[1] - l[2]) * (l[0] - l[2]));
    [a1, a2, a3]
}

/// Response denominator rebuilt from poles and residues,
/// (kappa_a/2 - i lambda) + sum_i A_i / (lambda_i - i lambda).
pub fn denominator_from_poles(p: &SystemParams, set: &PoleResidueSet, lambda: f64) -> Complex64 {
    let s = Complex64::new(0.0, -lambda);
    let mut den = Complex64::new(p.kappa_a / 2.0, -lambda);
    for i in 0..3 {
        den += set.residues_numeric[i] / (set.poles[i] + s);
    }
    den
}

/// eps_T evaluated through the pole/residue form (red sideband).
pub fn epsilon_t_from_poles(p: &SystemParams, set: &PoleResidueSet, lambda: f64) -> Complex64 {
    2.0 * p.kappa_a / denominator_from_poles(p, set, lambda)
}

/// Predicted offsets of the two transparency minima,
/// +-sqrt(G_em^2 - 2 g^2 sigma_z), as (minus, plus).
pub fn omit_minima_prediction(p: &SystemParams) -> Result<(f64, f64)> {
    let arg = p.g_em * p.g_em - 2.0 * p.g * p.g * p.sigma_z;
    if arg < 0.0 {
        return Err(Error::ImaginaryPrediction(arg));
    }
    let r = arg.sqrt();
    Ok((-r, r))
}

/// Predicted offsets of the three absorption peaks in the sideband-resolved
/// regime: (0, +r, -r) with r = sqrt(G_om^4 + kappa_a^2 (G_em^2 + 2 g^2)) / kappa_a.
pub fn omia_peak_prediction(p: &SystemParams) -> (f64, f64, f64) {
    let r = (p.g_om.powi(4) + p.kappa_a * p.kappa_a * (p.g_em * p.g_em + 2.0 * p.g * p.g)).sqrt()
        / p.kappa_a;
    (0.0, r, -r)
}
