//! System parameters of the driven four-mode system (optical cavity,
//! microwave cavity, mechanical resonator, qubit).
//!
//! Everything is dimensionless in units of the mechanical frequency
//! `omega_b`, which is fixed to 1. Couplings come in two flavours:
//! the bare single-excitation couplings (`g_om_bare`, `BareParams::g_em`)
//! and the drive-enhanced linearized ones (`g_om`, `g_em`), which the
//! probe-response and displacement-spectrum kernels take directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;

/// Bare (un-linearized) parameters: detunings and couplings before the
/// strong microwave drive is folded in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BareParams {
    /// Bare optical detuning delta_a = omega_a - omega_ai.
    pub delta_a: f64,
    /// Bare microwave detuning delta_c = omega_c - omega_mi.
    pub delta_c: f64,
    /// Single-excitation piezoelectric coupling.
    pub g_em: f64,
    /// Single-photon optomechanical coupling.
    pub g_om: f64,
    /// Microwave drive amplitude.
    pub e_m: f64,
    /// Microwave decay rate.
    pub kappa_c: f64,
    /// Mechanical frequency; the unit of everything else. Must be 1.
    pub omega_b: f64,
}

/// Effective (drive-dressed) detunings and coupling derived from
/// [`BareParams`]; see [`effective_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Self-consistent effective microwave detuning Delta_c.
    pub delta_c: f64,
    /// Effective optical detuning Delta_a.
    pub delta_a: f64,
    /// Linearized electromechanical coupling G_em = g_em E_m / sqrt(kappa_c^2 + Delta_c^2).
    pub g_em: f64,
}

impl Default for BareParams {
    fn default() -> Self {
        BareParams {
            delta_a: 1.0,
            delta_c: 1.0,
            g_em: 0.0,
            g_om: 0.0,
            e_m: 0.0,
            kappa_c: 1.25e-5,
            omega_b: 1.0,
        }
    }
}

/// Full parameter set of the linearized system.
///
/// `delta_a_eff` is the effective optical detuning. The probe and
/// displacement-spectrum kernels use it as the dressed detuning directly;
/// the steady-state kernel treats it as the pre-mirror-shift detuning and
/// resolves the radiation-pressure shift internally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    /// Effective optical detuning.
    pub delta_a_eff: f64,
    /// Effective microwave detuning.
    pub delta_c: f64,
    /// Qubit transition frequency.
    pub omega_q: f64,
    /// Mechanical frequency (the unit; always 1).
    pub omega_b: f64,
    /// Net (drive-enhanced) optomechanical coupling G_om.
    pub g_om: f64,
    /// Linearized electromechanical coupling G_em.
    pub g_em: f64,
    /// Qubit-mechanics coupling.
    pub g: f64,
    /// Optical cavity decay rate.
    pub kappa_a: f64,
    /// Microwave cavity decay rate.
    pub kappa_c: f64,
    /// Mechanical damping rate.
    pub gamma_b: f64,
    /// Qubit dephasing rate.
    pub gamma_d: f64,
    /// Mean qubit inversion, in [-1, 1]; -1 is the ground state.
    pub sigma_z: f64,
    /// Bare single-photon optomechanical coupling (steady-state work only).
    pub g_om_bare: f64,
    /// Optical pump amplitude (steady-state work only).
    pub e_p: f64,
    /// Microwave drive amplitude (steady-state work only).
    pub e_m: f64,
}

impl Default for SystemParams {
    /// Red-sideband configuration with the decay rates shared by all demo
    /// sets; couplings default to the double-window probe set.
    fn default() -> Self {
        SystemParams {
            delta_a_eff: 1.0,
            delta_c: 1.0,
            omega_q: 1.0,
            omega_b: 1.0,
            g_om: 0.23,
            g_em: 0.005,
            g: 0.125,
            kappa_a: 2.17,
            kappa_c: 1.25e-5,
            gamma_b: 4.2e-5,
            gamma_d: 4.2e-5,
            sigma_z: -1.0,
            g_om_bare: 0.0,
            e_p: 0.0,
            e_m: 0.0,
        }
    }
}

/// Checks all parameter invariants and returns the set unchanged when valid.
pub fn validate(p: SystemParams) -> Result<SystemParams> {
    let rates = [
        ("kappa_a", p.kappa_a),
        ("kappa_c", p.kappa_c),
        ("gamma_b", p.gamma_b),
        ("gamma_d", p.gamma_d),
    ];
    for (name, value) in rates {
        // NaN must fail too, hence the explicit check.
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveRate { name, value });
        }
    }
    if p.sigma_z.is_nan() || p.sigma_z < -1.0 || p.sigma_z > 1.0 {
        return Err(Error::SigmaZOutOfRange(p.sigma_z));
    }
    let couplings = [
        ("g_om", p.g_om),
        ("g_em", p.g_em),
        ("g", p.g),
        ("g_om_bare", p.g_om_bare),
        ("e_p", p.e_p),
        ("e_m", p.e_m),
    ];
    for (name, value) in couplings {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativeCoupling { name, value });
        }
    }
    Ok(p)
}

impl SystemParams {
    pub fn validated(self) -> Result<SystemParams> {
        validate(self)
    }
}

/// Tolerance on the fixed-point residual of the effective-detuning equation.
const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 10_000;

/// Derives the effective detunings and the linearized coupling from bare
/// parameters.
///
/// Delta_c is defined implicitly,
/// `Delta_c = delta_c - g_em^2 E_m^2 / (omega_b (kappa_c^2 + Delta_c^2))`,
/// and is resolved as a fixed point. When plain iteration stalls the
/// equivalent real cubic is solved instead and the root continuously
/// connected to `delta_c` as `E_m -> 0` is selected by drive continuation.
pub fn effective_params(b: &BareParams) -> Result<EffectiveParams> {
    if b.omega_b != 1.0 {
        return Err(Error::Config(format!(
            "omega_b must be 1 (the frequency unit), got {}",
            b.omega_b
        )));
    }
    if b.kappa_c.is_nan() || b.kappa_c <= 0.0 {
        return Err(Error::NonPositiveRate {
            name: "kappa_c",
            value: b.kappa_c,
        });
    }
    for (name, value) in [("g_em", b.g_em), ("g_om", b.g_om), ("e_m", b.e_m)] {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativeCoupling { name, value });
        }
    }

    let shift = b.g_em * b.g_em * b.e_m * b.e_m / b.omega_b;
    let delta_c = solve_delta_c(b.delta_c, b.kappa_c, shift)?;

    let denom = b.kappa_c * b.kappa_c + delta_c * delta_c;
    let delta_a = b.delta_a + b.g_om * b.g_em * b.e_m * b.e_m / (b.omega_b * denom);
    let g_em = b.g_em * b.e_m / denom.sqrt();
    Ok(EffectiveParams {
        delta_c,
        delta_a,
        g_em,
    })
}

/// Solves x = delta_c - shift / (kappa_c^2 + x^2) for x.
fn solve_delta_c(delta_c: f64, kappa_c: f64, shift: f64) -> Result<f64> {
    if shift == 0.0 {
        return Ok(delta_c);
    }
    let residual = |x: f64| x - delta_c + shift / (kappa_c * kappa_c + x * x);

    // Plain iteration from the undriven value.
    let mut x = delta_c;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = delta_c - shift / (kappa_c * kappa_c + x * x);
        if (next - x).abs() <= FIXED_POINT_TOL * (1.0 + next.abs()) {
            if residual(next).abs() < 1e-10 {
                return Ok(next);
            }
            break;
        }
        x = next;
    }

    // Cubic fallback with continuation in the drive strength: track the real
    // root of x^3 - delta_c x^2 + kappa_c^2 x + (shift - delta_c kappa_c^2)
    // that starts at delta_c when the drive is off.
    let mut tracked = delta_c;
    let steps = 64;
    for k in 1..=steps {
        let s = shift * (k as f64) / (steps as f64);
        let roots = numerics::solve_cubic(
            1.0,
            -delta_c,
            kappa_c * kappa_c,
            s - delta_c * kappa_c * kappa_c,
        )?;
        let real_roots: Vec<f64> = roots
            .roots
            .iter()
            .filter(|r| r.im.abs() <= 1e-9 * (1.0 + r.re.abs()))
            .map(|r| r.re)
            .collect();
        let next = real_roots
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - tracked)
                    .abs()
                    .partial_cmp(&(b - tracked).abs())
                    .unwrap()
            })
            .ok_or(Error::NoConvergence)?;
        tracked = next;
    }
    if residual(tracked).abs() < 1e-10 {
        Ok(tracked)
    } else {
        Err(Error::NoConvergence)
    }
}

/// Puts the drives on the mechanical red sideband: all effective detunings
/// equal the mechanical frequency, so the four probe offsets collapse onto a
/// single shared detuning.
pub fn red_sideband(p: SystemParams) -> SystemParams {
    SystemParams {
        delta_a_eff: p.omega_b,
        delta_c: p.omega_b,
        omega_q: p.omega_b,
        ..p
    }
}
