//! Mean-field steady state of the pumped cavity: intracavity photon number,
//! bistability branches over the pump amplitude, and switching metrics.
//!
//! Eliminating the microwave and qubit amplitudes from the steady-state
//! equations collapses the photon number n = |a_s|^2 onto a real cubic
//!   v^2 n^3 - 2 u v n^2 + (kappa_a^2/4 + u^2) n - E_p^2 = 0,
//! u = A6 - A7 A3, v = A7 g_om, built from the drive-dressed constants
//! A1..A7 below.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate, SystemParams};
use crate::numerics;

/// Relative tolerance on the scalar steady-state equation for reported roots.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
/// Relative closure tolerance between |a_s|^2 and the requested root.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Drive-dressed constants of the photon-number equation. The state-dependent
/// combination A5 = g_om n + A3 is kept in affine form (`a3`, `g_om_bare`)
/// because n is the unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a6: f64,
    pub a7: f64,
    pub g_om_bare: f64,
    pub kappa_a: f64,
}

impl SteadyCoeffs {
    pub fn a5(&self, n: f64) -> f64 {
        self.g_om_bare * n + self.a3
    }

    /// u = A6 - A7 A3: the photon-number-independent part of the dressed
    /// detuning.
    pub fn u(&self) -> f64 {
        self.a6 - self.a7 * self.a3
    }

    /// v = A7 g_om: slope of the dressed detuning in n.
    pub fn v(&self) -> f64 {
        self.a7 * self.g_om_bare
    }

    /// Left-hand side of the scalar steady-state equation at photon number n:
    /// n (kappa_a^2/4 + (A6 - A7 A5(n))^2); equals E_p^2 at a root.
    pub fn scalar_lhs(&self, n: f64) -> f64 {
        let det = self.a6 - self.a7 * self.a5(n);
        n * (self.kappa_a * self.kappa_a / 4.0 + det * det)
    }

    fn cubic_coeffs(&self, e_p: f64) -> (f64, f64, f64, f64) {
        let u = self.u();
        let v = self.v();
        (
            v * v,
            -2.0 * u * v,
            self.kappa_a * self.kappa_a / 4.0 + u * u,
            -e_p * e_p,
        )
    }

    /// Discriminant of the photon-number cubic at pump amplitude `e_p`;
    /// positive inside the three-root window, negative outside.
    pub fn discriminant(&self, e_p: f64) -> f64 {
        let (a, b, c, d) = self.cubic_coeffs(e_p);
        18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c
            - 4.0 * a * c * c * c
            - 27.0 * a * a * d * d
    }
}

/// Evaluates the drive-dressed constants from the system parameters.
///
/// `p.delta_a_eff` enters here as the pre-mirror-shift optical detuning; the
/// radiation-pressure shift is resolved by [`steady_amplitudes`].
pub fn steady_coeffs(p: &SystemParams) -> Result<SteadyCoeffs> {
    let p = validate(*p)?;
    let dc2 = p.delta_c * p.delta_c + p.kappa_c * p.kappa_c / 4.0;
    let wq2 = p.omega_q * p.omega_q + p.gamma_d * p.gamma_d;
    let qubit = 4.0 * p.g * p.g * p.sigma_z * p.omega_q / wq2;
    let a1 = p.gamma_b / 2.0 + p.g_em * p.g_em * p.kappa_c / (2.0 * dc2) - qubit;
    let a2 = p.omega_b - p.g_em * p.g_em * p.delta_c / dc2 + qubit;
    let a3 = p.kappa_c * p.g_em * p.e_m / (2.0 * dc2);
    let a4 = p.delta_c * p.g_em * p.e_m / dc2;
    let norm = a1 * a1 + a2 * a2;
    let a6 = p.delta_a_eff - 2.0 * p.g_om_bare * a1 * a4 / norm;
    let a7 = 2.0 * p.g_om_bare * a2 / norm;
    Ok(SteadyCoeffs {
        a1,
        a2,
        a3,
        a4,
        a6,
        a7,
        g_om_bare: p.g_om_bare,
        kappa_a: p.kappa_a,
    })
}

/// A photon-number root with its slope-criterion stability label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonRoot {
    pub n: f64,
    pub stable: bool,
}

/// Real non-negative photon-number roots at pump amplitude `e_p`, ascending.
///
/// On the multivalued region the middle branch has negative slope
/// dn/d(E_p^2) and is labelled unstable. When the cubic degenerates
/// (A7 g_om = 0) the equation is linear and the single root is returned.
pub fn photon_number_roots(p: &SystemParams, e_p: f64) -> Result<Vec<PhotonRoot>> {
    if e_p < 0.0 {
        return Err(Error::NegativeCoupling {
            name: "e_p",
            value: e_p,
        });
    }
    let coeffs = steady_coeffs(p)?;
    photon_roots_from_coeffs(&coeffs, e_p)
}

fn photon_roots_from_coeffs(coeffs: &SteadyCoeffs, e_p: f64) -> Result<Vec<PhotonRoot>> {
    let (a, b, c, d) = coeffs.cubic_coeffs(e_p);
    let mut ns: Vec<f64> = if a == 0.0 {
        // Linear cavity: n (kappa_a^2/4 + u^2) = E_p^2.
        vec![-d / c]
    } else {
        numerics::solve_cubic(a, b, c, d)?
            .real_roots(1e-9)
            .into_iter()
            .filter(|&n| n >= -1e-12)
            .map(|n| n.max(0.0))
            .collect()
    };
    ns.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Slope of E_p^2(n); non-negative slope marks the stable branches.
    let dslope = |n: f64| 3.0 * a * n * n + 2.0 * b * n + c;
    Ok(ns
        .into_iter()
        .map(|n| PhotonRoot {
            n,
            stable: dslope(n) >= 0.0,
        })
        .collect())
}

/// Steady-state mean amplitudes of the four modes at a given photon-number
/// root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyAmplitudes {
    pub a_s: Complex64,
    pub b_s: Complex64,
    pub c_s: Complex64,
    pub sigma_ms: Complex64,
    /// Mirror-shifted optical detuning Delta_a' = Delta_a - 2 g_om Re(b_s).
    pub delta_a_prime: f64,
}

/// Mean amplitudes at photon number `n`, with the closure check
/// |a_s|^2 == n enforced at [`CLOSURE_TOL`].
///
/// The mirror amplitude uses the same dressed-constant decomposition as the
/// photon-number cubic, b_s = (A4 + i A5)/(A1 + i A2), so a root of the
/// cubic closes exactly.
pub fn steady_amplitudes(p: &SystemParams, n: f64) -> Result<SteadyAmplitudes> {
    let coeffs = steady_coeffs(p)?;
    let b_s = Complex64::new(coeffs.a4, coeffs.a5(n)) / Complex64::new(coeffs.a1, coeffs.a2);
    let delta_a_prime = p.delta_a_eff - 2.0 * p.g_om_bare * b_s.re;
    let a_s = Complex64::new(p.e_p, 0.0) / Complex64::new(p.kappa_a / 2.0, delta_a_prime);
    let c_s = (Complex64::i() * p.g_em * b_s + p.e_m) / Complex64::new(p.kappa_c / 2.0, p.delta_c);
    let sigma_ms =
        Complex64::i() * 4.0 * p.g * p.sigma_z * b_s / Complex64::new(p.gamma_d, p.omega_q);

    let got = a_s.norm_sqr();
    let scale = n.abs().max(1e-300);
    if n > 0.0 && (got - n).abs() / scale > CLOSURE_TOL {
        return Err(Error::InconsistentRoot { got, expected: n });
    }
    if n == 0.0 && got > 1e-12 {
        return Err(Error::InconsistentRoot { got, expected: n });
    }
    Ok(SteadyAmplitudes {
        a_s,
        b_s,
        c_s,
        sigma_ms,
        delta_a_prime,
    })
}

/// Bistability branch data over a pump-amplitude grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BistabilityBranch {
    pub pump: Vec<f64>,
    /// Roots (with stability labels) per grid point, ascending in n.
    pub roots: Vec<Vec<PhotonRoot>>,
    /// Pump amplitudes where the root count changes, ascending.
    pub turning_points: Vec<f64>,
    pub coeffs: SteadyCoeffs,
}

/// Sweeps the pump amplitude over `e_p_grid`, collecting roots per point and
/// locating turning points by bisection on the cubic discriminant between
/// grid points where the root count changes.
pub fn sweep_pump(p: &SystemParams, e_p_grid: &[f64]) -> Result<BistabilityBranch> {
    if e_p_grid.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    debug_assert!(e_p_grid.windows(2).all(|w| w[0] < w[1]));
    if e_p_grid[0] < 0.0 {
        return Err(Error::NegativeCoupling {
            name: "e_p",
            value: e_p_grid[0],
        });
    }
    let coeffs = steady_coeffs(p)?;
    let mut roots = Vec::with_capacity(e_p_grid.len());
    for &e_p in e_p_grid {
        roots.push(photon_roots_from_coeffs(&coeffs, e_p)?);
    }

    let mut turning_points = Vec::new();
    for w in e_p_grid.windows(2).zip(roots.windows(2)) {
        let (es, rs) = w;
        if rs[0].len() != rs[1].len() {
            turning_points.push(bisect_discriminant(&coeffs, es[0], es[1]));
        }
    }
    Ok(BistabilityBranch {
        pump: e_p_grid.to_vec(),
        roots,
        turning_points,
        coeffs,
    })
}

/// Bisection on the sign of the cubic discriminant over [lo, hi].
fn bisect_discriminant(coeffs: &SteadyCoeffs, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = coeffs.discriminant(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * (1.0 + hi.abs()) {
            return mid;
        }
        let f_mid = coeffs.discriminant(mid);
        if (f_lo <= 0.0) == (f_mid <= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Switching figures of merit extracted from a bistable branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingMetrics {
    /// Upper- over lower-branch photon number at the upward threshold.
    pub ratio: f64,
    /// Pump amplitude of the upward switch (lower/middle branches merge).
    pub e_up: f64,
    /// Pump amplitude of the downward switch.
    pub e_down: f64,
}

/// Extracts the switching ratio and the two threshold pump values from a
/// swept branch. Requires at least one turning-point pair.
///
/// The thresholds come from the discriminant bisection of the sweep. The
/// ratio is evaluated at the exact upward knee (the lower stationary point
/// of E_p^2(n)), where the root structure is {n_knee, n_knee, n_upper} and
/// Vieta gives the upper branch as 2u/v - 2 n_knee; probing the cubic just
/// inside the window instead would pick up a square-root error in the
/// window offset.
pub fn switching_metrics(b: &BistabilityBranch) -> Result<SwitchingMetrics> {
    if b.turning_points.len() < 2 {
        return Err(Error::NotBistable);
    }
    let e_down = b.turning_points[0];
    let e_up = b.turning_points[1];
    let (u, v) = (b.coeffs.u(), b.coeffs.v());
    let disc = u * u - 0.75 * b.coeffs.kappa_a * b.coeffs.kappa_a;
    if disc <= 0.0 || v == 0.0 {
        return Err(Error::NotBistable);
    }
    let n_knee = (2.0 * u - disc.sqrt()) / (3.0 * v);
    let n_upper = 2.0 * u / v - 2.0 * n_knee;
    if n_knee <= 0.0 {
        return Err(Error::NotBistable);
    }
    Ok(SwitchingMetrics {
        ratio: n_upper / n_knee,
        e_up,
        e_down,
    })
}
