//! Built-in oracle suites: every cross-route identity the kernels must
//! satisfy, runnable from the command line as a self-check.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{red_sideband, SystemParams};
use crate::numerics;
use crate::probe;
use crate::steady_state;

/// Fixed seed so check runs are reproducible byte-for-byte.
const SEED: u64 = 0x5eed_0d15_ea5e_0001;

/// Outcome of one suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    /// Worst observed deviation or a short failure description.
    pub detail: String,
}

/// Deliberate fault injection for negative-control tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    None,
    /// Perturbs the numeric residues before reconstruction.
    ResidueFormula,
}

/// Runs every suite; `extra` adds one reconstruction case at the given
/// parameter set.
pub fn run_suites(extra: Option<&SystemParams>, corruption: Corruption) -> Vec<CheckResult> {
    vec![
        cubic_residuals(),
        partial_fraction_reconstruction(extra, corruption),
        spectrum_symmetry(),
        sx_reality_evenness(),
        bistability_brute_force(),
    ]
}

fn cubic_residuals() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut worst_pair = 0.0f64;
    for _ in 0..10_000 {
        let mag: f64 = rng.random_range(0.5..10.0);
        let c3 = if rng.random_bool(0.5) { mag } else { -mag };
        let c2: f64 = rng.random_range(-10.0..10.0);
        let c1: f64 = rng.random_range(-10.0..10.0);
        let c0: f64 = rng.random_range(-10.0..10.0);
        let roots = match numerics::solve_cubic(c3, c2, c1, c0) {
            Ok(r) => r,
            Err(e) => {
                return CheckResult {
                    name: "cubic-root residuals",
                    pass: false,
                    detail: format!("solver error: {e}"),
                }
            }
        };
        let scale = 1.0f64
            .max(c0.abs())
            .max(c1.abs())
            .max(c2.abs())
            .max(c3.abs());
        for r in roots.roots {
            let p = ((Complex64::new(c3, 0.0) * r + c2) * r + c1) * r + c0;
            worst = worst.max(p.norm() / scale);
        }
        let im_sum: f64 = roots.roots.iter().map(|r| r.im).sum();
        worst_pair = worst_pair.max(im_sum.abs());
    }
    CheckResult {
        name: "cubic-root residuals",
        pass: worst <= 1e-10 && worst_pair < 1e-9,
        detail: format!("worst scaled residual {worst:.3e}, worst pair imbalance {worst_pair:.3e}"),
    }
}

/// Random red-sideband parameter set drawn from the demo-configuration
/// ranges.
fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let log_range = |rng: &mut ChaCha8Rng| {
        let e: f64 = rng.random_range(-5.0..-4.0);
        10f64.powf(e)
    };
    red_sideband(SystemParams {
        g_om: rng.random_range(0.0..0.5),
        g_em: rng.random_range(0.0..0.5),
        g: rng.random_range(0.0..0.5),
        kappa_a: rng.random_range(0.2..2.2),
        kappa_c: log_range(rng),
        gamma_b: log_range(rng),
        gamma_d: log_range(rng),
        sigma_z: -1.0,
        ..SystemParams::default()
    })
}

fn reconstruction_deviation(
    p: &SystemParams,
    rng: &mut ChaCha8Rng,
    corruption: Corruption,
) -> Result<f64, String> {
    let mut set = probe::hybrid_poles(p).map_err(|e| e.to_string())?;
    if corruption == Corruption::ResidueFormula {
        for r in &mut set.residues_numeric {
            *r *= 1.0 + 1e-3;
        }
    }
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let lambda: f64 = rng.random_range(-1.0..1.0);
        let direct = probe::epsilon_t(p, p.omega_b + lambda)
            .map_err(|e| e.to_string())?
            .value;
        let recon = probe::epsilon_t_from_poles(p, &set, lambda);
        worst = worst.max((direct - recon).norm() / direct.norm());
    }
    Ok(worst)
}

fn partial_fraction_reconstruction(
    extra: Option<&SystemParams>,
    corruption: Corruption,
) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x02);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let p = if i == 0 {
            match extra {
                Some(p) => red_sideband(*p),
                None => random_params(&mut rng),
            }
        } else {
            random_params(&mut rng)
        };
        match reconstruction_deviation(&p, &mut rng, corruption) {
            Ok(dev) => worst = worst.max(dev),
            Err(msg) => {
                return CheckResult {
                    name: "partial-fraction reconstruction",
                    pass: false,
                    detail: msg,
                }
            }
        }
    }
    CheckResult {
        name: "partial-fraction reconstruction",
        pass: worst < 1e-9,
        detail: format!("worst relative deviation {worst:.3e}"),
    }
}

fn spectrum_symmetry() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x03);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        for k in 1..=50 {
            let lambda = k as f64 / 50.0;
            let plus = match probe::epsilon_t(&p, p.omega_b + lambda) {
                Ok(v) => v.value,
                Err(e) => {
                    return CheckResult {
                        name: "spectrum symmetry",
                        pass: false,
                        detail: e.to_string(),
                    }
                }
            };
            let minus = probe::epsilon_t(&p, p.omega_b - lambda).unwrap().value;
            worst = worst.max((plus.re - minus.re).abs());
            worst = worst.max((plus.im + minus.im).abs());
        }
    }
    CheckResult {
        name: "spectrum symmetry",
        pass: worst < 1e-9,
        detail: format!("worst even/odd defect {worst:.3e}"),
    }
}

fn sx_reality_evenness() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x04);
    let sets = [
        (0.4, 0.4, 0.4),
        (0.4, 0.4, 0.01),
        (0.4, 0.2, 0.01),
        (0.4, 0.01, 0.01),
    ];
    let mut worst_even = 0.0f64;
    let mut min_value = f64::INFINITY;
    for (g_om, g_em, g) in sets {
        let p = SystemParams {
            kappa_a: 0.8,
            g_om,
            g_em,
            g,
            ..SystemParams::default()
        };
        for _ in 0..25 {
            let omega: f64 = rng.random_range(0.05..2.0);
            let plus = match crate::nms::displacement_spectrum(&p, omega) {
                Ok(v) => v,
                Err(e) => {
                    return CheckResult {
                        name: "displacement-spectrum reality/evenness",
                        pass: false,
                        detail: format!("at omega {omega}: {e}"),
                    }
                }
            };
            let minus = crate::nms::displacement_spectrum(&p, -omega).unwrap();
            worst_even = worst_even.max((plus - minus).abs() / (1.0 + plus.abs()));
            min_value = min_value.min(plus);
        }
    }
    CheckResult {
        name: "displacement-spectrum reality/evenness",
        pass: worst_even < 1e-12 && min_value >= -1e-12,
        detail: format!("worst evenness defect {worst_even:.3e}, min value {min_value:.3e}"),
    }
}

/// Dense sign-change scan of the scalar steady-state equation: the
/// brute-force root oracle for the photon-number cubic.
pub fn brute_force_roots(coeffs: &steady_state::SteadyCoeffs, e_p: f64, n_max: f64) -> Vec<f64> {
    let f = |n: f64| coeffs.scalar_lhs(n) - e_p * e_p;
    let samples = 20_000;
    let mut out = Vec::new();
    let mut prev_n = 0.0;
    let mut prev_f = f(0.0);
    if prev_f == 0.0 {
        out.push(0.0);
    }
    for i in 1..=samples {
        let n = n_max * i as f64 / samples as f64;
        let fi = f(n);
        if prev_f.signum() != fi.signum() {
            // bisect
            let (mut lo, mut hi) = (prev_n, n);
            let mut f_lo = prev_f;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 1e-12 * (1.0 + hi) {
                    break;
                }
                let fm = f(mid);
                if f_lo.signum() == fm.signum() {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev_n = n;
        prev_f = fi;
    }
    out
}

fn bistability_brute_force() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x05);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = SystemParams {
            g_em: rng.random_range(0.0..0.2),
            g: rng.random_range(0.0..0.01),
            g_om: 0.0,
            g_om_bare: rng.random_range(0.01..0.08),
            e_m: rng.random_range(10.0..200.0),
            kappa_a: rng.random_range(0.5..2.0),
            ..SystemParams::default()
        };
        let e_p: f64 = rng.random_range(0.5..8.0);
        let coeffs = match steady_state::steady_coeffs(&p) {
            Ok(c) => c,
            Err(e) => {
                return CheckResult {
                    name: "bistability brute-force equivalence",
                    pass: false,
                    detail: e.to_string(),
                }
            }
        };
        let roots = match steady_state::photon_number_roots(&p, e_p) {
            Ok(r) => r,
            Err(e) => {
                return CheckResult {
                    name: "bistability brute-force equivalence",
                    pass: false,
                    detail: e.to_string(),
                }
            }
        };
        let n_max = 10.0 * e_p * e_p / (p.kappa_a * p.kappa_a / 4.0);
        let brute = brute_force_roots(&coeffs, e_p, n_max);
        if brute.len() != roots.len() {
            return CheckResult {
                name: "bistability brute-force equivalence",
                pass: false,
                detail: format!(
                    "root count mismatch: cubic {} vs scan {}",
                    roots.len(),
                    brute.len()
                ),
            };
        }
        for (r, b) in roots.iter().zip(&brute) {
            worst = worst.max((r.n - b).abs());
        }
    }
    CheckResult {
        name: "bistability brute-force equivalence",
        pass: worst < 1e-6,
        detail: format!("worst |cubic - scan| {worst:.3e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let results = run_suites(None, Corruption::None);
        for r in &results {
            assert!(r.pass, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_residues_detected() {
        let results = run_suites(None, Corruption::ResidueFormula);
        let recon = results
            .iter()
            .find(|r| r.name == "partial-fraction reconstruction")
            .unwrap();
        assert!(!recon.pass, "corruption went unnoticed: {}", recon.detail);
        // other suites unaffected
        assert!(results.iter().filter(|r| r.pass).count() >= 4);
    }

    #[test]
    fn injected_params_reported() {
        let p = SystemParams::default();
        let results = run_suites(Some(&p), Corruption::None);
        let recon = results
            .iter()
            .find(|r| r.name == "partial-fraction reconstruction")
            .unwrap();
        assert!(recon.pass, "{}", recon.detail);
    }
}
