//! Run configuration: one JSON document, mirrored by command-line flags
//! (flags win). The resolved configuration is echoed into every JSON output
//! so runs can be reproduced from their artifacts.

use serde::{Deserialize, Serialize};

use crate::analysis::Tolerances;
use crate::error::{Error, Result};
use crate::model::{self, BareParams, SystemParams};

/// Scan grid for the active subcommand: probe offsets, S_x frequencies, or
/// pump amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

/// Output sinks and CSV significant-digit precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct OutputConfig {
    pub csv_path: Option<String>,
    pub json_path: Option<String>,
    pub precision: Option<usize>,
}

pub const DEFAULT_PRECISION: usize = 12;

/// The user-facing configuration document. Unset blocks fall back to
/// per-subcommand defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// System parameters; missing keys take the documented defaults.
    pub params: Option<SystemParams>,
    /// Bare parameters; with `derive_effective` they dress `params`.
    pub bare: Option<BareParams>,
    /// Derive delta_c, delta_a_eff and g_em from `bare` before running.
    pub derive_effective: bool,
    /// Force the red-sideband configuration after everything else.
    pub red_sideband: bool,
    pub scan: Option<ScanConfig>,
    pub tolerances: Option<Tolerances>,
    /// Expected displacement-spectrum peak count (features report).
    pub nms_expected_peaks: Option<usize>,
    pub output: OutputConfig,
}

/// A fully resolved run: every default applied, parameters validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: SystemParams,
    pub scan: ScanConfig,
    pub tolerances: Tolerances,
    pub nms_expected_peaks: Option<usize>,
    pub csv_path: Option<String>,
    pub json_path: Option<String>,
    pub precision: usize,
}

impl Resolved {
    /// The equivalent explicit configuration document (the echo).
    pub fn echo(&self) -> RunConfig {
        RunConfig {
            params: Some(self.params),
            bare: None,
            derive_effective: false,
            red_sideband: false,
            scan: Some(self.scan),
            tolerances: Some(self.tolerances),
            nms_expected_peaks: self.nms_expected_peaks,
            output: OutputConfig {
                csv_path: self.csv_path.clone(),
                json_path: self.json_path.clone(),
                precision: Some(self.precision),
            },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &str) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
        Self::from_json(&text)
    }

    /// Applies defaults, derives effective parameters when requested, and
    /// validates everything. `default_scan` is the active subcommand's grid.
    pub fn resolve(&self, default_scan: ScanConfig) -> Result<Resolved> {
        let mut params = self.params.unwrap_or_default();
        if params.omega_b != 1.0 {
            return Err(Error::Config(format!(
                "omega_b is the frequency unit and must be 1, got {}",
                params.omega_b
            )));
        }
        if let Some(bare) = &self.bare {
            if self.derive_effective {
                let eff = model::effective_params(bare)?;
                params.delta_c = eff.delta_c;
                params.delta_a_eff = eff.delta_a;
                params.g_em = eff.g_em;
                params.kappa_c = bare.kappa_c;
                params.g_om_bare = bare.g_om;
                params.e_m = bare.e_m;
            }
        } else if self.derive_effective {
            return Err(Error::Config(
                "derive_effective set but no bare block given".into(),
            ));
        }
        if self.red_sideband {
            params = model::red_sideband(params);
        }
        let params = model::validate(params)?;

        let scan = self.scan.unwrap_or(default_scan);
        if scan.points < 3 {
            return Err(Error::Config(format!(
                "scan.points must be at least 3, got {}",
                scan.points
            )));
        }
        if scan.x_min.is_nan() || scan.x_max.is_nan() || scan.x_min >= scan.x_max {
            return Err(Error::Config(format!(
                "scan.x_min ({}) must be below scan.x_max ({})",
                scan.x_min, scan.x_max
            )));
        }
        let precision = self.output.precision.unwrap_or(DEFAULT_PRECISION);
        if !(6..=17).contains(&precision) {
            return Err(Error::Config(format!(
                "output.precision must lie in [6, 17], got {precision}"
            )));
        }
        Ok(Resolved {
            params,
            scan,
            tolerances: self.tolerances.unwrap_or_default(),
            nms_expected_peaks: self.nms_expected_peaks,
            csv_path: self.output.csv_path.clone(),
            json_path: self.output.json_path.clone(),
            precision,
        })
    }
}

/// Default scan grids per subcommand.
pub mod defaults {
    use super::ScanConfig;

    /// Probe offsets (delta - omega_b)/omega_b.
    pub const PROBE: ScanConfig = ScanConfig {
        x_min: -1.0,
        x_max: 1.0,
        points: 4001,
    };
    /// Displacement-spectrum frequencies; excludes omega = 0 where the
    /// response denominator can get small.
    pub const NMS: ScanConfig = ScanConfig {
        x_min: 0.05,
        x_max: 2.0,
        points: 4001,
    };
    /// Pump amplitudes; wide enough to bracket the switching window of the
    /// documented coupling sets.
    pub const BISTABILITY: ScanConfig = ScanConfig {
        x_min: 0.0,
        x_max: 10.0,
        points: 401,
    };
}
