//! Flat run configuration shared by every subcommand.
//!
//! The config file is a single JSON object whose keys match the long flag
//! names with dashes replaced by underscores (`--two-chi` → `two_chi`).
//! Unknown keys are rejected. Flags always win over the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

macro_rules! run_config {
    ($($(#[$attr:meta])* $field:ident: $ty:ty),* $(,)?) => {
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct RunConfig {
            $(
                $(#[$attr])*
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl RunConfig {
            /// Values set in `self` win; holes fall back to `under`.
            pub fn overlay(self, under: RunConfig) -> RunConfig {
                RunConfig {
                    $( $field: self.$field.or(under.$field), )*
                }
            }
        }
    };
}

run_config! {
    mode: String,
    consistent: bool,
    gamma: f64,
    gamma2: f64,
    delta_eff: f64,
    two_chi: f64,
    input: f64,
    smin: f64,
    smax: f64,
    steps: usize,
    chi_ratio: f64,
    detunings: Vec<f64>,
    points: usize,
    a_max: f64,
    drive_re: f64,
    drive_im: f64,
    u0_re: f64,
    u0_im: f64,
    t_end: f64,
    tol: f64,
    omega_c: f64,
    omega_m: f64,
    omega_l: f64,
    #[serde(rename = "G")]
    coupling: f64,
    g: f64,
    #[serde(rename = "E")]
    e_re: f64,
    #[serde(rename = "E_im")]
    e_im: f64,
    nbar: f64,
    kappa: f64,
    delta: f64,
    chi_eff: f64,
    n_cavity: usize,
    n_mirror: usize,
    #[serde(rename = "R")]
    reflectivity: f64,
    #[serde(rename = "T")]
    transmissivity: f64,
    beta0: f64,
    beta2: f64,
    io_max: f64,
    output: String,
    format: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn dump(&self, target: &str) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Internal(format!("config serialization: {e}")))?;
        if target == "-" {
            println!("{json}");
            Ok(())
        } else {
            std::fs::write(PathBuf::from(target), json + "\n")
                .map_err(|e| CliError::Internal(format!("cannot write {target}: {e}")))
        }
    }
}

/// Resolve the config file path: `--config` wins, then `BISTAB_CONFIG`.
pub fn config_path(flag: Option<&str>) -> Option<PathBuf> {
    flag.map(PathBuf::from)
        .or_else(|| std::env::var_os("BISTAB_CONFIG").map(PathBuf::from))
}
