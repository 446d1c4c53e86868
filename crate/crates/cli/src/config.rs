//! Experiment configuration: JSON schema, per-experiment defaults, and
//! validation. Every run echoes its full effective configuration so the
//! output is self-describing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const EXPERIMENTS: &[&str] =
    &["isospectral", "roundtrip", "limits", "embed", "billiard", "volume"];

/// On-disk configuration. Every field may be omitted and falls back to the
/// experiment's default, except the seed, which must come from the file or
/// the command line.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub c_ladder: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConfig {
    pub experiment: String,
    pub n: usize,
    pub seed: u64,
    pub c_ladder: Vec<f64>,
    pub samples: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl EffectiveConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        *self
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("tolerance {name} missing from defaults"))
    }
}

struct Defaults {
    n: usize,
    samples: u64,
    c_ladder: &'static [f64],
    tolerances: &'static [(&'static str, f64)],
}

fn defaults(experiment: &str) -> Option<Defaults> {
    let d = match experiment {
        "isospectral" => Defaults {
            n: 4,
            samples: 20,
            c_ladder: &[],
            tolerances: &[
                ("spectrum_drift", 1e-6),
                ("casimir_sum_drift", 1e-9),
                ("casimir_prod_drift", 1e-8),
                ("energy_drift", 1e-8),
                ("equilibrium_drift", 1e-12),
            ],
        },
        "roundtrip" => Defaults {
            n: 3,
            samples: 100,
            c_ladder: &[],
            tolerances: &[
                ("max_rel_error", 1e-6),
                ("equilibrium_error", 1e-12),
                ("mu_gap_floor", 1e-3),
            ],
        },
        "limits" => Defaults {
            n: 3,
            samples: 1000,
            c_ladder: &[10.0, 20.0, 40.0, 80.0],
            tolerances: &[
                ("jc_rel_error_at_cmax", 0.2),
                ("edge_error_at_c40", 1e-6),
                ("trace_identity", 1e-12),
                ("fc_limit_error", 1e-6),
                ("fc_margin", 0.25),
            ],
        },
        "embed" => Defaults {
            n: 3,
            samples: 10_000,
            c_ladder: &[80.0],
            tolerances: &[
                ("epsilon", 0.25),
                ("inside_fraction", 1.0),
                ("reverse_outside_fraction", 0.99),
            ],
        },
        "billiard" => Defaults {
            n: 3,
            samples: 10,
            c_ladder: &[20.0, 40.0, 80.0],
            tolerances: &[("monotone_fraction", 0.9), ("energy_drift", 1e-3)],
        },
        "volume" => Defaults {
            n: 3,
            samples: 1_000_000,
            c_ladder: &[],
            tolerances: &[("exact_identity", 1e-12), ("mc_sigmas", 3.0)],
        },
        _ => return None,
    };
    Some(d)
}

/// Merges the config file with command-line overrides and the experiment's
/// defaults; rejects unknown experiments, missing seeds, out-of-range
/// stiffness ladders, and unrecognized tolerance names.
pub fn resolve(
    experiment: &str,
    file: Option<ConfigFile>,
    seed_flag: Option<u64>,
    out_flag: Option<PathBuf>,
) -> Result<EffectiveConfig, String> {
    let d = defaults(experiment)
        .ok_or_else(|| format!("unknown experiment '{experiment}'"))?;
    let file = file.unwrap_or_default();
    if let Some(named) = &file.experiment {
        if named != experiment {
            return Err(format!(
                "config names experiment '{named}' but '{experiment}' was requested"
            ));
        }
    }
    let seed = seed_flag
        .or(file.seed)
        .ok_or("a seed is mandatory (set \"seed\" in the config or pass --seed)")?;
    let n = file.n.unwrap_or(d.n);
    if n < 3 {
        return Err(format!("n = {n} is below the minimum of 3"));
    }
    let samples = file.samples.unwrap_or(d.samples);
    if samples == 0 {
        return Err("samples must be at least 1".into());
    }
    let c_ladder = file.c_ladder.unwrap_or_else(|| d.c_ladder.to_vec());
    for &c in &c_ladder {
        if !(2.0..=200.0).contains(&c) {
            return Err(format!("stiffness c = {c} outside the supported range [2, 200]"));
        }
    }
    let mut tolerances: BTreeMap<String, f64> =
        d.tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    if let Some(given) = file.tolerances {
        for (k, v) in given {
            if !tolerances.contains_key(&k) {
                return Err(format!("unknown tolerance '{k}' for experiment '{experiment}'"));
            }
            tolerances.insert(k, v);
        }
    }
    Ok(EffectiveConfig {
        experiment: experiment.to_string(),
        n,
        seed,
        c_ladder,
        samples,
        tolerances,
        out: out_flag.or(file.out),
    })
}
