//! Artifact shapes and writers. Every artifact is deterministic for a given
//! configuration: ordered maps, fixed field order, and probabilities rounded
//! to 12 significant digits before serialization.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use bsm_core::fock::Distribution;
use bsm_core::metrics::{MetricsReport, StateMetrics};
use bsm_core::noise::NoiseConfig;
use bsm_core::relay::RelayCurve;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits; the decimal form then round-trips
/// identically through serde_json.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        format!("{x:.11e}").parse().expect("formatted float parses")
    }
}

pub fn rounded_map(dist: &Distribution) -> BTreeMap<String, f64> {
    dist.iter().map(|(k, p)| (k.to_string(), round_sig(*p))).collect()
}

#[derive(Debug, Serialize)]
pub struct SamplingOut {
    pub shots: u64,
    pub seed: u64,
    pub k: u32,
    pub eta: f64,
    pub post_selected: u64,
    pub raw_counts: BTreeMap<String, u64>,
    /// Absent (null) when no shot survived post-selection.
    pub corrected: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize)]
pub struct DistributionOut {
    pub schema_version: u32,
    pub command: &'static str,
    pub scheme: String,
    pub input: String,
    pub mode_order: Vec<String>,
    pub noise: Option<NoiseConfig>,
    pub probabilities: BTreeMap<String, f64>,
    pub sampling: Option<SamplingOut>,
}

#[derive(Debug, Serialize)]
pub struct MetricsValues {
    pub p_correct: f64,
    pub p_false: f64,
    pub p_ambiguous: f64,
    pub mdf: Option<f64>,
    pub tvd: f64,
}

impl From<&StateMetrics> for MetricsValues {
    fn from(m: &StateMetrics) -> Self {
        MetricsValues {
            p_correct: round_sig(m.p_correct),
            p_false: round_sig(m.p_false),
            p_ambiguous: round_sig(m.p_ambiguous),
            mdf: m.mdf.map(round_sig),
            tvd: round_sig(m.tvd),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportOut {
    pub average: MetricsValues,
    pub per_state: BTreeMap<String, MetricsValues>,
}

impl From<&MetricsReport> for ReportOut {
    fn from(r: &MetricsReport) -> Self {
        ReportOut {
            average: (&r.average).into(),
            per_state: r
                .per_state
                .iter()
                .map(|(k, m)| (k.token().to_string(), m.into()))
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SampledReportOut {
    pub shots: u64,
    pub seed: u64,
    pub k: u32,
    pub eta: f64,
    #[serde(flatten)]
    pub report: ReportOut,
}

/// Published comparison values: the two theoretical success probabilities
/// and the measured averages.
#[derive(Debug, Serialize)]
pub struct ReferenceOut {
    pub theory: BTreeMap<&'static str, f64>,
    pub experiment: BTreeMap<&'static str, f64>,
}

impl ReferenceOut {
    pub fn table() -> Self {
        ReferenceOut {
            theory: BTreeMap::from([
                ("standard_p_correct", 0.5),
                ("enhanced_p_correct", 0.625),
            ]),
            experiment: BTreeMap::from([
                ("standard_p_correct", 0.481),
                ("enhanced_p_correct", 0.579),
                ("standard_mdf", 0.977),
                ("standard_tvd", 0.072),
            ]),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MetricsOut {
    pub schema_version: u32,
    pub command: &'static str,
    pub scheme: String,
    pub noise: Option<NoiseConfig>,
    pub exact: ReportOut,
    pub sampled: Option<SampledReportOut>,
    pub reference: ReferenceOut,
}

#[derive(Debug, Serialize)]
pub struct TableRowOut {
    pub label: String,
    pub probability: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct TableOut {
    pub schema_version: u32,
    pub command: &'static str,
    pub scheme: String,
    pub tolerance: f64,
    pub mode_order: Vec<String>,
    pub rows: BTreeMap<String, TableRowOut>,
}

#[derive(Debug, Serialize)]
pub struct RelayPointOut {
    pub n: u32,
    pub success: f64,
}

#[derive(Debug, Serialize)]
pub struct RelayCurveOut {
    pub label: String,
    pub p_c: f64,
    pub points: Vec<RelayPointOut>,
}

impl From<&RelayCurve> for RelayCurveOut {
    fn from(c: &RelayCurve) -> Self {
        RelayCurveOut {
            label: c.label.clone(),
            p_c: c.p_c,
            points: c
                .points
                .iter()
                .map(|p| RelayPointOut { n: p.n, success: round_sig(p.success) })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RelayOut {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: &'static str,
    pub n_max: u32,
    pub curves: Vec<RelayCurveOut>,
}

/// Writes serialized JSON plus a trailing newline to the path, or to stdout.
pub fn write_json<T: Serialize>(target: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    write_bytes(target, &bytes)
}

pub fn write_bytes(target: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match target {
        Some(path) => std::fs::write(path, bytes).map_err(|e| {
            CliError::Runtime(anyhow::anyhow!("cannot write {}: {e}", path.display()))
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write stdout: {e}")))
        }
    }
}

/// CSV field for a pattern key: quoted, since the key itself contains commas.
pub fn csv_pattern(key: &str) -> String {
    format!("\"{key}\"")
}

/// Inserts a suffix before the file extension: out.json -> out.tag.json.
pub fn suffixed_path(path: &Path, tag: &str) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => path.with_extension(format!("{tag}.{ext}")),
        None => {
            let mut name = path.as_os_str().to_owned();
            name.push(format!(".{tag}"));
            PathBuf::from(name)
        }
    }
}
