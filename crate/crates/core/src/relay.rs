//! Success scaling of a chain of entanglement-swapping nodes. A chain that
//! distributes entanglement across `n` segments performs `n - 1` swaps, so
//! without quantum memory the end-to-end success probability is p_c^(n-1).

use serde::Serialize;

use crate::error::{Error, Result};

/// How intermediate nodes are assumed to operate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayModel {
    /// All swaps must succeed in one attempt: p_c^(n-1).
    Memoryless,
    /// Idealized memory-assisted chain retrying level by level: p_c^(log2 n).
    MemoryAssisted,
}

fn check_pc(p_c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_c) {
        return Err(Error::InvalidParameter(format!("p_c {p_c} outside [0, 1]")));
    }
    Ok(())
}

/// End-to-end success probability over `n` segments without memory.
pub fn relay_success(p_c: f64, n: u32) -> Result<f64> {
    check_pc(p_c)?;
    if n == 0 {
        return Err(Error::InvalidParameter("segment count must be at least 1".into()));
    }
    Ok(p_c.powi(n as i32 - 1))
}

/// Success probability with ideal memories: exponent drops to log2(n).
pub fn memory_assisted_success(p_c: f64, n: u32) -> Result<f64> {
    check_pc(p_c)?;
    if n == 0 {
        return Err(Error::InvalidParameter("segment count must be at least 1".into()));
    }
    Ok(p_c.powf((n as f64).log2()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayPoint {
    pub n: u32,
    pub success: f64,
}

/// Success-versus-segments curve for one swap success probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayCurve {
    pub label: String,
    pub p_c: f64,
    pub model: RelayModel,
    pub points: Vec<RelayPoint>,
}

/// Curve for n = 1..=n_max. Strictly decreasing for p_c < 1.
pub fn curve(label: impl Into<String>, p_c: f64, n_max: u32, model: RelayModel) -> Result<RelayCurve> {
    check_pc(p_c)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let points = (1..=n_max)
        .map(|n| {
            let success = match model {
                RelayModel::Memoryless => relay_success(p_c, n),
                RelayModel::MemoryAssisted => memory_assisted_success(p_c, n),
            }?;
            Ok(RelayPoint { n, success })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelayCurve { label: label.into(), p_c, model, points })
}

/// The four built-in swap probabilities: theoretical and measured values for
/// both schemes.
pub const PRESETS: [(&str, f64); 4] = [
    ("theory_standard", 0.5),
    ("theory_enhanced", 0.625),
    ("experiment_standard", 0.481),
    ("experiment_enhanced", 0.579),
];

/// Preset curves in a fixed emission order.
pub fn preset_curves(n_max: u32, model: RelayModel) -> Result<Vec<RelayCurve>> {
    PRESETS.iter().map(|&(label, p_c)| curve(label, p_c, n_max, model)).collect()
}
