//! Figures of merit for a measured or simulated set of detection
//! distributions, judged against a classification table.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::fock::Distribution;
use crate::schemes::{BellKind, ClassificationTable, Label};

/// Probability mass classified as the state that was actually sent,
/// averaged uniformly over the four inputs.
pub fn p_correct(
    dists: &BTreeMap<BellKind, Distribution>,
    table: &ClassificationTable,
) -> Result<f64> {
    let mut sum = 0.0;
    for (&kind, dist) in dists {
        sum += classified_mass(dist, table, |label| label == Label::Bell(kind))?;
    }
    Ok(sum / dists.len() as f64)
}

/// Probability mass classified as a definite but wrong state, averaged
/// uniformly over the four inputs.
pub fn p_false(
    dists: &BTreeMap<BellKind, Distribution>,
    table: &ClassificationTable,
) -> Result<f64> {
    let mut sum = 0.0;
    for (&kind, dist) in dists {
        sum += classified_mass(dist, table, |label| {
            matches!(label, Label::Bell(other) if other != kind)
        })?;
    }
    Ok(sum / dists.len() as f64)
}

/// Fraction of definite verdicts that are right: p_c / (p_c + p_f).
/// Undefined when no pattern is ever classified.
pub fn mdf(p_correct: f64, p_false: f64) -> Option<f64> {
    let denom = p_correct + p_false;
    if denom > 0.0 {
        Some(p_correct / denom)
    } else {
        None
    }
}

/// Total variation distance between two distributions over the same pattern
/// space: half the sum of absolute differences, union of supports.
pub fn tvd(a: &Distribution, b: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (key, pa) in a {
        sum += (pa - b.get(key).copied().unwrap_or(0.0)).abs();
    }
    for (key, pb) in b {
        if !a.contains_key(key) {
            sum += pb.abs();
        }
    }
    sum / 2.0
}

fn classified_mass<F>(dist: &Distribution, table: &ClassificationTable, pick: F) -> Result<f64>
where
    F: Fn(Label) -> bool,
{
    let mut mass = 0.0;
    for (pattern, &p) in dist {
        if pick(table.classify(pattern)?) {
            mass += p;
        }
    }
    Ok(mass)
}

/// Metrics for one input state (or the uniform average over all four).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateMetrics {
    pub p_correct: f64,
    pub p_false: f64,
    pub p_ambiguous: f64,
    /// None when no pattern receives a definite verdict.
    pub mdf: Option<f64>,
    /// Distance to the reference distribution for the same input.
    pub tvd: f64,
}

/// Full report: per-input metrics plus their uniform average.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub average: StateMetrics,
    pub per_state: BTreeMap<BellKind, StateMetrics>,
}

/// Evaluates `dists` against the classifier, using `reference` (typically the
/// ideal distributions) as the comparison point for the distance column.
/// The average MDF is formed from the averaged numerator and denominator,
/// not by averaging per-state ratios.
pub fn compute_report(
    dists: &BTreeMap<BellKind, Distribution>,
    reference: &BTreeMap<BellKind, Distribution>,
    table: &ClassificationTable,
) -> Result<MetricsReport> {
    let mut per_state = BTreeMap::new();
    let (mut pc, mut pf, mut pa, mut d) = (0.0, 0.0, 0.0, 0.0);
    for (&kind, dist) in dists {
        let correct = classified_mass(dist, table, |l| l == Label::Bell(kind))?;
        let false_ = classified_mass(dist, table, |l| {
            matches!(l, Label::Bell(other) if other != kind)
        })?;
        let ambiguous = classified_mass(dist, table, |l| l == Label::Ambiguous)?;
        let empty = Distribution::new();
        let refer = reference.get(&kind).unwrap_or(&empty);
        let dist_to_ref = tvd(dist, refer);
        per_state.insert(
            kind,
            StateMetrics {
                p_correct: correct,
                p_false: false_,
                p_ambiguous: ambiguous,
                mdf: mdf(correct, false_),
                tvd: dist_to_ref,
            },
        );
        pc += correct;
        pf += false_;
        pa += ambiguous;
        d += dist_to_ref;
    }
    let n = dists.len() as f64;
    let (pc, pf, pa, d) = (pc / n, pf / n, pa / n, d / n);
    Ok(MetricsReport {
        average: StateMetrics {
            p_correct: pc,
            p_false: pf,
            p_ambiguous: pa,
            mdf: mdf(pc, pf),
            tvd: d,
        },
        per_state,
    })
}
