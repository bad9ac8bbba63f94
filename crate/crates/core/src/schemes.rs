//! The two interferometric Bell-state measurement schemes and the pattern
//! classifier derived from their ideal output statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::elements::{balanced_bs, pbs_split};
use crate::error::{Error, Result};
use crate::fock::{
    Distribution, FockState, MixedState, ModeId, ModeRegistry, Polarization, PureState,
};

/// Default probability threshold below which a pattern is treated as absent
/// when the classifier table is built.
pub const TABLE_TOLERANCE: f64 = 1e-12;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four maximally entangled two-photon polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];

    pub fn token(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi+" => Ok(BellKind::PsiPlus),
            "psi-" => Ok(BellKind::PsiMinus),
            "phi+" => Ok(BellKind::PhiPlus),
            "phi-" => Ok(BellKind::PhiMinus),
            other => Err(Error::InvalidParameter(format!("unknown input state `{other}`"))),
        }
    }
}

impl Serialize for BellKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

/// Which interferometer is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// One balanced splitter, two detected paths, two photons in.
    Standard,
    /// Second splitter mixes one output with a two-photon auxiliary pair;
    /// three detected paths, four photons in.
    Enhanced,
}

impl SchemeKind {
    pub fn token(self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::Enhanced => "enhanced",
        }
    }

    /// Total photon number every ideal detection pattern carries.
    pub fn expected_photons(self) -> u32 {
        match self {
            SchemeKind::Standard => 2,
            SchemeKind::Enhanced => 4,
        }
    }

    /// Names of the detected paths, in pattern order.
    pub fn detection_labels(self) -> &'static [&'static str] {
        match self {
            SchemeKind::Standard => &["cH", "cV", "dH", "dV"],
            SchemeKind::Enhanced => &["dH", "dV", "fH", "fV", "gH", "gV"],
        }
    }

    /// Detected modes, in the order occupation patterns are reported.
    pub fn detection_modes(self) -> Vec<ModeId> {
        self.detection_labels()
            .iter()
            .map(|label| {
                let pol = if label.ends_with('H') { Polarization::H } else { Polarization::V };
                ModeId::new(*label, pol)
            })
            .collect()
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SchemeKind::Standard),
            "enhanced" => Ok(SchemeKind::Enhanced),
            other => Err(Error::InvalidParameter(format!("unknown scheme `{other}`"))),
        }
    }
}

fn input_registry() -> Arc<ModeRegistry> {
    ModeRegistry::polarized(["a", "b"]).expect("fresh ids")
}

fn aux_registry() -> Arc<ModeRegistry> {
    ModeRegistry::polarized(["e"]).expect("fresh ids")
}

/// One photon on each of paths `a` and `b`, entangled in polarization.
/// Mode order is (aH, aV, bH, bV).
pub fn make_bell(kind: BellKind) -> PureState {
    let inv = Complex64::new(INV_SQRT2, 0.0);
    let (first, second, sign) = match kind {
        BellKind::PsiPlus => ([1, 0, 0, 1], [0, 1, 1, 0], 1.0),
        BellKind::PsiMinus => ([1, 0, 0, 1], [0, 1, 1, 0], -1.0),
        BellKind::PhiPlus => ([1, 0, 1, 0], [0, 1, 0, 1], 1.0),
        BellKind::PhiMinus => ([1, 0, 1, 0], [0, 1, 0, 1], -1.0),
    };
    PureState::from_terms(
        input_registry(),
        vec![
            (FockState::from_slice(&first), inv),
            (FockState::from_slice(&second), inv * sign),
        ],
    )
    .expect("normalized by construction")
}

/// Auxiliary photon pair on path `e`: (|2H> + |2V>)/sqrt(2).
pub fn make_aux() -> PureState {
    let inv = Complex64::new(INV_SQRT2, 0.0);
    PureState::from_terms(
        aux_registry(),
        vec![
            (FockState::from_slice(&[2, 0]), inv),
            (FockState::from_slice(&[0, 2]), inv),
        ],
    )
    .expect("normalized by construction")
}

/// Runs the single-splitter scheme on a (possibly mixed) two-photon input
/// over paths `a` and `b`, returning the detection pattern distribution in
/// (cH, cV, dH, dV) order.
pub fn run_standard(bell: &MixedState) -> Result<Distribution> {
    let s = bell.apply(&balanced_bs("a", "b"))?;
    let s = s.relabel(&[("a".into(), "c".into()), ("b".into(), "d".into())])?;
    let s = pbs_split("c", "cH", "cV").apply_mixed(&s)?;
    let s = pbs_split("d", "dH", "dV").apply_mixed(&s)?;
    s.probability_distribution(&SchemeKind::Standard.detection_modes())
}

/// Runs the two-splitter scheme: the input meets the first splitter, one
/// output is mixed with the auxiliary pair on a second splitter, and the
/// three remaining paths are detected in (dH, dV, fH, fV, gH, gV) order.
pub fn run_enhanced(bell: &MixedState, aux: &MixedState) -> Result<Distribution> {
    let s = bell.tensor(aux)?;
    let s = s.apply(&balanced_bs("a", "b"))?;
    let s = s.relabel(&[("a".into(), "c".into()), ("b".into(), "d".into())])?;
    let s = s.apply(&balanced_bs("c", "e"))?;
    let s = s.relabel(&[("c".into(), "f".into()), ("e".into(), "g".into())])?;
    let s = pbs_split("d", "dH", "dV").apply_mixed(&s)?;
    let s = pbs_split("f", "fH", "fV").apply_mixed(&s)?;
    let s = pbs_split("g", "gH", "gV").apply_mixed(&s)?;
    s.probability_distribution(&SchemeKind::Enhanced.detection_modes())
}

/// Exact detection distribution for a perfect Bell input (and, for the
/// enhanced scheme, a perfect auxiliary pair).
pub fn ideal_distribution(scheme: SchemeKind, kind: BellKind) -> Distribution {
    let bell = MixedState::pure(make_bell(kind));
    match scheme {
        SchemeKind::Standard => run_standard(&bell),
        SchemeKind::Enhanced => run_enhanced(&bell, &MixedState::pure(make_aux())),
    }
    .expect("ideal inputs match the scheme layout")
}

/// Ideal distributions for all four Bell inputs.
pub fn ideal_distributions(scheme: SchemeKind) -> BTreeMap<BellKind, Distribution> {
    BellKind::ALL.iter().map(|&k| (k, ideal_distribution(scheme, k))).collect()
}

/// Verdict attached to a detection pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Bell(BellKind),
    Ambiguous,
}

impl Label {
    pub fn token(self) -> &'static str {
        match self {
            Label::Bell(kind) => kind.token(),
            Label::Ambiguous => "ambiguous",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

/// Per-pattern ideal probabilities and the resulting verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: Label,
    /// Ideal probability of the pattern under each Bell input.
    pub probability: BTreeMap<BellKind, f64>,
}

impl Serialize for TableRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut row = serializer.serialize_struct("TableRow", 2)?;
        row.serialize_field("label", &self.label)?;
        let probs: BTreeMap<&'static str, f64> =
            self.probability.iter().map(|(k, p)| (k.token(), *p)).collect();
        row.serialize_field("probability", &probs)?;
        row.end()
    }
}

/// Pattern classifier built from the ideal distributions of one scheme.
/// A pattern names a Bell state only when exactly one input can produce it
/// with probability above the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationTable {
    scheme: &'static str,
    tolerance: f64,
    mode_order: Vec<String>,
    rows: BTreeMap<FockState, TableRow>,
    #[serde(skip)]
    kind: SchemeKind,
}

pub fn build_classifier(scheme: SchemeKind, tolerance: f64) -> ClassificationTable {
    let dists = ideal_distributions(scheme);
    let mut rows: BTreeMap<FockState, TableRow> = BTreeMap::new();
    for (&kind, dist) in &dists {
        for (pattern, &p) in dist {
            rows.entry(pattern.clone())
                .or_insert_with(|| TableRow {
                    label: Label::Ambiguous,
                    probability: BellKind::ALL.iter().map(|&k| (k, 0.0)).collect(),
                })
                .probability
                .insert(kind, p);
        }
    }
    for row in rows.values_mut() {
        let mut above = row.probability.iter().filter(|(_, &p)| p > tolerance);
        row.label = match (above.next(), above.next()) {
            (Some((&kind, _)), None) => Label::Bell(kind),
            _ => Label::Ambiguous,
        };
    }
    ClassificationTable {
        scheme: scheme.token(),
        tolerance,
        mode_order: scheme.detection_labels().iter().map(|s| s.to_string()).collect(),
        rows,
        kind: scheme,
    }
}

impl ClassificationTable {
    pub fn scheme(&self) -> SchemeKind {
        self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn rows(&self) -> &BTreeMap<FockState, TableRow> {
        &self.rows
    }

    /// Verdict for a detection pattern. Patterns outside the table are
    /// ambiguous; a pattern of the wrong width is an error.
    pub fn classify(&self, pattern: &FockState) -> Result<Label> {
        let want = self.kind.detection_modes().len();
        if pattern.len() != want {
            return Err(Error::DimensionMismatch { got: pattern.len(), want });
        }
        Ok(self.rows.get(pattern).map(|row| row.label).unwrap_or(Label::Ambiguous))
    }
}
