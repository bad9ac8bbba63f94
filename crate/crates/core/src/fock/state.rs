use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::registry::{ModeId, ModeRegistry, SpatialId};

/// Amplitudes with magnitude below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Allowed deviation of a state's squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Photon occupation numbers, one entry per registry mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState(Vec<u8>);

impl FockState {
    pub fn new(counts: Vec<u8>) -> Self {
        FockState(counts)
    }

    pub fn from_slice(counts: &[u8]) -> Self {
        FockState(counts.to_vec())
    }

    pub fn zeros(len: usize) -> Self {
        FockState(vec![0; len])
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, idx: usize) -> u8 {
        self.0[idx]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    /// Occupations of the listed slots, in the listed order.
    pub fn project(&self, indices: &[usize]) -> FockState {
        FockState(indices.iter().map(|&i| self.0[i]).collect())
    }

    pub(crate) fn with_replaced(&self, indices: &[usize], values: &[u8]) -> FockState {
        let mut counts = self.0.clone();
        for (&i, &v) in indices.iter().zip(values) {
            counts[i] = v;
        }
        FockState(counts)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

/// Lets maps keyed by FockState be queried with a bare occupation slice,
/// sparing an allocation; sound because Ord is exactly slice ordering.
impl std::borrow::Borrow<[u8]> for FockState {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl FromStr for FockState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::InvalidParameter(format!("bad occupation `{p}`")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(FockState(counts))
    }
}

impl Serialize for FockState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Probability per occupation pattern. Keys are ordered, so iteration and
/// serialization are deterministic.
pub type Distribution = BTreeMap<FockState, f64>;

/// Sparse superposition of occupation states over a fixed mode registry.
///
/// Invariant: every key has the registry's length, amplitudes below
/// [`PRUNE_THRESHOLD`] are absent, and the squared norm is 1 within
/// [`NORM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<FockState, Complex64>,
}

impl PureState {
    /// State with no photons in any mode.
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let n = registry.len();
        let mut terms = BTreeMap::new();
        terms.insert(FockState::zeros(n), Complex64::new(1.0, 0.0));
        PureState { registry, terms }
    }

    /// Single occupation pattern with amplitude 1.
    pub fn basis(registry: Arc<ModeRegistry>, counts: FockState) -> Result<Self> {
        if counts.len() != registry.len() {
            return Err(Error::DimensionMismatch { got: counts.len(), want: registry.len() });
        }
        let mut terms = BTreeMap::new();
        terms.insert(counts, Complex64::new(1.0, 0.0));
        Ok(PureState { registry, terms })
    }

    /// Builds a superposition from explicit terms. Duplicate keys accumulate.
    /// The result must already be normalized.
    pub fn from_terms<I>(registry: Arc<ModeRegistry>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockState, Complex64)>,
    {
        let mut map: BTreeMap<FockState, Complex64> = BTreeMap::new();
        for (state, amp) in terms {
            if state.len() != registry.len() {
                return Err(Error::DimensionMismatch { got: state.len(), want: registry.len() });
            }
            *map.entry(state).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, amp| amp.norm() >= PRUNE_THRESHOLD);
        if map.is_empty() {
            return Err(Error::EmptyState);
        }
        let norm_sqr: f64 = map.values().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr.sqrt()));
        }
        Ok(PureState { registry, terms: map })
    }

    /// Internal builder for outputs of norm-preserving operations.
    pub(crate) fn from_raw(
        registry: Arc<ModeRegistry>,
        mut terms: BTreeMap<FockState, Complex64>,
    ) -> Self {
        terms.retain(|_, amp| amp.norm() >= PRUNE_THRESHOLD);
        let state = PureState { registry, terms };
        debug_assert!(
            (state.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE,
            "norm drifted to {}",
            state.norm_sqr()
        );
        state
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn terms(&self) -> &BTreeMap<FockState, Complex64> {
        &self.terms
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Combines two states over disjoint registries into one over the
    /// concatenated registry. Occupations are concatenated, amplitudes
    /// multiplied.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut modes = self.registry.modes().to_vec();
        modes.extend_from_slice(other.registry.modes());
        let registry = ModeRegistry::new(modes)?;
        let mut terms = BTreeMap::new();
        for (sa, aa) in &self.terms {
            for (sb, ab) in &other.terms {
                let mut counts = sa.counts().to_vec();
                counts.extend_from_slice(sb.counts());
                terms.insert(FockState::new(counts), aa * ab);
            }
        }
        Ok(PureState::from_raw(registry, terms))
    }

    /// Relabels individual modes. `pairs` maps old ids to new ids; unlisted
    /// modes keep their ids. Occupations and amplitudes are untouched, so
    /// every probability is preserved exactly.
    pub fn route_modes(&self, pairs: &[(ModeId, ModeId)]) -> Result<PureState> {
        let mut modes = self.registry.modes().to_vec();
        for (from, to) in pairs {
            let idx = self.registry.require(from)?;
            modes[idx] = to.clone();
        }
        let registry = ModeRegistry::new(modes)?;
        Ok(PureState { registry, terms: self.terms.clone() })
    }

    /// Renames spatial paths, both polarizations at once.
    pub fn relabel(&self, renames: &[(SpatialId, SpatialId)]) -> Result<PureState> {
        let mut pairs = Vec::new();
        for mode in self.registry.modes() {
            if let Some((_, to)) = renames.iter().find(|(from, _)| *from == mode.spatial) {
                pairs.push((mode.clone(), ModeId { spatial: to.clone(), pol: mode.pol }));
            }
        }
        self.route_modes(&pairs)
    }

    /// Probability of each occupation pattern over the listed modes, in the
    /// listed order. Modes not listed are traced out by summing.
    pub fn probability_distribution(&self, subset: &[ModeId]) -> Result<Distribution> {
        let indices = subset
            .iter()
            .map(|m| self.registry.require(m))
            .collect::<Result<Vec<usize>>>()?;
        let mut dist = Distribution::new();
        for (state, amp) in &self.terms {
            let key = state.project(&indices);
            *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(dist)
    }
}

/// Statistical mixture of pure states. Weights are probabilities and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, PureState)>,
}

impl MixedState {
    pub fn pure(state: PureState) -> Self {
        MixedState { components: vec![(1.0, state)] }
    }

    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyState);
        }
        let registry = components[0].1.registry().clone();
        let mut sum = 0.0;
        for (w, state) in &components {
            if *w < 0.0 {
                return Err(Error::NegativeWeight(*w));
            }
            if state.registry() != &registry {
                return Err(Error::RegistryMismatch);
            }
            sum += w;
        }
        if (sum - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::BadWeights(sum));
        }
        let components = components.into_iter().filter(|(w, _)| *w > 0.0).collect();
        Ok(MixedState { components })
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        self.components[0].1.registry()
    }

    pub fn tensor(&self, other: &MixedState) -> Result<MixedState> {
        let mut components = Vec::new();
        for (wa, sa) in &self.components {
            for (wb, sb) in &other.components {
                components.push((wa * wb, sa.tensor(sb)?));
            }
        }
        Ok(MixedState { components })
    }

    pub fn relabel(&self, renames: &[(SpatialId, SpatialId)]) -> Result<MixedState> {
        self.map_components(|s| s.relabel(renames))
    }

    pub fn route_modes(&self, pairs: &[(ModeId, ModeId)]) -> Result<MixedState> {
        self.map_components(|s| s.route_modes(pairs))
    }

    /// Weighted sum of the component distributions.
    pub fn probability_distribution(&self, subset: &[ModeId]) -> Result<Distribution> {
        let mut dist = Distribution::new();
        for (w, state) in &self.components {
            for (key, p) in state.probability_distribution(subset)? {
                *dist.entry(key).or_insert(0.0) += w * p;
            }
        }
        Ok(dist)
    }

    pub(crate) fn map_components<F>(&self, mut f: F) -> Result<MixedState>
    where
        F: FnMut(&PureState) -> Result<PureState>,
    {
        let components = self
            .components
            .iter()
            .map(|(w, s)| Ok((*w, f(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixedState { components })
    }

    pub(crate) fn from_weighted(components: Vec<(f64, PureState)>) -> Self {
        let components: Vec<_> =
            components.into_iter().filter(|(w, _)| *w > PRUNE_THRESHOLD).collect();
        debug_assert!((components.iter().map(|(w, _)| w).sum::<f64>() - 1.0).abs() <= 1e-9);
        MixedState { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::registry::Polarization;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fock_state_round_trips_through_string() {
        let s = FockState::from_slice(&[0, 0, 2, 2, 0, 0]);
        assert_eq!(s.to_string(), "0,0,2,2,0,0");
        assert_eq!("0,0,2,2,0,0".parse::<FockState>().unwrap(), s);
        assert_eq!(s.total(), 4);
    }

    #[test]
    fn basis_state_gives_point_distribution() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let s = PureState::basis(reg.clone(), FockState::from_slice(&[1, 0])).unwrap();
        let dist = s.probability_distribution(reg.modes()).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[&FockState::from_slice(&[1, 0])], 1.0);
    }

    #[test]
    fn from_terms_accumulates_and_prunes() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let k1 = FockState::from_slice(&[1, 0]);
        let k2 = FockState::from_slice(&[0, 1]);
        let s = PureState::from_terms(
            reg,
            vec![
                (k1.clone(), c(0.5, 0.0)),
                (k1.clone(), c(0.5, 0.0)),
                (k2.clone(), c(0.0, 1e-16)),
            ],
        )
        .unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.amplitude(&k1), c(1.0, 0.0));
    }

    #[test]
    fn from_terms_rejects_bad_norm_and_length() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let err = PureState::from_terms(
            reg.clone(),
            vec![(FockState::from_slice(&[1, 0]), c(0.5, 0.0))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
        let err =
            PureState::from_terms(reg, vec![(FockState::from_slice(&[1]), c(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn tensor_with_vacuum_keeps_amplitudes() {
        let reg_a = ModeRegistry::polarized(["a"]).unwrap();
        let reg_b = ModeRegistry::polarized(["b"]).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let s = PureState::from_terms(
            reg_a,
            vec![
                (FockState::from_slice(&[1, 0]), c(inv, 0.0)),
                (FockState::from_slice(&[0, 1]), c(0.0, inv)),
            ],
        )
        .unwrap();
        let joined = s.tensor(&PureState::vacuum(reg_b)).unwrap();
        assert_eq!(joined.registry().len(), 4);
        assert_eq!(joined.amplitude(&FockState::from_slice(&[1, 0, 0, 0])), c(inv, 0.0));
        assert_eq!(joined.amplitude(&FockState::from_slice(&[0, 1, 0, 0])), c(0.0, inv));
    }

    #[test]
    fn tensor_rejects_colliding_registries() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let s = PureState::vacuum(reg.clone());
        let t = PureState::vacuum(reg);
        assert!(matches!(s.tensor(&t), Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn relabel_preserves_occupations() {
        let reg = ModeRegistry::polarized(["a", "b"]).unwrap();
        let s = PureState::basis(reg, FockState::from_slice(&[1, 0, 0, 1])).unwrap();
        let renamed = s.relabel(&[("a".into(), "c".into()), ("b".into(), "d".into())]).unwrap();
        let labels: Vec<String> =
            renamed.registry().modes().iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, ["cH", "cV", "dH", "dV"]);
        assert_eq!(renamed.amplitude(&FockState::from_slice(&[1, 0, 0, 1])), c(1.0, 0.0));
    }

    #[test]
    fn route_rejects_collisions_and_unknown_modes() {
        let reg = ModeRegistry::polarized(["a", "b"]).unwrap();
        let s = PureState::vacuum(reg);
        let to_existing = (
            ModeId::new("a", Polarization::H),
            ModeId::new("b", Polarization::H),
        );
        assert!(matches!(s.route_modes(&[to_existing]), Err(Error::DuplicateMode(_))));
        let from_missing = (
            ModeId::new("x", Polarization::H),
            ModeId::new("y", Polarization::H),
        );
        assert!(matches!(s.route_modes(&[from_missing]), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn distribution_marginalizes_unlisted_modes() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let s = PureState::from_terms(
            reg.clone(),
            vec![
                (FockState::from_slice(&[1, 0]), c(inv, 0.0)),
                (FockState::from_slice(&[1, 1]), c(inv, 0.0)),
            ],
        )
        .unwrap();
        let dist = s.probability_distribution(&[ModeId::new("a", Polarization::H)]).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist[&FockState::from_slice(&[1])] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_weights_validated() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let s = PureState::vacuum(reg);
        assert!(MixedState::new(vec![(0.5, s.clone()), (0.4, s.clone())]).is_err());
        assert!(MixedState::new(vec![(1.5, s.clone()), (-0.5, s.clone())]).is_err());
        let ok = MixedState::new(vec![(0.25, s.clone()), (0.75, s)]).unwrap();
        assert_eq!(ok.components().len(), 2);
    }

    #[test]
    fn mixed_distribution_is_weighted_sum() {
        let reg = ModeRegistry::polarized(["a"]).unwrap();
        let h = PureState::basis(reg.clone(), FockState::from_slice(&[1, 0])).unwrap();
        let v = PureState::basis(reg.clone(), FockState::from_slice(&[0, 1])).unwrap();
        let mix = MixedState::new(vec![(0.25, h), (0.75, v)]).unwrap();
        let dist = mix.probability_distribution(reg.modes()).unwrap();
        assert_eq!(dist[&FockState::from_slice(&[1, 0])], 0.25);
        assert_eq!(dist[&FockState::from_slice(&[0, 1])], 0.75);
    }
}
