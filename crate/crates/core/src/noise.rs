//! Visibility-based imperfection model. Each visibility parameter `v` drives
//! a dephasing channel rho -> v rho + (1 - v) diag(rho), with the diagonal
//! taken in the basis whose measured correlation the parameter controls.
//! Dephasing in the H/V occupation basis lowers the +/- correlation to `v`
//! and leaves the H/V correlation alone; dephasing in the rotated (+/-)
//! basis does the opposite. The two channels commute on Bell inputs, so the
//! simulated two-basis visibilities reproduce the configured numbers exactly.

use std::f64::consts::FRAC_PI_8;

use serde::{Deserialize, Serialize};

use crate::elements::{waveplate, WaveplateSpec};
use crate::error::{Error, Result};
use crate::fock::{Distribution, MixedState, PureState};
use crate::schemes::{make_aux, make_bell, run_enhanced, run_standard, BellKind, SchemeKind};

/// Interference visibilities. `v_bell_hv` and `v_bell_pm` are the Bell-pair
/// correlation visibilities measured in the H/V and +/- bases; `v_aux_hv`
/// controls the coherence of the auxiliary photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub v_bell_hv: f64,
    pub v_bell_pm: f64,
    pub v_aux_hv: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { v_bell_hv: 0.975, v_bell_pm: 0.954, v_aux_hv: 0.9899 }
    }
}

impl NoiseConfig {
    /// No degradation at all.
    pub const IDEAL: NoiseConfig = NoiseConfig { v_bell_hv: 1.0, v_bell_pm: 1.0, v_aux_hv: 1.0 };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_bell_hv", self.v_bell_hv),
            ("v_bell_pm", self.v_bell_pm),
            ("v_aux_hv", self.v_aux_hv),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.v_bell_hv == 1.0 && self.v_bell_pm == 1.0 && self.v_aux_hv == 1.0
    }
}

/// Keeps the state with weight `v`; with weight `1 - v` projects onto the
/// occupation basis, killing every off-diagonal coherence.
fn dephase(state: &MixedState, v: f64) -> MixedState {
    if v == 1.0 {
        return state.clone();
    }
    let mut components = Vec::new();
    for (w, pure) in state.components() {
        if v > 0.0 {
            components.push((w * v, pure.clone()));
        }
        for (key, amp) in pure.terms() {
            let basis = PureState::basis(pure.registry().clone(), key.clone())
                .expect("key length matches registry");
            components.push((w * (1.0 - v) * amp.norm_sqr(), basis));
        }
    }
    MixedState::from_weighted(components)
}

/// Applies the half-wave-plate rotation that exchanges the H/V and +/- bases
/// on both Bell-pair paths. Self-inverse.
fn rotate_pm(state: &MixedState) -> MixedState {
    let s = state.apply(&waveplate("a", WaveplateSpec::half(FRAC_PI_8))).expect("path a exists");
    s.apply(&waveplate("b", WaveplateSpec::half(FRAC_PI_8))).expect("path b exists")
}

/// Dephases a Bell pair in its occupation basis, lowering the +/- visibility
/// to `v` while leaving the H/V visibility at 1.
pub fn dephase_bell(kind: BellKind, v: f64) -> MixedState {
    dephase(&MixedState::pure(make_bell(kind)), v)
}

/// Dephases the auxiliary pair, mixing in the incoherent half-half blend of
/// |2H> and |2V>.
pub fn dephase_aux(v: f64) -> MixedState {
    dephase(&MixedState::pure(make_aux()), v)
}

/// Bell pair with both measured visibilities degraded: the H/V correlation
/// becomes `v_bell_hv` (via dephasing in the rotated basis) and the +/-
/// correlation becomes `v_bell_pm` (via dephasing in the occupation basis).
pub fn noisy_bell(kind: BellKind, cfg: &NoiseConfig) -> MixedState {
    let s = MixedState::pure(make_bell(kind));
    let s = rotate_pm(&dephase(&rotate_pm(&s), cfg.v_bell_hv));
    dephase(&s, cfg.v_bell_pm)
}

/// Auxiliary pair with its coherence reduced to `v_aux_hv`.
pub fn noisy_aux(cfg: &NoiseConfig) -> MixedState {
    dephase_aux(cfg.v_aux_hv)
}

/// Detection distribution of a scheme fed with degraded inputs.
pub fn noisy_distribution(scheme: SchemeKind, kind: BellKind, cfg: &NoiseConfig) -> Result<Distribution> {
    cfg.validate()?;
    let bell = noisy_bell(kind, cfg);
    match scheme {
        SchemeKind::Standard => run_standard(&bell),
        SchemeKind::Enhanced => run_enhanced(&bell, &noisy_aux(cfg)),
    }
}
