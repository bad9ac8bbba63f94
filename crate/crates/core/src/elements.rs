//! Linear optical elements: balanced beam splitter, waveplates and the
//! polarizing splitter that fans a dual-polarization path out onto two
//! single-polarization paths.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{MixedState, ModeId, ModeUnitary, Polarization, PureState, SpatialId};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn pol_modes(spatial: &SpatialId) -> [ModeId; 2] {
    [
        ModeId { spatial: spatial.clone(), pol: Polarization::H },
        ModeId { spatial: spatial.clone(), pol: Polarization::V },
    ]
}

/// Balanced polarization-preserving beam splitter on two spatial paths,
/// in the symmetric convention: transmitted amplitude 1/sqrt(2), reflected
/// amplitude i/sqrt(2).
pub fn balanced_bs(in1: impl Into<SpatialId>, in2: impl Into<SpatialId>) -> ModeUnitary {
    let in1 = in1.into();
    let in2 = in2.into();
    let [h1, v1] = pol_modes(&in1);
    let [h2, v2] = pol_modes(&in2);
    let t = Complex64::new(INV_SQRT2, 0.0);
    let r = Complex64::new(0.0, INV_SQRT2);
    let o = Complex64::new(0.0, 0.0);
    let matrix = Array2::from_shape_vec(
        (4, 4),
        vec![
            t, o, r, o, //
            o, t, o, r, //
            r, o, t, o, //
            o, r, o, t,
        ],
    )
    .expect("shape is 4x4");
    ModeUnitary::new(vec![h1, v1, h2, v2], matrix).expect("balanced splitter is unitary")
}

/// Retarder kind: half-wave (phase pi) or quarter-wave (phase pi/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

/// A waveplate with its fast axis at `angle` radians from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSpec {
    pub kind: WaveplateKind,
    pub angle: f64,
}

impl WaveplateSpec {
    pub fn half(angle: f64) -> Self {
        WaveplateSpec { kind: WaveplateKind::Half, angle }
    }

    pub fn quarter(angle: f64) -> Self {
        WaveplateSpec { kind: WaveplateKind::Quarter, angle }
    }
}

/// Jones matrix R(theta) diag(1, e^{i delta}) R(-theta) acting on the H and V
/// modes of one spatial path. The retardance phase is exact (-1 or i), so
/// special angles produce exact matrix entries.
pub fn waveplate(spatial: impl Into<SpatialId>, spec: WaveplateSpec) -> ModeUnitary {
    let spatial = spatial.into();
    let [h, v] = pol_modes(&spatial);
    let phase = match spec.kind {
        WaveplateKind::Half => Complex64::new(-1.0, 0.0),
        WaveplateKind::Quarter => Complex64::new(0.0, 1.0),
    };
    let (sin, cos) = spec.angle.sin_cos();
    let (c2, s2, cs) = (cos * cos, sin * sin, cos * sin);
    let one = Complex64::new(1.0, 0.0);
    let matrix = Array2::from_shape_vec(
        (2, 2),
        vec![
            one * c2 + phase * s2,
            (one - phase) * cs,
            (one - phase) * cs,
            one * s2 + phase * c2,
        ],
    )
    .expect("shape is 2x2");
    ModeUnitary::new(vec![h, v], matrix).expect("waveplate is unitary")
}

/// Polarizing splitter: sends the H component of `input` to path `out_h` and
/// the V component to path `out_v`. A pure relabeling, so amplitudes and all
/// probabilities are preserved exactly.
#[derive(Debug, Clone)]
pub struct PbsSplit {
    input: SpatialId,
    out_h: SpatialId,
    out_v: SpatialId,
}

pub fn pbs_split(
    input: impl Into<SpatialId>,
    out_h: impl Into<SpatialId>,
    out_v: impl Into<SpatialId>,
) -> PbsSplit {
    PbsSplit { input: input.into(), out_h: out_h.into(), out_v: out_v.into() }
}

impl PbsSplit {
    fn routing(&self) -> [(ModeId, ModeId); 2] {
        [
            (
                ModeId { spatial: self.input.clone(), pol: Polarization::H },
                ModeId { spatial: self.out_h.clone(), pol: Polarization::H },
            ),
            (
                ModeId { spatial: self.input.clone(), pol: Polarization::V },
                ModeId { spatial: self.out_v.clone(), pol: Polarization::V },
            ),
        ]
    }

    /// Errors if the input path is absent or an output id collides with an
    /// existing mode.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        state.route_modes(&self.routing())
    }

    pub fn apply_mixed(&self, state: &MixedState) -> Result<MixedState> {
        state.route_modes(&self.routing())
    }
}
