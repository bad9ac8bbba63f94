use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::registry::ModeId;
use crate::fock::state::{FockState, MixedState, PureState};

/// Allowed deviation of U†U from the identity, per entry.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Exact factorial for the photon numbers this crate handles.
pub(crate) fn factorial(n: u8) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// A unitary acting on a subset of modes. Column `i` holds the coefficients
/// the `i`-th target's creation operator picks up on each target output mode;
/// untargeted modes pass through unchanged.
#[derive(Debug, Clone)]
pub struct ModeUnitary {
    targets: Vec<ModeId>,
    matrix: Array2<Complex64>,
}

impl ModeUnitary {
    pub fn new(targets: Vec<ModeId>, matrix: Array2<Complex64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidParameter("unitary needs at least one target".into()));
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateMode(t.to_string()));
            }
        }
        let (rows, cols) = matrix.dim();
        if rows != targets.len() || cols != targets.len() {
            return Err(Error::BadMatrixShape { rows, cols, want: targets.len() });
        }
        let adjoint = matrix.t().mapv(|z| z.conj());
        let product = adjoint.dot(&matrix);
        let mut worst = 0.0f64;
        for ((i, j), z) in product.indexed_iter() {
            let expect = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((z - expect).norm());
        }
        if worst > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(worst));
        }
        Ok(ModeUnitary { targets, matrix })
    }

    pub fn targets(&self) -> &[ModeId] {
        &self.targets
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// The unitary equal to applying `self` first, then `next`. Both must act
    /// on the same targets in the same order.
    pub fn then(&self, next: &ModeUnitary) -> Result<ModeUnitary> {
        if self.targets != next.targets {
            return Err(Error::InvalidParameter("composed unitaries target different modes".into()));
        }
        ModeUnitary::new(self.targets.clone(), next.matrix.dot(&self.matrix))
    }
}

impl PureState {
    /// Transforms the state by substituting each targeted creation operator
    /// with the matrix-weighted combination of output operators, expanding
    /// photon by photon. Photon number and norm are preserved.
    pub fn apply(&self, u: &ModeUnitary) -> Result<PureState> {
        let indices = u
            .targets()
            .iter()
            .map(|m| self.registry().require(m))
            .collect::<Result<Vec<usize>>>()?;
        let width = indices.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut out: BTreeMap<FockState, Complex64> = BTreeMap::new();
        for (state, amp) in self.terms() {
            let input: Vec<u8> = indices.iter().map(|&i| state.get(i)).collect();
            let mut poly: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            poly.insert(vec![0u8; width], Complex64::new(1.0, 0.0));
            for (col, &occupancy) in input.iter().enumerate() {
                for _ in 0..occupancy {
                    let mut next: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
                    for (mono, coeff) in &poly {
                        for row in 0..width {
                            let entry = u.matrix()[(row, col)];
                            if entry == zero {
                                continue;
                            }
                            let mut grown = mono.clone();
                            grown[row] += 1;
                            *next.entry(grown).or_insert(zero) += coeff * entry;
                        }
                    }
                    poly = next;
                }
            }
            let in_fact: f64 = input.iter().map(|&n| factorial(n)).product();
            for (mono, coeff) in poly {
                let out_fact: f64 = mono.iter().map(|&n| factorial(n)).product();
                let scaled = amp * coeff * (out_fact / in_fact).sqrt();
                let key = state.with_replaced(&indices, &mono);
                *out.entry(key).or_insert(zero) += scaled;
            }
        }
        Ok(PureState::from_raw(self.registry().clone(), out))
    }
}

impl MixedState {
    pub fn apply(&self, u: &ModeUnitary) -> Result<MixedState> {
        self.map_components(|s| s.apply(u))
    }
}
