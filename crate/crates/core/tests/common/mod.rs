//! Shared test helpers: an independent permanent-based route to multi-photon
//! transition amplitudes, plus random unitary generation.

use std::collections::BTreeMap;

use itertools::Itertools;
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type AmpMap = BTreeMap<Vec<u8>, Complex64>;

fn factorial(n: u8) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// Permanent by direct permutation expansion. Fine for the photon numbers
/// used in tests (at most 5).
pub fn permanent(m: &Array2<Complex64>) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    (0..n)
        .permutations(n)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(col, &row)| m[(row, col)])
                .product::<Complex64>()
        })
        .sum()
}

/// Amplitude <output| T(u) |input> via the permanent of the matrix built by
/// repeating column i input[i] times and row j output[j] times, divided by
/// sqrt of the occupation factorials. An entirely different evaluation order
/// than the production code's photon-by-photon polynomial expansion.
pub fn transition_amplitude(u: &Array2<Complex64>, input: &[u8], output: &[u8]) -> Complex64 {
    let photons: u32 = input.iter().map(|&n| n as u32).sum();
    let out_photons: u32 = output.iter().map(|&n| n as u32).sum();
    if photons != out_photons {
        return Complex64::new(0.0, 0.0);
    }
    let cols: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
        .collect();
    let rows: Vec<usize> = output
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n as usize))
        .collect();
    let n = cols.len();
    let mut m = Array2::zeros((n, n));
    for (r, &row) in rows.iter().enumerate() {
        for (c, &col) in cols.iter().enumerate() {
            m[(r, c)] = u[(row, col)];
        }
    }
    let norm: f64 = input
        .iter()
        .chain(output.iter())
        .map(|&n| factorial(n))
        .product::<f64>()
        .sqrt();
    permanent(&m) / norm
}

/// All occupation vectors of the given length summing to `total`.
pub fn compositions(length: usize, total: u8) -> Vec<Vec<u8>> {
    if length == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(length - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Applies `u` (acting on every slot) to a superposition given as an
/// amplitude map, using the permanent route for every transition.
pub fn oracle_apply(u: &Array2<Complex64>, input: &AmpMap) -> AmpMap {
    let mut out = AmpMap::new();
    for (occ, amp) in input {
        let total: u32 = occ.iter().map(|&n| n as u32).sum();
        for target in compositions(occ.len(), total as u8) {
            let t = transition_amplitude(u, occ, &target);
            if t.norm() > 0.0 {
                *out.entry(target).or_insert(Complex64::new(0.0, 0.0)) += amp * t;
            }
        }
    }
    out.retain(|_, a| a.norm() > 1e-14);
    out
}

/// Probability of each pattern over the listed slot positions.
pub fn oracle_distribution(state: &AmpMap, positions: &[usize]) -> BTreeMap<Vec<u8>, f64> {
    let mut dist = BTreeMap::new();
    for (occ, amp) in state {
        let key: Vec<u8> = positions.iter().map(|&i| occ[i]).collect();
        *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    dist
}

/// Embeds a small matrix at the given slot positions of a larger identity.
pub fn embed(small: &Array2<Complex64>, positions: &[usize], dim: usize) -> Array2<Complex64> {
    let mut big = Array2::eye(dim);
    for (r, &row) in positions.iter().enumerate() {
        for (c, &col) in positions.iter().enumerate() {
            big[(row, col)] = small[(r, c)];
        }
    }
    big
}

/// Haar-ish random unitary: complex entries orthonormalized column by column.
pub fn random_unitary(dim: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: Array2<Complex64> = Array2::from_shape_fn((dim, dim), |_| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    for col in 0..dim {
        for prev in 0..col {
            let overlap: Complex64 =
                (0..dim).map(|r| m[(r, prev)].conj() * m[(r, col)]).sum();
            for r in 0..dim {
                let sub = overlap * m[(r, prev)];
                m[(r, col)] -= sub;
            }
        }
        let norm: f64 = (0..dim).map(|r| m[(r, col)].norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-6, "degenerate random matrix");
        for r in 0..dim {
            m[(r, col)] /= norm;
        }
    }
    m
}
