//! Pure states of the vibronic system.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{sector_basis, Qubit, SpaceDescriptor};
use crate::C64;

/// Normalized amplitude vector over a [`SpaceDescriptor`] basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Normalizes `amplitudes` onto `space`.
    pub fn from_amplitudes(space: SpaceDescriptor, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            space,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Wraps amplitudes produced by a norm-preserving map without touching
    /// them.
    pub(crate) fn from_unitary_image(space: SpaceDescriptor, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        StateVector { space, amplitudes }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn amplitude(&self, n_x: usize, n_y: usize, s: Qubit) -> Result<C64> {
        Ok(self.amplitudes[self.space.index(n_x, n_y, s)?])
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Equality up to a global phase: `|⟨self|other⟩|` within `tol` of 1.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> bool {
        self.space == other.space && (self.overlap(other).norm() - 1.0).abs() <= tol
    }

    /// Total population on one electronic level.
    pub fn qubit_weight(&self, s: Qubit) -> f64 {
        self.amplitudes
            .iter()
            .skip(s.bit())
            .step_by(2)
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Phonon amplitudes of the cell `(n_x, n_y)` summed in quadrature over
    /// the qubit, i.e. the vibrational marginal.
    pub fn phonon_marginal(&self) -> Vec<f64> {
        self.amplitudes
            .as_slice()
            .chunks(2)
            .map(|pair| pair[0].norm_sqr() + pair[1].norm_sqr())
            .collect()
    }
}

pub fn fock_state(space: SpaceDescriptor, n_x: usize, n_y: usize, s: Qubit) -> Result<StateVector> {
    let index = space.index(n_x, n_y, s)?;
    let mut amplitudes = DVector::zeros(space.dim());
    amplitudes[index] = C64::new(1.0, 0.0);
    Ok(StateVector { space, amplitudes })
}

/// Binomial superposition `Σ_k 2^{−N/2} √C(N,k) |k, N−k⟩|−⟩`: the Fock state
/// with `N` quanta in the bisector mode `(a_x + a_y)/√2`.
pub fn su2_coherent(space: SpaceDescriptor, n: usize) -> Result<StateVector> {
    if n > space.n_max_x() || n > space.n_max_y() {
        return Err(Error::OccupationOutOfRange {
            n_x: n,
            n_y: n,
            n_max_x: space.n_max_x(),
            n_max_y: space.n_max_y(),
        });
    }
    let mut amplitudes = DVector::zeros(space.dim());
    let mut a = 0.5f64.powf(n as f64 / 2.0);
    for k in 0..=n {
        amplitudes[space.index_of(k, n - k, Qubit::Ground)] = C64::new(a, 0.0);
        a *= ((n - k) as f64 / (k + 1) as f64).sqrt();
    }
    StateVector::from_amplitudes(space, amplitudes)
}

/// Electronic state paired with a vibrational state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitReference {
    Ground,
    Excited,
    /// `(|+⟩ − i|−⟩)/√2`, the `σ_y = −1` eigenvector.
    MinusY,
}

/// Replaces the electronic part of `psi_vibr` (a state on the ground slice)
/// with `which`.
pub fn qubit_reference(psi_vibr: &StateVector, which: QubitReference) -> Result<StateVector> {
    let excited = psi_vibr.qubit_weight(Qubit::Excited);
    if excited > 1e-12 {
        return Err(Error::NotGroundProduct(excited));
    }
    let (g, e) = match which {
        QubitReference::Ground => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        QubitReference::Excited => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        QubitReference::MinusY => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            (C64::new(0.0, -r), C64::new(r, 0.0))
        }
    };
    let src = psi_vibr.amplitudes();
    let mut amplitudes = DVector::zeros(src.len());
    for cell in 0..src.len() / 2 {
        let phonon = src[2 * cell];
        amplitudes[2 * cell] = phonon * g;
        amplitudes[2 * cell + 1] = phonon * e;
    }
    StateVector::from_amplitudes(psi_vibr.space(), amplitudes)
}

/// Random normalized state on the ground slice, supported on the listed
/// total-phonon sectors. Amplitudes have real and imaginary parts drawn
/// uniformly from `[−1, 1)`.
pub fn random_sector_state<R: Rng + ?Sized>(
    space: SpaceDescriptor,
    sectors: &[usize],
    rng: &mut R,
) -> Result<StateVector> {
    if sectors.is_empty() {
        return Err(invalid("sectors", "at least one sector is required"));
    }
    let mut amplitudes = DVector::zeros(space.dim());
    for &n in sectors {
        for i in sector_basis(space, n, Qubit::Ground)? {
            amplitudes[i] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    StateVector::from_amplitudes(space, amplitudes)
}
