//! Interaction-picture Hamiltonians and exact time evolution.
//!
//! The free trap and atomic Hamiltonian is never applied. Both couplings
//! used here are resonant interaction-picture terms, and with `ω_x = ω_y`
//! the free xy evolution commutes with `C_xy` and with the phonon number,
//! so every reported expectation is frame-independent.
//!
//! Evolution uses the spectral propagator `exp(−iHt) = V·exp(−iΛt)·V†`. A
//! [`Propagator`] diagonalizes once and is reused across a time grid.
//! Degenerate eigenvalues need no special treatment.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{HermitianOperator, Operator, Qubit, SpaceDescriptor};
use crate::spectral::SpectralDecomposition;
use crate::states::StateVector;
use crate::C64;

/// Sample times for a scan, strictly increasing and nonnegative. Scans use
/// dimensionless time (`gt`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `points` uniform samples on `(0, t_max]`: `t_i = t_max·i/points`.
    pub fn uniform(t_max: f64, points: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid(
                "t_max",
                format!("must be positive and finite, got {t_max}"),
            ));
        }
        if points == 0 {
            return Err(invalid("points", "must be at least 1"));
        }
        Ok(TimeGrid {
            times: (1..=points)
                .map(|i| t_max * i as f64 / points as f64)
                .collect(),
        })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("times", "grid is empty"));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("times", "times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "times must be strictly increasing"));
        }
        Ok(TimeGrid { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        TimeGrid::from_times(times)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Self {
        grid.times
    }
}

/// Parameters of a parity scenario.
///
/// `g` and `gamma` are in rad/s; the grid is dimensionless `gt`. The trap
/// and atomic frequencies are carried for the record only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    pub g: f64,
    pub gamma: f64,
    pub grid: TimeGrid,
    /// Phonon cutoffs `(n_max_x, n_max_y)`; `None` means `(N, N)`.
    pub cutoffs: Option<(usize, usize)>,
    /// Samples whose ground-outcome probability falls below this are flagged.
    pub ground_threshold: f64,
    /// Refine located extrema by a bracketed search between grid neighbours.
    pub refine: bool,
    pub omega_xy: Option<f64>,
    pub omega_z: Option<f64>,
    pub omega_a: Option<f64>,
}

impl ScenarioConfig {
    pub fn new(n: usize) -> Self {
        ScenarioConfig {
            n,
            g: 1.0,
            gamma: 1e4,
            grid: TimeGrid::uniform(3.0, 3000).expect("default grid is valid"),
            cutoffs: None,
            ground_threshold: 1e-6,
            refine: false,
            omega_xy: None,
            omega_z: None,
            omega_a: None,
        }
    }

    pub fn space(&self) -> SpaceDescriptor {
        let (x, y) = self.cutoffs.unwrap_or((self.n, self.n));
        SpaceDescriptor::new(x, y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(invalid("g", format!("must be positive, got {}", self.g)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid(
                "gamma",
                format!("must be positive, got {}", self.gamma),
            ));
        }
        TimeGrid::from_times(self.grid.times.clone())?;
        let space = self.space();
        if self.n > space.n_max_x() || self.n > space.n_max_y() {
            return Err(invalid(
                "cutoffs",
                format!("both cutoffs must be at least N = {}", self.n),
            ));
        }
        if !(self.ground_threshold >= 0.0 && self.ground_threshold < 1.0) {
            return Err(invalid("ground_threshold", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

/// Two-mode two-phonon Jaynes-Cummings coupling `g(a_x a_y σ_+ + h.c.)`.
pub fn jcm_hamiltonian(space: SpaceDescriptor, g: f64) -> Result<HermitianOperator> {
    positive("g", g)?;
    let mut m = nalgebra::DMatrix::<C64>::zeros(space.dim(), space.dim());
    for n_x in 1..=space.n_max_x() {
        for n_y in 1..=space.n_max_y() {
            let from = space.index_of(n_x, n_y, Qubit::Ground);
            let to = space.index_of(n_x - 1, n_y - 1, Qubit::Excited);
            let element = C64::new(g * ((n_x * n_y) as f64).sqrt(), 0.0);
            m[(to, from)] = element;
            m[(from, to)] = element;
        }
    }
    Ok(HermitianOperator::trusted(space, m, "H_jcm"))
}

/// Probe coupling `γ·O⊗σ_x` for a vibrational observable `O`.
pub fn probe_hamiltonian(obs: &HermitianOperator, gamma: f64) -> Result<HermitianOperator> {
    positive("gamma", gamma)?;
    if !obs.is_qubit_trivial() {
        return Err(Error::NotQubitTrivial(obs.label().to_string()));
    }
    let space = obs.space();
    let src = obs.matrix();
    let cells = space.mode_cells();
    let mut m = nalgebra::DMatrix::<C64>::zeros(space.dim(), space.dim());
    for b in 0..cells {
        for a in 0..cells {
            let o = src[(2 * a, 2 * b)];
            if o == C64::new(0.0, 0.0) {
                continue;
            }
            m[(2 * a + 1, 2 * b)] = o * gamma;
            m[(2 * a, 2 * b + 1)] = o * gamma;
        }
    }
    Ok(HermitianOperator::trusted(
        space,
        m,
        format!("γ·{}⊗σ_x", obs.label()),
    ))
}

/// Diagonalized Hamiltonian, reusable over many times and initial states.
#[derive(Clone, Debug)]
pub struct Propagator {
    space: SpaceDescriptor,
    spectrum: SpectralDecomposition,
}

impl Propagator {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        Ok(Propagator {
            space: h.space(),
            spectrum: h.decompose()?,
        })
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `exp(−iHt)·ψ0`.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        if psi0.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: psi0.dim(),
            });
        }
        if t == 0.0 {
            return Ok(psi0.clone());
        }
        let out = self.spectrum.propagate(psi0.amplitudes(), t);
        Ok(StateVector::from_unitary_image(self.space, out))
    }
}

/// One-shot `exp(−iHt)·ψ0`. Use [`Propagator`] when sweeping times.
pub fn evolve(h: &HermitianOperator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// Closed-form JCM evolution of a state in the ground-qubit sector `N`.
///
/// Each `|k, N−k, −⟩` pairs only with `|k−1, N−k−1, +⟩` at Rabi frequency
/// `Ω_k = g·√(k(N−k))`, so
/// `ψ(t) = Σ_k c_k [cos(Ω_k t)|k,N−k,−⟩ − i sin(Ω_k t)|k−1,N−k−1,+⟩]`.
/// `amplitudes[k]` is `c_k`.
pub fn analytic_jcm_state(
    space: SpaceDescriptor,
    n: usize,
    g: f64,
    t: f64,
    amplitudes: &[C64],
) -> Result<StateVector> {
    positive("g", g)?;
    if n > space.n_max_x() || n > space.n_max_y() {
        return Err(Error::OccupationOutOfRange {
            n_x: n,
            n_y: n,
            n_max_x: space.n_max_x(),
            n_max_y: space.n_max_y(),
        });
    }
    if amplitudes.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: amplitudes.len(),
        });
    }
    let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let mut out = DVector::<C64>::zeros(space.dim());
    for (k, &c) in amplitudes.iter().enumerate() {
        let omega = g * ((k * (n - k)) as f64).sqrt();
        let (sin, cos) = (omega * t).sin_cos();
        out[space.index_of(k, n - k, Qubit::Ground)] += c * cos;
        if k >= 1 && n - k >= 1 {
            out[space.index_of(k - 1, n - k - 1, Qubit::Excited)] += c * C64::new(0.0, -sin);
        }
    }
    Ok(StateVector::from_unitary_image(space, out))
}

/// `Λ = n_x + n_y + 2·[excited]`, conserved by the JCM coupling.
pub fn excitation_number(space: SpaceDescriptor) -> HermitianOperator {
    let mut m = nalgebra::DMatrix::<C64>::zeros(space.dim(), space.dim());
    for (i, (n_x, n_y, s)) in space.basis().enumerate() {
        m[(i, i)] = C64::new((n_x + n_y + 2 * s.bit()) as f64, 0.0);
    }
    Operator::from_matrix(space, m, "Λ")
        .and_then(Operator::into_hermitian)
        .expect("diagonal real matrix is Hermitian")
}

/// Population on basis states touching a phonon cutoff.
pub fn top_layer_population(psi: &StateVector) -> f64 {
    let space = psi.space();
    space
        .basis()
        .zip(psi.amplitudes().iter())
        .filter(|((n_x, n_y, _), _)| *n_x == space.n_max_x() || *n_y == space.n_max_y())
        .map(|(_, a)| a.norm_sqr())
        .sum()
}
