//! Exact simulation of a two-level trapped ion coupled to its x and y
//! vibrational modes.
//!
//! The crate covers three pieces of physics:
//!
//! * the two-mode two-phonon Jaynes-Cummings interaction and the even/odd
//!   discrimination visible in the conditioned mean of the mode correlation
//!   operator `C = a_x† a_y + a_x a_y†` ([`measurement::parity_scan`]);
//! * the direct mean-value protocol in which a probe coupling `γ·O⊗σ_x`
//!   maps `⟨O⟩` onto the electronic inversion ([`probe`]);
//! * the truncated Fock space, operators and states both rely on
//!   ([`hilbert`], [`states`]).
//!
//! All dynamics run in the interaction picture with `ħ = 1`, so Hamiltonians
//! are expressed in rad/s (or in units of the coupling when time is
//! dimensionless).

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod probe;
pub mod spectral;
pub mod states;

pub use num_complex::Complex64 as C64;

pub use dynamics::{
    analytic_jcm_state, evolve, jcm_hamiltonian, probe_hamiltonian, Propagator, ScenarioConfig,
    TimeGrid,
};
pub use error::{Error, Result};
pub use hilbert::{
    build_space, correlation_operator, identity, ladder, observable, pauli, restrict, sector_basis,
    Axis, HermitianOperator, LadderKind, Mode, ObservableKind, Operator, Qubit, SpaceDescriptor,
};
pub use measurement::{
    conditional_collapse, expectation, parity_scan, Extremum, Sample, TimeSeries,
};
pub use probe::{
    choose_probe_time, end_to_end, estimate_mean, linearization_bound, rotate_electronic,
    run_direct_measurement, sigma_z_readout, spectral_sine_expectation, EndToEndRecord,
    MeasurementReport, ProbeConfig, ProbeTime,
};
pub use spectral::SpectralDecomposition;
pub use states::{fock_state, qubit_reference, su2_coherent, QubitReference, StateVector};

/// Elementwise tolerance for the Hermiticity check on observables and
/// Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;
