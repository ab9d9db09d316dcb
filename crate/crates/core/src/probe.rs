//! Direct measurement of a vibrational mean value.
//!
//! The ion starts as `|ψ_vibr⟩|−⟩`. A resonant carrier pulse rotates the
//! electronic state to `|−⟩_y`, then the probe coupling `γ·O⊗σ_x` acts for
//! a time `t`. For every eigenvalue `c` of `O` the qubit precesses by
//! `2γtc`, which gives
//!
//! ```text
//! ⟨σ_z(t)⟩ = −⟨ψ_vibr| sin(2γt·O) |ψ_vibr⟩
//! ```
//!
//! When every populated eigenvalue satisfies `|2γtc| ≤ x_max` the sine is
//! replaced by its argument and `⟨O⟩ ≈ −⟨σ_z(t)⟩ / (2γt)`.
//!
//! The linearization error is bounded with the cubic Taylor remainder
//! `|sin x − x| ≤ |x|³/6`, giving `|estimate − ⟨O⟩| ≤ (2γt)²·c_max³/6` for
//! states supported on `|c| ≤ c_max`. This bound is conservative.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::{jcm_hamiltonian, probe_hamiltonian, Propagator};
use crate::error::{invalid, Error, Result};
use crate::hilbert::{correlation_operator, HermitianOperator, Qubit, SpaceDescriptor};
use crate::measurement::{conditional_collapse, expectation};
use crate::spectral::SpectralDecomposition;
use crate::states::{su2_coherent, StateVector};
use crate::C64;

/// Population above the eigenvalue cutoff that marks the cutoff assumption
/// as violated.
pub const CUTOFF_POPULATION_TOL: f64 = 1e-9;

/// Largest excited-slice weight accepted as "electronic ground product".
const GROUND_PRODUCT_TOL: f64 = 1e-12;

/// Probe interaction time: fixed, or chosen by [`choose_probe_time`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbeTimeRepr", into = "ProbeTimeRepr")]
pub enum ProbeTime {
    Auto,
    Seconds(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProbeTimeRepr {
    Seconds(f64),
    Keyword(String),
}

impl TryFrom<ProbeTimeRepr> for ProbeTime {
    type Error = String;

    fn try_from(repr: ProbeTimeRepr) -> std::result::Result<Self, String> {
        match repr {
            ProbeTimeRepr::Seconds(t) => Ok(ProbeTime::Seconds(t)),
            ProbeTimeRepr::Keyword(k) if k == "auto" => Ok(ProbeTime::Auto),
            ProbeTimeRepr::Keyword(k) => Err(format!("expected seconds or \"auto\", got {k:?}")),
        }
    }
}

impl From<ProbeTime> for ProbeTimeRepr {
    fn from(t: ProbeTime) -> Self {
        match t {
            ProbeTime::Auto => ProbeTimeRepr::Keyword("auto".into()),
            ProbeTime::Seconds(s) => ProbeTimeRepr::Seconds(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Probe coupling γ in rad/s.
    pub gamma: f64,
    /// Largest |eigenvalue| of the observable assumed populated.
    pub c_max: f64,
    /// Bound on |2γtc| inside which `sin x ≈ x` is accepted.
    pub x_max: f64,
    pub probe_time: ProbeTime,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            gamma: 1e4,
            c_max: 30.0,
            x_max: 0.4,
            probe_time: ProbeTime::Auto,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid(
                "gamma",
                format!("must be positive, got {}", self.gamma),
            ));
        }
        if !(self.c_max > 0.0 && self.c_max.is_finite()) {
            return Err(invalid(
                "c_max",
                format!("must be positive, got {}", self.c_max),
            ));
        }
        if !(self.x_max > 0.0 && self.x_max < std::f64::consts::FRAC_PI_2) {
            return Err(invalid(
                "x_max",
                format!("must lie in (0, π/2), got {}", self.x_max),
            ));
        }
        if let ProbeTime::Seconds(t) = self.probe_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("probe_time", format!("must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn resolved_time(&self) -> Result<f64> {
        match self.probe_time {
            ProbeTime::Auto => choose_probe_time(self.gamma, self.c_max, self.x_max),
            ProbeTime::Seconds(t) => Ok(t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementReport {
    pub estimate: f64,
    pub true_mean: f64,
    pub sigma_z_readout: f64,
    /// Seconds.
    pub probe_time: f64,
    pub error_bound: f64,
    pub cutoff_violated: bool,
}

impl MeasurementReport {
    /// `|estimate − true_mean| ≤ error_bound`, required whenever the cutoff
    /// holds.
    pub fn within_bound(&self) -> bool {
        (self.estimate - self.true_mean).abs() <= self.error_bound
    }
}

fn check_ground_product(psi: &StateVector) -> Result<()> {
    let excited = psi.qubit_weight(Qubit::Excited);
    if excited > GROUND_PRODUCT_TOL {
        return Err(Error::NotGroundProduct(excited));
    }
    Ok(())
}

/// Applies `exp(+i(π/4)σ_x)` to `|ψ_vibr⟩|−⟩`, giving `|ψ_vibr⟩|−⟩_y` up to a
/// global phase.
pub fn rotate_electronic(psi: &StateVector) -> Result<StateVector> {
    check_ground_product(psi)?;
    // cos(π/4) = sin(π/4); one constant keeps ⟨σ_z⟩ exactly zero after the pulse.
    let c = FRAC_1_SQRT_2;
    let is = C64::new(0.0, c);
    let src = psi.amplitudes();
    let mut out = src.clone();
    for cell in 0..src.len() / 2 {
        let (g, e) = (src[2 * cell], src[2 * cell + 1]);
        out[2 * cell] = g * c + e * is;
        out[2 * cell + 1] = g * is + e * c;
    }
    Ok(StateVector::from_unitary_image(psi.space(), out))
}

/// Probe Hamiltonian diagonalized once, for readouts at several times.
pub struct ProbeSimulator {
    space: SpaceDescriptor,
    propagator: Propagator,
}

impl ProbeSimulator {
    pub fn new(obs: &HermitianOperator, gamma: f64) -> Result<Self> {
        let h = probe_hamiltonian(obs, gamma)?;
        Ok(ProbeSimulator {
            space: obs.space(),
            propagator: Propagator::new(&h)?,
        })
    }

    /// `⟨σ_z⟩` after rotating and probing `|ψ_vibr⟩|−⟩` for `t` seconds.
    pub fn readout(&self, psi_vibr: &StateVector, t: f64) -> Result<f64> {
        if psi_vibr.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: psi_vibr.dim(),
            });
        }
        let rotated = rotate_electronic(psi_vibr)?;
        let evolved = self.propagator.evolve(&rotated, t)?;
        // ⟨σ_z⟩ = P(+) − P(−); σ_z is diagonal in the qubit basis.
        Ok(evolved.qubit_weight(Qubit::Excited) - evolved.qubit_weight(Qubit::Ground))
    }
}

/// Full-unitary σ_z readout of the protocol.
pub fn sigma_z_readout(
    psi_vibr: &StateVector,
    obs: &HermitianOperator,
    gamma: f64,
    t: f64,
) -> Result<f64> {
    ProbeSimulator::new(obs, gamma)?.readout(psi_vibr, t)
}

/// `⟨ψ_vibr| sin(2γt·O) |ψ_vibr⟩` from the spectral decomposition of `O`.
pub fn spectral_sine_expectation(
    psi_vibr: &StateVector,
    obs: &HermitianOperator,
    gamma: f64,
    t: f64,
) -> Result<f64> {
    check_ground_product(psi_vibr)?;
    if psi_vibr.space() != obs.space() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            actual: psi_vibr.dim(),
        });
    }
    let spectrum = obs.decompose()?;
    Ok(sine_expectation(&spectrum, psi_vibr, gamma, t))
}

fn sine_expectation(
    spectrum: &SpectralDecomposition,
    psi: &StateVector,
    gamma: f64,
    t: f64,
) -> f64 {
    spectrum.expectation_fn(psi.amplitudes(), |c| (2.0 * gamma * t * c).sin())
}

/// Linearized estimate `−readout / (2γt)`.
pub fn estimate_mean(readout: f64, gamma: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(invalid(
            "t",
            format!("probe time must be positive, got {t}"),
        ));
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(invalid("gamma", format!("must be positive, got {gamma}")));
    }
    Ok(-readout / (2.0 * gamma * t))
}

/// Longest probe time keeping every `|c| ≤ c_max` inside the linear zone:
/// `t = x_max / (2γ·c_max)`.
pub fn choose_probe_time(gamma: f64, c_max: f64, x_max: f64) -> Result<f64> {
    for (name, v) in [("gamma", gamma), ("c_max", c_max), ("x_max", x_max)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    Ok(x_max / (2.0 * gamma * c_max))
}

/// `(2γt)²·c_max³/6`.
pub fn linearization_bound(gamma: f64, t: f64, c_max: f64) -> f64 {
    let x = 2.0 * gamma * t;
    x * x * c_max.powi(3) / 6.0
}

/// Runs the full protocol on `psi_vibr` (a state on the ground slice) and
/// reports the estimate next to the exact mean.
pub fn run_direct_measurement(
    psi_vibr: &StateVector,
    obs: &HermitianOperator,
    config: &ProbeConfig,
) -> Result<MeasurementReport> {
    config.validate()?;
    check_ground_product(psi_vibr)?;
    let t = config.resolved_time()?;

    let spectrum = obs.decompose()?;
    let above: f64 = spectrum
        .weights(psi_vibr.amplitudes())
        .into_iter()
        .filter(|(c, _)| c.abs() > config.c_max + 1e-9)
        .map(|(_, w)| w)
        .sum();

    let true_mean = expectation(psi_vibr, obs)?;
    let readout = ProbeSimulator::new(obs, config.gamma)?.readout(psi_vibr, t)?;
    Ok(MeasurementReport {
        estimate: estimate_mean(readout, config.gamma, t)?,
        true_mean,
        sigma_z_readout: readout,
        probe_time: t,
        error_bound: linearization_bound(config.gamma, t, config.c_max),
        cutoff_violated: above > CUTOFF_POPULATION_TOL,
    })
}

/// Parity scenario state handed to the probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub n: usize,
    pub g: f64,
    pub gt_star: f64,
    pub ground_probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndToEndRecord {
    pub scenario: ScenarioRecord,
    pub report: MeasurementReport,
}

/// Prepares the binomial state of `N` quanta, evolves it under the JCM
/// coupling to `gt_star`, keeps the electronic-ground branch and probes
/// `C_xy` on it.
pub fn end_to_end(n: usize, g: f64, gt_star: f64, config: &ProbeConfig) -> Result<EndToEndRecord> {
    if !(gt_star >= 0.0 && gt_star.is_finite()) {
        return Err(invalid(
            "gt_star",
            format!("must be nonnegative, got {gt_star}"),
        ));
    }
    let space = SpaceDescriptor::new(n, n);
    let psi0 = su2_coherent(space, n)?;
    let psi = Propagator::new(&jcm_hamiltonian(space, g)?)?.evolve(&psi0, gt_star / g)?;
    let (conditioned, ground_probability) = conditional_collapse(&psi, Qubit::Ground)?;
    let report = run_direct_measurement(&conditioned, &correlation_operator(space), config)?;
    Ok(EndToEndRecord {
        scenario: ScenarioRecord {
            n,
            g,
            gt_star,
            ground_probability,
        },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_space, observable, pauli, Axis, ObservableKind};
    use crate::states::fock_state;

    #[test]
    fn rotation_reaches_minus_y() {
        let space = build_space(2, 1);
        let vac = fock_state(space, 0, 0, Qubit::Ground).unwrap();
        let r = rotate_electronic(&vac).unwrap();
        assert!((expectation(&r, &pauli(space, Axis::Y)).unwrap() + 1.0).abs() < 1e-14);
        assert!(expectation(&r, &pauli(space, Axis::Z)).unwrap().abs() < 1e-14);
        let before = vac.phonon_marginal();
        let after = r.phonon_marginal();
        let overlap: f64 = before.iter().zip(&after).map(|(a, b)| (a * b).sqrt()).sum();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_requires_ground_product() {
        let space = build_space(1, 1);
        let e = fock_state(space, 0, 0, Qubit::Excited).unwrap();
        assert!(matches!(
            rotate_electronic(&e),
            Err(Error::NotGroundProduct(_))
        ));
    }

    #[test]
    fn readout_examples() {
        let n = 4;
        let space = build_space(n, n);
        let c = correlation_operator(space);
        let gamma = 1e4;
        let su2 = su2_coherent(space, n).unwrap();
        assert!(sigma_z_readout(&su2, &c, gamma, 0.0).unwrap().abs() < 1e-15);
        for t in [1e-6, 7.3e-6, 2e-5] {
            let r = sigma_z_readout(&su2, &c, gamma, t).unwrap();
            assert!((r + (2.0 * gamma * t * n as f64).sin()).abs() < 1e-12);
        }
        let f10 = fock_state(space, 1, 0, Qubit::Ground).unwrap();
        for t in [1e-6, 3e-5] {
            assert!(sigma_z_readout(&f10, &c, gamma, t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_arithmetic() {
        assert_eq!(estimate_mean(0.0, 3.0, 2.0).unwrap(), 0.0);
        // 2γt = 0.01
        assert!((estimate_mean(-0.2, 0.5, 0.01).unwrap() - 20.0).abs() < 1e-12);
        assert!(estimate_mean(0.1, 1.0, 0.0).is_err());
        let (gamma, t, c): (f64, f64, f64) = (1e4, 1e-6, 12.0);
        let x = 2.0 * gamma * t * c;
        let est = estimate_mean(-x.sin(), gamma, t).unwrap();
        assert!((est - c).abs() <= c * x * x / 6.0);
    }

    #[test]
    fn probe_time_budget() {
        let t = choose_probe_time(1e4, 30.0, 0.4).unwrap();
        assert!((t - 0.4 / 6e5).abs() < 1e-18);
        assert!((choose_probe_time(1e4, 30.0, 0.3).unwrap() - 5.0e-7).abs() < 1e-18);
        assert!((choose_probe_time(2e4, 30.0, 0.4).unwrap() - t / 2.0).abs() < 1e-18);
        assert!(choose_probe_time(0.0, 30.0, 0.4).is_err());
        assert!(choose_probe_time(1e4, 0.0, 0.4).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(linearization_bound(1e4, 0.0, 30.0), 0.0);
        // (0.4/30)²·30³/6 = 0.8
        let t = 0.4 / 30.0 / 2.0;
        assert!((linearization_bound(1.0, t, 30.0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn direct_measurement_examples() {
        let cfg = ProbeConfig::default();

        let n = 20;
        let space = build_space(n, n);
        let rep = run_direct_measurement(
            &su2_coherent(space, n).unwrap(),
            &correlation_operator(space),
            &cfg,
        )
        .unwrap();
        assert!(!rep.cutoff_violated);
        assert!((rep.estimate - 20.0).abs() <= 0.8);
        assert!(rep.within_bound());

        let space = build_space(3, 3);
        let f21 = fock_state(space, 2, 1, Qubit::Ground).unwrap();
        let rep =
            run_direct_measurement(&f21, &observable(space, ObservableKind::TotalNumber), &cfg)
                .unwrap();
        assert!((rep.true_mean - 3.0).abs() < 1e-14);
        assert!(rep.within_bound());

        let vac = fock_state(space, 0, 0, Qubit::Ground).unwrap();
        let rep = run_direct_measurement(&vac, &correlation_operator(space), &cfg).unwrap();
        assert_eq!(rep.estimate, 0.0);
        assert_eq!(rep.sigma_z_readout, 0.0);
    }

    #[test]
    fn cutoff_violation_is_flagged() {
        let n = 31;
        let space = build_space(n, n);
        let rep = run_direct_measurement(
            &su2_coherent(space, n).unwrap(),
            &correlation_operator(space),
            &ProbeConfig::default(),
        )
        .unwrap();
        assert!(rep.cutoff_violated);
    }

    #[test]
    fn end_to_end_at_zero_time() {
        let rec = end_to_end(6, 1.0, 0.0, &ProbeConfig::default()).unwrap();
        assert!((rec.report.true_mean - 6.0).abs() < 1e-12);
        assert!((rec.scenario.ground_probability - 1.0).abs() < 1e-15);
        assert!(rec.report.within_bound());
    }

    #[test]
    fn config_json_shape() {
        let cfg: ProbeConfig =
            serde_json::from_str(r#"{"gamma":1e4,"c_max":30,"x_max":0.4,"probe_time":"auto"}"#)
                .unwrap();
        assert_eq!(cfg, ProbeConfig::default());
        let cfg: ProbeConfig =
            serde_json::from_str(r#"{"gamma":1e4,"c_max":30,"x_max":0.4,"probe_time":5e-7}"#)
                .unwrap();
        assert_eq!(cfg.probe_time, ProbeTime::Seconds(5e-7));
        assert!(serde_json::from_str::<ProbeConfig>(
            r#"{"gamma":1e4,"c_max":30,"x_max":0.4,"probe_time":"soon"}"#
        )
        .is_err());
    }

    #[test]
    fn report_json_fields() {
        let rep = MeasurementReport {
            estimate: 1.0,
            true_mean: 1.0,
            sigma_z_readout: -0.1,
            probe_time: 6e-7,
            error_bound: 0.8,
            cutoff_violated: false,
        };
        let v: serde_json::Value = serde_json::to_value(rep).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "cutoff_violated",
                "error_bound",
                "estimate",
                "probe_time",
                "sigma_z_readout",
                "true_mean"
            ]
        );
    }
}
