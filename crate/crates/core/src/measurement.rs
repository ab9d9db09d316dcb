//! Expectation values, electronic conditional measurement and the parity
//! scan of the conditioned correlation mean.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{jcm_hamiltonian, Propagator, ScenarioConfig};
use crate::error::{Error, Result};
use crate::hilbert::{correlation_operator, HermitianOperator, Qubit};
use crate::states::{su2_coherent, StateVector};
use crate::C64;

/// Outcomes less likely than this cannot be conditioned on.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(psi: &StateVector, obs: &HermitianOperator) -> Result<f64> {
    if psi.space() != obs.space() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            actual: psi.dim(),
        });
    }
    let value = psi.amplitudes().dotc(&obs.apply(psi.amplitudes()));
    debug_assert!(
        value.im.abs() < 1e-10,
        "Hermitian expectation has imaginary part {}",
        value.im
    );
    Ok(value.re)
}

/// Projects onto the electronic `outcome` and renormalizes. Returns the
/// collapsed state and the outcome probability.
pub fn conditional_collapse(psi: &StateVector, outcome: Qubit) -> Result<(StateVector, f64)> {
    let keep = outcome.bit();
    let projected = DVector::from_iterator(
        psi.dim(),
        psi.amplitudes()
            .iter()
            .enumerate()
            .map(|(i, &a)| if i % 2 == keep { a } else { C64::new(0.0, 0.0) }),
    );
    let probability = projected.norm_squared();
    if probability < MIN_OUTCOME_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome(probability));
    }
    Ok((
        StateVector::from_amplitudes(psi.space(), projected)?,
        probability,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    /// Dimensionless time `gt`.
    pub t: f64,
    /// Conditioned `⟨C_xy⟩`; `None` when the ground outcome is too unlikely.
    pub expectation: Option<f64>,
    pub ground_probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSeries {
    pub n: usize,
    pub g: f64,
    pub label: String,
    pub samples: Vec<Sample>,
    pub peak: Option<Extremum>,
    pub valley: Option<Extremum>,
}

impl TimeSeries {
    /// The extremum matching the expected parity signature: the peak for
    /// even `N`, the valley for odd `N`.
    pub fn parity_extremum(&self) -> Option<Extremum> {
        if self.n.is_multiple_of(2) {
            self.peak
        } else {
            self.valley
        }
    }

    pub fn valid_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .filter_map(|s| s.expectation.map(|e| (s.t, e)))
    }
}

/// Precomputed JCM propagator, initial state and `C_xy` for one scenario.
pub struct ParityScanner {
    propagator: Propagator,
    psi0: StateVector,
    /// Nonzero entries `(row, col, value)` of `C_xy`.
    correlation: Vec<(usize, usize, C64)>,
    g: f64,
    threshold: f64,
}

impl ParityScanner {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let space = config.space();
        Ok(ParityScanner {
            propagator: Propagator::new(&jcm_hamiltonian(space, config.g)?)?,
            psi0: su2_coherent(space, config.n)?,
            correlation: nonzero_entries(&correlation_operator(space)),
            g: config.g,
            threshold: config.ground_threshold,
        })
    }

    /// State at dimensionless time `gt` before any measurement.
    pub fn state_at(&self, gt: f64) -> Result<StateVector> {
        self.propagator.evolve(&self.psi0, gt / self.g)
    }

    pub fn sample(&self, gt: f64) -> Result<Sample> {
        let psi = self.state_at(gt)?;
        let ground_probability = psi.qubit_weight(Qubit::Ground);
        if ground_probability < self.threshold.max(MIN_OUTCOME_PROBABILITY) {
            return Ok(Sample {
                t: gt,
                expectation: None,
                ground_probability,
            });
        }
        let (collapsed, _) = conditional_collapse(&psi, Qubit::Ground)?;
        let a = collapsed.amplitudes();
        let value: C64 = self
            .correlation
            .iter()
            .map(|&(r, c, v)| a[r].conj() * v * a[c])
            .sum();
        Ok(Sample {
            t: gt,
            expectation: Some(value.re),
            ground_probability,
        })
    }

    /// Golden-section search for a local extremum of the conditioned mean on
    /// `[lo, hi]`. `sign = 1` maximizes, `sign = −1` minimizes.
    fn refine(&self, lo: f64, hi: f64, sign: f64, start: Extremum) -> Result<Extremum> {
        let value = |gt: f64| -> Result<f64> {
            Ok(self
                .sample(gt)?
                .expectation
                .map_or(f64::NEG_INFINITY, |e| sign * e))
        };
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (value(c)?, value(d)?);
        for _ in 0..60 {
            if (b - a).abs() < 1e-12 * (1.0 + a.abs()) {
                break;
            }
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = value(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = value(d)?;
            }
        }
        let (t, f) = if fc > fd { (c, fc) } else { (d, fd) };
        if f.is_finite() && f > sign * start.value {
            Ok(Extremum { t, value: sign * f })
        } else {
            Ok(start)
        }
    }
}

fn nonzero_entries(op: &HermitianOperator) -> Vec<(usize, usize, C64)> {
    let m = op.matrix();
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for (r, &v) in m.column(c).iter().enumerate() {
            if v != zero {
                out.push((r, c, v));
            }
        }
    }
    out
}

fn locate(samples: &[Sample], sign: f64) -> Option<usize> {
    samples
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.expectation.map(|e| (i, sign * e)))
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Evolves the binomial state of `N` quanta under the JCM coupling, collapses
/// onto the electronic ground state at every grid time and records the
/// conditioned `⟨C_xy⟩` with the outcome probability.
pub fn parity_scan(config: &ScenarioConfig) -> Result<TimeSeries> {
    let scanner = ParityScanner::new(config)?;
    let samples = config
        .grid
        .times()
        .par_iter()
        .map(|&gt| scanner.sample(gt))
        .collect::<Result<Vec<_>>>()?;
    if samples.iter().all(|s| s.expectation.is_none()) {
        return Err(Error::DegenerateScan);
    }

    let mut extrema = [None, None];
    for (slot, sign) in extrema.iter_mut().zip([1.0, -1.0]) {
        let Some(i) = locate(&samples, sign) else {
            continue;
        };
        let found = Extremum {
            t: samples[i].t,
            value: samples[i].expectation.expect("located samples are valid"),
        };
        *slot = Some(if config.refine {
            let lo = samples[i.saturating_sub(1)].t;
            let hi = samples[(i + 1).min(samples.len() - 1)].t;
            scanner.refine(lo, hi, sign, found)?
        } else {
            found
        });
    }

    Ok(TimeSeries {
        n: config.n,
        g: config.g,
        label: "C_xy".into(),
        samples,
        peak: extrema[0],
        valley: extrema[1],
    })
}
