//! Run configuration: a JSON file per command, overridden field by field by
//! command-line flags, then validated before anything is computed.
//!
//! All physical quantities are SI (rad/s, seconds); scan grids are
//! dimensionless `gt`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use ionprobe_core::{Mode, ObservableKind, ProbeConfig, ProbeTime, ScenarioConfig, TimeGrid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub fn load_file<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

macro_rules! overlay {
    ($file:expr, $flags:expr; $($field:ident),* $(,)?) => {{
        let mut merged = $file;
        $( if $flags.$field.is_some() { merged.$field = $flags.$field.clone(); } )*
        merged
    }};
}

/// Probe-coupling options shared by `probe` and `end2end`.
#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeArgs {
    /// Probe coupling γ in rad/s [default: 1e4]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Eigenvalue cutoff c_max [default: 30]
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Linearization bound on |2γtc| [default: 0.4]
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Probe time in seconds, or "auto" [default: auto]
    #[arg(long, value_parser = parse_probe_time)]
    pub probe_time: Option<ProbeTime>,
}

fn parse_probe_time(s: &str) -> std::result::Result<ProbeTime, String> {
    if s == "auto" {
        return Ok(ProbeTime::Auto);
    }
    s.parse::<f64>()
        .map(ProbeTime::Seconds)
        .map_err(|_| format!("expected seconds or \"auto\", got {s:?}"))
}

impl ProbeArgs {
    pub fn overlay(self, flags: &ProbeArgs) -> ProbeArgs {
        overlay!(self, flags; gamma, c_max, x_max, probe_time)
    }

    pub fn resolve(&self) -> Result<ProbeConfig> {
        let d = ProbeConfig::default();
        let cfg = ProbeConfig {
            gamma: self.gamma.unwrap_or(d.gamma),
            c_max: self.c_max.unwrap_or(d.c_max),
            x_max: self.x_max.unwrap_or(d.x_max),
            probe_time: self.probe_time.unwrap_or(d.probe_time),
        };
        cfg.validate().context("invalid config")?;
        Ok(cfg)
    }
}

/// Scan options shared by `fig1` and `end2end`.
#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScanArgs {
    /// JCM coupling g [default: 1]
    #[arg(long)]
    pub g: Option<f64>,
    /// Scan window (0, t_max] in units of 1/g [default: 3]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of uniform grid points [default: 3000]
    #[arg(long)]
    pub points: Option<usize>,
    /// Explicit gt grid; overrides t_max/points
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Minimum ground probability for a valid sample [default: 1e-6]
    #[arg(long)]
    pub ground_threshold: Option<f64>,
    /// Refine extrema between grid neighbours
    #[arg(long)]
    pub refine: Option<bool>,
}

impl ScanArgs {
    pub fn overlay(self, flags: &ScanArgs) -> ScanArgs {
        overlay!(self, flags; g, t_max, points, times, ground_threshold, refine)
    }

    pub fn scenario(&self, n: usize) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::new(n);
        if let Some(g) = self.g {
            cfg.g = g;
        }
        cfg.grid = match &self.times {
            Some(times) => TimeGrid::from_times(times.clone()),
            None => TimeGrid::uniform(self.t_max.unwrap_or(3.0), self.points.unwrap_or(3000)),
        }
        .context("invalid config")?;
        if let Some(th) = self.ground_threshold {
            cfg.ground_threshold = th;
        }
        cfg.refine = self.refine.unwrap_or(false);
        cfg.validate().context("invalid config")?;
        Ok(cfg)
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Args {
    /// Initial excitation numbers to scan [default: 20,21]
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
}

impl Fig1Args {
    pub fn overlay(self, flags: &Fig1Args) -> Fig1Args {
        Fig1Args {
            n: flags.n.clone().or(self.n),
            scan: self.scan.overlay(&flags.scan),
        }
    }

    pub fn ns(&self) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| vec![20, 21])
    }
}

/// Vibrational state handed to the probe.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Fock {
        n_x: usize,
        n_y: usize,
    },
    Su2 {
        n: usize,
    },
    /// Amplitudes `[re, im]` on `|k, N−k⟩`, `k = 0..=N`; normalized on load.
    Sector {
        n: usize,
        amplitudes: Vec<[f64; 2]>,
    },
    /// Uniform random amplitudes on the listed sectors, drawn from `--seed`.
    Random {
        sectors: Vec<usize>,
    },
}

impl StateSpec {
    /// Highest total phonon number the state occupies.
    pub fn max_sector(&self) -> usize {
        match self {
            StateSpec::Fock { n_x, n_y } => n_x + n_y,
            StateSpec::Su2 { n } | StateSpec::Sector { n, .. } => *n,
            StateSpec::Random { sectors } => sectors.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeCmdArgs {
    /// Vibrational state: su2, fock or random [default: su2]
    #[arg(long = "state")]
    #[serde(skip)]
    pub state_kind: Option<String>,
    /// N for su2 states
    #[arg(long = "n")]
    #[serde(skip)]
    pub n: Option<usize>,
    /// Fock occupations
    #[arg(long)]
    #[serde(skip)]
    pub nx: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub ny: Option<usize>,
    /// Sectors for random states
    #[arg(long, value_delimiter = ',')]
    #[serde(skip)]
    pub sectors: Option<Vec<usize>>,
    #[arg(skip)]
    pub state: Option<StateSpec>,
    /// Observable: correlation, correlation_squared, total_number, number_x,
    /// number_y, position_x, position_y, momentum_x, momentum_y,
    /// angular_momentum_z [default: correlation]
    #[arg(long = "observable", value_parser = parse_observable)]
    pub observable: Option<ObservableKind>,
    /// Phonon cutoffs n_max_x,n_max_y [default: (M, M), M the state's
    /// largest sector]
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub cutoffs: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub probe: ProbeArgs,
}

pub fn parse_observable(s: &str) -> std::result::Result<ObservableKind, String> {
    Ok(match s {
        "correlation" => ObservableKind::Correlation,
        "correlation_squared" => ObservableKind::CorrelationSquared,
        "total_number" => ObservableKind::TotalNumber,
        "number_x" => ObservableKind::Number { mode: Mode::X },
        "number_y" => ObservableKind::Number { mode: Mode::Y },
        "position_x" => ObservableKind::QuadraturePosition { mode: Mode::X },
        "position_y" => ObservableKind::QuadraturePosition { mode: Mode::Y },
        "momentum_x" => ObservableKind::QuadratureMomentum { mode: Mode::X },
        "momentum_y" => ObservableKind::QuadratureMomentum { mode: Mode::Y },
        "angular_momentum_z" => ObservableKind::AngularMomentumZ,
        other => return Err(format!("unknown observable {other:?}")),
    })
}

impl ProbeCmdArgs {
    pub fn overlay(self, flags: &ProbeCmdArgs) -> ProbeCmdArgs {
        let mut merged = overlay!(self, flags; observable, cutoffs);
        merged.probe = merged.probe.overlay(&flags.probe);
        if let Some(state) = flags.state_from_flags() {
            merged.state = Some(state);
        }
        merged
    }

    fn state_from_flags(&self) -> Option<StateSpec> {
        let kind = self
            .state_kind
            .as_deref()
            .or(if self.nx.is_some() || self.ny.is_some() {
                Some("fock")
            } else if self.sectors.is_some() {
                Some("random")
            } else if self.n.is_some() {
                Some("su2")
            } else {
                None
            })?;
        Some(match kind {
            "fock" => StateSpec::Fock {
                n_x: self.nx.unwrap_or(0),
                n_y: self.ny.unwrap_or(0),
            },
            "random" => StateSpec::Random {
                sectors: self
                    .sectors
                    .clone()
                    .unwrap_or_else(|| vec![self.n.unwrap_or(20)]),
            },
            // Validated later; an unknown kind falls through to su2 only
            // after `validate_kind` has rejected it.
            _ => StateSpec::Su2 {
                n: self.n.unwrap_or(20),
            },
        })
    }

    pub fn validate_kind(&self) -> Result<()> {
        if let Some(kind) = &self.state_kind {
            if !matches!(kind.as_str(), "fock" | "su2" | "random") {
                bail!("invalid config: `state` must be one of fock, su2, random (got {kind:?})");
            }
        }
        Ok(())
    }

    pub fn state(&self) -> StateSpec {
        self.state.clone().unwrap_or(StateSpec::Su2 { n: 20 })
    }

    pub fn observable(&self) -> ObservableKind {
        self.observable.unwrap_or(ObservableKind::Correlation)
    }

    pub fn cutoffs(&self) -> Result<(usize, usize)> {
        match &self.cutoffs {
            None => {
                let m = self.state().max_sector();
                Ok((m, m))
            }
            Some(v) if v.len() == 2 => Ok((v[0], v[1])),
            Some(v) => bail!(
                "invalid config: `cutoffs` needs two entries, got {}",
                v.len()
            ),
        }
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct End2EndArgs {
    /// Initial excitation numbers [default: 20,21]
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Measurement time gt*; when absent the parity extremum of a scan is used
    #[arg(long)]
    pub gt_star: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub probe: ProbeArgs,
}

impl End2EndArgs {
    pub fn overlay(self, flags: &End2EndArgs) -> End2EndArgs {
        End2EndArgs {
            n: flags.n.clone().or(self.n),
            gt_star: flags.gt_star.or(self.gt_star),
            scan: self.scan.overlay(&flags.scan),
            probe: self.probe.overlay(&flags.probe),
        }
    }

    pub fn ns(&self) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| vec![20, 21])
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Phonon sector N [default: 2]
    #[arg(long = "n")]
    pub n: Option<usize>,
}

impl SpectrumArgs {
    pub fn overlay(self, flags: &SpectrumArgs) -> SpectrumArgs {
        overlay!(self, flags; n)
    }
}
