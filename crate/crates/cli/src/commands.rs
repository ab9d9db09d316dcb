//! The four subcommands. Each takes fully merged arguments, writes its files
//! under `out`, prints a short summary to `log`, and reports whether every
//! bound check held.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use ionprobe_core::states::random_sector_state;
use ionprobe_core::*;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{End2EndArgs, Fig1Args, ProbeCmdArgs, SpectrumArgs, StateSpec};
use crate::format::{g12, series_csv, series_svg, spectrum_row};

#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub bound_failed: bool,
}

fn write_file(out: &Path, name: &str, contents: &str, outcome: &mut Outcome) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    outcome.written.push(path);
    Ok(())
}

fn extremum_text(e: Option<Extremum>) -> String {
    match e {
        Some(e) => format!("gt*={} value={}", g12(e.t), g12(e.value)),
        None => "none".into(),
    }
}

pub fn fig1(args: &Fig1Args, out: &Path, log: &mut dyn Write) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut all = Vec::new();
    for n in args.ns() {
        let cfg = args.scan.scenario(n)?;
        let series = parity_scan(&cfg).with_context(|| format!("scan for N={n}"))?;
        write_file(
            out,
            &format!("fig1_N{n}.csv"),
            &series_csv(&series),
            &mut outcome,
        )?;
        writeln!(
            log,
            "N={n} peak: {} valley: {} parity extremum: {}",
            extremum_text(series.peak),
            extremum_text(series.valley),
            extremum_text(series.parity_extremum())
        )?;
        all.push(series);
    }
    write_file(out, "fig1.svg", &series_svg(&all), &mut outcome)?;
    Ok(outcome)
}

pub fn build_state(spec: &StateSpec, space: SpaceDescriptor, seed: u64) -> Result<StateVector> {
    Ok(match spec {
        StateSpec::Fock { n_x, n_y } => fock_state(space, *n_x, *n_y, Qubit::Ground)?,
        StateSpec::Su2 { n } => su2_coherent(space, *n)?,
        StateSpec::Sector { n, amplitudes } => {
            if amplitudes.len() != n + 1 {
                return Err(anyhow!(
                    "invalid config: `amplitudes` needs {} entries for sector {n}, got {}",
                    n + 1,
                    amplitudes.len()
                ));
            }
            let mut v = DVector::zeros(space.dim());
            for (k, [re, im]) in amplitudes.iter().enumerate() {
                v[space.index(k, n - k, Qubit::Ground)?] = C64::new(*re, *im);
            }
            StateVector::from_amplitudes(space, v)?
        }
        StateSpec::Random { sectors } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_sector_state(space, sectors, &mut rng)?
        }
    })
}

pub fn probe(args: &ProbeCmdArgs, seed: u64, out: &Path, log: &mut dyn Write) -> Result<Outcome> {
    args.validate_kind()?;
    let config = args.probe.resolve()?;
    let (cx, cy) = args.cutoffs()?;
    let space = SpaceDescriptor::new(cx, cy);
    let psi = build_state(&args.state(), space, seed)?;
    let obs = observable(space, args.observable());
    let report = run_direct_measurement(&psi, &obs, &config)?;

    let mut outcome = Outcome::default();
    let json = serde_json::to_string_pretty(&report)? + "\n";
    write_file(out, "probe_report.json", &json, &mut outcome)?;
    writeln!(
        log,
        "{}: estimate={} true={} bound={}{}",
        obs.label(),
        g12(report.estimate),
        g12(report.true_mean),
        g12(report.error_bound),
        if report.cutoff_violated {
            " (cutoff violated)"
        } else {
            ""
        }
    )?;
    outcome.bound_failed = !report.cutoff_violated && !report.within_bound();
    Ok(outcome)
}

pub fn end2end(args: &End2EndArgs, out: &Path, log: &mut dyn Write) -> Result<Outcome> {
    let config = args.probe.resolve()?;
    let mut outcome = Outcome::default();
    for n in args.ns() {
        let scenario = args.scan.scenario(n)?;
        let gt_star = match args.gt_star {
            Some(t) => t,
            None => {
                parity_scan(&scenario)
                    .with_context(|| format!("scan for N={n}"))?
                    .parity_extremum()
                    .ok_or_else(|| anyhow!("no valid sample for N={n}"))?
                    .t
            }
        };
        let record = end_to_end(n, scenario.g, gt_star, &config)?;
        let report = serde_json::to_string_pretty(&record.report)? + "\n";
        let scen = serde_json::to_string_pretty(&record.scenario)? + "\n";
        write_file(
            out,
            &format!("end2end_N{n}_report.json"),
            &report,
            &mut outcome,
        )?;
        write_file(
            out,
            &format!("end2end_N{n}_scenario.json"),
            &scen,
            &mut outcome,
        )?;
        let r = record.report;
        let ok = r.cutoff_violated || r.within_bound();
        writeln!(
            log,
            "N={n} gt*={} estimate={} true={} bound={}{}",
            g12(gt_star),
            g12(r.estimate),
            g12(r.true_mean),
            g12(r.error_bound),
            if ok { "" } else { " BOUND FAILED" }
        )?;
        outcome.bound_failed |= !ok;
    }
    Ok(outcome)
}

/// Sorted sector eigenvalues of `C_xy` and of `L_z`.
pub fn sector_spectra(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let space = SpaceDescriptor::new(n, n);
    let idx = sector_basis(space, n, Qubit::Ground)?;
    let c = restrict(&correlation_operator(space), &idx)?.eigenvalues()?;
    let lz = restrict(&observable(space, ObservableKind::AngularMomentumZ), &idx)?.eigenvalues()?;
    Ok((c, lz))
}

pub fn spectrum(args: &SpectrumArgs, out: &Path, log: &mut dyn Write) -> Result<Outcome> {
    let n = args.n.unwrap_or(2);
    let (c, lz) = sector_spectra(n)?;
    let text = format!("{}\n{}\n", spectrum_row(&c), spectrum_row(&lz));
    let mut outcome = Outcome::default();
    write_file(out, &format!("spectrum_N{n}.csv"), &text, &mut outcome)?;
    log.write_all(text.as_bytes())?;
    Ok(outcome)
}
