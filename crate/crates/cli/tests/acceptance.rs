//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Run with
//! `cargo test -p ionprobe-cli --test acceptance`.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Result;

use ionprobe_cli::commands;
use ionprobe_cli::config::Fig1Args;
use ionprobe_core::states::random_sector_state;
use ionprobe_core::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Verdict>;

fn random_sectors(rng: &mut ChaCha8Rng, n_max: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..=n_max).collect();
    let k = rng.random_range(1..=all.len().min(4));
    let mut picked: Vec<usize> = all.choose_multiple(rng, k).copied().collect();
    picked.sort_unstable();
    picked
}

fn eigenstate_property() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for n in 1..=30 {
        let space = build_space(n, n);
        let psi = su2_coherent(space, n)?;
        let c = correlation_operator(space);
        let residual = c.apply(psi.amplitudes()) - psi.amplitudes() * C64::new(n as f64, 0.0);
        worst = worst.max(residual.norm());
    }
    Ok(verdict(
        worst < 1e-10,
        format!("max residual {worst:.3e} over N=1..30"),
    ))
}

fn sector_spectrum() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for n in 0..=30 {
        let (c, lz) = commands::sector_spectra(n)?;
        for ev in [&c, &lz] {
            if ev.len() != n + 1 {
                return Ok(verdict(false, format!("N={n}: {} eigenvalues", ev.len())));
            }
            for (j, v) in ev.iter().enumerate() {
                worst = worst.max((v - (2.0 * j as f64 - n as f64)).abs());
            }
        }
    }
    Ok(verdict(
        worst < 1e-9,
        format!("max deviation {worst:.3e} for C_xy and L_z, N<=30"),
    ))
}

fn oracle_equivalence() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = 1.0;
    let props: Vec<Propagator> = (0..=25)
        .map(|n| Propagator::new(&jcm_hamiltonian(build_space(n, n), g)?))
        .collect::<Result<_, Error>>()?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=25usize);
        let space = build_space(n, n);
        let psi0 = random_sector_state(space, &[n], &mut rng)?;
        let amps: Vec<C64> = (0..=n)
            .map(|k| psi0.amplitude(k, n - k, Qubit::Ground))
            .collect::<Result<_, Error>>()?;
        for _ in 0..10 {
            let gt = rng.random_range(0.0..=10.0);
            let numeric = props[n].evolve(&psi0, gt / g)?;
            let analytic = analytic_jcm_state(space, n, g, gt / g, &amps)?;
            worst = worst.max((numeric.amplitudes() - analytic.amplitudes()).camax());
        }
    }
    Ok(verdict(
        worst < 1e-10,
        format!("max amplitude error {worst:.3e} (200 states x 10 times)"),
    ))
}

fn readout_identity() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=30usize);
        let space = build_space(n, n);
        let sectors = random_sectors(&mut rng, n);
        let psi = random_sector_state(space, &sectors, &mut rng)?;
        let c = correlation_operator(space);
        let gamma = rng.random_range(1e3..=1e5);
        let t = rng.random_range(0.0..=3.0) / (2.0 * gamma);
        let full = sigma_z_readout(&psi, &c, gamma, t)?;
        let spectral = spectral_sine_expectation(&psi, &c, gamma, t)?;
        worst = worst.max((full + spectral).abs());
    }
    Ok(verdict(
        worst < 1e-10,
        format!("max |<sz> + <sin(2gtC)>| {worst:.3e} over 200 triples"),
    ))
}

fn parity_effect() -> Result<Verdict> {
    let even = parity_scan(&ScenarioConfig::new(20))?;
    let odd = parity_scan(&ScenarioConfig::new(21))?;
    let peak = even.peak.ok_or(Error::DegenerateScan)?;
    let valley = odd.valley.ok_or(Error::DegenerateScan)?;
    let pass = peak.value >= 18.0 && valley.value <= -18.9;
    Ok(verdict(
        pass,
        format!(
            "N=20 max {:.4} at gt={:.4} (need >= 18.0); N=21 min {:.4} at gt={:.4} (need <= -18.9)",
            peak.value, peak.t, valley.value, valley.t
        ),
    ))
}

fn probe_time_budget() -> Result<Verdict> {
    let t = choose_probe_time(1e4, 30.0, 0.4)?;
    let pass = (t - 6.67e-7).abs() <= 1e-9 && (1e-7..=1e-5).contains(&t);
    Ok(verdict(pass, format!("t = {t:.6e} s")))
}

fn linearization_guarantee() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let config = ProbeConfig::default();
    let mut worst = 0.0f64;
    let mut bound_violations = 0;
    let mut cutoff_flags = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=30usize);
        let space = build_space(n, n);
        let sectors = random_sectors(&mut rng, n);
        let psi = random_sector_state(space, &sectors, &mut rng)?;
        let r = run_direct_measurement(&psi, &correlation_operator(space), &config)?;
        worst = worst.max((r.estimate - r.true_mean).abs());
        bound_violations += usize::from(!r.within_bound());
        cutoff_flags += usize::from(r.cutoff_violated);
    }
    let pass = worst <= 0.8 && bound_violations == 0 && cutoff_flags == 0;
    Ok(verdict(
        pass,
        format!(
            "max error {worst:.4e} (need <= 0.8), bound violations {bound_violations}, cutoff flags {cutoff_flags}"
        ),
    ))
}

fn end_to_end_check() -> Result<Verdict> {
    let config = ProbeConfig::default();
    let mut parts = Vec::new();
    let mut bounds_ok = true;
    let mut estimates = Vec::new();
    for n in [20usize, 21] {
        let scenario = ScenarioConfig::new(n);
        let gt = parity_scan(&scenario)?
            .parity_extremum()
            .ok_or(Error::DegenerateScan)?
            .t;
        let r = end_to_end(n, scenario.g, gt, &config)?.report;
        bounds_ok &= !r.cutoff_violated && r.within_bound();
        parts.push(format!(
            "N={n} gt*={gt:.4} est {:.4} true {:.4} bound {:.4}",
            r.estimate, r.true_mean, r.error_bound
        ));
        estimates.push(r.estimate);
    }
    let separation = (estimates[0] - estimates[1]).abs();
    parts.push(format!("separation {separation:.4} (need >= 36)"));
    Ok(verdict(bounds_ok && separation >= 36.0, parts.join("; ")))
}

fn cli_determinism() -> Result<Verdict> {
    let a = tempfile::tempdir()?;
    let b = tempfile::tempdir()?;
    let args = Fig1Args::default();
    commands::fig1(&args, a.path(), &mut Vec::new())?;
    commands::fig1(&args, b.path(), &mut Vec::new())?;
    for n in args.ns() {
        let name = format!("fig1_N{n}.csv");
        if fs::read(a.path().join(&name))? != fs::read(b.path().join(&name))? {
            return Ok(verdict(false, format!("{name} differs between runs")));
        }
    }
    Ok(verdict(
        true,
        "fig1_N20.csv and fig1_N21.csv byte-identical across two runs",
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, Duration, Check); 9] = [
        (
            "AC1",
            "eigenstate property",
            Duration::from_secs(1),
            eigenstate_property,
        ),
        (
            "AC2",
            "sector spectrum",
            Duration::from_secs(5),
            sector_spectrum,
        ),
        (
            "AC3",
            "oracle equivalence",
            Duration::from_secs(30),
            oracle_equivalence,
        ),
        (
            "AC4",
            "readout identity",
            Duration::from_secs(60),
            readout_identity,
        ),
        (
            "AC5",
            "parity effect",
            Duration::from_secs(120),
            parity_effect,
        ),
        (
            "AC6",
            "probe-time budget",
            Duration::from_secs(1),
            probe_time_budget,
        ),
        (
            "AC7",
            "linearization guarantee",
            Duration::from_secs(60),
            linearization_guarantee,
        ),
        (
            "AC8",
            "end-to-end discrimination",
            Duration::from_secs(60),
            end_to_end_check,
        ),
        (
            "AC9",
            "cli determinism",
            Duration::from_secs(300),
            cli_determinism,
        ),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        let in_time = elapsed <= budget;
        let pass = pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {id} {name}: {detail} [{:.2}s, budget {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
