//! Cross-checks of the spectral machinery against closed forms that do not
//! go through an eigensolver.

use ionprobe_core::states::random_sector_state;
use ionprobe_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sector_amplitudes(psi: &StateVector, n: usize) -> Vec<C64> {
    (0..=n)
        .map(|k| psi.amplitude(k, n - k, Qubit::Ground).unwrap())
        .collect()
}

#[test]
fn spectral_jcm_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2usize, 3, 8, 13] {
        let space = build_space(n, n);
        let g = 0.8;
        let prop = Propagator::new(&jcm_hamiltonian(space, g).unwrap()).unwrap();
        for _ in 0..4 {
            let psi0 = random_sector_state(space, &[n], &mut rng).unwrap();
            let amps = sector_amplitudes(&psi0, n);
            for i in 0..40 {
                let gt = 10.0 * i as f64 / 39.0;
                let numeric = prop.evolve(&psi0, gt / g).unwrap();
                let analytic = analytic_jcm_state(space, n, g, gt / g, &amps).unwrap();
                let diff = (numeric.amplitudes() - analytic.amplitudes()).camax();
                assert!(diff < 1e-10, "N={n} gt={gt}: {diff:e}");
            }
        }
    }
}

/// Exact sector spectrum: `C` restricted to `n_x + n_y = N` is a tridiagonal
/// matrix whose eigenvalues are `N − 2j`, and `L_z` is unitarily equivalent.
#[test]
fn sector_spectra_match_number_difference() {
    for n in 0..=12 {
        let space = build_space(n, n);
        let idx = sector_basis(space, n, Qubit::Ground).unwrap();
        let want: Vec<f64> = (0..=n).map(|j| -(n as f64) + 2.0 * j as f64).collect();
        for kind in [
            ObservableKind::Correlation,
            ObservableKind::AngularMomentumZ,
        ] {
            let ev = restrict(&observable(space, kind), &idx)
                .unwrap()
                .eigenvalues()
                .unwrap();
            for (a, b) in ev.iter().zip(&want) {
                assert!((a - b).abs() < 1e-9, "{kind:?} N={n}: {ev:?}");
            }
        }
    }
}

#[test]
fn readout_identity_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..12 {
        let n = rng.random_range(1..=10usize);
        let space = build_space(n, n);
        let psi = random_sector_state(space, &[n], &mut rng).unwrap();
        let c = correlation_operator(space);
        let gamma = rng.random_range(1e3..1e5);
        let t = rng.random_range(0.0..2.0) / (gamma * n as f64);
        let full = sigma_z_readout(&psi, &c, gamma, t).unwrap();
        let spectral = spectral_sine_expectation(&psi, &c, gamma, t).unwrap();
        assert!((full + spectral).abs() < 1e-10);
    }
}

/// Direct sum over the closed-form conditioned amplitudes `c_k cos(Ω_k gt)`.
fn conditioned_mean_closed_form(n: usize, gt: f64) -> f64 {
    let c0: Vec<f64> = {
        let mut a = 0.5f64.powf(n as f64 / 2.0);
        (0..=n)
            .map(|k| {
                let v = a;
                a *= ((n - k) as f64 / (k + 1) as f64).sqrt();
                v
            })
            .collect()
    };
    let amp: Vec<f64> = (0..=n)
        .map(|k| c0[k] * (((k * (n - k)) as f64).sqrt() * gt).cos())
        .collect();
    let p: f64 = amp.iter().map(|a| a * a).sum();
    let mut mean = 0.0;
    for k in 1..=n {
        mean += 2.0 * amp[k] * amp[k - 1] * ((k * (n - k + 1)) as f64).sqrt();
    }
    mean / p
}

#[test]
fn parity_scan_matches_closed_form() {
    for n in [4usize, 7, 20] {
        let mut cfg = ScenarioConfig::new(n);
        cfg.grid = TimeGrid::uniform(3.0, 60).unwrap();
        let series = parity_scan(&cfg).unwrap();
        for (gt, e) in series.valid_samples() {
            assert!(
                (e - conditioned_mean_closed_form(n, gt)).abs() < 1e-9,
                "N={n} gt={gt}"
            );
        }
    }
}
