//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p soe-core --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::time::Instant;

use soe_core::channel::{ChannelModel, FiberChannelParams};
use soe_core::characterization::{calibrate_channel, channel_report};
use soe_core::elements::{
    apply_analyzer, apply_qplate, apply_waveplate, predict_delta, AnalyzerSpec, QPlateSpec,
    WaveplateSpec,
};
use soe_core::measurement::{
    detection_probability, distinguishability, distinguishability_density, oam_spectrum,
    probe_state, simulate_counts, visibility, ScanConfig, SectorSpec, VisibilityMethod,
};
use soe_core::render::{count_azimuthal_lobes, oam_pair_state};
use soe_core::spinorbit::{Pol, SpinOrbitState};
use soe_core::FiberSpec;

const QUARTER: f64 = std::f64::consts::FRAC_PI_4;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

fn fringe_law(alpha: f64, theta: f64) -> f64 {
    0.5 * (1.0 + (2.0 * alpha).sin() * (2.0 * theta + predict_delta()).cos())
}

/// Deterministic uniform variates for test point sampling.
fn lcg_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
    move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn fitted_visibilities(scan: &soe_core::ScanResult) -> Vec<(f64, f64)> {
    scan.by_alpha()
        .into_iter()
        .map(|(alpha, pts)| {
            let thetas: Vec<f64> = pts.iter().map(|p| p.theta).collect();
            let counts: Vec<f64> = pts.iter().map(|p| p.counts as f64).collect();
            let v = visibility(&thetas, &counts, VisibilityMethod::Fitted).unwrap();
            (alpha, v)
        })
        .collect()
}

#[test]
fn criterion_01_analytic_oracle() {
    let start = Instant::now();
    let post = probe_state(3);
    let mut uniform = lcg_stream(11);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let alpha = (uniform() - 0.5) * std::f64::consts::PI;
        let theta = uniform() * std::f64::consts::TAU;
        let p = detection_probability(&post, alpha, &SectorSpec::new(theta, 1)).unwrap();
        worst = worst.max((p - fringe_law(alpha, theta)).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-10, "worst deviation {worst}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: simulated pipeline matches the fringe law at 1e4 random \
         points (worst {worst:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_visibility_law() {
    let start = Instant::now();
    let alphas_deg = [0.0f64, 15.0, 22.5, 30.0, 45.0];
    let alphas: Vec<f64> = alphas_deg.iter().map(|d| d.to_radians()).collect();
    let channel = ChannelModel::free_space(3);
    let config = ScanConfig::new(alphas, 100_000, 1).unwrap();
    let scan = simulate_counts(&config, &channel).unwrap();
    let mut worst = 0.0f64;
    for (alpha, v) in fitted_visibilities(&scan) {
        let expected = (2.0 * alpha).sin().abs();
        let err = (v - expected).abs();
        assert!(
            err < 0.01,
            "alpha {:.1} deg: fitted {v:.4} vs |sin 2a| {expected:.4}",
            alpha.to_degrees()
        );
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 2: fitted visibility matches |sin 2a| within 0.01 pointwise \
         (worst {worst:.4}, {elapsed:?})"
    );
}

#[test]
fn criterion_03_free_space_endpoints() {
    let channel = ChannelModel::free_space(3);
    let config = ScanConfig::new(vec![0.0, QUARTER], 100_000, 2024).unwrap();
    let scan = simulate_counts(&config, &channel).unwrap();
    let report = channel_report(&scan).unwrap();
    assert!(report.v_max.value >= 0.99, "V_max = {}", report.v_max.value);
    assert!(report.v_min.value <= 0.02, "V_min = {}", report.v_min.value);
    println!(
        "[PASS] criterion 3: free-space report endpoints V_max = {:.4} >= 0.99, \
         V_min = {:.4} <= 0.02",
        report.v_max.value, report.v_min.value
    );
}

#[test]
fn criterion_04_fiber_calibration_round_trip() {
    let start = Instant::now();
    let (v_min_target, v_max_target) = (0.17, 0.98);
    let params = calibrate_channel(v_min_target, v_max_target).unwrap();
    let channel = ChannelModel::fiber(3, "calibrated_fiber", &params).unwrap();
    let config = ScanConfig::new(vec![QUARTER, HALF_PI], 100_000, 7).unwrap();
    let scan = simulate_counts(&config, &channel).unwrap();
    let fitted = fitted_visibilities(&scan);
    let v_max = fitted
        .iter()
        .find(|(a, _)| (a - QUARTER).abs() < 1e-9)
        .unwrap()
        .1;
    let v_min = fitted
        .iter()
        .find(|(a, _)| (a - HALF_PI).abs() < 1e-9)
        .unwrap()
        .1;
    let elapsed = start.elapsed();
    assert!(
        (v_min - v_min_target).abs() <= 0.01,
        "recovered V_min {v_min:.4} vs target {v_min_target}"
    );
    assert!(
        (v_max - v_max_target).abs() <= 0.01,
        "recovered V_max {v_max:.4} vs target {v_max_target}"
    );
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 4: calibration round trip recovered V_min = {v_min:.4} \
         (target {v_min_target}), V_max = {v_max:.4} (target {v_max_target}) \
         with epsilon_xt = {:.5} ({elapsed:?})",
        params.epsilon_xt
    );
}

#[test]
fn criterion_05_complementarity_suite() {
    let alphas_deg = [0.0f64, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0];
    let alphas: Vec<f64> = alphas_deg.iter().map(|d| d.to_radians()).collect();
    let mut uniform = lcg_stream(99);

    // The ideal pipeline saturates the bound at every alpha.
    let ideal = ChannelModel::free_space(3);
    let ideal_post = probe_state(3);
    let config = ScanConfig::new(alphas.clone(), 100_000, 500).unwrap();
    let scan = simulate_counts(&config, &ideal).unwrap();
    for (alpha, v) in fitted_visibilities(&scan) {
        let d = distinguishability(&ideal_post, alpha).unwrap();
        let sum = v * v + d * d;
        assert!(
            (sum - 1.0).abs() <= 0.02,
            "ideal pipeline at alpha {:.1} deg: V^2 + D^2 = {sum:.4}",
            alpha.to_degrees()
        );
    }

    // 50 random channels: unitary fiber draws plus some dephasing.
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let channel = if k % 10 == 9 {
            ChannelModel::oam_dephasing(3, 1, uniform() * std::f64::consts::PI).unwrap()
        } else {
            let params = FiberChannelParams {
                epsilon_xt: uniform() * 0.5,
                pol_rotation: uniform() * std::f64::consts::TAU,
                intermodal_phase: uniform() * std::f64::consts::TAU,
                seed: k,
            };
            ChannelModel::fiber(3, "random_fiber", &params).unwrap()
        };
        let config = ScanConfig::new(alphas.clone(), 100_000, 1000 + k).unwrap();
        let scan = simulate_counts(&config, &channel).unwrap();
        let probe = probe_state(3);
        let pure_post = channel.apply_pure(&probe).unwrap();
        for (alpha, v) in fitted_visibilities(&scan) {
            let d = match &pure_post {
                Some(state) => distinguishability(state, alpha).unwrap(),
                None => {
                    let rho = channel.apply(&probe).unwrap();
                    distinguishability_density(&rho, 3, alpha).unwrap()
                }
            };
            let sum = v * v + d * d;
            assert!(
                sum <= 1.0 + 0.02,
                "channel {k} at alpha {:.1} deg: V^2 + D^2 = {sum:.4}",
                alpha.to_degrees()
            );
            worst = worst.max(sum);
        }
    }
    println!(
        "[PASS] criterion 5: V^2 + D^2 <= 1.02 for 50 random channels across the alpha \
         grid (worst {worst:.4}); ideal pipeline saturates the bound within 0.02"
    );
}

#[test]
fn criterion_06_qplate_contract() {
    let plate = QPlateSpec::new(0.5).unwrap();

    let from_r = apply_qplate(&SpinOrbitState::scalar_mode(3, Pol::R, 0).unwrap(), &plate).unwrap();
    let amp = from_r.amplitude(Pol::L, -1).unwrap();
    assert!((amp.re - 1.0).abs() < 1e-12 && amp.im.abs() < 1e-12);
    let leak: f64 = from_r
        .entries()
        .filter(|&(p, l, _)| !(p == Pol::L && l == -1))
        .map(|(_, _, a)| a.norm_sqr())
        .sum();
    assert!(leak < 1e-24);

    let from_l = apply_qplate(&SpinOrbitState::scalar_mode(3, Pol::L, 0).unwrap(), &plate).unwrap();
    let amp = from_l.amplitude(Pol::R, 1).unwrap();
    assert!((amp.re - 1.0).abs() < 1e-12 && amp.im.abs() < 1e-12);

    println!(
        "[PASS] criterion 6: q = 0.5 plate maps |R>|0> -> |L>|-1> and |L>|0> -> |R>|+1> \
         with unit amplitude"
    );
}

#[test]
fn criterion_07_fringe_geometry() {
    for &ell in &[1i32, 2, 3, 10] {
        let state = oam_pair_state(ell, 0.0).unwrap();
        let lobes = count_azimuthal_lobes(&state, 256).unwrap();
        assert_eq!(lobes, 2 * ell as usize, "ell = {ell}: {lobes} lobes");
    }
    println!("[PASS] criterion 7: rendered |l> + |-l> fringes show exactly 2|l| lobes for l in {{1, 2, 3, 10}}");
}

#[test]
fn criterion_08_fiber_radial_profile() {
    // Series oracle, independent of the production Bessel path.
    fn j_series(n: u32, x: f64, terms: usize) -> f64 {
        let half = 0.5 * x;
        let mut term = 1.0f64;
        for k in 1..=n {
            term *= half / k as f64;
        }
        let mut sum = term;
        for k in 1..terms {
            term *= -(half * half) / (k as f64 * (k as f64 + n as f64));
            sum += term;
        }
        sum
    }

    let mut fiber = FiberSpec::bench_default();
    let (beta, sigma) = fiber.solve_mode(1, 1).unwrap();
    let v = fiber.v_number();
    assert!(
        (beta * beta + sigma * sigma - v * v).abs() < 1e-9 * v * v,
        "beta^2 + sigma^2 = {} vs V^2 = {}",
        beta * beta + sigma * sigma,
        v * v
    );

    let a = fiber.core_radius_um();
    let (core, cladding) = fiber.branch_values_at_boundary(1, 1).unwrap();
    assert!((core - 1.0).abs() < 1e-9, "core branch at r=a: {core}");
    assert!(
        (cladding - 1.0).abs() < 1e-9,
        "cladding branch at r=a: {cladding}"
    );

    let mut worst = 0.0f64;
    for i in 0..100 {
        let r = a * i as f64 / 100.0;
        let got = fiber.radial_profile(1, 1, r).unwrap();
        let oracle = j_series(1, beta * r / a, 40) / j_series(1, beta, 40);
        worst = worst.max((got - oracle).abs());
    }
    assert!(worst < 1e-8, "worst profile deviation {worst}");
    println!(
        "[PASS] criterion 8: radial profile continuous at r = a, beta^2 + sigma^2 = V^2, \
         and matches the series oracle at 100 radii (worst {worst:.2e})"
    );
}

#[test]
fn criterion_09_oam_spectrum_endpoints() {
    let post = probe_state(3);
    let qwp = WaveplateSpec::quarter(QUARTER);

    let marked = apply_analyzer(&apply_waveplate(&post, &qwp), &AnalyzerSpec::new(0.0));
    let spectrum = oam_spectrum(&marked);
    let peak = spectrum.iter().cloned().fold(0.0f64, f64::max);
    assert!(peak >= 0.999, "marked-peak weight {peak}");

    let erased = apply_analyzer(&apply_waveplate(&post, &qwp), &AnalyzerSpec::new(QUARTER));
    let spectrum = oam_spectrum(&erased);
    assert!(
        (spectrum[4] - 0.5).abs() <= 1e-9,
        "weight at +1: {}",
        spectrum[4]
    );
    assert!(
        (spectrum[2] - 0.5).abs() <= 1e-9,
        "weight at -1: {}",
        spectrum[2]
    );

    let params = calibrate_channel(0.17, 0.98).unwrap();
    let channel = ChannelModel::fiber(3, "calibrated_fiber", &params).unwrap();
    let after_fiber = channel.apply_pure(&probe_state(3)).unwrap().unwrap();
    let spectrum = oam_spectrum(&after_fiber);
    let outside: f64 = spectrum
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != 2 && k != 4)
        .map(|(_, w)| w)
        .sum();
    assert!(
        outside > 1e-4,
        "cross-talk weight outside l = +-1: {outside}"
    );
    println!(
        "[PASS] criterion 9: spectrum is a single peak when marked, 0.5/0.5 when erased, \
         and the calibrated fiber leaks {outside:.4} outside l = +-1"
    );
}
