//! Fringe-model fitting, visibility curves, channel calibration and the
//! channel-quality report.
//!
//! The fringe model is y = A (1 + V cos(2 theta + phi)). It is linear in
//! (c0, c1, c2) = (A, A V cos phi, -A V sin phi) against the regressors
//! (1, cos 2 theta, sin 2 theta), so the fit is a closed-form 3x3 normal
//! equation solve with no starting point or iteration. Uncertainties on one
//! scan come from the linear-model covariance; visibility curves add a
//! parametric bootstrap over Poisson resamples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::channel::{ChannelModel, FiberChannelParams};
use crate::error::{Error, Result};
use crate::measurement::{
    complementarity_check, distinguishability, ideal_probabilities, probe_state, visibility,
    ComplementarityRecord, ScanResult, VisibilityMethod,
};
use crate::spinorbit::DEFAULT_L_MAX;
use crate::stream::mix_key;

/// Result of fitting A (1 + V cos(2 theta + phi)) to counts over theta.
#[derive(Debug, Clone, Copy)]
pub struct FringeFit {
    pub amplitude: f64,
    /// Clipped to [0, 1].
    pub visibility: f64,
    /// Radians, in (-pi, pi].
    pub phase: f64,
    pub residual_rms: f64,
    pub amplitude_stderr: f64,
    pub visibility_stderr: f64,
    /// Infinite when the fringe is flat and the phase is undefined.
    pub phase_stderr: f64,
}

/// Closed-form least-squares fringe fit.
pub fn fit_fringe(samples: &[(f64, f64)]) -> Result<FringeFit> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::TooFewSamples { got: n, need: 8 });
    }
    let total: f64 = samples.iter().map(|&(_, y)| y).sum();
    if total <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }

    // Normal equations for regressors (1, cos 2t, sin 2t).
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for &(t, y) in samples {
        let row = [1.0, (2.0 * t).cos(), (2.0 * t).sin()];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * y;
        }
    }
    let xtx_inv = invert3(&xtx).ok_or(Error::SingularFit)?;
    let mut c = [0.0f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i] += xtx_inv[i][j] * xty[j];
        }
    }

    let rss: f64 = samples
        .iter()
        .map(|&(t, y)| {
            let fit = c[0] + c[1] * (2.0 * t).cos() + c[2] * (2.0 * t).sin();
            (y - fit) * (y - fit)
        })
        .sum();
    let residual_rms = (rss / n as f64).sqrt();
    let sigma_sq = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let cov = |i: usize, j: usize| sigma_sq * xtx_inv[i][j];

    let amplitude = c[0];
    let r = (c[1] * c[1] + c[2] * c[2]).sqrt();
    if amplitude <= 0.0 || r / amplitude.abs().max(1e-300) < 1e-12 {
        // Flat fringe: visibility zero, phase undefined.
        return Ok(FringeFit {
            amplitude: amplitude.max(0.0),
            visibility: 0.0,
            phase: 0.0,
            residual_rms,
            amplitude_stderr: cov(0, 0).max(0.0).sqrt(),
            visibility_stderr: ((cov(1, 1) + cov(2, 2)).max(0.0)).sqrt()
                / amplitude.abs().max(1e-300),
            phase_stderr: f64::INFINITY,
        });
    }

    let visibility = (r / amplitude).clamp(0.0, 1.0);
    // c1 = A V cos phi, c2 = -A V sin phi.
    let phase = (-c[2]).atan2(c[1]);

    // Delta-method propagation through V = r/c0 and phi = atan2(-c2, c1).
    let dv = [
        -r / (amplitude * amplitude),
        c[1] / (r * amplitude),
        c[2] / (r * amplitude),
    ];
    let dphi = [0.0, c[2] / (r * r), -c[1] / (r * r)];
    let quad = |g: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += g[i] * cov(i, j) * g[j];
            }
        }
        s.max(0.0)
    };
    Ok(FringeFit {
        amplitude,
        visibility,
        phase,
        residual_rms,
        amplitude_stderr: cov(0, 0).max(0.0).sqrt(),
        visibility_stderr: quad(&dv).sqrt(),
        phase_stderr: quad(&dphi).sqrt(),
    })
}

#[allow(clippy::needless_range_loop)] // cofactor indices are the math here
fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale: f64 = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if det.abs() < 1e-12 * scale.powi(3).max(1e-300) {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut inv = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let (c, d) = ((j + 1) % 3, (j + 2) % 3);
            inv[j][i] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) * inv_det;
        }
    }
    Some(inv)
}

/// Fitted visibility with bootstrap uncertainty at one analyzer angle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VisibilityPoint {
    pub alpha: f64,
    pub visibility: f64,
    pub sigma: f64,
}

const BOOTSTRAP_DRAWS: usize = 200;

/// Per-alpha fitted visibilities with parametric-bootstrap uncertainties.
pub fn visibility_curve(scan: &ScanResult) -> Result<Vec<VisibilityPoint>> {
    let groups = scan.by_alpha();
    if groups.len() < 2 {
        return Err(Error::TooFewSamples {
            got: groups.len(),
            need: 2,
        });
    }
    groups
        .iter()
        .enumerate()
        .map(|(ai, (alpha, points))| {
            let thetas: Vec<f64> = points.iter().map(|p| p.theta).collect();
            let counts: Vec<f64> = points.iter().map(|p| p.counts as f64).collect();
            let v = visibility(&thetas, &counts, VisibilityMethod::Fitted)?;
            let sigma = bootstrap_sigma(&thetas, &counts, scan.meta.seed, ai as u64)?;
            Ok(VisibilityPoint {
                alpha: *alpha,
                visibility: v,
                sigma,
            })
        })
        .collect()
}

fn bootstrap_sigma(thetas: &[f64], counts: &[f64], seed: u64, alpha_idx: u64) -> Result<f64> {
    let mut vs = Vec::with_capacity(BOOTSTRAP_DRAWS);
    for draw in 0..BOOTSTRAP_DRAWS {
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix_key(seed ^ 0xB007_57A9, alpha_idx, draw as u64));
        let resampled: Vec<f64> = counts
            .iter()
            .map(|&c| {
                if c > 0.0 {
                    Poisson::new(c).expect("positive mean").sample(&mut rng)
                } else {
                    0.0
                }
            })
            .collect();
        let samples: Vec<(f64, f64)> = thetas.iter().cloned().zip(resampled).collect();
        vs.push(fit_fringe(&samples)?.visibility);
    }
    let mean = vs.iter().sum::<f64>() / vs.len() as f64;
    let var = vs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vs.len() - 1) as f64;
    Ok(var.sqrt())
}

/// Noiseless fitted visibility of the standard probe through a channel.
pub fn analytic_visibility(channel: &ChannelModel, alpha: f64) -> Result<f64> {
    let thetas: Vec<f64> = (0..72).map(|i| i as f64 * 5f64.to_radians()).collect();
    let probs = ideal_probabilities(channel, alpha, &thetas, 1)?;
    if probs.iter().all(|&p| p <= 0.0) {
        return Ok(0.0);
    }
    let samples: Vec<(f64, f64)> = thetas.into_iter().zip(probs).collect();
    Ok(fit_fringe(&samples)?.visibility)
}

const MARKED_ALPHA: f64 = std::f64::consts::FRAC_PI_2; // 90 deg
const ERASED_ALPHA: f64 = std::f64::consts::FRAC_PI_4; // 45 deg
const CALIBRATION_V_TOL: f64 = 1e-3;
const CALIBRATION_VMAX_TOL: f64 = 1e-2;

/// Invert the fiber model so the marked-setting visibility matches
/// `v_min_target` and the erased-setting visibility comes as close to
/// `v_max_target` as the unitary family permits.
///
/// The marked-setting link epsilon_xt -> V_min is verified monotone at run
/// time before bisecting. The mirror-coupling phase is then chosen to meet
/// the erased-setting target; a unitary channel cannot push V(45 deg) below
/// sqrt(1 - V_min^2), so targets further away than 0.01 are infeasible.
pub fn calibrate_channel(v_min_target: f64, v_max_target: f64) -> Result<FiberChannelParams> {
    for (name, v) in [
        ("v_min_target", v_min_target),
        ("v_max_target", v_max_target),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ParameterOutOfRange {
                name,
                value: v,
                expected: "within [0, 1]",
            });
        }
    }
    if v_min_target > v_max_target {
        return Err(Error::InfeasibleTargets {
            reason: format!("V_min target {v_min_target} exceeds V_max target {v_max_target}"),
        });
    }
    if v_min_target == 0.0 {
        let params = FiberChannelParams::identity();
        if (1.0 - v_max_target).abs() > CALIBRATION_VMAX_TOL {
            return Err(Error::InfeasibleTargets {
                reason: format!(
                    "identity channel has V_max = 1, target {v_max_target} out of reach"
                ),
            });
        }
        return Ok(params);
    }

    // Phase that brings the erased-setting visibility down to the target,
    // saturating at quarter-pi-rotation when the target is below the
    // unitary floor sqrt(1 - V_min^2).
    let deficit = (1.0 - v_max_target * v_max_target).max(0.0).sqrt();
    let sin_phase = (deficit / v_min_target).min(1.0);
    let intermodal_phase = sin_phase.asin();
    let floor = (1.0 - v_min_target * v_min_target).sqrt();
    if v_max_target < floor - CALIBRATION_VMAX_TOL {
        return Err(Error::InfeasibleTargets {
            reason: format!(
                "unitary cross-talk with V_min = {v_min_target} cannot push V_max below \
                 {floor:.4}; target {v_max_target} is out of reach"
            ),
        });
    }

    let v_at = |eps: f64| -> Result<f64> {
        let params = FiberChannelParams {
            epsilon_xt: eps,
            pol_rotation: 0.0,
            intermodal_phase,
            seed: 0,
        };
        let ch = ChannelModel::fiber(DEFAULT_L_MAX, "calibration", &params)?;
        analytic_visibility(&ch, MARKED_ALPHA)
    };

    // Verify the monotone link on a coarse grid before trusting bisection.
    let mut prev = -1.0;
    for i in 0..=10 {
        let eps = 0.05 * i as f64;
        let v = v_at(eps)?;
        if v < prev - 1e-9 {
            return Err(Error::InfeasibleTargets {
                reason: format!("visibility link not monotone at epsilon = {eps}"),
            });
        }
        prev = v;
    }
    let v_top = v_at(0.5)?;
    if v_min_target > v_top + CALIBRATION_V_TOL {
        return Err(Error::InfeasibleTargets {
            reason: format!("V_min target {v_min_target} above maximum reachable {v_top:.4}"),
        });
    }

    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if v_at(mid)? < v_min_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let epsilon_xt = 0.5 * (lo + hi);
    let achieved = v_at(epsilon_xt)?;
    if (achieved - v_min_target).abs() > CALIBRATION_V_TOL {
        return Err(Error::InfeasibleTargets {
            reason: format!(
                "bisection stalled: achieved V_min {achieved:.5} vs target {v_min_target}"
            ),
        });
    }
    Ok(FiberChannelParams {
        epsilon_xt,
        pol_rotation: 0.0,
        intermodal_phase,
        seed: 0,
    })
}

/// Default verdict threshold on the marked-setting visibility.
pub const CROSS_TALK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VisibilityEstimate {
    pub value: f64,
    pub sigma: f64,
    pub alpha_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplementarityEntry {
    pub alpha_deg: f64,
    pub visibility: f64,
    pub distinguishability: f64,
    pub satisfied: bool,
}

/// Channel-quality report assembled from one scan.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub v_max: VisibilityEstimate,
    pub v_min: VisibilityEstimate,
    pub delta_estimate_rad: f64,
    pub epsilon_xt_estimate: f64,
    pub complementarity: Vec<ComplementarityEntry>,
    pub cross_talk_threshold: f64,
    pub verdict: String,
}

impl ChannelReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report always serializes")
    }
}

impl std::fmt::Display for ChannelReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "channel report")?;
        writeln!(
            f,
            "  V_max = {:.4} +/- {:.4} at alpha = {:.1} deg",
            self.v_max.value, self.v_max.sigma, self.v_max.alpha_deg
        )?;
        writeln!(
            f,
            "  V_min = {:.4} +/- {:.4} at alpha = {:.1} deg",
            self.v_min.value, self.v_min.sigma, self.v_min.alpha_deg
        )?;
        writeln!(f, "  delta estimate = {:.4} rad", self.delta_estimate_rad)?;
        writeln!(f, "  epsilon_xt estimate = {:.5}", self.epsilon_xt_estimate)?;
        writeln!(f, "  complementarity (V^2 + D^2 <= 1):")?;
        for e in &self.complementarity {
            writeln!(
                f,
                "    alpha = {:>6.1} deg: V = {:.4}, D = {:.4}, {}",
                e.alpha_deg,
                e.visibility,
                e.distinguishability,
                if e.satisfied { "ok" } else { "violated" }
            )?;
        }
        write!(f, "  verdict: {}", self.verdict)
    }
}

/// Build a channel report from a scan containing the erased setting
/// (45 deg) and a marked setting (0 or 90 deg).
pub fn channel_report(scan: &ScanResult) -> Result<ChannelReport> {
    channel_report_with_threshold(scan, CROSS_TALK_THRESHOLD)
}

pub fn channel_report_with_threshold(scan: &ScanResult, threshold: f64) -> Result<ChannelReport> {
    let curve = visibility_curve(scan)?;
    let angle_close = |a: f64, b: f64| (a - b).abs() < 1e-6;
    if !curve.iter().any(|p| angle_close(p.alpha, ERASED_ALPHA)) {
        return Err(Error::MissingSetting { alpha_deg: 45.0 });
    }
    let marked = curve
        .iter()
        .find(|p| angle_close(p.alpha, 0.0) || angle_close(p.alpha, MARKED_ALPHA))
        .ok_or(Error::MissingSetting { alpha_deg: 90.0 })?;

    let highest = curve
        .iter()
        .max_by(|a, b| a.visibility.partial_cmp(&b.visibility).unwrap())
        .expect("non-empty curve");
    let lowest = curve
        .iter()
        .min_by(|a, b| a.visibility.partial_cmp(&b.visibility).unwrap())
        .expect("non-empty curve");

    // Fringe phase at the erased setting estimates the pipeline delta.
    let erased_points: Vec<(f64, f64)> = scan
        .by_alpha()
        .into_iter()
        .find(|(a, _)| angle_close(*a, ERASED_ALPHA))
        .map(|(_, pts)| pts.iter().map(|p| (p.theta, p.counts as f64)).collect())
        .expect("erased setting present");
    let delta_estimate = fit_fringe(&erased_points)?.phase;

    // Invert the marked-setting visibility back to a cross-talk strength.
    let epsilon_xt_estimate = invert_epsilon(marked.visibility)?;

    // Distinguishability per alpha from the reconstructed channel model.
    let recon = ChannelModel::fiber(
        DEFAULT_L_MAX,
        "reconstructed",
        &FiberChannelParams {
            epsilon_xt: epsilon_xt_estimate,
            pol_rotation: 0.0,
            intermodal_phase: 0.0,
            seed: 0,
        },
    )?;
    let post = recon
        .apply_pure(&probe_state(DEFAULT_L_MAX))?
        .expect("fiber model is unitary");
    let complementarity: Vec<ComplementarityEntry> = curve
        .iter()
        .map(|p| {
            let d = distinguishability(&post, p.alpha)?;
            let rec: ComplementarityRecord =
                complementarity_check(p.visibility.clamp(0.0, 1.0), d.clamp(0.0, 1.0))?;
            Ok(ComplementarityEntry {
                alpha_deg: p.alpha.to_degrees(),
                visibility: rec.visibility,
                distinguishability: rec.distinguishability,
                satisfied: rec.satisfied,
            })
        })
        .collect::<Result<_>>()?;

    let verdict = if marked.visibility <= threshold {
        format!(
            "clean channel: marked-setting visibility {:.3} within threshold {:.3}",
            marked.visibility, threshold
        )
    } else {
        format!(
            "cross-talk detected: marked-setting visibility {:.3} exceeds threshold {:.3}",
            marked.visibility, threshold
        )
    };

    Ok(ChannelReport {
        v_max: VisibilityEstimate {
            value: highest.visibility,
            sigma: highest.sigma,
            alpha_deg: highest.alpha.to_degrees(),
        },
        v_min: VisibilityEstimate {
            value: lowest.visibility,
            sigma: lowest.sigma,
            alpha_deg: lowest.alpha.to_degrees(),
        },
        delta_estimate_rad: delta_estimate,
        epsilon_xt_estimate,
        complementarity,
        cross_talk_threshold: threshold,
        verdict,
    })
}

/// Invert the marked-setting visibility to epsilon_xt by bisecting the
/// analytic link; used both by the report and as the calibrate round trip.
fn invert_epsilon(v_min: f64) -> Result<f64> {
    let v = v_min.clamp(0.0, 1.0);
    if v <= 0.0 {
        return Ok(0.0);
    }
    let v_at = |eps: f64| -> Result<f64> {
        let params = FiberChannelParams {
            epsilon_xt: eps,
            pol_rotation: 0.0,
            intermodal_phase: 0.0,
            seed: 0,
        };
        analytic_visibility(
            &ChannelModel::fiber(DEFAULT_L_MAX, "inversion", &params)?,
            MARKED_ALPHA,
        )
    };
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    if v >= v_at(hi)? {
        return Ok(hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if v_at(mid)? < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
