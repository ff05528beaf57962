//! The two-stage projective measurement: polarization analyzer followed by
//! an azimuthal sector scan, plus photon-count simulation and the derived
//! wave/particle quantities.
//!
//! The detection chain is fixed: a quarter waveplate at 45 deg converts the
//! circular markers to linear, the analyzer projects onto
//! cos(alpha)|H> + sin(alpha)|V>, and the sector hologram projects the OAM
//! factor onto (|l> + e^{i 2 theta}|-l>)/sqrt(2). Detection probabilities
//! are conditioned on analyzer passage, so for the ideal pipeline
//! P(alpha, theta) = (1 + sin(2 alpha) cos(2 theta + delta))/2 with
//! delta = [`crate::elements::predict_delta`], and P stays in [0, 1] for
//! every channel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::ChannelModel;
use crate::characterization::fit_fringe;
use crate::elements::{
    apply_analyzer, apply_qplate, apply_waveplate, waveplate_matrix, AnalyzerSpec, QPlateSpec,
    WaveplateSpec,
};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, vdot, CMat, DensityMatrix, C64};
use crate::spinorbit::{SpinOrbitState, VectorModeSpec};
use crate::stream::mix_key;

/// Azimuthal sector analyzer: intermodal phase theta on the +-ell pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub theta: f64,
    pub ell: u32,
}

impl SectorSpec {
    pub fn new(theta: f64, ell: u32) -> Self {
        Self { theta, ell }
    }

    /// Normalized sector amplitudes on the OAM factor, indexed by l + l_max.
    pub fn oam_amplitudes(&self, l_max: u32) -> Result<Vec<C64>> {
        if self.ell > l_max {
            return Err(Error::OamOutOfRange {
                ell: self.ell as i32,
                l_max,
            });
        }
        let n = 2 * l_max as usize + 1;
        let mut v = vec![C64::new(0.0, 0.0); n];
        let w = std::f64::consts::FRAC_1_SQRT_2;
        v[(self.ell as i32 + l_max as i32) as usize] = C64::new(w, 0.0);
        v[(-(self.ell as i32) + l_max as i32) as usize] = C64::from_polar(w, 2.0 * self.theta);
        Ok(v)
    }

    /// Full-space rank-one projector |theta><theta| (x) I_pol.
    pub fn projector_matrix(&self, l_max: u32) -> Result<CMat> {
        let s = self.oam_amplitudes(l_max)?;
        let n = s.len();
        let oam = CMat::from_fn(n, |i, j| s[i] * s[j].conj());
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Ok(CMat::kron_pol_oam(&[[one, zero], [zero, one]], &oam))
    }
}

/// The hybrid probe state the scans launch into the channel: a q = 0.5
/// plate acting on a horizontally polarized Gaussian.
pub fn probe_state(l_max: u32) -> SpinOrbitState {
    let input = SpinOrbitState::vector_mode(l_max, VectorModeSpec::Custom { ell: 0, zeta: 0.0 })
        .expect("l = 0 is always in range");
    let plate = QPlateSpec::new(0.5).expect("half-integer charge");
    apply_qplate(&input, &plate).expect("|2q| = 1 <= l_max")
}

/// Passage probabilities below this are treated as zero: far above the
/// ~1e-32 floating-point residue a crossed analyzer leaves, far below any
/// physical passage probability.
const ZERO_PASSAGE: f64 = 1e-14;

fn detection_qwp() -> WaveplateSpec {
    WaveplateSpec::quarter(std::f64::consts::FRAC_PI_4)
}

/// Detection probability for a pure post-channel state, conditioned on
/// analyzer passage. Returns 0 when no photons pass the analyzer.
pub fn detection_probability(
    post_channel: &SpinOrbitState,
    alpha: f64,
    sector: &SectorSpec,
) -> Result<f64> {
    let sector_amps = sector.oam_amplitudes(post_channel.l_max())?;
    let linear = apply_waveplate(post_channel, &detection_qwp());
    let projected = apply_analyzer(&linear, &AnalyzerSpec::new(alpha));
    let p_pol = norm_sq(projected.amplitudes());
    if p_pol <= ZERO_PASSAGE {
        return Ok(0.0);
    }
    let n = post_channel.oam_count();
    let amps = projected.amplitudes();
    let mut joint = 0.0;
    for pol in 0..2 {
        let overlap = vdot(&sector_amps, &amps[pol * n..(pol + 1) * n])?;
        joint += overlap.norm_sqr();
    }
    Ok((joint / p_pol).clamp(0.0, 1.0))
}

/// Detection probability for a general (possibly mixed) post-channel state.
pub fn detection_probability_density(
    rho_post: &DensityMatrix,
    l_max: u32,
    alpha: f64,
    sector: &SectorSpec,
) -> Result<f64> {
    let qwp = waveplate_matrix(&detection_qwp(), l_max);
    let rho_linear = qwp.mul_mat(rho_post.matrix())?.mul_mat(&qwp.adjoint())?;
    let p_alpha = AnalyzerSpec::new(alpha).projector_matrix(l_max);
    let after_pol = p_alpha.mul_mat(&rho_linear)?.mul_mat(&p_alpha)?;
    let p_pol = after_pol.trace().re;
    if p_pol <= ZERO_PASSAGE {
        return Ok(0.0);
    }
    let p_sector = sector.projector_matrix(l_max)?;
    let joint = p_sector.mul_mat(&after_pol)?.mul_mat(&p_sector)?.trace().re;
    Ok((joint / p_pol).clamp(0.0, 1.0))
}

/// Scan settings: analyzer angles, sector grid, photon budget and seed.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Analyzer angles in radians.
    pub alphas: Vec<f64>,
    /// Sector angles in radians.
    pub thetas: Vec<f64>,
    /// Photons per (alpha, theta) setting.
    pub photons: u64,
    /// Master seed for the per-setting count streams.
    pub seed: u64,
    /// The +-l pair being interfered.
    pub sector_ell: u32,
}

impl ScanConfig {
    /// Default sector grid: theta in [0, 2 pi) in 5 degree steps.
    pub fn new(alphas: Vec<f64>, photons: u64, seed: u64) -> Result<Self> {
        Self::with_theta_step(alphas, 5.0_f64.to_radians(), photons, seed)
    }

    pub fn with_theta_step(
        alphas: Vec<f64>,
        theta_step: f64,
        photons: u64,
        seed: u64,
    ) -> Result<Self> {
        if theta_step <= 0.0 || theta_step > std::f64::consts::PI {
            return Err(Error::ParameterOutOfRange {
                name: "theta_step",
                value: theta_step,
                expected: "0 < step <= pi radians",
            });
        }
        let n = (std::f64::consts::TAU / theta_step).round() as usize;
        let thetas = (0..n).map(|i| i as f64 * theta_step).collect();
        Self::with_grids(alphas, thetas, photons, seed)
    }

    pub fn with_grids(alphas: Vec<f64>, thetas: Vec<f64>, photons: u64, seed: u64) -> Result<Self> {
        if alphas.is_empty() || thetas.is_empty() {
            return Err(Error::TooFewSamples { got: 0, need: 1 });
        }
        if photons == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "photons",
                value: 0.0,
                expected: "at least one photon per setting",
            });
        }
        Ok(Self {
            alphas,
            thetas,
            photons,
            seed,
            sector_ell: 1,
        })
    }
}

/// One measured setting of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub alpha: f64,
    pub theta: f64,
    pub ideal_prob: f64,
    pub counts: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanMeta {
    pub channel_label: String,
    pub seed: u64,
    pub photons_per_setting: u64,
}

/// Full scan: grid of settings with ideal probabilities and simulated counts.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub meta: ScanMeta,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    /// Points grouped by analyzer angle, preserving the sorted order.
    pub fn by_alpha(&self) -> Vec<(f64, Vec<&ScanPoint>)> {
        let mut groups: Vec<(f64, Vec<&ScanPoint>)> = Vec::new();
        for p in &self.points {
            match groups.last_mut() {
                Some((a, v)) if *a == p.alpha => v.push(p),
                _ => groups.push((p.alpha, vec![p])),
            }
        }
        groups
    }

    /// CSV export: `alpha_deg,theta_deg,ideal_prob,counts`, angles printed
    /// in degrees with six decimals, rows sorted by (alpha, theta).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha_deg,theta_deg,ideal_prob,counts\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.6},{:.6},{:.9},{}\n",
                p.alpha.to_degrees(),
                p.theta.to_degrees(),
                p.ideal_prob,
                p.counts
            ));
        }
        out
    }

    /// Parse the CSV schema written by [`to_csv`]. Metadata is not carried
    /// by the file, so the result gets placeholder meta.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::CsvSchema {
            line: 1,
            detail: "empty file".into(),
        })?;
        if header.trim_end() != "alpha_deg,theta_deg,ideal_prob,counts" {
            return Err(Error::CsvSchema {
                line: 1,
                detail: format!("bad header '{header}'"),
            });
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::CsvSchema {
                    line: line_no,
                    detail: format!("expected 4 columns, got {}", fields.len()),
                });
            }
            let parse_f = |i: usize, name: &str| -> Result<f64> {
                fields[i].trim().parse().map_err(|_| Error::CsvSchema {
                    line: line_no,
                    detail: format!("column {name}: cannot parse '{}'", fields[i]),
                })
            };
            let alpha_deg = parse_f(0, "alpha_deg")?;
            let theta_deg = parse_f(1, "theta_deg")?;
            let ideal_prob = parse_f(2, "ideal_prob")?;
            let counts: u64 = fields[3].trim().parse().map_err(|_| Error::CsvSchema {
                line: line_no,
                detail: format!("column counts: cannot parse '{}'", fields[3]),
            })?;
            points.push(ScanPoint {
                alpha: alpha_deg.to_radians(),
                theta: theta_deg.to_radians(),
                ideal_prob,
                counts,
            });
        }
        if points.is_empty() {
            return Err(Error::CsvSchema {
                line: 1,
                detail: "no data rows".into(),
            });
        }
        Ok(Self {
            meta: ScanMeta {
                channel_label: "imported".into(),
                seed: 0,
                photons_per_setting: 0,
            },
            points,
        })
    }
}

/// Propagated probe, kept pure when the channel has a single operator term.
enum Propagated {
    Pure(SpinOrbitState),
    Mixed(DensityMatrix),
}

fn propagate_probe(channel: &ChannelModel) -> Result<Propagated> {
    let probe = probe_state(channel.l_max());
    Ok(match channel.apply_pure(&probe)? {
        Some(state) => Propagated::Pure(state),
        None => Propagated::Mixed(channel.apply(&probe)?),
    })
}

/// Noiseless detection probabilities of the standard probe through a channel.
pub fn ideal_probabilities(
    channel: &ChannelModel,
    alpha: f64,
    thetas: &[f64],
    sector_ell: u32,
) -> Result<Vec<f64>> {
    let propagated = propagate_probe(channel)?;
    thetas
        .iter()
        .map(|&theta| {
            let sector = SectorSpec::new(theta, sector_ell);
            match &propagated {
                Propagated::Pure(s) => detection_probability(s, alpha, &sector),
                Propagated::Mixed(rho) => {
                    detection_probability_density(rho, channel.l_max(), alpha, &sector)
                }
            }
        })
        .collect()
}

/// Simulate a full scan: counts at each setting are Poisson with mean
/// N * P(alpha, theta), drawn from a stream keyed by (seed, alpha index,
/// theta index) so results do not depend on evaluation order.
pub fn simulate_counts(config: &ScanConfig, channel: &ChannelModel) -> Result<ScanResult> {
    let propagated = propagate_probe(channel)?;
    let mut points = Vec::with_capacity(config.alphas.len() * config.thetas.len());
    for (ai, &alpha) in config.alphas.iter().enumerate() {
        for (ti, &theta) in config.thetas.iter().enumerate() {
            let sector = SectorSpec::new(theta, config.sector_ell);
            let p = match &propagated {
                Propagated::Pure(s) => detection_probability(s, alpha, &sector)?,
                Propagated::Mixed(rho) => {
                    detection_probability_density(rho, channel.l_max(), alpha, &sector)?
                }
            };
            let mean = config.photons as f64 * p;
            let counts = if mean > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_key(config.seed, ai as u64, ti as u64));
                Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64
            } else {
                0
            };
            points.push(ScanPoint {
                alpha,
                theta,
                ideal_prob: p,
                counts,
            });
        }
    }
    points.sort_by(|a, b| {
        (a.alpha, a.theta)
            .partial_cmp(&(b.alpha, b.theta))
            .expect("finite angles")
    });
    Ok(ScanResult {
        meta: ScanMeta {
            channel_label: channel.label().to_string(),
            seed: config.seed,
            photons_per_setting: config.photons,
        },
        points,
    })
}

/// How P_max and P_min are extracted from a fringe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisibilityMethod {
    /// From the fitted sinusoid (robust to shot noise). The default.
    Fitted,
    /// From the raw extrema of the counts.
    RawExtrema,
}

/// Fringe visibility (P_max - P_min)/(P_max + P_min) from counts over theta.
///
/// Requires at least 8 samples spanning at least half a fringe period
/// (the fringe is pi-periodic in theta).
pub fn visibility(thetas: &[f64], counts: &[f64], method: VisibilityMethod) -> Result<f64> {
    if thetas.len() != counts.len() {
        return Err(Error::DimensionMismatch {
            left: thetas.len(),
            right: counts.len(),
        });
    }
    if thetas.len() < 8 {
        return Err(Error::TooFewSamples {
            got: thetas.len(),
            need: 8,
        });
    }
    let span = thetas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - thetas.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < std::f64::consts::FRAC_PI_2 - 1e-9 {
        return Err(Error::InsufficientThetaSpan {
            span_deg: span.to_degrees(),
            need_deg: 90.0,
        });
    }
    if counts.iter().all(|&c| c == 0.0) {
        return Err(Error::UndefinedVisibility);
    }
    match method {
        VisibilityMethod::Fitted => {
            let samples: Vec<(f64, f64)> =
                thetas.iter().cloned().zip(counts.iter().cloned()).collect();
            Ok(fit_fringe(&samples)?.visibility)
        }
        VisibilityMethod::RawExtrema => {
            let max = counts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = counts.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(((max - min) / (max + min)).clamp(0.0, 1.0))
        }
    }
}

/// Which-path distinguishability: the OAM-sign imbalance of the state that
/// passes the analyzer at `alpha`.
pub fn distinguishability(post_channel: &SpinOrbitState, alpha: f64) -> Result<f64> {
    let linear = apply_waveplate(post_channel, &detection_qwp());
    let projected = apply_analyzer(&linear, &AnalyzerSpec::new(alpha));
    let total = norm_sq(projected.amplitudes());
    if total <= ZERO_PASSAGE {
        return Err(Error::ZeroNormProjection);
    }
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (_, ell, a) in projected.entries() {
        if ell > 0 {
            plus += a.norm_sqr();
        } else if ell < 0 {
            minus += a.norm_sqr();
        }
    }
    Ok(((plus - minus) / total).abs())
}

/// Density-operator variant of [`distinguishability`].
pub fn distinguishability_density(rho_post: &DensityMatrix, l_max: u32, alpha: f64) -> Result<f64> {
    let qwp = waveplate_matrix(&detection_qwp(), l_max);
    let rho_linear = qwp.mul_mat(rho_post.matrix())?.mul_mat(&qwp.adjoint())?;
    let p_alpha = AnalyzerSpec::new(alpha).projector_matrix(l_max);
    let after = p_alpha.mul_mat(&rho_linear)?.mul_mat(&p_alpha)?;
    let total = after.trace().re;
    if total <= ZERO_PASSAGE {
        return Err(Error::ZeroNormProjection);
    }
    let n = 2 * l_max as usize + 1;
    let mut plus = 0.0;
    let mut minus = 0.0;
    for pol in 0..2 {
        for k in 0..n {
            let ell = k as i32 - l_max as i32;
            let w = after.get(pol * n + k, pol * n + k).re;
            if ell > 0 {
                plus += w;
            } else if ell < 0 {
                minus += w;
            }
        }
    }
    Ok(((plus - minus) / total).abs())
}

/// OAM marginal probability per l (index l + l_max), normalized to 1.
pub fn oam_spectrum(state: &SpinOrbitState) -> Vec<f64> {
    let mut w = state.oam_weights();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        for v in &mut w {
            *v /= total;
        }
    }
    w
}

/// OAM marginal of a density operator, tracing out polarization.
pub fn oam_spectrum_density(rho: &DensityMatrix, l_max: u32) -> Vec<f64> {
    let n = 2 * l_max as usize + 1;
    let mut w = vec![0.0; n];
    for pol in 0..2 {
        for (k, wk) in w.iter_mut().enumerate() {
            *wk += rho.matrix().get(pol * n + k, pol * n + k).re;
        }
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        for v in &mut w {
            *v /= total;
        }
    }
    w
}

/// Wave/particle complementarity record for one analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComplementarityRecord {
    pub visibility: f64,
    pub distinguishability: f64,
    pub satisfied: bool,
}

/// Tolerance on V^2 + D^2 <= 1.
pub const COMPLEMENTARITY_TOL: f64 = 1e-6;

pub fn complementarity_check(v: f64, d: f64) -> Result<ComplementarityRecord> {
    for (name, x) in [("visibility", v), ("distinguishability", d)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ParameterOutOfRange {
                name,
                value: x,
                expected: "within [0, 1]",
            });
        }
    }
    Ok(ComplementarityRecord {
        visibility: v,
        distinguishability: d,
        satisfied: v * v + d * d <= 1.0 + COMPLEMENTARITY_TOL,
    })
}
