//! Transverse intensity rendering and azimuthal fringe analysis.
//!
//! Each OAM component |l> carries a ring-shaped radial envelope with helical
//! phase exp(i l phi); polarization components add incoherently, OAM
//! components within one polarization add coherently. A balanced
//! |l> + |-l> superposition therefore shows 2|l| azimuthal lobes at the ring
//! radius, while a single |l> gives an azimuthally uniform ring.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinorbit::SpinOrbitState;

/// Minimum supported raster resolution.
pub const MIN_RESOLUTION: usize = 64;

/// Square intensity raster, row-major, top row first.
#[derive(Debug, Clone)]
pub struct Raster {
    size: usize,
    half_width: f64,
    pixels: Vec<f64>,
}

impl Raster {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Physical half-width of the raster in waist units.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    fn pixel(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.size + col]
    }

    /// Bilinear sample at physical coordinates (x, y); zero outside.
    fn sample(&self, x: f64, y: f64) -> f64 {
        let n = self.size as f64;
        let col = (x + self.half_width) / (2.0 * self.half_width) * n - 0.5;
        let row = (self.half_width - y) / (2.0 * self.half_width) * n - 0.5;
        if col < 0.0 || row < 0.0 || col > n - 1.0 || row > n - 1.0 {
            return 0.0;
        }
        let c0 = col.floor() as usize;
        let r0 = row.floor() as usize;
        let c1 = (c0 + 1).min(self.size - 1);
        let r1 = (r0 + 1).min(self.size - 1);
        let fc = col - c0 as f64;
        let fr = row - r0 as f64;
        self.pixel(r0, c0) * (1.0 - fr) * (1.0 - fc)
            + self.pixel(r0, c1) * (1.0 - fr) * fc
            + self.pixel(r1, c0) * fr * (1.0 - fc)
            + self.pixel(r1, c1) * fr * fc
    }

    /// ASCII PGM (P2, maxval 65535), intensity scaled to the raster maximum.
    pub fn to_pgm(&self) -> String {
        let max = self.pixels.iter().cloned().fold(0.0f64, f64::max);
        let mut out = String::with_capacity(self.pixels.len() * 6 + 32);
        out.push_str(&format!("P2\n{} {}\n65535\n", self.size, self.size));
        for row in 0..self.size {
            let mut line = String::with_capacity(self.size * 6);
            for col in 0..self.size {
                if col > 0 {
                    line.push(' ');
                }
                let v = if max > 0.0 {
                    (self.pixel(row, col) / max * 65535.0).round() as u32
                } else {
                    0
                };
                line.push_str(&v.to_string());
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Ring-sampled angular structure of a raster.
#[derive(Debug, Clone)]
pub struct AngularProfile {
    /// Radius (physical units) of the brightest ring.
    pub ring_radius: f64,
    /// Intensity samples at equally spaced angles around that ring.
    pub samples: Vec<f64>,
}

impl AngularProfile {
    /// Variance of the angular samples divided by the squared mean.
    pub fn relative_variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        if mean == 0.0 {
            return 0.0;
        }
        let var = self
            .samples
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / n;
        var / (mean * mean)
    }

    /// Count of azimuthal lobes: maximal circular runs above half the
    /// angular maximum. Returns 0 for an azimuthally uniform ring.
    pub fn lobe_count(&self) -> usize {
        let max = self.samples.iter().cloned().fold(0.0f64, f64::max);
        let min = self.samples.iter().cloned().fold(f64::INFINITY, f64::min);
        if max <= 0.0 || (max - min) < 0.1 * max {
            return 0;
        }
        let threshold = 0.5 * max;
        let above: Vec<bool> = self.samples.iter().map(|&s| s > threshold).collect();
        let n = above.len();
        let mut runs = 0;
        for i in 0..n {
            if above[i] && !above[(i + n - 1) % n] {
                runs += 1;
            }
        }
        runs
    }

    /// Angle (radians) of the brightest sample.
    pub fn peak_angle(&self) -> f64 {
        let (idx, _) =
            self.samples
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                    if v > bv {
                        (i, v)
                    } else {
                        (bi, bv)
                    }
                });
        idx as f64 / self.samples.len() as f64 * std::f64::consts::TAU
    }
}

/// Radial envelope of the |l> component: ring mode of unit waist.
fn radial_envelope(ell: i32, r: f64) -> f64 {
    let l = ell.unsigned_abs();
    let mut norm = 1.0f64;
    for k in 1..=l {
        norm /= k as f64;
    }
    (2.0 / std::f64::consts::PI * norm).sqrt()
        * (std::f64::consts::SQRT_2 * r).powi(l as i32)
        * (-r * r).exp()
}

/// Render the transverse intensity of a spin-orbit state.
///
/// The physical extent adapts to the largest occupied |l| so the brightest
/// ring always falls well inside the frame.
pub fn render_intensity(state: &SpinOrbitState, resolution: usize) -> Result<Raster> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::GridTooSmall {
            resolution,
            min: MIN_RESOLUTION,
        });
    }
    let occupied: Vec<(usize, i32, Complex64)> = state
        .entries()
        .filter(|(_, _, a)| a.norm_sqr() > 1e-24)
        .map(|(pol, ell, a)| (pol.index(), ell, a))
        .collect();
    let max_l = occupied.iter().map(|&(_, l, _)| l.abs()).max().unwrap_or(0);
    let half_width = (max_l as f64 / 2.0).sqrt() * 1.25 + 2.4;

    let n = resolution;
    let mut pixels = vec![0.0f64; n * n];
    for row in 0..n {
        let y = half_width - (row as f64 + 0.5) / n as f64 * 2.0 * half_width;
        for col in 0..n {
            let x = (col as f64 + 0.5) / n as f64 * 2.0 * half_width - half_width;
            let r = (x * x + y * y).sqrt();
            let phi = y.atan2(x);
            let mut field = [Complex64::new(0.0, 0.0); 2];
            for &(pol, ell, amp) in &occupied {
                field[pol] +=
                    amp * radial_envelope(ell, r) * Complex64::from_polar(1.0, ell as f64 * phi);
            }
            pixels[row * n + col] = field[0].norm_sqr() + field[1].norm_sqr();
        }
    }
    Ok(Raster {
        size: n,
        half_width,
        pixels,
    })
}

/// Sample the brightest ring of a raster at `n_angles` equally spaced angles.
pub fn angular_profile(raster: &Raster, n_angles: usize) -> AngularProfile {
    // Locate the ring by the maximum of the angle-averaged radial profile.
    let n_r = 220;
    let n_probe = 180;
    let r_max = raster.half_width * 0.98;
    let mut best = (0.0f64, 0.0f64);
    for i in 1..n_r {
        let r = r_max * i as f64 / n_r as f64;
        let mean: f64 = (0..n_probe)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / n_probe as f64;
                raster.sample(r * phi.cos(), r * phi.sin())
            })
            .sum::<f64>()
            / n_probe as f64;
        if mean > best.1 {
            best = (r, mean);
        }
    }
    let ring = best.0;
    let samples = (0..n_angles)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / n_angles as f64;
            raster.sample(ring * phi.cos(), ring * phi.sin())
        })
        .collect();
    AngularProfile {
        ring_radius: ring,
        samples,
    }
}

/// Convenience: render a state and count its azimuthal lobes.
pub fn count_azimuthal_lobes(state: &SpinOrbitState, resolution: usize) -> Result<usize> {
    let raster = render_intensity(state, resolution)?;
    Ok(angular_profile(&raster, 720).lobe_count())
}

/// Scalar OAM-pair superposition (|l> + e^{i zeta}|-l>)/sqrt(2) carried on a
/// single polarization; the state whose rendering shows azimuthal fringes.
pub fn oam_pair_state(ell: i32, zeta: f64) -> Result<SpinOrbitState> {
    let l_max = ell.unsigned_abs().max(1);
    let mut s = SpinOrbitState::zero(l_max);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    s.set_amplitude(crate::spinorbit::Pol::R, ell, amp)?;
    let existing = s.amplitude(crate::spinorbit::Pol::R, -ell)?;
    s.set_amplitude(
        crate::spinorbit::Pol::R,
        -ell,
        existing + amp * Complex64::from_polar(1.0, zeta),
    )?;
    Ok(s.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinorbit::{Pol, SpinOrbitState, VectorModeSpec};

    #[test]
    fn balanced_pair_shows_two_abs_l_lobes() {
        for &ell in &[1i32, 2, 3] {
            let s = oam_pair_state(ell, 0.0).unwrap();
            let lobes = count_azimuthal_lobes(&s, 128).unwrap();
            assert_eq!(lobes, 2 * ell as usize, "ell = {ell}");
        }
    }

    #[test]
    fn single_vortex_is_azimuthally_uniform() {
        let s = SpinOrbitState::scalar_mode(3, Pol::R, 1).unwrap();
        let raster = render_intensity(&s, 128).unwrap();
        let profile = angular_profile(&raster, 720);
        assert!(profile.relative_variance() < 1e-6);
        assert_eq!(profile.lobe_count(), 0);
    }

    #[test]
    fn vector_mode_is_a_uniform_ring() {
        // Orthogonal polarizations add incoherently: no fringes.
        let s = SpinOrbitState::vector_mode(3, VectorModeSpec::Tm01).unwrap();
        let raster = render_intensity(&s, 128).unwrap();
        let profile = angular_profile(&raster, 720);
        assert!(profile.relative_variance() < 1e-6);
        assert!(profile.ring_radius > 0.1);
    }

    #[test]
    fn pair_phase_rotates_lobes_by_quarter_turn() {
        // cos^2(l phi + zeta/2) peaks move by pi/2 when zeta goes 0 -> pi (l = 1).
        let p0 = angular_profile(
            &render_intensity(&oam_pair_state(1, 0.0).unwrap(), 192).unwrap(),
            720,
        );
        let ppi = angular_profile(
            &render_intensity(&oam_pair_state(1, std::f64::consts::PI).unwrap(), 192).unwrap(),
            720,
        );
        let delta = (ppi.peak_angle() - p0.peak_angle()).rem_euclid(std::f64::consts::PI);
        assert!(
            (delta - std::f64::consts::FRAC_PI_2).abs() < 0.05,
            "lobe rotation {delta}"
        );
    }

    #[test]
    fn zero_or_tiny_grid_is_rejected() {
        let s = SpinOrbitState::scalar_mode(1, Pol::R, 0).unwrap();
        assert!(matches!(
            render_intensity(&s, 0).unwrap_err(),
            Error::GridTooSmall { .. }
        ));
        assert!(render_intensity(&s, 63).is_err());
        assert!(render_intensity(&s, 64).is_ok());
    }

    #[test]
    fn pgm_output_is_deterministic_and_well_formed() {
        let s = oam_pair_state(2, 0.0).unwrap();
        let raster = render_intensity(&s, 64).unwrap();
        let a = raster.to_pgm();
        let b = render_intensity(&s, 64).unwrap().to_pgm();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("64 64"));
        assert_eq!(lines.next(), Some("65535"));
        assert_eq!(a.lines().count(), 3 + 64);
        let max_token: u32 = a
            .lines()
            .skip(3)
            .flat_map(|l| l.split(' '))
            .map(|t| t.parse::<u32>().unwrap())
            .max()
            .unwrap();
        assert_eq!(max_token, 65535);
    }

    #[test]
    fn gaussian_mode_peaks_on_axis() {
        let s = SpinOrbitState::scalar_mode(1, Pol::R, 0).unwrap();
        let raster = render_intensity(&s, 64).unwrap();
        let center = raster.sample(0.0, 0.0);
        let edge = raster.sample(2.0, 0.0);
        assert!(center > edge * 10.0);
    }
}
