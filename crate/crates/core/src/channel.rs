//! Communication-channel models for the spin-orbit space.
//!
//! A channel is a completely positive trace-preserving map given by operator
//! terms rho -> sum_i K_i rho K_i^dag. The default models (free space and
//! the parameterized fiber) are unitary, so they carry a single term;
//! the dephasing constructor exists for modeling non-unitary disturbance.
//!
//! The fiber model is a minimal parametric unitary chosen so that one
//! parameter maps monotonically onto the marked-setting fringe visibility:
//! epsilon_xt sets a mirror coupling |l> <-> |-l> of mixing angle
//! arcsin(sqrt(epsilon_xt)) on every +-l pair, plus weaker outward
//! nearest-neighbor leaks |l> -> |l + sign(l)| at quarter strength that
//! populate the rest of the OAM spectrum without disturbing the +-l balance.
//! The marked-setting visibility of the standard probe then equals
//! sin(2 arcsin(sqrt(epsilon_xt))) exactly, which calibration inverts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, DensityMatrix, C64};
use crate::spinorbit::SpinOrbitState;
use crate::stream::{mix_key, unit_f64};

/// Parameters of the fiber-like disturbance channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberChannelParams {
    /// OAM cross-talk strength in [0, 1].
    pub epsilon_xt: f64,
    /// Polarization rotation in radians.
    pub pol_rotation: f64,
    /// Phase of the mirror coupling in radians.
    pub intermodal_phase: f64,
    /// Seed for the per-link leak phases.
    pub seed: u64,
}

impl FiberChannelParams {
    pub fn identity() -> Self {
        Self {
            epsilon_xt: 0.0,
            pol_rotation: 0.0,
            intermodal_phase: 0.0,
            seed: 0,
        }
    }
}

/// On-disk channel description (angles in degrees).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    pub label: String,
    pub epsilon_xt: f64,
    pub pol_rotation_deg: f64,
    pub intermodal_phase_deg: f64,
    pub seed: u64,
}

impl ChannelSpecFile {
    pub fn params(&self) -> FiberChannelParams {
        FiberChannelParams {
            epsilon_xt: self.epsilon_xt,
            pol_rotation: self.pol_rotation_deg.to_radians(),
            intermodal_phase: self.intermodal_phase_deg.to_radians(),
            seed: self.seed,
        }
    }

    pub fn from_params(label: &str, p: &FiberChannelParams) -> Self {
        Self {
            label: label.to_string(),
            epsilon_xt: p.epsilon_xt,
            pol_rotation_deg: p.pol_rotation.to_degrees(),
            intermodal_phase_deg: p.intermodal_phase.to_degrees(),
            seed: p.seed,
        }
    }
}

/// Completely positive trace-preserving map on the spin-orbit space.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    label: String,
    l_max: u32,
    kraus: Vec<CMat>,
    params: Option<FiberChannelParams>,
}

impl ChannelModel {
    /// Identity channel: the free-space reference.
    pub fn free_space(l_max: u32) -> Self {
        let dim = 2 * (2 * l_max as usize + 1);
        Self {
            label: "free_space".to_string(),
            l_max,
            kraus: vec![CMat::identity(dim)],
            params: None,
        }
    }

    /// Unitary fiber-like channel U_pol (x) U_oam.
    pub fn fiber(l_max: u32, label: &str, params: &FiberChannelParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&params.epsilon_xt) {
            return Err(Error::ParameterOutOfRange {
                name: "epsilon_xt",
                value: params.epsilon_xt,
                expected: "0 <= epsilon_xt <= 1",
            });
        }
        let u_oam = oam_crosstalk_unitary(l_max, params);
        let u_pol = pol_rotation_2x2(params.pol_rotation);
        let u = CMat::kron_pol_oam(&u_pol, &u_oam);
        debug_assert!(u.unitarity_defect() < 1e-12);
        Ok(Self {
            label: label.to_string(),
            l_max,
            kraus: vec![u],
            params: Some(*params),
        })
    }

    /// Two-term dephasing channel: equal-weight +-phase on the |-ell> OAM
    /// component (both polarizations). Scales the |l><-l| coherence by
    /// cos(phase).
    pub fn oam_dephasing(l_max: u32, ell: i32, phase: f64) -> Result<Self> {
        if ell.unsigned_abs() > l_max {
            return Err(Error::OamOutOfRange { ell, l_max });
        }
        let n = 2 * l_max as usize + 1;
        let target = (-ell + l_max as i32) as usize;
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let make = |sign: f64| {
            let mut oam = CMat::identity(n);
            oam.set(target, target, Complex64::from_polar(1.0, sign * phase));
            let pol = [
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            ];
            let mut k = CMat::kron_pol_oam(&pol, &oam);
            for i in 0..k.dim() {
                for j in 0..k.dim() {
                    let v = k.get(i, j) * w;
                    k.set(i, j, v);
                }
            }
            k
        };
        Ok(Self {
            label: format!("dephasing(l={ell})"),
            l_max,
            kraus: vec![make(1.0), make(-1.0)],
            params: None,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn kraus_terms(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn params(&self) -> Option<&FiberChannelParams> {
        self.params.as_ref()
    }

    /// Largest entry of |sum K^dag K - I|; zero for a trace-preserving map.
    pub fn trace_preservation_defect(&self) -> f64 {
        let dim = self.kraus[0].dim();
        let mut acc = CMat::zeros(dim);
        for k in &self.kraus {
            let kk = k.adjoint().mul_mat(k).expect("same dim");
            for i in 0..dim {
                for j in 0..dim {
                    acc.set(i, j, acc.get(i, j) + kk.get(i, j));
                }
            }
        }
        acc.max_abs_diff(&CMat::identity(dim))
    }

    /// rho -> sum K rho K^dag.
    pub fn apply(&self, state: &SpinOrbitState) -> Result<DensityMatrix> {
        let dim = self.kraus[0].dim();
        if state.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: state.dim(),
            });
        }
        let mut out = CMat::zeros(dim);
        for k in &self.kraus {
            let v = k.mul_vec(state.amplitudes())?;
            for i in 0..dim {
                for j in 0..dim {
                    out.set(i, j, out.get(i, j) + v[i] * v[j].conj());
                }
            }
        }
        Ok(DensityMatrix::from_matrix(out))
    }

    /// Fast path for single-term (unitary) channels; `None` when the channel
    /// genuinely mixes.
    pub fn apply_pure(&self, state: &SpinOrbitState) -> Result<Option<SpinOrbitState>> {
        if self.kraus.len() != 1 {
            return Ok(None);
        }
        let v = self.kraus[0].mul_vec(state.amplitudes())?;
        Ok(Some(SpinOrbitState::from_amplitudes(state.l_max(), v)))
    }
}

/// Polarization rotation by `angle` expressed on circular amplitudes.
fn pol_rotation_2x2(angle: f64) -> [[C64; 2]; 2] {
    // A rotation of the linear basis is diagonal in the circular basis.
    [
        [Complex64::from_polar(1.0, -angle), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), Complex64::from_polar(1.0, angle)],
    ]
}

/// The OAM cross-talk unitary: mirror coupling on every +-l pair followed by
/// outward nearest-neighbor leaks.
fn oam_crosstalk_unitary(l_max: u32, params: &FiberChannelParams) -> CMat {
    let n = 2 * l_max as usize + 1;
    let idx = |ell: i32| (ell + l_max as i32) as usize;
    let mut u = CMat::identity(n);

    let chi = params.epsilon_xt.sqrt().asin();
    for ell in 1..=l_max as i32 {
        u = givens(n, idx(ell), idx(-ell), chi, params.intermodal_phase)
            .mul_mat(&u)
            .expect("same dim");
    }

    // Outward leaks at quarter strength; per-link phases from the seed.
    let chi_leak = (params.epsilon_xt / 4.0).sqrt().asin();
    for ell in 1..l_max as i32 {
        for sign in [1i32, -1] {
            let inner = sign * ell;
            let outer = sign * (ell + 1);
            let phase = std::f64::consts::TAU
                * unit_f64(mix_key(params.seed, ell as u64, (sign + 2) as u64));
            u = givens(n, idx(inner), idx(outer), chi_leak, phase)
                .mul_mat(&u)
                .expect("same dim");
        }
    }
    u
}

/// Rotation by angle `chi` with phase `phase` in the (i, j) plane.
fn givens(n: usize, i: usize, j: usize, chi: f64, phase: f64) -> CMat {
    let mut g = CMat::identity(n);
    let (s, c) = chi.sin_cos();
    g.set(i, i, C64::new(c, 0.0));
    g.set(j, j, C64::new(c, 0.0));
    g.set(i, j, -Complex64::from_polar(s, phase));
    g.set(j, i, Complex64::from_polar(s, -phase));
    g
}
