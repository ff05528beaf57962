//! Optical elements acting on the spin-orbit space: q-plate, waveplates and
//! the polarization analyzer.
//!
//! Jones matrices follow one fixed convention throughout: a retarder with
//! retardance G and fast axis at angle a from horizontal is
//! R(a) diag(e^{-iG/2}, e^{+iG/2}) R(-a) in the {H, V} basis (symmetric
//! phase split). The circular basis convention is the one fixed in
//! [`crate::spinorbit`]. Under these choices a QWP at 45 deg maps |R> to |H>
//! and |L> to e^{-i pi/2}|V>, so the ideal eraser pipeline obeys the fringe
//! law P(alpha, theta) = (1 + sin(2 alpha) cos(2 theta + delta))/2 with
//! delta = [`predict_delta`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::spinorbit::{circular_to_linear, linear_to_circular, Pol, SpinOrbitState};

/// q-plate of half-integer topological charge q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPlateSpec {
    q: f64,
    two_q: i32,
}

impl QPlateSpec {
    /// Requires 2q to be an integer; anything else is rejected rather than
    /// rounded.
    pub fn new(q: f64) -> Result<Self> {
        let two_q = 2.0 * q;
        if (two_q - two_q.round()).abs() > 1e-9 {
            return Err(Error::InvalidQPlateCharge { q });
        }
        Ok(Self {
            q,
            two_q: two_q.round() as i32,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn two_q(&self) -> i32 {
        self.two_q
    }
}

/// Spin-orbit coupling of the q-plate: amplitude at (R, l) moves to
/// (L, l - 2q) and amplitude at (L, l) moves to (R, l + 2q).
pub fn apply_qplate(state: &SpinOrbitState, spec: &QPlateSpec) -> Result<SpinOrbitState> {
    let l_max = state.l_max();
    let mut out = SpinOrbitState::zero(l_max);
    for (pol, ell, amp) in state.entries() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (new_pol, new_ell) = match pol {
            Pol::R => (Pol::L, ell - spec.two_q),
            Pol::L => (Pol::R, ell + spec.two_q),
        };
        if new_ell.unsigned_abs() > l_max {
            return Err(Error::QPlateOverflow {
                ell_in: ell,
                ell_out: new_ell,
                l_max,
            });
        }
        out.set_amplitude(new_pol, new_ell, amp)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Quarter,
    Half,
}

impl WaveplateKind {
    /// Retardance (phase lag of the slow axis behind the fast axis).
    pub fn retardance(self) -> f64 {
        match self {
            WaveplateKind::Quarter => std::f64::consts::FRAC_PI_2,
            WaveplateKind::Half => std::f64::consts::PI,
        }
    }
}

/// Waveplate with its fast axis at `angle` radians from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSpec {
    pub kind: WaveplateKind,
    pub angle: f64,
}

impl WaveplateSpec {
    pub fn quarter(angle: f64) -> Self {
        Self {
            kind: WaveplateKind::Quarter,
            angle,
        }
    }

    pub fn half(angle: f64) -> Self {
        Self {
            kind: WaveplateKind::Half,
            angle,
        }
    }

    /// Jones matrix in the {H, V} basis, rows/cols [H, V].
    pub fn jones_linear(&self) -> [[C64; 2]; 2] {
        let g = self.kind.retardance();
        let fast = Complex64::from_polar(1.0, -0.5 * g);
        let slow = Complex64::from_polar(1.0, 0.5 * g);
        let (s, c) = self.angle.sin_cos();
        let cs = c * s;
        [
            [fast * c * c + slow * s * s, (fast - slow) * cs],
            [(fast - slow) * cs, fast * s * s + slow * c * c],
        ]
    }

    /// The same operator expressed on circular amplitudes (a_R, a_L).
    pub fn jones_circular(&self) -> [[C64; 2]; 2] {
        let j = self.jones_linear();
        // Columns: image of |R> and |L>.
        let (rh, rv) = circular_to_linear(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let (lh, lv) = circular_to_linear(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        let r_out = linear_to_circular(j[0][0] * rh + j[0][1] * rv, j[1][0] * rh + j[1][1] * rv);
        let l_out = linear_to_circular(j[0][0] * lh + j[0][1] * lv, j[1][0] * lh + j[1][1] * lv);
        [[r_out.0, l_out.0], [r_out.1, l_out.1]]
    }
}

/// Apply a waveplate to the polarization factor, identity on OAM.
pub fn apply_waveplate(state: &SpinOrbitState, spec: &WaveplateSpec) -> SpinOrbitState {
    apply_pol_2x2(state, &spec.jones_circular())
}

/// Apply an arbitrary 2x2 polarization operator (circular basis) to a state.
pub(crate) fn apply_pol_2x2(state: &SpinOrbitState, m: &[[C64; 2]; 2]) -> SpinOrbitState {
    let n = state.oam_count();
    let amps = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for k in 0..n {
        let r = amps[k];
        let l = amps[n + k];
        out[k] = m[0][0] * r + m[0][1] * l;
        out[n + k] = m[1][0] * r + m[1][1] * l;
    }
    SpinOrbitState::from_amplitudes(state.l_max(), out)
}

/// Polarizer transmission axis at `alpha` radians from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSpec {
    pub alpha: f64,
}

impl AnalyzerSpec {
    pub fn new(alpha: f64) -> Self {
        Self { alpha }
    }

    /// Analyzer state cos(alpha)|H> + sin(alpha)|V> as circular amplitudes;
    /// works out to (e^{-i alpha}|R> + e^{i alpha}|L>)/sqrt(2).
    pub fn state_circular(&self) -> (C64, C64) {
        let (s, c) = self.alpha.sin_cos();
        linear_to_circular(C64::new(c, 0.0), C64::new(s, 0.0))
    }

    /// Rank-one projector on the polarization factor (circular basis).
    pub fn projector_2x2(&self) -> [[C64; 2]; 2] {
        let (ar, al) = self.state_circular();
        [
            [ar * ar.conj(), ar * al.conj()],
            [al * ar.conj(), al * al.conj()],
        ]
    }

    /// Full-space projector |alpha><alpha| (x) I_OAM for the density route.
    pub fn projector_matrix(&self, l_max: u32) -> CMat {
        let oam = CMat::identity(2 * l_max as usize + 1);
        CMat::kron_pol_oam(&self.projector_2x2(), &oam)
    }
}

/// Project a state through the polarization analyzer. The result is
/// sub-normalized: its squared norm is the analyzer passage probability.
pub fn apply_analyzer(state: &SpinOrbitState, spec: &AnalyzerSpec) -> SpinOrbitState {
    apply_pol_2x2(state, &spec.projector_2x2())
}

/// Full-space waveplate matrix for the density route.
pub fn waveplate_matrix(spec: &WaveplateSpec, l_max: u32) -> CMat {
    let oam = CMat::identity(2 * l_max as usize + 1);
    CMat::kron_pol_oam(&spec.jones_circular(), &oam)
}

/// Phase offset delta of the ideal-pipeline fringe law
/// (1 + sin(2 alpha) cos(2 theta + delta))/2 under this crate's fixed Jones
/// conventions. Convention-dependent: with the symmetric retarder phase
/// split and H = (R + L)/sqrt(2), the QWP at 45 deg leaves the hybrid state
/// as (|H>|l> + e^{-i pi/2}|V>|-l>)/sqrt(2), which makes the fringe offset
/// +pi/2. Used to seed fringe fits.
pub fn predict_delta() -> f64 {
    std::f64::consts::FRAC_PI_2
}
