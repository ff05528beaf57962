//! Truncated polarization (x) OAM state space and the vector/scalar mode
//! constructors.
//!
//! States live on the circular polarization basis {R, L} tensored with OAM
//! eigenstates |l> for l in [-l_max, l_max]. Amplitudes are stored dense and
//! pol-major: index = pol * (2 l_max + 1) + (l + l_max).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, vdot, C64};

/// Default OAM truncation, covering the measured spectral window l = [-3, 3].
pub const DEFAULT_L_MAX: u32 = 3;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Circular polarization basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Pol {
    /// Right circular.
    R,
    /// Left circular.
    L,
}

impl Pol {
    pub fn index(self) -> usize {
        match self {
            Pol::R => 0,
            Pol::L => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pol::R => "R",
            Pol::L => "L",
        }
    }
}

/// Convert circular amplitudes (a_R, a_L) to linear amplitudes (a_H, a_V)
/// under the fixed convention H = (R + L)/sqrt(2), V = (R - L)/(i sqrt(2)).
pub fn circular_to_linear(a_r: C64, a_l: C64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    ((a_r + a_l) * FRAC_1_SQRT_2, i * (a_r - a_l) * FRAC_1_SQRT_2)
}

/// Inverse of [`circular_to_linear`].
pub fn linear_to_circular(a_h: C64, a_v: C64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    (
        (a_h - i * a_v) * FRAC_1_SQRT_2,
        (a_h + i * a_v) * FRAC_1_SQRT_2,
    )
}

/// Named vector-mode family, or an explicit (l, zeta) pair.
///
/// The named families pin the conventional assignments: TM01 (zeta = 0,
/// l = +1), TE01 (zeta = pi, l = +1), HE21 even (zeta = 0, l = -1) and
/// HE21 odd (zeta = pi, l = -1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorModeSpec {
    Tm01,
    Te01,
    He21Even,
    He21Odd,
    Custom { ell: i32, zeta: f64 },
}

impl VectorModeSpec {
    /// The (l, zeta) pair defining (|R>|l> + e^{i zeta}|L>|-l>)/sqrt(2).
    pub fn params(self) -> (i32, f64) {
        match self {
            VectorModeSpec::Tm01 => (1, 0.0),
            VectorModeSpec::Te01 => (1, std::f64::consts::PI),
            VectorModeSpec::He21Even => (-1, 0.0),
            VectorModeSpec::He21Odd => (-1, std::f64::consts::PI),
            VectorModeSpec::Custom { ell, zeta } => (ell, zeta),
        }
    }
}

/// Pure photon state on the truncated spin-orbit space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitState {
    l_max: u32,
    amps: Vec<C64>,
}

#[derive(Serialize)]
struct AmplitudeEntry {
    pol: &'static str,
    ell: i32,
    re: f64,
    im: f64,
}

impl SpinOrbitState {
    /// Zero state (not normalized); fill via [`set_amplitude`].
    pub fn zero(l_max: u32) -> Self {
        assert!(l_max >= 1, "l_max must be at least 1");
        Self {
            l_max,
            amps: vec![C64::new(0.0, 0.0); 2 * (2 * l_max as usize + 1)],
        }
    }

    /// Vector mode (|R>|l> + e^{i zeta}|L>|-l>)/sqrt(2).
    pub fn vector_mode(l_max: u32, spec: VectorModeSpec) -> Result<Self> {
        let (ell, zeta) = spec.params();
        let mut s = Self::zero(l_max);
        let half = C64::new(FRAC_1_SQRT_2, 0.0);
        s.set_amplitude(Pol::R, ell, half)?;
        let existing = s.amplitude(Pol::L, -ell)?;
        s.set_amplitude(Pol::L, -ell, existing + half * C64::from_polar(1.0, zeta))?;
        // l = 0 puts both terms on the same basis element; renormalize.
        Ok(s.normalized())
    }

    /// Product state |pol>|l> with a single unit amplitude.
    pub fn scalar_mode(l_max: u32, pol: Pol, ell: i32) -> Result<Self> {
        let mut s = Self::zero(l_max);
        s.set_amplitude(pol, ell, C64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// Number of OAM basis elements, 2 l_max + 1.
    pub fn oam_count(&self) -> usize {
        2 * self.l_max as usize + 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn from_amplitudes(l_max: u32, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 2 * (2 * l_max as usize + 1));
        Self { l_max, amps }
    }

    fn check_ell(&self, ell: i32) -> Result<()> {
        if ell.unsigned_abs() > self.l_max {
            Err(Error::OamOutOfRange {
                ell,
                l_max: self.l_max,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub(crate) fn index_of(&self, pol: Pol, ell: i32) -> usize {
        pol.index() * self.oam_count() + (ell + self.l_max as i32) as usize
    }

    pub fn amplitude(&self, pol: Pol, ell: i32) -> Result<C64> {
        self.check_ell(ell)?;
        Ok(self.amps[self.index_of(pol, ell)])
    }

    pub fn set_amplitude(&mut self, pol: Pol, ell: i32, value: C64) -> Result<()> {
        self.check_ell(ell)?;
        let idx = self.index_of(pol, ell);
        self.amps[idx] = value;
        Ok(())
    }

    /// Iterate (pol, ell, amplitude) over all basis elements.
    pub fn entries(&self) -> impl Iterator<Item = (Pol, i32, C64)> + '_ {
        let l_max = self.l_max as i32;
        [Pol::R, Pol::L].into_iter().flat_map(move |pol| {
            (-l_max..=l_max).map(move |ell| (pol, ell, self.amps[self.index_of(pol, ell)]))
        })
    }

    pub fn norm(&self) -> f64 {
        norm_sq(&self.amps).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero state");
        Self {
            l_max: self.l_max,
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    /// <self|other>, conjugate-linear in self.
    pub fn inner_product(&self, other: &SpinOrbitState) -> Result<C64> {
        if self.l_max != other.l_max {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        vdot(&self.amps, &other.amps)
    }

    /// Equality up to a global phase: |<self|other>| close to both norms.
    pub fn approx_eq_up_to_phase(&self, other: &SpinOrbitState, tol: f64) -> bool {
        if self.l_max != other.l_max {
            return false;
        }
        let overlap = vdot(&self.amps, &other.amps).expect("same dim").norm();
        let na = self.norm();
        let nb = other.norm();
        (overlap - na * nb).abs() <= tol && (na - nb).abs() <= tol
    }

    /// OAM marginal weights |<l|psi>|^2 summed over polarization, indexed
    /// by l + l_max. Not normalized.
    pub fn oam_weights(&self) -> Vec<f64> {
        let n = self.oam_count();
        let mut w = vec![0.0; n];
        for (i, a) in self.amps.iter().enumerate() {
            w[i % n] += a.norm_sqr();
        }
        w
    }

    /// Debug serialization: JSON array of {pol, ell, re, im} in pol-major,
    /// l-ascending order.
    pub fn to_debug_json(&self) -> String {
        let entries: Vec<AmplitudeEntry> = self
            .entries()
            .map(|(pol, ell, a)| AmplitudeEntry {
                pol: pol.label(),
                ell,
                re: a.re,
                im: a.im,
            })
            .collect();
        serde_json::to_string(&entries).expect("plain floats always serialize")
    }
}
