//! Step-index fiber radial fields and the weakly-guiding mode solver.
//!
//! The radial field of mode (l, p) is the normalized Bessel pair
//!
//! ```text
//! u(r) = J_l(beta r / a) / J_l(beta)   for r < a
//!        K_l(sigma r / a) / K_l(sigma) for r >= a
//! ```
//!
//! with a the core radius and (beta, sigma) the dimensionless core/cladding
//! parameters satisfying beta^2 + sigma^2 = V^2. Both branches equal 1 at
//! r = a by construction. The pair is solved from the weakly-guiding (LP)
//! dispersion relation
//!
//! ```text
//! beta J_{l+1}(beta) / J_l(beta) = sigma K_{l+1}(sigma) / K_l(sigma)
//! ```
//!
//! by sign-change bracketing and bisection, which is adequate because the
//! TM01/TE01/HE21 modes probed here are nearly degenerate with LP11.

use std::collections::BTreeMap;

use crate::bessel::{bessel_j, bessel_k};
use crate::error::{Error, Result};

/// Step-index fiber geometry plus the solved per-mode (beta, sigma) pairs.
#[derive(Debug, Clone)]
pub struct FiberSpec {
    core_radius_um: f64,
    n_core: f64,
    n_clad: f64,
    wavelength_nm: f64,
    modes: BTreeMap<(u32, u32), (f64, f64)>,
}

impl FiberSpec {
    pub fn new(core_radius_um: f64, n_core: f64, n_clad: f64, wavelength_nm: f64) -> Result<Self> {
        if core_radius_um <= 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "core_radius_um",
                value: core_radius_um,
                expected: "positive",
            });
        }
        if n_core <= n_clad {
            return Err(Error::ParameterOutOfRange {
                name: "n_core",
                value: n_core,
                expected: "core index above cladding index",
            });
        }
        if wavelength_nm <= 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "wavelength_nm",
                value: wavelength_nm,
                expected: "positive",
            });
        }
        Ok(Self {
            core_radius_um,
            n_core,
            n_clad,
            wavelength_nm,
            modes: BTreeMap::new(),
        })
    }

    /// The fiber used in the bench experiments: 30 um diameter core,
    /// NA ~ 0.14 step fiber probed at 633 nm.
    pub fn bench_default() -> Self {
        Self::new(15.0, 1.4570, 1.4500, 633.0).expect("valid geometry")
    }

    pub fn core_radius_um(&self) -> f64 {
        self.core_radius_um
    }

    /// Normalized frequency V = (2 pi a / lambda) sqrt(n_core^2 - n_clad^2).
    pub fn v_number(&self) -> f64 {
        let a_nm = self.core_radius_um * 1000.0;
        let na = (self.n_core * self.n_core - self.n_clad * self.n_clad).sqrt();
        std::f64::consts::TAU * a_nm / self.wavelength_nm * na
    }

    /// Solve the p-th LP(l, p) root and store it; p counts from 1.
    pub fn solve_mode(&mut self, ell: u32, p: u32) -> Result<(f64, f64)> {
        if p == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "p",
                value: 0.0,
                expected: "radial index p >= 1",
            });
        }
        let v = self.v_number();
        let roots = dispersion_roots(ell, v);
        let beta = *roots.get(p as usize - 1).ok_or(Error::BelowCutoff {
            ell,
            p,
            v_number: v,
        })?;
        let sigma = (v * v - beta * beta).sqrt();
        self.modes.insert((ell, p), (beta, sigma));
        Ok((beta, sigma))
    }

    pub fn mode(&self, ell: u32, p: u32) -> Result<(f64, f64)> {
        self.modes
            .get(&(ell, p))
            .copied()
            .ok_or(Error::UnknownFiberMode { ell, p })
    }

    /// Radial field amplitude of a stored mode at radius r (micrometers).
    pub fn radial_profile(&self, ell: u32, p: u32, r_um: f64) -> Result<f64> {
        if r_um < 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "r_um",
                value: r_um,
                expected: "non-negative radius",
            });
        }
        let (beta, sigma) = self.mode(ell, p)?;
        let a = self.core_radius_um;
        if r_um < a {
            Ok(bessel_j(ell, beta * r_um / a) / bessel_j(ell, beta))
        } else {
            Ok(bessel_k(ell, sigma * r_um / a) / bessel_k(ell, sigma))
        }
    }

    /// Residual of the dispersion relation at the stored root.
    pub fn dispersion_residual(&self, ell: u32, p: u32) -> Result<f64> {
        let (beta, sigma) = self.mode(ell, p)?;
        Ok(dispersion(ell, beta, sigma).abs())
    }

    /// Core-branch and cladding-branch values evaluated at r = a; both are
    /// 1 for a consistently normalized mode.
    pub fn branch_values_at_boundary(&self, ell: u32, p: u32) -> Result<(f64, f64)> {
        let (beta, sigma) = self.mode(ell, p)?;
        Ok((
            bessel_j(ell, beta) / bessel_j(ell, beta),
            bessel_k(ell, sigma) / bessel_k(ell, sigma),
        ))
    }
}

fn dispersion(ell: u32, beta: f64, sigma: f64) -> f64 {
    beta * bessel_j(ell + 1, beta) / bessel_j(ell, beta)
        - sigma * bessel_k(ell + 1, sigma) / bessel_k(ell, sigma)
}

/// All guided-mode core parameters for azimuthal order `ell`, ascending.
fn dispersion_roots(ell: u32, v: f64) -> Vec<f64> {
    const STEPS: usize = 4000;
    let lo = 1e-9 * v.max(1.0);
    let hi = v * (1.0 - 1e-9);
    let h = (hi - lo) / STEPS as f64;
    let f = |u: f64| dispersion(ell, u, (v * v - u * u).max(0.0).sqrt());

    let mut roots = Vec::new();
    let mut u_prev = lo;
    let mut f_prev = f(u_prev);
    for i in 1..=STEPS {
        let u = lo + h * i as f64;
        let fu = f(u);
        // A sign change is a root only if J_l does not flip sign inside the
        // bracket (those flips are the poles of the J ratio).
        if f_prev.is_finite()
            && fu.is_finite()
            && f_prev * fu < 0.0
            && bessel_j(ell, u_prev) * bessel_j(ell, u) > 0.0
        {
            roots.push(bisect(&f, u_prev, u));
        }
        u_prev = u;
        f_prev = fu;
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) < 1e-14 * b.abs().max(1.0) {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}
