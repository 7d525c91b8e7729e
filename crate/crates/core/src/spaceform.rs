//! Closed-form geometry of the simply connected space form of constant
//! curvature `kappa <= 0`: the comparison functions `S_kappa`, `C_kappa`
//! and the volumes of model geodesic spheres and balls.
//!
//! Magnitudes grow like `e^{sqrt(-kappa) R}`, so every volume has a log-space
//! companion. Beyond `sqrt(-kappa) t ~ 700` only the log forms are finite.

use crate::error::{Error, Result};
use crate::numeric::{self as m, PI};
use alloc::format;

/// Curvatures with `|kappa|` below this are treated as flat.
pub const FLAT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceForm {
    kappa: f64,
    dim: usize,
    #[cfg_attr(feature = "serde", serde(skip))]
    root: f64,
}

impl SpaceForm {
    pub fn new(kappa: f64, dim: usize) -> Result<Self> {
        check_kappa(kappa)?;
        if dim < 2 {
            return Err(Error::Domain(format!("space form dimension {dim} < 2")));
        }
        Ok(Self { kappa, dim, root: root_neg(kappa) })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sqrt(-kappa)`, zero in the flat case.
    pub fn root(&self) -> f64 {
        self.root
    }

    pub fn is_flat(&self) -> bool {
        self.root == 0.0
    }

    pub fn s(&self, t: f64) -> f64 {
        s_with_root(self.root, t)
    }

    pub fn ln_s(&self, t: f64) -> f64 {
        ln_s_with_root(self.root, t)
    }

    pub fn c(&self, t: f64) -> f64 {
        c_with_root(self.root, t)
    }

    /// `Vol(S_R) = omega_n S(R)^{n-1}`.
    pub fn sphere_volume(&self, r: f64) -> f64 {
        unit_sphere_volume(self.dim) * m::powi(self.s(r), self.dim as i32 - 1)
    }

    pub fn ln_sphere_volume(&self, r: f64) -> f64 {
        m::ln(unit_sphere_volume(self.dim)) + (self.dim as f64 - 1.0) * self.ln_s(r)
    }

    /// `Vol(B_R) = int_0^R Vol(S_s) ds`.
    pub fn ball_volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = self.dim;
        let c = self.root;
        if c == 0.0 {
            return unit_sphere_volume(n) * m::powi(r, n as i32) / n as f64;
        }
        let x = c * r;
        match n {
            2 => {
                let h = m::sinh(0.5 * x);
                4.0 * PI * h * h / (c * c)
            }
            3 if x >= 0.5 => PI * (m::sinh(2.0 * x) - 2.0 * x) / (c * c * c),
            _ => self.sphere_volume(r) * self.ball_sphere_ratio(r),
        }
    }

    pub fn ln_ball_volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        // The volume grows like e^{(n-1) c r}; switch before it overflows.
        if (self.dim as f64 - 1.0) * self.root * r < 600.0 {
            return m::ln(self.ball_volume(r));
        }
        self.ln_sphere_volume(r) + m::ln(self.ball_sphere_ratio(r))
    }

    /// `Vol(B_R) / Vol(S_R)`; bounded for every `R`, so safe at any radius.
    pub fn ball_sphere_ratio(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = self.dim as f64;
        let c = self.root;
        if c == 0.0 {
            return r / n;
        }
        if self.dim == 2 {
            return m::tanh(0.5 * c * r) / c;
        }
        // (S(s)/S(R))^{n-1} <= e^{-(n-1) c (R - s)}; below e^{-60} the tail is negligible.
        let lo = (r - 60.0 / ((n - 1.0) * c)).max(0.0);
        let ln_sr = self.ln_s(r);
        let integrand = |s: f64| {
            if s <= 0.0 {
                0.0
            } else {
                m::exp((n - 1.0) * (self.ln_s(s) - ln_sr))
            }
        };
        m::adaptive_simpson(&integrand, lo, r, 1e-13)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa <= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("curvature bound kappa = {kappa} must be finite and <= 0")));
    }
    Ok(())
}

fn root_neg(kappa: f64) -> f64 {
    if kappa.abs() < FLAT_CUTOFF {
        0.0
    } else {
        m::sqrt(-kappa)
    }
}

fn s_with_root(c: f64, t: f64) -> f64 {
    if c == 0.0 {
        t
    } else {
        m::sinh(c * t) / c
    }
}

fn ln_s_with_root(c: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if c == 0.0 {
        m::ln(t)
    } else {
        m::ln_sinh(c * t) - m::ln(c)
    }
}

fn c_with_root(c: f64, t: f64) -> f64 {
    if c == 0.0 {
        1.0 / t
    } else {
        c / m::tanh(c * t)
    }
}

/// `S_kappa(t)`: `t` when flat, `sinh(sqrt(-kappa) t) / sqrt(-kappa)` otherwise.
pub fn s_kappa(kappa: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("S_kappa needs t >= 0, got {t}")));
    }
    Ok(s_with_root(root_neg(kappa), t))
}

/// `ln S_kappa(t)`, finite where `s_kappa` overflows.
pub fn log_s_kappa(kappa: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("S_kappa needs t >= 0, got {t}")));
    }
    Ok(ln_s_with_root(root_neg(kappa), t))
}

/// `C_kappa(t) = S'_kappa(t) / S_kappa(t)`, the inward mean curvature of model spheres.
pub fn c_kappa(kappa: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("C_kappa has a pole at t = 0 (got t = {t})")));
    }
    Ok(c_with_root(root_neg(kappa), t))
}

/// Volume of the unit `(n-1)`-sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_volume(n: usize) -> f64 {
    assert!(n >= 1, "unit sphere volume needs n >= 1");
    // omega_{k+2} = 2 pi omega_k / k, from omega_1 = 2 and omega_2 = 2 pi.
    let (mut k, mut w) = if n.is_multiple_of(2) { (2usize, 2.0 * PI) } else { (1usize, 2.0) };
    while k < n {
        w *= 2.0 * PI / k as f64;
        k += 2;
    }
    w
}

pub fn sphere_volume(sf: &SpaceForm, r: f64) -> f64 {
    sf.sphere_volume(r)
}

pub fn ball_volume(sf: &SpaceForm, r: f64) -> f64 {
    sf.ball_volume(r)
}
