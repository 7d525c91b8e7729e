//! Lower and upper bounds for the fundamental tone from a growth profile.
//!
//! Upper bounds transplant the test function
//! `φ(t) = sin(2π(t - R/2)/R) / S_κ(t)^{(m-1)/2}` on `[R/2, R]` through the
//! extrinsic distance and integrate against the profile's coarea density.

use crate::error::{Error, Result};
use crate::growth::{doubling_constant, log_growth_delta, GrowthProfile};
use crate::numeric::{self as m, GL8, PI};
use crate::spaceform::SpaceForm;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// `(n-1)² (-κ) / 4`.
pub fn mckean_lower(n: usize, kappa: f64) -> f64 {
    let k = (n.saturating_sub(1)) as f64;
    k * k * (-kappa).max(0.0) / 4.0
}

/// `h² / 4` with the isoperimetric constant `h = (n-1) sqrt(-κ)`.
pub fn cheeger_lower(n: usize, kappa: f64) -> f64 {
    // h² formed directly; squaring a rounded sqrt would drift from the McKean value.
    let k = (n.saturating_sub(1)) as f64;
    let h_sq = k * k * (-kappa).max(0.0);
    h_sq / 4.0
}

fn c_kappa(kappa: f64, t: f64) -> f64 {
    if kappa < 0.0 {
        let c = m::sqrt(-kappa);
        c / m::tanh(c * t)
    } else {
        1.0 / t
    }
}

/// `Λ(R) = (m-1)²/4 C(R/2)² + 8π²/R² + 4π(m-1)/R C(R/2)`, which tends to
/// `(m-1)²(-κ)/4` (with the square) as `R` grows.
pub fn lambda_r(m_dim: usize, kappa: f64, r: f64) -> f64 {
    let k = (m_dim - 1) as f64;
    let c = c_kappa(kappa, 0.5 * r);
    k * k / 4.0 * c * c + 8.0 * PI * PI / (r * r) + 4.0 * PI * k / r * c
}

/// `F(R) = (m-1)²/4 C(R/2)² + 4π²/R² + 2(m-1)π/R C(R/2)`.
pub fn f_r(m_dim: usize, kappa: f64, r: f64) -> f64 {
    let k = (m_dim - 1) as f64;
    let c = c_kappa(kappa, 0.5 * r);
    k * k / 4.0 * c * c + 4.0 * PI * PI / (r * r) + 2.0 * k * PI / r * c
}

/// The radial test function supported on `[R/2, R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub r: f64,
    pub kappa: f64,
    pub m: usize,
}

impl TestFunction {
    pub fn new(r: f64, kappa: f64, m_dim: usize) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Invalid(format!("R = {r} must be positive")));
        }
        if m_dim < 2 || !(kappa <= 0.0) {
            return Err(Error::Invalid(format!("need m >= 2 and kappa <= 0, got m = {m_dim}, kappa = {kappa}")));
        }
        Ok(Self { r, kappa, m: m_dim })
    }

    fn exponent(&self) -> f64 {
        0.5 * (self.m - 1) as f64
    }

    fn ln_s(&self, t: f64) -> f64 {
        if self.kappa < 0.0 {
            let c = m::sqrt(-self.kappa);
            m::ln_sinh(c * t) - m::ln(c)
        } else {
            m::ln(t)
        }
    }

    /// `φ(t) S(t)^{(m-1)/2}` and `φ'(t) S(t)^{(m-1)/2}`; zero off the support.
    pub fn scaled(&self, t: f64) -> (f64, f64) {
        let r = self.r;
        if t < 0.5 * r || t > r {
            return (0.0, 0.0);
        }
        let w = 2.0 * PI / r;
        let (s, c) = (m::sin(w * (t - 0.5 * r)), m::cos(w * (t - 0.5 * r)));
        (s, w * c - self.exponent() * c_kappa(self.kappa, t) * s)
    }

    /// `φ(t)`.
    pub fn value(&self, t: f64) -> f64 {
        let (v, _) = self.scaled(t);
        if v == 0.0 {
            0.0
        } else {
            v * m::exp(-self.exponent() * self.ln_s(t))
        }
    }

    /// `φ'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let (_, d) = self.scaled(t);
        if d == 0.0 {
            0.0
        } else {
            d * m::exp(-self.exponent() * self.ln_s(t))
        }
    }
}

fn check_support(profile: &GrowthProfile, r: f64) -> Result<()> {
    let s_max = profile.s_max();
    if !(r > 0.0) || 0.5 * r >= s_max || r > s_max * (1.0 + 1e-12) {
        return Err(Error::EmptySupport { lo: 0.5 * r, hi: r, s_max });
    }
    Ok(())
}

/// `∫ φ'² dv / ∫ φ² dv` over `[R/2, R]`, with the density constant on each
/// bin and `φ` integrated exactly (8-point Gauss per bin overlap).
pub fn rayleigh_upper(profile: &GrowthProfile, m_dim: usize, kappa: f64, r: f64) -> Result<f64> {
    check_support(profile, r)?;
    let tf = TestFunction::new(r, kappa, m_dim)?;
    let lo = 0.5 * r;
    let exp = 2.0 * tf.exponent();
    // ln of each overlap's weight scale, to factor out before exponentiating.
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..profile.bins() {
        let (a, b) = (profile.radii[k].max(lo), profile.radii[k + 1].min(r));
        if b <= a || profile.log_density[k] == f64::NEG_INFINITY {
            continue;
        }
        let mid = 0.5 * (a + b);
        pieces.push((a, b, profile.log_density[k] - exp * tf.ln_s(mid)));
    }
    let shift = pieces.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::ZeroDenominator(r));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b, lw) in pieces {
        let mid = 0.5 * (a + b);
        let base = m::exp(lw - shift);
        if base == 0.0 {
            continue;
        }
        let half = 0.5 * (b - a);
        for (x, w) in GL8.iter() {
            let t = mid + half * x;
            let (v, d) = tf.scaled(t);
            // S^{-(m-1)} varies within the bin; carry it relative to the midpoint.
            let rel = m::exp(-exp * (tf.ln_s(t) - tf.ln_s(mid)));
            num += half * w * base * rel * d * d;
            den += half * w * base * rel * v * v;
        }
    }
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator(r));
    }
    Ok(num / den)
}

/// Assembled bound `Q(R)/Q(R/2) [ Vol(B_R)/Vol(S_R) · 4/R · F(R) δ(R) + Λ(R) ]`
/// with `δ(R) = max(0, ln Q(R) - ln Q(R/2))`.
pub fn paper_upper(profile: &GrowthProfile, m_dim: usize, kappa: f64, r: f64) -> Result<f64> {
    let parts = upper_parts(profile, m_dim, kappa, r)?;
    Ok(parts.paper_upper)
}

struct UpperParts {
    paper_upper: f64,
    delta: f64,
    q_ratio: f64,
}

fn upper_parts(profile: &GrowthProfile, m_dim: usize, kappa: f64, r: f64) -> Result<UpperParts> {
    check_support(profile, r)?;
    TestFunction::new(r, kappa, m_dim)?;
    let sf = SpaceForm::new(kappa, profile.dim)?;
    let delta = log_growth_delta(profile, r)?;
    let q_ratio = profile.q_at(r) / profile.q_at(0.5 * r);
    let geo = sf.ball_sphere_ratio(r) * 4.0 / r;
    let paper_upper = q_ratio * (geo * f_r(m_dim, kappa, r) * delta.max(0.0) + lambda_r(m_dim, kappa, r));
    Ok(UpperParts { paper_upper, delta, q_ratio })
}

/// `[(m-1)²(-κ)/4, C (m-1)²(-κ)/4]` with `C` the doubling constant of the profile.
pub fn two_sided_estimate(profile: &GrowthProfile, m_dim: usize, kappa: f64) -> (f64, f64) {
    let lo = mckean_lower(m_dim, kappa);
    (lo, doubling_constant(profile) * lo)
}

/// Bounds at one radius of the schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleEntry {
    #[cfg_attr(feature = "serde", serde(rename = "R"))]
    pub r: f64,
    pub rayleigh_upper: f64,
    pub paper_upper: f64,
    #[cfg_attr(feature = "serde", serde(rename = "lambda_R"))]
    pub lambda_r: f64,
    #[cfg_attr(feature = "serde", serde(rename = "F_R"))]
    pub f_r: f64,
    #[cfg_attr(feature = "serde", serde(rename = "delta_R"))]
    pub delta_r: f64,
    pub q_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LowerBounds {
    pub mckean: f64,
    pub cheeger: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub lower: f64,
    pub upper: f64,
}

/// All bounds over a schedule of radii and the resulting bracket for `λ*`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub geometry: String,
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    pub lower: LowerBounds,
    pub schedule: Vec<ScheduleEntry>,
    pub verdict: Verdict,
    /// Doubling constant `sup Q(R)/Q(R/2)` of the profile.
    pub doubling_constant: f64,
    /// Relative quadrature error of the profile; the verdict's upper end is
    /// inflated by three times this.
    pub quadrature_rel_error: f64,
}

/// Evaluates every bound at each `R` of `schedule`. `m` defaults to the profile dimension.
pub fn assemble_report(geometry: &str, profile: &GrowthProfile, m_dim: Option<usize>, schedule: &[f64]) -> Result<BoundReport> {
    if schedule.is_empty() {
        return Err(Error::Invalid("bound schedule is empty".into()));
    }
    let n = profile.dim;
    let m_dim = m_dim.unwrap_or(n);
    let kappa = profile.kappa;
    let mut entries = Vec::with_capacity(schedule.len());
    let mut best = f64::INFINITY;
    for &r in schedule {
        let ray = rayleigh_upper(profile, m_dim, kappa, r)?;
        let parts = upper_parts(profile, m_dim, kappa, r)?;
        best = best.min(ray.min(parts.paper_upper));
        entries.push(ScheduleEntry {
            r,
            rayleigh_upper: ray,
            paper_upper: parts.paper_upper,
            lambda_r: lambda_r(m_dim, kappa, r),
            f_r: f_r(m_dim, kappa, r),
            delta_r: parts.delta,
            q_ratio: parts.q_ratio,
        });
    }
    let lower = LowerBounds { mckean: mckean_lower(n, kappa), cheeger: cheeger_lower(n, kappa) };
    let rel = profile.meta.rel_error;
    let lo = lower.mckean.max(lower.cheeger);
    let upper = (best * (1.0 + 3.0 * rel)).max(lo);
    Ok(BoundReport {
        geometry: geometry.into(),
        n,
        m: m_dim,
        kappa,
        lower,
        schedule: entries,
        verdict: Verdict { lower: lo, upper },
        doubling_constant: doubling_constant(profile),
        quadrature_rel_error: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_examples() {
        assert_eq!(mckean_lower(2, -1.0), 0.25);
        assert_eq!(mckean_lower(3, -4.0), 4.0);
        assert_eq!(mckean_lower(5, 0.0), 0.0);
        assert_eq!(cheeger_lower(4, -1.0), 2.25);
        for n in 2..8 {
            for &k in &[0.0, -0.3, -1.0, -7.5] {
                assert_eq!(mckean_lower(n, k), cheeger_lower(n, k));
            }
        }
    }

    #[test]
    fn lambda_and_f_examples() {
        let coth = 1.0 / m::tanh(500.0);
        let want = 0.25 * coth * coth + 8.0 * PI * PI / 1e6 + 4.0 * PI / 1000.0 * coth;
        assert!((lambda_r(2, -1.0, 1000.0) - want).abs() < 1e-15);
        assert!((lambda_r(2, -1.0, 1000.0) - 0.26264).abs() < 1e-5);
        let flat = (1.0 + 8.0 * PI * PI + 8.0 * PI) / 1e6;
        assert!((lambda_r(2, 0.0, 1000.0) - flat).abs() < 1e-18);
        assert!((f_r(2, -1.0, 1000.0) - 0.25632).abs() < 1e-5);
        assert!((f_r(3, 0.0, 10.0) - 0.6861).abs() < 1e-4);
    }

    #[test]
    fn test_function_vanishes_at_ends() {
        let tf = TestFunction::new(10.0, -1.0, 3).unwrap();
        assert!(tf.value(5.0).abs() < 1e-15 && tf.value(10.0).abs() < 1e-15);
        assert_eq!(tf.value(4.0), 0.0);
        let h = 1e-6;
        let fd = (tf.value(7.0 + h) - tf.value(7.0 - h)) / (2.0 * h);
        assert!((fd - tf.derivative(7.0)).abs() < 1e-8);
    }

    #[test]
    fn unit_q_profile_reduces_to_lambda_r() {
        let p = GrowthProfile::synthetic(-1.0, 2, 100.0, 1000, |_| 1.0).unwrap();
        let up = paper_upper(&p, 2, -1.0, 80.0).unwrap();
        assert!((up - lambda_r(2, -1.0, 80.0)).abs() < 1e-12);
        let ray = rayleigh_upper(&p, 2, -1.0, 80.0).unwrap();
        assert!(ray > 0.25 && ray <= up);
    }

    #[test]
    fn support_errors() {
        let p = GrowthProfile::synthetic(0.0, 2, 10.0, 100, |_| 1.0).unwrap();
        assert!(matches!(rayleigh_upper(&p, 2, 0.0, 25.0), Err(Error::EmptySupport { .. })));
        assert!(matches!(rayleigh_upper(&p, 2, 0.0, 11.0), Err(Error::EmptySupport { .. })));
        assert!(assemble_report("x", &p, None, &[]).is_err());
    }

    #[test]
    fn two_sided_substitution() {
        let p = GrowthProfile::synthetic(-1.0, 2, 50.0, 100, |_| 1.0).unwrap();
        let (lo, hi) = two_sided_estimate(&p, 2, -1.0);
        assert_eq!(lo, 0.25);
        assert!((hi - 0.25).abs() < 1e-12);
    }
}
