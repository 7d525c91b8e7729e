//! Cumulative extrinsic-ball volume `v(s)`, the volume growth quotient
//! `Q(s) = v(s) / Vol(B_s)`, and curvature diagnostics over extrinsic balls.
//!
//! Volumes are held in log space so that hyperbolic profiles out to radii of
//! several thousand never overflow.

use crate::error::{Error, Result};
use crate::geometry::sweep::{self, SweepGrid};
use crate::geometry::ImmersedGeometry;
use crate::numeric as m;
use crate::spaceform::SpaceForm;
use alloc::format;
use alloc::vec::Vec;

/// Bin and node counts for a sweep over an extrinsic ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resolution {
    pub bins: usize,
    pub nodes: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { bins: 512, nodes: 4096 }
    }
}

/// How a profile was computed and how far to trust it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureMeta {
    pub radial_cells: usize,
    pub transverse: usize,
    /// Estimated relative error of `v(s_k)`, from a half-resolution rerun.
    pub rel_error: f64,
}

/// Binned volume profile on a grid `0 = s_0 < s_1 < ... < s_K = s_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub kappa: f64,
    pub dim: usize,
    pub radii: Vec<f64>,
    /// `ln v(s_k)`; the first entry is `-inf`.
    pub log_cum_volume: Vec<f64>,
    /// `ln` of the mean density `(v(s_{k+1}) - v(s_k)) / (s_{k+1} - s_k)` per bin.
    pub log_density: Vec<f64>,
    /// `Q(s_k)`, with `Q(0) = 1` for computed profiles.
    pub q_values: Vec<f64>,
    pub meta: QuadratureMeta,
}

impl GrowthProfile {
    /// Builds a profile from per-grid-point log volumes.
    pub fn from_log_volumes(
        kappa: f64,
        dim: usize,
        radii: Vec<f64>,
        log_cum_volume: Vec<f64>,
        q0: f64,
        meta: QuadratureMeta,
    ) -> Result<Self> {
        let sf = SpaceForm::new(kappa, dim)?;
        if radii.len() < 2 || radii.len() != log_cum_volume.len() {
            return Err(Error::Invalid("profile needs matching radii and volumes, at least two rows".into()));
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("profile radii must start at 0 and increase strictly".into()));
        }
        let log_density = (0..radii.len() - 1)
            .map(|k| {
                let (a, b) = (log_cum_volume[k], log_cum_volume[k + 1]);
                let width = m::ln(radii[k + 1] - radii[k]);
                if b > a {
                    m::ln_sub_exp(b, a) - width
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let q_values = radii
            .iter()
            .zip(&log_cum_volume)
            .map(|(&s, &lv)| if s == 0.0 { q0 } else { m::exp(lv - sf.ln_ball_volume(s)) })
            .collect();
        Ok(Self { kappa, dim, radii, log_cum_volume, log_density, q_values, meta })
    }

    /// A profile whose quotient is the closed form `q`, on a uniform grid.
    pub fn synthetic(kappa: f64, dim: usize, s_max: f64, bins: usize, q: impl Fn(f64) -> f64) -> Result<Self> {
        let sf = SpaceForm::new(kappa, dim)?;
        if !(s_max > 0.0) || bins == 0 {
            return Err(Error::Invalid("synthetic profile needs s_max > 0 and bins > 0".into()));
        }
        let radii: Vec<f64> = (0..=bins).map(|k| s_max * k as f64 / bins as f64).collect();
        let mut lv = Vec::with_capacity(radii.len());
        for &s in &radii {
            let qs = q(s);
            if !(qs > 0.0) || !qs.is_finite() {
                return Err(Error::Invalid(format!("synthetic Q({s}) = {qs} must be positive")));
            }
            lv.push(if s == 0.0 { f64::NEG_INFINITY } else { m::ln(qs) + sf.ln_ball_volume(s) });
        }
        let meta = QuadratureMeta { radial_cells: 0, transverse: 0, rel_error: 0.0 };
        Self::from_log_volumes(kappa, dim, radii, lv, q(0.0), meta)
    }

    pub fn bins(&self) -> usize {
        self.radii.len() - 1
    }

    pub fn s_max(&self) -> f64 {
        self.radii[self.bins()]
    }

    pub fn space_form(&self) -> SpaceForm {
        SpaceForm::new(self.kappa, self.dim).expect("validated at construction")
    }

    /// `v(s_k)`; may be `inf` when the volume exceeds `f64`.
    pub fn cum_volume(&self, k: usize) -> f64 {
        m::exp(self.log_cum_volume[k])
    }

    /// Mean density of bin `k`; may be `inf`.
    pub fn density(&self, k: usize) -> f64 {
        m::exp(self.log_density[k])
    }

    pub fn bin_mid(&self, k: usize) -> f64 {
        0.5 * (self.radii[k] + self.radii[k + 1])
    }

    /// `Q(s)` interpolated linearly between grid points.
    pub fn q_at(&self, s: f64) -> f64 {
        m::interp_linear(&self.radii, &self.q_values, s)
    }

    pub fn sup_q(&self) -> f64 {
        self.q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest drop `Q(s_k) - Q(s_{k+1})` against the tolerance `3 rel_error Q`.
    pub fn monotonicity(&self) -> Monotonicity {
        let mut worst = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for k in 1..self.bins() {
            let drop = self.q_values[k] - self.q_values[k + 1];
            let tol = self.tolerance(self.q_values[k]);
            if drop > worst {
                worst = drop;
            }
            let ratio = if tol > 0.0 { drop / tol } else if drop > 0.0 { f64::INFINITY } else { 0.0 };
            worst_ratio = worst_ratio.max(ratio);
        }
        Monotonicity { worst_drop: worst, holds: worst_ratio <= 1.0 }
    }

    /// Checks `mean density(bin k) >= Q(s_k) Vol(S_{s_k}) (1 - tol)` on every
    /// bin with `k >= 1`; returns the index of the first failure.
    pub fn comparison_violation(&self) -> Option<usize> {
        let sf = self.space_form();
        let slack = m::ln_1p(-(3.0 * self.meta.rel_error).min(0.5)) - 1e-12;
        (1..self.bins()).find(|&k| {
            let lhs = self.log_density[k];
            let rhs = m::ln(self.q_values[k]) + sf.ln_sphere_volume(self.radii[k]);
            lhs < rhs + slack
        })
    }

    fn tolerance(&self, q: f64) -> f64 {
        3.0 * self.meta.rel_error * q + 1e-12 * q
    }
}

/// Outcome of the monotonicity check on `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monotonicity {
    pub worst_drop: f64,
    pub holds: bool,
}

/// Computes `v`, its density and `Q` on `bins` uniform bins of `[0, s_max]`.
pub fn compute_growth_profile(geom: &ImmersedGeometry, s_max: f64, bins: usize, nodes: usize) -> Result<GrowthProfile> {
    if bins < 16 {
        return Err(Error::Invalid(format!("bins = {bins} must be at least 16")));
    }
    let grid = SweepGrid::from_nodes(s_max, bins, nodes);
    let fine = sweep::ln_area_by_radius(geom, &grid)?;
    let check = match sweep::ln_area_by_radius_refined(geom, &grid, 2) {
        Some(v) => v,
        None => sweep::ln_area_by_radius(geom, &grid.coarsened())?,
    };
    let lv = cumulate(&fine);
    let lv_check = cumulate(&check);
    let mut rel = 1e-14f64;
    for (a, b) in lv.iter().zip(&lv_check).skip(1) {
        if a.is_finite() && b.is_finite() {
            rel = rel.max(m::exp_m1((a - b).abs()));
        } else if a.is_finite() != b.is_finite() {
            rel = f64::INFINITY;
        }
    }
    if lv[1..].iter().any(|v| !v.is_finite()) {
        return Err(Error::Truncation {
            s_max,
            reason: "an extrinsic ball of positive radius received no area; refine nodes".into(),
        });
    }
    let radii = (0..=bins).map(|k| s_max * k as f64 / bins as f64).collect();
    let meta = QuadratureMeta { radial_cells: grid.radial_cells, transverse: grid.transverse, rel_error: rel };
    GrowthProfile::from_log_volumes(geom.kappa(), geom.dim(), radii, lv, 1.0, meta)
}

fn cumulate(ln_mass: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ln_mass.len() + 1);
    let mut acc = f64::NEG_INFINITY;
    out.push(acc);
    for &x in ln_mass {
        acc = m::ln_add_exp(acc, x);
        out.push(acc);
    }
    out
}

/// `sup Q(R) / Q(R/2)` over grid radii `R >= 2 s_1`, never below 1.
pub fn doubling_constant(profile: &GrowthProfile) -> f64 {
    let lo = 2.0 * profile.radii[1];
    profile
        .radii
        .iter()
        .filter(|&&r| r >= lo * (1.0 - 1e-12))
        .map(|&r| profile.q_at(r) / profile.q_at(0.5 * r))
        .fold(1.0, f64::max)
}

/// `ln Q(R) - ln Q(R/2)`, with `Q` interpolated linearly. Requires
/// `s_1 <= R/2` and `R <= s_max`. Quadrature noise can make the value
/// slightly negative; it is returned as computed.
pub fn log_growth_delta(profile: &GrowthProfile, r: f64) -> Result<f64> {
    let s1 = profile.radii[1];
    let s_max = profile.s_max();
    if !(0.5 * r >= s1 * (1.0 - 1e-12)) || r > s_max * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!("R = {r} needs s_1 = {s1} <= R/2 and R <= s_max = {s_max}")));
    }
    Ok(m::ln(profile.q_at(r)) - m::ln(profile.q_at(0.5 * r)))
}

/// A truncated integral over `M_p^{s_max}` with per-bin contributions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinnedIntegral {
    pub value: f64,
    pub radii: Vec<f64>,
    pub per_bin: Vec<f64>,
    /// Fraction of `value` contributed by the last quartile of bins.
    pub tail_share: f64,
    /// Relative change of `value` against a half-resolution rerun.
    pub rel_error: f64,
}

fn binned_integral(
    geom: &ImmersedGeometry,
    s_max: f64,
    res: Resolution,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<BinnedIntegral> {
    let grid = SweepGrid::from_nodes(s_max, res.bins, res.nodes);
    let per_bin = sweep::field_by_radius(geom, &grid, field)?;
    let value: f64 = per_bin.iter().sum();
    let coarse: f64 = if geom.radial().is_some() {
        value
    } else {
        sweep::field_by_radius(geom, &grid.coarsened(), field)?.iter().sum()
    };
    let tail: f64 = per_bin[per_bin.len() - per_bin.len().div_ceil(4)..].iter().sum();
    let scale = value.abs().max(f64::MIN_POSITIVE);
    Ok(BinnedIntegral {
        value,
        radii: (0..=res.bins).map(|k| s_max * k as f64 / res.bins as f64).collect(),
        tail_share: if value != 0.0 { tail / value } else { 0.0 },
        rel_error: if value == 0.0 && coarse == 0.0 { 0.0 } else { (value - coarse).abs() / scale },
        per_bin,
    })
}

/// `∫ |A|^power dμ` over the extrinsic ball of radius `s_max`.
pub fn curvature_integral(geom: &ImmersedGeometry, power: f64, s_max: f64, res: Resolution) -> Result<BinnedIntegral> {
    if !(power > 0.0) {
        return Err(Error::Invalid(format!("power = {power} must be positive")));
    }
    if geom.is_intrinsic() {
        return Err(Error::Unsupported("an extrinsic realization for |A|".into()));
    }
    let field = move |u: &[f64]| -> Result<f64> {
        let a = geom.second_fundamental_form_norm(u)?;
        Ok(if a == 0.0 { 0.0 } else { m::powf(a, power) })
    };
    binned_integral(geom, s_max, res, &field)
}

/// Total curvature defect `∫ (kappa - K) dμ` over the ball of radius `s_max`
/// (surfaces only).
pub fn curvature_defect_integral(geom: &ImmersedGeometry, s_max: f64, res: Resolution) -> Result<BinnedIntegral> {
    if geom.dim() != 2 {
        return Err(Error::Unsupported("a surface (n = 2) for the curvature defect".into()));
    }
    let kappa = geom.kappa();
    let field = move |u: &[f64]| -> Result<f64> { Ok(kappa - geom.gauss_curvature(u)?) };
    binned_integral(geom, s_max, res, &field)
}

/// Per-bin supremum of `|A| e^{2 sqrt(-kappa) r_p}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub sup_bins: Vec<f64>,
    /// Least-squares slope of `ln sup` against bin midpoints over the last
    /// quartile of nonzero bins; `None` when every bin is zero.
    pub trend_slope: Option<f64>,
    /// `2 sqrt(-kappa)`: the growth rate of the envelope when `|A|` is bounded below.
    pub weight_rate: f64,
    /// Set when the trend grows at more than half `weight_rate`, i.e. the
    /// envelope is not plausibly tending to zero.
    pub flagged: bool,
}

pub fn decay_profile(geom: &ImmersedGeometry, s_max: f64, bins: usize, nodes: usize) -> Result<DecayProfile> {
    let kappa = geom.kappa();
    if !(kappa < 0.0) || geom.is_intrinsic() {
        return Err(Error::Unsupported("a submanifold of hyperbolic space".into()));
    }
    let rate = 2.0 * m::sqrt(-kappa);
    let grid = SweepGrid::from_nodes(s_max, bins, nodes);
    let field = move |u: &[f64], r: f64| -> Result<f64> {
        let a = geom.second_fundamental_form_norm(u)?;
        Ok(if a == 0.0 { 0.0 } else { m::exp(m::ln(a) + rate * r) })
    };
    let sup_bins = sweep::sup_by_radius(geom, &grid, &field)?;
    let radii: Vec<f64> = (0..=bins).map(|k| s_max * k as f64 / bins as f64).collect();
    let start = bins - bins.div_ceil(4);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..bins)
        .filter(|&k| sup_bins[k] > 0.0 && sup_bins[k].is_finite())
        .map(|k| (0.5 * (radii[k] + radii[k + 1]), m::ln(sup_bins[k])))
        .unzip();
    let trend_slope = if xs.len() >= 2 { Some(m::ls_slope(&xs, &ys)) } else { None };
    let flagged = trend_slope.is_some_and(|s| s > 0.5 * rate);
    Ok(DecayProfile { radii, sup_bins, trend_slope, weight_rate: rate, flagged })
}

/// Both sides of one inequality `lhs <= rhs` and whether it holds within `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { lhs, rhs, tol, holds: lhs <= rhs + tol }
    }
}

/// Integrals feeding the finite-growth inequalities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GrowthIntegrals {
    /// `∫ |A|^2 dμ`, needed for surfaces.
    pub curvature_l2: Option<f64>,
}

/// `sup Q <= ¼∫|A|² + χ` (surfaces) and `sup Q <= E` (number of ends).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrowthTheoremReport {
    pub total_curvature: Option<InequalityCheck>,
    pub ends: InequalityCheck,
    /// The Euler characteristic is that of `M`, not of the truncated piece.
    pub uses_global_topology: bool,
}

pub fn check_growth_theorems(
    geom: &ImmersedGeometry,
    profile: &GrowthProfile,
    integrals: &GrowthIntegrals,
) -> Result<GrowthTheoremReport> {
    let topo = geom.topology().ok_or(Error::MissingMetadata("euler characteristic and number of ends"))?;
    let sup_q = profile.sup_q();
    let tol = 3.0 * profile.meta.rel_error * sup_q + 1e-9;
    let total_curvature = if geom.dim() == 2 {
        let l2 = integrals.curvature_l2.ok_or(Error::MissingMetadata("total curvature integral of |A|^2"))?;
        Some(InequalityCheck::new(sup_q, 0.25 * l2 + topo.euler_char as f64, tol))
    } else {
        None
    };
    Ok(GrowthTheoremReport {
        total_curvature,
        ends: InequalityCheck::new(sup_q, topo.ends as f64, tol),
        uses_global_topology: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_log_growth_delta() {
        let p = GrowthProfile::synthetic(0.0, 2, 10.0, 1000, |s| 2.0 - m::exp(-s)).unwrap();
        let want = m::ln(2.0 - m::exp(-2.0)) - m::ln(2.0 - m::exp(-1.0));
        let got = log_growth_delta(&p, 2.0).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((want - 0.133_201_134_754_9).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_has_unit_doubling() {
        let p = GrowthProfile::synthetic(-1.0, 3, 200.0, 400, |_| 1.0).unwrap();
        assert!((doubling_constant(&p) - 1.0).abs() < 1e-12);
        assert!(log_growth_delta(&p, 100.0).unwrap().abs() < 1e-12);
        assert!(p.monotonicity().holds);
        assert!(p.log_cum_volume.last().unwrap().is_finite());
    }

    #[test]
    fn delta_out_of_range() {
        let p = GrowthProfile::synthetic(0.0, 2, 10.0, 100, |_| 1.0).unwrap();
        assert!(log_growth_delta(&p, 0.1).is_err());
        assert!(log_growth_delta(&p, 11.0).is_err());
    }

    #[test]
    fn density_integrates_to_volume() {
        let p = GrowthProfile::synthetic(-1.0, 2, 5.0, 50, |s| 1.0 + s / (1.0 + s)).unwrap();
        let total: f64 = (0..p.bins()).map(|k| p.density(k) * (p.radii[k + 1] - p.radii[k])).sum();
        assert!((total / p.cum_volume(50) - 1.0).abs() < 1e-12);
        assert!(p.comparison_violation().is_none());
    }
}
