//! Immersed submanifolds of `R^m` and `H^m(kappa)`: extrinsic distance, induced
//! area element, second fundamental form and Gaussian curvature.

mod ambient;
mod chart;
pub mod sweep;

pub use ambient::{AmbientSpace, HYPERBOLOID_HARD, HYPERBOLOID_TOL, MAX_COORDS};
pub use chart::{Axis, Chart, Coords, Domain, RadialShell, SffNorms, MAX_DIM};

use crate::error::{point3, Error, Result};
use crate::numeric::{self as m, PI};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use chart::{det, inverse, metric};

/// Euler characteristic and number of ends, supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Topology {
    pub euler_char: i64,
    pub ends: i64,
}

/// Rotationally symmetric intrinsic metric `dr^2 + f(r)^2 dtheta^2` on the plane.
pub trait Warping: Send + Sync {
    /// Upper curvature bound the metric is compared against.
    fn kappa(&self) -> f64;
    fn f(&self, r: f64) -> f64;
    fn df(&self, r: f64) -> f64;
    fn ddf(&self, r: f64) -> f64;
    fn ln_f(&self, r: f64) -> f64 {
        m::ln(self.f(r))
    }
    /// `1 / sqrt(-kappa)`, or 1 when flat.
    fn length_scale_hint(&self) -> f64 {
        let k = self.kappa();
        if k < 0.0 {
            1.0 / m::sqrt(-k)
        } else {
            1.0
        }
    }
}

struct WarpedShell(Arc<dyn Warping>);

impl RadialShell for WarpedShell {
    fn ln_shell(&self, r: f64) -> f64 {
        m::ln(2.0 * PI) + self.0.ln_f(r)
    }

    fn length_scale(&self) -> f64 {
        self.0.length_scale_hint()
    }
}

pub enum Realization {
    /// Extrinsic: a chart into the ambient space.
    Chart(Box<dyn Chart>),
    /// Intrinsic 2-D warped metric; `r_p` is the radial coordinate.
    Warped(Arc<dyn Warping>),
}

/// A parametrized submanifold with a base point `p` and optional topology metadata.
pub struct ImmersedGeometry {
    name: String,
    realization: Realization,
    warped_shell: Option<WarpedShell>,
    base: Vec<f64>,
    base_coords: Coords,
    topology: Option<Topology>,
    minimal: bool,
}

impl core::fmt::Debug for ImmersedGeometry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ImmersedGeometry")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("kappa", &self.kappa())
            .field("base", &self.base)
            .field("topology", &self.topology)
            .finish()
    }
}

impl ImmersedGeometry {
    /// Builds an extrinsic geometry. The base point must lie in the chart domain.
    pub fn from_chart(name: &str, chart: Box<dyn Chart>, base: Vec<f64>, minimal: bool) -> Result<Self> {
        let dom = chart.domain();
        if chart.dim() < 1 || chart.dim() > MAX_DIM || dom.dim() != chart.dim() {
            return Err(Error::Invalid(format!("chart dimension {} unsupported", chart.dim())));
        }
        if !dom.contains(&base) {
            return Err(Error::Domain(format!("base point {base:?} outside the parameter domain")));
        }
        let amb = chart.ambient();
        let mut base_coords = [0.0; MAX_COORDS];
        chart.embed(&base, &mut base_coords);
        amb.normalize(&mut base_coords)?;
        Ok(Self {
            name: name.to_string(),
            realization: Realization::Chart(chart),
            warped_shell: None,
            base,
            base_coords,
            topology: None,
            minimal,
        })
    }

    /// Builds an intrinsic warped surface with base point at the pole.
    pub fn from_warping(name: &str, warping: Arc<dyn Warping>) -> Self {
        Self {
            name: name.to_string(),
            warped_shell: Some(WarpedShell(warping.clone())),
            realization: Realization::Warped(warping),
            base: alloc::vec![0.0, 0.0],
            base_coords: [0.0; MAX_COORDS],
            topology: None,
            minimal: false,
        }
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = Some(topology);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn chart(&self) -> Option<&dyn Chart> {
        match &self.realization {
            Realization::Chart(c) => Some(c.as_ref()),
            Realization::Warped(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.realization {
            Realization::Chart(c) => c.dim(),
            Realization::Warped(_) => 2,
        }
    }

    pub fn ambient(&self) -> Option<AmbientSpace> {
        self.chart().map(|c| c.ambient())
    }

    /// The curvature bound `kappa` of the comparison space form.
    pub fn kappa(&self) -> f64 {
        match &self.realization {
            Realization::Chart(c) => c.ambient().kappa(),
            Realization::Warped(w) => w.kappa(),
        }
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base
    }

    pub fn topology(&self) -> Option<Topology> {
        self.topology
    }

    /// Whether the entry is a minimal immersion (intrinsic metrics are not).
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_intrinsic(&self) -> bool {
        matches!(self.realization, Realization::Warped(_))
    }

    pub fn domain(&self) -> Domain {
        match &self.realization {
            Realization::Chart(c) => c.domain(),
            Realization::Warped(_) => Domain::new(alloc::vec![Axis::closed(0.0, f64::INFINITY), Axis::periodic(0.0, 2.0 * PI)]),
        }
    }

    /// Exact radial shell structure, when `r_p` is the first coordinate.
    pub fn radial(&self) -> Option<&dyn RadialShell> {
        match &self.realization {
            Realization::Chart(c) if self.base[0] == 0.0 => c.radial(),
            Realization::Chart(_) => None,
            Realization::Warped(_) => self.warped_shell.as_ref().map(|s| s as &dyn RadialShell),
        }
    }

    fn check_in_domain(&self, u: &[f64]) -> Result<()> {
        if self.domain().contains(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!("parameter point {u:?} outside the domain of {}", self.name)))
        }
    }

    /// Validated ambient coordinates of `u`.
    pub fn point(&self, u: &[f64]) -> Result<Coords> {
        let c = self.chart().ok_or_else(|| Error::Unsupported("an extrinsic chart".into()))?;
        let mut x = [0.0; MAX_COORDS];
        c.embed(u, &mut x);
        c.ambient().normalize(&mut x)?;
        Ok(x)
    }

    /// `dist^N(phi(u), phi(v))`.
    pub fn extrinsic_distance(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_in_domain(u)?;
        self.check_in_domain(v)?;
        match &self.realization {
            Realization::Chart(c) => {
                let x = self.point(u)?;
                let y = self.point(v)?;
                Ok(c.ambient().distance(&x, &y))
            }
            Realization::Warped(_) => {
                if v[0] == 0.0 {
                    Ok(u[0].abs())
                } else if u[0] == 0.0 {
                    Ok(v[0].abs())
                } else {
                    Err(Error::Unsupported("distances from the pole only on intrinsic surfaces".into()))
                }
            }
        }
    }

    /// `r_p(u)`, the distance to the base point. Skips validation; used in sweeps.
    #[inline]
    pub fn r_p(&self, u: &[f64]) -> f64 {
        match &self.realization {
            Realization::Chart(c) => {
                let mut x = [0.0; MAX_COORDS];
                c.embed(u, &mut x);
                c.ambient().distance(&x, &self.base_coords)
            }
            Realization::Warped(_) => u[0].abs(),
        }
    }

    /// `sqrt(det g)` without the degeneracy check.
    #[inline]
    pub fn area_density(&self, u: &[f64]) -> f64 {
        match &self.realization {
            Realization::Chart(c) => c.area_density(u),
            Realization::Warped(w) => w.f(u[0].abs()),
        }
    }

    /// Induced Riemannian volume density `sqrt(det g_ij)` at `u`.
    pub fn area_element(&self, u: &[f64]) -> Result<f64> {
        self.check_in_domain(u)?;
        let (d, detg) = match &self.realization {
            Realization::Chart(c) => {
                let n = c.dim();
                let mut t = [[0.0; MAX_COORDS]; MAX_DIM];
                c.tangents(u, &mut t);
                let detg = det(&metric(&c.ambient(), &t, n), n);
                (m::sqrt(detg.max(0.0)), detg)
            }
            Realization::Warped(w) => {
                let f = w.f(u[0]);
                (f, f * f)
            }
        };
        if !(detg > 0.0) {
            return Err(Error::Degenerate { at: point3(u), det: detg });
        }
        Ok(d)
    }

    /// Second fundamental form through second derivatives of the chart in
    /// ambient coordinates, projected onto the normal bundle.
    pub fn extrinsic_sff(&self, u: &[f64]) -> Result<SffNorms> {
        let c = self.chart().ok_or_else(|| Error::Unsupported("an extrinsic chart".into()))?;
        sff_from_chart(c, u)
    }

    /// `|A|^2` and `|H|`: the chart's adapted closed form when it has one, the
    /// ambient-coordinate formula otherwise.
    pub fn second_fundamental_form(&self, u: &[f64]) -> Result<SffNorms> {
        self.check_in_domain(u)?;
        let c = self.chart().ok_or_else(|| Error::Unsupported("an extrinsic chart".into()))?;
        match c.adapted_sff(u) {
            Some(s) => Ok(s),
            None => sff_from_chart(c, u),
        }
    }

    /// `|A|(u)`.
    pub fn second_fundamental_form_norm(&self, u: &[f64]) -> Result<f64> {
        Ok(m::sqrt(self.second_fundamental_form(u)?.norm_sq.max(0.0)))
    }

    /// Gaussian curvature of the induced metric (surfaces only), from the
    /// Brioschi formula with finite-difference derivatives of the metric.
    pub fn gauss_curvature(&self, u: &[f64]) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("a two-dimensional geometry".into()));
        }
        match &self.realization {
            Realization::Warped(w) => {
                // -f''/f is 0/0 at the pole; K is continuous there.
                let r = u[0].abs().max(1e-6 / w.length_scale_hint());
                Ok(-w.ddf(r) / w.f(r))
            }
            Realization::Chart(c) => brioschi(c.as_ref(), u),
        }
    }

    /// `|A|` from the Gauss equation `|A|^2 = 2 (kappa - K_M)`, valid for minimal surfaces.
    pub fn sff_norm_gauss(&self, u: &[f64]) -> Result<f64> {
        let k = self.gauss_curvature(u)?;
        Ok(m::sqrt((2.0 * (self.kappa() - k)).max(0.0)))
    }
}

/// `|A|^2` and `|H|` from the chart's ambient-coordinate derivatives, ignoring
/// any adapted closed form.
pub fn sff_via_ambient(c: &dyn Chart, u: &[f64]) -> Result<SffNorms> {
    sff_from_chart(c, u)
}

fn sff_from_chart(c: &dyn Chart, u: &[f64]) -> Result<SffNorms> {
    let n = c.dim();
    let amb = c.ambient();
    let d = amb.coords();
    let kappa = amb.kappa();
    let mut x = [0.0; MAX_COORDS];
    c.embed(u, &mut x);
    let mut t = [[0.0; MAX_COORDS]; MAX_DIM];
    c.tangents(u, &mut t);
    let mut h = [[[0.0; MAX_COORDS]; MAX_DIM]; MAX_DIM];
    c.second(u, &mut h);
    let g = metric(&amb, &t, n);
    let detg = det(&g, n);
    if !(detg > 0.0) {
        return Err(Error::Degenerate { at: point3(u), det: detg });
    }
    let gi = inverse(&g, n).ok_or(Error::Degenerate { at: point3(u), det: detg })?;
    let xx = amb.inner(&x, &x);
    let mut b = [[[0.0; MAX_COORDS]; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in i..n {
            let mut v = h[i][j];
            if kappa != 0.0 {
                // Ambient covariant derivative on the hyperboloid: add kappa g_ij x,
                // then drop any residual component along the position vector.
                for k in 0..d {
                    v[k] += kappa * g[i][j] * x[k];
                }
                let r = amb.inner(&v, &x) / xx;
                for k in 0..d {
                    v[k] -= r * x[k];
                }
            }
            // Remove the tangential part.
            let mut coef = [0.0; MAX_DIM];
            for (k, ck) in coef.iter_mut().enumerate().take(n) {
                *ck = amb.inner(&v, &t[k]);
            }
            for k in 0..n {
                let mut w = 0.0;
                for l in 0..n {
                    w += gi[k][l] * coef[l];
                }
                for q in 0..d {
                    v[q] -= w * t[k][q];
                }
            }
            b[i][j] = v;
            b[j][i] = v;
        }
    }
    let mut norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let w = gi[i][k] * gi[j][l];
                    if w != 0.0 {
                        norm_sq += w * amb.inner(&b[i][j], &b[k][l]);
                    }
                }
            }
        }
    }
    let mut hv = [0.0; MAX_COORDS];
    for i in 0..n {
        for j in 0..n {
            for q in 0..d {
                hv[q] += gi[i][j] * b[i][j][q];
            }
        }
    }
    let mean = m::sqrt(amb.inner(&hv, &hv).max(0.0));
    Ok(SffNorms { norm_sq, mean })
}

fn metric_at(c: &dyn Chart, u: &[f64]) -> (f64, f64, f64) {
    let amb = c.ambient();
    let mut t = [[0.0; MAX_COORDS]; MAX_DIM];
    c.tangents(u, &mut t);
    (amb.inner(&t[0], &t[0]), amb.inner(&t[0], &t[1]), amb.inner(&t[1], &t[1]))
}

fn brioschi(c: &dyn Chart, u: &[f64]) -> Result<f64> {
    let (e, f, g) = metric_at(c, u);
    let w = e * g - f * f;
    if !(w > 0.0) {
        return Err(Error::Degenerate { at: point3(u), det: w });
    }
    // Second differences of a metric that may itself come from finite
    // differences: a step near eps^{1/4} balances noise and truncation.
    let h0 = 1e-3 * u[0].abs().max(1.0);
    let h1 = 1e-3 * u[1].abs().max(1.0);
    let at = |a: f64, b: f64| metric_at(c, &[u[0] + a, u[1] + b]);
    let (ep0, fp0, gp0) = at(h0, 0.0);
    let (em0, fm0, gm0) = at(-h0, 0.0);
    let (e0p, f0p, g0p) = at(0.0, h1);
    let (e0m, f0m, g0m) = at(0.0, -h1);
    let e_u = (ep0 - em0) / (2.0 * h0);
    let f_u = (fp0 - fm0) / (2.0 * h0);
    let g_u = (gp0 - gm0) / (2.0 * h0);
    let e_v = (e0p - e0m) / (2.0 * h1);
    let f_v = (f0p - f0m) / (2.0 * h1);
    let g_v = (g0p - g0m) / (2.0 * h1);
    let g_uu = (gp0 - 2.0 * g + gm0) / (h0 * h0);
    let e_vv = (e0p - 2.0 * e + e0m) / (h1 * h1);
    let (_, fpp, _) = at(h0, h1);
    let (_, fpm, _) = at(h0, -h1);
    let (_, fmp, _) = at(-h0, h1);
    let (_, fmm, _) = at(-h0, -h1);
    let f_uv = (fpp - fpm - fmp + fmm) / (4.0 * h0 * h1);
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let m1 = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, e, f],
        [0.5 * g_v, f, g],
    ];
    let m2 = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]];
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// Wraps a chart so that second derivatives always come from central finite
/// differences of its tangents, and no adapted closed form is used.
pub struct FiniteDifferenceSecond<C>(pub C);

impl<C: Chart> Chart for FiniteDifferenceSecond<C> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn ambient(&self) -> AmbientSpace {
        self.0.ambient()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn embed(&self, u: &[f64], x: &mut [f64]) {
        self.0.embed(u, x)
    }
    fn tangents(&self, u: &[f64], out: &mut [Coords]) {
        self.0.tangents(u, out)
    }
    fn cover(&self, base: &[f64], s_max: f64) -> Result<Domain> {
        self.0.cover(base, s_max)
    }
}

/// A rotation surface with induced metric `dt^2 + g(t)^2 dtheta^2` in arc length `t`.
#[derive(Clone)]
pub struct SurfaceOfRevolution {
    pub name: String,
    /// Comparison curvature of the ambient (or intrinsic) space form.
    pub kappa: f64,
    pub kind: RevolutionKind,
    /// Largest `|t|` for which `g` is available.
    pub reach: f64,
    radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevolutionKind {
    /// `t in [0, reach)` with `g(0) = 0` (the pole is the base point).
    Pole,
    /// `t in (-reach, reach)` with `g > 0` everywhere (two ends, waist at `t = 0`).
    TwoSided,
}

impl core::fmt::Debug for SurfaceOfRevolution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SurfaceOfRevolution")
            .field("name", &self.name)
            .field("kappa", &self.kappa)
            .field("kind", &self.kind)
            .field("reach", &self.reach)
            .finish()
    }
}

impl SurfaceOfRevolution {
    pub fn new(
        name: &str,
        kappa: f64,
        kind: RevolutionKind,
        reach: f64,
        radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Self {
        Self { name: name.to_string(), kappa, kind, reach, radius }
    }

    /// Rotational circle radius `g(t)`.
    pub fn circle_radius(&self, t: f64) -> f64 {
        (self.radius)(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    struct Plane;
    impl Chart for Plane {
        fn dim(&self) -> usize {
            2
        }
        fn ambient(&self) -> AmbientSpace {
            AmbientSpace::Euclidean { m: 3 }
        }
        fn domain(&self) -> Domain {
            Domain::new(vec![Axis::closed(-10.0, 10.0), Axis::closed(-10.0, 10.0)])
        }
        fn embed(&self, u: &[f64], x: &mut [f64]) {
            x[0] = u[0];
            x[1] = u[1];
            x[2] = 0.0;
        }
        fn cover(&self, _b: &[f64], _s: f64) -> Result<Domain> {
            Ok(self.domain())
        }
    }

    /// Euclidean catenoid with only the embedding known.
    struct RawCatenoid;
    impl Chart for RawCatenoid {
        fn dim(&self) -> usize {
            2
        }
        fn ambient(&self) -> AmbientSpace {
            AmbientSpace::Euclidean { m: 3 }
        }
        fn domain(&self) -> Domain {
            Domain::new(vec![Axis::closed(-5.0, 5.0), Axis::periodic(0.0, 2.0 * PI)])
        }
        fn embed(&self, u: &[f64], x: &mut [f64]) {
            x[0] = m::cosh(u[0]) * m::cos(u[1]);
            x[1] = m::cosh(u[0]) * m::sin(u[1]);
            x[2] = u[0];
        }
        fn cover(&self, _b: &[f64], _s: f64) -> Result<Domain> {
            Ok(self.domain())
        }
    }

    #[test]
    fn flat_plane_area_and_curvature() {
        let g = ImmersedGeometry::from_chart("plane", Box::new(Plane), vec![0.0, 0.0], true).unwrap();
        assert!((g.area_element(&[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(g.second_fundamental_form_norm(&[1.0, 2.0]).unwrap() < 1e-6);
        assert!(g.gauss_curvature(&[0.5, 0.5]).unwrap().abs() < 1e-4);
        assert!((g.extrinsic_distance(&[3.0, 4.0], &[0.0, 0.0]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn finite_difference_catenoid_quantities() {
        let g = ImmersedGeometry::from_chart("cat", Box::new(RawCatenoid), vec![0.0, 0.0], true).unwrap();
        for &t in &[0.0, 0.7, -1.3] {
            let c2 = m::cosh(t) * m::cosh(t);
            assert!((g.area_element(&[t, 0.4]).unwrap() - c2).abs() < 1e-8 * c2);
        }
        // Waist: K = -1, |A|^2 = 2.
        let a = g.second_fundamental_form(&[0.0, 0.3]).unwrap();
        assert!((a.norm_sq - 2.0).abs() < 1e-5, "{a:?}");
        assert!(a.mean < 1e-5);
        assert!((g.gauss_curvature(&[0.0, 0.3]).unwrap() + 1.0).abs() < 1e-4);
        assert!((g.sff_norm_gauss(&[0.0, 0.3]).unwrap() - m::sqrt(2.0)).abs() < 1e-4);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let g = ImmersedGeometry::from_chart("plane", Box::new(Plane), vec![0.0, 0.0], true).unwrap();
        assert!(g.area_element(&[11.0, 0.0]).is_err());
        assert!(ImmersedGeometry::from_chart("plane", Box::new(Plane), vec![20.0, 0.0], true).is_err());
    }
}
