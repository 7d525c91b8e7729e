use crate::error::{Error, Result};
use crate::geometry::{
    AmbientSpace, Axis, Chart, Coords, Domain, ImmersedGeometry, RevolutionKind, SffNorms, SurfaceOfRevolution,
    Topology, MAX_DIM,
};
use crate::numeric::{self as m, PI};
use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;

/// `(t, theta) -> scale (cosh t cos theta, cosh t sin theta, t)`.
pub(crate) struct CatenoidChart {
    pub(crate) scale: f64,
}

impl Chart for CatenoidChart {
    fn dim(&self) -> usize {
        2
    }

    fn ambient(&self) -> AmbientSpace {
        AmbientSpace::Euclidean { m: 3 }
    }

    fn domain(&self) -> Domain {
        Domain::new(vec![Axis::closed(f64::NEG_INFINITY, f64::INFINITY), Axis::periodic(-PI, PI)])
    }

    fn embed(&self, u: &[f64], x: &mut [f64]) {
        let ch = m::cosh(u[0]);
        x[0] = self.scale * ch * m::cos(u[1]);
        x[1] = self.scale * ch * m::sin(u[1]);
        x[2] = self.scale * u[0];
    }

    fn tangents(&self, u: &[f64], out: &mut [Coords]) {
        let (sh, ch) = (m::sinh(u[0]), m::cosh(u[0]));
        let (s, c) = (m::sin(u[1]), m::cos(u[1]));
        let k = self.scale;
        out[0][..3].copy_from_slice(&[k * sh * c, k * sh * s, k]);
        out[1][..3].copy_from_slice(&[-k * ch * s, k * ch * c, 0.0]);
    }

    fn second(&self, u: &[f64], out: &mut [[Coords; MAX_DIM]]) {
        let (sh, ch) = (m::sinh(u[0]), m::cosh(u[0]));
        let (s, c) = (m::sin(u[1]), m::cos(u[1]));
        let k = self.scale;
        out[0][0][..3].copy_from_slice(&[k * ch * c, k * ch * s, 0.0]);
        out[0][1][..3].copy_from_slice(&[-k * sh * s, k * sh * c, 0.0]);
        out[1][0] = out[0][1];
        out[1][1][..3].copy_from_slice(&[-k * ch * c, -k * ch * s, 0.0]);
    }

    fn area_density(&self, u: &[f64]) -> f64 {
        let ch = m::cosh(u[0]);
        self.scale * self.scale * ch * ch
    }

    fn adapted_sff(&self, u: &[f64]) -> Option<SffNorms> {
        // Principal curvatures are ±1 / (scale cosh^2 t).
        let ch2 = m::cosh(u[0]) * m::cosh(u[0]);
        let k = 1.0 / (self.scale * ch2);
        Some(SffNorms { norm_sq: 2.0 * k * k, mean: 0.0 })
    }

    fn cover(&self, base: &[f64], s_max: f64) -> Result<Domain> {
        let k = self.scale;
        let (t0, th0) = (base[0], base[1]);
        if t0 == 0.0 && th0 == 0.0 {
            // |x - p| >= scale (cosh t - 1), >= scale |t|, and >= 2 scale sin(|theta|/2).
            let t_max = m::acosh(1.0 + s_max / k).min(s_max / k) * (1.0 + 1e-9);
            let theta = if s_max < 2.0 * k {
                let phi = 2.0 * libm::asin(s_max / (2.0 * k)) * (1.0 + 1e-6) + 1e-12;
                if phi < PI {
                    Axis::closed(-phi, phi)
                } else {
                    Axis::periodic(-PI, PI)
                }
            } else {
                Axis::periodic(-PI, PI)
            };
            return Ok(Domain::new(vec![Axis::closed(-t_max, t_max), theta]));
        }
        // |z - z_0| = scale |t - t_0|.
        let dt = s_max / k * (1.0 + 1e-9);
        Ok(Domain::new(vec![Axis::closed(t0 - dt, t0 + dt), Axis::periodic(-PI, PI)]))
    }
}

/// The catenoid of waist radius `scale` in `R^3`, based at a waist point.
pub fn euclidean_catenoid(scale: f64) -> Result<(ImmersedGeometry, SurfaceOfRevolution)> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::OutOfRange(format!("catenoid scale {scale} must be positive")));
    }
    let geom = ImmersedGeometry::from_chart("euclidean-catenoid", Box::new(CatenoidChart { scale }), vec![0.0, 0.0], true)?
        .with_topology(Topology { euler_char: 0, ends: 2 });
    // Arc length from the waist is scale sinh t, so the circle radius is sqrt(scale^2 + sigma^2).
    let rev = SurfaceOfRevolution::new(
        "euclidean-catenoid",
        0.0,
        RevolutionKind::TwoSided,
        f64::INFINITY,
        Arc::new(move |sigma: f64| m::sqrt(scale * scale + sigma * sigma)),
    );
    Ok((geom, rev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FiniteDifferenceSecond;

    #[test]
    fn closed_forms_match_ambient_formula() {
        let (g, _) = euclidean_catenoid(1.7).unwrap();
        let fd = ImmersedGeometry::from_chart("fd", Box::new(FiniteDifferenceSecond(CatenoidChart { scale: 1.7 })), vec![0.0, 0.0], true)
            .unwrap();
        for &u in &[[0.0, 0.0], [0.8, 1.0], [-2.0, 3.0]] {
            let a = g.second_fundamental_form(&u).unwrap();
            let e = g.extrinsic_sff(&u).unwrap();
            let f = fd.extrinsic_sff(&u).unwrap();
            assert!((a.norm_sq / e.norm_sq - 1.0).abs() < 1e-12);
            assert!((a.norm_sq / f.norm_sq - 1.0).abs() < 1e-6);
            assert!(e.mean < 1e-12 && f.mean < 1e-6);
        }
    }

    #[test]
    fn cover_contains_the_ball() {
        let (g, _) = euclidean_catenoid(1.0).unwrap();
        let c = g.chart().unwrap();
        for &s in &[0.05, 0.5, 3.0, 40.0] {
            let dom = c.cover(&[0.0, 0.0], s).unwrap();
            for i in 0..=200 {
                for j in 0..=200 {
                    let u = [-6.0 + 12.0 * i as f64 / 200.0, -PI + 2.0 * PI * j as f64 / 200.0];
                    if g.r_p(&u) < s {
                        assert!(dom.contains(&u), "s = {s}, u = {u:?}");
                    }
                }
            }
        }
    }
}
