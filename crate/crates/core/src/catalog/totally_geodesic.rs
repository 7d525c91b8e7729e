use crate::error::{Error, Result};
use crate::geometry::{
    AmbientSpace, Axis, Chart, Domain, ImmersedGeometry, RadialShell, SffNorms, Topology, MAX_DIM,
};
use crate::numeric::{self as m, PI};
use crate::spaceform::SpaceForm;
use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Geodesic polar coordinates `(r, a_1, ..., a_{n-1})` on `K^n(kappa)` placed
/// in the first `n + 1` (hyperbolic) or `n` (flat) ambient coordinates.
struct PolarChart {
    sf: SpaceForm,
    ambient: AmbientSpace,
}

impl PolarChart {
    /// Unit vector on `S^{n-1}` from hyperspherical angles.
    fn direction(&self, a: &[f64], xi: &mut [f64]) {
        let k = self.sf.dim() - 1;
        let mut prod = 1.0;
        for i in 0..k {
            xi[i] = prod * m::cos(a[i]);
            prod *= m::sin(a[i]);
        }
        xi[k] = prod;
    }

    fn angular_density(&self, a: &[f64]) -> f64 {
        let n = self.sf.dim();
        let mut d = 1.0;
        for (i, &ai) in a.iter().enumerate().take(n.saturating_sub(2)) {
            d *= m::powi(m::sin(ai), (n - 2 - i) as i32);
        }
        d
    }

    fn angle_axes(&self) -> Vec<Axis> {
        let n = self.sf.dim();
        let mut axes: Vec<Axis> = (0..n - 2).map(|_| Axis::closed(0.0, PI)).collect();
        axes.push(Axis::periodic(0.0, 2.0 * PI));
        axes
    }
}

impl Chart for PolarChart {
    fn dim(&self) -> usize {
        self.sf.dim()
    }

    fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    fn domain(&self) -> Domain {
        let mut axes = vec![Axis::closed(0.0, f64::INFINITY)];
        axes.extend(self.angle_axes());
        Domain::new(axes)
    }

    fn embed(&self, u: &[f64], x: &mut [f64]) {
        let n = self.sf.dim();
        let r = u[0];
        let mut xi = [0.0; MAX_DIM];
        self.direction(&u[1..n], &mut xi);
        for v in x.iter_mut().take(self.ambient.coords()) {
            *v = 0.0;
        }
        if self.sf.is_flat() {
            for i in 0..n {
                x[i] = r * xi[i];
            }
        } else {
            let c = self.sf.root();
            x[0] = m::cosh(c * r) / c;
            let sh = m::sinh(c * r) / c;
            for i in 0..n {
                x[1 + i] = sh * xi[i];
            }
        }
    }

    fn area_density(&self, u: &[f64]) -> f64 {
        let n = self.sf.dim();
        m::powi(self.sf.s(u[0]), (n - 1) as i32) * self.angular_density(&u[1..n])
    }

    fn adapted_sff(&self, _u: &[f64]) -> Option<SffNorms> {
        Some(SffNorms { norm_sq: 0.0, mean: 0.0 })
    }

    fn cover(&self, base: &[f64], s_max: f64) -> Result<Domain> {
        // Distance to the pole is 1-Lipschitz.
        let mut axes = vec![Axis::closed(0.0, base[0].abs() + s_max)];
        axes.extend(self.angle_axes());
        Ok(Domain::new(axes))
    }

    fn radial(&self) -> Option<&dyn RadialShell> {
        Some(self)
    }
}

impl RadialShell for PolarChart {
    fn ln_shell(&self, r: f64) -> f64 {
        self.sf.ln_sphere_volume(r)
    }

    fn length_scale(&self) -> f64 {
        if self.sf.is_flat() {
            1.0
        } else {
            1.0 / self.sf.root()
        }
    }
}

/// The totally geodesic `K^n(kappa)` inside `R^m` (`kappa = 0`) or `H^m(kappa)`,
/// in geodesic polar coordinates about the base point.
pub fn totally_geodesic(n: usize, m_dim: usize, kappa: f64) -> Result<ImmersedGeometry> {
    if n < 2 || n > m_dim || n > MAX_DIM {
        return Err(Error::OutOfRange(format!("need 2 <= n <= m and n <= {MAX_DIM}, got n = {n}, m = {m_dim}")));
    }
    let sf = SpaceForm::new(kappa, n)?;
    let ambient = if sf.is_flat() { AmbientSpace::euclidean(m_dim)? } else { AmbientSpace::hyperbolic(m_dim, kappa)? };
    let chart = PolarChart { sf, ambient };
    let base = vec![0.0; n];
    Ok(ImmersedGeometry::from_chart("totally-geodesic", Box::new(chart), base, true)?
        .with_topology(Topology { euler_char: 1, ends: 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_p_is_the_polar_radius() {
        let g = totally_geodesic(3, 5, -1.0).unwrap();
        for &r in &[0.1, 1.0, 7.5, 40.0] {
            let u = [r, 1.1, 2.3];
            let d = g.extrinsic_distance(&u, &[0.0, 0.0, 0.0]).unwrap();
            assert!((d - r).abs() < 1e-12 * r.max(1.0), "{d} vs {r}");
        }
    }

    #[test]
    fn area_element_matches_finite_differences() {
        let g = totally_geodesic(3, 4, -0.5).unwrap();
        let u = [1.3, 0.7, 2.0];
        let fd = g.area_element(&u).unwrap();
        let closed = g.area_density(&u);
        assert!((fd / closed - 1.0).abs() < 1e-8);
        let flat = totally_geodesic(2, 3, 0.0).unwrap();
        assert!((flat.area_element(&[2.0, 0.4]).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn extrinsic_formula_sees_no_curvature() {
        let g = totally_geodesic(2, 3, -1.0).unwrap();
        let s = g.extrinsic_sff(&[1.5, 0.3]).unwrap();
        assert!(s.norm_sq < 1e-8 && s.mean < 1e-6, "{s:?}");
    }
}
