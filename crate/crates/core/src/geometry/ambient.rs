use crate::error::{Error, Result};
use crate::numeric as m;
use alloc::format;

/// Largest ambient coordinate vector handled on the stack.
pub const MAX_COORDS: usize = 8;

/// Hyperboloid points within this (scale-relative) violation are used as is.
pub const HYPERBOLOID_TOL: f64 = 1e-10;
/// Between [`HYPERBOLOID_TOL`] and this bound points are re-projected; beyond it they are rejected.
pub const HYPERBOLOID_HARD: f64 = 1e-6;

/// The constant-curvature ambient spaces: `R^m`, or `H^m(kappa)` realized as the
/// upper sheet `{<x,x>_L = 1/kappa, x_0 > 0}` of `R^{1,m}` with signature `(-,+,...,+)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum AmbientSpace {
    Euclidean { m: usize },
    Hyperbolic { m: usize, kappa: f64 },
}

impl AmbientSpace {
    pub fn euclidean(m: usize) -> Result<Self> {
        if !(2..=MAX_COORDS).contains(&m) {
            return Err(Error::Domain(format!("ambient dimension {m} outside 2..={MAX_COORDS}")));
        }
        Ok(Self::Euclidean { m })
    }

    pub fn hyperbolic(m: usize, kappa: f64) -> Result<Self> {
        if m < 2 || m + 1 > MAX_COORDS {
            return Err(Error::Domain(format!("ambient dimension {m} outside 2..={}", MAX_COORDS - 1)));
        }
        if !(kappa < 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("hyperbolic ambient needs kappa < 0, got {kappa}")));
        }
        Ok(Self::Hyperbolic { m, kappa })
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        match *self {
            Self::Euclidean { m } | Self::Hyperbolic { m, .. } => m,
        }
    }

    /// Length of coordinate vectors (`m`, or `m + 1` on the hyperboloid).
    pub fn coords(&self) -> usize {
        match *self {
            Self::Euclidean { m } => m,
            Self::Hyperbolic { m, .. } => m + 1,
        }
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            Self::Euclidean { .. } => 0.0,
            Self::Hyperbolic { kappa, .. } => kappa,
        }
    }

    /// Euclidean dot product or the Minkowski form `-x_0 y_0 + sum x_i y_i`.
    #[inline]
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = self.coords();
        let mut acc = 0.0;
        for i in 0..d {
            acc += a[i] * b[i];
        }
        if let Self::Hyperbolic { .. } = self {
            acc -= 2.0 * a[0] * b[0];
        }
        acc
    }

    /// Scale-relative violation of the hyperboloid constraint; zero for `R^m`.
    ///
    /// `|kappa <x,x>_L - 1|` is divided by `max(1, -kappa |x|_E^2)`, which is the
    /// size of the rounding error of `<x,x>_L` for far-out points.
    pub fn constraint_violation(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Euclidean { .. } => 0.0,
            Self::Hyperbolic { kappa, m } => {
                // Scaled by the largest coordinate so far-out points do not overflow.
                let big = x[..=m].iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if !(big > 0.0) || !big.is_finite() {
                    return if big == 0.0 { 1.0 } else { f64::INFINITY };
                }
                let mut y = [0.0; MAX_COORDS];
                for (o, v) in y.iter_mut().zip(&x[..=m]) {
                    *o = v / big;
                }
                let inv2 = 1.0 / (big * big);
                let e2: f64 = y[..=m].iter().map(|v| v * v).sum();
                (kappa * self.inner(&y, &y) - inv2).abs() / (-kappa * e2).max(inv2)
            }
        }
    }

    /// Validates a point, re-projecting small hyperboloid violations radially in
    /// the Minkowski norm.
    pub fn normalize(&self, x: &mut [f64]) -> Result<()> {
        let Self::Hyperbolic { kappa, .. } = *self else {
            return Ok(());
        };
        let v = self.constraint_violation(x);
        if v <= HYPERBOLOID_TOL {
            return Ok(());
        }
        if v > HYPERBOLOID_HARD || x[0] <= 0.0 {
            return Err(Error::OffHyperboloid { violation: v });
        }
        let q = kappa * self.inner(x, x);
        if !(q > 0.0) {
            return Err(Error::OffHyperboloid { violation: v });
        }
        let s = 1.0 / m::sqrt(q);
        for c in x[..self.coords()].iter_mut() {
            *c *= s;
        }
        Ok(())
    }

    /// Geodesic distance between two (validated) points.
    ///
    /// On the hyperboloid this is `arccosh(kappa <x,y>_L) / sqrt(-kappa)`, evaluated
    /// through the equivalent chord form `2 asinh(sqrt(-kappa) |x - y|_L / 2) / sqrt(-kappa)`
    /// which keeps full relative precision for nearby points. Far apart, the
    /// chord cancels badly and the `arccosh` form is used instead.
    #[inline]
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        if let Self::Hyperbolic { kappa, .. } = *self {
            let arg = kappa * self.inner(x, y);
            if arg > 2.0 {
                return m::acosh(arg) / m::sqrt(-kappa);
            }
        }
        let d = self.coords();
        let mut acc = 0.0;
        for i in 0..d {
            let t = x[i] - y[i];
            acc += t * t;
        }
        match *self {
            Self::Euclidean { .. } => m::sqrt(acc),
            Self::Hyperbolic { kappa, .. } => {
                let t = x[0] - y[0];
                let chord2 = (acc - 2.0 * t * t).max(0.0);
                let c = m::sqrt(-kappa);
                2.0 * m::asinh(0.5 * c * m::sqrt(chord2)) / c
            }
        }
    }

    /// Distance via `arccosh`, with the argument clamped to 1 when it falls at
    /// most `1e-12` below. Used to cross-check [`AmbientSpace::distance`].
    pub fn distance_arccosh(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match *self {
            Self::Euclidean { .. } => Ok(self.distance(x, y)),
            Self::Hyperbolic { kappa, .. } => {
                let mut arg = kappa * self.inner(x, y);
                if arg < 1.0 {
                    if arg < 1.0 - 1e-12 {
                        return Err(Error::Domain(format!("arccosh argument {arg} < 1")));
                    }
                    arg = 1.0;
                }
                Ok(m::acosh(arg) / m::sqrt(-kappa))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_pythagoras() {
        let e = AmbientSpace::euclidean(3).unwrap();
        assert_eq!(e.distance(&[0.0, 0.0, 0.0], &[3.0, 4.0, 0.0]), 5.0);
    }

    #[test]
    fn unit_speed_geodesic_on_hyperboloid() {
        let h = AmbientSpace::hyperbolic(3, -1.0).unwrap();
        let p = [1.0, 0.0, 0.0, 0.0];
        let x = [m::cosh(1.0), m::sinh(1.0), 0.0, 0.0];
        assert!((h.distance(&p, &x) - 1.0).abs() < 1e-15);
        assert!((h.distance_arccosh(&p, &x).unwrap() - 1.0).abs() < 1e-12);
        let far = [m::cosh(200.0), m::sinh(200.0), 0.0, 0.0];
        assert!((h.distance(&p, &far) - 200.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_scaling() {
        // kappa = -4: the same hyperboloid shrunk by 1/2, distances halve.
        let h = AmbientSpace::hyperbolic(2, -4.0).unwrap();
        let p = [0.5, 0.0, 0.0];
        let x = [0.5 * m::cosh(3.0), 0.5 * m::sinh(3.0), 0.0];
        assert!(h.constraint_violation(&x) < 1e-15);
        assert!((h.distance(&p, &x) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn reprojection_and_rejection() {
        let h = AmbientSpace::hyperbolic(2, -1.0).unwrap();
        let mut x = [m::cosh(1.0) * (1.0 + 1e-8), m::sinh(1.0) * (1.0 + 1e-8), 0.0];
        h.normalize(&mut x).unwrap();
        assert!(h.constraint_violation(&x) <= HYPERBOLOID_TOL);
        let mut bad = [2.0, 0.0, 0.0];
        assert!(matches!(h.normalize(&mut bad), Err(Error::OffHyperboloid { .. })));
    }

    #[test]
    fn arccosh_clamp_at_coincident_points() {
        let h = AmbientSpace::hyperbolic(2, -1.0).unwrap();
        let p = [m::cosh(0.3), m::sinh(0.3), 0.0];
        assert_eq!(h.distance_arccosh(&p, &p).unwrap(), 0.0);
        assert_eq!(h.distance(&p, &p), 0.0);
    }
}
