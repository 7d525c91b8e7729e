use crate::error::{Error, Result};
use crate::geometry::{ImmersedGeometry, RevolutionKind, SurfaceOfRevolution, Topology, Warping};
use crate::numeric as m;
use alloc::format;
use alloc::sync::Arc;

/// `f(r) = (1 + ε) S_κ(r) - ε r sech(c r)` with `c = sqrt(-kappa)`.
///
/// `f'' + κ f = 2 ε c (c r sech³(c r) + sech(c r) tanh(c r)) >= 0`, so the
/// curvature `-f''/f` stays at or below `kappa`, and `f / S_κ -> 1 + ε`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedWarp {
    pub epsilon: f64,
    pub kappa: f64,
    c: f64,
}

impl PerturbedWarp {
    pub fn new(epsilon: f64, kappa: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::OutOfRange(format!("epsilon = {epsilon} must be non-negative")));
        }
        if !(kappa < 0.0) || !kappa.is_finite() {
            return Err(Error::OutOfRange(format!("kappa = {kappa} must be negative")));
        }
        Ok(Self { epsilon, kappa, c: m::sqrt(-kappa) })
    }

    fn sech(x: f64) -> f64 {
        if x > 700.0 {
            0.0
        } else {
            1.0 / m::cosh(x)
        }
    }
}

impl Warping for PerturbedWarp {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn f(&self, r: f64) -> f64 {
        let x = self.c * r;
        (1.0 + self.epsilon) * m::sinh(x) / self.c - self.epsilon * r * Self::sech(x)
    }

    fn df(&self, r: f64) -> f64 {
        let x = self.c * r;
        let (se, th) = (Self::sech(x), m::tanh(x));
        (1.0 + self.epsilon) * m::cosh(x) - self.epsilon * se + self.epsilon * x * se * th
    }

    fn ddf(&self, r: f64) -> f64 {
        let x = self.c * r;
        let (se, th) = (Self::sech(x), m::tanh(x));
        let c = self.c;
        (1.0 + self.epsilon) * c * m::sinh(x) + self.epsilon * c * (2.0 * se * th + x * se * (se * se - th * th))
    }

    fn ln_f(&self, r: f64) -> f64 {
        let x = self.c * r;
        if x < 20.0 {
            return m::ln(self.f(r));
        }
        // f = (1+ε) sinh(x)/c · (1 - ε x sech(x) / ((1+ε) sinh x)).
        let corr = self.epsilon * x * Self::sech(x) / ((1.0 + self.epsilon) * m::sinh(x.min(700.0)));
        m::ln((1.0 + self.epsilon) / self.c) + m::ln_sinh(x) + m::ln_1p(-corr)
    }
}

/// Largest `K_M - kappa` and `f / S_κ` over the check nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpCheck {
    pub max_curvature_excess: f64,
    pub at: f64,
    pub sup_ratio: f64,
}

/// Evaluates `K_M - kappa` and `f / S_κ` at 4000 nodes on `(0, 60 / c]`.
pub fn check_warp(w: &PerturbedWarp) -> WarpCheck {
    let mut out = WarpCheck { max_curvature_excess: f64::NEG_INFINITY, at: 0.0, sup_ratio: 0.0 };
    let top = 60.0 / w.c;
    for i in 1..=4000 {
        let r = top * i as f64 / 4000.0;
        let k = -w.ddf(r) / w.f(r);
        if k - w.kappa > out.max_curvature_excess {
            out.max_curvature_excess = k - w.kappa;
            out.at = r;
        }
        let ratio = m::exp(w.ln_f(r) - (m::ln_sinh(w.c * r) - m::ln(w.c)));
        out.sup_ratio = out.sup_ratio.max(ratio);
    }
    out
}

/// The intrinsic surface `dr² + f(r)² dθ²` about its pole, rejected when the
/// node check finds `K_M > kappa`.
pub fn warped_intrinsic_surface(epsilon: f64, kappa: f64) -> Result<(ImmersedGeometry, SurfaceOfRevolution)> {
    let w = PerturbedWarp::new(epsilon, kappa)?;
    let chk = check_warp(&w);
    // Relative rounding in -f''/f near the pole.
    if chk.max_curvature_excess > 1e-9 * -kappa {
        return Err(Error::SelfCheck(format!(
            "K_M - kappa = {:e} > 0 at r = {}",
            chk.max_curvature_excess, chk.at
        )));
    }
    if !chk.sup_ratio.is_finite() {
        return Err(Error::SelfCheck("f / S_kappa is unbounded on the check nodes".into()));
    }
    let warp = Arc::new(w);
    let geom = ImmersedGeometry::from_warping("warped-surface", warp.clone())
        .with_topology(Topology { euler_char: 1, ends: 1 });
    let rev = SurfaceOfRevolution::new(
        "warped-surface",
        kappa,
        RevolutionKind::Pole,
        f64::INFINITY,
        Arc::new(move |r: f64| warp.f(r)),
    );
    Ok((geom, rev))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let w = PerturbedWarp::new(0.3, -2.0).unwrap();
        for &r in &[0.05, 0.7, 3.0] {
            let h = 1e-5;
            let df = (w.f(r + h) - w.f(r - h)) / (2.0 * h);
            let ddf = (w.df(r + h) - w.df(r - h)) / (2.0 * h);
            assert!((df - w.df(r)).abs() < 1e-8 * w.df(r).abs().max(1.0));
            assert!((ddf - w.ddf(r)).abs() < 1e-7 * w.ddf(r).abs().max(1.0));
        }
    }

    #[test]
    fn curvature_bound_and_ratio() {
        let w = PerturbedWarp::new(0.1, -1.0).unwrap();
        let chk = check_warp(&w);
        assert!(chk.max_curvature_excess <= 0.0, "{chk:?}");
        assert!((chk.sup_ratio - 1.1).abs() < 1e-6);
        assert!((w.ln_f(800.0) - (m::ln(1.1) + 800.0 - m::ln(2.0))).abs() < 1e-12);
    }

    #[test]
    fn zero_epsilon_is_the_model() {
        let (g, _) = warped_intrinsic_surface(0.0, -1.0).unwrap();
        for &r in &[0.01, 1.0, 5.0] {
            assert!((g.area_density(&[r, 0.0]) - m::sinh(r)).abs() < 1e-14 * m::sinh(r).max(1.0));
            assert!((g.gauss_curvature(&[r, 0.0]).unwrap() + 1.0).abs() < 1e-10);
        }
    }
}
