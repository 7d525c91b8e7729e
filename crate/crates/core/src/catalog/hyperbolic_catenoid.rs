//! Spherical catenoids in `H^3(kappa)`: surfaces of revolution about a
//! geodesic axis, in Fermi coordinates `dρ² + cosh²ρ dτ² + sinh²ρ dθ²`
//! (unit curvature, rescaled by `1/sqrt(-kappa)`).
//!
//! The arc-length profile `(ρ(σ), τ(σ))` satisfies the first integral
//! `sinh ρ cosh² ρ τ' = a`, equivalently `ρ'² + a² / (sinh ρ cosh ρ)² = 1`,
//! with waist `sinh ρ₀ cosh ρ₀ = a` at `σ = 0`.

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
use alloc::vec::Vec;

/// Parameter range over which construction is validated.
pub const A_RANGE: (f64, f64) = (1e-3, 1e4);
/// Default reach of the tabulated profile, in units of `1/sqrt(-kappa)`.
pub const DEFAULT_REACH: f64 = 512.0;
const ENERGY_TOL: f64 = 1e-8;
const MEAN_TOL: f64 = 1e-6;

/// Profile state at one arc length (unit curvature).
#[derive(Debug, Clone, Copy)]
struct State {
    rho: f64,
    /// `ρ'`
    u: f64,
    tau: f64,
    /// `ρ''`
    rho2: f64,
    /// `τ'`
    tau1: f64,
    /// `τ''`
    tau2: f64,
}

fn rho_accel(a: f64, rho: f64) -> f64 {
    // 8 a² cosh 2ρ / sinh³ 2ρ
    let s = m::sinh(2.0 * rho);
    8.0 * a * a / (m::tanh(2.0 * rho) * s * s)
}

fn tau_rate(a: f64, rho: f64) -> f64 {
    let c = m::cosh(rho);
    a / (m::sinh(rho) * c * c)
}

fn tau_accel(a: f64, rho: f64, u: f64) -> f64 {
    let (s, t) = (m::sinh(rho), m::tanh(rho));
    -a * u * (1.0 + 2.0 * t * t) / (s * s * m::cosh(rho))
}

struct Profile {
    a: f64,
    rho0: f64,
    sigma: Vec<f64>,
    rho: Vec<f64>,
    u: Vec<f64>,
    tau: Vec<f64>,
    /// `ρ''` and `τ'` at the nodes.
    acc: Vec<f64>,
    rate: Vec<f64>,
    max_energy_error: f64,
}

impl Profile {
    /// RK4 from the waist out to `σ >= reach` (unit curvature).
    fn integrate(a: f64, reach: f64) -> Self {
        let rho0 = 0.5 * m::asinh(2.0 * a);
        let (mut s, mut r, mut u, mut t) = (0.0, rho0, 0.0, 0.0);
        let mut prof = Profile {
            a,
            rho0,
            sigma: vec![s],
            rho: vec![r],
            u: vec![u],
            tau: vec![t],
            acc: vec![rho_accel(a, r)],
            rate: vec![tau_rate(a, r)],
            max_energy_error: 0.0,
        };
        let f = |r: f64, u: f64| (u, rho_accel(a, r), tau_rate(a, r));
        while s < reach {
            // The profile bends on the scale ρ near the waist and straightens
            // like e^{-4ρ} beyond it.
            let h = (0.005 * r.min(1.0) * m::exp((r - rho0 - 2.0).max(0.0))).min(0.25);
            let (k1r, k1u, k1t) = f(r, u);
            let (k2r, k2u, k2t) = f(r + 0.5 * h * k1r, u + 0.5 * h * k1u);
            let (k3r, k3u, k3t) = f(r + 0.5 * h * k2r, u + 0.5 * h * k2u);
            let (k4r, k4u, k4t) = f(r + h * k3r, u + h * k3u);
            r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            t += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
            s += h;
            let sc = m::sinh(r) * m::cosh(r);
            let e = (u * u + a * a / (sc * sc) - 1.0).abs();
            prof.max_energy_error = prof.max_energy_error.max(e);
            prof.sigma.push(s);
            prof.rho.push(r);
            prof.u.push(u);
            prof.tau.push(t);
            prof.acc.push(rho_accel(a, r));
            prof.rate.push(tau_rate(a, r));
        }
        prof
    }

    fn reach(&self) -> f64 {
        *self.sigma.last().expect("nonempty")
    }

    /// Smallest tabulated `σ >= 0` with `ρ(σ) - ρ₀ >= d`, if any.
    fn sigma_for_lift(&self, d: f64) -> Option<f64> {
        let target = self.rho0 + d;
        let i = self.rho.partition_point(|&r| r < target);
        self.sigma.get(i).copied()
    }

    /// Interval index and `|σ|` for a lookup.
    fn locate(&self, sigma: f64) -> (usize, f64) {
        let x = sigma.abs();
        let n = self.sigma.len();
        (self.sigma.partition_point(|&s| s <= x).clamp(1, n - 1) - 1, x)
    }

    /// `(ρ, τ)` only.
    fn position(&self, sigma: f64) -> (f64, f64) {
        let (i, x) = self.locate(sigma);
        let (s0, s1) = (self.sigma[i], self.sigma[i + 1]);
        let (rho, _) = m::hermite(s0, s1, self.rho[i], self.rho[i + 1], self.u[i], self.u[i + 1], x);
        let (tau, _) = m::hermite(s0, s1, self.tau[i], self.tau[i + 1], self.rate[i], self.rate[i + 1], x);
        let sign = if sigma < 0.0 { -1.0 } else { 1.0 };
        (rho.max(self.rho0), sign * tau)
    }

    fn eval(&self, sigma: f64) -> State {
        let (i, x) = self.locate(sigma);
        let sign = if sigma < 0.0 { -1.0 } else { 1.0 };
        let (s0, s1) = (self.sigma[i], self.sigma[i + 1]);
        let a = self.a;
        let (rho, _) = m::hermite(s0, s1, self.rho[i], self.rho[i + 1], self.u[i], self.u[i + 1], x);
        let (u, _) = m::hermite(s0, s1, self.u[i], self.u[i + 1], self.acc[i], self.acc[i + 1], x);
        let (tau, _) = m::hermite(s0, s1, self.tau[i], self.tau[i + 1], self.rate[i], self.rate[i + 1], x);
        let rho = rho.max(self.rho0);
        State {
            rho,
            u: sign * u,
            tau: sign * tau,
            rho2: rho_accel(a, rho),
            tau1: tau_rate(a, rho),
            tau2: tau_accel(a, rho, sign * u),
        }
    }
}

struct CatenoidChart {
    profile: Arc<Profile>,
    /// `sqrt(-kappa)`
    c: f64,
    kappa: f64,
}

/// Fermi-coordinate frame at `(ρ, τ, θ)`: position and its derivatives.
struct Frame {
    x: [f64; 4],
    x_r: [f64; 4],
    x_t: [f64; 4],
    x_th: [f64; 4],
    x_rt: [f64; 4],
    x_tt: [f64; 4],
    x_rth: [f64; 4],
    x_thth: [f64; 4],
}

fn frame(rho: f64, tau: f64, theta: f64) -> Frame {
    let (sr, cr) = (m::sinh(rho), m::cosh(rho));
    let (st, ct) = (m::sinh(tau), m::cosh(tau));
    let (sh, ch) = (m::sin(theta), m::cos(theta));
    Frame {
        x: [cr * ct, cr * st, sr * ch, sr * sh],
        x_r: [sr * ct, sr * st, cr * ch, cr * sh],
        x_t: [cr * st, cr * ct, 0.0, 0.0],
        x_th: [0.0, 0.0, -sr * sh, sr * ch],
        x_rt: [sr * st, sr * ct, 0.0, 0.0],
        x_tt: [cr * ct, cr * st, 0.0, 0.0],
        x_rth: [0.0, 0.0, -cr * sh, cr * ch],
        x_thth: [0.0, 0.0, -sr * ch, -sr * sh],
    }
}

impl CatenoidChart {
    fn state(&self, u: &[f64]) -> State {
        self.profile.eval(self.c * u[0])
    }
}

impl Chart for CatenoidChart {
    fn dim(&self) -> usize {
        2
    }

    fn ambient(&self) -> AmbientSpace {
        AmbientSpace::Hyperbolic { m: 3, kappa: self.kappa }
    }

    fn domain(&self) -> Domain {
        let r = self.profile.reach() / self.c;
        Domain::new(vec![Axis::closed(-r, r), Axis::periodic(-PI, PI)])
    }

    fn embed(&self, u: &[f64], x: &mut [f64]) {
        let (rho, tau) = self.profile.position(self.c * u[0]);
        let (sr, cr) = (m::sinh(rho), m::cosh(rho));
        let (st, ct) = (m::sinh(tau), m::cosh(tau));
        let inv = 1.0 / self.c;
        x[0] = cr * ct * inv;
        x[1] = cr * st * inv;
        x[2] = sr * m::cos(u[1]) * inv;
        x[3] = sr * m::sin(u[1]) * inv;
    }

    fn tangents(&self, u: &[f64], out: &mut [Coords]) {
        let st = self.state(u);
        let f = frame(st.rho, st.tau, u[1]);
        for k in 0..4 {
            out[0][k] = st.u * f.x_r[k] + st.tau1 * f.x_t[k];
            out[1][k] = f.x_th[k] / self.c;
        }
    }

    fn second(&self, u: &[f64], out: &mut [[Coords; MAX_DIM]]) {
        let st = self.state(u);
        let f = frame(st.rho, st.tau, u[1]);
        let (r1, t1) = (st.u, st.tau1);
        for k in 0..4 {
            out[0][0][k] = self.c
                * (st.rho2 * f.x_r[k]
                    + st.tau2 * f.x_t[k]
                    + r1 * r1 * f.x[k]
                    + 2.0 * r1 * t1 * f.x_rt[k]
                    + t1 * t1 * f.x_tt[k]);
            out[0][1][k] = r1 * f.x_rth[k];
            out[1][1][k] = f.x_thth[k] / self.c;
        }
        out[1][0] = out[0][1];
    }

    fn area_density(&self, u: &[f64]) -> f64 {
        m::sinh(self.profile.position(self.c * u[0]).0) / self.c
    }

    fn adapted_sff(&self, u: &[f64]) -> Option<SffNorms> {
        let st = self.state(u);
        let (sr, cr) = (m::sinh(st.rho), m::cosh(st.rho));
        // Geodesic curvature of the profile in the (ρ, τ) plane, and the
        // rotational principal curvature.
        let phi1 = st.u * (sr * st.u * st.tau1 + cr * st.tau2) - cr * st.tau1 * st.rho2;
        let k1 = phi1 + sr * st.tau1;
        let k2 = self.profile.a / (sr * sr);
        let c = self.c;
        Some(SffNorms { norm_sq: c * c * (k1 * k1 + k2 * k2), mean: c * (k1 + k2).abs() })
    }

    fn cover(&self, base: &[f64], s_max: f64) -> Result<Domain> {
        let p = &self.profile;
        // r_p >= (ρ - ρ(base)) / c since distance to the axis is 1-Lipschitz.
        let rho_base = self.state(base).rho;
        let lift = self.c * s_max + (rho_base - p.rho0);
        let sigma = p.sigma_for_lift(lift).ok_or_else(|| Error::Truncation {
            s_max,
            reason: format!("profile tabulated to arc length {} only; rebuild with a larger reach", p.reach() / self.c),
        })?;
        let half = sigma / self.c * (1.0 + 1e-9) + 1e-12;
        if base[0] != 0.0 || base[1] != 0.0 {
            return Ok(Domain::new(vec![Axis::closed(-half, half), Axis::periodic(-PI, PI)]));
        }
        // From the waist: sinh(c r_p / 2) >= sinh ρ₀ |sin(θ/2)|.
        let bound = m::sinh(0.5 * self.c * s_max) / m::sinh(p.rho0);
        let theta = if bound < 1.0 {
            let phi = 2.0 * libm::asin(bound) * (1.0 + 1e-6) + 1e-12;
            if phi < PI {
                Axis::closed(-phi, phi)
            } else {
                Axis::periodic(-PI, PI)
            }
        } else {
            Axis::periodic(-PI, PI)
        };
        Ok(Domain::new(vec![Axis::closed(-half, half), theta]))
    }
}

/// The spherical catenoid with parameter `a` in `H^3(kappa)`, based at a
/// waist point, tabulated out to arc length `DEFAULT_REACH / sqrt(-kappa)`.
pub fn hyperbolic_catenoid(a: f64, kappa: f64) -> Result<(ImmersedGeometry, SurfaceOfRevolution)> {
    hyperbolic_catenoid_with_reach(a, kappa, DEFAULT_REACH)
}

/// As [`hyperbolic_catenoid`], with the profile tabulated to `reach / sqrt(-kappa)`.
pub fn hyperbolic_catenoid_with_reach(a: f64, kappa: f64, reach: f64) -> Result<(ImmersedGeometry, SurfaceOfRevolution)> {
    let (lo, hi) = A_RANGE;
    if !(a >= lo && a <= hi) {
        return Err(Error::OutOfRange(format!("catenoid parameter a = {a} outside the validated range [{lo}, {hi}]")));
    }
    if !(kappa < 0.0) || !kappa.is_finite() {
        return Err(Error::OutOfRange(format!("kappa = {kappa} must be negative")));
    }
    if !(reach > 1.0 && reach <= 640.0) {
        return Err(Error::OutOfRange(format!("reach {reach} must lie in (1, 640] curvature radii")));
    }
    let c = m::sqrt(-kappa);
    let profile = Arc::new(Profile::integrate(a, reach));
    if profile.max_energy_error > ENERGY_TOL {
        return Err(Error::SelfCheck(format!(
            "first integral drifted by {:e} for a = {a}",
            profile.max_energy_error
        )));
    }
    let chart = CatenoidChart { profile: profile.clone(), c, kappa };
    self_check(&chart)?;
    let geom = ImmersedGeometry::from_chart("hyperbolic-catenoid", Box::new(chart), vec![0.0, 0.0], true)?
        .with_topology(Topology { euler_char: 0, ends: 2 });
    let p = profile.clone();
    let rev = SurfaceOfRevolution::new(
        "hyperbolic-catenoid",
        kappa,
        RevolutionKind::TwoSided,
        profile.reach() / c,
        Arc::new(move |s: f64| m::sinh(p.position(c * s).0) / c),
    );
    Ok((geom, rev))
}

/// Mean curvature from both the adapted closed form and the ambient formula.
fn self_check(chart: &CatenoidChart) -> Result<()> {
    let p = &chart.profile;
    let reach = p.reach() / chart.c;
    for i in 0..=400 {
        let s = reach * (i as f64 / 400.0);
        let u = [s, 0.3];
        let h = chart.adapted_sff(&u).expect("closed form").mean / chart.c;
        if h > MEAN_TOL {
            return Err(Error::SelfCheck(format!("|H| = {h:e} at arc length {s}")));
        }
    }
    // The ambient formula cancels badly once coordinates grow; check near the waist.
    let near = p.sigma_for_lift(4.0).unwrap_or(p.reach()) / chart.c;
    for i in 0..=40 {
        let u = [-near + 2.0 * near * i as f64 / 40.0, 0.7];
        let e = ext_sff(chart, &u)?;
        let h = e.mean / chart.c;
        if h > MEAN_TOL {
            return Err(Error::SelfCheck(format!("ambient |H| = {h:e} at arc length {}", u[0])));
        }
    }
    Ok(())
}

fn ext_sff(chart: &CatenoidChart, u: &[f64]) -> Result<SffNorms> {
    crate::geometry::sff_via_ambient(chart, u)
}

/// Waist radius `ρ₀` (unit curvature): the root of `sinh ρ cosh ρ = a`.
pub fn waist_radius(a: f64) -> f64 {
    0.5 * m::asinh(2.0 * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waist_solves_first_integral() {
        for &a in &[1e-3, 0.1, 1.0, 50.0] {
            let r = waist_radius(a);
            assert!((m::sinh(r) * m::cosh(r) / a - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn energy_is_conserved() {
        for &a in &[1e-3, 0.2, 1.0, 30.0, 1e4] {
            let p = Profile::integrate(a, 64.0);
            assert!(p.max_energy_error < 1e-8, "a = {a}: {}", p.max_energy_error);
        }
    }

    #[test]
    fn adapted_and_ambient_forms_agree() {
        let (g, _) = hyperbolic_catenoid(1.0, -1.0).unwrap();
        for &s in &[0.0, 0.4, -1.2, 2.5] {
            let u = [s, 0.9];
            let a = g.second_fundamental_form(&u).unwrap();
            let e = g.extrinsic_sff(&u).unwrap();
            assert!((a.norm_sq / e.norm_sq - 1.0).abs() < 1e-7, "{a:?} {e:?}");
            if s == 0.0 {
                let closed = 2.0 / m::powi(m::sinh(waist_radius(1.0)), 4);
                assert!((a.norm_sq / closed - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn points_lie_on_the_hyperboloid() {
        let (g, _) = hyperbolic_catenoid(0.5, -2.0).unwrap();
        for &s in &[0.0, 3.0, -40.0, 300.0] {
            g.point(&[s, 1.0]).unwrap();
        }
    }

    #[test]
    fn scaling_by_curvature() {
        let (g1, _) = hyperbolic_catenoid(1.0, -1.0).unwrap();
        let (g4, _) = hyperbolic_catenoid(1.0, -4.0).unwrap();
        let d1 = g1.r_p(&[3.0, 1.0]);
        let d4 = g4.r_p(&[1.5, 1.0]);
        assert!((d1 - 2.0 * d4).abs() < 1e-10);
    }

    #[test]
    fn cover_contains_the_ball() {
        let (g, _) = hyperbolic_catenoid(0.3, -1.0).unwrap();
        let c = g.chart().unwrap();
        for &s in &[0.02, 0.3, 2.0, 9.0] {
            let dom = c.cover(&[0.0, 0.0], s).unwrap();
            for i in 0..=150 {
                for j in 0..=150 {
                    let u = [-12.0 + 24.0 * i as f64 / 150.0, -PI + 2.0 * PI * j as f64 / 150.0];
                    if g.r_p(&u) < s {
                        assert!(dom.contains(&u), "s = {s}, u = {u:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(matches!(hyperbolic_catenoid(0.0, -1.0), Err(Error::OutOfRange(_))));
        assert!(matches!(hyperbolic_catenoid(1.0, 0.0), Err(Error::OutOfRange(_))));
        let (g, _) = hyperbolic_catenoid_with_reach(1.0, -1.0, 20.0).unwrap();
        assert!(matches!(g.chart().unwrap().cover(&[0.0, 0.0], 50.0), Err(Error::Truncation { .. })));
    }
}
