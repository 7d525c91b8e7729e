//! Library results against values computed here by independent means.

use std::f64::consts::PI;
use std::sync::Arc;
use tone_core::catalog::{self, CatalogParams};
use tone_core::growth::{self, GrowthProfile, Resolution};
use tone_core::spectrum::{self, Boundary, SturmLiouvilleProblem};
use tone_core::{bounds, SpaceForm};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -0.25 * x * x / (k * k) as f64;
        sum += term;
    }
    sum
}

#[test]
fn hyperbolic_ball_volumes_match_quadrature() {
    for n in 2..=4 {
        for &(kappa, r) in &[(-1.0, 0.3), (-1.0, 4.0), (-0.25, 7.0), (-3.0, 1.5)] {
            let c = f64::sqrt(-kappa);
            let omega = 2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0);
            let want = simpson(|t| omega * ((c * t).sinh() / c).powi(n as i32 - 1), 0.0, r, 4000);
            let got = SpaceForm::new(kappa, n).unwrap().ball_volume(r);
            assert!((got / want - 1.0).abs() < 1e-10, "n={n} kappa={kappa} r={r}: {got} vs {want}");
        }
    }
}

/// Area of `{x on the catenoid : |x - p| < s}` for the unit catenoid and the
/// waist point `p = (1, 0, 0)`: on the circle at height `t` the condition is
/// `cos θ > (cosh² t + 1 + t² - s²) / (2 cosh t)`.
fn catenoid_ball_area(s: f64) -> f64 {
    let arc = |t: f64| {
        let ch = t.cosh();
        let c = ((ch * ch + 1.0 + t * t - s * s) / (2.0 * ch)).clamp(-1.0, 1.0);
        2.0 * c.acos() * ch * ch
    };
    let top = bisect(|t| t.cosh() - 1.0 - s, 0.0, 60.0).min(s);
    2.0 * simpson(arc, 0.0, top, 200_000)
}

#[test]
fn catenoid_quotient_matches_direct_area() {
    let g = catalog::build("euclidean-catenoid", &CatalogParams::default()).unwrap().geometry;
    let p = growth::compute_growth_profile(&g, 20.0, 200, 4096).unwrap();
    for &s in &[0.5, 2.0, 5.0, 12.0, 20.0] {
        let want = catenoid_ball_area(s) / (PI * s * s);
        let got = p.q_at(s);
        assert!((got / want - 1.0).abs() < 2e-3, "s = {s}: {got} vs {want}");
    }
}

#[test]
fn totally_geodesic_profile_is_the_ball_volume() {
    for &(n, m, kappa) in &[(2, 3, -1.0), (3, 4, -0.5), (2, 2, 0.0)] {
        let g = catalog::totally_geodesic(n, m, kappa).unwrap();
        let p = growth::compute_growth_profile(&g, 15.0, 150, 1024).unwrap();
        let sf = SpaceForm::new(kappa, n).unwrap();
        for k in 1..=p.bins() {
            let want = sf.ln_ball_volume(p.radii[k]);
            assert!((p.log_cum_volume[k] - want).abs() < 1e-6, "n={n} k={k}");
        }
    }
}

#[test]
fn catenoid_total_curvature_is_eight_pi() {
    let g = catalog::build("euclidean-catenoid", &CatalogParams { scale: 2.5, ..Default::default() }).unwrap().geometry;
    let i = growth::curvature_integral(&g, 2.0, 400.0, Resolution { bins: 200, nodes: 2048 }).unwrap();
    // The part beyond s = 400 is below 1e-4 of the total.
    assert!((i.value / (8.0 * PI) - 1.0).abs() < 2e-3, "{}", i.value);
}

#[test]
fn catenoid_waist_solves_the_first_integral() {
    for &a in &[0.01, 0.3, 1.0, 20.0] {
        let want = bisect(|r: f64| r.sinh() * r.cosh() - a, 0.0, 10.0);
        assert!((catalog::waist_radius(a) - want).abs() < 1e-12, "a = {a}");
    }
}

#[test]
fn rayleigh_quotient_matches_quadrature() {
    // With Q = 1 the density is the sphere volume, so the quotient is an
    // explicit one-dimensional ratio.
    for &(kappa, r) in &[(-1.0, 20.0), (-1.0, 200.0), (0.0, 50.0), (-0.3, 60.0)] {
        let p = GrowthProfile::synthetic(kappa, 2, r, 4000, |_| 1.0).unwrap();
        let got = bounds::rayleigh_upper(&p, 2, kappa, r).unwrap();
        let s = |t: f64| if kappa < 0.0 { let c = (-kappa).sqrt(); (c * t).sinh() / c } else { t };
        let sp = |t: f64| if kappa < 0.0 { ((-kappa).sqrt() * t).cosh() } else { 1.0 };
        let w = 2.0 * PI / r;
        let phi = |t: f64| (w * (t - r / 2.0)).sin() / s(t).sqrt();
        let dphi = |t: f64| {
            let x = w * (t - r / 2.0);
            (w * x.cos() - 0.5 * sp(t) / s(t) * x.sin()) / s(t).sqrt()
        };
        let num = simpson(|t| dphi(t).powi(2) * s(t), r / 2.0, r, 20_000);
        let den = simpson(|t| phi(t).powi(2) * s(t), r / 2.0, r, 20_000);
        assert!((got / (num / den) - 1.0).abs() < 1e-6, "kappa={kappa} R={r}: {got} vs {}", num / den);
    }
}

#[test]
fn disk_eigenvalue_is_the_bessel_zero_squared() {
    let j = bisect(j0, 2.0, 3.0);
    let p = SturmLiouvilleProblem::laplacian(0.0, 1.0, Boundary::Neumann, Boundary::Dirichlet, Arc::new(|t| t));
    let e = spectrum::mesh_extrapolated(&p, 512).unwrap();
    assert!((e.value - j * j).abs() < 1e-4, "{} vs {}", e.value, j * j);
    // Scaling: the plane truncated at T gives (j / T)^2.
    let surf = catalog::build("totally-geodesic", &CatalogParams { kappa: 0.0, ..Default::default() }).unwrap().revolution.unwrap();
    let r = spectrum::tone_of_revolution_surface(&surf, &[2.0, 4.0], 1024).unwrap();
    for (t, l) in r.truncations.iter().zip(&r.lambda1) {
        assert!((l - (j / t).powi(2)).abs() < 1e-5, "T = {t}");
    }
    assert!(r.extrapolated.abs() < 1e-5);
}

/// `u'' + coth(t) u' + λ u = 0`, `u(0) = 1`, `u'(0) = 0`, by RK4; returns `u(T)`.
fn shoot_h2(lambda: f64, t_max: f64) -> f64 {
    // Series start: u = 1 - λ t²/4 + ...
    let t0 = 1e-4;
    let (mut t, mut u, mut v) = (t0, 1.0 - lambda * t0 * t0 / 4.0, -lambda * t0 / 2.0);
    let steps = 40_000;
    let h = (t_max - t0) / steps as f64;
    let f = |t: f64, u: f64, v: f64| (v, -v / t.tanh() - lambda * u);
    for _ in 0..steps {
        let k1 = f(t, u, v);
        let k2 = f(t + h / 2.0, u + h / 2.0 * k1.0, v + h / 2.0 * k1.1);
        let k3 = f(t + h / 2.0, u + h / 2.0 * k2.0, v + h / 2.0 * k2.1);
        let k4 = f(t + h, u + h * k3.0, v + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        t += h;
    }
    u
}

#[test]
fn hyperbolic_disk_eigenvalue_matches_shooting() {
    for &t in &[3.0, 10.0] {
        // The first zero of u(T; ·) lies below 1/4 + π²/T² + 0.2.
        let want = bisect(|l| shoot_h2(l, t), 0.2, 0.25 + PI * PI / (t * t) + 0.2);
        let p = SturmLiouvilleProblem::laplacian(0.0, t, Boundary::Neumann, Boundary::Dirichlet, Arc::new(|x: f64| x.sinh()));
        let got = spectrum::mesh_extrapolated(&p, 2048).unwrap().value;
        assert!((got - want).abs() < 1e-7, "T = {t}: {got} vs {want}");
    }
}

#[test]
fn hyperbolic_disk_of_radius_thirty() {
    let p = SturmLiouvilleProblem::laplacian(0.0, 30.0, Boundary::Neumann, Boundary::Dirichlet, Arc::new(|x: f64| x.sinh()));
    let got = spectrum::mesh_extrapolated(&p, 4096).unwrap().value;
    assert!(got > 0.25 && got < 0.25 + PI * PI / 900.0, "{got}");
}
