//! Desk-scale verification suite behind `tone verify`.

use crate::cli::Suite;
use crate::error::CliResult;
use crate::profile_csv;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;
use tone_core::catalog::{self, CatalogParams};
use tone_core::growth::{self, GrowthProfile, Resolution};
use tone_core::spectrum::{self, Boundary, SturmLiouvilleProblem};
use tone_core::{bounds, SpaceForm};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub checks: Vec<CheckResult>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check, then a totals line.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {:<9} {:<width$}  {}\n", c.suite, c.name, c.detail));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }

    fn push(&mut self, suite: &'static str, name: &str, outcome: tone_core::Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(CheckResult { suite, name: name.into(), passed, detail });
    }
}

/// `J_0(x)` from its power series; accurate for `x < 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First positive zero of `J_0` by bisection on `[2, 3]`.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn spaceform_checks(s: &mut Summary) {
    s.push("spaceform", "H^2 ball volume", (|| {
        let v = SpaceForm::new(-1.0, 2)?.ball_volume(1.0);
        let want = 2.0 * PI * (1.0f64.cosh() - 1.0);
        Ok((rel(v, want) < 1e-13, format!("{v} vs {want}")))
    })());
    s.push("spaceform", "R^3 ball volume", (|| {
        let v = SpaceForm::new(0.0, 3)?.ball_volume(2.0);
        let want = 32.0 * PI / 3.0;
        Ok((rel(v, want) < 1e-13, format!("{v} vs {want}")))
    })());
    s.push("spaceform", "large-radius log volume", (|| {
        // ln(2π(cosh r - 1)) = ln π + r + O(e^{-r}).
        let l = SpaceForm::new(-1.0, 2)?.ln_ball_volume(2000.0);
        let want = PI.ln() + 2000.0;
        Ok(((l - want).abs() < 1e-12 * want, format!("{l} vs {want}")))
    })());
}

fn monotone_check(s: &mut Summary, name: &str, p: &GrowthProfile) {
    let m = p.monotonicity();
    s.push("growth", name, Ok((m.holds, format!("worst drop {:e}, sup Q {:.6}", m.worst_drop, p.sup_q()))));
}

fn growth_checks(s: &mut Summary, injected: Option<&GrowthProfile>) {
    let params = CatalogParams::default();
    s.push("growth", "totally geodesic Q = 1", (|| {
        let g = catalog::build("totally-geodesic", &params)?.geometry;
        let p = growth::compute_growth_profile(&g, 20.0, 256, 1024)?;
        let worst = p.q_values.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
        Ok((worst < 1e-6, format!("max |Q - 1| = {worst:e}")))
    })());
    match (|| {
        let g = catalog::build("euclidean-catenoid", &params)?.geometry;
        growth::compute_growth_profile(&g, 50.0, 512, 2048)
    })() {
        Ok(p) => {
            monotone_check(s, "catenoid Q monotone", &p);
            let q = p.q_values[p.bins()];
            s.push("growth", "catenoid Q(50) below 2", Ok((q > 1.95 && q <= 2.0 + 3.0 * p.meta.rel_error, format!("Q(50) = {q:.6}"))));
            let bad = p.comparison_violation();
            s.push("growth", "catenoid density comparison", Ok((bad.is_none(), format!("first violation {bad:?}"))));
        }
        Err(e) => s.push("growth", "catenoid profile", Err(e)),
    }
    s.push("growth", "decreasing Q is rejected", (|| {
        let p = GrowthProfile::synthetic(-1.0, 2, 10.0, 100, |t| 2.0 - t / 20.0)?;
        let m = p.monotonicity();
        Ok((!m.holds, format!("negative control: holds = {}", m.holds)))
    })());
    s.push("growth", "catenoid total curvature 8π", (|| {
        let g = catalog::build("euclidean-catenoid", &params)?.geometry;
        let i = growth::curvature_integral(&g, 2.0, 100.0, Resolution { bins: 200, nodes: 2048 })?;
        Ok((rel(i.value, 8.0 * PI) < 5e-3, format!("{:.6} vs {:.6}", i.value, 8.0 * PI)))
    })());
    if let Some(p) = injected {
        monotone_check(s, "supplied profile Q monotone", p);
    }
}

fn bounds_checks(s: &mut Summary) {
    s.push("bounds", "McKean equals Cheeger", Ok({
        let ok = (2..8).all(|n| [0.0, -0.5, -1.0, -3.0].iter().all(|&k| bounds::mckean_lower(n, k) == bounds::cheeger_lower(n, k)));
        (ok, "n = 2..7".into())
    }));
    s.push("bounds", "H^2 verdict pinches 1/4", (|| {
        let g = catalog::build("totally-geodesic", &CatalogParams::default())?.geometry;
        let p = growth::compute_growth_profile(&g, 2000.0, 4000, 1024)?;
        let r = bounds::assemble_report("totally-geodesic", &p, None, &[500.0, 1000.0, 2000.0])?;
        let v = r.verdict;
        Ok((v.lower >= 0.25 && v.upper <= 0.2513, format!("[{}, {}]", v.lower, v.upper)))
    })());
    s.push("bounds", "flat Rayleigh bound at R = 1000", (|| {
        let p = GrowthProfile::synthetic(0.0, 2, 1000.0, 2000, |_| 1.0)?;
        let r = bounds::rayleigh_upper(&p, 2, 0.0, 1000.0)?;
        Ok((r <= 1.1e-4, format!("{r:e}")))
    })());
    s.push("bounds", "Rayleigh below lambda_R on Q = 1", (|| {
        let p = GrowthProfile::synthetic(-1.0, 2, 1e4, 20000, |_| 1.0)?;
        let mut ok = true;
        for r in [10.0, 100.0, 1000.0, 1e4] {
            ok &= bounds::rayleigh_upper(&p, 2, -1.0, r)? <= bounds::lambda_r(2, -1.0, r);
        }
        Ok((ok, "R = 10, 1e2, 1e3, 1e4".into()))
    })());
}

fn spectrum_checks(s: &mut Summary) {
    s.push("spectrum", "interval eigenvalue 1", (|| {
        let p = SturmLiouvilleProblem::laplacian(0.0, PI, Boundary::Dirichlet, Boundary::Dirichlet, Arc::new(|_| 1.0));
        let e = spectrum::mesh_extrapolated(&p, 256)?;
        Ok(((e.value - 1.0).abs() < 1e-6, format!("{}", e.value)))
    })());
    s.push("spectrum", "disk eigenvalue j_{0,1}^2", (|| {
        let p = SturmLiouvilleProblem::laplacian(0.0, 1.0, Boundary::Neumann, Boundary::Dirichlet, Arc::new(|t| t));
        let e = spectrum::mesh_extrapolated(&p, 512)?;
        let j = bessel_j0_first_zero();
        Ok(((e.value - j * j).abs() < 1e-4, format!("{} vs {}", e.value, j * j)))
    })());
    s.push("spectrum", "H^2 balls extrapolate to 1/4", (|| {
        let b = catalog::build("totally-geodesic", &CatalogParams::default())?;
        let surf = b.revolution.expect("n = 2 is a surface");
        let r = spectrum::tone_of_revolution_surface(&surf, &[10.0, 20.0, 30.0], 2048)?;
        Ok(((r.extrapolated - 0.25).abs() < 5e-3 && r.is_monotone(), format!("{:.6} ± {:.1e}", r.extrapolated, r.error)))
    })());
}

fn catalog_checks(s: &mut Summary) {
    let params = CatalogParams::default();
    for name in catalog::NAMES {
        s.push("catalog", &format!("{name} builds"), catalog::build(name, &params).map(|b| (true, b.geometry.name().to_string())));
    }
    s.push("catalog", "warped curvature below kappa", (|| {
        let w = catalog::PerturbedWarp::new(params.epsilon, params.kappa)?;
        let c = catalog::check_warp(&w);
        Ok((c.max_curvature_excess <= 0.0, format!("max K - kappa = {:e}", c.max_curvature_excess)))
    })());
    s.push("catalog", "every entry lists a tone target", Ok({
        let ok = catalog::list(&params).iter().all(|e| e.targets.iter().any(|t| t.quantity == "lambda_star"));
        (ok, format!("{} entries", catalog::NAMES.len()))
    }));
}

/// Runs the checks of `suite`; `profile` adds a supplied CSV to the growth checks.
pub fn run_suite(suite: Suite, profile: Option<&Path>) -> CliResult<Summary> {
    let injected = match profile {
        Some(p) => Some(profile_csv::read_profile(std::fs::File::open(p)?)?.profile),
        None => None,
    };
    let mut s = Summary::default();
    let want = |x: Suite| suite == Suite::All || suite == x;
    if want(Suite::Spaceform) {
        spaceform_checks(&mut s);
    }
    if want(Suite::Growth) || injected.is_some() {
        growth_checks(&mut s, injected.as_ref());
    }
    if want(Suite::Bounds) {
        bounds_checks(&mut s);
    }
    if want(Suite::Spectrum) {
        spectrum_checks(&mut s);
    }
    if want(Suite::Catalog) {
        catalog_checks(&mut s);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_zero() {
        assert!((bessel_j0_first_zero() - 2.404825557695773).abs() < 1e-13);
    }

    #[test]
    fn suite_filter() {
        let s = run_suite(Suite::Spaceform, None).unwrap();
        assert!(s.checks.iter().all(|c| c.suite == "spaceform"));
        assert!(s.all_passed(), "{}", s.table());
    }
}
