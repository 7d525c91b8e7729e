//! Bottom of the radial spectrum by a conservative finite-volume
//! discretisation of `-(p u')' + q u = λ w u` and Sturm-sequence bisection.

use crate::error::{Error, Result};
use crate::geometry::{RevolutionKind, SurfaceOfRevolution};
use crate::numeric::GL8;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::format;

pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bisection cap for the Sturm count.
pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    /// Zero flux; at a pole where `p` vanishes this is the regularity condition.
    Neumann,
}

#[derive(Clone)]
pub struct SturmLiouvilleProblem {
    pub a: f64,
    pub b: f64,
    pub left: Boundary,
    pub right: Boundary,
    pub weight: Coefficient,
    pub stiffness: Coefficient,
    pub potential: Option<Coefficient>,
}

impl core::fmt::Debug for SturmLiouvilleProblem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SturmLiouvilleProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

impl SturmLiouvilleProblem {
    /// `-(w u')' = λ w u`, the radial Laplace-Beltrami reduction.
    pub fn laplacian(a: f64, b: f64, left: Boundary, right: Boundary, w: Coefficient) -> Self {
        Self { a, b, left, right, weight: w.clone(), stiffness: w, potential: None }
    }
}

/// Integral of `f` over `[lo, hi]` by one 8-point Gauss panel.
fn gauss(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    GL8.iter().map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

fn positive(t: f64, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveWeight { t, value: v })
    }
}

/// Symmetric tridiagonal `M^{-1/2} K M^{-1/2}` as (diagonal, off-diagonal).
fn assemble(pr: &SturmLiouvilleProblem, cells: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = (pr.b - pr.a) / cells as f64;
    let node = |i: usize| pr.a + h * i as f64;
    let first = if pr.left == Boundary::Neumann { 0 } else { 1 };
    let last = if pr.right == Boundary::Neumann { cells } else { cells - 1 };
    // Harmonic mean of p at the quarter points of each cell.
    let mut flux = Vec::with_capacity(cells);
    for i in 0..cells {
        let (t1, t2) = (node(i) + 0.25 * h, node(i) + 0.75 * h);
        let p1 = positive(t1, (pr.stiffness)(t1))?;
        let p2 = positive(t2, (pr.stiffness)(t2))?;
        flux.push(2.0 / (1.0 / p1 + 1.0 / p2) / h);
    }
    let w = &*pr.weight;
    let mut mass = Vec::with_capacity(last + 1 - first);
    let mut diag = Vec::with_capacity(last + 1 - first);
    for i in first..=last {
        let lo = if i == 0 { node(0) } else { node(i) - 0.5 * h };
        let hi = if i == cells { node(cells) } else { node(i) + 0.5 * h };
        let mi = gauss(w, lo, hi);
        positive(node(i), mi)?;
        let mut k = 0.0;
        if i > 0 {
            k += flux[i - 1];
        }
        if i < cells {
            k += flux[i];
        }
        if let Some(q) = &pr.potential {
            k += gauss(&**q, lo, hi);
        }
        mass.push(mi);
        diag.push(k);
    }
    let mut off = Vec::with_capacity(diag.len().saturating_sub(1));
    for j in 0..diag.len().saturating_sub(1) {
        off.push(-flux[first + j] / libm::sqrt(mass[j] * mass[j + 1]));
    }
    for (d, mi) in diag.iter_mut().zip(&mass) {
        *d /= mi;
    }
    Ok((diag, off))
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_eigenvalue(diag: &[f64], off: &[f64]) -> Result<f64> {
    let n = diag.len();
    let radius = |i: usize| {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(mid);
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence(MAX_BISECTIONS))
}

/// Smallest eigenvalue on a uniform mesh of `mesh_points` cells.
pub fn bottom_eigenvalue(problem: &SturmLiouvilleProblem, mesh_points: usize) -> Result<f64> {
    if mesh_points < 64 {
        return Err(Error::OutOfRange(format!("mesh_points = {mesh_points} must be at least 64")));
    }
    if !(problem.b > problem.a) || !problem.a.is_finite() || !problem.b.is_finite() {
        return Err(Error::Domain(format!("interval [{}, {}] is empty or unbounded", problem.a, problem.b)));
    }
    let (d, e) = assemble(problem, mesh_points)?;
    smallest_eigenvalue(&d, &e)
}

/// An extrapolated limit with its error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `(4 λ_{h/2} - λ_h) / 3` with error `|λ_h - λ_{h/2}|`.
pub fn richardson_extrapolate(coarse: f64, fine: f64) -> Estimate {
    Estimate { value: (4.0 * fine - coarse) / 3.0, error: (coarse - fine).abs() }
}

/// Mesh-extrapolated `λ₁` of one problem from meshes `mesh` and `2 mesh`.
pub fn mesh_extrapolated(problem: &SturmLiouvilleProblem, mesh: usize) -> Result<Estimate> {
    let coarse = bottom_eigenvalue(problem, mesh)?;
    let fine = bottom_eigenvalue(problem, 2 * mesh)?;
    Ok(richardson_extrapolate(coarse, fine))
}

/// Limit of `λ₁(T)` as `T -> ∞` under the model `λ + b/T² + c/T³`.
///
/// Three or more truncations: exact fit through the last three, with the
/// error taken as the distance to the two-term fit through the last two.
/// Two truncations: the two-term fit, with error its distance to `λ₁(T_max)`.
pub fn extrapolate_truncations(truncations: &[f64], lambda1: &[f64]) -> Result<Estimate> {
    let n = truncations.len();
    if n != lambda1.len() || n < 2 {
        return Err(Error::Invalid(format!("need at least two truncations with values, got {n}")));
    }
    let two = |i: usize| {
        let (x1, x2) = (1.0 / (truncations[i] * truncations[i]), 1.0 / (truncations[i + 1] * truncations[i + 1]));
        (lambda1[i + 1] * x1 - lambda1[i] * x2) / (x1 - x2)
    };
    let two_last = two(n - 2);
    if n == 2 {
        return Ok(Estimate { value: two_last, error: (two_last - lambda1[1]).abs() });
    }
    // Solve the 3x3 system in (λ, b, c) by Cramer's rule.
    let rows: Vec<[f64; 4]> = (n - 3..n)
        .map(|i| {
            let t = truncations[i];
            [1.0, 1.0 / (t * t), 1.0 / (t * t * t), lambda1[i]]
        })
        .collect();
    let det3 = |c0: usize, c1: usize, c2: usize| {
        let r = &rows;
        r[0][c0] * (r[1][c1] * r[2][c2] - r[1][c2] * r[2][c1]) - r[0][c1] * (r[1][c0] * r[2][c2] - r[1][c2] * r[2][c0])
            + r[0][c2] * (r[1][c0] * r[2][c1] - r[1][c1] * r[2][c0])
    };
    let det = det3(0, 1, 2);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Invalid(format!("truncations {truncations:?} give a singular fit (det = {det:e})")));
    }
    let value = det3(3, 1, 2) / det;
    Ok(Estimate { value, error: (value - two_last).abs() })
}

/// `λ₁` per truncation and the extrapolated bottom of the radial spectrum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumResult {
    pub geometry: String,
    pub truncations: Vec<f64>,
    /// Mesh-extrapolated `λ₁(T)`.
    pub lambda1: Vec<f64>,
    /// `|λ_h - λ_{h/2}|` per truncation.
    pub mesh_error: Vec<f64>,
    /// Cell counts of the two mesh levels.
    pub mesh: [usize; 2],
    pub extrapolated: f64,
    /// Truncation error bar plus the largest mesh error.
    pub error: f64,
}

impl SpectrumResult {
    /// Whether `λ₁(T)` is non-increasing in `T` up to the mesh error bars.
    pub fn is_monotone(&self) -> bool {
        self.lambda1.windows(2).zip(self.mesh_error.windows(2)).all(|(l, e)| l[1] <= l[0] + e[0] + e[1])
    }
}

#[cfg(feature = "parallel")]
fn solve_all(problems: &[SturmLiouvilleProblem], mesh: usize) -> Vec<Result<Estimate>> {
    use rayon::prelude::*;
    problems.par_iter().map(|p| mesh_extrapolated(p, mesh)).collect()
}

#[cfg(not(feature = "parallel"))]
fn solve_all(problems: &[SturmLiouvilleProblem], mesh: usize) -> Vec<Result<Estimate>> {
    problems.iter().map(|p| mesh_extrapolated(p, mesh)).collect()
}

/// Solves the radial problems of `surf` truncated at each `T` (sorted
/// ascending): `[0, T]` with a regular pole, or `[-T, T]` through the waist.
pub fn tone_of_revolution_surface(surf: &SurfaceOfRevolution, truncations: &[f64], mesh: usize) -> Result<SpectrumResult> {
    let mut ts: Vec<f64> = truncations.to_vec();
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Invalid(format!("truncations {truncations:?} must be positive and finite")));
    }
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup();
    let top = ts[ts.len() - 1];
    if top > surf.reach {
        return Err(Error::Truncation {
            s_max: top,
            reason: format!("profile of {} is available to {} only", surf.name, surf.reach),
        });
    }
    let problems: Vec<SturmLiouvilleProblem> = ts
        .iter()
        .map(|&t| {
            let s = surf.clone();
            let g: Coefficient = Arc::new(move |x: f64| s.circle_radius(x.abs()));
            match surf.kind {
                RevolutionKind::Pole => SturmLiouvilleProblem::laplacian(0.0, t, Boundary::Neumann, Boundary::Dirichlet, g),
                RevolutionKind::TwoSided => SturmLiouvilleProblem::laplacian(-t, t, Boundary::Dirichlet, Boundary::Dirichlet, g),
            }
        })
        .collect();
    let mut lambda1 = Vec::with_capacity(ts.len());
    let mut mesh_error = Vec::with_capacity(ts.len());
    for r in solve_all(&problems, mesh) {
        let e = r?;
        lambda1.push(e.value);
        mesh_error.push(e.error);
    }
    let worst_mesh = mesh_error.iter().fold(0.0f64, |a, &b| a.max(b));
    let (extrapolated, error) = if ts.len() >= 2 {
        let e = extrapolate_truncations(&ts, &lambda1)?;
        (e.value, e.error + worst_mesh)
    } else {
        // A single Dirichlet value only bounds the limit from above.
        (lambda1[0], lambda1[0])
    };
    Ok(SpectrumResult { geometry: surf.name.clone(), truncations: ts, lambda1, mesh_error, mesh: [mesh, 2 * mesh], extrapolated, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::PI;

    fn unit() -> Coefficient {
        Arc::new(|_| 1.0)
    }

    #[test]
    fn interval_dirichlet_is_one() {
        let p = SturmLiouvilleProblem::laplacian(0.0, PI, Boundary::Dirichlet, Boundary::Dirichlet, unit());
        // The three-point scheme on a uniform mesh gives (2/h)^2 sin^2(h/2) exactly.
        let h = PI / 256.0;
        let want = 4.0 / (h * h) * libm::sin(0.5 * h) * libm::sin(0.5 * h);
        // Sturm counts resolve to about eps times the largest entry (~4/h²).
        assert!((bottom_eigenvalue(&p, 256).unwrap() - want).abs() < 1e-10);
        assert!((mesh_extrapolated(&p, 256).unwrap().value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn neumann_end_gives_quarter_wave() {
        let p = SturmLiouvilleProblem::laplacian(0.0, PI, Boundary::Neumann, Boundary::Dirichlet, unit());
        assert!((mesh_extrapolated(&p, 512).unwrap().value - 0.25).abs() < 1e-7);
    }

    #[test]
    fn richardson_recovers_h2_model() {
        let (lam, c, h) = (0.7, 3.0, 0.01);
        let e = richardson_extrapolate(lam + c * h * h, lam + c * h * h / 4.0);
        assert!((e.value - lam).abs() < 1e-15);
        assert!((e.error - 0.75 * c * h * h).abs() < 1e-15);
    }

    #[test]
    fn truncation_model_is_reproduced() {
        let ts = [10.0, 20.0, 30.0];
        let f = |t: f64| 0.25 + 9.0 / (t * t) - 15.0 / (t * t * t);
        let ls: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        let e = extrapolate_truncations(&ts, &ls).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);
        let two = extrapolate_truncations(&ts[1..], &ls[1..]).unwrap();
        assert!((two.value - 0.25).abs() < 2e-3);
        assert!(extrapolate_truncations(&ts[..1], &ls[..1]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let p = SturmLiouvilleProblem::laplacian(0.0, 1.0, Boundary::Dirichlet, Boundary::Dirichlet, unit());
        assert!(matches!(bottom_eigenvalue(&p, 32), Err(Error::OutOfRange(_))));
        let neg = SturmLiouvilleProblem::laplacian(-1.0, 1.0, Boundary::Dirichlet, Boundary::Dirichlet, Arc::new(|t| t));
        assert!(matches!(bottom_eigenvalue(&neg, 64), Err(Error::NonPositiveWeight { .. })));
    }

    #[test]
    fn sturm_count_on_diagonal() {
        let d = [1.0, 2.0, 3.0];
        let e = [0.0, 0.0];
        assert_eq!(sturm_count(&d, &e, 2.5), 2);
        assert!((smallest_eigenvalue(&d, &e).unwrap() - 1.0).abs() < 1e-15);
    }
}
