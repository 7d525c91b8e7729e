//! Coarea accumulation of integrals over extrinsic balls.
//!
//! The parameter domain is cut into cells along its first axis and sampled at
//! fixed nodes along the others. Within a cell both `r_p` and the integrand
//! density are taken linear in the cell parameter, so each cell's mass is
//! spread exactly over the radius bins it crosses. One sweep yields the mass
//! of every shell `{s_k <= r_p < s_{k+1}}`.
//!
//! Small radii are resolved by repeating the sweep on the cover of a ball
//! eight times smaller, down to a few bins; each bin takes its value from the
//! finest level that contains it.
//!
//! Rows are processed in fixed chunks and merged in index order, so results
//! are bit-identical for any thread count.

use super::{Chart, ImmersedGeometry, RadialShell, MAX_DIM};
use crate::error::{Error, Result};
use crate::numeric::{self as m, GL8};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

const CHUNK_ROWS: usize = 8;

/// Resolution of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub s_max: f64,
    pub bins: usize,
    /// Cells along the first parameter axis.
    pub radial_cells: usize,
    /// Nodes along each remaining axis.
    pub transverse: usize,
    /// Ignore an exact radial shell structure and sweep the chart.
    pub force_chart: bool,
}

impl SweepGrid {
    pub fn new(s_max: f64, bins: usize, radial_cells: usize, transverse: usize) -> Self {
        Self { s_max, bins, radial_cells, transverse, force_chart: false }
    }

    /// A sweep with `nodes` cells along the first axis and a proportional
    /// number of transverse nodes.
    pub fn from_nodes(s_max: f64, bins: usize, nodes: usize) -> Self {
        Self::new(s_max, bins, nodes, (nodes / 8).clamp(64, 1024))
    }

    /// The same sweep with every node count halved.
    pub fn coarsened(&self) -> Self {
        Self {
            radial_cells: (self.radial_cells / 2).max(1),
            transverse: (self.transverse / 2).max(4),
            ..*self
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.s_max / self.bins as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(Error::Invalid(format!("s_max = {} must be positive", self.s_max)));
        }
        if self.bins == 0 || self.radial_cells == 0 || self.transverse == 0 {
            return Err(Error::Invalid("sweep resolution must be positive".into()));
        }
        Ok(())
    }
}

/// Per-bin `ln` of the area of `{s_k <= r_p < s_{k+1}}`.
pub fn ln_area_by_radius(geom: &ImmersedGeometry, grid: &SweepGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    if let (Some(shell), false) = (geom.radial(), grid.force_chart) {
        return Ok(radial_ln_masses(shell, grid, 1));
    }
    let masses = chart_masses(geom, grid, &|_u: &[f64]| Ok(1.0))?;
    Ok(masses.into_iter().map(|v| if v > 0.0 { m::ln(v) } else { f64::NEG_INFINITY }).collect())
}

/// Radial path at a finer panelization, used for error estimates.
pub(crate) fn ln_area_by_radius_refined(geom: &ImmersedGeometry, grid: &SweepGrid, refine: usize) -> Option<Vec<f64>> {
    match (geom.radial(), grid.force_chart) {
        (Some(shell), false) => Some(radial_ln_masses(shell, grid, refine)),
        _ => None,
    }
}

/// Per-bin `∫ field dμ` over `{s_k <= r_p < s_{k+1}}`.
pub fn field_by_radius(
    geom: &ImmersedGeometry,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    grid.validate()?;
    if let (Some(shell), false) = (geom.radial(), grid.force_chart) {
        return radial_field_masses(geom, shell, grid, field);
    }
    chart_masses(geom, grid, field)
}

/// Per-bin supremum of `field` over the sweep nodes (zero for empty bins).
pub fn sup_by_radius(
    geom: &ImmersedGeometry,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64], f64) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    grid.validate()?;
    let ds = grid.bin_width();
    if let (Some(shell), false) = (geom.radial(), grid.force_chart) {
        let panels = panels_per_bin(shell, ds, 1);
        let mut out = vec![0.0; grid.bins];
        let mut u = [0.0; MAX_DIM];
        for (k, slot) in out.iter_mut().enumerate() {
            for p in 0..panels {
                let a = k as f64 * ds + p as f64 * ds / panels as f64;
                let b = a + ds / panels as f64;
                for (x, _) in GL8.iter() {
                    let r = 0.5 * (a + b) + 0.5 * (b - a) * x;
                    u[0] = r;
                    let v = field(&u[..geom.dim()], r)?;
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
        return Ok(out);
    }
    let plan = RowPlan::new(geom, grid)?;
    let chunks = plan.chunk_count();
    let run = |c: usize| -> Result<Vec<f64>> {
        let mut local = vec![0.0; grid.bins];
        let mut u = [0.0; MAX_DIM];
        for row in plan.rows_of(c) {
            let _w = plan.transverse_point(row, &mut u);
            for i in 0..=plan.cells {
                u[0] = plan.radial_node(i);
                let r = geom.r_p(&u[..plan.n]);
                if r < grid.s_max {
                    let k = ((r / ds) as usize).min(grid.bins - 1);
                    let v = field(&u[..plan.n], r)?;
                    if v > local[k] {
                        local[k] = v;
                    }
                }
            }
        }
        Ok(local)
    };
    let parts = map_chunks(chunks, &run)?;
    let mut out = vec![0.0; grid.bins];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            if v > *o {
                *o = v;
            }
        }
    }
    Ok(out)
}

struct RowPlan {
    n: usize,
    cells: usize,
    lo: f64,
    h: f64,
    transverse: usize,
    axes: Vec<super::Axis>,
    rows: usize,
}

impl RowPlan {
    fn new(geom: &ImmersedGeometry, grid: &SweepGrid) -> Result<RowPlan> {
        let chart: &dyn Chart = geom
            .chart()
            .ok_or_else(|| Error::Unsupported("a chart or an exact radial structure".into()))?;
        let dom = chart.cover(geom.base_point(), grid.s_max)?;
        let n = dom.dim();
        let axes = dom.axes;
        let rows = grid.transverse.pow((n - 1) as u32);
        Ok(RowPlan {
            n,
            cells: grid.radial_cells,
            lo: axes[0].lo,
            h: axes[0].len() / grid.radial_cells as f64,
            transverse: grid.transverse,
            axes,
            rows,
        })
    }

    fn chunk_count(&self) -> usize {
        self.rows.div_ceil(CHUNK_ROWS)
    }

    fn rows_of(&self, chunk: usize) -> core::ops::Range<usize> {
        let a = chunk * CHUNK_ROWS;
        a..(a + CHUNK_ROWS).min(self.rows)
    }

    fn radial_node(&self, i: usize) -> f64 {
        self.lo + self.h * i as f64
    }

    /// Fills `u[1..n]` for a transverse row and returns its quadrature weight.
    fn transverse_point(&self, mut row: usize, u: &mut [f64; MAX_DIM]) -> f64 {
        let mut w = 1.0;
        for d in 1..self.n {
            let j = row % self.transverse;
            row /= self.transverse;
            let ax = self.axes[d];
            let step = ax.len() / self.transverse as f64;
            u[d] = if ax.periodic { ax.lo + step * j as f64 } else { ax.lo + step * (j as f64 + 0.5) };
            w *= step;
        }
        w
    }
}

const LEVEL_RATIO: usize = 8;

fn chart_masses(
    geom: &ImmersedGeometry,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    let ds = grid.bin_width();
    let mut out = chart_masses_level(geom, grid, field)?;
    let mut b = grid.bins / LEVEL_RATIO;
    while b >= 2 {
        let level = SweepGrid { s_max: b as f64 * ds, bins: b, ..*grid };
        let fine = chart_masses_level(geom, &level, field)?;
        out[..b].copy_from_slice(&fine);
        b /= LEVEL_RATIO;
    }
    Ok(out)
}

fn chart_masses_level(
    geom: &ImmersedGeometry,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    if geom.dim() == 2 {
        return surface_masses_level(geom, grid, field);
    }
    let plan = RowPlan::new(geom, grid)?;
    let ds = grid.bin_width();
    let run = |c: usize| -> Result<Vec<f64>> {
        let mut local = vec![0.0; grid.bins];
        let mut u = [0.0; MAX_DIM];
        for row in plan.rows_of(c) {
            let w = plan.transverse_point(row, &mut u);
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=plan.cells {
                u[0] = plan.radial_node(i);
                let r = geom.r_p(&u[..plan.n]);
                let dens = geom.area_density(&u[..plan.n]);
                let g = if dens == 0.0 { 0.0 } else { field(&u[..plan.n])? * dens * w };
                if let Some((ra, ga)) = prev {
                    deposit(&mut local, ds, grid.s_max, ra, r, ga, g, plan.h);
                }
                prev = Some((r, g));
            }
        }
        Ok(local)
    };
    let parts = map_chunks(plan.chunk_count(), &run)?;
    let mut out = vec![0.0; grid.bins];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

/// Surfaces: the parameter rectangle is triangulated and `r_p` and the
/// integrand are taken linear on each triangle, so the mass of every shell is
/// exact for the interpolant.
fn surface_masses_level(
    geom: &ImmersedGeometry,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    let chart = geom
        .chart()
        .ok_or_else(|| Error::Unsupported("a chart or an exact radial structure".into()))?;
    let dom = chart.cover(geom.base_point(), grid.s_max)?;
    let (a0, a1) = (dom.axes[0], dom.axes[1]);
    check_finite(&dom, grid.s_max)?;
    let (nc, nt) = (grid.radial_cells, grid.transverse);
    let (h0, h1) = (a0.len() / nc as f64, a1.len() / nt as f64);
    let cols = if a1.periodic { nt } else { nt + 1 };
    let ds = grid.bin_width();
    let row = |i: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut r = Vec::with_capacity(cols);
        let mut g = Vec::with_capacity(cols);
        for j in 0..cols {
            let u = [a0.lo + h0 * i as f64, a1.lo + h1 * j as f64];
            r.push(geom.r_p(&u));
            let dens = geom.area_density(&u);
            g.push(if dens == 0.0 { 0.0 } else { field(&u)? * dens });
        }
        Ok((r, g))
    };
    let chunk_rows = CHUNK_ROWS * 2;
    let chunks = nc.div_ceil(chunk_rows);
    let half_area = 0.5 * h0 * h1;
    let run = |c: usize| -> Result<Vec<f64>> {
        let mut local = vec![0.0; grid.bins];
        let i0 = c * chunk_rows;
        let i1 = (i0 + chunk_rows).min(nc);
        let mut lo = row(i0)?;
        for i in i0..i1 {
            let hi = row(i + 1)?;
            for j in 0..nt {
                let jn = if a1.periodic { (j + 1) % cols } else { j + 1 };
                let p00 = (lo.0[j], lo.1[j]);
                let p10 = (hi.0[j], hi.1[j]);
                let p11 = (hi.0[jn], hi.1[jn]);
                let p01 = (lo.0[jn], lo.1[jn]);
                deposit_triangle(&mut local, ds, grid.s_max, [p00, p10, p11], half_area);
                deposit_triangle(&mut local, ds, grid.s_max, [p00, p11, p01], half_area);
            }
            lo = hi;
        }
        Ok(local)
    };
    let parts = map_chunks(chunks, &run)?;
    let mut out = vec![0.0; grid.bins];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

fn check_finite(dom: &super::Domain, s_max: f64) -> Result<()> {
    if dom.axes.iter().all(|a| a.lo.is_finite() && a.hi.is_finite()) {
        Ok(())
    } else {
        Err(Error::Truncation { s_max, reason: "cover returned an unbounded parameter range".into() })
    }
}

/// `∫ g` over the part of a triangle with `r <= t`, for `r` and `g` linear;
/// vertices sorted by `r`.
#[inline]
fn triangle_cdf(v: &[(f64, f64); 3], area: f64, total: f64, t: f64) -> f64 {
    let [(r0, g0), (r1, g1), (r2, g2)] = *v;
    if t <= r0 {
        return 0.0;
    }
    if t >= r2 {
        return total;
    }
    if t <= r1 {
        let a = (t - r0) / (r1 - r0);
        let b = (t - r0) / (r2 - r0);
        let mean = g0 + (a * (g1 - g0) + b * (g2 - g0)) / 3.0;
        a * b * area * mean
    } else {
        let a = (r2 - t) / (r2 - r1);
        let b = (r2 - t) / (r2 - r0);
        let mean = g2 + (a * (g1 - g2) + b * (g0 - g2)) / 3.0;
        total - a * b * area * mean
    }
}

#[inline]
fn deposit_triangle(bins: &mut [f64], ds: f64, s_max: f64, mut v: [(f64, f64); 3], area: f64) {
    if v[0].0.min(v[1].0).min(v[2].0) >= s_max {
        return;
    }
    v.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total = area * (v[0].1 + v[1].1 + v[2].1) / 3.0;
    let nb = bins.len();
    let k0 = ((v[0].0 / ds) as usize).min(nb - 1);
    let top = v[2].0.min(s_max);
    let k1 = ((top / ds) as usize).min(nb - 1);
    if k0 == k1 && v[2].0 < s_max {
        bins[k0] += total;
        return;
    }
    let mut below = 0.0;
    for (k, bin) in bins.iter_mut().enumerate().take(k1 + 1).skip(k0) {
        let edge = ((k + 1) as f64 * ds).min(s_max);
        let f = if k + 1 == nb { triangle_cdf(&v, area, total, s_max) } else { triangle_cdf(&v, area, total, edge) };
        *bin += f - below;
        below = f;
    }
}

/// Spreads the mass of one cell over the bins its radius range crosses.
#[allow(clippy::too_many_arguments)]
#[inline]
fn deposit(bins: &mut [f64], ds: f64, s_max: f64, ra: f64, rb: f64, ga: f64, gb: f64, h: f64) {
    let (lo, hi, g_lo, g_hi) = if ra <= rb { (ra, rb, ga, gb) } else { (rb, ra, gb, ga) };
    if lo >= s_max {
        return;
    }
    let span = hi - lo;
    let nb = bins.len();
    if span <= 1e-13 * hi.max(1.0) {
        let k = ((0.5 * (lo + hi) / ds) as usize).min(nb - 1);
        bins[k] += 0.5 * h * (g_lo + g_hi);
        return;
    }
    let k0 = ((lo / ds) as usize).min(nb - 1);
    let top = hi.min(s_max);
    let k1 = ((top / ds) as usize).min(nb - 1);
    let slope = g_hi - g_lo;
    for k in k0..=k1 {
        let e0 = (k as f64 * ds).max(lo);
        let e1 = ((k + 1) as f64 * ds).min(top);
        if e1 <= e0 {
            continue;
        }
        let t0 = (e0 - lo) / span;
        let t1 = (e1 - lo) / span;
        bins[k] += h * (g_lo * (t1 - t0) + 0.5 * slope * (t1 * t1 - t0 * t0));
    }
}

fn panels_per_bin(shell: &dyn RadialShell, ds: f64, refine: usize) -> usize {
    let l = shell.length_scale();
    let p = libm::ceil(ds / (0.25 * l)) as usize;
    p.max(1) * refine.max(1)
}

fn radial_ln_masses(shell: &dyn RadialShell, grid: &SweepGrid, refine: usize) -> Vec<f64> {
    let ds = grid.bin_width();
    let panels = panels_per_bin(shell, ds, refine);
    let w = ds / panels as f64;
    let f = |r: f64| shell.ln_shell(r);
    (0..grid.bins)
        .map(|k| {
            let mut acc = f64::NEG_INFINITY;
            for p in 0..panels {
                let a = k as f64 * ds + p as f64 * w;
                acc = m::ln_add_exp(acc, m::gauss_legendre_ln(&f, a, a + w));
            }
            acc
        })
        .collect()
}

fn radial_field_masses(
    geom: &ImmersedGeometry,
    shell: &dyn RadialShell,
    grid: &SweepGrid,
    field: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<Vec<f64>> {
    let ds = grid.bin_width();
    let panels = panels_per_bin(shell, ds, 1);
    let w = ds / panels as f64;
    let mut u = [0.0; MAX_DIM];
    let n = geom.dim();
    let mut out = vec![0.0; grid.bins];
    for (k, slot) in out.iter_mut().enumerate() {
        for p in 0..panels {
            let a = k as f64 * ds + p as f64 * w;
            for (x, wt) in GL8.iter() {
                let r = a + 0.5 * w * (1.0 + x);
                u[0] = r;
                let v = field(&u[..n])?;
                if v != 0.0 {
                    *slot += 0.5 * w * wt * v * m::exp(shell.ln_shell(r));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(feature = "parallel")]
fn map_chunks<T: Send>(count: usize, run: &(dyn Fn(usize) -> Result<T> + Sync)) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(run).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_chunks<T>(count: usize, run: &dyn Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..count).map(run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deposit_conserves_mass() {
        let mut bins = vec![0.0; 10];
        deposit(&mut bins, 1.0, 10.0, 2.3, 5.7, 1.0, 3.0, 0.5);
        let total: f64 = bins.iter().sum();
        assert!((total - 0.5 * 0.5 * 4.0).abs() < 1e-15);
        assert_eq!(bins[0], 0.0);
        assert!(bins[3] > 0.0 && bins[5] > 0.0);
        // Reversed orientation gives the same split.
        let mut rev = vec![0.0; 10];
        deposit(&mut rev, 1.0, 10.0, 5.7, 2.3, 3.0, 1.0, 0.5);
        for (a, b) in bins.iter().zip(&rev) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_split_is_exact() {
        // r = x on the unit right triangle (0,0),(1,0),(0,1) with g = 1:
        // mass below t is t - t^2/2.
        let mut bins = vec![0.0; 4];
        deposit_triangle(&mut bins, 0.25, 1.0, [(0.0, 1.0), (1.0, 1.0), (0.0, 1.0)], 0.5);
        for (k, b) in bins.iter().enumerate() {
            let f = |t: f64| t - 0.5 * t * t;
            let want = f(0.25 * (k + 1) as f64) - f(0.25 * k as f64);
            assert!((b - want).abs() < 1e-15, "{k}: {b} vs {want}");
        }
        // Linear density g = y: ∫_{x<=t} y = t/2 - t^3/6... checked by total mass.
        let mut bins = vec![0.0; 3];
        deposit_triangle(&mut bins, 0.5, 1.5, [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], 0.5);
        let total: f64 = bins.iter().sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn deposit_clips_at_s_max() {
        let mut bins = vec![0.0; 4];
        deposit(&mut bins, 1.0, 4.0, 3.0, 5.0, 1.0, 1.0, 1.0);
        assert!((bins[3] - 0.5).abs() < 1e-15);
    }
}
