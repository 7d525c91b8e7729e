use super::ambient::{AmbientSpace, MAX_COORDS};
use crate::error::Result;
use alloc::vec::Vec;

/// Largest intrinsic dimension handled on the stack.
pub const MAX_DIM: usize = 4;

pub type Coords = [f64; MAX_COORDS];

/// One axis of a rectangular parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: true }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.periodic || (x >= self.lo && x <= self.hi)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A rectangular parameter domain `D ⊂ R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub axes: Vec<Axis>,
}

impl Domain {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.axes.len() && self.axes.iter().zip(u).all(|(a, &x)| a.contains(x))
    }
}

/// Second fundamental form summary at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SffNorms {
    /// `|A|^2`, squared Frobenius norm.
    pub norm_sq: f64,
    /// Norm of the mean curvature vector (trace of `A`).
    pub mean: f64,
}

/// Shell densities of a geometry that is rotationally symmetric about its base
/// point, with `r_p` equal to the first chart coordinate.
pub trait RadialShell: Send + Sync {
    /// `ln` of the area of the level set `{r_p = r}`.
    fn ln_shell(&self, r: f64) -> f64;
    /// Characteristic length over which `ln_shell` changes by O(1).
    fn length_scale(&self) -> f64;
}

/// A parametrization of an immersed submanifold of a constant-curvature ambient space.
///
/// Only `embed` is mandatory; derivatives fall back to central finite differences
/// with steps `eps^{1/3} * max(1, |u_i|)`.
pub trait Chart: Send + Sync {
    fn dim(&self) -> usize;

    fn ambient(&self) -> AmbientSpace;

    fn domain(&self) -> Domain;

    /// Ambient coordinates of the image of `u`.
    fn embed(&self, u: &[f64], x: &mut [f64]);

    /// `out[i] = d x / d u_i`.
    fn tangents(&self, u: &[f64], out: &mut [Coords]) {
        let n = self.dim();
        let d = self.ambient().coords();
        let mut up = [0.0; MAX_DIM];
        up[..n].copy_from_slice(&u[..n]);
        let mut xp = [0.0; MAX_COORDS];
        let mut xm = [0.0; MAX_COORDS];
        for i in 0..n {
            let h = fd_step(u[i]);
            up[i] = u[i] + h;
            self.embed(&up[..n], &mut xp);
            up[i] = u[i] - h;
            self.embed(&up[..n], &mut xm);
            up[i] = u[i];
            for k in 0..d {
                out[i][k] = (xp[k] - xm[k]) / (2.0 * h);
            }
        }
    }

    /// `out[i][j] = d^2 x / du_i du_j`, by central differences of [`Chart::tangents`].
    fn second(&self, u: &[f64], out: &mut [[Coords; MAX_DIM]]) {
        let n = self.dim();
        let d = self.ambient().coords();
        let mut up = [0.0; MAX_DIM];
        up[..n].copy_from_slice(&u[..n]);
        let mut tp = [[0.0; MAX_COORDS]; MAX_DIM];
        let mut tm = [[0.0; MAX_COORDS]; MAX_DIM];
        for j in 0..n {
            let h = fd_step(u[j]);
            up[j] = u[j] + h;
            self.tangents(&up[..n], &mut tp);
            up[j] = u[j] - h;
            self.tangents(&up[..n], &mut tm);
            up[j] = u[j];
            for i in 0..n {
                for k in 0..d {
                    out[i][j][k] = (tp[i][k] - tm[i][k]) / (2.0 * h);
                }
            }
        }
        // Symmetrize the mixed partials.
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..d {
                    let s = 0.5 * (out[i][j][k] + out[j][i][k]);
                    out[i][j][k] = s;
                    out[j][i][k] = s;
                }
            }
        }
    }

    /// `sqrt(det g)` without the degeneracy check; charts with a cheap closed form override it.
    fn area_density(&self, u: &[f64]) -> f64 {
        let n = self.dim();
        let amb = self.ambient();
        let mut t = [[0.0; MAX_COORDS]; MAX_DIM];
        self.tangents(u, &mut t);
        let g = metric(&amb, &t, n);
        crate::numeric::sqrt(det(&g, n).max(0.0))
    }

    /// Closed-form `|A|^2` and `|H|` in an adapted frame, for charts where the
    /// ambient-coordinate formula loses precision far from the base point.
    fn adapted_sff(&self, _u: &[f64]) -> Option<SffNorms> {
        None
    }

    /// A sub-domain whose image contains the extrinsic ball of radius `s_max` around `base`.
    fn cover(&self, base: &[f64], s_max: f64) -> Result<Domain>;

    /// Exact shell structure when `r_p` is the first chart coordinate.
    fn radial(&self) -> Option<&dyn RadialShell> {
        None
    }
}

pub(crate) fn fd_step(x: f64) -> f64 {
    // eps^{1/3}
    6.055_454_452_393_343e-6 * x.abs().max(1.0)
}

pub(crate) fn metric(amb: &AmbientSpace, t: &[Coords], n: usize) -> [[f64; MAX_DIM]; MAX_DIM] {
    let mut g = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in i..n {
            let v = amb.inner(&t[i], &t[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

pub(crate) fn det(g: &[[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
    match n {
        1 => g[0][0],
        2 => g[0][0] * g[1][1] - g[0][1] * g[1][0],
        3 => {
            g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
        }
        _ => {
            let mut a = *g;
            lu_det(&mut a, n)
        }
    }
}

fn lu_det(a: &mut [[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
    let mut d = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in (c + 1)..n {
            if a[r][c].abs() > a[piv][c].abs() {
                piv = r;
            }
        }
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Inverse of a small SPD matrix by Gauss–Jordan elimination.
pub(crate) fn inverse(g: &[[f64; MAX_DIM]; MAX_DIM], n: usize) -> Option<[[f64; MAX_DIM]; MAX_DIM]> {
    let mut a = *g;
    let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in inv.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    for c in 0..n {
        let mut piv = c;
        for r in (c + 1)..n {
            if a[r][c].abs() > a[piv][c].abs() {
                piv = r;
            }
        }
        if a[piv][c] == 0.0 {
            return None;
        }
        a.swap(piv, c);
        inv.swap(piv, c);
        let p = a[c][c];
        for k in 0..n {
            a[c][k] /= p;
            inv[c][k] /= p;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for k in 0..n {
                    a[r][k] -= f * a[c][k];
                    inv[r][k] -= f * inv[c][k];
                }
            }
        }
    }
    Some(inv)
}
