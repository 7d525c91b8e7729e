//! Built-in geometries with known answers.

mod euclidean_catenoid;
mod hyperbolic_catenoid;
mod totally_geodesic;
mod warped;

pub use euclidean_catenoid::euclidean_catenoid;
pub use hyperbolic_catenoid::{hyperbolic_catenoid, hyperbolic_catenoid_with_reach, waist_radius, A_RANGE, DEFAULT_REACH};
pub use totally_geodesic::totally_geodesic;
pub use warped::{check_warp, warped_intrinsic_surface, PerturbedWarp, WarpCheck};

use crate::error::{Error, Result};
use crate::geometry::{ImmersedGeometry, RevolutionKind, SurfaceOfRevolution};
use crate::numeric::PI;
use crate::spaceform::SpaceForm;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub const NAMES: [&str; 4] = ["totally-geodesic", "euclidean-catenoid", "hyperbolic-catenoid", "warped-surface"];

/// Construction parameters shared by all entries; each entry reads its own.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CatalogParams {
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    pub scale: f64,
    pub a: f64,
    pub epsilon: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self { n: 2, m: 3, kappa: -1.0, scale: 1.0, a: 1.0, epsilon: 0.1 }
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "kebab-case"))]
pub enum Source {
    ClosedForm,
    Quadrature,
    Theorem,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParamSpec {
    pub name: &'static str,
    pub value: f64,
    pub constraint: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Target {
    pub quantity: &'static str,
    pub value: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    pub targets: Vec<Target>,
}

/// A constructed entry: the geometry and, for surfaces of revolution, its
/// arc-length profile.
#[derive(Debug)]
pub struct Built {
    pub geometry: ImmersedGeometry,
    pub revolution: Option<SurfaceOfRevolution>,
}

fn target(quantity: &'static str, value: f64, source: Source) -> Target {
    Target { quantity, value, source }
}

/// Parameter schema and expected values of `name` at `p`.
pub fn entry(name: &str, p: &CatalogParams) -> Result<CatalogEntry> {
    let spec = |name, value, constraint| ParamSpec { name, value, constraint };
    let lam_model = -p.kappa / 4.0;
    Ok(match name {
        "totally-geodesic" => CatalogEntry {
            name: "totally-geodesic",
            description: "K^n(kappa) as a totally geodesic submanifold of R^m or H^m(kappa)",
            params: vec![
                spec("n", p.n as f64, "2 <= n <= m, n <= 4"),
                spec("m", p.m as f64, "m >= n"),
                spec("kappa", p.kappa, "kappa <= 0"),
            ],
            targets: vec![
                target("lambda_star", -(((p.n - 1) * (p.n - 1)) as f64) * p.kappa / 4.0, Source::Theorem),
                target("sup_q", 1.0, Source::ClosedForm),
                target("curvature_l2", 0.0, Source::ClosedForm),
            ],
        },
        "euclidean-catenoid" => CatalogEntry {
            name: "euclidean-catenoid",
            description: "catenoid of waist radius `scale` in R^3, based at a waist point",
            params: vec![spec("scale", p.scale, "scale > 0")],
            targets: vec![
                target("lambda_star", 0.0, Source::Theorem),
                target("sup_q", 2.0, Source::Quadrature),
                target("curvature_l2", 8.0 * PI, Source::ClosedForm),
            ],
        },
        "hyperbolic-catenoid" => CatalogEntry {
            name: "hyperbolic-catenoid",
            description: "spherical catenoid about a geodesic axis in H^3(kappa), based at a waist point",
            params: vec![spec("a", p.a, "1e-3 <= a <= 1e4"), spec("kappa", p.kappa, "kappa < 0")],
            targets: vec![target("lambda_star", lam_model, Source::Theorem), target("sup_q", 2.0, Source::Theorem)],
        },
        "warped-surface" => CatalogEntry {
            name: "warped-surface",
            description: "intrinsic plane dr^2 + f(r)^2 dtheta^2 with curvature <= kappa and f / S_kappa -> 1 + epsilon",
            params: vec![spec("epsilon", p.epsilon, "epsilon >= 0"), spec("kappa", p.kappa, "kappa < 0")],
            targets: vec![
                target("lambda_star", lam_model, Source::Theorem),
                target("sup_q", 1.0 + p.epsilon, Source::ClosedForm),
            ],
        },
        _ => return Err(Error::Invalid(format!("unknown catalog entry `{name}`; known: {}", NAMES.join(", ")))),
    })
}

/// All entries at `p`.
pub fn list(p: &CatalogParams) -> Vec<CatalogEntry> {
    NAMES.iter().filter_map(|n| entry(n, p).ok()).collect()
}

/// Constructs entry `name` at `p`.
pub fn build(name: &str, p: &CatalogParams) -> Result<Built> {
    match name {
        "totally-geodesic" => {
            let geometry = totally_geodesic(p.n, p.m, p.kappa)?;
            let revolution = (p.n == 2).then(|| {
                let sf = SpaceForm::new(p.kappa, 2).expect("validated");
                SurfaceOfRevolution::new("totally-geodesic", p.kappa, RevolutionKind::Pole, f64::INFINITY, Arc::new(move |r| sf.s(r)))
            });
            Ok(Built { geometry, revolution })
        }
        "euclidean-catenoid" => {
            let (geometry, rev) = euclidean_catenoid(p.scale)?;
            Ok(Built { geometry, revolution: Some(rev) })
        }
        "hyperbolic-catenoid" => {
            let (geometry, rev) = hyperbolic_catenoid(p.a, p.kappa)?;
            Ok(Built { geometry, revolution: Some(rev) })
        }
        "warped-surface" => {
            let (geometry, rev) = warped_intrinsic_surface(p.epsilon, p.kappa)?;
            Ok(Built { geometry, revolution: Some(rev) })
        }
        _ => Err(Error::Invalid(format!("unknown catalog entry `{name}`; known: {}", NAMES.join(", ")))),
    }
}
