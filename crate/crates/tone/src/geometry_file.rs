//! Geometry definition files.
//!
//! ```json
//! {"ambient": {"kind": "hyperbolic", "m": 3, "kappa": -1.0},
//!  "builtin": {"name": "hyperbolic-catenoid", "a": 1.0},
//!  "base_point": [0.0, 0.0],
//!  "topology": {"euler_char": 0, "ends": 2}}
//! ```
//!
//! Only catalog entries can be loaded; `chart` is reserved.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tone_core::catalog::{self, Built, CatalogParams};
use tone_core::geometry::AmbientSpace;
use tone_core::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    Euclidean,
    Hyperbolic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub kind: AmbientKind,
    pub m: usize,
    #[serde(default)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinSpec {
    pub name: String,
    pub n: Option<usize>,
    pub scale: Option<f64>,
    pub a: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub ambient: AmbientSpec,
    pub builtin: Option<BuiltinSpec>,
    pub chart: Option<Value>,
    pub base_point: Option<Vec<f64>>,
    pub topology: Option<Topology>,
}

/// A catalog entry name with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometrySpec {
    pub name: String,
    pub params: CatalogParams,
}

impl GeometrySpec {
    pub fn build(&self) -> CliResult<Built> {
        Ok(catalog::build(&self.name, &self.params)?)
    }
}

/// Parses a definition, builds the entry and checks the declared ambient
/// space, base point and topology against it.
pub fn load(text: &str) -> CliResult<(GeometrySpec, Built)> {
    let file: GeometryFile = serde_json::from_str(text)?;
    if file.chart.is_some() {
        return Err(CliError::config("user-supplied charts are not supported; use `builtin`"));
    }
    let b = file.builtin.ok_or_else(|| CliError::config("geometry file needs a `builtin` entry"))?;
    let d = CatalogParams::default();
    let kappa = match file.ambient.kind {
        AmbientKind::Euclidean => 0.0,
        AmbientKind::Hyperbolic => file.ambient.kappa,
    };
    if file.ambient.kind == AmbientKind::Euclidean && file.ambient.kappa != 0.0 {
        return Err(CliError::config("a euclidean ambient must have kappa = 0"));
    }
    let params = CatalogParams {
        n: b.n.unwrap_or(d.n),
        m: file.ambient.m,
        kappa,
        scale: b.scale.unwrap_or(d.scale),
        a: b.a.unwrap_or(d.a),
        epsilon: b.epsilon.unwrap_or(d.epsilon),
    };
    let spec = GeometrySpec { name: b.name, params };
    let built = spec.build()?;
    let g = &built.geometry;
    let declared = match file.ambient.kind {
        AmbientKind::Euclidean => AmbientSpace::Euclidean { m: file.ambient.m },
        AmbientKind::Hyperbolic => AmbientSpace::Hyperbolic { m: file.ambient.m, kappa },
    };
    match g.ambient() {
        Some(actual) if actual != declared => {
            return Err(CliError::config(format!("`{}` lives in {actual:?}, not the declared {declared:?}", spec.name)));
        }
        // Intrinsic entries compare against the declared model.
        None if g.kappa() != kappa => {
            return Err(CliError::config(format!("`{}` compares against kappa = {}, not {kappa}", spec.name, g.kappa())));
        }
        _ => {}
    }
    if let Some(bp) = &file.base_point {
        if bp.as_slice() != g.base_point() {
            return Err(CliError::config(format!(
                "base point {bp:?} is not supported; built-ins are based at {:?}",
                g.base_point()
            )));
        }
    }
    if let (Some(t), Some(actual)) = (file.topology, g.topology()) {
        if t != actual {
            return Err(CliError::config(format!("declared topology {t:?} contradicts {actual:?}")));
        }
    }
    Ok((spec, built))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_a_builtin() {
        let text = r#"{"ambient": {"kind": "euclidean", "m": 3}, "builtin": {"name": "euclidean-catenoid", "scale": 2.0},
                       "base_point": [0.0, 0.0], "topology": {"euler_char": 0, "ends": 2}}"#;
        let (spec, built) = load(text).unwrap();
        assert_eq!(spec.params.scale, 2.0);
        assert_eq!(built.geometry.name(), "euclidean-catenoid");
    }

    #[test]
    fn rejects_inconsistent_files() {
        let cases = [
            r#"{"ambient": {"kind": "euclidean", "m": 3}, "chart": {}}"#,
            r#"{"ambient": {"kind": "euclidean", "m": 3}}"#,
            r#"{"ambient": {"kind": "hyperbolic", "m": 3, "kappa": -1}, "builtin": {"name": "euclidean-catenoid"}}"#,
            r#"{"ambient": {"kind": "euclidean", "m": 3}, "builtin": {"name": "euclidean-catenoid"}, "topology": {"euler_char": 1, "ends": 1}}"#,
            r#"{"ambient": {"kind": "euclidean", "m": 3}, "builtin": {"name": "euclidean-catenoid"}, "colour": 1}"#,
            r#"{"ambient": {"kind": "euclidean", "m": 3}, "builtin": {"name": "euclidean-catenoid"}, "base_point": [1.0, 0.0]}"#,
        ];
        for c in cases {
            assert_eq!(load(c).unwrap_err().code, crate::error::EXIT_CONFIG, "{c}");
        }
    }
}
