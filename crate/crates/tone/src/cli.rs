//! Command-line arguments and the commands behind them.

use crate::error::{CliError, CliResult};
use crate::geometry_file::{self, GeometrySpec};
use crate::profile_csv;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use tone_core::catalog::{self, Built, CatalogParams};
use tone_core::growth::{self, GrowthProfile};
use tone_core::{bounds, spectrum, SpaceForm};

#[derive(Debug, Parser)]
#[command(name = "tone", version = crate::VERSION, about = "Volume growth and fundamental tone bounds for minimal submanifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Model-space quantities at one radius.
    Spaceform(SpaceformArgs),
    /// Volume growth profile as CSV (or JSON).
    Growth(GrowthArgs),
    /// Lower and upper bounds for the fundamental tone.
    Bounds(BoundsArgs),
    /// Radial Sturm-Liouville estimate of the bottom of the spectrum.
    Spectrum(SpectrumArgs),
    /// Built-in geometries with their parameters and expected values.
    Catalog(CatalogArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceformArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Catalog entry selection, by name and parameters or from a definition file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    /// Catalog entry (see `tone catalog`)
    #[arg(long)]
    pub geometry: Option<String>,
    /// JSON geometry description
    #[arg(long, conflicts_with = "geometry")]
    pub geometry_file: Option<PathBuf>,
    /// Submanifold dimension [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ambient dimension [default: 3]
    #[arg(long)]
    pub m: Option<usize>,
    /// Ambient curvature [default: -1, or 0 for the Euclidean catenoid]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Euclidean catenoid neck radius [default: 1]
    #[arg(long)]
    pub scale: Option<f64>,
    /// Hyperbolic catenoid parameter [default: 1]
    #[arg(long)]
    pub a: Option<f64>,
    /// Warped surface perturbation size [default: 0.1]
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl GeometryArgs {
    pub fn params(&self) -> CatalogParams {
        let d = CatalogParams::default();
        let kappa = match (self.kappa, self.geometry.as_deref()) {
            (Some(k), _) => k,
            (None, Some("euclidean-catenoid")) => 0.0,
            _ => d.kappa,
        };
        CatalogParams {
            n: self.n.unwrap_or(d.n),
            m: self.m.unwrap_or(d.m),
            kappa,
            scale: self.scale.unwrap_or(d.scale),
            a: self.a.unwrap_or(d.a),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
        }
    }

    pub fn is_set(&self) -> bool {
        self.geometry.is_some() || self.geometry_file.is_some()
    }

    pub fn resolve(&self) -> CliResult<(GeometrySpec, Built)> {
        if let Some(path) = &self.geometry_file {
            return geometry_file::load(&std::fs::read_to_string(path)?);
        }
        let name = self.geometry.clone().ok_or_else(|| CliError::config("--geometry or --geometry-file is required"))?;
        let spec = GeometrySpec { name, params: self.params() };
        let built = spec.build()?;
        Ok((spec, built))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GrowthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 50.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 512)]
    pub bins: usize,
    #[arg(long, default_value_t = 4096)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    /// Profile CSV to use instead of computing one.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Radii `R`, comma separated; defaults to `smax/4, smax/2, smax`.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Vec<f64>,
    /// Profile radius; defaults to the largest `R`.
    #[arg(long)]
    pub smax: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    pub bins: usize,
    #[arg(long, default_value_t = 4096)]
    pub nodes: usize,
    /// Dimension used in the test function; defaults to the submanifold dimension.
    #[arg(long = "test-dim")]
    pub test_dim: Option<usize>,
    /// Where to write the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
    pub truncations: Vec<f64>,
    #[arg(long, default_value_t = 8192)]
    pub mesh: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CatalogArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Spaceform,
    Growth,
    Bounds,
    Spectrum,
    Catalog,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Extra profile CSV to put through the growth checks.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

/// What a command prints and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub exit: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit: 0 }
    }
}

/// Adds `version` and `config` to a serialised report.
pub fn with_provenance<T: Serialize>(report: &T, config: &Command) -> CliResult<Value> {
    let mut v = serde_json::to_value(report)?;
    let cfg = serde_json::to_value(config)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("version".into(), Value::String(crate::VERSION.into()));
            map.insert("config".into(), cfg);
        }
        other => {
            *other = json!({"version": crate::VERSION, "config": cfg, "result": other.clone()});
        }
    }
    Ok(v)
}

fn pretty(v: &Value) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Writes to `out` when given, else returns the text for stdout.
fn emit(text: String, out: Option<&PathBuf>) -> CliResult<String> {
    match out {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn check_positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("--{name} must be positive, got {v}")))
    }
}

/// Runs one parsed command.
pub fn run(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Spaceform(a) => spaceform(a, cmd),
        Command::Growth(a) => growth_cmd(a, cmd),
        Command::Bounds(a) => bounds_cmd(a, cmd),
        Command::Spectrum(a) => spectrum_cmd(a, cmd),
        Command::Catalog(a) => catalog_cmd(a, cmd),
        Command::Verify(a) => {
            let summary = crate::verify::run_suite(a.suite, a.profile.as_deref())?;
            Ok(Outcome { stdout: summary.table(), exit: if summary.all_passed() { 0 } else { crate::error::EXIT_FAILED } })
        }
    }
}

fn spaceform(a: &SpaceformArgs, cmd: &Command) -> CliResult<Outcome> {
    let sf = SpaceForm::new(a.kappa, a.n)?;
    if !a.r.is_finite() || a.r < 0.0 {
        return Err(CliError::config(format!("--r must be non-negative, got {}", a.r)));
    }
    let report = json!({
        "kappa": a.kappa,
        "n": a.n,
        "r": a.r,
        "s_kappa": sf.s(a.r),
        "c_kappa": if a.r > 0.0 { Some(sf.c(a.r)) } else { None },
        "sphere_volume": sf.sphere_volume(a.r),
        "ball_volume": sf.ball_volume(a.r),
        "ln_ball_volume": sf.ln_ball_volume(a.r),
    });
    let text = pretty(&with_provenance(&report, cmd)?)?;
    Ok(Outcome::ok(emit(text, a.out.as_ref())?))
}

/// Profile of the selected geometry out to `smax`.
pub fn compute_profile(g: &GeometryArgs, smax: f64, bins: usize, nodes: usize) -> CliResult<(GeometrySpec, GrowthProfile)> {
    check_positive("smax", smax)?;
    let (spec, built) = g.resolve()?;
    let profile = growth::compute_growth_profile(&built.geometry, smax, bins, nodes)?;
    Ok((spec, profile))
}

fn growth_cmd(a: &GrowthArgs, cmd: &Command) -> CliResult<Outcome> {
    let (_, profile) = compute_profile(&a.geometry, a.smax, a.bins, a.nodes)?;
    let text = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            profile_csv::write_profile(&profile, &serde_json::to_value(cmd)?, &mut buf)?;
            String::from_utf8(buf).expect("ascii output")
        }
        Format::Json => {
            let report = json!({
                "kappa": profile.kappa,
                "dim": profile.dim,
                "s": profile.radii,
                "q": profile.q_values,
                "ln_vol": profile.log_cum_volume.iter().map(|v| if v.is_finite() { Some(*v) } else { None }).collect::<Vec<_>>(),
                "rel_error": profile.meta.rel_error,
                "sup_q": profile.sup_q(),
                "doubling_constant": growth::doubling_constant(&profile),
            });
            pretty(&with_provenance(&report, cmd)?)?
        }
    };
    Ok(Outcome::ok(emit(text, a.out.as_ref())?))
}

fn bounds_cmd(a: &BoundsArgs, cmd: &Command) -> CliResult<Outcome> {
    let (name, profile) = match &a.profile {
        Some(path) => {
            if a.geometry.is_set() {
                return Err(CliError::config("give either --profile or a geometry, not both"));
            }
            let loaded = profile_csv::read_profile(std::fs::File::open(path)?)?;
            let name = loaded
                .config
                .as_ref()
                .and_then(|c| c.get("geometry")?.as_str().map(String::from))
                .unwrap_or_else(|| "profile".into());
            (name, loaded.profile)
        }
        None => {
            let smax = a.smax.or_else(|| a.schedule.iter().copied().reduce(f64::max)).unwrap_or(50.0);
            let (spec, p) = compute_profile(&a.geometry, smax, a.bins, a.nodes)?;
            (spec.name, p)
        }
    };
    let schedule = if a.schedule.is_empty() {
        let s = profile.s_max();
        vec![0.25 * s, 0.5 * s, s]
    } else {
        a.schedule.clone()
    };
    let report = bounds::assemble_report(&name, &profile, a.test_dim, &schedule)?;
    let text = pretty(&with_provenance(&report, cmd)?)?;
    if let Some(p) = &a.out {
        std::fs::write(p, text)?;
    }
    Ok(Outcome::ok(format!("{} {}\n", report.verdict.lower, report.verdict.upper)))
}

fn spectrum_cmd(a: &SpectrumArgs, cmd: &Command) -> CliResult<Outcome> {
    let (spec, built) = a.geometry.resolve()?;
    let surf = built.revolution.ok_or_else(|| {
        CliError::config(format!("`{}` with these parameters is not a surface of revolution", spec.name))
    })?;
    let result = spectrum::tone_of_revolution_surface(&surf, &a.truncations, a.mesh)?;
    let text = pretty(&with_provenance(&result, cmd)?)?;
    Ok(Outcome::ok(emit(text, a.out.as_ref())?))
}

fn catalog_cmd(a: &CatalogArgs, cmd: &Command) -> CliResult<Outcome> {
    let p = a.geometry.params();
    let entries = match &a.geometry.geometry {
        Some(name) => vec![catalog::entry(name, &p)?],
        None => catalog::list(&p),
    };
    let v = with_provenance(&json!({ "entries": entries }), cmd)?;
    Ok(Outcome::ok(pretty(&v)?))
}
