//! Growth profile CSV: `#`-prefixed metadata lines, the header
//! `s,vol,q,dvol_ds`, then one row per grid point.
//!
//! Row `k` holds `s_k`, `v(s_k)`, `Q(s_k)` and the mean density over
//! `(s_{k-1}, s_k]` (zero on the first row). Values are written with 17
//! significant digits; volumes beyond the `f64` range are written from their
//! logarithm with an extended exponent and read back in log space.

use crate::error::{CliError, CliResult};
use serde_json::Value;
use std::io::{BufRead, BufReader, Read, Write};
use tone_core::growth::{GrowthProfile, QuadratureMeta};

pub const HEADER: [&str; 4] = ["s", "vol", "q", "dvol_ds"];

/// Formats a finite float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Formats `exp(l)` with 17 significant digits, even when it overflows `f64`.
pub fn fmt_from_ln(l: f64) -> String {
    if l == f64::NEG_INFINITY {
        return fmt_float(0.0);
    }
    let v = l.exp();
    if v.is_finite() && v.is_normal() {
        return fmt_float(v);
    }
    let log10 = l / std::f64::consts::LN_10;
    let mut e = log10.floor();
    let mut mant = 10f64.powf(log10 - e);
    if mant >= 10.0 {
        mant /= 10.0;
        e += 1.0;
    }
    format!("{mant:.16}e{}", e as i64)
}

/// Natural log of a decimal that may lie outside the `f64` range.
pub fn parse_ln(text: &str) -> CliResult<f64> {
    let t = text.trim();
    let bad = || CliError::config(format!("not a number: `{t}`"));
    let v: f64 = t.parse().map_err(|_| bad())?;
    if v < 0.0 {
        return Err(CliError::config(format!("negative volume or density `{t}`")));
    }
    if (v == 0.0 && !t.contains(['e', 'E'])) || (v.is_normal() && v.is_finite()) {
        return Ok(v.ln());
    }
    let (m, e) = t.split_once(['e', 'E']).ok_or_else(bad)?;
    let mant: f64 = m.parse().map_err(|_| bad())?;
    let exp: i64 = e.parse().map_err(|_| bad())?;
    if mant == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(mant.ln() + exp as f64 * std::f64::consts::LN_10)
}

/// Writes `profile` with the run configuration and tool version as comments.
pub fn write_profile<W: Write>(profile: &GrowthProfile, config: &Value, out: W) -> CliResult<()> {
    let mut out = out;
    writeln!(out, "# tone {}", crate::VERSION)?;
    writeln!(out, "# config {}", serde_json::to_string(config)?)?;
    writeln!(out, "# kappa {}", fmt_float(profile.kappa))?;
    writeln!(out, "# dim {}", profile.dim)?;
    writeln!(out, "# radial_cells {}", profile.meta.radial_cells)?;
    writeln!(out, "# transverse {}", profile.meta.transverse)?;
    writeln!(out, "# rel_error {}", fmt_float(profile.meta.rel_error))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for k in 0..profile.radii.len() {
        let dens = if k == 0 { fmt_float(0.0) } else { fmt_from_ln(profile.log_density[k - 1]) };
        w.write_record([
            fmt_float(profile.radii[k]),
            fmt_from_ln(profile.log_cum_volume[k]),
            fmt_float(profile.q_values[k]),
            dens,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Profile plus the configuration recorded in its comments, if any.
#[derive(Debug, Clone)]
pub struct LoadedProfile {
    pub profile: GrowthProfile,
    pub config: Option<Value>,
    pub version: Option<String>,
}

type Meta = std::collections::BTreeMap<String, String>;

fn meta_value<T: std::str::FromStr>(meta: &Meta, key: &str, default: Option<T>) -> CliResult<T> {
    match (meta.get(key), default) {
        (Some(raw), _) => raw.trim().parse().map_err(|_| CliError::config(format!("bad `# {key}` value `{raw}`"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(CliError::config(format!("profile is missing the `# {key}` line"))),
    }
}

/// Reads a profile written by [`write_profile`] (or by hand, with the
/// `kappa` and `dim` comment lines present).
pub fn read_profile<R: Read>(input: R) -> CliResult<LoadedProfile> {
    let mut meta = Meta::new();
    let mut body = String::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            let (k, v) = c.split_once(' ').unwrap_or((c, ""));
            meta.insert(k.to_string(), v.to_string());
        } else if !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let kappa: f64 = meta_value(&meta, "kappa", None)?;
    let dim: usize = meta_value(&meta, "dim", None)?;
    let qmeta = QuadratureMeta {
        radial_cells: meta_value(&meta, "radial_cells", Some(0))?,
        transverse: meta_value(&meta, "transverse", Some(0))?,
        rel_error: meta_value(&meta, "rel_error", Some(0.0))?,
    };
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).ne(HEADER) {
        return Err(CliError::config(format!("expected header `{}`, found `{}`", HEADER.join(","), headers.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut s, mut lv, mut q, mut ld) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).ok_or_else(|| CliError::config(format!("row {} has {} fields", i + 1, rec.len())));
        let num = |j: usize| -> CliResult<f64> {
            let t = field(j)?.trim();
            t.parse().map_err(|_| CliError::config(format!("row {}: not a number `{t}`", i + 1)))
        };
        s.push(num(0)?);
        lv.push(parse_ln(field(1)?)?);
        q.push(num(2)?);
        ld.push(parse_ln(field(3)?)?);
    }
    let q0 = *q.first().ok_or_else(|| CliError::config("profile has no rows"))?;
    let mut profile = GrowthProfile::from_log_volumes(kappa, dim, s, lv, q0, qmeta)?;
    profile.q_values = q;
    profile.log_density = ld[1..].to_vec();
    let config = meta.get("config").map(|c| serde_json::from_str(c)).transpose()?;
    Ok(LoadedProfile { profile, config, version: meta.get("tone").cloned() })
}
