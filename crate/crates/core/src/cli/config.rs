//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Every key is optional and
//! unknown or repeated keys are rejected. See the README for the schema.

use crate::asymptotics::{Region, ViiSign};
use crate::error::{config_err, Error, Result};
use crate::scattering::DatumSpec;
use crate::soliton::{parse_spectrum, EigenRecord};
use crate::matrix::c;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Where the Painlevé parameter κ comes from in `painleve` mode.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaSource {
    /// κ = −r(1), region I.
    FromRAt1,
    /// κ = ∓|r(2+√3)|, region II, sign per `vii_sign`.
    FromRAtMerge,
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub datum: DatumSpec,
    pub datum_half_width: f64,
    pub datum_points: usize,
    pub z_max: f64,
    pub grid_per_side: usize,
    pub jost_rtol: f64,
    pub eigenvalues: Vec<EigenRecord>,
    pub close_orbits: bool,
    /// re_min, re_max, im_min, im_max of a zero search for a(z).
    pub search_box: Option<[f64; 4]>,
    pub regions: Vec<Region>,
    pub c_cap: f64,
    pub t_list: Vec<f64>,
    /// Explicit x-range; by default each t uses centre·t ± c_cap·t^{1/3}.
    pub x_window: Option<(f64, f64)>,
    pub x_samples: usize,
    pub kappa_source: KappaSource,
    pub vii_sign: ViiSign,
    pub delta: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub fixed_point_tol: f64,
    pub pde_half_width: f64,
    pub pde_points: usize,
    pub dt: f64,
    pub kappa_eq: f64,
    pub monitor_tol: f64,
    /// Largest accepted log-log slope of the max error in `compare` mode.
    pub slope_bound: f64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datum: DatumSpec::Zero,
            datum_half_width: 40.0,
            datum_points: 2048,
            z_max: 8.0,
            grid_per_side: 201,
            jost_rtol: 1e-11,
            eigenvalues: Vec::new(),
            close_orbits: false,
            search_box: None,
            regions: vec![Region::PI],
            c_cap: 3.0,
            t_list: vec![64.0, 128.0, 256.0],
            x_window: None,
            x_samples: 41,
            kappa_source: KappaSource::FromRAt1,
            vii_sign: ViiSign::Theorem,
            delta: 1.0 / 16.0,
            s_min: -8.0,
            s_max: 8.0,
            fixed_point_tol: 1e-10,
            pde_half_width: 600.0,
            pde_points: 8192,
            dt: 0.05,
            kappa_eq: 2.0,
            monitor_tol: 1e-6,
            slope_bound: -0.4,
            output_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: &[&str] = &[
    "datum",
    "datum_half_width",
    "datum_points",
    "z_max",
    "grid_per_side",
    "jost_rtol",
    "spectrum_file",
    "eigenvalues",
    "close_orbits",
    "search_box",
    "region",
    "c_cap",
    "t_list",
    "x_window",
    "x_samples",
    "kappa_source",
    "kappa",
    "vii_sign",
    "delta",
    "s_min",
    "s_max",
    "fixed_point_tol",
    "pde_half_width",
    "pde_points",
    "dt",
    "kappa_eq",
    "monitor_tol",
    "slope_bound",
    "output_dir",
];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base)
}

/// Parses config text; relative paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| config_err(line, format!("line {} is not `key = value`", n + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(config_err(key, "unknown key"));
        }
        if entries.insert(key, value.trim()).is_some() {
            return Err(config_err(key, "given more than once"));
        }
    }
    let mut cfg = ExperimentConfig::default();
    let resolve = |p: &str| {
        let p = PathBuf::from(p);
        if p.is_relative() { base.join(p) } else { p }
    };

    for (&key, &value) in &entries {
        match key {
            "datum" => {
                cfg.datum = match DatumSpec::parse(value).map_err(|e| config_err(key, e.to_string()))? {
                    DatumSpec::Table(p) => DatumSpec::Table(resolve(&p.to_string_lossy())),
                    other => other,
                }
            }
            "datum_half_width" => cfg.datum_half_width = positive(key, value)?,
            "datum_points" => cfg.datum_points = count(key, value)?,
            "z_max" => cfg.z_max = number(key, value)?,
            "grid_per_side" => cfg.grid_per_side = count(key, value)?,
            "jost_rtol" => cfg.jost_rtol = positive(key, value)?,
            "spectrum_file" => {
                let path = resolve(value);
                let text = std::fs::read_to_string(&path).map_err(|e| config_err(key, format!("{}: {e}", path.display())))?;
                cfg.eigenvalues.extend(parse_spectrum(&text).map_err(|e| config_err(key, e.to_string()))?);
            }
            "eigenvalues" => {
                for rec in value.split(';').filter(|s| !s.trim().is_empty()) {
                    let v = list(key, rec)?;
                    if v.len() != 4 {
                        return Err(config_err(key, format!("record `{}` needs Re_zeta, Im_zeta, Re_C, Im_C", rec.trim())));
                    }
                    cfg.eigenvalues.push(EigenRecord { zeta: c(v[0], v[1]), coeff: c(v[2], v[3]) });
                }
            }
            "close_orbits" => cfg.close_orbits = boolean(key, value)?,
            "search_box" => {
                let v = list(key, value)?;
                if v.len() != 4 || !(v[0] < v[1] && 0.0 < v[2] && v[2] < v[3]) {
                    return Err(config_err(key, "expected re_min < re_max, 0 < im_min < im_max"));
                }
                cfg.search_box = Some([v[0], v[1], v[2], v[3]]);
            }
            "region" => {
                cfg.regions = match value {
                    "P_I" => vec![Region::PI],
                    "P_II" => vec![Region::PII],
                    "both" => vec![Region::PI, Region::PII],
                    _ => return Err(config_err(key, "expected P_I, P_II or both")),
                }
            }
            "c_cap" => cfg.c_cap = positive(key, value)?,
            "t_list" => {
                let v = list(key, value)?;
                if v.is_empty() || v.iter().any(|t| !(*t > 0.0)) || v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(config_err(key, "times must be positive and strictly increasing"));
                }
                cfg.t_list = v;
            }
            "x_window" => {
                let v = list(key, value)?;
                if v.len() != 2 || !(v[0] < v[1]) {
                    return Err(config_err(key, "expected x_min, x_max with x_min < x_max"));
                }
                cfg.x_window = Some((v[0], v[1]));
            }
            "x_samples" => {
                cfg.x_samples = count(key, value)?;
                if cfg.x_samples < 2 {
                    return Err(config_err(key, "need at least 2 samples"));
                }
            }
            "kappa_source" => {
                cfg.kappa_source = match value {
                    "from_r_at_1" => KappaSource::FromRAt1,
                    "from_r_at_merge" => KappaSource::FromRAtMerge,
                    "explicit" => match entries.get("kappa") {
                        Some(k) => KappaSource::Explicit(number("kappa", k)?),
                        None => return Err(config_err("kappa", "kappa_source = explicit requires a `kappa` value")),
                    },
                    _ => return Err(config_err(key, "expected from_r_at_1, from_r_at_merge or explicit")),
                }
            }
            "kappa" => {
                if entries.get("kappa_source") != Some(&"explicit") {
                    return Err(config_err(key, "only meaningful with kappa_source = explicit"));
                }
            }
            "vii_sign" => cfg.vii_sign = value.parse().map_err(|e: Error| config_err(key, e.to_string()))?,
            "delta" => cfg.delta = number(key, value)?,
            "s_min" => cfg.s_min = number(key, value)?,
            "s_max" => cfg.s_max = number(key, value)?,
            "fixed_point_tol" => cfg.fixed_point_tol = positive(key, value)?,
            "pde_half_width" => cfg.pde_half_width = positive(key, value)?,
            "pde_points" => cfg.pde_points = count(key, value)?,
            "dt" => cfg.dt = positive(key, value)?,
            "kappa_eq" => cfg.kappa_eq = number(key, value)?,
            "monitor_tol" => cfg.monitor_tol = positive(key, value)?,
            "slope_bound" => cfg.slope_bound = number(key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            _ => unreachable!("key list and match are out of sync"),
        }
    }
    if let KappaSource::Explicit(k) = cfg.kappa_source {
        if !(k.abs() < 1.0) {
            return Err(config_err("kappa", "|kappa| must be below 1"));
        }
    }
    if !(cfg.delta > 1.0 / 27.0 && cfg.delta < 1.0 / 12.0) {
        return Err(config_err("delta", "must lie in (1/27, 1/12)"));
    }
    if !(cfg.s_min < 0.0 && cfg.s_max > 0.0) {
        return Err(config_err("s_min", "need s_min < 0 < s_max"));
    }
    Ok(cfg)
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| config_err(key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(config_err(key, "must be finite"));
    }
    Ok(v)
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let v = number(key, value)?;
    if v <= 0.0 {
        return Err(config_err(key, "must be positive"));
    }
    Ok(v)
}

fn count(key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| config_err(key, format!("`{value}` is not a nonnegative integer")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(config_err(key, "expected true or false")),
    }
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|s| number(key, s.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config_str(text, Path::new("."))
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse("datum = zero\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn rejections_name_the_key() {
        assert_eq!(key_of(parse("t_list = 64, -1").unwrap_err()), "t_list");
        assert_eq!(key_of(parse("t_list = 64, 32").unwrap_err()), "t_list");
        assert_eq!(key_of(parse("kappa_source = explicit").unwrap_err()), "kappa");
        assert_eq!(key_of(parse("colour = blue").unwrap_err()), "colour");
        assert_eq!(key_of(parse("dt = 0.1\ndt = 0.2").unwrap_err()), "dt");
        assert_eq!(key_of(parse("dt = -1").unwrap_err()), "dt");
        assert_eq!(key_of(parse("x_window = 3, 1").unwrap_err()), "x_window");
    }

    #[test]
    fn full_config() {
        let cfg = parse(
            "# radiation run\n\
             datum = gaussian(0.3, 2)\n\
             region = both   # both zones\n\
             kappa_source = explicit\n\
             kappa = -0.25\n\
             vii_sign = eq475\n\
             eigenvalues = 0.5, 0.8660254, -0.8660254, 0.5; 0.1, 1.2, 0, 1\n\
             t_list = 10, 20\n",
        )
        .unwrap();
        assert_eq!(cfg.datum, DatumSpec::Gaussian { amplitude: 0.3, width: 2.0 });
        assert_eq!(cfg.regions, vec![Region::PI, Region::PII]);
        assert_eq!(cfg.kappa_source, KappaSource::Explicit(-0.25));
        assert_eq!(cfg.vii_sign, ViiSign::Eq475);
        assert_eq!(cfg.eigenvalues.len(), 2);
        assert_eq!(cfg.t_list, vec![10.0, 20.0]);
    }
}
