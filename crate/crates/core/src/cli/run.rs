use super::config::{ExperimentConfig, KappaSource};
use crate::asymptotics::{evaluate_in_region, evaluate_solution, expansions_to_csv, AsymptoticExpansion, AsymptoticOptions, AsymptoticProblem, Region, MERGE_POINTS};
use crate::error::{Error, Result};
use crate::matrix::I;
use crate::painleve::{pii_residual_on, solve_pii};
use crate::pde::{evolve_with, EvolveLog, EvolveOptions, PdeState};
use crate::scattering::{
    a_continued, build_initial_datum, locate_discrete_spectrum, reflection_grid, symmetry_audit, InitialDatum, JostOptions, LocatorOptions,
    ScatteringData, SearchBox, SpectralGrid,
};
use crate::ode::Tolerance;
use crate::soliton::{close_orbits, profile_on_x, spectrum_to_csv, EigenRecord, ModifiedDiscreteData};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scatter,
    Soliton,
    Painleve,
    Asymptotic,
    Direct,
    Compare,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "scatter" => Mode::Scatter,
            "soliton" => Mode::Soliton,
            "painleve" => Mode::Painleve,
            "asymptotic" => Mode::Asymptotic,
            "direct" => Mode::Direct,
            "compare" => Mode::Compare,
            _ => return Err(Error::InvalidInput(format!("unknown mode `{s}`"))),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Mode::Scatter => "scatter",
            Mode::Soliton => "soliton",
            Mode::Painleve => "painleve",
            Mode::Asymptotic => "asymptotic",
            Mode::Direct => "direct",
            Mode::Compare => "compare",
        };
        f.write_str(name)
    }
}

/// One checked quantity in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    /// Upper bound the value is compared against.
    pub bound: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Verdict { name: name.into(), value, bound, pass: value <= bound }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    /// File name and contents, written in order.
    pub files: Vec<(String, String)>,
    pub verdicts: Vec<Verdict>,
    /// Extra mode-specific fields for the summary.
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    fn detail<T: Serialize>(&mut self, key: &str, value: T) {
        self.details.insert(key.into(), serde_json::to_value(value).expect("summary values serialize"));
    }
}

/// Writes every report file and `summary.json` into `dir`; returns the paths.
pub fn emit_report(report: &Report, mode: Mode, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for (name, contents) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        paths.push(path);
    }
    let summary = serde_json::json!({
        "mode": mode,
        "pass": report.passed(),
        "criteria": report.verdicts,
        "files": report.files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        "details": report.details,
    });
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    paths.push(path);
    Ok(paths)
}

pub fn run_experiment(cfg: &ExperimentConfig, mode: Mode) -> Result<Report> {
    match mode {
        Mode::Scatter => run_scatter(cfg),
        Mode::Soliton => run_soliton(cfg),
        Mode::Painleve => run_painleve(cfg),
        Mode::Asymptotic => run_asymptotic(cfg),
        Mode::Direct => run_direct(cfg),
        Mode::Compare => run_compare(cfg).map(|c| c.report),
    }
}

fn jost_options(cfg: &ExperimentConfig) -> JostOptions {
    JostOptions { tol: Tolerance::new(cfg.jost_rtol, cfg.jost_rtol * 1e-2), ..JostOptions::default() }
}

pub fn scattering_datum(cfg: &ExperimentConfig) -> Result<InitialDatum> {
    build_initial_datum(&cfg.datum, cfg.datum_half_width, cfg.datum_points)
}

pub fn scattering_data(cfg: &ExperimentConfig, datum: &InitialDatum) -> Result<ScatteringData> {
    let grid = SpectralGrid::new(cfg.z_max, cfg.grid_per_side)?;
    Ok(reflection_grid(datum, grid, &jost_options(cfg)))
}

pub fn eigen_records(cfg: &ExperimentConfig) -> Result<Vec<EigenRecord>> {
    if cfg.close_orbits {
        close_orbits(&cfg.eigenvalues)
    } else {
        Ok(cfg.eigenvalues.clone())
    }
}

pub fn asymptotic_problem(cfg: &ExperimentConfig, data: ScatteringData) -> Result<AsymptoticProblem> {
    let options = AsymptoticOptions {
        c_cap: cfg.c_cap,
        delta: cfg.delta,
        vii_sign: cfg.vii_sign,
        s_min: cfg.s_min,
        s_max: cfg.s_max,
        fixed_point_tol: cfg.fixed_point_tol,
        ..AsymptoticOptions::default()
    };
    AsymptoticProblem::new(data, eigen_records(cfg)?, options)
}

/// Evenly spaced x-samples of the transition zone of `region` at time t,
/// |x − centre·t| ≤ c_cap·t^{1/3}, pulled in by one part in 10¹² at the ends.
pub fn zone_points(region: Region, t: f64, c_cap: f64, samples: usize) -> Vec<f64> {
    let half = c_cap * t.cbrt() * (1.0 - 1e-12);
    let mid = region.center() * t;
    (0..samples).map(|j| mid - half + 2.0 * half * j as f64 / (samples - 1) as f64).collect()
}

fn window_points(cfg: &ExperimentConfig, lo: f64, hi: f64) -> Vec<f64> {
    (0..cfg.x_samples).map(|j| lo + (hi - lo) * j as f64 / (cfg.x_samples - 1) as f64).collect()
}

fn run_scatter(cfg: &ExperimentConfig) -> Result<Report> {
    let datum = scattering_datum(cfg)?;
    let data = scattering_data(cfg, &datum)?;
    let audit = symmetry_audit(&data);
    let jost = jost_options(cfg);
    let a_at_i = a_continued(&datum, I, &jost)?;
    let mass = datum.mass_defect();

    let mut rep = Report::default();
    rep.files.push(("datum.csv".into(), datum.to_csv()));
    rep.files.push(("scattering.csv".into(), data.to_csv()));
    rep.verdicts.push(Verdict::at_most("unitarity", audit.unitarity, 1e-8));
    rep.verdicts.push(Verdict::at_most("r_symmetries", audit.max_symmetry_defect(), 1e-6));
    // a(i) against exp(−∫(q − 1)/2); the opposite sign is reported alongside
    rep.verdicts.push(Verdict::at_most("a_at_i", (a_at_i - (-0.5 * mass).exp()).norm(), 1e-4));
    rep.detail("datum", cfg.datum.describe());
    rep.detail("audit", audit);
    rep.detail("a_at_i", [a_at_i.re, a_at_i.im]);
    rep.detail("exp_minus_half_mass", (-0.5 * mass).exp());
    rep.detail("exp_plus_half_mass", (0.5 * mass).exp());
    rep.detail("forward_failures", data.failures.iter().map(|(z, e)| format!("{z:.17e}: {e}")).collect::<Vec<_>>());
    rep.detail("near_origin_abs_r", [data.near_origin.0, data.near_origin.1]);

    if let Some([re_min, re_max, im_min, im_max]) = cfg.search_box {
        let search = SearchBox::new(re_min, re_max, im_min, im_max)?;
        let (eigens, unresolved) = locate_discrete_spectrum(&datum, &search, &jost, &LocatorOptions::default())?;
        let mut csv = String::from("Re_zeta,Im_zeta\n");
        for e in &eigens {
            let _ = writeln!(csv, "{:.17e},{:.17e}", e.zeta.re, e.zeta.im);
        }
        rep.files.push(("eigenvalues.csv".into(), csv));
        rep.detail("eigenvalue_count", eigens.len());
        rep.detail("unresolved_boxes", unresolved.iter().map(|b| [b.re_min, b.re_max, b.im_min, b.im_max]).collect::<Vec<_>>());
    }
    Ok(rep)
}

fn run_soliton(cfg: &ExperimentConfig) -> Result<Report> {
    let records = eigen_records(cfg)?;
    let data = ModifiedDiscreteData::new(records.clone())?;
    let (lo, hi) = cfg.x_window.unwrap_or((-cfg.datum_half_width, cfg.datum_half_width));
    let xs = window_points(cfg, lo, hi);
    let mut csv = String::from("x,t,u_p\n");
    for &t in &cfg.t_list {
        let u = profile_on_x(&data, &xs, t, 0.0)?;
        for (x, u) in xs.iter().zip(&u) {
            let _ = writeln!(csv, "{x:.17e},{t:.17e},{u:.17e}");
        }
    }
    let mut rep = Report::default();
    rep.files.push(("spectrum.csv".into(), spectrum_to_csv(&records)));
    rep.files.push(("soliton.csv".into(), csv));
    rep.detail("records", records.len());
    Ok(rep)
}

/// κ per the configured source.
pub fn painleve_kappa(cfg: &ExperimentConfig) -> Result<f64> {
    let from_data = |f: &dyn Fn(&ScatteringData) -> f64| -> Result<f64> {
        let datum = scattering_datum(cfg)?;
        Ok(f(&scattering_data(cfg, &datum)?))
    };
    match cfg.kappa_source {
        KappaSource::Explicit(k) => Ok(k),
        KappaSource::FromRAt1 => from_data(&|d| -d.reflection_at(1.0).re),
        KappaSource::FromRAtMerge => {
            let sign = match cfg.vii_sign {
                crate::asymptotics::ViiSign::Theorem => -1.0,
                crate::asymptotics::ViiSign::Eq475 => 1.0,
            };
            from_data(&|d| sign * d.reflection_at(MERGE_POINTS[0]).norm())
        }
    }
}

fn run_painleve(cfg: &ExperimentConfig) -> Result<Report> {
    let kappa = painleve_kappa(cfg)?;
    let sol = solve_pii(kappa, cfg.s_min, cfg.s_max)?;
    let mut rep = Report::default();
    rep.files.push(("painleve.csv".into(), sol.to_csv()));
    rep.verdicts.push(Verdict::at_most("pii_residual", pii_residual_on(&sol, -4.0, 8.0), 1e-8));
    rep.detail("kappa", kappa);
    rep.detail("kappa_source", cfg.kappa_source);
    rep.detail("complete", sol.complete);
    Ok(rep)
}

fn asymptotic_rows(cfg: &ExperimentConfig, problem: &AsymptoticProblem, t: f64) -> Result<Vec<AsymptoticExpansion>> {
    match cfg.x_window {
        Some((lo, hi)) => {
            let xs = window_points(cfg, lo, hi);
            let rows: Vec<Result<Option<AsymptoticExpansion>>> = xs
                .par_iter()
                .map(|&x| match evaluate_solution(x, t, problem) {
                    Ok(e) => Ok(Some(e)),
                    Err(Error::OutOfRange(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect();
            Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
        }
        None => {
            let mut out = Vec::new();
            for &region in &cfg.regions {
                let xs = zone_points(region, t, cfg.c_cap, cfg.x_samples);
                let rows: Result<Vec<_>> = xs.par_iter().map(|&x| evaluate_in_region(x, t, region, problem).map(|r| r.0)).collect();
                out.extend(rows?);
            }
            Ok(out)
        }
    }
}

fn run_asymptotic(cfg: &ExperimentConfig) -> Result<Report> {
    let datum = scattering_datum(cfg)?;
    let problem = asymptotic_problem(cfg, scattering_data(cfg, &datum)?)?;
    let mut rows = Vec::new();
    for &t in &cfg.t_list {
        rows.extend(asymptotic_rows(cfg, &problem, t)?);
    }
    let mut rep = Report::default();
    rep.files.push(("asymptotic.csv".into(), expansions_to_csv(&rows)));
    rep.detail("rows", rows.len());
    rep.detail("kappa_region_one", problem.region_one.kappa);
    rep.detail("kappa_region_two", problem.region_two.kappa);
    rep.detail("vii_sign", cfg.vii_sign);
    rep.detail("delta", cfg.delta);
    Ok(rep)
}

pub fn initial_pde_state(cfg: &ExperimentConfig) -> Result<PdeState> {
    let datum = build_initial_datum(&cfg.datum, cfg.pde_half_width, cfg.pde_points)?;
    PdeState::from_u(datum.grid.clone(), datum.u0, cfg.kappa_eq)
}

/// Evolves the configured datum through every time of `t_list`.
pub fn direct_states(cfg: &ExperimentConfig) -> Result<(Vec<PdeState>, Vec<EvolveLog>)> {
    let opts = EvolveOptions { monitor_tol: cfg.monitor_tol, record_every: 20 };
    let mut state = initial_pde_state(cfg)?;
    let mut states = Vec::new();
    let mut logs = Vec::new();
    for &t in &cfg.t_list {
        let (next, log) = evolve_with(&state, t, cfg.dt, &opts)?;
        states.push(next.clone());
        logs.push(log);
        state = next;
    }
    Ok((states, logs))
}

fn run_direct(cfg: &ExperimentConfig) -> Result<Report> {
    let (states, logs) = direct_states(cfg)?;
    let mut rep = Report::default();
    for s in &states {
        rep.files.push((format!("direct_t{}.csv", s.t), s.snapshot_csv()));
    }
    let drift = logs.iter().fold(0.0f64, |a, l| a.max(l.max_drift));
    rep.files.push(("direct_log.json".into(), serde_json::to_string_pretty(&logs).expect("log serializes") + "\n"));
    rep.verdicts.push(Verdict::at_most("mass_drift", drift, cfg.monitor_tol));
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub x: f64,
    pub t: f64,
    pub region: Region,
    pub u_direct: f64,
    pub u_asym: f64,
    pub abs_err: f64,
}

/// Decay of the max error over the t-list in one region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub region: Region,
    pub times: Vec<f64>,
    pub max_errors: Vec<f64>,
    /// Least-squares slope of ln(max error) against ln t; absent when every error is 0.
    pub slope: Option<f64>,
    pub monotone: bool,
    pub bound: f64,
    pub pass: bool,
}

pub fn fit_convergence(region: Region, times: &[f64], max_errors: &[f64], bound: f64) -> ConvergenceFit {
    let monotone = max_errors.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    let slope = if max_errors.iter().all(|e| *e == 0.0) {
        None
    } else if max_errors.iter().all(|e| *e > 0.0) && times.len() >= 2 {
        let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        let ly: Vec<f64> = max_errors.iter().map(|e| e.ln()).collect();
        let n = lx.len() as f64;
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        Some(f64::NAN)
    };
    let pass = match slope {
        None => true,
        Some(s) => monotone && s <= bound,
    };
    ConvergenceFit { region, times: times.to_vec(), max_errors: max_errors.to_vec(), slope, monotone, bound, pass }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    pub fits: Vec<ConvergenceFit>,
    pub report: Report,
}

/// PDE oracle against the asymptotic formula over each transition zone.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<CompareOutcome> {
    let datum = scattering_datum(cfg)?;
    let problem = asymptotic_problem(cfg, scattering_data(cfg, &datum)?)?;
    let (states, logs) = direct_states(cfg)?;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &region in &cfg.regions {
        let mut max_errors = Vec::new();
        for state in &states {
            let t = state.t;
            let xs = zone_points(region, t, cfg.c_cap, cfg.x_samples);
            let spectrum = state.grid.forward(&state.u);
            let asym: Result<Vec<_>> = xs.par_iter().map(|&x| evaluate_in_region(x, t, region, &problem).map(|r| r.0.u_value)).collect();
            let mut worst = 0.0f64;
            for (x, ua) in xs.iter().zip(asym?) {
                let ud = state.grid.interpolate_spectrum(&spectrum, *x);
                let err = (ud - ua).abs();
                worst = worst.max(err);
                rows.push(CompareRow { x: *x, t, region, u_direct: ud, u_asym: ua, abs_err: err });
            }
            max_errors.push(worst);
        }
        fits.push(fit_convergence(region, &cfg.t_list, &max_errors, cfg.slope_bound));
    }

    let mut csv = String::from("x,t,region,u_direct,u_asym,abs_err\n");
    for r in &rows {
        let _ = writeln!(csv, "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e}", r.x, r.t, r.region, r.u_direct, r.u_asym, r.abs_err);
    }
    let mut fit_csv = String::from("region,t,max_err\n");
    for f in &fits {
        for (t, e) in f.times.iter().zip(&f.max_errors) {
            let _ = writeln!(fit_csv, "{},{t:.17e},{e:.17e}", f.region);
        }
    }
    let mut report = Report::default();
    report.files.push(("compare.csv".into(), csv));
    report.files.push(("compare_max_error.csv".into(), fit_csv));
    for f in &fits {
        report.verdicts.push(Verdict {
            name: format!("transition_convergence_{}", f.region),
            value: f.slope.unwrap_or(f64::NEG_INFINITY),
            bound: f.bound,
            pass: f.pass,
        });
    }
    let drift = logs.iter().fold(0.0f64, |a, l| a.max(l.max_drift));
    report.detail("fits", &fits);
    report.detail("mass_drift", drift);
    report.detail("vii_sign", cfg.vii_sign);
    report.detail("error_order", -2.0 / 3.0 + 4.0 * cfg.delta);
    Ok(CompareOutcome { rows, fits, report })
}

/// Structured form of an error for the command line.
pub fn error_json(e: &Error) -> serde_json::Value {
    let kind = match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::NonDecayingDatum { .. } => "non_decaying_datum",
        Error::NonFinite(_) => "non_finite",
        Error::Integration { .. } => "integration",
        Error::SpectralPoint { .. } => "spectral_point",
        Error::Singular { .. } => "singular",
        Error::DressingDegeneracy { .. } => "dressing_degeneracy",
        Error::Bracket(_) => "bracket",
        Error::NoConvergence { .. } => "no_convergence",
        Error::OutOfRange(_) => "out_of_range",
        Error::Config { .. } => "config",
        Error::MonitorDrift { .. } => "monitor_drift",
        Error::Io(_) => "io",
    };
    let mut obj = serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } });
    if let Error::Config { key, .. } = e {
        obj["error"]["key"] = serde_json::Value::String(key.clone());
    }
    obj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_config_str;

    fn small(extra: &str) -> ExperimentConfig {
        let text = format!("datum = zero\nt_list = 4, 8\npde_half_width = 40\npde_points = 256\nx_samples = 5\n{extra}");
        parse_config_str(&text, Path::new(".")).unwrap()
    }

    #[test]
    fn zero_kappa_gives_zero_table() {
        let rep = run_experiment(&small(""), Mode::Painleve).unwrap();
        let csv = &rep.files[0].1;
        for line in csv.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(&cols[1..], &[0.0, 0.0, 0.0]);
        }
        assert!(rep.passed());
    }

    #[test]
    fn zero_datum_compare_is_exact() {
        let out = run_compare(&small("region = both")).unwrap();
        assert!(!out.rows.is_empty());
        assert!(out.rows.iter().all(|r| r.abs_err == 0.0));
        assert!(out.fits.iter().all(|f| f.pass && f.slope.is_none()));
    }

    #[test]
    fn empty_report_has_no_criteria() {
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&Report::default(), Mode::Scatter, dir.path()).unwrap();
        assert_eq!(paths.len(), 1);
        let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&paths[0]).unwrap()).unwrap();
        assert_eq!(summary["criteria"].as_array().unwrap().len(), 0);
        assert_eq!(summary["pass"], true);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let cfg = small("eigenvalues = 0.8660254037844387, 0.5, -0.5, 0.8660254037844386\nclose_orbits = true\nx_window = -10, 10");
        let a = run_experiment(&cfg, Mode::Soliton).unwrap();
        let b = run_experiment(&cfg, Mode::Soliton).unwrap();
        assert_eq!(a.files, b.files);
    }

    #[test]
    fn slope_fit() {
        let ts = [64.0, 128.0, 256.0];
        let errs: Vec<f64> = ts.iter().map(|t: &f64| 3.0 * t.powf(-0.5)).collect();
        let fit = fit_convergence(Region::PI, &ts, &errs, -0.4);
        assert!((fit.slope.unwrap() + 0.5).abs() < 1e-12);
        assert!(fit.pass);
        let flat = fit_convergence(Region::PI, &ts, &[1.0, 1.0, 0.9], -0.4);
        assert!(!flat.pass);
    }

    #[test]
    fn config_error_json_names_key() {
        let e = crate::error::config_err("t_list", "bad");
        let v = error_json(&e);
        assert_eq!(v["error"]["kind"], "config");
        assert_eq!(v["error"]["key"], "t_list");
    }
}
