//! Pseudospectral method-of-lines solver for
//! m_t + ((u² − u_x²) m)_x + κ u_x = 0, m = u − u_xx, on a periodic window.

use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::spectral::PeriodicGrid;

/// Fraction of the largest wavenumber kept in the flux.
pub const DEALIAS_FRACTION: f64 = 2.0 / 3.0;
/// Courant factor of the explicit step bound.
pub const CFL_FACTOR: f64 = 0.5;
/// Default drift of ∫m dx that aborts a run.
pub const MONITOR_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PdeState {
    pub grid: PeriodicGrid,
    pub u: Vec<f64>,
    pub m: Vec<f64>,
    pub t: f64,
    pub kappa_eq: f64,
}

pub fn helmholtz_invert(m: &[f64], grid: &PeriodicGrid) -> Vec<f64> {
    grid.apply(m, |k| C64::new(1.0 / (1.0 + k * k), 0.0))
}

pub fn helmholtz_forward(u: &[f64], grid: &PeriodicGrid) -> Vec<f64> {
    grid.apply(u, |k| C64::new(1.0 + k * k, 0.0))
}

impl PdeState {
    pub fn from_u(grid: PeriodicGrid, u: Vec<f64>, kappa_eq: f64) -> Result<Self> {
        check_len(&grid, &u)?;
        let m = helmholtz_forward(&u, &grid);
        PdeState::from_m(grid, m, kappa_eq)
    }

    pub fn from_m(grid: PeriodicGrid, m: Vec<f64>, kappa_eq: f64) -> Result<Self> {
        check_len(&grid, &m)?;
        if !kappa_eq.is_finite() {
            return Err(Error::InvalidInput("kappa_eq must be finite".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial m".into()));
        }
        let u = helmholtz_invert(&m, &grid);
        Ok(PdeState { grid, u, m, t: 0.0, kappa_eq })
    }

    /// ∫ m dx by the periodic trapezoid rule.
    pub fn mass(&self) -> f64 {
        self.grid.spacing() * self.m.iter().sum::<f64>()
    }

    pub fn cfl_limit(&self) -> f64 {
        let ux = self.grid.derivative(&self.u);
        let flux = self.u.iter().zip(&ux).fold(0.0f64, |a, (u, d)| a.max((u * u - d * d).abs()));
        CFL_FACTOR * self.grid.spacing() / flux.max(1.0)
    }

    pub fn snapshot_csv(&self) -> String {
        let mut out = String::from("x,u,m\n");
        for ((x, u), m) in self.grid.nodes().iter().zip(&self.u).zip(&self.m) {
            out.push_str(&format!("{x:.17e},{u:.17e},{m:.17e}\n"));
        }
        out
    }
}

fn check_len(grid: &PeriodicGrid, v: &[f64]) -> Result<()> {
    if v.len() != grid.n {
        return Err(Error::InvalidInput(format!("{} samples for a grid of {}", v.len(), grid.n)));
    }
    Ok(())
}

struct Rhs<'a> {
    grid: &'a PeriodicGrid,
    kappa: f64,
    keep: Vec<bool>,
}

impl<'a> Rhs<'a> {
    fn new(grid: &'a PeriodicGrid, kappa: f64) -> Self {
        let cut = DEALIAS_FRACTION * grid.max_wavenumber();
        Rhs { grid, kappa, keep: grid.k.iter().map(|k| k.abs() <= cut).collect() }
    }

    /// dm/dt and max|u² − u_x²| for the given m.
    fn eval(&self, m: &[f64]) -> Result<(Vec<f64>, f64)> {
        let g = self.grid;
        let m_hat = g.forward(m);
        let u_hat: Vec<C64> = m_hat.iter().zip(&g.k).map(|(v, k)| v / (1.0 + k * k)).collect();
        let ux_hat: Vec<C64> = u_hat.iter().zip(&g.k).map(|(v, k)| v * C64::new(0.0, *k)).collect();
        let u = g.inverse_real(u_hat);
        let ux = g.inverse_real(ux_hat.clone());
        let mut flux_max = 0.0f64;
        let flux: Vec<f64> = (0..g.n)
            .map(|j| {
                let w = u[j] * u[j] - ux[j] * ux[j];
                flux_max = flux_max.max(w.abs());
                w * m[j]
            })
            .collect();
        if flux.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("flux (u^2 - u_x^2) m".into()));
        }
        let flux_hat = g.forward(&flux);
        let out_hat: Vec<C64> = flux_hat
            .iter()
            .zip(&ux_hat)
            .zip(g.k.iter().zip(&self.keep))
            .map(|((f, d), (k, keep))| {
                let f = if *keep { *f } else { C64::new(0.0, 0.0) };
                -(f * C64::new(0.0, *k)) - d * self.kappa
            })
            .collect();
        Ok((g.inverse_real(out_hat), flux_max))
    }
}

/// −∂ₓ[(u² − u_x²)m] − κu_x with spectral derivatives and a dealiased flux.
pub fn rhs_eval(state: &PdeState) -> Result<Vec<f64>> {
    Ok(Rhs::new(&state.grid, state.kappa_eq).eval(&state.m)?.0)
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct EvolveLog {
    pub steps: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    /// ∫m dx after each step, starting with the initial value.
    pub mass: Vec<f64>,
    pub max_drift: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub monitor_tol: f64,
    /// Record the monitor every this many steps.
    pub record_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { monitor_tol: MONITOR_TOL, record_every: 1 }
    }
}

/// Classical RK4 from the current time to `t_final` with steps no larger than `dt`.
pub fn evolve(state: &PdeState, t_final: f64, dt: f64) -> Result<(PdeState, EvolveLog)> {
    evolve_with(state, t_final, dt, &EvolveOptions::default())
}

pub fn evolve_with(state: &PdeState, t_final: f64, dt: f64, opts: &EvolveOptions) -> Result<(PdeState, EvolveLog)> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= state.t) {
        return Err(Error::InvalidInput(format!("need dt > 0 and t_final >= t, got dt = {dt}, t_final = {t_final}")));
    }
    let span = t_final - state.t;
    let steps = (span / dt).ceil().max(if span > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if steps > 0 { span / steps as f64 } else { 0.0 };
    let rhs = Rhs::new(&state.grid, state.kappa_eq);
    let dx = state.grid.spacing();
    let mass0 = state.mass();
    let mut log = EvolveLog { steps, dt: h, times: vec![state.t], mass: vec![mass0], max_drift: 0.0 };
    let mut m = state.m.clone();
    let n = m.len();
    let mut stage = vec![0.0; n];
    for step in 0..steps {
        let t = state.t + step as f64 * h;
        let (k1, flux_max) = rhs.eval(&m)?;
        let limit = CFL_FACTOR * dx / flux_max.max(1.0);
        if h > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("dt = {h} exceeds the step bound {limit} at t = {t}")));
        }
        for j in 0..n {
            stage[j] = m[j] + 0.5 * h * k1[j];
        }
        let (k2, _) = rhs.eval(&stage)?;
        for j in 0..n {
            stage[j] = m[j] + 0.5 * h * k2[j];
        }
        let (k3, _) = rhs.eval(&stage)?;
        for j in 0..n {
            stage[j] = m[j] + h * k3[j];
        }
        let (k4, _) = rhs.eval(&stage)?;
        for j in 0..n {
            m[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state after step {} (t = {})", step + 1, t + h)));
        }
        let mass = dx * m.iter().sum::<f64>();
        let drift = (mass - mass0).abs();
        log.max_drift = log.max_drift.max(drift);
        if drift > opts.monitor_tol {
            return Err(Error::MonitorDrift { t: t + h, drift });
        }
        if (step + 1) % opts.record_every.max(1) == 0 || step + 1 == steps {
            log.times.push(t + h);
            log.mass.push(mass);
        }
    }
    let u = helmholtz_invert(&m, &state.grid);
    Ok((PdeState { grid: state.grid.clone(), u, m, t: t_final, kappa_eq: state.kappa_eq }, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian_state(l: f64, n: usize) -> PdeState {
        let g = PeriodicGrid::new(l, n);
        let u = g.nodes().iter().map(|x| 0.3 * (-(x / 2.0) * (x / 2.0)).exp()).collect();
        PdeState::from_u(g, u, 2.0).unwrap()
    }

    #[test]
    fn zero_state_is_stationary() {
        let g = PeriodicGrid::new(20.0, 256);
        let s = PdeState::from_u(g, vec![0.0; 256], 2.0).unwrap();
        assert!(rhs_eval(&s).unwrap().iter().all(|v| *v == 0.0));
        let (out, _) = evolve(&s, 1.0, 0.05).unwrap();
        assert!(out.u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_mode_helmholtz() {
        let l = 10.0;
        let g = PeriodicGrid::new(l, 128);
        let w = 3.0 * PI / l;
        let m: Vec<f64> = g.nodes().iter().map(|x| (w * x).cos()).collect();
        let u = helmholtz_invert(&m, &g);
        for (a, b) in u.iter().zip(&m) {
            assert!((a - b / (1.0 + w * w)).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_has_zero_mean() {
        let s = gaussian_state(30.0, 512);
        let r = rhs_eval(&s).unwrap();
        assert!(r.iter().sum::<f64>().abs() * s.grid.spacing() < 1e-12);
    }

    #[test]
    fn mass_is_conserved() {
        let s = gaussian_state(40.0, 512);
        let (out, log) = evolve(&s, 10.0, 0.05).unwrap();
        assert!((out.mass() - s.mass()).abs() <= 1e-9);
        assert!(log.max_drift <= 1e-9);
    }

    #[test]
    fn rejects_oversized_step() {
        let s = gaussian_state(40.0, 512);
        assert!(evolve(&s, 1.0, 1.0).is_err());
    }
}
