//! The κ-family of Painlevé II solutions v'' = s v + 2v³ with v ~ κ Ai(s)
//! as s → +∞, together with the tail integral ∫ₛ^∞ v².

use crate::airy::airy_ai;
use crate::error::{Error, Result};
use crate::ode::{integrate_nodes, Tolerance};
use std::fmt::Write as _;

pub const DEFAULT_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct PainleveSolution {
    pub kappa: f64,
    /// Decreasing grid, `s_grid[0] = s_max`.
    pub s_grid: Vec<f64>,
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub tail: Vec<f64>,
    /// False when the integration stopped before `s_min`.
    pub complete: bool,
}

/// ∫ₛ^∞ Ai² = Ai'(s)² − s Ai(s)².
pub fn airy_square_tail(s: f64) -> Result<f64> {
    let (ai, aip) = airy_ai(s)?;
    Ok(aip * aip - s * ai * ai)
}

pub fn solve_pii(kappa: f64, s_min: f64, s_max: f64) -> Result<PainleveSolution> {
    solve_pii_with_step(kappa, s_min, s_max, DEFAULT_STEP)
}

pub fn solve_pii_with_step(kappa: f64, s_min: f64, s_max: f64, step: f64) -> Result<PainleveSolution> {
    if !kappa.is_finite() || kappa.abs() >= 1.0 {
        return Err(Error::InvalidInput(format!("|kappa| must be < 1, got {kappa}")));
    }
    if s_max < 6.0 || s_min < -8.0 || s_min >= s_max {
        return Err(Error::InvalidInput(format!(
            "need s_max >= 6, s_min >= -8 and s_min < s_max (got [{s_min}, {s_max}])"
        )));
    }
    if step <= 0.0 {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let n = ((s_max - s_min) / step).round() as usize;
    let h = (s_max - s_min) / n as f64;
    let s_grid: Vec<f64> = (0..=n).map(|i| s_max - i as f64 * h).collect();

    if kappa == 0.0 {
        let z = vec![0.0; s_grid.len()];
        return Ok(PainleveSolution { kappa, v: z.clone(), v_prime: z.clone(), tail: z, s_grid, complete: true });
    }

    let (ai, aip) = airy_ai(s_max)?;
    let y0 = [kappa * ai, kappa * aip, kappa * kappa * airy_square_tail(s_max)?];
    let rhs = |s: f64, y: &[f64; 3]| [y[1], s * y[0] + 2.0 * y[0].powi(3), -y[0] * y[0]];
    let tol = Tolerance::new(1e-11, 1e-15);

    // Integrate node by node so that a blow-up still yields the reached prefix.
    let mut v = Vec::with_capacity(s_grid.len());
    let mut vp = Vec::with_capacity(s_grid.len());
    let mut tail = Vec::with_capacity(s_grid.len());
    let mut stepper = crate::ode::Stepper::<3>::new(tol);
    let mut y = y0;
    let mut complete = true;
    v.push(y[0]);
    vp.push(y[1]);
    tail.push(y[2]);
    for w in s_grid.windows(2) {
        match stepper.advance(&rhs, w[0], y, w[1]) {
            Ok(next) if next.iter().all(|c| c.is_finite() && c.abs() < 1e8) => {
                y = next;
                v.push(y[0]);
                vp.push(y[1]);
                tail.push(y[2]);
            }
            _ => {
                complete = false;
                break;
            }
        }
    }
    let reached = v.len();
    let mut s_grid = s_grid;
    s_grid.truncate(reached);
    Ok(PainleveSolution { kappa, s_grid, v, v_prime: vp, tail, complete })
}

impl PainleveSolution {
    pub fn s_max(&self) -> f64 {
        self.s_grid[0]
    }

    pub fn s_min(&self) -> f64 {
        *self.s_grid.last().unwrap()
    }

    fn locate(&self, s: f64) -> Result<(usize, f64, f64)> {
        let (hi, lo) = (self.s_max(), self.s_min());
        if !(s >= lo - 1e-12 && s <= hi + 1e-12) {
            return Err(Error::OutOfRange(format!("s = {s} outside Painlevé grid [{lo}, {hi}]")));
        }
        let n = self.s_grid.len();
        if n < 2 {
            return Ok((0, 0.0, 0.0));
        }
        let h = self.s_grid[0] - self.s_grid[1];
        let idx = (((hi - s) / h).floor() as usize).min(n - 2);
        // local coordinate in [0, 1] going from node idx (larger s) to idx+1
        let tau = (self.s_grid[idx] - s) / h;
        Ok((idx, tau, h))
    }

    /// v(s) and v'(s) by cubic Hermite interpolation.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let (i, tau, h) = self.locate(s)?;
        if self.s_grid.len() < 2 {
            return Ok((self.v[0], self.v_prime[0]));
        }
        // parametrize by σ = s_i − s, so d/dσ = −d/ds
        let (y0, y1) = (self.v[i], self.v[i + 1]);
        let (d0, d1) = (-self.v_prime[i] * h, -self.v_prime[i + 1] * h);
        let val = hermite(y0, y1, d0, d1, tau);
        // interpolate v' with its own derivative v'' = s v + 2v³
        let (a0, a1) = (
            -(self.s_grid[i] * y0 + 2.0 * y0.powi(3)) * h,
            -(self.s_grid[i + 1] * y1 + 2.0 * y1.powi(3)) * h,
        );
        let vp = hermite(self.v_prime[i], self.v_prime[i + 1], a0, a1, tau);
        Ok((val, vp))
    }

    /// ∫ₛ^∞ v² by Hermite interpolation with derivative −v².
    pub fn tail_at(&self, s: f64) -> Result<f64> {
        let (i, tau, h) = self.locate(s)?;
        if self.s_grid.len() < 2 {
            return Ok(self.tail[0]);
        }
        let (d0, d1) = (self.v[i].powi(2) * h, self.v[i + 1].powi(2) * h);
        Ok(hermite(self.tail[i], self.tail[i + 1], d0, d1, tau))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,v,v_prime,tail\n");
        for i in 0..self.s_grid.len() {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                self.s_grid[i], self.v[i], self.v_prime[i], self.tail[i]
            );
        }
        out
    }
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
}

pub fn tail_integral(sol: &PainleveSolution, s: f64) -> Result<f64> {
    sol.tail_at(s)
}

/// Max over interior nodes of |v'' − s v − 2v³|, where v'' is a sixth-order
/// central difference of the sampled v'.
pub fn pii_residual(sol: &PainleveSolution) -> f64 {
    pii_residual_on(sol, f64::NEG_INFINITY, f64::INFINITY)
}

pub fn pii_residual_on(sol: &PainleveSolution, s_lo: f64, s_hi: f64) -> f64 {
    let n = sol.s_grid.len();
    if n < 7 {
        return 0.0;
    }
    let h = sol.s_grid[1] - sol.s_grid[0];
    let w = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];
    let mut worst: f64 = 0.0;
    for i in 3..n - 3 {
        let s = sol.s_grid[i];
        if s < s_lo || s > s_hi {
            continue;
        }
        let vpp: f64 = (0..7).map(|j| w[j] * sol.v_prime[i + j - 3]).sum::<f64>() / (60.0 * h);
        let v = sol.v[i];
        worst = worst.max((vpp - s * v - 2.0 * v.powi(3)).abs());
    }
    worst
}

/// Integrates only to produce v at one point; convenience for callers that do
/// not need the table.
pub fn v_at(kappa: f64, s: f64, s_max: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let (ai, aip) = airy_ai(s_max)?;
    let rhs = |s: f64, y: &[f64; 2]| [y[1], s * y[0] + 2.0 * y[0].powi(3)];
    let ys = integrate_nodes(rhs, &[s_max, s], [kappa * ai, kappa * aip], Tolerance::new(1e-13, 1e-18))?;
    Ok(ys[1][0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kappa_is_trivial() {
        let sol = solve_pii(0.0, -4.0, 8.0).unwrap();
        assert!(sol.v.iter().chain(&sol.tail).all(|&x| x == 0.0));
    }

    #[test]
    fn linear_regime_matches_airy() {
        let sol = solve_pii(0.1, -4.0, 8.0).unwrap();
        let (v, _) = sol.eval(5.0).unwrap();
        let (ai, _) = airy_ai(5.0).unwrap();
        assert!((v - 0.1 * ai).abs() < 1e-8);
    }

    #[test]
    fn residual_small() {
        let sol = solve_pii(0.5, -4.0, 8.0).unwrap();
        assert!(pii_residual(&sol) < 1e-8, "{}", pii_residual(&sol));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(solve_pii(1.0, -4.0, 8.0).is_err());
        assert!(solve_pii(0.5, -9.0, 8.0).is_err());
        assert!(solve_pii(0.5, -4.0, 5.0).is_err());
    }

    #[test]
    fn interpolation_hits_nodes() {
        let sol = solve_pii(0.7, -6.0, 8.0).unwrap();
        let i = 400;
        let (v, vp) = sol.eval(sol.s_grid[i]).unwrap();
        assert!((v - sol.v[i]).abs() < 1e-14);
        assert!((vp - sol.v_prime[i]).abs() < 1e-12);
        let independent = v_at(0.7, -1.234, 8.0).unwrap();
        let got = sol.eval(-1.234).unwrap().0;
        assert!((got - independent).abs() < 1e-9, "{got} vs {independent}");
    }
}
