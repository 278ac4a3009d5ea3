//! Adaptive Dormand–Prince 5(4) stepping for small fixed-size real systems.
//!
//! Complex systems are integrated by packing real and imaginary parts into
//! the state array.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerance { rtol, atol, max_steps: 2_000_000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-10, 1e-13)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Carries the accepted step size between successive calls so that
/// node-by-node output does not restart the controller.
pub struct Stepper<const N: usize> {
    pub tol: Tolerance,
    h: f64,
    pub steps: usize,
}

impl<const N: usize> Stepper<N> {
    pub fn new(tol: Tolerance) -> Self {
        Stepper { tol, h: 0.0, steps: 0 }
    }

    fn initial_step<F>(&self, f: &F, t: f64, y: &[f64; N], k1: &[f64; N], dir: f64) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let sc = |i: usize| self.tol.atol + self.tol.rtol * y[i].abs();
        let d0 = (0..N).map(|i| (y[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
        let d1 = (0..N).map(|i| (k1[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(y, dir * h0, &[(1.0, k1)]);
        let k2 = f(t + dir * h0, &y1);
        let d2 = (0..N).map(|i| ((k2[i] - k1[i]) / sc(i)).powi(2)).sum::<f64>().sqrt()
            / (N as f64).sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Advances `y` from `t0` to exactly `t1`.
    pub fn advance<F>(&mut self, f: &F, t0: f64, y: [f64; N], t1: f64) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        if t1 == t0 {
            return Ok(y);
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut t = t0;
        let mut y = y;
        let mut k1 = f(t, &y);
        if self.h <= 0.0 {
            self.h = self.initial_step(f, t, &y, &k1, dir);
        }
        let mut h = self.h.min(span);
        let mut last_rejected = false;
        loop {
            if self.steps >= self.tol.max_steps {
                return Err(Error::Integration { at: t, reason: "step budget exhausted".into() });
            }
            let remaining = (t1 - t).abs();
            let mut finishing = false;
            if h >= remaining {
                h = remaining;
                finishing = true;
            }
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Integration { at: t, reason: "step size underflow".into() });
            }
            let hs = dir * h;
            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + hs,
                &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let ynew = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(t + hs, &ynew);
            let mut err = 0.0;
            for i in 0..N {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration { at: t, reason: "non-finite error estimate".into() });
            }
            self.steps += 1;
            if err <= 1.0 {
                t = if finishing { t1 } else { t + hs };
                y = ynew;
                k1 = k7;
                let mut fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
                if last_rejected {
                    fac = fac.min(1.0);
                }
                let hnext = h * fac.clamp(0.2, 5.0);
                if !finishing || hnext < self.h {
                    self.h = hnext;
                }
                if finishing {
                    return Ok(y);
                }
                h = hnext;
                last_rejected = false;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                last_rejected = true;
            }
        }
    }
}

/// One-shot integration from `t0` to `t1`.
pub fn integrate<F, const N: usize>(f: F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    Stepper::new(tol).advance(&f, t0, y0, t1)
}

/// Integrates through the ordered `nodes` (the first node is the start) and
/// returns the state at every node.
pub fn integrate_nodes<F, const N: usize>(f: F, nodes: &[f64], y0: [f64; N], tol: Tolerance) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(nodes.len());
    if nodes.is_empty() {
        return Ok(out);
    }
    let mut stepper = Stepper::new(tol);
    let mut y = y0;
    out.push(y);
    for w in nodes.windows(2) {
        y = stepper.advance(&f, w[0], y, w[1])?;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_returns_after_full_period() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = integrate(f, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, Tolerance::new(1e-12, 1e-14)).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let y = integrate(f, 1.0, [1.0], 0.0, Tolerance::new(1e-12, 1e-14)).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn node_output_hits_each_node() {
        let f = |t: f64, _y: &[f64; 1]| [2.0 * t];
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let ys = integrate_nodes(f, &nodes, [0.0], Tolerance::default()).unwrap();
        for (t, y) in nodes.iter().zip(&ys) {
            assert!((y[0] - t * t).abs() < 1e-10);
        }
    }
}
