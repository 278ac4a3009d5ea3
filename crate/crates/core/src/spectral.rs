//! Periodic Fourier differentiation on the grid x_j = −L + 2L j/N.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub struct PeriodicGrid {
    pub half_width: f64,
    pub n: usize,
    /// Angular wavenumbers in FFT order.
    pub k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Clone for PeriodicGrid {
    fn clone(&self) -> Self {
        PeriodicGrid::new(self.half_width, self.n)
    }
}

impl std::fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicGrid").field("half_width", &self.half_width).field("n", &self.n).finish()
    }
}

impl PeriodicGrid {
    pub fn new(half_width: f64, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let dk = PI / half_width;
        let k = (0..n)
            .map(|j| {
                let j = j as i64;
                let n = n as i64;
                let m = if j <= n / 2 { j } else { j - n };
                // the Nyquist mode has no well-defined derivative
                if 2 * j == n { 0.0 } else { m as f64 * dk }
            })
            .collect();
        PeriodicGrid { half_width, n, k, forward, inverse }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| -self.half_width + j as f64 * h).collect()
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.k.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        spectrum.iter().map(|c| c.re * scale).collect()
    }

    /// Applies the Fourier multiplier `symbol(k)` to real samples.
    pub fn apply<S>(&self, samples: &[f64], symbol: S) -> Vec<f64>
    where
        S: Fn(f64) -> Complex64,
    {
        let mut spec = self.forward(samples);
        for (c, &k) in spec.iter_mut().zip(&self.k) {
            *c *= symbol(k);
        }
        self.inverse_real(spec)
    }

    pub fn derivative(&self, samples: &[f64]) -> Vec<f64> {
        self.apply(samples, |k| Complex64::new(0.0, k))
    }

    /// Trigonometric interpolant at an arbitrary x, from the FFT of the samples.
    pub fn interpolate_spectrum(&self, spectrum: &[Complex64], x: f64) -> f64 {
        let n = self.n;
        let shift = (x + self.half_width) * PI / self.half_width;
        let mut acc = 0.0;
        for (j, c) in spectrum.iter().enumerate() {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            let phase = m * shift;
            acc += if 2 * j == n { c.re * phase.cos() } else { (c * Complex64::from_polar(1.0, phase)).re };
        }
        acc / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_single_mode() {
        let g = PeriodicGrid::new(10.0, 64);
        let w = 3.0 * PI / 10.0;
        let f: Vec<f64> = g.nodes().iter().map(|x| (w * x).sin()).collect();
        let df = g.derivative(&f);
        for (x, d) in g.nodes().iter().zip(&df) {
            assert!((d - w * (w * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_reproduces_modes() {
        let g = PeriodicGrid::new(5.0, 32);
        let w = 4.0 * PI / 5.0;
        let f: Vec<f64> = g.nodes().iter().map(|x| (w * x).cos() + 0.5 * (2.0 * w * x).sin()).collect();
        let spec = g.forward(&f);
        for x in [-4.9, -0.37, 1.0, 3.3] {
            let want = (w * x).cos() + 0.5 * (2.0 * w * x).sin();
            assert!((g.interpolate_spectrum(&spec, x) - want).abs() < 1e-12);
        }
    }
}
