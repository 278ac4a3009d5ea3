//! Local Lagrange interpolation on uniform grids.

use num_complex::Complex64;

/// Barycentric-free Lagrange weights (value and first derivative) for the
/// stencil offsets `0..order` evaluated at fractional position `tau`
/// measured in grid steps from the first stencil node.
fn weights(order: usize, tau: f64, w: &mut [f64], dw: &mut [f64]) {
    for k in 0..order {
        let mut num = 1.0;
        let mut den = 1.0;
        let mut dnum = 0.0;
        for l in 0..order {
            if l == k {
                continue;
            }
            let diff = tau - l as f64;
            // product rule for the derivative of Π (τ − l)
            dnum = dnum * diff + num;
            num *= diff;
            den *= k as f64 - l as f64;
        }
        w[k] = num / den;
        dw[k] = dnum / den;
    }
}

/// Interpolates samples `f(i)` (i = 0..len) given at u = u0 + i·du.
/// Returns the value and d/du. The stencil is clamped to the data, and
/// `wrap` makes the index periodic instead.
pub struct UniformStencil {
    pub u0: f64,
    pub du: f64,
    pub len: usize,
    pub order: usize,
    pub wrap: bool,
}

impl UniformStencil {
    fn locate(&self, u: f64) -> (isize, f64) {
        let pos = (u - self.u0) / self.du;
        let half = (self.order as isize - 1) / 2;
        let mut start = pos.floor() as isize - half;
        if !self.wrap {
            start = start.clamp(0, self.len as isize - self.order as isize);
        }
        (start, pos - start as f64)
    }

    fn index(&self, i: isize) -> usize {
        if self.wrap {
            i.rem_euclid(self.len as isize) as usize
        } else {
            i as usize
        }
    }

    pub fn eval_real(&self, f: &[f64], u: f64) -> (f64, f64) {
        let (start, tau) = self.locate(u);
        let mut w = [0.0; 12];
        let mut dw = [0.0; 12];
        weights(self.order, tau, &mut w, &mut dw);
        let (mut v, mut d) = (0.0, 0.0);
        for k in 0..self.order {
            let y = f[self.index(start + k as isize)];
            v += w[k] * y;
            d += dw[k] * y;
        }
        (v, d / self.du)
    }

    pub fn eval_complex(&self, f: &[Complex64], u: f64) -> (Complex64, Complex64) {
        let (start, tau) = self.locate(u);
        let mut w = [0.0; 12];
        let mut dw = [0.0; 12];
        weights(self.order, tau, &mut w, &mut dw);
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for k in 0..self.order {
            let y = f[self.index(start + k as isize)];
            v += y * w[k];
            d += y * dw[k];
        }
        (v, d / self.du)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials_of_stencil_degree() {
        let st = UniformStencil { u0: -1.0, du: 0.1, len: 30, order: 6, wrap: false };
        let p = |u: f64| 1.0 - 2.0 * u + 0.5 * u.powi(3) - 0.1 * u.powi(5);
        let dp = |u: f64| -2.0 + 1.5 * u * u - 0.5 * u.powi(4);
        let f: Vec<f64> = (0..30).map(|i| p(-1.0 + 0.1 * i as f64)).collect();
        for u in [-0.97, 0.0, 0.333, 1.85] {
            let (v, d) = st.eval_real(&f, u);
            assert!((v - p(u)).abs() < 1e-12);
            assert!((d - dp(u)).abs() < 1e-10);
        }
    }
}
