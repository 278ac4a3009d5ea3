use super::datum::InitialDatum;
use super::jost::{jost_integrate, omega, JostOptions};
use crate::error::{Error, Result};
use crate::interp::UniformStencil;
use crate::matrix::{c, C64, I};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Smallest |a| accepted on the real axis.
pub const A_FLOOR: f64 = 1e-10;
const INTERP_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub z: f64,
    pub a: C64,
    pub b: C64,
    pub r: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEigen {
    pub zeta: C64,
    pub norming: Option<C64>,
}

/// Real spectral grid that is closed under z ↦ 1/z and z ↦ −z:
/// ±exp(u_j) with u_j uniform on [−ln z_max, ln z_max] and u = 0 included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub z_max: f64,
    /// Nodes on each half line (odd).
    pub per_side: usize,
}

impl SpectralGrid {
    pub fn new(z_max: f64, per_side: usize) -> Result<Self> {
        if !(z_max > 1.0 && z_max <= 1e3) {
            return Err(Error::InvalidInput(format!("grid z_max must lie in (1, 1000], got {z_max}")));
        }
        if per_side < 11 || per_side.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("grid needs an odd number >= 11 of nodes per side, got {per_side}")));
        }
        Ok(SpectralGrid { z_max, per_side })
    }

    pub fn log_step(&self) -> f64 {
        2.0 * self.z_max.ln() / (self.per_side - 1) as f64
    }

    pub fn log_nodes(&self) -> Vec<f64> {
        let u0 = -self.z_max.ln();
        let du = self.log_step();
        (0..self.per_side).map(|j| u0 + j as f64 * du).collect()
    }

    /// Ascending list of all 2·per_side abscissae.
    pub fn nodes(&self) -> Vec<f64> {
        let pos: Vec<f64> = self.log_nodes().iter().map(|u| u.exp()).collect();
        pos.iter().rev().map(|z| -z).chain(pos.iter().copied()).collect()
    }

    fn stencil(&self) -> UniformStencil {
        UniformStencil { u0: -self.z_max.ln(), du: self.log_step(), len: self.per_side, order: INTERP_ORDER, wrap: false }
    }
}

/// Reflection data on a [`SpectralGrid`] plus discrete eigen records.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub grid: SpectralGrid,
    /// Ascending in z, aligned with `grid.nodes()`.
    pub samples: Vec<SpectralSample>,
    pub eigens: Vec<DiscreteEigen>,
    /// Nodes where the forward problem failed (r set to 0 there).
    pub failures: Vec<(f64, String)>,
    /// |r| at the two innermost nodes, recording the r → 0 behaviour at z = 0.
    pub near_origin: (f64, f64),
    pos_r: Vec<C64>,
    neg_r: Vec<C64>,
    pos_g: Vec<f64>,
    neg_g: Vec<f64>,
}

pub fn scattering_pair(datum: &InitialDatum, z: f64, opts: &JostOptions) -> Result<SpectralSample> {
    if !z.is_finite() || z.abs() <= 1e-3 {
        return Err(Error::SpectralPoint { z: format!("{z}"), reason: "|z| must exceed 1e-3".into() });
    }
    let zc = c(z, 0.0);
    let j = jost_integrate(datum, zc, opts)?;
    let (mm, mp) = (&j.minus.0, &j.plus.0);
    // S = Φ₊⁻¹Φ₋ with Φ± = μ± e^{−iωpσ₃}; det μ₊ = 1
    let a = mp[1][1] * mm[0][0] - mp[0][1] * mm[1][0];
    let b = (-I * omega(zc) * (2.0 * j.phase)).exp() * (mp[0][0] * mm[1][0] - mp[1][0] * mm[0][0]);
    if a.norm() < A_FLOOR {
        return Err(Error::SpectralPoint { z: format!("{z}"), reason: format!("|a| = {:e}: spectral singularity candidate", a.norm()) });
    }
    Ok(SpectralSample { z, a, b, r: b / a })
}

pub fn reflection_grid(datum: &InitialDatum, grid: SpectralGrid, opts: &JostOptions) -> ScatteringData {
    let nodes = grid.nodes();
    let results: Vec<Result<SpectralSample>> = nodes.par_iter().map(|&z| scattering_pair(datum, z, opts)).collect();
    let mut samples = Vec::with_capacity(nodes.len());
    let mut failures = Vec::new();
    for (z, res) in nodes.iter().zip(results) {
        match res {
            Ok(s) => samples.push(s),
            Err(e) => {
                failures.push((*z, e.to_string()));
                samples.push(SpectralSample { z: *z, a: c(f64::NAN, f64::NAN), b: c(f64::NAN, f64::NAN), r: c(0.0, 0.0) });
            }
        }
    }
    ScatteringData::from_samples(grid, samples, Vec::new(), failures)
}

impl ScatteringData {
    pub fn from_samples(
        grid: SpectralGrid,
        samples: Vec<SpectralSample>,
        eigens: Vec<DiscreteEigen>,
        failures: Vec<(f64, String)>,
    ) -> Self {
        let p = grid.per_side;
        assert_eq!(samples.len(), 2 * p, "sample count must match the grid");
        let neg_r: Vec<C64> = (0..p).map(|j| samples[p - 1 - j].r).collect();
        let pos_r: Vec<C64> = (0..p).map(|j| samples[p + j].r).collect();
        let g = |r: &C64| r.norm_sqr().ln_1p();
        let pos_g = pos_r.iter().map(g).collect();
        let neg_g = neg_r.iter().map(g).collect();
        let near_origin = (samples[p - 1].r.norm(), samples[p].r.norm());
        ScatteringData { grid, samples, eigens, failures, near_origin, pos_r, neg_r, pos_g, neg_g }
    }

    /// Reflection data given directly as a function of z on the grid.
    pub fn from_reflection<F: Fn(f64) -> C64>(grid: SpectralGrid, r: F) -> Self {
        let samples = grid
            .nodes()
            .iter()
            .map(|&z| {
                let rz = r(z);
                let a = c((1.0 + rz.norm_sqr()).sqrt().recip(), 0.0);
                SpectralSample { z, a, b: rz * a, r: rz }
            })
            .collect();
        Self::from_samples(grid, samples, Vec::new(), Vec::new())
    }

    pub fn reflectionless(grid: SpectralGrid) -> Self {
        Self::from_reflection(grid, |_| c(0.0, 0.0))
    }

    pub fn is_reflectionless(&self) -> bool {
        self.pos_g.iter().chain(&self.neg_g).all(|&g| g == 0.0)
    }

    fn side(&self, z: f64) -> Option<(&[C64], &[f64], f64)> {
        let a = z.abs();
        if z == 0.0 || a < 1.0 / self.grid.z_max || a > self.grid.z_max {
            return None;
        }
        if z > 0.0 {
            Some((&self.pos_r, &self.pos_g, a.ln()))
        } else {
            Some((&self.neg_r, &self.neg_g, a.ln()))
        }
    }

    /// r(z) for real z by interpolation in ln|z|; zero outside the grid.
    pub fn reflection_at(&self, z: f64) -> C64 {
        match self.side(z) {
            Some((r, _, u)) => self.grid.stencil().eval_complex(r, u).0,
            None => c(0.0, 0.0),
        }
    }

    /// log(1 + |r(z)|²) and its derivative with respect to ln|z|.
    fn log_weight(&self, z: f64) -> (f64, f64) {
        match self.side(z) {
            Some((_, g, u)) => self.grid.stencil().eval_real(g, u),
            None => (0.0, 0.0),
        }
    }

    pub fn log_weight_at(&self, z: f64) -> f64 {
        self.log_weight(z).0
    }

    /// ∫ log(1 + |r(s)|²)/(s − z) ds over the grid support for complex z.
    ///
    /// The half line that contains Re z is treated by subtracting g(Re z).
    /// Within a few node spacings of the axis the smooth remainder is taken at
    /// its real-axis limit, which is accurate to O(|Im z|).
    pub fn cauchy_log_integral(&self, z: C64) -> C64 {
        let mut total = c(0.0, 0.0);
        let du = self.grid.log_step();
        let us = self.grid.log_nodes();
        let (lo, hi) = (1.0 / self.grid.z_max, self.grid.z_max);
        for (sign, g) in [(1.0, &self.pos_g), (-1.0, &self.neg_g)] {
            let inside = z.re * sign > lo && z.re * sign < hi;
            let x0 = z.re;
            let (g0, dg0) = if inside { self.log_weight(x0) } else { (0.0, 0.0) };
            let near_axis = inside && z.im.abs() < 5.0 * x0.abs() * du;
            let u0 = x0.abs().ln();
            let mut acc = c(0.0, 0.0);
            for (j, (&u, &gj)) in us.iter().zip(g.iter()).enumerate() {
                let s = sign * u.exp();
                let w = if j == 0 || j + 1 == us.len() { 0.5 * du } else { du };
                let f = if near_axis {
                    if (u - u0).abs() < 1e-6 * du {
                        c(dg0, 0.0)
                    } else {
                        c((gj - g0) / (s - x0) * s.abs(), 0.0)
                    }
                } else {
                    (gj - g0) / (c(s, 0.0) - z) * s.abs()
                };
                acc += f * w;
            }
            // Euler-Maclaurin end correction: the integrand does not vanish at the cut-off
            let zc = if near_axis { c(x0, 0.0) } else { z };
            let slope = |u: f64, gu: f64, dgu: f64| {
                let s = c(sign * u.exp(), 0.0);
                let k = s.norm() / (s - zc);
                dgu * k + (gu - g0) * (-zc * k / (s - zc))
            };
            let last = us.len() - 1;
            let (_, dg_first) = self.log_weight(sign * us[0].exp());
            let (_, dg_last) = self.log_weight(sign * us[last].exp());
            acc -= (slope(us[last], g[last], dg_last) - slope(us[0], g[0], dg_first)) * (du * du / 12.0);
            if inside {
                let a = c(if sign > 0.0 { lo } else { -hi }, 0.0);
                let b = c(if sign > 0.0 { hi } else { -lo }, 0.0);
                acc += ((b - z).ln() - (a - z).ln()) * g0;
            }
            total += acc;
        }
        total
    }

    /// ∫ log(1 + |r(s)|²) K(s) ds for a kernel smooth on the grid support,
    /// by the trapezoid rule in ln|s|.
    pub fn weighted_log_integral<K: Fn(f64) -> C64>(&self, kernel: K) -> C64 {
        let du = self.grid.log_step();
        let us = self.grid.log_nodes();
        let mut acc = c(0.0, 0.0);
        for (sign, g) in [(1.0, &self.pos_g), (-1.0, &self.neg_g)] {
            for (j, (&u, &gj)) in us.iter().zip(g.iter()).enumerate() {
                let w = if j == 0 || j + 1 == us.len() { 0.5 * du } else { du };
                let s = u.exp();
                acc += kernel(sign * s) * (gj * s * w);
            }
        }
        acc
    }

    /// Principal value ∫ log(1 + |r(s)|²)/(s − x) ds for real x.
    pub fn principal_value(&self, x: f64) -> f64 {
        // with Im z = 0 the log pair below is real for x inside a half line
        self.cauchy_log_integral(c(x, 0.0)).re
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,Re_a,Im_a,Re_b,Im_b,Re_r,Im_r\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                s.z, s.a.re, s.a.im, s.b.re, s.b.im, s.r.re, s.r.im
            ));
        }
        out
    }
}

/// Π_j (z − ζ_j)/(z − ζ̄_j) · exp{−(1/2πi)∫ log(1 + |r|²)/(s − z) ds}.
pub fn trace_formula_eval(data: &ScatteringData, z: C64) -> Result<C64> {
    if !z.is_finite() || z.im == 0.0 {
        return Err(Error::InvalidInput(format!("trace formula needs z off the real axis, got {z}")));
    }
    let mut product = c(1.0, 0.0);
    for e in &data.eigens {
        if (z - e.zeta.conj()).norm() < 1e-6 {
            return Err(Error::SpectralPoint { z: format!("{z}"), reason: format!("within 1e-6 of the pole {}", e.zeta.conj()) });
        }
        product *= (z - e.zeta) / (z - e.zeta.conj());
    }
    let integral = data.cauchy_log_integral(z);
    Ok(product * (-integral / (2.0 * PI * I)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AuditReport {
    /// max |r(z) − conj r(1/z)|
    pub conjugate_inversion: f64,
    /// max |r(z) + r(−1/z)|
    pub inverse_negation: f64,
    /// max |r(z) + conj r(−z)|
    pub reflection_conjugation: f64,
    /// max | |a|² + |b|² − 1 |
    pub unitarity: f64,
}

impl AuditReport {
    pub fn max_symmetry_defect(&self) -> f64 {
        self.conjugate_inversion.max(self.inverse_negation).max(self.reflection_conjugation)
    }
}

/// Max defects of the r-symmetries and of unitarity over the grid. Partner
/// points are exact grid nodes, so no interpolation enters.
pub fn symmetry_audit(data: &ScatteringData) -> AuditReport {
    let p = data.grid.per_side;
    let n = data.samples.len();
    let mut rep = AuditReport { conjugate_inversion: 0.0, inverse_negation: 0.0, reflection_conjugation: 0.0, unitarity: 0.0 };
    for i in 0..n {
        let s = &data.samples[i];
        // within one half line, u ↦ −u reverses the index
        let side_start = if i < p { 0 } else { p };
        let local = i - side_start;
        let recip = side_start + (p - 1 - local);
        let neg = n - 1 - i;
        let neg_recip = n - 1 - recip;
        rep.conjugate_inversion = rep.conjugate_inversion.max((s.r - data.samples[recip].r.conj()).norm());
        rep.inverse_negation = rep.inverse_negation.max((s.r + data.samples[neg_recip].r).norm());
        rep.reflection_conjugation = rep.reflection_conjugation.max((s.r + data.samples[neg].r.conj()).norm());
        if s.a.is_finite() && s.b.is_finite() {
            rep.unitarity = rep.unitarity.max((s.a.norm_sqr() + s.b.norm_sqr() - 1.0).abs());
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::super::datum::{build_initial_datum, DatumSpec};
    use super::super::jost::a_continued;
    use crate::matrix::I;
    use super::*;

    #[test]
    fn grid_is_closed_under_symmetries() {
        let g = SpectralGrid::new(8.0, 201).unwrap();
        let z = g.nodes();
        assert_eq!(z.len(), 402);
        let n = z.len();
        for i in 0..n {
            assert!((z[i] + z[n - 1 - i]).abs() < 1e-14);
        }
        assert!((z[201] - 0.125).abs() < 1e-14 && (z[301] - 1.0).abs() < 1e-14);
        let p = 201;
        for local in 0..p {
            assert!((z[p + local] * z[p + p - 1 - local] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_datum_scatters_trivially() {
        let d = build_initial_datum(&DatumSpec::Zero, 40.0, 1024).unwrap();
        let s = scattering_pair(&d, 1.3, &JostOptions::default()).unwrap();
        assert!((s.a - 1.0).norm() < 1e-12 && s.b.norm() < 1e-12 && s.r.norm() < 1e-12);
    }

    #[test]
    fn flipped_sample_shows_in_audit() {
        let g = SpectralGrid::new(8.0, 21).unwrap();
        let zero = ScatteringData::reflectionless(g);
        assert_eq!(symmetry_audit(&zero).max_symmetry_defect(), 0.0);
        // real, odd and invariant under z ↦ 1/z
        let r = |z: f64| c(0.3 * (z + 1.0 / z) / (z * z + 1.0 / (z * z) + 3.0), 0.0);
        let data = ScatteringData::from_reflection(g, r);
        assert!(symmetry_audit(&data).max_symmetry_defect() < 1e-14);
        let mut samples = data.samples.clone();
        let k = 25;
        samples[k].r = -samples[k].r;
        let bad = ScatteringData::from_samples(g, samples.clone(), vec![], vec![]);
        let rep = symmetry_audit(&bad);
        assert!((rep.reflection_conjugation - 2.0 * samples[k].r.norm()).abs() < 1e-14);
    }

    #[test]
    fn cauchy_integral_of_known_weight() {
        // g = 0.1 exp(−ln²|s|) against a fine midpoint sum
        let g = SpectralGrid::new(30.0, 801).unwrap();
        let weight = |s: f64| 0.1 * (-(s.ln().powi(2))).exp();
        let data = ScatteringData::from_reflection(g, |s| c((weight(s.abs()).exp() - 1.0).sqrt(), 0.0));
        let z = c(0.7, 0.9);
        let n = 400_000;
        let (a, b) = (1.0 / 30.0f64, 30.0f64);
        let mut brute = c(0.0, 0.0);
        let h = (b.ln() - a.ln()) / n as f64;
        for k in 0..n {
            let u = a.ln() + (k as f64 + 0.5) * h;
            let s = u.exp();
            brute += (c(s, 0.0) - z).inv() * weight(s) * s * h;
            brute += (c(-s, 0.0) - z).inv() * weight(s) * s * h;
        }
        let got = data.cauchy_log_integral(z);
        assert!((got - brute).norm() < 1e-8, "{got} vs {brute}");
    }

    #[test]
    fn gaussian_datum_passes_audit() {
        let d = build_initial_datum(&DatumSpec::Gaussian { amplitude: 0.3, width: 2.0 }, 40.0, 2048).unwrap();
        let g = SpectralGrid::new(8.0, 201).unwrap();
        let data = reflection_grid(&d, g, &JostOptions::default());
        assert!(data.failures.is_empty());
        let rep = symmetry_audit(&data);
        println!("{rep:?}");
        assert!(rep.unitarity < 1e-8);
        assert!(rep.max_symmetry_defect() < 1e-6);
        let a_i = a_continued(&d, I, &JostOptions::default()).unwrap();
        let expected = (-0.5 * d.mass_defect()).exp();
        println!("a(i) = {a_i}, exp(-mass/2) = {expected}");
        assert!((a_i - expected).norm() < 1e-8);
    }
}
