//! Reflectionless solutions from the dressing linear system, and the
//! conversion between the y- and x-coordinates.

use crate::error::{Error, Result};
use crate::matrix::{c, Mat2, C64, I};
use crate::phase::scaled_phase;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::path::Path;

/// Minimal separation between two records.
pub const MIN_SEPARATION: f64 = 1e-8;
/// Largest accepted condition estimate of the dressing matrix.
pub const MAX_CONDITION: f64 = 1e12;
const DEGENERACY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRecord {
    pub zeta: C64,
    /// C·T²(ζ), the modified norming constant.
    pub coeff: C64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModifiedDiscreteData {
    records: Vec<EigenRecord>,
}

impl ModifiedDiscreteData {
    pub fn new(records: Vec<EigenRecord>) -> Result<Self> {
        for (k, r) in records.iter().enumerate() {
            if !(r.zeta.is_finite() && r.coeff.is_finite()) {
                return Err(Error::NonFinite(format!("eigen record {k}")));
            }
            if r.zeta.im <= 0.0 {
                return Err(Error::InvalidInput(format!("eigenvalue {} is not in the upper half plane", r.zeta)));
            }
            if let Some(other) = records[..k].iter().find(|o| (o.zeta - r.zeta).norm() <= MIN_SEPARATION) {
                return Err(Error::InvalidInput(format!("eigenvalues {} and {} are not separated", other.zeta, r.zeta)));
            }
        }
        Ok(ModifiedDiscreteData { records })
    }

    pub fn empty() -> Self {
        ModifiedDiscreteData::default()
    }

    pub fn records(&self) -> &[EigenRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Multiplies each norming constant by T²(ζ).
    pub fn with_t_factor<F: Fn(C64) -> Result<C64>>(&self, t_at: F) -> Result<Self> {
        let records = self
            .records
            .iter()
            .map(|r| {
                let t = t_at(r.zeta)?;
                Ok(EigenRecord { zeta: r.zeta, coeff: r.coeff * t * t })
            })
            .collect::<Result<Vec<_>>>()?;
        ModifiedDiscreteData::new(records)
    }
}

/// Completes base records to their symmetry orbits: (ζ, C) gives (−ζ̄, C̄),
/// and off the unit circle also (−1/ζ, −C/ζ²) and (1/ζ̄, its conjugate).
///
/// On the unit circle only C ∈ iζℝ yields a real solution; other constants
/// are rejected.
pub fn close_orbits(base: &[EigenRecord]) -> Result<Vec<EigenRecord>> {
    let mut out: Vec<EigenRecord> = Vec::new();
    let mut push = |r: EigenRecord| {
        if !out.iter().any(|o| (o.zeta - r.zeta).norm() <= MIN_SEPARATION) {
            out.push(r);
        }
    };
    for r in base {
        if r.zeta.im <= 0.0 {
            return Err(Error::InvalidInput(format!("eigenvalue {} is not in the upper half plane", r.zeta)));
        }
        let on_circle = (r.zeta.norm() - 1.0).abs() <= MIN_SEPARATION;
        if on_circle && (r.coeff * r.zeta.conj()).re.abs() > 1e-12 * (1.0 + r.coeff.norm()) {
            return Err(Error::InvalidInput(format!("norming constant {} at {} on the unit circle must lie in i*zeta*R", r.coeff, r.zeta)));
        }
        push(*r);
        push(EigenRecord { zeta: -r.zeta.conj(), coeff: r.coeff.conj() });
        if !on_circle {
            let inner = EigenRecord { zeta: -r.zeta.inv(), coeff: -r.coeff / (r.zeta * r.zeta) };
            push(EigenRecord { zeta: -inner.zeta.conj(), coeff: inner.coeff.conj() });
            push(inner);
        }
    }
    Ok(out)
}

/// Reads `Re_zeta,Im_zeta,Re_C,Im_C` rows.
pub fn parse_spectrum(text: &str) -> Result<Vec<EigenRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::InvalidInput("empty spectrum file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["Re_zeta", "Im_zeta", "Re_C", "Im_C"] {
        return Err(Error::InvalidInput(format!("spectrum header must be Re_zeta,Im_zeta,Re_C,Im_C, got `{header}`")));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let v = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("spectrum row {}: {e}", k + 1)))?;
            if v.len() != 4 {
                return Err(Error::InvalidInput(format!("spectrum row {} has {} fields", k + 1, v.len())));
            }
            Ok(EigenRecord { zeta: c(v[0], v[1]), coeff: c(v[2], v[3]) })
        })
        .collect()
}

pub fn read_spectrum(path: &Path) -> Result<Vec<EigenRecord>> {
    parse_spectrum(&std::fs::read_to_string(path)?)
}

pub fn spectrum_to_csv(records: &[EigenRecord]) -> String {
    let mut out = String::from("Re_zeta,Im_zeta,Re_C,Im_C\n");
    for r in records {
        out.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", r.zeta.re, r.zeta.im, r.coeff.re, r.coeff.im));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressingState {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub y: f64,
    pub t: f64,
    /// Relative residual of the solved system.
    pub residual: f64,
    pub condition: f64,
}

impl DressingState {
    /// M_out(z) = I + Σ [[β/(z−ζ), −ᾱ/(z−ζ̄)], [α/(z−ζ), β̄/(z−ζ̄)]].
    pub fn outer_matrix(&self, data: &ModifiedDiscreteData, z: C64) -> Result<Mat2> {
        let mut m = Mat2::IDENTITY;
        for (k, r) in data.records.iter().enumerate() {
            let (p, q) = self.pole_factors(r.zeta, z)?;
            m = m + Mat2::new(self.beta[k] * p, -self.alpha[k].conj() * q, self.alpha[k] * p, self.beta[k].conj() * q);
        }
        Ok(m)
    }

    /// dM_out/dz, the coefficient of (z − z₀) in the expansion at z₀.
    pub fn outer_derivative(&self, data: &ModifiedDiscreteData, z: C64) -> Result<Mat2> {
        let mut m = Mat2::ZERO;
        for (k, r) in data.records.iter().enumerate() {
            let (p, q) = self.pole_factors(r.zeta, z)?;
            let (p, q) = (-p * p, -q * q);
            m = m + Mat2::new(self.beta[k] * p, -self.alpha[k].conj() * q, self.alpha[k] * p, self.beta[k].conj() * q);
        }
        Ok(m)
    }

    fn pole_factors(&self, zeta: C64, z: C64) -> Result<(C64, C64)> {
        let (d1, d2) = (z - zeta, z - zeta.conj());
        if d1.norm() < 1e-12 || d2.norm() < 1e-12 {
            return Err(Error::SpectralPoint { z: format!("{z}"), reason: format!("coincides with the pole {zeta}") });
        }
        Ok((d1.inv(), d2.inv()))
    }
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|col| col.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Assembles and solves the 2s×2s dressing system at (y, t). `phase_at`
/// returns t·θ(ζ) at the current point. Unknowns are ordered (β, ᾱ).
pub fn solve_dressing_system<F>(data: &ModifiedDiscreteData, y: f64, t: f64, phase_at: F) -> Result<DressingState>
where
    F: Fn(C64) -> C64,
{
    let s = data.len();
    if s == 0 {
        return Ok(DressingState { alpha: vec![], beta: vec![], y, t, residual: 0.0, condition: 1.0 });
    }
    let zs: Vec<C64> = data.records.iter().map(|r| r.zeta).collect();
    let ct: Vec<C64> = data.records.iter().map(|r| r.coeff * (-2.0 * I * phase_at(r.zeta)).exp()).collect();
    if ct.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("dressing coefficients at y = {y}, t = {t}")));
    }
    let mut a = DMatrix::<C64>::identity(2 * s, 2 * s);
    let mut rhs = DVector::<C64>::zeros(2 * s);
    for k in 0..s {
        for h in 0..s {
            a[(k, s + h)] += ct[k] / (zs[k] - zs[h].conj());
            a[(s + k, h)] -= ct[k].conj() / (zs[k].conj() - zs[h]);
        }
        rhs[s + k] = ct[k].conj();
    }
    let lu = a.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::Singular { condition: f64::INFINITY })?;
    let condition = norm1(&a) * norm1(&inverse);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let mut x = lu.solve(&rhs).ok_or(Error::Singular { condition })?;
    let scale = norm1(&a) * x.iter().map(|v| v.norm()).sum::<f64>() + rhs.iter().map(|v| v.norm()).sum::<f64>();
    let mut residual = (&a * &x - &rhs).iter().map(|v| v.norm()).sum::<f64>() / scale.max(f64::MIN_POSITIVE);
    if condition > 1e8 {
        // one step of iterative refinement
        let r = &rhs - &a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
            residual = (&a * &x - &rhs).iter().map(|v| v.norm()).sum::<f64>() / scale.max(f64::MIN_POSITIVE);
        }
    }
    Ok(DressingState {
        beta: x.iter().take(s).copied().collect(),
        alpha: x.iter().skip(s).map(|v| v.conj()).collect(),
        y,
        t,
        residual,
        condition,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonEvaluation {
    pub u_p: f64,
    /// Imaginary part of the complex u_p formula, a symmetry diagnostic.
    pub u_p_imag: f64,
    pub c_plus_out: f64,
    pub c_plus_imag: f64,
    pub x_of_y: f64,
    pub mout_at_i: Mat2,
    pub mout1_at_i: Mat2,
    pub state: DressingState,
}

impl SolitonEvaluation {
    /// M_out at an arbitrary point of the plane.
    pub fn outer_matrix(&self, data: &ModifiedDiscreteData, z: C64) -> Result<Mat2> {
        self.state.outer_matrix(data, z)
    }
}

pub fn evaluate_soliton(data: &ModifiedDiscreteData, y: f64, t: f64) -> Result<SolitonEvaluation> {
    let state = solve_dressing_system(data, y, t, |z| scaled_phase(z, y, t))?;
    let mout = state.outer_matrix(data, I)?;
    let mout1 = state.outer_derivative(data, I)?;
    let g1 = mout.at(1, 1) + mout.at(2, 1);
    let g2 = mout.at(1, 2) + mout.at(2, 2);
    if g1.norm() < DEGENERACY_FLOOR || g2.norm() < DEGENERACY_FLOOR {
        return Err(Error::DressingDegeneracy { y, t });
    }
    let d1 = mout1.at(1, 1) + mout1.at(2, 1);
    let d2 = mout1.at(1, 2) + mout1.at(2, 2);
    let u = -(d1 / g1 + d2 / g2);
    let cp = -(g2 / g1).ln();
    Ok(SolitonEvaluation {
        u_p: u.re,
        u_p_imag: u.im,
        c_plus_out: cp.re,
        c_plus_imag: cp.im,
        x_of_y: y + cp.re,
        mout_at_i: mout,
        mout1_at_i: mout1,
        state,
    })
}

/// Largest allowed |y − x| while bracketing.
pub const BRACKET_WIDTH: f64 = 50.0;

/// Solves x = y + shift + c₊(y, t) for y.
pub fn invert_coordinate(data: &ModifiedDiscreteData, x: f64, t: f64, shift: f64) -> Result<f64> {
    if !shift.is_finite() || !x.is_finite() {
        return Err(Error::NonFinite("coordinate inversion input".into()));
    }
    if data.is_empty() {
        return Ok(x - shift);
    }
    let forward = |y: f64| -> Result<f64> { Ok(y + shift + evaluate_soliton(data, y, t)?.c_plus_out - x) };

    // a bracket that stays inside |y − x| ≤ BRACKET_WIDTH
    let y0 = (x - shift).clamp(x - BRACKET_WIDTH, x + BRACKET_WIDTH);
    let f0 = forward(y0)?;
    if f0 == 0.0 {
        return Ok(y0);
    }
    let dir = if f0 > 0.0 { -1.0 } else { 1.0 };
    let mut step = 1.0;
    let (mut near, mut f_near) = (y0, f0);
    let far = loop {
        let y = (y0 + dir * step).clamp(x - BRACKET_WIDTH, x + BRACKET_WIDTH);
        let fy = forward(y)?;
        if fy.signum() != f0.signum() {
            break (y, fy);
        }
        if (y - x).abs() >= BRACKET_WIDTH {
            return Err(Error::Bracket(format!("no sign change of x(y) - {x} within |y - x| <= {BRACKET_WIDTH}")));
        }
        near = y;
        f_near = fy;
        step *= 2.0;
    };
    let (mut lo, mut hi, mut f_lo, mut f_hi) = if dir > 0.0 { (near, far.0, f_near, far.1) } else { (far.0, near, far.1, f_near) };

    // monotonicity of the forward map on the bracket
    let samples = 16;
    let mut prev = f_lo;
    for k in 1..=samples {
        let y = lo + (hi - lo) * k as f64 / samples as f64;
        let fy = if k == samples { f_hi } else { forward(y)? };
        if fy < prev - 1e-12 {
            return Err(Error::Bracket(format!("forward map x(y) is not increasing on [{lo}, {hi}]")));
        }
        prev = fy;
    }

    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fy = forward(y)?;
        if fy.abs() <= 1e-12 * (1.0 + x.abs()) {
            return Ok(y);
        }
        if fy < 0.0 {
            lo = y;
            f_lo = fy;
        } else {
            hi = y;
            f_hi = fy;
        }
        let h = 1e-6;
        let slope = (forward(y + h)? - forward(y - h)?) / (2.0 * h);
        let newton = y - fy / slope;
        y = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-14 * (1.0 + y.abs()) {
            break;
        }
    }
    let fy = forward(y)?;
    if fy.abs() <= 1e-10 {
        Ok(y)
    } else {
        Err(Error::NoConvergence { iterations: 200, last_change: (hi - lo).max((f_hi - f_lo).abs()) })
    }
}

/// u_p sampled on an x-grid, each point by coordinate inversion.
pub fn profile_on_x(data: &ModifiedDiscreteData, xs: &[f64], t: f64, shift: f64) -> Result<Vec<f64>> {
    xs.par_iter()
        .map(|&x| {
            let y = invert_coordinate(data, x, t, shift)?;
            Ok(evaluate_soliton(data, y, t)?.u_p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_pair(phi: f64, shift: f64) -> ModifiedDiscreteData {
        let z = C64::from_polar(1.0, phi);
        let base = EigenRecord { zeta: z, coeff: I * z * shift.exp() };
        ModifiedDiscreteData::new(close_orbits(&[base]).unwrap()).unwrap()
    }

    fn dense(data: &ModifiedDiscreteData, y: f64, t: f64) -> (Vec<Vec<C64>>, Vec<C64>) {
        // the system written out entry by entry, for substitution checks
        let s = data.len();
        let zs: Vec<C64> = data.records().iter().map(|r| r.zeta).collect();
        let ct: Vec<C64> = data.records().iter().map(|r| r.coeff * (-2.0 * I * scaled_phase(r.zeta, y, t)).exp()).collect();
        let mut a = vec![vec![c(0.0, 0.0); 2 * s]; 2 * s];
        let mut b = vec![c(0.0, 0.0); 2 * s];
        for k in 0..s {
            a[k][k] = c(1.0, 0.0);
            a[s + k][s + k] = c(1.0, 0.0);
            for h in 0..s {
                a[k][s + h] = ct[k] / (zs[k] - zs[h].conj());
                a[s + k][h] = -ct[k].conj() / (zs[k].conj() - zs[h]);
            }
            b[s + k] = ct[k].conj();
        }
        (a, b)
    }

    #[test]
    fn empty_data_is_trivial() {
        let e = evaluate_soliton(&ModifiedDiscreteData::empty(), 1.3, 2.0).unwrap();
        assert_eq!(e.u_p, 0.0);
        assert_eq!(e.c_plus_out, 0.0);
        assert_eq!(e.x_of_y, 1.3);
        assert_eq!(e.mout_at_i, Mat2::IDENTITY);
        assert_eq!(invert_coordinate(&ModifiedDiscreteData::empty(), 0.7, 3.0, 0.0).unwrap(), 0.7);
    }

    #[test]
    fn single_record_residual() {
        let data = ModifiedDiscreteData::new(vec![EigenRecord { zeta: C64::from_polar(1.2, PI / 3.0), coeff: c(1.0, 0.0) }]).unwrap();
        let st = solve_dressing_system(&data, 0.0, 0.0, |z| scaled_phase(z, 0.0, 0.0)).unwrap();
        let (a, b) = dense(&data, 0.0, 0.0);
        let x = [st.beta[0], st.alpha[0].conj()];
        for row in 0..2 {
            let lhs = a[row][0] * x[0] + a[row][1] * x[1];
            assert!((lhs - b[row]).norm() < 1e-12);
        }
        assert!(st.residual < 1e-12);
    }

    #[test]
    fn symmetric_pair_solution_is_symmetric() {
        let data = circle_pair(PI / 6.0, 0.0);
        let st = solve_dressing_system(&data, 0.3, 0.0, |z| scaled_phase(z, 0.3, 0.0)).unwrap();
        assert!((st.beta[1] + st.beta[0].conj()).norm() < 1e-9);
        assert!((st.alpha[1] - st.alpha[0].conj()).norm() < 1e-9);
    }

    #[test]
    fn circle_pair_is_real() {
        let data = circle_pair(PI / 6.0, 0.4);
        for y in [-5.0, -1.0, 0.0, 0.7, 3.0] {
            for t in [0.0, 1.0, 10.0] {
                let e = evaluate_soliton(&data, y, t).unwrap();
                assert!(e.u_p_imag.abs() < 1e-9, "{} at ({y}, {t})", e.u_p_imag);
                assert!(e.c_plus_imag.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quadruple_is_real() {
        let base = EigenRecord { zeta: C64::from_polar(1.3, 0.9), coeff: c(0.4, 0.3) };
        let data = ModifiedDiscreteData::new(close_orbits(&[base]).unwrap()).unwrap();
        assert_eq!(data.len(), 4);
        for y in [-2.0, 0.5, 4.0] {
            let e = evaluate_soliton(&data, y, 0.5).unwrap();
            assert!(e.u_p_imag.abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_circle_constant() {
        let z = C64::from_polar(1.0, 0.5);
        assert!(close_orbits(&[EigenRecord { zeta: z, coeff: z }]).is_err());
    }

    #[test]
    fn depends_on_phase_only() {
        // on the unit circle t·θ = −(i/2) sin φ (y − 2t/cos² φ)
        let phi = PI / 6.0;
        let data = ModifiedDiscreteData::new(vec![EigenRecord { zeta: C64::from_polar(1.0, phi), coeff: c(0.3, 0.8) }]).unwrap();
        let speed = 2.0 / phi.cos().powi(2);
        let a = evaluate_soliton(&data, 0.4, 0.0).unwrap();
        let b = evaluate_soliton(&data, 0.4 + 3.0 * speed, 3.0).unwrap();
        assert!((a.u_p - b.u_p).abs() < 1e-9 && (a.u_p_imag - b.u_p_imag).abs() < 1e-9);
    }

    #[test]
    fn coordinate_round_trip() {
        let data = circle_pair(PI / 6.0, 0.0);
        for shift in [0.0, 0.3] {
            for x in [-6.0, -1.0, 0.0, 2.5, 8.0] {
                let y = invert_coordinate(&data, x, 1.0, shift).unwrap();
                let back = y + shift + evaluate_soliton(&data, y, 1.0).unwrap().c_plus_out;
                assert!((back - x).abs() < 1e-10, "{back} vs {x}");
            }
        }
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let recs = vec![EigenRecord { zeta: c(0.5, 0.8), coeff: c(-0.1, 2.0) }];
        assert_eq!(parse_spectrum(&spectrum_to_csv(&recs)).unwrap(), recs);
        assert!(parse_spectrum("a,b\n1,2\n").is_err());
    }
}
