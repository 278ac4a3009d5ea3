use super::region::Region;
use super::tfunc::{Boundary, TFunctionContext};
use crate::error::{Error, Result};
use crate::matrix::{c, Mat2, C64, I};
use crate::painleve::{airy_square_tail, PainleveSolution};
use crate::airy::airy_ai;
use crate::phase::theta;
use crate::scattering::ScatteringData;
use crate::soliton::{ModifiedDiscreteData, SolitonEvaluation};
use std::f64::consts::PI;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The four merge points of region II in the order a, b, c, d.
pub const MERGE_POINTS: [f64; 4] = [2.0 + SQRT3, 2.0 - SQRT3, -2.0 + SQRT3, -2.0 - SQRT3];

/// (2/9)^{1/3}, the local scale factor of region I.
pub fn region_one_prefactor() -> f64 {
    (2.0f64 / 9.0).cbrt()
}

/// ((9/8)(26 ∓ 15√3))^{−1/3} for the outer (a, d) and inner (b, c) points.
pub fn region_two_prefactors() -> (f64, f64) {
    ((9.0 / 8.0 * (26.0 - 15.0 * SQRT3)).powf(-1.0 / 3.0), (9.0 / 8.0 * (26.0 + 15.0 * SQRT3)).powf(-1.0 / 3.0))
}

fn point_prefactor(p: f64) -> f64 {
    let (outer, inner) = region_two_prefactors();
    if p.abs() > 1.0 {
        outer
    } else {
        inner
    }
}

/// v(s) and ∫ₛ^∞ v², continued by κ Ai(s) beyond the table.
pub fn painleve_values(sol: &PainleveSolution, s: f64) -> Result<(f64, f64)> {
    if sol.kappa == 0.0 {
        return Ok((0.0, 0.0));
    }
    if s > sol.s_max() {
        let (ai, _) = airy_ai(s)?;
        return Ok((sol.kappa * ai, sol.kappa * sol.kappa * airy_square_tail(s)?));
    }
    Ok((sol.eval(s)?.0, sol.tail_at(s)?))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PhaseOffsets {
    /// φ_a, φ_b, φ_c, φ_d reduced to [0, 2π).
    pub phi: [f64; 4],
    pub d_values: [(f64, f64); 4],
    /// I₀ = (1/2πi)∫ log(1 + |r|²)/(s − i)² ds.
    pub i0: (f64, f64),
    /// Set when some |d| < 1e-12 and the phase is meaningless.
    pub undefined: bool,
}

impl PhaseOffsets {
    pub fn i0(&self) -> C64 {
        c(self.i0.0, self.i0.1)
    }
}

/// d(p) = r̄(p) T₊(p)⁻²/(1 + |r(p)|²) and φ = arg d(p) + 2tθ(p; ξ) at the four points.
pub fn phase_offsets(data: &ScatteringData, xi: f64, t: f64, tctx: &TFunctionContext) -> Result<PhaseOffsets> {
    let mut phi = [0.0; 4];
    let mut d_values = [(0.0, 0.0); 4];
    let mut undefined = false;
    for (k, &p) in MERGE_POINTS.iter().enumerate() {
        let r = data.reflection_at(p);
        let tp = super::tfunc::t_function(tctx, c(p, 0.0), Boundary::Plus)?;
        let d = r.conj() / (tp * tp) / (1.0 + r.norm_sqr());
        d_values[k] = (d.re, d.im);
        if d.norm() < 1e-12 {
            undefined = true;
            continue;
        }
        phi[k] = (d.arg() + 2.0 * t * theta(c(p, 0.0), xi).re).rem_euclid(2.0 * PI);
    }
    let i0 = data.weighted_log_integral(|s| (c(s, 0.0) - I).powi(-2)) / (2.0 * PI * I);
    Ok(PhaseOffsets { phi, d_values, i0: (i0.re, i0.im), undefined })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalMatrices {
    /// The parametrix coefficients at z = 1 and z = −1.
    RegionOne { right: Mat2, left: Mat2 },
    /// At a, b, c, d.
    RegionTwo([Mat2; 4]),
}

pub fn local_matrices(sol: &PainleveSolution, s: f64, region: Region, phases: Option<&PhaseOffsets>) -> Result<LocalMatrices> {
    let (v, tail) = painleve_values(sol, s)?;
    let half_i = I * 0.5;
    match region {
        Region::PI => Ok(LocalMatrices::RegionOne {
            right: Mat2::new(c(-tail, 0.0), c(v, 0.0), c(-v, 0.0), c(tail, 0.0)).scale(half_i),
            left: Mat2::new(c(-tail, 0.0), c(-v, 0.0), c(v, 0.0), c(tail, 0.0)).scale(half_i),
        }),
        Region::PII => {
            let phases = phases.ok_or_else(|| Error::InvalidInput("region II local matrices need phase offsets".into()))?;
            let mut out = [Mat2::ZERO; 4];
            for (m, &phi) in out.iter_mut().zip(&phases.phi) {
                let e = C64::from_polar(1.0, phi);
                *m = Mat2::new(c(tail, 0.0), -e * v, e.inv() * v, c(-tail, 0.0)).scale(half_i);
            }
            Ok(LocalMatrices::RegionTwo(out))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionBundle {
    pub region: Region,
    pub s_scaled: f64,
    /// H⁽⁰⁾, H⁽¹⁾ in region I, N⁽⁰⁾, N⁽¹⁾ in region II.
    pub first: Mat2,
    pub second: Mat2,
    /// f11 or h11.
    pub u_coefficient: C64,
    /// f12 or h12.
    pub x_coefficient: C64,
    pub i0: C64,
    pub phases: Option<[f64; 4]>,
}

fn conj_at(data: &ModifiedDiscreteData, eval: &SolitonEvaluation, z: f64, m: &Mat2) -> Result<Mat2> {
    let outer = eval.outer_matrix(data, c(z, 0.0))?;
    m.conjugate_by(&outer).ok_or(Error::Singular { condition: f64::INFINITY })
}

/// Assembles the correction matrices and the t^{−1/3} coefficients of u and x.
#[allow(clippy::too_many_arguments)]
pub fn correction_bundle(
    region: Region,
    s: f64,
    sol: &PainleveSolution,
    data: &ModifiedDiscreteData,
    eval: &SolitonEvaluation,
    t_at_i: C64,
    phases: Option<&PhaseOffsets>,
) -> Result<CorrectionBundle> {
    let locals = local_matrices(sol, s, region, phases)?;
    let (first, second) = match &locals {
        LocalMatrices::RegionOne { right, left } => {
            let k = region_one_prefactor();
            let r = conj_at(data, eval, 1.0, right)?;
            let l = conj_at(data, eval, -1.0, left)?;
            let h0 = (r.scale((1.0 - I).inv()) - l.scale((1.0 + I).inv())).scale(c(-k, 0.0));
            let h1 = (r - l).scale(-I * 0.5 * k);
            (h0, h1)
        }
        LocalMatrices::RegionTwo(ms) => {
            let mut n0 = Mat2::ZERO;
            let mut n1 = Mat2::ZERO;
            for (m, &p) in ms.iter().zip(&MERGE_POINTS) {
                let w = conj_at(data, eval, p, m)?.scale(c(point_prefactor(p), 0.0));
                let gap = c(p, 0.0) - I;
                n0 = n0 - w.scale(gap.inv());
                n1 = n1 - w.scale((gap * gap).inv());
            }
            (n0, n1)
        }
    };
    let i0 = match region {
        Region::PI => c(0.0, 0.0),
        Region::PII => phases.map(|p| p.i0()).unwrap_or(c(0.0, 0.0)),
    };

    let m = &eval.mout_at_i;
    let m1 = &eval.mout1_at_i;
    let denom = m.at(1, 1) + m.at(2, 1);
    if denom.norm() < 1e-10 {
        return Err(Error::DressingDegeneracy { y: eval.state.y, t: eval.state.t });
    }
    let weight = t_at_i * t_at_i * eval.c_plus_out.exp();
    let left_sum = first.at(1, 1) + first.at(2, 1);
    let right_sum = first.at(1, 2) + first.at(2, 2);
    let mut u_coef = -first.entry_sum() * eval.u_p + second.entry_sum()
        + left_sum * (m1.at(1, 1) + weight * m1.at(1, 2)) / denom
        + right_sum * (m1.at(2, 1) + weight * m1.at(2, 2)) / denom;
    if region == Region::PII {
        let scale = t_at_i * (0.5 * eval.c_plus_out).exp() * denom;
        u_coef += left_sum * i0 * (m.at(1, 1) - weight * m.at(2, 1)) / scale;
        u_coef += right_sum * i0 * (m.at(2, 1) - weight * m.at(1, 1)) / scale;
    }
    let x_coef = (left_sum - right_sum) * (m.at(2, 1) - m.at(1, 1));
    Ok(CorrectionBundle {
        region,
        s_scaled: s,
        first,
        second,
        u_coefficient: u_coef,
        x_coefficient: x_coef,
        i0,
        phases: phases.map(|p| p.phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::painleve::solve_pii;
    use crate::soliton::evaluate_soliton;

    #[test]
    fn prefactors() {
        assert!((region_one_prefactor().powi(3) - 2.0 / 9.0).abs() < 1e-15);
        let (outer, inner) = region_two_prefactors();
        assert!((outer.powi(-3) - 9.0 / 8.0 * (26.0 - 15.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((inner.powi(-3) - 9.0 / 8.0 * (26.0 + 15.0 * 3f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn zero_solution_gives_zero_matrices() {
        let sol = solve_pii(0.0, -8.0, 8.0).unwrap();
        let phases = PhaseOffsets { phi: [0.3; 4], d_values: [(0.0, 0.0); 4], i0: (0.0, 0.0), undefined: true };
        for (region, p) in [(Region::PI, None), (Region::PII, Some(&phases))] {
            match local_matrices(&sol, 0.4, region, p).unwrap() {
                LocalMatrices::RegionOne { right, left } => assert!(right.max_abs() == 0.0 && left.max_abs() == 0.0),
                LocalMatrices::RegionTwo(ms) => assert!(ms.iter().all(|m| m.max_abs() == 0.0)),
            }
        }
    }

    #[test]
    fn region_one_entries() {
        let sol = solve_pii(-0.3, -8.0, 8.0).unwrap();
        let LocalMatrices::RegionOne { right, left } = local_matrices(&sol, 0.2, Region::PI, None).unwrap() else { panic!() };
        assert_eq!(right.at(1, 2), -left.at(1, 2));
        assert_eq!(right.at(2, 1), -left.at(2, 1));
        assert!(right.trace().norm() == 0.0 && left.trace().norm() == 0.0);
    }

    #[test]
    fn empty_spectrum_bundle_symbolic() {
        // with M_out = I: H1 = ½(2/9)^{1/3}[[0, v], [−v, 0]] and the entries of H1 sum to zero
        let sol = solve_pii(-0.3, -8.0, 8.0).unwrap();
        let data = ModifiedDiscreteData::empty();
        let eval = evaluate_soliton(&data, 0.0, 10.0).unwrap();
        let s = 0.5;
        let b = correction_bundle(Region::PI, s, &sol, &data, &eval, c(1.0, 0.0), None).unwrap();
        let (v, _) = painleve_values(&sol, s).unwrap();
        let k = region_one_prefactor();
        let want = Mat2::new(c(0.0, 0.0), c(0.5 * k * v, 0.0), c(-0.5 * k * v, 0.0), c(0.0, 0.0));
        assert!((b.second - want).max_abs() < 1e-15);
        assert!(b.second.entry_sum().norm() < 1e-15);
        assert!(b.first.trace().norm() < 1e-10 && b.second.trace().norm() < 1e-10);
        assert!(b.u_coefficient.norm() < 1e-15);
    }

    #[test]
    fn continuation_beyond_table() {
        let sol = solve_pii(0.2, -8.0, 8.0).unwrap();
        let (a, ta) = painleve_values(&sol, sol.s_max()).unwrap();
        let (b, tb) = painleve_values(&sol, sol.s_max() + 1e-9).unwrap();
        assert!((a - b).abs() < 1e-10 && (ta - tb).abs() < 1e-10);
    }
}
