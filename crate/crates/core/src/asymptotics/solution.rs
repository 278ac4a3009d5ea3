use super::local::{correction_bundle, phase_offsets, CorrectionBundle, MERGE_POINTS};
use super::region::{classify_region, HalfZone, Region};
use super::tfunc::{partition_poles, t_function, Boundary, PolePartition, TFunctionContext};
use crate::error::{Error, Result};
use crate::matrix::{C64, I};
use crate::painleve::{solve_pii, PainleveSolution};
use crate::scattering::ScatteringData;
use crate::soliton::{evaluate_soliton, invert_coordinate, EigenRecord, ModifiedDiscreteData};
use std::fmt::Write as _;
use std::str::FromStr;

/// Sign of the Airy asymptote of v_II: `Theorem` takes −|r(2+√3)|, `Eq475`
/// the opposite sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViiSign {
    Theorem,
    Eq475,
}

impl FromStr for ViiSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(ViiSign::Theorem),
            "eq475" => Ok(ViiSign::Eq475),
            other => Err(Error::InvalidInput(format!("vii sign must be `theorem` or `eq475`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticOptions {
    /// Half-width of the transition zones in units of t^{−2/3}.
    pub c_cap: f64,
    /// Error-order label; does not enter computed values.
    pub delta: f64,
    pub vii_sign: ViiSign,
    pub s_min: f64,
    pub s_max: f64,
    pub fixed_point_tol: f64,
    pub max_iterations: usize,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        AsymptoticOptions {
            c_cap: 3.0,
            delta: 1.0 / 16.0,
            vii_sign: ViiSign::Theorem,
            s_min: -8.0,
            s_max: 8.0,
            fixed_point_tol: 1e-10,
            max_iterations: 50,
        }
    }
}

/// Everything needed to evaluate the transition asymptotics.
#[derive(Debug, Clone)]
pub struct AsymptoticProblem {
    pub scattering: ScatteringData,
    /// Discrete spectrum with the norming constants C_n.
    pub eigens: Vec<EigenRecord>,
    pub options: AsymptoticOptions,
    pub region_one: PainleveSolution,
    pub region_two: PainleveSolution,
}

impl AsymptoticProblem {
    pub fn new(scattering: ScatteringData, eigens: Vec<EigenRecord>, options: AsymptoticOptions) -> Result<Self> {
        if !(options.delta > 1.0 / 27.0 && options.delta < 1.0 / 12.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (1/27, 1/12), got {}", options.delta)));
        }
        ModifiedDiscreteData::new(eigens.clone())?;
        let r_one = scattering.reflection_at(1.0);
        let r_two = scattering.reflection_at(MERGE_POINTS[0]).norm();
        let kappa_two = match options.vii_sign {
            ViiSign::Theorem => -r_two,
            ViiSign::Eq475 => r_two,
        };
        let region_one = solve_pii(-r_one.re, options.s_min, options.s_max)?;
        let region_two = solve_pii(kappa_two, options.s_min, options.s_max)?;
        Ok(AsymptoticProblem { scattering, eigens, options, region_one, region_two })
    }

    pub fn painleve(&self, region: Region) -> &PainleveSolution {
        match region {
            Region::PI => &self.region_one,
            Region::PII => &self.region_two,
        }
    }

    /// Λ, Δ split at the centre of the region.
    pub fn partition(&self, region: Region) -> PolePartition {
        let zetas: Vec<C64> = self.eigens.iter().map(|r| r.zeta).collect();
        partition_poles(&zetas, region.center())
    }

    pub fn t_context(&self, region: Region) -> TFunctionContext<'_> {
        let part = self.partition(region);
        TFunctionContext {
            delta: part.delta.iter().map(|&n| self.eigens[n].zeta).collect(),
            data: &self.scattering,
            with_integral: region == Region::PII,
        }
    }

    /// Λ records with the modified constants C·T²(ζ).
    pub fn soliton_data(&self, region: Region) -> Result<ModifiedDiscreteData> {
        let part = self.partition(region);
        let tctx = self.t_context(region);
        let records = part
            .lambda
            .iter()
            .map(|&n| {
                let r = self.eigens[n];
                let t = t_function(&tctx, r.zeta, Boundary::None)?;
                Ok(EigenRecord { zeta: r.zeta, coeff: r.coeff * t * t })
            })
            .collect::<Result<Vec<_>>>()?;
        ModifiedDiscreteData::new(records)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AsymptoticExpansion {
    pub x: f64,
    pub t: f64,
    pub region: Region,
    pub half_zone: HalfZone,
    pub u_value: f64,
    pub u_p: f64,
    /// f11 or h11, before scaling.
    pub correction: (f64, f64),
    /// Re(correction)·t^{−1/3}.
    pub correction_term: f64,
    pub s_scaled: f64,
    pub y: f64,
    pub error_order: f64,
    pub iterations: usize,
}

pub fn evaluate_solution(x: f64, t: f64, problem: &AsymptoticProblem) -> Result<AsymptoticExpansion> {
    let region = classify_region(x, t, problem.options.c_cap)?
        .ok_or_else(|| Error::OutOfRange(format!("(x, t) = ({x}, {t}) is in neither transition region")))?;
    evaluate_in_region(x, t, region, problem).map(|(e, _)| e)
}

/// As [`evaluate_solution`] with the region given, also returning the final bundle.
pub fn evaluate_in_region(x: f64, t: f64, region: Region, problem: &AsymptoticProblem) -> Result<(AsymptoticExpansion, CorrectionBundle)> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let data = problem.soliton_data(region)?;
    let tctx = problem.t_context(region);
    let t_at_i = t_function(&tctx, I, Boundary::None)?;
    let base_shift = -2.0 * t_at_i.ln().re;
    let scale = t.powf(-1.0 / 3.0);
    let sol = problem.painleve(region);

    let mut y = invert_coordinate(&data, x, t, base_shift)?;
    let mut last_change = f64::INFINITY;
    for iteration in 1..=problem.options.max_iterations {
        let eval = evaluate_soliton(&data, y, t)?;
        let xi = y / t;
        let s = region.scaled_variable(xi, t);
        let phases = match region {
            Region::PI => None,
            Region::PII => Some(phase_offsets(&problem.scattering, xi, t, &tctx)?),
        };
        let bundle = correction_bundle(region, s, sol, &data, &eval, t_at_i, phases.as_ref())?;
        let next = invert_coordinate(&data, x, t, base_shift + bundle.x_coefficient.re * scale)?;
        last_change = (next - y).abs();
        if last_change <= problem.options.fixed_point_tol * (1.0 + y.abs()) {
            let coef = bundle.u_coefficient;
            let expansion = AsymptoticExpansion {
                x,
                t,
                region,
                half_zone: region.half_zone(xi),
                u_value: eval.u_p + coef.re * scale,
                u_p: eval.u_p,
                correction: (coef.re, coef.im),
                correction_term: coef.re * scale,
                s_scaled: s,
                y,
                error_order: -2.0 / 3.0 + 4.0 * problem.options.delta,
                iterations: iteration,
            };
            return Ok((expansion, bundle));
        }
        y = next;
    }
    Err(Error::NoConvergence { iterations: problem.options.max_iterations, last_change })
}

pub fn expansions_to_csv(rows: &[AsymptoticExpansion]) -> String {
    let mut out = String::from("x,t,region,u_asym,u_p,corr_re,corr_im,s_scaled,err_order\n");
    for e in rows {
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            e.x, e.t, e.region, e.u_value, e.u_p, e.correction.0, e.correction.1, e.s_scaled, e.error_order
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;
    use crate::scattering::SpectralGrid;
    use crate::soliton::close_orbits;
    use std::f64::consts::PI;

    fn empty_problem() -> AsymptoticProblem {
        let g = SpectralGrid::new(8.0, 101).unwrap();
        AsymptoticProblem::new(ScatteringData::reflectionless(g), vec![], AsymptoticOptions::default()).unwrap()
    }

    #[test]
    fn vanishes_without_data() {
        let p = empty_problem();
        for (x, t) in [(200.0, 100.0), (-25.0, 100.0), (-25.3, 100.0)] {
            let e = evaluate_solution(x, t, &p).unwrap();
            assert_eq!(e.u_value, 0.0);
            assert_eq!(e.y, x);
        }
    }

    #[test]
    fn pure_soliton_is_reproduced() {
        // a circle pair whose speed puts it inside region I at t = 50
        let phi: f64 = 0.1;
        let z = C64::from_polar(1.0, phi);
        let eigens = close_orbits(&[EigenRecord { zeta: z, coeff: I * z }]).unwrap();
        let g = SpectralGrid::new(8.0, 101).unwrap();
        let p = AsymptoticProblem::new(ScatteringData::reflectionless(g), eigens, AsymptoticOptions::default()).unwrap();
        assert_eq!(p.partition(Region::PI).lambda.len(), 2);
        let t = 50.0;
        let speed = 2.0 / phi.cos().powi(2);
        let data = p.soliton_data(Region::PI).unwrap();
        for dx in [-0.5, 0.0, 0.4] {
            let x = speed * t + dx;
            let e = evaluate_solution(x, t, &p).unwrap();
            let y = invert_coordinate(&data, x, t, 0.0).unwrap();
            let direct = evaluate_soliton(&data, y, t).unwrap().u_p;
            assert!((e.u_value - direct).abs() < 1e-12, "{} vs {direct}", e.u_value);
            assert!(e.u_p.abs() > 1e-3);
        }
        let _ = PI;
    }

    #[test]
    fn parses_sign() {
        assert_eq!("theorem".parse::<ViiSign>().unwrap(), ViiSign::Theorem);
        assert!("other".parse::<ViiSign>().is_err());
        let _ = c(0.0, 0.0);
    }
}
