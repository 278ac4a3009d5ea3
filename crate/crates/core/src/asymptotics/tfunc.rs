use crate::error::{Error, Result};
use crate::matrix::{c, C64, I};
use crate::phase::theta;
use crate::scattering::ScatteringData;
use std::f64::consts::PI;

/// Side of the real axis for boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    None,
    Plus,
    Minus,
}

/// Split of the discrete spectrum at a given ξ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolePartition {
    /// Indices kept as poles of the soliton model.
    pub lambda: Vec<usize>,
    /// Indices with Im θ(ζ) > 0 outside Λ; these enter the T product.
    pub delta: Vec<usize>,
    pub radius: f64,
}

/// Λ = {n : |Im θ(ζ_n)| < ϱ/2} with
/// ϱ = ½ min{min Im ζ, min |ζ − i|, min |ζ_j − ζ_k|}.
pub fn partition_poles(zetas: &[C64], xi: f64) -> PolePartition {
    if zetas.is_empty() {
        return PolePartition::default();
    }
    let mut rho = zetas.iter().map(|z| z.im.min((z - I).norm())).fold(f64::INFINITY, f64::min);
    for (j, a) in zetas.iter().enumerate() {
        for b in &zetas[j + 1..] {
            rho = rho.min((a - b).norm());
        }
    }
    let rho = 0.5 * rho;
    let mut out = PolePartition { radius: rho, ..Default::default() };
    for (n, z) in zetas.iter().enumerate() {
        let im = theta(*z, xi).im;
        if im.abs() < 0.5 * rho {
            out.lambda.push(n);
        } else if im > 0.0 {
            out.delta.push(n);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct TFunctionContext<'a> {
    /// Eigenvalues entering the product.
    pub delta: Vec<C64>,
    pub data: &'a ScatteringData,
    /// Whether the Cauchy integral over ℝ is present (region II).
    pub with_integral: bool,
}

impl<'a> TFunctionContext<'a> {
    pub fn product(&self, z: C64) -> Result<C64> {
        let mut p = c(1.0, 0.0);
        for zeta in &self.delta {
            if (z - zeta).norm() < 1e-8 || (z - zeta.conj()).norm() < 1e-8 {
                return Err(Error::SpectralPoint { z: format!("{z}"), reason: format!("coincides with a zero or pole of T at {zeta}") });
            }
            p *= (z - zeta) / (zeta.conj().inv() * z - 1.0);
        }
        Ok(p)
    }
}

/// T(z) = Π_Δ (z − ζ)/(ζ̄⁻¹z − 1) · exp{−(1/2πi)∫ log(1 + |r|²)/(s − z) ds},
/// the exponential only when the context carries the integral.
pub fn t_function(ctx: &TFunctionContext, z: C64, boundary: Boundary) -> Result<C64> {
    if !z.is_finite() {
        return Err(Error::NonFinite("T-function argument".into()));
    }
    let product = ctx.product(z)?;
    if !ctx.with_integral || ctx.data.is_reflectionless() {
        return Ok(product);
    }
    let exponent = match boundary {
        Boundary::None => {
            if z.im == 0.0 {
                return Err(Error::InvalidInput("T on the real axis needs a boundary side".into()));
            }
            -ctx.data.cauchy_log_integral(z) / (2.0 * PI * I)
        }
        Boundary::Plus | Boundary::Minus => {
            if z.im != 0.0 {
                return Err(Error::InvalidInput("boundary values are defined on the real axis only".into()));
            }
            let side = if boundary == Boundary::Plus { 1.0 } else { -1.0 };
            let pv = ctx.data.principal_value(z.re);
            let g = ctx.data.log_weight_at(z.re);
            c(-side * 0.5 * g, 0.0) - pv / (2.0 * PI * I)
        }
    };
    Ok(product * exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::SpectralGrid;

    fn bump_data() -> ScatteringData {
        let g = SpectralGrid::new(24.0, 301).unwrap();
        ScatteringData::from_reflection(g, |z| c(0.4 * (z + 1.0 / z) / (z * z + 1.0 / (z * z) + 2.5), 0.1 * (z - 1.0 / z) / (z.powi(4) + 3.0 + z.powi(-4))))
    }

    #[test]
    fn trivial_cases() {
        let g = SpectralGrid::new(8.0, 101).unwrap();
        let data = ScatteringData::reflectionless(g);
        for with_integral in [false, true] {
            let ctx = TFunctionContext { delta: vec![], data: &data, with_integral };
            assert_eq!(t_function(&ctx, c(0.3, 0.7), Boundary::None).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn plemelj_jump() {
        let data = bump_data();
        let ctx = TFunctionContext { delta: vec![], data: &data, with_integral: true };
        for x in [0.45, 1.0, 2.0 + 3f64.sqrt(), -1.7] {
            let plus = t_function(&ctx, c(x, 0.0), Boundary::Plus).unwrap();
            let minus = t_function(&ctx, c(x, 0.0), Boundary::Minus).unwrap();
            let g = data.log_weight_at(x);
            assert!((plus / minus - (-g).exp()).norm() < 1e-12);
            // off-axis approach, extrapolated in ε
            let limit = |sign: f64| {
                let e1 = t_function(&ctx, c(x, sign * 1e-4), Boundary::None).unwrap();
                let e2 = t_function(&ctx, c(x, sign * 2e-4), Boundary::None).unwrap();
                2.0 * e1 - e2
            };
            assert!((limit(1.0) - plus).norm() < 1e-6, "{} vs {plus}", limit(1.0));
            assert!((limit(-1.0) - minus).norm() < 1e-6);
        }
    }

    #[test]
    fn product_factor_vanishes_at_eigenvalue() {
        let g = SpectralGrid::new(8.0, 101).unwrap();
        let data = ScatteringData::reflectionless(g);
        let zeta = c(0.3, 0.9);
        let ctx = TFunctionContext { delta: vec![zeta], data: &data, with_integral: false };
        assert!(t_function(&ctx, zeta, Boundary::None).is_err());
        let near = t_function(&ctx, zeta + 1e-6, Boundary::None).unwrap();
        assert!(near.norm() < 1e-5);
    }

    #[test]
    fn partition_of_a_circle_pair() {
        let z = C64::from_polar(1.0, PI / 6.0);
        // on the unit circle θ is imaginary and vanishes at ξ = 2/cos²φ
        let speed = 2.0 / (PI / 6.0).cos().powi(2);
        let p = partition_poles(&[z, -z.conj()], speed);
        assert_eq!(p.lambda, vec![0, 1]);
        let far = partition_poles(&[z, -z.conj()], -0.25);
        assert!(far.lambda.is_empty());
    }
}
