use super::datum::InitialDatum;
use crate::error::{Error, Result};
use crate::matrix::{c, Mat2, C64, I};
use crate::ode::{Stepper, Tolerance};

#[derive(Debug, Clone, Copy)]
pub struct JostOptions {
    pub tol: Tolerance,
    /// Abscissa where both fundamental solutions are compared.
    pub x_match: f64,
}

impl Default for JostOptions {
    fn default() -> Self {
        JostOptions { tol: Tolerance::new(1e-11, 1e-13), x_match: 0.0 }
    }
}

/// μ₋ and μ₊ at the matching abscissa, together with the phase
/// p(x_match) = x_match − ∫_{x_match}^{L} (q − 1).
#[derive(Debug, Clone, Copy)]
pub struct JostPair {
    pub minus: Mat2,
    pub plus: Mat2,
    pub x_match: f64,
    pub phase: f64,
}

/// ω(z) = (z − 1/z)/4, the coefficient of p_x in the commutator term.
pub fn omega(z: C64) -> C64 {
    (z - z.inv()) * 0.25
}

fn check_z(z: C64) -> Result<()> {
    if !z.is_finite() || z.norm() < 1e-6 {
        return Err(Error::SpectralPoint { z: format!("{z}"), reason: "too close to the singularity z = 0".into() });
    }
    Ok(())
}

/// The coefficient matrix P(x, z) of the x-equation and q(x).
fn potential(datum: &InitialDatum, x: f64, z: C64) -> (Mat2, f64) {
    let (m, mx) = datum.fields_at(x);
    let q = (m * m + 1.0).sqrt();
    let off = I * (mx / (2.0 * q * q));
    let w = (z * (2.0 * q)).inv() * m;
    let p = Mat2::new(-I * m * w, off + w, off - w, I * m * w);
    (p, q)
}

fn pack(m: &Mat2) -> [f64; 8] {
    let a = &m.0;
    [a[0][0].re, a[0][0].im, a[0][1].re, a[0][1].im, a[1][0].re, a[1][0].im, a[1][1].re, a[1][1].im]
}

fn unpack(y: &[f64]) -> Mat2 {
    Mat2::new(c(y[0], y[1]), c(y[2], y[3]), c(y[4], y[5]), c(y[6], y[7]))
}

/// Right-hand side μ_x = −iωq[σ₃, μ] + Pμ.
fn matrix_rhs(datum: &InitialDatum, z: C64, x: f64, mu: &Mat2) -> (Mat2, f64) {
    let (p, q) = potential(datum, x, z);
    let s = -I * omega(z) * q;
    let a = &mu.0;
    // [σ₃, μ] has zero diagonal and ±2 times the off-diagonal entries
    let comm = Mat2::new(c(0.0, 0.0), a[0][1] * 2.0, -a[1][0] * 2.0, c(0.0, 0.0));
    (comm.scale(s) + p * *mu, q)
}

/// Integrates the x-equation of the transformed Lax pair from identity data
/// at x = −L (μ₋) and x = +L (μ₊) to the matching abscissa.
pub fn jost_integrate(datum: &InitialDatum, z: C64, opts: &JostOptions) -> Result<JostPair> {
    check_z(z)?;
    let l = datum.half_width;
    if opts.x_match.abs() >= l {
        return Err(Error::InvalidInput(format!("matching abscissa {} outside the window", opts.x_match)));
    }
    let fail = |e: Error| match e {
        Error::Integration { at, reason } => Error::Integration { at, reason: format!("{reason} (z = {z})") },
        other => other,
    };
    let minus_rhs = |x: f64, y: &[f64; 8]| pack(&matrix_rhs(datum, z, x, &unpack(y)).0);
    let y_minus = Stepper::<8>::new(opts.tol).advance(&minus_rhs, -l, pack(&Mat2::IDENTITY), opts.x_match).map_err(fail)?;

    // carry ∫ₓ^L (q − 1) along with μ₊
    let plus_rhs = |x: f64, y: &[f64; 9]| {
        let (d, q) = matrix_rhs(datum, z, x, &unpack(&y[..8]));
        let p = pack(&d);
        [p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], -(q - 1.0)]
    };
    let mut y0 = [0.0; 9];
    y0[..8].copy_from_slice(&pack(&Mat2::IDENTITY));
    let y_plus = Stepper::<9>::new(opts.tol).advance(&plus_rhs, l, y0, opts.x_match).map_err(fail)?;

    Ok(JostPair {
        minus: unpack(&y_minus),
        plus: unpack(&y_plus[..8]),
        x_match: opts.x_match,
        phase: opts.x_match - y_plus[8],
    })
}

/// a(z) for Im z ≥ 0 from the columns μ₋,₁ and μ₊,₂, each integrated in its
/// non-growing direction.
pub fn a_continued(datum: &InitialDatum, z: C64, opts: &JostOptions) -> Result<C64> {
    check_z(z)?;
    if z.im < 0.0 {
        return Err(Error::SpectralPoint { z: format!("{z}"), reason: "a(z) is continued to the upper half plane only".into() });
    }
    let l = datum.half_width;
    let om = omega(z);
    let column = |x: f64, y: &[f64; 4], first: bool| {
        let (p, q) = potential(datum, x, z);
        let v = [c(y[0], y[1]), c(y[2], y[3])];
        let mut d = [p.0[0][0] * v[0] + p.0[0][1] * v[1], p.0[1][0] * v[0] + p.0[1][1] * v[1]];
        if first {
            d[1] += I * om * (2.0 * q) * v[1];
        } else {
            d[0] -= I * om * (2.0 * q) * v[0];
        }
        [d[0].re, d[0].im, d[1].re, d[1].im]
    };
    let fail = |e: Error| match e {
        Error::Integration { at, reason } => Error::Integration { at, reason: format!("{reason} (z = {z})") },
        other => other,
    };
    let first = Stepper::<4>::new(opts.tol)
        .advance(&|x, y: &[f64; 4]| column(x, y, true), -l, [1.0, 0.0, 0.0, 0.0], opts.x_match)
        .map_err(fail)?;
    let second = Stepper::<4>::new(opts.tol)
        .advance(&|x, y: &[f64; 4]| column(x, y, false), l, [0.0, 0.0, 1.0, 0.0], opts.x_match)
        .map_err(fail)?;
    let (m11, m21) = (c(first[0], first[1]), c(first[2], first[3]));
    let (p12, p22) = (c(second[0], second[1]), c(second[2], second[3]));
    Ok(m11 * p22 - m21 * p12)
}

#[cfg(test)]
mod tests {
    use super::super::datum::{build_initial_datum, DatumSpec};
    use super::*;

    fn gaussian() -> InitialDatum {
        build_initial_datum(&DatumSpec::Gaussian { amplitude: 0.3, width: 2.0 }, 40.0, 2048).unwrap()
    }

    #[test]
    fn zero_datum_gives_identity() {
        let d = build_initial_datum(&DatumSpec::Zero, 40.0, 1024).unwrap();
        let j = jost_integrate(&d, c(1.7, 0.0), &JostOptions::default()).unwrap();
        assert!((j.minus - Mat2::IDENTITY).max_abs() < 1e-14);
        assert!((j.plus - Mat2::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn determinant_is_conserved() {
        let j = jost_integrate(&gaussian(), c(2.0, 0.0), &JostOptions::default()).unwrap();
        assert!((j.minus.det() - 1.0).norm() < 1e-8);
        assert!((j.plus.det() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn sigma2_conjugation_symmetry() {
        let j = jost_integrate(&gaussian(), c(0.7, 0.0), &JostOptions::default()).unwrap();
        let s2 = Mat2::sigma2();
        for mu in [j.minus, j.plus] {
            let image = s2 * mu.conj() * s2;
            assert!((image - mu).max_abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_origin() {
        assert!(jost_integrate(&gaussian(), c(1e-7, 0.0), &JostOptions::default()).is_err());
    }
}
