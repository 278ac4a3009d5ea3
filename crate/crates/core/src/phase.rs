//! The phase function θ(z; ξ) of the jump matrix and its helpers.

use crate::error::{Error, Result};
use crate::matrix::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseContext {
    /// ξ = y/t.
    pub xi: f64,
    pub t: f64,
}

impl PhaseContext {
    pub fn new(xi: f64, t: f64) -> Result<Self> {
        if !xi.is_finite() || !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidInput(format!("phase context needs finite xi and t > 0, got xi = {xi}, t = {t}")));
        }
        Ok(PhaseContext { xi, t })
    }

    pub fn k(&self, z: C64) -> C64 {
        I * 0.5 * (z - z.inv())
    }

    pub fn lambda(&self, z: C64) -> C64 {
        0.5 * (z + z.inv())
    }

    pub fn theta(&self, z: C64) -> Result<C64> {
        check_phase_point(z)?;
        Ok(theta(z, self.xi))
    }

    pub fn theta_prime(&self, z: C64) -> Result<C64> {
        check_phase_point(z)?;
        Ok(theta_prime(z, self.xi))
    }
}

fn check_phase_point(z: C64) -> Result<()> {
    if !z.is_finite() || z.norm() < 1e-9 || (z - I).norm() < 1e-9 || (z + I).norm() < 1e-9 {
        return Err(Error::SpectralPoint { z: format!("{z}"), reason: "theta is singular at 0 and ±i".into() });
    }
    Ok(())
}

/// θ(z; ξ) = −¼(z − 1/z)[ξ − 8/(z + 1/z)²], unchecked.
pub fn theta(z: C64, xi: f64) -> C64 {
    let a = z - z.inv();
    let b = z + z.inv();
    -0.25 * a * (xi - 8.0 / (b * b))
}

pub fn theta_prime(z: C64, xi: f64) -> C64 {
    let zi2 = (z * z).inv();
    let a = z - z.inv();
    let b = z + z.inv();
    -0.25 * ((1.0 + zi2) * (xi - 8.0 / (b * b)) + a * 16.0 * (1.0 - zi2) / (b * b * b))
}

/// t·θ(z; y/t) written so that t = 0 is allowed.
pub fn scaled_phase(z: C64, y: f64, t: f64) -> C64 {
    let a = z - z.inv();
    let b = z + z.inv();
    -0.25 * a * (y - 8.0 * t / (b * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn vanishes_at_unity() {
        for xi in [-1.0, 0.3, 2.0] {
            assert_eq!(theta(c(1.0, 0.0), xi).norm(), 0.0);
            assert_eq!(theta(c(-1.0, 0.0), xi).norm(), 0.0);
        }
    }

    #[test]
    fn merge_point_value() {
        let z = c(2.0 + 3f64.sqrt(), 0.0);
        let v = theta(z, -0.25);
        assert!((v.re - 3.0 * 3f64.sqrt() / 8.0).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-3;
        let f = |z: C64| theta(z, 0.7);
        for z in [c(0.4, 0.0), c(3.1, 0.0), c(0.5, 0.7)] {
            let fd = (8.0 * (f(z + h) - f(z - h)) - (f(z + 2.0 * h) - f(z - 2.0 * h))) / (12.0 * h);
            assert!((fd - theta_prime(z, 0.7)).norm() < 1e-9);
        }
    }

    #[test]
    fn scaled_phase_is_t_theta() {
        let z = c(0.8, 0.9);
        let (y, t) = (3.0, 1.7);
        assert!((scaled_phase(z, y, t) - theta(z, y / t) * t).norm() < 1e-13);
    }

    #[test]
    fn context_rejects_singular_points() {
        let ctx = PhaseContext::new(0.0, 1.0).unwrap();
        assert!(ctx.theta(I).is_err());
        assert!(ctx.theta(c(0.0, 0.0)).is_err());
    }
}
