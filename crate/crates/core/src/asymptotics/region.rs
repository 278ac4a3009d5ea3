use crate::error::{Error, Result};
use std::fmt;

/// Left and right edges of the solitonic sector.
pub const XI_RIGHT: f64 = 2.0;
pub const XI_LEFT: f64 = -0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Region {
    /// Around x/t = 2.
    #[serde(rename = "P_I")]
    PI,
    /// Around x/t = −1/4.
    #[serde(rename = "P_II")]
    PII,
}

impl Region {
    pub fn center(self) -> f64 {
        match self {
            Region::PI => XI_RIGHT,
            Region::PII => XI_LEFT,
        }
    }

    /// The Painlevé variable s at ξ = y/t (or x/t).
    pub fn scaled_variable(self, xi: f64, t: f64) -> f64 {
        match self {
            Region::PI => 6f64.powf(-2.0 / 3.0) * (xi - XI_RIGHT) * t.powf(2.0 / 3.0),
            Region::PII => -(8.0f64 / 9.0).cbrt() * (xi - XI_LEFT) * t.powf(2.0 / 3.0),
        }
    }

    /// Which half of the transition zone ξ lies in.
    pub fn half_zone(self, xi: f64) -> HalfZone {
        match self {
            Region::PI if xi > XI_RIGHT => HalfZone::Outer,
            Region::PII if xi < XI_LEFT => HalfZone::Outer,
            _ => HalfZone::Inner,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::PI => "P_I",
            Region::PII => "P_II",
        })
    }
}

/// Inner: the solitonic side of the boundary, where the stationary points
/// are real. Outer: the dual side, evaluated by the same formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum HalfZone {
    Inner,
    Outer,
}

pub fn classify_region(x: f64, t: f64, c_cap: f64) -> Result<Option<Region>> {
    if !(t > 0.0 && t.is_finite()) || !x.is_finite() || !(c_cap > 0.0) {
        return Err(Error::InvalidInput(format!("classification needs t > 0, finite x and C > 0 (x = {x}, t = {t}, C = {c_cap})")));
    }
    let scale = t.powf(2.0 / 3.0);
    let xi = x / t;
    let in_one = (xi - XI_RIGHT).abs() * scale <= c_cap;
    let in_two = (xi - XI_LEFT).abs() * scale <= c_cap;
    match (in_one, in_two) {
        (true, true) => Err(Error::InvalidInput(format!("(x, t) = ({x}, {t}) lies in both transition regions; C = {c_cap} is too large"))),
        (true, false) => Ok(Some(Region::PI)),
        (false, true) => Ok(Some(Region::PII)),
        (false, false) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StationarySet {
    pub region: Region,
    /// z₁..z₄ in P_I, z₁..z₈ in P_II.
    pub points: Vec<f64>,
    pub s_plus: f64,
    pub s_minus: Option<f64>,
}

fn pair(s: f64) -> (f64, f64) {
    let root = (4.0 * s + 1.0).sqrt();
    (2.0 * s.sqrt() + root, -2.0 * s.sqrt() + root)
}

pub fn stationary_points(xi: f64, region: Region) -> Result<StationarySet> {
    let disc = 1.0 + 4.0 * xi;
    if !(disc >= 0.0) {
        return Err(Error::InvalidInput(format!("negative discriminant 1 + 4 xi = {disc}")));
    }
    if xi == 0.0 {
        return Err(Error::InvalidInput("xi = 0 has no finite stationary points".into()));
    }
    let s_plus = (-xi - 1.0 + disc.sqrt()) / (4.0 * xi);
    if !(s_plus >= 0.0) {
        return Err(Error::InvalidInput(format!("xi = {xi} gives s+ = {s_plus} < 0, the points leave the real line")));
    }
    match region {
        Region::PI => {
            let (z1, z2) = pair(s_plus);
            Ok(StationarySet { region, points: vec![z1, z2, -z2, -z1], s_plus, s_minus: None })
        }
        Region::PII => {
            let s_minus = (-xi - 1.0 - disc.sqrt()) / (4.0 * xi);
            if !(s_minus >= 0.0) {
                return Err(Error::InvalidInput(format!("xi = {xi} gives s- = {s_minus} < 0")));
            }
            let (z1, z4) = pair(s_plus);
            let (z2, z3) = pair(s_minus);
            Ok(StationarySet { region, points: vec![z1, z2, z3, z4, -z4, -z3, -z2, -z1], s_plus, s_minus: Some(s_minus) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;
    use crate::phase::theta;

    #[test]
    fn classification_examples() {
        assert_eq!(classify_region(200.0, 100.0, 1.0).unwrap(), Some(Region::PI));
        assert_eq!(classify_region(-25.0, 100.0, 1.0).unwrap(), Some(Region::PII));
        assert_eq!(classify_region(100.0, 100.0, 5.0).unwrap(), None);
        assert!(classify_region(0.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn merge_limits() {
        let one = stationary_points(2.0, Region::PI).unwrap();
        for (p, want) in one.points.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((p - want).abs() < 1e-12);
        }
        let two = stationary_points(-0.25, Region::PII).unwrap();
        let r3 = 3f64.sqrt();
        assert!((two.points[0] - (2.0 + r3)).abs() < 1e-12);
        assert!((two.points[3] - (2.0 - r3)).abs() < 1e-12);
    }

    #[test]
    fn region_one_at_unit_xi() {
        let set = stationary_points(1.0, Region::PI).unwrap();
        let s = (5f64.sqrt() - 2.0) / 4.0;
        assert!((set.points[0] - (2.0 * s.sqrt() + (4.0 * s + 1.0).sqrt())).abs() < 1e-14);
        assert!((set.points[0] * set.points[1] - 1.0).abs() < 1e-12);
        let h = 1e-5;
        for &z in &set.points {
            let d = (theta(c(z + h, 0.0), 1.0) - theta(c(z - h, 0.0), 1.0)) / (2.0 * h);
            assert!(d.norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_complex_points() {
        assert!(stationary_points(-0.3, Region::PII).is_err());
        assert!(stationary_points(2.5, Region::PI).is_err());
    }
}
