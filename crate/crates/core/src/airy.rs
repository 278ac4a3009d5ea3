//! Airy function Ai and its derivative on |s| ≤ 30.
//!
//! The power series is used on |s| ≤ 4.5. Outside, Ai is written through
//! Bessel functions of order 1/3 and 2/3 at ζ = (2/3)|s|^{3/2}, evaluated with
//! Steed's continued fractions.

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const SERIES_RADIUS: f64 = 4.5;
pub const MAX_ABS_ARG: f64 = 30.0;

/// Ai(0) and −Ai'(0).
const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Ai(s) and Ai'(s).
pub fn airy_ai(s: f64) -> Result<(f64, f64)> {
    if !s.is_finite() || s.abs() > MAX_ABS_ARG {
        return Err(Error::OutOfRange(format!("airy argument {s} outside [-30, 30]")));
    }
    if s.abs() <= SERIES_RADIUS {
        Ok(airy_series(s))
    } else {
        Ok(airy_large(s))
    }
}

/// Maclaurin branch. Accurate to ~1e-10 relative up to |s| = 4.5.
pub fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut tf) = (1.0, 1.0);
    let (mut g, mut tg) = (x, x);
    let (mut fp, mut tfp) = (x * x / 2.0, x * x / 2.0);
    let (mut gp, mut tgp) = (1.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        g += tg;
        gp += tgp;
        if k >= 2 {
            tfp *= x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp += tfp;
        }
        let small = |t: f64, v: f64| t.abs() <= 1e-18 * v.abs().max(1e-300);
        if k > 3 && small(tf, f) && small(tg, g) && small(tfp, fp) && small(tgp, gp) {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Bessel branch for |s| > 2 (used beyond the series radius).
pub fn airy_large(s: f64) -> (f64, f64) {
    let y = s.abs();
    let zeta = 2.0 / 3.0 * y * y.sqrt();
    if s > 0.0 {
        let (k, kp) = bessel_k(1.0 / 3.0, zeta);
        let ai = (y / 3.0).sqrt() * k / PI;
        let aip = (0.5 / (3.0 * y).sqrt() * k + (y / 3.0).sqrt() * y.sqrt() * kp) / PI;
        (ai, aip)
    } else {
        let (j, jp, yv, yp) = bessel_jy(1.0 / 3.0, zeta);
        let r3 = 3f64.sqrt();
        let comb = j - yv / r3;
        let combp = jp - yp / r3;
        let ai = 0.5 * y.sqrt() * comb;
        // d/dy [Ai(−y)] = −Ai'(−y)
        let d = 0.25 / y.sqrt() * comb + 0.5 * y * combp;
        (ai, -d)
    }
}

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;

/// K_ν(x) and K'_ν(x) for |ν| ≤ 1/2 and x ≥ 2 (Steed's CF2).
fn bessel_k(nu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - nu * nu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAXIT {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k * (nu + x + 0.5 - h) * xi;
    let kp = nu * xi * k - k1;
    (k, kp)
}

/// J_ν, J'_ν, Y_ν, Y'_ν for 0 ≤ ν < 1/2 and x ≥ 2 (CF1 plus complex CF2).
fn bessel_jy(nu: f64, x: f64) -> (f64, f64, f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;
    let mut isign = 1.0;
    let mut h = nu * xi;
    if h < FPMIN {
        h = FPMIN;
    }
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    let rjl = isign * FPMIN;
    let rjpl = h * rjl;
    let f = rjpl / rjl;

    let a0 = 0.25 - nu * nu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let fact = a0 * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    let mut a = a0;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        let fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let mut rjmu = (w / ((p - f) * gam + q)).sqrt();
    rjmu = rjmu.copysign(rjl);
    let rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let rjmup = f * rjmu;
    (rjmu, rjmup, rymu, rymup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        let (ai, aip) = airy_ai(0.0).unwrap();
        assert!((ai - 0.355_028_053_887_817).abs() < 1e-14);
        assert!((aip + 0.258_819_403_792_807).abs() < 1e-14);
    }

    #[test]
    fn branches_meet_at_series_radius() {
        for s in [SERIES_RADIUS, -SERIES_RADIUS] {
            let (a1, p1) = airy_series(s);
            let (a2, p2) = airy_large(s);
            assert!(((a1 - a2) / a2).abs() < 1e-10, "Ai at {s}: {a1} vs {a2}");
            assert!(((p1 - p2) / p2).abs() < 1e-10, "Ai' at {s}: {p1} vs {p2}");
        }
    }

    #[test]
    fn wronskian_with_airy_ode() {
        // Ai'' = s Ai checked by central differences of Ai'
        for s in [-12.0, -6.0, -2.0, 1.0, 5.0, 9.0] {
            let h = 1e-4;
            let (ai, _) = airy_ai(s).unwrap();
            let (_, pp) = airy_ai(s + h).unwrap();
            let (_, pm) = airy_ai(s - h).unwrap();
            let second = (pp - pm) / (2.0 * h);
            assert!((second - s * ai).abs() < 1e-7 * (1.0 + ai.abs()), "s={s}");
        }
    }

    #[test]
    fn known_large_argument_values() {
        // Ai(10) = 1.104753255289869e-10, Ai(-10) = 0.04024123848644319
        let (a, _) = airy_ai(10.0).unwrap();
        assert!(((a - 1.104_753_255_289_868_6e-10) / a).abs() < 1e-12);
        let (b, _) = airy_ai(-10.0).unwrap();
        assert!((b - 0.040_241_238_486_443_19).abs() < 1e-13);
    }

    #[test]
    fn rejects_outside_domain() {
        assert!(airy_ai(31.0).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }
}
