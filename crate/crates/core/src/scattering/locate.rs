use super::data::DiscreteEigen;
use super::datum::InitialDatum;
use super::jost::{a_continued, JostOptions};
use crate::error::{Error, Result};
use crate::matrix::{c, C64};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) || im_min <= 0.0 {
            return Err(Error::InvalidInput("search box must be a nondegenerate rectangle in Im z > 0".into()));
        }
        Ok(SearchBox { re_min, re_max, im_min, im_max })
    }

    fn corners(&self) -> [C64; 4] {
        [
            c(self.re_min, self.im_min),
            c(self.re_max, self.im_min),
            c(self.re_max, self.im_max),
            c(self.re_min, self.im_max),
        ]
    }

    fn quarters(&self) -> [SearchBox; 4] {
        let rm = 0.5 * (self.re_min + self.re_max);
        let im = 0.5 * (self.im_min + self.im_max);
        [
            SearchBox { re_min: self.re_min, re_max: rm, im_min: self.im_min, im_max: im },
            SearchBox { re_min: rm, re_max: self.re_max, im_min: self.im_min, im_max: im },
            SearchBox { re_min: rm, re_max: self.re_max, im_min: im, im_max: self.im_max },
            SearchBox { re_min: self.re_min, re_max: rm, im_min: im, im_max: self.im_max },
        ]
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn center(&self) -> C64 {
        c(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocatorOptions {
    /// Initial samples per edge.
    pub edge_samples: usize,
    /// Largest accepted phase step between neighbouring boundary samples.
    pub max_phase_step: f64,
    /// Maximum bisections of one edge segment.
    pub max_edge_depth: usize,
    /// Maximum box subdivision depth.
    pub max_box_depth: usize,
    pub root_tol: f64,
}

impl Default for LocatorOptions {
    fn default() -> Self {
        LocatorOptions { edge_samples: 16, max_phase_step: PI / 4.0, max_edge_depth: 12, max_box_depth: 8, root_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LocatorReport {
    pub zeros: Vec<C64>,
    pub unresolved: Vec<SearchBox>,
}

/// Winding number of `f` around the boundary of `b`, with adaptive edge
/// refinement wherever the argument jumps by more than the allowed step.
pub fn winding_number<F>(f: &F, b: &SearchBox, opts: &LocatorOptions) -> Result<Option<i64>>
where
    F: Fn(C64) -> Result<C64>,
{
    let corners = b.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let (p, q) = (corners[e], corners[(e + 1) % 4]);
        let mut prev = f(p)?;
        if prev.norm() == 0.0 {
            return Ok(None);
        }
        for k in 1..=opts.edge_samples {
            let t1 = k as f64 / opts.edge_samples as f64;
            let t0 = (k - 1) as f64 / opts.edge_samples as f64;
            match edge_phase(f, p, q, t0, t1, prev, opts, 0)? {
                Some((dphi, last)) => {
                    total += dphi;
                    prev = last;
                }
                None => return Ok(None),
            }
        }
    }
    Ok(Some((total / (2.0 * PI)).round() as i64))
}

#[allow(clippy::too_many_arguments)]
fn edge_phase<F>(f: &F, p: C64, q: C64, t0: f64, t1: f64, v0: C64, opts: &LocatorOptions, depth: usize) -> Result<Option<(f64, C64)>>
where
    F: Fn(C64) -> Result<C64>,
{
    let v1 = f(p + (q - p) * t1)?;
    if v1.norm() == 0.0 {
        return Ok(None);
    }
    let step = (v1 / v0).arg();
    if step.abs() <= opts.max_phase_step {
        return Ok(Some((step, v1)));
    }
    if depth >= opts.max_edge_depth {
        return Ok(None);
    }
    let tm = 0.5 * (t0 + t1);
    let Some((d1, vm)) = edge_phase(f, p, q, t0, tm, v0, opts, depth + 1)? else { return Ok(None) };
    let Some((d2, v1)) = edge_phase(f, p, q, tm, t1, vm, opts, depth + 1)? else { return Ok(None) };
    Ok(Some((d1 + d2, v1)))
}

/// Zeros of `f` in `b` by recursive argument-principle counting followed by
/// secant polishing.
pub fn locate_zeros<F>(f: &F, b: &SearchBox, opts: &LocatorOptions) -> Result<LocatorReport>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut report = LocatorReport::default();
    search(f, b, opts, 0, &mut report)?;
    Ok(report)
}

fn search<F>(f: &F, b: &SearchBox, opts: &LocatorOptions, depth: usize, report: &mut LocatorReport) -> Result<()>
where
    F: Fn(C64) -> Result<C64>,
{
    let w = match winding_number(f, b, opts)? {
        Some(w) => w,
        None => {
            // a zero on or near the boundary: shift the split by subdividing
            if depth < opts.max_box_depth {
                for q in b.quarters() {
                    search(f, &q, opts, depth + 1, report)?;
                }
            } else {
                report.unresolved.push(*b);
            }
            return Ok(());
        }
    };
    if w == 0 {
        return Ok(());
    }
    if w < 0 {
        report.unresolved.push(*b);
        return Ok(());
    }
    if w == 1 {
        if let Some(z) = polish(f, b, opts)? {
            report.zeros.push(z);
            return Ok(());
        }
    }
    if depth >= opts.max_box_depth {
        report.unresolved.push(*b);
        return Ok(());
    }
    for q in b.quarters() {
        search(f, &q, opts, depth + 1, report)?;
    }
    Ok(())
}

fn polish<F>(f: &F, b: &SearchBox, opts: &LocatorOptions) -> Result<Option<C64>>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut z0 = b.center();
    let mut z1 = z0 + c(0.01, 0.01) * b.diameter();
    let mut f0 = f(z0)?;
    let mut f1 = f(z1)?;
    for _ in 0..60 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let z2 = z1 - f1 * (z1 - z0) / denom;
        if !z2.is_finite() || z2.im <= 0.0 {
            return Ok(None);
        }
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f(z1)?;
        if (z1 - z0).norm() < opts.root_tol * (1.0 + z1.norm()) || f1.norm() == 0.0 {
            let inside = z1.re >= b.re_min - 1e-9 && z1.re <= b.re_max + 1e-9 && z1.im >= b.im_min - 1e-9 && z1.im <= b.im_max + 1e-9;
            return Ok(if inside { Some(z1) } else { None });
        }
    }
    Ok(None)
}

/// Adds the partners −ζ̄ and, off the unit circle, 1/ζ̄ and −1/ζ; removes
/// duplicates within `tol`.
pub fn close_orbit(zeros: &[C64], tol: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    let mut push = |z: C64| {
        if !out.iter().any(|w| (w - z).norm() < tol) {
            out.push(z);
        }
    };
    for &z in zeros {
        push(z);
        push(-z.conj());
        if (z.norm() - 1.0).abs() > tol {
            push(z.conj().inv());
            push(-z.inv());
        }
    }
    out
}

/// Zeros of the continued a(z) inside the box, closed under the orbit symmetries.
pub fn locate_discrete_spectrum(datum: &InitialDatum, search_box: &SearchBox, jost: &JostOptions, opts: &LocatorOptions) -> Result<(Vec<DiscreteEigen>, Vec<SearchBox>)> {
    let corner_min = search_box.corners().iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
    if corner_min < 1e-3 || (search_box.re_min <= 0.0 && search_box.re_max >= 0.0 && search_box.im_min < 1e-3) {
        return Err(Error::InvalidInput("search box must stay away from z = 0".into()));
    }
    let f = |z: C64| a_continued(datum, z, jost);
    let report = locate_zeros(&f, search_box, opts)?;
    let zeros = close_orbit(&report.zeros, 1e-8);
    Ok((zeros.into_iter().map(|zeta| DiscreteEigen { zeta, norming: None }).collect(), report.unresolved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadruple_stub(zeta: C64) -> impl Fn(C64) -> Result<C64> {
        let roots = close_orbit(&[zeta], 1e-12);
        move |z: C64| Ok(roots.iter().fold(c(1.0, 0.0), |acc, r| acc * (z - r) / (z - r.conj())))
    }

    #[test]
    fn recovers_a_quadruple() {
        let zeta = c(0.8, 1.4);
        let f = quadruple_stub(zeta);
        let b = SearchBox::new(-3.0, 3.0, 0.05, 3.0).unwrap();
        let rep = locate_zeros(&f, &b, &LocatorOptions::default()).unwrap();
        let found = close_orbit(&rep.zeros, 1e-8);
        assert_eq!(found.len(), 4, "{found:?}");
        for r in close_orbit(&[zeta], 1e-12) {
            assert!(found.iter().any(|w| (w - r).norm() < 1e-8), "missing {r}");
        }
    }

    #[test]
    fn winding_zero_without_roots() {
        let f = |z: C64| Ok(z * z + 4.0);
        let b = SearchBox::new(-1.0, 1.0, 0.1, 1.5).unwrap();
        assert_eq!(winding_number(&f, &b, &LocatorOptions::default()).unwrap(), Some(0));
    }

    #[test]
    fn orbit_on_unit_circle_is_a_pair() {
        let z = C64::from_polar(1.0, PI / 6.0);
        assert_eq!(close_orbit(&[z], 1e-10).len(), 2);
    }
}
