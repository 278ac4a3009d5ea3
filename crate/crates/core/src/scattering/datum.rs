use crate::error::{Error, Result};
use crate::interp::UniformStencil;
use crate::spectral::PeriodicGrid;
use std::path::{Path, PathBuf};

/// Largest |u0| allowed at the ends of the window.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Stencil width for evaluating m and m_x between grid nodes.
const FIELD_STENCIL: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum DatumSpec {
    Zero,
    Gaussian { amplitude: f64, width: f64 },
    Sech { amplitude: f64, width: f64 },
    Table(PathBuf),
}

impl DatumSpec {
    /// Parses `zero`, `gaussian(A,w)`, `sech(A,w)` or `table(path)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "zero" {
            return Ok(DatumSpec::Zero);
        }
        let open = t.find('(').ok_or_else(|| Error::InvalidInput(format!("bad datum `{t}`")))?;
        if !t.ends_with(')') {
            return Err(Error::InvalidInput(format!("bad datum `{t}`")));
        }
        let name = t[..open].trim();
        let inner = &t[open + 1..t.len() - 1];
        if name == "table" {
            return Ok(DatumSpec::Table(PathBuf::from(inner.trim())));
        }
        let args: Vec<f64> = inner
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidInput(format!("bad datum arguments in `{t}`")))?;
        if args.len() != 2 || args[1] <= 0.0 || !args.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidInput(format!("`{t}` needs an amplitude and a positive width")));
        }
        match name {
            "gaussian" => Ok(DatumSpec::Gaussian { amplitude: args[0], width: args[1] }),
            "sech" => Ok(DatumSpec::Sech { amplitude: args[0], width: args[1] }),
            _ => Err(Error::InvalidInput(format!("unknown datum `{name}`"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DatumSpec::Zero => "zero".into(),
            DatumSpec::Gaussian { amplitude, width } => format!("gaussian({amplitude},{width})"),
            DatumSpec::Sech { amplitude, width } => format!("sech({amplitude},{width})"),
            DatumSpec::Table(p) => format!("table({})", p.display()),
        }
    }

    fn analytic(&self, x: f64) -> Option<f64> {
        match *self {
            DatumSpec::Zero => Some(0.0),
            DatumSpec::Gaussian { amplitude, width } => Some(amplitude * (-(x / width).powi(2)).exp()),
            DatumSpec::Sech { amplitude, width } => Some(amplitude / (x / width).cosh()),
            DatumSpec::Table(_) => None,
        }
    }
}

/// Sampled initial datum u0 on x_j = −L + 2L j/N with m = u − u_xx,
/// q = √(m² + 1) and the running integrals of q − 1.
#[derive(Debug, Clone)]
pub struct InitialDatum {
    pub xs: Vec<f64>,
    pub u0: Vec<f64>,
    pub m0: Vec<f64>,
    pub m0_x: Vec<f64>,
    pub q: Vec<f64>,
    /// ∫_{−L}^{x} (q − 1).
    pub c_minus: Vec<f64>,
    /// ∫_{x}^{L} (q − 1), nonincreasing in x.
    pub c_plus: Vec<f64>,
    pub half_width: f64,
    pub n: usize,
    pub grid: PeriodicGrid,
}

pub fn build_initial_datum(spec: &DatumSpec, half_width: f64, n: usize) -> Result<InitialDatum> {
    validate_grid(half_width, n)?;
    let grid = PeriodicGrid::new(half_width, n);
    let xs = grid.nodes();
    let u0 = match spec {
        DatumSpec::Table(path) => {
            let (tx, tu) = read_table(path)?;
            xs.iter().map(|&x| table_value(&tx, &tu, x)).collect()
        }
        _ => {
            for x in [-half_width, half_width] {
                let v = spec.analytic(x).unwrap();
                if v.abs() >= BOUNDARY_TOL {
                    return Err(Error::NonDecayingDatum { x, magnitude: v.abs() });
                }
            }
            xs.iter().map(|&x| spec.analytic(x).unwrap()).collect::<Vec<f64>>()
        }
    };
    InitialDatum::from_samples(grid, u0)
}

fn validate_grid(half_width: f64, n: usize) -> Result<()> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidInput(format!("half-width must be positive, got {half_width}")));
    }
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!("N must be a power of two >= 256, got {n}")));
    }
    Ok(())
}

impl InitialDatum {
    /// Builds the datum from u samples on an existing grid.
    pub fn from_samples(grid: PeriodicGrid, u0: Vec<f64>) -> Result<Self> {
        if u0.len() != grid.n {
            return Err(Error::InvalidInput("sample count does not match the grid".into()));
        }
        if let Some(i) = u0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("u0 at x = {}", grid.nodes()[i])));
        }
        let edge = u0[0].abs().max(u0[grid.n - 1].abs());
        if edge >= BOUNDARY_TOL {
            let x = if u0[0].abs() >= u0[grid.n - 1].abs() { -grid.half_width } else { grid.nodes()[grid.n - 1] };
            return Err(Error::NonDecayingDatum { x, magnitude: edge });
        }
        let xs = grid.nodes();
        let m0 = grid.apply(&u0, |k| (1.0 + k * k).into());
        let m0_x = grid.derivative(&m0);
        let q: Vec<f64> = m0.iter().map(|m| (m * m + 1.0).sqrt()).collect();

        // cumulative trapezoid with the Euler–Maclaurin end correction
        let h = grid.spacing();
        let f: Vec<f64> = q.iter().map(|q| q - 1.0).collect();
        let df: Vec<f64> = (0..grid.n).map(|j| m0[j] * m0_x[j] / q[j]).collect();
        let mut c_minus = vec![0.0; grid.n];
        let mut trap = 0.0;
        for j in 1..grid.n {
            trap += 0.5 * h * (f[j - 1] + f[j]);
            c_minus[j] = trap - h * h / 12.0 * (df[j] - df[0]);
        }
        let total = h * f.iter().sum::<f64>();
        let c_plus = c_minus.iter().map(|c| total - c).collect();

        Ok(InitialDatum { xs, u0, m0, m0_x, q, c_minus, c_plus, half_width: grid.half_width, n: grid.n, grid })
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    /// ∫ (q − 1) over the window (spectrally accurate for decaying data).
    pub fn mass_defect(&self) -> f64 {
        self.spacing() * self.q.iter().map(|q| q - 1.0).sum::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.u0.iter().all(|&u| u == 0.0)
    }

    /// m and m_x at an arbitrary abscissa, by local interpolation of the
    /// periodic samples.
    pub fn fields_at(&self, x: f64) -> (f64, f64) {
        let st = UniformStencil { u0: -self.half_width, du: self.spacing(), len: self.n, order: FIELD_STENCIL, wrap: true };
        let (m, _) = st.eval_real(&self.m0, x);
        let (mx, _) = st.eval_real(&self.m0_x, x);
        (m, mx)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u0\n");
        for (x, u) in self.xs.iter().zip(&self.u0) {
            out.push_str(&format!("{:.17e},{:.17e}\n", x, u));
        }
        out
    }
}

/// Reads a two-column `x,u0` CSV with strictly increasing x.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && cols.first().is_some_and(|c| c.parse::<f64>().is_err()) {
            if cols != ["x", "u0"] {
                return Err(Error::InvalidInput(format!("datum table header must be `x,u0`, got `{line}`")));
            }
            continue;
        }
        if cols.len() != 2 {
            return Err(Error::InvalidInput(format!("datum table line {}: expected 2 columns", lineno + 1)));
        }
        let x: f64 = cols[0].parse().map_err(|_| Error::InvalidInput(format!("line {}: bad x", lineno + 1)))?;
        let u: f64 = cols[1].parse().map_err(|_| Error::InvalidInput(format!("line {}: bad u0", lineno + 1)))?;
        if !x.is_finite() || !u.is_finite() {
            return Err(Error::NonFinite(format!("datum table line {}", lineno + 1)));
        }
        if let Some(&last) = xs.last() {
            if x <= last {
                return Err(Error::InvalidInput(format!("datum table x not strictly increasing at line {}", lineno + 1)));
            }
        }
        xs.push(x);
        us.push(u);
    }
    if xs.len() < 4 {
        return Err(Error::InvalidInput("datum table needs at least 4 rows".into()));
    }
    Ok((xs, us))
}

/// Cubic Lagrange interpolation through the four nearest table rows; zero
/// outside the tabulated range.
fn table_value(tx: &[f64], tu: &[f64], x: f64) -> f64 {
    if x < tx[0] || x > tx[tx.len() - 1] {
        return 0.0;
    }
    let j = tx.partition_point(|&v| v <= x).saturating_sub(1);
    let start = j.saturating_sub(1).min(tx.len() - 4);
    let mut v = 0.0;
    for k in start..start + 4 {
        let mut w = 1.0;
        for l in start..start + 4 {
            if l != k {
                w *= (x - tx[l]) / (tx[k] - tx[l]);
            }
        }
        v += w * tu[k];
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_datum_is_trivial() {
        let d = build_initial_datum(&DatumSpec::Zero, 40.0, 1024).unwrap();
        assert!(d.m0.iter().all(|&m| m == 0.0));
        assert!(d.q.iter().all(|&q| q == 1.0));
        assert!(d.c_minus.iter().chain(&d.c_plus).all(|&c| c == 0.0));
    }

    #[test]
    fn gaussian_m_matches_finite_differences() {
        let d = build_initial_datum(&DatumSpec::Gaussian { amplitude: 0.5, width: 2.0 }, 40.0, 2048).unwrap();
        let h = 1e-3;
        let u = |x: f64| 0.5 * (-(x / 2.0f64).powi(2)).exp();
        let mut max_fd: f64 = 0.0;
        let mut max_sp: f64 = 0.0;
        for (j, &x) in d.xs.iter().enumerate() {
            let uxx = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
            max_fd = max_fd.max(((u(x) - uxx).powi(2) + 1.0).sqrt() - 1.0);
            max_sp = max_sp.max(d.q[j] - 1.0);
            assert!(d.q[j] >= 1.0);
        }
        assert!((max_fd - max_sp).abs() < 1e-6);
    }

    #[test]
    fn sech_mass_defect_converges() {
        let spec = DatumSpec::Sech { amplitude: 1.0, width: 1.0 };
        let a = build_initial_datum(&spec, 40.0, 1024).unwrap().mass_defect();
        let b = build_initial_datum(&spec, 40.0, 2048).unwrap().mass_defect();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn running_integrals_are_consistent() {
        let d = build_initial_datum(&DatumSpec::Gaussian { amplitude: 0.3, width: 2.0 }, 40.0, 2048).unwrap();
        let total = d.mass_defect();
        for j in 0..d.n {
            assert!((d.c_minus[j] + d.c_plus[j] - total).abs() < 1e-12);
        }
        assert!(d.c_plus.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn rejects_wide_bump() {
        let err = build_initial_datum(&DatumSpec::Gaussian { amplitude: 1.0, width: 20.0 }, 40.0, 1024).unwrap_err();
        assert!(matches!(err, Error::NonDecayingDatum { .. }));
        assert!(build_initial_datum(&DatumSpec::Zero, 40.0, 1000).is_err());
    }

    #[test]
    fn parses_descriptors() {
        assert_eq!(DatumSpec::parse("gaussian(0.3, 2)").unwrap(), DatumSpec::Gaussian { amplitude: 0.3, width: 2.0 });
        assert_eq!(DatumSpec::parse("zero").unwrap(), DatumSpec::Zero);
        assert!(DatumSpec::parse("bump(1,2)").is_err());
        assert!(DatumSpec::parse("sech(1,-2)").is_err());
    }

    #[test]
    fn table_round_trip() {
        let xs: Vec<f64> = (0..801).map(|i| -40.0 + 0.1 * i as f64).collect();
        let text: String = std::iter::once("x,u0\n".to_string())
            .chain(xs.iter().map(|x| format!("{x},{}\n", 0.3 * (-(x / 2.0f64).powi(2)).exp())))
            .collect();
        let (tx, tu) = parse_table(&text).unwrap();
        assert!((table_value(&tx, &tu, 0.05) - 0.3 * (-(0.025f64).powi(2)).exp()).abs() < 1e-5);
        assert!(parse_table("x,u0\n1,0\n0,0\n2,0\n3,0\n").is_err());
    }
}
