//! Uniform 1D grids, sampled wave functions and evolution traces.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

/// Uniform grid with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidArgument(format!("grid needs finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < MIN_POINTS {
            return Err(Error::InvalidArgument(format!("grid needs at least {MIN_POINTS} points, got {n}")));
        }
        Ok(Grid { x_min, x_max, n })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        // pin the last node to x_max exactly
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} samples for a {}-point grid", samples.len(), grid.n)));
        }
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("wave function has non-finite samples".into()));
        }
        Ok(WaveFunction { grid, samples })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid, mut f: F) -> Result<Self> {
        let samples = (0..grid.n).map(|i| f(grid.x(i))).collect();
        WaveFunction::new(grid, samples)
    }

    pub fn zeros(grid: Grid) -> Self {
        WaveFunction { grid, samples: vec![Complex64::new(0.0, 0.0); grid.n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn n_points(&self) -> usize {
        self.grid.n
    }

    pub fn x_min(&self) -> f64 {
        self.grid.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.grid.x_max
    }

    /// `Σ|ψ_i|² Δx`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Discrete inner product `Σ conj(self_i) other_i Δx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.check_grid(other.grid())?;
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }

    /// `Σ x_i |ψ_i|² Δx`.
    pub fn mean_position(&self) -> f64 {
        self.moment(1)
    }

    /// `Σ x_i² |ψ_i|² Δx`.
    pub fn second_moment(&self) -> f64 {
        self.moment(2)
    }

    fn moment(&self, k: i32) -> f64 {
        let dx = self.grid.dx();
        self.samples.iter().enumerate().map(|(i, z)| self.grid.x(i).powi(k) * z.norm_sqr()).sum::<f64>() * dx
    }

    pub fn scale(&self, a: Complex64) -> WaveFunction {
        WaveFunction { grid: self.grid, samples: self.samples.iter().map(|z| z * a).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &WaveFunction, b: Complex64) -> Result<WaveFunction> {
        self.check_grid(other.grid())?;
        Ok(WaveFunction {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// Discrete L² distance `‖self − other‖`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))?.norm())
    }

    pub fn check_grid(&self, other: &Grid) -> Result<()> {
        if self.grid.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grid [{}, {}] x {} vs [{}, {}] x {}",
                self.grid.x_min, self.grid.x_max, self.grid.n, other.x_min, other.x_max, other.n
            )))
        }
    }

    /// Snapshot CSV: header `x,re,im`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re,im")?;
        for (i, z) in self.samples.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", self.grid.x(i), z.re, z.im)?;
        }
        Ok(())
    }
}

/// Parse a snapshot CSV as written by [`WaveFunction::write_csv`].
///
/// The abscissae must form a uniform grid (checked to a relative 1e-9).
pub fn parse_snapshot_csv(text: &str) -> Result<WaveFunction> {
    let mut xs = Vec::new();
    let mut samples = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x,re,im" => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                key: "header".into(),
                reason: format!("expected `x,re,im`, found `{}`", h.trim()),
            })
        }
        None => return Err(Error::Parse { line: 1, key: "header".into(), reason: "empty snapshot".into() }),
    }
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                key: "row".into(),
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (k, (f, name)) in fields.iter().zip(["x", "re", "im"]).enumerate() {
            vals[k] = f.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                line: idx + 1,
                key: name.into(),
                reason: format!("`{}` is not a finite number", f.trim()),
            })?;
        }
        xs.push(vals[0]);
        samples.push(Complex64::new(vals[1], vals[2]));
    }
    if xs.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_POINTS, got: xs.len() });
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let tol = 1e-9 * (grid.x_max - grid.x_min);
    for (i, &x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > tol {
            return Err(Error::Parse {
                line: i + 2,
                key: "x".into(),
                reason: "abscissae are not uniformly spaced".into(),
            });
        }
    }
    WaveFunction::new(grid, samples)
}

/// Read a snapshot CSV from a buffered reader.
pub fn read_snapshot_csv<R: BufRead>(mut r: R) -> Result<WaveFunction> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_snapshot_csv(&text)
}

/// Derived quantities recorded alongside each snapshot.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Position,
    SecondMoment,
    /// `⟨φ_k|ψ⟩` for the k-th eigenfunction of the decomposition in use.
    ModeAmplitude(usize),
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::Position => "x_mean".into(),
            Observable::SecondMoment => "x2".into(),
            Observable::ModeAmplitude(k) => format!("mode{k}"),
        }
    }

    pub fn parse(s: &str) -> Option<Observable> {
        match s {
            "x_mean" => Some(Observable::Position),
            "x2" => Some(Observable::SecondMoment),
            _ => s.strip_prefix("mode").and_then(|k| k.parse().ok()).map(Observable::ModeAmplitude),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub snapshots: Vec<WaveFunction>,
    pub norms: Vec<f64>,
    pub observables: BTreeMap<String, Vec<Complex64>>,
}

impl EvolutionTrace {
    pub fn empty() -> Self {
        EvolutionTrace { times: Vec::new(), snapshots: Vec::new(), norms: Vec::new(), observables: BTreeMap::new() }
    }

    pub fn push(&mut self, t: f64, psi: WaveFunction, extra: Vec<(String, Complex64)>) {
        self.times.push(t);
        self.norms.push(psi.norm());
        for (k, v) in extra {
            self.observables.entry(k).or_default().push(v);
        }
        self.snapshots.push(psi);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trace CSV: `t,norm` then `<name>_re,<name>_im` per observable.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "t,norm")?;
        for k in self.observables.keys() {
            write!(w, ",{k}_re,{k}_im")?;
        }
        writeln!(w)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(w, "{:.16e},{:.16e}", t, self.norms[i])?;
            for v in self.observables.values() {
                write!(w, ",{:.16e},{:.16e}", v[i].re, v[i].im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Evaluate the requested observables on a snapshot.
pub(crate) fn observe(
    psi: &WaveFunction,
    obs: &[Observable],
    mode_amp: &dyn Fn(usize) -> Option<Complex64>,
) -> Vec<(String, Complex64)> {
    obs.iter()
        .filter_map(|o| {
            let v = match o {
                Observable::Position => Some(Complex64::new(psi.mean_position(), 0.0)),
                Observable::SecondMoment => Some(Complex64::new(psi.second_moment(), 0.0)),
                Observable::ModeAmplitude(k) => mode_amp(*k),
            };
            v.map(|v| (o.name(), v))
        })
        .collect()
}

/// Validate output times and put `t = 0` in front if absent.
pub fn normalize_times(times: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0];
    for (k, &t) in times.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time {t} must be finite and >= 0")));
        }
        if k == 0 && t == 0.0 {
            continue;
        }
        if t <= out[out.len() - 1] {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        out.push(t);
    }
    Ok(out)
}
