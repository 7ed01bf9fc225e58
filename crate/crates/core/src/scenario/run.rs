use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Component, Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{render, HamiltonianChoice, InitialSpec, ModuleKind, ScenarioConfig};
use crate::caputo::{self, CaputoParams};
use crate::comb::{backbone_density, comb_evolve, CombState};
use crate::error::{Error, Result};
use crate::hyperbolic::{
    evolve_semiclassical, evolve_standard, moment_trace, DilationParams, MomentMode, MomentTrace, Profile,
};
use crate::laplace::{compare_eigenvalues, write_spectrum_csv};
use crate::mlf::mittag_leffler;
use crate::spectral::{discretize_hamiltonian, evolve_fse_spectral, evolve_operator_form, SpectralDecomposition};
use crate::wave::{EvolutionTrace, Grid, WaveFunction};

/// What a scenario run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    /// Relative to `output_dir`, in write order.
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub wall_time: Duration,
}

/// Whitespace-delimited columns under a `#` header.
pub trait PlotData {
    fn columns(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl PlotData for EvolutionTrace {
    fn columns(&self) -> Vec<String> {
        let mut c = vec!["t".to_string(), "norm".to_string()];
        for k in self.observables.keys() {
            c.push(format!("{k}_re"));
            c.push(format!("{k}_im"));
        }
        c
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.len())
            .map(|i| {
                let mut r = vec![num(self.times[i]), num(self.norms[i])];
                for v in self.observables.values() {
                    r.push(num(v[i].re));
                    r.push(num(v[i].im));
                }
                r
            })
            .collect()
    }
}

impl PlotData for MomentTrace {
    fn columns(&self) -> Vec<String> {
        ["t", "x2_re", "x2_im", "diverged"].map(String::from).to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.len())
            .map(|i| {
                let v = self.x2_values[i];
                vec![num(self.times[i]), num(v.re), num(v.im), u8::from(self.diverged[i]).to_string()]
            })
            .collect()
    }
}

/// Norm and backbone mass `∫ |Ψ(x, 0)|² dx` of a comb run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CombTrace {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub backbone: Vec<f64>,
}

impl CombTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,norm,backbone")?;
        for i in 0..self.times.len() {
            writeln!(w, "{},{},{}", num(self.times[i]), num(self.norms[i]), num(self.backbone[i]))?;
        }
        Ok(())
    }
}

impl PlotData for CombTrace {
    fn columns(&self) -> Vec<String> {
        ["t", "norm", "backbone"].map(String::from).to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.times.len()).map(|i| vec![num(self.times[i]), num(self.norms[i]), num(self.backbone[i])]).collect()
    }
}

pub fn write_plotdata<W: Write>(data: &dyn PlotData, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# {}", data.columns().join(" "))?;
    for r in data.rows() {
        writeln!(w, "{}", r.join(" "))?;
    }
    Ok(())
}

pub fn emit_plotdata(data: &dyn PlotData, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_plotdata(data, &mut w)?;
    w.flush()?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes files strictly below one directory.
struct Sink {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl Sink {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Sink { root: root.to_path_buf(), files: Vec::new() })
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        let rel = Path::new(name);
        let inside = !name.is_empty() && rel.components().all(|c| matches!(c, Component::Normal(_)));
        if !inside {
            return Err(Error::OutsideOutputDir { path: rel.to_path_buf(), root: self.root.clone() });
        }
        Ok(self.root.join(rel))
    }

    fn write<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    {
        let path = self.path(name)?;
        let mut w = BufWriter::new(fs::File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }

    fn plot(&mut self, name: &str, data: &dyn PlotData) -> Result<()> {
        let path = self.path(name)?;
        emit_plotdata(data, &path)?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    module: &'a str,
    config_sha256: String,
    outputs: Vec<ManifestEntry>,
    warnings: &'a [String],
}

fn decomposition(cfg: &ScenarioConfig) -> Result<(SpectralDecomposition, Grid)> {
    let grid = cfg
        .grid
        .ok_or_else(|| Error::Validation { key: "grid".into(), line: None, reason: "missing".into() })?
        .grid()?;
    let h = cfg.hamiltonian.as_ref().ok_or_else(|| Error::Validation {
        key: "hamiltonian".into(),
        line: None,
        reason: "missing".into(),
    })?;
    Ok((discretize_hamiltonian(&h.spec(cfg.hbar), grid)?, grid))
}

/// Analytic profile for `[initial]`; eigenmodes have none.
pub fn initial_profile(spec: &InitialSpec) -> Result<Option<Profile>> {
    Ok(match *spec {
        InitialSpec::Eigenmode { .. } => None,
        InitialSpec::Gaussian { center, a, amp } => {
            let amp = amp.unwrap_or_else(|| (2.0 * a / std::f64::consts::PI).powf(0.25));
            Some(Profile::gaussian(center, a, amp)?)
        }
        InitialSpec::HermiteGaussian { order, center, a } => Some(Profile::hermite_gaussian(order, center, a)?),
    })
}

/// Initial state on the grid with Dirichlet boundary samples; normalized
/// unless an explicit amplitude was given.
fn initial_state(cfg: &ScenarioConfig, decomp: &SpectralDecomposition, grid: Grid) -> Result<WaveFunction> {
    let spec = cfg.initial.as_ref().ok_or_else(|| Error::Validation {
        key: "initial".into(),
        line: None,
        reason: "missing".into(),
    })?;
    if let InitialSpec::Eigenmode { mode } = *spec {
        if mode >= decomp.len() {
            return Err(Error::Validation {
                key: "initial.mode".into(),
                line: None,
                reason: format!("only {} modes on this grid", decomp.len()),
            });
        }
        return Ok(decomp.eigenfunction(mode));
    }
    let profile = initial_profile(spec)?.expect("analytic profile");
    let mut samples = profile.sample(grid)?.into_samples();
    let last = samples.len() - 1;
    samples[0] = Complex64::new(0.0, 0.0);
    samples[last] = Complex64::new(0.0, 0.0);
    let psi = WaveFunction::new(grid, samples)?;
    let explicit_amp = matches!(spec, InitialSpec::Gaussian { amp: Some(_), .. });
    if explicit_amp {
        return Ok(psi);
    }
    let n = psi.norm();
    if n == 0.0 {
        return Err(Error::Validation {
            key: "initial".into(),
            line: None,
            reason: "initial state vanishes on the grid".into(),
        });
    }
    Ok(psi.scale(Complex64::new(1.0 / n, 0.0)))
}

fn write_trace(sink: &mut Sink, trace: &EvolutionTrace) -> Result<()> {
    sink.write("trace.csv", |w| trace.write_csv(w))?;
    sink.plot("trace.dat", trace)?;
    for (k, psi) in trace.snapshots.iter().enumerate() {
        sink.write(&format!("snapshot_{k:04}.csv"), |w| psi.write_csv(w))?;
    }
    Ok(())
}

fn run_mlf(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let rows = cfg
        .mlf
        .points
        .iter()
        .map(|&z| mittag_leffler(cfg.alpha, z, cfg.tolerances.mlf).map(|r| (z, r)))
        .collect::<Result<Vec<_>>>()?;
    sink.write("mlf.csv", |w| {
        writeln!(w, "alpha,z_re,z_im,value_re,value_im,method,est_abs_error")?;
        for (z, r) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                num(cfg.alpha.value()),
                num(z.re),
                num(z.im),
                num(r.value.re),
                num(r.value.im),
                r.method.as_str(),
                num(r.est_abs_error)
            )?;
        }
        Ok(())
    })
}

fn run_fse(cfg: &ScenarioConfig, sink: &mut Sink, warnings: &mut Vec<String>) -> Result<()> {
    let (decomp, grid) = decomposition(cfg)?;
    let psi0 = initial_state(cfg, &decomp, grid)?;
    let trace = match cfg.module {
        ModuleKind::FseSpectral => evolve_fse_spectral(&decomp, cfg.alpha, &psi0, &cfg.times, &cfg.observables)?,
        ModuleKind::FseOperatorForm => {
            if !cfg.alpha.is_half() {
                warnings.push(format!(
                    "operator form is the alpha = 1/2 propagator; configured alpha = {} ignored",
                    cfg.alpha.value()
                ));
            }
            evolve_operator_form(&decomp, &psi0, &cfg.times, cfg.tolerances.quad, &cfg.observables)?
        }
        ModuleKind::FseCaputo => {
            let c = cfg.caputo.ok_or_else(|| Error::Validation {
                key: "caputo".into(),
                line: None,
                reason: "missing".into(),
            })?;
            let params = CaputoParams::new(cfg.alpha, cfg.hbar, c.dt).with_scheme(c.scheme);
            let t_end = cfg.times.last().copied().unwrap_or(0.0);
            for &t in &cfg.times {
                let snapped = (t / c.dt).round() * c.dt;
                if (snapped - t).abs() > 1e-9 * t.max(1.0) {
                    warnings.push(format!("output time {t} recorded at mesh node {snapped}"));
                }
            }
            if cfg.observables.iter().any(|o| matches!(o, crate::wave::Observable::ModeAmplitude(_))) {
                warnings.push("mode amplitudes are not recorded by the Caputo stepper".into());
            }
            if t_end == 0.0 {
                let mut tr = EvolutionTrace::empty();
                tr.push(0.0, psi0.clone(), Vec::new());
                tr
            } else {
                caputo::solve(decomp.hamiltonian(), &psi0, params, t_end, &cfg.times, &cfg.observables)?
            }
        }
        _ => unreachable!("run_fse called for {:?}", cfg.module),
    };
    write_trace(sink, &trace)
}

fn run_comb(cfg: &ScenarioConfig, sink: &mut Sink, warnings: &mut Vec<String>) -> Result<()> {
    let (decomp, grid) = decomposition(cfg)?;
    let psi_x = initial_state(cfg, &decomp, grid)?;
    let c = cfg.comb.ok_or_else(|| Error::Validation { key: "comb".into(), line: None, reason: "missing".into() })?;
    let yg = Grid::new(-c.y_max, c.y_max, c.ny)?;
    let amp = (2.0 * c.y_a / std::f64::consts::PI).powf(0.25);
    let xs = psi_x.samples().to_vec();
    let mut idx = 0usize;
    let psi0 = CombState::from_fn(grid, yg, cfg.hbar, |_, y| {
        let i = idx / yg.n;
        idx += 1;
        xs[i] * amp * (-c.y_a * (y - c.y_center).powi(2)).exp()
    })?;
    let mut trace = CombTrace::default();
    let mut times = vec![0.0];
    times.extend(cfg.times.iter().copied().filter(|&t| t > 0.0));
    let dx = grid.dx();
    for (k, &t) in times.iter().enumerate() {
        let state = if t == 0.0 {
            psi0.clone()
        } else {
            let out = comb_evolve(&decomp, &psi0, t)?;
            for lam in out.skipped {
                warnings.push(format!("t = {t}: eigenvalue {lam} <= 0 propagated without the backbone correction"));
            }
            out.state
        };
        trace.times.push(t);
        trace.norms.push(state.norm_sqr().sqrt());
        trace.backbone.push(backbone_density(&state)?.iter().sum::<f64>() * dx);
        sink.write(&format!("comb_{k:04}.csv"), |w| state.write_csv(w))?;
    }
    warnings.dedup();
    sink.write("trace.csv", |w| trace.write_csv(w))?;
    sink.plot("trace.dat", &trace)
}

fn run_poles(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let eigs = match &cfg.poles.eigenvalues {
        Some(v) => v.clone(),
        None => {
            let (decomp, _) = decomposition(cfg)?;
            decomp.eigenvalues().iter().copied().take(cfg.poles.count).collect()
        }
    };
    let rows = compare_eigenvalues(&eigs, cfg.hbar)?;
    sink.write("poles.csv", |w| write_spectrum_csv(&rows, w))
}

fn run_hyperbolic(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let h = cfg.hyperbolic;
    let params = match h.omega {
        Some(w) => DilationParams::new(cfg.hbar, w)?,
        None => DilationParams::canonical(cfg.hbar)?,
    };
    if let Some(HamiltonianChoice::Dilation { omega }) = cfg.hamiltonian {
        if omega != params.omega {
            return Err(Error::Validation {
                key: "hyperbolic.omega".into(),
                line: None,
                reason: format!("[hamiltonian] omega = {omega} disagrees with the dilation frequency {}", params.omega),
            });
        }
    }
    let spec = cfg.initial.as_ref().ok_or_else(|| Error::Validation {
        key: "initial".into(),
        line: None,
        reason: "missing".into(),
    })?;
    let profile = initial_profile(spec)?.ok_or_else(|| Error::Validation {
        key: "initial.profile".into(),
        line: None,
        reason: "hyperbolic scenarios need an analytic profile".into(),
    })?;
    let trace = moment_trace(params, &profile, &cfg.times, h.mode, h.conjugation)?;
    sink.write("moments.csv", |w| trace.write_csv(w))?;
    sink.plot("moments.dat", &trace)?;
    if let Some(g) = cfg.grid {
        let grid = g.grid()?;
        for (k, &t) in cfg.times.iter().enumerate() {
            let psi = match h.mode {
                MomentMode::Standard => evolve_standard(params, &profile, grid, t)?,
                MomentMode::Semiclassical if t == 0.0 => profile.sample(grid)?,
                MomentMode::Semiclassical => evolve_semiclassical(params, &profile, grid, t, cfg.tolerances.quad)?,
            };
            sink.write(&format!("snapshot_{k:04}.csv"), |w| psi.write_csv(w))?;
        }
    }
    Ok(())
}

/// Run a validated scenario, writing into `out` (or the configured
/// `output_dir`). Outputs are byte-identical across runs.
pub fn run_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let root = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.clone());
    let mut sink = Sink::new(&root)?;
    let mut warnings = Vec::new();
    match cfg.module {
        ModuleKind::Mlf => run_mlf(cfg, &mut sink)?,
        ModuleKind::FseSpectral | ModuleKind::FseCaputo | ModuleKind::FseOperatorForm => {
            run_fse(cfg, &mut sink, &mut warnings)?
        }
        ModuleKind::Comb => run_comb(cfg, &mut sink, &mut warnings)?,
        ModuleKind::Poles => run_poles(cfg, &mut sink)?,
        ModuleKind::Hyperbolic => run_hyperbolic(cfg, &mut sink)?,
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let mut outputs = Vec::new();
    for f in &sink.files {
        let bytes = fs::read(root.join(f))?;
        outputs.push(ManifestEntry {
            path: f.to_string_lossy().into_owned(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    let manifest = Manifest {
        name: &cfg.name,
        module: cfg.module.as_str(),
        config_sha256: sha256_hex(render(cfg).as_bytes()),
        outputs,
        warnings: &warnings,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    sink.write("manifest.json", |w| writeln!(w, "{json}"))?;

    Ok(RunReport { output_dir: root, files: sink.files, warnings, wall_time: start.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sink_refuses_escaping_names() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path()).unwrap();
        for bad in ["../x.csv", "/etc/passwd", "a/../../b", ""] {
            assert!(matches!(sink.path(bad), Err(Error::OutsideOutputDir { .. })), "{bad}");
        }
        assert!(sink.path("trace.csv").is_ok());
    }

    #[test]
    fn empty_trace_plotdata_is_header_only() {
        let mut buf = Vec::new();
        write_plotdata(&EvolutionTrace::empty(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# t norm\n");
    }
}
