//! Finite-difference Hamiltonians, their eigen-decomposition, and spectral
//! evolution of the fractional Schrödinger equation
//! `(iħ)^α ∂^α_t ψ = H ψ`.
//!
//! Each eigenmode evolves as `c_λ(t) = c_λ(0) E_α(λ [t/(iħ)]^α)`. For
//! `α = 1/2` the same factor is also available in its split form: an
//! oscillatory part `2 exp(-iλ²t/2ħ)` minus a branch-cut integral, which
//! uses the argument `[t/(2iħ)]^{1/2}` instead of `[t/(iħ)]^{1/2}`. The two
//! are kept as separate entry points; they are not reconciled here.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mlf::{mittag_leffler, FractionalOrder};
use crate::quad::Quad;
use crate::special::principal_pow;
use crate::wave::{normalize_times, observe, EvolutionTrace, Grid, Observable, WaveFunction};

/// Modes are dropped once the retained ones carry this fraction of `Σ|c|²`.
pub const MODE_WEIGHT_KEPT: f64 = 1.0 - 1e-10;

const MLF_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    /// `V(x)` sampled on every grid node, boundary nodes included.
    PotentialGrid(Vec<f64>),
    /// `V = 0`; the box is the grid extent.
    ParticleInBox,
    /// `V = x²/2`.
    Harmonic,
    /// `H = -2iħω (x ∂_x + 1/2)`, discretized in the symmetric form
    /// `-iħω (x D + D x)` with `D` the central difference.
    Dilation { omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub hbar: f64,
}

impl HamiltonianSpec {
    pub fn particle_in_box(hbar: f64) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::ParticleInBox, hbar }
    }

    pub fn harmonic(hbar: f64) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::Harmonic, hbar }
    }

    pub fn potential(v: Vec<f64>, hbar: f64) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::PotentialGrid(v), hbar }
    }

    pub fn dilation(omega: f64, hbar: f64) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::Dilation { omega }, hbar }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {}", self.hbar)));
        }
        match &self.kind {
            HamiltonianKind::PotentialGrid(v) => {
                if v.len() != grid.n {
                    return Err(Error::GridMismatch(format!("potential has {} samples, grid has {}", v.len(), grid.n)));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("potential has non-finite samples".into()));
                }
            }
            HamiltonianKind::Dilation { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Eigenpairs of a discretized Hamiltonian.
///
/// Eigenfunctions live on the full grid with zero boundary samples and are
/// normalized to `Σ|φ|² Δx = 1`, phase fixed so that the first sample above
/// 1e-3 of the peak modulus is real and positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    grid: Grid,
    hbar: f64,
    eigenvalues: Vec<f64>,
    /// n × m, one column per mode.
    eigenfunctions: DMatrix<Complex64>,
    /// n × n; boundary rows and columns are zero.
    hamiltonian: DMatrix<Complex64>,
    gram_deviation: f64,
}

/// Discretize `H` with Dirichlet conditions on `grid` and diagonalize it.
pub fn discretize_hamiltonian(spec: &HamiltonianSpec, grid: Grid) -> Result<SpectralDecomposition> {
    spec.validate(&grid)?;
    let n = grid.n;
    let m = n - 2;
    let dx = grid.dx();
    let hbar = spec.hbar;
    let x = grid.points();

    let mut h = DMatrix::<Complex64>::zeros(n, n);
    match &spec.kind {
        HamiltonianKind::Dilation { omega } => {
            // -iħω (x_i + x_{i+1}) / (2Δx) above the diagonal, its conjugate below
            for i in 1..n - 2 {
                let v = Complex64::new(0.0, -hbar * omega * (x[i] + x[i + 1]) / (2.0 * dx));
                h[(i, i + 1)] = v;
                h[(i + 1, i)] = v.conj();
            }
        }
        kind => {
            let kin = hbar * hbar / (2.0 * dx * dx);
            for i in 1..n - 1 {
                let v = match kind {
                    HamiltonianKind::PotentialGrid(v) => v[i],
                    HamiltonianKind::Harmonic => 0.5 * x[i] * x[i],
                    _ => 0.0,
                };
                h[(i, i)] = Complex64::new(2.0 * kin + v, 0.0);
                if i + 1 < n - 1 {
                    h[(i, i + 1)] = Complex64::new(-kin, 0.0);
                    h[(i + 1, i)] = Complex64::new(-kin, 0.0);
                }
            }
        }
    }

    let interior = h.view((1, 1), (m, m)).into_owned();
    let (values, vectors) = match spec.kind {
        HamiltonianKind::Dilation { .. } => {
            let eig = SymmetricEigen::try_new(interior, 1e-15, 10_000).ok_or(Error::EigenSolveFailure(m))?;
            (eig.eigenvalues, eig.eigenvectors)
        }
        _ => {
            let real = interior.map(|z| z.re);
            let eig = SymmetricEigen::try_new(real, 1e-15, 10_000).ok_or(Error::EigenSolveFailure(m))?;
            (eig.eigenvalues, eig.eigenvectors.map(|v| Complex64::new(v, 0.0)))
        }
    };

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let scale = 1.0 / dx.sqrt();
    let mut phi = DMatrix::<Complex64>::zeros(n, m);
    let mut eigenvalues = Vec::with_capacity(m);
    for (k, &j) in order.iter().enumerate() {
        eigenvalues.push(values[j]);
        let col = vectors.column(j);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col.iter().find(|z| z.norm() > 1e-3 * peak).copied().unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for i in 0..m {
            phi[(i + 1, k)] = col[i] * phase * scale;
        }
    }

    let gram = phi.adjoint() * &phi * Complex64::new(dx, 0.0);
    let mut dev: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }

    Ok(SpectralDecomposition { grid, hbar, eigenvalues, eigenfunctions: phi, hamiltonian: h, gram_deviation: dev })
}

impl SpectralDecomposition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenfunction(&self, k: usize) -> WaveFunction {
        let col = self.eigenfunctions.column(k);
        WaveFunction::new(self.grid, col.iter().copied().collect()).expect("eigenfunction matches its own grid")
    }

    pub fn eigenfunction_matrix(&self) -> &DMatrix<Complex64> {
        &self.eigenfunctions
    }

    /// Largest entrywise deviation of the discrete Gram matrix from identity.
    pub fn gram_deviation(&self) -> f64 {
        self.gram_deviation
    }

    /// Full-grid Hamiltonian matrix (zero boundary rows and columns).
    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.hamiltonian
    }

    /// `⟨φ_k|ψ⟩` for every mode.
    pub fn project(&self, psi: &WaveFunction) -> Result<Vec<Complex64>> {
        psi.check_grid(&self.grid)?;
        let v = DVector::from_column_slice(psi.samples());
        let c = self.eigenfunctions.adjoint() * v * Complex64::new(self.grid.dx(), 0.0);
        Ok(c.iter().copied().collect())
    }

    fn project_mode(&self, k: usize, psi: &WaveFunction) -> Option<Complex64> {
        if k >= self.len() {
            return None;
        }
        let col = self.eigenfunctions.column(k);
        let s: Complex64 = col.iter().zip(psi.samples()).map(|(p, z)| p.conj() * z).sum();
        Some(s * self.grid.dx())
    }

    /// `Σ_k a_k φ_k` over the given `(mode, amplitude)` pairs.
    pub fn reconstruct(&self, amps: &[(usize, Complex64)]) -> WaveFunction {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.n];
        for &(k, a) in amps {
            let col = self.eigenfunctions.column(k);
            for (o, p) in out.iter_mut().zip(col.iter()) {
                *o += a * p;
            }
        }
        WaveFunction::new(self.grid, out).expect("reconstruction stays on the grid")
    }
}

/// Indices of the modes kept for evolution: largest `|c|²` first, until
/// [`MODE_WEIGHT_KEPT`] of the total weight is reached. Returned in
/// ascending mode order.
pub fn significant_modes(coeffs: &[Complex64]) -> Vec<usize> {
    let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..coeffs.len()).collect();
    idx.sort_by(|&a, &b| coeffs[b].norm_sqr().total_cmp(&coeffs[a].norm_sqr()).then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut kept = Vec::new();
    for k in idx {
        kept.push(k);
        acc += coeffs[k].norm_sqr();
        if acc >= MODE_WEIGHT_KEPT * total {
            break;
        }
    }
    kept.sort_unstable();
    kept
}

/// `E_α(λ [t/(iħ)]^α)` on the principal branch.
pub fn mode_factor(alpha: FractionalOrder, lam: f64, hbar: f64, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let arg = lam * principal_pow(Complex64::new(0.0, -t / hbar), alpha.value());
    Ok(mittag_leffler(alpha, arg, MLF_TOL)?.value)
}

/// Fractional Green function `G(x, t; x') = Σ φ_λ(x) φ*_λ(x') E_α(λ [t/(iħ)]^α)`
/// as an n × n matrix on the full grid. At `t = 0` the interior block is
/// `I / Δx`.
pub fn green_fse(decomp: &SpectralDecomposition, alpha: FractionalOrder, t: f64) -> Result<DMatrix<Complex64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    let phi = decomp.eigenfunction_matrix();
    let mut scaled = phi.clone();
    for (k, &lam) in decomp.eigenvalues().iter().enumerate() {
        let f = mode_factor(alpha, lam, decomp.hbar(), t)?;
        for z in scaled.column_mut(k).iter_mut() {
            *z *= f;
        }
    }
    Ok(scaled * phi.adjoint())
}

fn evolve_modes<F>(
    decomp: &SpectralDecomposition,
    psi0: &WaveFunction,
    times: &[f64],
    observables: &[Observable],
    initial_scale: f64,
    mut factor: F,
) -> Result<EvolutionTrace>
where
    F: FnMut(f64, f64) -> Result<Complex64>,
{
    psi0.check_grid(decomp.grid())?;
    let times = normalize_times(times)?;
    let coeffs = decomp.project(psi0)?;
    let kept = significant_modes(&coeffs);
    let mut trace = EvolutionTrace::empty();
    for &t in &times {
        let psi = if t == 0.0 {
            psi0.scale(Complex64::new(initial_scale, 0.0))
        } else {
            let mut amps = Vec::with_capacity(kept.len());
            for &k in &kept {
                amps.push((k, coeffs[k] * factor(decomp.eigenvalues()[k], t)?));
            }
            decomp.reconstruct(&amps)
        };
        let extra = observe(&psi, observables, &|k| decomp.project_mode(k, &psi));
        trace.push(t, psi, extra);
    }
    Ok(trace)
}

/// Evolve `psi0` with the Mittag-Leffler mode factors. A `t = 0` entry is
/// prepended to `times` if absent, and its snapshot is `psi0` itself.
pub fn evolve_fse_spectral(
    decomp: &SpectralDecomposition,
    alpha: FractionalOrder,
    psi0: &WaveFunction,
    times: &[f64],
    observables: &[Observable],
) -> Result<EvolutionTrace> {
    let hbar = decomp.hbar();
    evolve_modes(decomp, psi0, times, observables, 1.0, |lam, t| mode_factor(alpha, lam, hbar, t))
}

/// The `α = 1/2` mode factor split into its oscillatory part and the
/// branch-cut (decay) integral; the factor itself is `oscillatory - decay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorFormFactor {
    pub oscillatory: Complex64,
    pub decay: Complex64,
    pub abs_error: f64,
}

impl OperatorFormFactor {
    pub fn value(&self) -> Complex64 {
        self.oscillatory - self.decay
    }
}

// exp(-u² t) < 1e-16 beyond u² t = 36.84
const BRANCH_CUT_DECAY: f64 = 36.84;

/// Operator-form factor for one mode:
/// `2 exp(-iλ²t/2ħ) - (λ √(2iħ) / π) ∫₀^∞ e^{-rt} dr / (√r (2iħr + λ²))`.
///
/// The integral is taken in `r = u²`, which leaves the smooth integrand
/// `2 e^{-u²t} / (2iħu² + λ²)` on `[0, u_max]`. At `λ = 0` the decay term
/// is its `λ → 0` limit, 1. For `λ < 0` the pole of the Laplace kernel is
/// not on the principal sheet and the oscillatory part is zero.
pub fn operator_form_factor(lam: f64, hbar: f64, t: f64, quad_tol: f64) -> Result<OperatorFormFactor> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("operator form needs t > 0, got {t}")));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidArgument("quad_tol must be positive".into()));
    }
    let osc_phase = Complex64::new(0.0, -lam * lam * t / (2.0 * hbar)).exp();
    if lam == 0.0 {
        return Ok(OperatorFormFactor {
            oscillatory: Complex64::new(2.0, 0.0),
            decay: Complex64::new(1.0, 0.0),
            abs_error: 0.0,
        });
    }
    let oscillatory = if lam > 0.0 { 2.0 * osc_phase } else { Complex64::new(0.0, 0.0) };
    let pref = lam * principal_pow(Complex64::new(0.0, 2.0 * hbar), 0.5) / PI;
    let u_max = (BRANCH_CUT_DECAY / t).sqrt();
    let u_c = lam.abs() / (2.0 * hbar).sqrt();
    let mut breaks = vec![0.0];
    if u_c < u_max {
        breaks.push(u_c);
    }
    breaks.push(u_max);
    let i2h = Complex64::new(0.0, 2.0 * hbar);
    let res = Quad::new(quad_tol / (4.0 * pref.norm()))
        .integrate_with_breaks(|u| 2.0 * (-u * u * t).exp() / (i2h * u * u + lam * lam), &breaks)?;
    Ok(OperatorFormFactor { oscillatory, decay: pref * res.value, abs_error: pref.norm() * res.abs_error })
}

/// Evolve with the `α = 1/2` operator-form factors. Output times other
/// than 0 must be positive; the `t = 0` snapshot is `psi0`.
pub fn evolve_operator_form(
    decomp: &SpectralDecomposition,
    psi0: &WaveFunction,
    times: &[f64],
    quad_tol: f64,
    observables: &[Observable],
) -> Result<EvolutionTrace> {
    let hbar = decomp.hbar();
    evolve_modes(decomp, psi0, times, observables, 1.0, |lam, t| {
        Ok(operator_form_factor(lam, hbar, t, quad_tol)?.value())
    })
}

/// `ψ_scl = ψ/2` evolved with the oscillatory factor `exp(-iλ²t/2ħ)` alone,
/// i.e. under `H_scl = H²/2`.
pub fn semiclassical_split(
    decomp: &SpectralDecomposition,
    psi0: &WaveFunction,
    times: &[f64],
    observables: &[Observable],
) -> Result<EvolutionTrace> {
    let hbar = decomp.hbar();
    evolve_modes(decomp, psi0, times, observables, 0.5, |lam, t| {
        Ok(0.5 * Complex64::new(0.0, -lam * lam * t / (2.0 * hbar)).exp())
    })
}
