//! Direct time stepping of `(iħ)^α ∂^α_t ψ = H ψ` with the L1
//! discretization of the Caputo derivative.
//!
//! On the uniform mesh `t_n = n Δt` the L1 formula reads
//!
//! ```text
//! ∂^α u(t_n) ≈ Δt^{-α} / Γ(2-α) · Σ_{j=0}^{n-1} b_j (u_{n-j} - u_{n-j-1}),
//! b_j = (j+1)^{1-α} - j^{1-α}
//! ```
//!
//! and each step solves `(c I - H) ψ_n = c ψ_{n-1} - c Σ_{j≥1} b_j Δψ_{n-j}`
//! with `c = (iħ)^α Δt^{-α} / Γ(2-α)`. The full history is kept.
//!
//! Solutions behave like `t^α` near `t = 0`, which caps plain L1 at first
//! order. [`L1Scheme::Corrected`] adds `H ψ_0 / 2` to the first step's
//! right-hand side, cancelling the leading local error of that step and
//! recovering order `2 - α` for `α < 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mlf::FractionalOrder;
use crate::special::{gamma, principal_pow};
use crate::wave::{observe, EvolutionTrace, Observable, WaveFunction};

/// Upper bound on `Δt^α ‖H‖_∞ / ħ^α`.
pub const STABILITY_LIMIT: f64 = 10.0;

/// L1 weights `b_0 .. b_{n-1}`, with `b_0 = 1`.
pub fn l1_weights(alpha: FractionalOrder, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha.value();
    let mut b = Vec::with_capacity(n);
    if n > 0 {
        b.push(1.0);
    }
    let mut prev = 1.0f64;
    for j in 1..n {
        let next = ((j + 1) as f64).powf(p);
        b.push(next - prev);
        prev = next;
    }
    b
}

/// L1 approximation of the Caputo derivative at the last node of `u`, where
/// `u[j]` samples `u(j Δt)`.
pub fn caputo_apply(u: &[Complex64], alpha: FractionalOrder, dt: f64) -> Result<Complex64> {
    if u.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: u.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let n = u.len() - 1;
    let b = l1_weights(alpha, n);
    let mut s = Complex64::new(0.0, 0.0);
    for (j, bj) in b.iter().enumerate() {
        s += *bj * (u[n - j] - u[n - j - 1]);
    }
    Ok(s * dt.powf(-alpha.value()) / gamma(2.0 - alpha.value()))
}

/// L1 derivative at every node of a real sample sequence (0 at the first).
pub fn caputo_series(u: &[f64], alpha: FractionalOrder, dt: f64) -> Vec<f64> {
    let n = u.len();
    if n == 0 {
        return Vec::new();
    }
    let b = l1_weights(alpha, n.saturating_sub(1));
    let scale = dt.powf(-alpha.value()) / gamma(2.0 - alpha.value());
    let d: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    // α = 1 leaves only b_0
    let terms = if alpha.is_one() { 1 } else { b.len() };
    let mut out = vec![0.0; n];
    for k in 1..n {
        let mut s = 0.0;
        for j in 0..k.min(terms) {
            s += b[j] * d[k - 1 - j];
        }
        out[k] = s * scale;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Scheme {
    Plain,
    /// First-step correction; identical to `Plain` at `α = 1`.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaputoParams {
    pub alpha: FractionalOrder,
    pub hbar: f64,
    pub dt: f64,
    pub scheme: L1Scheme,
}

impl CaputoParams {
    pub fn new(alpha: FractionalOrder, hbar: f64, dt: f64) -> Self {
        CaputoParams { alpha, hbar, dt, scheme: L1Scheme::Corrected }
    }

    pub fn with_scheme(mut self, scheme: L1Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// Stepper state: the Hamiltonian, the factorized step matrix and the full
/// history `ψ_0 .. ψ_n`.
#[derive(Debug, Clone)]
pub struct CaputoSolverState {
    params: CaputoParams,
    h: DMatrix<Complex64>,
    c: Complex64,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    weights: Vec<f64>,
    history: Vec<DVector<Complex64>>,
    diffs: Vec<DVector<Complex64>>,
}

fn inf_norm(h: &DMatrix<Complex64>) -> f64 {
    h.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl CaputoSolverState {
    pub fn new(h: DMatrix<Complex64>, psi0: DVector<Complex64>, params: CaputoParams) -> Result<Self> {
        if !h.is_square() || h.nrows() != psi0.len() {
            return Err(Error::GridMismatch(format!(
                "{}x{} Hamiltonian for a state of length {}",
                h.nrows(),
                h.ncols(),
                psi0.len()
            )));
        }
        if !(params.dt > 0.0 && params.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", params.dt)));
        }
        if !(params.hbar > 0.0 && params.hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {}", params.hbar)));
        }
        let a = params.alpha.value();
        let measure = params.dt.powf(a) * inf_norm(&h) / params.hbar.powf(a);
        if measure > STABILITY_LIMIT {
            return Err(Error::StabilityGuardTripped { measure, limit: STABILITY_LIMIT });
        }
        let c = principal_pow(Complex64::new(0.0, params.hbar), a) * params.dt.powf(-a) / gamma(2.0 - a);
        let n = h.nrows();
        let step = DMatrix::<Complex64>::identity(n, n) * c - &h;
        let lu = step.lu();
        if !lu.is_invertible() {
            return Err(Error::LinearSolveFailure("step matrix c I - H is singular".into()));
        }
        Ok(CaputoSolverState { params, h, c, lu, weights: vec![1.0], history: vec![psi0], diffs: Vec::new() })
    }

    pub fn params(&self) -> &CaputoParams {
        &self.params
    }

    /// Completed steps.
    pub fn steps(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[DVector<Complex64>] {
        &self.history
    }

    pub fn current(&self) -> &DVector<Complex64> {
        &self.history[self.history.len() - 1]
    }

    fn weight(&mut self, j: usize) -> f64 {
        while self.weights.len() <= j {
            let k = self.weights.len();
            let p = 1.0 - self.params.alpha.value();
            self.weights.push(((k + 1) as f64).powf(p) - (k as f64).powf(p));
        }
        self.weights[j]
    }

    /// Right-hand side for step `n` from `history[..n]` and `diffs[..n-1]`.
    fn rhs(&mut self, n: usize) -> DVector<Complex64> {
        let mut hist = DVector::<Complex64>::zeros(self.h.nrows());
        if !self.params.alpha.is_one() {
            for j in 1..n {
                let b = self.weight(j);
                hist.axpy(Complex64::new(b, 0.0), &self.diffs[n - 1 - j], Complex64::new(1.0, 0.0));
            }
        }
        let mut rhs = (&self.history[n - 1] - hist) * self.c;
        if n == 1 && self.params.scheme == L1Scheme::Corrected && !self.params.alpha.is_one() {
            rhs += (&self.h * &self.history[0]) * Complex64::new(0.5, 0.0);
        }
        rhs
    }

    /// Advance one step.
    pub fn step(&mut self) -> Result<&DVector<Complex64>> {
        let n = self.history.len();
        let rhs = self.rhs(n);
        let next =
            self.lu.solve(&rhs).ok_or_else(|| Error::LinearSolveFailure(format!("LU solve failed at step {n}")))?;
        if next.iter().any(|z| !z.is_finite()) {
            return Err(Error::LinearSolveFailure(format!("non-finite state at step {n}")));
        }
        self.diffs.push(&next - &self.history[n - 1]);
        self.history.push(next);
        Ok(self.current())
    }

    /// Recompute `ψ_n` (`1 ≤ n ≤ steps`) from the stored history before it.
    pub fn recompute(&mut self, n: usize) -> Result<DVector<Complex64>> {
        if n == 0 || n > self.steps() {
            return Err(Error::InvalidArgument(format!("can only recompute steps 1..={}, got {n}", self.steps())));
        }
        let rhs = self.rhs(n);
        self.lu.solve(&rhs).ok_or_else(|| Error::LinearSolveFailure(format!("LU solve failed at step {n}")))
    }
}

/// Integrate from `t = 0` to `t_end` and record snapshots at the mesh nodes
/// nearest to `output_times` (duplicates collapse). `h` is the full-grid
/// Hamiltonian, e.g. [`crate::spectral::SpectralDecomposition::hamiltonian`].
pub fn solve(
    h: &DMatrix<Complex64>,
    psi0: &WaveFunction,
    params: CaputoParams,
    t_end: f64,
    output_times: &[f64],
    observables: &[Observable],
) -> Result<EvolutionTrace> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if params.dt > t_end {
        return Err(Error::InvalidArgument(format!("dt = {} exceeds t_end = {t_end}", params.dt)));
    }
    let n_steps = (t_end / params.dt).round() as usize;
    let mut marks: Vec<usize> = output_times
        .iter()
        .map(|&t| {
            if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
                Err(Error::InvalidArgument(format!("output time {t} outside [0, {t_end}]")))
            } else {
                Ok(((t / params.dt).round() as usize).min(n_steps))
            }
        })
        .collect::<Result<_>>()?;
    marks.push(0);
    marks.sort_unstable();
    marks.dedup();

    let grid = *psi0.grid();
    let mut state = CaputoSolverState::new(h.clone(), DVector::from_column_slice(psi0.samples()), params)?;
    let mut trace = EvolutionTrace::empty();
    let none = |_: usize| None;
    trace.push(0.0, psi0.clone(), observe(psi0, observables, &none));
    let mut next_mark = 1;
    for n in 1..=n_steps {
        if next_mark >= marks.len() {
            break;
        }
        state.step()?;
        if marks[next_mark] == n {
            let psi = WaveFunction::new(grid, state.current().iter().copied().collect())?;
            let extra = observe(&psi, observables, &none);
            trace.push(n as f64 * params.dt, psi, extra);
            next_mark += 1;
        }
    }
    Ok(trace)
}

/// A single eigenmode `ψ(0) = 1`, `H = λ`, whose exact amplitude is
/// `E_α(λ [t/(iħ)]^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenmodeProblem {
    pub lam: f64,
    pub hbar: f64,
    pub alpha: FractionalOrder,
    pub t_end: f64,
    pub scheme: L1Scheme,
}

impl EigenmodeProblem {
    pub fn new(lam: f64, hbar: f64, alpha: FractionalOrder, t_end: f64) -> Self {
        EigenmodeProblem { lam, hbar, alpha, t_end, scheme: L1Scheme::Corrected }
    }

    pub fn exact(&self) -> Result<Complex64> {
        crate::spectral::mode_factor(self.alpha, self.lam, self.hbar, self.t_end)
    }

    /// Amplitude at `t_end` from the stepper.
    pub fn amplitude(&self, dt: f64) -> Result<Complex64> {
        let h = DMatrix::from_element(1, 1, Complex64::new(self.lam, 0.0));
        let psi0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let params = CaputoParams::new(self.alpha, self.hbar, dt).with_scheme(self.scheme);
        let mut st = CaputoSolverState::new(h, psi0, params)?;
        let n = (self.t_end / dt).round() as usize;
        for _ in 0..n {
            st.step()?;
        }
        Ok(st.current()[0])
    }

    pub fn error(&self, dt: f64) -> Result<f64> {
        Ok((self.amplitude(dt)? - self.exact()?).norm())
    }
}

/// Least-squares slope of `log(err)` against `log(dt)`.
pub fn log_log_slope(dts: &[f64], errs: &[f64]) -> Result<f64> {
    if dts.len() != errs.len() {
        return Err(Error::InvalidArgument("dts and errors differ in length".into()));
    }
    if dts.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: dts.len() });
    }
    if dts.iter().chain(errs).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("step sizes and errors must be positive".into()));
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("step sizes must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Observed order of the stepper against the Mittag-Leffler amplitude.
pub fn convergence_order(problem: &EigenmodeProblem, dts: &[f64]) -> Result<f64> {
    if dts.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: dts.len() });
    }
    let errs = dts.iter().map(|&dt| problem.error(dt)).collect::<Result<Vec<_>>>()?;
    log_log_slope(dts, &errs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn a(x: f64) -> FractionalOrder {
        FractionalOrder::new(x).unwrap()
    }

    #[test]
    fn weights_examples() {
        assert_eq!(l1_weights(a(0.5), 1), vec![1.0]);
        let w = l1_weights(a(0.5), 2);
        assert!((w[1] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(l1_weights(a(1.0), 3), vec![1.0, 0.0, 0.0]);
        let w = l1_weights(a(0.3), 50);
        assert!(w.windows(2).all(|p| p[0] > p[1] && p[1] > 0.0));
    }

    #[test]
    fn caputo_apply_examples() {
        let dt = 1.0 / 1024.0;
        let c: Vec<Complex64> = vec![Complex64::new(3.0, -1.0); 100];
        assert_eq!(caputo_apply(&c, a(0.5), dt).unwrap(), Complex64::new(0.0, 0.0));
        let lin: Vec<Complex64> = (0..=1024).map(|j| Complex64::new(j as f64 * dt, 0.0)).collect();
        let d = caputo_apply(&lin, a(0.5), dt).unwrap();
        assert!((d.re - 2.0 / PI.sqrt()).abs() < 2e-3);
        let quad: Vec<Complex64> = (0..=1024).map(|j| Complex64::new((j as f64 * dt).powi(2), 0.0)).collect();
        let d = caputo_apply(&quad, a(0.5), dt).unwrap();
        assert!((d.re - 8.0 / (3.0 * PI.sqrt())).abs() < 5e-3);
        assert!(caputo_apply(&lin[..1], a(0.5), dt).is_err());
    }

    #[test]
    fn series_matches_pointwise() {
        let dt = 0.01;
        let u: Vec<f64> = (0..200).map(|j| (j as f64 * dt).sin()).collect();
        let all = caputo_series(&u, a(0.4), dt);
        let uc: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for k in [1, 17, 199] {
            let p = caputo_apply(&uc[..=k], a(0.4), dt).unwrap();
            assert!((p.re - all[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_one_is_backward_euler() {
        let p = EigenmodeProblem::new(0.7, 1.0, a(1.0), 1.0);
        let dt = 0.01;
        let mut u = Complex64::new(1.0, 0.0);
        for _ in 0..100 {
            // i (u_n - u_{n-1}) / dt = λ u_n
            u /= 1.0 - Complex64::new(0.0, -0.7 * dt);
        }
        assert!((p.amplitude(dt).unwrap() - u).norm() < 1e-12);
    }

    #[test]
    fn half_order_eigenmode_accuracy() {
        let p = EigenmodeProblem::new(0.5, 1.0, a(0.5), 1.0);
        let exact = p.exact().unwrap();
        let rel = (p.amplitude(1e-3).unwrap() - exact).norm() / exact.norm();
        assert!(rel < 5e-3, "{rel}");
    }

    #[test]
    fn orders() {
        let dts = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0];
        let half = convergence_order(&EigenmodeProblem::new(0.5, 1.0, a(0.5), 1.0), &dts).unwrap();
        assert!((half - 1.5).abs() < 0.2, "{half}");
        let one = convergence_order(&EigenmodeProblem::new(0.5, 1.0, a(1.0), 1.0), &dts).unwrap();
        assert!((one - 1.0).abs() < 0.2, "{one}");
        let mut plain = EigenmodeProblem::new(0.5, 1.0, a(0.5), 1.0);
        plain.scheme = L1Scheme::Plain;
        let p = convergence_order(&plain, &dts).unwrap();
        assert!((p - 1.0).abs() < 0.2, "{p}");
    }

    #[test]
    fn slope_edge_cases() {
        assert_eq!(log_log_slope(&[0.1, 0.2, 0.4], &[1e-3; 3]).unwrap(), 0.0);
        assert!(matches!(
            log_log_slope(&[0.1, 0.2], &[1.0, 2.0]),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn stability_guard() {
        let h = DMatrix::from_element(1, 1, Complex64::new(1e4, 0.0));
        let psi0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let err = CaputoSolverState::new(h, psi0, CaputoParams::new(a(0.5), 1.0, 0.01)).unwrap_err();
        assert!(matches!(err, Error::StabilityGuardTripped { .. }));
    }

    #[test]
    fn recompute_is_bit_identical() {
        let h = DMatrix::from_fn(3, 3, |i, j| Complex64::new(if i == j { 1.0 + i as f64 } else { 0.3 }, 0.0));
        let psi0 = DVector::from_element(3, Complex64::new(1.0, 0.0));
        let mut st = CaputoSolverState::new(h, psi0, CaputoParams::new(a(0.6), 1.0, 0.01)).unwrap();
        for _ in 0..40 {
            st.step().unwrap();
        }
        for n in [1, 2, 20, 40] {
            assert_eq!(st.recompute(n).unwrap(), st.history()[n]);
        }
        assert_eq!(st.history().len(), st.steps() + 1);
    }
}
