//! Quantum dynamics on a comb: backbone coordinate `y`, teeth coordinate
//! `x`, with the `x`-Hamiltonian acting only at `y = 0`.
//!
//! Per eigenmode `λ` of `H(x)` the backbone sees a `λ δ(y)` potential whose
//! Green function is
//!
//! ```text
//! G_λ(y, t; y') = G₀(y, t; y') - (λ/ħ) ∫₀^∞ du G₀(|y| + |y'| + u, t; 0) e^{-uλ/ħ}
//! G₀(y, t; y')  = (2πiħt)^{-1/2} exp(i (y - y')² / 2ħt)
//! ```
//!
//! `G₀` solves `iħ ∂_t G = -(ħ²/2) ∂²_y G`; that is the sign convention used
//! throughout, including the residual check in [`pde_residual`].

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{regulator_limit, Quad};
use crate::special::faddeeva;
use crate::spectral::{significant_modes, SpectralDecomposition};
use crate::wave::Grid;

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("propagator needs t > 0, got {t}")))
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")))
    }
}

/// `(2πiħt)^{-1/2}` on the principal branch.
fn prefactor(t: f64, hbar: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI * hbar * t).sqrt(), -PI / 4.0)
}

fn g0(d: f64, t: f64, hbar: f64) -> Complex64 {
    prefactor(t, hbar) * Complex64::new(0.0, d * d / (2.0 * hbar * t)).exp()
}

/// Free-particle propagator `G₀(y, t; y')`.
pub fn free_propagator(y: f64, t: f64, y_prime: f64, hbar: f64) -> Result<Complex64> {
    check_time(t)?;
    check_hbar(hbar)?;
    Ok(g0(y - y_prime, t, hbar))
}

/// Coupling of one `x`-mode to the backbone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaGreenParams {
    pub lam: f64,
    pub hbar: f64,
}

impl DeltaGreenParams {
    pub fn new(lam: f64, hbar: f64) -> Result<Self> {
        if !lam.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be finite, got {lam}")));
        }
        check_hbar(hbar)?;
        Ok(DeltaGreenParams { lam, hbar })
    }
}

/// `G_λ(y, t; y')`.
///
/// The `u`-integral is rotated onto `u = e^{iπ/4} v`, where the integrand
/// decays like `exp(-v²/2ħt)`; no regulator is needed. `λ < 0` makes the
/// integral diverge and is reported as [`Error::DivergentTail`].
pub fn delta_green(y: f64, t: f64, y_prime: f64, params: DeltaGreenParams, quad_tol: f64) -> Result<Complex64> {
    check_time(t)?;
    check_hbar(params.hbar)?;
    let (lam, hbar) = (params.lam, params.hbar);
    let free = g0(y - y_prime, t, hbar);
    if lam == 0.0 {
        return Ok(free);
    }
    if lam < 0.0 {
        return Err(Error::DivergentTail { lam });
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidArgument("quad_tol must be positive".into()));
    }
    let beta = lam / hbar;
    let kappa = 1.0 / (2.0 * hbar * t);
    let a = y.abs() + y_prime.abs();
    let rot = Complex64::from_polar(1.0, PI / 4.0);
    let pre = prefactor(t, hbar);
    let v_max = (40.0 / kappa).sqrt();
    let res = Quad::new(quad_tol / beta).integrate(
        |v| {
            let u = rot * v;
            let s = a + u;
            pre * (Complex64::new(0.0, kappa) * s * s - beta * u).exp() * rot
        },
        0.0,
        v_max,
    )?;
    Ok(free - beta * res.value)
}

/// `iħ ∂_t G + (ħ²/2) ∂²_y G` for `G = G_λ(·, ·; y')` by central differences
/// with steps `h_t`, `h_y`.
pub fn pde_residual(
    y: f64,
    t: f64,
    y_prime: f64,
    params: DeltaGreenParams,
    h_t: f64,
    h_y: f64,
    quad_tol: f64,
) -> Result<Complex64> {
    if !(h_t > 0.0 && h_t < t && h_y > 0.0) {
        return Err(Error::InvalidArgument("finite-difference steps must be positive and h_t < t".into()));
    }
    let g = |yy: f64, tt: f64| delta_green(yy, tt, y_prime, params, quad_tol);
    let dt = (g(y, t + h_t)? - g(y, t - h_t)?) / (2.0 * h_t);
    let dyy = (g(y + h_y, t)? - 2.0 * g(y, t)? + g(y - h_y, t)?) / (h_y * h_y);
    let hbar = params.hbar;
    Ok(Complex64::new(0.0, hbar) * dt + 0.5 * hbar * hbar * dyy)
}

/// `∫ G₀(y, t₁; z) G₀(z, t₂; y') dz` with the Gaussian regulator
/// `exp(-ε z²)`, extrapolated linearly to `ε → 0` from `ε` and `2ε`.
/// Returns the extrapolated value and the size of the regulator correction.
pub fn free_composition(
    y: f64,
    t1: f64,
    t2: f64,
    y_prime: f64,
    hbar: f64,
    eps: f64,
    quad_tol: f64,
) -> Result<(Complex64, f64)> {
    check_time(t1)?;
    check_time(t2)?;
    check_hbar(hbar)?;
    regulator_limit(eps, |e| {
        let z_max = (40.0 / e).sqrt() + y.abs() + y_prime.abs();
        let pieces = (2.0 * z_max).ceil() as usize;
        let breaks: Vec<f64> = (0..=pieces).map(|k| -z_max + 2.0 * z_max * k as f64 / pieces as f64).collect();
        let r = Quad::new(quad_tol)
            .with_max_evals(20_000_000)
            .integrate_with_breaks(|z| g0(y - z, t1, hbar) * g0(z - y_prime, t2, hbar) * (-e * z * z).exp(), &breaks)?;
        Ok(r.value)
    })
}

/// Wave function on the comb, sampled on an `x` grid times a `y` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CombState {
    x: Grid,
    y: Grid,
    hbar: f64,
    /// Row-major in `x`: sample `(i, j)` is at `i * ny + j`.
    samples: Vec<Complex64>,
}

impl CombState {
    pub fn new(x: Grid, y: Grid, hbar: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_hbar(hbar)?;
        if samples.len() != x.n * y.n {
            return Err(Error::GridMismatch(format!("{} samples for a {} x {} comb grid", samples.len(), x.n, y.n)));
        }
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("comb state has non-finite samples".into()));
        }
        Ok(CombState { x, y, hbar, samples })
    }

    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(x: Grid, y: Grid, hbar: f64, mut f: F) -> Result<Self> {
        let mut samples = Vec::with_capacity(x.n * y.n);
        for i in 0..x.n {
            for j in 0..y.n {
                samples.push(f(x.x(i), y.x(j)));
            }
        }
        CombState::new(x, y, hbar, samples)
    }

    pub fn x_grid(&self) -> &Grid {
        &self.x
    }

    pub fn y_grid(&self) -> &Grid {
        &self.y
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.samples[i * self.y.n + j]
    }

    /// `Σ |Ψ|² Δx Δy`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.x.dx() * self.y.dx()
    }

    /// Discrete L² distance to another state on the same grids.
    pub fn distance(&self, other: &CombState) -> Result<f64> {
        if !(self.x.same_as(&other.x) && self.y.same_as(&other.y)) {
            return Err(Error::GridMismatch("comb states live on different grids".into()));
        }
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.x.dx() * self.y.dx()).sqrt())
    }

    /// 2D snapshot CSV: `x,y,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,re,im")?;
        for i in 0..self.x.n {
            for j in 0..self.y.n {
                let z = self.at(i, j);
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", self.x.x(i), self.y.x(j), z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// `|Ψ(x, 0)|²` for every `x` node; `y = 0` is interpolated linearly when it
/// is not a grid node.
pub fn backbone_density(state: &CombState) -> Result<Vec<f64>> {
    let y = state.y_grid();
    if !(y.x_min <= 0.0 && y.x_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("y = 0 is outside the backbone grid [{}, {}]", y.x_min, y.x_max)));
    }
    let pos = -y.x_min / y.dx();
    let j0 = (pos.floor() as usize).min(y.n - 2);
    let frac = pos - j0 as f64;
    let frac = if frac.abs() < 1e-9 { 0.0 } else { frac };
    Ok((0..state.x_grid().n)
        .map(|i| {
            let v = state.at(i, j0) * (1.0 - frac) + state.at(i, j0 + 1) * frac;
            v.norm_sqr()
        })
        .collect())
}

/// Result of [`comb_evolve`].
#[derive(Debug, Clone)]
pub struct CombEvolution {
    pub state: CombState,
    /// Eigenvalues `λ ≤ 0` whose modes were propagated without the
    /// δ-potential correction.
    pub skipped: Vec<f64>,
}

/// Precomputed Fresnel-type primitives on the offsets `d Δy`.
struct Kernels {
    dy: f64,
    kappa: f64,
    c: Complex64,
    /// `P(d Δy) = ∫₀^{dΔy} e^{iκs²} ds` for `d = 0..=len`.
    p: Vec<Complex64>,
    /// `e^{iκ(dΔy)²}`.
    e: Vec<Complex64>,
}

impl Kernels {
    fn new(dy: f64, kappa: f64, len: usize) -> Self {
        let sk = kappa.sqrt();
        let rot = Complex64::from_polar(1.0, PI / 4.0);
        let c = rot * PI.sqrt() / (2.0 * sk);
        let mut p = Vec::with_capacity(len + 1);
        let mut e = Vec::with_capacity(len + 1);
        for d in 0..=len {
            let s = d as f64 * dy;
            let ed = Complex64::new(0.0, kappa * s * s).exp();
            // ∫_s^∞ e^{iκσ²} dσ = C e^{iκs²} w(√κ e^{iπ/4} s)
            p.push(c * (1.0 - ed * faddeeva(rot * sk * s)));
            e.push(ed);
        }
        Kernels { dy, kappa, c, p, e }
    }

    fn p_at(&self, d: i64) -> Complex64 {
        if d >= 0 {
            self.p[d as usize]
        } else {
            -self.p[(-d) as usize]
        }
    }

    fn e_at(&self, d: i64) -> Complex64 {
        self.e[d.unsigned_abs() as usize]
    }

    /// `∫ e^{iκs²} ds` over `[dΔy, (d+1)Δy]`.
    fn i0(&self, d: i64) -> Complex64 {
        self.p_at(d + 1) - self.p_at(d)
    }

    /// `∫ (s - dΔy) e^{iκs²} ds` over `[dΔy, (d+1)Δy]`.
    fn i1(&self, d: i64) -> Complex64 {
        let de = (self.e_at(d + 1) - self.e_at(d)) / Complex64::new(0.0, 2.0 * self.kappa);
        de - d as f64 * self.dy * self.i0(d)
    }
}

/// Propagate `psi0` over the comb for time `t`.
///
/// Each `x`-mode's backbone profile is treated as the piecewise-linear
/// interpolant of its samples (zero outside the `y` grid) and every integral
/// against `G₀` is taken in closed form through the Faddeeva function; there
/// is no quadrature and no artificial boundary. The `y` grid must be
/// symmetric about 0 with an odd number of points.
///
/// The correction term folds the two integrals into one: with
/// `Φ(a) = ψ(a) + ψ(-a)` and `Q(w) = ∫₀^w Φ(a) e^{-β(w-a)} da`,
/// it equals `-β ∫₀^∞ G₀(|y| + w) Q(w) dw`, `β = λ/ħ`. Modes with `λ ≤ 0`
/// get the free term only and are listed in [`CombEvolution::skipped`].
/// For `0 < βΔy ≪ 1` the closed forms lose roughly `(βΔy)^{-2}` in
/// relative accuracy.
pub fn comb_evolve(decomp: &SpectralDecomposition, psi0: &CombState, t: f64) -> Result<CombEvolution> {
    check_time(t)?;
    let xg = *psi0.x_grid();
    let yg = *psi0.y_grid();
    if !xg.same_as(decomp.grid()) {
        return Err(Error::GridMismatch("comb x grid differs from the decomposition grid".into()));
    }
    if (yg.x_min + yg.x_max).abs() > 1e-12 * yg.x_max || yg.n.is_multiple_of(2) {
        return Err(Error::GridMismatch("comb y grid must be symmetric about 0 with an odd number of points".into()));
    }
    if decomp.hbar() != psi0.hbar() {
        return Err(Error::InvalidArgument("comb state and Hamiltonian disagree on hbar".into()));
    }
    let hbar = psi0.hbar();
    let ny = yg.n;
    let half = (ny - 1) / 2;
    let dy = yg.dx();
    let kappa = 1.0 / (2.0 * hbar * t);
    let pre = prefactor(t, hbar);
    let ker = Kernels::new(dy, kappa, ny + 1);

    // project each y column onto the x modes: c[k][j]
    let nx = xg.n;
    let dx = xg.dx();
    let phi = decomp.eigenfunction_matrix();
    let m = decomp.len();
    let mut proj = vec![vec![Complex64::new(0.0, 0.0); ny]; m];
    for (k, row) in proj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..nx {
                s += phi[(i, k)].conj() * psi0.at(i, j);
            }
            *v = s * dx;
        }
    }
    let weights: Vec<Complex64> =
        proj.iter().map(|r| Complex64::new(r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), 0.0)).collect();
    let kept = significant_modes(&weights);

    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
    let mut skipped = Vec::new();
    for &k in &kept {
        let lam = decomp.eigenvalues()[k];
        let psi = &proj[k];
        let mut amp = free_term(psi, &ker, pre);
        if lam > 0.0 {
            let corr = correction_term(psi, &ker, pre, lam / hbar, half);
            for (a, c) in amp.iter_mut().zip(corr) {
                *a += c;
            }
        } else {
            log::warn!("mode with eigenvalue {lam} <= 0: delta-potential correction skipped");
            skipped.push(lam);
        }
        for i in 0..nx {
            let p = phi[(i, k)];
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..ny {
                out[i * ny + j] += p * amp[j];
            }
        }
    }
    Ok(CombEvolution { state: CombState::new(xg, yg, hbar, out)?, skipped })
}

/// `∫ G₀(y_j - y') ψ(y') dy'` for every node `y_j`.
fn free_term(psi: &[Complex64], ker: &Kernels, pre: Complex64) -> Vec<Complex64> {
    let ny = psi.len();
    let dy = ker.dy;
    (0..ny)
        .map(|j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..ny - 1 {
                let d = k as i64 - j as i64;
                let slope = (psi[k + 1] - psi[k]) / dy;
                s += psi[k] * ker.i0(d) + slope * ker.i1(d);
            }
            pre * s
        })
        .collect()
}

/// `-β ∫₀^∞ G₀(|y_j| + w) Q(w) dw` for every node `y_j`.
fn correction_term(psi: &[Complex64], ker: &Kernels, pre: Complex64, beta: f64, half: usize) -> Vec<Complex64> {
    let dy = ker.dy;
    let kappa = ker.kappa;
    let sk = kappa.sqrt();
    let rot = Complex64::from_polar(1.0, PI / 4.0);
    let shift = Complex64::new(0.0, beta / (2.0 * kappa));
    // W(L) = e^{iκ(LΔy)²} w(√κ e^{iπ/4} (LΔy + iβ/2κ)), L = 0..=2·half + 1
    let w: Vec<Complex64> = (0..=2 * half + 1)
        .map(|l| {
            let s = l as f64 * dy;
            ker.e_at(l as i64) * faddeeva(rot * sk * (s + shift))
        })
        .collect();
    let decay = (-beta * dy).exp();

    // Φ on a_k = kΔy, k = 0..=half; piecewise Q(τ) = p + qτ + r e^{-βτ}
    let fold: Vec<Complex64> = (0..=half).map(|k| psi[half + k] + psi[half - k]).collect();
    let mut coef = Vec::with_capacity(half);
    let mut q_node = Complex64::new(0.0, 0.0);
    for k in 0..half {
        let m = (fold[k + 1] - fold[k]) / dy;
        let p = fold[k] / beta - m / (beta * beta);
        let q = m / beta;
        let r = q_node - p;
        coef.push((p, q, r));
        q_node = p + q * dy + r * decay;
    }

    (0..psi.len())
        .map(|j| {
            let off = (j as i64 - half as i64).unsigned_abs() as usize;
            let mut s = Complex64::new(0.0, 0.0);
            for (k, &(p, q, r)) in coef.iter().enumerate() {
                let l = off + k;
                let ie = ker.c * (w[l] - decay * w[l + 1]);
                s += p * ker.i0(l as i64) + q * ker.i1(l as i64) + r * ie;
            }
            // Q(w) = Q(Y) e^{-β(w - Y)} beyond the grid
            s += q_node * ker.c * w[off + half];
            -beta * pre * s
        })
        .collect()
}
