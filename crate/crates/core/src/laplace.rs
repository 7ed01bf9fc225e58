//! Laplace-domain kernels of the comb and FSE Green functions, their poles,
//! and a numerical check of the Caputo Laplace identity
//! `L[∂^α u](s) = s^α ũ(s) - s^{α-1} u(0)`.
//!
//! Every square root is taken as `√(c s) = √c · √s` with the principal `√s`,
//! so the only branch cut of either kernel is `s ∈ (-∞, 0]`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::caputo::caputo_series;
use crate::error::{Error, Result};
use crate::mlf::FractionalOrder;
use crate::spectral::SpectralDecomposition;

const NEWTON_MAX_ITER: usize = 100;
const CONTOUR_POINTS: usize = 256;
/// Relative tolerance for pole-modulus agreement.
pub const MODULUS_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `1 / [√(iħs) (√(-2is/ħ) - λ/ħ)]`
    Comb,
    /// `1 / [√s (√s - λ/√(2iħ))]`
    FseHalf,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Comb => "comb",
            KernelKind::FseHalf => "fse_half",
        }
    }
}

/// One Laplace kernel for a fixed `(λ, ħ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceKernel {
    pub kind: KernelKind,
    pub lam: f64,
    pub hbar: f64,
}

fn on_cut(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0
}

impl LaplaceKernel {
    pub fn new(kind: KernelKind, lam: f64, hbar: f64) -> Result<Self> {
        if !lam.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be finite, got {lam}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(LaplaceKernel { kind, lam, hbar })
    }

    /// `√s`-coefficients `(a, b)` with denominator `a s - b √s`.
    fn coefficients(&self) -> (Complex64, Complex64) {
        let (lam, hbar) = (self.lam, self.hbar);
        let i = Complex64::i();
        match self.kind {
            KernelKind::Comb => {
                let r1 = (i * hbar).sqrt();
                let r2 = (-2.0 * i / hbar).sqrt();
                (r1 * r2, r1 * lam / hbar)
            }
            KernelKind::FseHalf => (Complex64::new(1.0, 0.0), lam / (2.0 * i * hbar).sqrt()),
        }
    }

    pub fn denominator(&self, s: Complex64) -> Complex64 {
        let (a, b) = self.coefficients();
        a * s - b * s.sqrt()
    }

    pub fn denominator_derivative(&self, s: Complex64) -> Complex64 {
        let (a, b) = self.coefficients();
        a - b / (2.0 * s.sqrt())
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        if on_cut(s) {
            return Err(Error::OnBranchCut { re: s.re, im: s.im });
        }
        Ok(1.0 / self.denominator(s))
    }

    /// `iλ²/2ħ` for the comb kernel, `λ²/(2iħ)` for the FSE kernel.
    pub fn documented_pole(&self) -> Complex64 {
        let m = self.lam * self.lam / (2.0 * self.hbar);
        match self.kind {
            KernelKind::Comb => Complex64::new(0.0, m),
            KernelKind::FseHalf => Complex64::new(0.0, -m),
        }
    }

    pub fn branch_points(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0)]
    }
}

pub fn comb_kernel(s: Complex64, lam: f64, hbar: f64) -> Result<Complex64> {
    LaplaceKernel::new(KernelKind::Comb, lam, hbar)?.eval(s)
}

pub fn fse_kernel(s: Complex64, lam: f64, hbar: f64) -> Result<Complex64> {
    LaplaceKernel::new(KernelKind::FseHalf, lam, hbar)?.eval(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleReport {
    pub located_pole: Complex64,
    pub residue_estimate: Complex64,
    pub match_error: f64,
    /// Zeros of the denominator inside the residue circle.
    pub order: i64,
    pub iterations: usize,
}

/// Damped Newton on the kernel denominator from the documented pole, then
/// residue and order from a circle of radius `|s₀|/2` around the root.
pub fn locate_pole(kernel: &LaplaceKernel) -> Result<PoleReport> {
    if kernel.lam == 0.0 {
        return Err(Error::InvalidArgument("no isolated pole for lambda = 0".into()));
    }
    let guess = kernel.documented_pole();
    let scale = guess.norm();
    let mut s = guess;
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=NEWTON_MAX_ITER {
        iterations = it;
        let f = kernel.denominator(s);
        let df = kernel.denominator_derivative(s);
        if df.norm() == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        let mut damp = 1.0;
        let mut next = s - step;
        while (on_cut(next) || kernel.denominator(next).norm() > f.norm()) && damp > 1e-6 {
            damp *= 0.5;
            next = s - step * damp;
        }
        s = next;
        if (step * damp).norm() <= 1e-15 * scale.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged || kernel.denominator(s).norm() > 1e-10 * scale.max(1e-300) {
        return Err(Error::RootFindFailure(format!(
            "{} kernel, lambda = {}: Newton stalled at {s} after {iterations} iterations",
            kernel.kind.as_str(),
            kernel.lam
        )));
    }

    let r = 0.5 * s.norm();
    let mut residue = Complex64::new(0.0, 0.0);
    let mut winding = 0.0;
    let mut prev = kernel.denominator(s + r);
    for k in 0..CONTOUR_POINTS {
        let th = 2.0 * PI * k as f64 / CONTOUR_POINTS as f64;
        let e = Complex64::from_polar(1.0, th);
        let z = s + r * e;
        let d = kernel.denominator(z);
        // ds = i r e dθ
        residue += e * r / d;
        let next_th = 2.0 * PI * (k + 1) as f64 / CONTOUR_POINTS as f64;
        let dn = kernel.denominator(s + r * Complex64::from_polar(1.0, next_th));
        winding += (dn / prev).arg();
        prev = dn;
    }
    residue /= CONTOUR_POINTS as f64;
    Ok(PoleReport {
        located_pole: s,
        residue_estimate: residue,
        match_error: (s - guess).norm(),
        order: (winding / (2.0 * PI)).round() as i64,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub lam: f64,
    pub comb_pole: Complex64,
    pub fse_pole: Complex64,
    pub moduli_match: bool,
    /// Poles coincide after complex conjugation.
    pub conjugate: bool,
    pub simple: bool,
}

/// Both poles for every eigenvalue.
pub fn compare_eigenvalues(eigs: &[f64], hbar: f64) -> Result<Vec<SpectrumRow>> {
    eigs.iter()
        .map(|&lam| {
            let c = locate_pole(&LaplaceKernel::new(KernelKind::Comb, lam, hbar)?)?;
            let f = locate_pole(&LaplaceKernel::new(KernelKind::FseHalf, lam, hbar)?)?;
            let (a, b) = (c.located_pole, f.located_pole);
            let m = lam * lam / (2.0 * hbar);
            let close = |x: f64, y: f64| (x - y).abs() <= MODULUS_RTOL * y.abs();
            Ok(SpectrumRow {
                lam,
                comb_pole: a,
                fse_pole: b,
                moduli_match: close(a.norm(), b.norm()) && close(a.norm(), m) && close(b.norm(), m),
                conjugate: (a - b.conj()).norm() <= MODULUS_RTOL * m,
                simple: c.order == 1 && f.order == 1,
            })
        })
        .collect()
}

pub fn compare_spectra(decomp: &SpectralDecomposition) -> Result<Vec<SpectrumRow>> {
    compare_eigenvalues(decomp.eigenvalues(), decomp.hbar())
}

/// CSV `lambda,comb_re,comb_im,fse_re,fse_im,moduli_match`.
pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "lambda,comb_re,comb_im,fse_re,fse_im,moduli_match")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.lam,
            r.comb_pole.re,
            r.comb_pole.im,
            r.fse_pole.re,
            r.fse_pole.im,
            u8::from(r.moduli_match)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFn {
    Const,
    Linear,
    Quadratic,
    ExpDecay,
}

impl TestFn {
    pub const ALL: [TestFn; 4] = [TestFn::Const, TestFn::Linear, TestFn::Quadratic, TestFn::ExpDecay];

    pub fn eval(self, t: f64) -> f64 {
        match self {
            TestFn::Const => 1.0,
            TestFn::Linear => t,
            TestFn::Quadratic => t * t,
            TestFn::ExpDecay => (-t).exp(),
        }
    }

    /// Closed-form Laplace transform.
    pub fn transform(self, s: f64) -> f64 {
        match self {
            TestFn::Const => 1.0 / s,
            TestFn::Linear => 1.0 / (s * s),
            TestFn::Quadratic => 2.0 / (s * s * s),
            TestFn::ExpDecay => 1.0 / (s + 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TestFn::Const => "const",
            TestFn::Linear => "linear",
            TestFn::Quadratic => "quadratic",
            TestFn::ExpDecay => "exp_decay",
        }
    }
}

const LAPLACE_HORIZON: f64 = 60.0;

fn laplace_of_caputo(alpha: FractionalOrder, f: TestFn, dt: f64, s_grid: &[f64]) -> Vec<f64> {
    let n = (LAPLACE_HORIZON / dt).round() as usize;
    let u: Vec<f64> = (0..=n).map(|k| f.eval(k as f64 * dt)).collect();
    let d = caputo_series(&u, alpha, dt);
    s_grid
        .iter()
        .map(|&s| {
            let mut acc = 0.0;
            for (k, v) in d.iter().enumerate() {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += w * v * (-s * k as f64 * dt).exp();
            }
            acc * dt
        })
        .collect()
}

/// Max over `s ∈ [0.5, 5]` of `|L[∂^α u](s) - (s^α ũ(s) - s^{α-1} u(0))|`,
/// with the left side from the L1 derivative and the trapezoid rule on
/// `[0, 60]`, Richardson-extrapolated in `dt` with order `2 - α`.
pub fn verify_caputo_laplace(alpha: FractionalOrder, f: TestFn) -> f64 {
    let a = alpha.value();
    let dt = if alpha.is_one() { 1e-3 } else { 5e-3 };
    let s_grid: Vec<f64> = (0..10).map(|k| 0.5 + 0.5 * k as f64).collect();
    let coarse = laplace_of_caputo(alpha, f, dt, &s_grid);
    let fine = laplace_of_caputo(alpha, f, dt / 2.0, &s_grid);
    let w = 2f64.powf(2.0 - a);
    s_grid
        .iter()
        .zip(coarse.iter().zip(&fine))
        .map(|(&s, (&c, &h))| {
            let lhs = (w * h - c) / (w - 1.0);
            let rhs = s.powf(a) * f.transform(s) - s.powf(a - 1.0) * f.eval(0.0);
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}
