//! Dilation Hamiltonian `H = -2iħω (x ∂_x + 1/2)`: standard evolution,
//! the semiclassical evolution under `H²/2`, and their second moments.
//!
//! Standard evolution is the unitary rescaling
//! `ψ(x, t) = e^{-ωt} ψ₀(x e^{-2ωt})`. Writing `e^{-itH²/2ħ}` as a Fresnel
//! average over dilations gives
//!
//! ```text
//! ψ_scl(x, t) = (2ω)^{-1} (2πiħt)^{-1/2} ∫ du exp(iu²/(8ω²ħt) - u/2) ψ₀(x e^{-u})
//! ```
//!
//! With `ω = 1/(2ħ)` ([`DilationParams::canonical`]) every formula here reduces to
//! the `ω`-free form, e.g. `ψ(x, t) = e^{-t/2ħ} ψ₀(x e^{-t/ħ})`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::Quad;
use crate::wave::{Grid, WaveFunction};

/// Default floor for the Gaussian decay rate below which the semiclassical
/// moment integral is declared divergent.
pub const DECAY_FLOOR: f64 = 1e-12;

/// Imaginary excursion of the tanh contour used for `ψ_scl`.
const CONTOUR_SHIFT: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationParams {
    pub hbar: f64,
    pub omega: f64,
}

impl DilationParams {
    pub fn new(hbar: f64, omega: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        Ok(DilationParams { hbar, omega })
    }

    /// `ω = 1/(2ħ)`.
    pub fn canonical(hbar: f64) -> Result<Self> {
        DilationParams::new(hbar, 0.5 / hbar)
    }

    /// Dilation angle `2ωt` that enters the semiclassical moment.
    pub fn angle(&self, t: f64) -> f64 {
        2.0 * self.omega * t
    }
}

/// Initial state given as a function that can be evaluated off the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `amp · exp(-a (x - center)²)`
    Gaussian { center: f64, a: f64, amp: f64 },
    /// `amp · H_n(√(2a) (x - center)) · exp(-a (x - center)²)`
    HermiteGaussian { order: u32, center: f64, a: f64, amp: f64 },
    /// Grid samples, linearly interpolated; real arguments only.
    Sampled(WaveFunction),
}

fn hermite(n: u32, z: Complex64) -> Complex64 {
    let mut h0 = Complex64::new(1.0, 0.0);
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * z;
    for k in 1..n {
        let h2 = 2.0 * z * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl Profile {
    pub fn gaussian(center: f64, a: f64, amp: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && center.is_finite() && amp.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad Gaussian profile a={a}, center={center}, amp={amp}")));
        }
        Ok(Profile::Gaussian { center, a, amp })
    }

    /// `e^{-x²}/√π`, not L²-normalized.
    pub fn gaussian_literal() -> Self {
        Profile::Gaussian { center: 0.0, a: 1.0, amp: 1.0 / PI.sqrt() }
    }

    /// `(2/π)^{1/4} e^{-x²}`, unit norm, `⟨x²⟩ = 1/4`.
    pub fn gaussian_normalized() -> Self {
        Profile::Gaussian { center: 0.0, a: 1.0, amp: (2.0 / PI).powf(0.25) }
    }

    /// Unit-norm Hermite-Gaussian of the given order.
    pub fn hermite_gaussian(order: u32, center: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && center.is_finite()) || order > 60 {
            return Err(Error::InvalidArgument(format!("bad Hermite-Gaussian profile order={order}, a={a}")));
        }
        let fact: f64 = (1..=order).map(f64::from).product();
        let amp = ((2.0 * a).sqrt() / (2f64.powi(order as i32) * fact * PI.sqrt())).sqrt();
        Ok(Profile::HermiteGaussian { order, center, a, amp })
    }

    pub fn sampled(psi: WaveFunction) -> Self {
        Profile::Sampled(psi)
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Profile::Sampled(_))
    }

    /// `(center, a)` of the Gaussian envelope.
    fn envelope(&self) -> Result<(f64, f64, u32)> {
        match *self {
            Profile::Gaussian { center, a, .. } => Ok((center, a, 0)),
            Profile::HermiteGaussian { order, center, a, .. } => Ok((center, a, order)),
            Profile::Sampled(_) => Err(Error::NotAnalytic),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Profile::Gaussian { center, a, amp } => {
                let d = z - center;
                Ok(*amp * (-*a * d * d).exp())
            }
            Profile::HermiteGaussian { order, center, a, amp } => {
                let d = z - center;
                Ok(*amp * hermite(*order, (2.0 * a).sqrt() * d) * (-*a * d * d).exp())
            }
            Profile::Sampled(psi) => {
                if z.im != 0.0 {
                    return Err(Error::NotAnalytic);
                }
                interpolate(psi, z.re)
            }
        }
    }

    pub fn eval_real(&self, x: f64) -> Result<Complex64> {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn sample(&self, grid: Grid) -> Result<WaveFunction> {
        let samples = (0..grid.n).map(|i| self.eval_real(grid.x(i))).collect::<Result<Vec<_>>>()?;
        WaveFunction::new(grid, samples)
    }

    /// `∫ x² |ψ₀(x)|² dx`.
    pub fn second_moment(&self) -> Result<f64> {
        match self {
            Profile::Gaussian { center, a, amp } => {
                Ok(amp * amp * (PI / (2.0 * a)).sqrt() * (0.25 / a + center * center))
            }
            Profile::HermiteGaussian { center, a, order, .. } => {
                let half = (f64::from(*order) + 40.0).sqrt() / a.sqrt() + 1.0;
                let breaks: Vec<f64> = (0..=64).map(|k| center - half + 2.0 * half * k as f64 / 64.0).collect();
                let r = Quad::new(1e-15).with_rel_tol(1e-13).integrate_with_breaks(
                    |x| Complex64::new(x * x * self.eval_real(x).map(|v| v.norm_sqr()).unwrap_or(f64::NAN), 0.0),
                    &breaks,
                )?;
                Ok(r.value.re)
            }
            Profile::Sampled(psi) => Ok(psi.second_moment()),
        }
    }
}

fn interpolate(psi: &WaveFunction, x: f64) -> Result<Complex64> {
    let g = psi.grid();
    let (lo, hi) = (g.x_min, g.x_max);
    if !(x >= lo && x <= hi) {
        return Err(Error::ExtrapolationBeyondProfile { x, lo, hi });
    }
    let pos = (x - lo) / g.dx();
    let i = (pos.floor() as usize).min(g.n - 2);
    let f = pos - i as f64;
    let s = psi.samples();
    Ok(s[i] * (1.0 - f) + s[i + 1] * f)
}

fn check_t(t: f64, strict: bool) -> Result<()> {
    let ok = t.is_finite() && if strict { t > 0.0 } else { t >= 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("bad evolution time {t}")))
    }
}

/// `e^{-ωt} ψ₀(x e^{-2ωt})` on `grid`.
pub fn evolve_standard(params: DilationParams, psi0: &Profile, grid: Grid, t: f64) -> Result<WaveFunction> {
    check_t(t, false)?;
    let damp = (-params.omega * t).exp();
    let shrink = (-2.0 * params.omega * t).exp();
    let samples = (0..grid.n).map(|i| Ok(damp * psi0.eval_real(grid.x(i) * shrink)?)).collect::<Result<Vec<_>>>()?;
    WaveFunction::new(grid, samples)
}

/// `e^{4ωt} ∫ x² |ψ₀|² dx`.
pub fn second_moment_standard(params: DilationParams, psi0: &Profile, t: f64) -> Result<f64> {
    check_t(t, false)?;
    Ok((4.0 * params.omega * t).exp() * psi0.second_moment()?)
}

/// `ψ_scl(x, t)` at one point.
///
/// The `u`-integral runs along `u = v + iδ tanh v`, `δ = π/8`, where the
/// Fresnel factor decays exponentially on both ends; the Gaussian envelope
/// keeps decaying because `cos 2δ > 0`. At `x = 0` the integral is the
/// closed form `ψ₀(0) e^{iω²ħt/2}`.
pub fn semiclassical_point(params: DilationParams, psi0: &Profile, x: f64, t: f64, quad_tol: f64) -> Result<Complex64> {
    check_t(t, true)?;
    let (center, a, order) = psi0.envelope()?;
    let (hbar, omega) = (params.hbar, params.omega);
    if x == 0.0 {
        return Ok(psi0.eval_real(0.0)? * Complex64::new(0.0, 0.5 * omega * omega * hbar * t).exp());
    }
    let b = 1.0 / (8.0 * omega * omega * hbar * t);
    let pre = Complex64::from_polar(1.0 / (2.0 * omega * (2.0 * PI * hbar * t).sqrt()), -PI / 4.0);
    let delta = CONTOUR_SHIFT;

    let v_hi = 45.0 / (0.5 + 2.0 * b * delta) + 1.0;
    // beyond |x| e^{-v} > reach the envelope is below e^{-45} even after the e^{|v|/2} growth
    let mut v_lo: f64 = -1.0;
    for _ in 0..3 {
        let reach =
            center.abs() + ((45.0 + 0.5 * v_lo.abs() + 2.0 * f64::from(order)) / (a * (2.0 * delta).cos())).sqrt();
        v_lo = -(reach / x.abs()).ln().max(0.0) - 1.0;
    }
    let step = 0.25f64.min(1.0 / b.sqrt());
    let pieces = (((v_hi - v_lo) / step).ceil() as usize).clamp(8, 100_000);
    let breaks: Vec<f64> = (0..=pieces).map(|k| v_lo + (v_hi - v_lo) * k as f64 / pieces as f64).collect();
    let mut failure = None;
    let res = Quad::new(quad_tol / pre.norm()).with_max_evals(5_000_000).integrate_with_breaks(
        |v| {
            let th = v.tanh();
            let u = Complex64::new(v, delta * th);
            let du = Complex64::new(1.0, delta * (1.0 - th * th));
            let arg = x * (-u).exp();
            match psi0.eval(arg) {
                Ok(p) => (Complex64::new(0.0, b) * u * u - 0.5 * u).exp() * p * du,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &breaks,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pre * res.value)
}

/// `ψ_scl(·, t)` on `grid`.
pub fn evolve_semiclassical(
    params: DilationParams,
    psi0: &Profile,
    grid: Grid,
    t: f64,
    quad_tol: f64,
) -> Result<WaveFunction> {
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidArgument("quad_tol must be positive".into()));
    }
    let samples =
        (0..grid.n).map(|i| semiclassical_point(params, psi0, grid.x(i), t, quad_tol)).collect::<Result<Vec<_>>>()?;
    WaveFunction::new(grid, samples)
}

/// How `ψ₀*` is read in `∫ y² ψ₀*(y e^{iθ}) ψ₀(y e^{-iθ}) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conjugation {
    /// Complex conjugate of the value `ψ₀(y e^{iθ})`.
    #[default]
    OfValue,
    /// The function `z ↦ conj(ψ₀(conj z))` evaluated at `y e^{iθ}`; real
    /// for real profiles.
    OfFunction,
}

/// Gaussian decay rate `2a cos 2θ` of the moment integrand, `θ = 2ωt`.
pub fn decay_rate(params: DilationParams, psi0: &Profile, t: f64) -> Result<f64> {
    let (_, a, _) = psi0.envelope()?;
    Ok(2.0 * a * (2.0 * params.angle(t)).cos())
}

/// `∫ y² ψ₀*(y e^{iθ}) ψ₀(y e^{-iθ}) dy` with `θ = 2ωt` (`t/ħ` in canonical mode).
pub fn second_moment_semiclassical(params: DilationParams, psi0: &Profile, t: f64) -> Result<Complex64> {
    second_moment_semiclassical_with(params, psi0, t, Conjugation::OfValue, DECAY_FLOOR)
}

pub fn second_moment_semiclassical_with(
    params: DilationParams,
    psi0: &Profile,
    t: f64,
    conj: Conjugation,
    decay_floor: f64,
) -> Result<Complex64> {
    check_t(t, false)?;
    let (center, a, order) = psi0.envelope()?;
    let rate = decay_rate(params, psi0, t)?;
    if rate <= decay_floor {
        return Err(Error::IntegralDivergent { t, rate, floor: decay_floor });
    }
    let th = params.angle(t);
    let em = Complex64::from_polar(1.0, -th);
    // The integrand is entire in y: with ψ̄(z) = conj(ψ₀(conj z)) it reads
    // y² ψ̄(y e^{∓iθ}) ψ₀(y e^{-iθ}). For the conjugate-of-value reading the
    // Gaussian exponent is -2a y² e^{-2iθ}; integrating along y = r e^{iφ}
    // with φ ≡ θ (mod π) makes it real and removes the oscillation.
    let (phi, along_rate) = match conj {
        Conjugation::OfValue => (th - PI * (th / PI).round(), 2.0 * a),
        Conjugation::OfFunction => (0.0, rate),
    };
    let dir = Complex64::from_polar(1.0, phi);
    let left_rot = match conj {
        Conjugation::OfValue => em,
        Conjugation::OfFunction => em.conj(),
    };
    let conj_fn = |z: Complex64| psi0.eval(z.conj()).map(|v| v.conj());
    let f = |r: f64| -> Result<Complex64> {
        let y = r * dir;
        Ok(y * y * conj_fn(y * left_rot)? * psi0.eval(y * em)? * dir)
    };
    // the linear term of the exponent shifts the peak by at most 4a|c|/rate
    let half = 4.0 * a * center.abs() / along_rate + ((60.0 + 4.0 * f64::from(order)) / along_rate).sqrt() + 1.0;
    let pieces = ((4.0 * half).ceil() as usize).clamp(16, 100_000);
    let breaks: Vec<f64> = (0..=pieces).map(|k| -half + 2.0 * half * k as f64 / pieces as f64).collect();
    let scale = psi0.second_moment()?.max(1e-300);
    let mut failure = None;
    let r = Quad::new(1e-14 * scale).with_rel_tol(1e-12).with_max_evals(5_000_000).integrate_with_breaks(
        |y| {
            f(y).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            })
        },
        &breaks,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value)
}

/// First `t ∈ [0, t_max]` where the decay rate reaches `decay_floor`,
/// refined by bisection; `None` if the window has none.
pub fn divergence_time(params: DilationParams, psi0: &Profile, t_max: f64) -> Result<Option<f64>> {
    divergence_time_with(params, psi0, t_max, DECAY_FLOOR)
}

pub fn divergence_time_with(
    params: DilationParams,
    psi0: &Profile,
    t_max: f64,
    decay_floor: f64,
) -> Result<Option<f64>> {
    check_t(t_max, false)?;
    let diverges = |t: f64| decay_rate(params, psi0, t).map(|r| r <= decay_floor);
    if diverges(0.0)? {
        return Ok(Some(0.0));
    }
    // the rate is a cosine in t with half-period π/(4ω)
    let step = (t_max / 1024.0).min(PI / (32.0 * params.omega));
    let mut lo = 0.0;
    let mut hi = None;
    while lo < t_max {
        let next = (lo + step).min(t_max);
        if diverges(next)? {
            hi = Some(next);
            break;
        }
        lo = next;
    }
    let Some(mut hi) = hi else { return Ok(None) };
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if diverges(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    Standard,
    Semiclassical,
}

impl MomentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentMode::Standard => "standard",
            MomentMode::Semiclassical => "semiclassical",
        }
    }
}

/// `⟨x²⟩` over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrace {
    pub times: Vec<f64>,
    /// NaN where the integral diverges.
    pub x2_values: Vec<Complex64>,
    pub diverged: Vec<bool>,
    pub diverged_at: Option<f64>,
}

impl MomentTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV `t,x2_re,x2_im,diverged`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x2_re,x2_im,diverged")?;
        for ((t, v), d) in self.times.iter().zip(&self.x2_values).zip(&self.diverged) {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{}", t, v.re, v.im, u8::from(*d))?;
        }
        Ok(())
    }
}

pub fn moment_trace(
    params: DilationParams,
    psi0: &Profile,
    times: &[f64],
    mode: MomentMode,
    conj: Conjugation,
) -> Result<MomentTrace> {
    let mut trace = MomentTrace {
        times: times.to_vec(),
        x2_values: Vec::with_capacity(times.len()),
        diverged: Vec::with_capacity(times.len()),
        diverged_at: None,
    };
    for &t in times {
        let v = match mode {
            MomentMode::Standard => Ok(Complex64::new(second_moment_standard(params, psi0, t)?, 0.0)),
            MomentMode::Semiclassical => second_moment_semiclassical_with(params, psi0, t, conj, DECAY_FLOOR),
        };
        match v {
            Ok(v) => {
                trace.x2_values.push(v);
                trace.diverged.push(false);
            }
            Err(Error::IntegralDivergent { .. }) => {
                trace.x2_values.push(Complex64::new(f64::NAN, f64::NAN));
                trace.diverged.push(true);
            }
            Err(e) => return Err(e),
        }
    }
    if mode == MomentMode::Semiclassical {
        if let Some(&t_max) = times.last() {
            trace.diverged_at = divergence_time(params, psi0, t_max)?;
        }
    }
    Ok(trace)
}
