//! One-parameter Mittag-Leffler function `E_α(z) = Σ z^j / Γ(jα + 1)` for
//! complex `z` and `0 < α ≤ 1`.
//!
//! Three evaluation paths: the power series (small `|z|`), the identity
//! `E_{1/2}(z) = exp(z²) erfc(-z)`, and numerical inversion of the Laplace
//! transform `s^{α-1} / (s^α - z)` along a pair of rays. [`mittag_leffler`]
//! picks one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Quad;
use crate::special::{faddeeva, gamma, ln_gamma, principal_pow};

/// Radius inside which the series is attempted.
pub const SERIES_RADIUS: f64 = 5.0;

const MAX_SERIES_TERMS: usize = 10_000;

/// Fractional order `α ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const ONE: FractionalOrder = FractionalOrder(1.0);
    pub const HALF: FractionalOrder = FractionalOrder(0.5);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(FractionalOrder(alpha))
        } else {
            Err(Error::InvalidArgument(format!("fractional order must lie in (0, 1], got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_half(self) -> bool {
        self.0 == 0.5
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        FractionalOrder::new(a)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

/// Radius of the disk in which [`mlf_series`] is accepted.
pub fn series_radius(_alpha: FractionalOrder) -> f64 {
    SERIES_RADIUS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MlfMethod {
    Series,
    HalfOrderIdentity,
    Contour,
    /// `α = 1`, evaluated as `exp(z)`.
    Exponential,
}

impl MlfMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MlfMethod::Series => "series",
            MlfMethod::HalfOrderIdentity => "half_order_identity",
            MlfMethod::Contour => "contour",
            MlfMethod::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlfEvalReport {
    pub value: Complex64,
    pub method: MlfMethod,
    pub est_abs_error: f64,
}

fn exact_one(method: MlfMethod) -> MlfEvalReport {
    MlfEvalReport { value: Complex64::new(1.0, 0.0), method, est_abs_error: 0.0 }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Partial sum of the power series.
///
/// Stops once a term drops below `tol` while the terms are decreasing. The
/// error estimate adds a geometric bound on the tail to the accumulated
/// rounding error, which for large `|z|` and small `α` can dwarf the
/// value itself; callers should check it.
pub fn mlf_series(alpha: FractionalOrder, z: Complex64, tol: f64) -> Result<MlfEvalReport> {
    check_tol(tol)?;
    if z.norm() > SERIES_RADIUS {
        return Err(Error::InvalidArgument(format!("|z| = {} exceeds the series radius {SERIES_RADIUS}", z.norm())));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(exact_one(MlfMethod::Series));
    }
    let a = alpha.value();
    let log_z = z.ln();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut abs_sum = 1.0;
    let mut power = Complex64::new(1.0, 0.0);
    let mut prev_mag = 1.0;
    for j in 1..MAX_SERIES_TERMS {
        let arg = j as f64 * a + 1.0;
        power *= z;
        let term = if arg < 170.0 && power.is_finite() {
            power / gamma(arg)
        } else {
            (j as f64 * log_z - ln_gamma(arg)).exp()
        };
        let mag = term.norm();
        sum += term;
        abs_sum += mag;
        if mag < tol && mag < prev_mag {
            let ratio = mag / prev_mag;
            let tail = if ratio < 0.9 { mag * ratio / (1.0 - ratio) } else { 10.0 * mag };
            let rounding = 2.0 * f64::EPSILON * abs_sum * (j as f64).sqrt();
            return Ok(MlfEvalReport { value: sum, method: MlfMethod::Series, est_abs_error: tail + rounding });
        }
        prev_mag = mag;
    }
    Err(Error::NonConvergent { terms: MAX_SERIES_TERMS, last_term: prev_mag })
}

/// `E_{1/2}(z) = exp(z²) erfc(-z)`, written through the Faddeeva function so
/// that the left half-plane never forms `exp(z²)` explicitly.
pub fn mlf_half_order(z: Complex64) -> Result<MlfEvalReport> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(exact_one(MlfMethod::HalfOrderIdentity));
    }
    let i = Complex64::i();
    let (value, scale) = if z.re <= 0.0 {
        // erfc(-z) = exp(-z²) w(-iz)
        let w = faddeeva(-i * z);
        (w, w.norm())
    } else {
        // erfc(-z) = 2 - exp(-z²) w(iz)
        let re_z2 = (z * z).re;
        if re_z2 > 709.78 {
            return Err(Error::Overflow { re_z2 });
        }
        let e = 2.0 * (z * z).exp();
        let w = faddeeva(i * z);
        (e - w, e.norm() + w.norm())
    };
    Ok(MlfEvalReport { value, method: MlfMethod::HalfOrderIdentity, est_abs_error: 5e-14 * scale })
}

// Integration stops where exp(r cos θ) < e^-39.
const CONTOUR_DECAY: f64 = 39.0;
const MIN_POLE_MARGIN: f64 = 1e-3;

/// Laplace-inversion evaluation for `0 < α < 1`.
///
/// The Bromwich contour is folded onto the rays `arg s = ±θ`, with `θ`
/// picked from `[0.6π, π]` so that the pole `s = z^{1/α}` keeps the widest
/// angular distance from both rays. If the pole lies inside the contour its
/// residue `exp(z^{1/α}) / α` is added explicitly.
pub fn mlf_contour(alpha: FractionalOrder, z: Complex64, tol: f64) -> Result<MlfEvalReport> {
    check_tol(tol)?;
    let a = alpha.value();
    if a >= 1.0 {
        return Err(Error::InvalidArgument("contour evaluation needs alpha < 1".into()));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(exact_one(MlfMethod::Contour));
    }

    let arg_z = z.arg();
    let (theta, margin) = (0..=40)
        .map(|k| {
            let th = PI * (0.6 + 0.4 * k as f64 / 40.0);
            let m = (arg_z - a * th).abs().min((arg_z + a * th).abs());
            (th, m)
        })
        .fold((PI, -1.0), |best, c| if c.1 > best.1 { c } else { best });
    if margin < MIN_POLE_MARGIN {
        return Err(Error::ContourFailure(format!(
            "pole of the Laplace kernel within {margin:e} rad of every admissible ray"
        )));
    }

    let residue = if arg_z.abs() < a * theta { principal_pow(z, 1.0 / a).exp() / a } else { Complex64::new(0.0, 0.0) };
    if !residue.is_finite() {
        return Err(Error::Overflow { re_z2: f64::INFINITY });
    }

    // s = r e^{±iθ}, r = v^{1/α}: the 1/(s^α - z) factor becomes 1/(v e^{±iαθ} - z)
    let r_max = CONTOUR_DECAY / theta.cos().abs();
    let v_max = r_max.powf(a);
    let e1 = Complex64::from_polar(1.0, theta);
    let e2 = Complex64::from_polar(1.0, a * theta);
    let pref = 1.0 / (2.0 * PI * a);
    let integrand = |v: f64| {
        let r = v.powf(1.0 / a);
        let up = (r * e1).exp() * e2 / (v * e2 - z);
        let lo = (r * e1.conj()).exp() * e2.conj() / (v * e2.conj() - z);
        // (up - lo) / (2πi α)
        (up - lo) * Complex64::new(0.0, -pref)
    };
    let mut breaks = vec![0.0];
    let zn = z.norm();
    if zn < v_max {
        breaks.push(zn);
    }
    breaks.push(v_max);
    let q = Quad::new(0.1 * tol).with_max_evals(400_000);
    let res = q.integrate_with_breaks(integrand, &breaks).map_err(|e| match e {
        Error::QuadratureFailure { achieved, .. } => {
            Error::ContourFailure(format!("ray quadrature reached only {achieved:e} (pole margin {margin:.3e} rad)"))
        }
        other => other,
    })?;
    // tail beyond r_max is below e^-39 times an O(1/dist) factor
    let tail = (-CONTOUR_DECAY).exp() / (zn * margin.sin()).max(1e-3);
    Ok(MlfEvalReport {
        value: residue + res.value,
        method: MlfMethod::Contour,
        est_abs_error: res.abs_error + tail + 4.0 * f64::EPSILON * residue.norm(),
    })
}

/// Evaluate `E_α(z)` by the most suitable method.
///
/// `α = 1` is `exp(z)`, `α = 1/2` goes through the error-function identity,
/// otherwise the series is used inside [`SERIES_RADIUS`] when its error
/// estimate meets `tol`, and the contour method elsewhere.
pub fn mittag_leffler(alpha: FractionalOrder, z: Complex64, tol: f64) -> Result<MlfEvalReport> {
    check_tol(tol)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(exact_one(MlfMethod::Series));
    }
    if alpha.is_one() {
        let value = z.exp();
        return Ok(MlfEvalReport {
            value,
            method: MlfMethod::Exponential,
            est_abs_error: 2.0 * f64::EPSILON * value.norm(),
        });
    }
    if alpha.is_half() {
        return mlf_half_order(z);
    }
    if z.norm() <= SERIES_RADIUS {
        match mlf_series(alpha, z, tol) {
            Ok(rep) if rep.est_abs_error <= tol.max(1e-15 * rep.value.norm()) => return Ok(rep),
            Ok(rep) => log::debug!(
                "series error {:e} above tol at alpha = {}, z = {z}; using contour",
                rep.est_abs_error,
                alpha.value()
            ),
            Err(Error::NonConvergent { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    mlf_contour(alpha, z, tol)
}
