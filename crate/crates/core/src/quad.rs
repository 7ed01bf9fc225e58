//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! A 10-point Gauss / 21-point Kronrod pair is applied on each subinterval;
//! the interval with the largest error estimate is bisected until the global
//! estimate meets the tolerance or the evaluation budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evals: usize,
}

/// Tolerances and budget for [`Quad::integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Quad {
    pub fn new(abs_tol: f64) -> Self {
        Quad { abs_tol, rel_tol: 0.0, max_evals: 2_000_000 }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Complex64,
    {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrate `f` over `[breaks[0], breaks[last]]`, starting the adaptive
    /// subdivision from the given breakpoints (kinks, near-singularities).
    pub fn integrate_with_breaks<F>(&self, mut f: F, breaks: &[f64]) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Complex64,
    {
        if breaks.len() < 2 {
            return Err(Error::InvalidArgument("quadrature needs at least two breakpoints".into()));
        }
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
        }

        let mut heap = BinaryHeap::new();
        let mut total = Complex64::new(0.0, 0.0);
        let mut total_err = 0.0;
        let mut evals = 0;

        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == b {
                continue;
            }
            let seg = gk21(&mut f, a, b);
            evals += 21;
            total += seg.value;
            total_err += seg.error;
            heap.push(seg);
        }

        loop {
            let target = self.abs_tol.max(self.rel_tol * total.norm());
            if total_err <= target {
                break;
            }
            if evals + 42 > self.max_evals {
                return Err(Error::QuadratureFailure { achieved: total_err, requested: target, evals });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                // Interval exhausted at machine resolution; nothing left to refine.
                return Err(Error::QuadratureFailure { achieved: total_err, requested: target, evals });
            }
            let left = gk21(&mut f, worst.a, mid);
            let right = gk21(&mut f, mid, worst.b);
            evals += 42;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }

        // Re-sum to shed the drift of repeated add/subtract updates.
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for s in heap.iter() {
            value += s.value;
            err += s.error;
        }
        Ok(QuadResult { value, abs_error: err, evals })
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Segment
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = Complex64::new(0.0, 0.0);
    let mut res_abs = fc.norm() * WGK[10];

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += (f1 + f2) * *wg;
        res_k += (f1 + f2) * WGK[jtw];
        res_abs += WGK[jtw] * (f1.norm() + f2.norm());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += (f1 + f2) * WGK[jtwm1];
        res_abs += WGK[jtwm1] * (f1.norm() + f2.norm());
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    res_asc *= scale;
    res_abs *= scale;

    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let underflow = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if res_abs > underflow {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment { a, b, value: res_k * half, error: err }
}

/// Limit `eps -> 0` of a Gaussian-regulated integral `I(eps)` by linear
/// Richardson extrapolation from `I(eps)` and `I(2 eps)`.
///
/// Returns the extrapolated value and `|I(eps) - I(2 eps)|` as a size
/// indicator of the remaining regulator bias.
pub fn regulator_limit<F>(eps: f64, mut regulated: F) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("regulator eps must be positive".into()));
    }
    let i1 = regulated(eps)?;
    let i2 = regulated(2.0 * eps)?;
    Ok((2.0 * i1 - i2, (i1 - i2).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = Quad::new(1e-12);
        let r = q.integrate(|x| Complex64::new(x * x * x - 2.0 * x, x * x), -1.0, 2.0).unwrap();
        assert!((r.value - Complex64::new(3.75 - 3.0, 3.0)).norm() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let q = Quad::new(1e-12);
        let r = q.integrate(|x| Complex64::new(x.sqrt(), 0.0), 0.0, 1.0).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-11, "{:?}", r);
    }

    #[test]
    fn oscillatory_gaussian() {
        // integral of exp(-x^2 + 3 i x) over R = sqrt(pi) exp(-9/4)
        let q = Quad::new(1e-13);
        let r = q.integrate(|x| Complex64::new(-x * x, 3.0 * x).exp(), -12.0, 12.0).unwrap();
        let exact = PI.sqrt() * (-2.25f64).exp();
        assert!((r.value - exact).norm() < 1e-12);
        assert!(r.abs_error < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_failure() {
        let q = Quad::new(1e-15).with_max_evals(100);
        let err = q.integrate(|x| Complex64::new((1000.0 * x).sin(), 0.0), 0.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let q = Quad::new(1e-13);
        let r = q.integrate_with_breaks(|x| Complex64::new(x.abs(), 0.0), &[-1.0, 0.0, 3.0]).unwrap();
        assert!((r.value.re - 5.0).abs() < 1e-13);
    }

    #[test]
    fn regulator_removes_linear_bias() {
        // I(eps) = 1 + 3 eps + eps^2 -> limit 1 with O(eps^2) residue
        let (v, _) = regulator_limit(1e-3, |e| Ok(Complex64::new(1.0 + 3.0 * e + e * e, 0.0))).unwrap();
        assert!((v.re - 1.0).abs() < 3e-6);
    }
}
