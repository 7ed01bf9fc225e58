#![allow(clippy::excessive_precision)]

use std::f64::consts::{E, PI};

use fracdyn::error::Error;
use fracdyn::hyperbolic::{
    divergence_time, evolve_semiclassical, evolve_standard, moment_trace, second_moment_semiclassical,
    second_moment_semiclassical_with, second_moment_standard, semiclassical_point, Conjugation, DilationParams,
    MomentMode, Profile, DECAY_FLOOR,
};
use fracdyn::{Complex64, Grid};

// mpmath: real axis for u < 0 joined to the ray arg u = π/8
const PSI_SCL_REF: [(f64, f64, Complex64); 3] = [
    (0.5, 0.1, Complex64::new(0.69653029560402901951, -0.035866705364203206344)),
    (1.3, 1.0, Complex64::new(0.21430255603216725417, -0.0033831584342281608962)),
    (-0.7, 0.4, Complex64::new(0.45156254138220704238, -0.11508029337206948818)),
];

fn canonical() -> DilationParams {
    DilationParams::canonical(1.0).unwrap()
}

#[test]
fn standard_evolution_of_literal_gaussian() {
    let g = Grid::new(-4.0, 4.0, 81).unwrap();
    let psi = evolve_standard(canonical(), &Profile::gaussian_literal(), g, 1.0).unwrap();
    for (i, v) in psi.samples().iter().enumerate() {
        let x = g.x(i);
        let want = (-0.5f64).exp() * (-x * x * (-2.0f64).exp()).exp() / PI.sqrt();
        assert!((v - want).norm() < 1e-15);
    }
    let psi0 = evolve_standard(canonical(), &Profile::gaussian_literal(), g, 0.0).unwrap();
    assert_eq!(psi0, Profile::gaussian_literal().sample(g).unwrap());
}

#[test]
fn standard_evolution_is_unitary() {
    let g = Grid::new(-60.0, 60.0, 24001).unwrap();
    let p = Profile::hermite_gaussian(2, 0.4, 1.0).unwrap();
    for t in [0.0, 0.5, 1.5] {
        let n = evolve_standard(canonical(), &p, g, t).unwrap().norm_sqr();
        assert!((n - 1.0).abs() < 1e-8, "t={t}: {n}");
    }
}

#[test]
fn standard_moment_values() {
    let p = Profile::gaussian_normalized();
    assert!((second_moment_standard(canonical(), &p, 0.0).unwrap() - 0.25).abs() < 1e-15);
    let m1 = second_moment_standard(canonical(), &p, 1.0).unwrap();
    assert!((m1 - 0.25 * E * E).abs() < 1e-14);
    assert!((m1 - 1.8473).abs() < 1e-4);
    let p = Profile::hermite_gaussian(3, -0.2, 0.8).unwrap();
    let m0 = second_moment_standard(canonical(), &p, 0.0).unwrap();
    for t in [0.3, 1.0, 2.0] {
        let r = second_moment_standard(canonical(), &p, t).unwrap() / m0;
        assert!((r / (2.0 * t).exp() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn moment_growth_through_the_grid_path() {
    let g = Grid::new(-40.0, 40.0, 16001).unwrap();
    let p = Profile::gaussian_normalized();
    let m0 = evolve_standard(canonical(), &p, g, 0.0).unwrap().second_moment();
    for t in [0.5, 1.0, 2.0] {
        let mt = evolve_standard(canonical(), &p, g, t).unwrap().second_moment();
        assert!(((mt / m0).ln() - 2.0 * t).abs() < 1e-4, "t={t}");
    }
}

#[test]
fn semiclassical_matches_reference_values() {
    let p = Profile::gaussian_normalized();
    for &(x, t, want) in &PSI_SCL_REF {
        let got = semiclassical_point(canonical(), &p, x, t, 1e-12).unwrap();
        assert!((got - want).norm() < 1e-10, "x={x} t={t}: {got} vs {want}");
    }
}

#[test]
fn semiclassical_origin_is_continuous() {
    let p = Profile::gaussian_normalized();
    let at0 = semiclassical_point(canonical(), &p, 0.0, 0.7, 1e-12).unwrap();
    // the approach to x = 0 is a fractional power of |x|
    let gaps: Vec<f64> = [1e-4, 1e-7, 1e-10]
        .iter()
        .map(|&x| (semiclassical_point(canonical(), &p, x, 0.7, 1e-12).unwrap() - at0).norm())
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 1e-6, "{gaps:?}");
}

#[test]
fn semiclassical_short_time_limit() {
    let g = Grid::new(-5.0, 5.0, 201).unwrap();
    let p = Profile::gaussian_normalized();
    let psi = evolve_semiclassical(canonical(), &p, g, 1e-3, 1e-10).unwrap();
    let d = psi.distance(&p.sample(g).unwrap()).unwrap();
    assert!(d < 1e-2, "distance {d}");
}

#[test]
fn semiclassical_is_linear() {
    let g = Grid::new(-2.0, 2.0, 17).unwrap();
    let a = Profile::gaussian(0.2, 1.3, 1.0).unwrap();
    let b = Profile::gaussian(0.2, 1.3, -2.5).unwrap();
    let pa = evolve_semiclassical(canonical(), &a, g, 0.3, 1e-13).unwrap();
    let pb = evolve_semiclassical(canonical(), &b, g, 0.3, 1e-13).unwrap();
    for (u, v) in pa.samples().iter().zip(pb.samples()) {
        assert!((-2.5 * u - v).norm() < 1e-11);
    }
    assert!(evolve_semiclassical(canonical(), &Profile::sampled(a.sample(g).unwrap()), g, 0.3, 1e-8).is_err());
}

#[test]
fn semiclassical_moment_at_zero_matches_standard() {
    for p in [Profile::gaussian_normalized(), Profile::hermite_gaussian(2, 0.3, 1.5).unwrap()] {
        let s = second_moment_semiclassical(canonical(), &p, 0.0).unwrap();
        let m = second_moment_standard(canonical(), &p, 0.0).unwrap();
        assert!((s - m).norm() < 1e-8 * m, "{s} vs {m}");
    }
}

#[test]
fn semiclassical_moment_closed_forms() {
    let p = Profile::gaussian_normalized();
    for t in [0.2, 0.5, 0.7] {
        // (2/π)^{1/2} ∫ y² exp(-A y²) dy = A^{-3/2} / √2
        let lit = second_moment_semiclassical(canonical(), &p, t).unwrap();
        let a = 2.0 * Complex64::from_polar(1.0, -2.0 * t);
        let want = a.powf(-1.5) / 2f64.sqrt();
        assert!((lit - want).norm() < 1e-10, "t={t}: {lit} vs {want}");
        let fun = second_moment_semiclassical_with(canonical(), &p, t, Conjugation::OfFunction, DECAY_FLOOR).unwrap();
        let want = 0.25 / (2.0 * t).cos().powf(1.5);
        assert!((fun - want).norm() < 1e-10 * want);
    }
}

#[test]
fn semiclassical_moment_diverges_at_quarter_period() {
    let p = Profile::gaussian_normalized();
    let r = second_moment_semiclassical(canonical(), &p, PI / 4.0);
    assert!(matches!(r, Err(Error::IntegralDivergent { .. })));
    let h2 = DilationParams::canonical(2.0).unwrap();
    assert!(second_moment_semiclassical(h2, &p, PI / 2.0).is_err());
    assert!(second_moment_semiclassical(h2, &p, 0.99 * PI / 2.0).is_ok());
}

#[test]
fn divergence_times() {
    let p = Profile::gaussian_normalized();
    let t = divergence_time(canonical(), &p, 2.0).unwrap().unwrap();
    assert!((t - PI / 4.0).abs() < 1e-8, "{t}");
    let t = divergence_time(DilationParams::canonical(2.0).unwrap(), &p, 4.0).unwrap().unwrap();
    assert!((t - PI / 2.0).abs() < 1e-8, "{t}");
    assert_eq!(divergence_time(canonical(), &p, 0.1).unwrap(), None);
    // standard moment stays finite on the same window
    for k in 0..=40 {
        let t = 2.0 * k as f64 / 40.0;
        assert!(second_moment_standard(canonical(), &p, t).unwrap().is_finite());
    }
}

#[test]
fn moment_trace_flags_divergence() {
    let p = Profile::gaussian_normalized();
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let tr = moment_trace(canonical(), &p, &times, MomentMode::Semiclassical, Conjugation::OfValue).unwrap();
    assert_eq!(tr.diverged.iter().filter(|&&d| d).count(), 3);
    assert!((tr.diverged_at.unwrap() - PI / 4.0).abs() < 1e-8);
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,x2_re,x2_im,diverged\n"));
    assert!(text.lines().last().unwrap().ends_with(",1"));
    let st = moment_trace(canonical(), &p, &times, MomentMode::Standard, Conjugation::OfValue).unwrap();
    assert!(st.diverged.iter().all(|d| !d) && st.diverged_at.is_none());
}
