#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use fracdyn::comb::{
    backbone_density, comb_evolve, delta_green, free_composition, free_propagator, pde_residual, CombState,
    DeltaGreenParams,
};
use fracdyn::quad::Quad;
use fracdyn::special::faddeeva;
use fracdyn::spectral::{discretize_hamiltonian, HamiltonianSpec};
use fracdyn::{Complex64, Grid};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// mpmath, rotated-contour quadrature at 40 digits
const G_REF: [(f64, f64, f64, f64, f64, Complex64); 4] = [
    (0.0, 1.0, 0.0, 1.0, 1.0, Complex64::new(0.01551643781779068659, -0.16685067608164893912)),
    (0.5, 0.3, -0.25, 4.934802200544679, 1.0, Complex64::new(0.24777123544523970469, -0.26138538810508139721)),
    (1.5, 2.0, 0.75, 0.2, 0.5, Complex64::new(0.41268119340857534131, -0.20072270716813318898)),
    (-2.0, 0.05, 1.0, 10.0, 1.0, Complex64::new(0.82075056768340097534, 1.5550621413201556927)),
];

#[test]
fn delta_green_matches_reference_values() {
    for &(y, t, yp, lam, hbar, want) in &G_REF {
        let p = DeltaGreenParams::new(lam, hbar).unwrap();
        let got = delta_green(y, t, yp, p, 1e-13).unwrap();
        assert!((got - want).norm() < 1e-11, "{y} {t} {yp}: {got} vs {want}");
    }
}

#[test]
fn delta_green_matches_faddeeva_closed_form() {
    let (hbar, lam) = (0.7, 2.5);
    let p = DeltaGreenParams::new(lam, hbar).unwrap();
    for &(y, t, yp) in &[(0.0, 0.4, 0.0), (0.3, 1.7, -0.9), (-1.2, 0.2, 0.6)] {
        let beta = lam / hbar;
        let kappa = 1.0 / (2.0 * hbar * t);
        let a: f64 = f64::abs(y) + f64::abs(yp);
        let rot = Complex64::from_polar(1.0, PI / 4.0);
        let n = Complex64::from_polar(1.0 / (2.0 * PI * hbar * t).sqrt(), -PI / 4.0);
        let cc = rot * PI.sqrt() / (2.0 * kappa.sqrt());
        let arg = rot * kappa.sqrt() * (a + c(0.0, beta / (2.0 * kappa)));
        let j = n * cc * c(0.0, kappa * a * a).exp() * faddeeva(arg);
        let want = free_propagator(y, t, yp, hbar).unwrap() - beta * j;
        let got = delta_green(y, t, yp, p, 1e-13).unwrap();
        assert!((got - want).norm() < 1e-11);
    }
}

#[test]
fn delta_green_solves_the_free_equation_off_the_backbone() {
    let p = DeltaGreenParams::new(1.5, 1.0).unwrap();
    for &(y, t, yp) in &[(0.8, 1.0, 0.3), (-1.1, 0.6, 0.5), (2.0, 2.0, -0.4)] {
        let r1 = pde_residual(y, t, yp, p, 2e-3, 2e-3, 1e-13).unwrap().norm();
        let r2 = pde_residual(y, t, yp, p, 1e-3, 1e-3, 1e-13).unwrap().norm();
        assert!(r2 < 1e-4, "residual {r2} at y={y}");
        // second-order differences: halving the step quarters the residual
        assert!(r1 / r2 > 3.0 && r1 / r2 < 5.0, "ratio {}", r1 / r2);
    }
}

#[test]
fn free_propagator_composes() {
    let hbar = 1.0;
    for &(y, t1, t2, yp) in &[(0.0, 0.5, 0.5, 0.0), (0.4, 0.3, 0.9, -0.2)] {
        let (got, bias) = free_composition(y, t1, t2, yp, hbar, 5e-4, 1e-11).unwrap();
        let want = free_propagator(y, t1 + t2, yp, hbar).unwrap();
        assert!((got - want).norm() < 1e-6, "{got} vs {want}, regulator bias {bias}");
    }
}

fn gaussian(y: f64) -> f64 {
    PI.powf(-0.25) * (-0.5 * y * y).exp()
}

#[test]
fn comb_evolve_matches_direct_quadrature() {
    let hbar = 1.0;
    let xg = Grid::new(0.0, 1.0, 33).unwrap();
    let yg = Grid::new(-8.0, 8.0, 1601).unwrap();
    let decomp = discretize_hamiltonian(&HamiltonianSpec::particle_in_box(hbar), xg).unwrap();
    let ground = decomp.eigenfunction(0);
    let psi0 = CombState::from_fn(xg, yg, hbar, |x, y| {
        let i = ((x - xg.x_min) / xg.dx()).round() as usize;
        ground.samples()[i] * gaussian(y)
    })
    .unwrap();
    let t = 0.5;
    let out = comb_evolve(&decomp, &psi0, t).unwrap();
    assert!(out.skipped.is_empty());

    let lam = decomp.eigenvalues()[0];
    let p = DeltaGreenParams::new(lam, hbar).unwrap();
    let dx = xg.dx();
    let j0 = (yg.n - 1) / 2;
    for &j in &[j0, j0 + 50, j0 - 130] {
        let y = yg.x(j);
        let direct = Quad::new(1e-10)
            .integrate_with_breaks(
                |yp| delta_green(y, t, yp, p, 1e-12).unwrap() * gaussian(yp),
                &[-9.0, -3.0, 0.0, 3.0, 9.0],
            )
            .unwrap()
            .value;
        let amp: Complex64 = (0..xg.n).map(|i| ground.samples()[i].conj() * out.state.at(i, j)).sum::<Complex64>() * dx;
        assert!((amp - direct).norm() < 1e-4, "y={y}: {amp} vs {direct}");
    }
}

#[test]
fn comb_evolve_reports_nonpositive_modes() {
    let hbar = 1.0;
    let xg = Grid::new(-1.0, 1.0, 17).unwrap();
    let yg = Grid::new(-2.0, 2.0, 41).unwrap();
    let pot: Vec<f64> = (0..xg.n).map(|_| -200.0).collect();
    let decomp = discretize_hamiltonian(&HamiltonianSpec::potential(pot, hbar), xg).unwrap();
    let psi0 = CombState::from_fn(xg, yg, hbar, |x, y| c((1.0 - x * x) * (-y * y).exp(), 0.0)).unwrap();
    let out = comb_evolve(&decomp, &psi0, 0.1).unwrap();
    assert!(!out.skipped.is_empty());
    assert!(out.skipped.iter().all(|&l| l <= 0.0));
}

#[test]
fn comb_evolve_rejects_asymmetric_backbone() {
    let hbar = 1.0;
    let xg = Grid::new(0.0, 1.0, 17).unwrap();
    let decomp = discretize_hamiltonian(&HamiltonianSpec::particle_in_box(hbar), xg).unwrap();
    let even = CombState::from_fn(xg, Grid::new(-1.0, 1.0, 40).unwrap(), hbar, |_, _| c(1.0, 0.0)).unwrap();
    assert!(comb_evolve(&decomp, &even, 0.1).is_err());
    let shifted = CombState::from_fn(xg, Grid::new(-1.0, 2.0, 41).unwrap(), hbar, |_, _| c(1.0, 0.0)).unwrap();
    assert!(comb_evolve(&decomp, &shifted, 0.1).is_err());
}

#[test]
fn backbone_density_drains_into_the_teeth() {
    let hbar = 1.0;
    let xg = Grid::new(0.0, 1.0, 33).unwrap();
    let yg = Grid::new(-6.0, 6.0, 601).unwrap();
    let decomp = discretize_hamiltonian(&HamiltonianSpec::particle_in_box(hbar), xg).unwrap();
    let psi0 = CombState::from_fn(xg, yg, hbar, |x, y| c((PI * x).sin() * gaussian(y), 0.0)).unwrap();
    let d0: f64 = backbone_density(&psi0).unwrap().iter().sum();
    let d1: f64 = backbone_density(&comb_evolve(&decomp, &psi0, 0.5).unwrap().state).unwrap().iter().sum();
    assert!(d1 < d0);
}
