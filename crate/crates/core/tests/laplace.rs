use fracdyn::laplace::{
    compare_eigenvalues, compare_spectra, locate_pole, verify_caputo_laplace, write_spectrum_csv, KernelKind,
    LaplaceKernel, TestFn,
};
use fracdyn::spectral::{discretize_hamiltonian, HamiltonianSpec};
use fracdyn::{Complex64, FractionalOrder, Grid};

#[test]
fn pole_locations() {
    let f = locate_pole(&LaplaceKernel::new(KernelKind::FseHalf, 1.0, 1.0).unwrap()).unwrap();
    assert!((f.located_pole - Complex64::new(0.0, -0.5)).norm() < 1e-8);
    let c = locate_pole(&LaplaceKernel::new(KernelKind::Comb, 1.0, 1.0).unwrap()).unwrap();
    assert!((c.located_pole.norm() - 0.5).abs() < 1e-8);
    for kind in [KernelKind::Comb, KernelKind::FseHalf] {
        let p = locate_pole(&LaplaceKernel::new(kind, 2.0, 1.0).unwrap()).unwrap();
        assert!((p.located_pole.norm() - 2.0).abs() < 1e-12);
        assert!(p.match_error < 1e-12);
    }
}

#[test]
fn box_spectrum_is_isospectral_up_to_conjugation() {
    let rows = compare_eigenvalues(&[0.5, 2.0, 4.5], 1.0).unwrap();
    for (row, want) in rows.iter().zip([0.125, 2.0, 10.125]) {
        assert!(row.moduli_match && row.simple && row.conjugate);
        assert!((row.comb_pole.norm() - want).abs() <= 1e-6 * want);
        assert!((row.fse_pole.norm() - want).abs() <= 1e-6 * want);
    }
    let one = compare_eigenvalues(&[1.0], 1.0).unwrap();
    assert_eq!(one.len(), 1);
    assert!(one[0].moduli_match);
}

#[test]
fn spectrum_from_a_decomposition() {
    let g = Grid::new(0.0, std::f64::consts::PI, 64).unwrap();
    let d = discretize_hamiltonian(&HamiltonianSpec::particle_in_box(1.0), g).unwrap();
    let rows = compare_spectra(&d).unwrap();
    assert_eq!(rows.len(), d.len());
    assert!(rows.iter().all(|r| r.moduli_match && r.simple));
    let mut buf = Vec::new();
    write_spectrum_csv(&rows[..2], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("lambda,comb_re,comb_im,fse_re,fse_im,moduli_match\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn caputo_laplace_identity() {
    let half = FractionalOrder::HALF;
    let errs: Vec<(TestFn, f64)> = TestFn::ALL.iter().map(|&f| (f, verify_caputo_laplace(half, f))).collect();
    for (f, e) in &errs {
        eprintln!("alpha=1/2 {}: {e:.3e}", f.as_str());
    }
    assert!(errs[0].1 <= 1e-6);
    assert!(errs[1].1 <= 1e-3 && errs[2].1 <= 1e-3 && errs[3].1 <= 1e-3);

    let a = FractionalOrder::new(0.3).unwrap();
    assert!(verify_caputo_laplace(a, TestFn::Const) <= 1e-6);
    assert!(verify_caputo_laplace(a, TestFn::Quadratic) <= 1e-3);

    let e1 = verify_caputo_laplace(FractionalOrder::ONE, TestFn::ExpDecay);
    eprintln!("alpha=1 exp_decay: {e1:.3e}");
    assert!(e1 <= 1e-6);
}
