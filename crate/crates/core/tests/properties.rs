use std::f64::consts::PI;

use fracdyn::caputo::l1_weights;
use fracdyn::comb::{delta_green, free_propagator, DeltaGreenParams};
use fracdyn::hyperbolic::{second_moment_standard, DilationParams, Profile};
use fracdyn::laplace::{locate_pole, KernelKind, LaplaceKernel};
use fracdyn::mlf::{mlf_half_order, mlf_series};
use fracdyn::scenario::{parse_config, render};
use fracdyn::wave::parse_snapshot_csv;
use fracdyn::{mittag_leffler, Complex64, FractionalOrder, Grid, WaveFunction};
use proptest::prelude::*;

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

fn times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 1..6).prop_map(|steps| {
        let mut t = 0.0;
        steps
            .into_iter()
            .map(|d| {
                t += d;
                t
            })
            .collect()
    })
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Valid scenario text for a random module.
fn scenario_text() -> impl Strategy<Value = String> {
    (
        0usize..7,
        finite(0.05, 1.0),
        finite(0.2, 3.0),
        times(),
        8usize..80,
        finite(-3.0, 0.0),
        finite(0.5, 4.0),
        finite(0.2, 3.0),
        prop::option::of(finite(0.1, 2.0)),
        prop::collection::vec(finite(0.1, 9.0), 1..5),
        any::<bool>(),
    )
        .prop_map(|(m, alpha, hbar, times, n, lo, width, a, amp, eigs, flag)| {
            let modules = ["mlf", "fse_spectral", "fse_caputo", "fse_operator_form", "comb", "poles", "hyperbolic"];
            let module = modules[m];
            let mut s = format!(
                "name = prop_{m}\nmodule = {module}\nalpha = {alpha:?}\nhbar = {hbar:?}\ntimes = {}\n",
                list(&times)
            );
            if flag {
                s.push_str("observables = x2, mode1\n\n[tolerances]\nquad = 1e-9\n");
            }
            let grid = format!("\n[grid]\nx_min = {lo:?}\nx_max = {:?}\nn = {n}\n", lo + width);
            let ham = if flag { "\n[hamiltonian]\nkind = harmonic\n" } else { "\n[hamiltonian]\nkind = box\n" };
            let initial = match amp {
                Some(amp) => format!(
                    "\n[initial]\nprofile = gaussian\ncenter = {:?}\na = {a:?}\namp = {amp:?}\n",
                    lo + width / 2.0
                ),
                None => {
                    format!("\n[initial]\nprofile = hermite_gaussian\norder = {}\ncenter = 0.1\na = {a:?}\n", n % 20)
                }
            };
            match module {
                "mlf" => s.push_str(&format!("\n[mlf]\nz_re = {}\nz_im = {}\n", list(&eigs), list(&eigs))),
                "poles" => s.push_str(&format!("\n[poles]\neigenvalues = {}\n", list(&eigs))),
                "hyperbolic" => {
                    s.push_str(&initial);
                    if flag {
                        s.push_str("\n[hyperbolic]\nmode = standard\nconjugation = function\n");
                    }
                }
                _ => {
                    s.push_str(&grid);
                    s.push_str(ham);
                    s.push_str(&initial);
                    if module == "fse_caputo" {
                        s.push_str(&format!("\n[caputo]\ndt = {:?}\n", a * 1e-3));
                    }
                    if module == "comb" {
                        s.push_str(&format!("\n[comb]\ny_max = {width:?}\nny = {}\n", 2 * n + 9));
                    }
                }
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_round_trips(text in scenario_text()) {
        let cfg = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let rendered = render(&cfg);
        let again = parse_config(&rendered).map_err(|e| TestCaseError::fail(format!("{e}\n{rendered}")))?;
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(render(&again), rendered);
    }

    #[test]
    fn config_parser_never_panics(text in "[a-z_\\[\\]=#., 0-9\n-]{0,200}") {
        let _ = parse_config(&text);
    }

    #[test]
    fn config_times_must_increase(t in times()) {
        prop_assume!(t.len() >= 2);
        let mut rev = t.clone();
        rev.reverse();
        let text = format!("name = x\nmodule = mlf\ntimes = {}\n", list(&rev));
        prop_assert!(parse_config(&text).unwrap_err().is_config_error());
    }
}

proptest! {
    #[test]
    fn alpha_one_is_exponential(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let z = Complex64::new(re, im);
        let v = mittag_leffler(FractionalOrder::ONE, z, 1e-12).unwrap().value;
        prop_assert!((v - z.exp()).norm() <= 1e-12 * z.exp().norm());
    }

    #[test]
    fn half_order_agrees_with_series(r in 0.0f64..3.0, th in -PI..PI) {
        let z = Complex64::from_polar(r, th);
        let h = mlf_half_order(z).unwrap().value;
        let s = mlf_series(FractionalOrder::HALF, z, 1e-15).unwrap().value;
        prop_assert!((h - s).norm() <= 1e-9 * h.norm().max(1.0));
    }

    #[test]
    fn mlf_is_real_on_the_real_axis(a in 0.2f64..1.0, x in -4.0f64..2.0) {
        let v = mittag_leffler(FractionalOrder::new(a).unwrap(), Complex64::new(x, 0.0), 1e-12).unwrap().value;
        prop_assert!(v.im.abs() <= 1e-9 * v.re.abs().max(1.0));
    }

    #[test]
    fn l1_weights_decrease(a in 0.05f64..0.999, n in 2usize..200) {
        let w = l1_weights(FractionalOrder::new(a).unwrap(), n);
        prop_assert_eq!(w[0], 1.0);
        prop_assert!(w.windows(2).all(|p| p[0] > p[1] && p[1] > 0.0));
    }

    #[test]
    fn pole_moduli_match(lam in 0.1f64..10.0, hbar in 0.2f64..5.0) {
        let want = lam * lam / (2.0 * hbar);
        for kind in [KernelKind::Comb, KernelKind::FseHalf] {
            let p = locate_pole(&LaplaceKernel::new(kind, lam, hbar).unwrap()).unwrap();
            prop_assert!((p.located_pole.norm() - want).abs() <= 1e-6 * want);
            prop_assert_eq!(p.order, 1);
        }
    }

    #[test]
    fn free_propagator_is_symmetric(y in -3.0f64..3.0, yp in -3.0f64..3.0, t in 0.1f64..3.0) {
        let a = free_propagator(y, t, yp, 1.0).unwrap();
        prop_assert_eq!(a, free_propagator(yp, t, y, 1.0).unwrap());
        prop_assert!((a.norm() - 1.0 / (2.0 * PI * t).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn delta_green_is_symmetric(y in -2.0f64..2.0, yp in -2.0f64..2.0, t in 0.2f64..2.0, lam in 0.1f64..3.0) {
        let p = DeltaGreenParams::new(lam, 1.0).unwrap();
        let a = delta_green(y, t, yp, p, 1e-12).unwrap();
        let b = delta_green(yp, t, y, p, 1e-12).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn standard_moment_grows_exponentially(t in 0.0f64..3.0, hbar in 0.3f64..3.0) {
        let p = Profile::gaussian_normalized();
        let params = DilationParams::canonical(hbar).unwrap();
        let m = second_moment_standard(params, &p, t).unwrap();
        let want = 0.25 * (2.0 * t / hbar).exp();
        prop_assert!((m - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn snapshot_csv_round_trips(vals in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 8..40)) {
        let g = Grid::new(-1.0, 2.0, vals.len()).unwrap();
        let psi = WaveFunction::new(g, vals.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
        let mut buf = Vec::new();
        psi.write_csv(&mut buf).unwrap();
        let back = parse_snapshot_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.samples(), psi.samples());
    }
}
