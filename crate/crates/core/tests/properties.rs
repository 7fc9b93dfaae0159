use std::sync::OnceLock;

use approx::assert_relative_eq;
use dkern::jet::Jet2;
use dkern::kernel::{KernelEvaluator, KernelOptions};
use dkern::linalg::determinant;
use dkern::oracle::{disc_mn, mobius};
use dkern::path::path_build;
use dkern::quadrature::{area_quadrature, gauss_legendre_on, integrate_area};
use dkern::ramadanov::deviation_sup;
use dkern::{Domain, DomainSpec, Polynomial, ResolutionSpec, TestFunction, Weight, WeightSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn radial_disc() -> &'static KernelEvaluator {
    static KE: OnceLock<KernelEvaluator> = OnceLock::new();
    KE.get_or_init(|| {
        let d = Domain::unit_disc();
        KernelEvaluator::build(&d, &Weight::RadialPower { p: 0.5 }, &KernelOptions::for_domain(&d)).unwrap()
    })
}

fn plain_disc() -> &'static KernelEvaluator {
    static KE: OnceLock<KernelEvaluator> = OnceLock::new();
    KE.get_or_init(|| {
        let d = Domain::unit_disc();
        KernelEvaluator::build(&d, &Weight::Constant(1.0), &KernelOptions::for_domain(&d)).unwrap()
    })
}

fn annulus() -> &'static KernelEvaluator {
    static KE: OnceLock<KernelEvaluator> = OnceLock::new();
    KE.get_or_init(|| {
        let d = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        KernelEvaluator::build(&d, &Weight::Constant(1.0), &KernelOptions::for_domain(&d)).unwrap()
    })
}

/// Points with `|z| <= r`.
fn in_disc(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(rho, t)| Complex64::from_polar(rho, t))
}

fn in_annulus() -> impl Strategy<Value = Complex64> {
    (0.4..0.7f64, 0.0..std::f64::consts::TAU).prop_map(|(rho, t)| Complex64::from_polar(rho, t))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_kernel_is_hermitian(z in in_disc(0.8), w in in_disc(0.8)) {
        for ke in [radial_disc(), plain_disc()] {
            let a = ke.reduced_kernel(z, w, 0, 0);
            let b = ke.reduced_kernel(w, z, 0, 0).conj();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn annulus_kernel_is_hermitian(z in in_annulus(), w in in_annulus()) {
        let ke = annulus();
        let a = ke.reduced_kernel(z, w, 0, 0);
        prop_assert!((a - ke.reduced_kernel(w, z, 0, 0).conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn radial_weight_kernel_is_rotation_invariant(z in in_disc(0.7), w in in_disc(0.7), t in 0.0..6.3f64) {
        let rot = Complex64::from_polar(1.0, t);
        let ke = radial_disc();
        let a = ke.reduced_kernel(z, w, 0, 0);
        let b = ke.reduced_kernel(rot * z, rot * w, 0, 0);
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn kernel_function_modulus_is_rotation_invariant(z in in_disc(0.6), w in in_disc(0.6), t in 0.0..6.3f64, n in 1usize..=3) {
        let rot = Complex64::from_polar(1.0, t);
        let ke = plain_disc();
        let a = ke.kernel_function_m(z, w, n, None).unwrap().value.norm();
        let b = ke.kernel_function_m(rot * z, rot * w, n, None).unwrap().value.norm();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn diagonal_is_positive(z in in_disc(0.9)) {
        for ke in [radial_disc(), plain_disc()] {
            let k = ke.reduced_kernel(z, z, 0, 0);
            prop_assert!(k.re > 0.0);
            prop_assert!(k.im.abs() <= 1e-13 * k.re);
        }
    }

    #[test]
    fn kernel_function_vanishes_at_base_point(w in in_disc(0.8), n in 1usize..=4) {
        prop_assert_eq!(plain_disc().kernel_function_m(w, w, n, None).unwrap().value, c(0.0, 0.0));
        if n >= 2 {
            // the first row of the determinant repeats a diagonal row
            let k = plain_disc().higher_order_kernel(w, w, n).unwrap();
            let scale = plain_disc().section(w, n).unwrap().eval(w * 0.5).norm().max(1.0);
            prop_assert!(k.norm() <= 1e-9 * scale, "K_n(w, w) = {}", k);
        }
    }

    #[test]
    fn disc_kernel_function_matches_closed_form(z in in_disc(0.6), w in in_disc(0.6), n in 1usize..=3) {
        let m = plain_disc().kernel_function_m(z, w, n, None).unwrap().value;
        prop_assert!((m - disc_mn(z, w, n).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn section_agrees_with_direct_determinant(z in in_disc(0.7), w in in_disc(0.7), n in 1usize..=3) {
        let ke = radial_disc();
        let direct = ke.higher_order_kernel(z, w, n).unwrap();
        let collapsed = ke.section(w, n).unwrap().eval(z);
        prop_assert!((direct - collapsed).norm() <= 1e-9 * direct.norm().max(1.0));
    }

    #[test]
    fn mobius_is_an_involution(zeta in in_disc(0.95), z in in_disc(0.95)) {
        let once = mobius(zeta, z).unwrap();
        prop_assert!(once.norm() < 1.0);
        let twice = mobius(zeta, once).unwrap();
        prop_assert!((twice - z).norm() < 1e-10);
    }

    #[test]
    fn area_integral_is_linear(a in complex(), b in complex(), p in prop::collection::vec(complex(), 1..5), q in prop::collection::vec(complex(), 1..5)) {
        let rule = area_quadrature(&Domain::unit_disc(), &ResolutionSpec { radial: 12, angular: 24, ..ResolutionSpec::default() });
        let f = Polynomial::new(c(0.1, 0.0), p);
        let g = Polynomial::new(c(0.0, -0.2), q);
        let lhs = integrate_area(&rule, |z| f.value(z) * a + g.value(z).conj() * b).unwrap();
        let rhs = integrate_area(&rule, |z| f.value(z)).unwrap() * a + integrate_area(&rule, |z| g.value(z).conj()).unwrap() * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(n in 1usize..40, lo in -2.0..0.0f64, hi in 0.1..2.0f64) {
        let (x, w) = gauss_legendre_on(n, lo, hi);
        let k = 2 * n - 1;
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
        let exact = (hi.powi(k as i32 + 1) - lo.powi(k as i32 + 1)) / (k + 1) as f64;
        prop_assert!((approx - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn lu_determinant_matches_nalgebra(entries in prop::collection::vec(complex(), 25)) {
        let rows: Vec<Vec<Complex64>> = entries.chunks(5).map(|r| r.to_vec()).collect();
        let ours = determinant(&rows, &c(1.0, 0.0));
        let theirs = DMatrix::from_row_slice(5, 5, &entries).determinant();
        prop_assert!((ours - theirs).norm() <= 1e-12 * (1.0 + theirs.norm()));
    }

    #[test]
    fn jet_product_obeys_leibniz(f in prop::collection::vec(complex(), 16), g in prop::collection::vec(complex(), 16)) {
        let fj = Jet2::from_partials(3, 3, |a, b| f[4 * a + b]);
        let gj = Jet2::from_partials(3, 3, |a, b| g[4 * a + b]);
        let prod = &fj * &gj;
        let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        for a in 0..=3 {
            for b in 0..=3 {
                let mut expected = c(0.0, 0.0);
                for i in 0..=a {
                    for j in 0..=b {
                        expected += fj.partial(i, j) * gj.partial(a - i, b - j) * (binom(a, i) * binom(b, j));
                    }
                }
                prop_assert!((prod.partial(a, b) - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
            }
        }
    }

    #[test]
    fn built_paths_stay_in_the_annulus(a in in_annulus(), b in in_annulus()) {
        let domain = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let path = path_build(&domain, a, b, None).unwrap();
        prop_assert_eq!(path.start(), a);
        prop_assert_eq!(path.end(), b);
        for pair in path.vertices().windows(2) {
            for k in 0..=64 {
                let p = pair[0] + (pair[1] - pair[0]) * (k as f64 / 64.0);
                prop_assert!(domain.contains(p), "{} leaves the annulus", p);
            }
        }
    }

    #[test]
    fn deviation_sup_is_the_maximum(vals in prop::collection::vec(0.0..10.0f64, 1..30)) {
        let grid: Vec<(Complex64, Complex64)> = (0..vals.len()).map(|i| (c(i as f64, 0.0), c(0.0, 0.0))).collect();
        let dev = deviation_sup(|z, _| Ok(c(vals[z.re as usize], 0.0)), |_, _| Ok(c(0.0, 0.0)), &grid).unwrap();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        prop_assert_eq!(dev.sup, max);
        let first = vals.iter().position(|&v| v == max).unwrap();
        prop_assert_eq!(dev.argmax.0, c(first as f64, 0.0));
    }
}

#[test]
fn specs_round_trip_through_json() {
    let specs = [
        r#"{"disc":{"center":[0.5,-1.0],"radius":2.0}}"#,
        r#"{"annulus":{"center":[0.0,0.0],"inner":0.3,"outer":1.0}}"#,
        r#"{"sampled":{"origin":[-1.0,-1.0],"cell_size":0.5,"grid":[[true,true],[true,false]]}}"#,
    ];
    for s in specs {
        let d: DomainSpec = serde_json::from_str(s).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), s);
    }
    let weights = [
        r#"{"constant":2.0}"#,
        r#"{"radial_power":{"p":0.5}}"#,
        r#"{"disc_power":{"alpha":1.0}}"#,
        r#"{"sampled":{"origin":[0.0,0.0],"cell_size":1.0,"values":[[1.0]]}}"#,
    ];
    for s in weights {
        let w: WeightSpec = serde_json::from_str(s).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), s);
    }
    assert!(serde_json::from_str::<DomainSpec>(r#"{"disc":{"radius":1,"centre":[0,0]}}"#).is_err());
}

#[test]
fn kernel_scales_inversely_with_constant_weight() {
    let d = Domain::unit_disc();
    let opts = KernelOptions::for_domain(&d);
    let one = KernelEvaluator::build(&d, &Weight::Constant(1.0), &opts).unwrap();
    let three = KernelEvaluator::build(&d, &Weight::Constant(3.0), &opts).unwrap();
    for (z, w) in [(c(0.2, 0.1), c(-0.3, 0.4)), (c(0.0, 0.0), c(0.5, 0.0))] {
        assert_relative_eq!(one.reduced_kernel(z, w, 0, 0).re, 3.0 * three.reduced_kernel(z, w, 0, 0).re, max_relative = 1e-12);
        assert_relative_eq!(one.reduced_kernel(z, w, 0, 0).im, 3.0 * three.reduced_kernel(z, w, 0, 0).im, epsilon = 1e-13);
    }
}
