//! Closed-form and brute-force oracles for the analytic layer.

use approx::assert_relative_eq;
use idma::analytic::{FddSpec, LimitVariant, MovingAverage};
use idma::quadrature::{integrate_levy, integrate_pieces, knots_between, QuadOptions};
use idma::verify::{cf_convergence, default_z_grid, Winner};
use idma::{Kernel1D, LevyMeasure, ProductKernel};
use num_complex::Complex64;

/// `Cin(1) = Σ_{k≥1} (-1)^{k+1} / (2k (2k)!)`.
fn cin_one() -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..20 {
        let n = 2 * k;
        fact *= ((n - 1) * n) as f64;
        let term = 1.0 / (n as f64 * fact);
        sum += if k % 2 == 1 { term } else { -term };
    }
    sum
}

fn ou_two_point() -> MovingAverage {
    MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::two_point(1.0).unwrap())
}

#[test]
fn cin_series_value() {
    assert_relative_eq!(cin_one(), 0.239_811_742_000_564_7, epsilon = 1e-15);
}

#[test]
fn stationary_cf_matches_cosine_integral() {
    let v = ou_two_point().log_cf_stationary(1.0).unwrap();
    assert!((v.log_cf.re + 2.0 * cin_one()).abs() < 1e-9, "{:?}", v);
    assert!(v.log_cf.im.abs() < 1e-12);
}

#[test]
fn levy_integral_examples() {
    let opts = QuadOptions::with_tol(1e-12);
    let r = integrate_levy(|y| y, &LevyMeasure::dickman(), &opts).unwrap();
    assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);

    let r = integrate_levy(|y: f64| Complex64::new(y.cos() - 1.0, y.sin()), &LevyMeasure::two_point(1.0).unwrap(), &opts)
        .unwrap();
    assert_relative_eq!(r.value.re, 1f64.cos() - 1.0, epsilon = 1e-15);
    assert!(r.value.im.abs() < 1e-15);

    let r = integrate_pieces(|s: f64| ((-s).exp()).cos() - 1.0, &[0.0, 60.0], &opts).unwrap();
    assert_relative_eq!(r.value, -cin_one(), epsilon = 1e-10);
}

#[test]
fn claimed_and_boundary_limits_at_unit_frequency() {
    let m = ou_two_point();
    let spec = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
    let c = m.log_cf_limit(&spec, LimitVariant::Claimed).unwrap();
    let b = m.log_cf_limit(&spec, LimitVariant::BoundaryAugmented).unwrap();
    assert_relative_eq!(c.log_cf.re, -2.0 * cin_one(), epsilon = 1e-9);
    assert_relative_eq!(b.log_cf.re, -4.0 * cin_one(), epsilon = 1e-9);
}

// Brute-force mpmath quadrature (30 digits) of
// ∫ (cos(z (g(T - s) - g(-s))) - 1) ds on z ∈ [-5, 5] step 0.25.
const MPMATH_DIST_CLAIMED: [f64; 4] = [0.2355, 0.2495, 0.2496, 0.2496];
const MPMATH_DIST_BOUNDARY: [f64; 4] = [1.52e-2, 1.87e-4, 1.64e-8, 6.6e-17];

#[test]
fn convergence_study_picks_boundary_augmented() {
    let m = ou_two_point();
    let base = FddSpec::single(vec![0.0], 1.0, 0.0).unwrap();
    let r = cf_convergence(&m, &base, &[5.0, 10.0, 20.0, 40.0], &default_z_grid(), 1e-3).unwrap();
    assert_eq!(r.winner, Winner::BoundaryAugmented);
    for (i, e) in r.entries.iter().enumerate() {
        let dc = e.dist_claimed.unwrap();
        let db = e.dist_boundary.unwrap();
        assert!((dc - MPMATH_DIST_CLAIMED[i]).abs() < 1e-3, "T={} claimed {dc}", e.t);
        let tol = 0.02 * MPMATH_DIST_BOUNDARY[i] + 1e-8;
        assert!((db - MPMATH_DIST_BOUNDARY[i]).abs() < tol, "T={} boundary {db}", e.t);
    }
    assert!(r.monotone_boundary);
}

// g is odd for the signed OU kernel, so J_T is antisymmetric about T/2 and the
// odd part of the exponent integrates to zero even for the one-sided measure.
#[test]
fn dickman_window_cf_is_real_for_odd_antiderivative() {
    let m = MovingAverage::new(Kernel1D::signed_ou(), LevyMeasure::dickman());
    let spec = FddSpec::single(vec![0.0], 1.0, 10.0).unwrap();
    let v = m.log_cf_window(&spec).unwrap();
    assert!(v.log_cf.im.abs() < 1e-9);
    assert!(v.log_cf.re < -1e-2);
    let neg = m.log_cf_window(&spec.scaled(-1.0)).unwrap();
    assert_relative_eq!(neg.log_cf.re, v.log_cf.re, epsilon = 1e-9);
    assert_relative_eq!(neg.log_cf.im, -v.log_cf.im, epsilon = 1e-9);
}

#[test]
fn two_dimensional_window_weight() {
    let k = ProductKernel::power(Kernel1D::signed_ou(), 2).unwrap();
    let m = MovingAverage::new(k, LevyMeasure::two_point(1.0).unwrap());
    let spec = FddSpec::single(vec![0.0, 0.0], 1.0, 1.0).unwrap();
    let e = (-1f64).exp() - 1.0;
    assert!((m.j_t(&spec, &[0.0, 0.0]).unwrap() - e * e).abs() < 1e-12);
}

#[test]
fn two_dimensional_variance_routes_agree() {
    let k = ProductKernel::power(Kernel1D::signed_ou(), 2).unwrap();
    let m = MovingAverage::new(k, LevyMeasure::two_point(1.0).unwrap());
    for t in [0.5, 2.0, 6.0] {
        let closed = m.variance_window(t).unwrap();
        let one = 2.0 - 2.0 * (-t).exp() * (1.0 + t);
        assert_relative_eq!(closed, one * one, epsilon = 1e-12);
        assert_relative_eq!(m.variance_window_from_covariance(t).unwrap(), closed, epsilon = 1e-8);
    }
}

#[test]
fn second_order_consistency() {
    let tight = QuadOptions {
        tol: 1e-13,
        max_evaluations: 4_000_000,
    };
    for (k, nu) in [
        (Kernel1D::signed_ou(), LevyMeasure::two_point(1.0).unwrap()),
        (Kernel1D::gauss_deriv(), LevyMeasure::truncated_stable(0.5, 1.0).unwrap()),
    ] {
        let m = MovingAverage::new(k, nu).with_quad(tight);
        for t in [1.0, 5.0] {
            let h = 1e-3;
            let l = m.log_cf_window(&FddSpec::single(vec![0.0], h, t).unwrap()).unwrap();
            let curvature = -2.0 * l.log_cf.re / (h * h);
            let var = m.variance_window(t).unwrap();
            assert!(((curvature - var) / var).abs() < 1e-4, "T={t}: {curvature} vs {var}");
        }
    }
}

#[test]
fn gauss_deriv_variance_closed_form() {
    let m = MovingAverage::new(Kernel1D::gauss_deriv(), LevyMeasure::two_point(1.0).unwrap());
    let c = (std::f64::consts::PI / 2.0).sqrt();
    for t in [0.5f64, 3.0] {
        let expected = 2.0 * c * (1.0 - (-t * t / 2.0).exp());
        assert_relative_eq!(m.variance_window(t).unwrap(), expected, epsilon = 1e-12);
    }
}

#[test]
fn shifted_table_is_stationary() {
    // A piecewise-linear antiderivative and the same table shifted by 0.37.
    let x: Vec<f64> = (0..=40).map(|i| -4.0 + 0.2 * i as f64).collect();
    let g: Vec<f64> = x.iter().map(|&v| if v.abs() >= 4.0 { 0.0 } else { v * (-v * v).exp() }).collect();
    let shifted: Vec<f64> = x.iter().map(|v| v + 0.37).collect();
    let a = MovingAverage::new(Kernel1D::user_table(x, g.clone()).unwrap(), LevyMeasure::two_point(1.0).unwrap());
    let b = MovingAverage::new(Kernel1D::user_table(shifted, g).unwrap(), LevyMeasure::two_point(1.0).unwrap());
    for z in [0.5, 2.0] {
        let va = a.log_cf_stationary(z).unwrap().log_cf;
        let vb = b.log_cf_stationary(z).unwrap().log_cf;
        assert!((va - vb).norm() < 1e-8);
    }
    for t in [0.0, 0.3, 1.1] {
        assert_relative_eq!(a.covariance(&[t]).unwrap(), b.covariance(&[t]).unwrap(), epsilon = 1e-12);
    }
    assert_relative_eq!(a.variance_window(2.5).unwrap(), b.variance_window(2.5).unwrap(), epsilon = 1e-12);
}

#[test]
fn covariance_integral_contrast() {
    for k in [Kernel1D::signed_ou(), Kernel1D::gauss_deriv()] {
        for nu in [
            LevyMeasure::two_point(1.0).unwrap(),
            LevyMeasure::dickman(),
            LevyMeasure::truncated_stable(0.5, 1.0).unwrap(),
        ] {
            let ci = MovingAverage::new(k.clone(), nu).covariance_integral().unwrap();
            assert_eq!(ci.exact, 0.0);
            assert!(ci.quadrature.abs() < 1e-6, "{ci:?}");
        }
    }
    let ci = MovingAverage::new(Kernel1D::persistent_control(), LevyMeasure::two_point(1.0).unwrap())
        .covariance_integral()
        .unwrap();
    assert!(ci.quadrature > 0.9);
    assert_relative_eq!(ci.exact, 1.0, epsilon = 1e-12);
}

#[test]
fn window_cf_against_direct_window_quadrature() {
    // J_T(s) for d = 1 equals ∫_l^{T+l} f(t - s) dt; integrate it directly.
    let m = ou_two_point();
    let k = Kernel1D::signed_ou();
    let spec = FddSpec::new(vec![vec![0.0], vec![0.7]], vec![1.0, -0.4], 2.0).unwrap();
    let opts = QuadOptions::with_tol(1e-13);
    for s in [-1.5, 0.2, 0.7, 1.9, 3.3] {
        let mut direct = 0.0;
        for (l, z) in [(0.0, 1.0), (0.7, -0.4)] {
            let q = integrate_pieces(|t: f64| k.f(t - s), &knots_between(l, l + 2.0, &[s]), &opts).unwrap();
            direct += z * q.value;
        }
        assert!((m.j_t(&spec, &[s]).unwrap() - direct).abs() < 1e-10);
    }
}
