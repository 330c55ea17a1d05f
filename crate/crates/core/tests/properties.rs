//! Cross-resolution and cross-method properties of the Zak engine and the
//! zero locator.

use num_complex::Complex64;
use std::f64::consts::PI;
use zakhrt::zak::check_unitarity;
use zakhrt::zeros::{certify_finite_zero_set, ZeroSearchOptions};
use zakhrt::{sample, zak_direct, zak_fft, AnalyticFunction, ZakGridSpec};

fn built_ins(n: usize) -> [AnalyticFunction; 3] {
    [
        AnalyticFunction::gaussian(n),
        AnalyticFunction::two_sided_exponential(1.0, n).unwrap(),
        AnalyticFunction::box_indicator(n),
    ]
}

#[test]
fn fft_agrees_with_direct_in_one_dimension() {
    for f in built_ins(1) {
        let t = f.default_window();
        for m in [8, 16, 32, 64, 128, 256] {
            let spec = ZakGridSpec::new(1, m, t).unwrap();
            let d = zak_direct(&f, &spec);
            let s = zak_fft(&sample(&f, t, m).unwrap(), &spec).unwrap();
            let rel = d.sup_distance(&s) / d.max_modulus();
            assert!(rel <= 1e-10, "{f:?} M={m}: {rel:e}");
        }
    }
}

#[test]
fn fft_agrees_with_direct_in_two_dimensions() {
    for f in built_ins(2) {
        for m in [8, 16] {
            let spec = ZakGridSpec::new(2, m, 8).unwrap();
            let d = zak_direct(&f, &spec);
            let s = zak_fft(&sample(&f, 8, m).unwrap(), &spec).unwrap();
            let rel = d.sup_distance(&s) / d.max_modulus();
            assert!(rel <= 1e-10, "{f:?} M={m}: {rel:e}");
        }
    }
}

#[test]
fn gaussian_unitarity_error_does_not_grow_with_resolution() {
    let g = AnalyticFunction::gaussian(1);
    let errs: Vec<f64> = [8, 16, 32, 64, 128, 256]
        .iter()
        .map(|&m| check_unitarity(&zak_direct(&g, &ZakGridSpec::new(1, m, 10).unwrap()), 1.0))
        .collect();
    let noise = 4.0 * f64::EPSILON;
    for w in errs.windows(2) {
        assert!(w[1] <= 2.0 * w[0].max(noise), "{errs:?}");
    }
}

/// `e^{-a|t|}` through its two geometric series, `t ∈ [0, 1)`.
fn exponential_closed_form(a: f64, t: f64, omega: f64) -> Complex64 {
    let q = Complex64::from_polar(1.0, -2.0 * PI * omega);
    let e = (-a).exp();
    (-a * t).exp() / (1.0 - e * q) + (a * t).exp() * e * q.conj() / (1.0 - e * q.conj())
}

#[test]
fn refined_exponential_zeros_match_closed_form() {
    for a in [0.5, 1.0, 2.0] {
        let f = AnalyticFunction::two_sided_exponential(a, 1).unwrap();
        let t = f.default_window();
        for m in [64, 128] {
            let r = certify_finite_zero_set(&f, &ZakGridSpec::new(1, m, t).unwrap(), &ZeroSearchOptions::default())
                .unwrap();
            assert_eq!(r.zeros.len(), 1, "a={a} M={m}");
            for z in &r.zeros {
                let exact = exponential_closed_form(a, z.location[0], z.location[1]).norm();
                // the direct sum differs from the closed form by at most the truncation bound
                assert!(
                    exact <= 2.0 * z.residual + f.tail_bound(t),
                    "a={a} M={m}: closed form {exact:e}, residual {:e}",
                    z.residual
                );
            }
        }
    }
}
