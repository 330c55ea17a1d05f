//! Unit phases `e^{-2πiθ}` evaluated in turns.
//!
//! The argument is reduced modulo one before any multiplication by 2π and then
//! folded into an octant, so multiples of 1/8 come out exact (e.g. θ = 1/2
//! gives exactly −1) and integer shifts of θ give bit-identical results.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// `(cos 2πθ, sin 2πθ)` with octant reduction.
pub fn cos_sin_turns(theta: f64) -> (f64, f64) {
    let r = theta - theta.floor();
    // r in [0,1); split into octant index and offset in [-1/16, 1/16] turns
    let scaled = r * 8.0;
    let oct = scaled.round();
    let off = (scaled - oct) / 8.0;
    let (s, c) = if off == 0.0 { (0.0, 1.0) } else { (TAU * off).sin_cos() };
    match (oct as i64).rem_euclid(8) {
        0 => (c, s),
        1 => (FRAC_1_SQRT_2 * (c - s), FRAC_1_SQRT_2 * (c + s)),
        2 => (-s, c),
        3 => (-FRAC_1_SQRT_2 * (c + s), FRAC_1_SQRT_2 * (c - s)),
        4 => (-c, -s),
        5 => (-FRAC_1_SQRT_2 * (c - s), -FRAC_1_SQRT_2 * (c + s)),
        6 => (s, -c),
        _ => (FRAC_1_SQRT_2 * (c + s), -FRAC_1_SQRT_2 * (c - s)),
    }
}

/// `e^{-2πiθ}`.
#[inline]
pub fn neg_phase(theta: f64) -> Complex64 {
    let (c, s) = cos_sin_turns(theta);
    Complex64::new(c, -s)
}

/// `e^{+2πiθ}`.
#[inline]
pub fn pos_phase(theta: f64) -> Complex64 {
    let (c, s) = cos_sin_turns(theta);
    Complex64::new(c, s)
}

/// Euclidean dot product.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
