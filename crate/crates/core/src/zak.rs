//! Zak transform on `[0,1)^n × [0,1)^n`.
//!
//! `Zf(t, ω) = Σ_τ f(t + τ) e^{-2πi⟨ω, τ⟩}`, truncated to `τ ∈ [-T, T]^n`.
//! Two independent evaluators are provided: a direct sum at every node, and
//! a folded FFT over sampled data. Off-grid values are always direct sums.

use crate::error::{Error, Result};
use crate::function::{unravel, validate_resolution, SampledGrid, Signal, MAX_DIM};
use crate::par;
use crate::phase::{dot, neg_phase, pos_phase};
use crate::sum::{sum_norm_sqr, ComplexNeumaier, Neumaier};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZakGridSpec {
    pub n: usize,
    #[serde(rename = "M")]
    pub resolution: usize,
    #[serde(rename = "T")]
    pub window: i64,
}

impl ZakGridSpec {
    pub fn new(n: usize, resolution: usize, window: i64) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidArgument(format!("dimension must be in 1..={MAX_DIM}")));
        }
        validate_resolution(resolution)?;
        if resolution < 2 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        if window < 1 {
            return Err(Error::NonPositiveWindow(window));
        }
        Ok(Self { n, resolution, window })
    }

    /// Nodes per half (t or ω) of the grid, `M^n`.
    pub fn half_len(&self) -> usize {
        self.resolution.pow(self.n as u32)
    }

    /// Total node count, `M^{2n}`.
    pub fn len(&self) -> usize {
        self.half_len() * self.half_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Torus coordinates `(t, ω)` of linear node index `lin`.
    pub fn node(&self, lin: usize, out: &mut [f64]) {
        let mut idx = [0usize; 2 * MAX_DIM];
        unravel(lin, self.resolution, &mut idx[..2 * self.n]);
        let m = self.resolution as f64;
        for (o, &i) in out.iter_mut().zip(&idx[..2 * self.n]) {
            *o = i as f64 / m;
        }
    }

    /// Node coordinates as an owned vector.
    pub fn node_vec(&self, lin: usize) -> Vec<f64> {
        let mut z = vec![0.0; 2 * self.n];
        self.node(lin, &mut z);
        z
    }
}

/// Values of `Zf` at the nodes `(i/M, k/M)`, row-major with `t` indices
/// outermost and the last `ω` coordinate fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakGrid {
    pub spec: ZakGridSpec,
    pub values: Vec<Complex64>,
    pub truncation_bound: f64,
}

impl ZakGrid {
    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Sup-norm distance between two grids on the same spec.
    pub fn sup_distance(&self, other: &ZakGrid) -> f64 {
        assert_eq!(self.spec, other.spec);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// Odometer over `τ ∈ [-w, w]^n` in lexicographic order.
pub(crate) fn for_each_shift(n: usize, w: i64, mut visit: impl FnMut(&[i64])) {
    let mut tau = [0i64; MAX_DIM];
    for t in tau.iter_mut().take(n) {
        *t = -w;
    }
    loop {
        visit(&tau[..n]);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if tau[k] < w {
                tau[k] += 1;
                break;
            }
            tau[k] = -w;
        }
    }
}

/// Direct truncated Zak sum at an arbitrary `(t, ω)`.
pub fn zak_value<S: Signal + ?Sized>(f: &S, t: &[f64], omega: &[f64], window: i64) -> Complex64 {
    let n = t.len();
    let mut acc = ComplexNeumaier::new();
    let mut arg = [0.0; MAX_DIM];
    let mut tau_f = [0.0; MAX_DIM];
    for_each_shift(n, window, |tau| {
        for k in 0..n {
            arg[k] = t[k] + tau[k] as f64;
            tau_f[k] = tau[k] as f64;
        }
        acc.add(f.eval(&arg[..n]) * neg_phase(dot(omega, &tau_f[..n])));
    });
    acc.value()
}

/// Direct truncated Zak sum at a torus point `z = (t, ω)` of length `2n`.
pub fn zak_at<S: Signal + ?Sized>(f: &S, z: &[f64], window: i64) -> Complex64 {
    let n = z.len() / 2;
    zak_value(f, &z[..n], &z[n..], window)
}

/// `Zf` on the grid by direct summation at every node.
pub fn zak_direct<S: Signal + ?Sized>(f: &S, spec: &ZakGridSpec) -> ZakGrid {
    assert_eq!(f.dim(), spec.n, "function dimension must match grid");
    let n = spec.n;
    let m = spec.resolution;
    let half = spec.half_len();
    let w = spec.window;
    let twiddle: Vec<Complex64> = (0..m).map(|r| neg_phase(r as f64 / m as f64)).collect();
    let blocks = par::map_range(half, |ti| {
        let mut idx = [0usize; MAX_DIM];
        unravel(ti, m, &mut idx[..n]);
        let mut t = [0.0; MAX_DIM];
        for k in 0..n {
            t[k] = idx[k] as f64 / m as f64;
        }
        // f(t + τ) for every τ in lexicographic order
        let mut samples = Vec::new();
        let mut shifts = Vec::new();
        let mut arg = [0.0; MAX_DIM];
        for_each_shift(n, w, |tau| {
            for k in 0..n {
                arg[k] = t[k] + tau[k] as f64;
            }
            samples.push(f.eval(&arg[..n]));
            shifts.extend_from_slice(tau);
        });
        let mut out = Vec::with_capacity(half);
        let mut freq = [0usize; MAX_DIM];
        for wi in 0..half {
            unravel(wi, m, &mut freq[..n]);
            let mut acc = ComplexNeumaier::new();
            for (s, tau) in samples.iter().zip(shifts.chunks_exact(n)) {
                let r = tau
                    .iter()
                    .zip(&freq[..n])
                    .map(|(&tk, &fk)| tk * fk as i64)
                    .sum::<i64>()
                    .rem_euclid(m as i64);
                acc.add(s * twiddle[r as usize]);
            }
            out.push(acc.value());
        }
        out
    });
    ZakGrid {
        spec: *spec,
        values: blocks.concat(),
        truncation_bound: f.tail_bound(w),
    }
}

/// In-place forward DFT of a row-major `M^n` block along every axis.
fn fft_nd(data: &mut [Complex64], n: usize, m: usize, fft: &dyn rustfft::Fft<f64>) {
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let outer = data.len() / (m * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * m * stride + s;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

/// `Zf` from samples: fold `τ` into residues mod `M`, then DFT each residue axis.
pub fn zak_fft(samples: &SampledGrid, spec: &ZakGridSpec) -> Result<ZakGrid> {
    if samples.dim != spec.n {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", samples.dim, spec.n)));
    }
    if samples.resolution != spec.resolution {
        return Err(Error::GridMismatch(format!(
            "resolution {} vs {}",
            samples.resolution, spec.resolution
        )));
    }
    if samples.window != spec.window {
        return Err(Error::GridMismatch(format!(
            "window {} vs {}",
            samples.window, spec.window
        )));
    }
    let n = spec.n;
    let m = spec.resolution;
    let w = spec.window;
    let half = spec.half_len();
    let axis = samples.axis_len();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let blocks = par::map_range(half, |ti| {
        let mut idx = [0usize; MAX_DIM];
        unravel(ti, m, &mut idx[..n]);
        let mut acc = vec![ComplexNeumaier::new(); half];
        for_each_shift(n, w, |tau| {
            let mut src = 0usize;
            let mut dst = 0usize;
            for k in 0..n {
                src = src * axis + ((tau[k] + w) as usize) * m + idx[k];
                dst = dst * m + tau[k].rem_euclid(m as i64) as usize;
            }
            acc[dst].add(samples.values[src]);
        });
        let mut block: Vec<Complex64> = acc.iter().map(|a| a.value()).collect();
        fft_nd(&mut block, n, m, fft.as_ref());
        block
    });
    Ok(ZakGrid {
        spec: *spec,
        values: blocks.concat(),
        truncation_bound: samples.tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiPeriodicityReport {
    /// `sup |Zf(t, ω + e_j) − Zf(t, ω)|`
    pub omega_residual: f64,
    /// `sup |Zf(t + e_j, ω) − e^{2πiω_j} Zf(t, ω)|`
    pub time_residual: f64,
}

pub fn check_quasi_periodicity<S: Signal + ?Sized>(f: &S, spec: &ZakGridSpec) -> QuasiPeriodicityReport {
    let grid = zak_direct(f, spec);
    let n = spec.n;
    let w = spec.window;
    let pairs = par::map_range(spec.len(), |lin| {
        let z = spec.node_vec(lin);
        let (t, omega) = z.split_at(n);
        let base = grid.values[lin];
        let mut om = 0.0_f64;
        let mut tm = 0.0_f64;
        for j in 0..n {
            let mut omega_shift = omega.to_vec();
            omega_shift[j] += 1.0;
            om = om.max((zak_value(f, t, &omega_shift, w) - base).norm());
            let mut t_shift = t.to_vec();
            t_shift[j] += 1.0;
            let expected = pos_phase(omega[j]) * base;
            tm = tm.max((zak_value(f, &t_shift, omega, w) - expected).norm());
        }
        (om, tm)
    });
    let (omega_residual, time_residual) = pairs
        .iter()
        .fold((0.0_f64, 0.0_f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    QuasiPeriodicityReport {
        omega_residual,
        time_residual,
    }
}

/// Relative error between the grid's discrete L² norm and `‖f‖`.
pub fn check_unitarity(z: &ZakGrid, norm: f64) -> f64 {
    let scale = (z.spec.len() as f64).recip();
    let discrete = (sum_norm_sqr(&z.values) * scale).sqrt();
    (discrete - norm).abs() / norm
}

/// Sum of `|f(t+τ)|` over the truncated window at one node; used to scale
/// error estimates relative to the magnitude of the terms.
pub fn term_mass<S: Signal + ?Sized>(f: &S, t: &[f64], window: i64) -> f64 {
    let n = t.len();
    let mut acc = Neumaier::new();
    let mut arg = [0.0; MAX_DIM];
    for_each_shift(n, window, |tau| {
        for k in 0..n {
            arg[k] = t[k] + tau[k] as f64;
        }
        acc.add(f.eval(&arg[..n]).norm());
    });
    acc.value()
}
