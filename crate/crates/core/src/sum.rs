//! Compensated and pairwise summation.
//!
//! All reductions in this crate go through these helpers. The pairwise tree
//! splits at fixed midpoints, so the result depends only on the input order,
//! never on how many worker threads ran the two halves.

use num_complex::Complex64;

/// Leaf size of the pairwise tree; leaves are summed with Neumaier compensation.
const LEAF: usize = 64;
/// Below this many terms the two halves are not handed to separate workers.
#[cfg(feature = "parallel")]
const PAR_CUTOFF: usize = 1 << 14;

/// Neumaier (improved Kahan-Babuska) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Complex counterpart of [`Neumaier`], compensating each component.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn leaf_sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Fixed-topology pairwise sum of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return leaf_sum(xs);
    }
    let mid = xs.len() / 2;
    let (lo, hi) = xs.split_at(mid);
    #[cfg(feature = "parallel")]
    {
        if xs.len() >= PAR_CUTOFF {
            let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
            return a + b;
        }
    }
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Pairwise sum of `f(x)` over `xs` without materializing the mapped slice.
pub fn pairwise_sum_by<T: Sync, F>(xs: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64 + Sync,
{
    if xs.len() <= LEAF {
        let mut acc = Neumaier::new();
        for x in xs {
            acc.add(f(x));
        }
        return acc.value();
    }
    let mid = xs.len() / 2;
    let (lo, hi) = xs.split_at(mid);
    #[cfg(feature = "parallel")]
    {
        if xs.len() >= PAR_CUTOFF {
            let (a, b) = rayon::join(|| pairwise_sum_by(lo, f), || pairwise_sum_by(hi, f));
            return a + b;
        }
    }
    pairwise_sum_by(lo, f) + pairwise_sum_by(hi, f)
}

/// Pairwise sum of complex values.
pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    Complex64::new(pairwise_sum_by(xs, &|z| z.re), pairwise_sum_by(xs, &|z| z.im))
}

/// Sum of squared moduli, `Σ |z|²`.
pub fn sum_norm_sqr(xs: &[Complex64]) -> f64 {
    pairwise_sum_by(xs, &|z| z.norm_sqr())
}
