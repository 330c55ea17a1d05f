//! Test functions with closed-form values, norms and tail bounds, their
//! time-frequency shifts, and sampling onto uniform grids.

use crate::error::{Error, Result};
use crate::par;
use crate::phase::{dot, neg_phase};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported dimension n (points on the torus have 2n coordinates).
pub const MAX_DIM: usize = 4;

/// One-dimensional profile; n-dimensional functions are products of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `2^{1/4} e^{-π t²}`
    Gaussian,
    /// `e^{-a|t|}` with `a > 0`
    TwoSidedExponential { a: f64 },
    /// indicator of `[0, 1)`
    BoxIndicator,
}

/// A product-form test function `f(t) = Π_k profile(t_k)` on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticFunction {
    profile: Profile,
    dim: usize,
}

impl AnalyticFunction {
    pub fn new(profile: Profile, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidFunction(format!(
                "dimension must be in 1..={MAX_DIM} (got {dim})"
            )));
        }
        if let Profile::TwoSidedExponential { a } = profile {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidFunction(format!(
                    "decay rate must be positive and finite (got {a})"
                )));
            }
        }
        Ok(Self { profile, dim })
    }

    pub fn gaussian(dim: usize) -> Self {
        Self::new(Profile::Gaussian, dim).expect("valid dimension")
    }

    pub fn two_sided_exponential(a: f64, dim: usize) -> Result<Self> {
        Self::new(Profile::TwoSidedExponential { a }, dim)
    }

    pub fn box_indicator(dim: usize) -> Self {
        Self::new(Profile::BoxIndicator, dim).expect("valid dimension")
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the Zak transform of this function is continuous.
    pub fn has_continuous_zak(&self) -> bool {
        !matches!(self.profile, Profile::BoxIndicator)
    }

    fn profile_value(&self, t: f64) -> f64 {
        match self.profile {
            Profile::Gaussian => 2f64.powf(0.25) * (-PI * t * t).exp(),
            Profile::TwoSidedExponential { a } => (-a * t.abs()).exp(),
            Profile::BoxIndicator => {
                if (0.0..1.0).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact real value `f(t)`.
    pub fn value(&self, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.dim);
        t.iter().map(|&s| self.profile_value(s)).product()
    }

    /// Closed-form L² norm.
    pub fn norm_l2(&self) -> f64 {
        match self.profile {
            Profile::Gaussian | Profile::BoxIndicator => 1.0,
            Profile::TwoSidedExponential { a } => (1.0 / a).powf(self.dim as f64 / 2.0),
        }
    }

    /// `sup_{t ∈ [0,1)} |profile(t + τ)|` for integer `τ`.
    pub fn unit_sup(&self, tau: i64) -> f64 {
        // for τ ≤ -1 the supremum is approached as t → 1
        let nearest = if tau >= 0 { tau } else { tau + 1 };
        match self.profile {
            Profile::BoxIndicator => {
                if tau == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.profile_value(nearest as f64),
        }
    }

    /// Per-axis sum of `unit_sup` over all integers.
    fn axis_mass(&self) -> f64 {
        match self.profile {
            Profile::Gaussian => 2.0 * 2f64.powf(0.25) / (1.0 - (-PI).exp()),
            Profile::TwoSidedExponential { a } => 2.0 / (1.0 - (-a).exp()),
            Profile::BoxIndicator => 1.0,
        }
    }

    /// Per-axis sum of `unit_sup(τ)` over `|τ| ≥ window`.
    fn axis_tail(&self, window: i64) -> f64 {
        if window <= 0 {
            return self.axis_mass();
        }
        match self.profile {
            Profile::Gaussian => {
                let theta_tail = |k: i64| {
                    let k = k as f64;
                    (-PI * k * k).exp() / (1.0 - (-PI * (2.0 * k + 1.0)).exp())
                };
                2f64.powf(0.25) * (theta_tail(window) + theta_tail(window - 1))
            }
            Profile::TwoSidedExponential { a } => {
                let w = window as f64;
                ((-a * w).exp() + (-a * (w - 1.0)).exp()) / (1.0 - (-a).exp())
            }
            Profile::BoxIndicator => 0.0,
        }
    }

    /// Default Zak summation window: 10 for the Gaussian, 2 for the box, and
    /// for the exponential the smallest `T` with `B(T) ≤ 1e-10`.
    pub fn default_window(&self) -> i64 {
        match self.profile {
            Profile::Gaussian => 10,
            Profile::BoxIndicator => 2,
            Profile::TwoSidedExponential { .. } => (1..10_000).find(|&t| self.tail_bound(t) <= 1e-10).unwrap_or(10_000),
        }
    }

    /// Upper bound `B(T)` on `Σ_{|τ|_∞ ≥ T} sup_{t ∈ [0,1)^n} |f(t + τ)|`.
    pub fn tail_bound(&self, window: i64) -> f64 {
        let n = self.dim as i32;
        if window <= 0 {
            return self.axis_mass().powi(n);
        }
        // union bound over which coordinate leaves the window
        n as f64 * self.axis_tail(window) * self.axis_mass().powi(n - 1)
    }
}

/// Run-config form of a function: `{"kind": ..., "a": number, "n": integer}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    #[serde(default = "default_rate")]
    pub a: f64,
    #[serde(default = "default_dim")]
    pub n: usize,
}

fn default_rate() -> f64 {
    1.0
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Gaussian,
    #[serde(alias = "exp", alias = "exponential")]
    TwoSidedExponential,
    #[serde(alias = "box")]
    BoxIndicator,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<AnalyticFunction> {
        let profile = match self.kind {
            FunctionKind::Gaussian => Profile::Gaussian,
            FunctionKind::TwoSidedExponential => Profile::TwoSidedExponential { a: self.a },
            FunctionKind::BoxIndicator => Profile::BoxIndicator,
        };
        AnalyticFunction::new(profile, self.n)
    }
}

impl From<AnalyticFunction> for FunctionSpec {
    fn from(f: AnalyticFunction) -> Self {
        let (kind, a) = match f.profile {
            Profile::Gaussian => (FunctionKind::Gaussian, 1.0),
            Profile::TwoSidedExponential { a } => (FunctionKind::TwoSidedExponential, a),
            Profile::BoxIndicator => (FunctionKind::BoxIndicator, 1.0),
        };
        Self { kind, a, n: f.dim }
    }
}

/// A point of the time-frequency plane: translation `x`, modulation `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TfPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("time-frequency point must be finite".into()));
        }
        Ok(Self { x, y })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            x: vec![0.0; dim],
            y: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Anything that can be evaluated pointwise on `R^n`.
pub trait Signal: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: &[f64]) -> Complex64;
    /// Upper bound on the Zak truncation error for summation window `window`.
    fn tail_bound(&self, window: i64) -> f64;
}

impl Signal for AnalyticFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        Complex64::new(self.value(t), 0.0)
    }

    fn tail_bound(&self, window: i64) -> f64 {
        AnalyticFunction::tail_bound(self, window)
    }
}

/// `t ↦ e^{-2πi⟨y,t⟩} f(t − x)`.
#[derive(Debug, Clone)]
pub struct Shifted<'a, S: Signal + ?Sized> {
    inner: &'a S,
    point: TfPoint,
}

impl<S: Signal + ?Sized> Shifted<'_, S> {
    pub fn point(&self) -> &TfPoint {
        &self.point
    }
}

/// Modulation applied after translation.
pub fn apply_tf_shift<S: Signal + ?Sized>(f: &S, p: TfPoint) -> Shifted<'_, S> {
    assert_eq!(f.dim(), p.dim(), "shift dimension must match function");
    Shifted { inner: f, point: p }
}

impl<S: Signal + ?Sized> Signal for Shifted<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        let n = t.len();
        let mut moved = [0.0; MAX_DIM];
        for k in 0..n {
            moved[k] = t[k] - self.point.x[k];
        }
        neg_phase(dot(&self.point.y, t)) * self.inner.eval(&moved[..n])
    }

    fn tail_bound(&self, window: i64) -> f64 {
        let reach = self.point.x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).ceil() as i64;
        2.0 * self.inner.tail_bound(window - reach)
    }
}

pub(crate) fn validate_resolution(m: usize) -> Result<()> {
    if !m.is_power_of_two() {
        return Err(Error::ResolutionNotPowerOfTwo(m));
    }
    Ok(())
}

/// Samples on the nodes `-T + i/M` covering `[-T, T+1)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    pub dim: usize,
    pub resolution: usize,
    pub window: i64,
    /// Row-major, last coordinate fastest.
    pub values: Vec<Complex64>,
    pub tail_bound: f64,
}

impl SampledGrid {
    /// Nodes per axis, `M(2T+1)`.
    pub fn axis_len(&self) -> usize {
        self.resolution * (2 * self.window as usize + 1)
    }

    pub fn node(&self, axis_index: usize) -> f64 {
        -(self.window as f64) + axis_index as f64 / self.resolution as f64
    }

    /// Discrete L² norm `(M^{-n} Σ |v|²)^{1/2}`.
    pub fn discrete_norm(&self) -> f64 {
        let scale = (self.resolution as f64).powi(self.dim as i32);
        (crate::sum::sum_norm_sqr(&self.values) / scale).sqrt()
    }
}

/// Decompose a row-major linear index into `digits` base-`base` digits.
#[inline]
pub(crate) fn unravel(mut lin: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = lin % base;
        lin /= base;
    }
}

pub fn sample<S: Signal + ?Sized>(f: &S, window: i64, resolution: usize) -> Result<SampledGrid> {
    validate_resolution(resolution)?;
    if window <= 0 {
        return Err(Error::NonPositiveWindow(window));
    }
    let n = f.dim();
    let axis = resolution * (2 * window as usize + 1);
    let total = axis.pow(n as u32);
    let m = resolution as f64;
    let values = par::map_range(total, |lin| {
        let mut idx = [0usize; MAX_DIM];
        unravel(lin, axis, &mut idx[..n]);
        let mut t = [0.0; MAX_DIM];
        for k in 0..n {
            t[k] = -(window as f64) + idx[k] as f64 / m;
        }
        f.eval(&t[..n])
    });
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidFunction("non-finite sample".into()));
    }
    Ok(SampledGrid {
        dim: n,
        resolution,
        window,
        values,
        tail_bound: f.tail_bound(window),
    })
}
