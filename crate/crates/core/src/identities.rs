//! Covariance identities of the Zak transform and the modulus functional
//! equation, each checked by two independent evaluation paths.
//!
//! Conventions: the time-frequency shift is `e^{-2πi⟨y,t⟩} f(t − x)`, the Zak
//! kernel is `e^{-2πi⟨ω,τ⟩}`, and the induced torus shift is `γ = (−x, y)`.

use crate::function::{apply_tf_shift, Signal, TfPoint, MAX_DIM};
use crate::par;
use crate::phase::{dot, neg_phase};
use crate::trig::{TrigPoly, TrigTerm};
use crate::zak::{zak_at, zak_direct, zak_value, ZakGrid, ZakGridSpec};
use num_complex::Complex64;
use rand::Rng;

/// `g(t) = Σ_j c_j e^{-2πi⟨ℓ_j, t⟩} f(t − m_j)`.
pub struct LatticeCombination<'a, S: Signal + ?Sized> {
    f: &'a S,
    poly: &'a TrigPoly,
}

impl<'a, S: Signal + ?Sized> LatticeCombination<'a, S> {
    pub fn new(f: &'a S, poly: &'a TrigPoly) -> Self {
        assert_eq!(f.dim(), poly.dim());
        Self { f, poly }
    }

    /// Largest translation `max_j |m_j|_∞`.
    pub fn reach(&self) -> i64 {
        self.poly
            .terms()
            .iter()
            .flat_map(|t| t.m.iter())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }
}

impl<S: Signal + ?Sized> Signal for LatticeCombination<'_, S> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        let n = t.len();
        let mut moved = [0.0; MAX_DIM];
        let mut acc = Complex64::new(0.0, 0.0);
        for term in self.poly.terms() {
            let mut arg = 0.0;
            for k in 0..n {
                moved[k] = t[k] - term.m[k] as f64;
                arg += term.ell[k] as f64 * t[k];
            }
            acc += term.coeff * neg_phase(arg) * self.f.eval(&moved[..n]);
        }
        acc
    }

    fn tail_bound(&self, window: i64) -> f64 {
        2.0 * self.poly.coeff_l1() * self.f.tail_bound(window - self.reach())
    }
}

/// Two evaluations of the same grid and their sup-norm distance.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub lhs: ZakGrid,
    pub rhs: ZakGrid,
    pub residual: f64,
}

/// `Z[Σ_j c_j π(ℓ_j, m_j) f]` by direct summation of the combination versus
/// `P · Zf`. The combination is summed over a window widened by the largest
/// translation so both sides see the same terms of `f`.
pub fn lattice_combination_zak<S: Signal + ?Sized>(f: &S, poly: &TrigPoly, spec: &ZakGridSpec) -> IdentityCheck {
    let combo = LatticeCombination::new(f, poly);
    let wide = ZakGridSpec {
        window: spec.window + combo.reach(),
        ..*spec
    };
    let mut lhs = zak_direct(&combo, &wide);
    lhs.spec = *spec;
    let base = zak_direct(f, spec);
    let values = par::map_range(spec.len(), |lin| poly.eval(&spec.node_vec(lin)) * base.values[lin]);
    let rhs = ZakGrid {
        spec: *spec,
        values,
        truncation_bound: base.truncation_bound * poly.coeff_l1(),
    };
    let residual = lhs.sup_distance(&rhs);
    IdentityCheck { lhs, rhs, residual }
}

/// `Z[π(x,y) f](t, ω)` versus `e^{-2πi⟨t,y⟩} Zf(t − x, ω + y)`, the right side
/// summed afresh at the shifted off-grid arguments.
pub fn shifted_zak<S: Signal + ?Sized>(f: &S, p: &TfPoint, spec: &ZakGridSpec) -> IdentityCheck {
    let n = spec.n;
    let shifted = apply_tf_shift(f, p.clone());
    let lhs = zak_direct(&shifted, spec);
    let values = par::map_range(spec.len(), |lin| {
        let z = spec.node_vec(lin);
        let (t, omega) = z.split_at(n);
        let t_moved: Vec<f64> = t.iter().zip(&p.x).map(|(a, b)| a - b).collect();
        let w_moved: Vec<f64> = omega.iter().zip(&p.y).map(|(a, b)| a + b).collect();
        neg_phase(dot(t, &p.y)) * zak_value(f, &t_moved, &w_moved, spec.window)
    });
    let rhs = ZakGrid {
        spec: *spec,
        values,
        truncation_bound: lhs.truncation_bound,
    };
    let residual = lhs.sup_distance(&rhs);
    IdentityCheck { lhs, rhs, residual }
}

/// The torus shift `γ = (−x, y)` induced by a time-frequency point, unreduced.
pub fn gamma_of(p: &TfPoint) -> Vec<f64> {
    p.x.iter().map(|v| -v).chain(p.y.iter().copied()).collect()
}

/// Coordinate-wise reduction into `[0, 1)`.
pub fn reduce_mod1(z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = v.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1 for tiny negative inputs
        if *v >= 1.0 {
            *v = 0.0;
        }
    }
}

/// `sup_z | |P(z)|·|F(z)| − |F(z + γ)| |` over the grid, with `F(z + γ)`
/// summed directly at `(z + γ) mod 1`.
pub fn functional_equation_residual<S: Signal + ?Sized>(
    f: &S,
    poly: &TrigPoly,
    p: &TfPoint,
    spec: &ZakGridSpec,
) -> f64 {
    let base = zak_direct(f, spec);
    modulus_identity_residual(f, &base, |z| poly.eval(z).norm(), &gamma_of(p))
}

/// Sup over the grid of `| mult(z)·|F(z)| − |F(z + γ)| |` for an arbitrary
/// multiplier; `mult = |P|` gives the functional equation.
pub fn modulus_identity_residual<S, M>(f: &S, base: &ZakGrid, mult: M, gamma: &[f64]) -> f64
where
    S: Signal + ?Sized,
    M: Fn(&[f64]) -> f64 + Sync + Send,
{
    let spec = base.spec;
    par::max_range(spec.len(), |lin| {
        let z = spec.node_vec(lin);
        let mut moved: Vec<f64> = z.iter().zip(gamma).map(|(a, b)| a + b).collect();
        reduce_mod1(&mut moved);
        let shifted = zak_at(f, &moved, spec.window).norm();
        (mult(&z) * base.values[lin].norm() - shifted).abs()
    })
}

/// Random polynomial with 1 to `max_terms` distinct terms, integer pairs in
/// `[−reach, reach]` and coefficients uniform in the unit disk.
pub fn random_trig_poly<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_terms: usize, reach: i64) -> TrigPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut terms: Vec<TrigTerm> = Vec::with_capacity(count);
    while terms.len() < count {
        let ell: Vec<i64> = (0..dim).map(|_| rng.gen_range(-reach..=reach)).collect();
        let m: Vec<i64> = (0..dim).map(|_| rng.gen_range(-reach..=reach)).collect();
        if terms.iter().any(|t| t.ell == ell && t.m == m) {
            continue;
        }
        let coeff = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if coeff.norm() < 1e-3 || coeff.norm() > 1.0 {
            continue;
        }
        terms.push(TrigTerm { coeff, ell, m });
    }
    TrigPoly::new(terms).expect("drawn terms are valid")
}

/// Random point with every coordinate uniform in `[−reach, reach]`.
pub fn random_tf_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, reach: f64) -> TfPoint {
    let mut draw = || (0..dim).map(|_| rng.gen_range(-reach..=reach)).collect::<Vec<f64>>();
    let x = draw();
    let y = draw();
    TfPoint::new(x, y).expect("finite coordinates")
}
