//! Rotations of the torus `R^{2n} / Z^{2n}`: orbit stepping, classification
//! of the generated subgroup, equidistribution diagnostics and products of a
//! multiplier along an orbit.

use crate::error::{Error, Result};
use crate::function::Signal;
use crate::identities::reduce_mod1;
use crate::par;
use crate::sum::Neumaier;
use crate::trig::TrigPoly;
use crate::zak::{zak_at, ZakGridSpec};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i128>;

/// Tolerance for accepting a float as a rational or an integer relation.
pub const RELATION_TOL: f64 = 1e-12;
/// Largest enumeration the relation search will attempt.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000_000;

fn reduce_rational(r: Rational) -> Rational {
    let q = r - r.floor();
    debug_assert!(q >= Rational::from_integer(0) && q < Rational::from_integer(1));
    q
}

fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A point of the torus with optional exact rational tags per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusVector {
    coords: Vec<f64>,
    tags: Vec<Option<Rational>>,
}

impl TorusVector {
    /// Reduce float coordinates into `[0, 1)`; no rational tags.
    pub fn from_floats(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("torus coordinates must be finite".into()));
        }
        let mut c = coords.to_vec();
        reduce_mod1(&mut c);
        Ok(Self {
            tags: vec![None; c.len()],
            coords: c,
        })
    }

    /// Exact rational coordinates `p/q`, reduced mod 1.
    pub fn from_rationals(pairs: &[(i64, i64)]) -> Result<Self> {
        let mut coords = Vec::with_capacity(pairs.len());
        let mut tags = Vec::with_capacity(pairs.len());
        for &(p, q) in pairs {
            if q == 0 {
                return Err(Error::InvalidArgument("zero denominator".into()));
            }
            let r = reduce_rational(Rational::new(p as i128, q as i128));
            coords.push(rational_to_f64(&r));
            tags.push(Some(r));
        }
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty torus vector".into()));
        }
        Ok(Self { coords, tags })
    }

    /// Mixed construction; a tag must agree with its coordinate to 1e-15.
    pub fn new(coords: &[f64], tags: Vec<Option<Rational>>) -> Result<Self> {
        if coords.len() != tags.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                got: tags.len(),
            });
        }
        let mut v = Self::from_floats(coords)?;
        for (k, tag) in tags.into_iter().enumerate() {
            if let Some(r) = tag {
                let r = reduce_rational(r);
                let exact = rational_to_f64(&r);
                let d = (v.coords[k] - exact).abs();
                if d.min(1.0 - d) > 1e-15 {
                    return Err(Error::InvalidArgument(format!(
                        "coordinate {k} disagrees with its rational tag"
                    )));
                }
                v.coords[k] = exact;
                v.tags[k] = Some(r);
            }
        }
        Ok(v)
    }

    pub fn zero(len: usize) -> Self {
        Self {
            coords: vec![0.0; len],
            tags: vec![Some(Rational::from_integer(0)); len],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn tags(&self) -> &[Option<Rational>] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.tags.iter().all(Option::is_some)
    }

    /// Group inverse `−γ mod 1`.
    pub fn inverse(&self) -> Self {
        let coords: Vec<f64> = self.coords.iter().map(|&c| -c).collect();
        let tags = self.tags.iter().map(|t| t.map(|r| -r)).collect();
        Self::new(&coords, tags).expect("inverse of a valid vector")
    }
}

/// `(z + mγ) mod 1` for one float coordinate: the product is split exactly
/// with a fused multiply-add and reduced once.
#[inline]
fn advance_coord(z: f64, gamma: f64, m: u64) -> f64 {
    let mf = m as f64;
    let prod = mf * gamma;
    let err = mf.mul_add(gamma, -prod);
    let mut out = [prod - prod.floor() + z + err];
    reduce_mod1(&mut out);
    out[0]
}

/// `(z + mγ) mod Z^{2n}`; exact when both carry rational tags.
pub fn advance(z: &TorusVector, gamma: &TorusVector, m: u64) -> TorusVector {
    assert_eq!(z.len(), gamma.len());
    let mut coords = Vec::with_capacity(z.len());
    let mut tags = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        match (z.tags[k], gamma.tags[k]) {
            (Some(a), Some(g)) => {
                let r = reduce_rational(a + g * Rational::from_integer(m as i128));
                coords.push(rational_to_f64(&r));
                tags.push(Some(r));
            }
            _ => {
                coords.push(advance_coord(z.coords[k], gamma.coords[k], m));
                tags.push(None);
            }
        }
    }
    TorusVector { coords, tags }
}

/// Float-only variant of [`advance`] on plain coordinate slices.
pub fn advance_point(z: &[f64], gamma: &[f64], m: u64) -> Vec<f64> {
    z.iter().zip(gamma).map(|(&a, &g)| advance_coord(a, g, m)).collect()
}

/// First `count` points of the forward orbit, starting at `z0` (m = 0).
pub fn orbit(z0: &TorusVector, gamma: &TorusVector, count: usize) -> Vec<TorusVector> {
    par::map_range(count, |j| advance(z0, gamma, j as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitKind {
    Finite { order: u64 },
    InfiniteNondense { relation: Vec<i64> },
    DenseUpToBound { search_bound: u64 },
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    #[serde(flatten)]
    pub kind: OrbitKind,
    pub rational_dimension: Option<u32>,
}

impl OrbitClass {
    pub fn is_infinite(&self) -> bool {
        matches!(
            self.kind,
            OrbitKind::InfiniteNondense { .. } | OrbitKind::DenseUpToBound { .. }
        )
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.kind, OrbitKind::DenseUpToBound { .. })
    }
}

/// Smallest-denominator rational `p/q` with `q ≤ cap` within `RELATION_TOL`
/// of `x`, searched along the continued-fraction convergents.
pub fn rational_approximation(x: f64, cap: u64) -> Option<Rational> {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e18 {
            return None;
        }
        let ai = a as i128;
        let h = ai * h1 + h0;
        let k = ai * k1 + k0;
        if k > cap as i128 {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= RELATION_TOL {
            return Some(Rational::new(h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Canonical ordering key: height first, then lexicographic.
fn relation_key(rel: &[i64]) -> (i64, Vec<i64>) {
    (rel.iter().map(|v| v.abs()).max().unwrap_or(0), rel.to_vec())
}

/// Smallest integer relation `a_0 + Σ a_i γ_i ≈ 0` with `max |a_i| ≤ height`
/// and `(a_1, …)` nonzero, first nonzero entry positive.
pub fn find_relation(gamma: &[f64], height: u64) -> Option<Vec<i64>> {
    let h = height as i64;
    let d = gamma.len();
    // leading coefficient a_1 in 0..=h; a_1 = 0 rows need a later positive entry
    let per_lead = par::map_range((h + 1) as usize, |lead| {
        let lead = lead as i64;
        let mut best: Option<Vec<i64>> = None;
        let mut rest = vec![-h; d - 1];
        if d == 1 {
            rest.clear();
        }
        loop {
            let first_nonzero = std::iter::once(lead).chain(rest.iter().copied()).find(|&v| v != 0);
            if matches!(first_nonzero, Some(v) if v > 0) {
                let mut acc = Neumaier::new();
                acc.add(lead as f64 * gamma[0]);
                for (a, g) in rest.iter().zip(&gamma[1..]) {
                    acc.add(*a as f64 * g);
                }
                let s = acc.value();
                let a0 = -s.round();
                if a0.abs() <= h as f64 && (s + a0).abs() <= RELATION_TOL {
                    let mut rel = vec![a0 as i64, lead];
                    rel.extend_from_slice(&rest);
                    if best.as_ref().is_none_or(|b| relation_key(&rel) < relation_key(b)) {
                        best = Some(rel);
                    }
                }
            }
            // odometer over the remaining coefficients
            let mut k = rest.len();
            loop {
                if k == 0 {
                    return best;
                }
                k -= 1;
                if rest[k] < h {
                    rest[k] += 1;
                    break;
                }
                rest[k] = -h;
            }
        }
    });
    per_lead.into_iter().flatten().min_by_key(|r| relation_key(r))
}

/// Classify the subgroup generated by `gamma`.
///
/// `denominator_cap` bounds the rational detection, `height_cap` the integer
/// relation search. If `(2H+1)^{2n}` exceeds `budget` the search is skipped.
pub fn classify_generator(
    gamma: &TorusVector,
    denominator_cap: u64,
    height_cap: u64,
    budget: u64,
) -> Result<OrbitClass> {
    if denominator_cap == 0 || height_cap == 0 {
        return Err(Error::InvalidArgument("caps must be at least 1".into()));
    }
    let two_n = gamma.len();
    let n_is_one = two_n == 2;
    let rationals: Option<Vec<Rational>> = gamma
        .coords
        .iter()
        .zip(&gamma.tags)
        .map(|(&c, tag)| tag.or_else(|| rational_approximation(c, denominator_cap)))
        .collect();
    if let Some(rs) = rationals {
        let order = rs.iter().fold(1i128, |acc, r| acc.lcm(r.denom()));
        return Ok(OrbitClass {
            kind: OrbitKind::Finite { order: order as u64 },
            rational_dimension: Some(1),
        });
    }
    let space = (2.0 * height_cap as f64 + 1.0).powi(two_n as i32);
    if space > budget as f64 {
        return Ok(OrbitClass {
            kind: OrbitKind::Unresolved,
            rational_dimension: None,
        });
    }
    match find_relation(&gamma.coords, height_cap) {
        Some(relation) => Ok(OrbitClass {
            kind: OrbitKind::InfiniteNondense { relation },
            rational_dimension: n_is_one.then_some(2),
        }),
        None => Ok(OrbitClass {
            kind: OrbitKind::DenseUpToBound {
                search_bound: height_cap,
            },
            rational_dimension: n_is_one.then_some(3),
        }),
    }
}

fn box_index(v: &TorusVector, k: usize, boxes: usize) -> usize {
    let idx = match v.tags[k] {
        Some(r) => {
            let scaled = r * Rational::from_integer(boxes as i128);
            scaled.floor().to_integer() as usize
        }
        None => (v.coords[k] * boxes as f64).floor() as usize,
    };
    idx.min(boxes - 1)
}

/// Max over the `b^{2n}` boxes of `|fraction of orbit points − box volume|`.
pub fn orbit_discrepancy(z0: &TorusVector, gamma: &TorusVector, count: usize, boxes: usize) -> Result<f64> {
    if count == 0 || boxes < 2 {
        return Err(Error::InvalidArgument("need count ≥ 1 and boxes ≥ 2".into()));
    }
    let d = z0.len();
    let cells = boxes.pow(d as u32);
    let idx = par::map_range(count, |j| {
        let p = advance(z0, gamma, j as u64);
        (0..d).fold(0usize, |acc, k| acc * boxes + box_index(&p, k, boxes))
    });
    let mut hist = vec![0u64; cells];
    for i in idx {
        hist[i] += 1;
    }
    let vol = 1.0 / cells as f64;
    Ok(hist
        .iter()
        .map(|&c| (c as f64 / count as f64 - vol).abs())
        .fold(0.0, f64::max))
}

/// `Σ_{j<m} log|P(z + jγ)|`, or the first `j` where `P` vanishes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitProduct {
    pub log_magnitude: f64,
    pub zero_at: Option<u64>,
}

pub fn product_along_orbit(poly: &TrigPoly, z: &[f64], gamma: &[f64], m: u64) -> OrbitProduct {
    assert!(m >= 1, "product needs at least one factor");
    let mut acc = Neumaier::new();
    for j in 0..m {
        let v = poly.eval(&advance_point(z, gamma, j)).norm();
        if v == 0.0 {
            return OrbitProduct {
                log_magnitude: f64::NEG_INFINITY,
                zero_at: Some(j),
            };
        }
        acc.add(v.ln());
    }
    OrbitProduct {
        log_magnitude: acc.value(),
        zero_at: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductIdentityReport {
    /// `max_m | |F(z+mγ)| − Π_{j<m} mult(z+jγ)·|F(z)| |`
    pub residual: f64,
    /// largest per-step defect `| mult(z_j)|F(z_j)| − |F(z_{j+1})| |`
    pub per_step: f64,
    /// per-step defects propagated through the remaining factors
    pub propagated_bound: f64,
    /// `max_m (residual_m − bound_m)⁺`; nonzero only from rounding
    pub excess: f64,
}

/// Telescoping check of `|F(z+mγ)| = Π mult(z+jγ)·|F(z)|` for `m ≤ m_max`
/// with arbitrary multiplier and modulus callbacks.
pub fn telescope<Mu, Mo>(mult: Mu, modulus: Mo, z: &[f64], gamma: &[f64], m_max: u64) -> ProductIdentityReport
where
    Mu: Fn(&[f64]) -> f64 + Sync + Send,
    Mo: Fn(&[f64]) -> f64 + Sync + Send,
{
    let pts = par::map_range(m_max as usize + 1, |j| advance_point(z, gamma, j as u64));
    let fm = par::map_slice(&pts, |p| modulus(p));
    let mu = par::map_slice(&pts, |p| mult(p));
    let mut report = ProductIdentityReport {
        residual: 0.0,
        per_step: 0.0,
        propagated_bound: 0.0,
        excess: 0.0,
    };
    let mut log_prod = Neumaier::new();
    let mut zero = false;
    let mut bound = 0.0_f64;
    for m in 1..=m_max as usize {
        let j = m - 1;
        let defect = (mu[j] * fm[j] - fm[m]).abs();
        report.per_step = report.per_step.max(defect);
        bound = bound * mu[j] + defect;
        if mu[j] == 0.0 {
            zero = true;
        } else {
            log_prod.add(mu[j].ln());
        }
        let predicted = if zero { 0.0 } else { log_prod.value().exp() * fm[0] };
        let r = (fm[m] - predicted).abs();
        report.residual = report.residual.max(r);
        report.propagated_bound = report.propagated_bound.max(bound);
        report.excess = report.excess.max(r - bound);
    }
    report.excess = report.excess.max(0.0);
    report
}

/// Product formula for `F = Zf` along the orbit of `γ = (−x, y)` with
/// multiplier `|P|`, every `|F|` summed directly.
pub fn verify_product_identity<S: Signal + ?Sized>(
    f: &S,
    poly: &TrigPoly,
    gamma: &[f64],
    z: &[f64],
    m_max: u64,
    spec: &ZakGridSpec,
) -> ProductIdentityReport {
    let w = spec.window;
    telescope(|p| poly.eval(p).norm(), |p| zak_at(f, p, w).norm(), z, gamma, m_max)
}
