//! Zeros of `|Zf|` on the torus: grid scan, shrinking-box refinement,
//! finiteness at grid resolution, and invariance of the zero set under the
//! torus shift `γ`.

use crate::error::{Error, Result};
use crate::function::{unravel, Signal, MAX_DIM};
use crate::identities::reduce_mod1;
use crate::par;
use crate::torus::advance_point;
use crate::zak::{zak_at, zak_direct, ZakGrid, ZakGridSpec};
use serde::{Deserialize, Serialize};

/// Default exclusion radius around refined zeros when bounding `|F|` from below.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.125;
/// Default target box radius for refinement.
pub const DEFAULT_TARGET_RADIUS: f64 = 1e-6;
/// Default number of orbit steps in the invariance check.
pub const DEFAULT_M_MAX: u64 = 100;
/// Consecutive non-contracting moves tolerated before refinement gives up.
const MAX_WALK: usize = 64;

/// `max(10·B(T), 1e-8)`.
pub fn default_threshold(truncation_bound: f64) -> f64 {
    (10.0 * truncation_bound).max(1e-8)
}

/// Sup-norm distance on the torus.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    pub location: Vec<f64>,
    pub modulus: f64,
}

/// Grid-local minima of `|F|` (wrapping neighbours) below `threshold`.
/// Ties are broken by linear index so a flat patch yields one candidate.
pub fn scan_zeros(z: &ZakGrid, threshold: f64) -> Result<Vec<Candidate>> {
    if threshold <= z.truncation_bound {
        return Err(Error::ThresholdBelowNoise {
            threshold,
            bound: z.truncation_bound,
        });
    }
    let spec = z.spec;
    let d = 2 * spec.n;
    let m = spec.resolution;
    let moduli = z.moduli();
    let neighbours = 3usize.pow(d as u32);
    let hits = par::map_range(spec.len(), |lin| {
        let v = moduli[lin];
        if v >= threshold {
            return None;
        }
        let mut idx = [0usize; 2 * MAX_DIM];
        unravel(lin, m, &mut idx[..d]);
        let mut step = [0usize; 2 * MAX_DIM];
        for s in 0..neighbours {
            unravel(s, 3, &mut step[..d]);
            let mut other = 0usize;
            for k in 0..d {
                other = other * m + (idx[k] + m + step[k] - 1) % m;
            }
            if other == lin {
                continue;
            }
            let w = moduli[other];
            if w < v || (w == v && other < lin) {
                return None;
            }
        }
        Some(Candidate {
            index: lin,
            location: spec.node_vec(lin),
            modulus: v,
        })
    });
    Ok(hits.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub location: Vec<f64>,
    /// `|F|` at the refined location
    pub residual: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub start_radius: f64,
    pub target_radius: f64,
    pub threshold: f64,
    pub window: i64,
}

/// Compass search on a `3^{2n}` stencil: move to a strictly smaller probe,
/// halve the box when the centre is best, stop at `target_radius`.
pub fn refine_zero<S: Signal + ?Sized>(f: &S, start: &[f64], opts: &RefineOptions) -> Result<ZeroPoint> {
    let d = start.len();
    let stencil = 3usize.pow(d as u32);
    let mut center = start.to_vec();
    reduce_mod1(&mut center);
    let mut best = zak_at(f, &center, opts.window).norm();
    let mut radius = opts.start_radius;
    let mut walk = 0usize;
    let fail = |loc: &[f64], reason: &str| Error::RefinementFailed {
        location: loc.to_vec(),
        reason: reason.to_string(),
    };
    while radius > opts.target_radius {
        let probes = par::map_range(stencil, |s| {
            let mut step = [0usize; 2 * MAX_DIM];
            unravel(s, 3, &mut step[..d]);
            let mut p: Vec<f64> = center
                .iter()
                .zip(&step[..d])
                .map(|(c, &k)| c + (k as f64 - 1.0) * radius)
                .collect();
            reduce_mod1(&mut p);
            let v = zak_at(f, &p, opts.window).norm();
            (v, p)
        });
        let (v, p) = probes
            .into_iter()
            .fold(None::<(f64, Vec<f64>)>, |acc, (v, p)| match acc {
                Some((bv, _)) if bv <= v => acc,
                _ => Some((v, p)),
            })
            .expect("non-empty stencil");
        if v < best {
            best = v;
            center = p;
            walk += 1;
            if walk > MAX_WALK {
                return Err(fail(&center, "minimum escapes the search box"));
            }
        } else {
            radius *= 0.5;
            walk = 0;
        }
    }
    if best > opts.threshold {
        return Err(fail(&center, &format!("no contraction toward zero (|F| = {best:e})")));
    }
    Ok(ZeroPoint {
        location: center,
        residual: best,
        radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetReport {
    pub zeros: Vec<ZeroPoint>,
    pub off_zero_lower_bound: f64,
    pub grid: ZakGridSpec,
    pub threshold: f64,
    pub exclusion_radius: f64,
    /// lower bound exceeds the threshold, so the zero set is finite at this resolution
    pub finite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSearchOptions {
    pub threshold: Option<f64>,
    pub target_radius: f64,
    pub exclusion_radius: f64,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            target_radius: DEFAULT_TARGET_RADIUS,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }
}

/// Scan, refine, merge duplicates within `2/M`, and bound `|F|` from below on
/// grid nodes farther than the exclusion radius from every zero.
pub fn certify_finite_zero_set<S: Signal + ?Sized>(
    f: &S,
    spec: &ZakGridSpec,
    opts: &ZeroSearchOptions,
) -> Result<ZeroSetReport> {
    let grid = zak_direct(f, spec);
    let threshold = opts
        .threshold
        .unwrap_or_else(|| default_threshold(grid.truncation_bound));
    let candidates = scan_zeros(&grid, threshold)?;
    let refine = RefineOptions {
        start_radius: 1.0 / spec.resolution as f64,
        target_radius: opts.target_radius,
        threshold,
        window: spec.window,
    };
    let refined: Vec<Result<ZeroPoint>> = par::map_slice(&candidates, |c| refine_zero(f, &c.location, &refine));
    let merge = 2.0 / spec.resolution as f64;
    let mut zeros: Vec<ZeroPoint> = Vec::new();
    for r in refined {
        let z = r?;
        match zeros
            .iter_mut()
            .find(|o| torus_distance(&o.location, &z.location) <= merge)
        {
            Some(o) if z.residual < o.residual => *o = z,
            Some(_) => {}
            None => zeros.push(z),
        }
    }
    let off_zero_lower_bound = (0..spec.len())
        .filter(|&lin| {
            let p = spec.node_vec(lin);
            zeros
                .iter()
                .all(|z| torus_distance(&p, &z.location) > opts.exclusion_radius)
        })
        .map(|lin| grid.values[lin].norm())
        .fold(f64::INFINITY, f64::min);
    // every node excluded: nothing certified
    let off_zero_lower_bound = if off_zero_lower_bound.is_finite() {
        off_zero_lower_bound
    } else {
        0.0
    };
    Ok(ZeroSetReport {
        finite: off_zero_lower_bound > threshold,
        zeros,
        off_zero_lower_bound,
        grid: *spec,
        threshold,
        exclusion_radius: opts.exclusion_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub zero: Vec<f64>,
    pub m: u64,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InvarianceVerdict {
    /// `|F|` stayed below tolerance for every `m ≤ up_to`
    Holds { zero: Vec<f64>, up_to: u64 },
    /// `|F(λ + mγ)|` exceeded the tolerance: no dependence relation with this `γ`
    Fails { witness: Witness },
}

impl InvarianceVerdict {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            InvarianceVerdict::Fails { witness } => Some(witness),
            InvarianceVerdict::Holds { .. } => None,
        }
    }
}

/// Follow each zero along `λ + mγ` for `m = 1..=m_max` and report the first
/// point where `|F|` exceeds `tol`.
pub fn check_zero_invariance<S: Signal + ?Sized>(
    report: &ZeroSetReport,
    gamma: &[f64],
    f: &S,
    tol: f64,
    m_max: u64,
) -> Result<Vec<InvarianceVerdict>> {
    if report.zeros.is_empty() {
        return Err(Error::InvalidArgument("zero set report is empty".into()));
    }
    let mut g = gamma.to_vec();
    reduce_mod1(&mut g);
    let window = report.grid.window;
    Ok(par::map_slice(&report.zeros, |z| {
        for m in 1..=m_max {
            let point = advance_point(&z.location, &g, m);
            let value = zak_at(f, &point, window).norm();
            if value > tol {
                return InvarianceVerdict::Fails {
                    witness: Witness {
                        zero: z.location.clone(),
                        m,
                        point,
                        value,
                    },
                };
            }
        }
        InvarianceVerdict::Holds {
            zero: z.location.clone(),
            up_to: m_max,
        }
    }))
}
