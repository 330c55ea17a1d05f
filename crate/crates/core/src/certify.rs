//! Linear-independence evidence for systems of `N` integer-lattice
//! time-frequency shifts plus one arbitrary shift.
//!
//! The certificate combines a Gram matrix and a least-squares fit with the
//! orbit class of `γ` and the zero set of `Zf`. It never asserts dependence.

use crate::error::{Error, Result};
use crate::function::{apply_tf_shift, sample, AnalyticFunction, FunctionSpec, SampledGrid, TfPoint};
use crate::identities::{gamma_of, reduce_mod1};
use crate::linalg::{min_eigenvalue, solve, HermitianMatrix};
use crate::par;
use crate::phase::{dot, neg_phase};
use crate::sum::{pairwise_sum_complex, sum_norm_sqr};
use crate::torus::{classify_generator, OrbitClass, Rational, TorusVector, DEFAULT_SEARCH_BUDGET};
use crate::zak::{zak_at, zak_direct, zak_value, ZakGridSpec};
use crate::zeros::{
    certify_finite_zero_set, check_zero_invariance, Witness, ZeroSearchOptions, ZeroSetReport,
    DEFAULT_EXCLUSION_RADIUS, DEFAULT_M_MAX, DEFAULT_TARGET_RADIUS,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coefficients below this modulus are flagged in the certificate.
pub const SMALL_COEFFICIENT: f64 = 1e-10;
const TIKHONOV_FLOOR: f64 = 1e-14;
const FEQ_MAX_EVALS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct TfSystem {
    n: usize,
    /// each entry is `(ℓ, m)`: modulation `ℓ` then translation `m`
    lattice: Vec<Vec<i64>>,
    distinguished: TfPoint,
    gamma: TorusVector,
}

impl TfSystem {
    /// `tags` optionally gives exact rationals for `(x, y)`, in that order.
    pub fn new(lattice: Vec<Vec<i64>>, distinguished: TfPoint, tags: Option<Vec<Option<Rational>>>) -> Result<Self> {
        let n = distinguished.dim();
        if n == 0 {
            return Err(Error::InvalidSystem("zero-dimensional point".into()));
        }
        for (j, p) in lattice.iter().enumerate() {
            if p.len() != 2 * n {
                return Err(Error::InvalidSystem(format!(
                    "lattice point {j} must have {} entries",
                    2 * n
                )));
            }
            if lattice[..j].contains(p) {
                return Err(Error::InvalidSystem(format!("lattice point {j} is repeated")));
            }
            let (ell, m) = p.split_at(n);
            let same_x = m.iter().zip(&distinguished.x).all(|(a, b)| *a as f64 == *b);
            let same_y = ell.iter().zip(&distinguished.y).all(|(a, b)| *a as f64 == *b);
            if same_x && same_y {
                return Err(Error::InvalidSystem(format!(
                    "distinguished point coincides with lattice point {j}"
                )));
            }
        }
        let tags = tags.unwrap_or_else(|| vec![None; 2 * n]);
        if tags.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: tags.len(),
            });
        }
        let gamma_tags = tags
            .iter()
            .enumerate()
            .map(|(k, t)| t.map(|r| if k < n { -r } else { r }))
            .collect();
        let gamma = TorusVector::new(&gamma_of(&distinguished), gamma_tags)?;
        Ok(Self {
            n,
            lattice,
            distinguished,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lattice(&self) -> &[Vec<i64>] {
        &self.lattice
    }

    pub fn distinguished(&self) -> &TfPoint {
        &self.distinguished
    }

    /// `((−x) mod 1, y mod 1)`.
    pub fn gamma(&self) -> &TorusVector {
        &self.gamma
    }

    pub fn lattice_len(&self) -> usize {
        self.lattice.len()
    }

    /// Lattice point `j` as a time-frequency point: translation `m`, modulation `ℓ`.
    pub fn lattice_point(&self, j: usize) -> TfPoint {
        let (ell, m) = self.lattice[j].split_at(self.n);
        TfPoint {
            x: m.iter().map(|&v| v as f64).collect(),
            y: ell.iter().map(|&v| v as f64).collect(),
        }
    }

    /// Lattice points followed by the distinguished point.
    pub fn points(&self) -> Vec<TfPoint> {
        let mut pts: Vec<TfPoint> = (0..self.lattice.len()).map(|j| self.lattice_point(j)).collect();
        pts.push(self.distinguished.clone());
        pts
    }

    /// Same system with the lattice point `j` removed.
    pub fn without(&self, j: usize) -> Result<Self> {
        let mut lattice = self.lattice.clone();
        lattice.remove(j);
        Ok(Self {
            lattice,
            ..self.clone()
        })
    }

    /// All modulations negated (`ℓ → −ℓ`, `y → −y`).
    pub fn conjugated(&self) -> Result<Self> {
        let n = self.n;
        let lattice = self
            .lattice
            .iter()
            .map(|p| p.iter().enumerate().map(|(k, &v)| if k < n { -v } else { v }).collect())
            .collect();
        let p = TfPoint {
            x: self.distinguished.x.clone(),
            y: self.distinguished.y.iter().map(|v| -v).collect(),
        };
        // x tags are −γ_x, the new y tags are −y = −γ_y
        let raw: Vec<Option<Rational>> = self.gamma.tags().iter().map(|t| t.map(|r| -r)).collect();
        TfSystem::new(lattice, p, Some(raw))
    }
}

/// Samples of every point of the system, lattice first.
fn sample_system(f: &AnalyticFunction, system: &TfSystem, window: i64, resolution: usize) -> Result<Vec<SampledGrid>> {
    system
        .points()
        .into_iter()
        .map(|p| sample(&apply_tf_shift(f, p), window, resolution))
        .collect()
}

/// `⟨u, v⟩ = M^{-n} Σ u·conj(v)`.
fn discrete_inner(u: &SampledGrid, v: &SampledGrid) -> Complex64 {
    let prod: Vec<Complex64> = u.values.iter().zip(&v.values).map(|(a, b)| a * b.conj()).collect();
    pairwise_sum_complex(&prod) / (u.resolution as f64).powi(u.dim as i32)
}

fn gram_from_samples(samples: &[SampledGrid]) -> HermitianMatrix {
    let k = samples.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let entries = par::map_slice(&pairs, |&(i, j)| discrete_inner(&samples[i], &samples[j]));
    let mut lookup = vec![Complex64::new(0.0, 0.0); k * k];
    for (&(i, j), v) in pairs.iter().zip(entries) {
        lookup[i * k + j] = v;
    }
    HermitianMatrix::from_upper(k, |i, j| lookup[i * k + j])
}

/// Gram matrix of the `N + 1` shifted copies of `f` by grid quadrature.
pub fn gram_matrix(f: &AnalyticFunction, system: &TfSystem, window: i64, resolution: usize) -> Result<HermitianMatrix> {
    Ok(gram_from_samples(&sample_system(f, system, window, resolution)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dependence {
    pub coefficients: Vec<Complex64>,
    /// `‖Σ c_j π_j f − π(x,y) f‖ / ‖f‖` on the sample grid
    pub relative_residual: f64,
}

fn fit_dependence(f: &AnalyticFunction, samples: &[SampledGrid], gram: &HermitianMatrix) -> Result<Dependence> {
    let n_lat = samples.len() - 1;
    if n_lat == 0 {
        return Err(Error::InvalidSystem(
            "least squares needs at least one lattice point".into(),
        ));
    }
    let floor = TIKHONOV_FLOOR * (0..n_lat).map(|j| gram.get(j, j).re).fold(0.0, f64::max);
    // normal equations: Σ_k ⟨a_k, a_j⟩ c_k = ⟨b, a_j⟩
    let normal = HermitianMatrix::from_upper(n_lat, |j, k| {
        let v = gram.get(k, j);
        if j == k {
            v + floor
        } else {
            v
        }
    });
    let rhs: Vec<Complex64> = (0..n_lat).map(|j| gram.get(n_lat, j)).collect();
    let coefficients = solve(&normal, &rhs)?;
    let target = &samples[n_lat];
    let misfit: Vec<Complex64> = (0..target.values.len())
        .map(|i| {
            coefficients
                .iter()
                .zip(samples)
                .map(|(c, s)| c * s.values[i])
                .sum::<Complex64>()
                - target.values[i]
        })
        .collect();
    let scale = (target.resolution as f64).powi(target.dim as i32);
    let residual = (sum_norm_sqr(&misfit) / scale).sqrt();
    Ok(Dependence {
        coefficients,
        relative_residual: residual / f.norm_l2(),
    })
}

/// Least-squares coefficients of the distinguished shift on the lattice shifts.
pub fn best_dependence(f: &AnalyticFunction, system: &TfSystem, window: i64, resolution: usize) -> Result<Dependence> {
    if system.lattice_len() == 0 {
        return Err(Error::InvalidSystem(
            "least squares needs at least one lattice point".into(),
        ));
    }
    let samples = sample_system(f, system, window, resolution)?;
    let gram = gram_from_samples(&samples);
    fit_dependence(f, &samples, &gram)
}

/// `P(z) = Σ_j c_j e^{-2πi⟨t,ℓ_j⟩} e^{-2πi⟨ω,m_j⟩}` for arbitrary (possibly
/// zero) coefficients.
pub fn coefficient_poly(system: &TfSystem, coefficients: &[Complex64], z: &[f64]) -> Complex64 {
    let n = system.dim();
    coefficients
        .iter()
        .zip(system.lattice())
        .map(|(c, p)| {
            let arg: f64 = z.iter().zip(p).map(|(a, &k)| a * k as f64).sum();
            debug_assert_eq!(z.len(), 2 * n);
            c * neg_phase(arg)
        })
        .sum()
}

/// `sup_z | |P_c(z)|·|F(z)| − |F(z + γ)| |` minimised over `c` by compass
/// search from the least-squares fit; bounds the infimum from above.
fn feq_infimum(f: &AnalyticFunction, system: &TfSystem, start: &[Complex64], spec: &ZakGridSpec) -> f64 {
    let base = zak_direct(f, spec);
    let gamma = gamma_of(system.distinguished());
    let nodes: Vec<(f64, f64, Vec<Complex64>)> = par::map_range(spec.len(), |lin| {
        let z = spec.node_vec(lin);
        let mut moved: Vec<f64> = z.iter().zip(&gamma).map(|(a, b)| a + b).collect();
        reduce_mod1(&mut moved);
        let basis = system
            .lattice()
            .iter()
            .map(|p| neg_phase(z.iter().zip(p).map(|(a, &k)| a * k as f64).sum()))
            .collect();
        (base.values[lin].norm(), zak_at(f, &moved, spec.window).norm(), basis)
    });
    let objective = |c: &[Complex64]| {
        par::max_range(nodes.len(), |i| {
            let (here, shifted, basis) = &nodes[i];
            let p: Complex64 = c.iter().zip(basis).map(|(c, b)| c * b).sum();
            (p.norm() * here - shifted).abs()
        })
    };
    let mut best = start.to_vec();
    let mut value = objective(&best);
    if best.is_empty() || !value.is_finite() {
        return value;
    }
    let scale = best.iter().map(|c| c.re.abs().max(c.im.abs())).fold(1e-3, f64::max);
    let mut h = 0.25 * scale;
    let mut evals = 1;
    while h >= 1e-9 * scale && evals < FEQ_MAX_EVALS {
        let mut improved = false;
        'coords: for j in 0..2 * best.len() {
            for sign in [1.0, -1.0] {
                let mut trial = best.clone();
                let step = Complex64::new(
                    if j % 2 == 0 { sign * h } else { 0.0 },
                    if j % 2 == 1 { sign * h } else { 0.0 },
                );
                trial[j / 2] += step;
                let v = objective(&trial);
                evals += 1;
                if v < value {
                    best = trial;
                    value = v;
                    improved = true;
                    continue 'coords;
                }
                if evals >= FEQ_MAX_EVALS {
                    break 'coords;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    value
}

/// Relative L² norm over the torus grid of `P·Zf − Z[π(x,y) f]`, each term
/// from direct sums. Equals the least-squares residual by unitarity.
pub fn zak_residual_l2(f: &AnalyticFunction, system: &TfSystem, coefficients: &[Complex64], spec: &ZakGridSpec) -> f64 {
    let n = system.dim();
    let base = zak_direct(f, spec);
    let p = system.distinguished();
    let diff = par::map_range(spec.len(), |lin| {
        let z = spec.node_vec(lin);
        let (t, omega) = z.split_at(n);
        let t_moved: Vec<f64> = t.iter().zip(&p.x).map(|(a, b)| a - b).collect();
        let w_moved: Vec<f64> = omega.iter().zip(&p.y).map(|(a, b)| a + b).collect();
        let shifted = neg_phase(dot(t, &p.y)) * zak_value(f, &t_moved, &w_moved, spec.window);
        coefficient_poly(system, coefficients, &z) * base.values[lin] - shifted
    });
    (sum_norm_sqr(&diff) / spec.len() as f64).sqrt() / f.norm_l2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    IndependentNumerical,
    IndependentProp1,
    IndependentProp3,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Zak grid used for the zero set and the functional equation
    pub zak: ZakGridSpec,
    pub quadrature_window: i64,
    pub quadrature_resolution: usize,
    pub denominator_cap: u64,
    pub height_cap: u64,
    pub search_budget: u64,
    pub m_max: u64,
    /// minimum eigenvalue threshold relative to `‖f‖²`
    pub eig_threshold: f64,
    pub residual_threshold: f64,
    pub zero_threshold: Option<f64>,
    pub exclusion_radius: f64,
    pub target_radius: f64,
}

impl CertifyConfig {
    pub fn defaults_for(f: &AnalyticFunction, system: &TfSystem) -> Self {
        let window = f.default_window();
        let reach = system
            .points()
            .iter()
            .flat_map(|p| p.x.clone())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .ceil() as i64;
        Self {
            zak: ZakGridSpec {
                n: f.dim(),
                resolution: 128,
                window,
            },
            quadrature_window: window + reach,
            quadrature_resolution: 64,
            denominator_cap: 1_000_000,
            height_cap: if f.dim() == 1 { 1000 } else { 30 },
            search_budget: DEFAULT_SEARCH_BUDGET,
            m_max: DEFAULT_M_MAX,
            eig_threshold: 1e-4,
            residual_threshold: 1e-3,
            zero_threshold: None,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
            target_radius: DEFAULT_TARGET_RADIUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub n: usize,
    pub lattice: Vec<Vec<i64>>,
    /// `[x_1, …, x_n, y_1, …, y_n]`
    pub distinguished: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub function: FunctionSpec,
    pub system: SystemRecord,
    pub gram_min_eig: f64,
    pub ls_residual: f64,
    /// modulus-identity residual minimised over coefficients, from above
    pub feq_infimum: f64,
    pub zak_l2_residual: f64,
    /// least-squares coefficients as `[re, im]`
    pub coefficients: Vec<[f64; 2]>,
    /// indices of coefficients with modulus below `1e-10`
    pub small_coefficients: Vec<usize>,
    pub orbit: OrbitClass,
    pub zeros: ZeroSetReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub config: CertifyConfig,
    pub versions: std::collections::BTreeMap<String, String>,
}

pub fn certify(f: &AnalyticFunction, system: &TfSystem, config: &CertifyConfig) -> Result<IndependenceCertificate> {
    if f.dim() != system.dim() || config.zak.n != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: system.dim(),
        });
    }
    let zak_spec = ZakGridSpec::new(config.zak.n, config.zak.resolution, config.zak.window)?;
    let norm_sq = f.norm_l2().powi(2);
    let samples = sample_system(f, system, config.quadrature_window, config.quadrature_resolution)?;
    let gram = gram_from_samples(&samples);
    let gram_min_eig = min_eigenvalue(&gram);
    let mut notes = Vec::new();

    let (coefficients, ls_residual) = if system.lattice_len() == 0 {
        notes.push("no lattice points: residual is the full norm".to_string());
        (Vec::new(), 1.0)
    } else {
        let dep = fit_dependence(f, &samples, &gram)?;
        (dep.coefficients, dep.relative_residual)
    };
    let small_coefficients: Vec<usize> = coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() < SMALL_COEFFICIENT)
        .map(|(j, _)| j)
        .collect();
    if !small_coefficients.is_empty() {
        notes.push("some least-squares coefficients vanish: the fit uses fewer lattice points".to_string());
    }

    let gamma = system.gamma().coords().to_vec();
    let feq_infimum = feq_infimum(f, system, &coefficients, &zak_spec);
    let zak_l2_residual = zak_residual_l2(f, system, &coefficients, &zak_spec);

    let orbit = classify_generator(
        system.gamma(),
        config.denominator_cap,
        config.height_cap,
        config.search_budget,
    )?;
    if matches!(orbit.kind, crate::torus::OrbitKind::Finite { .. }) {
        notes.push(
            "rational shift: independence for rational time-frequency shifts is known; reported numerically only"
                .to_string(),
        );
    }
    let zeros = certify_finite_zero_set(
        f,
        &zak_spec,
        &ZeroSearchOptions {
            threshold: config.zero_threshold,
            target_radius: config.target_radius,
            exclusion_radius: config.exclusion_radius,
        },
    )?;
    let witness = if zeros.zeros.is_empty() {
        None
    } else {
        check_zero_invariance(&zeros, &gamma, f, zeros.threshold, config.m_max)?
            .iter()
            .find_map(|v| v.witness().cloned())
    };
    if !f.has_continuous_zak() {
        notes.push("discontinuous Zak transform: orbit-based branches disabled".to_string());
    }

    let verdict = if f.has_continuous_zak() && orbit.is_dense() {
        Verdict::IndependentProp1
    } else if f.has_continuous_zak() && orbit.is_infinite() && zeros.finite && !zeros.zeros.is_empty() {
        Verdict::IndependentProp3
    } else if gram_min_eig > config.eig_threshold * norm_sq && ls_residual > config.residual_threshold {
        Verdict::IndependentNumerical
    } else {
        Verdict::Inconclusive
    };

    let p = system.distinguished();
    let mut versions = std::collections::BTreeMap::new();
    versions.insert("zakhrt".to_string(), env!("CARGO_PKG_VERSION").to_string());
    Ok(IndependenceCertificate {
        function: (*f).into(),
        system: SystemRecord {
            n: system.dim(),
            lattice: system.lattice().to_vec(),
            distinguished: p.x.iter().chain(&p.y).copied().collect(),
            gamma,
        },
        gram_min_eig,
        ls_residual,
        feq_infimum,
        zak_l2_residual,
        coefficients: coefficients.iter().map(|c| [c.re, c.im]).collect(),
        small_coefficients,
        orbit,
        zeros,
        witness,
        verdict,
        notes,
        config: config.clone(),
        versions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::torus_distance;
    use std::f64::consts::PI;

    fn square_lattice() -> Vec<Vec<i64>> {
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
    }

    fn point(x: f64, y: f64) -> TfPoint {
        TfPoint::new(vec![x], vec![y]).unwrap()
    }

    fn exp1() -> AnalyticFunction {
        AnalyticFunction::two_sided_exponential(1.0, 1).unwrap()
    }

    #[test]
    fn system_invariants() {
        assert!(TfSystem::new(vec![vec![0, 0], vec![0, 0]], point(0.5, 0.5), None).is_err());
        assert!(TfSystem::new(vec![vec![1, 2]], point(2.0, 1.0), None).is_err());
        assert!(TfSystem::new(vec![vec![1]], point(2.0, 1.0), None).is_err());
        let s = TfSystem::new(vec![vec![1, 2]], point(0.25, 0.75), None).unwrap();
        let lp = s.lattice_point(0);
        assert_eq!((lp.x[0], lp.y[0]), (2.0, 1.0));
    }

    #[test]
    fn gamma_carries_minus_on_translation() {
        let s = TfSystem::new(square_lattice(), point(0.25, 0.125), None).unwrap();
        assert_eq!(s.gamma().coords(), &[0.75, 0.125]);
        let r = TfSystem::new(square_lattice(), point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        assert!((r.gamma().coords()[0] - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((r.gamma().coords()[1] - (3f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn gram_examples() {
        let g = AnalyticFunction::gaussian(1);
        let only = TfSystem::new(vec![], point(0.3, 0.7), None).unwrap();
        let m = gram_matrix(&g, &only, 10, 64).unwrap();
        assert_eq!(m.dim(), 1);
        assert!((m.get(0, 0).re - 1.0).abs() <= 1e-6);

        let s = TfSystem::new(vec![vec![0, 0]], point(1.0, 0.0), None).unwrap();
        let m = gram_matrix(&g, &s, 10, 64).unwrap();
        assert!((m.get(0, 1).norm() - (-PI / 2.0).exp()).abs() <= 1e-6);

        let s = TfSystem::new(vec![vec![0, 0]], point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        let m = gram_matrix(&g, &s, 10, 64).unwrap();
        assert!((m.get(0, 1).norm() - (-5.0 * PI / 2.0).exp()).abs() <= 1e-6);
    }

    #[test]
    fn least_squares_examples() {
        let g = AnalyticFunction::gaussian(1);
        let near = TfSystem::new(square_lattice(), point(1e-9, 0.0), None).unwrap();
        let d = best_dependence(&g, &near, 10, 64).unwrap();
        assert!(d.relative_residual <= 1e-6);
        assert!((d.coefficients[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        for c in &d.coefficients[1..] {
            assert!(c.norm() < 1e-6);
        }
        let far = TfSystem::new(square_lattice(), point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        let d = best_dependence(&g, &far, 12, 64).unwrap();
        assert!(d.relative_residual >= 0.9);
        assert!(best_dependence(&g, &TfSystem::new(vec![], point(0.5, 0.5), None).unwrap(), 10, 64).is_err());
    }

    #[test]
    fn least_squares_residual_transported_by_zak() {
        let spec = ZakGridSpec::new(1, 64, 10).unwrap();
        for (f, x, y) in [
            (AnalyticFunction::gaussian(1), 2f64.sqrt(), 3f64.sqrt()),
            (AnalyticFunction::gaussian(1), 0.5, -0.25),
            (AnalyticFunction::gaussian(1), 0.1, 0.05),
        ] {
            let s = TfSystem::new(square_lattice(), point(x, y), None).unwrap();
            let d = best_dependence(&f, &s, 12, 64).unwrap();
            let via_zak = zak_residual_l2(&f, &s, &d.coefficients, &spec);
            assert!(
                (via_zak - d.relative_residual).abs() <= 1e-6,
                "{via_zak} vs {}",
                d.relative_residual
            );
        }
    }

    #[test]
    fn residual_and_eigenvalue_detect_degeneracy_together() {
        let g = AnalyticFunction::gaussian(1);
        for (x, degenerate) in [(1e-9, true), (0.6, false)] {
            let s = TfSystem::new(vec![vec![0, 0], vec![1, 0]], point(x, 0.0), None).unwrap();
            let d = best_dependence(&g, &s, 10, 64).unwrap();
            let eig = min_eigenvalue(&gram_matrix(&g, &s, 10, 64).unwrap());
            assert_eq!(d.relative_residual <= 1e-8, degenerate);
            assert_eq!(eig <= 1e-8, degenerate);
        }
    }

    fn run(f: &AnalyticFunction, s: &TfSystem) -> IndependenceCertificate {
        certify(f, s, &CertifyConfig::defaults_for(f, s)).unwrap()
    }

    #[test]
    fn feq_search_descends_from_a_poor_start() {
        let g = AnalyticFunction::gaussian(1);
        let s = TfSystem::new(square_lattice(), point(1e-9, 0.0), None).unwrap();
        let spec = ZakGridSpec::new(1, 16, 10).unwrap();
        let poor = [
            Complex64::new(1.2, 0.1),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.05, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let base = zak_direct(&g, &spec);
        let at_start = crate::identities::modulus_identity_residual(
            &g,
            &base,
            |z| coefficient_poly(&s, &poor, z).norm(),
            &gamma_of(s.distinguished()),
        );
        let found = feq_infimum(&g, &s, &poor, &spec);
        assert!(at_start > 0.1);
        assert!(found < 1e-3, "{found}");
    }

    #[test]
    fn certify_dense_orbit() {
        let g = AnalyticFunction::gaussian(1);
        let s = TfSystem::new(square_lattice(), point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        let c = run(&g, &s);
        assert_eq!(c.verdict, Verdict::IndependentProp1);
        assert!(c.gram_min_eig > -1e-10);
        assert!(c.witness.is_some());
        assert_eq!(c.zeros.zeros.len(), 1);
    }

    #[test]
    fn certify_rational_point() {
        let s = TfSystem::new(
            square_lattice(),
            point(0.5, 0.5),
            Some(vec![Some(Rational::new(1, 2)), Some(Rational::new(1, 2))]),
        )
        .unwrap();
        let c = run(&exp1(), &s);
        assert_eq!(c.orbit.kind, crate::torus::OrbitKind::Finite { order: 2 });
        assert_eq!(c.verdict, Verdict::IndependentNumerical);
        assert!(c.notes.iter().any(|n| n.contains("rational")));
    }

    #[test]
    fn certify_nondense_orbit_with_finite_zero_set() {
        let r = 2f64.sqrt() - 1.0;
        let s = TfSystem::new(square_lattice(), point(r, r), None).unwrap();
        let c = run(&exp1(), &s);
        assert!(matches!(c.orbit.kind, crate::torus::OrbitKind::InfiniteNondense { .. }));
        assert_eq!(c.verdict, Verdict::IndependentProp3);
        assert!(torus_distance(&c.zeros.zeros[0].location, &[0.5, 0.5]) <= 1e-6);
    }

    #[test]
    fn box_disables_orbit_branches() {
        let b = AnalyticFunction::box_indicator(1);
        let s = TfSystem::new(square_lattice(), point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        let c = run(&b, &s);
        assert_ne!(c.verdict, Verdict::IndependentProp1);
        assert_ne!(c.verdict, Verdict::IndependentProp3);
    }

    #[test]
    fn verdict_survives_removing_a_lattice_point() {
        let g = AnalyticFunction::gaussian(1);
        for p in [point(2f64.sqrt(), 3f64.sqrt()), point(0.5, 0.5)] {
            let s = TfSystem::new(square_lattice(), p, None).unwrap();
            let full = run(&g, &s);
            assert_ne!(full.verdict, Verdict::Inconclusive);
            for j in 0..s.lattice_len() {
                let sub = s.without(j).unwrap();
                let c = run(&g, &sub);
                assert_ne!(c.verdict, Verdict::Inconclusive);
                assert!(c.gram_min_eig >= full.gram_min_eig - 1e-12);
            }
        }
    }

    #[test]
    fn conjugating_modulations_changes_nothing_observable() {
        let e = exp1();
        for p in [
            point(2f64.sqrt(), 3f64.sqrt()),
            point(0.5, 0.25),
            point(2f64.sqrt() - 1.0, 2f64.sqrt() - 1.0),
        ] {
            let s = TfSystem::new(square_lattice(), p, None).unwrap();
            let conj = s.conjugated().unwrap();
            let a = run(&e, &s);
            let b = run(&e, &conj);
            assert_eq!(a.verdict, b.verdict);
            assert!((a.gram_min_eig - b.gram_min_eig).abs() < 1e-12);
            assert!((a.ls_residual - b.ls_residual).abs() < 1e-12);
            let ga = gram_matrix(&e, &s, 26, 64).unwrap();
            let gb = gram_matrix(&e, &conj, 26, 64).unwrap();
            for i in 0..ga.dim() {
                for j in 0..ga.dim() {
                    assert!((ga.get(i, j).norm() - gb.get(i, j).norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn certificate_json_is_reproducible_and_round_trips() {
        let g = AnalyticFunction::gaussian(1);
        let s = TfSystem::new(square_lattice(), point(2f64.sqrt(), 3f64.sqrt()), None).unwrap();
        let a = serde_json::to_string(&run(&g, &s)).unwrap();
        let b = serde_json::to_string(&run(&g, &s)).unwrap();
        assert_eq!(a, b);
        let back: IndependenceCertificate = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }
}
