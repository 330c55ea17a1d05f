//! Run configuration, command drivers and file output.
//!
//! Every command reads a [`RunConfig`], computes its records through the
//! library, and writes them into an output directory. Emitted JSON embeds the
//! configuration (without the output directory) so a run can be replayed from
//! its own output.

use crate::certify::{certify, CertifyConfig, IndependenceCertificate, TfSystem};
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, FunctionSpec, TfPoint};
use crate::identities::{
    functional_equation_residual, lattice_combination_zak, random_tf_point, random_trig_poly, shifted_zak,
};
use crate::torus::{
    advance, classify_generator, orbit_discrepancy, OrbitClass, Rational, TorusVector, DEFAULT_SEARCH_BUDGET,
};
use crate::zak::{check_quasi_periodicity, check_unitarity, zak_direct, QuasiPeriodicityReport, ZakGrid, ZakGridSpec};
use crate::zeros::{
    certify_finite_zero_set, check_zero_invariance, InvarianceVerdict, ZeroSearchOptions, ZeroSetReport, DEFAULT_M_MAX,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Failure of a command run. Exit codes: 2 for configuration, 3 for I/O.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io { .. } => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A coordinate given either as a float or as an exact `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Float(f64),
    Exact(String),
}

impl Coord {
    /// Parse a command-line token: anything containing `/` is exact.
    pub fn parse(token: &str) -> Result<Self> {
        let token = token.trim();
        let c = if token.contains('/') {
            Coord::Exact(token.to_string())
        } else {
            Coord::Float(
                token
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("not a number: {token:?}")))?,
            )
        };
        c.resolve()?;
        Ok(c)
    }

    /// The float value and, for exact input, the rational.
    pub fn resolve(&self) -> Result<(f64, Option<Rational>)> {
        match self {
            Coord::Float(v) if v.is_finite() => Ok((*v, None)),
            Coord::Float(v) => Err(Error::InvalidArgument(format!("non-finite coordinate {v}"))),
            Coord::Exact(s) => {
                let r: Rational = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("not a rational: {s:?}")))?;
                Ok((*r.numer() as f64 / *r.denom() as f64, Some(r)))
            }
        }
    }
}

fn resolve_all(coords: &[Coord]) -> Result<(Vec<f64>, Vec<Option<Rational>>)> {
    let pairs = coords.iter().map(Coord::resolve).collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Lattice points `[ℓ.., m..]` plus the distinguished point `[x.., y..]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub lattice: Vec<Vec<i64>>,
    pub point: Vec<Coord>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<TfSystem> {
        if self.point.is_empty() || !self.point.len().is_multiple_of(2) {
            return Err(Error::InvalidSystem("point needs x and y coordinates".into()));
        }
        let (vals, tags) = resolve_all(&self.point)?;
        let n = vals.len() / 2;
        let p = TfPoint::new(vals[..n].to_vec(), vals[n..].to_vec())?;
        TfSystem::new(self.lattice.clone(), p, Some(tags))
    }
}

/// Parameters for any command. Unset optional fields take command defaults.
/// Command-line flags override fields read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub function: FunctionSpec,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Coord>>,
    /// orbit start point, origin by default
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<Coord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub denominator_cap: Option<u64>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub height_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    /// zero acceptance threshold
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eig_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclusion_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boxes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            function: AnalyticFunction::gaussian(1).into(),
            resolution: None,
            window: None,
            gamma: None,
            start: None,
            system: None,
            denominator_cap: None,
            height_cap: None,
            search_budget: None,
            m_max: None,
            threshold: None,
            eig_threshold: None,
            residual_threshold: None,
            exclusion_radius: None,
            target_radius: None,
            orbit_points: None,
            discrepancy_points: None,
            boxes: None,
            draws: None,
            seed: 0,
            out: None,
        }
    }
}

fn positive<T: PartialOrd + Default + std::fmt::Display + Copy>(name: &str, v: Option<T>) -> Result<()> {
    match v {
        Some(v) if v <= T::default() => Err(Error::InvalidArgument(format!("{name} must be positive (got {v})"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> std::result::Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())).into())
    }

    /// Positivity of caps and thresholds; the grid and function are checked
    /// when built.
    pub fn validate(&self) -> Result<()> {
        positive("M", self.resolution)?;
        positive("T", self.window)?;
        positive("Q", self.denominator_cap)?;
        positive("H", self.height_cap)?;
        positive("search_budget", self.search_budget)?;
        positive("m_max", self.m_max)?;
        positive("threshold", self.threshold)?;
        positive("eig_threshold", self.eig_threshold)?;
        positive("residual_threshold", self.residual_threshold)?;
        positive("exclusion_radius", self.exclusion_radius)?;
        positive("target_radius", self.target_radius)?;
        positive("orbit_points", self.orbit_points)?;
        positive("discrepancy_points", self.discrepancy_points)?;
        positive("draws", self.draws)?;
        if let Some(b) = self.boxes {
            if b < 2 {
                return Err(Error::InvalidArgument(format!("boxes must be at least 2 (got {b})")));
            }
        }
        Ok(())
    }

    /// The configuration as recorded in outputs: everything but the output
    /// directory.
    pub fn recorded(&self) -> Self {
        Self {
            out: None,
            ..self.clone()
        }
    }

    fn function(&self) -> Result<AnalyticFunction> {
        self.function.build()
    }

    fn grid(&self, f: &AnalyticFunction, default_resolution: usize) -> Result<ZakGridSpec> {
        ZakGridSpec::new(
            f.dim(),
            self.resolution.unwrap_or(default_resolution),
            self.window.unwrap_or_else(|| f.default_window()),
        )
    }

    fn gamma(&self) -> Result<TorusVector> {
        let coords = self
            .gamma
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("gamma is required".into()))?;
        let (vals, tags) = resolve_all(coords)?;
        TorusVector::new(&vals, tags)
    }

    fn zero_options(&self) -> ZeroSearchOptions {
        let d = ZeroSearchOptions::default();
        ZeroSearchOptions {
            threshold: self.threshold,
            target_radius: self.target_radius.unwrap_or(d.target_radius),
            exclusion_radius: self.exclusion_radius.unwrap_or(d.exclusion_radius),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Zak,
    Zeros,
    Orbit,
    Certify,
    Identities,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZakRecord {
    pub config: RunConfig,
    pub grid: ZakGridSpec,
    pub norm: f64,
    pub unitarity_err: f64,
    pub quasi_periodicity: QuasiPeriodicityReport,
    pub truncation_bound: f64,
    pub max_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerosRecord {
    pub config: RunConfig,
    #[serde(flatten)]
    pub report: ZeroSetReport,
    /// present when `gamma` was given
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance: Option<Vec<InvarianceVerdict>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyPoint {
    pub m: usize,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub config: RunConfig,
    /// `γ` reduced into `[0, 1)`
    pub gamma: Vec<f64>,
    #[serde(flatten)]
    pub class: OrbitClass,
    pub denominator_cap: u64,
    pub height_cap: u64,
    pub boxes: usize,
    pub discrepancy: Vec<DiscrepancyPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub residuals: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

impl Sweep {
    fn new(residuals: Vec<f64>) -> Self {
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        Self { residuals, max, min }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesRecord {
    pub config: RunConfig,
    pub grid: ZakGridSpec,
    pub draws: usize,
    /// `Z[Σ c π(ℓ,m) f] = P·Zf`
    pub lattice_combination: Sweep,
    /// `Z[π(x,y) f](t,ω) = e^{-2πi⟨t,y⟩} Zf(t−x, ω+y)`
    pub shift: Sweep,
    /// `| |P||F| − |F(·+γ)| |` for random `(P, p)`; a positive minimum means no
    /// draw is consistent with a dependence
    pub functional_equation: Sweep,
}

pub const ZAK_DEFAULT_RESOLUTION: usize = 64;
pub const ZEROS_DEFAULT_RESOLUTION: usize = 128;
pub const IDENTITIES_DEFAULT_RESOLUTION: usize = 16;
pub const DEFAULT_ORBIT_POINTS: usize = 1000;
pub const DEFAULT_DISCREPANCY_POINTS: usize = 100_000;
pub const DEFAULT_BOXES: usize = 10;
pub const DEFAULT_DRAWS: usize = 20;
const DEFAULT_ORBIT_HEIGHT: u64 = 1000;
const DEFAULT_ORBIT_HEIGHT_HIGH_DIM: u64 = 30;
const DEFAULT_DENOMINATOR_CAP: u64 = 1_000_000;

pub fn zak_record(cfg: &RunConfig) -> Result<(ZakRecord, ZakGrid)> {
    cfg.validate()?;
    let f = cfg.function()?;
    let spec = cfg.grid(&f, ZAK_DEFAULT_RESOLUTION)?;
    let grid = zak_direct(&f, &spec);
    let norm = f.norm_l2();
    let rec = ZakRecord {
        config: cfg.recorded(),
        grid: spec,
        norm,
        unitarity_err: check_unitarity(&grid, norm),
        quasi_periodicity: check_quasi_periodicity(&f, &spec),
        truncation_bound: grid.truncation_bound,
        max_modulus: grid.max_modulus(),
    };
    Ok((rec, grid))
}

pub fn zeros_record(cfg: &RunConfig) -> Result<ZerosRecord> {
    cfg.validate()?;
    let f = cfg.function()?;
    let spec = cfg.grid(&f, ZEROS_DEFAULT_RESOLUTION)?;
    let report = certify_finite_zero_set(&f, &spec, &cfg.zero_options())?;
    let invariance = match &cfg.gamma {
        Some(_) if !report.zeros.is_empty() => {
            let gamma = cfg.gamma()?;
            let tol = report.threshold;
            Some(check_zero_invariance(
                &report,
                gamma.coords(),
                &f,
                tol,
                cfg.m_max.unwrap_or(DEFAULT_M_MAX),
            )?)
        }
        _ => None,
    };
    Ok(ZerosRecord {
        config: cfg.recorded(),
        report,
        invariance,
    })
}

/// Checkpoints `100, 200, 500, 1000, …` below `count`, then `count`.
fn checkpoints(count: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 100usize;
    'outer: loop {
        for k in [1, 2, 5] {
            let m = decade * k;
            if m >= count {
                break 'outer;
            }
            out.push(m);
        }
        decade *= 10;
    }
    out.push(count);
    out
}

pub fn orbit_record(cfg: &RunConfig) -> Result<(ClassificationRecord, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let gamma = cfg.gamma()?;
    if gamma.is_empty() || !gamma.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "gamma needs an even number of coordinates".into(),
        ));
    }
    let start = match &cfg.start {
        Some(c) => {
            let (vals, tags) = resolve_all(c)?;
            TorusVector::new(&vals, tags)?
        }
        None => TorusVector::zero(gamma.len()),
    };
    if start.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: gamma.len(),
            got: start.len(),
        });
    }
    let height_cap = cfg.height_cap.unwrap_or(if gamma.len() == 2 {
        DEFAULT_ORBIT_HEIGHT
    } else {
        DEFAULT_ORBIT_HEIGHT_HIGH_DIM
    });
    let denominator_cap = cfg.denominator_cap.unwrap_or(DEFAULT_DENOMINATOR_CAP);
    let class = classify_generator(
        &gamma,
        denominator_cap,
        height_cap,
        cfg.search_budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
    )?;
    let boxes = cfg.boxes.unwrap_or(DEFAULT_BOXES);
    let discrepancy = checkpoints(cfg.discrepancy_points.unwrap_or(DEFAULT_DISCREPANCY_POINTS))
        .into_iter()
        .map(|m| {
            Ok(DiscrepancyPoint {
                m,
                discrepancy: orbit_discrepancy(&start, &gamma, m, boxes)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points = (0..cfg.orbit_points.unwrap_or(DEFAULT_ORBIT_POINTS))
        .map(|m| advance(&start, &gamma, m as u64).coords().to_vec())
        .collect();
    let rec = ClassificationRecord {
        config: cfg.recorded(),
        gamma: advance(&TorusVector::zero(gamma.len()), &gamma, 1).coords().to_vec(),
        class,
        denominator_cap,
        height_cap,
        boxes,
        discrepancy,
    };
    Ok((rec, points))
}

/// Certifier settings: defaults for the system, overridden by the run config.
pub fn certify_config(cfg: &RunConfig, f: &AnalyticFunction, sys: &TfSystem) -> Result<CertifyConfig> {
    let mut c = CertifyConfig::defaults_for(f, sys);
    c.zak = ZakGridSpec::new(
        f.dim(),
        cfg.resolution.unwrap_or(c.zak.resolution),
        cfg.window.unwrap_or(c.zak.window),
    )?;
    if let Some(t) = cfg.window {
        c.quadrature_window = c.quadrature_window.max(t);
    }
    c.denominator_cap = cfg.denominator_cap.unwrap_or(c.denominator_cap);
    c.height_cap = cfg.height_cap.unwrap_or(c.height_cap);
    c.search_budget = cfg.search_budget.unwrap_or(c.search_budget);
    c.m_max = cfg.m_max.unwrap_or(c.m_max);
    c.eig_threshold = cfg.eig_threshold.unwrap_or(c.eig_threshold);
    c.residual_threshold = cfg.residual_threshold.unwrap_or(c.residual_threshold);
    c.zero_threshold = cfg.threshold.or(c.zero_threshold);
    c.exclusion_radius = cfg.exclusion_radius.unwrap_or(c.exclusion_radius);
    c.target_radius = cfg.target_radius.unwrap_or(c.target_radius);
    Ok(c)
}

pub fn certificate(cfg: &RunConfig) -> Result<IndependenceCertificate> {
    cfg.validate()?;
    let f = cfg.function()?;
    let sys = cfg
        .system
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("system is required".into()))?
        .build()?;
    if sys.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: sys.dim(),
        });
    }
    certify(&f, &sys, &certify_config(cfg, &f, &sys)?)
}

pub fn identities_record(cfg: &RunConfig) -> Result<IdentitiesRecord> {
    cfg.validate()?;
    let f = cfg.function()?;
    let spec = cfg.grid(&f, IDENTITIES_DEFAULT_RESOLUTION)?;
    let draws = cfg.draws.unwrap_or(DEFAULT_DRAWS);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = f.dim();
    let mut combo = Vec::with_capacity(draws);
    let mut shift = Vec::with_capacity(draws);
    let mut feq = Vec::with_capacity(draws);
    for _ in 0..draws {
        let poly = random_trig_poly(&mut rng, n, 4, 5);
        combo.push(lattice_combination_zak(&f, &poly, &spec).residual);
        let p = random_tf_point(&mut rng, n, 2.0);
        shift.push(shifted_zak(&f, &p, &spec).residual);
        let poly = random_trig_poly(&mut rng, n, 4, 5);
        let p = random_tf_point(&mut rng, n, 2.0);
        feq.push(functional_equation_residual(&f, &poly, &p, &spec));
    }
    Ok(IdentitiesRecord {
        config: cfg.recorded(),
        grid: spec,
        draws,
        lattice_combination: Sweep::new(combo),
        shift: Sweep::new(shift),
        functional_equation: Sweep::new(feq),
    })
}

/// Run `command`, writing its files into `cfg.out` (default `.`). Returns the
/// paths written.
pub fn run(command: Command, cfg: &RunConfig) -> std::result::Result<Vec<PathBuf>, RunError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    // compute before touching the file system so config errors win
    let mut written = Vec::new();
    match command {
        Command::Zak => {
            let (rec, grid) = zak_record(cfg)?;
            prepare(&dir)?;
            written.push(write_grid_csv(&dir.join("zak.csv"), &grid)?);
            written.push(write_modulus_pgm(&dir.join("zak_mod.pgm"), &grid)?);
            written.push(write_json(&dir.join("report.json"), &rec)?);
        }
        Command::Zeros => {
            let rec = zeros_record(cfg)?;
            prepare(&dir)?;
            written.push(write_json(&dir.join("zeros.json"), &rec)?);
        }
        Command::Orbit => {
            let (rec, points) = orbit_record(cfg)?;
            prepare(&dir)?;
            written.push(write_orbit_csv(&dir.join("orbit.csv"), &points)?);
            written.push(write_discrepancy_csv(&dir.join("discrepancy.csv"), &rec.discrepancy)?);
            written.push(write_json(&dir.join("classification.json"), &rec)?);
        }
        Command::Certify => {
            let cert = certificate(cfg)?;
            prepare(&dir)?;
            written.push(write_json(&dir.join("certificate.json"), &cert)?);
        }
        Command::Identities => {
            let rec = identities_record(cfg)?;
            prepare(&dir)?;
            written.push(write_json(&dir.join("identities.json"), &rec)?);
        }
    }
    Ok(written)
}

fn prepare(dir: &Path) -> std::result::Result<(), RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn create(path: &Path) -> std::result::Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> std::result::Result<PathBuf, RunError> {
    w.flush().map_err(io_err(path))?;
    Ok(path.to_path_buf())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<PathBuf, RunError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| RunError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    writeln!(w).map_err(io_err(path))?;
    finish(path, w)
}

/// `t_1..t_n,omega_1..omega_n,re,im`, one row per node in grid order, floats
/// at 17 significant digits.
pub fn write_grid_csv(path: &Path, grid: &ZakGrid) -> std::result::Result<PathBuf, RunError> {
    let mut w = create(path)?;
    let n = grid.spec.n;
    let header: Vec<String> = (1..=n)
        .map(|k| format!("t_{k}"))
        .chain((1..=n).map(|k| format!("omega_{k}")))
        .chain(["re".into(), "im".into()])
        .collect();
    let e = io_err(path);
    let mut body = || -> io::Result<()> {
        writeln!(w, "{}", header.join(","))?;
        let mut z = vec![0.0; 2 * n];
        for (lin, v) in grid.values.iter().enumerate() {
            grid.spec.node(lin, &mut z);
            for c in &z {
                write!(w, "{c:.16e},")?;
            }
            writeln!(w, "{:.16e},{:.16e}", v.re, v.im)?;
        }
        Ok(())
    };
    body().map_err(e)?;
    finish(path, w)
}

/// Binary 16-bit PGM of `|Zf|`, linearly mapped from `[0, max]` to
/// `[0, 65535]`. Columns run over the `t` index, rows over `ω`.
pub fn write_modulus_pgm(path: &Path, grid: &ZakGrid) -> std::result::Result<PathBuf, RunError> {
    let mut w = create(path)?;
    w.write_all(&pgm_bytes(grid)).map_err(io_err(path))?;
    finish(path, w)
}

pub fn pgm_bytes(grid: &ZakGrid) -> Vec<u8> {
    let side = grid.spec.half_len();
    let max = grid.max_modulus();
    let mut out = format!("P5\n{side} {side}\n65535\n").into_bytes();
    out.reserve(2 * side * side);
    for row in 0..side {
        for col in 0..side {
            let v = grid.values[col * side + row].norm();
            let level = if max > 0.0 {
                (v / max * 65535.0).round().clamp(0.0, 65535.0) as u16
            } else {
                0
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

/// `m,z_1..z_{2n}` for the orbit points `z_0 + mγ`.
pub fn write_orbit_csv(path: &Path, points: &[Vec<f64>]) -> std::result::Result<PathBuf, RunError> {
    let mut w = create(path)?;
    let d = points.first().map_or(0, Vec::len);
    let e = io_err(path);
    let mut body = || -> io::Result<()> {
        let header: Vec<String> = (1..=d).map(|k| format!("z_{k}")).collect();
        writeln!(w, "m,{}", header.join(","))?;
        for (m, p) in points.iter().enumerate() {
            write!(w, "{m}")?;
            for c in p {
                write!(w, ",{c:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    };
    body().map_err(e)?;
    finish(path, w)
}

pub fn write_discrepancy_csv(path: &Path, series: &[DiscrepancyPoint]) -> std::result::Result<PathBuf, RunError> {
    let mut w = create(path)?;
    let e = io_err(path);
    let mut body = || -> io::Result<()> {
        writeln!(w, "m,discrepancy")?;
        for p in series {
            writeln!(w, "{},{:.16e}", p.m, p.discrepancy)?;
        }
        Ok(())
    };
    body().map_err(e)?;
    finish(path, w)
}
