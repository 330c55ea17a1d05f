use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use zakhrt::error::Error;
use zakhrt::function::FunctionKind;
use zakhrt::io::{run, Command, Coord, RunConfig, RunError, SystemSpec};

/// Zak transform and HRT independence toolkit.
#[derive(Parser)]
#[command(name = "zakhrt", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zak transform on a grid: zak.csv, zak_mod.pgm, report.json
    Zak(Flags),
    /// Zero set and its lower bound: zeros.json
    Zeros(Flags),
    /// Orbit of a torus shift: orbit.csv, discrepancy.csv, classification.json
    Orbit(Flags),
    /// Independence certificate: certificate.json
    Certify(Flags),
    /// Randomised residual sweeps of the covariance identities: identities.json
    Identities(Flags),
}

/// Flags override the matching fields of `--config`.
#[derive(Args, Default)]
struct Flags {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// gaussian, two_sided_exponential (exp) or box_indicator (box)
    #[arg(long = "fn", value_parser = parse_kind)]
    function: Option<FunctionKind>,
    /// decay rate of the two-sided exponential
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// dimension
    #[arg(long)]
    n: Option<usize>,
    /// grid resolution per axis, a power of two
    #[arg(long = "M")]
    resolution: Option<usize>,
    /// truncation window
    #[arg(long = "T", allow_negative_numbers = true)]
    window: Option<i64>,
    /// seed for randomised sweeps
    #[arg(long)]
    seed: Option<u64>,
    /// torus shift, comma separated; `p/q` entries are exact
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// orbit start point, comma separated
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    /// lattice points `l..,m..` separated by `;`
    #[arg(long, allow_hyphen_values = true)]
    lattice: Option<String>,
    /// distinguished point `x..,y..`
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// denominator cap for rational detection
    #[arg(long = "Q")]
    denominator_cap: Option<u64>,
    /// height cap for the integer relation search
    #[arg(long = "H")]
    height_cap: Option<u64>,
    #[arg(long)]
    search_budget: Option<u64>,
    #[arg(long)]
    m_max: Option<u64>,
    /// zero acceptance threshold
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eig_threshold: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    residual_threshold: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    exclusion_radius: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    target_radius: Option<f64>,
    #[arg(long)]
    orbit_points: Option<usize>,
    #[arg(long)]
    discrepancy_points: Option<usize>,
    #[arg(long)]
    boxes: Option<usize>,
    /// number of random draws per identity
    #[arg(long)]
    draws: Option<usize>,
}

fn parse_kind(s: &str) -> Result<FunctionKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown function {s:?}"))
}

fn coords(s: &str) -> Result<Vec<Coord>, Error> {
    s.split(',').map(Coord::parse).collect()
}

fn lattice(s: &str) -> Result<Vec<Vec<i64>>, Error> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("not an integer: {v:?}")))
                })
                .collect()
        })
        .collect()
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, RunError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(k) = self.function {
            cfg.function.kind = k;
        }
        if let Some(a) = self.a {
            cfg.function.a = a;
        }
        if let Some(n) = self.n {
            cfg.function.n = n;
        }
        cfg.resolution = self.resolution.or(cfg.resolution);
        cfg.window = self.window.or(cfg.window);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if let Some(g) = &self.gamma {
            cfg.gamma = Some(coords(g)?);
        }
        if let Some(s) = &self.start {
            cfg.start = Some(coords(s)?);
        }
        if self.lattice.is_some() || self.point.is_some() {
            let base = cfg.system.take();
            let lattice = match &self.lattice {
                Some(l) => lattice(l)?,
                None => base.as_ref().map(|b| b.lattice.clone()).unwrap_or_default(),
            };
            let point = match &self.point {
                Some(p) => coords(p)?,
                None => base.map(|b| b.point).unwrap_or_default(),
            };
            cfg.system = Some(SystemSpec { lattice, point });
        }
        cfg.denominator_cap = self.denominator_cap.or(cfg.denominator_cap);
        cfg.height_cap = self.height_cap.or(cfg.height_cap);
        cfg.search_budget = self.search_budget.or(cfg.search_budget);
        cfg.m_max = self.m_max.or(cfg.m_max);
        cfg.threshold = self.threshold.or(cfg.threshold);
        cfg.eig_threshold = self.eig_threshold.or(cfg.eig_threshold);
        cfg.residual_threshold = self.residual_threshold.or(cfg.residual_threshold);
        cfg.exclusion_radius = self.exclusion_radius.or(cfg.exclusion_radius);
        cfg.target_radius = self.target_radius.or(cfg.target_radius);
        cfg.orbit_points = self.orbit_points.or(cfg.orbit_points);
        cfg.discrepancy_points = self.discrepancy_points.or(cfg.discrepancy_points);
        cfg.boxes = self.boxes.or(cfg.boxes);
        cfg.draws = self.draws.or(cfg.draws);
        cfg.out = self.out.or(cfg.out);
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("ZAKHRT_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => {
                zakhrt::par::init_global(t);
            }
            _ => {
                eprintln!("error: ZAKHRT_THREADS must be a positive integer (got {v:?})");
                return ExitCode::from(2);
            }
        }
    }
    let (command, flags) = match cli.command {
        Cmd::Zak(f) => (Command::Zak, f),
        Cmd::Zeros(f) => (Command::Zeros, f),
        Cmd::Orbit(f) => (Command::Orbit, f),
        Cmd::Certify(f) => (Command::Certify, f),
        Cmd::Identities(f) => (Command::Identities, f),
    };
    match flags.into_config().and_then(|cfg| run(command, &cfg)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
