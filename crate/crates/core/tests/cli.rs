use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;
use zakhrt::certify::IndependenceCertificate;
use zakhrt::io::{ClassificationRecord, IdentitiesRecord, RunConfig, ZakRecord, ZerosRecord};
use zakhrt::{zak_direct, AnalyticFunction, ZakGridSpec};

const SQRT2M1: &str = "0.41421356237309515";
const SQRT3M1: &str = "0.7320508075688772";
const LATTICE: &str = "0,0;1,0;0,1;1,1";

fn zakhrt(args: &[&str], out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zakhrt"));
    cmd.args(args).arg("--out").arg(out);
    match threads {
        Some(t) => cmd.env("ZAKHRT_THREADS", t),
        None => cmd.env_remove("ZAKHRT_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> PathBuf {
    let o = zakhrt(args, out, None);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    out.to_path_buf()
}

fn read<T: DeserializeOwned>(path: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Parse into the record type and check re-serialisation is byte-identical.
fn round_trip<T: DeserializeOwned + Serialize>(path: &Path) -> T {
    let text = fs::read_to_string(path).unwrap();
    let rec: T = serde_json::from_str(&text).unwrap();
    assert_eq!(
        serde_json::to_string_pretty(&rec).unwrap() + "\n",
        text,
        "{}",
        path.display()
    );
    rec
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn zak_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = ok(&["zak", "--fn", "gaussian", "--M", "64", "--T", "10"], tmp.path());
    let rec: ZakRecord = round_trip(&dir.join("report.json"));
    assert!(rec.unitarity_err <= 1e-6);
    assert!(rec.quasi_periodicity.omega_residual <= 1e-9 && rec.quasi_periodicity.time_residual <= 1e-9);

    let csv = fs::read_to_string(dir.join("zak.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_1,omega_1,re,im"));
    let grid = zak_direct(&AnalyticFunction::gaussian(1), &ZakGridSpec::new(1, 64, 10).unwrap());
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 64 * 64);
    for (lin, row) in rows.iter().enumerate() {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[0], (lin / 64) as f64 / 64.0);
        assert_eq!(v[1], (lin % 64) as f64 / 64.0);
        // 17 significant digits reproduce the doubles exactly
        assert_eq!((v[2], v[3]), (grid.values[lin].re, grid.values[lin].im));
    }

    let pgm = fs::read(dir.join("zak_mod.pgm")).unwrap();
    let header = b"P5\n64 64\n65535\n";
    assert_eq!(&pgm[..header.len()], header);
    assert_eq!(pgm.len(), header.len() + 2 * 64 * 64);
}

#[test]
fn box_heatmap_is_constant() {
    let tmp = TempDir::new().unwrap();
    let dir = ok(&["zak", "--fn", "box", "--M", "16", "--T", "2"], tmp.path());
    let pgm = fs::read(dir.join("zak_mod.pgm")).unwrap();
    let header = b"P5\n16 16\n65535\n";
    assert_eq!(&pgm[..header.len()], header);
    let body = &pgm[header.len()..];
    assert_eq!(body.len(), 512);
    assert!(body.chunks(2).all(|px| u16::from_be_bytes([px[0], px[1]]) == 65535));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let o = zakhrt(&["zak", "--M", "63"], tmp.path(), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution must be a power of two"));
    assert!(
        fs::read_dir(tmp.path()).unwrap().next().is_none(),
        "nothing written on config error"
    );

    assert_eq!(zakhrt(&["certify"], tmp.path(), None).status.code(), Some(2));
    assert_eq!(
        zakhrt(&["zak", "--fn", "sinc"], tmp.path(), None).status.code(),
        Some(2)
    );
    assert_eq!(
        zakhrt(&["zak", "--fn", "exp", "--a", "-1"], tmp.path(), None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zakhrt(&["orbit", "--gamma", "1/0,1"], tmp.path(), None).status.code(),
        Some(2)
    );
    assert_eq!(
        zakhrt(&["zak", "--M", "8"], tmp.path(), Some("0")).status.code(),
        Some(2)
    );

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = zakhrt(&["zak", "--M", "8"], &blocker.join("sub"), None);
    assert_eq!(o.status.code(), Some(3));
    let missing = tmp.path().join("missing.json");
    let o = zakhrt(&["zak", "--config", missing.to_str().unwrap()], tmp.path(), None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zero_sets() {
    let tmp = TempDir::new().unwrap();
    let e = ok(
        &["zeros", "--fn", "exp", "--a", "1", "--M", "128"],
        &tmp.path().join("e"),
    );
    let rec: ZerosRecord = round_trip(&e.join("zeros.json"));
    assert_eq!(rec.report.zeros.len(), 1);
    let z = &rec.report.zeros[0].location;
    assert!((z[0] - 0.5).abs() <= 1e-6 && (z[1] - 0.5).abs() <= 1e-6);
    assert!(rec.invariance.is_none());

    let g = ok(
        &["zeros", "--fn", "gaussian", "--M", "128", "--gamma", "1/2,1/2"],
        &tmp.path().join("g"),
    );
    let rec: ZerosRecord = round_trip(&g.join("zeros.json"));
    assert_eq!(rec.report.zeros.len(), 1);
    let text = fs::read_to_string(g.join("zeros.json")).unwrap();
    assert!(text.contains("\"verdict\": \"fails\""));

    let b = ok(&["zeros", "--fn", "box", "--M", "16"], &tmp.path().join("b"));
    let rec: ZerosRecord = round_trip(&b.join("zeros.json"));
    assert!(rec.report.zeros.is_empty());
}

#[test]
fn orbits() {
    let tmp = TempDir::new().unwrap();
    let d = ok(
        &["orbit", "--gamma", "1/2,1/3", "--orbit-points", "12"],
        &tmp.path().join("a"),
    );
    let text = fs::read_to_string(d.join("classification.json")).unwrap();
    assert!(text.contains("\"kind\": \"finite\"") && text.contains("\"order\": 6"));
    round_trip::<ClassificationRecord>(&d.join("classification.json"));
    let csv = fs::read_to_string(d.join("orbit.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "m,z_1,z_2");
    assert_eq!(rows.len(), 13);
    assert!(rows[7].starts_with("6,0.0000000000000000e0,0.0000000000000000e0"));

    let gamma = format!("{SQRT2M1},{SQRT2M1}");
    let d = ok(&["orbit", "--gamma", &gamma], &tmp.path().join("b"));
    let rec: ClassificationRecord = read(&d.join("classification.json"));
    assert_eq!(
        rec.class.kind,
        zakhrt::torus::OrbitKind::InfiniteNondense {
            relation: vec![0, 1, -1]
        }
    );

    let gamma = format!("{SQRT2M1},{SQRT3M1}");
    let d = ok(&["orbit", "--gamma", &gamma], &tmp.path().join("c"));
    let rec: ClassificationRecord = read(&d.join("classification.json"));
    assert!(rec.class.is_dense());
    let tail = rec.discrepancy.last().unwrap();
    assert_eq!(tail.m, 100_000);
    assert!(tail.discrepancy <= 0.01);
    let series = fs::read_to_string(d.join("discrepancy.csv")).unwrap();
    assert_eq!(series.lines().count(), rec.discrepancy.len() + 1);
}

fn certify_args(point: &str) -> Vec<String> {
    ["certify", "--lattice", LATTICE, "--point", point]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn certificates() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        (
            "gaussian",
            "1.4142135623730951,1.7320508075688772".to_string(),
            "independent_prop1",
        ),
        ("exp", format!("{SQRT2M1},{SQRT2M1}"), "independent_prop3"),
        ("exp", "1/2,1/2".to_string(), "independent_numerical"),
    ];
    for (i, (f, point, verdict)) in cases.iter().enumerate() {
        let mut args = certify_args(point);
        args.extend(["--fn".to_string(), f.to_string()]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let d = ok(&args, &tmp.path().join(i.to_string()));
        let cert: IndependenceCertificate = round_trip(&d.join("certificate.json"));
        assert_eq!(serde_json::to_value(cert.verdict).unwrap(), *verdict);
    }
}

#[test]
fn flags_and_json_config_agree() {
    let tmp = TempDir::new().unwrap();
    let runs: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["zak", "--fn", "exp", "--a", "0.5", "--M", "16", "--T", "30"],
            r#"{"function":{"kind":"two_sided_exponential","a":0.5},"M":16,"T":30}"#,
        ),
        (
            vec![
                "certify",
                "--fn",
                "exp",
                "--lattice",
                LATTICE,
                "--point",
                "1/2,1/2",
                "--H",
                "200",
            ],
            r#"{"function":{"kind":"two_sided_exponential"},"H":200,
             "system":{"lattice":[[0,0],[1,0],[0,1],[1,1]],"point":["1/2","1/2"]}}"#,
        ),
        (
            vec![
                "orbit",
                "--gamma",
                "1/2,0.3",
                "--boxes",
                "4",
                "--discrepancy-points",
                "500",
            ],
            r#"{"gamma":["1/2",0.3],"boxes":4,"discrepancy_points":500}"#,
        ),
        (
            vec!["identities", "--seed", "9", "--draws", "3", "--M", "8"],
            r#"{"seed":9,"draws":3,"M":8}"#,
        ),
    ];
    for (i, (args, json)) in runs.iter().enumerate() {
        let by_flags = ok(args, &tmp.path().join(format!("flags{i}")));
        let cfg = tmp.path().join(format!("cfg{i}.json"));
        fs::write(&cfg, json).unwrap();
        let by_json = ok(
            &[args[0], "--config", cfg.to_str().unwrap()],
            &tmp.path().join(format!("json{i}")),
        );
        assert_eq!(files(&by_flags), files(&by_json), "{args:?}");
    }
}

#[test]
fn flags_override_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"function":{"kind":"box_indicator"},"M":32,"T":2}"#).unwrap();
    let d = ok(
        &["zak", "--config", cfg.to_str().unwrap(), "--M", "8"],
        &tmp.path().join("o"),
    );
    let rec: ZakRecord = read(&d.join("report.json"));
    assert_eq!(rec.grid, ZakGridSpec::new(1, 8, 2).unwrap());
}

#[test]
fn recorded_config_replays() {
    let tmp = TempDir::new().unwrap();
    let first = ok(&["zeros", "--fn", "exp", "--M", "64"], &tmp.path().join("a"));
    let rec: ZerosRecord = read(&first.join("zeros.json"));
    let cfg = tmp.path().join("replay.json");
    fs::write(&cfg, serde_json::to_string(&rec.config).unwrap()).unwrap();
    let again = ok(&["zeros", "--config", cfg.to_str().unwrap()], &tmp.path().join("b"));
    assert_eq!(files(&first), files(&again));
    let back: RunConfig = read(&cfg);
    assert_eq!(back, rec.config);
}

#[test]
fn deterministic_across_runs_and_threads() {
    let tmp = TempDir::new().unwrap();
    let point = format!("{SQRT2M1},{SQRT2M1}");
    let gamma = format!("{SQRT2M1},{SQRT3M1}");
    let runs: Vec<Vec<&str>> = vec![
        vec!["zak", "--fn", "exp", "--M", "32"],
        vec!["zeros", "--fn", "gaussian", "--M", "64"],
        vec!["orbit", "--gamma", &gamma, "--discrepancy-points", "2000"],
        vec!["certify", "--fn", "exp", "--lattice", LATTICE, "--point", &point],
        vec!["identities", "--seed", "4", "--draws", "4"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let outs: Vec<_> = [None, None, Some("1"), Some("8")]
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let dir = tmp.path().join(format!("{i}-{k}"));
                let o = zakhrt(args, &dir, *t);
                assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
                files(&dir)
            })
            .collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn identity_sweeps() {
    let tmp = TempDir::new().unwrap();
    let a = ok(&["identities", "--seed", "1", "--draws", "5"], &tmp.path().join("a"));
    let b = ok(&["identities", "--seed", "2", "--draws", "5"], &tmp.path().join("b"));
    let ra: IdentitiesRecord = round_trip(&a.join("identities.json"));
    let rb: IdentitiesRecord = read(&b.join("identities.json"));
    assert_eq!(ra.draws, 5);
    assert!(ra.lattice_combination.max <= 1e-9 && ra.shift.max <= 1e-9);
    assert!(ra.functional_equation.min > 1e-3);
    assert_ne!(ra.functional_equation.residuals, rb.functional_equation.residuals);
}
