use gma::cli::io::{encode_pgm, encode_raw};
use gma::curvelet::{edge_image, EdgeKind};
use std::path::Path;
use std::process::{Command, Output};

fn gma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gma")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(s: &str, key: &str) -> String {
    let p = format!("{key}=");
    s.lines().find_map(|l| l.trim_start_matches("# ").strip_prefix(p.as_str())).unwrap_or_else(|| panic!("{key} missing in {s}")).to_string()
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn curvelet_transform_of_pgm_disk() {
    let dir = tempfile::tempdir().unwrap();
    let img = write(dir.path(), "disk.pgm", &encode_pgm(&edge_image(EdgeKind::Disk, 256).unwrap()));
    let out = dir.path().join("c.bin");
    let o = gma(&["transform", &img, "--transform", "curvelet", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let ratio: f64 = value(&stdout(&o), "parseval_ratio").parse().unwrap();
    assert!((0.9999..=1.0001).contains(&ratio));
    assert!(out.exists() && dir.path().join("c.bin.json").exists());

    let back = dir.path().join("back.pgm");
    let o = gma(&["synthesize", out.to_str().unwrap(), "--out", back.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&img).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.pgm");
    let out = dir.path().join("never.bin");
    let o = gma(&["transform", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "partial output left behind");

    let junk = write(dir.path(), "junk.pgm", b"JUNKJUNKJUNK");
    assert_eq!(gma(&["transform", &junk]).status.code(), Some(3));

    let mut odd = b"P5\n255 255\n255\n".to_vec();
    odd.extend(vec![0u8; 255 * 255]);
    let odd = write(dir.path(), "odd.pgm", &odd);
    assert_eq!(gma(&["transform", &odd]).status.code(), Some(4));

    let bad = write(dir.path(), "bad.csv", b"x,y\n0.1,0.2\n0.3,abc\n");
    assert_eq!(gma(&["betascan", &bad]).status.code(), Some(5));
    let outside = write(dir.path(), "outside.csv", b"0.1,0.2\n1.5,0.2\n");
    assert_eq!(gma(&["betascan", &outside]).status.code(), Some(5));
    assert_eq!(gma(&["transform", "--no-such-flag"]).status.code(), Some(5));
}

#[test]
fn betascan_collinear_and_tiny() {
    let dir = tempfile::tempdir().unwrap();
    let line: String = (0..200).map(|i| {
        let t = 0.05 + 0.9 * i as f64 / 199.0;
        format!("{t},{}\n", 0.2 + 0.5 * t)
    }).collect();
    let line = write(dir.path(), "line.csv", line.as_bytes());
    let o = gma(&["betascan", &line, "--jmax", "5"]);
    assert!(o.status.success(), "{o:?}");
    let s = stdout(&o);
    assert_eq!(value(&s, "jones_functional").parse::<f64>().unwrap(), 0.0);
    assert!(value(&s, "filament_statistic").parse::<f64>().unwrap() <= 0.3);

    let tiny = write(dir.path(), "tiny.csv", b"x,y\n0.1,0.1\n0.5,0.7\n0.9,0.2\n");
    let s = stdout(&gma(&["betascan", &tiny, "--jmax", "3"]));
    assert_eq!(value(&s, "filament_statistic"), "NA");
    let rows: Vec<Vec<&str>> = s.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    for r in rows {
        let (count, beta): (usize, f64) = (r[3].parse().unwrap(), r[5].parse().unwrap());
        if count <= 2 {
            assert_eq!(beta, 0.0);
        }
    }
}

#[test]
fn uniform_betascan_matches_null() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = gma::betascan::PointCloud::uniform(600, 99);
    let csv: String = cloud.points().iter().map(|p| format!("{},{}\n", p.0, p.1)).collect();
    let f = write(dir.path(), "u.csv", csv.as_bytes());
    let s = stdout(&gma(&["betascan", &f, "--jmax", "5", "--seed", "4"]));
    let stat: f64 = value(&s, "filament_statistic").parse().unwrap();
    assert!((stat - 1.0).abs() <= 0.25, "{stat}");
}

#[test]
fn outputs_are_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let img = write(dir.path(), "img.raw", &encode_raw(&edge_image(EdgeKind::SineCut, 64).unwrap()));
    let run = |t: &str| {
        let o = gma(&["riskcurve", &img, "--transform", "dirframe", "--eps", "0.1,0.05", "--replicates", "4", "--seed", "3", "--threads", t]);
        assert!(o.status.success(), "{o:?}");
        o.stdout
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
    let s = String::from_utf8(a).unwrap();
    assert!(s.starts_with("eps,mse,se,lambda,floored\n"));
    assert!(s.contains("# config_hash="));
}

#[test]
fn compress_and_approx() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("disk.gmq");
    let o = gma(&["compress", "synthetic:disk", "--n", "128", "--eps", "0.01", "--out", code.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let s = stdout(&o);
    assert!(value(&s, "error").parse::<f64>().unwrap() <= 0.01);
    assert!(value(&s, "bits").parse::<u64>().unwrap() > 0);
    assert_eq!(&std::fs::read(&code).unwrap()[..4], b"GMQ1");

    let o = gma(&["approx", "synthetic:disk", "--n", "128", "--terms", "16384"]);
    let s = stdout(&o);
    let e: f64 = s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(e <= 1e-12 * edge_image(EdgeKind::Disk, 128).unwrap().norm_sq() / (128.0 * 128.0), "{s}");
}

#[test]
fn denoise_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.pgm");
    let o = gma(&["denoise", "synthetic:disk", "--n", "64", "--eps", "0.05", "--transform", "curvelet", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(value(&stdout(&o), "mse").parse::<f64>().unwrap().is_finite());
    assert!(std::fs::read(&out).unwrap().starts_with(b"P5"));
}
