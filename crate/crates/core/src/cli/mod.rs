//! Command implementations behind the `gma` binary. Each command is a pure
//! function of its input files and [`RunConfig`].

pub mod io;

use crate::acceptance;
use crate::betascan::{beta_map, filament_statistic, jones_functional, MIN_POINTS};
use crate::curvelet::{edge_image, EdgeKind};
use crate::error::{Error, Result};
use crate::estimate::{risk_curve, Denoiser};
use crate::fit::RateFit;
use crate::frame::{CoeffSet, TransformKind};
use crate::grid::Image;
use crate::wavelet::{compress_to_tolerance, decode, nterm, nterm_error_curve};
use io::{csv_report, encode_code, encode_image_for, read_input, sha256_hex, write_atomic, CoeffFile};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Transform,
    Synthesize,
    Approx,
    Denoise,
    Riskcurve,
    Compress,
    Betascan,
    Selftest,
}

/// Prefix naming a built-in test image instead of a file, e.g. `synthetic:disk`.
pub const SYNTHETIC: &str = "synthetic:";

/// Everything a command depends on besides its input bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<String>,
    pub transform: TransformKind,
    /// Side of synthetic inputs.
    pub n: usize,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub jmax: u32,
    pub replicates: usize,
    /// Term counts for `approx`; empty means powers of two.
    pub terms: Vec<usize>,
    pub out: Option<PathBuf>,
    /// Worker cap; results do not depend on it, so it is not hashed.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            transform: TransformKind::Wavelet,
            n: 256,
            seed: 0,
            eps: Vec::new(),
            jmax: 6,
            replicates: 32,
            terms: Vec::new(),
            out: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.command != Command::Selftest && self.input.is_none() {
            return Err(Error::Missing("no --input given".into()));
        }
        crate::grid::check_side(self.n)?;
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::param(format!("eps {e} must be positive")));
        }
        if self.command == Command::Riskcurve && self.replicates < 2 {
            return Err(Error::param("riskcurve needs at least two replicates"));
        }
        if self.threads == Some(0) {
            return Err(Error::param("--threads must be positive"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is serializable")
    }

    /// SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().to_string().as_bytes())
    }

    fn trailer(&self) -> Vec<(String, String)> {
        vec![("config".into(), self.to_json().to_string()), ("config_hash".into(), self.hash())]
    }

    fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        if self.eps.is_empty() {
            default.to_vec()
        } else {
            self.eps.clone()
        }
    }
}

/// Standard output and process exit code of a finished command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub code: i32,
}

impl Outcome {
    fn lines(lines: Vec<String>) -> Self {
        let mut s = lines.join("\n");
        s.push('\n');
        Outcome { stdout: s.into_bytes(), code: 0 }
    }
}

/// Image and checksum of its source.
pub fn load_image(spec: &str, n: usize) -> Result<(Image, String)> {
    if let Some(kind) = spec.strip_prefix(SYNTHETIC) {
        let img = edge_image(kind.parse::<EdgeKind>()?, n)?;
        let sum = sha256_hex(&io::encode_raw(&img));
        return Ok((img, sum));
    }
    let bytes = read_input(Path::new(spec))?;
    Ok((io::decode_image(&bytes)?, sha256_hex(&bytes)))
}

fn input(cfg: &RunConfig) -> &str {
    cfg.input.as_deref().unwrap_or_default()
}

/// Writes `bytes` to `--out`, or returns them for standard output.
fn emit(cfg: &RunConfig, bytes: Vec<u8>, mut lines: Vec<String>) -> Result<Outcome> {
    match &cfg.out {
        Some(p) => {
            write_atomic(p, &bytes)?;
            lines.push(format!("out={}", p.display()));
            Ok(Outcome::lines(lines))
        }
        None => {
            let mut o = bytes;
            for l in lines {
                o.extend_from_slice(format!("# {l}\n").as_bytes());
            }
            Ok(Outcome { stdout: o, code: 0 })
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::param(e))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Transform => cmd_transform(cfg),
        Command::Synthesize => cmd_synthesize(cfg),
        Command::Approx => cmd_approx(cfg),
        Command::Denoise => cmd_denoise(cfg),
        Command::Riskcurve => cmd_riskcurve(cfg),
        Command::Compress => cmd_compress(cfg),
        Command::Betascan => cmd_betascan(cfg),
        Command::Selftest => cmd_selftest(cfg),
    }
}

pub fn cmd_transform(cfg: &RunConfig) -> Result<Outcome> {
    let (img, source) = load_image(input(cfg), cfg.n)?;
    let t = cfg.transform.build(img.n())?;
    let c = t.analyze(&img)?;
    let back = t.synthesize(&c)?;
    let e = img.norm_sq();
    let parseval = if e == 0.0 { 1.0 } else { c.energy() / e };
    let rt = back.sub(&img).norm() / e.sqrt().max(f64::MIN_POSITIVE);
    let mut lines = vec![
        format!("transform={}", cfg.transform),
        format!("n={}", img.n()),
        format!("coefficients={}", c.len()),
        format!("parseval_ratio={parseval}"),
        format!("roundtrip_error={rt}"),
    ];
    if let Some(p) = &cfg.out {
        CoeffFile::new(cfg.transform, c, parseval, source, cfg.to_json()).save(p)?;
        lines.push(format!("out={}", p.display()));
    }
    lines.push(format!("config_hash={}", cfg.hash()));
    Ok(Outcome::lines(lines))
}

pub fn cmd_synthesize(cfg: &RunConfig) -> Result<Outcome> {
    let file = CoeffFile::load(Path::new(input(cfg)))?;
    let t = file.meta.transform.build(file.meta.n)?;
    let layout = t.analyze(&Image::zeros(file.meta.n)?)?;
    if layout.blocks != file.coeffs.blocks {
        return Err(Error::format("coefficient layout does not match the transform"));
    }
    let img = t.synthesize(&file.coeffs)?;
    let mut lines = vec![format!("transform={}", file.meta.transform), format!("n={}", img.n()), format!("norm={}", img.norm())];
    if let Some(p) = &cfg.out {
        write_atomic(p, &encode_image_for(p, &img))?;
        lines.push(format!("out={}", p.display()));
    }
    lines.push(format!("config_hash={}", cfg.hash()));
    Ok(Outcome::lines(lines))
}

fn default_terms(len: usize) -> Vec<usize> {
    (4..).map(|k| 1usize << k).take_while(|&k| k <= len).collect()
}

/// Squared `L^2([0,1]^2)` error of the best `k`-term reconstruction.
fn nterm_errors(kind: TransformKind, img: &Image, c: &CoeffSet, ks: &[usize]) -> Result<Vec<f64>> {
    let n2 = (img.n() * img.n()) as f64;
    if kind.is_orthonormal() {
        return Ok(nterm_error_curve(&c.values, ks).into_iter().map(|e| e / n2).collect());
    }
    let t = kind.build(img.n())?;
    ks.iter().map(|&k| Ok(t.synthesize(&c.with_values(nterm(&c.values, k).kept))?.sub(img).norm_sq() / n2)).collect()
}

pub fn cmd_approx(cfg: &RunConfig) -> Result<Outcome> {
    let (img, _) = load_image(input(cfg), cfg.n)?;
    let c = cfg.transform.build(img.n())?.analyze(&img)?;
    let ks = if cfg.terms.is_empty() { default_terms(c.len()) } else { cfg.terms.clone() };
    if let Some(k) = ks.iter().find(|&&k| k > c.len()) {
        return Err(Error::param(format!("{k} terms exceed the {} coefficients", c.len())));
    }
    let errs = nterm_errors(cfg.transform, &img, &c, &ks)?;
    let rows = ks.iter().zip(&errs).map(|(k, e)| vec![k.to_string(), e.to_string()]).collect::<Vec<_>>();
    let (x, y): (Vec<f64>, Vec<f64>) = ks.iter().zip(&errs).filter(|(_, e)| **e > 0.0).map(|(k, e)| (*k as f64, *e)).unzip();
    let mut trailer = Vec::new();
    let mut lines = vec![format!("transform={}", cfg.transform), format!("coefficients={}", c.len())];
    if let Ok(f) = RateFit::loglog(&x, &y) {
        trailer.push(("fit_slope".into(), f.slope.to_string()));
        trailer.push(("fit_r2".into(), f.r2.to_string()));
        lines.push(format!("fit_slope={}", f.slope));
    }
    trailer.extend(cfg.trailer());
    emit(cfg, csv_report(&["N", "squared_error"], &rows, &trailer)?, lines)
}

pub fn cmd_denoise(cfg: &RunConfig) -> Result<Outcome> {
    let (img, _) = load_image(input(cfg), cfg.n)?;
    let eps = *cfg.eps.first().ok_or_else(|| Error::param("denoise needs --eps"))?;
    let d = Denoiser::new(cfg.transform, img.n(), cfg.seed)?;
    let (est, mse, info) = d.denoise(&img, eps, cfg.seed)?;
    let mut lines = vec![
        format!("transform={}", cfg.transform),
        format!("eps={eps}"),
        format!("lambda={}", info.lambda),
        format!("floored={}", info.floored),
        format!("kept={}", info.kept),
        format!("mse={mse}"),
    ];
    if let Some(p) = &cfg.out {
        write_atomic(p, &encode_image_for(p, &est))?;
        lines.push(format!("out={}", p.display()));
    }
    lines.push(format!("config_hash={}", cfg.hash()));
    Ok(Outcome::lines(lines))
}

pub const DEFAULT_RISK_EPS: [f64; 5] = [0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625];

pub fn cmd_riskcurve(cfg: &RunConfig) -> Result<Outcome> {
    let (img, _) = load_image(input(cfg), cfg.n)?;
    let eps = cfg.eps_or(&DEFAULT_RISK_EPS);
    let d = Denoiser::new(cfg.transform, img.n(), cfg.seed)?;
    let r = risk_curve(&img, &d, &eps, cfg.replicates, cfg.seed)?;
    let rows = r
        .points
        .iter()
        .map(|p| vec![p.eps.to_string(), p.mse.to_string(), p.se.to_string(), p.lambda.to_string(), p.floored.to_string()])
        .collect::<Vec<_>>();
    let mut trailer = vec![("estimator".into(), r.estimator.clone()), ("replicates".into(), r.replicates.to_string())];
    let mut lines = vec![format!("estimator={}", r.estimator)];
    if let Some(x) = r.exponent() {
        trailer.push(("exponent".into(), x.to_string()));
        lines.push(format!("exponent={x}"));
    }
    trailer.extend(cfg.trailer());
    emit(cfg, csv_report(&["eps", "mse", "se", "lambda", "floored"], &rows, &trailer)?, lines)
}

pub fn cmd_compress(cfg: &RunConfig) -> Result<Outcome> {
    let (img, _) = load_image(input(cfg), cfg.n)?;
    let eps = *cfg.eps.first().ok_or_else(|| Error::param("compress needs --eps"))?;
    let n = img.n() as f64;
    let c = TransformKind::Wavelet.build(img.n())?.analyze(&img)?;
    // pixel-unit coefficients are n times the L^2 ones
    let code = compress_to_tolerance(&c.values, eps * n)?;
    let rec = decode(&code.encoded)?;
    let err = c.values.iter().zip(&rec).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / n;
    let mut lines = vec![
        format!("eps={eps}"),
        format!("bits={}", code.bits()),
        format!("retained={}", code.m),
        format!("nonzero={}", code.encoded.nonzero),
        format!("q={}", code.q / n),
        format!("error={err}"),
    ];
    if let Some(p) = &cfg.out {
        write_atomic(p, &encode_code(img.n(), &code.encoded))?;
        lines.push(format!("out={}", p.display()));
    }
    lines.push(format!("config_hash={}", cfg.hash()));
    Ok(Outcome::lines(lines))
}

pub fn cmd_betascan(cfg: &RunConfig) -> Result<Outcome> {
    let cloud = io::parse_points(&read_input(Path::new(input(cfg)))?)?;
    let map = beta_map(&cloud, cfg.jmax)?;
    let rows = map
        .entries
        .iter()
        .map(|e| vec![e.square.j.to_string(), e.square.k1.to_string(), e.square.k2.to_string(), e.count.to_string(), e.width.to_string(), e.beta.to_string()])
        .collect::<Vec<_>>();
    let jf = jones_functional(&map);
    let stat = if cloud.len() >= MIN_POINTS { filament_statistic(&cloud, cfg.jmax, cfg.seed)?.to_string() } else { "NA".to_string() };
    let mut trailer = vec![("jones_functional".into(), jf.to_string()), ("filament_statistic".into(), stat.clone())];
    trailer.extend(cfg.trailer());
    let lines = vec![format!("points={}", cloud.len()), format!("jones_functional={jf}"), format!("filament_statistic={stat}")];
    emit(cfg, csv_report(&["j", "k1", "k2", "count", "width", "beta"], &rows, &trailer)?, lines)
}

pub fn cmd_selftest(_cfg: &RunConfig) -> Result<Outcome> {
    let fast = acceptance::fast_from_env();
    let v = acceptance::run_all(fast);
    let failed = v.iter().filter(|x| !x.pass).count();
    let mut lines: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    lines.push(format!("selftest: {} passed, {failed} failed{}", v.len() - failed, if fast { " (fast sizes)" } else { "" }));
    let mut o = Outcome::lines(lines);
    o.code = if failed == 0 { 0 } else { 1 };
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(c: Command, input: &str) -> RunConfig {
        RunConfig { input: Some(input.into()), n: 32, ..RunConfig::new(c) }
    }

    #[test]
    fn hash_ignores_threads_only() {
        let a = cfg(Command::Transform, "synthetic:disk");
        let b = RunConfig { threads: Some(3), ..a.clone() };
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn validation_codes() {
        assert_eq!(run(&RunConfig::new(Command::Transform)).unwrap_err().exit_code(), 2);
        assert_eq!(run(&cfg(Command::Transform, "/no/such/file")).unwrap_err().exit_code(), 2);
        assert_eq!(run(&RunConfig { n: 48, ..cfg(Command::Transform, "synthetic:disk") }).unwrap_err().exit_code(), 4);
        assert_eq!(run(&RunConfig { eps: vec![-1.0], ..cfg(Command::Denoise, "synthetic:disk") }).unwrap_err().exit_code(), 5);
    }

    #[test]
    fn transform_reports_parseval() {
        let o = run(&RunConfig { transform: TransformKind::Dirframe, ..cfg(Command::Transform, "synthetic:disk") }).unwrap();
        let s = String::from_utf8(o.stdout).unwrap();
        let ratio: f64 = s.lines().find_map(|l| l.strip_prefix("parseval_ratio=")).unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-8, "{s}");
    }

    #[test]
    fn approx_full_count_is_exact() {
        let o = run(&RunConfig { terms: vec![1024], ..cfg(Command::Approx, "synthetic:sinecut") }).unwrap();
        let s = String::from_utf8(o.stdout).unwrap();
        let row = s.lines().nth(1).unwrap();
        let e: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(e <= 1e-24, "{s}");
        assert!(s.contains("# config_hash="));
    }
}
