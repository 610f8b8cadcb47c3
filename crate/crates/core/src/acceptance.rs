//! The eight acceptance criteria, runnable from tests and from `gma selftest`.
//!
//! Every check prints one line. Tolerances are fixed; the fast mode only
//! shrinks problem sizes and replicate counts.

use crate::betascan::{beta_map, brute_force_width_refined, filament_statistic, jones_functional, strip_width, PointCloud};
use crate::curvelet::{edge_image, Curvelet, EdgeKind};
use crate::dirframe::{windowed_heaviside, DirFrame, DwProbe};
use crate::error::Result;
use crate::estimate::{risk_curve, Denoiser};
use crate::fit::RateFit;
use crate::frame::{Transform, TransformKind};
use crate::grid::{derive_seed, seeded_gaussian, Image};
use crate::ridgelet::Ridgelet;
use crate::wavelet::{
    besov_ball_sample, compress_to_tolerance, czo_matrix, nterm, nterm_error_curve, rearrangement, BesovParams, Filter, Kernel, TruncatedOperator,
    Wavelet2d,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::Instant;

pub const FAST_ENV: &str = "GMA_SELFTEST_FAST";

/// True when `GMA_SELFTEST_FAST=1`.
pub fn fast_from_env() -> bool {
    std::env::var(FAST_ENV).map(|v| v == "1").unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AC{} {} {}: {} [{:.1}s]", self.id, if self.pass { "PASS" } else { "FAIL" }, self.title, self.detail, self.seconds)
    }
}

pub const TITLES: [&str; 8] = [
    "exactness suite",
    "N-term rate separation",
    "Heaviside microlocal laws",
    "denoising ordering and rates",
    "operator sparsity",
    "beta-number suite",
    "ridgelet sparsity",
    "compression scaling",
];

/// Runs criterion `id` (1 to 8).
pub fn run(id: u8, fast: bool) -> Result<Verdict> {
    let t = Instant::now();
    let (pass, detail) = match id {
        1 => exactness(fast)?,
        2 => nterm_rates(fast)?,
        3 => microlocal(fast)?,
        4 => denoising(fast)?,
        5 => sparsity(fast)?,
        6 => betas(fast)?,
        7 => ridgelet_sparsity(fast)?,
        8 => compression(fast)?,
        _ => return Err(crate::Error::param(format!("no criterion {id}"))),
    };
    Ok(Verdict { id, title: TITLES[id as usize - 1], pass, detail, seconds: t.elapsed().as_secs_f64() })
}

/// All criteria in order; a criterion that errors is reported as a failure.
pub fn run_all(fast: bool) -> Vec<Verdict> {
    (1..=8)
        .map(|id| {
            run(id, fast).unwrap_or_else(|e| Verdict { id, title: TITLES[id as usize - 1], pass: false, detail: format!("error: {e}"), seconds: 0.0 })
        })
        .collect()
}

fn rel_roundtrip(t: &dyn Transform, img: &Image) -> Result<(f64, f64)> {
    let c = t.analyze(img)?;
    let back = t.synthesize(&c)?;
    let e = img.norm_sq();
    Ok((back.sub(img).norm() / e.sqrt(), (c.energy() - e).abs() / e))
}

fn exactness(fast: bool) -> Result<(bool, String)> {
    let n = if fast { 64 } else { 256 };
    let images = if fast { 4 } else { 20 };
    let mut w_worst = 0.0f64;
    for (i, f) in Filter::ALL.iter().enumerate() {
        let t = Wavelet2d::new(n, *f, 2)?;
        let (rt, pv) = rel_roundtrip(&t, &seeded_gaussian(n, 1.0, 100 + i as u64)?)?;
        w_worst = w_worst.max(rt).max(pv);
    }
    let cv = Curvelet::with_defaults(n)?;
    let df = DirFrame::with_defaults(n)?;
    let (mut c_rt, mut c_pv, mut d_rt, mut d_pv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..images {
        let img = seeded_gaussian(n, 1.0, 200 + i as u64)?;
        let (a, b) = rel_roundtrip(&cv, &img)?;
        c_rt = c_rt.max(a);
        c_pv = c_pv.max(b);
        let (a, b) = rel_roundtrip(&df, &img)?;
        d_rt = d_rt.max(a);
        d_pv = d_pv.max(b);
    }
    let pass = w_worst <= 1e-10 && c_rt <= 1e-6 && c_pv <= 1e-4 && d_rt <= 1e-8 && d_pv <= 1e-8;
    Ok((
        pass,
        format!(
            "{n}^2: wavelet worst {w_worst:.1e} (<=1e-10); curvelet roundtrip {c_rt:.1e} (<=1e-6) parseval {c_pv:.1e} (<=1e-4); \
             dirframe roundtrip {d_rt:.1e} (<=1e-8) parseval {d_pv:.1e} (<=1e-8) over {images} images"
        ),
    ))
}

/// `k` values, `points` log-spaced in `[lo, hi]`.
pub fn log_ks(lo: f64, hi: f64, points: usize) -> Vec<usize> {
    (0..points).map(|i| (lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).round() as usize).collect()
}

/// Slope of `log |a|_(k)` against `log k` on 41 log-spaced ranks.
pub fn rearrangement_slope(values: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let r = rearrangement(values);
    let ks = log_ks(lo, hi, 41);
    let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let y: Vec<f64> = ks.iter().map(|&k| r[k - 1]).collect();
    Ok(RateFit::loglog(&x, &y)?.slope)
}

fn frame_nterm_error(t: &dyn Transform, img: &Image, values: &crate::frame::CoeffSet, k: usize) -> Result<f64> {
    let kept = nterm(&values.values, k).kept;
    Ok(t.synthesize(&values.with_values(kept))?.sub(img).norm_sq())
}

fn nterm_rates(fast: bool) -> Result<(bool, String)> {
    let n = if fast { 256 } else { 512 };
    let img = edge_image(EdgeKind::Disk, n)?;
    let w = Wavelet2d::new(n, Filter::D8, 3)?;
    let wc = w.analyze(&img)?;
    let cv = Curvelet::with_defaults(n)?;
    let cc = cv.analyze(&img)?;
    let ws = rearrangement_slope(&wc.values, 1e2, 1e4)?;
    let cs = rearrangement_slope(&cc.values, 1e2, 1e4)?;
    let ns = [256, 1024, 4096];
    let we = nterm_error_curve(&wc.values, &ns);
    let ce: Vec<f64> = ns.iter().map(|&k| frame_nterm_error(&cv, &img, &cc, k)).collect::<Result<_>>()?;
    let order = ce.iter().zip(&we).all(|(c, w)| c < w);
    let pass = (ws + 1.0).abs() <= 0.15 && cs <= -1.35 && order;
    let n2 = (n * n) as f64;
    Ok((
        pass,
        format!(
            "disk {n}^2, k in [1e2,1e4]: wavelet slope {ws:.3} (-1 +- 0.15), curvelet slope {cs:.3} (<= -1.35); \
             N-term error curvelet/wavelet at {ns:?}: {:?}",
            ce.iter().zip(&we).map(|(c, w)| format!("{:.2e}/{:.2e}", c / n2, w / n2)).collect::<Vec<_>>()
        ),
    ))
}

fn microlocal(fast: bool) -> Result<(bool, String)> {
    let n = if fast { 256 } else { 512 };
    let (img, b) = windowed_heaviside(n, 0.25)?;
    let p = DwProbe::new(&img);
    let scales: Vec<f64> = if fast { (4..7).map(|j| (-(j as f64)).exp2()).collect() } else { (4..8).map(|j| (-(j as f64)).exp2()).collect() };
    let dw: Vec<f64> = scales.iter().map(|&a| p.dw(a, b, 0.0).map(|z| z.norm())).collect::<Result<_>>()?;
    let ints: Vec<f64> = scales.iter().map(|&a| p.profile(a, b, None).map(|m| m.integral)).collect::<Result<_>>()?;
    let s1 = RateFit::loglog(&scales, &dw)?.slope;
    let s2 = RateFit::loglog(&scales, &ints)?.slope;
    let af = *scales.last().unwrap();
    let off = p.profile(af, (b.0 - 0.1, b.1), None)?.integral;
    let ratio = off / ints.last().unwrap();
    let pass = (s1 - 0.75).abs() <= 0.1 && (s2 - 1.25).abs() <= 0.15 && ratio <= 1e-3;
    Ok((
        pass,
        format!("{n}^2, a = {scales:?}: dw slope {s1:.3} (0.75 +- 0.1), angular-integral slope {s2:.3} (1.25 +- 0.15), off/on {ratio:.1e} (<= 1e-3)"),
    ))
}

fn denoising(fast: bool) -> Result<(bool, String)> {
    let n = if fast { 128 } else { 256 };
    let reps = if fast { 8 } else { 32 };
    let f = edge_image(EdgeKind::Disk, n)?;
    let eps: Vec<f64> = (4..9).map(|k| (-(k as f64)).exp2()).collect();
    let w = risk_curve(&f, &Denoiser::new(TransformKind::Wavelet, n, 0)?, &eps, reps, 1)?;
    let c = risk_curve(&f, &Denoiser::new(TransformKind::Curvelet, n, 0)?, &eps, reps, 1)?;
    let (we, ce) = (w.exponent().unwrap_or(f64::NAN), c.exponent().unwrap_or(f64::NAN));
    let order = w.points.iter().zip(&c.points).all(|(a, b)| a.mse - b.mse > 2.0 * a.se.hypot(b.se));
    let pass = order && (we - 0.5).abs() <= 0.15 && ce >= 0.58;
    Ok((
        pass,
        format!(
            "disk {n}^2, {reps} replicates: curvelet below wavelet by > 2 SE at every eps: {order}; wavelet exponent {we:.3} (0.5 +- 0.15), \
             curvelet exponent {ce:.3} (>= 0.58); mse wavelet/curvelet {:?}",
            w.points.iter().zip(&c.points).map(|(a, b)| format!("{:.2e}/{:.2e}", a.mse, b.mse)).collect::<Vec<_>>()
        ),
    ))
}

fn sparsity(fast: bool) -> Result<(bool, String)> {
    let sizes: &[usize] = if fast { &[64, 128, 256] } else { &[128, 256, 512] };
    let eps = [1e-2, 1e-4, 1e-6];
    let x: Vec<f64> = eps.iter().map(|e: &f64| e.recip().ln()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut px, mut py) = (Vec::new(), Vec::new());
    for &n in sizes {
        let m = czo_matrix(n, Kernel::Hilbert, Filter::D8, 3)?;
        let v = crate::grid::gaussian_vec(n, 1.0, n as u64);
        let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let exact = m.apply(&v);
        let mut y = Vec::new();
        for &e in &eps {
            let t = TruncatedOperator::new(&m, e)?;
            let err = exact.iter().zip(t.apply(&v)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            pass &= err <= e * vn;
            y.push(t.nnz() as f64 / n as f64);
        }
        let r2 = RateFit::linear(&x, &y)?.r2;
        pass &= r2 >= 0.9;
        parts.push(format!("n={n} nnz/n {:?} r2 {r2:.3}", y.iter().map(|v| format!("{v:.1}")).collect::<Vec<_>>()));
        px.extend_from_slice(&x);
        py.extend(y);
    }
    let pooled = RateFit::linear(&px, &py)?.r2;
    Ok((pass, format!("{}; apply error <= eps |x| at every run; pooled r2 over sizes {pooled:.3}", parts.join("; "))))
}

fn betas(fast: bool) -> Result<(bool, String)> {
    let sets = if fast { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..sets {
        let k = rng.gen_range(3..=30);
        let pts: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        worst = worst.max((strip_width(&pts) - brute_force_width_refined(&pts, 20_000)).abs());
    }
    let line = PointCloud::new((0..100).map(|i| (i as f64 / 99.0, 0.25 + 0.5 * i as f64 / 99.0)).collect())?;
    let collinear = jones_functional(&beta_map(&line, 6)?);
    let circle = PointCloud::circle(200, (0.5, 0.5), 0.25, 0.1)?;
    let (a, b) = (jones_functional(&beta_map(&circle, 6)?), jones_functional(&beta_map(&circle, 8)?));
    let change = (b - a).abs() / a;
    let inc = beta_map(&PointCloud::uniform(500, 21), 4)?.level_sums();
    let ratios: Vec<f64> = (1..4).map(|j| inc[j + 1] / inc[j]).collect();
    let jf = 5;
    let jittered = PointCloud::segment(200, (0.1, 0.2), (0.9, 0.7), 0.01, 1)?;
    let s_line = filament_statistic(&jittered, jf, 7)?;
    let s_circ = filament_statistic(&circle, jf, 7)?;
    let s_uni = filament_statistic(&PointCloud::uniform(200, 999), jf, 7)?;
    let pass = worst <= 1e-6
        && collinear == 0.0
        && change <= 0.05
        && ratios.iter().all(|r| *r >= 1.5)
        && s_line <= 0.5
        && s_circ <= 0.5
        && (s_uni - 1.0).abs() <= 0.25;
    Ok((
        pass,
        format!(
            "width vs oracle worst {worst:.1e} over {sets} sets (<= 1e-6); collinear functional {collinear}; circle change 6->8 {:.2}% (<= 5%); \
             uniform increment ratios {:?} (>= 1.5); filament line {s_line:.3} circle {s_circ:.3} (<= 0.5) uniform {s_uni:.3} (1 +- 0.25)",
            100.0 * change,
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    ))
}

/// `1{x1 > 1/2} exp(-|x - c|^2)` on centred grid points.
pub fn windowed_half_plane(n: usize) -> Result<Image> {
    edge_image(EdgeKind::HalfPlane, n)
}

fn ridgelet_sparsity(fast: bool) -> Result<(bool, String)> {
    let n = if fast { 128 } else { 256 };
    let img = windowed_half_plane(n)?;
    let r = Ridgelet::new(n, Filter::D8, 3)?;
    let c = r.analyze(&img)?;
    let sorted = rearrangement(&c.values);
    let top = (c.len() as f64 * 0.001).ceil() as usize;
    let frac = sorted[..top].iter().map(|v| v * v).sum::<f64>() / c.energy();
    let ks = [64, 256, 1024];
    let re: Vec<f64> = ks.iter().map(|&k| frame_nterm_error(&r, &img, &c, k)).collect::<Result<_>>()?;
    let we = nterm_error_curve(&Wavelet2d::new(n, Filter::D8, 3)?.analyze(&img)?.values, &ks);
    let order = re.iter().zip(&we).all(|(a, b)| a < b);
    Ok((
        frac >= 0.99 && order,
        format!(
            "half plane {n}^2: top 0.1% ({top} of {}) carry {:.4} of the energy (>= 0.99); N-term error ridgelet/wavelet at {ks:?}: {:?}",
            c.len(),
            frac,
            re.iter().zip(&we).map(|(a, b)| format!("{a:.2e}/{b:.2e}")).collect::<Vec<_>>()
        ),
    ))
}

fn compression(fast: bool) -> Result<(bool, String)> {
    let len = if fast { 1 << 12 } else { 1 << 14 };
    let p = BesovParams::new(1.0, 1.0, f64::INFINITY)?;
    let c = besov_ball_sample(Filter::D8, len, 3, p, derive_seed(8, 0))?.flatten();
    let eps: Vec<f64> = (3..9).map(|k| (-(k as f64)).exp2()).collect();
    let runs: Vec<_> = eps.iter().map(|&e| compress_to_tolerance(&c, e)).collect::<Result<_>>()?;
    let bits: Vec<f64> = runs.iter().map(|r| r.bits() as f64).collect();
    let bound: Vec<f64> = eps.iter().map(|&e| e.recip().ln() * e.powf(-1.0 / p.sigma)).collect();
    let inv: Vec<f64> = eps.iter().map(|e| e.recip()).collect();
    let measured = RateFit::loglog(&inv, &bits)?.slope;
    let predicted = RateFit::loglog(&inv, &bound)?.slope;
    let rel = measured / predicted;
    let tol_ok = runs.iter().zip(&eps).all(|(r, e)| r.error <= *e);
    Ok((
        (rel - 1.0).abs() <= 0.2 && tol_ok,
        format!(
            "b^1_(1,inf) sample, {len} coefficients, eps 2^-3..2^-8: bits {:?}; slope in 1/eps measured {measured:.3} vs bound {predicted:.3}, ratio {rel:.3} (1 +- 0.2); errors within eps: {tol_ok}",
            bits.iter().map(|b| *b as u64).collect::<Vec<_>>()
        ),
    ))
}
