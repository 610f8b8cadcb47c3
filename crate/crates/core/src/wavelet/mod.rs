//! Periodized orthonormal wavelet transforms, sequence norms, nonlinear
//! approximation, quantized coding and operator matrices.

mod approx;
mod coder;
mod czo;
mod filter;
mod norms;

pub use approx::{nterm, nterm_error_curve, rearrangement, threshold_hard, threshold_soft, NTerm};
pub use coder::{compress_to_tolerance, decode, encode, BitReader, BitWriter, Compressed, Encoded};
pub use czo::{band_truncate_apply, czo_matrix, Kernel, OperatorMatrix, TruncatedOperator};
pub use filter::Filter;
pub use norms::{besov_ball_sample, besov_seqnorm, triebel_seqnorm, BesovParams};

use crate::error::{Error, Result};
use crate::frame::{CoeffSet, LayoutBuilder, Transform};
use crate::grid::{check_side, Image};

/// One-dimensional coefficients: a coarse block of `2^j_coarse` scaling
/// coefficients followed by detail levels ordered coarse to fine.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoeffs1d {
    pub filter: Filter,
    pub j_coarse: usize,
    pub coarse: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl WaveletCoeffs1d {
    pub fn len(&self) -> usize {
        self.coarse.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Level index of `details[i]`.
    pub fn level(&self, i: usize) -> usize {
        self.j_coarse + i
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.coarse.clone();
        for d in &self.details {
            v.extend_from_slice(d);
        }
        v
    }

    pub fn from_flat(filter: Filter, j_coarse: usize, flat: &[f64]) -> Result<Self> {
        let n = flat.len();
        check_side(n)?;
        let big_j = n.trailing_zeros() as usize;
        if j_coarse > big_j {
            return Err(Error::size("coarse level exceeds signal length"));
        }
        let c = 1 << j_coarse;
        let coarse = flat[..c].to_vec();
        let mut details = Vec::new();
        let mut at = c;
        for j in j_coarse..big_j {
            details.push(flat[at..at + (1 << j)].to_vec());
            at += 1 << j;
        }
        Ok(WaveletCoeffs1d { filter, j_coarse, coarse, details })
    }
}

fn check_levels(n: usize, filter: Filter, j_coarse: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::size(format!("length {n} is not a power of two")));
    }
    let big_j = n.trailing_zeros() as usize;
    if j_coarse > big_j {
        return Err(Error::size(format!("coarse level {j_coarse} exceeds log2 length {big_j}")));
    }
    if j_coarse < big_j && filter.len() > (2usize << j_coarse) {
        return Err(Error::size(format!(
            "filter {filter} of length {} longer than the level-{} signal",
            filter.len(),
            j_coarse + 1
        )));
    }
    Ok(big_j)
}

/// One analysis step on a periodic signal of even length.
pub(crate) fn analysis_step(x: &[f64], h: &[f64], g: &[f64], approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (m, (&hm, &gm)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * k + m) % n];
            a += hm * v;
            d += gm * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Transpose of `analysis_step`.
pub(crate) fn synthesis_step(approx: &[f64], detail: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let half = approx.len();
    let n = 2 * half;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let (a, d) = (approx[k], detail[k]);
        for (m, (&hm, &gm)) in h.iter().zip(g).enumerate() {
            out[(2 * k + m) % n] += hm * a + gm * d;
        }
    }
}

/// Orthonormal periodized DWT down to a coarse block of `2^j_coarse` samples.
pub fn dwt_1d(x: &[f64], filter: Filter, j_coarse: usize) -> Result<WaveletCoeffs1d> {
    let big_j = check_levels(x.len(), filter, j_coarse)?;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut cur = x.to_vec();
    let mut details = Vec::with_capacity(big_j - j_coarse);
    for _ in j_coarse..big_j {
        let half = cur.len() / 2;
        let mut a = vec![0.0; half];
        let mut d = vec![0.0; half];
        analysis_step(&cur, &h, &g, &mut a, &mut d);
        details.push(d);
        cur = a;
    }
    details.reverse();
    Ok(WaveletCoeffs1d { filter, j_coarse, coarse: cur, details })
}

pub fn idwt_1d(c: &WaveletCoeffs1d) -> Result<Vec<f64>> {
    let n = c.len();
    let big_j = check_levels(n, c.filter, c.j_coarse)?;
    if c.coarse.len() != 1 << c.j_coarse || c.details.len() != big_j - c.j_coarse {
        return Err(Error::size("inconsistent coefficient layout"));
    }
    let (h, g) = (c.filter.lowpass(), c.filter.highpass());
    let mut cur = c.coarse.clone();
    for d in &c.details {
        if d.len() != cur.len() {
            return Err(Error::size("inconsistent detail level length"));
        }
        let mut out = vec![0.0; 2 * cur.len()];
        synthesis_step(&cur, d, &h, &g, &mut out);
        cur = out;
    }
    Ok(cur)
}

/// Two-dimensional separable coefficients. Level `j` holds three `2^j x 2^j`
/// bands: horizontal detail (high in `x2`), vertical (high in `x1`), diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoeffs2d {
    pub filter: Filter,
    pub n: usize,
    pub j_coarse: usize,
    pub coarse: Vec<f64>,
    pub levels: Vec<[Vec<f64>; 3]>,
}

fn rows_step(buf: &mut [f64], m: usize, stride: usize, h: &[f64], g: &[f64], inverse: bool) {
    let half = m / 2;
    let mut tmp = vec![0.0; m];
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for r in 0..m {
        let row = &mut buf[r * stride..r * stride + m];
        if inverse {
            synthesis_step(&row[..half], &row[half..], h, g, &mut tmp);
            row.copy_from_slice(&tmp);
        } else {
            tmp.copy_from_slice(row);
            analysis_step(&tmp, h, g, &mut a, &mut d);
            row[..half].copy_from_slice(&a);
            row[half..].copy_from_slice(&d);
        }
    }
}

fn cols_step(buf: &mut [f64], m: usize, stride: usize, h: &[f64], g: &[f64], inverse: bool) {
    let half = m / 2;
    let mut col = vec![0.0; m];
    let mut tmp = vec![0.0; m];
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for c in 0..m {
        for r in 0..m {
            col[r] = buf[r * stride + c];
        }
        if inverse {
            synthesis_step(&col[..half], &col[half..], h, g, &mut tmp);
        } else {
            analysis_step(&col, h, g, &mut a, &mut d);
            tmp[..half].copy_from_slice(&a);
            tmp[half..].copy_from_slice(&d);
        }
        for r in 0..m {
            buf[r * stride + c] = tmp[r];
        }
    }
}

fn extract(buf: &[f64], stride: usize, r0: usize, c0: usize, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m * m);
    for r in 0..m {
        out.extend_from_slice(&buf[(r0 + r) * stride + c0..(r0 + r) * stride + c0 + m]);
    }
    out
}

fn insert(buf: &mut [f64], stride: usize, r0: usize, c0: usize, m: usize, src: &[f64]) {
    for r in 0..m {
        buf[(r0 + r) * stride + c0..(r0 + r) * stride + c0 + m].copy_from_slice(&src[r * m..(r + 1) * m]);
    }
}

pub fn dwt_2d(img: &Image, filter: Filter, j_coarse: usize) -> Result<WaveletCoeffs2d> {
    let n = img.n();
    let big_j = check_levels(n, filter, j_coarse)?;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut buf = img.data().to_vec();
    let mut m = n;
    let mut levels = Vec::new();
    while m > 1 << j_coarse {
        rows_step(&mut buf, m, n, &h, &g, false);
        cols_step(&mut buf, m, n, &h, &g, false);
        let half = m / 2;
        levels.push([
            extract(&buf, n, 0, half, half),
            extract(&buf, n, half, 0, half),
            extract(&buf, n, half, half, half),
        ]);
        m = half;
    }
    levels.reverse();
    debug_assert_eq!(levels.len(), big_j - j_coarse);
    Ok(WaveletCoeffs2d { filter, n, j_coarse, coarse: extract(&buf, n, 0, 0, m), levels })
}

pub fn idwt_2d(c: &WaveletCoeffs2d) -> Result<Image> {
    let n = c.n;
    let big_j = check_levels(n, c.filter, c.j_coarse)?;
    if c.levels.len() != big_j - c.j_coarse || c.coarse.len() != 1 << (2 * c.j_coarse) {
        return Err(Error::size("inconsistent 2-D coefficient layout"));
    }
    let (h, g) = (c.filter.lowpass(), c.filter.highpass());
    let mut buf = vec![0.0; n * n];
    let mut m = 1 << c.j_coarse;
    insert(&mut buf, n, 0, 0, m, &c.coarse);
    for lvl in &c.levels {
        if lvl.iter().any(|b| b.len() != m * m) {
            return Err(Error::size("inconsistent 2-D band size"));
        }
        insert(&mut buf, n, 0, m, m, &lvl[0]);
        insert(&mut buf, n, m, 0, m, &lvl[1]);
        insert(&mut buf, n, m, m, m, &lvl[2]);
        let full = 2 * m;
        cols_step(&mut buf, full, n, &h, &g, true);
        rows_step(&mut buf, full, n, &h, &g, true);
        m = full;
    }
    Image::from_vec(n, buf)
}

impl WaveletCoeffs2d {
    pub fn to_coeff_set(&self) -> CoeffSet {
        let mut b = LayoutBuilder::default();
        b.push(&self.coarse, None, 0, "coarse");
        for (i, lvl) in self.levels.iter().enumerate() {
            let j = self.j_coarse + i;
            for (o, band) in lvl.iter().enumerate() {
                b.push(band, Some(j), 1 + 3 * i + o, format!("level{j}/{}", ["h", "v", "d"][o]));
            }
        }
        b.finish(self.n)
    }

    pub fn from_coeff_set(filter: Filter, j_coarse: usize, c: &CoeffSet) -> Result<Self> {
        let n = c.n;
        let big_j = check_levels(n, filter, j_coarse)?;
        if c.values.len() != n * n {
            return Err(Error::size("coefficient count does not match side"));
        }
        let v = &c.values;
        let mut at = 1 << (2 * j_coarse);
        let coarse = v[..at].to_vec();
        let mut levels = Vec::new();
        for j in j_coarse..big_j {
            let s = 1 << (2 * j);
            levels.push([v[at..at + s].to_vec(), v[at + s..at + 2 * s].to_vec(), v[at + 2 * s..at + 3 * s].to_vec()]);
            at += 3 * s;
        }
        Ok(WaveletCoeffs2d { filter, n, j_coarse, coarse, levels })
    }
}

/// 2-D orthonormal wavelet basis as a `Transform`.
#[derive(Clone, Debug)]
pub struct Wavelet2d {
    pub n: usize,
    pub filter: Filter,
    pub j_coarse: usize,
}

impl Wavelet2d {
    pub fn new(n: usize, filter: Filter, j_coarse: usize) -> Result<Self> {
        check_levels(n, filter, j_coarse)?;
        Ok(Wavelet2d { n, filter, j_coarse })
    }
}

impl Transform for Wavelet2d {
    fn name(&self) -> &'static str {
        "wavelet"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn analyze(&self, img: &Image) -> Result<CoeffSet> {
        if img.n() != self.n {
            return Err(Error::size("image side does not match transform"));
        }
        Ok(dwt_2d(img, self.filter, self.j_coarse)?.to_coeff_set())
    }

    fn synthesize(&self, coeffs: &CoeffSet) -> Result<Image> {
        idwt_2d(&WaveletCoeffs2d::from_coeff_set(self.filter, self.j_coarse, coeffs)?)
    }
}
