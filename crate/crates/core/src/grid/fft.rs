use super::{bin, check_side, Image};
use crate::error::Result;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plan(len: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Unitary 1-D DFT, `X_k = n^{-1/2} sum_j x_j e^{-2 pi i jk/n}`.
pub fn fft1_unitary(buf: &mut [Complex64]) {
    run_1d(buf, false);
}

pub fn ifft1_unitary(buf: &mut [Complex64]) {
    run_1d(buf, true);
}

fn run_1d(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    plan(n, inverse).process(buf);
    let s = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= s);
}

fn rows(buf: &mut [Complex64], n: usize, inverse: bool) {
    let p = plan(n, inverse);
    let chunk = (n * 16).max(n);
    buf.par_chunks_mut(chunk).for_each(|c| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); p.get_inplace_scratch_len()];
        p.process_with_scratch(c, &mut scratch);
    });
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// In-place unitary 2-D DFT of a row-major `n x n` array.
pub fn fft2_in_place(buf: &mut [Complex64], n: usize, inverse: bool) {
    rows(buf, n, inverse);
    transpose(buf, n);
    rows(buf, n, inverse);
    transpose(buf, n);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
}

/// In-place unitary 2-D DFT of a row-major `r x c` array.
pub fn fft2_rect_in_place(buf: &mut [Complex64], r: usize, c: usize, inverse: bool) {
    assert_eq!(buf.len(), r * c);
    let pc = plan(c, inverse);
    let pr = plan(r, inverse);
    buf.chunks_mut(c).for_each(|row| pc.process(row));
    let mut t = vec![Complex64::new(0.0, 0.0); r * c];
    for i in 0..r {
        for j in 0..c {
            t[j * r + i] = buf[i * c + j];
        }
    }
    t.chunks_mut(r).for_each(|col| pr.process(col));
    let s = 1.0 / ((r * c) as f64).sqrt();
    for i in 0..r {
        for j in 0..c {
            buf[i * c + j] = t[j * r + i] * s;
        }
    }
}

/// Spectrum of an `n x n` real image; bins are stored in FFT order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Result<Self> {
        check_side(n)?;
        Ok(Spectrum { n, data: vec![Complex64::new(0.0, 0.0); n * n] })
    }

    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Result<Self> {
        check_side(n)?;
        if data.len() != n * n {
            return Err(crate::Error::size("spectrum length mismatch"));
        }
        Ok(Spectrum { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Value at signed frequency `(k1, k2)`, taken modulo `n`.
    #[inline]
    pub fn at(&self, k1: i64, k2: i64) -> Complex64 {
        self.data[bin(k1, self.n) * self.n + bin(k2, self.n)]
    }

    #[inline]
    pub fn at_mut(&mut self, k1: i64, k2: i64) -> &mut Complex64 {
        let n = self.n;
        &mut self.data[bin(k1, n) * n + bin(k2, n)]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Unitary 2-D DFT of a real image.
pub fn fft2_unitary(img: &Image) -> Spectrum {
    let n = img.n();
    let mut data: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(&mut data, n, false);
    Spectrum { n, data }
}

/// Inverse unitary 2-D DFT; the imaginary part is discarded.
pub fn ifft2_unitary(spec: &Spectrum) -> Image {
    let n = spec.n;
    let mut data = spec.data.clone();
    fft2_in_place(&mut data, n, true);
    Image::from_vec(n, data.into_iter().map(|c| c.re).collect()).expect("side already checked")
}

#[cfg(test)]
mod tests {
    #[test]
    fn rect_fft_is_unitary_and_invertible() {
        let (r, c) = (4usize, 8usize);
        let x: Vec<Complex64> = (0..r * c).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut y = x.clone();
        fft2_rect_in_place(&mut y, r, c, false);
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((ex - ey).abs() < 1e-12 * ex);
        // bin (1, 2) against a direct sum
        let direct: Complex64 = (0..r * c)
            .map(|i| {
                let (a, b) = ((i / c) as f64, (i % c) as f64);
                x[i] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (a / r as f64 + 2.0 * b / c as f64))
            })
            .sum::<Complex64>()
            / ((r * c) as f64).sqrt();
        assert!((y[c + 2] - direct).norm() < 1e-12);
        fft2_rect_in_place(&mut y, r, c, true);
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    use super::*;
    use crate::grid::seeded_gaussian;

    #[test]
    fn unitary_roundtrip_and_parseval() {
        let img = seeded_gaussian(32, 1.0, 11).unwrap();
        let s = fft2_unitary(&img);
        assert!((s.energy() - img.norm_sq()).abs() < 1e-9 * img.norm_sq());
        let back = ifft2_unitary(&s);
        assert!(back.max_abs_diff(&img) < 1e-12);
    }

    #[test]
    fn single_mode_matches_direct_sum() {
        let n = 8;
        let img = seeded_gaussian(n, 1.0, 5).unwrap();
        let s = fft2_unitary(&img);
        let (k1, k2) = (3i64, -2i64);
        let mut acc = Complex64::new(0.0, 0.0);
        for i1 in 0..n {
            for i2 in 0..n {
                let ph = -2.0 * std::f64::consts::PI * (k1 * i1 as i64 + k2 * i2 as i64) as f64 / n as f64;
                acc += Complex64::from_polar(img.get(i1, i2), ph);
            }
        }
        acc /= n as f64;
        assert!((acc - s.at(k1, k2)).norm() < 1e-12);
    }
}
