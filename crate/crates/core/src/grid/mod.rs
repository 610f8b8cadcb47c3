//! Periodic square grids, unitary FFTs, smooth windows and seeded noise.
//!
//! Everything here lives on the torus: an `n x n` image is a function on
//! `[0,1)^2` sampled at `x = (i1/n, i2/n)` and its spectrum is indexed by
//! integer frequencies in `[-n/2, n/2)`.

mod fft;
mod partition;
mod windows;

pub use fft::{fft1_unitary, fft2_rect_in_place, fft2_unitary, ifft1_unitary, ifft2_unitary, Spectrum};
pub use partition::{partition_of_unity_2d, Partition};
pub use windows::{angular_profile, meyer_low, meyer_windows, nu, MeyerBank};

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Row-major square image of side `n` (a power of two).
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    n: usize,
    data: Vec<f64>,
}

pub fn check_side(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::size(format!("side {n} is not a power of two >= 2")));
    }
    Ok(())
}

impl Image {
    pub fn zeros(n: usize) -> Result<Self> {
        check_side(n)?;
        Ok(Image { n, data: vec![0.0; n * n] })
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        check_side(n)?;
        if data.len() != n * n {
            return Err(Error::size(format!(
                "expected {} samples for side {n}, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Image { n, data })
    }

    /// Samples `f(x1, x2)` at the grid points `(i1/n, i2/n)`.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_side(n)?;
        let h = 1.0 / n as f64;
        let mut data = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                data.push(f(i1 as f64 * h, i2 as f64 * h));
            }
        }
        Ok(Image { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.data[i1 * self.n + i2]
    }

    #[inline]
    pub fn set(&mut self, i1: usize, i2: usize, v: f64) {
        self.data[i1 * self.n + i2] = v;
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &Image) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn sub(&self, other: &Image) -> Image {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Image { n: self.n, data }
    }

    pub fn add_assign(&mut self, other: &Image) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Rotation by 90 degrees counterclockwise about the origin of the torus.
    pub fn rot90(&self) -> Image {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i1 in 0..n {
            for i2 in 0..n {
                out[i1 * n + i2] = self.data[i2 * n + (n - i1) % n];
            }
        }
        Image { n, data: out }
    }

    /// Periodic `m x m` crop whose top-left pixel is `(o1, o2)` (mod n).
    pub fn crop(&self, o1: usize, o2: usize, m: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            let row = ((o1 + a) % n) * n;
            for b in 0..m {
                out.push(self.data[row + (o2 + b) % n]);
            }
        }
        out
    }

    /// Adds an `m x m` patch back at periodic offset `(o1, o2)`.
    pub fn add_patch(&mut self, o1: usize, o2: usize, m: usize, patch: &[f64]) {
        let n = self.n;
        for a in 0..m {
            let row = ((o1 + a) % n) * n;
            for b in 0..m {
                self.data[row + (o2 + b) % n] += patch[a * m + b];
            }
        }
    }
}

/// Signed frequency of FFT bin `i` on a length-`n` grid, in `[-n/2, n/2)`.
#[inline]
pub fn freq(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT bin of signed frequency `k` on a length-`n` grid.
#[inline]
pub fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Deterministic i.i.d. standard normal image scaled by `sigma`.
pub fn seeded_gaussian(n: usize, sigma: f64, seed: u64) -> Result<Image> {
    check_side(n)?;
    let data = gaussian_vec(n * n, sigma, seed);
    Image::from_vec(n, data)
}

pub fn gaussian_vec(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect()
}

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sides() {
        assert!(Image::zeros(0).is_err());
        assert!(Image::zeros(48).is_err());
        assert!(Image::from_vec(4, vec![0.0; 15]).is_err());
        assert!(Image::zeros(64).is_ok());
    }

    #[test]
    fn gaussian_is_reproducible() {
        let a = seeded_gaussian(16, 1.0, 7).unwrap();
        let b = seeded_gaussian(16, 1.0, 7).unwrap();
        let c = seeded_gaussian(16, 1.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let var = a.norm_sq() / 256.0;
        assert!((var - 1.0).abs() < 0.3);
    }

    #[test]
    fn rot90_four_times_is_identity() {
        let a = seeded_gaussian(8, 1.0, 1).unwrap();
        let r = a.rot90().rot90().rot90().rot90();
        assert_eq!(a, r);
    }

    #[test]
    fn crop_and_patch_are_adjoint() {
        let a = seeded_gaussian(16, 1.0, 2).unwrap();
        let p = crate::grid::gaussian_vec(64, 1.0, 3);
        let c = a.crop(13, 5, 8);
        let lhs: f64 = c.iter().zip(&p).map(|(x, y)| x * y).sum();
        let mut z = Image::zeros(16).unwrap();
        z.add_patch(13, 5, 8, &p);
        assert!((lhs - a.dot(&z)).abs() < 1e-12);
    }

    #[test]
    fn freq_bin_roundtrip() {
        for n in [2usize, 8, 64] {
            for i in 0..n {
                assert_eq!(bin(freq(i, n), n), i);
            }
        }
        assert_eq!(freq(4, 8), -4);
    }
}
