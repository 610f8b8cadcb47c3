use super::{check_side, freq};
use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Meyer auxiliary ramp: smooth, 0 below 0, 1 above 1, `nu(t) + nu(1-t) = 1`.
pub fn nu(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
    }
}

/// Radial lowpass: 1 on `[0,1]`, smooth roll-off on `[1, 3/2]`, 0 beyond.
pub fn meyer_low(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 1.5 {
        0.0
    } else {
        (FRAC_PI_2 * nu(2.0 * (r - 1.0))).cos()
    }
}

/// Angular bump on `[-1, 1]`; its squared integer translates sum to one.
pub fn angular_profile(t: f64) -> f64 {
    let a = t.abs();
    if a >= 1.0 {
        0.0
    } else {
        (FRAC_PI_2 * nu(a)).cos()
    }
}

/// Radial Meyer filter bank on an `n x n` frequency lattice.
///
/// Band `j` lives on `2^j <= |xi| <= 3 * 2^j`; the finest band is a highpass
/// that also covers the corners of the lattice. Squared windows sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct MeyerBank {
    n: usize,
    j_coarse: usize,
    j_fine: usize,
}

/// Standard bank for side `n`: bands `j_coarse ..= log2(n) - 2`.
pub fn meyer_windows(n: usize, j_coarse: usize) -> Result<MeyerBank> {
    check_side(n)?;
    let big_j = n.trailing_zeros() as usize;
    if big_j < 3 {
        return Err(Error::size(format!("side {n} too small for a Meyer bank")));
    }
    MeyerBank::new(n, j_coarse, big_j - 2)
}

impl MeyerBank {
    pub fn new(n: usize, j_coarse: usize, j_fine: usize) -> Result<Self> {
        check_side(n)?;
        if 3usize.checked_shl(j_fine as u32).is_none_or(|v| v > n) {
            return Err(Error::size(format!(
                "finest band 2^{j_fine} does not fit below Nyquist for side {n}"
            )));
        }
        if j_coarse > j_fine {
            return Err(Error::param(format!("j_coarse {j_coarse} exceeds j_fine {j_fine}")));
        }
        Ok(MeyerBank { n, j_coarse, j_fine })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_coarse(&self) -> usize {
        self.j_coarse
    }

    pub fn j_fine(&self) -> usize {
        self.j_fine
    }

    pub fn bands(&self) -> std::ops::RangeInclusive<usize> {
        self.j_coarse..=self.j_fine
    }

    pub fn coarse(&self, r: f64) -> f64 {
        meyer_low(r / (1u64 << self.j_coarse) as f64)
    }

    pub fn band(&self, j: usize, r: f64) -> f64 {
        if j < self.j_coarse || j > self.j_fine {
            return 0.0;
        }
        let s = (1u64 << j) as f64;
        let inner = meyer_low(r / s);
        let outer = if j == self.j_fine { 1.0 } else { meyer_low(r / (2.0 * s)) };
        (outer * outer - inner * inner).max(0.0).sqrt()
    }

    /// Radius beyond which the coarse window vanishes.
    pub fn coarse_radius(&self) -> f64 {
        1.5 * (1u64 << self.j_coarse) as f64
    }

    /// Evaluates `w(|xi|)` on the whole lattice in FFT order.
    pub fn grid(&self, w: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i1 in 0..n {
            let k1 = freq(i1, n) as f64;
            for i2 in 0..n {
                let k2 = freq(i2, n) as f64;
                out.push(w((k1 * k1 + k2 * k2).sqrt()));
            }
        }
        out
    }

    pub fn band_grid(&self, j: usize) -> Vec<f64> {
        self.grid(|r| self.band(j, r))
    }

    pub fn coarse_grid(&self) -> Vec<f64> {
        self.grid(|r| self.coarse(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_symmetry() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((nu(t) + nu(1.0 - t) - 1.0).abs() < 1e-13);
        }
        assert_eq!(nu(-0.5), 0.0);
        assert_eq!(nu(1.5), 1.0);
    }

    #[test]
    fn angular_profile_partition_and_norm() {
        for i in 0..=200 {
            let t = i as f64 / 200.0;
            let s = angular_profile(t).powi(2) + angular_profile(t - 1.0).powi(2);
            assert!((s - 1.0).abs() < 1e-14);
        }
        let m = 200_000;
        let h = 2.0 / m as f64;
        let integral: f64 = (0..m).map(|i| angular_profile(-1.0 + (i as f64 + 0.5) * h).powi(2) * h).sum();
        assert!((integral - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bank_is_a_partition_of_unity() {
        let bank = meyer_windows(256, 2).unwrap();
        assert_eq!(bank.bands(), 2..=6);
        for i in 0..4000 {
            let r = i as f64 * 0.1;
            let mut s = bank.coarse(r).powi(2);
            for j in bank.bands() {
                s += bank.band(j, r).powi(2);
            }
            assert!((s - 1.0).abs() < 1e-12, "r = {r}: {s}");
        }
    }

    #[test]
    fn band_support() {
        let bank = meyer_windows(256, 2).unwrap();
        assert_eq!(bank.band(4, 15.9), 0.0);
        assert_eq!(bank.band(4, 48.1), 0.0);
        assert!((bank.band(4, 28.0) - 1.0).abs() < 1e-15);
        assert!(bank.band(6, 180.0) > 0.99);
    }

    #[test]
    fn rejects_oversized_bands() {
        assert!(MeyerBank::new(64, 2, 5).is_err());
        assert!(MeyerBank::new(64, 5, 4).is_err());
        assert!(meyer_windows(4, 0).is_err());
    }
}
