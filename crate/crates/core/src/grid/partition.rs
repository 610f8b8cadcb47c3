use super::{check_side, nu, Image};
use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Separable periodic windows `w_{k1,k2}(x) = w_{k1}(x1) w_{k2}(x2)` over dyadic
/// boxes of side `box_side`, with `sum_k w_k^2 = 1` at every pixel.
#[derive(Clone, Debug)]
pub struct Partition {
    n: usize,
    box_side: usize,
    overlap: usize,
    profiles: Vec<Vec<f64>>,
}

/// Builds the box partition; `overlap` is the half-width of each transition in pixels.
pub fn partition_of_unity_2d(n: usize, box_side: usize, overlap: usize) -> Result<Partition> {
    check_side(n)?;
    if box_side == 0 || !box_side.is_power_of_two() || box_side > n {
        return Err(Error::size(format!("box side {box_side} invalid for side {n}")));
    }
    if 2 * overlap > box_side {
        return Err(Error::param(format!("overlap {overlap} exceeds half the box side {box_side}")));
    }
    let boxes = n / box_side;
    let profiles = (0..boxes)
        .map(|k| {
            (0..n)
                .map(|i| {
                    if boxes == 1 {
                        1.0
                    } else {
                        profile(i as f64 + 0.5, k, box_side, overlap, n)
                    }
                })
                .collect()
        })
        .collect();
    Ok(Partition { n, box_side, overlap, profiles })
}

fn profile(x: f64, k: usize, side: usize, overlap: usize, n: usize) -> f64 {
    let nf = n as f64;
    let lo = (k * side) as f64;
    let hi = lo + side as f64;
    // offset from the box centre measured periodically in [-n/2, n/2)
    let c = lo + side as f64 / 2.0;
    let x = c + (x - c + nf / 2.0).rem_euclid(nf) - nf / 2.0;
    if overlap == 0 {
        return if x >= lo && x < hi { 1.0 } else { 0.0 };
    }
    let o = overlap as f64;
    if x <= lo - o || x >= hi + o {
        0.0
    } else if x < lo + o {
        (FRAC_PI_2 * nu((x - lo + o) / (2.0 * o))).sin()
    } else if x <= hi - o {
        1.0
    } else {
        (FRAC_PI_2 * nu((x - hi + o) / (2.0 * o))).cos()
    }
}

impl Partition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_side(&self) -> usize {
        self.box_side
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn boxes_per_axis(&self) -> usize {
        self.profiles.len()
    }

    /// One-dimensional profile of box `k` along either axis.
    pub fn profile(&self, k: usize) -> &[f64] {
        &self.profiles[k]
    }

    #[inline]
    pub fn weight(&self, k1: usize, k2: usize, i1: usize, i2: usize) -> f64 {
        self.profiles[k1][i1] * self.profiles[k2][i2]
    }

    pub fn window_image(&self, k1: usize, k2: usize) -> Image {
        let n = self.n;
        let mut img = Image::zeros(n).expect("side checked");
        for i1 in 0..n {
            for i2 in 0..n {
                img.set(i1, i2, self.weight(k1, k2, i1, i2));
            }
        }
        img
    }

    /// Side of the periodic crop that holds the support of one window.
    pub fn crop_side(&self) -> usize {
        if self.boxes_per_axis() == 1 {
            self.n
        } else {
            (2 * self.box_side).min(self.n)
        }
    }

    /// Top-left corner (mod n) of the crop around box `k` along one axis.
    pub fn crop_origin(&self, k: usize) -> usize {
        if self.boxes_per_axis() == 1 {
            0
        } else {
            let m = self.crop_side();
            let centre = k * self.box_side + self.box_side / 2;
            (centre + self.n - m / 2) % self.n
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_sum_to_one() {
        for &(n, b, o) in &[(64usize, 16usize, 4usize), (64, 8, 0), (32, 32, 4), (128, 32, 16), (64, 32, 8)] {
            let p = partition_of_unity_2d(n, b, o).unwrap();
            for i in 0..n {
                let s: f64 = (0..p.boxes_per_axis()).map(|k| p.profile(k)[i].powi(2)).sum();
                assert!((s - 1.0).abs() < 1e-14, "n={n} b={b} o={o} i={i}");
            }
        }
    }

    #[test]
    fn zero_overlap_gives_indicators() {
        let p = partition_of_unity_2d(32, 8, 0).unwrap();
        for k in 0..4 {
            for i in 0..32 {
                let expect = if i / 8 == k { 1.0 } else { 0.0 };
                assert_eq!(p.profile(k)[i], expect);
            }
        }
    }

    #[test]
    fn support_fits_in_crop() {
        let p = partition_of_unity_2d(64, 16, 4).unwrap();
        let m = p.crop_side();
        for k in 0..p.boxes_per_axis() {
            let o = p.crop_origin(k);
            let inside: f64 = (0..m).map(|a| p.profile(k)[(o + a) % 64].powi(2)).sum();
            let total: f64 = p.profile(k).iter().map(|v| v * v).sum();
            assert!((inside - total).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(partition_of_unity_2d(64, 12, 2).is_err());
        assert!(partition_of_unity_2d(64, 16, 9).is_err());
        assert!(partition_of_unity_2d(64, 128, 0).is_err());
    }
}
