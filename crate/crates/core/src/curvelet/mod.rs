//! Curvelets: Meyer subband decomposition, smooth spatial partitioning into
//! boxes whose side shrinks like the square root of the subband scale, and a
//! tight ridgelet frame on every windowed box.
//!
//! Each stage is an isometry (squared Meyer windows and squared box windows
//! both sum to one), so the whole frame is tight and synthesis is the adjoint.

mod images;

pub use images::{edge_image, EdgeKind};

use crate::error::{Error, Result};
use crate::frame::{Block, CoeffSet, Transform};
use crate::grid::{
    bin, check_side, fft2_unitary, ifft2_unitary, meyer_windows, partition_of_unity_2d, Image, MeyerBank,
    Partition, Spectrum,
};
use crate::ridgelet::RidgeletPlan;
use crate::wavelet::Filter;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveletParams {
    pub j_coarse: usize,
    /// Smallest allowed box side in pixels.
    pub min_box: usize,
    /// Transition half-width of the box windows as a fraction of the box side.
    pub overlap_fraction: f64,
    pub filter: Filter,
    /// Coarse level of the 1-D wavelet transform inside each ridgelet slice.
    pub ridgelet_j_coarse: usize,
}

impl Default for CurveletParams {
    fn default() -> Self {
        CurveletParams { j_coarse: 2, min_box: 16, overlap_fraction: 0.25, filter: Filter::D8, ridgelet_j_coarse: 3 }
    }
}

/// Per-band geometry.
#[derive(Clone, Debug)]
pub struct BandPlan {
    pub j: usize,
    /// Side of the grid the band is resampled to.
    pub grid_side: usize,
    /// Box side in pixels of the full-resolution image.
    pub box_side: usize,
    /// True when the parabolic box side was raised to `min_box`.
    pub clamped: bool,
    partition: Partition,
    ridgelet: RidgeletPlan,
    window: Vec<f64>,
}

impl BandPlan {
    pub fn boxes_per_axis(&self) -> usize {
        self.partition.boxes_per_axis()
    }

    pub fn crop_side(&self) -> usize {
        self.partition.crop_side()
    }

    pub fn coeffs_per_box(&self) -> usize {
        self.ridgelet.len()
    }

    pub fn ridgelet(&self) -> &RidgeletPlan {
        &self.ridgelet
    }
}

/// Curvelet frame on `n x n` images.
#[derive(Clone, Debug)]
pub struct Curvelet {
    n: usize,
    params: CurveletParams,
    bank: MeyerBank,
    coarse_side: usize,
    coarse_window: Vec<f64>,
    bands: Vec<BandPlan>,
}

/// Smallest grid holding band `j` without aliasing: the band vanishes beyond
/// `3 * 2^j`, so `8 * 2^j` samples suffice except for the highpass band.
pub fn band_grid_side(n: usize, j: usize, j_fine: usize) -> usize {
    if j >= j_fine {
        n
    } else {
        n.min(8usize << j)
    }
}

/// Parabolic box side `n 2^{-ceil(j/2)}`, clamped to `[min_box, n]`.
pub fn box_side(n: usize, j: usize, min_box: usize) -> (usize, bool) {
    let raw = n >> j.div_ceil(2).min(n.trailing_zeros() as usize);
    if raw < min_box {
        (min_box.min(n), true)
    } else {
        (raw, false)
    }
}

impl Curvelet {
    pub fn new(n: usize, params: CurveletParams) -> Result<Self> {
        check_side(n)?;
        if !params.min_box.is_power_of_two() || params.min_box < 8 {
            return Err(Error::param("min_box must be a power of two >= 8"));
        }
        if !(0.0..=0.5).contains(&params.overlap_fraction) {
            return Err(Error::param("overlap fraction must lie in [0, 1/2]"));
        }
        let bank = meyer_windows(n, params.j_coarse)?;
        let r = bank.coarse_radius();
        let coarse_side = ((2.0 * r).floor() as usize + 1).next_power_of_two().min(n);
        let coarse_window = bank.coarse_grid();
        let bands = bank
            .bands()
            .map(|j| {
                let (b, clamped) = box_side(n, j, params.min_box);
                let side = band_grid_side(n, j, bank.j_fine());
                let bs = (b * side / n).max(1);
                let overlap = (bs as f64 * params.overlap_fraction).round() as usize;
                let partition = partition_of_unity_2d(side, bs, overlap)?;
                let ridgelet = RidgeletPlan::new(partition.crop_side(), params.filter, params.ridgelet_j_coarse)?;
                let window = bank.band_grid(j);
                Ok(BandPlan { j, grid_side: side, box_side: b, clamped, partition, ridgelet, window })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Curvelet { n, params, bank, coarse_side, coarse_window, bands })
    }

    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(n, CurveletParams::default())
    }

    pub fn params(&self) -> &CurveletParams {
        &self.params
    }

    pub fn bank(&self) -> &MeyerBank {
        &self.bank
    }

    pub fn bands(&self) -> &[BandPlan] {
        &self.bands
    }

    pub fn coarse_side(&self) -> usize {
        self.coarse_side
    }

    pub fn len(&self) -> usize {
        self.coarse_side * self.coarse_side
            + self.bands.iter().map(|b| b.boxes_per_axis().pow(2) * b.coeffs_per_box()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total coefficients divided by pixels.
    pub fn redundancy(&self) -> f64 {
        self.len() as f64 / (self.n * self.n) as f64
    }

    pub fn any_clamped(&self) -> bool {
        self.bands.iter().any(|b| b.clamped)
    }

    fn coarse_analyze(&self, spec: &Spectrum) -> Vec<f64> {
        let (n, m) = (self.n, self.coarse_side);
        let mut small = vec![Complex64::new(0.0, 0.0); m * m];
        let h = (m / 2) as i64;
        for k1 in -h..h {
            for k2 in -h..h {
                let w = self.coarse_window[bin(k1, n) * n + bin(k2, n)];
                small[bin(k1, m) * m + bin(k2, m)] = spec.at(k1, k2) * w;
            }
        }
        let sp = Spectrum::from_vec(m, small).expect("power of two");
        ifft2_unitary(&sp).into_vec()
    }

    fn coarse_synthesize(&self, coeffs: &[f64], spec: &mut [Complex64]) {
        let (n, m) = (self.n, self.coarse_side);
        let small = fft2_unitary(&Image::from_vec(m, coeffs.to_vec()).expect("power of two"));
        let h = (m / 2) as i64;
        for k1 in -h..h {
            for k2 in -h..h {
                let b = bin(k1, n) * n + bin(k2, n);
                spec[b] += small.at(k1, k2) * self.coarse_window[b];
            }
        }
    }

    fn band_image(&self, spec: &Spectrum, band: &BandPlan) -> Image {
        let (n, m) = (self.n, band.grid_side);
        let h = (m / 2) as i64;
        let mut small = vec![Complex64::new(0.0, 0.0); m * m];
        for k1 in -h..h {
            for k2 in -h..h {
                let b = bin(k1, n) * n + bin(k2, n);
                small[bin(k1, m) * m + bin(k2, m)] = spec.data()[b] * band.window[b];
            }
        }
        ifft2_unitary(&Spectrum::from_vec(m, small).expect("power of two"))
    }

    fn add_band_image(&self, g: &Image, band: &BandPlan, spec: &mut [Complex64]) {
        let (n, m) = (self.n, band.grid_side);
        let gs = fft2_unitary(g);
        let h = (m / 2) as i64;
        for k1 in -h..h {
            for k2 in -h..h {
                let b = bin(k1, n) * n + bin(k2, n);
                spec[b] += gs.at(k1, k2) * band.window[b];
            }
        }
    }

    fn analyze_band(&self, g: &Image, band: &BandPlan) -> Result<Vec<Vec<f64>>> {
        let p = &band.partition;
        let nb = p.boxes_per_axis();
        let m = p.crop_side();
        (0..nb * nb)
            .into_par_iter()
            .map(|bx| {
                let (k1, k2) = (bx / nb, bx % nb);
                let (o1, o2) = (p.crop_origin(k1), p.crop_origin(k2));
                let mut patch = g.crop(o1, o2, m);
                let (w1, w2) = (p.profile(k1), p.profile(k2));
                let side = band.grid_side;
                for a in 0..m {
                    let wa = w1[(o1 + a) % side];
                    for b in 0..m {
                        patch[a * m + b] *= wa * w2[(o2 + b) % side];
                    }
                }
                band.ridgelet.analyze(&patch)
            })
            .collect()
    }

    fn synthesize_band(&self, coeffs: &[f64], band: &BandPlan) -> Result<Image> {
        let p = &band.partition;
        let nb = p.boxes_per_axis();
        let m = p.crop_side();
        let per = band.coeffs_per_box();
        let patches: Vec<Vec<f64>> = (0..nb * nb)
            .into_par_iter()
            .map(|bx| {
                let (k1, k2) = (bx / nb, bx % nb);
                let (o1, o2) = (p.crop_origin(k1), p.crop_origin(k2));
                let mut patch = band.ridgelet.synthesize(&coeffs[bx * per..(bx + 1) * per])?;
                let (w1, w2) = (p.profile(k1), p.profile(k2));
                let side = band.grid_side;
                for a in 0..m {
                    let wa = w1[(o1 + a) % side];
                    for b in 0..m {
                        patch[a * m + b] *= wa * w2[(o2 + b) % side];
                    }
                }
                Ok(patch)
            })
            .collect::<Result<_>>()?;
        let mut g = Image::zeros(band.grid_side)?;
        for (bx, patch) in patches.iter().enumerate() {
            let (k1, k2) = (bx / nb, bx % nb);
            g.add_patch(p.crop_origin(k1), p.crop_origin(k2), m, patch);
        }
        Ok(g)
    }

    fn layout(&self) -> Vec<Block> {
        let mut blocks = vec![Block {
            start: 0,
            len: self.coarse_side * self.coarse_side,
            scale: None,
            group: 0,
            label: "coarse".into(),
        }];
        let mut at = blocks[0].len;
        let mut group_base = 1;
        for band in &self.bands {
            let nb = band.boxes_per_axis();
            let runs = band.ridgelet.runs();
            for bx in 0..nb * nb {
                for &(level, start, len) in &runs {
                    blocks.push(Block {
                        start: at + start,
                        len,
                        scale: Some(band.j),
                        group: group_base + level,
                        label: format!("band{}/box{}-{}/r{}", band.j, bx / nb, bx % nb, level),
                    });
                }
                at += band.coeffs_per_box();
            }
            group_base += runs.len();
        }
        blocks
    }
}

impl Transform for Curvelet {
    fn name(&self) -> &'static str {
        "curvelet"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn analyze(&self, img: &Image) -> Result<CoeffSet> {
        if img.n() != self.n {
            return Err(Error::size("image side does not match transform"));
        }
        let spec = fft2_unitary(img);
        let mut values = Vec::with_capacity(self.len());
        values.extend(self.coarse_analyze(&spec));
        for band in &self.bands {
            let g = self.band_image(&spec, band);
            for v in self.analyze_band(&g, band)? {
                values.extend(v);
            }
        }
        Ok(CoeffSet { n: self.n, values, blocks: self.layout() })
    }

    fn synthesize(&self, coeffs: &CoeffSet) -> Result<Image> {
        if coeffs.values.len() != self.len() {
            return Err(Error::size(format!("expected {} curvelet coefficients, got {}", self.len(), coeffs.len())));
        }
        let n = self.n;
        let v = &coeffs.values;
        let mut spec = Spectrum::zeros(n)?;
        let c = self.coarse_side * self.coarse_side;
        self.coarse_synthesize(&v[..c], spec.data_mut());
        let mut at = c;
        for band in &self.bands {
            let len = band.boxes_per_axis().pow(2) * band.coeffs_per_box();
            let g = self.synthesize_band(&v[at..at + len], band)?;
            self.add_band_image(&g, band, spec.data_mut());
            at += len;
        }
        Ok(ifft2_unitary(&spec))
    }
}
