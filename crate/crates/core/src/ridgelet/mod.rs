//! Ridgelets: one-dimensional wavelets applied along Radon-domain slices.
//!
//! [`RidgeletPlan`] is an exactly tight frame built from Fourier slices on a
//! pseudopolar grid: every frequency of the `m x m` lattice is owned by at
//! most one slice sample (its nearest one, found by a greedy matching that is
//! equivariant under quarter turns). Each slice spectrum is inverted to a real
//! Radon-domain profile and expanded in a periodized orthonormal wavelet
//! basis. Lattice points left unowned (DC, Nyquist lines, a few corners) are
//! kept as a small real residual block, so analysis is an isometry and
//! synthesis is both its adjoint and its inverse.

mod radon;

pub use radon::{radon_fourier_slice, RadonSlices};

use crate::error::{Error, Result};
use crate::frame::{CoeffSet, LayoutBuilder, Transform};
use crate::grid::{bin, check_side, fft1_unitary, fft2_unitary, freq, ifft1_unitary, ifft2_unitary, Image, Spectrum};
use crate::wavelet::{dwt_1d, idwt_1d, Filter, WaveletCoeffs1d};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

const NONE: u32 = u32::MAX;

/// Slice ownership of the frequency lattice for one side length.
#[derive(Debug)]
struct Ownership {
    /// For slot `t * 2m + idx`, the owned lattice bin (FFT order) or `NONE`.
    slot_bin: Vec<u32>,
    /// Unowned lattice points: `(bin, self_conjugate)`, one per conjugate pair.
    residual: Vec<(u32, bool)>,
}

/// Angle of slice `t` out of `2m`.
pub fn slice_angle(t: usize, m: usize) -> f64 {
    PI * t as f64 / (2 * m) as f64
}

/// Radial step on slice `t`: the samples reach the edge of the frequency box.
pub fn slice_step(t: usize, m: usize) -> f64 {
    let th = slice_angle(t, m);
    0.5 / th.cos().abs().max(th.sin().abs())
}

fn ownership(m: usize) -> Arc<Ownership> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Ownership>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(o) = cache.lock().unwrap().get(&m) {
        return o.clone();
    }
    let o = Arc::new(build_ownership(m));
    cache.lock().unwrap().insert(m, o.clone());
    o
}

fn build_ownership(m: usize) -> Ownership {
    let len = 2 * m;
    let half = (m / 2) as i64;
    // Fundamental domain: k1 in [1, m/2-1], k2 in [0, m/2-1]; samples with t < m and rho > 0.
    let in_domain = |k1: i64, k2: i64| k1 >= 1 && k1 < half && k2 >= 0 && k2 < half;
    let side = (half - 1).max(0) as usize;
    let lattice_id = |k1: i64, k2: i64| (k1 - 1) as usize * (half as usize) + k2 as usize;
    let mut cand: Vec<(f64, u32, u32)> = Vec::new();
    for t in 0..m {
        let th = slice_angle(t, m);
        let (c, s) = (th.cos(), th.sin());
        let d = slice_step(t, m);
        for idx in m + 1..len {
            let rho = (idx - m) as f64 * d;
            let (p1, p2) = (rho * c, rho * s);
            for k1 in (p1 - 1.0).floor() as i64..=(p1 + 1.0).ceil() as i64 {
                for k2 in (p2 - 1.0).floor() as i64..=(p2 + 1.0).ceil() as i64 {
                    if !in_domain(k1, k2) {
                        continue;
                    }
                    let dist = ((k1 as f64 - p1).powi(2) + (k2 as f64 - p2).powi(2)).sqrt();
                    if dist <= 1.0 {
                        cand.push((dist, lattice_id(k1, k2) as u32, (t * len + idx) as u32));
                    }
                }
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut lattice_owner = vec![NONE; side * half as usize];
    let mut slot_used = vec![false; m * len];
    for &(_, lat, slot) in &cand {
        if lattice_owner[lat as usize] == NONE && !slot_used[slot as usize] {
            lattice_owner[lat as usize] = slot;
            slot_used[slot as usize] = true;
        }
    }
    let mut slot_bin = vec![NONE; len * len];
    let mut owned = vec![false; m * m];
    let rev = |idx: usize| (len - idx) % len;
    // quarter turns: (k1,k2) -> (-k2,k1) -> (-k1,-k2) -> (k2,-k1)
    let images = |k1: i64, k2: i64, t: usize, idx: usize| {
        [((k1, k2), (t, idx)), ((-k2, k1), (t + m, idx)), ((-k1, -k2), (t, rev(idx))), ((k2, -k1), (t + m, rev(idx)))]
    };
    for k1 in 1..half {
        for k2 in 0..half {
            let slot = lattice_owner[lattice_id(k1, k2)];
            if slot == NONE {
                continue;
            }
            let (t, idx) = ((slot as usize) / len, (slot as usize) % len);
            for ((a, b), (tt, ii)) in images(k1, k2, t, idx) {
                let bn = bin(a, m) * m + bin(b, m);
                slot_bin[tt * len + ii] = bn as u32;
                owned[bn] = true;
            }
        }
    }
    let mut residual = Vec::new();
    for i1 in 0..m {
        for i2 in 0..m {
            let bn = i1 * m + i2;
            if owned[bn] {
                continue;
            }
            let (k1, k2) = (freq(i1, m), freq(i2, m));
            let conj = bin(-k1, m) * m + bin(-k2, m);
            if conj == bn {
                residual.push((bn as u32, true));
            } else if bn < conj {
                residual.push((bn as u32, false));
            }
        }
    }
    Ownership { slot_bin, residual }
}

/// Tight ridgelet frame on `m x m` images.
#[derive(Clone, Debug)]
pub struct RidgeletPlan {
    m: usize,
    filter: Filter,
    j_coarse: usize,
    own: Arc<Ownership>,
}

impl RidgeletPlan {
    pub fn new(m: usize, filter: Filter, j_coarse: usize) -> Result<Self> {
        check_side(m)?;
        if m < 4 {
            return Err(Error::size("ridgelet plan needs side >= 4"));
        }
        dwt_1d(&vec![0.0; 2 * m], filter, j_coarse)?;
        Ok(RidgeletPlan { m, filter, j_coarse, own: ownership(m) })
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn angles(&self) -> usize {
        2 * self.m
    }

    pub fn slice_len(&self) -> usize {
        2 * self.m
    }

    /// Number of Radon-domain wavelet levels including the coarse block.
    pub fn levels(&self) -> usize {
        (2 * self.m).trailing_zeros() as usize - self.j_coarse + 1
    }

    pub fn residual_len(&self) -> usize {
        self.own.residual.iter().map(|&(_, s)| if s { 1 } else { 2 }).sum()
    }

    pub fn len(&self) -> usize {
        4 * self.m * self.m + self.residual_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice points carried by the residual block.
    pub fn unowned(&self) -> usize {
        self.residual_len()
    }

    fn slice_spectrum(&self, spec: &[Complex64], t: usize) -> Vec<Complex64> {
        let len = 2 * self.m;
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for idx in 0..len {
            let b = self.own.slot_bin[t * len + idx];
            if b != NONE {
                let f = idx as i64 - self.m as i64;
                buf[bin(f, len)] = spec[b as usize];
            }
        }
        buf
    }

    /// Real Radon-domain profiles, one per slice.
    pub fn slices_from_spectrum(&self, spec: &[Complex64]) -> Vec<Vec<f64>> {
        (0..self.angles())
            .into_par_iter()
            .map(|t| {
                let mut buf = self.slice_spectrum(spec, t);
                ifft1_unitary(&mut buf);
                buf.into_iter().map(|c| c.re).collect()
            })
            .collect()
    }

    pub fn slices(&self, patch: &[f64]) -> Result<Vec<Vec<f64>>> {
        let spec = fft2_unitary(&Image::from_vec(self.m, patch.to_vec())?);
        Ok(self.slices_from_spectrum(spec.data()))
    }

    /// Analysis of a row-major `m x m` patch.
    pub fn analyze(&self, patch: &[f64]) -> Result<Vec<f64>> {
        let spec = fft2_unitary(&Image::from_vec(self.m, patch.to_vec())?);
        self.analyze_spectrum(spec.data())
    }

    pub fn analyze_spectrum(&self, spec: &[Complex64]) -> Result<Vec<f64>> {
        let slices = self.slices_from_spectrum(spec);
        let wav: Vec<WaveletCoeffs1d> =
            slices.par_iter().map(|s| dwt_1d(s, self.filter, self.j_coarse)).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(self.len());
        for t in 0..self.angles() {
            out.extend_from_slice(&wav[t].coarse);
        }
        for l in 0..wav[0].details.len() {
            for w in &wav {
                out.extend_from_slice(&w.details[l]);
            }
        }
        for &(b, selfconj) in &self.own.residual {
            let v = spec[b as usize];
            if selfconj {
                out.push(v.re);
            } else {
                out.push(SQRT_2 * v.re);
                out.push(SQRT_2 * v.im);
            }
        }
        Ok(out)
    }

    /// Adjoint (and inverse) of `analyze`, returned as a spectrum.
    pub fn synthesize_spectrum(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.len() {
            return Err(Error::size(format!("expected {} ridgelet coefficients, got {}", self.len(), coeffs.len())));
        }
        let m = self.m;
        let len = 2 * m;
        let na = self.angles();
        let c0 = 1usize << self.j_coarse;
        let nlev = self.levels() - 1;
        let detail_start = |l: usize| na * c0 + na * (c0 * ((1 << l) - 1));
        let slices: Vec<Vec<Complex64>> = (0..na)
            .into_par_iter()
            .map(|t| {
                let coarse = coeffs[t * c0..(t + 1) * c0].to_vec();
                let details = (0..nlev)
                    .map(|l| {
                        let sz = c0 << l;
                        let s = detail_start(l) + t * sz;
                        coeffs[s..s + sz].to_vec()
                    })
                    .collect();
                let w = WaveletCoeffs1d { filter: self.filter, j_coarse: self.j_coarse, coarse, details };
                let r = idwt_1d(&w)?;
                let mut buf: Vec<Complex64> = r.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
                fft1_unitary(&mut buf);
                Ok(buf)
            })
            .collect::<Result<_>>()?;
        let mut spec = vec![Complex64::new(0.0, 0.0); m * m];
        for (t, s) in slices.iter().enumerate() {
            for idx in 0..len {
                let b = self.own.slot_bin[t * len + idx];
                if b != NONE {
                    spec[b as usize] = s[bin(idx as i64 - m as i64, len)];
                }
            }
        }
        let mut at = 4 * m * m;
        for &(b, selfconj) in &self.own.residual {
            let b = b as usize;
            if selfconj {
                spec[b] = Complex64::new(coeffs[at], 0.0);
                at += 1;
            } else {
                let v = Complex64::new(coeffs[at], coeffs[at + 1]) / SQRT_2;
                let (k1, k2) = (freq(b / m, m), freq(b % m, m));
                spec[b] = v;
                spec[bin(-k1, m) * m + bin(-k2, m)] = v.conj();
                at += 2;
            }
        }
        Ok(spec)
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let spec = Spectrum::from_vec(self.m, self.synthesize_spectrum(coeffs)?)?;
        Ok(ifft2_unitary(&spec).into_vec())
    }

    /// `(level, start, len)` for each coefficient run of one slice family;
    /// level 0 is the coarse block and the residual is reported as `levels()`.
    pub fn runs(&self) -> Vec<(usize, usize, usize)> {
        let na = self.angles();
        let c0 = 1usize << self.j_coarse;
        let mut out = vec![(0, 0, na * c0)];
        let mut at = na * c0;
        for l in 0..self.levels() - 1 {
            let sz = na * (c0 << l);
            out.push((l + 1, at, sz));
            at += sz;
        }
        out.push((self.levels(), at, self.residual_len()));
        out
    }
}

/// A ridgelet plan viewed as a `Transform` on whole images.
#[derive(Clone, Debug)]
pub struct Ridgelet {
    plan: RidgeletPlan,
}

impl Ridgelet {
    pub fn new(n: usize, filter: Filter, j_coarse: usize) -> Result<Self> {
        Ok(Ridgelet { plan: RidgeletPlan::new(n, filter, j_coarse)? })
    }

    pub fn plan(&self) -> &RidgeletPlan {
        &self.plan
    }
}

impl Transform for Ridgelet {
    fn name(&self) -> &'static str {
        "ridgelet"
    }

    fn n(&self) -> usize {
        self.plan.m
    }

    fn analyze(&self, img: &Image) -> Result<CoeffSet> {
        if img.n() != self.plan.m {
            return Err(Error::size("image side does not match transform"));
        }
        let v = self.plan.analyze(img.data())?;
        let mut b = LayoutBuilder::default();
        let lv = self.plan.levels();
        for (level, start, len) in self.plan.runs() {
            let scale = if level == 0 || level == lv { None } else { Some(self.plan.j_coarse + level - 1) };
            let label = if level == lv { "residual".to_string() } else { format!("level{level}") };
            b.push(&v[start..start + len], scale, level, label);
        }
        Ok(b.finish(self.plan.m))
    }

    fn synthesize(&self, coeffs: &CoeffSet) -> Result<Image> {
        Image::from_vec(self.plan.m, self.plan.synthesize(&coeffs.values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::seeded_gaussian;

    #[test]
    fn ownership_is_injective_and_hermitian() {
        for m in [8usize, 16, 64] {
            let o = ownership(m);
            let len = 2 * m;
            let mut seen = vec![0u8; m * m];
            for t in 0..len {
                for idx in 0..len {
                    let b = o.slot_bin[t * len + idx];
                    if b == NONE {
                        continue;
                    }
                    seen[b as usize] += 1;
                    // the mirrored slot owns the conjugate frequency
                    let mb = o.slot_bin[t * len + (len - idx) % len];
                    let (k1, k2) = (freq(b as usize / m, m), freq(b as usize % m, m));
                    assert_eq!(mb as usize, bin(-k1, m) * m + bin(-k2, m));
                }
            }
            assert!(seen.iter().all(|&c| c <= 1));
            let owned = seen.iter().filter(|&&c| c == 1).count();
            let res: usize = o.residual.iter().map(|&(_, s)| if s { 1 } else { 2 }).sum();
            assert_eq!(owned + res, m * m);
        }
    }

    #[test]
    fn most_of_the_lattice_is_owned() {
        let plan = RidgeletPlan::new(128, Filter::D8, 3).unwrap();
        // the Nyquist lines and DC are always residual
        assert!(plan.unowned() < 2 * 128 + 64, "{}", plan.unowned());
    }

    #[test]
    fn exact_reconstruction_and_parseval() {
        for m in [16usize, 64] {
            let plan = RidgeletPlan::new(m, Filter::D8, 3).unwrap();
            let img = seeded_gaussian(m, 1.0, 3).unwrap();
            let c = plan.analyze(img.data()).unwrap();
            assert_eq!(c.len(), plan.len());
            let e: f64 = c.iter().map(|v| v * v).sum();
            assert!((e - img.norm_sq()).abs() < 1e-10 * img.norm_sq());
            let back = plan.synthesize(&c).unwrap();
            let err = back.iter().zip(img.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn synthesis_is_the_adjoint() {
        let plan = RidgeletPlan::new(32, Filter::D4, 2).unwrap();
        let img = seeded_gaussian(32, 1.0, 4).unwrap();
        let c = crate::grid::gaussian_vec(plan.len(), 1.0, 5);
        let lhs: f64 = plan.analyze(img.data()).unwrap().iter().zip(&c).map(|(a, b)| a * b).sum();
        let rhs: f64 = plan.synthesize(&c).unwrap().iter().zip(img.data()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn quarter_turn_permutes_slices() {
        let m = 32;
        let plan = RidgeletPlan::new(m, Filter::D8, 3).unwrap();
        let img = seeded_gaussian(m, 1.0, 8).unwrap();
        let a = plan.slices(img.data()).unwrap();
        let b = plan.slices(img.rot90().data()).unwrap();
        let len = 2 * m;
        for t in 0..len {
            let (tt, rev) = if t < m { (t + m, false) } else { (t - m, true) };
            for x in 0..len {
                let expect = if rev { a[t][(len - x) % len] } else { a[t][x] };
                assert!((b[tt][x] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn axis_edge_lands_in_slice_zero() {
        let m = 64;
        let plan = RidgeletPlan::new(m, Filter::D8, 3).unwrap();
        let img = Image::from_fn(m, |x1, _| if x1 >= 0.5 { 1.0 } else { 0.0 }).unwrap();
        let s = plan.slices(img.data()).unwrap();
        let e: Vec<f64> = s.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
        let total: f64 = e.iter().sum();
        assert!(e[0] > 0.999 * total);
    }
}
