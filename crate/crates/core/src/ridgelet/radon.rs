use crate::grid::{fft2_unitary, ifft1_unitary, Image, Spectrum};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Radon projections obtained from Fourier slices.
#[derive(Clone, Debug)]
pub struct RadonSlices {
    pub angles: Vec<f64>,
    /// One real profile of length `2n` per angle, sampled with step `1/(2n)`
    /// on a period of length 2, so the projected support never wraps.
    pub slices: Vec<Vec<f64>>,
}

fn bilinear(spec: &Spectrum, p1: f64, p2: f64) -> Complex64 {
    let (f1, f2) = (p1.floor(), p2.floor());
    let (a, b) = (p1 - f1, p2 - f2);
    let (k1, k2) = (f1 as i64, f2 as i64);
    spec.at(k1, k2) * ((1.0 - a) * (1.0 - b))
        + spec.at(k1 + 1, k2) * (a * (1.0 - b))
        + spec.at(k1, k2 + 1) * ((1.0 - a) * b)
        + spec.at(k1 + 1, k2 + 1) * (a * b)
}

/// Projection-slice diagnostic: the spectrum is sampled along `2n` directions
/// in `[0, pi)` with radial step `1/2` by linear interpolation, then each
/// slice is inverted by a 1-D DFT.
pub fn radon_fourier_slice(img: &Image) -> RadonSlices {
    let n = img.n();
    let spec = fft2_unitary(img);
    let len = 2 * n;
    let na = 2 * n;
    let mut angles = Vec::with_capacity(na);
    let mut slices = Vec::with_capacity(na);
    for t in 0..na {
        let th = PI * t as f64 / na as f64;
        let (c, s) = (th.cos(), th.sin());
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (i, v) in buf.iter_mut().enumerate() {
            let f = if i < n { i as f64 } else { i as f64 - len as f64 };
            let rho = 0.5 * f;
            *v = bilinear(&spec, rho * c, rho * s);
        }
        ifft1_unitary(&mut buf);
        angles.push(th);
        slices.push(buf.into_iter().map(|z| z.re).collect());
    }
    RadonSlices { angles, slices }
}

impl RadonSlices {
    pub fn energies(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.iter().map(|v| v * v).sum()).collect()
    }
}
