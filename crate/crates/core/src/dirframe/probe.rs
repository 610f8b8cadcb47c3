use crate::error::{Error, Result};
use crate::grid::{angular_profile, fft2_unitary, freq, meyer_low, Image, Spectrum};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Radial profile of the mother directional wavelet, supported on `(1, 3)`.
fn radial(u: f64) -> f64 {
    let (o, i) = (meyer_low(u / 2.0), meyer_low(u));
    (o * o - i * i).max(0.0).sqrt()
}

fn wrap_angle(d: f64) -> f64 {
    let d = d.rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

/// Continuous directional wavelet transform of one image, evaluated pointwise.
///
/// `psi_{a,b,theta}` has Fourier coefficients
/// `e^{-2 pi i k.b} a^{3/4} W(2a|k|) phi((omega - theta) / sqrt(a))`, so it
/// oscillates along the direction `theta` with wavelength about `a` and is
/// elongated across it with length about `sqrt(a)`. Inner products use the
/// `L^2([0,1]^2)` normalisation of the sampled image.
#[derive(Clone, Debug)]
pub struct DwProbe {
    n: usize,
    spec: Spectrum,
}

/// Sampled angular profile `theta -> |DW(a, b, theta)|` and its integral.
#[derive(Clone, Debug)]
pub struct MicrolocalProfile {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// Periodic trapezoid rule over `[0, 2 pi)`.
    pub integral: f64,
}

struct Ring {
    pts: Vec<(f64, f64, f64, f64, Complex64)>,
}

impl DwProbe {
    pub fn new(img: &Image) -> Self {
        DwProbe { n: img.n(), spec: fft2_unitary(img) }
    }

    /// Scales whose frequency support stays below Nyquist.
    pub fn scale_range(n: usize) -> (f64, f64) {
        (3.0 / n as f64, 1.0)
    }

    fn check_scale(n: usize, a: f64) -> Result<()> {
        let (lo, hi) = Self::scale_range(n);
        if !(lo..=hi).contains(&a) {
            return Err(Error::param(format!("scale {a} outside [{lo}, {hi}] for side {n}")));
        }
        Ok(())
    }

    fn ring(&self, a: f64) -> Ring {
        let n = self.n;
        let (rlo, rhi) = (0.5 / a, 1.5 / a);
        let mut pts = Vec::new();
        for i1 in 0..n {
            let k1 = freq(i1, n) as f64;
            for i2 in 0..n {
                let k2 = freq(i2, n) as f64;
                let r = k1.hypot(k2);
                if r > rlo && r < rhi {
                    pts.push((k1, k2, radial(2.0 * a * r), k2.atan2(k1), self.spec.data()[i1 * n + i2]));
                }
            }
        }
        Ring { pts }
    }

    fn dw_on(&self, ring: &Ring, a: f64, b: (f64, f64), theta: f64) -> Complex64 {
        let sa = a.sqrt();
        let amp = a.powf(0.75) / self.n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k1, k2, w, om, f) in &ring.pts {
            let phi = angular_profile(wrap_angle(om - theta) / sa);
            if phi == 0.0 {
                continue;
            }
            // conj of e^{-2 pi i k.b}
            let ph = Complex64::from_polar(1.0, 2.0 * PI * (k1 * b.0 + k2 * b.1));
            acc += ph * f * (w * phi);
        }
        acc * amp
    }

    /// `DW(a, b, theta) = <psi_{a,b,theta}, f>`.
    pub fn dw(&self, a: f64, b: (f64, f64), theta: f64) -> Result<Complex64> {
        Self::check_scale(self.n, a)?;
        Ok(self.dw_on(&self.ring(a), a, b, theta))
    }

    /// Angular profile at `(a, b)`; by default 16 samples per angular window width.
    pub fn profile(&self, a: f64, b: (f64, f64), samples: Option<usize>) -> Result<MicrolocalProfile> {
        Self::check_scale(self.n, a)?;
        let m = samples.unwrap_or_else(|| ((32.0 * PI / a.sqrt()).ceil() as usize).max(256));
        let ring = self.ring(a);
        let thetas: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let values: Vec<f64> = thetas.iter().map(|&t| self.dw_on(&ring, a, b, t).norm()).collect();
        let integral = values.iter().sum::<f64>() * 2.0 * PI / m as f64;
        Ok(MicrolocalProfile { thetas, values, integral })
    }

    /// `Re psi_{a,b,theta}` sampled on the `n x n` grid.
    pub fn atom(n: usize, a: f64, b: (f64, f64), theta: f64) -> Result<Image> {
        Self::check_scale(n, a)?;
        let mut spec = Spectrum::zeros(n)?;
        let sa = a.sqrt();
        for i1 in 0..n {
            let k1 = freq(i1, n) as f64;
            for i2 in 0..n {
                let k2 = freq(i2, n) as f64;
                let phi = angular_profile(wrap_angle(k2.atan2(k1) - theta) / sa);
                let w = radial(2.0 * a * k1.hypot(k2));
                if phi * w == 0.0 {
                    continue;
                }
                let v = Complex64::from_polar(a.powf(0.75) * w * phi, -2.0 * PI * (k1 * b.0 + k2 * b.1));
                // unitary DFT of the samples of Re psi is n (Psi(k) + conj Psi(-k)) / 2
                spec.data_mut()[i1 * n + i2] += v * (n as f64 / 2.0);
                *spec.at_mut(-(k1 as i64), -(k2 as i64)) += v.conj() * (n as f64 / 2.0);
            }
        }
        Ok(crate::grid::ifft2_unitary(&spec))
    }

    /// `||psi_{a,b,theta}||^2` in `L^2([0,1]^2)`.
    pub fn atom_norm_sq(n: usize, a: f64, theta: f64) -> Result<f64> {
        Self::check_scale(n, a)?;
        let sa = a.sqrt();
        let mut s = 0.0;
        for i1 in 0..n {
            let k1 = freq(i1, n) as f64;
            for i2 in 0..n {
                let k2 = freq(i2, n) as f64;
                let v = a.powf(0.75) * radial(2.0 * a * k1.hypot(k2)) * angular_profile(wrap_angle(k2.atan2(k1) - theta) / sa);
                s += v * v;
            }
        }
        Ok(s)
    }
}

/// `1{x1 > 1/2}` under a Gaussian window of width `sigma`. The jump sits
/// between rows `n/2 - 1` and `n/2`; the returned point is its centre.
pub fn windowed_heaviside(n: usize, sigma: f64) -> Result<(Image, (f64, f64))> {
    let c = 0.5 - 0.5 / n as f64;
    let img = Image::from_fn(n, |x1, x2| {
        if x1 > c {
            (-((x1 - c).powi(2) + (x2 - c).powi(2)) / (2.0 * sigma * sigma)).exp()
        } else {
            0.0
        }
    })?;
    Ok((img, (c, c)))
}

/// Unit impulse at the centre pixel; it is band-limited to the lattice.
pub fn dirac_image(n: usize) -> Result<Image> {
    let mut img = Image::zeros(n)?;
    img.set(n / 2, n / 2, 1.0);
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::RateFit;

    #[test]
    fn self_inner_product_is_half_the_norm() {
        let n = 64;
        let (a, b, th) = (1.0 / 8.0, (0.3, 0.6), 0.7);
        let atom = DwProbe::atom(n, a, b, th).unwrap();
        let dw = DwProbe::new(&atom).dw(a, b, th).unwrap();
        let nsq = DwProbe::atom_norm_sq(n, a, th).unwrap();
        assert!((dw.re - nsq / 2.0).abs() < 1e-10 * nsq, "{dw} vs {}", nsq / 2.0);
        assert!(dw.im.abs() < 1e-10 * nsq);
    }

    #[test]
    fn scale_outside_range_is_rejected() {
        let p = DwProbe::new(&Image::zeros(32).unwrap());
        assert!(p.dw(1.0 / 64.0, (0.5, 0.5), 0.0).is_err());
        assert!(p.dw(2.0, (0.5, 0.5), 0.0).is_err());
        assert!(p.dw(0.25, (0.5, 0.5), 0.0).is_ok());
    }

    #[test]
    fn isotropic_bump_has_flat_profile() {
        let n = 128;
        let c = 0.5 - 0.5 / n as f64;
        let img = Image::from_fn(n, |x1, x2| (-((x1 - c).powi(2) + (x2 - c).powi(2)) / (2.0 * 0.01f64.powi(2))).exp()).unwrap();
        let p = DwProbe::new(&img).profile(1.0 / 32.0, (c, c), Some(96)).unwrap();
        let mean = p.values.iter().sum::<f64>() / p.values.len() as f64;
        for v in &p.values {
            assert!((v - mean).abs() < 0.01 * mean, "{v} vs {mean}");
        }
    }

    fn heaviside_512() -> (DwProbe, (f64, f64), Vec<f64>) {
        let (img, b) = windowed_heaviside(512, 0.25).unwrap();
        (DwProbe::new(&img), b, (4..8).map(|j| (-(j as f64)).exp2()).collect())
    }

    #[test]
    fn heaviside_decay_in_scale() {
        let (p, b, scales) = heaviside_512();
        let dw: Vec<f64> = scales.iter().map(|&a| p.dw(a, b, 0.0).unwrap().norm()).collect();
        let fit = RateFit::loglog(&scales, &dw).unwrap();
        assert!((fit.slope - 0.75).abs() < 0.1, "{}", fit.slope);
        for (&a, &d) in scales.iter().zip(&dw) {
            let off = p.dw(a, b, 4.0 * a.sqrt()).unwrap().norm();
            assert!(off <= 1e-3 * d, "{off} vs {d}");
        }
    }

    #[test]
    fn heaviside_angular_integral() {
        let (p, b, scales) = heaviside_512();
        let ints: Vec<f64> = scales.iter().map(|&a| p.profile(a, b, None).unwrap().integral).collect();
        let fit = RateFit::loglog(&scales, &ints).unwrap();
        assert!((fit.slope - 1.25).abs() < 0.15, "{}", fit.slope);
        let af = scales[3];
        let off = p.profile(af, (b.0 - 0.1, b.1), None).unwrap().integral;
        assert!(off <= 1e-3 * ints[3], "{off} vs {}", ints[3]);
    }
}
