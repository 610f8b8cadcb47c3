use super::{dwt_1d, idwt_1d, Filter, WaveletCoeffs1d};
use crate::error::{Error, Result};
use crate::grid::{fft1_unitary, freq, ifft1_unitary};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Translation-invariant operators given by Fourier multipliers on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Identity,
    Zero,
    /// `-i sign(k)`, vanishing at DC and Nyquist.
    Hilbert,
    /// `|k|^{-order}`, vanishing at DC.
    FractionalIntegration { order: f64 },
}

impl Kernel {
    pub fn multiplier(&self, k: i64, n: usize) -> Complex64 {
        match *self {
            Kernel::Identity => Complex64::new(1.0, 0.0),
            Kernel::Zero => Complex64::new(0.0, 0.0),
            Kernel::Hilbert => {
                if k == 0 || k == -(n as i64) / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -(k.signum() as f64))
                }
            }
            Kernel::FractionalIntegration { order } => {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((k.abs() as f64).powf(-order), 0.0)
                }
            }
        }
    }

    /// Applies the multiplier to a real periodic signal.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft1_unitary(&mut buf);
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= self.multiplier(freq(i, n), n);
        }
        ifft1_unitary(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Identity => f.write_str("identity"),
            Kernel::Zero => f.write_str("zero"),
            Kernel::Hilbert => f.write_str("hilbert"),
            Kernel::FractionalIntegration { order } => write!(f, "fracint:{order}"),
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (name, arg) = match lower.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (lower.as_str(), None),
        };
        match (name, arg) {
            ("identity", None) => Ok(Kernel::Identity),
            ("zero", None) => Ok(Kernel::Zero),
            ("hilbert", None) => Ok(Kernel::Hilbert),
            ("fracint" | "fractional", Some(a)) => {
                let order: f64 = a.parse().map_err(|_| Error::Parse(format!("bad order '{a}'")))?;
                if !(order > 0.0 && order < 1.0) {
                    return Err(Error::Parse(format!("fractional order {order} outside (0, 1)")));
                }
                Ok(Kernel::FractionalIntegration { order })
            }
            _ => Err(Error::Parse(format!("unknown kernel '{s}'"))),
        }
    }
}

/// Dense matrix `M_ij = <psi_i, T psi_j>` in a periodized wavelet basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub n: usize,
    pub filter: Filter,
    pub j_coarse: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

impl OperatorMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.data[i * n..(i + 1) * n];
                let mut acc = 0.0;
                for (m, v) in row.iter().zip(x) {
                    acc += m * v;
                }
                acc
            })
            .collect()
    }

    /// Largest row sum `sum_j |M_ij|`.
    pub fn max_row_l1(&self) -> f64 {
        self.data.chunks(self.n).map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Builds the wavelet-domain matrix of `kernel` column by column.
pub fn czo_matrix(n: usize, kernel: Kernel, filter: Filter, j_coarse: usize) -> Result<OperatorMatrix> {
    // validates the size up front
    dwt_1d(&vec![0.0; n], filter, j_coarse)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let psi = idwt_1d(&WaveletCoeffs1d::from_flat(filter, j_coarse, &e)?)?;
            Ok(dwt_1d(&kernel.apply(&psi), filter, j_coarse)?.flatten())
        })
        .collect::<Result<_>>()?;
    let mut data = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            data[i * n + j] = *v;
        }
    }
    Ok(OperatorMatrix { n, filter, j_coarse, data })
}

/// Sparse operator keeping entries with `|M_ij| >= eps / n` (CSR layout).
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub n: usize,
    pub eps: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl TruncatedOperator {
    /// The dropped part has Frobenius norm at most `eps`, hence operator norm at most `eps`.
    pub fn new(m: &OperatorMatrix, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::param("truncation level must be non-negative"));
        }
        let n = m.n;
        let cut = eps / n as f64;
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v.abs() >= cut {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(TruncatedOperator { n, eps, row_ptr, cols, vals })
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let mut acc = 0.0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * x[self.cols[p]];
                }
                acc
            })
            .collect()
    }
}

/// Applies the truncated operator; returns the product and the retained count.
pub fn band_truncate_apply(m: &OperatorMatrix, x: &[f64], eps: f64) -> Result<(Vec<f64>, usize)> {
    if x.len() != m.n {
        return Err(Error::size("vector length does not match operator"));
    }
    let t = TruncatedOperator::new(m, eps)?;
    Ok((t.apply(x), t.nnz()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gaussian_vec;

    #[test]
    fn identity_and_zero_kernels() {
        let id = czo_matrix(64, Kernel::Identity, Filter::D4, 2).unwrap();
        let z = czo_matrix(64, Kernel::Zero, Filter::D4, 2).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - e).abs() < 1e-12);
                assert_eq!(z.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn hilbert_is_antisymmetric() {
        let m = czo_matrix(64, Kernel::Hilbert, Filter::D8, 3).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert!((m.get(i, j) + m.get(j, i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_matches_operator() {
        let n = 128;
        let k = Kernel::FractionalIntegration { order: 0.5 };
        let m = czo_matrix(n, k, Filter::D4, 2).unwrap();
        let x = gaussian_vec(n, 1.0, 1);
        let direct = dwt_1d(&k.apply(&idwt_1d(&WaveletCoeffs1d::from_flat(Filter::D4, 2, &x).unwrap()).unwrap()), Filter::D4, 2)
            .unwrap()
            .flatten();
        let y = m.apply(&x);
        for (a, b) in y.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_truncation_is_bit_identical() {
        let m = czo_matrix(64, Kernel::Hilbert, Filter::D8, 3).unwrap();
        let x = gaussian_vec(64, 1.0, 2);
        let (y, nnz) = band_truncate_apply(&m, &x, 0.0).unwrap();
        assert_eq!(nnz, 64 * 64);
        assert_eq!(y, m.apply(&x));
    }

    #[test]
    fn truncation_error_bound() {
        let m = czo_matrix(128, Kernel::Hilbert, Filter::D8, 3).unwrap();
        let x = gaussian_vec(128, 1.0, 3);
        let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let exact = m.apply(&x);
        for eps in [1e-1, 1e-3, 1e-5] {
            let (y, _) = band_truncate_apply(&m, &x, eps).unwrap();
            let err = exact.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(err <= eps * xn, "{eps}: {err}");
        }
    }

    #[test]
    fn kernel_parsing() {
        assert_eq!("hilbert".parse::<Kernel>().unwrap(), Kernel::Hilbert);
        assert_eq!("fracint:0.25".parse::<Kernel>().unwrap(), Kernel::FractionalIntegration { order: 0.25 });
        assert!("riesz".parse::<Kernel>().is_err());
        assert!("fracint:2".parse::<Kernel>().is_err());
        assert!("fracint".parse::<Kernel>().is_err());
    }

    #[test]
    fn hilbert_rows_are_uniformly_summable() {
        let l1: Vec<f64> = [128, 256, 512].iter().map(|&n| czo_matrix(n, Kernel::Hilbert, Filter::D8, 3).unwrap().max_row_l1()).collect();
        // the bound is uniform in n: growth stays far below the sqrt(n) of a generic unit row
        assert!(l1[2] <= 1.25 * l1[0], "{l1:?}");
        assert!(l1.iter().all(|v| *v < 10.0), "{l1:?}");
    }

    #[test]
    fn huge_tolerance_drops_everything() {
        let m = czo_matrix(64, Kernel::Hilbert, Filter::D8, 3).unwrap();
        let (y, nnz) = band_truncate_apply(&m, &gaussian_vec(64, 1.0, 4), 1e9).unwrap();
        assert_eq!(nnz, 0);
        assert!(y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nnz_is_affine_in_log_tolerance() {
        for n in [128, 256] {
            let m = czo_matrix(n, Kernel::Hilbert, Filter::D8, 3).unwrap();
            let eps = [1e-2, 1e-4, 1e-6];
            let x: Vec<f64> = eps.iter().map(|e: &f64| e.recip().ln()).collect();
            let y: Vec<f64> = eps.iter().map(|&e| TruncatedOperator::new(&m, e).unwrap().nnz() as f64 / n as f64).collect();
            assert!(y.windows(2).all(|w| w[1] >= w[0]));
            assert!(crate::fit::RateFit::linear(&x, &y).unwrap().r2 >= 0.9, "{n}: {y:?}");
        }
    }
}
