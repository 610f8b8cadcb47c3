use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Compactly supported orthonormal Daubechies filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Filter {
    Haar,
    D4,
    D6,
    D8,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

const D6: [f64; 6] = [
    0.332_670_552_950_082_616,
    0.806_891_509_311_092_576,
    0.459_877_502_118_491_570,
    -0.135_011_020_010_254_589,
    -0.085_441_273_882_026_662,
    0.035_226_291_885_709_537,
];

const D8: [f64; 8] = [
    0.230_377_813_308_896_501,
    0.714_846_570_552_915_647,
    0.630_880_767_929_858_908,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_084,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_200,
    -0.010_597_401_785_069_032,
];

impl Filter {
    pub const ALL: [Filter; 4] = [Filter::Haar, Filter::D4, Filter::D6, Filter::D8];

    /// Lowpass taps `h`, normalised so that `sum h = sqrt(2)`.
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            Filter::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            Filter::D4 => {
                let s = 4.0 * std::f64::consts::SQRT_2;
                vec![(1.0 + SQRT3) / s, (3.0 + SQRT3) / s, (3.0 - SQRT3) / s, (1.0 - SQRT3) / s]
            }
            Filter::D6 => D6.to_vec(),
            Filter::D8 => D8.to_vec(),
        }
    }

    /// Quadrature mirror highpass `g_k = (-1)^k h_{L-1-k}`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect()
    }

    pub fn len(self) -> usize {
        match self {
            Filter::Haar => 2,
            Filter::D4 => 4,
            Filter::D6 => 6,
            Filter::D8 => 8,
        }
    }

    pub fn vanishing_moments(self) -> usize {
        self.len() / 2
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Filter::Haar => "haar",
            Filter::D4 => "d4",
            Filter::D6 => "d6",
            Filter::D8 => "d8",
        };
        f.write_str(s)
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "d2" | "db1" => Ok(Filter::Haar),
            "d4" | "db2" => Ok(Filter::D4),
            "d6" | "db3" => Ok(Filter::D6),
            "d8" | "db4" => Ok(Filter::D8),
            other => Err(Error::Parse(format!("unknown wavelet filter '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_under_even_shifts() {
        for f in Filter::ALL {
            let h = f.lowpass();
            let g = f.highpass();
            let l = h.len();
            for s in (0..l).step_by(2) {
                let hh: f64 = (0..l - s).map(|k| h[k] * h[k + s]).sum();
                let gg: f64 = (0..l - s).map(|k| g[k] * g[k + s]).sum();
                let expect = if s == 0 { 1.0 } else { 0.0 };
                assert!((hh - expect).abs() < 1e-14, "{f} shift {s}");
                assert!((gg - expect).abs() < 1e-14, "{f} shift {s}");
            }
            for s in (-(l as i64) + 2..l as i64).step_by(2) {
                let hg: f64 = (0..l as i64)
                    .filter(|&k| k + s >= 0 && k + s < l as i64)
                    .map(|k| h[k as usize] * g[(k + s) as usize])
                    .sum();
                assert!(hg.abs() < 1e-14, "{f} cross shift {s}");
            }
            assert!((h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_moments() {
        for f in Filter::ALL {
            let g = f.highpass();
            for p in 0..f.vanishing_moments() {
                let m: f64 = g.iter().enumerate().map(|(k, v)| v * (k as f64).powi(p as i32)).sum();
                assert!(m.abs() < 1e-9, "{f} moment {p}: {m}");
            }
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("D8".parse::<Filter>().unwrap(), Filter::D8);
        assert_eq!("haar".parse::<Filter>().unwrap(), Filter::Haar);
        assert!("sym5".parse::<Filter>().is_err());
    }
}
