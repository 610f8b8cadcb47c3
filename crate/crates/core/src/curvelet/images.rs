use crate::error::{Error, Result};
use crate::grid::Image;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Synthetic images that are smooth away from a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Indicator of the disk of radius 1/4 about the centre.
    Disk,
    /// A C^2 bump cut along a sinusoidal curve.
    SineCut,
    /// `1{x1 > 0} exp(-|x|^2)` in centred coordinates.
    HalfPlane,
}

/// Samples an edge image. Disk and sine cut use pixel centres `(i + 1/2)/n`;
/// the half plane uses centred grid points `i/n - 1/2`.
pub fn edge_image(kind: EdgeKind, n: usize) -> Result<Image> {
    let h = 0.5 / n as f64;
    match kind {
        EdgeKind::Disk => Image::from_fn(n, |x1, x2| {
            let (y1, y2) = (x1 + h - 0.5, x2 + h - 0.5);
            if y1 * y1 + y2 * y2 <= 0.0625 { 1.0 } else { 0.0 }
        }),
        EdgeKind::SineCut => Image::from_fn(n, |x1, x2| {
            let (y1, y2) = (x1 + h - 0.5, x2 + h - 0.5);
            let r2 = (y1 * y1 + y2 * y2) / 0.16;
            let bump = if r2 < 1.0 { (1.0 - r2).powi(3) } else { 0.0 };
            let curve = 0.08 * (2.0 * std::f64::consts::PI * 2.0 * y2).sin();
            if y1 > curve { bump } else { 0.0 }
        }),
        EdgeKind::HalfPlane => Image::from_fn(n, |x1, x2| {
            let (y1, y2) = (x1 - 0.5, x2 - 0.5);
            if y1 > 0.0 { (-(y1 * y1 + y2 * y2)).exp() } else { 0.0 }
        }),
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Disk => "disk",
            EdgeKind::SineCut => "sinecut",
            EdgeKind::HalfPlane => "halfplane",
        })
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disk" => Ok(EdgeKind::Disk),
            "sinecut" | "sine" => Ok(EdgeKind::SineCut),
            "halfplane" | "half-plane" => Ok(EdgeKind::HalfPlane),
            other => Err(Error::Parse(format!("unknown edge image '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_and_values() {
        let img = edge_image(EdgeKind::Disk, 512).unwrap();
        assert!(img.data().iter().all(|&v| v == 0.0 || v == 1.0));
        let area = img.data().iter().sum::<f64>() / (512.0 * 512.0);
        assert!((area - std::f64::consts::PI / 16.0).abs() < 1e-3);
    }

    #[test]
    fn disk_is_symmetric() {
        let img = edge_image(EdgeKind::Disk, 64).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert_eq!(img.get(i, j), img.get(63 - i, j));
                assert_eq!(img.get(i, j), img.get(j, i));
            }
        }
    }

    #[test]
    fn other_kinds_are_bounded() {
        for k in [EdgeKind::SineCut, EdgeKind::HalfPlane] {
            let img = edge_image(k, 64).unwrap();
            assert!(img.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
            assert!(img.norm_sq() > 0.0);
        }
        assert_eq!("disk".parse::<EdgeKind>().unwrap(), EdgeKind::Disk);
    }
}
