//! Flat coefficient containers shared by all 2-D transforms.

use crate::error::Result;
use crate::grid::Image;
use serde::{Deserialize, Serialize};

/// A contiguous run of coefficients with common scale and noise statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub len: usize,
    /// Dyadic scale index; `None` marks the lowpass channel.
    pub scale: Option<usize>,
    /// Blocks sharing a group have (nearly) the same per-coefficient frame norm.
    pub group: usize,
    pub label: String,
}

/// Coefficients of an `n x n` image in some frame, with their block layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSet {
    pub n: usize,
    pub values: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl CoeffSet {
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_values(&self, values: Vec<f64>) -> CoeffSet {
        assert_eq!(values.len(), self.values.len());
        CoeffSet { n: self.n, values, blocks: self.blocks.clone() }
    }

    /// Scale index of every coefficient, `None` for the lowpass channel.
    pub fn scales(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.values.len()];
        for b in &self.blocks {
            out[b.start..b.start + b.len].iter_mut().for_each(|s| *s = b.scale);
        }
        out
    }

    pub fn groups(&self) -> usize {
        self.blocks.iter().map(|b| b.group + 1).max().unwrap_or(0)
    }
}

/// Analysis / synthesis pair on `n x n` images.
pub trait Transform: Send + Sync {
    fn name(&self) -> &'static str;
    fn n(&self) -> usize;
    fn analyze(&self, img: &Image) -> Result<CoeffSet>;
    /// Adjoint of `analyze`; for tight frames also its left inverse.
    fn synthesize(&self, coeffs: &CoeffSet) -> Result<Image>;
}

/// Builds blocks incrementally while coefficients are appended.
#[derive(Default)]
pub(crate) struct LayoutBuilder {
    pub values: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl LayoutBuilder {
    pub fn push(&mut self, data: &[f64], scale: Option<usize>, group: usize, label: impl Into<String>) {
        self.blocks.push(Block { start: self.values.len(), len: data.len(), scale, group, label: label.into() });
        self.values.extend_from_slice(data);
    }

    pub fn finish(self, n: usize) -> CoeffSet {
        CoeffSet { n, values: self.values, blocks: self.blocks }
    }
}

/// The transforms available to the estimators and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Wavelet,
    Ridgelet,
    Curvelet,
    Dirframe,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] =
        [TransformKind::Wavelet, TransformKind::Ridgelet, TransformKind::Curvelet, TransformKind::Dirframe];

    /// Default instance: D8 wavelets with coarse level 3 wherever a 1-D basis is needed.
    pub fn build(self, n: usize) -> Result<Box<dyn Transform>> {
        use crate::wavelet::Filter;
        Ok(match self {
            TransformKind::Wavelet => Box::new(crate::wavelet::Wavelet2d::new(n, Filter::D8, 3.min(n.trailing_zeros() as usize))?),
            TransformKind::Ridgelet => Box::new(crate::ridgelet::Ridgelet::new(n, Filter::D8, 3)?),
            TransformKind::Curvelet => Box::new(crate::curvelet::Curvelet::with_defaults(n)?),
            TransformKind::Dirframe => Box::new(crate::dirframe::DirFrame::with_defaults(n)?),
        })
    }

    /// Orthonormal bases need no noise calibration.
    pub fn is_orthonormal(self) -> bool {
        self == TransformKind::Wavelet
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Wavelet => "wavelet",
            TransformKind::Ridgelet => "ridgelet",
            TransformKind::Curvelet => "curvelet",
            TransformKind::Dirframe => "dirframe",
        }
    }
}

impl std::fmt::Display for TransformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TransformKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| crate::error::Error::param(format!("unknown transform '{s}'")))
    }
}
