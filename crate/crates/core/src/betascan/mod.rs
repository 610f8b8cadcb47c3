//! Jones beta numbers of planar point clouds over the dyadic quadtree of `[0,1]^2`.

mod hull;

pub use hull::{brute_force_width, brute_force_width_refined, convex_hull, directional_width, strip_width, COLLINEAR_EPS};

use crate::error::{Error, Result};
use crate::grid::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{PI, SQRT_2};

/// Points of the unit square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| !((0.0..=1.0).contains(&p.0) && (0.0..=1.0).contains(&p.1))) {
            return Err(Error::param(format!("point {i} = ({}, {}) lies outside [0,1]^2", p.0, p.1)));
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `m` i.i.d. uniform points.
    pub fn uniform(m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud { points: (0..m).map(|_| (rng.gen(), rng.gen())).collect() }
    }

    /// `m` equispaced points on a circle, starting at angle `phase`.
    pub fn circle(m: usize, centre: (f64, f64), r: f64, phase: f64) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|i| {
                    let t = phase + 2.0 * PI * i as f64 / m as f64;
                    (centre.0 + r * t.cos(), centre.1 + r * t.sin())
                })
                .collect(),
        )
    }

    /// `m` uniform points on the segment `a b`, each displaced normally by
    /// `jitter` across the segment (clamped to the square).
    pub fn segment(m: usize, a: (f64, f64), b: (f64, f64), jitter: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = dx.hypot(dy);
        if len == 0.0 {
            return Err(Error::param("segment endpoints coincide"));
        }
        let (nx, ny) = (-dy / len, dx / len);
        let pts = (0..m)
            .map(|_| {
                let t: f64 = rng.gen();
                let z: f64 = StandardNormal.sample(&mut rng);
                let z = z * jitter;
                ((a.0 + t * dx + z * nx).clamp(0.0, 1.0), (a.1 + t * dy + z * ny).clamp(0.0, 1.0))
            })
            .collect();
        Self::new(pts)
    }
}

/// Dyadic square `[k1, k1+1] x [k2, k2+1] 2^-j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub j: u32,
    pub k1: u64,
    pub k2: u64,
}

impl DyadicSquare {
    pub fn side(&self) -> f64 {
        (-(self.j as f64)).exp2()
    }

    pub fn diam(&self) -> f64 {
        SQRT_2 * self.side()
    }

    /// The concentric square of three times the side, not clipped to `[0,1]^2`.
    pub fn dilate3(&self) -> ((f64, f64), (f64, f64)) {
        let s = self.side();
        (((self.k1 as f64 - 1.0) * s, (self.k1 as f64 + 2.0) * s), ((self.k2 as f64 - 1.0) * s, (self.k2 as f64 + 2.0) * s))
    }

    pub fn dilate3_contains(&self, p: (f64, f64)) -> bool {
        let ((a1, b1), (a2, b2)) = self.dilate3();
        a1 <= p.0 && p.0 <= b1 && a2 <= p.1 && p.1 <= b2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEntry {
    pub square: DyadicSquare,
    /// Points in the closed dilate `3Q`.
    pub count: usize,
    pub width: f64,
    pub beta: f64,
}

/// `beta_Q = w_Q / diam(Q)` for every square whose dilate meets the cloud,
/// sorted by `(j, k1, k2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaMap {
    pub j_max: u32,
    pub entries: Vec<BetaEntry>,
}

/// Geometric bound: a strip of width `3 side` always contains `3Q`.
pub const BETA_BOUND: f64 = 3.0 / SQRT_2;

/// Deepest level supported; `2^j` must stay exact in the index arithmetic.
pub const MAX_LEVEL: u32 = 30;

impl BetaMap {
    pub fn get(&self, sq: DyadicSquare) -> Option<&BetaEntry> {
        self.entries.binary_search_by(|e| e.square.cmp(&sq)).ok().map(|i| &self.entries[i])
    }

    pub fn level(&self, j: u32) -> impl Iterator<Item = &BetaEntry> {
        self.entries.iter().filter(move |e| e.square.j == j)
    }

    /// `sum_{Q at level j} beta_Q^2 diam(Q)` for `j = 0..=j_max`.
    pub fn level_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.j_max as usize + 1];
        for e in &self.entries {
            s[e.square.j as usize] += e.beta * e.beta * e.square.diam();
        }
        s
    }

    /// Running totals of `level_sums`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.level_sums()
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }

    /// Median of `beta_Q` over the squares at level `j` with at least three points in `3Q`.
    pub fn median_beta(&self, j: u32) -> Option<f64> {
        let mut b: Vec<f64> = self.level(j).filter(|e| e.count > 2).map(|e| e.beta).collect();
        if b.is_empty() {
            return None;
        }
        b.sort_by(f64::total_cmp);
        let m = b.len();
        Some(if m % 2 == 1 { b[m / 2] } else { (b[m / 2 - 1] + b[m / 2]) / 2.0 })
    }
}

fn cell(x: f64, side: u64) -> u64 {
    ((x * side as f64).floor() as u64).min(side - 1)
}

/// Range of indices `k` with `(k-1)/2^j <= x <= (k+2)/2^j`, clamped to the square.
fn candidate_range(x: f64, side: u64) -> std::ops::RangeInclusive<u64> {
    let s = x * side as f64;
    let lo = (s - 2.0).ceil().max(0.0) as u64;
    let hi = ((s + 1.0).floor() as u64).min(side - 1);
    lo..=hi
}

fn level_entries(pts: &[(f64, f64)], j: u32) -> Vec<BetaEntry> {
    let side = 1u64 << j;
    let mut buckets: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    let mut squares = BTreeSet::new();
    for (i, &p) in pts.iter().enumerate() {
        buckets.entry((cell(p.0, side), cell(p.1, side))).or_default().push(i);
        for k1 in candidate_range(p.0, side) {
            for k2 in candidate_range(p.1, side) {
                squares.insert((k1, k2));
            }
        }
    }
    let squares: Vec<(u64, u64)> = squares.into_iter().collect();
    squares
        .par_iter()
        .filter_map(|&(k1, k2)| {
            let sq = DyadicSquare { j, k1, k2 };
            let mut inside = Vec::new();
            for c1 in k1.saturating_sub(2)..=(k1 + 2).min(side - 1) {
                for c2 in k2.saturating_sub(2)..=(k2 + 2).min(side - 1) {
                    if let Some(b) = buckets.get(&(c1, c2)) {
                        inside.extend(b.iter().map(|&i| pts[i]).filter(|&p| sq.dilate3_contains(p)));
                    }
                }
            }
            if inside.is_empty() {
                return None;
            }
            let count = inside.len();
            let width = if count <= 2 { 0.0 } else { strip_width(&inside) };
            Some(BetaEntry { square: sq, count, width, beta: width / sq.diam() })
        })
        .collect()
}

/// Beta numbers at every level `0..=j_max`.
pub fn beta_map(cloud: &PointCloud, j_max: u32) -> Result<BetaMap> {
    if j_max > MAX_LEVEL {
        return Err(Error::param(format!("j_max = {j_max} exceeds {MAX_LEVEL}")));
    }
    let mut pts = cloud.points.clone();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut entries = Vec::new();
    for j in 0..=j_max {
        entries.extend(level_entries(&pts, j));
    }
    Ok(BetaMap { j_max, entries })
}

/// `sum_Q beta_Q^2 diam(Q)` over the squares present in the map.
pub fn jones_functional(map: &BetaMap) -> f64 {
    map.level_sums().iter().sum()
}

/// Draws of the uniform null behind `filament_statistic`.
pub const NULL_DRAWS: usize = 64;

/// Smallest cloud accepted by `filament_statistic`.
pub const MIN_POINTS: usize = 10;

/// Jones functional at depth `j_max` divided by its mean over uniform clouds
/// of the same size; values well below 1 indicate points concentrated near curves.
pub fn filament_statistic(cloud: &PointCloud, j_max: u32, seed: u64) -> Result<f64> {
    if cloud.len() < MIN_POINTS {
        return Err(Error::param(format!("filament statistic needs at least {MIN_POINTS} points, got {}", cloud.len())));
    }
    let obs = jones_functional(&beta_map(cloud, j_max)?);
    let null: Vec<f64> = (0..NULL_DRAWS as u64)
        .into_par_iter()
        .map(|d| beta_map(&PointCloud::uniform(cloud.len(), derive_seed(seed, d)), j_max).map(|m| jones_functional(&m)))
        .collect::<Result<_>>()?;
    let mean = null.iter().sum::<f64>() / null.len() as f64;
    Ok(obs / mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::RateFit;

    #[test]
    fn rejects_points_outside() {
        assert!(PointCloud::new(vec![(0.5, 1.2)]).is_err());
        assert!(PointCloud::new(vec![(f64::NAN, 0.5)]).is_err());
        assert!(PointCloud::new(vec![(0.0, 1.0)]).is_ok());
    }

    #[test]
    fn dilate_is_unclipped() {
        let q = DyadicSquare { j: 1, k1: 0, k2: 1 };
        assert_eq!(q.dilate3(), ((-0.5, 1.0), (0.0, 1.5)));
        assert!((q.diam() - SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_line_is_flat() {
        let c = PointCloud::new((0..50).map(|i| (i as f64 / 49.0, i as f64 / 49.0)).collect()).unwrap();
        let m = beta_map(&c, 5).unwrap();
        assert!(m.entries.iter().all(|e| e.beta == 0.0));
        assert_eq!(jones_functional(&m), 0.0);
    }

    #[test]
    fn every_meeting_square_is_present() {
        let c = PointCloud::uniform(40, 3);
        let m = beta_map(&c, 3).unwrap();
        for j in 0..=3u32 {
            let side = 1u64 << j;
            for k1 in 0..side {
                for k2 in 0..side {
                    let sq = DyadicSquare { j, k1, k2 };
                    let count = c.points().iter().filter(|&&p| sq.dilate3_contains(p)).count();
                    match m.get(sq) {
                        Some(e) => assert_eq!(e.count, count),
                        None => assert_eq!(count, 0),
                    }
                }
            }
        }
        for e in &m.entries {
            assert!(e.beta >= 0.0 && e.beta <= BETA_BOUND);
            if e.count <= 2 {
                assert_eq!(e.beta, 0.0);
            }
        }
    }

    #[test]
    fn three_points_give_zero_where_sparse() {
        let c = PointCloud::new(vec![(0.1, 0.1), (0.9, 0.2), (0.4, 0.8)]).unwrap();
        let m = beta_map(&c, 4).unwrap();
        assert!(m.get(DyadicSquare { j: 0, k1: 0, k2: 0 }).unwrap().beta > 0.0);
        assert!(m.entries.iter().filter(|e| e.square.j >= 2).all(|e| e.beta == 0.0));
    }

    fn circle() -> PointCloud {
        PointCloud::circle(200, (0.5, 0.5), 0.25, 0.1).unwrap()
    }

    #[test]
    fn circle_betas_follow_curvature() {
        // chord of length L on a circle of radius r has sagitta L^2 / (8r);
        // with L ~ 3 side this makes beta ~ 2^-j
        let m = beta_map(&circle(), 6).unwrap();
        let lv: Vec<f64> = (2..=6).map(|j| j as f64).collect();
        let med: Vec<f64> = (2..=6).map(|j| m.median_beta(j).unwrap().log2()).collect();
        let fit = RateFit::linear(&lv, &med).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.2, "{} {med:?}", fit.slope);
    }

    #[test]
    fn uniform_betas_are_large() {
        let m = beta_map(&PointCloud::uniform(200, 8), 4).unwrap();
        for j in 1..=2 {
            assert!(m.median_beta(j).unwrap() >= 0.1);
        }
    }

    #[test]
    fn circle_functional_converges() {
        let c = circle();
        let a = jones_functional(&beta_map(&c, 6).unwrap());
        let b = jones_functional(&beta_map(&c, 8).unwrap());
        assert!((b - a).abs() <= 0.05 * a, "{a} {b}");
        let inc = beta_map(&c, 8).unwrap().level_sums();
        assert!(inc[6] < inc[3], "{inc:?}");
    }

    #[test]
    fn uniform_functional_diverges() {
        let inc = beta_map(&PointCloud::uniform(500, 21), 4).unwrap().level_sums();
        for j in 1..4 {
            assert!(inc[j + 1] >= 1.5 * inc[j], "{inc:?}");
        }
    }

    #[test]
    fn order_independent() {
        let c = PointCloud::uniform(60, 5);
        let mut rev = c.points().to_vec();
        rev.reverse();
        let a = beta_map(&c, 4).unwrap();
        assert_eq!(a, beta_map(&PointCloud::new(rev).unwrap(), 4).unwrap());
        assert_eq!(a, beta_map(&c, 4).unwrap());
    }

    #[test]
    fn filament_separates_clouds() {
        let j = 5;
        let line = PointCloud::segment(200, (0.1, 0.2), (0.9, 0.7), 0.01, 1).unwrap();
        let uni = PointCloud::uniform(200, 999);
        let s_line = filament_statistic(&line, j, 7).unwrap();
        let s_uni = filament_statistic(&uni, j, 7).unwrap();
        let s_circ = filament_statistic(&circle(), j, 7).unwrap();
        assert!(s_line <= 0.3, "{s_line}");
        assert!(s_circ <= 0.5, "{s_circ}");
        assert!((s_uni - 1.0).abs() <= 0.25, "{s_uni}");
        assert!(filament_statistic(&PointCloud::uniform(9, 0), j, 0).is_err());
    }
}
