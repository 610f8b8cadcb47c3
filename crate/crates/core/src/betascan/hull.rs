use std::cmp::Ordering;

/// Collinearity tolerance for the orientation test.
pub const COLLINEAR_EPS: f64 = 1e-12;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn lex(a: &(f64, f64), b: &(f64, f64)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Counter-clockwise convex hull by Andrew's monotone chain. Collinear and
/// duplicate points are dropped, so a degenerate set returns at most two points.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(lex);
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut h: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let lower = h.len();
        let it: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in it {
            while h.len() >= lower + 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= COLLINEAR_EPS {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
    }
    if h.len() < 3 {
        // all collinear: keep the extremes
        return vec![p[0], p[p.len() - 1]];
    }
    h
}

fn edge_dist(a: (f64, f64), b: (f64, f64), q: (f64, f64)) -> f64 {
    cross(a, b, q).abs() / (b.0 - a.0).hypot(b.1 - a.1)
}

/// Width of the thinnest strip containing all points.
///
/// The optimal strip has one side along a hull edge, so rotating calipers walk
/// the antipodal vertex once around the hull.
pub fn strip_width(points: &[(f64, f64)]) -> f64 {
    let h = convex_hull(points);
    let m = h.len();
    if m < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut j = 1;
    for i in 0..m {
        let (a, b) = (h[i], h[(i + 1) % m]);
        while edge_dist(a, b, h[(j + 1) % m]) > edge_dist(a, b, h[j]) {
            j = (j + 1) % m;
        }
        best = best.min(edge_dist(a, b, h[j]));
    }
    best
}

/// Extent of the points along the unit direction at angle `theta`.
pub fn directional_width(points: &[(f64, f64)], theta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let t = c * p.0 + s * p.1;
        (lo.min(t), hi.max(t))
    });
    if points.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Minimum of `directional_width` over `samples` equispaced angles in `[0, pi)`.
pub fn brute_force_width(points: &[(f64, f64)], samples: usize) -> f64 {
    (0..samples)
        .map(|i| directional_width(points, std::f64::consts::PI * i as f64 / samples as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Sweep over `samples` angles, each near-optimal sample polished by golden
/// section. Between breakpoints the width is `|a cos t + b sin t|`, so the
/// polish lands on the true minimum to rounding.
pub fn brute_force_width_refined(points: &[(f64, f64)], samples: usize) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let step = std::f64::consts::PI / samples as f64;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = f64::INFINITY;
    for i in 0..samples {
        let t = i as f64 * step;
        let w = directional_width(points, t);
        best = best.min(w);
        if w > best + 4.0 * step {
            continue;
        }
        let (mut lo, mut hi) = (t - step, t + step);
        for _ in 0..80 {
            let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if directional_width(points, x1) < directional_width(points, x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        best = best.min(directional_width(points, (lo + hi) / 2.0));
    }
    best
}
