//! Ridgelet coefficients of a windowed half plane concentrate on one direction.

use gma::curvelet::{edge_image, EdgeKind};
use gma::frame::Transform;
use gma::ridgelet::Ridgelet;
use gma::wavelet::{rearrangement, Filter};

fn main() -> gma::Result<()> {
    let n = 128;
    let img = edge_image(EdgeKind::HalfPlane, n)?;
    let c = Ridgelet::new(n, Filter::D8, 3)?.analyze(&img)?;
    let sorted = rearrangement(&c.values);
    let total = c.energy();
    for frac in [0.0005, 0.001, 0.01] {
        let k = (c.len() as f64 * frac).ceil() as usize;
        let e: f64 = sorted[..k].iter().map(|v| v * v).sum();
        println!("top {:>5.2}% ({k:>4} coefficients) carry {:.5} of the energy", 100.0 * frac, e / total);
    }
    Ok(())
}
