//! Best N-term wavelet approximation of a disk indicator.

use gma::curvelet::{edge_image, EdgeKind};
use gma::fit::RateFit;
use gma::frame::Transform;
use gma::wavelet::{nterm_error_curve, Filter, Wavelet2d};

fn main() -> gma::Result<()> {
    let n = 256;
    let img = edge_image(EdgeKind::Disk, n)?;
    let c = Wavelet2d::new(n, Filter::D8, 3)?.analyze(&img)?;
    let ks: Vec<usize> = (6..=11).map(|k| 1 << k).collect();
    let n2 = (n * n) as f64;
    let errs: Vec<f64> = nterm_error_curve(&c.values, &ks).into_iter().map(|e| e / n2).collect();
    for (k, e) in ks.iter().zip(&errs) {
        println!("N={k:>6}  squared error {e:.3e}");
    }
    let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    println!("log-log slope {:.3}", RateFit::loglog(&x, &errs)?.slope);
    Ok(())
}
