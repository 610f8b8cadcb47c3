//! Risk of hard thresholding in white noise for two transforms.

use gma::curvelet::{edge_image, EdgeKind};
use gma::estimate::{risk_curve, Denoiser};
use gma::frame::TransformKind;

fn main() -> gma::Result<()> {
    let n = 128;
    let img = edge_image(EdgeKind::Disk, n)?;
    let eps = [0.04, 0.02, 0.01, 0.005];
    for kind in [TransformKind::Wavelet, TransformKind::Curvelet] {
        let r = risk_curve(&img, &Denoiser::new(kind, n, 0)?, &eps, 8, 1)?;
        println!("{}", r.estimator);
        for p in &r.points {
            println!("  eps {:<7} mse {:.3e} +- {:.1e}", p.eps, p.mse, p.se);
        }
        if let Some(x) = r.exponent() {
            println!("  exponent {x:.3}");
        }
    }
    Ok(())
}
