//! N-term errors of curvelets and wavelets on a smooth-edged object.

use gma::curvelet::{edge_image, Curvelet, EdgeKind};
use gma::frame::Transform;
use gma::wavelet::{nterm, nterm_error_curve, Filter, Wavelet2d};

fn main() -> gma::Result<()> {
    let n = 128;
    let img = edge_image(EdgeKind::SineCut, n)?;
    let cv = Curvelet::with_defaults(n)?;
    let cc = cv.analyze(&img)?;
    let wc = Wavelet2d::new(n, Filter::D8, 3)?.analyze(&img)?;
    println!("curvelet coefficients {}, redundancy {:.1}", cc.len(), cc.len() as f64 / (n * n) as f64);
    let ks = [64, 256, 1024, 4096];
    let we = nterm_error_curve(&wc.values, &ks);
    let n2 = (n * n) as f64;
    for (k, w) in ks.iter().zip(we) {
        let approx = cv.synthesize(&cc.with_values(nterm(&cc.values, *k).kept))?;
        let c = approx.sub(&img).norm_sq() / n2;
        println!("N={k:>5}  curvelet {c:.3e}  wavelet {:.3e}", w / n2);
    }
    Ok(())
}
