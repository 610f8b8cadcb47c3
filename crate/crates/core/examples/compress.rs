//! Bit cost of coding a Besov-ball sample to a sequence of tolerances.

use gma::wavelet::{besov_ball_sample, compress_to_tolerance, decode, BesovParams, Filter};

fn main() -> gma::Result<()> {
    let p = BesovParams::new(1.0, 1.0, f64::INFINITY)?;
    let c = besov_ball_sample(Filter::D8, 1 << 12, 3, p, 11)?.flatten();
    for k in 3..9 {
        let eps = (-(k as f64)).exp2();
        let r = compress_to_tolerance(&c, eps)?;
        let back = decode(&r.encoded)?;
        let err = c.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!("eps 2^-{k}: {:>6} bits, {:>4} coefficients, error {err:.3e}", r.bits(), r.m);
    }
    Ok(())
}
