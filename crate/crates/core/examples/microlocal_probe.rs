//! Continuous directional wavelet transform near and away from an edge.

use gma::dirframe::{windowed_heaviside, DwProbe};

fn main() -> gma::Result<()> {
    let n = 256;
    let (img, b) = windowed_heaviside(n, 0.25)?;
    let probe = DwProbe::new(&img);
    println!("{:>10} {:>12} {:>12} {:>12}", "a", "|dw| normal", "on edge", "off edge");
    for j in 3..7 {
        let a = (-(j as f64)).exp2();
        let normal = probe.dw(a, b, 0.0)?.norm();
        let on = probe.profile(a, b, None)?.integral;
        let off = probe.profile(a, (b.0 - 0.1, b.1), None)?.integral;
        println!("{a:>10.5} {normal:>12.4e} {on:>12.4e} {off:>12.4e}");
    }
    Ok(())
}
