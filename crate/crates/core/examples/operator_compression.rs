//! Wavelet-domain truncation of the periodic Hilbert transform.

use gma::grid::gaussian_vec;
use gma::wavelet::{czo_matrix, Filter, Kernel, TruncatedOperator};

fn main() -> gma::Result<()> {
    let n = 256;
    let m = czo_matrix(n, Kernel::Hilbert, Filter::D8, 3)?;
    let x = gaussian_vec(n, 1.0, 5);
    let exact = m.apply(&x);
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for eps in [1e-1, 1e-2, 1e-4, 1e-6] {
        let t = TruncatedOperator::new(&m, eps)?;
        let err = exact.iter().zip(t.apply(&x)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!("eps {eps:.0e}: {:>6} entries kept ({:.1} per row), relative error {:.2e}", t.nnz(), t.nnz() as f64 / n as f64, err / xn);
    }
    Ok(())
}
