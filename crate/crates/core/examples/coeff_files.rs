//! Saving and reloading frame coefficients with checksummed metadata.

use gma::cli::io::CoeffFile;
use gma::curvelet::{edge_image, EdgeKind};
use gma::frame::TransformKind;

fn main() -> gma::Result<()> {
    let dir = std::env::temp_dir().join("gma-example");
    std::fs::create_dir_all(&dir)?;
    let img = edge_image(EdgeKind::Disk, 64)?;
    let kind = TransformKind::Dirframe;
    let c = kind.build(64)?.analyze(&img)?;
    let ratio = c.energy() / img.norm_sq();
    let path = dir.join("disk.coeffs");
    CoeffFile::new(kind, c.clone(), ratio, String::new(), serde_json::json!({"example": true})).save(&path)?;
    let back = CoeffFile::load(&path)?;
    println!("{} coefficients, {} blocks, parseval ratio {:.12}", back.coeffs.len(), back.meta.blocks.len(), back.meta.parseval_ratio);
    println!("bit-exact: {}", back.coeffs.values == c.values);
    Ok(())
}
