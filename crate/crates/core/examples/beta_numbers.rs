//! Jones beta numbers for curves and clouds.

use gma::betascan::{beta_map, filament_statistic, jones_functional, PointCloud};

fn main() -> gma::Result<()> {
    let clouds = [
        ("segment", PointCloud::segment(300, (0.1, 0.2), (0.9, 0.7), 0.005, 1)?),
        ("circle", PointCloud::circle(300, (0.5, 0.5), 0.25, 0.0)?),
        ("uniform", PointCloud::uniform(300, 2)),
    ];
    for (name, cloud) in &clouds {
        let map = beta_map(cloud, 6)?;
        let level: Vec<String> = map.level_sums().iter().map(|s| format!("{s:.3}")).collect();
        println!(
            "{name:<8} functional {:.3}  filament statistic {:.3}  per level {level:?}",
            jones_functional(&map),
            filament_statistic(cloud, 5, 7)?
        );
    }
    Ok(())
}
