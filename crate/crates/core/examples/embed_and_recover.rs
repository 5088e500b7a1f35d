//! Embeds a configuration from its squared distances and reads a missing
//! distance off an independent base.

use distance_recon::geometry::{
    embed_from_distances, is_independent, recover_missing_distance, MissingDistance, PointConfig, Tolerance,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let points = PointConfig::from_integer_points(2, &[vec![0, 0], vec![4, 1], vec![1, 3], vec![3, 4], vec![-2, 2]])?;
    let full = points.distance_matrix();
    let embedded = embed_from_distances(&full, 2, &tol)?;
    for (i, p) in embedded.points().iter().enumerate() {
        println!("point {i}: ({:.4}, {:.4})", p[0], p[1]);
    }

    let base = full.submatrix(&[2, 3, 4]);
    println!("base {{2, 3, 4}} independent: {}", is_independent(&base, 2, &tol)?);

    let mut partial = full.clone();
    partial.clear(0, 1);
    match recover_missing_distance(&partial, 2, &tol)? {
        MissingDistance::Determined(d2) => println!("recovered |p0 - p1|^2 = {d2:.6} (truth {})", full.at(0, 1)),
        MissingDistance::Dependent => println!("base is dependent, distance not determined"),
    }

    let line = PointConfig::from_integer_points(2, &[vec![0, 0], vec![5, 5], vec![1, 1], vec![2, 2], vec![3, 3]])?;
    let mut flat = line.distance_matrix();
    flat.clear(0, 1);
    println!("collinear base: {:?}", recover_missing_distance(&flat, 2, &tol)?);
    Ok(())
}
