//! Reveals random distances among points in the plane and reconstructs as
//! many of them as possible.

use distance_recon::geometry::Tolerance;
use distance_recon::harness::max_distance_error;
use distance_recon::reconstruct::{run_pipeline, PipelineOptions};
use distance_recon::sim::{generate, reveal, GeneratorKind, InstanceSpec, RevealPlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = InstanceSpec::new(80, 2, 11, GeneratorKind::UniformCube { general_position: false });
    let points = generate(&spec)?;
    let opts = PipelineOptions {
        d: 2,
        delta: 0.1,
        tol: Tolerance::default(),
    };
    for p in [0.3, 0.5, 0.8] {
        let rounds = reveal(&points, &RevealPlan::new(p, 6, 5))?;
        let result = run_pipeline(&rounds, &opts)?;
        println!(
            "p = {p}: {} of {} points reconstructed, {} distances inferred, max error {:.2e}",
            result.indices.len(),
            points.len(),
            result.inferred.len(),
            max_distance_error(&points, &result)
        );
    }
    Ok(())
}
