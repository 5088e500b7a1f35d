//! Counts degenerate families of a few instance families and finds a dense
//! low-dimensional subspace.

use distance_recon::geometry::Tolerance;
use distance_recon::sim::{default_mu, dependent_family_count, find_dense_subspace, generate, GeneratorKind, InstanceSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let families = [
        ("uniform cube", GeneratorKind::UniformCube { general_position: true }),
        ("hyperplane", GeneratorKind::HyperplaneAdversarial),
        ("subspace cluster", GeneratorKind::SubspaceCluster { subspace_dim: 1, fraction: 0.7 }),
        ("lattice", GeneratorKind::Lattice { side: 2 }),
    ];
    for (name, kind) in families {
        let points = generate(&InstanceSpec::new(30, 2, 3, kind))?;
        let dependent = dependent_family_count(&points, 2, &tol)?;
        let dense = find_dense_subspace(&points, default_mu(2), &tol)?;
        println!(
            "{name:>16}: {dependent:>5} collinear triples, densest subspace dim {} with {} points",
            dense.dim,
            dense.members.len()
        );
    }
    Ok(())
}
