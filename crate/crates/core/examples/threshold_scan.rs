//! Small percolation threshold scan; prints the CSV table and the fit.

use distance_recon::geometry::Tolerance;
use distance_recon::harness::{eta_f64, scan_csv, scan_threshold, ScanConfig, ScanTarget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScanConfig {
        d: 1,
        ns: vec![40, 80, 160],
        ps: (0..12).map(|k| 0.02 * 1.3_f64.powi(k)).collect(),
        trials: 40,
        target: ScanTarget::Percolation,
        delta: 0.1,
    };
    let result = scan_threshold(&cfg, 1, &Tolerance::default())?;
    print!("{}", scan_csv(&result));
    for c in &result.crossings {
        println!("n = {}: p_c = {:?}", c.n, c.p_c);
    }
    if let Some(fit) = result.fit {
        println!("slope {:.3} ± {:.3}, reference {:.3}", fit.slope, fit.slope_stderr, -1.0 / eta_f64(1)?);
    }
    Ok(())
}
