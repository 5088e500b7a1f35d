use num_rational::Ratio;

use super::HarnessError;

/// Percolation exponent of `K_{d+3}`: edges of the clique minus the two
/// already present, over its vertices minus the two endpoints.
pub fn eta(d: usize) -> Result<Ratio<i64>, HarnessError> {
    if d < 1 {
        return Err(HarnessError::InvalidDimension(d));
    }
    let v = d as i64 + 3;
    Ok(Ratio::new(v * (v - 1) / 2 - 2, v - 2))
}

/// `(d + 4)/2 - 1/(d + 1)`, the same exponent written without binomials.
pub fn eta_closed_form(d: usize) -> Result<Ratio<i64>, HarnessError> {
    if d < 1 {
        return Err(HarnessError::InvalidDimension(d));
    }
    let d = d as i64;
    Ok(Ratio::new(d + 4, 2) - Ratio::new(1, d + 1))
}

pub fn eta_f64(d: usize) -> Result<f64, HarnessError> {
    eta(d).map(|r| *r.numer() as f64 / *r.denom() as f64)
}

/// `(ln n / ln ln n)^(2/eta) * n^(-1/eta)`.
pub fn p_star(n: usize, d: usize) -> Result<f64, HarnessError> {
    if n < 3 {
        return Err(HarnessError::TooFewPoints(n));
    }
    let e = eta_f64(d)?;
    let ln = (n as f64).ln();
    Ok((ln / ln.ln()).powf(2.0 / e) * (n as f64).powf(-1.0 / e))
}
