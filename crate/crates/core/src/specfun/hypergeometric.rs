use crate::error::{HorseError, Result};

const MAX_TERMS: usize = 20_000;

/// Kummer function M(a, b, z) = Φ(a, b; z) by its power series, summed with
/// Neumaier compensation.
pub fn confluent_hypergeometric(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b == b.round() {
        return Err(HorseError::invalid("b", b, "must not be a non-positive integer"));
    }
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    let mut small_run = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        if term == 0.0 {
            return Ok(sum + comp);
        }
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() < 1e-17 * (sum + comp).abs() {
            small_run += 1;
            // Require two consecutive small terms past the peak of the series.
            if small_run >= 2 && kf + a.abs() > z.abs() {
                return Ok(sum + comp);
            }
        } else {
            small_run = 0;
        }
    }
    Err(HorseError::NoConvergence {
        what: "confluent hypergeometric series",
        iterations: MAX_TERMS,
        estimate: sum + comp,
        error: term,
    })
}
