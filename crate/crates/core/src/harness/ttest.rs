use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-tailed t at the 0.90 level with 4 degrees of freedom.
pub const DEFAULT_CRITICAL: f64 = 1.533;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_value: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub significant: bool,
}

/// Paired t-test on `a − b`, one-tailed in favour of `a`.
pub fn paired_t_test(a: &[f64], b: &[f64], critical: f64) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            op: "paired_t_test",
            left: (a.len(), 1),
            right: (b.len(), 1),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Data(format!("paired t-test needs at least 2 pairs, got {n}")));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Data("paired t-test inputs must be finite".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::Degenerate(
            "differences have zero variance; t is undefined".into(),
        ));
    }
    let t_value = mean / (var.sqrt() / (n as f64).sqrt());
    Ok(TTestResult {
        t_value,
        degrees_of_freedom: n - 1,
        critical_value: critical,
        significant: t_value > critical,
    })
}
