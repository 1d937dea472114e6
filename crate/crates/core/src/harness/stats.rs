use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean and `n - 1` standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

pub fn ensemble_stats(values: &[f64]) -> Result<EnsembleStats> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "ensemble statistics need at least 2 values, got {}",
            values.len()
        )));
    }
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    Ok(EnsembleStats {
        mean,
        stddev: var.sqrt(),
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let s = ensemble_stats(&[2.0, 4.0]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!((s.stddev - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ensemble_stats(&[5.0; 7]).unwrap().stddev, 0.0);
        assert!(matches!(ensemble_stats(&[1.0]), Err(Error::InsufficientData(_))));
    }
}
