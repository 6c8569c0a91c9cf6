//! Ordered spectra on a scan grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An ordered grid of abscissa values with complex ordinates, plus a record
/// of any grid points that had to be skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub x: Vec<f64>,
    pub y: Vec<Complex64>,
    /// Grid points dropped during evaluation, with the reason.
    pub skipped: Vec<(f64, String)>,
}

impl SpectrumSeries {
    pub fn new(x: Vec<f64>, y: Vec<Complex64>) -> Self {
        debug_assert_eq!(x.len(), y.len());
        SpectrumSeries {
            x,
            y,
            skipped: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Real parts of the ordinates.
    pub fn re(&self) -> Vec<f64> {
        self.y.iter().map(|v| v.re).collect()
    }

    /// Imaginary parts of the ordinates.
    pub fn im(&self) -> Vec<f64> {
        self.y.iter().map(|v| v.im).collect()
    }
}

/// Builds a uniform, strictly increasing grid of `points` samples.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    debug_assert!(points >= 2 && lo < hi);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
