//! Intensity slices on a detection line x = L.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SlitError};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceSample {
    pub l: f64,
    pub y_grid: Vec<f64>,
    pub intensity: Vec<f64>,
    #[serde(skip)]
    pub amplitude: Vec<Complex64>,
}

impl SliceSample {
    pub fn len(&self) -> usize {
        self.y_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_grid.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.intensity.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn check_strictly_increasing(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(SlitError::domain("grid values must be finite"));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(SlitError::domain(format!(
            "grid not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Samples `field` on the line x = `l`.
pub fn intensity_slice<F: Field + ?Sized>(field: &F, l: f64, y_grid: &[f64]) -> Result<SliceSample> {
    check_strictly_increasing(y_grid)?;
    let amplitude = y_grid
        .iter()
        .map(|&y| field.value(l, y))
        .collect::<Result<Vec<_>>>()?;
    let intensity = amplitude.iter().map(|a| a.norm_sqr()).collect();
    Ok(SliceSample {
        l,
        y_grid: y_grid.to_vec(),
        intensity,
        amplitude,
    })
}

/// `n` equally spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Grid symmetric about zero: element `i` is exactly `-grid[n-1-i]`.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    let mut g = linspace(-half_width, half_width, n);
    let m = g.len();
    for i in 0..m / 2 {
        g[m - 1 - i] = -g[i];
    }
    if m % 2 == 1 {
        g[m / 2] = 0.0;
    }
    g
}
