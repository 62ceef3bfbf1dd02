//! Monotone piecewise-cubic Hermite interpolation (PCHIP).
//!
//! Interior slopes are weighted harmonic means of the adjacent secants and
//! vanish at local extrema, so the interpolant never overshoots the data.

use crate::error::{Result, SlitError};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(SlitError::domain("interpolation: x and y lengths differ"));
        }
        if x.len() < 2 {
            return Err(SlitError::domain("interpolation needs at least two points"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SlitError::domain("interpolation abscissae must be strictly increasing"));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                let (d0, d1) = (delta[i - 1], delta[i]);
                if d0 * d1 > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.x_range();
        t >= lo && t <= hi
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Interpolated value; `None` outside the data range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !self.contains(t) {
            return None;
        }
        let i = self.segment(t);
        if t == self.x[i] {
            return Some(self.y[i]);
        }
        if t == self.x[i + 1] {
            return Some(self.y[i + 1]);
        }
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some(h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1])
    }

    /// First derivative of the interpolant; `None` outside the data range.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        if !self.contains(t) {
            return None;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let dh00 = 6.0 * s * (s - 1.0) / h;
        let dh10 = (1.0 - s) * (1.0 - 3.0 * s);
        let dh01 = -6.0 * s * (s - 1.0) / h;
        let dh11 = s * (3.0 * s - 2.0);
        Some(dh00 * self.y[i] + dh10 * self.d[i] + dh01 * self.y[i + 1] + dh11 * self.d[i + 1])
    }
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}
