//! Reference computations for the integration tests, written independently
//! of the library's numerics.

#![allow(dead_code)]

use num_complex::Complex64;
use slitlab::{Model, PhysicsParams};

/// Single-slit profile Ψ(x, s) straight from its closed form.
pub fn profile(p: &PhysicsParams, x: f64, s: f64) -> Complex64 {
    let k = p.k();
    match p.model() {
        Model::Gaussian => {
            let sig2 = p.sigma() * p.sigma();
            let q = Complex64::new(1.0, x / (k * sig2));
            (Complex64::i() * k * x - s * s / (2.0 * sig2 * q)).exp() * q.powf(-0.5)
        }
        Model::Point => Complex64::from_polar(x.powf(-0.5), k * x + k * s * s / (2.0 * x)),
    }
}

pub fn psi1(p: &PhysicsParams, x: f64, y: f64) -> Complex64 {
    profile(p, x, y + p.a())
}

pub fn psi2(p: &PhysicsParams, x: f64, y: f64) -> Complex64 {
    profile(p, x, y - p.a())
}

pub fn phi(p: &PhysicsParams, x: f64, y: f64) -> Complex64 {
    psi1(p, x, y) + psi2(p, x, y)
}

/// Composite trapezoid on `n` equally spaced points with Kahan summation.
pub fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for i in 0..n {
        let x = lo + (hi - lo) * (i as f64 / (n - 1) as f64);
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let term = w * f(x) - c;
        let t = sum + term;
        c = (t - sum) - term;
        sum = t;
    }
    sum * h
}

/// Fourth-order central difference.
pub fn derivative(f: impl Fn(f64) -> Complex64, t: f64, h: f64) -> Complex64 {
    (f(t - 2.0 * h) - f(t + 2.0 * h) + 8.0 * (f(t + h) - f(t - h))) / (12.0 * h)
}

/// Current of `f` at (x, y) from finite-difference derivatives.
pub fn fd_current(f: impl Fn(f64, f64) -> Complex64, x: f64, y: f64, h: f64) -> (f64, f64) {
    let v = f(x, y).conj();
    let dx = derivative(|t| f(t, y), x, h);
    let dy = derivative(|t| f(x, t), y, h);
    ((v * dx).im, (v * dy).im)
}

/// Fixed-step RK4 for dy/dx = g(x, y).
pub fn rk4(g: impl Fn(f64, f64) -> f64, x0: f64, y0: f64, x1: f64, steps: usize) -> f64 {
    let h = (x1 - x0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let x = x0 + h * i as f64;
        let k1 = g(x, y);
        let k2 = g(x + h / 2.0, y + h / 2.0 * k1);
        let k3 = g(x + h / 2.0, y + h / 2.0 * k2);
        let k4 = g(x + h, y + h * k3);
        y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    y
}

/// Quantile of a density on [lo, hi] by inverting its cumulative sum on a
/// dense grid with linear interpolation.
pub fn dense_quantile(density: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, q: f64) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    let rho: Vec<f64> = ys.iter().map(|&y| density(y)).collect();
    let mut cdf = vec![0.0; n];
    for i in 1..n {
        cdf[i] = cdf[i - 1] + 0.5 * h * (rho[i] + rho[i - 1]);
    }
    let target = q * cdf[n - 1];
    let j = cdf.iter().position(|&c| c >= target).unwrap().max(1);
    let t = (target - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
    ys[j - 1] + t * h
}

/// Strips the `timestamp` line from a JSON document rendered by the tool.
pub fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}
