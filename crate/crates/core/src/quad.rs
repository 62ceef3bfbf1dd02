//! Gauss–Kronrod quadrature.
//!
//! The 7-point Gauss / 15-point Kronrod pair with QUADPACK's error
//! rescaling, a globally adaptive driver that bisects the interval with the
//! largest error estimate, and a fixed composite rule. Interval bookkeeping
//! and the final summation run in a fixed order, so results are bitwise
//! reproducible.

#![allow(clippy::excessive_precision)]

use crate::error::{Result, SlitError};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// weights of the embedded Gauss rule at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

/// One application of the G7/K15 pair on [a, b]: (integral, error estimate).
pub fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration over [a, b] with interior breakpoints.
///
/// Breakpoints outside (a, b) are ignored. Fails with
/// [`SlitError::Quadrature`] when the interval budget runs out.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], settings: QuadSettings) -> Result<QuadEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(SlitError::domain(format!("invalid integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadEstimate { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut pieces = Vec::with_capacity(64);
    for w in cuts.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1])?;
        pieces.push(Piece { a: w[0], b: w[1], value, error });
    }
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let target = settings.abs_tol.max(settings.rel_tol * total.abs());
        if err <= target {
            return Ok(finish(pieces));
        }
        if pieces.len() >= settings.max_intervals {
            return Err(SlitError::Quadrature {
                estimate: total,
                error: err,
                intervals: pieces.len(),
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let Piece { a, b, .. } = pieces[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // cannot bisect further in floating point
            return Err(SlitError::Quadrature {
                estimate: total,
                error: err,
                intervals: pieces.len(),
            });
        }
        let (v1, e1) = gk15(&mut f, a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, b)?;
        pieces[worst] = Piece { a, b: mid, value: v1, error: e1 };
        pieces.push(Piece { a: mid, b, value: v2, error: e2 });
    }
}

fn finish(mut pieces: Vec<Piece>) -> QuadEstimate {
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    QuadEstimate {
        value: pieces.iter().map(|p| p.value).sum(),
        error: pieces.iter().map(|p| p.error).sum(),
        intervals: pieces.len(),
    }
}

/// Composite G7/K15 on `panels` equal panels (non-adaptive).
pub fn composite<F>(mut f: F, a: f64, b: f64, panels: usize) -> Result<QuadEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if panels == 0 {
        return Err(SlitError::domain("composite quadrature needs at least one panel"));
    }
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(SlitError::domain(format!("invalid integration range [{a}, {b}]")));
    }
    let h = (b - a) / panels as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { a + h * (i + 1) as f64 };
        let (v, e) = gk15(&mut f, lo, hi)?;
        value += v;
        error += e;
    }
    Ok(QuadEstimate { value, error, intervals: panels })
}

/// Trapezoid rule on a (not necessarily uniform) grid, with compensated
/// summation.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "trapezoid: length mismatch");
    compensated_sum(
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])),
    )
}

/// Neumaier's compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    sum + c
}
