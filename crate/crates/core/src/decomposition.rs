//! Half-plane split of the two-slit state, norm and flux bookkeeping, and
//! the mirror (method of images) comparison.
//!
//! Φ = ψ_lower + ψ_upper where ψ_lower is Φ on y < 0 and ψ_upper is Φ on
//! y > 0, each taking Φ/2 on the line itself. Because the supports are
//! disjoint the squared norms add, while the one-slit substates ψ₁, ψ₂ do
//! not: ‖Φ‖² − ‖ψ₁‖² − ‖ψ₂‖² = 2 Re⟨ψ₁|ψ₂⟩.

use num_complex::Complex64;
use serde::Serialize;

use crate::current::CurrentVector;
use crate::error::{Result, SlitError};
use crate::field::{one_slit_amplitude, Field, FieldKind, Side, Slit, WaveField};
use crate::params::{Model, PhysicsParams};
use crate::quad::{self, QuadEstimate, QuadSettings};

/// ψ_lower and ψ_upper of the two-slit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposedState {
    pub lower: WaveField,
    pub upper: WaveField,
}

pub fn split_two_slit(params: PhysicsParams) -> DecomposedState {
    DecomposedState {
        lower: WaveField { kind: FieldKind::RestrictedLower, params },
        upper: WaveField { kind: FieldKind::RestrictedUpper, params },
    }
}

/// Cutoff replacing the full line: slit centers ± 8 local beam widths.
/// Only defined for the Gaussian model.
pub fn full_line_cutoff(params: &PhysicsParams, x: f64) -> Option<f64> {
    match params.model() {
        Model::Gaussian => Some(params.a() + 8.0 * params.beam_width(x)),
        Model::Point => None,
    }
}

fn weight_bound(field: &WaveField) -> f64 {
    match field.kind {
        FieldKind::Weighted { c1, c2 } => c1.norm_sqr().max(c2.norm_sqr()),
        _ => 1.0,
    }
}

/// Finite window actually integrated, plus a bound on the intensity left
/// outside it when an unbounded window was requested.
fn resolve_window(field: &WaveField, l: f64, window: (f64, f64)) -> Result<((f64, f64), f64)> {
    let (lo, hi) = window;
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(SlitError::domain(format!("invalid window {window:?}")));
    }
    let image = matches!(field.kind, FieldKind::ImageNeumann | FieldKind::ImageDirichlet);
    if lo.is_finite() && hi.is_finite() {
        return Ok(((lo, hi), 0.0));
    }
    let p = &field.params;
    let cut = full_line_cutoff(p, l).ok_or_else(|| {
        SlitError::domain("point-model fields are not normalizable; use a finite window")
    })?;
    let lo = if lo.is_finite() { lo } else if image { 0.0 } else { -cut };
    let hi = if hi.is_finite() { hi } else { cut };
    if !(lo < hi) {
        return Err(SlitError::domain(format!("window {window:?} is empty after truncation")));
    }
    // erfc(8) <= e^{-64} / (8 √π); two beams, factor 2 from |u+v|² <= 2|u|² + 2|v|², two sides
    let w = p.beam_width(l);
    let peak = p.sigma() / w;
    let tail = 8.0 * weight_bound(field) * peak * w * 0.5 * std::f64::consts::PI.sqrt()
        * (-64.0f64).exp()
        / (8.0 * std::f64::consts::PI.sqrt());
    Ok(((lo, hi), tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormEstimate {
    pub value: f64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
    pub window: (f64, f64),
}

/// ∫ |field(L, y)|² dy over `window` with the error budget reported.
///
/// Infinite endpoints are allowed for the Gaussian model and are replaced by
/// the 8-width cutoff.
pub fn windowed_norm_estimate(field: &WaveField, l: f64, window: (f64, f64)) -> Result<NormEstimate> {
    let (w, tail_bound) = resolve_window(field, l, window)?;
    let est = integrate_on_line(field, w, |f, y| Ok(f.value(l, y)?.norm_sqr()))?;
    Ok(NormEstimate { value: est.value, quadrature_error: est.error, tail_bound, window: w })
}

pub fn windowed_norm(field: &WaveField, l: f64, window: (f64, f64)) -> Result<f64> {
    Ok(windowed_norm_estimate(field, l, window)?.value)
}

fn integrate_on_line<F, G>(field: &F, (lo, hi): (f64, f64), integrand: G) -> Result<QuadEstimate>
where
    F: Field + ?Sized,
    G: Fn(&F, f64) -> Result<f64>,
{
    quad::integrate(|y| integrand(field, y), lo, hi, field.breakpoints(), QuadSettings::default())
}

/// 2 Re⟨ψ₁|ψ₂⟩ over `window` on the line x = L.
///
/// The cross term can be many orders of magnitude below ∫|2ψ₁ψ₂| (fringes
/// average out), so the accuracy target is absolute: 1e-13 of that scale.
pub fn overlap_cross_term(params: &PhysicsParams, l: f64, window: (f64, f64)) -> Result<f64> {
    let field = WaveField::two_slit(*params);
    let (w, _) = resolve_window(&field, l, window)?;
    let cross = |y: f64| -> Result<Complex64> {
        let a = one_slit_amplitude(params, Slit::First, l, y)?.value;
        let b = one_slit_amplitude(params, Slit::Second, l, y)?.value;
        Ok(2.0 * a.conj() * b)
    };
    let scale = quad::composite(|y| Ok(cross(y)?.norm()), w.0, w.1, 64)?.value;
    let settings = QuadSettings { abs_tol: 1e-13 * scale, ..QuadSettings::default() };
    let est = quad::integrate(|y| Ok(cross(y)?.re), w.0, w.1, &[], settings)?;
    Ok(est.value)
}

/// ∫ j_y(x, 0) dx over `x_range` by composite Gauss–Kronrod on `panels` panels.
pub fn symmetry_line_flux<F: Field + ?Sized>(field: &F, x_range: (f64, f64), panels: usize) -> Result<f64> {
    let (x1, x2) = x_range;
    if !(x1 < x2) {
        return Err(SlitError::domain(format!("need x1 < x2, got {x_range:?}")));
    }
    let est = quad::composite(
        |x| Ok(CurrentVector::from_sample(&field.sample(x, 0.0)?).jy),
        x1,
        x2,
        panels,
    )?;
    Ok(est.value)
}

/// ∫ |Φ(x, 0)|² dx, the natural scale for [`symmetry_line_flux`].
pub fn symmetry_line_density<F: Field + ?Sized>(field: &F, x_range: (f64, f64), panels: usize) -> Result<f64> {
    let est = quad::composite(|x| Ok(field.value(x, 0.0)?.norm_sqr()), x_range.0, x_range.1, panels)?;
    Ok(est.value)
}

/// ∫ j_x(L, y) dy over `side` ∩ `window`. The window must be finite.
pub fn transmitted_flux<F: Field + ?Sized>(field: &F, l: f64, side: Side, window: (f64, f64)) -> Result<f64> {
    if !(window.0.is_finite() && window.1.is_finite()) {
        return Err(SlitError::domain("transmitted flux needs a finite window; see full_line_cutoff"));
    }
    let w = side
        .clip(window)
        .ok_or_else(|| SlitError::domain(format!("empty window {window:?} on side {side:?}")))?;
    let est = integrate_on_line(field, w, |f, y| Ok(CurrentVector::from_sample(&f.sample(l, y)?).jx))?;
    Ok(est.value)
}

/// [`transmitted_flux`] for a wave field, accepting unbounded windows for
/// the Gaussian model.
pub fn transmitted_flux_full(field: &WaveField, l: f64, side: Side, window: (f64, f64)) -> Result<f64> {
    let (w, _) = resolve_window(field, l, window)?;
    transmitted_flux(field, l, side, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FluxReport {
    pub l: f64,
    pub lower_flux: f64,
    pub upper_flux: f64,
    pub total_flux: f64,
    pub symmetry_line_flux: f64,
}

/// Region fluxes through x = L and the flux through y = 0 over `x_range`.
pub fn flux_report(
    field: &WaveField,
    l: f64,
    window: (f64, f64),
    x_range: (f64, f64),
    panels: usize,
) -> Result<FluxReport> {
    let lower_flux = transmitted_flux_full(field, l, Side::Lower, window)?;
    let upper_flux = transmitted_flux_full(field, l, Side::Upper, window)?;
    Ok(FluxReport {
        l,
        lower_flux,
        upper_flux,
        total_flux: lower_flux + upper_flux,
        symmetry_line_flux: symmetry_line_flux(field, x_range, panels)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

/// Slit 2 in the half-plane y ≥ 0 bounded by an ideal mirror on y = 0.
pub fn image_field(params: PhysicsParams, boundary: Boundary) -> WaveField {
    let kind = match boundary {
        Boundary::Neumann => FieldKind::ImageNeumann,
        Boundary::Dirichlet => FieldKind::ImageDirichlet,
    };
    WaveField { kind, params }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternComparison {
    pub max_abs_diff: f64,
    /// y at which the largest difference occurs.
    pub argmax_y: f64,
    /// sqrt of the trapezoid integral of the squared intensity difference.
    pub l2_diff: f64,
    pub peak_intensity: f64,
}

pub fn compare_patterns<A, B>(field_a: &A, field_b: &B, l: f64, y_grid: &[f64]) -> Result<PatternComparison>
where
    A: Field + ?Sized,
    B: Field + ?Sized,
{
    let sa = crate::slice::intensity_slice(field_a, l, y_grid)?;
    let sb = crate::slice::intensity_slice(field_b, l, y_grid)?;
    let diff: Vec<f64> = sa.intensity.iter().zip(&sb.intensity).map(|(a, b)| a - b).collect();
    let (mut max_abs_diff, mut argmax_y) = (0.0, y_grid.first().copied().unwrap_or(0.0));
    for (d, &y) in diff.iter().zip(y_grid) {
        if d.abs() > max_abs_diff {
            max_abs_diff = d.abs();
            argmax_y = y;
        }
    }
    let sq: Vec<f64> = diff.iter().map(|d| d * d).collect();
    Ok(PatternComparison {
        max_abs_diff,
        argmax_y,
        l2_diff: quad::trapezoid(y_grid, &sq).sqrt(),
        peak_intensity: sa.peak().max(sb.peak()),
    })
}

/// Norm bookkeeping on a detection line for both decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormAccounting {
    pub l: f64,
    pub window: (f64, f64),
    pub two_slit: f64,
    pub lower: f64,
    pub upper: f64,
    /// (‖lower‖² + ‖upper‖² − ‖Φ‖²) / ‖Φ‖²
    pub additivity_residual: f64,
    pub one_slit_1: f64,
    pub one_slit_2: f64,
    /// ‖Φ‖² − ‖ψ₁‖² − ‖ψ₂‖²
    pub non_additivity: f64,
    /// 2 Re⟨ψ₁|ψ₂⟩
    pub cross_term: f64,
}

pub fn norm_accounting(params: &PhysicsParams, l: f64, window: (f64, f64)) -> Result<NormAccounting> {
    let phi = WaveField::two_slit(*params);
    let split = split_two_slit(*params);
    let two_slit = windowed_norm(&phi, l, window)?;
    let lower = windowed_norm(&split.lower, l, window)?;
    let upper = windowed_norm(&split.upper, l, window)?;
    let one_slit_1 = windowed_norm(&WaveField::one_slit(*params, Slit::First), l, window)?;
    let one_slit_2 = windowed_norm(&WaveField::one_slit(*params, Slit::Second), l, window)?;
    let (w, _) = resolve_window(&phi, l, window)?;
    Ok(NormAccounting {
        l,
        window: w,
        two_slit,
        lower,
        upper,
        additivity_residual: (lower + upper - two_slit) / two_slit,
        one_slit_1,
        one_slit_2,
        non_additivity: two_slit - one_slit_1 - one_slit_2,
        cross_term: overlap_cross_term(params, l, window)?,
    })
}

/// Φ(L, y) at a point, for callers comparing closed forms.
pub fn two_slit_value(params: &PhysicsParams, l: f64, y: f64) -> Result<Complex64> {
    WaveField::two_slit(*params).value(l, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::stubs::PlaneWave;
    use crate::field::finite_difference_gradient;
    use crate::slice::{linspace, symmetric_grid};

    fn gauss() -> PhysicsParams {
        PhysicsParams::gaussian(50.0, 1.0, 0.25).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn split_support_and_half_values() {
        let p = gauss();
        let s = split_two_slit(p);
        assert_eq!(s.lower.value(2.0, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(s.upper.value(2.0, -1.0).unwrap(), Complex64::new(0.0, 0.0));
        let phi = two_slit_value(&p, 2.0, -0.4).unwrap();
        assert_eq!(s.lower.value(2.0, -0.4).unwrap(), phi);
        let phi0 = two_slit_value(&p, 2.0, 0.0).unwrap();
        assert_eq!(s.lower.value(2.0, 0.0).unwrap() + s.upper.value(2.0, 0.0).unwrap(), phi0);
    }

    #[test]
    fn restricted_norms_add_up() {
        for params in [gauss(), PhysicsParams::gaussian(0.5, 1.0, 0.25).unwrap()] {
            let s = split_two_slit(params);
            let phi = WaveField::two_slit(params);
            for (l, w) in [(5.0, 6.0), (1.0, 3.0), (20.0, f64::INFINITY)] {
                let win = (-w, w);
                let lo = windowed_norm(&s.lower, l, win).unwrap();
                let up = windowed_norm(&s.upper, l, win).unwrap();
                let total = windowed_norm(&phi, l, win).unwrap();
                assert!(rel(lo + up, total) < 1e-10);
                assert!(rel(lo, up) < 1e-12);
            }
        }
    }

    #[test]
    fn single_slit_norm_matches_dense_trapezoid() {
        let p = gauss();
        let f = WaveField::one_slit(p, Slit::Second);
        let win = (-8.0, 8.0);
        let gk = windowed_norm(&f, 5.0, win).unwrap();
        let ys = linspace(win.0, win.1, 1_000_001);
        let vals: Vec<f64> = ys.iter().map(|&y| f.value(5.0, y).unwrap().norm_sqr()).collect();
        let trap = quad::trapezoid(&ys, &vals);
        assert!(rel(gk, trap) < 1e-8, "{gk} vs {trap}");
        // free Gaussian beam keeps its norm σ√π for all x
        let full = windowed_norm(&f, 5.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert!(rel(full, p.sigma() * std::f64::consts::PI.sqrt()) < 1e-10);
    }

    #[test]
    fn point_model_needs_finite_window() {
        let p = PhysicsParams::point(50.0, 1.0, 0.01).unwrap();
        let f = WaveField::two_slit(p);
        assert!(matches!(windowed_norm(&f, 5.0, (f64::NEG_INFINITY, 1.0)), Err(SlitError::Domain(_))));
        assert!(windowed_norm(&f, 5.0, (-3.0, 3.0)).unwrap() > 0.0);
    }

    #[test]
    fn eq1_norms_do_not_add() {
        let p = gauss();
        // a = 2σ: overlap e^{-4} σ√π·2 survives on the full line
        let p2 = PhysicsParams::gaussian(50.0, 0.5, 0.25).unwrap();
        let acc = norm_accounting(&p2, 5.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let expected = 2.0 * (-4.0f64).exp() * p2.sigma() * std::f64::consts::PI.sqrt();
        assert!(rel(acc.cross_term, expected) < 1e-10);
        assert!(rel(acc.non_additivity, acc.cross_term) < 1e-10);
        assert!(acc.additivity_residual.abs() < 1e-10);

        // a = 4σ: the full-line overlap is e^{-16}-small but still resolved
        let acc = norm_accounting(&p, 5.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let expected = 2.0 * (-16.0f64).exp() * p.sigma() * std::f64::consts::PI.sqrt();
        assert!(acc.cross_term > 0.0);
        assert!(rel(acc.cross_term, expected) < 1e-6);
        assert!((acc.non_additivity - acc.cross_term).abs() < 1e-10 * acc.two_slit);
        let acc = norm_accounting(&p, 5.0, (-6.0, 6.0)).unwrap();
        assert!(acc.cross_term.abs() > 1e-7);
        assert!((acc.non_additivity - acc.cross_term).abs() < 1e-10 * acc.cross_term.abs());
    }

    #[test]
    fn symmetry_line_flux_vanishes_for_two_slit_only() {
        let p = gauss();
        let phi = WaveField::two_slit(p);
        let flux = symmetry_line_flux(&phi, (0.0, 5.0), 50).unwrap();
        let dens = symmetry_line_density(&phi, (0.0, 5.0), 50).unwrap();
        assert!(flux.abs() <= 1e-12 * p.k() * dens);

        // slit 1 spreads upward across y = 0, so its flux is positive
        let one = WaveField::one_slit(p, Slit::First);
        let flux1 = symmetry_line_flux(&one, (0.0, 5.0), 50).unwrap();
        assert!(flux1 > 0.0);
        for x in [0.5, 2.0, 4.5] {
            let s = one.sample(x, 0.0).unwrap();
            let (_, dy) = finite_difference_gradient(&one, x, 0.0).unwrap();
            assert!((s.value.conj() * dy).im > 0.0);
        }
        let w = WaveField::weighted(p, Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        assert!(symmetry_line_flux(&w, (0.0, 5.0), 50).unwrap().abs() > 1e-6);
    }

    #[test]
    fn region_flux_is_conserved_and_symmetric() {
        let p = gauss();
        let phi = WaveField::two_slit(p);
        let full = (f64::NEG_INFINITY, f64::INFINITY);
        let r5 = flux_report(&phi, 5.0, full, (0.0, 5.0), 50).unwrap();
        let r10 = flux_report(&phi, 10.0, full, (0.0, 10.0), 50).unwrap();
        assert!(rel(r5.lower_flux, r5.upper_flux) < 1e-12);
        assert!(rel(r5.lower_flux, r10.lower_flux) < 1e-6);
        assert_eq!(r5.total_flux, r5.lower_flux + r5.upper_flux);
    }

    #[test]
    fn plane_wave_flux() {
        let f = PlaneWave { k: 3.0 };
        let flux = transmitted_flux(&f, 1.0, Side::Both, (-2.0, 5.0)).unwrap();
        assert!((flux - 21.0).abs() < 1e-12);
        let upper = transmitted_flux(&f, 1.0, Side::Upper, (-2.0, 5.0)).unwrap();
        assert!((upper - 15.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_images() {
        for p in [gauss(), PhysicsParams::point(50.0, 1.0, 0.01).unwrap()] {
            let phi = WaveField::two_slit(p);
            let neumann = image_field(p, Boundary::Neumann);
            let dirichlet = image_field(p, Boundary::Dirichlet);
            let grid = linspace(0.0, 12.0, 601);
            for l in [5.0, 50.0] {
                let c = compare_patterns(&phi, &neumann, l, &grid).unwrap();
                assert!(c.max_abs_diff <= 1e-14 * c.peak_intensity);
                let d = compare_patterns(&phi, &dirichlet, l, &grid).unwrap();
                let psi = one_slit_amplitude(&p, Slit::Second, l, 0.0).unwrap().value.norm_sqr();
                assert!((d.max_abs_diff - 4.0 * psi).abs() <= 1e-12 * psi);
                assert_eq!(d.argmax_y, 0.0);
            }
            let same = compare_patterns(&phi, &phi, 5.0, &grid).unwrap();
            assert_eq!(same.max_abs_diff, 0.0);
            assert_eq!(same.l2_diff, 0.0);
            assert!(neumann.value(5.0, -1.0).is_err());
        }
    }

    #[test]
    fn weighted_windows_on_symmetric_grid() {
        let p = gauss();
        let g = symmetric_grid(4.0, 9);
        assert_eq!(g[4], 0.0);
        let s = split_two_slit(p);
        let a = windowed_norm(&s.upper, 5.0, (0.0, 4.0)).unwrap();
        let b = windowed_norm(&s.upper, 5.0, (-4.0, 4.0)).unwrap();
        assert!(rel(a, b) < 1e-14);
    }
}
