//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7-15 pair drives interval bisection on finite intervals; semi-infinite
//! integrals go through the log substitution `s = e^u` with an expanding
//! window around the integrand's peak, plus caller-supplied split points
//! (regime boundaries of the subordination formulas).

use crate::error::{Result, SymkerError};
use serde::{Deserialize, Serialize};

/// Abscissae of the 15-point Kronrod rule on [-1, 1]; odd indices are the
/// embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
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

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if rel_tol < 1e-12 {
            return Err(SymkerError::Domain(format!(
                "rel_tol {rel_tol:e} below the 1e-12 floor"
            )));
        }
        Ok(Self { rel_tol, abs_tol, max_subdivisions })
    }

    pub fn tight() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-300, max_subdivisions: 400 }
    }

    pub fn standard() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-300, max_subdivisions: 200 }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::standard()
    }
}

/// Result of one adaptive integration: value, error estimate and the
/// L1 size of the integrand (used by callers to detect cancellation noise).
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub resabs: f64,
    pub subdivisions: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for i in 0..7 {
        let x = h * XGK[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kron += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let err = (h * (kron - gauss)).abs();
    // QUADPACK-style sharpening of the raw difference.
    let err = if err != 0.0 {
        let scale = (200.0 * err / (h.abs() * resabs).max(f64::MIN_POSITIVE)).powf(1.5);
        if scale < 1.0 { h.abs() * resabs * scale } else { err }
    } else {
        0.0
    };
    (h * kron, err, h.abs() * resabs)
}

/// Adaptive integration of `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_segments(&f, &[a, b], spec)
}

/// Adaptive integration over consecutive segments given by `points`
/// (must be increasing; interior points act as forced panel boundaries).
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    #[derive(Debug)]
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
        resabs: f64,
    }

    let mut panels: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(SymkerError::Domain(format!(
                "integration points not increasing: {} !< {}",
                w[0], w[1]
            )));
        }
        let (v, e, ra) = gk15(f, w[0], w[1]);
        panels.push(Panel { a: w[0], b: w[1], value: v, err: e, resabs: ra });
    }

    let mut n_splits = 0usize;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs()).max(
            // below ~1e-14 of the L1 mass we are chasing roundoff, not truncation
            1e-14 * resabs,
        );
        if err <= target || !err.is_finite() {
            return Ok(QuadResult { value: total, abs_error: err, resabs, subdivisions: n_splits });
        }
        if n_splits >= spec.max_subdivisions {
            if std::env::var("SYMKER_QUAD_DEBUG").is_ok() {
                let mut sorted: Vec<&Panel> = panels.iter().collect();
                sorted.sort_by(|x, y| y.err.total_cmp(&x.err));
                for p in sorted.iter().take(6) {
                    eprintln!(
                        "  stuck panel [{:.6e},{:.6e}]: val {:.4e} err {:.4e} resabs {:.4e}",
                        p.a, p.b, p.value, p.err, p.resabs
                    );
                }
            }
            return Err(SymkerError::QuadratureFailure { achieved: err, target });
        }
        // split the worst panel
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels[worst];
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            // interval at floating-point resolution; accept what we have
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.err).sum();
            let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
            return Ok(QuadResult { value: total, abs_error: err, resabs, subdivisions: n_splits });
        }
        let (v1, e1, r1) = gk15(f, a, m);
        let (v2, e2, r2) = gk15(f, m, b);
        panels[worst] = Panel { a, b: m, value: v1, err: e1, resabs: r1 };
        panels.push(Panel { a: m, b, value: v2, err: e2, resabs: r2 });
        n_splits += 1;
    }
}

/// Scan range for the halfline peak search: at least [-60, 60], stretched
/// to cover the split points with a 40-wide margin.
fn scan_window(splits: &[f64]) -> (f64, f64) {
    let mut lo = -60.0f64;
    let mut hi = 60.0f64;
    for &s in splits {
        if s > 0.0 && s.is_finite() {
            lo = lo.min(s.ln() - 40.0);
            hi = hi.max(s.ln() + 40.0);
        }
    }
    (lo.max(-400.0), hi.min(400.0))
}

/// Integral of `g(s)` over (0, ∞) through `s = e^u`, with forced splits at
/// the given positive abscissae. The window in `u` expands from the peak
/// until both tails are negligible against the accumulated value.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    g: F,
    splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let h = |u: f64| {
        let s = u.exp();
        let v = g(s) * s;
        if v.is_finite() { v } else { 0.0 }
    };

    // locate the peak of the log-substituted integrand on a coarse scan;
    // the scan window follows the split points (the structural scales of
    // the integrand) instead of a fixed huge range
    let (scan_lo, scan_hi) = scan_window(splits);
    let mut u_peak = 0.0;
    let mut best = -1.0;
    let mut k = scan_lo;
    while k <= scan_hi {
        let v = h(k).abs();
        if v > best {
            best = v;
            u_peak = k;
        }
        k += 0.5;
    }
    for &s in splits {
        if s > 0.0 {
            let v = h(s.ln()).abs();
            if v > best {
                best = v;
                u_peak = s.ln();
            }
        }
    }
    if best == 0.0 {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, resabs: 0.0, subdivisions: 0 });
    }

    // expanding window, keeping the requested splits as panel boundaries;
    // a dyadic ladder away from the peak keeps panel widths commensurate
    // with slowly decaying tails so the subdivision budget refines locally
    let mut half_width = 8.0f64;
    let mut prev: Option<f64> = None;
    loop {
        let (lo, hi) = (u_peak - half_width, u_peak + half_width);
        let mut pts: Vec<f64> = vec![lo];
        let mut interior: Vec<f64> = splits
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|s| s.ln())
            .filter(|u| *u > lo && *u < hi)
            .collect();
        interior.push(u_peak);
        let mut step = 4.0;
        while step < half_width {
            interior.push(u_peak - step);
            interior.push(u_peak + step);
            step *= 2.0;
        }
        interior.sort_by(f64::total_cmp);
        for u in interior {
            if u > *pts.last().unwrap() + 1e-12 && u < hi - 1e-12 {
                pts.push(u);
            }
        }
        pts.push(hi);
        let r = integrate_segments(&h, &pts, spec)?;
        if let Some(p) = prev {
            let scale = r.value.abs().max(r.resabs * spec.rel_tol).max(spec.abs_tol);
            if (r.value - p).abs() <= 4.0 * spec.rel_tol * scale {
                return Ok(r);
            }
        }
        prev = Some(r.value);
        half_width *= 2.0;
        if half_width > 700.0 {
            return Ok(r);
        }
    }
}

/// Log-space halfline integration: given ln g(s), returns ln ∫₀^∞ g ds by
/// max-shifted quadrature under the same log substitution and expanding
/// window. Needed where g itself underflows while the integral is a
/// perfectly representable number times e^{shift}.
pub fn integrate_halfline_ln<F: Fn(f64) -> f64>(
    ln_g: F,
    splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ln_h = |u: f64| ln_g(u.exp()) + u;
    // peak of the log-substituted integrand, scanned around the splits
    let (scan_lo, scan_hi) = scan_window(splits);
    let mut u_peak = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut k = scan_lo;
    while k <= scan_hi {
        let v = ln_h(k);
        if v > best {
            best = v;
            u_peak = k;
        }
        k += 0.5;
    }
    for &s in splits {
        if s > 0.0 {
            let v = ln_h(s.ln());
            if v > best {
                best = v;
                u_peak = s.ln();
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let shift = best;
    let h = move |u: f64| {
        let v = ln_h(u) - shift;
        if v < -740.0 {
            0.0
        } else {
            v.exp()
        }
    };
    let mut half_width = 8.0f64;
    let mut prev: Option<f64> = None;
    loop {
        let (lo, hi) = (u_peak - half_width, u_peak + half_width);
        let mut pts: Vec<f64> = vec![lo];
        let mut interior: Vec<f64> = splits
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|s| s.ln())
            .filter(|u| *u > lo && *u < hi)
            .collect();
        interior.push(u_peak);
        let mut step = 4.0;
        while step < half_width {
            interior.push(u_peak - step);
            interior.push(u_peak + step);
            step *= 2.0;
        }
        interior.sort_by(f64::total_cmp);
        for u in interior {
            if u > *pts.last().unwrap() + 1e-12 && u < hi - 1e-12 {
                pts.push(u);
            }
        }
        pts.push(hi);
        let r = integrate_segments(&h, &pts, spec)?;
        if let Some(p) = prev {
            let scale = r.value.abs().max(spec.abs_tol);
            if (r.value - p).abs() <= 4.0 * spec.rel_tol * scale {
                return Ok(shift + r.value.max(1e-300).ln());
            }
        }
        prev = Some(r.value);
        half_width *= 2.0;
        if half_width > 700.0 {
            return Ok(shift + r.value.max(1e-300).ln());
        }
    }
}
