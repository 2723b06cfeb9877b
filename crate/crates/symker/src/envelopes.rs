//! Two-sided envelope shapes for the heat, fractional-heat and
//! fractional-Poisson kernels, with regime thresholds.
//!
//! Every envelope returns the comparison shape with constant 1; callers fit
//! the band (c₁, c₂) against actual kernel values. Exponents are computed
//! from the root data, never hard-coded. Where the underlying estimate is
//! only asserted on part of parameter space, the envelope refuses to
//! answer instead of extrapolating.

use crate::error::{Result, SymkerError};
use crate::roots::RootData;
use serde::{Deserialize, Serialize};

/// Which envelope family a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeKind {
    Heat,
    HeatSmallTime,
    FracPoisson,
    FracHeat,
    Phi0,
    Volume,
}

/// An envelope family with its parameters and regime threshold κ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    pub kind: EnvelopeKind,
    pub rd: RootData,
    /// Spectral-gap parameter ζ ∈ [0, ‖ρ‖].
    pub zeta: f64,
    /// Fractional order: α ∈ (0,2) for the fractional heat family,
    /// σ ∈ (0,1) for the fractional Poisson family (unused otherwise).
    pub order: f64,
    /// Regime threshold κ > 0 (constants depend on it).
    pub kappa: f64,
}

impl EnvelopeSpec {
    pub fn new(kind: EnvelopeKind, rd: RootData, zeta: f64, order: f64, kappa: f64) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(SymkerError::Domain(format!("kappa = {kappa} must be positive")));
        }
        if !(0.0..=rd.rho_norm).contains(&zeta) {
            return Err(SymkerError::Domain(format!(
                "zeta = {zeta} outside [0, {}]",
                rd.rho_norm
            )));
        }
        match kind {
            EnvelopeKind::FracHeat if !(0.0 < order && order < 2.0) => {
                return Err(SymkerError::Domain(format!("alpha = {order} outside (0,2)")));
            }
            EnvelopeKind::FracPoisson if !(0.0 < order && order < 1.0) => {
                return Err(SymkerError::Domain(format!("sigma = {order} outside (0,1)")));
            }
            _ => {}
        }
        Ok(Self { kind, rd, zeta, order, kappa })
    }
}

/// φ₀ envelope ∏_{α ∈ Σ_r⁺} (1 + ‖α‖r) e^{−‖ρ‖ r} (rank-one radial
/// reduction); (1+r) e^{−r} on H³.
pub fn phi0_envelope(rd: &RootData, r: f64) -> f64 {
    let mut v = (-rd.rho_norm * r).exp();
    for root in &rd.reduced_roots {
        v *= 1.0 + root.norm * r;
    }
    v
}

/// Upper bound (1 + r)^{|Σ_r⁺|} e^{−ρ_min r}.
pub fn phi0_upper(rd: &RootData, r: f64) -> f64 {
    (1.0 + r).powi(rd.num_reduced() as i32) * (-rd.rho_min * r).exp()
}

/// Lower bound e^{−‖ρ‖ r}.
pub fn phi0_lower(rd: &RootData, r: f64) -> f64 {
    (-rd.rho_norm * r).exp()
}

/// Heat-kernel envelope
/// t^{−n/2} ∏ (1+t+‖α‖r)^{(m_α+m_2α)/2−1} φ₀-env(r) e^{−ζ²t − r²/(4t)}.
pub fn heat_envelope(rd: &RootData, zeta: f64, t: f64, r: f64) -> f64 {
    heat_envelope_ln(rd, zeta, t, r).exp()
}

/// Natural log of the heat envelope; stays finite where the value itself
/// underflows, so band fits against the kernel can run in log space.
pub fn heat_envelope_ln(rd: &RootData, zeta: f64, t: f64, r: f64) -> f64 {
    debug_assert!(t > 0.0 && r >= 0.0);
    let mut ln = -rd.n() / 2.0 * t.ln() - zeta * zeta * t - r * r / (4.0 * t)
        - rd.rho_norm * r;
    for root in &rd.reduced_roots {
        ln += (1.0 + root.norm * r).ln();
        let e = 0.5 * (root.m + root.m2) as f64 - 1.0;
        if e != 0.0 {
            ln += e * (1.0 + t + root.norm * r).ln();
        }
    }
    ln
}

/// Small-time variant, valid for 0 < t < horizon: the 1+t and e^{−ζ²t}
/// factors are dropped.
pub fn heat_envelope_smalltime(rd: &RootData, horizon: f64, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0 && t < horizon) {
        return Err(SymkerError::Domain(format!(
            "small-time envelope needs 0 < t < {horizon}, got {t}"
        )));
    }
    let mut v = t.powf(-rd.n() / 2.0) * phi0_envelope(rd, r) * (-r * r / (4.0 * t)).exp();
    for root in &rd.reduced_roots {
        let e = 0.5 * (root.m + root.m2) as f64 - 1.0;
        if e != 0.0 {
            v *= (1.0 + root.norm * r).powf(e);
        }
    }
    Ok(v)
}

/// Regime of a (t, r) query relative to κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Large,
}

pub fn regime(kappa: f64, t: f64, r: f64) -> Regime {
    if t + r <= kappa {
        Regime::Small
    } else {
        Regime::Large
    }
}

/// Fractional-Poisson envelope (both displays):
/// small: t^{2σ}(t+r)^{−(n+2σ)};
/// large, ζ>0: t^{2σ}(t+r)^{−ℓ/2−|Σ_r⁺|−σ−1/2} φ₀-env e^{−ζ√(t²+r²)};
/// large, ζ=0: t^{2σ}(t+r)^{−ℓ−2|Σ_r⁺|−2σ} φ₀-env.
pub fn frac_poisson_envelope(rd: &RootData, sigma: f64, zeta: f64, t: f64, r: f64, kappa: f64) -> f64 {
    debug_assert!(t > 0.0 && r >= 0.0 && kappa > 0.0);
    frac_poisson_envelope_in(rd, sigma, zeta, t, r, regime(kappa, t, r))
}

/// Same shape with the regime chosen by the caller (both displays hold on
/// the boundary t + r = κ, so sweeps may pin nodes there).
pub fn frac_poisson_envelope_in(
    rd: &RootData,
    sigma: f64,
    zeta: f64,
    t: f64,
    r: f64,
    which: Regime,
) -> f64 {
    match which {
        Regime::Small => t.powf(2.0 * sigma) * (t + r).powf(-(rd.n() + 2.0 * sigma)),
        Regime::Large => {
            let ell = rd.rank as f64;
            let nr = rd.num_reduced() as f64;
            if zeta > 0.0 {
                let expo = ell / 2.0 + nr + sigma + 0.5;
                t.powf(2.0 * sigma)
                    * (t + r).powf(-expo)
                    * phi0_envelope(rd, r)
                    * (-zeta * (t * t + r * r).sqrt()).exp()
            } else {
                let expo = ell + 2.0 * nr + 2.0 * sigma;
                t.powf(2.0 * sigma) * (t + r).powf(-expo) * phi0_envelope(rd, r)
            }
        }
    }
}

/// Ratio of the two branch values at t + r = κ (recorded, never hidden).
pub fn frac_poisson_branch_mismatch(rd: &RootData, sigma: f64, zeta: f64, kappa: f64, t: f64) -> f64 {
    let r = (kappa - t).max(0.0);
    let small = t.powf(2.0 * sigma) * (t + r).powf(-(rd.n() + 2.0 * sigma));
    let large = {
        let ell = rd.rank as f64;
        let nr = rd.num_reduced() as f64;
        if zeta > 0.0 {
            t.powf(2.0 * sigma)
                * (t + r).powf(-(ell / 2.0 + nr + sigma + 0.5))
                * phi0_envelope(rd, r)
                * (-zeta * (t * t + r * r).sqrt()).exp()
        } else {
            t.powf(2.0 * sigma) * (t + r).powf(-(ell + 2.0 * nr + 2.0 * sigma)) * phi0_envelope(rd, r)
        }
    };
    if small > large {
        small / large
    } else {
        large / small
    }
}

/// Fractional-heat envelope. The large-t+r branch is only asserted on
/// r ≥ t^{2/α} (ζ > 0) or r ≥ t^{1/α} (ζ = 0); outside that region the
/// query is refused.
pub fn frac_heat_envelope(
    rd: &RootData,
    alpha: f64,
    zeta: f64,
    t: f64,
    r: f64,
    kappa: f64,
) -> Result<f64> {
    debug_assert!(t > 0.0 && r >= 0.0 && kappa > 0.0);
    frac_heat_envelope_in(rd, alpha, zeta, t, r, regime(kappa, t, r))
}

/// Same shape with the regime chosen by the caller. The validity gating of
/// the large branch applies regardless.
pub fn frac_heat_envelope_in(
    rd: &RootData,
    alpha: f64,
    zeta: f64,
    t: f64,
    r: f64,
    which: Regime,
) -> Result<f64> {
    match which {
        Regime::Small => Ok(t * (t.powf(1.0 / alpha) + r).powf(-(rd.n() + alpha))),
        Regime::Large => {
            let ell = rd.rank as f64;
            let nr = rd.num_reduced() as f64;
            if zeta > 0.0 {
                if r < t.powf(2.0 / alpha) {
                    return Err(SymkerError::EstimateNotAsserted(format!(
                        "large-regime fractional-heat bound needs r >= t^(2/alpha) \
                         (r = {r}, t^(2/alpha) = {})",
                        t.powf(2.0 / alpha)
                    )));
                }
                let expo = ell / 2.0 + nr + alpha / 2.0 + 0.5;
                Ok(t * (t + r).powf(-expo) * phi0_envelope(rd, r) * (-zeta * r).exp())
            } else {
                if r < t.powf(1.0 / alpha) {
                    return Err(SymkerError::EstimateNotAsserted(format!(
                        "large-regime fractional-heat bound (zeta = 0) needs r >= t^(1/alpha) \
                         (r = {r}, t^(1/alpha) = {})",
                        t.powf(1.0 / alpha)
                    )));
                }
                let expo = ell + 2.0 * nr + alpha;
                Ok(t * (t.powf(1.0 / alpha) + r).powf(-expo) * phi0_envelope(rd, r))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::phi0_h3;

    fn h3() -> RootData {
        RootData::h3()
    }

    #[test]
    fn h3_heat_envelope_shape() {
        let rd = h3();
        // polynomial exponent (m+m2)/2 - 1 = 0 leaves t^{-3/2}(1+r)e^{-r}e^{-ζ²t-r²/4t}
        let (t, r, z): (f64, f64, f64) = (0.7, 2.3, 0.4);
        let expect = t.powf(-1.5)
            * (1.0 + r)
            * (-r).exp()
            * (-z * z * t - r * r / (4.0 * t)).exp();
        assert!((heat_envelope(&rd, z, t, r) - expect).abs() / expect < 1e-14);
        // direct substitution: t=1, r=0, ζ=1 gives e^{-1}
        assert!((heat_envelope(&rd, 1.0, 1.0, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn nonreduced_data_gets_nontrivial_poly_factor() {
        use crate::roots::ReducedRoot;
        let rd = RootData::new(1, vec![ReducedRoot { norm: 1.0, m: 4, m2: 3 }], 2.5, 2.5).unwrap();
        // exponent (4+3)/2 - 1 = 2.5
        let (t, r) = (0.5, 3.0);
        let ratio = heat_envelope(&rd, 0.0, t, r)
            / (t.powf(-rd.n() / 2.0) * phi0_envelope(&rd, r) * (-r * r / (4.0 * t)).exp());
        assert!((ratio - (1.0 + t + r).powf(2.5)).abs() / ratio < 1e-13);
    }

    #[test]
    fn smalltime_examples() {
        let rd = h3();
        // r=0, t→0: both envelopes → t^{-3/2}
        let t = 1e-6;
        let a = heat_envelope(&rd, 0.3, t, 0.0);
        let b = heat_envelope_smalltime(&rd, 1.0, t, 0.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-5);
        // frozen direct substitution at t=0.5, T=1, r=3
        let v = heat_envelope_smalltime(&rd, 1.0, 0.5, 3.0).unwrap();
        assert!((v - 0.006257435339197178).abs() / v < 1e-12);
        // domain guard
        assert!(heat_envelope_smalltime(&rd, 1.0, 1.0, 3.0).is_err());
        // ratio to the full envelope stays in the [e^{-ρ²T}, 1] band
        // (compared in log space; deep Gaussian tails underflow pointwise)
        let mut t: f64 = 1e-3;
        while t < 1.0 {
            for r in [0.0, 1.0, 5.0, 20.0] {
                let ln_small = (t.powf(-1.5) * (1.0 + r)).ln() - r - r * r / (4.0 * t);
                let diff = heat_envelope_ln(&rd, 1.0, t, r) - ln_small;
                assert!(diff <= 1e-12 && diff >= -1.0 - 1e-12, "log ratio {diff} at t={t} r={r}");
            }
            t *= 1.8;
        }
    }

    #[test]
    fn frac_poisson_exponents_and_values() {
        let rd = h3();
        // large-regime exponent ℓ/2 + |Σ_r⁺| + σ + 1/2 = 2 + σ on H³
        let sigma = 0.3;
        let (t, r) = (1.0, 4.0);
        let v = frac_poisson_envelope(&rd, sigma, 1.0, t, r, 1.0);
        let expect = t.powf(2.0 * sigma)
            * (t + r).powf(-(2.0 + sigma))
            * (1.0 + r)
            * (-r).exp()
            * (-(t * t + r * r).sqrt()).exp();
        assert!((v - expect).abs() / expect < 1e-14);
        // small regime at t=1, r=0, ζ=0, κ=2: value 1
        for sigma in [0.25, 0.5, 0.75] {
            let v = frac_poisson_envelope(&rd, sigma, 0.0, 1.0, 0.0, 2.0);
            assert!((v - 1.0).abs() < 1e-14);
        }
        // branch mismatch at t + r = κ stays below 10
        for sigma in [0.25, 0.5, 0.75] {
            for zeta in [0.0, 0.5, 1.0] {
                for t in [0.1, 0.5, 0.9, 1.5] {
                    let kappa: f64 = 2.0;
                    if t >= kappa {
                        continue;
                    }
                    let m = frac_poisson_branch_mismatch(&rd, sigma, zeta, kappa, t);
                    assert!(m <= 10.0, "mismatch {m} at sigma={sigma} zeta={zeta} t={t}");
                }
            }
        }
    }

    #[test]
    fn frac_heat_exponents_and_validity() {
        let rd = h3();
        // H³, ζ=1 large-regime exponent 2 + α/2
        let alpha = 1.2;
        let (t, r) = (0.8, 5.0);
        let v = frac_heat_envelope(&rd, alpha, 1.0, t, r, 1.0).unwrap();
        let expect =
            t * (t + r).powf(-(2.0 + alpha / 2.0)) * (1.0 + r) * (-r).exp() * (-r).exp();
        assert!((v - expect).abs() / expect < 1e-14);
        // small regime t=1, r=0: 1·(1+0)^{-(3+α)} = 1
        let v = frac_heat_envelope(&rd, alpha, 1.0, 1.0, 0.0, 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        // refusal outside the asserted region: t+r ≥ κ with r < t^{2/α}
        let err = frac_heat_envelope(&rd, 0.5, 1.0, 3.0, 1.0, 1.0);
        assert!(matches!(err, Err(SymkerError::EstimateNotAsserted(_))));
        // ζ=0 validity edge
        let err = frac_heat_envelope(&rd, 0.5, 0.0, 2.0, 1.0, 1.0);
        assert!(matches!(err, Err(SymkerError::EstimateNotAsserted(_))));
    }

    #[test]
    fn phi0_envelope_sandwich() {
        let rd = h3();
        assert_eq!(phi0_envelope(&rd, 0.0), 1.0);
        let mut r = 0.0;
        while r <= 30.0 {
            let ratio = phi0_h3(r) / phi0_envelope(&rd, r);
            assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&ratio), "ratio {ratio} at r={r}");
            // the upper shape holds with constant 2 on H³, the lower with 1
            assert!(phi0_h3(r) <= 2.0 * phi0_upper(&rd, r) * (1.0 + 1e-12));
            assert!(phi0_h3(r) >= phi0_lower(&rd, r) * (1.0 - 1e-12));
            r += 0.05;
        }
    }

    #[test]
    fn envelopes_positive_finite() {
        let rd = h3();
        let mut t = 1e-3;
        while t <= 10.0 {
            let mut r = 0.0;
            while r <= 30.0 {
                // strict positivity wherever the value is representable;
                // past the f64 floor the policy is exact 0, never NaN
                if r * r / (4.0 * t) < 700.0 {
                    let v = heat_envelope(&rd, 1.0, t, r);
                    assert!(v.is_finite() && v > 0.0, "heat env at t={t} r={r}");
                }
                for v in [
                    frac_poisson_envelope(&rd, 0.5, 1.0, t, r, 1.0),
                    frac_poisson_envelope(&rd, 0.5, 0.0, t, r, 1.0),
                ] {
                    assert!(v.is_finite() && v > 0.0);
                }
                r += 1.37;
            }
            t *= 3.1;
        }
    }
}
