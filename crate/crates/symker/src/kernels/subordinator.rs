//! One-sided stable densities: the subordinator converting the heat
//! semigroup into the fractional one.
//!
//! η_t^α is the inverse Laplace transform of s ↦ e^{−t s^{α/2}}. With
//! β = α/2 and the standard one-sided stable density g_β (Laplace
//! transform e^{−u^β}), scaling gives η_t^α(s) = τ^{−1} g_β(s/τ) with
//! τ = t^{2/α}. g_β itself is evaluated by two classical routes:
//!
//! * the convergent alternating series
//!   g_β(x) = (1/π) Σ_k (−1)^{k+1} Γ(kβ+1)/k! · sin(kπβ) · x^{−kβ−1}
//!   for x away from 0 (superexponentially convergent for β < 1);
//! * the Zolotarev integral
//!   g_β(x) = (β/(1−β)) x^{−1/(1−β)} (1/π) ∫₀^π A(φ) e^{−x^{−β/(1−β)} A(φ)} dφ,
//!   A(φ) = sin(βφ)^{β/(1−β)} sin((1−β)φ) sin(φ)^{−1/(1−β)},
//!   for small x where the series is unusable.
//!
//! At α = 1 the closed form t/(2√π) s^{−3/2} e^{−t²/(4s)} cross-checks both.

use crate::error::{Result, SymkerError};
use crate::quad::{integrate_segments, QuadratureSpec};
use serde::{Deserialize, Serialize};

/// Which evaluation route a subordinator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubordinatorMethod {
    /// Exact kernel for α = 1 only.
    ClosedFormAlpha1,
    /// Series/Zolotarev evaluation for any α ∈ (0, 2).
    StableIntegral,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SubordinatorSpec {
    pub alpha: f64,
    pub method: SubordinatorMethod,
}

impl SubordinatorSpec {
    pub fn new(alpha: f64, method: SubordinatorMethod) -> Result<Self> {
        if !(0.0 < alpha && alpha < 2.0) {
            return Err(SymkerError::Domain(format!("alpha = {alpha} outside (0,2)")));
        }
        if method == SubordinatorMethod::ClosedFormAlpha1 && alpha != 1.0 {
            return Err(SymkerError::Domain(
                "closed-form route is only valid at alpha = 1".into(),
            ));
        }
        Ok(Self { alpha, method })
    }

    pub fn auto(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Self::new(alpha, SubordinatorMethod::ClosedFormAlpha1)
        } else {
            Self::new(alpha, SubordinatorMethod::StableIntegral)
        }
    }
}

/// Precomputed series coefficients for one β, so kernel quadratures can
/// evaluate the density in a few multiplications per term.
#[derive(Debug, Clone)]
pub struct StableDensity {
    beta: f64,
    /// c_k = Γ(kβ+1)/k! · sin(kπβ) / π, signed with (−1)^{k+1}.
    coeffs: Vec<f64>,
    /// x below which the density underflows f64 (m·A(0) past the exponent
    /// range).
    x_floor: f64,
    /// Sampled ln g_β on a uniform grid in ln x over [x_floor, switch):
    /// subordination quadratures evaluate the density millions of times,
    /// and the Zolotarev integral is far too expensive per call.
    ln_small: Vec<f64>,
    w0: f64,
    dw: f64,
}

const SERIES_SWITCH: f64 = 1.1;
const MAX_TERMS: usize = 420;
const SMALL_TABLE_N: usize = 768;

impl StableDensity {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0 < beta && beta < 1.0) {
            return Err(SymkerError::Domain(format!("beta = {beta} outside (0,1)")));
        }
        let mut coeffs = Vec::with_capacity(MAX_TERMS);
        for k in 1..=MAX_TERMS {
            let kf = k as f64;
            let (lg_num, _) = libm::lgamma_r(kf * beta + 1.0);
            let (lg_den, _) = libm::lgamma_r(kf + 1.0);
            let s = (kf * std::f64::consts::PI * beta).sin();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let c = sign * s / std::f64::consts::PI * (lg_num - lg_den).exp();
            coeffs.push(c);
            // once the x=1 term magnitude is far below resolution, stop
            if k > 24 && (lg_num - lg_den) < -60.0 {
                break;
            }
        }
        let mut sd =
            Self { beta, coeffs, x_floor: 0.0, ln_small: Vec::new(), w0: 0.0, dw: 0.0 };
        let a0 = beta.powf(beta / (1.0 - beta)) * (1.0 - beta);
        sd.x_floor = (a0 / 745.0).powf((1.0 - beta) / beta);
        sd.w0 = sd.x_floor.ln();
        let w1 = SERIES_SWITCH.ln();
        sd.dw = (w1 - sd.w0) / (SMALL_TABLE_N - 1) as f64;
        let mut tbl = Vec::with_capacity(SMALL_TABLE_N);
        for i in 0..SMALL_TABLE_N {
            let x = (sd.w0 + i as f64 * sd.dw).exp();
            let v = sd.zolotarev(x);
            tbl.push(if v > 0.0 { v.ln() } else { -1e4 });
        }
        sd.ln_small = tbl;
        Ok(sd)
    }

    /// Density g_β(x) of the unit one-sided stable law.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.x_floor {
            return 0.0;
        }
        if x >= SERIES_SWITCH {
            return self.series(x);
        }
        // cubic interpolation of ln g on the uniform ln-x table
        let pos = (x.ln() - self.w0) / self.dw;
        let n = self.ln_small.len();
        let i = (pos.floor() as usize).clamp(0, n - 2);
        let s = pos - i as f64;
        let (a, b, c, d) = if i == 0 {
            (self.ln_small[0], self.ln_small[0], self.ln_small[1], self.ln_small[2])
        } else if i + 2 >= n {
            (self.ln_small[i - 1], self.ln_small[i], self.ln_small[i + 1], self.ln_small[i + 1])
        } else {
            (self.ln_small[i - 1], self.ln_small[i], self.ln_small[i + 1], self.ln_small[i + 2])
        };
        let s2 = s * s;
        let s3 = s2 * s;
        let ln = 0.5
            * ((2.0 * b)
                + (-a + c) * s
                + (2.0 * a - 5.0 * b + 4.0 * c - d) * s2
                + (-a + 3.0 * b - 3.0 * c + d) * s3);
        if ln < -745.0 {
            0.0
        } else {
            ln.exp()
        }
    }

    /// Direct evaluation routes, bypassing the table (used to build it and
    /// to cross-check it).
    pub fn density_direct(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= SERIES_SWITCH {
            self.series(x)
        } else {
            self.zolotarev(x)
        }
    }

    fn series(&self, x: f64) -> f64 {
        let q = x.powf(-self.beta);
        let mut qk = 1.0;
        let mut sum = 0.0;
        let mut prev_small = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            qk *= q;
            let term = c * qk;
            sum += term;
            // sin(kπβ) vanishes to rounding at rational β, producing
            // spuriously tiny single terms; stop only on two in a row
            let small = term.abs() < 1e-18 * sum.abs();
            if k > 2 && small && prev_small {
                break;
            }
            prev_small = small;
        }
        (sum / x).max(0.0)
    }

    /// ln A(φ); +∞-safe at the φ → π endpoint.
    fn ln_a(&self, phi: f64) -> f64 {
        let b = self.beta;
        let r = b / (1.0 - b);
        r * (b * phi).sin().ln() + ((1.0 - b) * phi).sin().ln() - (1.0 + r) * phi.sin().ln()
    }

    fn zolotarev(&self, x: f64) -> f64 {
        let b = self.beta;
        let m = x.powf(-b / (1.0 - b));
        let integrand = |phi: f64| -> f64 {
            if phi <= 0.0 || phi >= std::f64::consts::PI {
                return 0.0;
            }
            let ln_a = self.ln_a(phi);
            let v = ln_a - m * ln_a.exp();
            if v < -745.0 {
                0.0
            } else {
                v.exp()
            }
        };
        let spec = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-280, max_subdivisions: 300 };
        let pi = std::f64::consts::PI;
        let pts = [1e-12, 0.25 * pi, 0.5 * pi, 0.75 * pi, 0.9 * pi, pi * (1.0 - 1e-12)];
        let integral = match integrate_segments(&integrand, &pts, &spec) {
            Ok(r) => r.value,
            Err(_) => return 0.0,
        };
        (b / (1.0 - b)) * x.powf(-1.0 / (1.0 - b)) / pi * integral
    }
}

/// η_t^α(s): density of the subordinator at time t, evaluated per `spec`.
pub fn subordinator_density(spec: &SubordinatorSpec, t: f64, s: f64) -> Result<f64> {
    if t <= 0.0 || s <= 0.0 {
        return Err(SymkerError::Domain(format!("need t, s > 0, got t={t}, s={s}")));
    }
    match spec.method {
        SubordinatorMethod::ClosedFormAlpha1 => Ok(levy_alpha1(t, s)),
        SubordinatorMethod::StableIntegral => {
            let sd = StableDensity::new(spec.alpha / 2.0)?;
            Ok(sd.eta(t, s))
        }
    }
}

impl StableDensity {
    /// η_t(s) by the scaling τ = t^{1/β}.
    pub fn eta(&self, t: f64, s: f64) -> f64 {
        let tau = t.powf(1.0 / self.beta);
        self.density(s / tau) / tau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The s-value where the evaluation route switches from the Zolotarev
    /// integral to the series at subordinator time t. Quadratures over
    /// s-integrals pin a panel boundary here: the two routes agree to
    /// ~1e-7, and a seam inside a panel would stall adaptive refinement.
    pub fn switch_s(&self, t: f64) -> f64 {
        SERIES_SWITCH * t.powf(1.0 / self.beta)
    }
}

/// Closed form at α = 1: t/(2√π) s^{−3/2} e^{−t²/(4s)}.
pub fn levy_alpha1(t: f64, s: f64) -> f64 {
    let e = -t * t / (4.0 * s);
    if e < -745.0 {
        return 0.0;
    }
    t / (2.0 * std::f64::consts::PI.sqrt()) * s.powf(-1.5) * e.exp()
}

/// Exponential-rate constant of the small-s regime,
/// c_α = ((2−α)/2) (α/2)^{α/(2−α)}.
pub fn small_s_rate(alpha: f64) -> f64 {
    (2.0 - alpha) / 2.0 * (alpha / 2.0).powf(alpha / (2.0 - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_halfline;

    #[test]
    fn alpha1_closed_form_value() {
        // frozen from (1/(2√π)) e^{-1/4}
        let v = levy_alpha1(1.0, 1.0);
        assert!((v - 0.2196956447338612).abs() < 1e-15);
    }

    #[test]
    fn stable_routes_agree_at_alpha1() {
        let sd = StableDensity::new(0.5).unwrap();
        for s in [0.05, 0.2, 0.8, 1.05, 1.15, 2.0, 7.0, 40.0] {
            let a = levy_alpha1(1.0, s);
            let b = sd.eta(1.0, s);
            // the small-x branch goes through the sampled table
            assert!((a - b).abs() / a < 2e-8, "s={s}: closed {a} vs stable {b}");
        }
        // and at a different time scale
        for s in [0.3, 1.7, 9.0] {
            let a = levy_alpha1(0.4, s);
            let b = sd.eta(0.4, s);
            assert!((a - b).abs() / a < 2e-8);
        }
    }

    #[test]
    fn small_branch_table_matches_direct_evaluation() {
        for beta in [0.25, 0.5, 0.75] {
            let sd = StableDensity::new(beta).unwrap();
            let mut x = 0.02f64;
            while x < 1.09 {
                let direct = sd.density_direct(x);
                let table = sd.density(x);
                if direct > 1e-280 {
                    assert!(
                        (direct - table).abs() / direct < 3e-8,
                        "beta={beta} x={x}: {direct} vs {table}"
                    );
                }
                x *= 1.17;
            }
        }
    }

    #[test]
    fn series_integral_routes_agree() {
        // both branches evaluated at the same points around the switch
        for beta in [0.25, 0.5, 0.75, 0.9] {
            let sd = StableDensity::new(beta).unwrap();
            for x in [0.8, SERIES_SWITCH, 1.5, 3.0] {
                let a = sd.zolotarev(x);
                let b = sd.series(x);
                assert!(
                    (a - b).abs() / a < 1e-7,
                    "beta={beta} x={x}: integral {a} vs series {b}"
                );
            }
        }
    }

    #[test]
    fn laplace_identity() {
        // ∫ η_t^α(s) e^{-us} ds = e^{-t u^{α/2}}
        let spec_q = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-260, max_subdivisions: 400 };
        for alpha in [0.5, 1.0, 1.5] {
            let sd = StableDensity::new(alpha / 2.0).unwrap();
            for u in [0.5, 1.0, 2.0] {
                for t in [0.5f64, 1.0] {
                    let tau: f64 = t.powf(2.0 / alpha);
                    let got = integrate_halfline(
                        |s| sd.eta(t, s) * (-u * s).exp(),
                        &[tau, 4.0 * tau],
                        &spec_q,
                    )
                    .unwrap()
                    .value;
                    let want = (-t * u.powf(alpha / 2.0)).exp();
                    assert!(
                        (got - want).abs() < 1e-8,
                        "alpha={alpha} u={u} t={t}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_mass() {
        let spec_q = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-260, max_subdivisions: 400 };
        for alpha in [0.5, 1.0, 1.5] {
            let sd = StableDensity::new(alpha / 2.0).unwrap();
            for t in [0.5f64, 1.0, 2.0] {
                let tau: f64 = t.powf(2.0 / alpha);
                let mass =
                    integrate_halfline(|s| sd.eta(t, s), &[tau, 4.0 * tau], &spec_q).unwrap().value;
                assert!((mass - 1.0).abs() < 1e-7, "alpha={alpha} t={t}: mass {mass}");
            }
        }
    }

    #[test]
    fn two_regime_bounds_with_fitted_band() {
        // η ≍ t^{1/(2-α)} s^{-(4-α)/(4-2α)} e^{-c_α t^{2/(2-α)} s^{-α/(2-α)}}
        // for s ≤ t^{2/α}, and η ≍ t s^{-1-α/2} beyond, with band ≤ 10
        for alpha in [0.5, 1.0, 1.5] {
            let sd = StableDensity::new(alpha / 2.0).unwrap();
            let t = 1.0f64;
            let tau = t.powf(2.0 / alpha);
            let c = small_s_rate(alpha);

            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            let mut s = tau * 0.002;
            while s <= tau {
                let env = t.powf(1.0 / (2.0 - alpha))
                    * s.powf(-(4.0 - alpha) / (4.0 - 2.0 * alpha))
                    * (-c * t.powf(2.0 / (2.0 - alpha)) * s.powf(-alpha / (2.0 - alpha))).exp();
                let ratio = sd.eta(t, s) / env;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                s *= 1.3;
            }
            assert!(hi / lo <= 10.0, "alpha={alpha}: small-s band {}", hi / lo);

            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            let mut s = tau;
            while s < tau * 5e3 {
                let ratio = sd.eta(t, s) / (t * s.powf(-1.0 - alpha / 2.0));
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                s *= 1.5;
            }
            assert!(hi / lo <= 10.0, "alpha={alpha}: large-s band {}", hi / lo);
        }
    }

    #[test]
    fn domain_guards() {
        assert!(SubordinatorSpec::new(2.0, SubordinatorMethod::StableIntegral).is_err());
        assert!(SubordinatorSpec::new(0.0, SubordinatorMethod::StableIntegral).is_err());
        assert!(SubordinatorSpec::new(0.5, SubordinatorMethod::ClosedFormAlpha1).is_err());
        let spec = SubordinatorSpec::auto(1.0).unwrap();
        assert_eq!(spec.method, SubordinatorMethod::ClosedFormAlpha1);
        assert!(subordinator_density(&spec, 0.0, 1.0).is_err());
    }
}
