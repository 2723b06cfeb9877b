//! H³ in the Minkowski hyperboloid model.
//!
//! Points live on { x₀² − x₁² − x₂² − x₃² = 1, x₀ ≥ 1 }; the geodesic
//! distance is arccosh of the Minkowski pairing, boundary data comes from
//! the unit-ball model, and the sphere quadrature feeds every K-integral
//! (horocycle product formula, sphere means in convolutions).

use crate::error::{Result, SymkerError};
use crate::quad::{integrate, QuadratureSpec};
use crate::roots::RootData;
use serde::{Deserialize, Serialize};

const HYPERBOLOID_TOL: f64 = 1e-12;

/// A point of H³ in the hyperboloid model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub coords: [f64; 4],
}

/// A point of the visual boundary sphere S² (unit 3-vector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub dir: [f64; 3],
}

impl HPoint {
    /// The base point o = (1, 0, 0, 0).
    pub fn origin() -> Self {
        Self { coords: [1.0, 0.0, 0.0, 0.0] }
    }

    /// Constructor normalizing the spatial part so the hyperboloid
    /// constraint holds exactly, then asserting it was near-satisfied.
    pub fn new(coords: [f64; 4]) -> Result<Self> {
        let [x0, x1, x2, x3] = coords;
        if x0 < 1.0 - HYPERBOLOID_TOL {
            return Err(SymkerError::GeometryInvariant(format!("x0 = {x0} < 1")));
        }
        let q = x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3;
        if (q - 1.0).abs() > 1e-6 {
            return Err(SymkerError::GeometryInvariant(format!(
                "quadratic form {q} too far from 1"
            )));
        }
        // renormalize x0 from the spatial part
        let s2 = x1 * x1 + x2 * x2 + x3 * x3;
        let p = Self { coords: [(1.0 + s2).sqrt(), x1, x2, x3] };
        debug_assert!(p.constraint_defect() < HYPERBOLOID_TOL);
        Ok(p)
    }

    /// Point at geodesic distance r from the origin in unit direction `dir`.
    pub fn from_polar(r: f64, dir: [f64; 3]) -> Result<Self> {
        if r < 0.0 {
            return Err(SymkerError::Domain(format!("negative radius {r}")));
        }
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(SymkerError::GeometryInvariant(format!("direction norm {n} != 1")));
        }
        let sh = r.sinh();
        Ok(Self { coords: [r.cosh(), sh * dir[0] / n, sh * dir[1] / n, sh * dir[2] / n] })
    }

    /// Point at distance r along the x₃ axis.
    pub fn along_axis(r: f64) -> Self {
        Self::from_polar(r, [0.0, 0.0, 1.0]).expect("axis point")
    }

    pub fn constraint_defect(&self) -> f64 {
        let [x0, x1, x2, x3] = self.coords;
        (x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3 - 1.0).abs()
    }

    /// Minkowski pairing with signature (−, +, +, +).
    pub fn minkowski(&self, other: &HPoint) -> f64 {
        let a = self.coords;
        let b = other.coords;
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }

    /// Geodesic distance to the origin.
    pub fn dist_origin(&self) -> f64 {
        acosh_clamped(self.coords[0])
    }

    /// Image in the unit-ball model, u = x_spatial / (1 + x₀).
    pub fn to_ball(&self) -> [f64; 3] {
        let [x0, x1, x2, x3] = self.coords;
        let d = 1.0 + x0;
        [x1 / d, x2 / d, x3 / d]
    }

    /// Unit tangent frame at this point (Minkowski-orthonormal, orthogonal
    /// to the position vector). Used for geodesic shooting in arbitrary
    /// directions.
    pub fn tangent_frame(&self) -> [[f64; 4]; 3] {
        let mut frame = [[0.0f64; 4]; 3];
        let mut picked = 0usize;
        let candidates = [
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        for cand in candidates {
            if picked == 3 {
                break;
            }
            // project out the position (timelike, ⟨x,x⟩ = −1) and the frame so far
            let mut v = cand;
            let xv = mink4(&self.coords, &v);
            for k in 0..4 {
                v[k] += self.coords[k] * xv; // minus (⟨x,v⟩ / ⟨x,x⟩) x = + ⟨x,v⟩ x
            }
            for e in frame.iter().take(picked) {
                let ev = mink4(e, &v);
                for k in 0..4 {
                    v[k] -= e[k] * ev;
                }
            }
            let n2 = mink4(&v, &v);
            if n2 > 1e-12 {
                let n = n2.sqrt();
                for x in &mut v {
                    *x /= n;
                }
                frame[picked] = v;
                picked += 1;
            }
        }
        assert_eq!(picked, 3, "tangent frame construction failed");
        frame
    }

    /// Geodesic flow: point at distance r from `self` in the tangent
    /// direction Σ dirᵢ eᵢ of its frame.
    pub fn geodesic(&self, r: f64, dir: [f64; 3]) -> HPoint {
        let frame = self.tangent_frame();
        let mut v = [0.0f64; 4];
        for (i, e) in frame.iter().enumerate() {
            for k in 0..4 {
                v[k] += dir[i] * e[k];
            }
        }
        let (ch, sh) = (r.cosh(), r.sinh());
        let mut c = [0.0f64; 4];
        for k in 0..4 {
            c[k] = ch * self.coords[k] + sh * v[k];
        }
        HPoint { coords: c }
    }
}

fn mink4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

fn acosh_clamped(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.acosh()
    }
}

impl BoundaryPoint {
    pub fn new(dir: [f64; 3]) -> Result<Self> {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if (n - 1.0).abs() > HYPERBOLOID_TOL.max(1e-10) {
            return Err(SymkerError::GeometryInvariant(format!("boundary norm {n} != 1")));
        }
        Ok(Self { dir: [dir[0] / n, dir[1] / n, dir[2] / n] })
    }
}

/// Geodesic distance d(p, q) = arccosh(−⟨p, q⟩).
pub fn distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    let m = p.minkowski(q);
    // valid pairs satisfy ⟨p, q⟩ ≤ −1 up to rounding
    if m > -1.0 + 1e-6 {
        return Err(SymkerError::GeometryInvariant(format!(
            "Minkowski pairing {m} > -1: off-hyperboloid input"
        )));
    }
    Ok(acosh_clamped(-m))
}

/// δ(r) for the given root data; sinh² r on H³.
pub fn polar_density(rd: &RootData, r: f64) -> f64 {
    rd.polar_density(r)
}

/// Volume of the geodesic ball of radius r. Exact closed form on H³,
/// quadrature of the polar density otherwise.
pub fn ball_volume(rd: &RootData, r: f64) -> f64 {
    if rd.is_h3() {
        // 4π ∫_0^r sinh² = π (sinh 2r − 2r)
        return std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r);
    }
    let spec = QuadratureSpec::tight();
    let q = integrate(|s| rd.polar_density(s), 0.0, r, &spec).expect("polar quadrature");
    // general surface constant left at the H³ normalization 4π
    4.0 * std::f64::consts::PI * q.value
}

/// Ground spherical function of H³: φ₀(r) = r / sinh r (1 at r = 0).
pub fn phi0_h3(r: f64) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    if r < 1e-6 {
        // r/sinh r = 1 - r²/6 + O(r⁴)
        return 1.0 - r * r / 6.0;
    }
    if r > 710.0 {
        // sinh overflows; use r e^{-r} * 2 / (1 - e^{-2r}) directly in logs
        return 2.0 * r * (-r).exp();
    }
    r / r.sinh()
}

/// Spherical function φ_λ(r) = sin(λr) / (λ sinh r) on H³.
pub fn phi_lambda_h3(lambda: f64, r: f64) -> f64 {
    if lambda.abs() < 1e-12 {
        return phi0_h3(r);
    }
    if r < 1e-9 {
        return 1.0 - (lambda * lambda + 1.0) * r * r / 6.0;
    }
    (lambda * r).sin() / (lambda * r.sinh())
}

/// Busemann A-component ⟨ρ, A(p, b)⟩ / ρ_norm in the ball model:
/// a(p, b) = log( (1 − ‖u‖²) / ‖u − b‖² ).
pub fn busemann_a(p: &HPoint, b: &BoundaryPoint) -> Result<f64> {
    let u = p.to_ball();
    let du = [u[0] - b.dir[0], u[1] - b.dir[1], u[2] - b.dir[2]];
    let d2 = du[0] * du[0] + du[1] * du[1] + du[2] * du[2];
    if d2.sqrt() < 1e-14 {
        return Err(SymkerError::BoundaryDegeneracy { dist: d2.sqrt() });
    }
    let one_minus = 1.0 - (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    Ok((one_minus / d2).ln())
}

/// Product Gauss grid on S²: Gauss–Legendre in cos θ times uniform in φ.
/// Weights are normalized to sum to 1; exact for spherical polynomials of
/// degree ≤ `order`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl SphereQuadrature {
    pub fn product_gauss(n_theta: usize) -> Self {
        let (xs, ws) = gauss_legendre(n_theta);
        let n_phi = 2 * n_theta;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (c, w) in xs.iter().zip(ws.iter()) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..n_phi {
                let phi = std::f64::consts::TAU * (j as f64 + 0.5) / n_phi as f64;
                nodes.push(BoundaryPoint { dir: [s * phi.cos(), s * phi.sin(), *c] });
                // GL weight (already on [-1,1], total 2) * (1/2) normalization * uniform φ
                weights.push(w * 0.5 / n_phi as f64);
            }
        }
        Self { nodes, weights, order: (2 * n_theta - 1).min(n_phi - 1) }
    }

    /// ∫_{S²} f dσ with the normalized measure.
    pub fn mean<F: Fn(&BoundaryPoint) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(self.weights.iter()).map(|(b, w)| w * f(b)).sum()
    }
}

/// Gauss–Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// ∫_{S²} e^{a(p,b)} dσ(b), escalating the quadrature order until stable.
/// Recovers φ₀(d(o,p)) and fixes the ball-model Busemann normalization.
pub fn phi0_via_busemann(p: &HPoint) -> Result<f64> {
    let mut prev = f64::NAN;
    let mut n_theta = 16;
    loop {
        let sq = SphereQuadrature::product_gauss(n_theta);
        let mut val = 0.0;
        for (b, w) in sq.nodes.iter().zip(sq.weights.iter()) {
            val += w * busemann_a(p, b)?.exp();
        }
        if (val - prev).abs() <= 1e-9 * val.abs() || n_theta >= 1024 {
            return Ok(val);
        }
        prev = val;
        n_theta *= 2;
    }
}

/// Checks φ₀(d(p,q)) = ∫_{S²} e^{a(p,b)} e^{a(q,b)} dσ(b), escalating the
/// quadrature order until the value stabilizes. Returns the relative error
/// of the identity at the final order.
pub fn horocycle_identity_check(p: &HPoint, q: &HPoint) -> Result<f64> {
    let d = distance(p, q)?;
    let target = phi0_h3(d);
    let mut prev = f64::NAN;
    let mut n_theta = 16;
    loop {
        let sq = SphereQuadrature::product_gauss(n_theta);
        let mut val = 0.0;
        for (b, w) in sq.nodes.iter().zip(sq.weights.iter()) {
            let ap = busemann_a(p, b)?;
            let aq = busemann_a(q, b)?;
            val += w * (ap + aq).exp();
        }
        let rel = (val - target).abs() / target;
        if (val - prev).abs() <= 1e-9 * target.abs() || n_theta >= 512 {
            return Ok(rel);
        }
        prev = val;
        n_theta *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_point(rng: &mut SplitMix64, rmax: f64) -> HPoint {
        let r = rng.uniform(0.0, rmax);
        HPoint::from_polar(r, rng.unit_vector()).unwrap()
    }

    #[test]
    fn distance_identity_and_unit_translation() {
        let o = HPoint::origin();
        assert_eq!(distance(&o, &o).unwrap(), 0.0);
        let p = HPoint::along_axis(1.0);
        assert!((distance(&o, &p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distance_symmetric_nonnegative_triangle() {
        let mut rng = SplitMix64::new(0xD15EA5E);
        for _ in 0..10_000 {
            let p = random_point(&mut rng, 6.0);
            let q = random_point(&mut rng, 6.0);
            let m = random_point(&mut rng, 6.0);
            let dpq = distance(&p, &q).unwrap();
            let dqp = distance(&q, &p).unwrap();
            assert!((dpq - dqp).abs() < 1e-10);
            assert!(dpq >= 0.0);
            let dpm = distance(&p, &m).unwrap();
            let dmq = distance(&m, &q).unwrap();
            assert!(dpq <= dpm + dmq + 1e-10, "triangle defect");
        }
    }

    #[test]
    fn flat_projection_is_one_lipschitz() {
        let mut rng = SplitMix64::new(99);
        let o = HPoint::origin();
        for _ in 0..2000 {
            let p = random_point(&mut rng, 8.0);
            let q = random_point(&mut rng, 8.0);
            let lhs = (distance(&p, &o).unwrap() - distance(&q, &o).unwrap()).abs();
            assert!(lhs <= distance(&p, &q).unwrap() + 1e-10);
        }
    }

    #[test]
    fn polar_density_h3() {
        let rd = RootData::h3();
        // small-r limit δ(r)/r² → 1
        let r = 1e-5;
        assert!((polar_density(&rd, r) / (r * r) - 1.0).abs() < 1e-9);
        // oracle: sinh²(1) via exponentials
        let e = 1.0f64.exp();
        let sinh1 = (e - 1.0 / e) / 2.0;
        assert!((polar_density(&rd, 1.0) - sinh1 * sinh1).abs() < 1e-14);
        assert!((polar_density(&rd, 1.0) - 1.3810978455418157).abs() < 1e-12);
        // asymptotic oracle e^{2ρr}/4 at r = 10
        let r = 10.0;
        assert!((polar_density(&rd, r) * 4.0 * (-2.0 * r).exp() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ball_volume_h3() {
        let rd = RootData::h3();
        // Euclidean limit
        let r = 1e-4;
        let euclid = 4.0 * std::f64::consts::PI / 3.0 * r * r * r;
        assert!((ball_volume(&rd, r) / euclid - 1.0).abs() < 1e-6);
        // quadrature oracle at r = 1
        let spec = QuadratureSpec::tight();
        let oracle = 4.0
            * std::f64::consts::PI
            * integrate(|s| s.sinh() * s.sinh(), 0.0, 1.0, &spec).unwrap().value;
        assert!((ball_volume(&rd, 1.0) - oracle).abs() < 1e-10);
        assert!((ball_volume(&rd, 1.0) - 5.110932705708289).abs() < 1e-12);
    }

    #[test]
    fn ball_volume_two_regime_band() {
        let rd = RootData::h3();
        // volume / e^{2r} lies in a narrow band on [2, 20] ((ℓ−1)/2 = 0)
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut r = 2.0;
        while r <= 20.0 {
            let v = ball_volume(&rd, r) * (-2.0 * r).exp();
            lo = lo.min(v);
            hi = hi.max(v);
            r += 0.25;
        }
        assert!(hi / lo <= 1.2, "band ratio {}", hi / lo);
        // small-radius regime: volume / r³ within a band on (0, 1]
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut r = 0.05;
        while r <= 1.0 {
            let v = ball_volume(&rd, r) / (r * r * r);
            lo = lo.min(v);
            hi = hi.max(v);
            r += 0.05;
        }
        assert!(hi / lo < 1.5);
    }

    #[test]
    fn phi0_values_and_sandwich() {
        assert_eq!(phi0_h3(0.0), 1.0);
        assert!((phi0_h3(2.0) - 0.5514411295435664).abs() < 1e-14);
        // (1+r) e^{-r} sandwich with ratio sweeping [1, 2]
        let mut sup: f64 = 0.0;
        let mut inf = f64::INFINITY;
        let mut r = 1e-3;
        while r < 500.0 {
            let ratio = phi0_h3(r) * r.exp() / (1.0 + r);
            sup = sup.max(ratio);
            inf = inf.min(ratio);
            r *= 1.07;
        }
        assert!(sup <= 2.0 + 1e-9 && sup > 1.99, "sup {sup}");
        assert!(inf >= 1.0 - 1e-9 && inf < 1.01, "inf {inf}");
        // lower bound e^{-r} ≤ φ₀ on [0, 30]
        let mut r = 0.0;
        while r <= 30.0 {
            assert!(phi0_h3(r) >= (-r).exp() - 1e-15);
            r += 0.1;
        }
    }

    #[test]
    fn busemann_origin_and_bound() {
        let o = HPoint::origin();
        let b = BoundaryPoint::new([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(busemann_a(&o, &b).unwrap(), 0.0);
        let mut rng = SplitMix64::new(2024);
        for _ in 0..10_000 {
            let p = random_point(&mut rng, 8.0);
            let b = BoundaryPoint::new(rng.unit_vector()).unwrap();
            let a = busemann_a(&p, &b).unwrap();
            assert!(a.abs() <= p.dist_origin() + 1e-9, "Iwasawa bound violated");
        }
    }

    #[test]
    fn busemann_integral_recovers_phi0() {
        // ∫ e^{a(p,b)} dσ(b) = φ₀(d(o,p)) — fixes the ball-model normalization
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let p = random_point(&mut rng, 5.0);
            let val = phi0_via_busemann(&p).unwrap();
            let target = phi0_h3(p.dist_origin());
            assert!(
                (val - target).abs() / target < 1e-6,
                "phi0 identity off: {val} vs {target}"
            );
        }
    }

    #[test]
    fn horocycle_product_formula() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..12 {
            let p = random_point(&mut rng, 3.0);
            let q = random_point(&mut rng, 3.0);
            if distance(&p, &q).unwrap() > 6.0 {
                continue;
            }
            let rel = horocycle_identity_check(&p, &q).unwrap();
            assert!(rel < 1e-5, "horocycle identity rel err {rel}");
        }
    }

    #[test]
    fn sphere_quadrature_weights_and_exactness() {
        let sq = SphereQuadrature::product_gauss(12);
        let sum: f64 = sq.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        assert!(sq.weights.iter().all(|w| *w > 0.0));
        // monomial oracle: ∫ x^a y^b z^c dσ = (a-1)!!(b-1)!!(c-1)!!/(a+b+c+1)!! for even powers
        fn dfact(n: i64) -> f64 {
            let mut v = 1.0;
            let mut k = n;
            while k > 1 {
                v *= k as f64;
                k -= 2;
            }
            v
        }
        for (a, b, c) in [(0, 0, 0), (2, 0, 0), (0, 2, 2), (4, 2, 0), (2, 2, 2), (0, 0, 6)] {
            let num = sq.mean(|p| {
                p.dir[0].powi(a) * p.dir[1].powi(b) * p.dir[2].powi(c)
            });
            let exact = dfact(a as i64 - 1) * dfact(b as i64 - 1) * dfact(c as i64 - 1)
                / dfact((a + b + c + 1) as i64);
            assert!((num - exact).abs() < 1e-12, "monomial ({a},{b},{c}): {num} vs {exact}");
            // odd powers vanish
            let odd = sq.mean(|p| p.dir[0].powi(a + 1) * p.dir[1].powi(b) * p.dir[2].powi(c));
            assert!(odd.abs() < 1e-12);
        }
    }

    #[test]
    fn hyperboloid_constraint_enforced() {
        assert!(HPoint::new([2.0, 0.0, 0.0, 0.0]).is_err());
        let p = HPoint::new([(2.0f64).sqrt(), 1.0, 0.0, 0.0]).unwrap();
        assert!(p.constraint_defect() < 1e-12);
    }

    #[test]
    fn geodesic_flow_consistency() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..200 {
            let x = random_point(&mut rng, 4.0);
            let dir = rng.unit_vector();
            let r = rng.uniform(0.0, 5.0);
            let y = x.geodesic(r, dir);
            assert!(y.constraint_defect() < 1e-8);
            assert!((distance(&x, &y).unwrap() - r).abs() < 1e-9);
        }
    }
}
