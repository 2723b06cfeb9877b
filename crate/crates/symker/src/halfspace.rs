//! Upper-half-space coordinates on H³ and the modular weight of the
//! solvable Iwasawa group.
//!
//! The ball model maps to { (ξ₁, ξ₂, z) : z > 0 } by the Cayley-type
//! inversion sending the boundary point e₃ to infinity; the geodesic ray
//! toward e₃ becomes the vertical ray z = e^r, so log z is the
//! A-coordinate and the modular function is δ̃ = z^{−2ρ}.

use crate::error::{Result, SymkerError};
use crate::geometry::HPoint;
use serde::{Deserialize, Serialize};

/// A point of H³ in upper-half-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub xi: [f64; 2],
    pub z: f64,
}

impl HalfSpacePoint {
    pub fn new(xi: [f64; 2], z: f64) -> Result<Self> {
        if z <= 0.0 {
            return Err(SymkerError::Domain(format!("half-space height z = {z} must be positive")));
        }
        Ok(Self { xi, z })
    }

    pub fn origin() -> Self {
        Self { xi: [0.0, 0.0], z: 1.0 }
    }

    /// From the hyperboloid model. Composing the ball map with the Cayley
    /// inversion collapses to (ξ, z) = (x₁, x₂, 1) / (x₀ − x₃). For x₃ > 0
    /// the difference cancels, so it is replaced by the hyperboloid
    /// identity x₀ − x₃ = (1 + x₁² + x₂²) / (x₀ + x₃).
    pub fn from_hyperboloid(p: &HPoint) -> Self {
        let [x0, x1, x2, x3] = p.coords;
        let d = if x3 > 0.0 {
            (1.0 + x1 * x1 + x2 * x2) / (x0 + x3)
        } else {
            x0 - x3
        };
        Self { xi: [x1 / d, x2 / d], z: 1.0 / d }
    }

    /// Back to the hyperboloid: x₀ − x₃ = 1/z, x₀ + x₃ = z + ‖ξ‖²/z.
    pub fn to_hyperboloid(&self) -> HPoint {
        let [x, y] = self.xi;
        let z = self.z;
        let s = z + (x * x + y * y) / z; // x₀ + x₃
        let d = 1.0 / z; // x₀ − x₃
        HPoint { coords: [0.5 * (s + d), x / z, y / z, 0.5 * (s - d)] }
    }

    /// Geodesic distance: cosh d = 1 + (|ξ−ξ'|² + (z−z')²) / (2 z z').
    pub fn dist(&self, other: &HalfSpacePoint) -> f64 {
        let dx = self.xi[0] - other.xi[0];
        let dy = self.xi[1] - other.xi[1];
        let dz = self.z - other.z;
        let c = 1.0 + (dx * dx + dy * dy + dz * dz) / (2.0 * self.z * other.z);
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    }

    pub fn dist_origin(&self) -> f64 {
        self.dist(&Self::origin())
    }

    /// Modular function δ̃ = z^{−2ρ} of the solvable group, ρ = ρ_norm.
    pub fn modular_delta(&self, rho_norm: f64) -> f64 {
        self.z.powf(-2.0 * rho_norm)
    }
}

/// δ̃^{1/2}·ψ lift of a radial kernel value at a half-space point:
/// the distinguished kernels are z^{−ρ} ψ_t(|p|).
pub fn distinguished_lift_value(psi_at_radius: f64, p: &HalfSpacePoint, rho_norm: f64) -> Result<f64> {
    if p.z <= 0.0 {
        return Err(SymkerError::Domain("z must be positive".into()));
    }
    Ok(p.modular_delta(rho_norm).sqrt() * psi_at_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance;
    use crate::rng::SplitMix64;

    #[test]
    fn origin_maps_to_unit_height() {
        let h = HalfSpacePoint::from_hyperboloid(&HPoint::origin());
        assert!(h.xi[0].abs() < 1e-15 && h.xi[1].abs() < 1e-15);
        assert!((h.z - 1.0).abs() < 1e-15);
        assert!((h.modular_delta(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vertical_ray_is_the_a_coordinate() {
        // the geodesic toward e₃ maps to z = e^r
        for r in [0.25, 1.0, 3.0, 7.5] {
            let p = HPoint::along_axis(r);
            let h = HalfSpacePoint::from_hyperboloid(&p);
            assert!((h.z - r.exp()).abs() / r.exp() < 1e-12, "z {} vs e^r {}", h.z, r.exp());
            assert!(h.xi[0].abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_isometry() {
        let mut rng = SplitMix64::new(404);
        for _ in 0..500 {
            let p = HPoint::from_polar(rng.uniform(0.0, 6.0), rng.unit_vector()).unwrap();
            let q = HPoint::from_polar(rng.uniform(0.0, 6.0), rng.unit_vector()).unwrap();
            let hp = HalfSpacePoint::from_hyperboloid(&p);
            let hq = HalfSpacePoint::from_hyperboloid(&q);
            // distances agree between models
            let d1 = distance(&p, &q).unwrap();
            let d2 = hp.dist(&hq);
            assert!((d1 - d2).abs() < 1e-9, "model distance mismatch {d1} vs {d2}");
            // round trip, compared coordinate-wise (acosh would amplify
            // rounding between near-identical points to √ε)
            let back = hp.to_hyperboloid();
            for k in 0..4 {
                let scale = p.coords[k].abs().max(1.0);
                assert!(
                    (p.coords[k] - back.coords[k]).abs() / scale < 1e-11,
                    "round-trip coords {:?} vs {:?}",
                    p.coords,
                    back.coords
                );
            }
        }
    }

    #[test]
    fn nonpositive_height_rejected() {
        assert!(HalfSpacePoint::new([0.0, 0.0], 0.0).is_err());
        assert!(HalfSpacePoint::new([0.0, 0.0], -1.0).is_err());
    }
}
