//! Root-system data for rank-one (and formally general) symmetric spaces.
//!
//! Only real hyperbolic 3-space is carried with exact kernels; the root data
//! still drives every envelope exponent, so nothing downstream hard-codes
//! the H³ values.

use crate::error::{Result, SymkerError};
use serde::{Deserialize, Serialize};

/// One reduced positive root with its multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedRoot {
    /// Norm ‖α‖ of the root under the Killing-form inner product.
    pub norm: f64,
    /// Multiplicity of α.
    pub m: u32,
    /// Multiplicity of 2α (0 unless the root system is non-reduced).
    pub m2: u32,
}

/// Parameters (ℓ, Σ_r⁺, n, ν, ‖ρ‖, ρ_min) of the model space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootData {
    pub rank: u32,
    pub reduced_roots: Vec<ReducedRoot>,
    /// Manifold dimension n = ℓ + Σ m_α (α and 2α counted separately).
    pub dim: u32,
    /// Dimension at infinity ν = ℓ + 2 |Σ_r⁺|.
    pub dim_infinity: u32,
    /// ‖ρ‖, half-sum of positive roots with multiplicities.
    pub rho_norm: f64,
    /// min over unit directions of ⟨ρ, ·⟩ on the closed positive chamber.
    pub rho_min: f64,
}

impl RootData {
    /// Validated constructor; checks the dimension bookkeeping.
    pub fn new(
        rank: u32,
        reduced_roots: Vec<ReducedRoot>,
        rho_norm: f64,
        rho_min: f64,
    ) -> Result<Self> {
        if reduced_roots.is_empty() {
            return Err(SymkerError::Domain("at least one reduced root required".into()));
        }
        if !(rho_min > 0.0 && rho_min <= rho_norm) {
            return Err(SymkerError::Domain(format!(
                "need 0 < rho_min <= rho_norm, got {rho_min} and {rho_norm}"
            )));
        }
        let msum: u32 = reduced_roots.iter().map(|r| r.m + r.m2).sum();
        let dim = rank + msum;
        let dim_infinity = rank + 2 * reduced_roots.len() as u32;
        Ok(Self { rank, reduced_roots, dim, dim_infinity, rho_norm, rho_min })
    }

    /// Real hyperbolic 3-space: rank one, one reduced root of norm 1 with
    /// m_α = 2, so n = ν = 3 and ‖ρ‖ = ρ_min = 1.
    pub fn h3() -> Self {
        Self::new(1, vec![ReducedRoot { norm: 1.0, m: 2, m2: 0 }], 1.0, 1.0)
            .expect("H3 preset is valid")
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn nu(&self) -> f64 {
        self.dim_infinity as f64
    }

    pub fn num_reduced(&self) -> usize {
        self.reduced_roots.len()
    }

    /// δ(r) = ∏ (sinh ‖α‖r)^{m_α} (sinh 2‖α‖r)^{m_2α}, the Cartan-polar
    /// density along a ray (rank-one radial reduction).
    pub fn polar_density(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        let mut d = 1.0;
        for root in &self.reduced_roots {
            d *= (root.norm * r).sinh().powi(root.m as i32);
            if root.m2 > 0 {
                d *= (2.0 * root.norm * r).sinh().powi(root.m2 as i32);
            }
        }
        d
    }

    /// The is-H³ check used by the exact-kernel layer.
    pub fn is_h3(&self) -> bool {
        self == &Self::h3()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h3_preset_bookkeeping() {
        let rd = RootData::h3();
        assert_eq!(rd.rank, 1);
        assert_eq!(rd.dim, 3);
        assert_eq!(rd.dim_infinity, 3);
        assert_eq!(rd.rho_norm, 1.0);
        assert_eq!(rd.rho_min, 1.0);
    }

    #[test]
    fn dimension_invariants_for_nonreduced_data() {
        // quaternionic-hyperbolic-plane-like data: m_α = 4, m_2α = 3
        let rd = RootData::new(1, vec![ReducedRoot { norm: 1.0, m: 4, m2: 3 }], 2.5, 2.5).unwrap();
        assert_eq!(rd.dim, 1 + 4 + 3);
        assert_eq!(rd.dim_infinity, 1 + 2);
    }

    #[test]
    fn invalid_rho_rejected() {
        assert!(RootData::new(1, vec![ReducedRoot { norm: 1.0, m: 2, m2: 0 }], 1.0, 1.5).is_err());
        assert!(RootData::new(1, vec![], 1.0, 1.0).is_err());
    }
}
