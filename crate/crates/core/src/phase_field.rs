//! Pointwise phase-field fracture relations.
//!
//! The damage variable is oriented with `φ = 1` intact and `φ = 0` fully
//! broken. Stored energy is degraded by `g(φ) = (1−ζ)φ² + ζ`, the crack
//! surface is regularized by the elliptic density
//! `γ = (1−φ)²/(2ℓ_f) + (ℓ_f/2)|∇φ|²`, and the critical energy release
//! rate is either the constant `g_c` or the survival-scaled `S(λ_c)·g_c`
//! of the chain network.

use crate::chain::WesslauParams;
use crate::error::{Error, Result};

/// How the critical energy release rate depends on the local chain stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EcMode {
    /// `E_c = g_c` everywhere (default for the benchmark runs).
    #[default]
    Constant,
    /// `E_c = S(λ_c) · g_c`, with `λ_c` frozen over each time step.
    SurvivalScaled,
}

/// Fracture constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractureParams {
    /// Reference energy release rate, N/mm.
    pub g_c: f64,
    /// Regularization length, mm.
    pub ell_f: f64,
    /// Residual stiffness, dimensionless, 0 < ζ ≤ 1e−3.
    pub zeta: f64,
    pub ec_mode: EcMode,
}

impl FractureParams {
    pub fn new(g_c: f64, ell_f: f64, zeta: f64, ec_mode: EcMode) -> Result<Self> {
        if !(g_c > 0.0) {
            return Err(Error::validation(format!("g_c must be > 0, got {g_c}")));
        }
        if !(ell_f > 0.0) {
            return Err(Error::validation(format!("ell_f must be > 0, got {ell_f}")));
        }
        if !(zeta > 0.0 && zeta <= 1e-3) {
            return Err(Error::validation(format!(
                "zeta must lie in (0, 1e-3], got {zeta}"
            )));
        }
        Ok(Self {
            g_c,
            ell_f,
            zeta,
            ec_mode,
        })
    }

    /// Pointwise critical energy release rate.
    pub fn critical_energy(&self, lambda_c: f64, wesslau: &WesslauParams) -> f64 {
        match self.ec_mode {
            EcMode::Constant => self.g_c,
            EcMode::SurvivalScaled => wesslau.survival(lambda_c) * self.g_c,
        }
    }
}

/// Degradation `g(φ) = (1−ζ)φ² + ζ` and its derivative `g'(φ) = 2(1−ζ)φ`.
#[inline]
pub fn degradation(phi: f64, zeta: f64) -> (f64, f64) {
    ((1.0 - zeta) * phi * phi + zeta, 2.0 * (1.0 - zeta) * phi)
}

/// Regularized crack surface density `γ(φ, ∇φ)`.
#[inline]
pub fn crack_density(phi: f64, grad_phi_sq: f64, ell_f: f64) -> f64 {
    let one_m = 1.0 - phi;
    one_m * one_m / (2.0 * ell_f) + 0.5 * ell_f * grad_phi_sq
}

/// Algebraic parts of the damage PDE at a point: the energetic driving
/// force `2(1−ζ)φ W₀` and the non-Laplacian part of the crack resistance
/// `−(E_c/ℓ_f)(1−φ)`. The `E_c ℓ_f Δφ` term is assembled weakly.
#[inline]
pub fn pde_terms(phi: f64, w0: f64, ec: f64, ell_f: f64, zeta: f64) -> (f64, f64) {
    (
        2.0 * (1.0 - zeta) * phi * w0,
        -(ec / ell_f) * (1.0 - phi),
    )
}

/// Uniform-field equilibrium of the damage PDE (`∇φ = 0` solved for φ):
/// `φ* = E_c / (E_c + 2(1−ζ) ℓ_f W₀)`. Serves as a closed-form oracle for
/// the homogeneous patch solve.
#[inline]
pub fn homogeneous_equilibrium(w0: f64, ec: f64, ell_f: f64, zeta: f64) -> f64 {
    ec / (ec + 2.0 * (1.0 - zeta) * ell_f * w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rel_gap;
    use proptest::prelude::*;

    #[test]
    fn degradation_anchors() {
        let (g1, _) = degradation(1.0, 1e-5);
        assert_eq!(g1, 1.0);
        let (g0, d0) = degradation(0.0, 1e-5);
        assert_eq!(g0, 1e-5);
        assert_eq!(d0, 0.0);
        let (gh, _) = degradation(0.5, 1e-5);
        assert!(rel_gap(gh, 0.2500075, 0.0) < 1e-15);
    }

    #[test]
    fn degradation_monotone_with_zero_slope_at_broken_end() {
        let zeta = 1e-4;
        let mut prev = degradation(0.0, zeta).0;
        for k in 1..=100 {
            let phi = f64::from(k) / 100.0;
            let (g, dg) = degradation(phi, zeta);
            assert!(g > prev);
            assert!(dg >= 0.0);
            prev = g;
        }
    }

    #[test]
    fn crack_density_anchors() {
        assert_eq!(crack_density(1.0, 0.0, 2.0), 0.0);
        assert_eq!(crack_density(0.0, 0.0, 2.0), 0.25);
    }

    #[test]
    fn optimal_profile_has_unit_surface_measure() {
        // γ along φ(x) = 1 − exp(−|x|/ℓ) integrates to 1 per unit area.
        let ell = 1.7;
        let f = |x: f64| {
            let phi = 1.0 - (-x.abs() / ell).exp();
            let grad = (-x.abs() / ell).exp() / ell * x.signum();
            crack_density(phi, grad * grad, ell)
        };
        let got = crate::oracle::adaptive_simpson(&f, -40.0 * ell, 40.0 * ell, 1e-10);
        assert!(rel_gap(got, 1.0, 0.0) < 1e-3);
    }

    #[test]
    fn pde_terms_anchors() {
        assert_eq!(pde_terms(1.0, 0.0, 4.185, 2.0, 1e-5), (0.0, 0.0));
        assert_eq!(pde_terms(0.0, 3.0, 4.185, 2.0, 1e-5).0, 0.0);
        let (drive, resist) = pde_terms(0.5, 1.0, 4.185, 2.0, 1e-5);
        assert!(rel_gap(drive, 0.99999, 0.0) < 1e-12);
        assert!(rel_gap(resist, -1.04625, 0.0) < 1e-12);
    }

    #[test]
    fn critical_energy_modes() {
        let w = WesslauParams::derive(1.001, 1.194).unwrap();
        let fp = FractureParams::new(4.185, 2.0, 1e-5, EcMode::SurvivalScaled).unwrap();
        assert_eq!(fp.critical_energy(1.0, &w), 4.185);
        let fpc = FractureParams::new(4.185, 2.0, 1e-5, EcMode::Constant).unwrap();
        assert_eq!(fpc.critical_energy(2.5, &w), 4.185);
        // survival-scaled value tracks the closed-form survival factor
        let broad = WesslauParams::derive(1.5, 1.5).unwrap();
        let fps = FractureParams::new(4.185, 2.0, 1e-5, EcMode::SurvivalScaled).unwrap();
        let got = fps.critical_energy(1.3, &broad);
        assert!(rel_gap(got, broad.survival(1.3) * 4.185, 0.0) < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(FractureParams::new(0.0, 2.0, 1e-5, EcMode::Constant).is_err());
        assert!(FractureParams::new(4.185, -1.0, 1e-5, EcMode::Constant).is_err());
        assert!(FractureParams::new(4.185, 2.0, 0.0, EcMode::Constant).is_err());
        assert!(FractureParams::new(4.185, 2.0, 0.01, EcMode::Constant).is_err());
    }

    proptest! {
        #[test]
        fn homogeneous_equilibrium_properties(w0 in 0.0f64..50.0, ec in 0.1f64..10.0) {
            let phi = homogeneous_equilibrium(w0, ec, 2.0, 1e-5);
            prop_assert!(phi > 0.0 && phi <= 1.0);
            // non-increasing in the driving energy
            let phi2 = homogeneous_equilibrium(w0 + 1.0, ec, 2.0, 1e-5);
            prop_assert!(phi2 <= phi);
        }
    }
}
