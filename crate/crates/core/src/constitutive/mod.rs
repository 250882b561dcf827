//! Finite-strain viscoelastic network material.
//!
//! The free energy is split volumetrically/isochorically and the isochoric
//! part into an equilibrium spring plus `n` Maxwell branches:
//!
//! ```text
//! W = W_vol(J) + W_eq(Ī₁) + Σ_j W_neq(Ī₁ᵉʲ)
//! W_eq  = c10  (Ī₁−3) · S(λ_c(Ī₁)),      λ_c = √(Ī₁/3)
//! W_neq = c10j (Ī₁ᵉʲ−3) · S(λ_c(Ī₁ᵉʲ))
//! W_vol = (1/D)(J−1)² · S(λ_c(J)),       λ_c = J^{1/3}
//! ```
//!
//! with the chain survival factor `S` from [`crate::chain`]. Branch
//! viscosities follow from the tabulated relaxation times as
//! `η_j = 4 c10j τ_j`, which reproduces `exp(−t/τ_j)` overstress decay in
//! the small-strain limit of the evolution equation.

mod driver;
mod maxwell;
mod stress;

pub use driver::{point_driver, DriveMode, DriveSample};
pub use maxwell::{evolve, evolve_detailed, BranchUpdate};
pub use stress::{numeric_tangent, stress_and_tangent, StressTangent};

use crate::chain::WesslauParams;
use crate::error::{Error, Result};
use crate::math::Mat3;

/// One Maxwell branch: spring modulus and relaxation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellBranch {
    /// Branch modulus c10j, MPa.
    pub c10: f64,
    /// Relaxation time τ_j, s.
    pub tau: f64,
}

impl MaxwellBranch {
    /// Branch viscosity `η_j = 4 c10j τ_j`, MPa·s.
    #[inline]
    pub fn eta(&self) -> f64 {
        4.0 * self.c10 * self.tau
    }
}

/// Full parameter set of the viscoelastic network model.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    /// Equilibrium modulus c10, MPa.
    pub c10: f64,
    /// Maxwell branches, kept sorted by relaxation time ascending.
    pub branches: Vec<MaxwellBranch>,
    /// Volumetric penalty constant D, MPa⁻¹ (`Ψ_vol = (1/D)(J−1)²`;
    /// smaller D stiffens the volumetric response).
    pub d_vol: f64,
    /// Distribution constants for the isochoric survival factor.
    pub wesslau_iso: WesslauParams,
    /// Distribution constants for the volumetric survival factor
    /// (usually aliases `wesslau_iso`).
    pub wesslau_vol: WesslauParams,
    /// When false the survival factor is replaced by 1 everywhere
    /// (Neo-Hooke limit).
    pub survival_active: bool,
}

impl MaterialParams {
    /// Builds a canonical parameter set; branches are sorted by τ ascending.
    pub fn new(
        c10: f64,
        mut branches: Vec<MaxwellBranch>,
        d_vol: f64,
        wesslau: WesslauParams,
    ) -> Result<Self> {
        if !(c10 > 0.0) {
            return Err(Error::validation(format!("c10 must be > 0, got {c10}")));
        }
        if !(d_vol > 0.0) {
            return Err(Error::validation(format!("D must be > 0, got {d_vol}")));
        }
        for (j, b) in branches.iter().enumerate() {
            if !(b.c10 > 0.0) || !(b.tau > 0.0) {
                return Err(Error::validation(format!(
                    "branch {j}: moduli and relaxation times must be > 0 (c10j = {}, tau = {})",
                    b.c10, b.tau
                )));
            }
        }
        branches.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap());
        Ok(Self {
            c10,
            branches,
            d_vol,
            wesslau_iso: wesslau,
            wesslau_vol: wesslau,
            survival_active: true,
        })
    }

    /// Overrides the volumetric distribution constants.
    pub fn with_volumetric_wesslau(mut self, wesslau_vol: WesslauParams) -> Self {
        self.wesslau_vol = wesslau_vol;
        self
    }

    /// Disables the survival factor (`S ≡ 1`): pure Neo-Hooke limit.
    pub fn without_survival(mut self) -> Self {
        self.survival_active = false;
        self
    }

    /// Identified material of the studied polyurethane adhesive:
    /// c10 = 9.183 MPa, Wesslau constants (Q = 1.001, ^Mλ_m = 1.194) and the
    /// seven-branch relaxation spectrum on {0.5 … 5000} s. `D` defaults to a
    /// small-strain Poisson ratio of 0.45 for the equilibrium spring:
    /// ν = 0.45 ⟹ κ/μ = 2(1+ν)/(3(1−2ν)) = 29/3, μ = 2 c10, κ = 2/D.
    pub fn reference_polyurethane() -> Self {
        let wesslau = WesslauParams::derive(1.001, 1.194).expect("valid reference constants");
        let branches = vec![
            MaxwellBranch { c10: 5.223, tau: 0.5 },
            MaxwellBranch { c10: 4.152, tau: 10.0 },
            MaxwellBranch { c10: 3.140, tau: 100.0 },
            MaxwellBranch { c10: 2.328, tau: 500.0 },
            MaxwellBranch { c10: 1.582, tau: 1000.0 },
            MaxwellBranch { c10: 1.131, tau: 2500.0 },
            MaxwellBranch { c10: 0.961, tau: 5000.0 },
        ];
        let c10 = 9.183;
        let d_vol = d_for_poisson(c10, 0.45);
        Self::new(c10, branches, d_vol, wesslau).expect("valid reference parameters")
    }
}

/// Volumetric constant giving the requested small-strain Poisson ratio for
/// shear modulus μ = 2 c10: `D = 3(1−2ν)/((1+ν) · 2 c10)`.
pub fn d_for_poisson(c10: f64, nu: f64) -> f64 {
    let mu = 2.0 * c10;
    let kappa = 2.0 * mu * (1.0 + nu) / (3.0 * (1.0 - 2.0 * nu));
    2.0 / kappa
}

/// Kinematic split of a deformation gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationState {
    /// Deformation gradient.
    pub f: Mat3,
    /// Jacobian det F.
    pub j: f64,
    /// Isochoric left Cauchy–Green tensor `J^{−2/3} F Fᵀ`.
    pub b_bar: Mat3,
    /// First invariant tr(B̄) ≥ 3.
    pub i1_bar: f64,
}

impl DeformationState {
    /// Isochoric right Cauchy–Green tensor `J^{−2/3} Fᵀ F`.
    pub fn c_bar(&self) -> Mat3 {
        self.f.transpose() * self.f * self.j.powf(-2.0 / 3.0)
    }
}

/// Volumetric/isochoric decomposition. Fails for `det F ≤ 0`.
pub fn decompose(f: &Mat3) -> Result<DeformationState> {
    let j = f.determinant();
    if !(j > 0.0) {
        return Err(Error::SingularDeformation { det: j });
    }
    let b_bar = f * f.transpose() * j.powf(-2.0 / 3.0);
    let i1_bar = b_bar.trace();
    Ok(DeformationState { f: *f, j, b_bar, i1_bar })
}

/// Internal variables: one unimodular inelastic right Cauchy–Green tensor
/// per Maxwell branch.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellState {
    pub ci_bar: Vec<Mat3>,
}

impl MaxwellState {
    /// Undeformed internal state for `n` branches.
    pub fn virgin(n: usize) -> Self {
        Self {
            ci_bar: vec![Mat3::identity(); n],
        }
    }
}

/// Energy density and its first/second derivatives w.r.t. its scalar
/// argument (Ī₁ for isochoric parts, J for the volumetric part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDerivs {
    pub w: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Isochoric micromechanical energy `c(Ī₁−3)·S(λ_c)` with
/// `λ_c = √(Ī₁/3)`, `λ_c' = (1/6)(Ī₁/3)^{−1/2}`,
/// `λ_c'' = −(1/36)(Ī₁/3)^{−3/2}`. Pass `None` for the Neo-Hooke limit.
pub fn energy_iso(i1_bar: f64, c: f64, wesslau: Option<&WesslauParams>) -> EnergyDerivs {
    let psi = c * (i1_bar - 3.0);
    let Some(p) = wesslau else {
        return EnergyDerivs { w: psi, d1: c, d2: 0.0 };
    };
    let x = i1_bar / 3.0;
    let lc = x.sqrt();
    let lc1 = 1.0 / (6.0 * lc);
    let lc2 = -1.0 / (36.0 * lc * x);
    survival_product(psi, c, 0.0, p, lc, lc1, lc2)
}

/// Volumetric micromechanical energy `(1/D)(J−1)²·S(λ_c)` with
/// `λ_c = J^{1/3}`, `λ_c' = (1/3)J^{−2/3}`, `λ_c'' = −(2/9)J^{−5/3}`.
pub fn energy_vol(j: f64, d_vol: f64, wesslau: Option<&WesslauParams>) -> EnergyDerivs {
    let psi = (j - 1.0) * (j - 1.0) / d_vol;
    let psi1 = 2.0 * (j - 1.0) / d_vol;
    let psi2 = 2.0 / d_vol;
    let Some(p) = wesslau else {
        return EnergyDerivs { w: psi, d1: psi1, d2: psi2 };
    };
    let lc = j.cbrt();
    let lc1 = 1.0 / (3.0 * lc * lc);
    let lc2 = -2.0 / (9.0 * lc * lc * lc * lc * lc);
    survival_product(psi, psi1, psi2, p, lc, lc1, lc2)
}

/// Product/chain rule for `W = Ψ·S(λ_c(x))`:
/// `W' = Ψ'S + Ψ Ṡ λ_c'` and
/// `W'' = Ψ''S + 2Ψ' Ṡ λ_c' + Ψ (S̈ λ_c'² + Ṡ λ_c'')`.
fn survival_product(
    psi: f64,
    psi1: f64,
    psi2: f64,
    p: &WesslauParams,
    lc: f64,
    lc1: f64,
    lc2: f64,
) -> EnergyDerivs {
    let s = p.survival(lc);
    let s1 = p.survival_d1_guarded(lc);
    let s2 = p.survival_d2_guarded(lc);
    let g1 = s1 * lc1;
    let g2 = s2 * lc1 * lc1 + s1 * lc2;
    EnergyDerivs {
        w: psi * s,
        d1: psi1 * s + psi * g1,
        d2: psi2 * s + 2.0 * psi1 * g1 + psi * g2,
    }
}
