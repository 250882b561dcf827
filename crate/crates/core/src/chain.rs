//! Chain-stretch statistics of the polymer network.
//!
//! The maximum chain stretch `λ_m` of the network is distributed with a
//! Wesslau-type (log-normal) density
//!
//! ```text
//! w(λ_m) = 1/(β√π) · 1/(λ_m−1) · exp(−(1/β²) ln²((λ_m−1)/λ0))
//! ```
//!
//! from which the probable chain-length density follows as
//!
//! ```text
//! g(λ_m) = λN/(λ_m−1) · w(λ_m) = a0 (λ_m−1)⁻² exp(−a1 ln²(a2(λ_m−1)))
//! ```
//!
//! Chains whose maximum stretch lies below the current chain stretch `λ_c`
//! are broken and carry no load; the survival factor
//! `S(λ_c) = 1 − ∫₁^{λ_c} g dλ_m` multiplies every free-energy term of the
//! constitutive model. The integral has the closed form
//!
//! ```text
//! ∫₁^λ g dλ_m = C ( 1 + erf( (1 + 2 a1 ln(a2(λ−1))) / (2√a1) ) )
//! C = a0 a2 exp(1/(4a1)) √π / (2√a1)
//! ```
//!
//! where the erf argument carries `2√a1` in the denominator: that is what
//! analytic integration of `g` produces, and it is the form the quadrature
//! oracle in [`crate::oracle`] confirms. With it, `2C` collapses to
//! `√(λN/λM) · exp(β²/4) · ... = 1` identically, so the unstrained network
//! has unit probability mass and `S` decays from 1 to 0.

use crate::error::{Error, Result};
use crate::math::erf;

/// Current stretches closer to 1 than this are treated as the unstrained
/// limit: the density kernel is singular/indeterminate at `λ = 1` while its
/// limit value is 0.
pub const LAMBDA_GUARD: f64 = 1e-9;

/// Constants of the Wesslau chain-stretch distribution.
///
/// Constructed from the polydispersity index `Q` and the mass-average chain
/// stretch via [`WesslauParams::derive`]; all other fields are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WesslauParams {
    /// Polydispersity index, > 1.
    pub q: f64,
    /// Mass-average chain stretch, > 1.
    pub lambda_mass: f64,
    /// √(2 ln Q).
    pub beta: f64,
    /// Number-average chain stretch `lambda_mass / q`.
    pub lambda_number: f64,
    /// Geometric mean √(lambda_mass · lambda_number); the median scale of
    /// the log-normal kernel.
    pub lambda_scale: f64,
    /// `lambda_number / (β√π)`.
    pub a0: f64,
    /// `1/β²`.
    pub a1: f64,
    /// `1/lambda_scale`.
    pub a2: f64,
}

impl WesslauParams {
    /// Derives all distribution constants from `(Q, ^Mλ_m)`.
    ///
    /// Rejects `Q <= 1` (β would vanish, the distribution degenerates to a
    /// monodisperse spike) and `lambda_mass <= 1`.
    pub fn derive(q: f64, lambda_mass: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::domain(format!(
                "polydispersity index Q must be > 1, got {q}"
            )));
        }
        if !(lambda_mass > 1.0) || !lambda_mass.is_finite() {
            return Err(Error::domain(format!(
                "mass-average chain stretch must be > 1, got {lambda_mass}"
            )));
        }
        let beta = (2.0 * q.ln()).sqrt();
        let lambda_number = lambda_mass / q;
        let lambda_scale = (lambda_mass * lambda_number).sqrt();
        let a0 = lambda_number / (beta * std::f64::consts::PI.sqrt());
        let a1 = 1.0 / (beta * beta);
        let a2 = 1.0 / lambda_scale;
        Ok(Self {
            q,
            lambda_mass,
            beta,
            lambda_number,
            lambda_scale,
            a0,
            a1,
            a2,
        })
    }

    /// Integration constant `C` of the closed-form cumulative distribution.
    pub fn norm_constant(&self) -> f64 {
        self.a0 * self.a2 * (1.0 / (4.0 * self.a1)).exp() * std::f64::consts::PI.sqrt()
            / (2.0 * self.a1.sqrt())
    }

    /// Total probability mass `2C = ∫₁^∞ g dλ_m` (identically 1 up to
    /// rounding) minus one. Configuration code warns when this exceeds 1e-3.
    pub fn mass_defect(&self) -> f64 {
        2.0 * self.norm_constant() - 1.0
    }

    /// Maximum-chain-stretch density `w(λ_m)`.
    pub fn pdf_w(&self, lambda_m: f64) -> Result<f64> {
        if !(lambda_m > 1.0) {
            return Err(Error::domain(format!(
                "pdf_w needs lambda_m > 1, got {lambda_m}"
            )));
        }
        let t = lambda_m - 1.0;
        let u = (t / self.lambda_scale).ln();
        Ok(1.0 / (self.beta * std::f64::consts::PI.sqrt() * t) * (-u * u / (self.beta * self.beta)).exp())
    }

    /// Probable chain-length density `g(λ_m) = a0 (λ_m−1)⁻² exp(−a1 ln²(a2(λ_m−1)))`.
    pub fn pdf_g(&self, lambda_m: f64) -> Result<f64> {
        if !(lambda_m > 1.0) {
            return Err(Error::domain(format!(
                "pdf_g needs lambda_m > 1, got {lambda_m}"
            )));
        }
        let t = lambda_m - 1.0;
        let u = (self.a2 * t).ln();
        Ok(self.a0 / (t * t) * (-self.a1 * u * u).exp())
    }

    /// Closed-form cumulative mass `∫₁^λ g dλ_m`.
    ///
    /// Non-decreasing, `cdf(1) = 0` (limit convention, extended by 0 below
    /// λ = 1 so volumetric callers can pass `λ_c(J) = J^{1/3} < 1`), and
    /// `cdf(∞) = 2C`.
    pub fn cdf(&self, lambda: f64) -> f64 {
        if lambda <= 1.0 {
            return 0.0;
        }
        let u = (self.a2 * (lambda - 1.0)).ln();
        let arg = (1.0 + 2.0 * self.a1 * u) / (2.0 * self.a1.sqrt());
        self.norm_constant() * (1.0 + erf(arg))
    }

    /// Survival factor `S(λ_c) = 1 − cdf(λ_c)`: the load-bearing chain
    /// fraction at the current stretch. `S(1) = 1`, non-increasing.
    pub fn survival(&self, lambda_c: f64) -> f64 {
        1.0 - self.cdf(lambda_c)
    }

    /// `dS/dλ_c = −g(λ_c)`. Errors at the singular kernel boundary; use
    /// [`WesslauParams::survival_d1_guarded`] in evaluation paths.
    pub fn survival_d1(&self, lambda_c: f64) -> Result<f64> {
        Ok(-self.pdf_g(lambda_c)?)
    }

    /// `d²S/dλ_c² = −dg/dλ_c = 2 a0 (λ_c−1)⁻³ exp(−a1 u²) (1 + a1 u)`
    /// with `u = ln(a2(λ_c−1))`.
    pub fn survival_d2(&self, lambda_c: f64) -> Result<f64> {
        if !(lambda_c > 1.0) {
            return Err(Error::domain(format!(
                "survival_d2 needs lambda_c > 1, got {lambda_c}"
            )));
        }
        let t = lambda_c - 1.0;
        let u = (self.a2 * t).ln();
        Ok(2.0 * self.a0 / (t * t * t) * (-self.a1 * u * u).exp() * (1.0 + self.a1 * u))
    }

    /// First derivative with the `λ_c → 1` limit value 0 substituted inside
    /// the guard band (and for `λ_c < 1`, where no chains are broken).
    pub fn survival_d1_guarded(&self, lambda_c: f64) -> f64 {
        if lambda_c <= 1.0 + LAMBDA_GUARD {
            0.0
        } else {
            -self.pdf_g_unchecked(lambda_c)
        }
    }

    /// Second derivative with the same guard as
    /// [`WesslauParams::survival_d1_guarded`].
    pub fn survival_d2_guarded(&self, lambda_c: f64) -> f64 {
        if lambda_c <= 1.0 + LAMBDA_GUARD {
            0.0
        } else {
            self.survival_d2(lambda_c).expect("guarded above 1")
        }
    }

    fn pdf_g_unchecked(&self, lambda_m: f64) -> f64 {
        let t = lambda_m - 1.0;
        let u = (self.a2 * t).ln();
        self.a0 / (t * t) * (-self.a1 * u * u).exp()
    }
}
