//! Kirchhoff stress and spatial tangent of the network model.
//!
//! Stresses are reported as the Kirchhoff tensor `τ = J σ` (the
//! updated-Lagrangian measure work-conjugate to the spatial velocity
//! gradient over the reference volume):
//!
//! ```text
//! τ_eq  = 2 W_eq'  dev B̄          τ_vol = J W_vol'(J) I
//! τ_neqʲ = 2 W_neq' dev B̄ₑʲ,      B̄ₑʲ = F̄ (C̄ᵢʲ)⁻¹ F̄ᵀ
//! ```
//!
//! The tangent `κ` is the spatial (Oldroyd) tangent of each part:
//! `Dτ[∇u] = κ : ∇ˢu + ∇u·τ + τ·∇uᵀ`, so the assembled stiffness is
//! `∫ ∇N·κ·∇N + (∇N·τ·∇N) I` exactly. Branch tangents freeze the internal
//! variables (continuum tangent); [`numeric_tangent`] provides the
//! algorithmically consistent alternative by differencing the full stress
//! update including the branch evolution.

use super::{decompose, energy_iso, energy_vol, evolve, DeformationState, MaterialParams, MaxwellState};
use crate::error::{Error, Result};
use crate::math::{dev, dyad, sym_identity, Mat3, Voigt6};

/// Stress, spatial tangent and undegraded energy at one material point.
#[derive(Debug, Clone)]
pub struct StressTangent {
    /// Total Kirchhoff stress, MPa.
    pub t: Mat3,
    /// Total spatial tangent with both minor symmetries, MPa (Voigt 6x6).
    pub kappa: Voigt6,
    /// Undegraded stored energy density W₀ (all parts), MPa. Drives the
    /// phase field.
    pub w0: f64,
}

/// Evaluates stress, tangent and stored energy at fixed internal state.
pub fn stress_and_tangent(
    state: &DeformationState,
    maxwell: &MaxwellState,
    params: &MaterialParams,
) -> Result<StressTangent> {
    if maxwell.ci_bar.len() != params.branches.len() {
        return Err(Error::validation(format!(
            "internal state has {} branches, material has {}",
            maxwell.ci_bar.len(),
            params.branches.len()
        )));
    }
    let wes_iso = params.survival_active.then_some(&params.wesslau_iso);
    let wes_vol = params.survival_active.then_some(&params.wesslau_vol);

    let ident = Mat3::identity();
    let mut t = Mat3::zeros();
    let mut kappa = Voigt6::zeros();
    let mut w0 = 0.0;

    // volumetric part
    let ev = energy_vol(state.j, params.d_vol, wes_vol);
    t += ident * (state.j * ev.d1);
    kappa += dyad(&ident, &ident) * (state.j * state.j * ev.d2 + state.j * ev.d1)
        - sym_identity() * (2.0 * state.j * ev.d1);
    w0 += ev.w;

    // isochoric equilibrium part
    let ee = energy_iso(state.i1_bar, params.c10, wes_iso);
    t += dev(&state.b_bar) * (2.0 * ee.d1);
    kappa += iso_tangent(&state.b_bar, state.i1_bar, ee.d1, ee.d2);
    w0 += ee.w;

    // Maxwell branches on B̄ₑ = F̄ Cᵢ⁻¹ F̄ᵀ
    let f_bar = state.f * state.j.powf(-1.0 / 3.0);
    for (branch, ci) in params.branches.iter().zip(&maxwell.ci_bar) {
        let ci_inv = ci
            .try_inverse()
            .ok_or_else(|| Error::validation("singular inelastic deformation".to_string()))?;
        let b_e = f_bar * ci_inv * f_bar.transpose();
        let b_e = (b_e + b_e.transpose()) * 0.5;
        let i1e = b_e.trace();
        let en = energy_iso(i1e, branch.c10, wes_iso);
        t += dev(&b_e) * (2.0 * en.d1);
        kappa += iso_tangent(&b_e, i1e, en.d1, en.d2);
        w0 += en.w;
    }

    Ok(StressTangent { t, kappa, w0 })
}

/// Oldroyd tangent of an isochoric energy `W(Ī₁)` expressed on its own
/// left Cauchy–Green tensor `b` (either B̄ or B̄ₑʲ):
///
/// ```text
/// κ = 4W'' b⊗b − (4/3)(Ī₁W'' + W')(b⊗I + I⊗b)
///   + (4/9)(Ī₁²W'' + Ī₁W') I⊗I + (4/3) W' Ī₁ I_s
/// ```
fn iso_tangent(b: &Mat3, i1: f64, d1: f64, d2: f64) -> Voigt6 {
    let ident = Mat3::identity();
    dyad(b, b) * (4.0 * d2)
        - (dyad(b, &ident) + dyad(&ident, b)) * (4.0 / 3.0 * (i1 * d2 + d1))
        + dyad(&ident, &ident) * (4.0 / 9.0 * (i1 * i1 * d2 + i1 * d1))
        + sym_identity() * (4.0 / 3.0 * d1 * i1)
}

/// Algorithmically consistent spatial tangent by central differencing of
/// the full stress update (branch evolution included):
/// `κ_alg : d = [τ((I+h d)F) − τ((I−h d)F)]/(2h) − d·τ − τ·d`
/// probed over the six symmetric directions.
pub fn numeric_tangent(
    f: &Mat3,
    maxwell_start: &MaxwellState,
    dt: Option<f64>,
    params: &MaterialParams,
) -> Result<Voigt6> {
    let h = 1e-6;
    let tau_at = |fp: &Mat3| -> Result<Mat3> {
        let ds = decompose(fp)?;
        let mw = match dt {
            Some(dt) => evolve(maxwell_start, &ds.c_bar(), dt, params)?,
            None => maxwell_start.clone(),
        };
        Ok(stress_and_tangent(&ds, &mw, params)?.t)
    };
    let tau0 = tau_at(f)?;
    let mut out = Voigt6::zeros();
    for (col, &(i, j)) in crate::math::VOIGT_PAIRS.iter().enumerate() {
        let mut d = Mat3::zeros();
        d[(i, j)] = 1.0;
        d[(j, i)] = 1.0;
        let fp = (Mat3::identity() + d * h) * f;
        let fm = (Mat3::identity() - d * h) * f;
        let dtau = (tau_at(&fp)? - tau_at(&fm)?) / (2.0 * h);
        let alg = dtau - d * tau0 - tau0 * d;
        let v = crate::math::to_voigt(&alg);
        let scale = if i == j { 1.0 } else { 2.0 };
        for row in 0..6 {
            out[(row, col)] = v[row] / scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::WesslauParams;
    use crate::constitutive::MaxwellBranch;
    use crate::math::{contract_voigt, rel_gap, Vec3};
    use crate::oracle;

    fn material(branches: bool) -> MaterialParams {
        let b = if branches {
            vec![
                MaxwellBranch { c10: 1.5, tau: 2.0 },
                MaxwellBranch { c10: 0.7, tau: 40.0 },
            ]
        } else {
            vec![]
        };
        MaterialParams::new(9.183, b, 0.011, WesslauParams::derive(1.5, 1.5).unwrap()).unwrap()
    }

    fn sample_f(k: usize) -> Mat3 {
        // deterministic spread of moderate deformations with det in [0.9, 1.1]
        let t = k as f64 * 0.7;
        let g = Mat3::new(
            1.0 + 0.12 * t.sin(),
            0.08 * (1.3 * t).cos(),
            0.03 * (0.7 * t).sin(),
            0.05 * (2.1 * t).sin(),
            1.0 - 0.09 * (0.9 * t).cos(),
            0.06 * (1.7 * t).sin(),
            0.02 * (1.1 * t).cos(),
            0.04 * (0.6 * t).sin(),
            1.0 + 0.1 * (1.9 * t).sin(),
        );
        let det = g.determinant();
        let target = 0.9 + 0.2 * (0.5 + 0.5 * (3.3 * t).sin());
        g * (target / det).cbrt()
    }

    #[test]
    fn virgin_identity_is_stress_free() {
        for branches in [false, true] {
            let params = material(branches);
            let ds = decompose(&Mat3::identity()).unwrap();
            let mw = MaxwellState::virgin(params.branches.len());
            let st = stress_and_tangent(&ds, &mw, &params).unwrap();
            assert!(st.t.norm() < 1e-12, "‖T‖ = {}", st.t.norm());
            assert_eq!(st.w0, 0.0);
        }
    }

    #[test]
    fn stress_is_symmetric_and_tangent_major_symmetric() {
        let params = material(true);
        for k in 0..8 {
            let f = sample_f(k);
            let ds = decompose(&f).unwrap();
            let mw = evolve(
                &MaxwellState::virgin(2),
                &ds.c_bar(),
                0.5,
                &params,
            )
            .unwrap();
            let st = stress_and_tangent(&ds, &mw, &params).unwrap();
            assert!((st.t - st.t.transpose()).norm() < 1e-12 * st.t.norm().max(1.0));
            assert!((st.kappa - st.kappa.transpose()).norm() < 1e-10 * st.kappa.norm().max(1.0));
        }
    }

    #[test]
    fn incompressible_uniaxial_neo_hooke_stress() {
        // S ≡ 1, no branches, J = 1: σ_ax − σ_lat = 2 c10 (λ² − 1/λ)
        let params = material(false).without_survival();
        for lam in [1.1f64, 1.5, 2.0] {
            let q = 1.0 / lam.sqrt();
            let f = Mat3::from_diagonal(&Vec3::new(lam, q, q));
            let ds = decompose(&f).unwrap();
            let st = stress_and_tangent(&ds, &MaxwellState::virgin(0), &params).unwrap();
            let sigma = st.t / ds.j;
            let got = sigma[(0, 0)] - sigma[(1, 1)];
            let want = 2.0 * 9.183 * (lam * lam - 1.0 / lam);
            assert!(rel_gap(got, want, 0.0) < 1e-12, "λ = {lam}");
        }
    }

    #[test]
    fn kirchhoff_stress_matches_energy_gradient() {
        // P = ∂W/∂F = τ F^{−T}: directional FD of W₀ against τ contraction
        let params = material(true);
        let mw0 = MaxwellState::virgin(2);
        for k in 0..10 {
            let f = sample_f(k);
            let ds = decompose(&f).unwrap();
            let mw = evolve(&mw0, &ds.c_bar(), 1.0, &params).unwrap();
            let st = stress_and_tangent(&ds, &mw, &params).unwrap();
            let p = st.t * f.try_inverse().unwrap().transpose();
            for dir in 0..4 {
                let mut dh = Mat3::zeros();
                dh[(dir % 3, (dir * 2 + 1) % 3)] = 1.0;
                let w_of = |eps: f64| {
                    let fp = f + dh * eps;
                    let dsp = decompose(&fp).unwrap();
                    stress_and_tangent(&dsp, &mw, &params).unwrap().w0
                };
                let fd = oracle::diff5(w_of, 0.0, 1e-5);
                let got = p.dot(&dh);
                assert!(
                    rel_gap(got, fd, 1e-10) < 1e-5,
                    "sample {k} dir {dir}: {got} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn oldroyd_tangent_matches_stress_differences() {
        // Dτ[h d] = κ:d + d·τ + τ·d for symmetric d at frozen internal state
        let params = material(true);
        let mw0 = MaxwellState::virgin(2);
        for k in 0..6 {
            let f = sample_f(k);
            let ds = decompose(&f).unwrap();
            let mw = evolve(&mw0, &ds.c_bar(), 1.0, &params).unwrap();
            let st = stress_and_tangent(&ds, &mw, &params).unwrap();
            let d = Mat3::new(0.7, 0.2, -0.1, 0.2, -0.4, 0.3, -0.1, 0.3, 0.1);
            let h = 1e-6;
            let tau = |eps: f64| {
                let fp = (Mat3::identity() + d * eps) * f;
                let dsp = decompose(&fp).unwrap();
                stress_and_tangent(&dsp, &mw, &params).unwrap().t
            };
            let dtau = (tau(h) - tau(-h)) / (2.0 * h);
            let want = contract_voigt(&st.kappa, &d) + d * st.t + st.t * d;
            assert!(
                (dtau - want).norm() < 1e-4 * want.norm(),
                "sample {k}: gap {}",
                (dtau - want).norm() / want.norm()
            );
        }
    }

    #[test]
    fn numeric_tangent_agrees_with_analytic_when_frozen() {
        let params = material(false);
        let f = sample_f(3);
        let ds = decompose(&f).unwrap();
        let mw = MaxwellState::virgin(0);
        let analytic = stress_and_tangent(&ds, &mw, &params).unwrap().kappa;
        let numeric = numeric_tangent(&f, &mw, None, &params).unwrap();
        let gap = (analytic - numeric).norm() / analytic.norm();
        assert!(gap < 1e-5, "gap {gap}");
    }

    #[test]
    fn objectivity_under_rotations() {
        let params = material(true);
        let mw0 = MaxwellState::virgin(2);
        let f = sample_f(5);
        let ds = decompose(&f).unwrap();
        let mw = evolve(&mw0, &ds.c_bar(), 1.0, &params).unwrap();
        let t0 = stress_and_tangent(&ds, &mw, &params).unwrap().t;
        for axis in 0..3 {
            let angle = 0.3 + 0.4 * axis as f64;
            let rot = nalgebra::Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(match axis {
                    0 => Vec3::new(1.0, 0.2, -0.3),
                    1 => Vec3::new(-0.1, 1.0, 0.4),
                    _ => Vec3::new(0.5, -0.2, 1.0),
                }),
                angle,
            );
            let r: Mat3 = *rot.matrix();
            let dsr = decompose(&(r * f)).unwrap();
            let tr = stress_and_tangent(&dsr, &mw, &params).unwrap().t;
            assert!((tr - r * t0 * r.transpose()).norm() < 1e-10 * t0.norm());
        }
    }
}
