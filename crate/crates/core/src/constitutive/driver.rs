//! Homogeneous-deformation drivers for material-point studies and fitting.

use super::{decompose, evolve, stress_and_tangent, MaterialParams, MaxwellState};
use crate::error::{Error, Result};
use crate::math::{Mat3, Vec3};

/// Kinematic program of the point driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveMode {
    /// `F = diag(λ, m, m)` with the lateral stretch `m` solved so the
    /// lateral Cauchy stress vanishes; reports axial Cauchy stress.
    UniaxialStress,
    /// `F = I + γ e₁⊗e₂`; the control value is the shear γ; reports σ₁₂.
    SimpleShear,
    /// Constrained relaxation `F = diag(λ, 1, 1)` (uniaxial strain, lateral
    /// contraction suppressed); reports axial Cauchy stress.
    Relaxation,
}

/// One output sample of the driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub t: f64,
    /// Prescribed control value (stretch, or shear for `SimpleShear`).
    pub control: f64,
    /// Reported Cauchy stress component, MPa.
    pub stress: f64,
}

/// Absolute tolerance on the lateral Cauchy stress in uniaxial-stress mode.
const LATERAL_TOL: f64 = 1e-8;

/// Runs a prescribed `(t, control)` history through the material.
///
/// The first sample defines the instantaneous response from virgin internal
/// variables (a step applied at `t₀`); subsequent samples advance the
/// Maxwell branches over `dt = t_k − t_{k−1}`.
pub fn point_driver(
    history: &[(f64, f64)],
    mode: DriveMode,
    params: &MaterialParams,
) -> Result<Vec<DriveSample>> {
    if history.is_empty() {
        return Err(Error::validation("empty load history".to_string()));
    }
    for w in history.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::validation(format!(
                "history times must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
    }
    let n_branches = params.branches.len();
    let mut state = MaxwellState::virgin(n_branches);
    let mut lateral = 1.0 / history[0].1.max(0.1).sqrt();
    let mut out = Vec::with_capacity(history.len());
    let mut prev_t = history[0].0;
    for (k, &(t, control)) in history.iter().enumerate() {
        let dt = if k == 0 { None } else { Some(t - prev_t) };
        let (stress, new_state, new_lateral) =
            step(control, mode, &state, dt, lateral, params)?;
        state = new_state;
        lateral = new_lateral;
        out.push(DriveSample { t, control, stress });
        prev_t = t;
    }
    Ok(out)
}

fn build_f(mode: DriveMode, control: f64, lateral: f64) -> Mat3 {
    match mode {
        DriveMode::UniaxialStress => Mat3::from_diagonal(&Vec3::new(control, lateral, lateral)),
        DriveMode::SimpleShear => {
            let mut f = Mat3::identity();
            f[(0, 1)] = control;
            f
        }
        DriveMode::Relaxation => Mat3::from_diagonal(&Vec3::new(control, 1.0, 1.0)),
    }
}

/// Advances one step; returns (reported stress, committed state, lateral).
fn step(
    control: f64,
    mode: DriveMode,
    state: &MaxwellState,
    dt: Option<f64>,
    lateral_guess: f64,
    params: &MaterialParams,
) -> Result<(f64, MaxwellState, f64)> {
    let evaluate = |lateral: f64| -> Result<(Mat3, MaxwellState)> {
        let f = build_f(mode, control, lateral);
        let ds = decompose(&f)?;
        let mw = match dt {
            Some(dt) => evolve(state, &ds.c_bar(), dt, params)?,
            None => state.clone(),
        };
        let st = stress_and_tangent(&ds, &mw, params)?;
        Ok((st.t / ds.j, mw))
    };

    match mode {
        DriveMode::SimpleShear => {
            let (sigma, mw) = evaluate(1.0)?;
            Ok((sigma[(0, 1)], mw, 1.0))
        }
        DriveMode::Relaxation => {
            let (sigma, mw) = evaluate(1.0)?;
            Ok((sigma[(0, 0)], mw, 1.0))
        }
        DriveMode::UniaxialStress => {
            // scalar Newton on the lateral Cauchy stress
            let mut m = lateral_guess.clamp(0.2, 5.0);
            let (mut sigma, mut mw) = evaluate(m)?;
            let mut res = sigma[(1, 1)];
            let mut iters = 0;
            while res.abs() > LATERAL_TOL {
                if iters >= 60 {
                    return Err(Error::NewtonNonConvergence {
                        time: f64::NAN,
                        residual: res.abs(),
                        iters,
                    });
                }
                iters += 1;
                let h = 1e-6 * m.max(0.1);
                let rp = evaluate(m + h)?.0[(1, 1)];
                let rm = evaluate(m - h)?.0[(1, 1)];
                let slope = (rp - rm) / (2.0 * h);
                if slope.abs() < 1e-30 {
                    return Err(Error::NewtonNonConvergence {
                        time: f64::NAN,
                        residual: res.abs(),
                        iters,
                    });
                }
                let mut delta = -res / slope;
                // keep the lateral stretch positive and damp wild steps
                let mut accepted = false;
                for _ in 0..20 {
                    let m_try = m + delta;
                    if m_try > 0.05 {
                        if let Ok((s_try, mw_try)) = evaluate(m_try) {
                            let r_try = s_try[(1, 1)];
                            if r_try.abs() < res.abs() || delta.abs() < 1e-14 {
                                m = m_try;
                                sigma = s_try;
                                mw = mw_try;
                                res = r_try;
                                accepted = true;
                                break;
                            }
                        }
                    }
                    delta *= 0.5;
                }
                if !accepted {
                    return Err(Error::NewtonNonConvergence {
                        time: f64::NAN,
                        residual: res.abs(),
                        iters,
                    });
                }
            }
            Ok((sigma[(0, 0)], mw, m))
        }
    }
}
