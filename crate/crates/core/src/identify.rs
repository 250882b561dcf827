//! Gradient-free parameter identification from stress–stretch data.
//!
//! A classic Nelder–Mead simplex (reflection 1.0, expansion 2.0,
//! contraction 0.5, shrink 0.5) minimizes the weighted least-squares
//! mismatch between the uniaxial point driver and measured data. Free
//! moduli and the shifted Wesslau constants are optimized in log space so
//! positivity cannot be lost; box bounds are enforced by projection before
//! every evaluation.

use crate::constitutive::{point_driver, DriveMode, MaterialParams};
use crate::error::{Error, Result};
use crate::WesslauParams;

/// Simplex coefficients and termination controls.
#[derive(Debug, Clone)]
pub struct NelderMeadConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Terminate when the simplex diameter falls below this.
    pub tol: f64,
    pub max_evals: usize,
    /// Relative edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol: 1e-8,
            max_evals: 5000,
            initial_step: 0.05,
        }
    }
}

/// Result of a simplex run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// Best objective value after each accepted operation (non-increasing).
    pub trace: Vec<f64>,
}

/// Derivative-free minimization with box projection.
pub fn nelder_mead(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &[(f64, f64)],
    config: &NelderMeadConfig,
) -> Result<OptimResult> {
    let n = x0.len();
    if n == 0 {
        return Err(Error::validation("empty parameter vector".to_string()));
    }
    if bounds.len() != n {
        return Err(Error::validation(format!(
            "{} bounds for {n} parameters",
            bounds.len()
        )));
    }
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi) {
            return Err(Error::validation(format!(
                "bound {k} is empty: [{lo}, {hi}]"
            )));
        }
        if x0[k] < lo || x0[k] > hi {
            return Err(Error::validation(format!(
                "start value {} of parameter {k} outside [{lo}, {hi}]",
                x0[k]
            )));
        }
    }

    let project = |x: &mut [f64]| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let evals = std::cell::Cell::new(0usize);
    let bad_streak = std::cell::Cell::new(0usize);
    let mut eval = |x: &mut Vec<f64>| -> Result<f64> {
        project(x);
        let f = objective(x);
        evals.set(evals.get() + 1);
        if f.is_finite() {
            bad_streak.set(0);
            Ok(f)
        } else {
            bad_streak.set(bad_streak.get() + 1);
            if bad_streak.get() > n + 1 {
                Err(Error::Optimizer(format!(
                    "objective non-finite at {} consecutive points (last x = {x:?})",
                    bad_streak.get()
                )))
            } else {
                Ok(f64::INFINITY)
            }
        }
    };

    // initial simplex: x0 plus one step per coordinate
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x = x0.to_vec();
    let f0 = eval(&mut x)?;
    simplex.push((x, f0));
    for k in 0..n {
        let mut xk = x0.to_vec();
        let h = config.initial_step * xk[k].abs().max(1.0);
        xk[k] = if xk[k] + h <= bounds[k].1 { xk[k] + h } else { xk[k] - h };
        let fk = eval(&mut xk)?;
        simplex.push((xk, fk));
    }
    if !simplex.iter().any(|(_, f)| f.is_finite()) {
        return Err(Error::Optimizer(
            "objective non-finite on the whole initial simplex".to_string(),
        ));
    }

    let mut trace = Vec::new();
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        trace.push(simplex[0].1);
        let diameter = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < config.tol || evals.get() >= config.max_evals {
            return Ok(OptimResult {
                x: simplex[0].0.clone(),
                f: simplex[0].1,
                evals: evals.get(),
                trace,
            });
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let second_worst = simplex[n - 1].1;
        let best = simplex[0].1;

        let combine = |a: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + a * (c - w))
                .collect()
        };

        let mut xr = combine(config.reflection);
        let fr = eval(&mut xr)?;
        if fr < best {
            let mut xe = combine(config.reflection * config.expansion);
            let fe = eval(&mut xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < second_worst {
            simplex[n] = (xr, fr);
        } else {
            // contraction: outside if the reflection improved on the worst
            let (mut xc, against) = if fr < worst.1 {
                (combine(config.reflection * config.contraction), fr)
            } else {
                (combine(-config.contraction), worst.1)
            };
            let fc = eval(&mut xc)?;
            if fc <= against {
                simplex[n] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut xs: Vec<f64> = best_x
                        .iter()
                        .zip(&v.0)
                        .map(|(b, x)| b + config.shrink * (x - b))
                        .collect();
                    let fs = eval(&mut xs)?;
                    *v = (xs, fs);
                }
            }
        }
    }
}

/// One measured sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSample {
    pub stretch: f64,
    /// Cauchy stress, MPa.
    pub stress: f64,
    pub weight: f64,
}

/// Mask of the parameters allowed to move; relaxation times stay on the
/// fixed grid.
#[derive(Debug, Clone, Default)]
pub struct FreeParams {
    pub c10: bool,
    pub branch_c10: Vec<bool>,
    pub q: bool,
    pub lambda_mass: bool,
    pub d_vol: bool,
}

impl FreeParams {
    pub fn count(&self) -> usize {
        usize::from(self.c10)
            + self.branch_c10.iter().filter(|&&b| b).count()
            + usize::from(self.q)
            + usize::from(self.lambda_mass)
            + usize::from(self.d_vol)
    }
}

/// Least-squares identification problem.
#[derive(Debug, Clone)]
pub struct FitProblem {
    /// Strictly increasing stretches.
    pub data: Vec<FitSample>,
    pub free: FreeParams,
    /// Box bounds per free parameter, pack order
    /// `[c10, c10j…, Q, λ_mass, D]` restricted to the free ones, in the
    /// original (not log) parameterization.
    pub bounds: Vec<(f64, f64)>,
}

/// Identification output.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub params: MaterialParams,
    /// Per-sample signed residuals σ_model − σ_data, MPa.
    pub residuals: Vec<f64>,
    pub objective: f64,
    pub evals: usize,
    /// Driver failures absorbed as infinite objective values.
    pub failed_evals: usize,
}

fn validate_problem(problem: &FitProblem, params0: &MaterialParams) -> Result<()> {
    if problem.free.branch_c10.len() != params0.branches.len() {
        return Err(Error::validation(format!(
            "free-parameter mask covers {} branches, material has {}",
            problem.free.branch_c10.len(),
            params0.branches.len()
        )));
    }
    let n_free = problem.free.count();
    if problem.data.len() < n_free {
        return Err(Error::validation(format!(
            "{} samples cannot determine {n_free} free parameters",
            problem.data.len()
        )));
    }
    if problem.bounds.len() != n_free {
        return Err(Error::validation(format!(
            "{} bounds for {n_free} free parameters",
            problem.bounds.len()
        )));
    }
    for w in problem.data.windows(2) {
        if !(w[1].stretch > w[0].stretch) {
            return Err(Error::validation(
                "sample stretches must be strictly increasing".to_string(),
            ));
        }
    }
    if problem.data.iter().any(|s| !(s.weight > 0.0)) {
        return Err(Error::validation("all weights must be > 0".to_string()));
    }
    Ok(())
}

/// Packs the free parameters into log space.
fn pack(params: &MaterialParams, free: &FreeParams) -> Vec<f64> {
    let mut x = Vec::new();
    if free.c10 {
        x.push(params.c10.ln());
    }
    for (b, &is_free) in params.branches.iter().zip(&free.branch_c10) {
        if is_free {
            x.push(b.c10.ln());
        }
    }
    if free.q {
        x.push((params.wesslau_iso.q - 1.0).ln());
    }
    if free.lambda_mass {
        x.push((params.wesslau_iso.lambda_mass - 1.0).ln());
    }
    if free.d_vol {
        x.push(params.d_vol.ln());
    }
    x
}

/// Log-space images of the original-space bounds (all maps are monotone).
fn pack_bounds(problem: &FitProblem) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(problem.bounds.len());
    let mut idx = 0usize;
    let shifted = |shift: f64, (lo, hi): (f64, f64)| ((lo - shift).ln(), (hi - shift).ln());
    let free = &problem.free;
    if free.c10 {
        out.push(shifted(0.0, problem.bounds[idx]));
        idx += 1;
    }
    for &is_free in &free.branch_c10 {
        if is_free {
            out.push(shifted(0.0, problem.bounds[idx]));
            idx += 1;
        }
    }
    if free.q {
        out.push(shifted(1.0, problem.bounds[idx]));
        idx += 1;
    }
    if free.lambda_mass {
        out.push(shifted(1.0, problem.bounds[idx]));
        idx += 1;
    }
    if free.d_vol {
        out.push(shifted(0.0, problem.bounds[idx]));
    }
    out
}

fn unpack(x: &[f64], template: &MaterialParams, free: &FreeParams) -> Result<MaterialParams> {
    let mut params = template.clone();
    let mut it = x.iter();
    let mut next = || -> f64 { *it.next().expect("pack/unpack stay in sync") };
    if free.c10 {
        params.c10 = next().exp();
    }
    for (b, &is_free) in params.branches.iter_mut().zip(&free.branch_c10) {
        if is_free {
            b.c10 = next().exp();
        }
    }
    let mut q = params.wesslau_iso.q;
    let mut lm = params.wesslau_iso.lambda_mass;
    if free.q {
        q = 1.0 + next().exp();
    }
    if free.lambda_mass {
        lm = 1.0 + next().exp();
    }
    if free.q || free.lambda_mass {
        let wes = WesslauParams::derive(q, lm)?;
        params.wesslau_iso = wes;
        params.wesslau_vol = wes;
    }
    if free.d_vol {
        params.d_vol = next().exp();
    }
    MaterialParams::new(params.c10, params.branches, params.d_vol, params.wesslau_iso).map(
        |mut p| {
            p.survival_active = template.survival_active;
            p.wesslau_vol = params.wesslau_vol;
            p
        },
    )
}

/// Model stresses at the sample stretches for a constant stretch rate.
fn model_stresses(
    data: &[FitSample],
    params: &MaterialParams,
    rate: f64,
) -> Result<Vec<f64>> {
    let mut history: Vec<(f64, f64)> = Vec::with_capacity(data.len() + 1);
    if data[0].stretch > 1.0 {
        history.push((0.0, 1.0));
    }
    for s in data {
        history.push(((s.stretch - 1.0) / rate, s.stretch));
    }
    let out = point_driver(&history, DriveMode::UniaxialStress, params)?;
    Ok(out[out.len() - data.len()..].iter().map(|s| s.stress).collect())
}

/// Identifies the free parameters by simplex search; driver failures are
/// absorbed as infinite objective values.
pub fn fit(
    problem: &FitProblem,
    params0: &MaterialParams,
    rate: f64,
    config: &NelderMeadConfig,
) -> Result<FitReport> {
    validate_problem(problem, params0)?;
    if !(rate > 0.0) {
        return Err(Error::validation(format!("rate must be > 0, got {rate}")));
    }
    let residuals_at = |params: &MaterialParams| -> Result<Vec<f64>> {
        let model = model_stresses(&problem.data, params, rate)?;
        Ok(model
            .iter()
            .zip(&problem.data)
            .map(|(m, s)| m - s.stress)
            .collect())
    };
    if problem.free.count() == 0 {
        let residuals = residuals_at(params0)?;
        let objective = residuals
            .iter()
            .zip(&problem.data)
            .map(|(r, s)| s.weight * r * r)
            .sum();
        return Ok(FitReport {
            params: params0.clone(),
            residuals,
            objective,
            evals: 1,
            failed_evals: 0,
        });
    }

    let x0 = pack(params0, &problem.free);
    let bounds = pack_bounds(problem);
    let mut failed = 0usize;
    let mut objective = |x: &[f64]| -> f64 {
        let Ok(params) = unpack(x, params0, &problem.free) else {
            failed += 1;
            return f64::INFINITY;
        };
        match residuals_at(&params) {
            Ok(res) => res
                .iter()
                .zip(&problem.data)
                .map(|(r, s)| s.weight * r * r)
                .sum(),
            Err(_) => {
                failed += 1;
                f64::INFINITY
            }
        }
    };
    let opt = nelder_mead(&mut objective, &x0, &bounds, config)?;
    let params = unpack(&opt.x, params0, &problem.free)?;
    let residuals = residuals_at(&params)?;
    Ok(FitReport {
        params,
        residuals,
        objective: opt.f,
        evals: opt.evals,
        failed_evals: failed,
    })
}
