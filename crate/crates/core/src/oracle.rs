//! Independent numerical oracles.
//!
//! Everything here deliberately avoids the closed forms it is used to
//! check: the quadrature integrates the raw density, the differentiators
//! sample black-box functions. The `check` CLI subcommand and the test
//! suites both run these.

use crate::chain::WesslauParams;

/// Recursive adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 52)
}

/// Quadrature of the probable chain-length density `g` over `[1, lambda]`.
///
/// The integrand is a log-normal spike; panels are anchored on the known
/// Gaussian structure of `g` in `u = ln(a2(λ−1))` so the adaptive rule
/// cannot step over the mass. Only the raw density is evaluated.
pub fn integrate_pdf_g(p: &WesslauParams, lambda: f64, tol: f64) -> f64 {
    if lambda <= 1.0 {
        return 0.0;
    }
    // Gaussian parameters of the integrand mass in u-space.
    let mu = -1.0 / (2.0 * p.a1);
    let sigma = 1.0 / (2.0 * p.a1).sqrt();
    let lo = 1.0 + (lambda - 1.0) * 1e-12;
    let mut pts: Vec<f64> = Vec::new();
    pts.push(lo);
    for k in -12..=12 {
        let u = mu + f64::from(k) * sigma;
        let lam = 1.0 + u.exp() / p.a2;
        if lam > lo && lam < lambda {
            pts.push(lam);
        }
    }
    pts.push(lambda);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let g = |x: f64| p.pdf_g(x).unwrap_or(0.0);
    let mut total = 0.0;
    let panel_tol = tol / pts.len() as f64;
    for w in pts.windows(2) {
        total += adaptive_simpson(&g, w[0], w[1], panel_tol);
    }
    total
}

/// First derivative by the five-point central stencil, O(h⁴).
pub fn diff5(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Second derivative by the five-point central stencil, O(h⁴).
pub fn diff5_second(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Three-point central difference (matches the step sizes quoted in the
/// module contracts where a specific stencil is named).
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Dense finite-difference Jacobian of a vector map, central differences.
pub fn fd_jacobian(f: &mut impl FnMut(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut xp = x.to_vec();
    let m = f(x).len();
    let mut jac = vec![vec![0.0; n]; m];
    for j in 0..n {
        let hj = h * (1.0 + x[j].abs());
        xp[j] = x[j] + hj;
        let fp = f(&xp);
        xp[j] = x[j] - hj;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * hj);
        }
    }
    jac
}
