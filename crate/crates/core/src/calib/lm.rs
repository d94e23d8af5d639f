//! Damped least squares (Levenberg–Marquardt) for the small, well-conditioned
//! fits used in calibration.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative decrease of ‖r‖ falls below this.
    pub f_tol: f64,
    /// Stop when every relative parameter step falls below this.
    pub x_tol: f64,
    pub lambda0: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            f_tol: 1e-14,
            x_tol: 1e-12,
            lambda0: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// √(diag(JᵀJ)⁻¹ · ‖r‖²/(n−p)). NaN when the normal matrix is singular.
    pub std_errors: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// ‖r‖ after each accepted step, starting with the initial guess.
    pub history: Vec<f64>,
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(n, x.len());
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        let h = 1e-6 * x[k].abs().max(1e-12);
        xp[k] = x[k] + h;
        let rp = f(&xp);
        xp[k] = x[k] - h;
        let rm = f(&xp);
        xp[k] = x[k];
        for i in 0..n {
            j[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    j
}

/// Minimizes ‖f(x)‖² from `x0`. Steps are accepted only when they reduce the
/// residual, so `history` is nonincreasing. Damping is scaled by diag(JᵀJ).
pub fn levenberg_marquardt<F: Fn(&[f64]) -> Vec<f64>>(f: F, x0: &[f64], opts: &LmOptions) -> LmOutcome {
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let n = r.len();
    let p = x.len();
    let mut cost = norm(&r);
    let mut history = vec![cost];
    let mut lambda = opts.lambda0;
    let mut converged = false;
    let mut iterations = 0;
    let mut j = jacobian(&f, &x, n);

    while iterations < opts.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jtj = j.transpose() * &j;
        let g = j.transpose() * DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..40 {
            let mut m = jtj.clone();
            for k in 0..p {
                m[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = m.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            let cn = norm(&rn);
            if cn.is_finite() && cn < cost {
                let small_step = x
                    .iter()
                    .zip(step.iter())
                    .all(|(a, b)| b.abs() <= opts.x_tol * a.abs().max(1e-300));
                let small_drop = (cost - cn) <= opts.f_tol * cost;
                x = xn;
                r = rn;
                cost = cn;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if small_step || small_drop {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No descent direction left at any damping: a (numerical) minimum.
            converged = lambda.is_finite();
            break;
        }
        if converged {
            break;
        }
        j = jacobian(&f, &x, n);
    }

    let j = jacobian(&f, &x, n);
    let jtj = j.transpose() * &j;
    let dof = (n as f64 - p as f64).max(1.0);
    let s2 = cost * cost / dof;
    let std_errors = match jtj.try_inverse() {
        Some(inv) => (0..p).map(|k| (inv[(k, k)] * s2).max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; p],
    };
    LmOutcome {
        params: x,
        std_errors,
        residual_norm: cost,
        iterations,
        converged,
        history,
    }
}

/// Coarse scan of one parameter over `[lo, hi]` (geometric spacing when both
/// bounds are positive). Returns the grid point with the smallest ‖f‖.
pub fn grid_scan<F: Fn(f64) -> f64>(cost: F, lo: f64, hi: f64, points: usize) -> f64 {
    let n = points.max(2);
    let geometric = lo > 0.0 && hi > 0.0;
    let at = |k: usize| {
        let t = k as f64 / (n - 1) as f64;
        if geometric {
            lo * (hi / lo).powf(t)
        } else {
            lo + (hi - lo) * t
        }
    };
    let mut best = (at(0), f64::INFINITY);
    for k in 0..n {
        let x = at(k);
        let c = cost(x);
        if c < best.1 {
            best = (x, c);
        }
    }
    best.0
}
