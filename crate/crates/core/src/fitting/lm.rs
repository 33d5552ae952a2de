//! Levenberg–Marquardt with Marquardt diagonal scaling and Nielsen's damping update.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative step size below which the iteration stops.
    pub step_tolerance: f64,
    /// Relative cost decrease below which an accepted step counts as stalled.
    pub cost_tolerance: f64,
    /// Largest |cos| between the residual and a Jacobian column at a stationary point.
    pub gradient_tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            step_tolerance: 1e-10,
            cost_tolerance: 1e-8,
            gradient_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: DVector<f64>,
    /// ½‖r‖².
    pub cost: f64,
    pub residuals: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes ½‖r(x)‖². `model` returns the residual vector and its Jacobian.
pub fn minimize<F>(x0: DVector<f64>, model: F, options: &LmOptions) -> LmResult
where
    F: Fn(&DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)>,
{
    let mut x = x0;
    let (mut r, mut j) = match model(&x) {
        Some(v) => v,
        None => {
            let n = x.len();
            return LmResult {
                x,
                cost: f64::INFINITY,
                residuals: DVector::zeros(0),
                jacobian: DMatrix::zeros(0, n),
                iterations: 0,
                converged: false,
            };
        }
    };
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = {
        let jtj = j.tr_mul(&j);
        1e-3 * jtj.diagonal().max().max(1e-300)
    };
    let mut nu = 2.0;
    let mut stalled = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jtj = j.tr_mul(&j);
        let g = j.tr_mul(&r);
        let rnorm = r.norm();
        let stationary = (0..g.len()).all(|k| {
            let cn = jtj[(k, k)].sqrt();
            cn == 0.0 || g[k].abs() <= options.gradient_tolerance * cn * rnorm
        });
        if stationary {
            converged = true;
            break;
        }
        let mut a = jtj.clone();
        for k in 0..a.nrows() {
            a[(k, k)] += lambda * jtj[(k, k)].max(1e-12 * jtj.diagonal().max());
        }
        let h = match a.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => match a.lu().solve(&(-&g)) {
                Some(h) => h,
                None => {
                    lambda *= nu;
                    nu *= 2.0;
                    continue;
                }
            },
        };
        if h.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance) {
            converged = true;
            break;
        }
        let x_new = &x + &h;
        let accepted = match model(&x_new) {
            Some((r_new, j_new)) => {
                let cost_new = 0.5 * r_new.norm_squared();
                let predicted = -(g.dot(&h) + 0.5 * h.dot(&(&jtj * &h)));
                let rho = if predicted > 0.0 {
                    (cost - cost_new) / predicted
                } else {
                    -1.0
                };
                if cost_new.is_finite() && rho > 0.0 {
                    let rel = (cost - cost_new) / cost;
                    x = x_new;
                    r = r_new;
                    j = j_new;
                    cost = cost_new;
                    lambda *= (1.0 / 3.0f64).max(1.0 - (2.0 * rho - 1.0).powi(3));
                    nu = 2.0;
                    stalled = if rel < options.cost_tolerance {
                        stalled + 1
                    } else {
                        0
                    };
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        if !accepted {
            lambda *= nu;
            nu *= 2.0;
            if !lambda.is_finite() || lambda > 1e300 {
                converged = true;
                break;
            }
        }
        if stalled >= 3 {
            converged = true;
            break;
        }
    }
    LmResult {
        x,
        cost,
        residuals: r,
        jacobian: j,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let model = |x: &DVector<f64>| {
            let r = DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]);
            let j = DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0]);
            Some((r, j))
        };
        let res = minimize(
            DVector::from_vec(vec![-1.2, 1.0]),
            model,
            &LmOptions::default(),
        );
        assert!(res.converged);
        assert!((res.x[0] - 1.0).abs() < 1e-10 && (res.x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_decay() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        let model = |x: &DVector<f64>| {
            let mut r = DVector::zeros(t.len());
            let mut j = DMatrix::zeros(t.len(), 2);
            for (i, ti) in t.iter().enumerate() {
                let e = (-x[1] * ti).exp();
                r[i] = x[0] * e - y[i];
                j[(i, 0)] = e;
                j[(i, 1)] = -x[0] * ti * e;
            }
            Some((r, j))
        };
        let res = minimize(
            DVector::from_vec(vec![1.0, 0.5]),
            model,
            &LmOptions::default(),
        );
        assert!((res.x[0] - 3.0).abs() < 1e-10 && (res.x[1] - 1.7).abs() < 1e-10);
    }
}
