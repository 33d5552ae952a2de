//! Pump-power scaling laws.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::lm::{minimize, LmOptions};
use super::FitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScalingModel {
    /// A P / (P² + B)
    Sbr,
    /// A P + B
    Linewidth,
    /// A P / (P + B)
    Brightness,
    /// A P² / (P² + B)
    S,
    /// A P
    Rate,
    /// A P² + B
    Background,
}

impl ScalingModel {
    pub fn eval(self, a: f64, b: f64, p: f64) -> f64 {
        match self {
            Self::Sbr => a * p / (p * p + b),
            Self::Linewidth => a * p + b,
            Self::Brightness => a * p / (p + b),
            Self::S => a * p * p / (p * p + b),
            Self::Rate => a * p,
            Self::Background => a * p * p + b,
        }
    }

    /// ∂/∂A and ∂/∂B.
    fn gradient(self, a: f64, b: f64, p: f64) -> (f64, f64) {
        match self {
            Self::Sbr => {
                let d = p * p + b;
                (p / d, -a * p / (d * d))
            }
            Self::Linewidth => (p, 1.0),
            Self::Brightness => {
                let d = p + b;
                (p / d, -a * p / (d * d))
            }
            Self::S => {
                let d = p * p + b;
                (p * p / d, -a * p * p / (d * d))
            }
            Self::Rate => (p, 0.0),
            Self::Background => (p * p, 1.0),
        }
    }

    fn has_pole(self) -> bool {
        matches!(self, Self::Sbr | Self::Brightness | Self::S)
    }

    fn denominator(self, b: f64, p: f64) -> f64 {
        match self {
            Self::Brightness => p + b,
            _ => p * p + b,
        }
    }

    fn is_linear(self) -> bool {
        matches!(self, Self::Linewidth | Self::Rate | Self::Background)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model_kind: ScalingModel,
    pub param_a: f64,
    pub param_b: f64,
    pub param_a_err: f64,
    pub param_b_err: f64,
    /// RMS of (y − model)/y.
    pub residual_norm: f64,
}

impl ScalingFit {
    pub fn eval(&self, p: f64) -> f64 {
        self.model_kind.eval(self.param_a, self.param_b, p)
    }

    /// Large-power limit of the S model, A₄.
    pub fn asymptote(&self) -> Option<f64> {
        (self.model_kind == ScalingModel::S).then_some(self.param_a)
    }
}

/// Relative-residual least squares of a scaling law to (P, y) points.
pub fn fit_scaling(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::InsufficientData(format!(
            "{} points (need >= 3)",
            points.len()
        )));
    }
    let mut ps: Vec<f64> = points.iter().map(|p| p.0).collect();
    if ps.iter().any(|p| !(*p > 0.0) || !p.is_finite()) || points.iter().any(|p| !p.1.is_finite()) {
        return Err(FitError::InsufficientData(
            "pump powers must be positive and values finite".into(),
        ));
    }
    ps.sort_by(f64::total_cmp);
    if ps.windows(2).any(|w| w[0] == w[1]) {
        return Err(FitError::RankDeficient(
            "pump powers are not distinct".into(),
        ));
    }
    let ymax = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    if ymax == 0.0 {
        return Err(FitError::RankDeficient("all values are zero".into()));
    }
    let w: Vec<f64> = points
        .iter()
        .map(|p| 1.0 / p.1.abs().max(1e-12 * ymax))
        .collect();

    // Linearized start; exact for linear models and noiseless data.
    let rows: Vec<([f64; 2], f64)> = points
        .iter()
        .map(|&(p, y)| match model {
            ScalingModel::Sbr => ([p, -y], y * p * p),
            ScalingModel::Linewidth => ([p, 1.0], y),
            ScalingModel::Brightness => ([p, -y], y * p),
            ScalingModel::S => ([p * p, -y], y * p * p),
            ScalingModel::Rate => ([p, 0.0], y),
            ScalingModel::Background => ([p * p, 1.0], y),
        })
        .collect();
    let (a0, b0) = if model == ScalingModel::Rate {
        let num: f64 = rows
            .iter()
            .zip(&w)
            .map(|((x, z), w)| w * w * x[0] * z)
            .sum();
        let den: f64 = rows
            .iter()
            .zip(&w)
            .map(|((x, _), w)| w * w * x[0] * x[0])
            .sum();
        (num / den, 0.0)
    } else {
        let mut m = Matrix2::<f64>::zeros();
        let mut rhs = Vector2::<f64>::zeros();
        for ((x, z), wi) in rows.iter().zip(&w) {
            let w2 = wi * wi;
            for i in 0..2 {
                rhs[i] += w2 * x[i] * z;
                for j in 0..2 {
                    m[(i, j)] += w2 * x[i] * x[j];
                }
            }
        }
        let scale = m[(0, 0)].abs() * m[(1, 1)].abs();
        if m.determinant().abs() <= 1e-12 * scale {
            return Err(FitError::RankDeficient(
                "normal equations are singular".into(),
            ));
        }
        let s = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| FitError::RankDeficient("normal equations are singular".into()))?;
        (s[0], s[1])
    };

    let residuals = |a: f64, b: f64| -> DVector<f64> {
        DVector::from_iterator(
            points.len(),
            points
                .iter()
                .zip(&w)
                .map(|(&(p, y), wi)| wi * (model.eval(a, b, p) - y)),
        )
    };
    let jacobian = |a: f64, b: f64| -> DMatrix<f64> {
        let mut j = DMatrix::zeros(points.len(), 2);
        for (i, (&(p, _), wi)) in points.iter().zip(&w).enumerate() {
            let (ga, gb) = model.gradient(a, b, p);
            j[(i, 0)] = wi * ga;
            j[(i, 1)] = wi * gb;
        }
        j
    };

    let (a, b) = if model.is_linear() || model == ScalingModel::Rate {
        (a0, b0)
    } else {
        let b_start = if b0 > 0.0 { b0 } else { ps[0] * ps[0] };
        let res = minimize(
            DVector::from_vec(vec![a0, b_start]),
            |x: &DVector<f64>| {
                let r = residuals(x[0], x[1]);
                r.iter()
                    .all(|v| v.is_finite())
                    .then(|| (r, jacobian(x[0], x[1])))
            },
            &LmOptions::default(),
        );
        (res.x[0], res.x[1])
    };
    if !a.is_finite() || !b.is_finite() {
        return Err(FitError::RankDeficient("non-finite parameters".into()));
    }
    if model.has_pole()
        && points
            .iter()
            .any(|&(p, _)| !(model.denominator(b, p) > 0.0))
    {
        return Err(FitError::RankDeficient(format!(
            "fitted B = {b:.3e} puts a pole inside the data"
        )));
    }

    let r = residuals(a, b);
    let n = points.len() as f64;
    let n_params = if model == ScalingModel::Rate {
        1.0
    } else {
        2.0
    };
    let s2 = r.norm_squared() / (n - n_params).max(1.0);
    let j = jacobian(a, b);
    let (a_err, b_err) = if model == ScalingModel::Rate {
        let jtj: f64 = j.column(0).norm_squared();
        ((s2 / jtj).sqrt(), 0.0)
    } else {
        match j.tr_mul(&j).try_inverse() {
            Some(inv) => ((s2 * inv[(0, 0)]).sqrt(), (s2 * inv[(1, 1)]).sqrt()),
            None => {
                return Err(FitError::RankDeficient(
                    "singular Jacobian at the optimum".into(),
                ))
            }
        }
    };
    Ok(ScalingFit {
        model_kind: model,
        param_a: a,
        param_b: b,
        param_a_err: a_err,
        param_b_err: b_err,
        residual_norm: (r.norm_squared() / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pumps() -> Vec<f64> {
        (1..=8).map(|k| 2.0 * k as f64).collect()
    }

    #[test]
    fn exact_sbr_recovery() {
        let pts: Vec<(f64, f64)> = pumps()
            .iter()
            .map(|&p| (p, ScalingModel::Sbr.eval(10.0, 4.0, p)))
            .collect();
        let fit = fit_scaling(&pts, ScalingModel::Sbr).unwrap();
        assert!((fit.param_a - 10.0).abs() < 1e-8 * 10.0);
        assert!((fit.param_b - 4.0).abs() < 1e-8 * 4.0);
    }

    #[test]
    fn exact_linewidth_recovery() {
        let pts: Vec<(f64, f64)> = pumps().iter().map(|&p| (p, 0.02 * p + 0.9)).collect();
        let fit = fit_scaling(&pts, ScalingModel::Linewidth).unwrap();
        assert!((fit.param_a - 0.02).abs() < 1e-13);
        assert!((fit.param_b - 0.9).abs() < 1e-13);
    }

    #[test]
    fn s_model_plateau() {
        let pts: Vec<(f64, f64)> = pumps()
            .iter()
            .map(|&p| (p, ScalingModel::S.eval(5e5, 6.0, p)))
            .collect();
        let fit = fit_scaling(&pts, ScalingModel::S).unwrap();
        let plateau = ScalingModel::S.eval(5e5, 6.0, 64.0);
        assert!((fit.asymptote().unwrap() - plateau).abs() / plateau < 0.01);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            fit_scaling(&[(1.0, 1.0), (2.0, 2.0)], ScalingModel::Linewidth),
            Err(FitError::InsufficientData(_))
        ));
        let dup = [(2.0, 1.0), (2.0, 1.0), (4.0, 3.0)];
        assert!(matches!(
            fit_scaling(&dup, ScalingModel::Linewidth),
            Err(FitError::RankDeficient(_))
        ));
        assert!(fit_scaling(
            &[(0.0, 1.0), (2.0, 1.0), (4.0, 3.0)],
            ScalingModel::Linewidth
        )
        .is_err());
    }
}
