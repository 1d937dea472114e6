use serde::{Deserialize, Serialize};

use super::{TunedRound, TunerConfig};
use crate::error::{Error, Result};
use crate::operators::PhaseSeparator;
use crate::qaoa::{AngleSchedule, QaoaEvaluator};

/// How the gradient of `<H_C>` with respect to the angles is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Exact gradient from one forward and one reverse pass.
    Adjoint,
    /// Central differences with step `fd_step`, `4p` extra evaluations.
    CentralDifference,
}

/// `<H_C>` as a function of the flattened angles `[betas..., gammas...]`.
#[derive(Debug, Clone, Copy)]
pub struct AngleObjective<'a> {
    pub evaluator: &'a QaoaEvaluator,
    pub separator: PhaseSeparator,
}

impl<'a> AngleObjective<'a> {
    pub fn new(evaluator: &'a QaoaEvaluator, separator: PhaseSeparator) -> Self {
        AngleObjective { evaluator, separator }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let schedule = AngleSchedule::from_vec(x).expect("flattened angles have even length");
        self.evaluator.expectation(self.separator, &schedule)
    }

    pub fn value_and_gradient(&self, x: &[f64], method: GradientMethod, fd_step: f64) -> (f64, Vec<f64>) {
        match method {
            GradientMethod::Adjoint => {
                let schedule = AngleSchedule::from_vec(x).expect("flattened angles have even length");
                self.evaluator.expectation_and_gradient(self.separator, &schedule)
            }
            GradientMethod::CentralDifference => {
                (self.value(x), central_difference_gradient(|y| self.value(y), x, fd_step))
            }
        }
    }
}

/// `(f(x + h e_i) - f(x - h e_i)) / 2h` for every coordinate.
pub fn central_difference_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let plus = f(&y);
            y[i] = x[i] - h;
            let minus = f(&y);
            y[i] = x[i];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Fourth-order five-point stencil gradient.
pub fn five_point_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut at = |i: usize, offset: f64| {
        y[i] = x[i] + offset;
        let v = f(&y);
        y[i] = x[i];
        v
    };
    (0..x.len())
        .map(|i| (-at(i, 2.0 * h) + 8.0 * at(i, h) - 8.0 * at(i, -h) + at(i, -2.0 * h)) / (12.0 * h))
        .collect()
}

/// Search direction used by gradient ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AscentDirection {
    /// Quasi-Newton direction from a BFGS inverse-Hessian estimate.
    Bfgs,
    /// Plain gradient.
    Steepest,
}

#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

pub(crate) struct AscentLimits {
    pub max_iterations: usize,
    pub tol: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense inverse-Hessian estimate, scaled identity until the first update.
struct InverseHessian {
    m: usize,
    h: Vec<f64>,
    scale: f64,
}

impl InverseHessian {
    fn new(m: usize, scale: f64) -> Self {
        let mut ih = InverseHessian {
            m,
            h: vec![0.0; m * m],
            scale,
        };
        ih.reset();
        ih
    }

    fn reset(&mut self) {
        self.h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.m {
            self.h[i * self.m + i] = self.scale;
        }
    }

    fn apply(&self, g: &[f64]) -> Vec<f64> {
        self.h.chunks_exact(self.m).map(|row| dot(row, g)).collect()
    }

    /// BFGS update for a minimisation step `s` with gradient change `y`.
    fn update(&mut self, s: &[f64], y: &[f64]) {
        let sy = dot(s, y);
        if sy <= 1e-14 * dot(s, s).sqrt() * dot(y, y).sqrt() {
            return;
        }
        let m = self.m;
        let rho = 1.0 / sy;
        let hy = self.apply(y);
        let yhy = dot(y, &hy);
        for i in 0..m {
            for j in 0..m {
                self.h[i * m + j] +=
                    (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
    }
}

/// Gradient ascent with Armijo backtracking.
///
/// The direction is the gradient or its BFGS-preconditioned version; a BFGS
/// direction that fails the line search is retried once as the plain
/// gradient. Every accepted step strictly increases the objective, so the
/// result is never worse than the start.
pub(crate) fn ascend(obj: &AngleObjective<'_>, x0: Vec<f64>, limits: AscentLimits, cfg: &TunerConfig) -> Ascent {
    let mut x = x0;
    if x.is_empty() {
        let value = obj.value(&x);
        return Ascent {
            x,
            value,
            converged: true,
        };
    }
    let (mut value, mut grad) = obj.value_and_gradient(&x, cfg.gradient, cfg.fd_step);
    let mut inv = InverseHessian::new(x.len(), cfg.gd_initial_step);
    let first_step = match cfg.direction {
        AscentDirection::Bfgs => 1.0,
        AscentDirection::Steepest => cfg.gd_initial_step,
    };
    for _ in 0..limits.max_iterations {
        if dot(&grad, &grad).sqrt() < limits.tol {
            return Ascent {
                x,
                value,
                converged: true,
            };
        }
        let mut dir = match cfg.direction {
            AscentDirection::Bfgs => inv.apply(&grad),
            AscentDirection::Steepest => grad.clone(),
        };
        if dot(&dir, &grad) <= 0.0 {
            inv.reset();
            dir = inv.apply(&grad);
        }
        let mut accepted = line_search(obj, &x, value, &grad, &dir, first_step, cfg);
        if accepted.is_none() && cfg.direction == AscentDirection::Bfgs {
            inv.reset();
            dir = inv.apply(&grad);
            accepted = line_search(obj, &x, value, &grad, &dir, first_step, cfg);
        }
        let Some((next, next_value)) = accepted else {
            return Ascent {
                x,
                value,
                converged: false,
            };
        };
        let (_, next_grad) = obj.value_and_gradient(&next, cfg.gradient, cfg.fd_step);
        let s: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad.iter().zip(&next_grad).map(|(a, b)| a - b).collect();
        inv.update(&s, &y);
        x = next;
        value = next_value;
        grad = next_grad;
    }
    let converged = dot(&grad, &grad).sqrt() < limits.tol;
    Ascent { x, value, converged }
}

fn line_search(
    obj: &AngleObjective<'_>,
    x: &[f64],
    value: f64,
    grad: &[f64],
    dir: &[f64],
    first_step: f64,
    cfg: &TunerConfig,
) -> Option<(Vec<f64>, f64)> {
    let slope = dot(grad, dir);
    let mut step = first_step;
    while step >= cfg.gd_min_step {
        let trial: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + step * di).collect();
        let v = obj.value(&trial);
        if v > value && v >= value + cfg.gd_armijo * step * slope {
            return Some((trial, v));
        }
        step *= cfg.gd_backtrack;
    }
    None
}

/// Gradient ascent on `<H_C>` over all `2p` angles starting at `start`.
///
/// Stops when the gradient norm drops below `gd_convergence_tol` or after
/// `max_gd_iterations`; in the latter case the round is flagged unconverged.
pub fn optimize_angles_gd(
    evaluator: &QaoaEvaluator,
    separator: PhaseSeparator,
    start: &AngleSchedule,
    config: &TunerConfig,
) -> Result<TunedRound> {
    config.validate()?;
    let obj = AngleObjective::new(evaluator, separator);
    let limits = AscentLimits {
        max_iterations: config.max_gd_iterations,
        tol: config.gd_convergence_tol,
    };
    let result = ascend(&obj, start.to_vec(), limits, config);
    let schedule = AngleSchedule::from_vec(&result.x).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(TunedRound::evaluate(evaluator, separator, schedule, result.converged))
}
