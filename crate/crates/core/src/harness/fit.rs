use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Standard deviations below this are raised to it before weighting.
pub const STDDEV_FLOOR: f64 = 0.5;
pub const MULTI_STARTS: usize = 20;
const FIT_SEED: u64 = 0x5CA1_1F17;
const MAX_ITERATIONS: usize = 2000;

/// Growth model for mean rounds as a function of problem size `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ansatz {
    /// `a ln(b x + c)`
    Log,
    /// `a x^b + c`
    Power,
    /// `a x^b`
    Monomial,
}

impl Ansatz {
    pub const ALL: [Ansatz; 3] = [Ansatz::Log, Ansatz::Power, Ansatz::Monomial];

    pub fn param_count(self) -> usize {
        match self {
            Ansatz::Monomial => 2,
            Ansatz::Log | Ansatz::Power => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ansatz::Log => "log",
            Ansatz::Power => "power",
            Ansatz::Monomial => "monomial",
        }
    }

    /// Model value; NaN outside the model's domain.
    pub fn eval(self, p: &[f64], x: f64) -> f64 {
        match self {
            Ansatz::Log => {
                let arg = p[1] * x + p[2];
                if arg > 0.0 {
                    p[0] * arg.ln()
                } else {
                    f64::NAN
                }
            }
            Ansatz::Power => p[0] * x.powf(p[1]) + p[2],
            Ansatz::Monomial => p[0] * x.powf(p[1]),
        }
    }

    fn gradient(self, p: &[f64], x: f64) -> [f64; 3] {
        match self {
            Ansatz::Log => {
                let arg = p[1] * x + p[2];
                [arg.ln(), p[0] * x / arg, p[0] / arg]
            }
            Ansatz::Power => {
                let xb = x.powf(p[1]);
                [xb, p[0] * xb * x.ln(), 1.0]
            }
            Ansatz::Monomial => {
                let xb = x.powf(p[1]);
                [xb, p[0] * xb * x.ln(), 0.0]
            }
        }
    }

    /// Boxes that multi-start initial points are drawn from.
    pub fn start_box(self) -> &'static [(f64, f64)] {
        match self {
            Ansatz::Log => &[(0.1, 10.0), (0.1, 10.0), (0.0, 5.0)],
            Ansatz::Power => &[(0.01, 10.0), (0.01, 2.0), (-5.0, 5.0)],
            Ansatz::Monomial => &[(0.01, 10.0), (0.01, 2.0)],
        }
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ansatz::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown ansatz '{s}' (expected log, power or monomial)")))
    }
}

/// Weighted least-squares fit of one ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub ansatz: Ansatz,
    /// `[a, b, c]`, or `[a, b]` for the monomial.
    pub params: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub residual: f64,
    /// 95% interval on `b` from the linearised covariance, when there are
    /// more points than parameters.
    pub b_confidence_95: Option<[f64; 2]>,
    pub converged: bool,
    pub points: usize,
}

impl ScalingFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.ansatz.eval(&self.params, x)
    }
}

pub fn fit_weights(stddevs: &[f64]) -> Vec<f64> {
    stddevs.iter().map(|s| 1.0 / s.max(STDDEV_FLOOR).powi(2)).collect()
}

/// `sum_i w_i (y_i - f(x_i))^2`, infinite outside the model's domain.
pub fn weighted_residual(ansatz: Ansatz, params: &[f64], xs: &[f64], ys: &[f64], weights: &[f64]) -> f64 {
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .zip(weights)
        .map(|((&x, &y), &w)| w * (y - ansatz.eval(params, x)).powi(2))
        .sum();
    if ssr.is_finite() {
        ssr
    } else {
        f64::INFINITY
    }
}

/// Fits `ansatz` to ensemble means with weights `1 / max(stddev, 0.5)^2`.
///
/// Levenberg-Marquardt from [`MULTI_STARTS`] seeded starts in
/// [`Ansatz::start_box`]; the lowest residual wins, earlier starts on ties.
pub fn fit_scaling(xs: &[f64], means: &[f64], stddevs: &[f64], ansatz: Ansatz) -> Result<ScalingFit> {
    if xs.len() != means.len() || xs.len() != stddevs.len() {
        return Err(Error::invalid("xs, means and stddevs must have equal length"));
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!("scaling fits need at least 4 points, got {}", xs.len())));
    }
    if xs.iter().chain(means).chain(stddevs).any(|v| !v.is_finite()) || xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::invalid("fit inputs must be finite with positive x"));
    }
    let weights = fit_weights(stddevs);
    let mut rng = seeded_rng(FIT_SEED);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for _ in 0..MULTI_STARTS {
        let start: Vec<f64> = ansatz.start_box().iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
        let (params, ssr, converged) = levenberg_marquardt(ansatz, start, xs, means, &weights);
        if best.as_ref().is_none_or(|b| ssr < b.1) {
            best = Some((params, ssr, converged));
        }
    }
    let (params, residual, converged) = best.expect("at least one start");
    if !residual.is_finite() {
        return Err(Error::InsufficientData(format!("no {ansatz} fit found inside the model domain")));
    }
    let b_confidence_95 = confidence_on_b(ansatz, &params, residual, xs, &weights);
    Ok(ScalingFit {
        ansatz,
        params,
        residual,
        b_confidence_95,
        converged,
        points: xs.len(),
    })
}

fn jacobian(ansatz: Ansatz, params: &[f64], xs: &[f64], weights: &[f64]) -> DMatrix<f64> {
    let np = ansatz.param_count();
    DMatrix::from_fn(xs.len(), np, |i, j| weights[i].sqrt() * ansatz.gradient(params, xs[i])[j])
}

fn levenberg_marquardt(ansatz: Ansatz, mut params: Vec<f64>, xs: &[f64], ys: &[f64], w: &[f64]) -> (Vec<f64>, f64, bool) {
    let np = params.len();
    let mut ssr = weighted_residual(ansatz, &params, xs, ys, w);
    if !ssr.is_finite() {
        return (params, ssr, false);
    }
    let mut lambda = 1e-3;
    for _ in 0..MAX_ITERATIONS {
        if ssr == 0.0 {
            return (params, ssr, true);
        }
        let jac = jacobian(ansatz, &params, xs, w);
        let r = DVector::from_fn(xs.len(), |i, _| w[i].sqrt() * (ys[i] - ansatz.eval(&params, xs[i])));
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * r;
        let step = loop {
            let mut a = jtj.clone();
            for d in 0..np {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let trial_step = a.lu().solve(&jtr);
            if let Some(delta) = trial_step {
                let trial: Vec<f64> = params.iter().zip(delta.iter()).map(|(p, d)| p + d).collect();
                let t_ssr = weighted_residual(ansatz, &trial, xs, ys, w);
                if t_ssr < ssr {
                    lambda = (lambda * 0.1).max(1e-15);
                    break Some((trial, t_ssr, delta.norm()));
                }
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break None;
            }
        };
        let Some((trial, t_ssr, step_norm)) = step else {
            // no descent direction left at float resolution
            return (params, ssr, true);
        };
        let p_norm = trial.iter().map(|v| v * v).sum::<f64>().sqrt();
        params = trial;
        let gain = ssr - t_ssr;
        ssr = t_ssr;
        if step_norm <= 1e-14 * (p_norm + 1e-14) || gain <= 1e-30 {
            return (params, ssr, true);
        }
    }
    (params, ssr, false)
}

fn confidence_on_b(ansatz: Ansatz, params: &[f64], ssr: f64, xs: &[f64], w: &[f64]) -> Option<[f64; 2]> {
    let np = ansatz.param_count();
    let dof = xs.len().checked_sub(np).filter(|&d| d > 0)?;
    let jac = jacobian(ansatz, params, xs, w);
    let inv = (jac.transpose() * jac).try_inverse()?;
    let var_b = inv[(1, 1)] * ssr / dof as f64;
    if !(var_b >= 0.0 && var_b.is_finite()) {
        return None;
    }
    let t = StudentsT::new(0.0, 1.0, dof as f64).ok()?.inverse_cdf(0.975);
    let half = t * var_b.sqrt();
    Some([params[1] - half, params[1] + half])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes() -> Vec<f64> {
        (4..=16).map(f64::from).collect()
    }

    #[test]
    fn recovers_noiseless_log() {
        let xs = sizes();
        let ys: Vec<f64> = xs.iter().map(|&n| 3.0 * (2.0 * n + 1.0).ln()).collect();
        let fit = fit_scaling(&xs, &ys, &vec![1.0; xs.len()], Ansatz::Log).unwrap();
        for (got, want) in fit.params.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-6, "{:?}", fit.params);
        }
    }

    #[test]
    fn recovers_noiseless_power() {
        let xs = sizes();
        let ys: Vec<f64> = xs.iter().map(|&n| 0.5 * n.sqrt() + 1.0).collect();
        let fit = fit_scaling(&xs, &ys, &vec![0.0; xs.len()], Ansatz::Power).unwrap();
        for (got, want) in fit.params.iter().zip([0.5, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-6, "{:?}", fit.params);
        }
        let ci = fit.b_confidence_95.unwrap();
        assert!(ci[0] <= 0.5 + 1e-9 && ci[1] >= 0.5 - 1e-9);
    }

    #[test]
    fn residual_is_locally_minimal() {
        let xs = sizes();
        let ys: Vec<f64> = xs.iter().map(|&n| 0.8 * n.powf(0.3) + 2.0 + 0.1 * (n * 1.7).sin()).collect();
        let sd: Vec<f64> = xs.iter().map(|n| 0.5 + 0.05 * n).collect();
        let w = fit_weights(&sd);
        for ansatz in Ansatz::ALL {
            let fit = fit_scaling(&xs, &ys, &sd, ansatz).unwrap();
            for i in 0..fit.params.len() {
                for f in [0.9, 1.1] {
                    let mut p = fit.params.clone();
                    p[i] *= f;
                    assert!(fit.residual <= weighted_residual(ansatz, &p, &xs, &ys, &w));
                }
            }
        }
    }

    #[test]
    fn rejects_small_inputs() {
        assert!(matches!(
            fit_scaling(&[1.0, 2.0, 3.0], &[1.0; 3], &[1.0; 3], Ansatz::Power),
            Err(Error::InsufficientData(_))
        ));
        assert!(fit_scaling(&[1.0, 2.0], &[1.0; 3], &[1.0; 3], Ansatz::Power).is_err());
        assert_eq!("log".parse::<Ansatz>().unwrap(), Ansatz::Log);
        assert!("cubic".parse::<Ansatz>().is_err());
    }

    #[test]
    fn deterministic() {
        let xs = sizes();
        let ys: Vec<f64> = xs.iter().map(|&n| 1.3 * n.powf(0.45)).collect();
        let a = fit_scaling(&xs, &ys, &vec![0.7; xs.len()], Ansatz::Monomial).unwrap();
        let b = fit_scaling(&xs, &ys, &vec![0.7; xs.len()], Ansatz::Monomial).unwrap();
        assert_eq!(a, b);
    }
}
