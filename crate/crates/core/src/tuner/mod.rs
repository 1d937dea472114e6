//! Angle and threshold finding.
//!
//! All searches maximise `<H_C>`; ratios are reported alongside. Angles are
//! found by gradient ascent with Armijo backtracking, optionally wrapped in
//! basin-hopping, and the round-`p` search can start from the round-`p-1`
//! optimum with its last angle pair duplicated.

mod basin;
mod gradient;
mod inductive;
mod threshold;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::PhaseSeparator;
use crate::qaoa::{AngleSchedule, QaoaEvaluator};

pub use basin::optimize_angles_basinhopping;
pub use gradient::{
    central_difference_gradient, five_point_gradient, optimize_angles_gd, AngleObjective, AscentDirection,
    GradientMethod,
};
pub use inductive::{tune_angles, InductiveTuner};
pub use threshold::{
    find_threshold_exhaustive, find_threshold_grover, grover_threshold_profile, threshold_candidates,
    GroverThresholdPoint, ThresholdWarmStarts,
};

/// Knobs for every search in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TunerConfig {
    /// Basin-hopping hops per round.
    pub bh_iterations: usize,
    /// Half-width of the uniform per-angle perturbation.
    pub bh_step_size: f64,
    /// Metropolis temperature, in units of `<H_C>`.
    pub bh_temperature: f64,
    /// Gradient-ascent iteration cap for each basin-hopping local refinement.
    pub bh_local_max_iterations: usize,
    /// Gradient-norm tolerance for each basin-hopping local refinement.
    pub bh_local_tol: f64,
    /// First trial step of steepest ascent; initial inverse-Hessian scale for BFGS.
    pub gd_initial_step: f64,
    /// Armijo sufficient-increase constant.
    pub gd_armijo: f64,
    /// Step shrink factor during backtracking.
    pub gd_backtrack: f64,
    /// Backtracking gives up below this step.
    pub gd_min_step: f64,
    pub gd_convergence_tol: f64,
    pub max_gd_iterations: usize,
    pub direction: AscentDirection,
    pub gradient: GradientMethod,
    /// Central-difference step when `gradient` is finite-difference.
    pub fd_step: f64,
    /// Points per axis of the one-round grid that seeds gradient ascent at `p = 1`.
    pub initial_grid: usize,
    pub seed: u64,
}

impl Default for TunerConfig {
    fn default() -> Self {
        TunerConfig {
            bh_iterations: 100,
            bh_step_size: 0.5,
            bh_temperature: 1.0,
            bh_local_max_iterations: 100,
            bh_local_tol: 1e-6,
            gd_initial_step: 0.1,
            gd_armijo: 1e-4,
            gd_backtrack: 0.5,
            gd_min_step: 1e-12,
            gd_convergence_tol: 1e-8,
            max_gd_iterations: 500,
            direction: AscentDirection::Bfgs,
            gradient: GradientMethod::Adjoint,
            fd_step: 1e-6,
            initial_grid: 16,
            seed: 0,
        }
    }
}

impl TunerConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("bh_iterations", self.bh_iterations),
            ("bh_local_max_iterations", self.bh_local_max_iterations),
            ("max_gd_iterations", self.max_gd_iterations),
            ("initial_grid", self.initial_grid),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("tuner.{name} must be positive")));
            }
        }
        let reals = [
            ("bh_step_size", self.bh_step_size),
            ("bh_temperature", self.bh_temperature),
            ("bh_local_tol", self.bh_local_tol),
            ("gd_initial_step", self.gd_initial_step),
            ("gd_armijo", self.gd_armijo),
            ("gd_min_step", self.gd_min_step),
            ("gd_convergence_tol", self.gd_convergence_tol),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in reals {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("tuner.{name} must be positive, got {v}")));
            }
        }
        if !(self.gd_backtrack > 0.0 && self.gd_backtrack < 1.0) {
            return Err(Error::invalid("tuner.gd_backtrack must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Best schedule (and threshold) found for one round count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedRound {
    pub p: usize,
    pub schedule: AngleSchedule,
    pub threshold: Option<i64>,
    pub expectation: f64,
    pub approx_ratio: f64,
    /// False when a gradient ascent stopped on its iteration cap.
    pub converged: bool,
}

impl TunedRound {
    pub(crate) fn evaluate(
        ev: &QaoaEvaluator,
        separator: PhaseSeparator,
        schedule: AngleSchedule,
        converged: bool,
    ) -> TunedRound {
        let schedule = schedule.reduced(ev.mixer_kind());
        let expectation = ev.expectation(separator, &schedule);
        TunedRound {
            p: schedule.p(),
            threshold: match separator {
                PhaseSeparator::Threshold(th) => Some(th),
                PhaseSeparator::Objective => None,
            },
            approx_ratio: ev.ratio(expectation),
            expectation,
            schedule,
            converged,
        }
    }

    pub fn separator(&self) -> PhaseSeparator {
        self.threshold.map_or(PhaseSeparator::Objective, PhaseSeparator::Threshold)
    }
}

/// Where a basin-hopping search starts.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleStart {
    /// Uniform angles in `[0, 2π)`.
    Random,
    /// Extrapolation of this `p - 1` optimum.
    Extrapolated(AngleSchedule),
}

/// How angles are found for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AngleStrategy {
    /// Gradient ascent from the extrapolated previous optimum.
    #[serde(rename = "gd")]
    GradientDescent,
    /// Basin-hopping from the extrapolated previous optimum.
    #[serde(rename = "bh-extrapolated")]
    BasinHoppingExtrapolated,
    /// Basin-hopping from a random point, independently at every round count.
    #[serde(rename = "bh-random")]
    BasinHoppingRandom,
}

impl AngleStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            AngleStrategy::GradientDescent => "gd",
            AngleStrategy::BasinHoppingExtrapolated => "bh-extrapolated",
            AngleStrategy::BasinHoppingRandom => "bh-random",
        }
    }
}

impl fmt::Display for AngleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AngleStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(AngleStrategy::GradientDescent),
            "bh-extrapolated" => Ok(AngleStrategy::BasinHoppingExtrapolated),
            "bh-random" => Ok(AngleStrategy::BasinHoppingRandom),
            other => Err(Error::invalid(format!(
                "unknown angle strategy '{other}' (expected gd, bh-extrapolated or bh-random)"
            ))),
        }
    }
}

/// Start point for `p` rounds: the `p-1` optimum with its last pair repeated.
pub fn extrapolate_angles(prev: &AngleSchedule) -> Result<AngleSchedule> {
    let (Some(&beta), Some(&gamma)) = (prev.betas().last(), prev.gammas().last()) else {
        return Err(Error::invalid("cannot extrapolate an empty schedule"));
    };
    let mut next = prev.clone();
    next.push(beta, gamma);
    Ok(next)
}
