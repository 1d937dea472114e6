//! The alternating evolution, expectation values and approximation ratios.
//!
//! Round `j` applies `exp(-i gamma_j H_P)` and then `exp(-i beta_j H_M)`,
//! starting from the Dicke state.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::operators::{MixerCache, MixerKind, MixerOperator, MixerRepresentation, PhaseSeparator};
use crate::subspace::{build_cost_vector, dicke_state, CostVector, SubspaceIndex, SubspaceState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeparatorKind {
    Objective,
    Threshold,
}

/// Mixer / phase-separator combination, named like `Clique-Obj` or `Grover-Th`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Variant {
    pub mixer: MixerKind,
    pub separator: SeparatorKind,
}

impl Variant {
    pub const CLIQUE_OBJ: Variant = Variant::new(MixerKind::Clique, SeparatorKind::Objective);
    pub const CLIQUE_TH: Variant = Variant::new(MixerKind::Clique, SeparatorKind::Threshold);
    pub const RING_OBJ: Variant = Variant::new(MixerKind::Ring, SeparatorKind::Objective);
    pub const RING_TH: Variant = Variant::new(MixerKind::Ring, SeparatorKind::Threshold);
    pub const GROVER_OBJ: Variant = Variant::new(MixerKind::Grover, SeparatorKind::Objective);
    pub const GROVER_TH: Variant = Variant::new(MixerKind::Grover, SeparatorKind::Threshold);

    pub const ALL: [Variant; 6] = [
        Variant::CLIQUE_OBJ,
        Variant::CLIQUE_TH,
        Variant::RING_OBJ,
        Variant::RING_TH,
        Variant::GROVER_OBJ,
        Variant::GROVER_TH,
    ];

    pub const fn new(mixer: MixerKind, separator: SeparatorKind) -> Self {
        Variant { mixer, separator }
    }

    pub fn uses_threshold(self) -> bool {
        self.separator == SeparatorKind::Threshold
    }

    /// Phase separator for a run, checking that a threshold is given iff needed.
    pub fn phase_separator(self, threshold: Option<i64>) -> Result<PhaseSeparator> {
        match (self.separator, threshold) {
            (SeparatorKind::Objective, None) => Ok(PhaseSeparator::Objective),
            (SeparatorKind::Threshold, Some(th)) => Ok(PhaseSeparator::Threshold(th)),
            (SeparatorKind::Threshold, None) => {
                Err(Error::invalid(format!("{self} requires a threshold (--threshold)")))
            }
            (SeparatorKind::Objective, Some(_)) => {
                Err(Error::invalid(format!("{self} does not take a threshold")))
            }
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.separator {
            SeparatorKind::Objective => "Obj",
            SeparatorKind::Threshold => "Th",
        };
        write!(f, "{}-{sep}", self.mixer)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, sep) = s
            .split_once('-')
            .ok_or_else(|| Error::invalid(format!("variant '{s}' is not of the form Mixer-Obj|Mixer-Th")))?;
        let separator = match sep.to_ascii_lowercase().as_str() {
            "obj" => SeparatorKind::Objective,
            "th" => SeparatorKind::Threshold,
            other => return Err(Error::invalid(format!("unknown phase separator '{other}'"))),
        };
        Ok(Variant::new(m.parse()?, separator))
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> Self {
        v.to_string()
    }
}

/// Per-round mixer angles `betas` and phase angles `gammas`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct AngleSchedule {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSchedule {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl TryFrom<RawSchedule> for AngleSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        AngleSchedule::new(raw.betas, raw.gammas)
    }
}

impl AngleSchedule {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(Error::invalid(format!(
                "schedule has {} betas but {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        if betas.iter().chain(&gammas).any(|a| !a.is_finite()) {
            return Err(Error::invalid("schedule angles must be finite"));
        }
        Ok(AngleSchedule { betas, gammas })
    }

    pub fn empty() -> Self {
        AngleSchedule::default()
    }

    /// Same angle pair in every round.
    pub fn constant(p: usize, beta: f64, gamma: f64) -> Self {
        AngleSchedule {
            betas: vec![beta; p],
            gammas: vec![gamma; p],
        }
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Angles flattened as `[betas..., gammas...]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn from_vec(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::invalid("flattened schedule must have even length"));
        }
        let p = x.len() / 2;
        AngleSchedule::new(x[..p].to_vec(), x[p..].to_vec())
    }

    /// Appends one round.
    pub fn push(&mut self, beta: f64, gamma: f64) {
        self.betas.push(beta);
        self.gammas.push(gamma);
    }

    /// Reduces angles into one period where the operator is exactly periodic:
    /// `gamma` mod 2π (integer spectra), `beta` mod π for Clique (even-integer
    /// spectrum) and mod 2π for Grover (projector). Ring spectra are not
    /// commensurate, so Ring betas are left as they are.
    pub fn reduced(&self, mixer: MixerKind) -> Self {
        let beta_period = match mixer {
            MixerKind::Clique => Some(PI),
            MixerKind::Grover => Some(TAU),
            MixerKind::Ring => None,
        };
        AngleSchedule {
            betas: self
                .betas
                .iter()
                .map(|&b| beta_period.map_or(b, |t| b.rem_euclid(t)))
                .collect(),
            gammas: self.gammas.iter().map(|g| g.rem_euclid(TAU)).collect(),
        }
    }
}

/// Overshoot-guarded π schedule: `π` for the first `p_star` rounds, `0` after.
pub fn grover_th_schedule(p: usize, p_star: usize) -> Result<AngleSchedule> {
    if p_star > p {
        return Err(Error::invalid(format!("p_star={p_star} exceeds p={p}")));
    }
    let angles: Vec<f64> = (0..p).map(|i| if i < p_star { PI } else { 0.0 }).collect();
    AngleSchedule::new(angles.clone(), angles)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_state: Option<SubspaceState>,
    pub expectation: f64,
    pub approx_ratio: f64,
    /// Ratio after rounds `0..=p`; entry 0 is the Dicke state.
    pub per_round_ratios: Vec<f64>,
}

/// `<H_C>` and `<H_C> / c_max`, with the ratio defined as 1 when `c_max = 0`.
pub fn expectation_and_ratio(state: &SubspaceState, cost: &CostVector) -> Result<(f64, f64)> {
    if state.dim() != cost.dim() {
        return Err(Error::DimensionMismatch {
            expected: cost.dim(),
            actual: state.dim(),
        });
    }
    let e = expectation(state.amplitudes(), cost);
    Ok((e, ratio(e, cost)))
}

fn expectation(amps: &[Complex64], cost: &CostVector) -> f64 {
    amps.iter()
        .zip(cost.values())
        .map(|(a, &c)| c as f64 * a.norm_sqr())
        .sum()
}

pub(crate) fn ratio(expectation: f64, cost: &CostVector) -> f64 {
    if cost.c_max() == 0 {
        1.0
    } else {
        expectation / cost.c_max() as f64
    }
}

/// Everything needed to evolve states of one instance under one mixer.
///
/// Holds the subspace index, the cost vector and a shared mixer, so repeated
/// evaluations during angle search pay only for the state updates.
#[derive(Debug, Clone)]
pub struct QaoaEvaluator {
    index: Arc<SubspaceIndex>,
    cost: Arc<CostVector>,
    mixer: Arc<MixerOperator>,
}

impl QaoaEvaluator {
    pub fn new(instance: &ProblemInstance, mixer: MixerKind) -> Result<Self> {
        Self::with_cache(instance, mixer, MixerCache::global())
    }

    pub fn with_cache(instance: &ProblemInstance, mixer: MixerKind, cache: &MixerCache) -> Result<Self> {
        let index = SubspaceIndex::new(instance.n(), instance.k())?;
        let cost = build_cost_vector(instance, &index)?;
        let mixer = cache.get(mixer, &index)?;
        Ok(QaoaEvaluator {
            index: Arc::new(index),
            cost: Arc::new(cost),
            mixer,
        })
    }

    pub fn from_parts(index: Arc<SubspaceIndex>, cost: Arc<CostVector>, mixer: Arc<MixerOperator>) -> Result<Self> {
        if index.dim() != cost.dim() || index.dim() != mixer.dim() {
            return Err(Error::DimensionMismatch {
                expected: index.dim(),
                actual: if cost.dim() != index.dim() { cost.dim() } else { mixer.dim() },
            });
        }
        Ok(QaoaEvaluator { index, cost, mixer })
    }

    /// Same instance, different mixer.
    pub fn with_mixer(&self, mixer: Arc<MixerOperator>) -> Result<Self> {
        Self::from_parts(self.index.clone(), self.cost.clone(), mixer)
    }

    pub fn index(&self) -> &SubspaceIndex {
        &self.index
    }

    pub fn cost(&self) -> &CostVector {
        &self.cost
    }

    pub fn mixer(&self) -> &MixerOperator {
        &self.mixer
    }

    pub fn mixer_kind(&self) -> MixerKind {
        self.mixer.kind()
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn ratio(&self, expectation: f64) -> f64 {
        ratio(expectation, &self.cost)
    }

    /// Expectation in the Dicke state: the mean cost.
    pub fn initial_expectation(&self) -> f64 {
        self.cost.values().iter().map(|&c| c as f64).sum::<f64>() / self.dim() as f64
    }

    pub fn evolve(&self, separator: PhaseSeparator, schedule: &AngleSchedule) -> SubspaceState {
        let mut state = dicke_state(&self.index);
        for (&beta, &gamma) in schedule.betas().iter().zip(schedule.gammas()) {
            self.round(state.amplitudes_mut(), separator, beta, gamma);
        }
        state
    }

    #[inline]
    fn round(&self, amps: &mut [Complex64], separator: PhaseSeparator, beta: f64, gamma: f64) {
        separator.apply_in_place(amps, &self.cost, gamma);
        self.mixer.apply_in_place(amps, beta);
    }

    pub fn expectation(&self, separator: PhaseSeparator, schedule: &AngleSchedule) -> f64 {
        expectation(self.evolve(separator, schedule).amplitudes(), &self.cost)
    }

    /// Expectation after each prefix of the schedule, rounds `0..=p`.
    pub fn prefix_expectations(&self, separator: PhaseSeparator, schedule: &AngleSchedule) -> Vec<f64> {
        let mut state = dicke_state(&self.index);
        let mut out = Vec::with_capacity(schedule.p() + 1);
        out.push(expectation(state.amplitudes(), &self.cost));
        for (&beta, &gamma) in schedule.betas().iter().zip(schedule.gammas()) {
            self.round(state.amplitudes_mut(), separator, beta, gamma);
            out.push(expectation(state.amplitudes(), &self.cost));
        }
        out
    }

    pub fn run(&self, separator: PhaseSeparator, schedule: &AngleSchedule, keep_state: bool) -> RunResult {
        let mut state = dicke_state(&self.index);
        let mut per_round_ratios = Vec::with_capacity(schedule.p() + 1);
        per_round_ratios.push(self.ratio(expectation(state.amplitudes(), &self.cost)));
        for (&beta, &gamma) in schedule.betas().iter().zip(schedule.gammas()) {
            self.round(state.amplitudes_mut(), separator, beta, gamma);
            per_round_ratios.push(self.ratio(expectation(state.amplitudes(), &self.cost)));
        }
        let e = expectation(state.amplitudes(), &self.cost);
        RunResult {
            final_state: keep_state.then_some(state),
            expectation: e,
            approx_ratio: self.ratio(e),
            per_round_ratios,
        }
    }

    /// `<H_C>` and its exact gradient, computed by one forward pass and one
    /// reverse (adjoint) pass. The gradient is laid out like
    /// [`AngleSchedule::to_vec`]: betas first, then gammas.
    pub fn expectation_and_gradient(&self, separator: PhaseSeparator, schedule: &AngleSchedule) -> (f64, Vec<f64>) {
        let p = schedule.p();
        let mut psi = self.evolve(separator, schedule).into_amplitudes();
        let value = expectation(&psi, &self.cost);
        let mut lambda: Vec<Complex64> = psi
            .iter()
            .zip(self.cost.values())
            .map(|(a, &c)| a * c as f64)
            .collect();
        let h_p: Vec<f64> = self.cost.values().iter().map(|&c| separator.eigenvalue(c)).collect();
        let mut grad = vec![0.0; 2 * p];
        for j in (0..p).rev() {
            let (beta, gamma) = (schedule.betas()[j], schedule.gammas()[j]);

            // d/d beta_j = 2 Im <lambda| H_M |psi>, then undo the mixer on both vectors
            match self.mixer.representation() {
                MixerRepresentation::Spectral(s) => {
                    let (mut pr, mut pi) = s.to_eigenbasis(&psi);
                    let (mut lr, mut li) = s.to_eigenbasis(&lambda);
                    let mut im = 0.0;
                    for e in 0..pr.len() {
                        // Im(conj(l) * p) = lr*pi - li*pr
                        im += s.eigenvalues()[e] * (lr[e] * pi[e] - li[e] * pr[e]);
                    }
                    grad[j] = 2.0 * im;
                    s.phase_eigenbasis(&mut pr, &mut pi, -beta);
                    s.phase_eigenbasis(&mut lr, &mut li, -beta);
                    s.from_eigenbasis(&pr, &pi, &mut psi);
                    s.from_eigenbasis(&lr, &li, &mut lambda);
                }
                MixerRepresentation::Rank1 => {
                    let sp: Complex64 = psi.iter().sum();
                    let sl: Complex64 = lambda.iter().sum();
                    grad[j] = 2.0 * (sl.conj() * sp).im / self.dim() as f64;
                    self.mixer.apply_in_place(&mut psi, -beta);
                    self.mixer.apply_in_place(&mut lambda, -beta);
                }
            }

            // d/d gamma_j = 2 Im <lambda| H_P |psi>
            grad[p + j] = 2.0
                * lambda
                    .iter()
                    .zip(&psi)
                    .zip(&h_p)
                    .map(|((l, a), &h)| h * (l.conj() * a).im)
                    .sum::<f64>();
            separator.apply_in_place(&mut psi, &self.cost, -gamma);
            separator.apply_in_place(&mut lambda, &self.cost, -gamma);
        }
        (value, grad)
    }
}

/// One full evolution of `instance` under `variant`.
pub fn run_qaoa(
    instance: &ProblemInstance,
    variant: Variant,
    schedule: &AngleSchedule,
    threshold: Option<i64>,
) -> Result<RunResult> {
    let separator = variant.phase_separator(threshold)?;
    let evaluator = QaoaEvaluator::new(instance, variant.mixer)?;
    Ok(evaluator.run(separator, schedule, true))
}
