//! Estimate-and-discriminate machines: estimate each training state with its
//! own POVM, then run known-state discrimination on the data qubit.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hilbert::BlochVector;
use crate::machines::{lm_error_projection, optimal_error};

/// Average error when both states are known exactly.
pub const KNOWN_STATES_ERROR: f64 = 1.0 / 6.0;

const POVM_TOLERANCE: f64 = 1e-12;

/// Direction-estimation POVM: weights and unit estimate directions with
/// `Σ w = 1` and `Σ w·s = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimationPovm {
    outcomes: Vec<(f64, BlochVector)>,
}

impl EstimationPovm {
    pub fn new(outcomes: Vec<(f64, BlochVector)>) -> Result<Self> {
        if outcomes.is_empty() {
            return domain("estimation POVM has no outcomes");
        }
        if outcomes.iter().any(|(w, _)| !(*w >= 0.0)) {
            return domain("estimation weights must be non-negative");
        }
        let total: f64 = outcomes.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > POVM_TOLERANCE {
            return domain(format!("estimation weights sum to {total}, not 1"));
        }
        if let Some((_, s)) = outcomes
            .iter()
            .find(|(_, s)| (s.norm() - 1.0).abs() > POVM_TOLERANCE)
        {
            return domain(format!("estimate direction {s:?} is not a unit vector"));
        }
        let mean = outcomes
            .iter()
            .fold(BlochVector::ZERO, |acc, (w, s)| acc + *s * *w);
        if mean.norm() > POVM_TOLERANCE {
            return domain(format!("weighted mean direction {mean:?} is not zero"));
        }
        Ok(EstimationPovm { outcomes })
    }

    /// Two equally weighted antipodal outcomes along `axis`.
    pub fn antipodal(axis: BlochVector) -> Result<Self> {
        let Some(unit) = axis.direction() else {
            return domain("axis must be non-zero");
        };
        Self::new(vec![(0.5, unit), (0.5, -unit)])
    }

    pub fn outcomes(&self) -> &[(f64, BlochVector)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// `Δ = Σ_{αi} p_α p'_i |r⃗₀^α − r⃗₁^i|` with `r⃗ = shrink · s⃗`.
pub fn ed_delta_finite(m0: &EstimationPovm, m1: &EstimationPovm, shrink: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&shrink) {
        return domain(format!("shrink factor {shrink} outside [0, 1]"));
    }
    let mut delta = 0.0;
    for (w0, s0) in &m0.outcomes {
        for (w1, s1) in &m1.outcomes {
            delta += w0 * w1 * (*s0 * shrink).distance(*s1 * shrink);
        }
    }
    Ok(delta)
}

/// Length `n / (n + 2)` of the conditioned Bloch vector after the continuous
/// covariant estimation of `n` copies.
pub fn continuous_shrink(n: usize) -> f64 {
    n as f64 / (n as f64 + 2.0)
}

/// `Δ = (n / (n+2)) ∫ ds |ẑ − s| = 4n / (3(n + 2))`.
pub fn ed_delta_continuous(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("estimation needs n >= 1");
    }
    Ok(4.0 * continuous_shrink(n) / 3.0)
}

pub fn ed_error_continuous(n: usize) -> Result<f64> {
    Ok((1.0 - ed_delta_continuous(n)? / 2.0) / 2.0)
}

/// The optimal single-copy pair: `{[↑], [↓]}` on the label-0 qubit and
/// `{[+], [−]}` on the label-1 qubit.
pub fn ed_n1_optimal_povms() -> (EstimationPovm, EstimationPovm) {
    (
        EstimationPovm::antipodal(BlochVector::UP).expect("valid"),
        EstimationPovm::antipodal(BlochVector::raw(1.0, 0.0, 0.0)).expect("valid"),
    )
}

pub fn ed_delta_n1_optimal() -> f64 {
    let (m0, m1) = ed_n1_optimal_povms();
    ed_delta_finite(&m0, &m1, continuous_shrink(1)).expect("shrink in range")
}

/// Error of the best estimate-and-discriminate machine for `n = 1`.
pub fn ed_error_n1_optimal() -> f64 {
    (1.0 - ed_delta_n1_optimal() / 2.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Machine {
    /// Optimal programmable discriminator.
    Opt,
    /// Learning machine, evaluated from the seed projections.
    Lm,
    /// Estimate-and-discriminate with the continuous covariant POVMs.
    EdContinuous,
    /// Optimal estimate-and-discriminate machine for one copy.
    EdN1,
}

/// Error of `machine` with `n` copies of each training state.
pub fn machine_error(machine: Machine, n: usize) -> Result<f64> {
    match machine {
        Machine::Opt => Ok(optimal_error(n)),
        Machine::Lm => lm_error_projection(n),
        Machine::EdContinuous => ed_error_continuous(n),
        Machine::EdN1 if n == 1 => Ok(ed_error_n1_optimal()),
        Machine::EdN1 => domain(format!("the single-copy E&D machine needs n = 1, got {n}")),
    }
}

/// Error above the known-states optimum of 1/6.
pub fn excess_risk(machine: Machine, n: usize) -> Result<f64> {
    Ok(machine_error(machine, n)? - KNOWN_STATES_ERROR)
}
