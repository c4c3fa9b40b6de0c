//! Monte Carlo simulation of learn-then-classify.
//!
//! Each trial draws a Haar-random pair `(ψ0, ψ1)`, performs the learning
//! measurement on the training register, and classifies one or more fresh
//! data qubits with the stored classical outcome. Trial `t` owns ChaCha8
//! stream `t` under the master seed, so results do not depend on how trials
//! are scheduled across threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::e_and_d::{
    continuous_shrink, ed_error_continuous, ed_error_n1_optimal, ed_n1_optimal_povms,
    EstimationPovm,
};
use crate::error::{domain, Result};
use crate::hilbert::BlochVector;
use crate::machines::{
    covariant_povm, optimal_error, tetrahedron_povm, CovariantPovm, LearningContext,
};
use crate::par::{map_indices, Execution};

/// Trials handled per parallel work item.
const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MachineKind {
    /// Learning machine with the quadrature covariant POVM.
    LmPovm,
    /// Learning machine with the four-outcome tetrahedral POVM (`n = 1`).
    LmTetrahedron,
    /// Optimal single-copy estimate-and-discriminate machine (`n = 1`).
    EdN1,
    /// Estimate-and-discriminate with continuous covariant estimation.
    EdContinuous,
}

impl MachineKind {
    pub const ALL: [MachineKind; 4] = [
        MachineKind::LmPovm,
        MachineKind::LmTetrahedron,
        MachineKind::EdN1,
        MachineKind::EdContinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MachineKind::LmPovm => "lm-povm",
            MachineKind::LmTetrahedron => "lm-tetrahedron",
            MachineKind::EdN1 => "ed-n1",
            MachineKind::EdContinuous => "ed-continuous",
        }
    }

    /// Exact average error of this machine.
    pub fn analytic_error(self, n: usize) -> Result<f64> {
        self.check_n(n)?;
        match self {
            MachineKind::LmPovm | MachineKind::LmTetrahedron => Ok(optimal_error(n)),
            MachineKind::EdN1 => Ok(ed_error_n1_optimal()),
            MachineKind::EdContinuous => ed_error_continuous(n),
        }
    }

    fn check_n(self, n: usize) -> Result<()> {
        if n == 0 {
            return domain("machines need n >= 1");
        }
        if matches!(self, MachineKind::LmTetrahedron | MachineKind::EdN1) && n != 1 {
            return domain(format!(
                "{} is only defined for n = 1, got n = {n}",
                self.name()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for MachineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MachineKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        MachineKind::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| crate::Error::Domain(format!("unknown machine {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub machine: MachineKind,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(n: usize, machine: MachineKind, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return domain("trials must be at least 1");
        }
        machine.check_n(n)?;
        Ok(TrialConfig {
            n,
            machine,
            trials,
            seed,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineReport {
    pub config: TrialConfig,
    /// Data qubits classified per learning measurement.
    pub batch: usize,
    pub empirical_error: f64,
    pub stderr: f64,
    pub analytic_error: f64,
    pub z_score: f64,
    /// Bits needed to store the learning outcome, for finite POVMs.
    pub memory_bits: Option<f64>,
}

impl MachineReport {
    pub const CSV_HEADER: [&'static str; 8] = [
        "n",
        "machine",
        "trials",
        "seed",
        "empirical",
        "stderr",
        "analytic",
        "z",
    ];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.config.n.to_string(),
            self.config.machine.name().to_string(),
            self.config.trials.to_string(),
            self.config.seed.to_string(),
            self.empirical_error.to_string(),
            self.stderr.to_string(),
            self.analytic_error.to_string(),
            self.z_score.to_string(),
        ]
    }
}

/// Uniform point on the unit sphere.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::raw(rho * phi.cos(), rho * phi.sin(), z)
}

/// Independent generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|ψ⟩^{⊗n}` in the spin-`n/2` basis (descending magnetic number).
pub fn symmetric_power(psi: [Complex64; 2], n: usize) -> DVector<Complex64> {
    DVector::from_fn(n + 1, |k, _| {
        psi[0].powu((n - k) as u32) * psi[1].powu(k as u32) * binomial(n, k).sqrt()
    })
}

/// Learning stage of a machine, ready to be run on sampled states.
#[derive(Clone, Debug)]
pub enum Learner {
    /// Rank-one covariant POVM: `√p_μ U_μ|φ⁰⟩` and the decision axis of each outcome.
    Covariant {
        n: usize,
        elements: Vec<DVector<Complex64>>,
        axes: Vec<BlochVector>,
    },
    /// Single-copy estimation on each training qubit.
    FiniteEstimation {
        m0: EstimationPovm,
        m1: EstimationPovm,
        shrink: f64,
    },
    /// Continuous covariant estimation of `n` copies.
    ContinuousEstimation { n: usize },
}

impl Learner {
    pub fn new(machine: MachineKind, n: usize) -> Result<Self> {
        machine.check_n(n)?;
        match machine {
            MachineKind::LmPovm => Self::covariant(&covariant_povm(n)?),
            MachineKind::LmTetrahedron => Self::covariant(&tetrahedron_povm()?),
            MachineKind::EdN1 => {
                let (m0, m1) = ed_n1_optimal_povms();
                Ok(Learner::FiniteEstimation {
                    m0,
                    m1,
                    shrink: continuous_shrink(1),
                })
            }
            MachineKind::EdContinuous => Ok(Learner::ContinuousEstimation { n }),
        }
    }

    pub fn covariant(povm: &CovariantPovm) -> Result<Self> {
        let ctx = LearningContext::new(povm.n())?;
        let pairs = ctx.conditioned_pairs(povm, Execution::default())?;
        let elements = povm
            .rotated_seeds()?
            .into_iter()
            .zip(povm.outcomes())
            .map(|(v, o)| v * Complex64::new(o.weight.sqrt(), 0.0))
            .collect();
        Ok(Learner::Covariant {
            n: povm.n(),
            elements,
            axes: pairs.iter().map(|p| p.decision_axis).collect(),
        })
    }

    /// Number of classical outcomes to store, if finite.
    pub fn outcome_count(&self) -> Option<usize> {
        match self {
            Learner::Covariant { elements, .. } => Some(elements.len()),
            Learner::FiniteEstimation { m0, m1, .. } => Some(m0.len() * m1.len()),
            Learner::ContinuousEstimation { .. } => None,
        }
    }

    /// Outcome probabilities `⟨ψ0^n ψ1^n| L_μ |ψ0^n ψ1^n⟩` of the covariant
    /// learner; empty for the other kinds.
    pub fn outcome_probabilities(&self, r0: BlochVector, r1: BlochVector) -> Vec<f64> {
        let Learner::Covariant { n, elements, .. } = self else {
            return Vec::new();
        };
        let state =
            symmetric_power(r0.pure_state(), *n).kronecker(&symmetric_power(r1.pure_state(), *n));
        elements.iter().map(|e| e.dotc(&state).norm_sqr()).collect()
    }

    /// Runs the learning measurement and returns the data-qubit decision axis.
    pub fn learn<R: Rng + ?Sized>(
        &self,
        r0: BlochVector,
        r1: BlochVector,
        rng: &mut R,
    ) -> BlochVector {
        match self {
            Learner::Covariant { axes, .. } => {
                let probs = self.outcome_probabilities(r0, r1);
                let u: f64 = rng.random();
                let total: f64 = probs.iter().sum();
                let mut acc = 0.0;
                for (p, axis) in probs.iter().zip(axes) {
                    acc += p / total;
                    if u < acc {
                        return *axis;
                    }
                }
                *axes.last().expect("non-empty POVM")
            }
            Learner::FiniteEstimation { m0, m1, shrink } => {
                let s0 = sample_estimate(m0, r0, rng);
                let s1 = sample_estimate(m1, r1, rng);
                decision_axis(s0 * *shrink, s1 * *shrink)
            }
            Learner::ContinuousEstimation { n } => {
                let s0 = sample_continuous_estimate(*n, r0, rng);
                let s1 = sample_continuous_estimate(*n, r1, rng);
                let shrink = continuous_shrink(*n);
                decision_axis(s0 * shrink, s1 * shrink)
            }
        }
    }
}

fn decision_axis(r0: BlochVector, r1: BlochVector) -> BlochVector {
    let diff = r0 - r1;
    if diff.norm() > crate::hilbert::TIE_EPSILON {
        diff.direction().unwrap_or(BlochVector::UP)
    } else {
        BlochVector::UP
    }
}

/// Outcome of a single-qubit estimation POVM `{2 w_α [s_α]}`:
/// probability `w_α (1 + s_α · r)`.
fn sample_estimate<R: Rng + ?Sized>(
    m: &EstimationPovm,
    r: BlochVector,
    rng: &mut R,
) -> BlochVector {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (w, s) in m.outcomes() {
        acc += w * (1.0 + s.dot(r));
        if u < acc {
            return *s;
        }
    }
    m.outcomes().last().expect("non-empty POVM").1
}

/// Outcome of the continuous covariant POVM on `n` copies of `r`: density
/// `∝ ((1 + s·r)/2)^n` on the sphere.
fn sample_continuous_estimate<R: Rng + ?Sized>(
    n: usize,
    r: BlochVector,
    rng: &mut R,
) -> BlochVector {
    let u: f64 = rng.random();
    let cos_theta = 2.0 * u.powf(1.0 / (n as f64 + 1.0)) - 1.0;
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let (e1, e2) = orthonormal_frame(r);
    r * cos_theta + (e1 * phi.cos() + e2 * phi.sin()) * sin_theta
}

fn orthonormal_frame(r: BlochVector) -> (BlochVector, BlochVector) {
    let helper = if r.x.abs() < 0.9 {
        BlochVector::raw(1.0, 0.0, 0.0)
    } else {
        BlochVector::raw(0.0, 1.0, 0.0)
    };
    let e1 = (helper - r * helper.dot(r))
        .direction()
        .expect("independent helper");
    let e2 = BlochVector::raw(
        r.y * e1.z - r.z * e1.y,
        r.z * e1.x - r.x * e1.z,
        r.x * e1.y - r.y * e1.x,
    );
    (e1, e2)
}

/// Errors made on `batch` data qubits after one learning measurement.
fn run_one_trial(learner: &Learner, batch: usize, rng: &mut ChaCha8Rng) -> u64 {
    let r0 = haar_qubit(rng);
    let r1 = haar_qubit(rng);
    let axis = learner.learn(r0, r1, rng);
    let mut errors = 0;
    for _ in 0..batch {
        let label_one = rng.random_bool(0.5);
        let data = if label_one { r1 } else { r0 };
        let p_zero = 0.5 * (1.0 + axis.dot(data));
        let says_zero = rng.random::<f64>() < p_zero;
        if says_zero == label_one {
            errors += 1;
        }
    }
    errors
}

/// Error counts `(Σ k, Σ k²)` over trials `[start, end)`.
fn tally(learner: &Learner, seed: u64, batch: usize, start: u64, end: u64) -> (u64, u64) {
    (start..end).fold((0, 0), |(sum, sum_sq), t| {
        let k = run_one_trial(learner, batch, &mut trial_rng(seed, t));
        (sum + k, sum_sq + k * k)
    })
}

/// Classifies `batch` fresh data qubits per learning measurement.
///
/// The standard error is taken over per-trial error fractions, since the
/// qubits of one batch share a learning outcome.
pub fn reuse_experiment_with(
    config: &TrialConfig,
    batch: usize,
    exec: Execution,
) -> Result<MachineReport> {
    let config = TrialConfig::new(config.n, config.machine, config.trials, config.seed)?;
    if batch == 0 {
        return domain("batch must be at least 1");
    }
    let learner = Learner::new(config.machine, config.n)?;
    let analytic = config.machine.analytic_error(config.n)?;

    let chunks = config.trials.div_ceil(CHUNK);
    let partial = map_indices(chunks as usize, exec, |c| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(config.trials);
        tally(&learner, config.seed, batch, start, end)
    });
    let (sum, sum_sq) = partial
        .into_iter()
        .fold((0u64, 0u64), |(a, b), (x, y)| (a + x, b + y));

    let trials = config.trials as f64;
    let b = batch as f64;
    let empirical = sum as f64 / (trials * b);
    let second_moment = sum_sq as f64 / (trials * b * b);
    let variance = (second_moment - empirical * empirical).max(0.0);
    let stderr = (variance / trials).sqrt();
    let diff = (empirical - analytic).abs();
    let z_score = if stderr > 0.0 {
        diff / stderr
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MachineReport {
        config,
        batch,
        empirical_error: empirical,
        stderr,
        analytic_error: analytic,
        z_score,
        memory_bits: learner.outcome_count().map(|c| (c as f64).log2()),
    })
}

pub fn reuse_experiment(config: &TrialConfig, batch: usize) -> Result<MachineReport> {
    reuse_experiment_with(config, batch, Execution::default())
}

/// One data qubit per learning measurement.
pub fn run_trials(config: &TrialConfig) -> Result<MachineReport> {
    run_trials_with(config, Execution::default())
}

pub fn run_trials_with(config: &TrialConfig, exec: Execution) -> Result<MachineReport> {
    reuse_experiment_with(config, 1, exec)
}
