//! Conditioned data-qubit states, feed-forward decisions and the assembled
//! learning-machine measurement.
//!
//! Everything here lives on the symmetric-embedded register
//! `A ⊗ B ⊗ C = (n/2) ⊗ (1/2) ⊗ (n/2)`, with dimension `2(n + 1)²`. The
//! average states are built from Clebsch–Gordan couplings rather than
//! from qubit-level Dicke projectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optimal::sym_dim;
use super::povm::CovariantPovm;
use crate::error::{domain, Error, Result};
use crate::hilbert::{
    bloch_of, partial_trace, BlochVector, HermitianOperator, SpaceLayout, TIE_EPSILON,
};
use crate::par::{map_indices, Execution};
use crate::su2::{clebsch_gordan, HalfInt};

/// Default largest `n` for operators on the embedded register.
pub const DEFAULT_EMBEDDED_CAP: usize = 8;

/// Conditioned data-qubit states for one learning outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionedPair {
    pub mu: usize,
    pub p_mu: f64,
    pub r0: BlochVector,
    pub r1: BlochVector,
    /// Unit vector; `D_μ = (𝟙 + axis·σ)/2`. `+z` when `r0 = r1`.
    pub decision_axis: BlochVector,
}

impl ConditionedPair {
    pub fn trace_distance(&self) -> f64 {
        self.r0.distance(self.r1)
    }

    /// The data-qubit projector selecting label 0.
    pub fn decision_operator(&self) -> DMatrix<Complex64> {
        self.decision_axis.density_matrix()
    }
}

/// Isometry from spin `total` into `j1 ⊗ j2`; rows are product indices
/// `i1 * (2j2 + 1) + i2`, columns descend in `M`.
pub fn coupling_isometry(j1: HalfInt, j2: HalfInt, total: HalfInt) -> Result<DMatrix<f64>> {
    let mut w = DMatrix::zeros(j1.dim() * j2.dim(), total.dim());
    for (i1, m1) in j1.magnetic_numbers().enumerate() {
        for (i2, m2) in j2.magnetic_numbers().enumerate() {
            for (k, m) in total.magnetic_numbers().enumerate() {
                w[(i1 * j2.dim() + i2, k)] = clebsch_gordan(j1, m1, j2, m2, total, m)?;
            }
        }
    }
    Ok(w)
}

/// Average states and layout on the embedded register for one `n`.
#[derive(Clone, Debug)]
pub struct LearningContext {
    n: usize,
    sigma0: HermitianOperator,
    sigma1: HermitianOperator,
}

impl LearningContext {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_EMBEDDED_CAP)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return domain("the learning machine needs n >= 1");
        }
        if n > cap {
            return Err(Error::Capacity {
                what: "n (embedded register)",
                requested: n,
                limit: cap,
            });
        }
        let spin = HalfInt::half_of(n);
        let half = HalfInt::HALF;
        let raised = HalfInt::half_of(n + 1);
        let d = n + 1;

        let w_ab = coupling_isometry(spin, half, raised)?;
        let w_bc = coupling_isometry(half, spin, raised)?;
        let p_ab = &w_ab * w_ab.transpose();
        let p_bc = &w_bc * w_bc.transpose();
        let norm = 1.0 / (sym_dim(n) * sym_dim(n + 1));
        let sigma0 = p_ab.kronecker(&DMatrix::<f64>::identity(d, d)) * norm;
        let sigma1 = DMatrix::<f64>::identity(d, d).kronecker(&p_bc) * norm;
        let layout = Self::layout_for(n);
        Ok(LearningContext {
            n,
            sigma0: HermitianOperator::from_real(&sigma0, layout.clone())?,
            sigma1: HermitianOperator::from_real(&sigma1, layout)?,
        })
    }

    fn layout_for(n: usize) -> SpaceLayout {
        SpaceLayout::new([('A', n + 1), ('B', 2), ('C', n + 1)]).expect("distinct labels")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> SpaceLayout {
        Self::layout_for(self.n)
    }

    pub fn sigma0(&self) -> &HermitianOperator {
        &self.sigma0
    }

    pub fn sigma1(&self) -> &HermitianOperator {
        &self.sigma1
    }

    /// `X_{AC} ⊗ Y_B`, reordered into the `A ⊗ B ⊗ C` layout.
    pub fn embed(
        &self,
        training: &DMatrix<Complex64>,
        data: &DMatrix<Complex64>,
    ) -> Result<HermitianOperator> {
        let d = self.n + 1;
        if training.nrows() != d * d || data.nrows() != 2 {
            return domain("operator dimensions do not match the register");
        }
        let dim = 2 * d * d;
        let index = |a: usize, b: usize, c: usize| (a * 2 + b) * d + c;
        let mut full = DMatrix::<Complex64>::zeros(dim, dim);
        for a in 0..d {
            for c in 0..d {
                for a2 in 0..d {
                    for c2 in 0..d {
                        let t = training[(a * d + c, a2 * d + c2)];
                        if t == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for b in 0..2 {
                            for b2 in 0..2 {
                                full[(index(a, b, c), index(a2, b2, c2))] = t * data[(b, b2)];
                            }
                        }
                    }
                }
            }
        }
        HermitianOperator::new(full, self.layout())
    }

    fn check_povm(&self, povm: &CovariantPovm) -> Result<()> {
        if povm.n() != self.n {
            return domain(format!(
                "POVM is for n = {}, context for n = {}",
                povm.n(),
                self.n
            ));
        }
        Ok(())
    }

    /// `ρ^μ_{0/1} = p_μ⁻¹ tr_AC[(L_μ ⊗ 𝟙_B) σ_{0/1}]` and the Helstrom
    /// decision between them.
    pub fn conditioned_pair(&self, povm: &CovariantPovm, mu: usize) -> Result<ConditionedPair> {
        self.check_povm(povm)?;
        let element = povm.element(mu)?;
        let p_mu = element.trace().re / sym_dim(self.n).powi(2);
        let lifted = self.embed(element.matrix(), &DMatrix::identity(2, 2))?;
        let conditioned = |sigma: &HermitianOperator| -> Result<BlochVector> {
            let product = lifted.compose(sigma)?;
            bloch_of(&partial_trace(&product, &['B'])?.hermitize())
        };
        let r0 = conditioned(&self.sigma0)?;
        let r1 = conditioned(&self.sigma1)?;
        let diff = r0 - r1;
        let decision_axis = if diff.norm() > TIE_EPSILON {
            diff.direction().unwrap_or(BlochVector::UP)
        } else {
            BlochVector::UP
        };
        Ok(ConditionedPair {
            mu,
            p_mu,
            r0,
            r1,
            decision_axis,
        })
    }

    pub fn conditioned_pairs(
        &self,
        povm: &CovariantPovm,
        exec: Execution,
    ) -> Result<Vec<ConditionedPair>> {
        self.check_povm(povm)?;
        map_indices(povm.len(), exec, |mu| self.conditioned_pair(povm, mu))
            .into_iter()
            .collect()
    }

    /// `E0 = Σ L_μ ⊗ D_μ` and `E1 = Σ L_μ ⊗ (𝟙 − D_μ)`.
    pub fn assembled_measurement(
        &self,
        povm: &CovariantPovm,
    ) -> Result<(HermitianOperator, HermitianOperator)> {
        let pairs = self.conditioned_pairs(povm, Execution::default())?;
        let layout = self.layout();
        let dim = layout.dim();
        let mut e0 = DMatrix::<Complex64>::zeros(dim, dim);
        let mut e1 = DMatrix::<Complex64>::zeros(dim, dim);
        let identity = DMatrix::<Complex64>::identity(2, 2);
        for pair in &pairs {
            let element = povm.element(pair.mu)?;
            let d = pair.decision_operator();
            e0 += self.embed(element.matrix(), &d)?.matrix();
            e1 += self.embed(element.matrix(), &(&identity - &d))?.matrix();
        }
        Ok((
            HermitianOperator::new(e0, layout.clone())?,
            HermitianOperator::new(e1, layout)?,
        ))
    }
}

/// Conditioned pair for one outcome, building a fresh context.
pub fn conditioned_pair(povm: &CovariantPovm, mu: usize) -> Result<ConditionedPair> {
    LearningContext::new(povm.n())?.conditioned_pair(povm, mu)
}

/// `Δ_ℒ = Σ_μ p_μ |r⃗₀^μ − r⃗₁^μ|`, summed in outcome order.
pub fn lm_delta_from_povm(n: usize, povm: &CovariantPovm) -> Result<f64> {
    lm_delta_with(n, povm, Execution::default())
}

pub fn lm_delta_with(n: usize, povm: &CovariantPovm, exec: Execution) -> Result<f64> {
    let ctx = LearningContext::new(n)?;
    let pairs = ctx.conditioned_pairs(povm, exec)?;
    Ok(pairs.iter().map(|p| p.p_mu * p.trace_distance()).sum())
}

/// `(1 − Δ/2)/2`.
pub fn error_from_delta(delta: f64) -> f64 {
    (1.0 - delta / 2.0) / 2.0
}
