//! Seed state and finite covariant learning POVMs on the training register.
//!
//! The training register is `A ⊗ C`, two spin-`n/2` irreps (the symmetric
//! subspaces of the label-0 and label-1 qubits). Product-basis index is
//! `a * (n + 1) + c`, each factor in descending magnetic number.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optimal::{memory_bits, outcome_bound, sym_dim};
use super::quadrature::gauss_legendre;
use crate::error::{domain, Result};
use crate::hilbert::{HermitianOperator, SpaceLayout};
use crate::su2::{clebsch_gordan, rotation_operator, HalfInt, RotationParams};

/// `|φ⁰⟩ = Σ_j √(2j+1) |j, 0⟩` on the coupled `A ⊗ C` register, `j = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedState {
    n: usize,
    amplitudes: Vec<f64>,
}

impl SeedState {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("the seed state needs n >= 1");
        }
        Ok(SeedState {
            n,
            amplitudes: (0..=n).map(|j| ((2 * j + 1) as f64).sqrt()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Amplitudes indexed by the coupled angular momentum `j`.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// The seed expanded in the `A ⊗ C` product basis.
    pub fn product_vector(&self) -> Result<DVector<f64>> {
        let n = self.n;
        let spin = HalfInt::half_of(n);
        let d = n + 1;
        let mut v = DVector::zeros(d * d);
        for (j, amp) in self.amplitudes.iter().enumerate() {
            let jj = HalfInt::integer(j as i32);
            for (a, ma) in spin.magnetic_numbers().enumerate() {
                for (c, mc) in spin.magnetic_numbers().enumerate() {
                    if ma + mc != HalfInt::ZERO {
                        continue;
                    }
                    v[a * d + c] += amp * clebsch_gordan(spin, ma, spin, mc, jj, HalfInt::ZERO)?;
                }
            }
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmKind {
    /// Gauss–Legendre × equispaced-azimuth product rule.
    Quadrature,
    /// Four rotations onto the vertices of a regular tetrahedron (`n = 1`).
    Tetrahedron,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmOutcome {
    pub weight: f64,
    pub rotation: RotationParams,
}

/// `L_μ = p_μ U_μ [φ⁰] U_μ†` with `U_μ = D^{n/2}(g_μ) ⊗ D^{n/2}(g_μ)`.
#[derive(Clone, Debug)]
pub struct CovariantPovm {
    kind: PovmKind,
    outcomes: Vec<PovmOutcome>,
    seed: SeedState,
}

impl CovariantPovm {
    pub fn new(kind: PovmKind, outcomes: Vec<PovmOutcome>, seed: SeedState) -> Result<Self> {
        let total: f64 = outcomes.iter().map(|o| o.weight).sum();
        if outcomes
            .iter()
            .any(|o| !(o.weight > 0.0 && o.weight <= 1.0))
        {
            return domain("outcome weights must lie in (0, 1]");
        }
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("outcome weights sum to {total}, not 1"));
        }
        Ok(CovariantPovm {
            kind,
            outcomes,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.seed.n
    }

    pub fn kind(&self) -> PovmKind {
        self.kind
    }

    pub fn outcomes(&self) -> &[PovmOutcome] {
        &self.outcomes
    }

    pub fn seed(&self) -> &SeedState {
        &self.seed
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn layout(&self) -> SpaceLayout {
        let d = self.n() + 1;
        SpaceLayout::new([('A', d), ('C', d)]).expect("distinct labels")
    }

    /// `U_μ|φ⁰⟩` in the `A ⊗ C` product basis (norm² = `d_n²`).
    pub fn rotated_seeds(&self) -> Result<Vec<DVector<Complex64>>> {
        let seed = self.seed.product_vector()?.map(|x| Complex64::new(x, 0.0));
        let spin = HalfInt::half_of(self.n());
        self.outcomes
            .iter()
            .map(|o| {
                let u = rotation_operator(spin, &o.rotation)?;
                Ok(u.kronecker(&u) * &seed)
            })
            .collect()
    }

    /// The learning-POVM element `L_μ`.
    pub fn element(&self, mu: usize) -> Result<HermitianOperator> {
        let Some(outcome) = self.outcomes.get(mu) else {
            return domain(format!("outcome {mu} out of range 0..{}", self.len()));
        };
        let seed = self.seed.product_vector()?.map(|x| Complex64::new(x, 0.0));
        let spin = HalfInt::half_of(self.n());
        let u = rotation_operator(spin, &outcome.rotation)?;
        let v = u.kronecker(&u) * seed;
        Ok(HermitianOperator::projector_onto(&v, self.layout())?.scale(outcome.weight))
    }

    /// `Σ_μ L_μ`.
    pub fn assembled(&self) -> Result<HermitianOperator> {
        let d = (self.n() + 1).pow(2);
        let mut sum = DMatrix::<Complex64>::zeros(d, d);
        for (v, o) in self.rotated_seeds()?.iter().zip(&self.outcomes) {
            sum += v * v.adjoint() * Complex64::new(o.weight, 0.0);
        }
        HermitianOperator::new(sum, self.layout())
    }

    /// Largest entry of `|Σ_μ L_μ − 𝟙|`.
    pub fn completeness_defect(&self) -> Result<f64> {
        let assembled = self.assembled()?;
        Ok(assembled.max_abs_diff(&HermitianOperator::identity(self.layout())))
    }

    pub fn memory_bits(&self) -> f64 {
        memory_bits(self.len())
    }

    /// Serializable summary for export.
    pub fn export(&self) -> Result<PovmExport> {
        Ok(PovmExport {
            n: self.n(),
            kind: self.kind,
            outcome_count: self.len(),
            outcome_bound: outcome_bound(self.n()),
            memory_bits: self.memory_bits(),
            completeness_defect: self.completeness_defect()?,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| ExportedOutcome {
                    weight: o.weight,
                    alpha: o.rotation.alpha,
                    beta: o.rotation.beta,
                    gamma: o.rotation.gamma,
                })
                .collect(),
        })
    }
}

/// JSON document written by `qlm povm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmExport {
    pub n: usize,
    pub kind: PovmKind,
    pub outcome_count: usize,
    pub outcome_bound: usize,
    pub memory_bits: f64,
    pub completeness_defect: f64,
    pub outcomes: Vec<ExportedOutcome>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedOutcome {
    pub weight: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn seed_state(n: usize) -> Result<SeedState> {
    SeedState::new(n)
}

/// Finite covariant POVM with `(n + 1)(2n + 1)` outcomes: polar angles at
/// the Gauss–Legendre nodes in `cos β`, azimuths equispaced, `γ = 0`.
///
/// The rotation orbit of the seed only carries harmonics of degree `≤ 2n`,
/// which this product rule integrates exactly.
pub fn covariant_povm(n: usize) -> Result<CovariantPovm> {
    let seed = SeedState::new(n)?;
    let (nodes, weights) = gauss_legendre(n + 1);
    let azimuths = 2 * n + 1;
    let mut outcomes = Vec::with_capacity((n + 1) * azimuths);
    for (x, w) in nodes.iter().zip(&weights) {
        let beta = x.clamp(-1.0, 1.0).acos();
        for a in 0..azimuths {
            outcomes.push(PovmOutcome {
                weight: w / 2.0 / azimuths as f64,
                rotation: RotationParams {
                    alpha: 2.0 * PI * a as f64 / azimuths as f64,
                    beta,
                    gamma: 0.0,
                },
            });
        }
    }
    CovariantPovm::new(PovmKind::Quadrature, outcomes, seed)
}

/// Unit vectors of the regular tetrahedron used by [`tetrahedron_povm`].
pub const TETRAHEDRON_VERTICES: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// The four-outcome learning POVM for `n = 1`.
pub fn tetrahedron_povm() -> Result<CovariantPovm> {
    let outcomes = TETRAHEDRON_VERTICES
        .iter()
        .map(|v| {
            Ok(PovmOutcome {
                weight: 0.25,
                rotation: RotationParams::from_direction(*v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CovariantPovm::new(PovmKind::Tetrahedron, outcomes, SeedState::new(1)?)
}

/// Normalised `d_n²` of the seed, for reference.
pub fn seed_norm_sq(n: usize) -> f64 {
    sym_dim(n).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn seed_amplitudes() {
        let s = SeedState::new(1).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0], 1.0);
        assert_abs_diff_eq!(s.amplitudes()[1], 3f64.sqrt());
        assert_abs_diff_eq!(s.norm_sq(), 4.0, epsilon = 1e-14);
        let s2 = SeedState::new(2).unwrap();
        assert_abs_diff_eq!(s2.amplitudes()[2], 5f64.sqrt());
        for n in 1..10 {
            assert_abs_diff_eq!(
                SeedState::new(n).unwrap().norm_sq(),
                seed_norm_sq(n),
                epsilon = 1e-12
            );
        }
        assert!(SeedState::new(0).is_err());
    }

    #[test]
    fn product_vector_keeps_norm() {
        for n in 1..=5 {
            let v = SeedState::new(n).unwrap().product_vector().unwrap();
            assert_abs_diff_eq!(v.norm_squared(), seed_norm_sq(n), epsilon = 1e-12);
        }
    }

    #[test]
    fn quadrature_outcome_counts() {
        for n in 1..=6 {
            let p = covariant_povm(n).unwrap();
            assert_eq!(p.len(), (n + 1) * (2 * n + 1));
            assert!(p.len() <= outcome_bound(n));
            assert_abs_diff_eq!(
                p.outcomes().iter().map(|o| o.weight).sum::<f64>(),
                1.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn tetrahedron_shape() {
        let p = tetrahedron_povm().unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.outcomes().iter().all(|o| o.weight == 0.25));
        for (o, v) in p.outcomes().iter().zip(TETRAHEDRON_VERTICES) {
            let r = o.rotation.rotate([0.0, 0.0, 1.0]);
            for i in 0..3 {
                assert_abs_diff_eq!(r[i], v[i] / 3f64.sqrt(), epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(p.memory_bits(), 2.0);
    }

    #[test]
    fn element_traces_are_weighted_seed_norms() {
        let p = covariant_povm(2).unwrap();
        for mu in 0..p.len() {
            let l = p.element(mu).unwrap();
            assert_abs_diff_eq!(l.trace().re, p.outcomes()[mu].weight * 9.0, epsilon = 1e-12);
        }
        assert!(p.element(p.len()).is_err());
    }

    #[test]
    fn unnormalised_weights_rejected() {
        let seed = SeedState::new(1).unwrap();
        let o = PovmOutcome {
            weight: 0.5,
            rotation: RotationParams::IDENTITY,
        };
        assert!(CovariantPovm::new(PovmKind::Quadrature, vec![o], seed).is_err());
    }
}
