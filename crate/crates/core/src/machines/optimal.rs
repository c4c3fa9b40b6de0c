//! Optimal programmable-discrimination error and its independent evaluations.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::hilbert::{
    symmetric_projector, trace_norm, BlochVector, HermitianOperator, SpaceLayout,
};
use crate::su2::{clebsch_gordan, wigner_6j, HalfInt};

/// Default largest `n` for the full-register brute-force oracle
/// (`2n + 1 = 11` qubits, 2048 dimensions).
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 5;

/// `d_m = m + 1`, the dimension of the symmetric subspace of `m` qubits.
pub fn sym_dim(m: usize) -> f64 {
    (m + 1) as f64
}

/// Minimum average error of any machine given `n` copies of each state.
pub fn optimal_error(n: usize) -> f64 {
    let d = sym_dim(n);
    let sum: f64 = (0..=n)
        .map(|k| {
            let k = k as f64;
            k * (d * d - k * k).sqrt()
        })
        .sum();
    0.5 - sum / (d * d * sym_dim(n + 1))
}

/// Helstrom error for two equiprobable qubit states.
pub fn helstrom_error(r0: BlochVector, r1: BlochVector) -> f64 {
    (1.0 - r0.distance(r1) / 2.0) / 2.0
}

/// Average states `σ0 = 𝟙_{AB} ⊗ 𝟙_C / (d_n d_{n+1})` and
/// `σ1 = 𝟙_A ⊗ 𝟙_{BC} / (d_n d_{n+1})` on the full `2n + 1`-qubit register,
/// where `𝟙_X` is the symmetric projector of the qubits in `X`.
pub fn average_states(n: usize, cap: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    if n == 0 {
        return domain("the brute-force oracle needs n >= 1");
    }
    if n > cap {
        return Err(Error::Capacity {
            what: "n (brute force)",
            requested: n,
            limit: cap,
        });
    }
    let qubits = 2 * n + 1;
    let sym_n = symmetric_projector(n, qubits)?;
    let sym_n1 = symmetric_projector(n + 1, qubits)?;
    let norm = 1.0 / (sym_dim(n) * sym_dim(n + 1));
    let sigma0: DMatrix<f64> = sym_n1.kronecker(&sym_n) * norm;
    let sigma1: DMatrix<f64> = sym_n.kronecker(&sym_n1) * norm;
    let layout = SpaceLayout::new([('A', 1 << n), ('B', 2), ('C', 1 << n)])?;
    Ok((
        HermitianOperator::from_real(&sigma0, layout.clone())?,
        HermitianOperator::from_real(&sigma1, layout)?,
    ))
}

/// Error from the trace norm `‖σ0 − σ1‖₁` on the full register.
pub fn brute_force_error(n: usize) -> Result<f64> {
    brute_force_error_with_cap(n, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_error_with_cap(n: usize, cap: usize) -> Result<f64> {
    let (sigma0, sigma1) = average_states(n, cap)?;
    let delta = trace_norm(&(&sigma0 - &sigma1))?;
    Ok((1.0 - delta / 2.0) / 2.0)
}

/// Amplitude of `|j − ½, ½⟩` in the projection of `|φ⁰⟩|↑⟩` onto the
/// subspace where the data qubit and the label-1 register are symmetric,
/// for `j = 1 ..= n + 1`.
pub fn projection_coefficients(n: usize) -> Vec<f64> {
    let d = sym_dim(n);
    (1..=n + 1)
        .map(|j| {
            let j = j as f64;
            j.sqrt() * ((d + j).sqrt() - (d - j).max(0.0).sqrt()) / (2.0 * d).sqrt()
        })
        .collect()
}

/// Squared norm of the projected seed, from [`projection_coefficients`].
pub fn projection_norm_sq(n: usize) -> f64 {
    projection_coefficients(n).iter().map(|c| c * c).sum()
}

/// Learning-machine error evaluated from the projections of the seed state.
/// Both coupling orders contribute the same norm.
pub fn lm_error_projection(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("the learning machine needs n >= 1");
    }
    let up = projection_norm_sq(n);
    let down = up;
    Ok((up + down) / (2.0 * sym_dim(n) * sym_dim(n + 1)))
}

/// Overlap `⟨(A,(CB) j_CB) J | ((AC) j, B) J⟩` with `j_A = j_C = n/2`,
/// `j_B = ½`, `j_CB = (n + 1)/2`, from a 6j symbol.
pub fn recoupling_overlap(n: usize, j: HalfInt, total: HalfInt) -> Result<f64> {
    let ja = HalfInt::half_of(n);
    let jc = ja;
    let jb = HalfInt::HALF;
    let jcb = HalfInt::half_of(n + 1);
    let phase_exp = (ja + jc + jb + total).twice_value() / 2;
    let phase = if phase_exp % 2 == 0 { 1.0 } else { -1.0 };
    let dims = ((j.twice_value() + 1) * (jcb.twice_value() + 1)) as f64;
    Ok(phase * dims.sqrt() * wigner_6j(ja, jc, j, jb, total, jcb)?)
}

/// `‖𝟙_A ⊗ 𝟙_{BC} |φ⁰⟩|↑⟩‖²` assembled from Clebsch–Gordan coefficients and
/// 6j recoupling overlaps, without the closed-form amplitudes.
pub fn projection_norm_sq_recoupling(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("the learning machine needs n >= 1");
    }
    let half = HalfInt::HALF;
    let mut total_sq = 0.0;
    // J = k + 1/2 for k = 0..=n
    for k in 0..=n as i32 {
        let total = HalfInt::from_twice(2 * k + 1);
        let mut amplitude = 0.0;
        for j in [k, k + 1] {
            if j > n as i32 {
                continue;
            }
            let jj = HalfInt::integer(j);
            let seed = f64::from(2 * j + 1).sqrt();
            let cg = clebsch_gordan(jj, HalfInt::ZERO, half, half, total, half)?;
            amplitude += seed * cg * recoupling_overlap(n, jj, total)?;
        }
        total_sq += amplitude * amplitude;
    }
    Ok(total_sq)
}

/// Learning-machine error from the recoupling route.
pub fn lm_error_recoupling(n: usize) -> Result<f64> {
    let up = projection_norm_sq_recoupling(n)?;
    Ok(up / (sym_dim(n) * sym_dim(n + 1)))
}

/// Upper bound `2(n+1)(2n+1)` on the outcomes needed by the learning POVM.
pub fn outcome_bound(n: usize) -> usize {
    2 * (n + 1) * (2 * n + 1)
}

/// Classical memory in bits needed to store one of `outcomes` results.
pub fn memory_bits(outcomes: usize) -> f64 {
    (outcomes as f64).log2()
}
