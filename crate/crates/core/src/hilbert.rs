//! Dense state and operator arithmetic on labelled tensor-product spaces.
//!
//! Qubit computational basis: index 0 is `|↑⟩`, index 1 is `|↓⟩`. In a
//! register of several qubits the first qubit is the most significant digit.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Eigenvalues with magnitude at most this are treated as zero by
/// [`positive_part_projector`].
pub const TIE_EPSILON: f64 = 1e-10;

/// Tolerance on `‖M − M†‖_max` for an operator to count as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Default upper bound on the number of qubits for full-register operators.
pub const DEFAULT_MAX_QUBITS: usize = 11;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One tensor factor of a [`SpaceLayout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub label: char,
    pub dim: usize,
}

/// Ordered list of labelled tensor factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    pub fn new(factors: impl IntoIterator<Item = (char, usize)>) -> Result<Self> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor { label, dim })
            .collect();
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return domain(format!("factor {} has dimension 0", f.label));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return domain(format!("duplicate factor label {}", f.label));
            }
        }
        Ok(SpaceLayout { factors })
    }

    /// A single unlabelled-looking factor, used for plain matrices.
    pub fn single(label: char, dim: usize) -> Self {
        SpaceLayout {
            factors: vec![Factor { label, dim }],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    fn position(&self, label: char) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    /// Concatenation, as for a tensor product. Fails on repeated labels.
    pub fn tensor(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        SpaceLayout::new(
            self.factors
                .iter()
                .chain(&other.factors)
                .map(|f| (f.label, f.dim)),
        )
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}[{}]", x.label, x.dim))
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Dense square operator tagged with its tensor structure.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
    layout: SpaceLayout,
    hermitian: bool,
}

impl HermitianOperator {
    /// Wraps a matrix. The Hermiticity flag is computed, not trusted.
    pub fn new(matrix: DMatrix<Complex64>, layout: SpaceLayout) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != layout.dim() {
            return domain(format!(
                "{}x{} matrix does not match layout {} of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                layout,
                layout.dim()
            ));
        }
        let hermitian = hermiticity_defect(&matrix) < HERMITIAN_TOLERANCE;
        Ok(HermitianOperator {
            matrix,
            layout,
            hermitian,
        })
    }

    pub fn from_real(matrix: &DMatrix<f64>, layout: SpaceLayout) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)), layout)
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.dim();
        HermitianOperator {
            matrix: DMatrix::identity(d, d),
            layout,
            hermitian: true,
        }
    }

    /// `|v⟩⟨v|` (unnormalised).
    pub fn projector_onto(v: &DVector<Complex64>, layout: SpaceLayout) -> Result<Self> {
        Self::new(v * v.adjoint(), layout)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator {
            matrix: self.matrix.kronecker(&other.matrix),
            layout: self.layout.tensor(&other.layout)?,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, factor: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            layout: self.layout.clone(),
            hermitian: self.hermitian,
        }
    }

    /// Operator product; the result's Hermiticity is recomputed.
    pub fn compose(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.same_layout(other)?;
        HermitianOperator::new(&self.matrix * &other.matrix, self.layout.clone())
    }

    /// `tr(self · other)`.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<Complex64> {
        self.same_layout(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Largest entry of `|self − other|`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Sets the small anti-Hermitian part to zero.
    pub fn hermitize(mut self) -> HermitianOperator {
        self.matrix = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        self.hermitian = true;
        self
    }

    fn same_layout(&self, other: &HermitianOperator) -> Result<()> {
        if self.layout != other.layout {
            return domain(format!(
                "layouts differ: {} vs {}",
                self.layout, other.layout
            ));
        }
        Ok(())
    }

    fn binary(&self, other: &HermitianOperator, sign: f64) -> HermitianOperator {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        HermitianOperator {
            matrix: &self.matrix + &other.matrix * Complex64::new(sign, 0.0),
            layout: self.layout.clone(),
            hermitian: self.hermitian && other.hermitian,
        }
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.binary(rhs, 1.0)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.binary(rhs, -1.0)
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Bloch vector of a qubit state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector::raw(0.0, 0.0, 0.0);
    pub const UP: BlochVector = BlochVector::raw(0.0, 0.0, 1.0);

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = BlochVector { x, y, z };
        if !(v.norm() <= 1.0 + 1e-12) {
            return domain(format!("Bloch vector ({x}, {y}, {z}) is longer than 1"));
        }
        Ok(v)
    }

    /// Unchecked constructor; also used for differences of Bloch vectors.
    pub const fn raw(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        BlochVector::raw(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: BlochVector) -> f64 {
        (self - other).norm()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn direction(self) -> Option<BlochVector> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Density matrix `(𝟙 + r·σ)/2`.
    pub fn density_matrix(self) -> DMatrix<Complex64> {
        let half = 0.5;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(half * (1.0 + self.z), 0.0),
                Complex64::new(half * self.x, -half * self.y),
                Complex64::new(half * self.x, half * self.y),
                Complex64::new(half * (1.0 - self.z), 0.0),
            ],
        )
    }

    /// Pure-state amplitudes `(cos θ/2, e^{iφ} sin θ/2)` for a unit vector.
    pub fn pure_state(self) -> [Complex64; 2] {
        let n = self.norm();
        let cos_theta = if n > 0.0 {
            (self.z / n).clamp(-1.0, 1.0)
        } else {
            1.0
        };
        let phi = self.y.atan2(self.x);
        let a = ((1.0 + cos_theta) / 2.0).sqrt();
        let b = ((1.0 - cos_theta) / 2.0).sqrt();
        [Complex64::new(a, 0.0), Complex64::from_polar(b, phi)]
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::raw(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::raw(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector::raw(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, s: f64) -> BlochVector {
        BlochVector::raw(self.x * s, self.y * s, self.z * s)
    }
}

pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> DMatrix<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    DMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Isometry from the symmetric subspace of `n` qubits into the full
/// register, with the default qubit budget.
pub fn dicke_isometry(n: usize) -> Result<DMatrix<f64>> {
    dicke_isometry_with_cap(n, DEFAULT_MAX_QUBITS)
}

/// Column `k` is the Dicke state with `k` spins down (magnetic number
/// `n/2 − k`). The entries are real.
pub fn dicke_isometry_with_cap(n: usize, max_qubits: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return domain("Dicke isometry needs at least one qubit");
    }
    if n > max_qubits {
        return Err(Error::Capacity {
            what: "qubits",
            requested: n,
            limit: max_qubits,
        });
    }
    let mut v = DMatrix::zeros(1 << n, n + 1);
    for idx in 0..(1usize << n) {
        let k = idx.count_ones() as usize;
        v[(idx, k)] = 1.0 / binomial(n, k).sqrt();
    }
    Ok(v)
}

/// Projector `VV†` onto the symmetric subspace of `n` qubits.
pub fn symmetric_projector(n: usize, max_qubits: usize) -> Result<DMatrix<f64>> {
    let v = dicke_isometry_with_cap(n, max_qubits)?;
    Ok(&v * v.transpose())
}

/// Traces out every factor whose label is not in `keep`. The surviving
/// factors keep their original order.
pub fn partial_trace(op: &HermitianOperator, keep: &[char]) -> Result<HermitianOperator> {
    let layout = op.layout();
    for &label in keep {
        if layout.position(label).is_none() {
            return domain(format!("label {label} not present in {layout}"));
        }
    }
    let factors = layout.factors();
    let kept: Vec<usize> = (0..factors.len())
        .filter(|&i| keep.contains(&factors[i].label))
        .collect();
    let traced: Vec<usize> = (0..factors.len()).filter(|i| !kept.contains(i)).collect();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; factors.len()];
    for i in (0..factors.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * factors[i + 1].dim;
    }
    let offsets = |positions: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &p in positions {
            out = out
                .iter()
                .flat_map(|&base| {
                    let stride = strides[p];
                    (0..factors[p].dim).map(move |d| base + d * stride)
                })
                .collect();
        }
        out
    };
    let kept_offsets = offsets(&kept);
    let traced_offsets = offsets(&traced);

    let m = op.matrix();
    let dk = kept_offsets.len();
    let result = DMatrix::from_fn(dk, dk, |r, c| {
        let (br, bc) = (kept_offsets[r], kept_offsets[c]);
        traced_offsets
            .iter()
            .map(|&t| m[(br + t, bc + t)])
            .sum::<Complex64>()
    });
    let new_layout = SpaceLayout {
        factors: kept.iter().map(|&i| factors[i]).collect(),
    };
    HermitianOperator::new(result, new_layout)
}

fn require_hermitian(op: &HermitianOperator, what: &str) -> Result<()> {
    if !op.is_hermitian() {
        return domain(format!("{what} requires a Hermitian operator"));
    }
    Ok(())
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues (ascending) of a Hermitian operator.
pub fn eigenvalues(op: &HermitianOperator) -> Result<Vec<f64>> {
    require_hermitian(op, "eigenvalues")?;
    let m = op.matrix();
    let mut values: Vec<f64> = if is_real(m) {
        m.map(|z| z.re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenpairs of a Hermitian operator; eigenvectors are the columns.
pub fn eigen_decomposition(op: &HermitianOperator) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    require_hermitian(op, "eigen decomposition")?;
    let m = op.matrix();
    if is_real(m) {
        let e = m.map(|z| z.re).symmetric_eigen();
        Ok((
            e.eigenvalues.iter().copied().collect(),
            e.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        ))
    } else {
        let e = m.clone().symmetric_eigen();
        Ok((e.eigenvalues.iter().copied().collect(), e.eigenvectors))
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(op: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues(op)?.iter().map(|x| x.abs()).sum())
}

/// Projector onto the eigenvectors with eigenvalue above [`TIE_EPSILON`].
pub fn positive_part_projector(op: &HermitianOperator) -> Result<HermitianOperator> {
    let (values, vectors) = eigen_decomposition(op)?;
    let d = op.dim();
    let mut p = DMatrix::<Complex64>::zeros(d, d);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > TIE_EPSILON {
            let v = vectors.column(k);
            p += v * v.adjoint();
        }
    }
    Ok(HermitianOperator::new(p, op.layout().clone())?.hermitize())
}

/// Bloch vector `r_k = tr(ρ σ_k)` of a single-qubit operator, normalised to
/// unit trace first.
pub fn bloch_of(op: &HermitianOperator) -> Result<BlochVector> {
    if op.dim() != 2 {
        return domain(format!(
            "Bloch vector needs a 2x2 operator, got {}",
            op.dim()
        ));
    }
    let m = op.matrix();
    let tr = m.trace().re;
    if tr.abs() < 1e-300 {
        return domain("cannot normalise a traceless operator");
    }
    let x = 2.0 * m[(1, 0)].re / tr;
    let y = 2.0 * m[(1, 0)].im / tr;
    let z = (m[(0, 0)].re - m[(1, 1)].re) / tr;
    Ok(BlochVector::raw(x, y, z))
}
