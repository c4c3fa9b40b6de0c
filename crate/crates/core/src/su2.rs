//! SU(2) representation kernels.
//!
//! Angular momenta and magnetic numbers are stored doubled ([`HalfInt`]) so
//! that half-integers are exact. Clebsch–Gordan coefficients and 6j symbols
//! are evaluated with Racah's single-sum formulas in exact big-rational
//! arithmetic and rounded to `f64` only at the end.
//!
//! Conventions used throughout the crate:
//!
//! * Condon–Shortley phases: `<j1 j1; j2 (J - j1) | J J> > 0`.
//! * Basis vectors of a spin-`j` irrep are ordered by descending magnetic
//!   number, so row/column `i` carries `m = j - i`.
//! * Rotations use z-y-z Euler angles, `D(α, β, γ) = e^{-iαJz} e^{-iβJy} e^{-iγJz}`.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// A non-negative or signed half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(value: i32) -> Self {
        HalfInt { twice: 2 * value }
    }

    /// `n/2`, the spin of the symmetric subspace of `n` qubits.
    pub const fn half_of(n: usize) -> Self {
        HalfInt { twice: n as i32 }
    }

    pub const fn twice_value(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Dimension `2j + 1` of the irrep, for a valid angular momentum.
    pub fn dim(self) -> usize {
        debug_assert!(self.twice >= 0);
        self.twice as usize + 1
    }

    /// Magnetic numbers `j, j-1, ..., -j`.
    pub fn magnetic_numbers(self) -> impl Iterator<Item = HalfInt> {
        let j = self.twice;
        (0..=j.max(-1)).map(move |k| HalfInt::from_twice(j - 2 * k))
    }

    fn check_momentum(self, name: &str) -> Result<()> {
        if self.twice < 0 {
            return domain(format!("{name} = {self} is a negative angular momentum"));
        }
        Ok(())
    }

    fn check_projection(self, j: HalfInt, name: &str) -> Result<()> {
        if self.twice.abs() > j.twice || (j.twice - self.twice) % 2 != 0 {
            return domain(format!("{name} = {self} is not a projection of j = {j}"));
        }
        Ok(())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

/// z-y-z Euler angles in radians.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RotationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl RotationParams {
    pub const IDENTITY: RotationParams = RotationParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return domain("Euler angles must be finite");
        }
        if !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&beta) {
            return domain(format!("beta = {beta} outside [0, pi]"));
        }
        Ok(RotationParams { alpha, beta, gamma })
    }

    /// The rotation with `γ = 0` carrying `ẑ` onto the direction of `v`.
    pub fn from_direction(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("direction must be a finite non-zero vector");
        }
        let beta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let alpha = if v[0] == 0.0 && v[1] == 0.0 {
            0.0
        } else {
            v[1].atan2(v[0])
        };
        Ok(RotationParams {
            alpha,
            beta,
            gamma: 0.0,
        })
    }

    /// The SO(3) matrix `Rz(α) Ry(β) Rz(γ)`.
    pub fn so3(&self) -> [[f64; 3]; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        [
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ]
    }

    /// Rotates a 3-vector.
    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        let r = self.so3();
        [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
    }
}

fn factorial(k: i64) -> BigInt {
    debug_assert!(k >= 0);
    (2..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice, b.twice, c.twice);
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

/// `sign(s) * sqrt(a * s^2)` rounded once.
fn signed_sqrt_product(a: &BigRational, s: &BigRational) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let magnitude = (a * s * s).to_f64().unwrap_or(f64::NAN).sqrt();
    if s.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Clebsch–Gordan coefficient `<J M | j1 m1; j2 m2>`.
///
/// Returns zero when `M != m1 + m2`, when the triangle condition fails, or
/// when `|M| > J`.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    j1.check_momentum("j1")?;
    j2.check_momentum("j2")?;
    j.check_momentum("J")?;
    m1.check_projection(j1, "m1")?;
    m2.check_projection(j2, "m2")?;
    if m != m1 + m2 || !triangle(j1, j2, j) || m.twice.abs() > j.twice {
        return Ok(0.0);
    }

    // All factorial arguments below are integers once halved.
    let h = |x: i32| -> i64 {
        debug_assert!(x % 2 == 0);
        i64::from(x / 2)
    };
    let (a1, a2, aj) = (j1.twice, j2.twice, j.twice);
    let (b1, b2, bm) = (m1.twice, m2.twice, m.twice);

    let num = BigInt::from(aj + 1)
        * factorial(h(aj + a1 - a2))
        * factorial(h(aj - a1 + a2))
        * factorial(h(a1 + a2 - aj))
        * factorial(h(aj + bm))
        * factorial(h(aj - bm))
        * factorial(h(a1 - b1))
        * factorial(h(a1 + b1))
        * factorial(h(a2 - b2))
        * factorial(h(a2 + b2));
    let den = factorial(h(a1 + a2 + aj) + 1);
    let prefactor = BigRational::new(num, den);

    let k_min = 0.max(-h(aj - a2 + b1)).max(-h(aj - a1 - b2));
    let k_max = h(a1 + a2 - aj).min(h(a1 - b1)).min(h(a2 + b2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(h(a1 + a2 - aj) - k)
            * factorial(h(a1 - b1) - k)
            * factorial(h(a2 + b2) - k)
            * factorial(h(aj - a2 + b1) + k)
            * factorial(h(aj - a1 - b2) + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(signed_sqrt_product(&prefactor, &sum))
}

fn triangle_coefficient_sq(a: HalfInt, b: HalfInt, c: HalfInt) -> BigRational {
    let (a, b, c) = (a.twice, b.twice, c.twice);
    let h = |x: i32| i64::from(x / 2);
    BigRational::new(
        factorial(h(a + b - c)) * factorial(h(a - b + c)) * factorial(h(-a + b + c)),
        factorial(h(a + b + c) + 1),
    )
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64> {
    for (name, j) in [
        ("j1", j1),
        ("j2", j2),
        ("j3", j3),
        ("j4", j4),
        ("j5", j5),
        ("j6", j6),
    ] {
        j.check_momentum(name)?;
    }
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(0.0);
    }
    let prefactor = triads.iter().fold(BigRational::one(), |acc, &(a, b, c)| {
        acc * triangle_coefficient_sq(a, b, c)
    });

    let h = |x: i32| i64::from(x / 2);
    let lower = triads.map(|(a, b, c)| h(a.twice + b.twice + c.twice));
    let upper = [
        h(j1.twice + j2.twice + j4.twice + j5.twice),
        h(j2.twice + j3.twice + j5.twice + j6.twice),
        h(j3.twice + j1.twice + j6.twice + j4.twice),
    ];
    let t_min = *lower.iter().max().unwrap();
    let t_max = *upper.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = lower.iter().map(|&a| factorial(t - a)).product::<BigInt>()
            * upper.iter().map(|&b| factorial(b - t)).product::<BigInt>();
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(signed_sqrt_product(&prefactor, &sum))
}

fn ln_factorial(k: i32) -> f64 {
    (2..=k).map(|i| f64::from(i).ln()).sum()
}

/// Wigner small-d matrix `d^j_{m'm}(β) = <j m'| e^{-iβJy} |j m>`, rows and
/// columns in descending magnetic number.
pub fn wigner_d_matrix(j: HalfInt, beta: f64) -> Result<DMatrix<f64>> {
    j.check_momentum("j")?;
    let dim = j.dim();
    let (s, c) = (beta / 2.0).sin_cos();
    let tj = j.twice;
    let mut d = DMatrix::zeros(dim, dim);
    for (row, mp) in j.magnetic_numbers().enumerate() {
        for (col, m) in j.magnetic_numbers().enumerate() {
            // Integer offsets (j+m etc. are whole numbers).
            let jpm = (tj + m.twice) / 2;
            let jmm = (tj - m.twice) / 2;
            let jpmp = (tj + mp.twice) / 2;
            let jmmp = (tj - mp.twice) / 2;
            let shift = (mp.twice - m.twice) / 2;
            let half_log_norm = 0.5
                * (ln_factorial(jpmp) + ln_factorial(jmmp) + ln_factorial(jpm) + ln_factorial(jmm));
            let k_min = 0.max(-shift);
            let k_max = jpm.min(jmmp);
            let mut value = 0.0;
            for k in k_min..=k_max {
                let cos_pow = tj - 2 * k - shift;
                let sin_pow = 2 * k + shift;
                let log_mag = half_log_norm
                    - ln_factorial(jpm - k)
                    - ln_factorial(k)
                    - ln_factorial(jmmp - k)
                    - ln_factorial(k + shift);
                let sign = if (k + shift) % 2 == 0 { 1.0 } else { -1.0 };
                value += sign * log_mag.exp() * c.powi(cos_pow) * s.powi(sin_pow);
            }
            d[(row, col)] = value;
        }
    }
    Ok(d)
}

/// Unitary `D^j(α, β, γ)` on the spin-`j` irrep.
pub fn rotation_operator(j: HalfInt, params: &RotationParams) -> Result<DMatrix<Complex64>> {
    let d = wigner_d_matrix(j, params.beta)?;
    let mags: Vec<f64> = j.magnetic_numbers().map(HalfInt::value).collect();
    Ok(DMatrix::from_fn(j.dim(), j.dim(), |r, c| {
        Complex64::from_polar(1.0, -params.alpha * mags[r] - params.gamma * mags[c]) * d[(r, c)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const H: HalfInt = HalfInt::HALF;

    fn hi(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn stretched_state_is_one() {
        let c = clebsch_gordan(H, H, H, H, hi(2), hi(2)).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn magnetic_number_above_total_vanishes() {
        assert_eq!(clebsch_gordan(H, H, H, H, hi(2), hi(4)).unwrap(), 0.0);
    }

    #[test]
    fn singlet_and_triplet_phases() {
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            clebsch_gordan(H, H, H, -H, hi(0), hi(0)).unwrap(),
            r,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            clebsch_gordan(H, -H, H, H, hi(0), hi(0)).unwrap(),
            -r,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            clebsch_gordan(H, -H, H, H, hi(2), hi(0)).unwrap(),
            r,
            epsilon = 1e-15
        );
    }

    #[test]
    fn invalid_arguments_are_domain_errors() {
        assert!(clebsch_gordan(hi(-1), H, H, H, hi(2), hi(2)).is_err());
        assert!(clebsch_gordan(H, hi(3), H, H, hi(2), hi(2)).is_err());
        assert!(clebsch_gordan(hi(2), H, H, H, hi(2), hi(2)).is_err());
        assert!(wigner_6j(H, H, hi(2), H, H, hi(-2)).is_err());
    }

    #[test]
    fn six_j_triangle_violation_is_zero() {
        assert_eq!(wigner_6j(H, H, hi(4), H, H, hi(2)).unwrap(), 0.0);
        assert_eq!(
            wigner_6j(hi(2), hi(2), hi(2), hi(2), hi(2), hi(7)).unwrap(),
            0.0
        );
    }

    #[test]
    fn six_j_known_values() {
        // {1/2 1/2 1; 1/2 1/2 0} = 1/2, {1 1 1; 1 1 1} = 1/6.
        assert_abs_diff_eq!(
            wigner_6j(H, H, hi(2), H, H, hi(0)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            wigner_6j(hi(2), hi(2), hi(2), hi(2), hi(2), hi(2)).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn small_d_identity_at_zero() {
        for tj in 0..8 {
            let d = wigner_d_matrix(hi(tj), 0.0).unwrap();
            assert_abs_diff_eq!(
                (d - DMatrix::identity(tj as usize + 1, tj as usize + 1)).amax(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn spin_flip_at_pi() {
        let d = wigner_d_matrix(H, PI).unwrap();
        // column of |up> lands on |down>
        assert_abs_diff_eq!(d[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(1, 0)].abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn small_d_rows_orthonormal() {
        let d = wigner_d_matrix(hi(3), 1.234).unwrap();
        let g = &d * d.transpose();
        assert_abs_diff_eq!((g - DMatrix::identity(4, 4)).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn spin_one_small_d_closed_form() {
        let b = 0.77f64;
        let d = wigner_d_matrix(hi(2), b).unwrap();
        assert_abs_diff_eq!(d[(0, 0)], (1.0 + b.cos()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[(0, 1)], -b.sin() / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(d[(1, 1)], b.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(d[(2, 0)], (1.0 - b.cos()) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn direction_round_trip() {
        let v = [0.3, -0.4, 0.2];
        let p = RotationParams::from_direction(v).unwrap();
        let n = (0.09f64 + 0.16 + 0.04).sqrt();
        let r = p.rotate([0.0, 0.0, 1.0]);
        for i in 0..3 {
            assert_abs_diff_eq!(r[i], v[i] / n, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotation_params_validation() {
        assert!(RotationParams::new(0.0, 4.0, 0.0).is_err());
        assert!(RotationParams::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(RotationParams::new(7.0, 1.0, -3.0).is_ok());
    }

    #[test]
    fn half_int_display() {
        assert_eq!(hi(3).to_string(), "3/2");
        assert_eq!(hi(-4).to_string(), "-2");
    }
}
