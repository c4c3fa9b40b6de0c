use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qlm_core::hilbert::{
    dicke_isometry, eigenvalues, partial_trace, positive_part_projector, trace_norm, BlochVector,
    HermitianOperator, SpaceLayout,
};
use qlm_core::machines::optimal::recoupling_overlap;
use qlm_core::su2::{clebsch_gordan, rotation_operator, wigner_6j, HalfInt, RotationParams};

fn hi(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    clebsch_gordan(j1, m1, j2, m2, j, m).unwrap()
}

/// `⟨(j1 j2) j12, j3; J M | j1, (j2 j3) j23; J M⟩` by explicit CG sums.
fn recoupling_by_basis_change(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j12: HalfInt,
    j23: HalfInt,
    total: HalfInt,
) -> f64 {
    let m = total;
    let mut sum = 0.0;
    for m1 in j1.magnetic_numbers() {
        for m2 in j2.magnetic_numbers() {
            let m3 = m - m1 - m2;
            if m3.twice_value().abs() > j3.twice_value() {
                continue;
            }
            let m12 = m1 + m2;
            let m23 = m2 + m3;
            if m12.twice_value().abs() > j12.twice_value()
                || m23.twice_value().abs() > j23.twice_value()
            {
                continue;
            }
            sum += cg(j1, m1, j2, m2, j12, m12)
                * cg(j12, m12, j3, m3, total, m)
                * cg(j2, m2, j3, m3, j23, m23)
                * cg(j1, m1, j23, m23, total, m);
        }
    }
    sum
}

fn phase(exp_twice: i32) -> f64 {
    if (exp_twice / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// 6j symbol from the explicit recoupling overlap.
fn six_j_oracle(
    j1: HalfInt,
    j2: HalfInt,
    j12: HalfInt,
    j3: HalfInt,
    total: HalfInt,
    j23: HalfInt,
) -> f64 {
    let overlap = recoupling_by_basis_change(j1, j2, j3, j12, j23, total);
    let norm = (((j12.twice_value() + 1) * (j23.twice_value() + 1)) as f64).sqrt();
    phase((j1 + j2 + j3 + total).twice_value()) * overlap / norm
}

#[test]
fn cg_orthogonality() {
    for t1 in 0i32..=6 {
        for t2 in 0i32..=6 {
            let (j1, j2) = (hi(t1), hi(t2));
            let totals: Vec<HalfInt> = ((t1 - t2).abs()..=t1 + t2).step_by(2).map(hi).collect();
            let mut max_err = 0.0f64;
            for &ja in &totals {
                for &jb in &totals {
                    for ma in ja.magnetic_numbers() {
                        for mb in jb.magnetic_numbers() {
                            let mut s = 0.0;
                            for m1 in j1.magnetic_numbers() {
                                for m2 in j2.magnetic_numbers() {
                                    s += cg(j1, m1, j2, m2, ja, ma) * cg(j1, m1, j2, m2, jb, mb);
                                }
                            }
                            let expected = if ja == jb && ma == mb { 1.0 } else { 0.0 };
                            max_err = max_err.max((s - expected).abs());
                        }
                    }
                }
            }
            assert!(max_err < 1e-12, "j1 = {j1}, j2 = {j2}: {max_err}");
        }
    }
}

#[test]
fn cg_closed_form_for_adding_a_qubit() {
    // ⟨j ± ½, ½ | j, 0; ½, ½⟩ = ±√((j + ½ ± ½)/(2j + 1))
    let half = HalfInt::HALF;
    for j in 0..=20 {
        let jj = HalfInt::integer(j);
        let jf = f64::from(j);
        let plus = cg(jj, HalfInt::ZERO, half, half, jj + half, half);
        assert_abs_diff_eq!(
            plus,
            ((jf + 1.0) / (2.0 * jf + 1.0)).sqrt(),
            epsilon = 1e-14
        );
        if j > 0 {
            let minus = cg(jj, HalfInt::ZERO, half, half, jj - half, half);
            assert_abs_diff_eq!(minus, -(jf / (2.0 * jf + 1.0)).sqrt(), epsilon = 1e-14);
        }
    }
    // j = 1: √(2/3)
    let v = cg(hi(2), hi(0), half, half, hi(3), half);
    assert_abs_diff_eq!(v, (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
}

#[test]
fn six_j_all_halves_and_ones_matches_recoupling_sum() {
    let h = HalfInt::HALF;
    let one = hi(2);
    let direct = wigner_6j(h, h, one, h, h, one).unwrap();
    let oracle = six_j_oracle(h, h, one, h, h, one);
    assert_abs_diff_eq!(direct, oracle, epsilon = 1e-13);
    assert_abs_diff_eq!(direct, 1.0 / 6.0, epsilon = 1e-14);
}

#[test]
fn six_j_matches_recoupling_sum_exhaustively() {
    let mut checked = 0;
    for t1 in 0i32..=4 {
        for t2 in 0i32..=4 {
            for t3 in 0i32..=4 {
                for t12 in ((t1 - t2).abs()..=t1 + t2).step_by(2) {
                    for t23 in ((t2 - t3).abs()..=t2 + t3).step_by(2) {
                        let lo = (t12 - t3).abs().max((t1 - t23).abs());
                        let hi_t = (t12 + t3).min(t1 + t23);
                        for tj in (lo..=hi_t).step_by(2) {
                            if (tj + t12 + t3) % 2 != 0 {
                                continue;
                            }
                            let (j1, j2, j3, j12, j23, j) =
                                (hi(t1), hi(t2), hi(t3), hi(t12), hi(t23), hi(tj));
                            let direct = wigner_6j(j1, j2, j12, j3, j, j23).unwrap();
                            let oracle = six_j_oracle(j1, j2, j12, j3, j, j23);
                            assert!((direct - oracle).abs() < 1e-12, "{direct} vs {oracle}");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn seed_recoupling_overlaps_match_closed_form() {
    // |⟨(A,(CB)) J | ((AC) j, B) J⟩| = √((n + 3/2 ± (j + 1/2)) / (2 d_n)) for J = j ± 1/2.
    let half = HalfInt::HALF;
    for n in 1..=3usize {
        let d = (n + 1) as f64;
        let ja = HalfInt::half_of(n);
        let jcb = HalfInt::half_of(n + 1);
        for j in 0..=n as i32 {
            let jj = HalfInt::integer(j);
            for (sign, total) in [(1.0, jj + half), (-1.0, jj - half)] {
                if total.twice_value() < 0 {
                    continue;
                }
                let via_6j = recoupling_overlap(n, jj, total).unwrap();
                let explicit = recoupling_by_basis_change(ja, ja, half, jj, jcb, total);
                assert_abs_diff_eq!(via_6j, explicit, epsilon = 1e-12);
                let closed = ((n as f64 + 1.5 + sign * (f64::from(j) + 0.5)) / (2.0 * d)).sqrt();
                assert_abs_diff_eq!(via_6j.abs(), closed, epsilon = 1e-12);
            }
        }
    }
}

fn su2_from_pauli(p: &RotationParams) -> DMatrix<Complex64> {
    // e^{-iασz/2} e^{-iβσy/2} e^{-iγσz/2}
    let rz = |a: f64| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, -a / 2.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::from_polar(1.0, a / 2.0),
            ],
        )
    };
    let (s, c) = (p.beta / 2.0).sin_cos();
    let ry = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    );
    rz(p.alpha) * ry * rz(p.gamma)
}

fn euler_from_su2(u: &DMatrix<Complex64>) -> RotationParams {
    let beta = 2.0 * u[(1, 0)].norm().atan2(u[(0, 0)].norm());
    let sum = -2.0 * u[(0, 0)].arg();
    let diff = 2.0 * u[(1, 0)].arg();
    RotationParams {
        alpha: (sum + diff) / 2.0,
        beta,
        gamma: (sum - diff) / 2.0,
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn rotation_strategy() -> impl Strategy<Value = RotationParams> {
    (-3.0f64..3.0, 0.05f64..3.09, -3.0f64..3.0).prop_map(|(alpha, beta, gamma)| RotationParams {
        alpha,
        beta,
        gamma,
    })
}

#[test]
fn identity_rotation_is_identity() {
    for t in 0..7 {
        let d = rotation_operator(hi(t), &RotationParams::IDENTITY).unwrap();
        let id = DMatrix::<Complex64>::identity(t as usize + 1, t as usize + 1);
        assert!(max_abs(&(d - id)) < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn six_j_column_permutation_symmetry(t in proptest::collection::vec(0i32..=6, 6)) {
        let j: Vec<HalfInt> = t.iter().map(|&x| hi(x)).collect();
        let base = wigner_6j(j[0], j[1], j[2], j[3], j[4], j[5]).unwrap();
        let perms = [
            [1, 0, 2, 4, 3, 5],
            [0, 2, 1, 3, 5, 4],
            [2, 1, 0, 5, 4, 3],
            [1, 2, 0, 4, 5, 3],
            // upper/lower swap in two columns
            [3, 4, 2, 0, 1, 5],
            [0, 4, 5, 3, 1, 2],
        ];
        for p in perms {
            let v = wigner_6j(j[p[0]], j[p[1]], j[p[2]], j[p[3]], j[p[4]], j[p[5]]).unwrap();
            prop_assert!((v - base).abs() < 1e-12);
        }
    }

    #[test]
    fn rotations_are_unitary(g in rotation_strategy(), t in 0i32..=8) {
        let d = rotation_operator(hi(t), &g).unwrap();
        let id = DMatrix::<Complex64>::identity(t as usize + 1, t as usize + 1);
        prop_assert!(max_abs(&(&d * d.adjoint() - id)) < 1e-12);
    }

    #[test]
    fn spin_half_matches_pauli_construction(g in rotation_strategy()) {
        let d = rotation_operator(HalfInt::HALF, &g).unwrap();
        prop_assert!(max_abs(&(d - su2_from_pauli(&g))) < 1e-13);
    }

    #[test]
    fn rotations_compose(g1 in rotation_strategy(), g2 in rotation_strategy(), t in 1i32..=6) {
        let product = su2_from_pauli(&g1) * su2_from_pauli(&g2);
        let g12 = euler_from_su2(&product);
        prop_assume!(g12.beta > 1e-3 && g12.beta < std::f64::consts::PI - 1e-3);
        let lhs = rotation_operator(hi(t), &g1).unwrap() * rotation_operator(hi(t), &g2).unwrap();
        let rhs = rotation_operator(hi(t), &g12).unwrap();
        let plus = max_abs(&(&lhs - &rhs));
        let minus = max_abs(&(&lhs + &rhs));
        prop_assert!(plus.min(minus) < 1e-10);
        if t % 2 == 0 {
            prop_assert!(plus < 1e-10);
        }
    }

    #[test]
    fn dicke_intertwines_rotations(g in rotation_strategy(), n in 1usize..=5) {
        let v = dicke_isometry(n).unwrap().map(|x| Complex64::new(x, 0.0));
        let u = su2_from_pauli(&g);
        let mut power = DMatrix::<Complex64>::identity(1, 1);
        for _ in 0..n {
            power = power.kronecker(&u);
        }
        let d = rotation_operator(HalfInt::half_of(n), &g).unwrap();
        prop_assert!(max_abs(&(&v * d - power * &v)) < 1e-10);
    }

    #[test]
    fn trace_norm_equals_singular_value_sum(entries in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let a = DMatrix::from_fn(4, 4, |i, j| Complex64::new(entries[i * 4 + j], entries[16 + j * 4 + i]));
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let op = HermitianOperator::new(h.clone(), SpaceLayout::single('A', 4)).unwrap();
        let svd_sum: f64 = h.singular_values().iter().sum();
        prop_assert!((trace_norm(&op).unwrap() - svd_sum).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_linear_and_positive(
        x in proptest::collection::vec(-1.0f64..1.0, 72),
        y in proptest::collection::vec(-1.0f64..1.0, 72),
        a in -2.0f64..2.0,
    ) {
        let layout = SpaceLayout::new([('A', 2), ('B', 3)]).unwrap();
        let positive = |e: &[f64]| {
            let m = DMatrix::from_fn(6, 6, |i, j| Complex64::new(e[i * 6 + j], e[36 + i * 6 + j]));
            HermitianOperator::new(&m * m.adjoint(), layout.clone()).unwrap()
        };
        let (px, py) = (positive(&x), positive(&y));
        for keep in [['A'], ['B']] {
            let tx = partial_trace(&px, &keep).unwrap();
            let ty = partial_trace(&py, &keep).unwrap();
            prop_assert!((tx.trace() - px.trace()).norm() < 1e-12);
            prop_assert!(eigenvalues(&tx).unwrap()[0] > -1e-12);
            let combo = &px.scale(a) + &py;
            let tc = partial_trace(&combo, &keep).unwrap();
            prop_assert!(tc.max_abs_diff(&(&tx.scale(a) + &ty)) < 1e-12);
        }
    }

    #[test]
    fn helstrom_value_from_projector(
        u in proptest::collection::vec(-1.0f64..1.0, 6),
    ) {
        let clip = |v: [f64; 3]| {
            let b = BlochVector::from_array(v);
            if b.norm() > 1.0 { b * (1.0 / b.norm()) } else { b }
        };
        let r0 = clip([u[0], u[1], u[2]]);
        let r1 = clip([u[3], u[4], u[5]]);
        let layout = SpaceLayout::single('B', 2);
        let diff = HermitianOperator::new(r0.density_matrix() - r1.density_matrix(), layout).unwrap();
        let p = positive_part_projector(&diff).unwrap();
        let value = diff.trace_product(&p).unwrap().re;
        prop_assert!((value - r0.distance(r1) / 2.0).abs() < 1e-10);
    }
}
