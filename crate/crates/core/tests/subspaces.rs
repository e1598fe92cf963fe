use proptest::prelude::*;
use splab::bounds::run_pipeline;
use splab::experiments::random::{gen_random_case, RandomCaseParams};
use splab::linalg::{qr_decompose, spectral_norm};
use splab::partition::MatchStrategy;
use splab::subspace::{principal_angles, sin_theta_norm, tan_theta_norm};
use splab::{Complex64, Matrix, Tolerances};

fn orthonormal(entries: &[(f64, f64)], n: usize, r: usize) -> Matrix {
    let z = Matrix::from_fn(n, r, |i, j| {
        let (a, b) = entries[i * r + j];
        Complex64::new(a, b)
    });
    qr_decompose(&z, &Tolerances::default()).unwrap().q
}

type Cells = Vec<(f64, f64)>;

fn pair() -> impl Strategy<Value = (usize, usize, Cells, Cells, Cells)> {
    (2usize..7).prop_flat_map(|n| {
        (1..n).prop_flat_map(move |r| {
            let cell = (-1.0f64..1.0, -1.0f64..1.0);
            (
                Just(n),
                Just(r),
                prop::collection::vec(cell.clone(), n * r),
                prop::collection::vec(cell.clone(), n * r),
                prop::collection::vec(cell, r * r),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sin_theta_is_symmetric_bounded_and_basis_free((n, r, e1, e2, w) in pair()) {
        let tol = Tolerances::default();
        let q1 = orthonormal(&e1, n, r);
        let q2 = orthonormal(&e2, n, r);
        let s12 = sin_theta_norm(&q1, &q2, &tol).unwrap();
        let s21 = sin_theta_norm(&q2, &q1, &tol).unwrap();
        prop_assert!((s12 - s21).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&s12));
        prop_assert!(tan_theta_norm(&q1, &q2, &tol).unwrap() >= s12);

        let unitary = orthonormal(&w, r, r);
        let rotated = q2.matmul(&unitary);
        let a = principal_angles(&q1, &q2, &tol).unwrap();
        let b = principal_angles(&q1, &rotated, &tol).unwrap();
        prop_assert!((a.sin_norm - b.sin_norm).abs() <= 1e-12);
        for (x, y) in a.sines.iter().zip(&b.sines) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn complement_of_left_vectors_measures_the_angle() {
    let tol = Tolerances::default();
    for seed in 0..100u64 {
        let case = gen_random_case(seed, &RandomCaseParams::default(), &tol).unwrap();
        let p = run_pipeline(&case.a, &case.da, &case.selector, &MatchStrategy::NearestAssignment, &tol).unwrap();
        let qx1 = &p.part.qr_x1.q;
        let qv2 = &p.part.qr_v2.q;
        let qxt = &p.part_tilde().qr_x1.q;
        let via_v2 = spectral_norm(&qv2.adjoint().matmul(qxt)).unwrap();
        let direct = sin_theta_norm(qx1, qxt, &tol).unwrap();
        assert!((via_v2 - direct).abs() <= 1e-9 * p.part.kappa_x.max(1.0), "seed {seed}: {via_v2} vs {direct}");
    }
}
