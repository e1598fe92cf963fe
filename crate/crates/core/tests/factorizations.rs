use splab::experiments::random::{gen_random_case, RandomCaseParams};
use splab::experiments::SplabRng;
use splab::linalg::{eig, inverse, qr_decompose, solve, spectral_norm, svd};
use splab::{Complex64, Matrix, Tolerances};

fn random_matrix(g: &mut SplabRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| Complex64::new(g.normal(), g.normal()))
}

#[test]
fn factorizations_reconstruct_on_random_instances() {
    let tol = Tolerances::default();
    for seed in 0..200u64 {
        let mut g = SplabRng::new(seed);
        let n = g.range(1, 12);
        let m = g.range(1, n);
        let a = random_matrix(&mut g, n, n);
        let scale = spectral_norm(&a).unwrap();

        let f = svd(&a).unwrap();
        let us = Matrix::from_fn(n, n, |i, j| f.u[(i, j)] * f.s[j]);
        assert!((&us.matmul(&f.v.adjoint()) - &a).max_abs() <= 1e-12 * scale, "svd seed {seed}");
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));

        let tall = random_matrix(&mut g, n, m);
        let qr = qr_decompose(&tall, &tol).unwrap();
        assert!((&qr.q.matmul(&qr.r) - &tall).max_abs() <= 1e-12 * spectral_norm(&tall).unwrap());
        assert!(qr.q.adjoint().matmul(&qr.q).dist_to_identity() <= 1e-12);
        for k in 0..m {
            assert_eq!(qr.r[(k, k)].im, 0.0);
            assert!(qr.r[(k, k)].re >= 0.0);
        }

        let b = random_matrix(&mut g, n, 2);
        let x = solve(&a, &b, &tol).unwrap();
        let inv = inverse(&a, &tol).unwrap();
        let k = scale * spectral_norm(&inv).unwrap();
        assert!((&a.matmul(&x) - &b).max_abs() <= 1e-12 * k * spectral_norm(&b).unwrap(), "lu seed {seed}");
    }
}

#[test]
fn eig_reassembles_and_left_vectors_are_left() {
    let tol = Tolerances::default();
    for seed in 0..100u64 {
        let case = gen_random_case(seed, &RandomCaseParams::default(), &tol).unwrap();
        let a = &case.a;
        let norm = spectral_norm(a).unwrap();
        let ed = eig(a, &tol).unwrap();
        assert!((&ed.reassemble() - a).max_abs() <= 1e-9 * norm * ed.kappa_x, "seed {seed}");
        assert!(ed.v.adjoint().matmul(&ed.x).dist_to_identity() <= 1e-9 * ed.kappa_x);
        let conj: Vec<Complex64> = ed.lambda.iter().map(|z| z.conj()).collect();
        let lhs = a.adjoint().matmul(&ed.v);
        let rhs = ed.v.matmul(&Matrix::from_diag(&conj));
        let vscale = spectral_norm(&ed.v).unwrap();
        assert!((&lhs - &rhs).max_abs() <= tol.tol_eig * norm * vscale, "seed {seed}");
    }
}

#[test]
fn eig_is_deterministic_and_ordered() {
    let tol = Tolerances::default();
    let mut g = SplabRng::new(9);
    let a = random_matrix(&mut g, 7, 7);
    let e1 = eig(&a, &tol).unwrap();
    let e2 = eig(&a, &tol).unwrap();
    assert_eq!(e1.x, e2.x);
    assert_eq!(e1.lambda, e2.lambda);
    assert!(e1.lambda.windows(2).all(|w| w[0].norm() >= w[1].norm() - 1e-12));
    for j in 0..7 {
        let col = e1.x.column(j);
        let big = col.iter().copied().fold(Complex64::new(0.0, 0.0), |m, z| if z.norm() > m.norm() { z } else { m });
        assert!(big.im == 0.0 && big.re > 0.0);
    }
}

#[test]
fn single_precision_pipeline_runs() {
    let tol = Tolerances::for_scalar::<f32>();
    let a = splab::CMatrix::<f32>::from_real_rows(&[&[1.0, 1.0, 0.0], &[1e-2, 1.0, 0.0], &[0.0, 0.0, 0.5]]);
    let ed = eig(&a, &tol).unwrap();
    assert!((ed.lambda[0].re - 1.1).abs() < 1e-5);
    assert!((ed.lambda[2].re - 0.5).abs() < 1e-5);
}
