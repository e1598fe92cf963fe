//! Worked examples as explicit matrices with their analytic facts.

use crate::error::{Error, Result};
use crate::linalg::svd::spectral_norm;
use crate::partition::SpectralSelector;
use crate::scalar::{c, C};
use crate::Matrix;

use super::rng::SplabRng;

/// Example families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleSpec {
    /// `A = [[B, 0], [0, 1/2]]` with the near-Jordan block `B = [[1, 1], [ε, 1]]`.
    Example11 { eps: f64 },
    /// Lower-bidiagonal 3×3 showing the `δ^2` dependence.
    TightR2 { delta: f64, eps: f64 },
    /// `(r+1)×(r+1)` lower-bidiagonal showing the `δ^r` dependence.
    TightGeneral { r: usize, delta: f64, eps: f64 },
    /// 3×3 whose complement eigenvectors are ill conditioned.
    V2Necessity3 { delta: f64, delta1: f64, eps: f64 },
    /// The 3×3 case padded with `(1 − 2δ1) I_{n−3}`.
    V2NecessityN { n: usize, delta: f64, delta1: f64, eps: f64 },
}

/// Closed-form facts accompanying a generated example.
#[derive(Debug, Clone, Default)]
pub struct ExampleFacts {
    pub lambda1: Vec<C<f64>>,
    pub lambda2: Vec<C<f64>>,
    /// Closed-form `X1` with unit columns.
    pub x1: Option<Matrix>,
    pub kappa_x1: Option<f64>,
    /// Vectors spanning the perturbed studied subspace (to leading order).
    pub perturbed_span: Vec<Vec<C<f64>>>,
    /// Vector in the perturbed subspace far from the unperturbed one.
    pub witness: Option<Vec<C<f64>>>,
    /// Analytic leading term of `‖sinΘ‖` under the canonical perturbation.
    pub leading_sin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GeneratedExample {
    pub a: Matrix,
    /// The family's own perturbation, where the example prescribes one.
    pub perturbation: Option<Matrix>,
    pub selector: SpectralSelector,
    pub facts: ExampleFacts,
}

fn guard(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::SpecViolation(what.to_string()))
    }
}

fn factorial(r: usize) -> f64 {
    (1..=r).map(|k| k as f64).product()
}

fn real(x: f64) -> C<f64> {
    c(x, 0.0)
}

impl ExampleSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ExampleSpec::Example11 { eps } => guard(eps > 0.0 && eps < 1.0, "Example11 needs 0 < eps < 1"),
            ExampleSpec::TightR2 { delta, eps } => {
                guard(delta > 0.0 && delta < 0.5, "TightR2 needs 0 < delta < 0.5")?;
                guard(eps > 0.0 && eps <= 0.01 * delta * delta, "TightR2 needs 0 < eps <= 0.01*delta^2")
            }
            ExampleSpec::TightGeneral { r, delta, eps } => {
                guard(r >= 1, "TightGeneral needs r >= 1")?;
                guard(delta > 0.0 && delta < 1.0, "TightGeneral needs 0 < delta < 1")?;
                guard(r as f64 * delta < 1.0, "TightGeneral needs r*delta < 1")?;
                guard(eps > 0.0 && eps <= 0.01 * delta.powi(r as i32), "TightGeneral needs 0 < eps <= 0.01*delta^r")
            }
            ExampleSpec::V2Necessity3 { delta, delta1, eps } | ExampleSpec::V2NecessityN { delta, delta1, eps, .. } => {
                guard(delta > 0.0 && delta <= 0.1, "V2Necessity needs 0 < delta <= 0.1")?;
                guard(delta1 > 0.0 && delta1 <= 0.1, "V2Necessity needs 0 < delta1 <= 0.1")?;
                guard(eps > 0.0 && eps <= 0.01 * delta * delta, "V2Necessity needs 0 < eps <= 0.01*delta^2")?;
                if let ExampleSpec::V2NecessityN { n, .. } = *self {
                    guard(n >= 4, "V2NecessityN needs n >= 4")?;
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleSpec::Example11 { .. } => "example11",
            ExampleSpec::TightR2 { .. } => "tight-r2",
            ExampleSpec::TightGeneral { .. } => "tight-general",
            ExampleSpec::V2Necessity3 { .. } => "v2-necessity",
            ExampleSpec::V2NecessityN { .. } => "v2-necessity-n",
        }
    }
}

/// The exact matrix of an example family plus its analytic facts.
pub fn gen_example(spec: &ExampleSpec) -> Result<GeneratedExample> {
    spec.validate()?;
    match *spec {
        ExampleSpec::Example11 { eps } => {
            let a = Matrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[eps, 1.0, 0.0], &[0.0, 0.0, 0.5]]);
            let s = eps.sqrt();
            let nrm = (1.0 + eps).sqrt();
            let x1 = Matrix::from_real_rows(&[&[1.0 / nrm, 1.0 / nrm], &[s / nrm, -s / nrm], &[0.0, 0.0]]);
            Ok(GeneratedExample {
                a,
                perturbation: None,
                selector: SpectralSelector::TopKMagnitude(2),
                facts: ExampleFacts {
                    lambda1: vec![real(1.0 + s), real(1.0 - s)],
                    lambda2: vec![real(0.5)],
                    x1: Some(x1),
                    kappa_x1: Some(1.0 / s),
                    ..Default::default()
                },
            })
        }
        ExampleSpec::TightR2 { delta, eps } => {
            let mut g = gen_example(&ExampleSpec::TightGeneral { r: 2, delta, eps })?;
            g.facts.perturbed_span = vec![
                vec![real(1.0), real(1.0 / delta), real(eps / (2.0 * delta * delta))],
                vec![real(0.0), real(1.0), real(eps / delta)],
            ];
            Ok(g)
        }
        ExampleSpec::TightGeneral { r, delta, eps } => {
            let n = r + 1;
            let a = Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    real(1.0 - i as f64 * delta)
                } else if i == j + 1 && j + 1 < r {
                    real(1.0)
                } else {
                    real(0.0)
                }
            });
            let mut da = Matrix::zeros(n, n);
            da[(r, r - 1)] = real(eps);
            let lead = eps / (factorial(r) * delta.powi(r as i32));
            let mut witness = vec![real(0.0); n];
            witness[0] = real(1.0);
            witness[r] = real(if r % 2 == 1 { lead } else { -lead });
            Ok(GeneratedExample {
                a,
                perturbation: Some(da),
                selector: SpectralSelector::TopKMagnitude(r),
                facts: ExampleFacts {
                    lambda1: (0..r).map(|k| real(1.0 - k as f64 * delta)).collect(),
                    lambda2: vec![real(1.0 - r as f64 * delta)],
                    witness: Some(witness),
                    leading_sin: Some(lead),
                    ..Default::default()
                },
            })
        }
        ExampleSpec::V2Necessity3 { delta, delta1, eps } => v2_example(3, delta, delta1, eps),
        ExampleSpec::V2NecessityN { n, delta, delta1, eps } => v2_example(n, delta, delta1, eps),
    }
}

fn v2_example(n: usize, delta: f64, delta1: f64, eps: f64) -> Result<GeneratedExample> {
    let a = Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => real(1.0 + delta),
        (1, 1) => real(1.0),
        (2, 1) => real(0.5),
        (2, 2) => real(1.0 - delta1),
        (i, j) if i == j => real(1.0 - 2.0 * delta1),
        _ => real(0.0),
    });
    let mut da = Matrix::zeros(n, n);
    da[(1, 0)] = real(eps);
    let mut lambda2 = vec![real(1.0), real(1.0 - delta1)];
    lambda2.extend((3..n).map(|_| real(1.0 - 2.0 * delta1)));
    let mut span = vec![real(0.0); n];
    span[0] = real(1.0);
    span[1] = real(eps / delta);
    span[2] = real(eps / (2.0 * delta * (delta + delta1)));
    Ok(GeneratedExample {
        a,
        perturbation: Some(da),
        selector: SpectralSelector::TopKMagnitude(1),
        facts: ExampleFacts {
            lambda1: vec![real(1.0 + delta)],
            lambda2,
            perturbed_span: vec![span],
            leading_sin: Some(eps / (2.0 * delta * (delta + delta1))),
            ..Default::default()
        },
    })
}

/// `eps1 · E_ij` with 1-based `(i, j)`.
pub fn gen_unit_perturbation(n: usize, i: usize, j: usize, eps1: f64) -> Result<Matrix> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    if !(eps1 > 0.0) || !eps1.is_finite() {
        return Err(Error::SpecViolation(format!("unit perturbation needs eps1 > 0, got {eps1}")));
    }
    let mut m = Matrix::zeros(n, n);
    m[(i - 1, j - 1)] = real(eps1);
    Ok(m)
}

/// Real i.i.d. standard normal `n×n` matrix (row-major draws) rescaled to the
/// given spectral norm.
pub fn gen_gaussian_perturbation(n: usize, target_spectral_norm: f64, seed: u64) -> Result<Matrix> {
    if n == 0 || !(target_spectral_norm > 0.0) || !target_spectral_norm.is_finite() {
        return Err(Error::SpecViolation(format!(
            "gaussian perturbation needs n >= 1 and norm > 0, got n = {n}, norm = {target_spectral_norm}"
        )));
    }
    let mut g = SplabRng::new(seed);
    let raw = Matrix::from_fn(n, n, |_, _| real(g.normal()));
    let s = spectral_norm(&raw)?;
    Ok(raw.scale_real(target_spectral_norm / s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::linalg::{eig, svd::cond2};

    #[test]
    fn example11_facts() {
        let t = Tolerances::default();
        for eps in [1e-2, 1e-4, 1e-6] {
            let g = gen_example(&ExampleSpec::Example11 { eps }).unwrap();
            let ed = eig(&g.a, &t).unwrap();
            for (got, want) in ed.lambda.iter().zip(g.facts.lambda1.iter().chain(&g.facts.lambda2)) {
                assert!((got - want).norm() < 1e-12);
            }
            let x1 = g.facts.x1.unwrap();
            let k = cond2(&x1).unwrap();
            assert!((k / g.facts.kappa_x1.unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn tight_r2_shape() {
        let g = gen_example(&ExampleSpec::TightR2 { delta: 0.1, eps: 1e-4 }).unwrap();
        let want = Matrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[1.0, 0.9, 0.0], &[0.0, 0.0, 0.8]]);
        assert!((&g.a - &want).max_abs() < 1e-15);
        let t = Tolerances::default();
        let ed = eig(&g.a, &t).unwrap();
        for (got, want) in ed.lambda.iter().zip([1.0, 0.9, 0.8]) {
            assert!((got - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn v2_example_shape() {
        let g = gen_example(&ExampleSpec::V2Necessity3 { delta: 0.05, delta1: 0.05, eps: 1e-5 }).unwrap();
        assert_eq!(g.a[(2, 1)], c(0.5, 0.0));
        let g8 = gen_example(&ExampleSpec::V2NecessityN { n: 8, delta: 0.05, delta1: 0.005, eps: 1e-6 }).unwrap();
        assert_eq!(g8.a.rows(), 8);
        assert_eq!(g8.a[(7, 7)], c(0.99, 0.0));
    }

    #[test]
    fn guards_name_the_violation() {
        let e = gen_example(&ExampleSpec::TightR2 { delta: 0.1, eps: 1e-3 }).unwrap_err();
        assert_eq!(e, Error::SpecViolation("TightR2 needs 0 < eps <= 0.01*delta^2".into()));
        assert!(gen_example(&ExampleSpec::Example11 { eps: 1.5 }).is_err());
        assert!(gen_example(&ExampleSpec::TightGeneral { r: 3, delta: 0.4, eps: 1e-6 }).is_err());
    }

    #[test]
    fn unit_perturbation() {
        let m = gen_unit_perturbation(3, 1, 1, 1e-6).unwrap();
        assert_eq!(m[(0, 0)], c(1e-6, 0.0));
        assert_eq!(spectral_norm(&m).unwrap(), 1e-6);
        assert_eq!(m.norm_fro(), 1e-6);
        assert!(matches!(gen_unit_perturbation(3, 4, 1, 1e-6), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn gaussian_perturbation() {
        let a = gen_gaussian_perturbation(5, 1e-6, 42).unwrap();
        assert!((spectral_norm(&a).unwrap() / 1e-6 - 1.0).abs() < 1e-14);
        assert_eq!(a, gen_gaussian_perturbation(5, 1e-6, 42).unwrap());
        let b = gen_gaussian_perturbation(5, 1e-6, 43).unwrap();
        assert_ne!(a, b);
        let ratio = b.norm_fro() / 1e-6;
        assert!((1.0..=5f64.sqrt()).contains(&ratio));
        assert!(a.as_slice().iter().all(|z| z.im == 0.0));
    }
}
