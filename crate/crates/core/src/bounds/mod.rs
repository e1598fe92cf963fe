//! The classical disk-gap bound, the condition-number-free bound, separation
//! diagnostics, and the full report tying them together.

mod report;

pub use report::{fmt_real, BoundReport};

use crate::config::Tolerances;
use crate::error::{Context, Error, Result};
use crate::linalg::svd::{cond2, singular_values, spectral_norm};
use crate::linalg::{eig, kron, CMatrix, EigenDecomposition};
use crate::partition::{
    check_gap, gap_report, match_partition_unchecked, partition, MatchStrategy, MatchedPartition, SpectralPartition,
    SpectralSelector,
};
use crate::scalar::{Real, C};
use crate::subspace::{sin_theta_norm, tan_theta_norm};

/// Both product forms of the new bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewBound<T> {
    /// `κ2(V2)‖ΔA‖_F/a · Π_j (1 + a / min_k |λ̃_j − λ_k|)`.
    pub perj: T,
    /// `κ2(V2)‖ΔA‖_F/a · (1 + a/δλ)^r`.
    pub dl: T,
    /// `a = ‖A‖ + ‖ΔA‖ + ρ(Λ2)`.
    pub a: T,
}

/// Evaluate the new bound given the two norms and the matched spectra.
pub fn new_bound_from_parts<T: Real>(
    a_spec: T,
    da_spec: T,
    da_frob: T,
    kappa_v2: T,
    lambda1_tilde: &[C<T>],
    lambda2: &[C<T>],
) -> NewBound<T> {
    let rho2 = lambda2.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let a = a_spec + da_spec + rho2;
    let lead = kappa_v2 * da_frob / a;
    let mut prod = T::one();
    let mut dl = T::infinity();
    for lt in lambda1_tilde {
        let d = lambda2.iter().fold(T::infinity(), |m, l| m.min((*lt - *l).norm()));
        dl = dl.min(d);
        prod *= T::one() + a / d;
    }
    let r = lambda1_tilde.len() as i32;
    let dlform = (T::one() + a / dl).powi(r);
    if da_frob == T::zero() {
        return NewBound { perj: T::zero(), dl: T::zero(), a };
    }
    NewBound { perj: lead * prod, dl: lead * dlform, a }
}

/// The new bound for `A`, `ΔA` and a base/perturbed partition pair.
pub fn new_bound<T: Real>(
    a: &CMatrix<T>,
    da: &CMatrix<T>,
    part: &SpectralPartition<T>,
    part_tilde: &SpectralPartition<T>,
    tol: &Tolerances,
) -> Result<NewBound<T>> {
    if part.r != part_tilde.r {
        return Err(Error::ShapeMismatch(format!("r = {} vs {}", part.r, part_tilde.r)));
    }
    check_gap(&part_tilde.lambda1, &part.lambda2, tol)?;
    Ok(new_bound_from_parts(
        spectral_norm(a)?,
        spectral_norm(da)?,
        da.norm_fro(),
        cond2(&part.v2)?,
        &part_tilde.lambda1,
        &part.lambda2,
    ))
}

/// Classical bound `N/(δ0 − N)` with `N = 2κ2(X1)κ2(V2)‖ΔA‖`; infinite and
/// invalid when the positive part of the denominator vanishes.
pub fn classical_from_kappas<T: Real>(kappa_x1: T, kappa_v2: T, da_spec: T, delta0: T) -> (T, bool) {
    let num = T::lit(2.0) * kappa_x1 * kappa_v2 * da_spec;
    if delta0 > num {
        (num / (delta0 - num), true)
    } else {
        (T::infinity(), false)
    }
}

pub fn classical_bound<T: Real>(part: &SpectralPartition<T>, da_spec: T, delta0: T) -> Result<(T, bool)> {
    Ok(classical_from_kappas(cond2(&part.x1)?, cond2(&part.v2)?, da_spec, delta0))
}

/// `σ_min` of the Sylvester operator `T ↦ T L1 − L2 T` in Frobenius geometry.
pub fn sep_frobenius<T: Real>(l1: &CMatrix<T>, l2: &CMatrix<T>, tol: &Tolerances) -> Result<T> {
    if !l1.is_square() || !l2.is_square() {
        return Err(Error::ShapeMismatch("sep needs square blocks".into()));
    }
    let size = l1.rows() * l2.rows();
    if size > tol.size_cap {
        return Err(Error::SizeCap { size, cap: tol.size_cap });
    }
    let op = &kron(&l1.transpose(), &CMatrix::identity(l2.rows()))? - &kron(&CMatrix::identity(l1.rows()), l2)?;
    Ok(singular_values(&op)?.last().copied().unwrap_or_else(T::zero))
}

/// `δ0 / (κ2(R_X1) κ2(R_V2))`, a lower bound on the spectral-norm sep.
pub fn sep_lower_bound<T: Real>(delta0: T, kappa_rx1: T, kappa_rv2: T) -> T {
    delta0 / (kappa_rx1 * kappa_rv2)
}

/// `‖ΔA‖(‖A‖ + ‖ΔA‖) < ¼ · max(sep − 2‖ΔA‖, 0)²`.
pub fn stewart_condition<T: Real>(da_spec: T, a_spec: T, sep: T) -> bool {
    let slack = (sep - T::lit(2.0) * da_spec).max(T::zero());
    da_spec * (a_spec + da_spec) < T::lit(0.25) * slack * slack
}

/// Every intermediate of one base/perturbed run.
#[derive(Debug, Clone)]
pub struct Pipeline<T> {
    pub a: CMatrix<T>,
    pub da: CMatrix<T>,
    pub ed: EigenDecomposition<T>,
    pub ed_tilde: EigenDecomposition<T>,
    pub part: SpectralPartition<T>,
    pub matched: MatchedPartition<T>,
}

impl<T: Real> Pipeline<T> {
    pub fn part_tilde(&self) -> &SpectralPartition<T> {
        &self.matched.part
    }
}

/// Decompose `A` and `A + ΔA` (concurrently), split and match.
pub fn run_pipeline<T: Real>(
    a: &CMatrix<T>,
    da: &CMatrix<T>,
    sel: &SpectralSelector,
    strategy: &MatchStrategy,
    tol: &Tolerances,
) -> Result<Pipeline<T>> {
    if !a.is_square() || a.shape() != da.shape() {
        return Err(Error::ShapeMismatch(format!("A is {}x{}, ΔA is {}x{}", a.rows(), a.cols(), da.rows(), da.cols())));
    }
    let at = a + da;
    let (ed, ed_tilde) = rayon::join(|| eig(a, tol), || eig(&at, tol));
    let ed = ed.stage("eig(A)")?;
    let ed_tilde = ed_tilde.stage("eig(A+dA)")?;
    let part = partition(&ed, sel, tol).stage("partition")?;
    let matched = match_partition_unchecked(&ed_tilde, &part, strategy, tol).stage("match")?;
    Ok(Pipeline { a: a.clone(), da: da.clone(), ed, ed_tilde, part, matched })
}

/// Full report with the perturbed split found by reapplying the selector.
pub fn full_report<T: Real>(
    a: &CMatrix<T>,
    da: &CMatrix<T>,
    sel: &SpectralSelector,
    tol: &Tolerances,
) -> Result<BoundReport> {
    full_report_with(a, da, sel, &MatchStrategy::SameSelector(sel.clone()), tol)
}

pub fn full_report_with<T: Real>(
    a: &CMatrix<T>,
    da: &CMatrix<T>,
    sel: &SpectralSelector,
    strategy: &MatchStrategy,
    tol: &Tolerances,
) -> Result<BoundReport> {
    let p = run_pipeline(a, da, sel, strategy, tol)?;
    report_from_pipeline(&p, sel, tol)
}

fn to64<T: Real>(z: &[C<T>]) -> Vec<C<f64>> {
    z.iter().map(|w| C::new(w.re.as_f64(), w.im.as_f64())).collect()
}

pub fn report_from_pipeline<T: Real>(p: &Pipeline<T>, sel: &SpectralSelector, tol: &Tolerances) -> Result<BoundReport> {
    let part = &p.part;
    let pt = p.part_tilde();
    let a_spec = spectral_norm(&p.a).stage("norms")?;
    let da_spec = spectral_norm(&p.da).stage("norms")?;
    let da_frob = p.da.norm_fro();
    let kappa_x1 = cond2(&part.x1).stage("kappa")?;
    let kappa_v2 = cond2(&part.v2).stage("kappa")?;
    let gap = gap_report(&part.lambda1, &part.lambda2, &pt.lambda1);
    let gap_violated = check_gap(&pt.lambda1, &part.lambda2, tol).is_err();

    let nb = new_bound_from_parts(a_spec, da_spec, da_frob, kappa_v2, &pt.lambda1, &part.lambda2);
    let (classical, classical_valid) = classical_from_kappas(kappa_x1, kappa_v2, da_spec, T::lit(gap.delta0));

    let qx1 = &part.qr_x1.q;
    let qv2 = &part.qr_v2.q;
    let l1 = qx1.adjoint().matmul(&p.a).matmul(qx1);
    let l2 = qv2.adjoint().matmul(&p.a).matmul(qv2);
    let sep_frob = match sep_frobenius(&l1, &l2, tol) {
        Ok(s) => Some(s.as_f64()),
        Err(Error::SizeCap { .. }) => None,
        Err(e) => return Err(e.at("sep")),
    };
    let sep_lower = sep_lower_bound(gap.delta0, kappa_x1.as_f64(), kappa_v2.as_f64());
    let stewart_ok = stewart_condition(da_spec.as_f64(), a_spec.as_f64(), sep_lower);

    let measured_sin = sin_theta_norm(qx1, &pt.qr_x1.q, tol).stage("measure")?;
    let measured_tan = tan_theta_norm(qx1, &pt.qr_x1.q, tol).stage("measure")?;
    let smin_x = singular_values(&p.ed.x)?.last().copied().unwrap_or_else(T::zero);
    let smin_x1 = singular_values(&part.x1)?.last().copied().unwrap_or_else(T::zero);
    let varah_unscaled = da_spec / (smin_x * smin_x1);

    let new_perj = if gap_violated { f64::INFINITY } else { nb.perj.as_f64() };
    let new_dl = if gap_violated { f64::INFINITY } else { nb.dl.as_f64() };
    Ok(BoundReport {
        n: part.n,
        r: part.r,
        selector: sel.to_string(),
        lambda1: to64(&part.lambda1),
        lambda2: to64(&part.lambda2),
        lambda1_tilde: to64(&pt.lambda1),
        assignment: p.matched.assignment.clone(),
        gap,
        a: nb.a.as_f64(),
        a_spec: a_spec.as_f64(),
        kappa_x: part.kappa_x.as_f64(),
        kappa_x1: kappa_x1.as_f64(),
        kappa_v2: kappa_v2.as_f64(),
        da_spec: da_spec.as_f64(),
        da_frob: da_frob.as_f64(),
        classical_value: classical.as_f64(),
        classical_valid,
        new_value_perj: new_perj,
        new_value_dl: new_dl,
        sep_frob,
        sep_lower,
        stewart_condition_ok: stewart_ok,
        measured_sin: measured_sin.as_f64(),
        measured_tan: measured_tan.as_f64(),
        varah_unscaled: varah_unscaled.as_f64(),
        gap_violated,
        dominance_ok: gap_violated || measured_sin.as_f64() <= new_perj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn example11(eps: f64) -> CMatrix<f64> {
        CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[eps, 1.0, 0.0], &[0.0, 0.0, 0.5]])
    }

    #[test]
    fn zero_perturbation_bounds_vanish() {
        let nb = new_bound_from_parts(1.0, 0.0, 0.0, 3.0, &[c(1.0, 0.0)], &[c(0.5, 0.0)]);
        assert_eq!((nb.perj, nb.dl), (0.0, 0.0));
        let t = Tolerances::default();
        let a = example11(1e-4);
        let r = full_report(&a, &CMatrix::zeros(3, 3), &SpectralSelector::TopKMagnitude(2), &t).unwrap();
        assert_eq!(r.measured_sin, 0.0);
        assert_eq!(r.new_value_perj, 0.0);
        assert_eq!(r.classical_value, 0.0);
        assert!(r.classical_valid);
    }

    #[test]
    fn classical_table_entries() {
        // ε = 1e-2: κ2(X1) = 10, κ2(V2) = 1, δ0 = 0.4
        let (v, ok) = classical_from_kappas(10.0f64, 1.0, 1e-6, 0.4);
        assert!(ok && (v / 5.0e-5 - 1.0).abs() < 1e-3);
        let (v, ok) = classical_from_kappas(1e5f64, 1.0, 1e-6, 0.5 - 1e-5);
        assert!(ok && (v / 0.67 - 1.0).abs() < 0.02);
        let (v, ok) = classical_from_kappas(1e7f64, 1.0, 1e-6, 0.5);
        assert!(!ok && v.is_infinite());
    }

    #[test]
    fn unit_condition_numbers_reduce_to_davis_kahan() {
        for (d, d0) in [(1e-3, 0.4), (1e-6, 0.25), (0.1, 0.3)] {
            let (v, ok) = classical_from_kappas(1.0, 1.0, d, d0);
            assert!(ok);
            assert_eq!(v, 2.0 * d / (d0 - 2.0 * d));
        }
    }

    #[test]
    fn sep_of_diagonals_is_pairwise_gap() {
        let t = Tolerances::default();
        let l1 = CMatrix::<f64>::from_diag(&[c(1.1, 0.0), c(0.9, 0.0)]);
        let l2 = CMatrix::from_diag(&[c(0.5, 0.0)]);
        assert!((sep_frobenius(&l1, &l2, &t).unwrap() - 0.4).abs() < 1e-15);
        let s = CMatrix::from_diag(&[c(2.0, 0.0)]);
        assert_eq!(sep_frobenius(&s, &s, &t).unwrap(), 0.0);
        let small = Tolerances { size_cap: 1, ..t };
        assert!(matches!(sep_frobenius(&l1, &l2, &small), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn sep_lower_and_stewart() {
        assert_eq!(sep_lower_bound(0.49, 100.0, 1.0), 0.0049);
        assert_eq!(sep_lower_bound(0.0, 3.0, 2.0), 0.0);
        assert!(stewart_condition(0.0, 1.0, 0.1));
        assert!(!stewart_condition(1e-9, 1.0, 0.0));
        assert!(stewart_condition(1e-6, 2.0, 0.04));
    }

    #[test]
    fn per_eigenvalue_form_is_tighter() {
        let nb = new_bound_from_parts(2.0, 1e-3, 2e-3, 4.0, &[c(1.0, 0.0), c(3.0, 0.0)], &[c(0.0, 0.0)]);
        assert!(nb.perj <= nb.dl);
        assert_eq!(nb.a, 2.0 + 1e-3);
    }

    #[test]
    fn example_tightness_report() {
        let (d, e) = (0.1, 1e-4);
        let t = Tolerances::default();
        let a = CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[1.0, 1.0 - d, 0.0], &[0.0, 0.0, 1.0 - 2.0 * d]]);
        let mut da = CMatrix::zeros(3, 3);
        da[(2, 1)] = c(e, 0.0);
        let r = full_report(&a, &da, &SpectralSelector::TopKMagnitude(2), &t).unwrap();
        let expect = e / (2.0 * d * d);
        assert!(r.measured_sin > expect / 2.0 && r.measured_sin < expect * 2.0, "{}", r.measured_sin);
        assert!(r.measured_sin <= r.new_value_perj && r.new_value_perj <= r.new_value_dl);
    }
}
