//! Splitting a spectrum into the studied set and its complement, matching a
//! perturbed spectrum to the same split, and the eigengaps between them.

pub mod assign;
pub mod gaps;
pub mod selector;

pub use gaps::{gap_delta0, gap_delta1, gap_delta_lambda, gap_report, GapReport};
pub use selector::SpectralSelector;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::qr::{qr_decompose, QrFactors};
use crate::linalg::{CMatrix, EigenDecomposition};
use crate::scalar::{Real, C};

/// Block form `A [X1, X2] = [X1, X2] diag(Λ1, Λ2)` with the QR factors of
/// `X1` and `V2`.
#[derive(Debug, Clone)]
pub struct SpectralPartition<T> {
    pub n: usize,
    pub r: usize,
    /// Positions in eig order: the first `r` form side 1, the rest side 2.
    pub perm: Vec<usize>,
    pub lambda1: Vec<C<T>>,
    pub lambda2: Vec<C<T>>,
    pub x1: CMatrix<T>,
    pub x2: CMatrix<T>,
    pub v1: CMatrix<T>,
    pub v2: CMatrix<T>,
    pub qr_x1: QrFactors<T>,
    pub qr_v2: QrFactors<T>,
    pub kappa_x: T,
}

impl<T: Real> SpectralPartition<T> {
    /// Build a partition whose side 1 is `side1` (positions in eig order, kept in
    /// the given order); side 2 is the rest in eig order.
    pub fn from_indices(ed: &EigenDecomposition<T>, side1: &[usize], tol: &Tolerances) -> Result<Self> {
        let n = ed.n();
        let r = side1.len();
        if r == 0 || r >= n {
            return Err(Error::EmptySide { captured: r, total: n });
        }
        let mut in1 = vec![false; n];
        for &k in side1 {
            if k >= n || in1[k] {
                return Err(Error::InvalidSelector(format!("bad side-1 position {k}")));
            }
            in1[k] = true;
        }
        let side2: Vec<usize> = (0..n).filter(|&k| !in1[k]).collect();
        let x1 = ed.x.select_columns(side1);
        let x2 = ed.x.select_columns(&side2);
        let v1 = ed.v.select_columns(side1);
        let v2 = ed.v.select_columns(&side2);
        let qr_x1 = qr_decompose(&x1, tol)?;
        let qr_v2 = qr_decompose(&v2, tol)?;
        let perm: Vec<usize> = side1.iter().copied().chain(side2.iter().copied()).collect();
        Ok(Self {
            n,
            r,
            lambda1: side1.iter().map(|&k| ed.lambda[k]).collect(),
            lambda2: side2.iter().map(|&k| ed.lambda[k]).collect(),
            perm,
            x1,
            x2,
            v1,
            v2,
            qr_x1,
            qr_v2,
            kappa_x: ed.kappa_x,
        })
    }

    /// `[X1, X2]`.
    pub fn x(&self) -> CMatrix<T> {
        self.x1.hstack(&self.x2)
    }

    /// `[V1, V2]`.
    pub fn v(&self) -> CMatrix<T> {
        self.v1.hstack(&self.v2)
    }

    /// Undo the split, recovering the eigendecomposition it came from.
    pub fn unpermute(&self) -> EigenDecomposition<T> {
        let (x, v) = (self.x(), self.v());
        let lam: Vec<C<T>> = self.lambda1.iter().chain(&self.lambda2).copied().collect();
        let mut xo = CMatrix::zeros(self.n, self.n);
        let mut vo = CMatrix::zeros(self.n, self.n);
        let mut lo = vec![C::new(T::zero(), T::zero()); self.n];
        for (slot, &k) in self.perm.iter().enumerate() {
            xo.set_column(k, &x.column(slot));
            vo.set_column(k, &v.column(slot));
            lo[k] = lam[slot];
        }
        EigenDecomposition { x: xo, lambda: lo, v: vo, kappa_x: self.kappa_x }
    }

    /// `X1 V1^*`, the spectral projector onto the studied subspace.
    pub fn projector(&self) -> CMatrix<T> {
        self.x1.matmul(&self.v1.adjoint())
    }
}

/// Split `ed` with a selector.
pub fn partition<T: Real>(
    ed: &EigenDecomposition<T>,
    sel: &SpectralSelector,
    tol: &Tolerances,
) -> Result<SpectralPartition<T>> {
    let side1 = sel.select(&ed.lambda, tol)?;
    SpectralPartition::from_indices(ed, &side1, tol)
}

/// How the perturbed spectrum inherits the base split.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchStrategy {
    /// Apply the same selector to the perturbed eigenvalues.
    SameSelector(SpectralSelector),
    /// Minimum-total-distance one-to-one pairing with the base eigenvalues.
    NearestAssignment,
}

/// Perturbed partition plus the eigenvalue pairing used to build it.
#[derive(Debug, Clone)]
pub struct MatchedPartition<T> {
    pub part: SpectralPartition<T>,
    /// For `NearestAssignment`: base eig position paired with each perturbed eig position.
    pub assignment: Option<Vec<usize>>,
}

fn spectral_scale<T: Real>(lam: &[C<T>]) -> f64 {
    let s = lam.iter().fold(0.0f64, |m, z| m.max(z.norm().as_f64()));
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Match without checking the post-perturbation gap.
pub fn match_partition_unchecked<T: Real>(
    ed_tilde: &EigenDecomposition<T>,
    base: &SpectralPartition<T>,
    strategy: &MatchStrategy,
    tol: &Tolerances,
) -> Result<MatchedPartition<T>> {
    let n = base.n;
    if ed_tilde.n() != n {
        return Err(Error::ShapeMismatch(format!("perturbed spectrum has {} eigenvalues, base {}", ed_tilde.n(), n)));
    }
    match strategy {
        MatchStrategy::SameSelector(sel) => {
            let side1 = sel.select(&ed_tilde.lambda, tol)?;
            if side1.len() != base.r {
                return Err(Error::InvalidSelector(format!(
                    "{sel} captures {} perturbed eigenvalues but {} base eigenvalues",
                    side1.len(),
                    base.r
                )));
            }
            Ok(MatchedPartition { part: SpectralPartition::from_indices(ed_tilde, &side1, tol)?, assignment: None })
        }
        MatchStrategy::NearestAssignment => {
            let base_lam = base.unpermute().lambda;
            let cost: Vec<Vec<f64>> = ed_tilde
                .lambda
                .iter()
                .map(|lt| base_lam.iter().map(|l| (*lt - *l).norm().as_f64()).collect())
                .collect();
            let (pair, opt) = assign::min_cost_assignment(&cost);
            // rank of each base position inside side 1
            let mut rank1 = vec![usize::MAX; n];
            for (slot, &k) in base.perm[..base.r].iter().enumerate() {
                rank1[k] = slot;
            }
            let mut side1: Vec<usize> = (0..n).filter(|&i| rank1[pair[i]] != usize::MAX).collect();
            side1.sort_by_key(|&i| rank1[pair[i]]);

            let band = tol.assign_tol * spectral_scale(&base_lam);
            for &i in &side1 {
                let mut alt = cost.clone();
                for &k in &base.perm[..base.r] {
                    alt[i][k] = f64::INFINITY;
                }
                let (_, c2) = assign::min_cost_assignment(&alt);
                if c2 - opt <= band {
                    return Err(Error::AssignmentAmbiguous { best: opt, alternative: c2 });
                }
            }
            Ok(MatchedPartition {
                part: SpectralPartition::from_indices(ed_tilde, &side1, tol)?,
                assignment: Some(pair),
            })
        }
    }
}

/// Match the perturbed decomposition to `base`; fails with `GapViolated`
/// when `δλ` vanishes.
pub fn match_partition<T: Real>(
    ed_tilde: &EigenDecomposition<T>,
    base: &SpectralPartition<T>,
    strategy: &MatchStrategy,
    tol: &Tolerances,
) -> Result<MatchedPartition<T>> {
    let m = match_partition_unchecked(ed_tilde, base, strategy, tol)?;
    check_gap(&m.part.lambda1, &base.lambda2, tol)?;
    Ok(m)
}

/// `GapViolated` unless `δλ` exceeds the floor relative to the spectral scale.
pub fn check_gap<T: Real>(lambda1_tilde: &[C<T>], lambda2: &[C<T>], tol: &Tolerances) -> Result<f64> {
    let dl = gap_delta_lambda(lambda1_tilde, lambda2).as_f64();
    let all: Vec<C<T>> = lambda1_tilde.iter().chain(lambda2).copied().collect();
    if dl <= tol.gap_floor * spectral_scale(&all) {
        return Err(Error::GapViolated { delta: dl });
    }
    Ok(dl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig;
    use crate::scalar::c;

    fn example11(eps: f64) -> CMatrix<f64> {
        CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[eps, 1.0, 0.0], &[0.0, 0.0, 0.5]])
    }

    #[test]
    fn diagonal_index_set() {
        let t = Tolerances::default();
        let a = CMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]]);
        let ed = eig(&a, &t).unwrap();
        let p = partition(&ed, &SpectralSelector::IndexSet(vec![0]), &t).unwrap();
        assert_eq!(p.lambda1, vec![c(3.0, 0.0)]);
        assert_eq!(p.lambda2, vec![c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn example_top_two_spans_first_coordinates() {
        let t = Tolerances::default();
        let ed = eig(&example11(1e-4), &t).unwrap();
        let p = partition(&ed, &SpectralSelector::TopKMagnitude(2), &t).unwrap();
        assert!((p.lambda1[0] - c(1.01, 0.0)).norm() < 1e-12);
        assert!((p.lambda1[1] - c(0.99, 0.0)).norm() < 1e-12);
        assert!((p.lambda2[0] - c(0.5, 0.0)).norm() < 1e-12);
        for j in 0..2 {
            assert!(p.x1[(2, j)].norm() < 1e-14);
        }
        let vx = p.v().adjoint().matmul(&p.x());
        assert!(vx.dist_to_identity() <= t.tol_eig * ed.kappa_x);
    }

    #[test]
    fn disk_selects_cluster() {
        let t = Tolerances::default();
        let ed = eig(&example11(0.01), &t).unwrap();
        let p = partition(&ed, &"disk:1:0.3:inside".parse().unwrap(), &t).unwrap();
        assert_eq!(p.r, 2);
        assert!((p.lambda1[0] - c(1.1, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unpermute_is_exact() {
        let t = Tolerances::default();
        let ed = eig(&example11(1e-2), &t).unwrap();
        let p = partition(&ed, &SpectralSelector::IndexSet(vec![2, 0]), &t).unwrap();
        let back = p.unpermute();
        assert_eq!(back.x, ed.x);
        assert_eq!(back.v, ed.v);
        assert_eq!(back.lambda, ed.lambda);
    }

    #[test]
    fn zero_perturbation_matches_itself() {
        let t = Tolerances::default();
        let ed = eig(&example11(1e-4), &t).unwrap();
        let p = partition(&ed, &SpectralSelector::TopKMagnitude(2), &t).unwrap();
        for strat in [MatchStrategy::NearestAssignment, MatchStrategy::SameSelector(SpectralSelector::TopKMagnitude(2))]
        {
            let m = match_partition(&ed, &p, &strat, &t).unwrap();
            assert_eq!(m.part.lambda1, p.lambda1);
            assert_eq!(m.part.x1, p.x1);
        }
    }

    #[test]
    fn coincident_eigenvalue_is_a_gap_violation() {
        let t = Tolerances::default();
        let a = CMatrix::from_real_rows(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.5]]);
        let ed = eig(&a, &t).unwrap();
        let p = partition(&ed, &SpectralSelector::TopKMagnitude(1), &t).unwrap();
        // perturbed spectrum whose top eigenvalue lands on the complement's 1
        let at = CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.9, 0.0], &[0.0, 0.0, 0.5]]);
        let edt = eig(&at, &t).unwrap();
        let strat = MatchStrategy::SameSelector(SpectralSelector::TopKMagnitude(1));
        assert!(matches!(match_partition(&edt, &p, &strat, &t), Err(Error::GapViolated { .. })));
        assert!(match_partition_unchecked(&edt, &p, &strat, &t).is_ok());
    }

    #[test]
    fn ambiguous_assignment_is_reported() {
        let t = Tolerances::default();
        let a = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]);
        let ed = eig(&a, &t).unwrap();
        let p = partition(&ed, &SpectralSelector::TopKMagnitude(1), &t).unwrap();
        // both perturbed eigenvalues equidistant from both base ones
        let at = CMatrix::from_real_rows(&[&[1.0, 1e-3], &[-1e-3, 1.0]]);
        let edt = eig(&at, &t).unwrap();
        assert!(matches!(
            match_partition(&edt, &p, &MatchStrategy::NearestAssignment, &t),
            Err(Error::AssignmentAmbiguous { .. })
        ));
    }
}
