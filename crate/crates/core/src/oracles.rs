//! Exact-identity checks for the perturbation analysis: the Hadamard-product
//! form of `Q_V2^* Q_X̃1`, its row-by-row polynomial formula, the resolvent
//! contour integral, and a fully independent sinΘ pipeline.

use num_traits::{One, Zero};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::lu::{left_divide_upper_adjoint, right_divide_upper, solve_unchecked};
use crate::linalg::matrix::vec_norm;
use crate::linalg::qr::qr_decompose;
use crate::linalg::svd::{cond2, spectral_norm};
use crate::linalg::{eig, CMatrix, EigenDecomposition};
use crate::partition::{SpectralPartition, SpectralSelector};
use crate::scalar::{Real, C};
use crate::subspace::projector_sin_theta;

/// Rows with `|σ_r|` below this are skipped by the row formula.
pub const SIGMA_FLOOR: f64 = 1e-280;

/// Shared inputs for the identity checks.
#[derive(Debug, Clone)]
pub struct OracleContext<T> {
    pub part: SpectralPartition<T>,
    pub part_tilde: SpectralPartition<T>,
    /// `Ã = A + ΔA`.
    pub a_tilde: CMatrix<T>,
    pub da: CMatrix<T>,
    /// `F_ij = 1/(λ̃_j − λ_{r+i})`.
    pub f: CMatrix<T>,
    /// `H = V2^* ΔA X̃1`.
    pub h: CMatrix<T>,
    /// `M = (F ∘ H) R_X̃1^{-1}`.
    pub m: CMatrix<T>,
    /// `a = ‖A‖ + ‖ΔA‖ + ρ(Λ2)`.
    pub a_value: T,
}

impl<T: Real> OracleContext<T> {
    pub fn new(
        a: &CMatrix<T>,
        da: &CMatrix<T>,
        part: &SpectralPartition<T>,
        part_tilde: &SpectralPartition<T>,
    ) -> Result<Self> {
        if part.r != part_tilde.r || part.n != part_tilde.n {
            return Err(Error::ShapeMismatch("partitions disagree in shape".into()));
        }
        let f = build_f(&part_tilde.lambda1, &part.lambda2)?;
        let h = part.v2.adjoint().matmul(da).matmul(&part_tilde.x1);
        let m = right_divide_upper(&f.hadamard(&h), &part_tilde.qr_x1.r);
        let rho2 = part.lambda2.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
        let a_value = spectral_norm(a)? + spectral_norm(da)? + rho2;
        Ok(Self {
            part: part.clone(),
            part_tilde: part_tilde.clone(),
            a_tilde: a + da,
            da: da.clone(),
            f,
            h,
            m,
            a_value,
        })
    }

    pub fn r(&self) -> usize {
        self.part.r
    }
}

/// `F_ij = 1/(λ̃_j − λ_{r+i})`, shape `(n−r)×r`.
pub fn build_f<T: Real>(lambda1_tilde: &[C<T>], lambda2: &[C<T>]) -> Result<CMatrix<T>> {
    let mut f = CMatrix::zeros(lambda2.len(), lambda1_tilde.len());
    for (i, mu) in lambda2.iter().enumerate() {
        for (j, lt) in lambda1_tilde.iter().enumerate() {
            let d = *lt - *mu;
            if d.is_zero() {
                return Err(Error::GapViolated { delta: 0.0 });
            }
            f[(i, j)] = d.inv();
        }
    }
    Ok(f)
}

/// Outcome of one identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub residual: f64,
    pub threshold: f64,
}

impl Residual {
    pub fn pass(&self) -> bool {
        self.residual <= self.threshold
    }
}

/// `(R_V2^{-1})^* M`, the right-hand side of the Hadamard identity.
pub fn hadamard_rhs<T: Real>(ctx: &OracleContext<T>) -> CMatrix<T> {
    left_divide_upper_adjoint(&ctx.part.qr_v2.r, &ctx.m)
}

/// `‖Q_V2^* Q_X̃1 − (R_V2^{-1})^* (F ∘ V2^*ΔA X̃1) R_X̃1^{-1}‖` with its
/// conditioning-scaled threshold.
pub fn hadamard_residual<T: Real>(ctx: &OracleContext<T>) -> Result<Residual> {
    let lhs = ctx.part.qr_v2.q.adjoint().matmul(&ctx.part_tilde.qr_x1.q);
    let rhs = hadamard_rhs(ctx);
    let residual = spectral_norm(&(&lhs - &rhs))?.as_f64();
    let rhs_norm = spectral_norm(&rhs)?.as_f64();
    let kprod = cond2(&ctx.part.qr_v2.r)?.as_f64() * cond2(&ctx.part_tilde.qr_x1.r)?.as_f64();
    let threshold = 1e-8 * rhs_norm.max(1.0) * (kprod / 1e6).max(1.0);
    Ok(Residual { residual, threshold })
}

/// `σ_1..σ_r` of `Π (z − λ̂_j) = z^r − σ_1 z^{r−1} + … + (−1)^r σ_r`, by
/// multiplying in one factor at a time.
pub fn elementary_symmetric<T: Real>(lhat: &[C<T>]) -> Vec<C<T>> {
    let r = lhat.len();
    let mut e = vec![C::<T>::zero(); r + 1];
    e[0] = C::one();
    for (j, &l) in lhat.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            let prev = e[k - 1];
            e[k] += l * prev;
        }
    }
    e.split_off(1)
}

fn alternating<T: Real>(k: usize) -> T {
    if k.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// Row `i` of `M` from the polynomial formula
/// `m_i^* = b_i^* P(Â) Q_X̃1 / ((−1)^{r+1} σ_r)` with `Â = Ã − λ_{r+i} I`.
pub fn row_formula_m<T: Real>(ctx: &OracleContext<T>, i: usize) -> Result<Vec<C<T>>> {
    let r = ctx.r();
    let mu = ctx.part.lambda2[i];
    let lhat: Vec<C<T>> = ctx.part_tilde.lambda1.iter().map(|&l| l - mu).collect();
    if lhat.iter().any(|z| z.is_zero()) {
        return Err(Error::GapViolated { delta: 0.0 });
    }
    let sigma = elementary_symmetric(&lhat);
    let sr = sigma[r - 1];
    if sr.norm().as_f64() < SIGMA_FLOOR {
        return Err(Error::SymmetricUnderflow(sr.norm().as_f64()));
    }
    let q = &ctx.part_tilde.qr_x1.q;
    let ahat = ctx.a_tilde.shift_diag(-mu);
    // Horner: W ← Â W + (−1)^k σ_k Q
    let mut w = q.clone();
    for (k, s) in sigma.iter().enumerate().take(r - 1) {
        let coef = *s * alternating::<T>(k + 1);
        w = &ahat.matmul(&w) + &q.scale(coef);
    }
    let b: Vec<C<T>> = ctx.part.v2.column(i).iter().map(|z| z.conj()).collect();
    let bda = ctx.da.transpose().matvec(&b);
    let lead = (sr * alternating::<T>(r + 1)).inv();
    Ok((0..r)
        .map(|j| {
            let mut acc = C::<T>::zero();
            for (k, bk) in bda.iter().enumerate() {
                acc += *bk * w[(k, j)];
            }
            acc * lead
        })
        .collect())
}

/// `M` assembled from the row formula; `None` rows were skipped for underflow.
pub fn row_assembled_m<T: Real>(ctx: &OracleContext<T>) -> Result<(CMatrix<T>, Vec<usize>)> {
    let (nr, r) = ctx.m.shape();
    let mut out = CMatrix::zeros(nr, r);
    let mut skipped = Vec::new();
    for i in 0..nr {
        match row_formula_m(ctx, i) {
            Ok(row) => {
                for (j, z) in row.into_iter().enumerate() {
                    out[(i, j)] = z;
                }
            }
            Err(Error::SymmetricUnderflow(_)) => {
                skipped.push(i);
                for j in 0..r {
                    out[(i, j)] = ctx.m[(i, j)];
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, skipped))
}

/// Per row: `(‖m_i‖, (‖b_i‖/a) Π_j (1 + a/|λ̂_j|))`; the first never exceeds the second.
pub fn bound_chain<T: Real>(ctx: &OracleContext<T>) -> Vec<(f64, f64)> {
    let a = ctx.a_value;
    (0..ctx.m.rows())
        .map(|i| {
            let mu = ctx.part.lambda2[i];
            let bda = ctx.da.adjoint().matvec(&ctx.part.v2.column(i));
            let mut rhs = vec_norm(&bda) / a;
            for lt in &ctx.part_tilde.lambda1 {
                rhs *= T::one() + a / (*lt - mu).norm();
            }
            (vec_norm(&ctx.m.row(i)).as_f64(), rhs.as_f64())
        })
        .collect()
}

/// Circle `Γ` for trapezoidal quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec<T> {
    pub center: C<T>,
    pub radius: T,
    pub nodes: usize,
}

impl<T: Real> ContourSpec<T> {
    /// Quadrature nodes `c + R e^{iθ_k}` and the weights `R e^{iθ_k}/N`.
    fn nodes(&self) -> Vec<(C<T>, C<T>)> {
        let n = self.nodes;
        (0..n)
            .map(|k| {
                let th = T::lit(2.0) * T::PI() * T::of_usize(k) / T::of_usize(n);
                let e = C::new(th.cos(), th.sin());
                (self.center + e * self.radius, e * self.radius / T::of_usize(n))
            })
            .collect()
    }

    /// Check that `inside` lies strictly inside and `outside` strictly outside,
    /// each by at least `contour_margin · radius`.
    pub fn check(&self, inside: &[C<T>], outside: &[C<T>], tol: &Tolerances) -> Result<()> {
        if !(self.radius > T::zero()) || self.nodes < 16 {
            return Err(Error::EnclosureViolated(format!(
                "need radius > 0 and at least 16 nodes, got {:?} and {}",
                self.radius, self.nodes
            )));
        }
        let m = T::lit(tol.contour_margin) * self.radius;
        for z in inside {
            let d = (*z - self.center).norm();
            if d > self.radius - m {
                return Err(Error::EnclosureViolated(format!("{z} is not inside by the margin")));
            }
        }
        for z in outside {
            let d = (*z - self.center).norm();
            if d < self.radius + m {
                return Err(Error::EnclosureViolated(format!("{z} is not outside by the margin")));
            }
        }
        Ok(())
    }

    /// A circle centred on the centroid of `inside`, halfway to the nearest
    /// outside point, if one satisfies the margins.
    pub fn around(inside: &[C<T>], outside: &[C<T>], nodes: usize, tol: &Tolerances) -> Option<Self> {
        if inside.is_empty() {
            return None;
        }
        let center = inside.iter().fold(C::zero(), |s, z| s + *z) / T::of_usize(inside.len());
        let rin = inside.iter().fold(T::zero(), |m, z| m.max((*z - center).norm()));
        let rout = outside.iter().fold(T::infinity(), |m, z| m.min((*z - center).norm()));
        let radius = if rout.is_finite() { (rin + rout) * T::lit(0.5) } else { rin * T::lit(2.0) + T::one() };
        let spec = Self { center, radius, nodes };
        spec.check(inside, outside, tol).ok().map(|_| spec)
    }
}

/// `(1/2πi) ∮ (λI − A)^{-1} dλ` by the trapezoid rule on the circle.
pub fn contour_projector<T: Real>(
    a: &CMatrix<T>,
    ed: &EigenDecomposition<T>,
    spec: &ContourSpec<T>,
    tol: &Tolerances,
) -> Result<CMatrix<T>> {
    let (inside, outside): (Vec<C<T>>, Vec<C<T>>) =
        ed.lambda.iter().partition(|z| (**z - spec.center).norm() < spec.radius);
    spec.check(&inside, &outside, tol)?;
    let n = a.rows();
    let eye = CMatrix::identity(n);
    let guard = T::lit(tol.resolvent_tol) * spec.radius;
    let mut p = CMatrix::zeros(n, n);
    for (k, (z, w)) in spec.nodes().into_iter().enumerate() {
        let dmin = ed.lambda.iter().fold(T::infinity(), |m, l| m.min((*l - z).norm()));
        if dmin <= guard {
            return Err(Error::ResolventSingular { index: k, distance: dmin.as_f64() });
        }
        let res = solve_unchecked(&a.scale_real(-T::one()).shift_diag(z), &eye);
        p = &p + &res.scale(w);
    }
    Ok(p)
}

/// `G` by residues: `G_ij = H_ij / (λ̃_j − λ_{r+i})`.
pub fn residue_g<T: Real>(ctx: &OracleContext<T>) -> CMatrix<T> {
    CMatrix::from_fn(ctx.h.rows(), ctx.h.cols(), |i, j| {
        ctx.h[(i, j)] / (ctx.part_tilde.lambda1[j] - ctx.part.lambda2[i])
    })
}

/// `G` by quadrature of `(λI − Λ2)^{-1} H (λI − Λ̃1)^{-1}` on `Γ`.
pub fn residue_g_quadrature<T: Real>(
    ctx: &OracleContext<T>,
    spec: &ContourSpec<T>,
    tol: &Tolerances,
) -> Result<CMatrix<T>> {
    let inside: Vec<C<T>> = ctx.part.lambda1.iter().chain(&ctx.part_tilde.lambda1).copied().collect();
    let outside: Vec<C<T>> = ctx.part.lambda2.iter().chain(&ctx.part_tilde.lambda2).copied().collect();
    spec.check(&inside, &outside, tol)?;
    let mut g = CMatrix::zeros(ctx.h.rows(), ctx.h.cols());
    for (z, w) in spec.nodes() {
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let den = (z - ctx.part.lambda2[i]) * (z - ctx.part_tilde.lambda1[j]);
                g[(i, j)] += ctx.h[(i, j)] * w / den;
            }
        }
    }
    Ok(g)
}

/// Ground-truth `‖sinΘ(X1, X̃1)‖` from a separate pipeline: decompose both
/// matrices, apply the selector to each, orthonormalize, and measure
/// `‖(I − Q Q^*) Q̃‖`.
pub fn brute_force_sin_theta<T: Real>(
    a: &CMatrix<T>,
    da: &CMatrix<T>,
    sel: &SpectralSelector,
    tol: &Tolerances,
) -> Result<T> {
    let basis = |m: &CMatrix<T>| -> Result<CMatrix<T>> {
        let ed = eig(m, tol)?;
        let idx = sel.select(&ed.lambda, tol)?;
        Ok(qr_decompose(&ed.x.select_columns(&idx), tol)?.q)
    };
    let q = basis(a)?;
    let qt = basis(&(a + da))?;
    if q.cols() != qt.cols() {
        return Err(Error::InvalidSelector(format!("{sel} picks {} vs {} eigenvalues", q.cols(), qt.cols())));
    }
    projector_sin_theta(&q, &qt)
}
