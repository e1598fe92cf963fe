//! The three eigengap notions: disk separation `δ0`, pairwise `δ1`, and the
//! post-perturbation gap `δλ`.

use crate::scalar::{Real, C};

/// All gaps for one partition pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub delta0: f64,
    pub delta1: f64,
    pub delta_lambda: f64,
    /// Center of the best separating disk found for `δ0`.
    pub t0_star: C<f64>,
}

fn to64<T: Real>(z: &[C<T>]) -> Vec<C<f64>> {
    z.iter().map(|w| C::new(w.re.as_f64(), w.im.as_f64())).collect()
}

fn min_pair_distance(a: &[C<f64>], b: &[C<f64>]) -> f64 {
    let mut m = f64::INFINITY;
    for x in a {
        for y in b {
            m = m.min((x - y).norm());
        }
    }
    m
}

/// `min |λ − μ|` over `λ ∈ Λ1`, `μ ∈ Λ2`.
pub fn gap_delta1<T: Real>(lambda1: &[C<T>], lambda2: &[C<T>]) -> T {
    assert!(!lambda1.is_empty() && !lambda2.is_empty(), "gap of an empty set");
    let mut m = T::infinity();
    for x in lambda1 {
        for y in lambda2 {
            m = m.min((*x - *y).norm());
        }
    }
    m
}

/// `min |λ̃ − μ|` over the perturbed studied set and the unperturbed complement.
pub fn gap_delta_lambda<T: Real>(lambda1_tilde: &[C<T>], lambda2: &[C<T>]) -> T {
    gap_delta1(lambda1_tilde, lambda2)
}

/// Larger of the two directional disk margins at center `t`.
fn margin(l1: &[C<f64>], l2: &[C<f64>], t: C<f64>) -> f64 {
    let dist = |s: &[C<f64>]| -> (f64, f64) {
        s.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), z| {
            let d = (z - t).norm();
            (lo.min(d), hi.max(d))
        })
    };
    let (min1, max1) = dist(l1);
    let (min2, max2) = dist(l2);
    (min1 - max2).max(min2 - max1)
}

/// Better of two candidates: larger value, ties to the lexicographically smaller center.
fn better(a: (f64, C<f64>), b: (f64, C<f64>)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    (a.1.re, a.1.im) < (b.1.re, b.1.im)
}

/// `δ0`: the best disk-separation margin over all centers `t0`, clamped at zero.
///
/// Grid search over the eigenvalue bounding box inflated by half, pitch
/// (box diameter)/200, then Nelder-Mead from the best grid point.
pub fn gap_delta0<T: Real>(lambda1: &[C<T>], lambda2: &[C<T>]) -> (T, C<T>) {
    assert!(!lambda1.is_empty() && !lambda2.is_empty(), "gap of an empty set");
    let l1 = to64(lambda1);
    let l2 = to64(lambda2);
    let all: Vec<C<f64>> = l1.iter().chain(&l2).copied().collect();
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in &all {
        xlo = xlo.min(z.re);
        xhi = xhi.max(z.re);
        ylo = ylo.min(z.im);
        yhi = yhi.max(z.im);
    }
    let extent = (xhi - xlo).max(yhi - ylo);
    let side = if extent > 0.0 { 1.5 * extent } else { 1.0 };
    let center = C::new(0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
    let diameter = side * std::f64::consts::SQRT_2;
    let pitch = diameter / 200.0;
    let steps = (side / pitch).ceil() as usize;
    let origin = center - C::new(0.5 * side, 0.5 * side);

    let mut best = (f64::NEG_INFINITY, center);
    for a in 0..=steps {
        for b in 0..=steps {
            let t = origin + C::new(a as f64 * pitch, b as f64 * pitch);
            let cand = (margin(&l1, &l2, t), t);
            if better(cand, best) {
                best = cand;
            }
        }
    }
    let refined = nelder_mead(|t| margin(&l1, &l2, t), best.1, pitch, 1e-8 * diameter);
    if better(refined, best) {
        best = refined;
    }
    let value = best.0.max(0.0);
    (T::lit(value), C::new(T::lit(best.1.re), T::lit(best.1.im)))
}

/// Maximize `f` over the plane from `start` with a simplex of edge `step`,
/// stopping when the simplex diameter drops below `xtol`.
fn nelder_mead(f: impl Fn(C<f64>) -> f64, start: C<f64>, step: f64, xtol: f64) -> (f64, C<f64>) {
    let mut simplex: Vec<(f64, C<f64>)> =
        [start, start + C::new(step, 0.0), start + C::new(0.0, step)].into_iter().map(|p| (f(p), p)).collect();
    let order = |s: &mut Vec<(f64, C<f64>)>| {
        s.sort_by(|a, b| {
            if better(*a, *b) {
                std::cmp::Ordering::Less
            } else if better(*b, *a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
    };
    for _ in 0..2000 {
        order(&mut simplex);
        let size = (simplex[1].1 - simplex[0].1).norm().max((simplex[2].1 - simplex[0].1).norm());
        if size < xtol {
            break;
        }
        let centroid = (simplex[0].1 + simplex[1].1) * 0.5;
        let worst = simplex[2];
        let reflect = centroid + (centroid - worst.1);
        let fr = f(reflect);
        if fr > simplex[0].0 {
            let expand = centroid + (centroid - worst.1) * 2.0;
            let fe = f(expand);
            simplex[2] = if fe > fr { (fe, expand) } else { (fr, reflect) };
        } else if fr > simplex[1].0 {
            simplex[2] = (fr, reflect);
        } else {
            let contract = if fr > worst.0 {
                centroid + (reflect - centroid) * 0.5
            } else {
                centroid + (worst.1 - centroid) * 0.5
            };
            let fc = f(contract);
            if fc > worst.0.max(fr) {
                simplex[2] = (fc, contract);
            } else {
                let b = simplex[0].1;
                for v in simplex.iter_mut().skip(1) {
                    let p = b + (v.1 - b) * 0.5;
                    *v = (f(p), p);
                }
            }
        }
    }
    order(&mut simplex);
    simplex[0]
}

/// Directional margin at a given center, exposed for oracles and tests.
pub fn disk_margin<T: Real>(lambda1: &[C<T>], lambda2: &[C<T>], t0: C<T>) -> T {
    T::lit(margin(&to64(lambda1), &to64(lambda2), C::new(t0.re.as_f64(), t0.im.as_f64())))
}

/// Gap report for a base partition `(Λ1, Λ2)` and perturbed studied set `Λ̃1`.
pub fn gap_report<T: Real>(lambda1: &[C<T>], lambda2: &[C<T>], lambda1_tilde: &[C<T>]) -> GapReport {
    let (d0, t0) = gap_delta0(lambda1, lambda2);
    GapReport {
        delta0: d0.as_f64(),
        delta1: gap_delta1(lambda1, lambda2).as_f64(),
        delta_lambda: min_pair_distance(&to64(lambda1_tilde), &to64(lambda2)),
        t0_star: C::new(t0.re.as_f64(), t0.im.as_f64()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn delta1_cases() {
        assert!((gap_delta1(&[c(1.1, 0.0), c(0.9, 0.0)], &[c(0.5, 0.0)]) - 0.4f64).abs() < 1e-15);
        assert_eq!(gap_delta1(&[c(1.0, 0.0)], &[c(1.0f64, 0.0)]), 0.0);
        assert_eq!(gap_delta1(&[c(0.0, 0.0), c(3.0, 0.0)], &[c(1.0f64, 0.0)]), 1.0);
        assert_eq!(gap_delta_lambda(&[c(2.0, 1.0)], &[c(0.0f64, 0.0)]), 5f64.sqrt());
    }

    #[test]
    fn delta0_example_cluster() {
        let (d0, t0) = gap_delta0(&[c(1.1, 0.0), c(0.9, 0.0)], &[c(0.5f64, 0.0)]);
        assert!((d0 - 0.4).abs() < 1e-9, "{d0}");
        assert!((disk_margin(&[c(1.1, 0.0), c(0.9, 0.0)], &[c(0.5, 0.0)], t0) - d0).abs() < 1e-12);
    }

    #[test]
    fn delta0_coincident_is_zero() {
        let (d0, _) = gap_delta0(&[c(1.0, 0.0)], &[c(1.0f64, 0.0)]);
        assert_eq!(d0, 0.0);
    }

    #[test]
    fn delta0_two_real_clusters() {
        let l1 = [c(0.0, 0.0), c(0.1, 0.0)];
        let l2 = [c(1.0, 0.0), c(1.1f64, 0.0)];
        let (d0, _) = gap_delta0(&l1, &l2);
        assert!(d0 <= gap_delta1(&l1, &l2) + 1e-12);
        // dense oracle grid
        let mut oracle = f64::NEG_INFINITY;
        for a in 0..=400 {
            for b in 0..=400 {
                let t = c(-1.0 + 3.0 * a as f64 / 400.0, -1.5 + 3.0 * b as f64 / 400.0);
                oracle = oracle.max(disk_margin(&l1, &l2, t));
            }
        }
        assert!(d0 >= oracle - 1e-9, "{d0} vs {oracle}");
        assert!((d0 - 0.9).abs() < 1e-9);
    }
}
