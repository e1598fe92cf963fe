//! Which eigenvalues form the studied set `S(Λ1)`.

use std::fmt;
use std::str::FromStr;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::io::parse_complex;
use crate::scalar::{Real, C};

/// Rule picking the studied eigenvalues out of an ordered spectrum.
///
/// Text form: `topk:2`, `indices:0,1,4`, `disk:1.0+0.0i:0.3:inside`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSelector {
    /// The `k` eigenvalues of largest magnitude (the first `k` in eig order).
    TopKMagnitude(usize),
    /// Explicit positions in eig order.
    IndexSet(Vec<usize>),
    /// Eigenvalues strictly inside (or outside) a circle.
    Disk { center: C<f64>, radius: f64, inside: bool },
}

impl SpectralSelector {
    /// Positions (ascending) of the selected eigenvalues in `lambda`.
    pub fn select<T: Real>(&self, lambda: &[C<T>], tol: &Tolerances) -> Result<Vec<usize>> {
        let n = lambda.len();
        let picked: Vec<usize> = match self {
            SpectralSelector::TopKMagnitude(k) => {
                if *k == 0 || *k >= n {
                    return Err(Error::EmptySide { captured: (*k).min(n), total: n });
                }
                (0..*k).collect()
            }
            SpectralSelector::IndexSet(idx) => {
                let mut v = idx.clone();
                v.sort_unstable();
                if v.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidSelector(format!("repeated index in {self}")));
                }
                if let Some(&bad) = v.iter().find(|&&i| i >= n) {
                    return Err(Error::InvalidSelector(format!("index {bad} out of range for n = {n}")));
                }
                v
            }
            SpectralSelector::Disk { center, radius, inside } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidSelector(format!("disk radius must be positive, got {radius}")));
                }
                let band = tol.disk_tol * radius;
                let mut v = Vec::new();
                for (k, z) in lambda.iter().enumerate() {
                    let d = (C::new(z.re.as_f64(), z.im.as_f64()) - center).norm();
                    if (d - radius).abs() <= band {
                        return Err(Error::BoundaryAmbiguity { index: k });
                    }
                    if (d < *radius) == *inside {
                        v.push(k);
                    }
                }
                v
            }
        };
        if picked.is_empty() || picked.len() == n {
            return Err(Error::EmptySide { captured: picked.len(), total: n });
        }
        Ok(picked)
    }
}

impl fmt::Display for SpectralSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralSelector::TopKMagnitude(k) => write!(f, "topk:{k}"),
            SpectralSelector::IndexSet(idx) => {
                let s: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                write!(f, "indices:{}", s.join(","))
            }
            SpectralSelector::Disk { center, radius, inside } => {
                let sign = if center.im.is_sign_negative() { "-" } else { "+" };
                write!(
                    f,
                    "disk:{:?}{sign}{:?}i:{:?}:{}",
                    center.re,
                    center.im.abs(),
                    radius,
                    if *inside { "inside" } else { "outside" }
                )
            }
        }
    }
}

impl FromStr for SpectralSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidSelector(format!("'{s}': {why}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        match kind {
            "topk" => {
                let k = rest.trim().parse::<usize>().map_err(|_| bad("k must be a nonnegative integer"))?;
                if k == 0 {
                    return Err(bad("k must be at least 1"));
                }
                Ok(SpectralSelector::TopKMagnitude(k))
            }
            "indices" => {
                let idx = rest
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("indices must be nonnegative integers"))?;
                if idx.is_empty() {
                    return Err(bad("no indices"));
                }
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(bad("indices must be distinct"));
                }
                Ok(SpectralSelector::IndexSet(idx))
            }
            "disk" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [center, radius, side] = parts[..] else {
                    return Err(bad("expected disk:CENTER:RADIUS:inside|outside"));
                };
                let center = parse_complex(center).ok_or_else(|| bad("cannot parse center"))?;
                let radius = radius.trim().parse::<f64>().map_err(|_| bad("cannot parse radius"))?;
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(bad("radius must be positive"));
                }
                let inside = match side.trim() {
                    "inside" => true,
                    "outside" => false,
                    _ => return Err(bad("side must be inside or outside")),
                };
                Ok(SpectralSelector::Disk { center, radius, inside })
            }
            _ => Err(bad("unknown selector kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["topk:2", "indices:0,1,4", "disk:1.0+0.0i:0.3:inside", "disk:-0.5-2.0i:1.5:outside"] {
            let sel: SpectralSelector = s.parse().unwrap();
            assert_eq!(sel.to_string(), s);
            assert_eq!(sel.to_string().parse::<SpectralSelector>().unwrap(), sel);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in
            ["topk:0", "topk:x", "indices:", "indices:1,1", "disk:1:0:inside", "disk:1:0.3:maybe", "ring:3", "topk"]
        {
            assert!(s.parse::<SpectralSelector>().is_err(), "{s}");
        }
    }

    #[test]
    fn disk_membership_and_boundary() {
        let t = Tolerances::default();
        let lam = [c(1.1, 0.0), c(0.9, 0.0), c(0.5, 0.0)];
        let sel: SpectralSelector = "disk:1:0.3:inside".parse().unwrap();
        assert_eq!(sel.select(&lam, &t).unwrap(), vec![0, 1]);
        let out: SpectralSelector = "disk:1:0.3:outside".parse().unwrap();
        assert_eq!(out.select(&lam, &t).unwrap(), vec![2]);
        let edge: SpectralSelector = "disk:1:0.1:inside".parse().unwrap();
        assert!(matches!(edge.select(&lam, &t), Err(Error::BoundaryAmbiguity { .. })));
    }

    #[test]
    fn empty_sides_are_rejected() {
        let t = Tolerances::default();
        let lam = [c(3.0, 0.0), c(2.0, 0.0)];
        assert!(matches!(SpectralSelector::TopKMagnitude(2).select(&lam, &t), Err(Error::EmptySide { .. })));
        let all: SpectralSelector = "disk:0:10:inside".parse().unwrap();
        assert!(matches!(all.select(&lam, &t), Err(Error::EmptySide { .. })));
        assert!(SpectralSelector::IndexSet(vec![5]).select(&lam, &t).is_err());
    }
}
