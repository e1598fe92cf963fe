//! Numerical tolerances, kept in one record so every test class has a single knob.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerances used throughout the pipeline. All values are binary64 defaults;
/// use [`Tolerances::for_scalar`] to rescale them for a lower-precision field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigen residual tolerance relative to `‖A‖`.
    pub tol_eig: f64,
    /// Factorization reconstruction tolerance relative to `‖Z‖`.
    pub tol_fact: f64,
    /// Orthonormality tolerance per column.
    pub tol_orth: f64,
    /// Rank threshold: `σ_min > rank_tol · ‖Z‖`.
    pub rank_tol: f64,
    /// Largest eigenvector condition number accepted as diagonalizable.
    pub kappa_cap: f64,
    /// Disk selector boundary exclusion, relative to the radius.
    pub disk_tol: f64,
    /// Assignment ambiguity threshold, relative to the spectral scale.
    pub assign_tol: f64,
    /// Gap below which `δλ` counts as zero, relative to the spectral scale.
    pub gap_floor: f64,
    /// Agreement required between the two sinΘ formulas.
    pub cross_tol: f64,
    /// Enclosure margin of quadrature contours, relative to the radius.
    pub contour_margin: f64,
    /// Minimum node-to-eigenvalue distance on a contour, relative to the radius.
    pub resolvent_tol: f64,
    /// Largest `r·(n−r)` for which the Sylvester operator is assembled.
    pub size_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_eig: 1e-10,
            tol_fact: 1e-12,
            tol_orth: 1e-12,
            rank_tol: 1e-13,
            kappa_cap: 1e13,
            disk_tol: 1e-9,
            assign_tol: 1e-12,
            gap_floor: 1e-14,
            cross_tol: 1e-10,
            contour_margin: 0.05,
            resolvent_tol: 1e-10,
            size_cap: 4096,
        }
    }
}

impl Tolerances {
    /// Defaults rescaled by the machine-epsilon ratio of `T` to `f64`.
    pub fn for_scalar<T: Real>() -> Self {
        let ratio = T::epsilon().as_f64() / f64::EPSILON;
        if ratio <= 1.0 {
            return Self::default();
        }
        let d = Self::default();
        Self {
            tol_eig: (d.tol_eig * ratio).min(1e-2),
            tol_fact: (d.tol_fact * ratio).min(1e-2),
            tol_orth: (d.tol_orth * ratio).min(1e-2),
            rank_tol: (d.rank_tol * ratio).min(1e-2),
            kappa_cap: (d.kappa_cap / ratio).max(10.0),
            assign_tol: (d.assign_tol * ratio).min(1e-2),
            gap_floor: (d.gap_floor * ratio).min(1e-2),
            cross_tol: (d.cross_tol * ratio).min(1e-2),
            resolvent_tol: (d.resolvent_tol * ratio).min(1e-2),
            ..d
        }
    }

    /// Apply a `KEY=VALUE` override as accepted on the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("tolerance {key}: cannot parse '{v}'")))
        };
        match key.trim() {
            "tol_eig" => self.tol_eig = parse(value)?,
            "tol_fact" => self.tol_fact = parse(value)?,
            "tol_orth" => self.tol_orth = parse(value)?,
            "rank_tol" => self.rank_tol = parse(value)?,
            "kappa_cap" => self.kappa_cap = parse(value)?,
            "disk_tol" => self.disk_tol = parse(value)?,
            "assign_tol" => self.assign_tol = parse(value)?,
            "gap_floor" => self.gap_floor = parse(value)?,
            "cross_tol" => self.cross_tol = parse(value)?,
            "contour_margin" => self.contour_margin = parse(value)?,
            "resolvent_tol" => self.resolvent_tol = parse(value)?,
            "size_cap" => {
                self.size_cap = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("tolerance size_cap: cannot parse '{value}'")))?
            }
            other => return Err(Error::Parse(format!("unknown tolerance key '{other}'"))),
        }
        Ok(())
    }

    /// Parse one `KEY=VALUE` pair and apply it.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got '{kv}'")))?;
        self.set(k, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply() {
        let mut t = Tolerances::default();
        t.apply_override("tol_eig=1e-8").unwrap();
        t.apply_override("size_cap=12").unwrap();
        assert_eq!(t.tol_eig, 1e-8);
        assert_eq!(t.size_cap, 12);
        assert!(t.apply_override("nope=1").is_err());
        assert!(t.apply_override("tol_eig").is_err());
    }

    #[test]
    fn f32_tolerances_are_looser() {
        let t = Tolerances::for_scalar::<f32>();
        assert!(t.tol_fact > Tolerances::default().tol_fact);
        assert_eq!(Tolerances::for_scalar::<f64>(), Tolerances::default());
    }
}
