//! Seeded Monte Carlo verifier suites. Case `i` uses seed `base + i`, cases
//! run concurrently and are reported in case order.

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::bounds::{full_report_with, run_pipeline, BoundReport};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::experiments::random::{gen_random_case, RandomCase, RandomCaseParams};
use crate::linalg::svd::spectral_norm;
use crate::oracles::{
    bound_chain, contour_projector, hadamard_residual, residue_g, residue_g_quadrature, row_assembled_m, ContourSpec,
    OracleContext,
};
use crate::partition::MatchStrategy;
use crate::scalar::C;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Hadamard,
    RowFormula,
    Contour,
    Dominance,
    Scaling,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Hadamard, Suite::RowFormula, Suite::Contour, Suite::Dominance, Suite::Scaling];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hadamard => "lemma32",
            Suite::RowFormula => "lemma33",
            Suite::Contour => "contour",
            Suite::Dominance => "dominance",
            Suite::Scaling => "scaling",
        }
    }

    /// Case family used by the suite. The identity checks keep
    /// `κ2(X1)·κ2(V2) ≤ 1e8` so the residual threshold stays meaningful.
    pub fn params(self) -> RandomCaseParams {
        match self {
            Suite::Hadamard | Suite::RowFormula | Suite::Contour => {
                RandomCaseParams { block_kappa_max: Some(1e8), ..RandomCaseParams::default() }
            }
            Suite::Dominance | Suite::Scaling => RandomCaseParams::default(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::Parse(format!("unknown suite '{s}' (expected lemma32, lemma33, contour, dominance or scaling)"))
        })
    }
}

/// One verified case, serialized as the verifier's output record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCase {
    pub case_id: usize,
    pub seed: u64,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip)]
    pub note: Option<String>,
}

impl SuiteCase {
    fn new(case_id: usize, seed: u64, residual: f64, threshold: f64) -> Self {
        Self { case_id, seed, residual, threshold, pass: residual <= threshold, note: None }
    }

    fn failed(case_id: usize, seed: u64, e: Error) -> Self {
        Self { case_id, seed, residual: f64::INFINITY, threshold: 0.0, pass: false, note: Some(e.to_string()) }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: Vec<SuiteCase>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.failures() == 0
    }

    /// Largest `residual / threshold` over the cases.
    pub fn worst_ratio(&self) -> f64 {
        self.cases.iter().map(|c| c.residual / c.threshold).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(&self.cases).expect("cases serialize")
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} pass, worst residual/threshold {:.3e}",
            self.suite.name(),
            self.cases.len() - self.failures(),
            self.cases.len(),
            self.worst_ratio()
        )
    }
}

pub fn run_suite(suite: Suite, base_seed: u64, cases: usize, tol: &Tolerances) -> SuiteReport {
    let params = suite.params();
    let cases = (0..cases)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i as u64);
            let out = gen_random_case(seed, &params, tol).and_then(|case| match suite {
                Suite::Hadamard => hadamard_case(i, &case, tol),
                Suite::RowFormula => row_formula_case(i, &case, tol),
                Suite::Contour => contour_case(i, &case, tol),
                Suite::Dominance => dominance_case(i, &case, tol),
                Suite::Scaling => scaling_case(i, &case, tol),
            });
            out.unwrap_or_else(|e| SuiteCase::failed(i, seed, e))
        })
        .collect();
    SuiteReport { suite, cases }
}

fn context(case: &RandomCase, tol: &Tolerances) -> Result<OracleContext<f64>> {
    let p = run_pipeline(&case.a, &case.da, &case.selector, &MatchStrategy::NearestAssignment, tol)?;
    OracleContext::new(&case.a, &case.da, &p.part, p.part_tilde())
}

fn hadamard_case(i: usize, case: &RandomCase, tol: &Tolerances) -> Result<SuiteCase> {
    let r = hadamard_residual(&context(case, tol)?)?;
    Ok(SuiteCase::new(i, case.seed, r.residual, r.threshold))
}

/// Row formula against the Hadamard-form `M`, relative; the per-row bound
/// chain must hold as well.
fn row_formula_case(i: usize, case: &RandomCase, tol: &Tolerances) -> Result<SuiteCase> {
    let ctx = context(case, tol)?;
    let (rows, skipped) = row_assembled_m(&ctx)?;
    let scale = spectral_norm(&ctx.m)?.max(f64::MIN_POSITIVE);
    let mut residual = spectral_norm(&(&rows - &ctx.m))? / scale;
    let broken = bound_chain(&ctx).iter().filter(|(l, r)| *l > r * (1.0 + 1e-10)).count();
    if broken > 0 {
        residual = f64::INFINITY;
    }
    let mut out = SuiteCase::new(i, case.seed, residual, 1e-8);
    if !skipped.is_empty() || broken > 0 {
        out = out.with_note(format!("{} rows skipped for underflow, {broken} bound-chain violations", skipped.len()));
    }
    Ok(out)
}

/// Node counts of the contour convergence ladder.
pub const CONTOUR_LADDER: [usize; 3] = [64, 128, 256];

/// Successive error ratios are acceptable when each is at least 10 or the
/// errors have already reached the roundoff floor.
pub fn ladder_contracts(errors: &[f64], floor: f64) -> bool {
    errors.windows(2).all(|w| w[0] / w[1] >= 10.0 || (w[0] <= floor && w[1] <= floor))
}

/// Resolvent quadrature around the first studied eigenvalue against its
/// eigen-projector, plus quadrature versus residues for `G` when a circle
/// separating both studied sets exists.
fn contour_case(i: usize, case: &RandomCase, tol: &Tolerances) -> Result<SuiteCase> {
    let ctx = context(case, tol)?;
    let ed = ctx.part.unpermute();
    let mu = ctx.part.lambda1[0];
    let k = ed.lambda.iter().position(|z| *z == mu).expect("studied eigenvalue present");
    let others: Vec<C<f64>> = ed.lambda.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, z)| *z).collect();
    let dist = others.iter().map(|z| (z - mu).norm()).fold(f64::INFINITY, f64::min);
    let radius = if dist.is_finite() { 0.5 * dist } else { 1.0 };
    let p_exact = ed.x.select_columns(&[k]).matmul(&ed.v.select_columns(&[k]).adjoint());
    let scale = spectral_norm(&p_exact)?.max(1.0);
    let mut errors = Vec::new();
    for nodes in CONTOUR_LADDER {
        let spec = ContourSpec { center: mu, radius, nodes };
        let p = contour_projector(&case.a, &ed, &spec, tol)?;
        errors.push(spectral_norm(&(&p - &p_exact))? / scale);
    }
    // the resolvent solves lose about κ2(X)² ulps
    let floor = (100.0 * f64::EPSILON * ed.kappa_x * ed.kappa_x).max(1e-12);
    let mut residual = *errors.last().expect("ladder nonempty");
    if !ladder_contracts(&errors, floor) {
        residual = f64::INFINITY;
    }
    let inside: Vec<C<f64>> = ctx.part.lambda1.iter().chain(&ctx.part_tilde.lambda1).copied().collect();
    let outside: Vec<C<f64>> = ctx.part.lambda2.iter().chain(&ctx.part_tilde.lambda2).copied().collect();
    let mut g_note = "no separating circle for G".to_string();
    if let Some(spec) = ContourSpec::around(&inside, &outside, 256, tol) {
        let g = residue_g(&ctx);
        let gq = residue_g_quadrature(&ctx, &spec, tol)?;
        let gerr = spectral_norm(&(&gq - &g))? / spectral_norm(&g)?.max(1.0);
        residual = residual.max(gerr);
        g_note = format!("G quadrature error {gerr:.3e}");
    }
    let errs: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    let ratios: Vec<String> = errors.windows(2).map(|w| format!("{:.2e}", w[0] / w[1])).collect();
    Ok(SuiteCase::new(i, case.seed, residual, 1e-8).with_note(format!(
        "errors [{}], ratios [{}], {g_note}",
        errs.join(", "),
        ratios.join(", ")
    )))
}

fn report(case: &RandomCase, a: &Matrix, da: &Matrix, tol: &Tolerances) -> Result<BoundReport> {
    full_report_with(a, da, &case.selector, &MatchStrategy::NearestAssignment, tol)
}

/// `measured ≤ per-j bound ≤ δλ-form bound`; residual is the larger of the
/// two ratios and must not exceed one.
fn dominance_case(i: usize, case: &RandomCase, tol: &Tolerances) -> Result<SuiteCase> {
    let rep = report(case, &case.a, &case.da, tol)?;
    if rep.gap_violated {
        return Err(Error::GapViolated { delta: rep.gap.delta_lambda });
    }
    let residual = (rep.measured_sin / rep.new_value_perj).max(rep.new_value_perj / rep.new_value_dl);
    Ok(SuiteCase::new(i, case.seed, residual, 1.0 + 1e-12))
}

/// New bound and measured distance under `(A, ΔA) → (tA, tΔA)`.
pub const SCALE_FACTORS: [f64; 2] = [1e-3, 1e3];

pub fn scaling_discrepancy(base: &BoundReport, scaled: &BoundReport) -> f64 {
    let rel = |x: f64, y: f64| if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()) };
    rel(base.new_value_perj, scaled.new_value_perj).max(rel(base.measured_sin, scaled.measured_sin))
}

/// Relative change of the measured distance that rounding `tA` and `tΔA`
/// alone can cause, to first order.
pub fn rounding_allowance(base: &BoundReport) -> f64 {
    10.0 * f64::EPSILON * base.kappa_x * (base.a_spec + base.da_spec) / (base.gap.delta1 * base.measured_sin)
}

/// Power-of-two factors must reproduce the base run exactly; decimal factors
/// within `1e-10` plus the input-rounding allowance.
fn scaling_case(i: usize, case: &RandomCase, tol: &Tolerances) -> Result<SuiteCase> {
    let base = report(case, &case.a, &case.da, tol)?;
    let mut worst: f64 = 0.0;
    for t in [0.125, 1024.0] {
        let scaled = report(case, &case.a.scale_real(t), &case.da.scale_real(t), tol)?;
        if scaling_discrepancy(&base, &scaled) != 0.0 {
            return Ok(SuiteCase::new(i, case.seed, f64::INFINITY, 0.0).with_note(format!("t = {t} not exact")));
        }
    }
    for t in SCALE_FACTORS {
        let scaled = report(case, &case.a.scale_real(t), &case.da.scale_real(t), tol)?;
        worst = worst.max(scaling_discrepancy(&base, &scaled));
    }
    Ok(SuiteCase::new(i, case.seed, worst, 1e-10 + rounding_allowance(&base)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma34".parse::<Suite>().is_err());
    }

    #[test]
    fn ladder_rule() {
        assert!(ladder_contracts(&[1e-3, 1e-5, 1e-9], 1e-12));
        assert!(ladder_contracts(&[1e-13, 2e-13, 1e-13], 1e-12));
        assert!(!ladder_contracts(&[1e-3, 5e-4, 1e-9], 1e-12));
    }

    #[test]
    fn json_records_have_five_fields() {
        let rep = run_suite(Suite::Hadamard, 7, 3, &Tolerances::default());
        let v = rep.to_json();
        let first = v.as_array().unwrap()[0].as_object().unwrap();
        let mut keys: Vec<&str> = first.keys().map(|k| k.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["case_id", "pass", "residual", "seed", "threshold"]);
        assert_eq!(v.as_array().unwrap()[2]["seed"], 9);
    }
}
