use serde_json::{json, Map, Value};

use crate::partition::GapReport;
use crate::scalar::C;

/// All quantities of one bound evaluation, in binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub r: usize,
    pub selector: String,
    pub lambda1: Vec<C<f64>>,
    pub lambda2: Vec<C<f64>>,
    pub lambda1_tilde: Vec<C<f64>>,
    /// Base eig position paired with each perturbed eig position, when matched by assignment.
    pub assignment: Option<Vec<usize>>,
    pub gap: GapReport,
    pub a: f64,
    pub a_spec: f64,
    pub kappa_x: f64,
    pub kappa_x1: f64,
    pub kappa_v2: f64,
    pub da_spec: f64,
    pub da_frob: f64,
    pub classical_value: f64,
    pub classical_valid: bool,
    pub new_value_perj: f64,
    pub new_value_dl: f64,
    /// `None` when the Sylvester operator exceeds the size cap.
    pub sep_frob: Option<f64>,
    pub sep_lower: f64,
    pub stewart_condition_ok: bool,
    pub measured_sin: f64,
    pub measured_tan: f64,
    /// `‖ΔA‖ / (σ_min(X) σ_min(X1))`, without the unknown constant.
    pub varah_unscaled: f64,
    pub gap_violated: bool,
    pub dominance_ok: bool,
}

/// 17 significant digits; `inf`, `-inf`, `nan` spelled out.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn complex_list(v: &[C<f64>]) -> Value {
    Value::Array(v.iter().map(|z| json!([fmt_real(z.re), fmt_real(z.im)])).collect())
}

impl BoundReport {
    /// Whether any assumption flag fired.
    pub fn assumption_flagged(&self) -> bool {
        self.gap_violated || !self.classical_valid
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        put("n", json!(self.n));
        put("r", json!(self.r));
        put("selector", json!(self.selector));
        put("lambda1", complex_list(&self.lambda1));
        put("lambda2", complex_list(&self.lambda2));
        put("lambda1_tilde", complex_list(&self.lambda1_tilde));
        put("assignment", self.assignment.as_ref().map_or(Value::Null, |a| json!(a)));
        put("delta0", json!(fmt_real(self.gap.delta0)));
        put("delta1", json!(fmt_real(self.gap.delta1)));
        put("delta_lambda", json!(fmt_real(self.gap.delta_lambda)));
        put("t0_star", json!([fmt_real(self.gap.t0_star.re), fmt_real(self.gap.t0_star.im)]));
        put("a", json!(fmt_real(self.a)));
        put("a_spec", json!(fmt_real(self.a_spec)));
        put("kappa_X", json!(fmt_real(self.kappa_x)));
        put("kappa_X1", json!(fmt_real(self.kappa_x1)));
        put("kappa_V2", json!(fmt_real(self.kappa_v2)));
        put("dA_spec", json!(fmt_real(self.da_spec)));
        put("dA_frob", json!(fmt_real(self.da_frob)));
        put("classical_value", json!(fmt_real(self.classical_value)));
        put("classical_valid", json!(self.classical_valid));
        put("new_value_perj", json!(fmt_real(self.new_value_perj)));
        put("new_value_dl", json!(fmt_real(self.new_value_dl)));
        put("sep_frob", self.sep_frob.map_or(Value::Null, |s| json!(fmt_real(s))));
        put("sep_lower", json!(fmt_real(self.sep_lower)));
        put("stewart_condition_ok", json!(self.stewart_condition_ok));
        put("measured_sin", json!(fmt_real(self.measured_sin)));
        put("measured_tan", json!(fmt_real(self.measured_tan)));
        put("varah_unscaled", json!(fmt_real(self.varah_unscaled)));
        put("gap_violated", json!(self.gap_violated));
        put("dominance_ok", json!(self.dominance_ok));
        Value::Object(m)
    }
}
