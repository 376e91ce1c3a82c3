//! Human-readable rendering of plan, comparison, and validation
//! documents. The JSON form is canonical; these tables are for eyes.

use dbfrag::{FragmentationPlan, ValidationReport};
use serde_json::Value;

pub fn plan_table(plan: &FragmentationPlan) -> String {
    let mut out = String::new();
    out.push_str(&format!("method     {}\n", plan.method));
    out.push_str(&format!("converged  {}\n", plan.converged));
    out.push_str("fragments\n");
    let width = plan
        .fragments
        .iter()
        .map(|f| f.name.len())
        .max()
        .unwrap_or(0);
    for fragment in &plan.fragments {
        out.push_str(&format!(
            "  {:width$}  {}\n",
            fragment.name,
            fragment.members.join(", ")
        ));
        if let Some(materialize) = &fragment.materialize {
            out.push_str(&format!(
                "  {:width$}  materialize: {}\n",
                "",
                materialize.join(", ")
            ));
        }
    }
    if let Value::Object(params) = &plan.params {
        out.push_str("params\n");
        for (key, value) in params {
            out.push_str(&format!("  {key}  {}\n", scalar(value)));
        }
    }
    if !plan.metrics.is_empty() {
        out.push_str("metrics\n");
        for (key, value) in &plan.metrics {
            out.push_str(&format!("  {key}  {value}\n"));
        }
    }
    out
}

pub fn report_table(report: &ValidationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("valid  {}\n", report.valid));
    if !report.violations.is_empty() {
        out.push_str("violations\n");
        for violation in &report.violations {
            let kind = serde_json::to_value(violation.kind).expect("kind serializes");
            out.push_str(&format!("  {}  {}\n", scalar(&kind), violation.detail));
        }
    }
    out
}

pub fn compare_table(
    vertical: Option<bool>,
    horizontal: Option<bool>,
    agreement: bool,
    plans: &[FragmentationPlan],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("agreement  {agreement}\n"));
    if let Some(v) = vertical {
        out.push_str(&format!("vertical   {v}  (ko-vertical vs bea)\n"));
    }
    if let Some(h) = horizontal {
        out.push_str(&format!("horizontal {h}  (ko-horizontal vs phorizontal)\n"));
    }
    for plan in plans {
        out.push('\n');
        out.push_str(&plan_table(plan));
    }
    out
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
