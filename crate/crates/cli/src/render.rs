//! Human-readable rendering with information quantities converted to bits.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use serde_json::Value;

/// Fields measured in nats.
const NATS: &[&str] = &[
    "delta",
    "delta_budget",
    "kl",
    "kl_taylor",
    "entropy_tilted",
    "entropy_gap",
    "entropy_gap_taylor",
    "divergence",
    "msg_nats",
    "key_nats",
    "rate",
    "tau",
    "threshold",
    "info_density_mean",
    "info_density_se",
    "expected_info_density_mean",
    "analytic_mutual_info",
    "covert_divergence",
    "psi_value",
    "resolvability_bound",
    "target_leak",
    "xi",
];

/// Fields measured in nats².
const NATS_SQUARED: &[&str] = &["log_pdf_variance", "info_density_var"];

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn walk(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                let bits = match v.as_f64() {
                    Some(x) if NATS.contains(&k.as_str()) => Some((x / LN_2, "bits")),
                    Some(x) if NATS_SQUARED.contains(&k.as_str()) => {
                        Some((x / (LN_2 * LN_2), "bits²"))
                    }
                    _ => None,
                };
                match bits {
                    Some((x, unit)) => {
                        let name = key.strip_suffix("_nats").unwrap_or(&key);
                        let _ = writeln!(out, "{name}: {x:.6} {unit}");
                    }
                    None if v.is_object() => walk(out, &key, v),
                    None => {
                        let _ = writeln!(out, "{key}: {}", scalar(v));
                    }
                }
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                walk(out, prefix, item);
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}: [{}]", joined.join(", "));
        }
        other => {
            let _ = writeln!(out, "{prefix}: {}", scalar(other));
        }
    }
}

pub fn human_bits(v: &Value) -> String {
    let mut out = String::new();
    walk(&mut out, "", v);
    out
}
