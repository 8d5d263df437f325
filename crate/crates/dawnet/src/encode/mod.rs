//! Compilers from DAW-net reachability problems into external-solver input
//! formats: a BC action description with its timed ASP program translation,
//! classical PDDL, and SMV.

pub mod bc;
pub mod pddl;
pub mod smv;

use crate::data_model::Value;

/// Renders a value as a solver-side token: integers and booleans verbatim,
/// strings raw. Token collisions within one domain are rejected at encode
/// time.
pub fn value_token(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
    }
}

/// Sanitizes an identifier to alphanumerics and underscores.
pub fn sanitize(id: &str) -> String {
    let mut out: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if out.is_empty() || out.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        out.insert(0, 'x');
    }
    out
}
