//! Textual state descriptors.
//!
//! ```text
//! descriptor := simple | "mix:" component ("+" component)*
//! component  := weight "*" simple
//! simple     := kind ":" pair ("," pair)*
//! kind       := "gaussian" | "hermite" | "squarewell"
//! pair       := key "=" number
//! ```
//!
//! Keys: `gaussian` takes `sigma` (required), `x0`, `p0`; `hermite` takes
//! `n`, `sigma`; `squarewell` takes `n`, `L`. Whitespace is not allowed.

use cg_uncert::states::StateModel;

use crate::error::{CliError, CliResult};

fn err(descriptor: &str, message: impl Into<String>) -> CliError {
    CliError::Descriptor {
        descriptor: descriptor.to_string(),
        message: message.into(),
    }
}

/// Parses a descriptor into a state with reduced Planck constant `hbar`.
pub fn parse_state(text: &str, hbar: f64) -> CliResult<StateModel> {
    if text.chars().any(char::is_whitespace) {
        return Err(err(text, "whitespace is not allowed"));
    }
    if let Some(rest) = text.strip_prefix("mix:") {
        let mut components = Vec::new();
        for part in split_components(rest) {
            let (w, desc) = part.split_once('*').ok_or_else(|| {
                err(
                    text,
                    format!("mixture component `{part}` needs the form weight*descriptor"),
                )
            })?;
            let weight: f64 = w
                .parse()
                .map_err(|_| err(text, format!("mixture weight `{w}` is not a number")))?;
            if desc.starts_with("mix:") {
                return Err(err(text, "nested mixtures are not supported"));
            }
            components.push((weight, parse_simple(desc, hbar)?));
        }
        return Ok(StateModel::mixture(components)?);
    }
    parse_simple(text, hbar)
}

/// Splits on `+` except where it is an exponent sign such as `1e+3`.
fn split_components(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 0..bytes.len() {
        if bytes[i] == b'+' && !(i > 0 && matches!(bytes[i - 1], b'e' | b'E')) {
            parts.push(&s[start..i]);
            start = i + 1;
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_simple(text: &str, hbar: f64) -> CliResult<StateModel> {
    let (kind, args) = text
        .split_once(':')
        .ok_or_else(|| err(text, "expected kind:key=value,..."))?;
    let allowed: &[&str] = match kind {
        "gaussian" => &["sigma", "x0", "p0"],
        "hermite" => &["n", "sigma"],
        "squarewell" => &["n", "L"],
        other => return Err(err(text, format!("unknown state kind `{other}`"))),
    };
    let mut values: Vec<(&str, f64)> = Vec::new();
    for pair in args.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| err(text, format!("`{pair}` is not a key=value pair")))?;
        if !allowed.contains(&key) {
            return Err(err(
                text,
                format!(
                    "unknown field `{key}` for {kind} (expected one of {})",
                    allowed.join(", ")
                ),
            ));
        }
        if values.iter().any(|(k, _)| *k == key) {
            return Err(err(text, format!("field `{key}` given twice")));
        }
        let v: f64 = value.parse().map_err(|_| {
            err(
                text,
                format!("field `{key}` has non-numeric value `{value}`"),
            )
        })?;
        values.push((key, v));
    }
    let get = |key: &str| values.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let need =
        |key: &str| get(key).ok_or_else(|| err(text, format!("missing field `{key}` for {kind}")));
    let level = |key: &str| -> CliResult<u32> {
        let v = need(key)?;
        if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
            return Err(err(
                text,
                format!("field `{key}` must be a nonnegative integer, got {v}"),
            ));
        }
        Ok(v as u32)
    };
    let state = match kind {
        "gaussian" => StateModel::gaussian_at(
            get("x0").unwrap_or(0.0),
            get("p0").unwrap_or(0.0),
            need("sigma")?,
            hbar,
        ),
        "hermite" => StateModel::hermite(level("n")?, need("sigma")?, hbar),
        _ => StateModel::square_well(level("n")?, need("L")?, hbar),
    };
    Ok(state?)
}
