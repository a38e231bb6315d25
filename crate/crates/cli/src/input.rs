//! Graph sources, switching specs and candidate lists as given on the command line.

use std::fs;
use std::path::Path;

use serde_json::Value;
use spectral_switch::graph::{decode_graph6, EdgeListJson, Graph, VertexSet};
use spectral_switch::schemes::{build_with_cap, SchemeParams, DEFAULT_VERTEX_CAP};
use spectral_switch::switching::SwitchSpec;

use crate::CliError;

pub const CAP_ENV: &str = "SPECTRAL_SWITCH_CAP";

pub fn vertex_cap() -> Result<usize, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CAP_ENV}={v:?} is not a vertex count"))),
        Err(_) => Ok(DEFAULT_VERTEX_CAP),
    }
}

/// Scheme parameters such as `J{2}(8,4)`, or a path to a graph6 or
/// edge-list JSON file.
pub fn load_graph(source: &str) -> Result<Graph, CliError> {
    let looks_like_params = source.starts_with('J') && source.contains('(') && !Path::new(source).exists();
    if looks_like_params {
        let params: SchemeParams = source.parse()?;
        return Ok(build_with_cap(&params, vertex_cap()?)?);
    }
    let bytes = fs::read(source).map_err(|e| CliError::Usage(format!("cannot read graph {source}: {e}")))?;
    if source.ends_with(".json") {
        let e: EdgeListJson = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Invalid(format!("{source}: not an edge-list JSON graph: {e}")))?;
        return Ok(Graph::from_edge_list(&e)?);
    }
    let g = decode_graph6(&bytes)?;
    let cap = vertex_cap()?;
    if g.n() > cap {
        return Err(spectral_switch::Error::CapExceeded { count: g.n() as u128, cap }.into());
    }
    Ok(g)
}

fn normalize_label(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Replaces label strings like `"{1,2,3,4}"` by vertex indices, recursively.
fn resolve_labels(g: &Graph, v: Value) -> Result<Value, CliError> {
    Ok(match v {
        Value::String(s) => {
            let label = normalize_label(&s);
            let idx = g
                .find_label(&label)
                .ok_or_else(|| CliError::Invalid(format!("no vertex labelled {s:?}")))?;
            Value::from(idx)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(|x| resolve_labels(g, x)).collect::<Result<_, _>>()?),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, x)| Ok((k, resolve_labels(g, x)?)))
                .collect::<Result<_, CliError>>()?,
        ),
        other => other,
    })
}

pub fn load_spec(path: &Path, g: &Graph) -> Result<SwitchSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read spec {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("spec is not JSON: {e}")))?;
    let resolved = resolve_labels(g, raw)?;
    serde_json::from_value(resolved).map_err(|e| CliError::Invalid(format!("malformed switching spec: {e}")))
}

/// A JSON list of vertex sets, each given by indices or labels.
pub fn load_candidates(path: &Path, g: &Graph) -> Result<Vec<VertexSet>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("candidates are not JSON: {e}")))?;
    let resolved = resolve_labels(g, raw)?;
    serde_json::from_value(resolved).map_err(|e| CliError::Invalid(format!("malformed candidate list: {e}")))
}

/// `"1-9"` or `"10,11"` or a mix like `"1-3,7"`.
pub fn parse_elements(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse element list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}
