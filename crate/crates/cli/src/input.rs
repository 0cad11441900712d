use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use cheegernet_core::bundled;
use cheegernet_core::graphtools::{parse_edge_list, EdgeList};
use cheegernet_core::surface::{FamilySpec, SurfaceSpec};

/// Reads `path`, falling back to a bundled file of that name (`flute.json`,
/// `bundled:flute`) when no such file exists.
pub fn read_text(path: &str) -> Result<String> {
    let name = path.strip_prefix("bundled:");
    if name.is_none() && Path::new(path).exists() {
        return fs::read_to_string(path).with_context(|| format!("reading {path}"));
    }
    let name = name.unwrap_or(path);
    let stem = Path::new(name).file_name().and_then(|s| s.to_str()).unwrap_or(name);
    bundled::SPECS
        .iter()
        .chain(bundled::FAMILIES)
        .find(|(file, _)| *file == stem || file.strip_suffix(".json") == Some(stem))
        .map(|(_, text)| text.to_string())
        .with_context(|| format!("no such file or bundled example: {path}"))
}

pub fn load_family(path: &str) -> Result<FamilySpec> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing family {path}"))
}

pub enum GraphInput {
    Spec(SurfaceSpec),
    Edges(EdgeList),
}

/// A surface spec if the text is a JSON object, an edge list otherwise.
pub fn load_graph_input(path: &str) -> Result<GraphInput> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        let spec = serde_json::from_str(&text).with_context(|| format!("parsing surface spec {path}"))?;
        Ok(GraphInput::Spec(spec))
    } else {
        Ok(GraphInput::Edges(parse_edge_list(&text)?))
    }
}

/// Parses `lo..hi` (inclusive).
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("`{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// Parses a vertex list such as `0,3,5..9` (ranges inclusive).
pub fn parse_vertex_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part.contains("..") {
            let (lo, hi) = parse_range(part)?;
            if lo < 0 {
                return Err(format!("negative vertex in `{part}`"));
            }
            out.extend(lo as usize..=hi as usize);
        } else {
            out.push(part.parse().map_err(|e| format!("`{part}`: {e}"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
