//! The regression catalog: families with known verdicts.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};
use stocomp_core::harmonic::Status;
use stocomp_core::GraphFamily;

use crate::input::parse_family;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub family: GraphFamily,
    pub expected: Status,
    /// Why the verdict holds.
    pub source: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    family: Value,
    expected: String,
    source: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    entries: Vec<RawEntry>,
}

pub fn parse_status(field: &str, s: &str) -> Result<Status> {
    Ok(match s {
        "incomplete" => Status::Incomplete,
        "complete" => Status::Complete,
        "inconclusive" => Status::Inconclusive,
        other => bail!("{field}: unknown verdict `{other}` (incomplete, complete, inconclusive)"),
    })
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Incomplete => "incomplete",
        Status::Complete => "complete",
        Status::Inconclusive => "inconclusive",
    }
}

/// Parses a catalog document `{"entries": [...]}`. Empty input and empty
/// entry lists are errors.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    if text.trim().is_empty() {
        bail!("catalog file is empty");
    }
    let raw: RawCatalog = serde_json::from_str(text).context("catalog")?;
    if raw.entries.is_empty() {
        bail!("catalog has no entries");
    }
    raw.entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let field = format!("entries[{i}] ({})", e.name);
            Ok(CatalogEntry {
                family: parse_family(&format!("{field}.family"), &e.family)?,
                expected: parse_status(&format!("{field}.expected"), &e.expected)?,
                name: e.name,
                source: e.source,
            })
        })
        .collect()
}

/// The built-in catalog as a JSON document.
pub fn builtin_json() -> Value {
    json!({"entries": [
        {
            "name": "quadratic-tree",
            "family": {"family": "tree", "k": "poly:2"},
            "expected": "incomplete",
            "source": "tree with k(r) = (r+1)^2: sum of 1/k(r) converges"
        },
        {
            "name": "binary-tree",
            "family": {"family": "tree", "k": "const:2"},
            "expected": "complete",
            "source": "bounded valence"
        },
        {
            "name": "linear-tree",
            "family": {"family": "tree", "k": "poly:1"},
            "expected": "complete",
            "source": "sum of 1/K+(r) = sum of 1/(r+1) diverges"
        },
        {
            "name": "quadratic-tree-complete-spheres",
            "family": {"family": "intra-sphere-tree", "k": "poly:2", "intra": "complete"},
            "expected": "incomplete",
            "source": "same-sphere edges cancel in the radial equation"
        },
        {
            "name": "quadratic-antitree",
            "family": {"family": "antitree", "S": "poly:2"},
            "expected": "complete",
            "source": "antitree S(r) = (r+1)^2 has k+(r) = (r+2)^2 and sum V/(k+ S) diverges"
        },
        {
            "name": "cubic-antitree",
            "family": {"family": "antitree", "S": {"kind": "polynomial", "p": 3}},
            "expected": "incomplete",
            "source": "antitree S(r) = (r+1)^3: polynomial volume, sum V/(k+ S) converges"
        },
        {
            "name": "decorated-quadratic-tree",
            "family": {"family": "decorated-tree", "k": "poly:2", "k_tilde": "poly:1"},
            "expected": "complete",
            "source": "k(r) = (r+1)^2, r+1 end vertices per vertex: sum (k~+1)/k diverges"
        },
        {
            "name": "decorated-cubic-tree",
            "family": {"family": "decorated-tree", "k": "poly:3", "k_tilde": "poly:1"},
            "expected": "incomplete",
            "source": "k(r) = (r+1)^3, r+1 end vertices per vertex: sum (k~+1)/k converges"
        },
        {
            "name": "cubic-weighted-path",
            "family": {"family": "weighted-path", "a": "poly:3"},
            "expected": "incomplete",
            "source": "a(r) = (r+1)^3: sum r/a(r) converges"
        },
        {
            "name": "linear-weighted-path",
            "family": {"family": "weighted-path", "a": "poly:1"},
            "expected": "complete",
            "source": "a(r) = r+1: sum r/a(r) diverges"
        }
    ]})
}

pub fn builtin() -> Vec<CatalogEntry> {
    parse_catalog(&builtin_json().to_string()).expect("built-in catalog parses")
}
