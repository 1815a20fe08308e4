//! The bundled classification rows and example tables.

use serde::{Deserialize, Serialize};

use super::{builtin, ScenarioError};
use crate::surface::{canonical_degree, genus_additivity, SurfaceInvariants};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRow {
    pub case: String,
    /// Built-in scenario carrying the row's invariants.
    pub context: String,
    pub k: i64,
    #[serde(rename = "KK")]
    pub kk: i64,
    pub surface: String,
    pub components: Vec<(i64, i64)>,
    /// `"unknown"` or `"constructed"`, as tabulated.
    pub existence: String,
    #[serde(default)]
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleRow {
    pub label: String,
    pub k: i64,
    #[serde(rename = "KK")]
    pub kk: i64,
    pub components: Vec<(i64, i64)>,
    pub quotient: String,
    pub case: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleTable {
    pub name: String,
    pub source: String,
    pub rows: Vec<ExampleRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledCandidate {
    pub label: String,
    pub components: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreliminaryList {
    pub context: String,
    pub entries: Vec<LabelledCandidate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixtures {
    pub version: u32,
    pub rows: Vec<FixtureRow>,
    pub example_tables: Vec<ExampleTable>,
    /// The nine-entry list for nine nodes that the refinement starts from.
    pub preliminary_k9: PreliminaryList,
}

pub const FIXTURES_SOURCE: &str = include_str!("../../data/fixtures.json");

fn bad(msg: String) -> ScenarioError {
    ScenarioError::InvariantViolation(msg)
}

/// `Σ K.Γ = K.B0`, `Σ Γ² = B0²` and additivity against `p_a(B0)`.
pub fn validate_components(inv: &SurfaceInvariants, comps: &[(i64, i64)]) -> Result<(), String> {
    if comps.is_empty() {
        return Err("no components".into());
    }
    if let Some(&(g, _)) = comps.iter().find(|c| c.0 < 0) {
        return Err(format!("negative genus {g}"));
    }
    let kb: i64 = comps.iter().map(|&(g, ss)| canonical_degree(g, ss)).sum();
    let bb: i64 = comps.iter().map(|c| c.1).sum();
    if kb != inv.kb {
        return Err(format!("sum of K.G is {kb}, expected {}", inv.kb));
    }
    if bb != inv.bb {
        return Err(format!("sum of self-intersections is {bb}, expected {}", inv.bb));
    }
    let genera: Vec<i64> = comps.iter().map(|c| c.0).collect();
    let pa = inv.pa().map_err(|e| e.to_string())?;
    let add = genus_additivity(&genera).map_err(|e| e.to_string())?;
    if add != pa {
        return Err(format!("genus additivity gives {add}, p_a(B0) = {pa}"));
    }
    Ok(())
}

pub fn parse_fixtures(text: &str) -> Result<Fixtures, ScenarioError> {
    let f: Fixtures = serde_json::from_str(text).map_err(|e| ScenarioError::Schema {
        path: "fixtures".into(),
        reason: e.to_string(),
    })?;
    validate_fixtures(&f)?;
    Ok(f)
}

pub fn validate_fixtures(f: &Fixtures) -> Result<(), ScenarioError> {
    for r in &f.rows {
        let ctx = builtin(&r.context)?;
        let inv = ctx.invariants;
        if inv.k != r.k || inv.kk != r.kk {
            return Err(bad(format!("row {}: k/K^2 disagree with {}", r.case, r.context)));
        }
        if r.existence != "unknown" && r.existence != "constructed" {
            return Err(bad(format!("row {}: existence tag {:?}", r.case, r.existence)));
        }
        if (r.existence == "unknown") != r.sources.is_empty() {
            return Err(bad(format!("row {}: sources do not match existence tag", r.case)));
        }
        validate_components(&inv, &r.components).map_err(|m| bad(format!("row {}: {m}", r.case)))?;
    }
    for t in &f.example_tables {
        for e in &t.rows {
            let main = f
                .rows
                .iter()
                .find(|r| r.case == e.case)
                .ok_or_else(|| bad(format!("{} {}: no row {}", t.name, e.label, e.case)))?;
            if main.k != e.k || main.kk != e.kk || !same_multiset(&main.components, &e.components) {
                return Err(bad(format!("{} {}: disagrees with row {}", t.name, e.label, e.case)));
            }
            if !main.sources.contains(&t.source) {
                return Err(bad(format!("{} {}: row {} does not list the source", t.name, e.label, e.case)));
            }
        }
    }
    let ctx = builtin(&f.preliminary_k9.context)?;
    for e in &f.preliminary_k9.entries {
        validate_components(&ctx.invariants, &e.components)
            .map_err(|m| bad(format!("preliminary ({}): {m}", e.label)))?;
    }
    Ok(())
}

fn same_multiset(a: &[(i64, i64)], b: &[(i64, i64)]) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort();
    b.sort();
    a == b
}

/// The validated bundled fixtures.
pub fn load_fixtures() -> Result<Fixtures, ScenarioError> {
    parse_fixtures(FIXTURES_SOURCE)
}
