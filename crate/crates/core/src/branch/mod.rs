//! Candidate decompositions of the branch divisor into disjoint smooth
//! components, their enumeration, filtering and classification tables.

pub mod classify;
pub mod enumerate;
pub mod filter;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::certificate::Certificate;
use crate::engine::EngineError;
use crate::lattice::LatticeError;
use crate::scenario::ScenarioError;
use crate::surface::SurfaceError;

pub use classify::{classify, fixture_table, VARIANTS};
pub use enumerate::{component_cap, component_types, enumerate_candidates, verify_candidate, ConstraintSet, FibrationData};
pub use filter::{filter_candidates, filter_labelled, solve_component_classes, FilterContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error("search is not finite: {0}")]
    UnboundedSearch(String),
    #[error("no classification variant {variant:?} for k = {k}")]
    UnknownVariant { k: i64, variant: String },
    #[error("cannot parse candidate {0:?}")]
    Parse(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// A smooth component of genus `g` with `Γ² = ss`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    pub g: i64,
    pub ss: i64,
}

impl Component {
    pub fn new(g: i64, ss: i64) -> Self {
        Self { g, ss }
    }

    /// `K.Γ` by adjunction.
    pub fn kappa(&self) -> i64 {
        crate::surface::canonical_degree(self.g, self.ss)
    }

    /// `D.Γ = 2K.Γ + Γ²`, using `Γ.B0 = Γ²` for a disjoint component.
    pub fn d_degree(&self) -> i64 {
        2 * self.kappa() + self.ss
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.ss)
    }
}

/// Components sorted descending by `(g, ss)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchCandidate {
    components: Vec<Component>,
}

impl BranchCandidate {
    pub fn new(mut components: Vec<Component>) -> Self {
        components.sort_by(|a, b| b.cmp(a));
        Self { components }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Self::new(pairs.iter().map(|&(g, ss)| Component::new(g, ss)).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn genera(&self) -> Vec<i64> {
        self.components.iter().map(|c| c.g).collect()
    }

    pub fn kappa_sum(&self) -> i64 {
        self.components.iter().map(Component::kappa).sum()
    }

    pub fn ss_sum(&self) -> i64 {
        self.components.iter().map(|c| c.ss).sum()
    }

    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.components.iter().map(|c| (c.g, c.ss)).collect()
    }
}

/// Descending on the sorted component lists.
impl Ord for BranchCandidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.components.cmp(&self.components)
    }
}

impl PartialOrd for BranchCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BranchCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for BranchCandidate {
    type Err = BranchError;

    /// `(3,0)+(1,-2)`, whitespace ignored.
    fn from_str(s: &str) -> Result<Self, BranchError> {
        let bad = || BranchError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut comps = Vec::new();
        for part in compact.split('+') {
            let inner = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(bad)?;
            let (g, ss) = inner.split_once(',').ok_or_else(bad)?;
            let g: i64 = g.parse().map_err(|_| bad())?;
            let ss: i64 = ss.parse().map_err(|_| bad())?;
            if g < 0 {
                return Err(bad());
            }
            comps.push(Component::new(g, ss));
        }
        Ok(Self::new(comps))
    }
}

impl Serialize for BranchCandidate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BranchCandidate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Lines of `label: candidate` or bare candidates; `#` starts a comment.
pub fn parse_candidate_list(text: &str) -> Result<Vec<(Option<String>, BranchCandidate)>, BranchError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once(':') {
            Some((label, rest)) => out.push((Some(label.trim().to_string()), rest.parse()?)),
            None => out.push((None, line.parse()?)),
        }
    }
    Ok(out)
}

/// Divisor class of a component, or nothing forced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassExpr {
    Forced(String),
    Undetermined,
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpr::Forced(e) => f.write_str(e),
            ClassExpr::Undetermined => f.write_str("UNDETERMINED"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentClass {
    pub name: String,
    pub component: Component,
    pub class: ClassExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeptRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub candidate: BranchCandidate,
    pub classes: Vec<ComponentClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub existence: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub candidate: BranchCandidate,
    /// The certificate whose verdict removes the candidate.
    pub certificate: Certificate,
    /// Certificates the killing step depends on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<Certificate>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTable {
    pub scenario: String,
    pub kept: Vec<KeptRow>,
    pub excluded: Vec<ExcludedRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_cap: Option<usize>,
    /// Size of the unfiltered enumeration, when one was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumerated: Option<usize>,
}

fn pad(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(w.saturating_sub(n)))
}

impl ClassificationTable {
    pub fn kept_candidates(&self) -> Vec<&BranchCandidate> {
        self.kept.iter().map(|r| &r.candidate).collect()
    }

    pub fn excluded_candidates(&self) -> Vec<&BranchCandidate> {
        self.excluded.iter().map(|r| &r.candidate).collect()
    }

    pub fn row(&self, c: &BranchCandidate) -> Option<&KeptRow> {
        self.kept.iter().find(|r| &r.candidate == c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Aligned plain-text table in `(g, Γ²)` notation.
    pub fn render_table(&self) -> String {
        let mut out = format!("classification: {}\n", self.scenario);
        if let Some(n) = self.enumerated {
            out.push_str(&format!("enumerated candidates: {n}\n"));
        }
        if let Some(c) = self.component_cap {
            out.push_str(&format!("component cap: {c}\n"));
        }
        let label = |l: &Option<String>, i: usize| l.clone().unwrap_or_else(|| (i + 1).to_string());
        let mut rows: Vec<[String; 4]> = vec![["case".into(), "B0".into(), "classes".into(), "status".into()]];
        for (i, r) in self.kept.iter().enumerate() {
            let classes = if r.classes.is_empty() {
                "-".to_string()
            } else {
                r.classes.iter().map(|c| format!("{} ≡ {}", c.name, c.class)).collect::<Vec<_>>().join("; ")
            };
            let status = match &r.existence {
                Some(e) if !r.sources.is_empty() => format!("{e} [{}]", r.sources.join("; ")),
                Some(e) => e.clone(),
                None => "kept".into(),
            };
            rows.push([label(&r.label, i), r.candidate.to_string(), classes, status]);
        }
        let w: Vec<usize> = (0..3).map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
        out.push_str("kept:\n");
        for r in &rows {
            let line = format!("  {}  {}  {}  {}", pad(&r[0], w[0]), pad(&r[1], w[1]), pad(&r[2], w[2]), r[3]);
            out.push_str(line.trim_end());
            out.push('\n');
        }
        if !self.excluded.is_empty() {
            out.push_str("excluded:\n");
            let rows: Vec<[String; 3]> = self
                .excluded
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    [label(&r.label, i), r.candidate.to_string(), format!("{}: {}", r.certificate.rule, r.certificate.conclusion)]
                })
                .collect();
            let w: Vec<usize> = (0..2).map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
            for r in &rows {
                out.push_str(&format!("  {}  {}  {}\n", pad(&r[0], w[0]), pad(&r[1], w[1]), r[2]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_parse_and_order() {
        let c: BranchCandidate = "(1,-2) + (3,0)".parse().unwrap();
        assert_eq!(c.to_string(), "(3,0)+(1,-2)");
        assert_eq!(c.kappa_sum(), 6);
        assert_eq!(c.ss_sum(), -2);
        assert!("(1,-2)+".parse::<BranchCandidate>().is_err());
        assert!("(-1,2)".parse::<BranchCandidate>().is_err());
        assert!("".parse::<BranchCandidate>().is_err());
        let mut v = [BranchCandidate::from_pairs(&[(2, -2), (2, 0)]), BranchCandidate::from_pairs(&[(3, -2)])];
        v.sort();
        assert_eq!(v[0].to_string(), "(3,-2)");
    }

    #[test]
    fn component_degrees() {
        let c = Component::new(3, 2);
        assert_eq!((c.kappa(), c.d_degree()), (2, 6));
        assert_eq!(Component::new(0, -4).d_degree(), 0);
    }

    #[test]
    fn candidate_list_file() {
        let list = parse_candidate_list("# k9\na: (4,2)+(0,-4)\n(3,-2)\n\n").unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list[0].0.as_deref(), Some("a"));
        assert_eq!(list[1].1.to_string(), "(3,-2)");
    }
}
