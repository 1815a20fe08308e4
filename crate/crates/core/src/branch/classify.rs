use super::enumerate::{component_cap, enumerate_candidates, ConstraintSet};
use super::filter::{filter_labelled, FilterContext};
use super::{BranchCandidate, BranchError, ClassificationTable, KeptRow};
use crate::scenario::{builtin, load_fixtures};

/// Accepted `(k, variant)` pairs.
pub const VARIANTS: &[(i64, &str)] = &[
    (5, "fixture"),
    (7, "fixture"),
    (7, "fixture-general-type"),
    (7, "fixture-non-minimal"),
    (7, "fixture-elliptic"),
    (9, "rational"),
    (9, "enriques-fixture"),
    (11, "rational"),
];

/// Fixture rows for the given contexts, as a table of kept rows.
pub fn fixture_table(name: &str, contexts: &[&str]) -> Result<ClassificationTable, BranchError> {
    let fx = load_fixtures()?;
    let kept = fx
        .rows
        .iter()
        .filter(|r| contexts.contains(&r.context.as_str()))
        .map(|r| KeptRow {
            label: Some(r.case.clone()),
            candidate: BranchCandidate::from_pairs(&r.components),
            classes: Vec::new(),
            existence: Some(r.existence.clone()),
            sources: r.sources.clone(),
            certificates: Vec::new(),
        })
        .collect();
    Ok(ClassificationTable { scenario: name.to_string(), kept, ..Default::default() })
}

fn nine_rational() -> Result<ClassificationTable, BranchError> {
    let s = builtin("k9-rational")?;
    let cs = ConstraintSet::generic(0);
    let all = enumerate_candidates(&s.invariants, &cs)?;
    let fx = load_fixtures()?;
    let mut list = Vec::new();
    for e in &fx.preliminary_k9.entries {
        let c = BranchCandidate::from_pairs(&e.components);
        if !all.contains(&c) {
            return Err(BranchError::MissingData(format!("preliminary entry ({}) {c} is not enumerated", e.label)));
        }
        list.push((Some(e.label.clone()), c));
    }
    let mut table = filter_labelled(&list, &s)?;
    table.enumerated = Some(all.len());
    table.component_cap = Some(component_cap(&s.invariants, &cs)?);
    Ok(table)
}

fn eleven_rational() -> Result<ClassificationTable, BranchError> {
    let s = builtin("k11")?;
    let ctx = FilterContext::new(&s)?;
    let cs = ConstraintSet { min_d: 1, max_components: None, fibration: Some(ctx.fibration.clone()) };
    let all = enumerate_candidates(&s.invariants, &cs)?;
    let list: Vec<_> = all.iter().map(|c| (None, c.clone())).collect();
    let mut table = filter_labelled(&list, &s)?;
    table.enumerated = Some(all.len());
    table.component_cap = Some(component_cap(&s.invariants, &cs)?);
    Ok(table)
}

/// Runs a classification. Computed variants enumerate and filter; fixture
/// variants report the recorded rows.
pub fn classify(k: i64, variant: &str) -> Result<ClassificationTable, BranchError> {
    match (k, variant) {
        (9, "rational") => nine_rational(),
        (11, "rational") => eleven_rational(),
        (9, "enriques-fixture") => fixture_table("k9-enriques", &["k9-enriques"]),
        (5, "fixture") => fixture_table("k5", &["k5"]),
        (7, "fixture") => fixture_table("k7", &["k7-general-type", "k7-non-minimal", "k7-elliptic"]),
        (7, "fixture-general-type") => fixture_table("k7-general-type", &["k7-general-type"]),
        (7, "fixture-non-minimal") => fixture_table("k7-non-minimal", &["k7-non-minimal"]),
        (7, "fixture-elliptic") => fixture_table("k7-elliptic", &["k7-elliptic"]),
        _ => Err(BranchError::UnknownVariant { k, variant: variant.to_string() }),
    }
}

/// Default variant for `k`.
pub fn default_variant(k: i64) -> &'static str {
    match k {
        9 | 11 => "rational",
        _ => "fixture",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_nodes() {
        let t = classify(11, "rational").unwrap();
        let kept: Vec<String> = t.kept.iter().map(|r| r.candidate.to_string()).collect();
        assert_eq!(kept, ["(4,-2)", "(3,0)+(2,-2)", "(3,-2)+(2,0)"]);
        assert_eq!(t.excluded.len(), 1);
        assert_eq!(t.excluded[0].certificate.rule, "pencil_exclusion");
        let c1: Vec<String> = t.kept[1].classes.iter().map(|c| c.class.to_string()).collect();
        assert_eq!(c1, ["-2K+2F", "-2K+F+2G+N0"]);
        let c2: Vec<String> = t.kept[2].classes.iter().map(|c| c.class.to_string()).collect();
        assert_eq!(c2, ["-3K+2F+2G+N0", "-K+F"]);
    }

    #[test]
    fn nine_nodes() {
        let t = classify(9, "rational").unwrap();
        assert_eq!(t.kept.len(), 4);
        assert_eq!(t.excluded.len(), 5);
        assert!(t.enumerated.unwrap() >= 9);
    }

    #[test]
    fn fixtures_and_unknown() {
        assert_eq!(classify(9, "enriques-fixture").unwrap().kept.len(), 2);
        assert_eq!(classify(5, "fixture").unwrap().kept.len(), 1);
        assert_eq!(classify(7, "fixture").unwrap().kept.len(), 5);
        assert!(matches!(classify(13, "rational"), Err(BranchError::UnknownVariant { .. })));
    }
}
