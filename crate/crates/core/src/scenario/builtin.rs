//! Scenario documents shipped with the crate.

use std::path::Path;

use super::{load_scenario, Scenario, ScenarioError};

const BUILTIN: &[(&str, &str)] = &[
    ("k9-rational", include_str!("../../data/k9-rational.json")),
    ("k9-case-f", include_str!("../../data/k9-case-f.json")),
    ("k9-case-h", include_str!("../../data/k9-case-h.json")),
    ("k9-fibres-i", include_str!("../../data/k9-fibres-i.json")),
    ("k9-fibres-ii", include_str!("../../data/k9-fibres-ii.json")),
    ("k9-enriques", include_str!("../../data/k9-enriques.json")),
    ("k11", include_str!("../../data/k11.json")),
    ("k11-r2", include_str!("../../data/k11-r2.json")),
    ("k11-fibres-i", include_str!("../../data/k11-fibres-i.json")),
    ("k11-fibres-ii", include_str!("../../data/k11-fibres-ii.json")),
    ("k5", include_str!("../../data/k5.json")),
    ("k7-general-type", include_str!("../../data/k7-general-type.json")),
    ("k7-non-minimal", include_str!("../../data/k7-non-minimal.json")),
    ("k7-elliptic", include_str!("../../data/k7-elliptic.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Raw document text of a built-in scenario.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    let text = builtin_source(name).ok_or_else(|| ScenarioError::NotFound(name.to_string()))?;
    load_scenario(text)
}

/// Every built-in scenario, in a fixed order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    BUILTIN
        .iter()
        .map(|(n, t)| load_scenario(t).unwrap_or_else(|e| panic!("built-in {n} is invalid: {e}")))
        .collect()
}

/// A path on disk wins over a built-in name.
pub fn resolve_scenario(arg: &str) -> Result<Scenario, ScenarioError> {
    let p = Path::new(arg);
    if p.is_file() {
        let text = std::fs::read_to_string(p).map_err(|e| ScenarioError::Schema {
            path: arg.to_string(),
            reason: e.to_string(),
        })?;
        return load_scenario(&text);
    }
    builtin(arg).map_err(|e| match e {
        ScenarioError::NotFound(_) => ScenarioError::Schema {
            path: arg.to_string(),
            reason: "no such file or built-in scenario".into(),
        },
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gram_matrix, signature, DivisorClass};
    use num_rational::BigRational;

    #[test]
    fn all_builtins_load() {
        let all = builtin_scenarios();
        assert_eq!(all.len(), BUILTIN.len());
        for (s, (n, _)) in all.iter().zip(BUILTIN) {
            assert_eq!(&s.name, n);
        }
    }

    #[test]
    fn k9_rational_shape() {
        let s = builtin("k9-rational").unwrap();
        assert_eq!(s.space.symbols().len(), 13);
        assert_eq!(s.space.unknown(), Some("x"));
        assert_eq!(s.space.rank_bound(), Some(12));
        let d = DivisorClass::symbol("D");
        assert_eq!(s.space.pair_const(&d, &d).unwrap(), BigRational::from_integer(14.into()));
        let k = DivisorClass::symbol("K");
        assert!(s.space.pair(&k, &s.class("M1").unwrap()).unwrap().is_zero());
        assert_eq!(s.space.pair(&d, &DivisorClass::symbol("F")).unwrap().render("x"), "x");
    }

    #[test]
    fn k11_shape() {
        let s = builtin("k11").unwrap();
        assert_eq!(s.invariants.rho, 14);
        assert_eq!(s.nodal.len(), 11);
        let i = s.invariants;
        assert_eq!((i.kd, i.kk, i.kb, i.bb), (0, -4, 8, -2));
    }

    #[test]
    fn case_h_branch() {
        let s = builtin("k9-case-h").unwrap();
        let b: Vec<(i64, i64)> = s.branch.iter().map(|c| (c.g, c.ss)).collect();
        assert_eq!(b, vec![(3, 2), (1, -2), (1, -2)]);
    }

    #[test]
    fn nodal_blocks_negative_definite() {
        for s in builtin_scenarios() {
            let mut cls = vec![DivisorClass::symbol("K")];
            cls.extend(s.nodal_classes());
            let m = gram_matrix(&s.space, &s.nodal_classes()).unwrap();
            let sig = signature(&m).unwrap();
            assert_eq!((sig.pos, sig.neg, sig.zero), (0, s.nodal.len(), 0), "{}", s.name);
            let kk = s.space.pair_const(&cls[0], &cls[0]).unwrap();
            assert_eq!(kk, BigRational::from_integer(s.invariants.kk.into()), "{}", s.name);
        }
    }

    #[test]
    fn resolve_prefers_paths() {
        assert!(resolve_scenario("k11").is_ok());
        assert!(matches!(resolve_scenario("no-such-file"), Err(ScenarioError::Schema { .. })));
        let dir = std::env::temp_dir().join("invlat-resolve-test.json");
        std::fs::write(&dir, builtin_source("k5").unwrap()).unwrap();
        assert_eq!(resolve_scenario(dir.to_str().unwrap()).unwrap().name, "k5");
    }
}
