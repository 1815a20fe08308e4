//! Classification contexts: symbols, Gram data, nodal curves, fibres,
//! cited axioms and the replay script.

pub mod builtin;
pub mod document;
pub mod fixtures;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Certificate, Verdict};
use crate::lattice::{
    parse_class, parse_class_list, DivisorClass, GramEntry, IntersectionSpace, LatticeError,
};
use crate::surface::{SurfaceError, SurfaceInvariants};

pub use builtin::{builtin, builtin_names, builtin_scenarios, resolve_scenario};
pub use document::{FibrationDoc as FibrationSpec, Route, FORMAT_VERSION};
pub use fixtures::{load_fixtures, FixtureRow, Fixtures};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("no scenario named {0}")]
    NotFound(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { path: path.into(), reason: reason.into() }
}

fn violation(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::InvariantViolation(msg.into())
}

/// A geometric fact the engine cites but does not prove.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomId {
    pub id: String,
    pub statement: String,
    pub anchor: String,
}

pub mod axioms {
    pub const MINUS_ONE_CURVE_MEETS_NODE: &str = "MINUS_ONE_CURVE_MEETS_NODE";
    pub const PG_ZERO_NO_EFFECTIVE_K: &str = "PG_ZERO_NO_EFFECTIVE_K";
    pub const BPF_PENCIL_MONOTONE: &str = "BPF_PENCIL_MONOTONE";
    pub const FIBRATION_FROM_NODES: &str = "FIBRATION_FROM_NODES";
    pub const RAMIFICATION_FROM_DOUBLE_FIBRES: &str = "RAMIFICATION_FROM_DOUBLE_FIBRES";
}

/// The registry of citable axioms, shipped as data.
pub fn axiom_registry() -> Vec<AxiomId> {
    serde_json::from_str(include_str!("../../data/axioms.json")).expect("bundled axiom registry parses")
}

pub fn axiom(id: &str) -> Option<AxiomId> {
    axiom_registry().into_iter().find(|a| a.id == id)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreComponent {
    pub symbol: String,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreConfig {
    pub label: String,
    pub components: Vec<FibreComponent>,
}

impl FibreConfig {
    pub fn class(&self) -> DivisorClass {
        let mut c = DivisorClass::zero();
        for comp in &self.components {
            c.add_term(&comp.symbol, BigRational::from_integer(comp.mult.into()));
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchComponentSpec {
    pub g: i64,
    pub ss: i64,
    pub class: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleInvocation {
    pub rule: String,
    pub args: BTreeMap<String, serde_json::Value>,
    pub expect: Option<String>,
    pub anchor: Option<String>,
}

/// A class shown to be numerically trivial, kept as `lhs ≡ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: String,
    pub rhs: String,
    pub class: DivisorClass,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub invariants: SurfaceInvariants,
    pub space: IntersectionSpace,
    pub nodal: Vec<String>,
    pub classes: BTreeMap<String, DivisorClass>,
    pub fibres: Vec<FibreConfig>,
    pub branch: Vec<BranchComponentSpec>,
    pub fibration: Option<FibrationSpec>,
    pub axioms: Vec<String>,
    pub checks: Vec<RuleInvocation>,
    /// Value fixed for the unknown during replay; `space` is already
    /// substituted when this is set.
    pub resolved: Option<BigInt>,
    pub relations: Vec<Relation>,
}

impl Scenario {
    /// A bare context around a hand-built space, with no script.
    pub fn synthetic(name: &str, invariants: SurfaceInvariants, space: IntersectionSpace, nodal: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            description: String::new(),
            invariants,
            space,
            nodal,
            classes: BTreeMap::new(),
            fibres: Vec::new(),
            branch: Vec::new(),
            fibration: None,
            axioms: Vec::new(),
            checks: Vec::new(),
            resolved: None,
            relations: Vec::new(),
        }
    }

    pub fn relation(&self, lhs: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.lhs == lhs)
    }

    /// Parses a class expression against this scenario's symbols and named
    /// classes.
    pub fn class(&self, src: &str) -> Result<DivisorClass, LatticeError> {
        let named = &self.classes;
        parse_class(src, &self.space, &|n| named.get(n).cloned())
    }

    /// Comma list with ranges, each item a class expression.
    pub fn class_list(&self, src: &str) -> Result<Vec<DivisorClass>, LatticeError> {
        parse_class_list(src)?.iter().map(|s| self.class(s)).collect()
    }

    pub fn nodal_classes(&self) -> Vec<DivisorClass> {
        self.nodal.iter().map(|n| DivisorClass::symbol(n)).collect()
    }

    pub fn canonical(&self) -> DivisorClass {
        DivisorClass::symbol("K")
    }

    pub fn fibre(&self, label: &str) -> Option<&FibreConfig> {
        self.fibres.iter().find(|f| f.label == label)
    }
}

fn parse_coefficient(path: &str, c: &document::Coefficient) -> Result<BigRational, ScenarioError> {
    match c {
        document::Coefficient::Int(n) => Ok(BigRational::from_integer((*n).into())),
        document::Coefficient::Text(t) => {
            let t = t.trim();
            let (num, den) = match t.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (t, "1"),
            };
            let num: BigInt = num.parse().map_err(|_| schema(path, format!("bad rational {t:?}")))?;
            let den: BigInt = den.parse().map_err(|_| schema(path, format!("bad rational {t:?}")))?;
            if den.is_zero() {
                return Err(schema(path, "zero denominator"));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: document::ScenarioDoc =
        serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
    from_document(doc)
}

pub fn from_document(doc: document::ScenarioDoc) -> Result<Scenario, ScenarioError> {
    if doc.version != FORMAT_VERSION {
        return Err(schema("$.version", format!("unsupported version {}", doc.version)));
    }
    if doc.rho < 1 {
        return Err(schema("$.rho", "must be positive"));
    }
    let mut space = IntersectionSpace::new(&doc.symbols, Some(doc.rho as usize))
        .map_err(|e| schema("$.symbols", e.to_string()))?;
    for (key, v) in &doc.gram {
        let path = format!("$.gram[{key:?}]");
        let (a, b) = key
            .split_once('.')
            .ok_or_else(|| schema(&path, "key must look like A.B"))?;
        if space.entry(a, b).is_ok() {
            return Err(schema(&path, "pair declared twice"));
        }
        let res = match v {
            document::GramValue::Int(n) => space.set_int(a, b, *n),
            document::GramValue::Unknown(u) => space.set_unknown(a, b, &u.unknown, u.scale, u.offset),
            document::GramValue::Opaque(o) if o.opaque => space.set(a, b, GramEntry::Opaque),
            document::GramValue::Opaque(_) => Err(LatticeError::Parse(key.clone(), "opaque must be true".into())),
        };
        res.map_err(|e| schema(&path, e.to_string()))?;
    }
    if let Some((a, b)) = space.undeclared().first() {
        return Err(schema("$.gram", format!("no entry for {a}.{b}")));
    }

    let mut classes = BTreeMap::new();
    for (name, terms) in &doc.classes {
        let path = format!("$.classes.{name}");
        if space.has_symbol(name) {
            return Err(schema(&path, "class name shadows a symbol"));
        }
        let mut c = DivisorClass::zero();
        for (sym, coef) in terms {
            if !space.has_symbol(sym) {
                return Err(schema(&path, format!("unknown symbol {sym}")));
            }
            c.add_term(sym, parse_coefficient(&path, coef)?);
        }
        classes.insert(name.clone(), c);
    }

    let inv = SurfaceInvariants {
        k: doc.k,
        kk: doc.invariants.kk,
        kd: doc.invariants.kd,
        dd: doc.invariants.dd,
        kb: doc.invariants.kb,
        bb: doc.invariants.bb,
        chi_o: doc.chi_o,
        rho: doc.rho,
    };
    inv.check().map_err(|e| violation(e.to_string()))?;

    let fibres = doc
        .fibres
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let path = format!("$.fibres[{i}]");
            if f.components.is_empty() {
                return Err(schema(&path, "fibre without components"));
            }
            let components = f
                .components
                .iter()
                .map(|c| {
                    if !space.has_symbol(&c.symbol) {
                        return Err(schema(&path, format!("unknown symbol {}", c.symbol)));
                    }
                    if c.mult < 1 {
                        return Err(schema(&path, "multiplicity must be positive"));
                    }
                    Ok(FibreComponent { symbol: c.symbol.clone(), mult: c.mult })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FibreConfig { label: f.label.clone(), components })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    let branch = doc
        .branch
        .map(|b| {
            b.components
                .into_iter()
                .map(|c| BranchComponentSpec { g: c.g, ss: c.ss, class: c.class })
                .collect()
        })
        .unwrap_or_default();

    let registry = axiom_registry();
    for a in &doc.axioms {
        if !registry.iter().any(|r| &r.id == a) {
            return Err(violation(format!("axiom {a} is not in the registry")));
        }
    }

    let checks = doc
        .checks
        .into_iter()
        .map(|c| RuleInvocation { rule: c.rule, args: c.args, expect: c.expect, anchor: c.anchor })
        .collect();

    let s = Scenario {
        name: doc.name,
        description: doc.description,
        invariants: inv,
        space,
        nodal: doc.nodal,
        classes,
        fibres,
        branch,
        fibration: doc.fibration,
        axioms: doc.axioms,
        checks,
        resolved: None,
        relations: Vec::new(),
    };
    validate(&s)?;
    Ok(s)
}

fn const_pair(s: &Scenario, a: &DivisorClass, b: &DivisorClass) -> Option<BigRational> {
    s.space.pair(a, b).ok().and_then(|p| p.as_constant())
}

fn expect_eq(what: &str, got: Option<BigRational>, want: i64) -> Result<(), ScenarioError> {
    match got {
        Some(v) if v != BigRational::from_integer(want.into()) => {
            Err(violation(format!("{what} is {v}, declared {want}")))
        }
        _ => Ok(()),
    }
}

fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    if !s.space.has_symbol("K") {
        return Err(schema("$.symbols", "the canonical symbol K is required"));
    }
    let k = s.canonical();
    for (i, n) in s.nodal.iter().enumerate() {
        if !s.space.has_symbol(n) {
            return Err(schema("$.nodal", format!("unknown symbol {n}")));
        }
        let nc = DivisorClass::symbol(n);
        if const_pair(s, &nc, &nc) != Some(BigRational::from_integer((-2).into())) {
            return Err(violation(format!("nodal curve {n} must have self-intersection -2")));
        }
        if const_pair(s, &nc, &k) != Some(BigRational::zero()) {
            return Err(violation(format!("nodal curve {n} must be orthogonal to K")));
        }
        for m in &s.nodal[i + 1..] {
            if const_pair(s, &nc, &DivisorClass::symbol(m)) != Some(BigRational::zero()) {
                return Err(violation(format!("nodal curves {n} and {m} must be disjoint")));
            }
        }
    }
    let inv = &s.invariants;
    expect_eq("K.K", const_pair(s, &k, &k), inv.kk)?;
    let d = s.class("D").ok();
    let b0 = s.class("B0").ok();
    if let Some(d) = &d {
        expect_eq("K.D", const_pair(s, &k, d), inv.kd)?;
        expect_eq("D.D", const_pair(s, d, d), inv.dd)?;
    }
    if let Some(b) = &b0 {
        expect_eq("K.B0", const_pair(s, &k, b), inv.kb)?;
        expect_eq("B0.B0", const_pair(s, b, b), inv.bb)?;
    }
    for (i, c) in s.branch.iter().enumerate() {
        if let Some(name) = &c.class {
            let gc = s
                .class(name)
                .map_err(|e| schema(format!("$.branch.components[{i}]"), e.to_string()))?;
            expect_eq(&format!("K.{name}"), const_pair(s, &k, &gc), 2 * c.g - 2 - c.ss)?;
            expect_eq(&format!("{name}.{name}"), const_pair(s, &gc, &gc), c.ss)?;
        }
    }
    if let Some(f) = &s.fibration {
        for sym in [&f.fibre, &f.curve, &f.node] {
            if !s.space.has_symbol(sym) {
                return Err(schema("$.fibration", format!("unknown symbol {sym}")));
            }
        }
        s.class(&f.forcing_class)
            .map_err(|e| schema("$.fibration.forcing_class", e.to_string()))?;
    }
    Ok(())
}

/// Checks that `Σ mult·C` behaves like a fibre of a rational fibration:
/// `F² = 0`, `K.F = -2` and `F.C = 0` for every component.
pub fn fibre_check(
    space: &IntersectionSpace,
    fc: &FibreConfig,
    k: &DivisorClass,
) -> Result<Certificate, LatticeError> {
    let f = fc.class();
    let mut c = Certificate::new("fibre_check", "rational-fibration/singular-fibres");
    let mut failures = Vec::new();
    let ff = c.pairing_const(space, None, &f, &f)?;
    if !ff.is_zero() {
        failures.push(format!("F^2 = {ff}"));
    }
    let kf = c.pairing_const(space, None, k, &f)?;
    if kf != BigRational::from_integer((-2).into()) {
        failures.push(format!("K.F = {kf}"));
    }
    for comp in &fc.components {
        let cc = DivisorClass::symbol(&comp.symbol);
        let v = c.pairing_const(space, None, &f, &cc)?;
        if !v.is_zero() {
            failures.push(format!("F.{} = {v}", comp.symbol));
        }
    }
    let label = &fc.label;
    Ok(if failures.is_empty() {
        c.conclude(format!("{label}: F^2 = 0, K.F = -2, F.C = 0 for every component"), Verdict::Satisfied)
    } else {
        c.conclude(format!("{label}: {}", failures.join(", ")), Verdict::Violation)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "name": "tiny",
            "k": 1, "chiO": 1, "rho": 3,
            "invariants": {"KK": -2, "KD": 2, "DD": 14, "KB": 6, "BB": -2},
            "symbols": ["K", "D", "N0"],
            "gram": {"K.K": -2, "K.D": 2, "D.D": 14, "K.N0": 0, "D.N0": 0, "N0.N0": -2},
            "nodal": ["N0"],
            "classes": {"B0": {"D": 1, "K": -2}, "H": {"K": "1/2"}}
        })
    }

    #[test]
    fn loads_minimal() {
        let s = load_scenario(&minimal_doc().to_string()).unwrap();
        assert_eq!(s.space.symbols().len(), 3);
        assert_eq!(s.class("H").unwrap().coeff("K"), BigRational::new(1.into(), 2.into()));
        assert_eq!(s.class("2B0").unwrap().coeff("K"), BigRational::from_integer((-4).into()));
    }

    #[test]
    fn rejects_bad_nodal_square() {
        let mut d = minimal_doc();
        d["gram"]["N0.N0"] = serde_json::json!(-1);
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::InvariantViolation(_))));
    }

    #[test]
    fn rejects_schema_problems() {
        let mut d = minimal_doc();
        d["extra"] = serde_json::json!(1);
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::Schema { .. })));
        let mut d = minimal_doc();
        d["gram"].as_object_mut().unwrap().remove("D.N0");
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::Schema { .. })));
        let mut d = minimal_doc();
        d["gram"]["N0.D"] = serde_json::json!(0);
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::Schema { .. })));
        let mut d = minimal_doc();
        d["invariants"]["KB"] = serde_json::json!(5);
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::InvariantViolation(_))));
        let mut d = minimal_doc();
        d["axioms"] = serde_json::json!(["NOT_AN_AXIOM"]);
        assert!(matches!(load_scenario(&d.to_string()), Err(ScenarioError::InvariantViolation(_))));
        assert!(matches!(load_scenario("{"), Err(ScenarioError::Schema { .. })));
    }

    #[test]
    fn registry_ids_unique() {
        let reg = axiom_registry();
        let mut ids: Vec<_> = reg.iter().map(|a| a.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), reg.len());
        for id in [
            axioms::MINUS_ONE_CURVE_MEETS_NODE,
            axioms::PG_ZERO_NO_EFFECTIVE_K,
            axioms::BPF_PENCIL_MONOTONE,
            axioms::FIBRATION_FROM_NODES,
        ] {
            assert!(axiom(id).is_some(), "{id}");
        }
    }
}
