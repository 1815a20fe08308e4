//! Named rules that chain lattice and surface computations into
//! certificates, and the replay of a scenario's script.

pub mod case_tree;
pub mod replay;
pub mod rules;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::certificate::Certificate;
use crate::lattice::LatticeError;
use crate::scenario::Scenario;
use crate::surface::SurfaceError;

pub use replay::{replay, replay_collect, replay_log, ReplayLog, StepRecord};
pub use rules::{
    rule_basis_relation, rule_degree_pin, rule_divisibility_three, rule_index, rule_parity_force,
    rule_pencil_exclusion, rule_rh_bound, rule_solve_unknown, Admissible, Intent,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no rule named {0}")]
    RuleNotFound(String),
    #[error("step {step}: expected {expected}, got {got}")]
    UnexpectedVerdict { step: usize, expected: String, got: String },
    #[error("{rule}: bad arguments: {reason}")]
    BadArgs { rule: String, reason: String },
    #[error("expected {expected} classes including orthogonal nodal ones, got {got}")]
    WrongClassCount { expected: usize, got: usize },
    #[error("the space has no unknown to solve for")]
    NoUnknown,
    #[error("{0} is not an integer")]
    NotIntegral(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// State change requested by a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Resolve(BigInt),
    Relation { lhs: String, rhs: String, class: crate::lattice::DivisorClass },
}

#[derive(Clone, Debug)]
pub struct RuleOutcome {
    pub certificates: Vec<Certificate>,
    pub effect: Option<Effect>,
}

impl RuleOutcome {
    fn one(c: Certificate) -> Self {
        Self { certificates: vec![c], effect: None }
    }

    /// The certificate whose verdict is compared with the expectation.
    pub fn last(&self) -> &Certificate {
        self.certificates.last().expect("rules emit at least one certificate")
    }
}

/// Rule ids accepted in scenario scripts.
pub const RULES: &[&str] = &[
    "basis_relation",
    "degree_pin",
    "divisibility_three",
    "fibre_check",
    "hodge_bound",
    "index_exclude",
    "index_force",
    "minus_one_curve",
    "mj_table",
    "pairing",
    "parity",
    "pencil_exclusion",
    "radical",
    "rh_bound",
    "rh_exclusion",
    "riemann_roch",
    "solve_unknown",
];

pub(crate) fn to_i64(q: &BigRational) -> Result<i64, EngineError> {
    if !q.is_integer() {
        return Err(EngineError::NotIntegral(q.to_string()));
    }
    q.to_integer()
        .try_into()
        .map_err(|_| EngineError::NotIntegral(q.to_string()))
}

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn is_even(r: &BigRational) -> bool {
    r.is_integer() && (r.to_integer() % BigInt::from(2)).is_zero()
}

pub(crate) fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Typed access to a rule's JSON arguments.
pub(crate) struct Args<'a> {
    rule: &'a str,
    map: &'a BTreeMap<String, Value>,
}

impl<'a> Args<'a> {
    pub(crate) fn new(rule: &'a str, map: &'a BTreeMap<String, Value>) -> Self {
        Self { rule, map }
    }

    pub(crate) fn bad(&self, reason: impl Into<String>) -> EngineError {
        EngineError::BadArgs { rule: self.rule.to_string(), reason: reason.into() }
    }

    pub(crate) fn opt_str(&self, key: &str) -> Result<Option<&'a str>, EngineError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.bad(format!("{key} must be a string"))),
        }
    }

    pub(crate) fn str(&self, key: &str) -> Result<&'a str, EngineError> {
        self.opt_str(key)?.ok_or_else(|| self.bad(format!("missing {key}")))
    }

    pub(crate) fn opt_i64(&self, key: &str) -> Result<Option<i64>, EngineError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.as_i64().map(Some).ok_or_else(|| self.bad(format!("{key} must be an integer"))),
        }
    }

    pub(crate) fn i64(&self, key: &str) -> Result<i64, EngineError> {
        self.opt_i64(key)?.ok_or_else(|| self.bad(format!("missing {key}")))
    }

    pub(crate) fn list(&self, key: &str) -> Result<&'a [Value], EngineError> {
        match self.map.get(key) {
            None => Ok(&[]),
            Some(Value::Array(a)) => Ok(a.as_slice()),
            Some(_) => Err(self.bad(format!("{key} must be a list"))),
        }
    }

    pub(crate) fn strings(&self, key: &str) -> Result<Vec<&'a str>, EngineError> {
        self.list(key)?
            .iter()
            .map(|v| v.as_str().ok_or_else(|| self.bad(format!("{key} must hold strings"))))
            .collect()
    }

    pub(crate) fn ints(&self, key: &str) -> Result<Vec<i64>, EngineError> {
        self.list(key)?
            .iter()
            .map(|v| v.as_i64().ok_or_else(|| self.bad(format!("{key} must hold integers"))))
            .collect()
    }

    /// `"a..b"` or a single integer.
    pub(crate) fn range(&self, key: &str) -> Result<Vec<i64>, EngineError> {
        match self.map.get(key) {
            Some(Value::Number(n)) => n.as_i64().map(|v| vec![v]).ok_or_else(|| self.bad("bad range")),
            Some(Value::String(s)) => {
                let (a, b) = s.split_once("..").ok_or_else(|| self.bad(format!("bad range {s:?}")))?;
                let a: i64 = a.trim().parse().map_err(|_| self.bad(format!("bad range {s:?}")))?;
                let b: i64 = b.trim().parse().map_err(|_| self.bad(format!("bad range {s:?}")))?;
                if b < a {
                    return Err(self.bad(format!("empty range {s:?}")));
                }
                Ok((a..=b).collect())
            }
            _ => Err(self.bad(format!("missing {key}"))),
        }
    }
}

/// Applies one scripted invocation to the current scenario state.
pub fn apply_rule(s: &Scenario, inv: &crate::scenario::RuleInvocation) -> Result<RuleOutcome, EngineError> {
    rules::dispatch(s, &inv.rule, &inv.args, inv.anchor.as_deref())
}
