//! Structured record of one rule application.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lattice::{
    det_poly, gram_matrix, parse_class, parse_class_list, DivisorClass, IntersectionSpace,
    LatticeError, QPoly,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violation,
    /// Carries the class expression shown to be numerically trivial.
    RelationForced(String),
    /// More than one outcome survives, or nothing could be decided.
    Inconclusive,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation)
    }

    /// Tag without payload, as used in expectations.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violation => "VIOLATION",
            Verdict::RelationForced(_) => "RELATION_FORCED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::RelationForced(e) => write!(f, "RELATION_FORCED({e})"),
            v => f.write_str(v.tag()),
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "SATISFIED" => Ok(Verdict::Satisfied),
            "VIOLATION" => Ok(Verdict::Violation),
            "INCONCLUSIVE" => Ok(Verdict::Inconclusive),
            _ => s
                .strip_prefix("RELATION_FORCED(")
                .and_then(|r| r.strip_suffix(')'))
                .map(|e| Verdict::RelationForced(e.to_string()))
                .ok_or_else(|| format!("unknown verdict {s:?}")),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How to recompute a premise value from the space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Query {
    Pair {
        left: String,
        right: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unknown_value: Option<String>,
    },
    Det {
        classes: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unknown_value: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Premise {
    pub label: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Query>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub rule: String,
    pub premises: Vec<Premise>,
    pub conclusion: String,
    pub verdict: Verdict,
    #[serde(default)]
    pub axioms_cited: Vec<String>,
    /// Hypotheses taken on trust (e.g. a vanishing theorem).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
    pub anchor: String,
}

impl Certificate {
    pub fn new(rule: &str, anchor: &str) -> Self {
        Self {
            rule: rule.to_string(),
            premises: Vec::new(),
            conclusion: String::new(),
            verdict: Verdict::Inconclusive,
            axioms_cited: Vec::new(),
            assumptions: Vec::new(),
            anchor: anchor.to_string(),
        }
    }

    pub fn premise(&mut self, label: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.premises.push(Premise {
            label: label.into(),
            value: value.to_string(),
            query: None,
        });
        self
    }

    /// Records `a.b` with a query that recomputes it, returning the value.
    pub fn pairing(
        &mut self,
        space: &IntersectionSpace,
        resolved: Option<&BigInt>,
        a: &DivisorClass,
        b: &DivisorClass,
    ) -> Result<QPoly, LatticeError> {
        let v = space.pair(a, b)?;
        let (la, lb) = (a.render(space), b.render(space));
        self.premises.push(Premise {
            label: format!("({la}).({lb})"),
            value: space.render_value(&v),
            query: Some(Query::Pair {
                left: la,
                right: lb,
                unknown_value: resolved.map(|r| r.to_string()),
            }),
        });
        Ok(v)
    }

    /// Same as [`Certificate::pairing`] but requires a constant.
    pub fn pairing_const(
        &mut self,
        space: &IntersectionSpace,
        resolved: Option<&BigInt>,
        a: &DivisorClass,
        b: &DivisorClass,
    ) -> Result<BigRational, LatticeError> {
        let v = self.pairing(space, resolved, a, b)?;
        v.as_constant()
            .ok_or_else(|| LatticeError::UnknownPairing(a.render(space), b.render(space)))
    }

    /// Records a Gram determinant with its query.
    pub fn determinant(
        &mut self,
        space: &IntersectionSpace,
        resolved: Option<&BigInt>,
        classes: &[DivisorClass],
    ) -> Result<QPoly, LatticeError> {
        let d = det_poly(&gram_matrix(space, classes)?)?;
        let names: Vec<String> = classes.iter().map(|c| c.render(space)).collect();
        self.premises.push(Premise {
            label: format!("det Gram[{}]", names.join(", ")),
            value: space.render_value(&d),
            query: Some(Query::Det {
                classes: names.join(","),
                unknown_value: resolved.map(|r| r.to_string()),
            }),
        });
        Ok(d)
    }

    pub fn cite(&mut self, axiom: &str) -> &mut Self {
        if !self.axioms_cited.iter().any(|a| a == axiom) {
            self.axioms_cited.push(axiom.to_string());
        }
        self
    }

    pub fn assume(&mut self, text: &str) -> &mut Self {
        self.assumptions.push(text.to_string());
        self
    }

    pub fn conclude(mut self, conclusion: impl Into<String>, verdict: Verdict) -> Self {
        self.conclusion = conclusion.into();
        self.verdict = verdict;
        self
    }

    /// Stable plain-text form.
    pub fn render_text(&self) -> String {
        let mut out = format!("[{}] {}\n", self.rule, self.anchor);
        for p in &self.premises {
            out.push_str(&format!("  premise {} = {}\n", p.label, p.value));
        }
        for a in &self.assumptions {
            out.push_str(&format!("  assumes {a}\n"));
        }
        for a in &self.axioms_cited {
            out.push_str(&format!("  cites {a}\n"));
        }
        out.push_str(&format!("  => {}\n  verdict {}\n", self.conclusion, self.verdict));
        out
    }
}

/// Recomputes every premise that carries a query against `space` and
/// returns the labels whose recorded value differs.
pub fn replay_premises(space: &IntersectionSpace, cert: &Certificate) -> Result<Vec<String>, LatticeError> {
    let mut bad = Vec::new();
    let base = |u: &Option<String>| -> Result<IntersectionSpace, LatticeError> {
        match u {
            None => Ok(space.clone()),
            Some(v) => {
                let n: BigInt = v
                    .parse()
                    .map_err(|_| LatticeError::Parse(v.clone(), "not an integer".into()))?;
                Ok(space.substitute(&n))
            }
        }
    };
    let none = |_: &str| None;
    for p in &cert.premises {
        let got = match &p.query {
            None => continue,
            Some(Query::Pair { left, right, unknown_value }) => {
                let s = base(unknown_value)?;
                let a = parse_class(left, &s, &none)?;
                let b = parse_class(right, &s, &none)?;
                s.render_value(&s.pair(&a, &b)?)
            }
            Some(Query::Det { classes, unknown_value }) => {
                let s = base(unknown_value)?;
                let cs = parse_class_list(classes)?
                    .iter()
                    .map(|c| parse_class(c, &s, &none))
                    .collect::<Result<Vec<_>, _>>()?;
                s.render_value(&det_poly(&gram_matrix(&s, &cs)?)?)
            }
        };
        if got != p.value {
            bad.push(p.label.clone());
        }
    }
    Ok(bad)
}
