//! Case analysis for a (-1)-curve `C` on the resolved quotient: its degree
//! against `D` and how it meets two nodal curves.

use std::fmt;

use super::rules::{rule_index, rule_parity_force, Intent};
use super::EngineError;
use num_traits::Zero;

use crate::certificate::{Certificate, Premise, Verdict};
use crate::lattice::{radical_member, DivisorClass, IntersectionSpace};
use crate::scenario::{axioms, Scenario};
use crate::surface::SurfaceInvariants;

/// One branch: `D.C = dc`, `C.N0 = cn0`, `C.N1 = cn1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Leaf {
    pub dc: i64,
    pub cn0: i64,
    pub cn1: i64,
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.dc, self.cn0, self.cn1)
    }
}

const BRANCH: &str = "branch";

/// Meeting patterns examined, with `C.N0 >= C.N1`.
const PATTERNS: [(i64, i64); 4] = [(0, 0), (1, 0), (1, 1), (2, 0)];

fn leaf_label(l: &Leaf) -> String {
    format!("DC={},C.N0={},C.N1={}", l.dc, l.cn0, l.cn1)
}

/// Recovers the leaf a certificate was computed on.
pub fn leaf_for(cert: &Certificate) -> Option<Leaf> {
    let p = cert.premises.iter().find(|p| p.label == BRANCH)?;
    let mut vals = p.value.split(',').map(|kv| kv.split_once('=').and_then(|(_, v)| v.parse::<i64>().ok()));
    Some(Leaf { dc: vals.next()??, cn0: vals.next()??, cn1: vals.next()?? })
}

/// Space on `K, D, C, N0, N1` for one leaf.
pub fn leaf_space(inv: &SurfaceInvariants, leaf: &Leaf) -> Result<IntersectionSpace, EngineError> {
    let mut sp = IntersectionSpace::new(&["K", "D", "C", "N0", "N1"], usize::try_from(inv.rho).ok())?;
    let pairs: [(&str, &str, i64); 15] = [
        ("K", "K", inv.kk),
        ("K", "D", inv.kd),
        ("D", "D", inv.dd),
        ("K", "C", -1),
        ("C", "C", -1),
        ("D", "C", leaf.dc),
        ("C", "N0", leaf.cn0),
        ("C", "N1", leaf.cn1),
        ("K", "N0", 0),
        ("K", "N1", 0),
        ("D", "N0", 0),
        ("D", "N1", 0),
        ("N0", "N0", -2),
        ("N1", "N1", -2),
        ("N0", "N1", 0),
    ];
    for (a, b, v) in pairs {
        sp.set_int(a, b, v)?;
    }
    Ok(sp)
}

fn leaf_scenario(inv: &SurfaceInvariants, leaf: &Leaf) -> Result<Scenario, EngineError> {
    let sp = leaf_space(inv, leaf)?;
    let mut s = Scenario::synthetic("minus-one-curve", *inv, sp, vec!["N0".into(), "N1".into()]);
    s.classes.insert("B0".into(), DivisorClass::from_ints(&[("D", 1), ("K", -2)]));
    Ok(s)
}

fn tag(mut c: Certificate, leaf: &Leaf) -> Certificate {
    c.premises.insert(0, Premise { label: BRANCH.into(), value: leaf_label(leaf), query: None });
    c
}

/// Decides one leaf. A `Satisfied` verdict means the configuration survives;
/// `Inconclusive` means no rule applied.
pub fn decide_leaf(inv: &SurfaceInvariants, leaf: &Leaf, anchor: &str) -> Result<Certificate, EngineError> {
    let s = leaf_scenario(inv, leaf)?;
    let sp = &s.space;
    let c_ = DivisorClass::symbol("C");
    let n0 = DivisorClass::symbol("N0");
    let n1 = DivisorClass::symbol("N1");
    let k = s.canonical();
    let d = DivisorClass::symbol("D");
    let parity = || -> Result<Option<Certificate>, EngineError> {
        let c = rule_parity_force(&s, &c_, "no double cover branched this way", anchor)?;
        Ok(c.verdict.is_violation().then_some(c))
    };
    let cert = match (leaf.cn0, leaf.cn1) {
        (0, 0) => match parity()? {
            Some(c) => c,
            None => {
                let mut c = Certificate::new("minus_one_curve", anchor);
                c.pairing_const(sp, None, &c_, &n0)?;
                c.pairing_const(sp, None, &c_, &n1)?;
                c.cite(axioms::MINUS_ONE_CURVE_MEETS_NODE);
                c.conclude("C meets no nodal curve", Verdict::Violation)
            }
        },
        (2, 0) => {
            let e = c_.plus(&n0);
            let c = crate::lattice::forms::hodge_bound_with(sp, None, &d, &e, anchor)?;
            if c.verdict.is_violation() {
                c
            } else {
                c.conclude("C+N0 is within the index bound", Verdict::Inconclusive)
            }
        }
        (1, 0) => match parity()? {
            Some(c) => c,
            None => {
                let e = k.scale_int(-1).plus(&c_.scale_int(2)).plus(&n0);
                let mut c = Certificate::new("minus_one_curve", anchor);
                let de = c.pairing_const(sp, None, &d, &e)?;
                let ee = c.pairing_const(sp, None, &e, &e)?;
                let gens: Vec<DivisorClass> = sp.symbols().iter().map(|n| DivisorClass::symbol(n)).collect();
                if de.is_zero() && ee.is_zero() && radical_member(sp, &e, &gens)? {
                    for g in &gens {
                        c.pairing_const(sp, None, &e, g)?;
                    }
                    c.cite(axioms::PG_ZERO_NO_EFFECTIVE_K);
                    c.conclude("K ≡ 2C+N0 would be effective", Verdict::Violation)
                } else {
                    c.conclude("configuration survives", Verdict::Satisfied)
                }
            }
        },
        (1, 1) => {
            let p = k.scale_int(leaf.dc).plus(&d);
            let e = n0.plus(&c_.scale_int(2)).plus(&n1);
            if !num_traits::Signed::is_positive(&sp.pair_const(&p, &p)?) {
                Certificate::new("index_exclude", anchor).conclude("M has no positive square", Verdict::Inconclusive)
            } else {
                let mut out = rule_index(&s, &p, &e, Intent::Exclude, None, anchor)?;
                let c = out.certificates.pop().expect("one certificate");
                if c.verdict == Verdict::Satisfied {
                    c.conclude("configuration survives", Verdict::Satisfied)
                } else {
                    c
                }
            }
        }
        _ => Certificate::new("minus_one_curve", anchor).conclude("pattern not covered", Verdict::Inconclusive),
    };
    Ok(tag(cert, leaf))
}

/// Runs every leaf for the listed degrees, followed by a summary. The
/// summary is compared with `expected` when given.
pub fn minus_one_curve_tree(
    inv: &SurfaceInvariants,
    dcs: &[i64],
    expected: Option<&[Leaf]>,
    anchor: &str,
) -> Result<Vec<Certificate>, EngineError> {
    let mut certs = Vec::new();
    let mut summary = Certificate::new("minus_one_curve", anchor);
    let mut survivors = Vec::new();
    let mut open = Vec::new();
    for &dc in dcs {
        for (a, b) in PATTERNS {
            let leaf = Leaf { dc, cn0: a, cn1: b };
            let c = decide_leaf(inv, &leaf, anchor)?;
            let outcome = match c.verdict {
                Verdict::Violation => format!("excluded by {}", c.rule),
                Verdict::Satisfied => {
                    survivors.push(leaf);
                    "survives".into()
                }
                _ => {
                    open.push(leaf);
                    "undecided".into()
                }
            };
            summary.premise(format!("leaf {leaf}"), outcome);
            certs.push(c);
        }
    }
    let list = |v: &[Leaf]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
    let summary = if !open.is_empty() {
        summary.conclude(format!("undecided leaves: {}", list(&open)), Verdict::Inconclusive)
    } else {
        match expected {
            Some(exp) if {
                let mut e = exp.to_vec();
                e.sort();
                let mut s = survivors.clone();
                s.sort();
                e != s
            } =>
            {
                summary.conclude(format!("survivors [{}], expected [{}]", list(&survivors), list(exp)), Verdict::Violation)
            }
            _ => summary.conclude(format!("survivors [{}]", list(&survivors)), Verdict::Satisfied),
        }
    };
    certs.push(summary);
    Ok(certs)
}
