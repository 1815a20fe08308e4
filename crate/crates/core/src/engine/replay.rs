use super::{apply_rule, EngineError, Effect};
use crate::certificate::Certificate;
use crate::scenario::{Relation, Scenario};

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub index: usize,
    pub rule: String,
    pub certificates: Vec<Certificate>,
}

/// Result of running a script: the final state and every step.
#[derive(Clone, Debug)]
pub struct ReplayLog {
    pub scenario: Scenario,
    pub steps: Vec<StepRecord>,
}

impl ReplayLog {
    pub fn certificates(&self) -> Vec<&Certificate> {
        self.steps.iter().flat_map(|s| s.certificates.iter()).collect()
    }

    pub fn relation(&self, lhs: &str) -> Option<&Relation> {
        self.scenario.relation(lhs)
    }
}

fn apply_effect(s: &mut Scenario, effect: Effect) {
    match effect {
        Effect::Resolve(x) => {
            s.space = s.space.substitute(&x);
            s.resolved = Some(x);
        }
        Effect::Relation { lhs, rhs, class } => s.relations.push(Relation { lhs, rhs, class }),
    }
}

fn run(s: &Scenario, fail_fast: bool) -> Result<(ReplayLog, Vec<EngineError>), EngineError> {
    let mut state = s.clone();
    let mut steps = Vec::new();
    let mut mismatches = Vec::new();
    for (index, inv) in s.checks.iter().enumerate() {
        let out = apply_rule(&state, inv)?;
        let got = out.last().verdict.tag();
        if let Some(expected) = &inv.expect {
            if expected != got {
                let e = EngineError::UnexpectedVerdict { step: index, expected: expected.clone(), got: got.to_string() };
                if fail_fast {
                    return Err(e);
                }
                mismatches.push(e);
            }
        }
        if let Some(effect) = out.effect {
            apply_effect(&mut state, effect);
        }
        steps.push(StepRecord { index, rule: inv.rule.clone(), certificates: out.certificates });
    }
    Ok((ReplayLog { scenario: state, steps }, mismatches))
}

/// Runs the script, stopping at the first verdict that differs from its
/// expectation.
pub fn replay_log(s: &Scenario) -> Result<ReplayLog, EngineError> {
    run(s, true).map(|(log, _)| log)
}

pub fn replay(s: &Scenario) -> Result<Vec<Certificate>, EngineError> {
    Ok(replay_log(s)?.certificates().into_iter().cloned().collect())
}

/// Runs the whole script and returns every verdict mismatch alongside the
/// log. Rule errors still abort.
pub fn replay_collect(s: &Scenario) -> Result<(ReplayLog, Vec<EngineError>), EngineError> {
    run(s, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Verdict;
    use crate::scenario::{builtin, builtin_names};

    #[test]
    fn every_builtin_replays() {
        for name in builtin_names() {
            let s = builtin(name).unwrap();
            if let Err(e) = replay_log(&s) {
                panic!("{name}: {e}");
            }
        }
    }

    #[test]
    fn nine_node_state() {
        let log = replay_log(&builtin("k9-rational").unwrap()).unwrap();
        assert_eq!(log.scenario.resolved, Some(8.into()));
        assert_eq!(log.relation("M4").unwrap().rhs, "2F+2G+N0");
        assert_eq!(log.relation("B0").unwrap().rhs, "-6K+2F+2G+N0");
    }

    #[test]
    fn degree_pins() {
        for name in ["k9-case-f", "k9-case-h"] {
            let log = replay_log(&builtin(name).unwrap()).unwrap();
            let last = log.steps.last().unwrap().certificates.last().unwrap();
            assert_eq!(last.verdict, Verdict::Violation, "{name}");
            assert!(last.conclusion.contains("F.Gamma0 = 5"), "{name}: {}", last.conclusion);
        }
    }

    #[test]
    fn mismatch_collected() {
        let mut s = builtin("k9-rational").unwrap();
        s.checks[6].expect = Some("VIOLATION".into());
        assert!(matches!(replay_log(&s), Err(EngineError::UnexpectedVerdict { step: 6, .. })));
        let (_, bad) = replay_collect(&s).unwrap();
        assert_eq!(bad.len(), 1);
    }
}
