use involution_lattice::branch::{filter_labelled, parse_candidate_list, BranchCandidate};
use involution_lattice::certificate::{replay_premises, Query, Verdict};
use involution_lattice::engine::case_tree::{leaf_for, leaf_space};
use involution_lattice::engine::{replay_collect, replay_log};
use involution_lattice::lattice::{GramEntry, ZPoly};
use involution_lattice::scenario::{builtin, builtin_names, fibre_check, load_fixtures, Scenario};

#[test]
fn recorded_premises_recompute() {
    let mut checked = 0;
    for name in builtin_names() {
        let s = builtin(name).unwrap();
        let log = replay_log(&s).unwrap();
        for cert in log.certificates() {
            let space = match leaf_for(cert) {
                Some(leaf) => leaf_space(&s.invariants, &leaf).unwrap(),
                None => s.space.clone(),
            };
            let bad = replay_premises(&space, cert).unwrap();
            assert!(bad.is_empty(), "{name} {}: premises {bad:?} differ\n{}", cert.rule, cert.render_text());
            checked += cert.premises.iter().filter(|p| p.query.is_some()).count();
        }
    }
    assert!(checked > 100, "only {checked} premises carried queries");
}

#[test]
fn tampered_premise_detected() {
    let s = builtin("k9-rational").unwrap();
    let log = replay_log(&s).unwrap();
    let mut cert = log
        .certificates()
        .into_iter()
        .find(|c| c.rule == "solve_unknown" && c.premises.iter().any(|p| matches!(p.query, Some(Query::Det { .. }))))
        .unwrap()
        .clone();
    let p = cert.premises.iter_mut().find(|p| matches!(p.query, Some(Query::Det { .. }))).unwrap();
    p.value = "4096x - 32769".into();
    assert_eq!(replay_premises(&s.space, &cert).unwrap().len(), 1);
}

#[test]
fn certificates_round_trip_through_json() {
    let log = replay_log(&builtin("k11").unwrap()).unwrap();
    for c in log.certificates() {
        let text = serde_json::to_string(c).unwrap();
        assert_eq!(&serde_json::from_str::<involution_lattice::certificate::Certificate>(&text).unwrap(), c);
    }
}

fn labelled_nine() -> Vec<(Option<String>, BranchCandidate)> {
    load_fixtures()
        .unwrap()
        .preliminary_k9
        .entries
        .iter()
        .map(|e| (Some(e.label.clone()), BranchCandidate::from_pairs(&e.components)))
        .collect()
}

#[test]
fn filtering_ignores_input_order() {
    let s = builtin("k9-rational").unwrap();
    let list = labelled_nine();
    let base = filter_labelled(&list, &s).unwrap();
    let mut rev = list.clone();
    rev.reverse();
    let mut rot = list.clone();
    rot.rotate_left(4);
    for other in [rev, rot] {
        let t = filter_labelled(&other, &s).unwrap();
        assert_eq!(t.render_table(), base.render_table());
        assert_eq!(t.to_json(), base.to_json());
    }
}

#[test]
fn candidate_file_matches_fixture_list() {
    let text = "# nine nodes\na: (4,2)+(0,-4)\nb: (3,-2)\nc: (0,-4)+(1,-2)+(4,4)\nd: (4,4)+(0,-6)\ne: (3,0)+(1,-2)\n\
                f: (3,2)+(1,-4)\ng: (2,-2)+(2,0)\nh: (3,2)+(1,-2)+(1,-2)\ni: (2,0)+(1,-2)+(2,0)\n";
    let parsed = parse_candidate_list(text).unwrap();
    assert_eq!(parsed, labelled_nine());
}

#[test]
fn expected_verdicts_enforced() {
    let mut s = builtin("k11").unwrap();
    let step = s.checks.iter().position(|c| c.rule == "rh_exclusion").unwrap();
    s.checks[step].expect = Some("SATISFIED".into());
    let (_, bad) = replay_collect(&s).unwrap();
    assert_eq!(bad.len(), 1);
}

fn bump(s: &mut Scenario, a: &str, b: &str) -> bool {
    match s.space.entry(a, b) {
        Ok(GramEntry::Known(p)) if p.degree().unwrap_or(0) == 0 => {
            let v = p + &ZPoly::from_i64s(&[1]);
            s.space.set(a, b, GramEntry::Known(v)).unwrap();
            true
        }
        _ => false,
    }
}

fn fibre_scenarios() -> Vec<Scenario> {
    builtin_names().into_iter().map(|n| builtin(n).unwrap()).filter(|s| !s.fibres.is_empty()).collect()
}

#[test]
fn fibres_pass_and_single_mutations_fail() {
    let scenarios = fibre_scenarios();
    assert!(scenarios.len() >= 4);
    let mut mutants = 0;
    for s in &scenarios {
        let k = s.canonical();
        for f in &s.fibres {
            let c = fibre_check(&s.space, f, &k).unwrap();
            assert_eq!(c.verdict, Verdict::Satisfied, "{} {}", s.name, f.label);
            let mut syms: Vec<String> = f.components.iter().map(|c| c.symbol.clone()).collect();
            syms.push("K".into());
            for i in 0..syms.len() {
                for j in i..syms.len() {
                    if syms[i] == "K" && syms[j] == "K" {
                        continue;
                    }
                    let mut m = s.clone();
                    if !bump(&mut m, &syms[i], &syms[j]) {
                        continue;
                    }
                    let c = fibre_check(&m.space, f, &k).unwrap();
                    assert_eq!(c.verdict, Verdict::Violation, "{} {}: {}.{} bumped", s.name, f.label, syms[i], syms[j]);
                    mutants += 1;
                }
            }
        }
    }
    assert!(mutants > 50, "{mutants}");
}

#[test]
fn effect_free_steps_commute() {
    let s = builtin("k9-rational").unwrap();
    let base = replay_log(&s).unwrap();
    for c in &s.checks[..7] {
        assert!(c.rule != "solve_unknown" && !c.rule.starts_with("index"), "{} has an effect", c.rule);
    }
    let mut shuffled = s.clone();
    shuffled.checks[..7].reverse();
    let log = replay_log(&shuffled).unwrap();
    assert_eq!(log.scenario.resolved, base.scenario.resolved);
    assert_eq!(log.scenario.relations, base.scenario.relations);
    let mut a: Vec<String> = base.certificates().iter().map(|c| c.render_text()).collect();
    let mut b: Vec<String> = log.certificates().iter().map(|c| c.render_text()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}
