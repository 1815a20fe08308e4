use super::{BranchCandidate, BranchError, ClassExpr, ClassificationTable, Component, ComponentClass, ExcludedRow, KeptRow};
use super::enumerate::FibrationData;
use crate::certificate::{Certificate, Verdict};
use crate::engine::{
    q, replay_log, rule_basis_relation, rule_degree_pin, rule_divisibility_three, rule_index, rule_pencil_exclusion,
    rule_rh_bound, rule_solve_unknown, to_i64, Admissible, Effect, Intent,
};
use crate::lattice::{solve_in_basis, DivisorClass, GramEntry, IntersectionSpace};
use crate::scenario::{Relation, Route, Scenario};

const ANCHOR: &str = "branch/filter";

/// Replayed scenario state the filter works against.
#[derive(Clone, Debug)]
pub struct FilterContext {
    pub scenario: Scenario,
    pub fibration: FibrationData,
    pub route: Route,
    pub forcing: DivisorClass,
    pub fibre: String,
    pub curve: String,
    pub node: String,
    pub pencil: bool,
}

impl FilterContext {
    pub fn new(s: &Scenario) -> Result<Self, BranchError> {
        let log = replay_log(s)?;
        let fibration = FibrationData::from_log(&log)?;
        let s = log.scenario;
        let spec = s.fibration.clone().ok_or_else(|| BranchError::MissingData("fibration block".into()))?;
        let forcing = s.class(&spec.forcing_class)?;
        Ok(Self {
            fibration,
            route: spec.route,
            forcing,
            fibre: spec.fibre,
            curve: spec.curve,
            node: spec.node,
            pencil: spec.pencil,
            scenario: s,
        })
    }
}

enum Outcome {
    Kept(Vec<ComponentClass>, Vec<Certificate>),
    Excluded(Certificate, Vec<Certificate>),
}

enum Degrees {
    Known(Vec<(i64, i64)>),
    Excluded(Certificate),
    Unknown,
}

fn gamma(i: usize) -> String {
    format!("Gamma{i}")
}

fn undetermined(cand: &BranchCandidate) -> Vec<ComponentClass> {
    cand.components()
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentClass { name: gamma(i), component: *c, class: ClassExpr::Undetermined })
        .collect()
}

/// Smallest genus allowed for any even fibre degree, with the degree
/// attaining it.
fn genus_floor(f: &FibrationData) -> Result<Option<(i64, i64)>, BranchError> {
    let mut best: Option<(i64, i64)> = None;
    for d in (2..=f.fb0).step_by(2) {
        let g = f.rh_genus(d)?;
        if best.is_none_or(|(_, b)| g < b) {
            best = Some((d, g));
        }
    }
    Ok(best)
}

/// Space on `K`, the fibre class and the given components, plus the nodal
/// symbols (orthogonal to everything else). `F.Γ` is `scale*x + offset`
/// from `fibre_degree`, or opaque when it returns `None`.
fn component_space(
    ctx: &FilterContext,
    comps: &[(String, Component)],
    fibre_degree: &dyn Fn(usize) -> Option<(i64, i64)>,
    with_nodes: bool,
) -> Result<Scenario, BranchError> {
    let base = &ctx.scenario;
    let mut syms = vec!["K".to_string(), ctx.fibre.clone()];
    syms.extend(comps.iter().map(|(n, _)| n.clone()));
    let nodes: Vec<String> = if with_nodes { base.nodal.clone() } else { Vec::new() };
    syms.extend(nodes.iter().cloned());
    let mut sp = IntersectionSpace::new(&syms, usize::try_from(base.invariants.rho).ok())?;
    let k = DivisorClass::symbol("K");
    let f = DivisorClass::symbol(&ctx.fibre);
    sp.set_int("K", "K", base.invariants.kk)?;
    sp.set_int("K", &ctx.fibre, to_i64(&base.space.pair_const(&k, &f)?)?)?;
    sp.set_int(&ctx.fibre, &ctx.fibre, 0)?;
    for (i, (n, c)) in comps.iter().enumerate() {
        sp.set_int("K", n, c.kappa())?;
        sp.set_int(n, n, c.ss)?;
        match fibre_degree(i) {
            Some((scale, offset)) => sp.set_unknown(&ctx.fibre, n, "x", scale, offset)?,
            None => sp.set(&ctx.fibre, n, GramEntry::Opaque)?,
        }
        for (m, _) in &comps[i + 1..] {
            sp.set_int(n, m, 0)?;
        }
    }
    for (i, a) in nodes.iter().enumerate() {
        for b in &syms {
            if !nodes.contains(b) {
                sp.set_int(a, b, 0)?;
            }
        }
        for b in &nodes[i..] {
            sp.set_int(a, b, if a == b { -2 } else { 0 })?;
        }
    }
    let mut s = Scenario::synthetic(&base.name, base.invariants, sp, nodes);
    let mut b0 = DivisorClass::zero();
    for (n, _) in comps {
        b0 = b0.plus(&DivisorClass::symbol(n));
    }
    s.classes.insert("B0".into(), b0);
    Ok(s)
}

fn push_relation(s: &mut Scenario, effect: Option<Effect>) {
    if let Some(Effect::Relation { lhs, rhs, class }) = effect {
        s.relations.push(Relation { lhs, rhs, class });
    }
}

/// Distinct components after identifying equal components of square zero,
/// each with its multiplicity and first index.
fn merge_duplicates(
    ctx: &FilterContext,
    cand: &BranchCandidate,
    chain: &mut Vec<Certificate>,
) -> Result<Vec<(usize, Component, i64)>, BranchError> {
    let inv = &ctx.scenario.invariants;
    let mut distinct: Vec<(usize, Component, i64)> = Vec::new();
    for (i, c) in cand.components().iter().enumerate() {
        if let Some(entry) = distinct.iter_mut().find(|(_, d, _)| d == c && c.ss == 0) {
            let (a, b) = (gamma(entry.0), gamma(i));
            let mut sp = IntersectionSpace::new(&["K", "D", a.as_str(), b.as_str()], None)?;
            sp.set_int("K", "K", inv.kk)?;
            sp.set_int("K", "D", inv.kd)?;
            sp.set_int("D", "D", inv.dd)?;
            for n in [&a, &b] {
                sp.set_int("K", n, c.kappa())?;
                sp.set_int("D", n, c.d_degree())?;
                sp.set_int(n, n, c.ss)?;
            }
            sp.set_int(&a, &b, 0)?;
            let s = Scenario::synthetic(&ctx.scenario.name, *inv, sp, Vec::new());
            let e = DivisorClass::symbol(&a).minus(&DivisorClass::symbol(&b));
            let out = rule_index(&s, &DivisorClass::symbol("D"), &e, Intent::Force, Some((&b, &a)), ANCHOR)?;
            let cert = out.certificates.into_iter().last().expect("one certificate");
            let forced = matches!(cert.verdict, Verdict::RelationForced(_));
            chain.push(cert);
            if forced {
                entry.2 += 1;
                continue;
            }
        }
        distinct.push((i, *c, 1));
    }
    Ok(distinct)
}

fn gram_degrees(ctx: &FilterContext, cand: &BranchCandidate, chain: &mut Vec<Certificate>) -> Result<Degrees, BranchError> {
    let f = &ctx.fibration;
    let distinct = merge_duplicates(ctx, cand, chain)?;
    let rho = ctx.scenario.invariants.rho as usize;
    let nodes = ctx.scenario.nodal.len();
    let nd = distinct.len();
    let require = [Admissible::Even, Admissible::Min(2.into())];
    let named: Vec<(String, Component)> = distinct.iter().map(|(i, c, _)| (gamma(*i), *c)).collect();

    if nd + nodes == rho {
        // the components and nodal curves span, so K is a combination of them
        let mut s = component_space(ctx, &named, &|i| (i == 0).then_some((1, 0)), true)?;
        let mut b0 = DivisorClass::zero();
        for (i, _, m) in &distinct {
            b0 = b0.plus(&DivisorClass::symbol(&gamma(*i)).scale_int(*m));
        }
        s.classes.insert("B0".into(), b0.clone());
        let mut basis: Vec<DivisorClass> = named.iter().map(|(n, _)| DivisorClass::symbol(n)).collect();
        basis.extend(s.nodal.iter().map(|n| DivisorClass::symbol(n)));
        let out = rule_basis_relation(&s, "K", &basis, ANCHOR)?;
        chain.extend(out.certificates.iter().cloned());
        if !matches!(out.last().verdict, Verdict::RelationForced(_)) {
            return Ok(Degrees::Unknown);
        }
        push_relation(&mut s, out.effect);
        let report = DivisorClass::symbol(&named[0].0);
        let pin = rule_degree_pin(&s, &ctx.fibre, &report, &require, &[(b0, q(f.fb0))], ANCHOR)?;
        let cert = pin.certificates.into_iter().last().expect("one certificate");
        if cert.verdict.is_violation() {
            return Ok(Degrees::Excluded(cert));
        }
        chain.push(cert);
        return Ok(Degrees::Unknown);
    }

    if nd == 2 {
        if let Some(pos) = (0..2).find(|&j| distinct[j].1.ss > 0) {
            let other = 1 - pos;
            if distinct[other].2 != 1 {
                return Ok(Degrees::Unknown);
            }
            let m = distinct[pos].2;
            let mut s = component_space(
                ctx,
                &named,
                &|i| Some(if i == pos { (1, 0) } else { (-m, f.fb0) }),
                false,
            )?;
            let gp = DivisorClass::symbol(&named[pos].0);
            let go = DivisorClass::symbol(&named[other].0);
            let coeffs = solve_in_basis(&s.space, &gp, &[DivisorClass::symbol("K"), go.clone()])?;
            let expr = DivisorClass::symbol("K").scale(&coeffs[0]).plus(&go.scale(&coeffs[1]));
            let rhs = expr.render(&s.space);
            let out = rule_index(&s, &gp, &gp.minus(&expr), Intent::Force, Some((&named[pos].0, &rhs)), ANCHOR)?;
            chain.extend(out.certificates.iter().cloned());
            if !matches!(out.last().verdict, Verdict::RelationForced(_)) {
                return Ok(Degrees::Unknown);
            }
            push_relation(&mut s, out.effect);
            let pin = rule_degree_pin(&s, &ctx.fibre, &gp, &require, &[], ANCHOR)?;
            let cert = pin.certificates.into_iter().last().expect("one certificate");
            if cert.verdict.is_violation() {
                return Ok(Degrees::Excluded(cert));
            }
            chain.push(cert);
            return Ok(Degrees::Unknown);
        }
    }

    if nd == 2 && nd + 2 + nodes == rho + 1 {
        // x = F.Γ on one class, the partner's degree from F.B0
        let carrier = (0..2)
            .filter(|&j| distinct[1 - j].2 == 1)
            .max_by_key(|&j| (distinct[j].1.kappa(), std::cmp::Reverse(j)));
        let Some(j) = carrier else { return Ok(Degrees::Unknown) };
        let m = distinct[j].2;
        let order = [j, 1 - j];
        let ordered: Vec<(String, Component)> = order.iter().map(|&i| named[i].clone()).collect();
        let s = component_space(
            ctx,
            &ordered,
            &|i| Some(if i == 0 { (1, 0) } else { (-m, f.fb0) }),
            true,
        )?;
        let mut classes: Vec<DivisorClass> = ordered.iter().map(|(n, _)| DivisorClass::symbol(n)).collect();
        classes.push(DivisorClass::symbol("K"));
        classes.push(DivisorClass::symbol(&ctx.fibre));
        let out = rule_solve_unknown(&s, &classes, &require, ANCHOR)?;
        let cert = out.last().clone();
        if cert.verdict.is_violation() {
            return Ok(Degrees::Excluded(cert));
        }
        chain.push(cert);
        let Some(Effect::Resolve(x)) = out.effect else { return Ok(Degrees::Unknown) };
        let x: i64 = i64::try_from(&x).map_err(|_| BranchError::MissingData("degree out of range".into()))?;
        let deg_of = |c: &Component| if *c == distinct[j].1 { x } else { f.fb0 - m * x };
        let mut out = Vec::new();
        for c in cand.components() {
            let d = deg_of(c);
            match f.t_for(c, d) {
                Some(t) => out.push((d, t)),
                None => return Ok(Degrees::Unknown),
            }
        }
        return Ok(Degrees::Known(out));
    }
    Ok(Degrees::Unknown)
}

fn relation_degrees(ctx: &FilterContext, cand: &BranchCandidate, chain: &mut Vec<Certificate>) -> Result<Degrees, BranchError> {
    let f = &ctx.fibration;
    if 1 + f.a == -f.b && f.b != 0 {
        for c in cand.components() {
            let (mut cert, _) = rule_divisibility_three(c.g, (0, f.gb0), f.b, f.c, ANCHOR);
            cert.premise("component", c);
            chain.push(cert);
        }
    }
    let all = f.assignments(cand)?;
    Ok(match all.as_slice() {
        [one] => Degrees::Known(one.clone()),
        [] => {
            let mut c = Certificate::new("fibre_degrees", ANCHOR);
            c.premise("F.B0", f.fb0);
            c.premise("G.B0", f.gb0);
            Degrees::Excluded(c.conclude("no fibre and section degrees fit the totals", Verdict::Violation))
        }
        _ => Degrees::Unknown,
    })
}

/// Base space extended by the components with all their pairings.
fn extended_space(ctx: &FilterContext, cand: &BranchCandidate, degrees: &[(i64, i64)]) -> Result<Scenario, BranchError> {
    let base = &ctx.scenario;
    let bsyms = base.space.symbols().to_vec();
    let names: Vec<String> = (0..cand.len()).map(gamma).collect();
    let mut syms = bsyms.clone();
    syms.extend(names.iter().cloned());
    let mut sp = IntersectionSpace::new(&syms, base.space.rank_bound())?;
    for (i, a) in bsyms.iter().enumerate() {
        for b in &bsyms[i..] {
            sp.set(a, b, base.space.entry(a, b)?.clone())?;
        }
    }
    for (i, (n, c)) in names.iter().zip(cand.components()).enumerate() {
        let (d, t) = degrees[i];
        for b in &bsyms {
            let v = match b.as_str() {
                "K" => c.kappa(),
                "D" => c.d_degree(),
                x if x == ctx.fibre => d,
                x if x == ctx.curve => t,
                _ => 0,
            };
            sp.set_int(b, n, v)?;
        }
        for (j, m) in names.iter().enumerate().skip(i) {
            sp.set_int(n, m, if i == j { c.ss } else { 0 })?;
        }
    }
    let mut s = Scenario::synthetic(&base.name, base.invariants, sp, base.nodal.clone());
    s.classes = base.classes.clone();
    Ok(s)
}

fn process(ctx: &FilterContext, cand: &BranchCandidate) -> Result<Outcome, BranchError> {
    let f = &ctx.fibration;
    let mut chain = Vec::new();

    if let Some((d, gmin)) = genus_floor(f)? {
        if let Some(low) = cand.components().iter().find(|c| c.g < gmin) {
            let (mut cert, _) = rule_rh_bound(d, f.fibres, ANCHOR)?;
            cert.premise("least bound over even d", gmin);
            cert.premise("component", low);
            let cert = cert.conclude(format!("every component has g >= {gmin}, but {low} has g = {}", low.g), Verdict::Violation);
            return Ok(Outcome::Excluded(cert, chain));
        }
    }

    let degrees = if cand.len() == 1 {
        let c = &cand.components()[0];
        match f.t_for(c, f.fb0) {
            Some(t) => Degrees::Known(vec![(f.fb0, t)]),
            None => Degrees::Unknown,
        }
    } else {
        match ctx.route {
            Route::Gram => gram_degrees(ctx, cand, &mut chain)?,
            Route::Relation => relation_degrees(ctx, cand, &mut chain)?,
        }
    };
    let degrees = match degrees {
        Degrees::Excluded(cert) => return Ok(Outcome::Excluded(cert, chain)),
        Degrees::Unknown => return Ok(Outcome::Kept(undetermined(cand), chain)),
        Degrees::Known(d) => d,
    };
    if cand.len() == 1 {
        // one component is B0 itself; nothing is forced beyond that
        return Ok(Outcome::Kept(undetermined(cand), chain));
    }

    let s = extended_space(ctx, cand, &degrees)?;
    let basis: Vec<DivisorClass> = ["K", &ctx.fibre, &ctx.curve, &ctx.node].iter().map(|n| DivisorClass::symbol(n)).collect();
    let mut classes = Vec::new();
    for (i, c) in cand.components().iter().enumerate() {
        let name = gamma(i);
        let g = DivisorClass::symbol(&name);
        let coeffs = solve_in_basis(&s.space, &g, &basis)?;
        let mut expr = DivisorClass::zero();
        for (b, k) in basis.iter().zip(&coeffs) {
            expr = expr.plus(&b.scale(k));
        }
        let rhs = expr.render(&s.space);
        let out = rule_index(&s, &ctx.forcing, &g.minus(&expr), Intent::Force, Some((&name, &rhs)), ANCHOR)?;
        let cert = out.certificates.into_iter().last().expect("one certificate");
        let class = match &cert.verdict {
            Verdict::RelationForced(_) => ClassExpr::Forced(rhs),
            Verdict::Violation => return Ok(Outcome::Excluded(cert, chain)),
            _ => ClassExpr::Undetermined,
        };
        chain.push(cert);
        classes.push(ComponentClass { name, component: *c, class });
    }

    if ctx.pencil {
        let fib = DivisorClass::symbol(&ctx.fibre);
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let (a, b) = (&classes[i], &classes[j]);
                if a.component.ss != 0 || a.class != b.class || a.class == ClassExpr::Undetermined {
                    continue;
                }
                for (k, other) in classes.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    let cert = rule_pencil_exclusion(
                        &s,
                        &DivisorClass::symbol(&a.name),
                        &DivisorClass::symbol(&b.name),
                        &DivisorClass::symbol(&other.name),
                        &fib,
                        ANCHOR,
                    )?;
                    if cert.verdict.is_violation() {
                        return Ok(Outcome::Excluded(cert, chain));
                    }
                    chain.push(cert);
                }
            }
        }
    }
    Ok(Outcome::Kept(classes, chain))
}

/// Filters labelled candidates against a scenario with a fibration. Rows
/// come back in canonical candidate order whatever the input order.
pub fn filter_labelled(
    cands: &[(Option<String>, BranchCandidate)],
    s: &Scenario,
) -> Result<ClassificationTable, BranchError> {
    let mut table = ClassificationTable { scenario: s.name.clone(), ..Default::default() };
    if cands.is_empty() {
        return Ok(table);
    }
    let ctx = FilterContext::new(s)?;
    for (label, cand) in cands {
        match process(&ctx, cand)? {
            Outcome::Kept(classes, certificates) => table.kept.push(KeptRow {
                label: label.clone(),
                candidate: cand.clone(),
                classes,
                existence: None,
                sources: Vec::new(),
                certificates,
            }),
            Outcome::Excluded(certificate, chain) => {
                table.excluded.push(ExcludedRow { label: label.clone(), candidate: cand.clone(), certificate, chain })
            }
        }
    }
    table.kept.sort_by(|a, b| (&a.candidate, &a.label).cmp(&(&b.candidate, &b.label)));
    table.excluded.sort_by(|a, b| (&a.candidate, &a.label).cmp(&(&b.candidate, &b.label)));
    Ok(table)
}

pub fn filter_candidates(cands: &[BranchCandidate], s: &Scenario) -> Result<ClassificationTable, BranchError> {
    let labelled: Vec<(Option<String>, BranchCandidate)> = cands.iter().map(|c| (None, c.clone())).collect();
    filter_labelled(&labelled, s)
}

/// Class expressions for the components of a candidate that survives the
/// filter; `None` when it is excluded.
pub fn solve_component_classes(s: &Scenario, cand: &BranchCandidate) -> Result<Option<Vec<ComponentClass>>, BranchError> {
    let ctx = FilterContext::new(s)?;
    Ok(match process(&ctx, cand)? {
        Outcome::Kept(classes, _) => Some(classes),
        Outcome::Excluded(..) => None,
    })
}
