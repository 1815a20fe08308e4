use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::Value;

use super::{case_tree, half, is_even, q, to_i64, Args, Effect, EngineError, RuleOutcome};
use crate::certificate::{Certificate, Verdict};
use crate::lattice::{
    rational_roots, solve_in_basis, DivisorClass, GramEntry, IntersectionSpace, LatticeError,
};
use crate::scenario::{axioms, fibre_check, Scenario};
use crate::surface::{self, RamificationProfile};

/// What the equality case of the index inequality is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intent {
    /// A non-trivial isotropic class orthogonal to `p` excludes the data.
    Exclude,
    /// The class is recorded as numerically trivial.
    Force,
}

/// Admissibility filters for roots, applied in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissible {
    Integer,
    Even,
    Nonneg,
    Min(BigInt),
    Exclude(BigRational),
}

impl FromStr for Admissible {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "integer" | "int" => return Ok(Admissible::Integer),
            "even" => return Ok(Admissible::Even),
            "nonneg" | "nonnegative" => return Ok(Admissible::Nonneg),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("min:") {
            return v.trim().parse().map(Admissible::Min).map_err(|_| format!("bad bound {v:?}"));
        }
        if let Some(v) = s.strip_prefix("exclude:") {
            return parse_rational(v).map(Admissible::Exclude);
        }
        Err(format!("unknown admissibility {s:?}"))
    }
}

fn parse_rational(v: &str) -> Result<BigRational, String> {
    let v = v.trim();
    let (n, d) = v.split_once('/').unwrap_or((v, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| format!("bad rational {v:?}"))?;
    let d: BigInt = d.trim().parse().map_err(|_| format!("bad rational {v:?}"))?;
    if d.is_zero() {
        return Err(format!("bad rational {v:?}"));
    }
    Ok(BigRational::new(n, d))
}

/// First failed filter, as a reason string.
pub fn rejection(spec: &[Admissible], r: &BigRational) -> Option<String> {
    let has = |a: &Admissible| spec.contains(a);
    if (has(&Admissible::Integer) || has(&Admissible::Even)) && !r.is_integer() {
        return Some("non-integer".into());
    }
    if has(&Admissible::Even) && !is_even(r) {
        return Some("odd".into());
    }
    if has(&Admissible::Nonneg) && r.is_negative() {
        return Some("negative".into());
    }
    for a in spec {
        match a {
            Admissible::Min(m) if r < &BigRational::from_integer(m.clone()) => {
                return Some(format!("below {m}"))
            }
            Admissible::Exclude(v) if r == v => return Some("excluded".into()),
            _ => {}
        }
    }
    None
}

fn generators(s: &Scenario) -> Vec<DivisorClass> {
    s.space.symbols().iter().map(|n| DivisorClass::symbol(n)).collect()
}

fn r(s: &Scenario) -> Option<&BigInt> {
    s.resolved.as_ref()
}

/// The index inequality for `p² > 0`, with the equality case resolved by
/// pairing `e` against every base symbol.
pub fn rule_index(
    s: &Scenario,
    p: &DivisorClass,
    e: &DivisorClass,
    intent: Intent,
    relation: Option<(&str, &str)>,
    anchor: &str,
) -> Result<RuleOutcome, EngineError> {
    let sp = &s.space;
    let name = match intent {
        Intent::Exclude => "index_exclude",
        Intent::Force => "index_force",
    };
    let mut c = Certificate::new(name, anchor);
    let pp = c.pairing_const(sp, r(s), p, p)?;
    if !pp.is_positive() {
        return Err(LatticeError::NonPositiveSquare(p.render(sp)).into());
    }
    let pe = c.pairing_const(sp, r(s), p, e)?;
    let ee = c.pairing_const(sp, r(s), e, e)?;
    let (pr, er) = (p.render(sp), e.render(sp));
    let bound = &pe * &pe / &pp;
    if &ee * &pp > &pe * &pe {
        let c = c.conclude(format!("({er})^2 = {ee} exceeds {bound}, the bound from {pr}"), Verdict::Violation);
        return Ok(RuleOutcome::one(c));
    }
    if !(pe.is_zero() && ee.is_zero()) || e.is_zero() {
        let c = c.conclude(format!("({er})^2 = {ee} <= {bound}"), Verdict::Satisfied);
        return Ok(RuleOutcome::one(c));
    }
    let mut nonzero = Vec::new();
    let mut deferred = Vec::new();
    for g in generators(s) {
        let v = c.pairing(sp, r(s), e, &g)?;
        match v.as_constant() {
            Some(x) if x.is_zero() => {}
            Some(x) => nonzero.push(format!("({er}).{} = {x}", g.render(sp))),
            None => deferred.push(format!("({er}).{} = {}", g.render(sp), sp.render_value(&v))),
        }
    }
    let (lhs, rhs) = relation.map(|(a, b)| (a.to_string(), b.to_string())).unwrap_or((er.clone(), "0".into()));
    let payload = if relation.is_some() { format!("{lhs}-({rhs})") } else { er.clone() };
    if !nonzero.is_empty() {
        let c = c.conclude(
            format!("({pr}).({er}) = 0 and ({er})^2 = 0 but {}", nonzero.join(", ")),
            Verdict::Violation,
        );
        return Ok(RuleOutcome::one(c));
    }
    match intent {
        Intent::Exclude if deferred.is_empty() => {
            Ok(RuleOutcome::one(c.conclude(format!("{er} is numerically trivial"), Verdict::Satisfied)))
        }
        Intent::Exclude => Ok(RuleOutcome::one(
            c.conclude(format!("undecided: {}", deferred.join(", ")), Verdict::Inconclusive),
        )),
        Intent::Force => {
            let mut text = format!("{lhs} ≡ {rhs}");
            if !deferred.is_empty() {
                text.push_str(&format!("; hence {} = 0", deferred.join(", ")));
            }
            let c = c.conclude(text, Verdict::RelationForced(payload));
            Ok(RuleOutcome {
                certificates: vec![c],
                effect: Some(Effect::Relation { lhs, rhs, class: e.clone() }),
            })
        }
    }
}

/// Fixes the unknown from a Gram determinant that must vanish.
pub fn rule_solve_unknown(
    s: &Scenario,
    classes: &[DivisorClass],
    admissible: &[Admissible],
    anchor: &str,
) -> Result<RuleOutcome, EngineError> {
    let sp = &s.space;
    let var = sp.unknown().ok_or(EngineError::NoUnknown)?.to_string();
    let rho = s.invariants.rho as usize;
    let mut completion = 0;
    for n in &s.nodal {
        let nc = DivisorClass::symbol(n);
        if classes.contains(&nc) {
            continue;
        }
        let mut orth = true;
        for cl in classes {
            if !sp.pair(&nc, cl)?.is_zero() {
                orth = false;
                break;
            }
        }
        if orth {
            completion += 1;
        }
    }
    let total = classes.len() + completion;
    if total != rho + 1 {
        return Err(EngineError::WrongClassCount { expected: rho + 1, got: total });
    }
    let mut c = Certificate::new("solve_unknown", anchor);
    c.premise("Picard number", rho);
    c.premise("orthogonal nodal classes", completion);
    let det = c.determinant(sp, None, classes)?;
    c.premise("determinant, factored", det.render_factored(&var));
    let roots = rational_roots(&det)?;
    let mut survivors: Vec<BigRational> = Vec::new();
    for root in &roots {
        match rejection(admissible, root) {
            Some(why) => {
                c.premise(format!("root {var} = {root}"), format!("rejected: {why}"));
            }
            None => {
                c.premise(format!("root {var} = {root}"), "accepted");
                if !survivors.contains(root) {
                    survivors.push(root.clone());
                }
            }
        }
    }
    let list = |v: &[BigRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    Ok(match survivors.as_slice() {
        [] => RuleOutcome::one(c.conclude(
            format!("no admissible root among [{}]", list(&roots)),
            Verdict::Violation,
        )),
        [one] if one.is_integer() => RuleOutcome {
            effect: Some(Effect::Resolve(one.to_integer())),
            certificates: vec![c.conclude(format!("{var} = {one}"), Verdict::Satisfied)],
        },
        [one] => RuleOutcome::one(c.conclude(format!("{var} = {one} (not substituted)"), Verdict::Satisfied)),
        many => RuleOutcome::one(c.conclude(
            format!("several admissible roots: {}", list(many)),
            Verdict::Inconclusive,
        )),
    })
}

/// Parity of `C.(B0 + ΣN_i)`.
pub fn rule_parity_force(s: &Scenario, cl: &DivisorClass, on_odd: &str, anchor: &str) -> Result<Certificate, EngineError> {
    let sp = &s.space;
    let b0 = s.class("B0")?;
    let mut c = Certificate::new("parity", anchor);
    let cb = to_i64(&c.pairing_const(sp, r(s), cl, &b0)?)?;
    let mut cn = Vec::new();
    for n in s.nodal_classes() {
        cn.push(to_i64(&c.pairing_const(sp, r(s), cl, &n)?)?);
    }
    let inner = surface::parity_check(cb, &cn);
    let total = cb + cn.iter().sum::<i64>();
    let cr = cl.render(sp);
    Ok(match inner.verdict {
        Verdict::Satisfied => c.conclude(format!("{cr}.(B0+sum N_i) = {total} is even"), Verdict::Satisfied),
        _ => c.conclude(format!("{cr}.(B0+sum N_i) = {total} is odd: {on_odd}"), Verdict::Violation),
    })
}

/// Least genus of a component of fibre degree `d` meeting `fibres` double
/// fibre components, each contributing `d/2` to ramification.
pub fn rule_rh_bound(d: i64, fibres: usize, anchor: &str) -> Result<(Certificate, Option<i64>), EngineError> {
    let mut c = Certificate::new("rh_bound", anchor);
    c.premise("degree d", d);
    c.premise("double fibre components", fibres);
    c.cite(axioms::FIBRATION_FROM_NODES).cite(axioms::RAMIFICATION_FROM_DOUBLE_FIBRES);
    if d < 2 || d % 2 != 0 {
        return Ok((
            c.conclude(format!("d = {d} but d = 2 G_j.Γ must be even and at least 2"), Verdict::Violation),
            None,
        ));
    }
    let each = q(d) * half();
    c.premise("ramification per fibre", &each);
    let profile = RamificationProfile::uniform(d, fibres, each)?;
    let g = surface::rh_min_genus(&profile);
    c.premise("lower bound for 2g-2", -2 * d + profile.total().to_integer().try_into().unwrap_or(i64::MAX));
    Ok((c.conclude(format!("g >= {g}"), Verdict::Satisfied), Some(g)))
}

/// Solutions `t` in `range` of `b | 2(g-1) - c·t`, from
/// `b(F.Γ - K.Γ) = 2(g-1) - c·G.Γ`.
pub fn rule_divisibility_three(g: i64, range: (i64, i64), b: i64, cc: i64, anchor: &str) -> (Certificate, Vec<i64>) {
    let mut c = Certificate::new("divisibility_three", anchor);
    c.premise("g", g);
    c.premise("G.Γ range", format!("{}..{}", range.0, range.1));
    c.premise("relation", format!("{b}(F.Γ-K.Γ) = 2(g-1) - {cc}G.Γ"));
    let sols: Vec<i64> = (range.0..=range.1).filter(|t| (2 * (g - 1) - cc * t) % b == 0).collect();
    let c = match sols.as_slice() {
        [] => c.conclude("no admissible G.Γ", Verdict::Violation),
        [t] => {
            let diff = (2 * (g - 1) - cc * t) / b;
            let tail = if diff == 0 { "K.Γ = F.Γ".to_string() } else { format!("F.Γ - K.Γ = {diff}") };
            c.conclude(format!("G.Γ = {t} and {tail}"), Verdict::Satisfied)
        }
        many => c.conclude(format!("several values of G.Γ: {many:?}"), Verdict::Inconclusive),
    };
    (c, sols)
}

/// Linear form in the unknown and opaque entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Lin {
    coeffs: BTreeMap<String, BigRational>,
    constant: BigRational,
}

impl Lin {
    fn add(&mut self, var: &str, v: BigRational) {
        let e = self.coeffs.entry(var.to_string()).or_insert_with(BigRational::zero);
        *e += v;
        if e.is_zero() {
            self.coeffs.remove(var);
        }
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (v, k) in &self.coeffs {
            let name = if v.contains('.') { format!("[{v}]") } else { v.clone() };
            let sign = if k.is_negative() { "-" } else { "+" };
            let a = k.abs();
            let mag = if a == q(1) { name } else { format!("{a}*{name}") };
            if out.is_empty() {
                out = if k.is_negative() { format!("-{mag}") } else { mag };
            } else {
                out.push_str(&format!(" {sign} {mag}"));
            }
        }
        if !self.constant.is_zero() || out.is_empty() {
            if out.is_empty() {
                out = self.constant.to_string();
            } else {
                let sign = if self.constant.is_negative() { "-" } else { "+" };
                out.push_str(&format!(" {sign} {}", self.constant.abs()));
            }
        }
        out
    }
}

fn lin_pair(sp: &IntersectionSpace, probe: &str, cl: &DivisorClass) -> Result<Lin, LatticeError> {
    let mut l = Lin::default();
    let var = sp.unknown().unwrap_or("x").to_string();
    for (t, ct) in cl.terms() {
        match sp.entry(probe, t)? {
            GramEntry::Known(p) => {
                l.constant += ct * BigRational::from_integer(p.coeff(0));
                let lin = p.coeff(1);
                if !lin.is_zero() {
                    l.add(&var, ct * BigRational::from_integer(lin));
                }
            }
            GramEntry::Opaque => {
                let (a, b) = if probe <= t.as_str() { (probe, t.as_str()) } else { (t.as_str(), probe) };
                l.add(&format!("{a}.{b}"), ct.clone());
            }
        }
    }
    Ok(l)
}

/// Pins `probe.report` using the recorded relations and known totals,
/// treating the unknown and opaque entries as linear unknowns.
pub fn rule_degree_pin(
    s: &Scenario,
    probe: &str,
    report: &DivisorClass,
    require: &[Admissible],
    totals: &[(DivisorClass, BigRational)],
    anchor: &str,
) -> Result<RuleOutcome, EngineError> {
    let sp = &s.space;
    s.space.class(probe)?;
    let mut c = Certificate::new("degree_pin", anchor);
    let mut eqs: Vec<Lin> = Vec::new();
    for rel in &s.relations {
        let l = lin_pair(sp, probe, &rel.class)?;
        c.premise(format!("{probe}.({})", rel.class.render(sp)), format!("{} = 0", l.render()));
        eqs.push(l);
    }
    for (cl, v) in totals {
        let mut l = lin_pair(sp, probe, cl)?;
        c.premise(format!("{probe}.({})", cl.render(sp)), format!("{} = {v}", l.render()));
        l.constant -= v;
        eqs.push(l);
    }
    let mut vars: Vec<String> = eqs.iter().flat_map(|e| e.coeffs.keys().cloned()).collect();
    let target = lin_pair(sp, probe, report)?;
    vars.extend(target.coeffs.keys().cloned());
    vars.sort();
    vars.dedup();
    let n = vars.len();
    // rows: coefficients | rhs, with Σ a_i v_i = -constant
    let mut rows: Vec<Vec<BigRational>> = eqs
        .iter()
        .map(|e| {
            let mut row: Vec<BigRational> =
                vars.iter().map(|v| e.coeffs.get(v).cloned().unwrap_or_else(BigRational::zero)).collect();
            row.push(-e.constant.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, pr);
        let pv = rows[rank][col].clone();
        for x in rows[rank].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=n {
                    let t = &f * &rows[rank][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let rname = format!("{probe}.{}", report.render(sp));
    if rows[rank..].iter().any(|row| !row[n].is_zero()) {
        let c = c.conclude("the equations are inconsistent", Verdict::Violation);
        return Ok(RuleOutcome::one(c));
    }
    let mut value = target.constant.clone();
    let mut free: Vec<BigRational> =
        vars.iter().map(|v| target.coeffs.get(v).cloned().unwrap_or_else(BigRational::zero)).collect();
    for (k, &pc) in pivots.iter().enumerate() {
        let lp = free[pc].clone();
        if lp.is_zero() {
            continue;
        }
        value += &lp * &rows[k][n];
        for j in 0..n {
            let t = &lp * &rows[k][j];
            free[j] -= t;
        }
    }
    if free.iter().any(|x| !x.is_zero()) {
        let c = c.conclude(format!("{rname} is not determined"), Verdict::Inconclusive);
        return Ok(RuleOutcome::one(c));
    }
    let c = match rejection(require, &value) {
        Some(why) => c.conclude(format!("{rname} = {value}, {}", describe(&why)), Verdict::Violation),
        None => c.conclude(format!("{rname} = {value}"), Verdict::Satisfied),
    };
    Ok(RuleOutcome::one(c))
}

fn describe(why: &str) -> String {
    match why {
        "odd" => "which is odd".into(),
        "non-integer" => "which is not an integer".into(),
        other => format!("which is {other}"),
    }
}

/// Writes `target` in a basis; when the basis has `ρ` members the result
/// is a numerical equivalence.
pub fn rule_basis_relation(
    s: &Scenario,
    target_name: &str,
    basis: &[DivisorClass],
    anchor: &str,
) -> Result<RuleOutcome, EngineError> {
    let sp = &s.space;
    let target = s.class(target_name)?;
    let mut c = Certificate::new("basis_relation", anchor);
    let det = c.determinant(sp, r(s), basis)?;
    if det.is_zero() {
        return Err(LatticeError::SingularBasis.into());
    }
    for b in basis {
        c.pairing_const(sp, r(s), &target, b)?;
    }
    let coeffs = solve_in_basis(sp, &target, basis)?;
    let mut expr = DivisorClass::zero();
    for (b, k) in basis.iter().zip(&coeffs) {
        expr = expr.plus(&b.scale(k));
    }
    let rhs = expr.render(sp);
    let rho = s.invariants.rho as usize;
    c.premise("basis size", basis.len());
    c.premise("Picard number", rho);
    let e = target.minus(&expr);
    if basis.len() != rho {
        let c = c.conclude(format!("projection {target_name} -> {rhs} only"), Verdict::Inconclusive);
        return Ok(RuleOutcome::one(c));
    }
    let c = c.conclude(format!("{target_name} ≡ {rhs}"), Verdict::RelationForced(format!("{target_name}-({rhs})")));
    Ok(RuleOutcome {
        certificates: vec![c],
        effect: Some(Effect::Relation { lhs: target_name.to_string(), rhs, class: e }),
    })
}

/// Two disjoint equivalent curves of square zero form a base-point-free
/// pencil; a curve disjoint from it has no larger degree against a nef
/// class.
pub fn rule_pencil_exclusion(
    s: &Scenario,
    pencil: &DivisorClass,
    twin: &DivisorClass,
    curve: &DivisorClass,
    nef: &DivisorClass,
    anchor: &str,
) -> Result<Certificate, EngineError> {
    let sp = &s.space;
    let mut c = Certificate::new("pencil_exclusion", anchor);
    c.cite(axioms::BPF_PENCIL_MONOTONE);
    let diff = pencil.minus(twin);
    let mut trivial = true;
    for g in generators(s) {
        if !c.pairing_const(sp, r(s), &diff, &g)?.is_zero() {
            trivial = false;
        }
    }
    let pp = c.pairing_const(sp, r(s), pencil, pencil)?;
    let pt = c.pairing_const(sp, r(s), pencil, twin)?;
    let cp = c.pairing_const(sp, r(s), curve, pencil)?;
    let nc = c.pairing_const(sp, r(s), nef, curve)?;
    let np = c.pairing_const(sp, r(s), nef, pencil)?;
    let (pn, tn, cn, nn) = (pencil.render(sp), twin.render(sp), curve.render(sp), nef.render(sp));
    if !(trivial && pp.is_zero() && pt.is_zero() && cp.is_zero()) {
        return Ok(c.conclude(
            format!("{pn} and {tn} do not give a pencil containing {cn}"),
            Verdict::Inconclusive,
        ));
    }
    Ok(if nc > np {
        c.conclude(format!("{nc} = {nn}.{cn} <= {nn}.{pn} = {np} fails"), Verdict::Violation)
    } else {
        c.conclude(format!("{nc} = {nn}.{cn} <= {nn}.{pn} = {np}"), Verdict::Satisfied)
    })
}

fn riemann_roch(s: &Scenario, src: &str, h0: Option<i64>, anchor: &str) -> Result<Certificate, EngineError> {
    let sp = &s.space;
    let cl = s.class(src)?;
    let k = s.canonical();
    let mut c = Certificate::new("riemann_roch", anchor);
    let cc = to_i64(&c.pairing_const(sp, r(s), &cl, &cl)?)?;
    let kc = to_i64(&c.pairing_const(sp, r(s), &k, &cl)?)?;
    c.premise("chi(O)", s.invariants.chi_o);
    let chi = surface::riemann_roch_chi(s.invariants.chi_o, cc, kc)?;
    c.assume("higher cohomology vanishes, so h0 equals chi");
    Ok(match h0 {
        Some(v) if v != chi => c.conclude(format!("chi({src}) = {chi}, not {v}"), Verdict::Violation),
        _ => c.conclude(format!("h0({src}) = chi = {chi}"), Verdict::Satisfied),
    })
}

fn mj_table(s: &Scenario, js: &[i64], rows: &[Vec<i64>], anchor: &str) -> Result<Certificate, EngineError> {
    let sp = &s.space;
    let k = s.canonical();
    let d = s.class("D")?;
    let mut c = Certificate::new("mj_table", anchor);
    let mut bad = Vec::new();
    for (i, &j) in js.iter().enumerate() {
        let m = k.scale_int(j).plus(&d);
        let got = (
            to_i64(&c.pairing_const(sp, r(s), &k, &m)?)?,
            to_i64(&c.pairing_const(sp, r(s), &d, &m)?)?,
            to_i64(&c.pairing_const(sp, r(s), &m, &m)?)?,
        );
        let formula = surface::mj_invariants(j, &s.invariants);
        c.premise(format!("M{j} row (K.M, D.M, M^2)"), format!("({}, {}, {})", got.0, got.1, got.2));
        if got != formula {
            bad.push(format!("M{j}: pairings {got:?} but formula {formula:?}"));
        }
        if let Some(row) = rows.get(i) {
            if row.as_slice() != [got.0, got.1, got.2] {
                bad.push(format!("M{j}: expected {row:?}"));
            }
        }
    }
    Ok(if bad.is_empty() {
        c.conclude(format!("{} rows agree with the closed forms", js.len()), Verdict::Satisfied)
    } else {
        c.conclude(bad.join("; "), Verdict::Violation)
    })
}

fn rh_exclusion(s: &Scenario, a: &Args, anchor: &str) -> Result<Certificate, EngineError> {
    let sp = &s.space;
    let curve = s.class(a.str("genus_class")?)?;
    let map = s.class(a.str("degree_class")?)?;
    let k = s.canonical();
    let mut c = Certificate::new("rh_exclusion", anchor);
    c.cite(axioms::RAMIFICATION_FROM_DOUBLE_FIBRES);
    let bb = to_i64(&c.pairing_const(sp, r(s), &curve, &curve)?)?;
    let kb = to_i64(&c.pairing_const(sp, r(s), &k, &curve)?)?;
    let pa = surface::pa_branch(bb, kb)?;
    let degree = to_i64(&c.pairing_const(sp, r(s), &map, &curve)?)?;
    let mut total = BigRational::zero();
    for item in a.list("ramification")? {
        let Value::Object(o) = item else { return Err(a.bad("ramification items must be objects")) };
        if let Some(Value::String(src)) = o.get("class") {
            let g = s.class(src)?;
            total += c.pairing_const(sp, r(s), &g, &curve)?;
        } else {
            let v = o.get("value").and_then(Value::as_i64).ok_or_else(|| a.bad("item needs class or value"))?;
            let n = o.get("count").and_then(Value::as_i64).unwrap_or(1);
            let label = o.get("label").and_then(Value::as_str).unwrap_or("ramification");
            c.premise(format!("{label} (x{n})"), v);
            total += q(v * n);
        }
    }
    let inner = surface::rh_exclusion(pa, degree, &total);
    c.premises.extend(inner.premises);
    Ok(c.conclude(inner.conclusion, inner.verdict))
}

fn admissible_list(a: &Args, key: &str) -> Result<Vec<Admissible>, EngineError> {
    a.strings(key)?.into_iter().map(|v| v.parse().map_err(|e: String| a.bad(e))).collect()
}

pub(crate) fn dispatch(
    s: &Scenario,
    rule: &str,
    args: &BTreeMap<String, Value>,
    anchor: Option<&str>,
) -> Result<RuleOutcome, EngineError> {
    let a = Args::new(rule, args);
    let anchor = anchor.unwrap_or(rule);
    match rule {
        "index_exclude" | "index_force" | "hodge_bound" => {
            let p = s.class(a.str("p")?)?;
            let intent = if rule == "index_force" { Intent::Force } else { Intent::Exclude };
            if let Some(e) = a.opt_str("e")? {
                if rule == "hodge_bound" {
                    let c = crate::lattice::forms::hodge_bound_with(&s.space, r(s), &p, &s.class(e)?, anchor)?;
                    return Ok(RuleOutcome::one(c));
                }
                return rule_index(s, &p, &s.class(e)?, intent, None, anchor);
            }
            let (lhs, rhs) = (a.str("lhs")?, a.str("rhs")?);
            let e = s.class(lhs)?.minus(&s.class(rhs)?);
            rule_index(s, &p, &e, intent, Some((lhs, rhs)), anchor)
        }
        "solve_unknown" => {
            let classes = s.class_list(a.str("classes")?)?;
            rule_solve_unknown(s, &classes, &admissible_list(&a, "admissible")?, anchor)
        }
        "parity" => {
            let on_odd = a.opt_str("on_odd")?.unwrap_or("excluded");
            Ok(RuleOutcome::one(rule_parity_force(s, &s.class(a.str("class")?)?, on_odd, anchor)?))
        }
        "rh_bound" => {
            let fibres = match a.opt_i64("fibres")? {
                Some(n) => n,
                None => s.fibration.as_ref().map(|f| f.singular_fibres).ok_or_else(|| a.bad("missing fibres"))?,
            };
            let fibres = usize::try_from(fibres).map_err(|_| a.bad("negative fibre count"))?;
            Ok(RuleOutcome::one(rule_rh_bound(a.i64("degree")?, fibres, anchor)?.0))
        }
        "rh_exclusion" => Ok(RuleOutcome::one(rh_exclusion(s, &a, anchor)?)),
        "divisibility_three" => {
            let range = a.ints("range")?;
            let range = match range.as_slice() {
                [lo, hi] if lo <= hi => (*lo, *hi),
                _ => return Err(a.bad("range must be [lo, hi]")),
            };
            let b = a.opt_i64("b")?.unwrap_or(3);
            let cc = a.opt_i64("c")?.unwrap_or(2);
            if b == 0 {
                return Err(a.bad("b must be nonzero"));
            }
            Ok(RuleOutcome::one(rule_divisibility_three(a.i64("g")?, range, b, cc, anchor).0))
        }
        "degree_pin" => {
            let report = s.class(a.str("report")?)?;
            let mut totals = Vec::new();
            for t in a.list("totals")? {
                let Value::Object(o) = t else { return Err(a.bad("totals must be objects")) };
                let cl = o.get("class").and_then(Value::as_str).ok_or_else(|| a.bad("total needs class"))?;
                let v = o.get("value").and_then(Value::as_i64).ok_or_else(|| a.bad("total needs value"))?;
                totals.push((s.class(cl)?, q(v)));
            }
            rule_degree_pin(s, a.str("probe")?, &report, &admissible_list(&a, "require")?, &totals, anchor)
        }
        "basis_relation" => {
            let basis = s.class_list(a.str("basis")?)?;
            rule_basis_relation(s, a.str("target")?, &basis, anchor)
        }
        "pencil_exclusion" => Ok(RuleOutcome::one(rule_pencil_exclusion(
            s,
            &s.class(a.str("pencil")?)?,
            &s.class(a.str("twin")?)?,
            &s.class(a.str("curve")?)?,
            &s.class(a.str("nef")?)?,
            anchor,
        )?)),
        "fibre_check" => {
            let k = s.canonical();
            let chosen: Vec<_> = match a.opt_str("fibre")? {
                Some(l) => vec![s.fibre(l).ok_or_else(|| a.bad(format!("no fibre {l:?}")))?],
                None => s.fibres.iter().collect(),
            };
            if chosen.is_empty() {
                return Err(a.bad("scenario declares no fibres"));
            }
            let certificates = chosen
                .into_iter()
                .map(|f| fibre_check(&s.space, f, &k).map(|mut c| {
                    c.anchor = anchor.to_string();
                    c
                }))
                .collect::<Result<Vec<_>, _>>()?;
            let mut outcome = RuleOutcome { certificates, effect: None };
            // the verdict of a multi-fibre check is the worst one
            if outcome.certificates.len() > 1 {
                if let Some(i) = outcome.certificates.iter().position(|c| c.verdict.is_violation()) {
                    let bad = outcome.certificates.remove(i);
                    outcome.certificates.push(bad);
                }
            }
            Ok(outcome)
        }
        "radical" => {
            let e = s.class(a.str("e")?)?;
            let gens = match a.opt_str("generators")? {
                Some(g) => s.class_list(g)?,
                None => generators(s),
            };
            let mut c = Certificate::new("radical", anchor);
            let mut trivial = true;
            for g in gens.iter().chain(std::iter::once(&e)) {
                if !c.pairing_const(&s.space, r(s), &e, g)?.is_zero() {
                    trivial = false;
                }
            }
            let er = e.render(&s.space);
            Ok(RuleOutcome::one(if trivial {
                c.conclude(format!("{er} pairs to zero with every generator"), Verdict::Satisfied)
            } else {
                c.conclude(format!("{er} is not in the radical"), Verdict::Violation)
            }))
        }
        "pairing" => {
            let (l, rr) = (s.class(a.str("left")?)?, s.class(a.str("right")?)?);
            let want = q(a.i64("value")?);
            let mut c = Certificate::new("pairing", anchor);
            let got = c.pairing(&s.space, r(s), &l, &rr)?;
            let txt = s.space.render_value(&got);
            Ok(RuleOutcome::one(if got.as_constant() == Some(want.clone()) {
                c.conclude(format!("value {txt}"), Verdict::Satisfied)
            } else {
                c.conclude(format!("value {txt}, expected {want}"), Verdict::Violation)
            }))
        }
        "riemann_roch" => Ok(RuleOutcome::one(riemann_roch(s, a.str("class")?, a.opt_i64("h0")?, anchor)?)),
        "mj_table" => {
            let js = a.range("j")?;
            let rows: Vec<Vec<i64>> = a
                .list("rows")?
                .iter()
                .map(|v| {
                    v.as_array()
                        .and_then(|r| r.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| a.bad("rows must be integer triples"))
                })
                .collect::<Result<_, _>>()?;
            Ok(RuleOutcome::one(mj_table(s, &js, &rows, anchor)?))
        }
        "minus_one_curve" => {
            let dcs = a.ints("dc")?;
            if dcs.is_empty() {
                return Err(a.bad("dc must list at least one value"));
            }
            let expected = a
                .list("survivors")?
                .iter()
                .map(|v| {
                    v.as_array()
                        .and_then(|r| r.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
                        .and_then(|r| match r.as_slice() {
                            [dc, a0, a1] => Some(case_tree::Leaf { dc: *dc, cn0: *a0, cn1: *a1 }),
                            _ => None,
                        })
                        .ok_or_else(|| a.bad("survivors must be [dc, cn0, cn1] triples"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let exp = if a.list("survivors")?.is_empty() { None } else { Some(expected.as_slice()) };
            let certificates = case_tree::minus_one_curve_tree(&s.invariants, &dcs, exp, anchor)?;
            Ok(RuleOutcome { certificates, effect: None })
        }
        other => Err(EngineError::RuleNotFound(other.to_string())),
    }
}
