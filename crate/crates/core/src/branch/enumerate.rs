use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{BranchCandidate, BranchError, Component};
use crate::engine::{half, q, to_i64, ReplayLog};
use crate::surface::{self, RamificationProfile, SurfaceInvariants};

/// Numerical shape of `B0 ≡ aK + bF + cG + (nodal part)` together with
/// `F.B0`, `G.B0` and the number of singular fibres `N + 2G_j + N'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationData {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub fb0: i64,
    pub gb0: i64,
    pub fibres: usize,
}

impl FibrationData {
    /// Reads the forced `B0` relation and the resolved pairings.
    pub fn from_log(log: &ReplayLog) -> Result<Self, BranchError> {
        let s = &log.scenario;
        let spec = s.fibration.as_ref().ok_or_else(|| BranchError::MissingData("fibration block".into()))?;
        let rel = s.relation("B0").ok_or_else(|| BranchError::MissingData("forced B0 relation".into()))?;
        let b0 = s.class("B0")?;
        let rhs = b0.minus(&rel.class);
        let mut a = None;
        let mut b = None;
        let mut c = None;
        for (sym, coeff) in rhs.terms() {
            let v = to_i64(coeff)?;
            if sym == "K" {
                a = Some(v);
            } else if sym == &spec.fibre {
                b = Some(v);
            } else if sym == &spec.curve {
                c = Some(v);
            } else if !s.nodal.contains(sym) {
                return Err(BranchError::MissingData(format!("B0 relation has a non-nodal term {sym}")));
            }
        }
        let f = s.space.class(&spec.fibre)?;
        let g = s.space.class(&spec.curve)?;
        Ok(Self {
            a: a.unwrap_or(0),
            b: b.unwrap_or(0),
            c: c.unwrap_or(0),
            fb0: to_i64(&s.space.pair_const(&f, &b0)?)?,
            gb0: to_i64(&s.space.pair_const(&g, &b0)?)?,
            fibres: usize::try_from(spec.singular_fibres)
                .map_err(|_| BranchError::MissingData("negative fibre count".into()))?,
        })
    }

    /// Least genus of a component with `F.Γ = d`, each singular fibre
    /// contributing `d/2` to the ramification.
    pub fn rh_genus(&self, d: i64) -> Result<i64, BranchError> {
        let profile = RamificationProfile::uniform(d, self.fibres, q(d) * half())?;
        Ok(surface::rh_min_genus(&profile))
    }

    /// `G.Γ` from `Γ² = aK.Γ + bF.Γ + cG.Γ`, if integral and in range.
    pub fn t_for(&self, comp: &Component, d: i64) -> Option<i64> {
        let num = comp.ss - self.a * comp.kappa() - self.b * d;
        if self.c == 0 {
            return None;
        }
        (num % self.c == 0).then_some(num / self.c).filter(|t| (0..=self.gb0).contains(t))
    }

    /// Admissible `(F.Γ, G.Γ)` for one component: `F.Γ` even and at least 2,
    /// genus above the ramification bound.
    pub fn options(&self, comp: &Component) -> Result<Vec<(i64, i64)>, BranchError> {
        let mut out = Vec::new();
        for d in (2..=self.fb0).step_by(2) {
            if comp.g < self.rh_genus(d)? {
                continue;
            }
            if let Some(t) = self.t_for(comp, d) {
                out.push((d, t));
            }
        }
        Ok(out)
    }

    /// Assignments of `(F.Γ, G.Γ)` to every component with the right totals.
    pub fn assignments(&self, cand: &BranchCandidate) -> Result<Vec<Vec<(i64, i64)>>, BranchError> {
        let opts: Vec<Vec<(i64, i64)>> = cand.components().iter().map(|c| self.options(c)).collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            opts: &[Vec<(i64, i64)>],
            fb0: i64,
            gb0: i64,
            cur: &mut Vec<(i64, i64)>,
            out: &mut Vec<Vec<(i64, i64)>>,
        ) {
            let (sd, st) = cur.iter().fold((0, 0), |(a, b), (d, t)| (a + d, b + t));
            if sd > fb0 || st > gb0 {
                return;
            }
            if cur.len() == opts.len() {
                if sd == fb0 && st == gb0 {
                    out.push(cur.clone());
                }
                return;
            }
            for &o in &opts[cur.len()] {
                cur.push(o);
                rec(opts, fb0, gb0, cur, out);
                cur.pop();
            }
        }
        rec(&opts, self.fb0, self.gb0, &mut cur, &mut out);
        Ok(out)
    }
}

/// Constraints for the enumeration beyond the invariant sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Lower bound for `D.Γ` on each component.
    pub min_d: i64,
    #[serde(default)]
    pub max_components: Option<usize>,
    #[serde(default)]
    pub fibration: Option<FibrationData>,
}

impl ConstraintSet {
    pub fn generic(min_d: i64) -> Self {
        Self { min_d, max_components: None, fibration: None }
    }
}

fn db0(inv: &SurfaceInvariants) -> i64 {
    inv.dd - 2 * inv.kd
}

/// Largest `Γ²` allowed for `D.Γ = dg` by the index bound and parity.
fn ss_max(inv: &SurfaceInvariants, dg: i64) -> i64 {
    if dg == 0 {
        return -2;
    }
    let mut s = (dg * dg).div_euclid(inv.dd);
    if (s - dg).rem_euclid(2) != 0 {
        s -= 1;
    }
    s
}

fn d_range(inv: &SurfaceInvariants, cs: &ConstraintSet) -> std::ops::RangeInclusive<i64> {
    cs.min_d.max(0)..=db0(inv)
}

fn kappa_floor(inv: &SurfaceInvariants, cs: &ConstraintSet) -> Option<i64> {
    d_range(inv, cs).map(|dg| (dg - ss_max(inv, dg)) / 2).min()
}

/// Bound on the number of components: `K.B0` when every component has
/// `K.Γ ≥ 1`, else `D.B0 / min_d` when `D.Γ ≥ min_d ≥ 1`.
pub fn component_cap(inv: &SurfaceInvariants, cs: &ConstraintSet) -> Result<usize, BranchError> {
    if inv.dd <= 0 {
        return Err(BranchError::UnboundedSearch("D^2 must be positive".into()));
    }
    let kmin = kappa_floor(inv, cs).unwrap_or(1);
    let cap = if kmin >= 1 {
        inv.kb.max(0) / kmin
    } else if cs.min_d >= 1 {
        db0(inv).max(0) / cs.min_d
    } else {
        return Err(BranchError::UnboundedSearch(
            "components with K.Γ <= 0 and D.Γ = 0 are both allowed".into(),
        ));
    };
    let cap = usize::try_from(cap).unwrap_or(0);
    Ok(cs.max_components.map_or(cap, |m| m.min(cap)))
}

/// Every single-component type allowed by the per-component constraints.
pub fn component_types(inv: &SurfaceInvariants, cs: &ConstraintSet) -> Result<Vec<Component>, BranchError> {
    let cap = component_cap(inv, cs)? as i64;
    let kmin = kappa_floor(inv, cs).unwrap_or(0);
    let kmax = if kmin >= 0 { inv.kb } else { inv.kb - (cap - 1).max(0) * kmin };
    let mut out = Vec::new();
    for dg in d_range(inv, cs) {
        let lo = (dg - ss_max(inv, dg)) / 2;
        for kappa in lo..=kmax {
            let ss = dg - 2 * kappa;
            if (kappa + ss) % 2 != 0 {
                continue;
            }
            let g = (kappa + ss + 2) / 2;
            if g < 0 {
                continue;
            }
            let comp = Component::new(g, ss);
            if let Some(f) = &cs.fibration {
                if f.options(&comp)?.is_empty() {
                    continue;
                }
            }
            out.push(comp);
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// All candidates meeting the constraint set, in canonical order.
pub fn enumerate_candidates(inv: &SurfaceInvariants, cs: &ConstraintSet) -> Result<Vec<BranchCandidate>, BranchError> {
    let cap = component_cap(inv, cs)?;
    let types = component_types(inv, cs)?;
    let pa = inv.pa()?;
    let target_d = db0(inv);
    let kmin = kappa_floor(inv, cs).unwrap_or(0);
    let mut out = Vec::new();
    let mut cur: Vec<Component> = Vec::new();

    struct Ctx<'a> {
        types: &'a [Component],
        cap: usize,
        kb: i64,
        bb: i64,
        pa: i64,
        target_d: i64,
        prune_kappa: bool,
        fib: Option<&'a FibrationData>,
    }

    fn rec(cx: &Ctx, start: usize, cur: &mut Vec<Component>, out: &mut Vec<BranchCandidate>) -> Result<(), BranchError> {
        let ks: i64 = cur.iter().map(Component::kappa).sum();
        let ds: i64 = cur.iter().map(Component::d_degree).sum();
        if !cur.is_empty() && ks == cx.kb && cur.iter().map(|c| c.ss).sum::<i64>() == cx.bb {
            let genera: Vec<i64> = cur.iter().map(|c| c.g).collect();
            if surface::genus_additivity(&genera)? == cx.pa {
                let cand = BranchCandidate::new(cur.clone());
                let ok = match cx.fib {
                    Some(f) => !f.assignments(&cand)?.is_empty(),
                    None => true,
                };
                if ok {
                    out.push(cand);
                }
            }
        }
        if cur.len() >= cx.cap {
            return Ok(());
        }
        for i in start..cx.types.len() {
            let t = cx.types[i];
            if ds + t.d_degree() > cx.target_d || (cx.prune_kappa && ks + t.kappa() > cx.kb) {
                continue;
            }
            cur.push(t);
            rec(cx, i, cur, out)?;
            cur.pop();
        }
        Ok(())
    }

    let cx = Ctx {
        types: &types,
        cap,
        kb: inv.kb,
        bb: inv.bb,
        pa,
        target_d,
        prune_kappa: kmin >= 0,
        fib: cs.fibration.as_ref(),
    };
    rec(&cx, 0, &mut cur, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Rechecks every constraint on one candidate directly from the
/// definitions; returns the first failure.
pub fn verify_candidate(inv: &SurfaceInvariants, cs: &ConstraintSet, cand: &BranchCandidate) -> Result<(), String> {
    if cand.is_empty() {
        return Err("no components".into());
    }
    if let Some(m) = cs.max_components {
        if cand.len() > m {
            return Err(format!("{} components exceed {m}", cand.len()));
        }
    }
    let db0 = inv.dd - 2 * inv.kd;
    for c in cand.components() {
        let kg = 2 * c.g - 2 - c.ss;
        let dg = 2 * kg + c.ss;
        if c.g < 0 {
            return Err(format!("{c}: negative genus"));
        }
        if dg < cs.min_d || dg > db0 {
            return Err(format!("{c}: D.Γ = {dg} outside [{}, {db0}]", cs.min_d));
        }
        if c.ss * inv.dd > dg * dg {
            return Err(format!("{c}: index bound {}*{} > {dg}^2", c.ss, inv.dd));
        }
        if dg == 0 && c.ss >= 0 {
            return Err(format!("{c}: D.Γ = 0 needs Γ^2 < 0"));
        }
    }
    let ks: i64 = cand.components().iter().map(|c| 2 * c.g - 2 - c.ss).sum();
    if ks != inv.kb {
        return Err(format!("sum of K.Γ is {ks}, not {}", inv.kb));
    }
    if cand.ss_sum() != inv.bb {
        return Err(format!("sum of Γ^2 is {}, not {}", cand.ss_sum(), inv.bb));
    }
    let pa = (inv.bb + inv.kb) / 2 + 1;
    let add = cand.components().iter().map(|c| c.g).sum::<i64>() - (cand.len() as i64 - 1);
    if add != pa {
        return Err(format!("genera add to p_a = {add}, not {pa}"));
    }
    if let Some(f) = &cs.fibration {
        // brute force over all (d, t) boxes
        let per: Vec<Vec<(i64, i64)>> = cand
            .components()
            .iter()
            .map(|c| {
                let kg = 2 * c.g - 2 - c.ss;
                let mut v = Vec::new();
                for d in 0..=f.fb0 {
                    for t in 0..=f.gb0 {
                        let ram = BigRational::from_integer((d * f.fibres as i64).into()) * half();
                        let rhs = BigRational::from_integer((-2 * d).into()) + ram;
                        let lhs = BigRational::from_integer((2 * c.g - 2).into());
                        if d >= 2 && d % 2 == 0 && lhs >= rhs && c.ss == f.a * kg + f.b * d + f.c * t {
                            v.push((d, t));
                        }
                    }
                }
                v
            })
            .collect();
        let mut sums = vec![(0i64, 0i64)];
        for opts in &per {
            sums = sums.iter().flat_map(|&(a, b)| opts.iter().map(move |&(d, t)| (a + d, b + t))).collect();
        }
        if !sums.contains(&(f.fb0, f.gb0)) {
            return Err(format!("no fibre degrees with F.B0 = {} and G.B0 = {}", f.fb0, f.gb0));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(k: i64, kk: i64, kb: i64) -> SurfaceInvariants {
        SurfaceInvariants::from_branch(k, kk, kb, -2, 1, 10 - kk)
    }

    fn k11_fib() -> FibrationData {
        FibrationData { a: -4, b: 3, c: 2, fb0: 8, gb0: 3, fibres: 5 }
    }

    #[test]
    fn eleven_nodes_from_scratch() {
        let cs = ConstraintSet { min_d: 1, max_components: None, fibration: Some(k11_fib()) };
        let got: Vec<String> = enumerate_candidates(&inv(11, -4, 8), &cs).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(got, ["(4,-2)", "(3,0)+(2,-2)", "(3,-2)+(2,0)", "(2,0)+(2,0)+(2,-2)"]);
    }

    #[test]
    fn five_nodes_single_component() {
        let cs = ConstraintSet { min_d: 1, max_components: Some(1), fibration: None };
        let got = enumerate_candidates(&inv(5, 2, 2), &cs).unwrap();
        assert_eq!(got, vec![BranchCandidate::from_pairs(&[(1, -2)])]);
    }

    #[test]
    fn caps() {
        assert_eq!(component_cap(&inv(9, -2, 6), &ConstraintSet::generic(0)).unwrap(), 6);
        assert_eq!(component_cap(&inv(11, -4, 8), &ConstraintSet::generic(1)).unwrap(), 14);
        let mut bad = inv(11, -4, 8);
        bad.dd = 0;
        assert!(matches!(component_cap(&bad, &ConstraintSet::generic(1)), Err(BranchError::UnboundedSearch(_))));
    }

    #[test]
    fn enumeration_self_check() {
        let i = inv(9, -2, 6);
        let cs = ConstraintSet::generic(0);
        for c in enumerate_candidates(&i, &cs).unwrap() {
            verify_candidate(&i, &cs, &c).unwrap();
        }
        assert!(verify_candidate(&i, &cs, &BranchCandidate::from_pairs(&[(3, 0)])).is_err());
    }

    #[test]
    fn k11_assignments() {
        let f = k11_fib();
        let a = f.assignments(&BranchCandidate::from_pairs(&[(3, 0), (2, -2)])).unwrap();
        assert_eq!(a, vec![vec![(4, 2), (4, 1)]]);
        let a = f.assignments(&BranchCandidate::from_pairs(&[(4, -2)])).unwrap();
        assert_eq!(a, vec![vec![(8, 3)]]);
    }
}
