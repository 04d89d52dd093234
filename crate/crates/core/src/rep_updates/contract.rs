//! Outward (`-σ, +σ`) and inward (`+σ, -σ`) contractions of steps `at, at+1`.
//! Complexes `at+1` and `at+2` disappear; the merged index is `at`.

use super::{link_sum, PersistenceState, Plan};
use crate::chains::{Chain, Registry, SimplexId};
use crate::error::{Error, Result};
use crate::reps::{concat, prefix, suffix, sum_post_birth_any, sum_pre_death_any, RepSeq};

/// σ enters the merged chain `c_at + c_{at+1}` of an interval spanning the pair.
pub(crate) fn sigma_relevant(reg: &Registry, r: &RepSeq, at: usize, s: SimplexId) -> bool {
    if r.p + 1 != reg.dim(s) || !(r.b <= at && r.d > at) {
        return false;
    }
    let has = |k: usize| r.c(k).as_ref().is_some_and(|c| c.contains(s));
    has(at) != has(at + 1)
}

fn spans(r: &RepSeq, at: usize) -> bool {
    r.b <= at && r.d >= at + 2
}

/// Every interval left for the uniform re-rooting must span the pair or avoid it.
fn check_rest(st: &PersistenceState, at: usize, skip: &[usize], extra: &[RepSeq]) -> Result<()> {
    let ok = |r: &RepSeq| spans(r, at) || r.b > at + 2 || r.d < at;
    for k in (0..st.n_bars()).filter(|k| !skip.contains(k)) {
        if !ok(st.rep(k)) {
            let r = st.rep(k);
            return Err(Error::contract(format!("contraction at {at}: interval [{},{}] straddles the pair", r.b, r.d)));
        }
    }
    if extra.iter().any(|r| !ok(r)) {
        return Err(Error::contract(format!("contraction at {at}: rebuilt interval straddles the pair")));
    }
    Ok(())
}

impl PersistenceState {
    pub(crate) fn plan_outward_contraction(&self, at: usize) -> Result<Plan> {
        let mut plan = Plan::default();
        if let Some(k) = self.find_birth(at + 1) {
            if self.rep(k).d != at + 1 {
                return Err(Error::contract("outward contraction: birth at the middle index outlives it"));
            }
            plan.remove.push(k);
            check_rest(self, at, &plan.remove, &[])?;
            return Ok(plan);
        }
        let (Some(xs), Some(xo)) = (self.find_death(at), self.find_birth(at + 2)) else {
            return Err(Error::contract("outward contraction: steps are not a death and a birth"));
        };
        let reg = self.reg();
        let p = self.rep(xo).p;
        let k2 = self.complex_ids(at + 2);
        let cand: Vec<usize> =
            (0..self.n_bars()).filter(|&j| j != xo && self.rep(j).p == p && self.rep(j).contains(at + 2)).collect();
        let gens: Vec<&Chain> = cand.iter().map(|&j| &**self.rep(j).z(at + 2)).collect();
        let target = self.rep(xs).z(at).add(self.rep(xo).z(at + 2));
        let (idx, mut a) = super::basis::solve(reg, &k2, p, &gens, &target)
            .ok_or_else(|| Error::contract("outward contraction: cycles do not meet in the merged complex"))?;
        let mut lam: Vec<usize> = idx.iter().map(|&x| cand[x]).collect();
        self.sort_by_birth(&mut lam);

        let mut star = self.rep(xs).clone();
        let mut circ = self.rep(xo).clone();
        let mut rest = Vec::new();
        for &j in &lam {
            let rj = self.rep(j);
            if self.birth_less(rj.b, star.b) {
                star = self.sum(&star, rj)?;
                a.add_assign(&link_sum(rj.c(at), rj.c(at + 1))?);
            } else if self.death_less(rj.d, circ.d) {
                circ = self.sum(&circ, rj)?;
            } else {
                rest.push(j);
            }
        }
        let l = rest.len();
        let dirs = self.dirs();

        // w[r] = ζ_r..ζ_l suffixes and ζ∘, summed by death order.
        let mut w = vec![circ.clone(); l + 1];
        for r in (0..l).rev() {
            w[r] = sum_pre_death_any(dirs, &suffix(self.rep(rest[r]), at + 2)?, &w[r + 1])?;
        }
        let shifted = |x: &RepSeq| {
            let mut y = x.clone();
            y.shift(-2);
            y
        };
        let mut head = prefix(&star, at)?;
        plan.add_new.push(concat(reg, Some(&k2), &head, &shifted(&w[0]), &a)?);
        let mut paired = vec![w[0].d, circ.d];
        let mut kept = vec![false; l];
        for r in 0..l {
            let rj = self.rep(rest[r]);
            head = sum_post_birth_any(dirs, &head, &prefix(rj, at)?)?;
            a.add_assign(&link_sum(rj.c(at), rj.c(at + 1))?);
            if r + 1 == l {
                plan.add_new.push(concat(reg, Some(&k2), &head, &shifted(&circ), &a)?);
            } else if !paired.contains(&rj.d) {
                paired.push(rj.d);
                kept[r] = true;
            } else {
                let delta = w[r + 1].d;
                if paired.contains(&delta) {
                    return Err(Error::contract("outward contraction: death index paired twice"));
                }
                paired.push(delta);
                plan.add_new.push(concat(reg, Some(&k2), &head, &shifted(&w[r + 1]), &a)?);
            }
        }
        plan.remove.push(xs);
        plan.remove.push(xo);
        for (r, &j) in rest.iter().enumerate() {
            if !kept[r] {
                plan.remove.push(j);
            }
        }
        check_rest(self, at, &plan.remove, &[])?;
        Ok(plan)
    }

    pub(crate) fn plan_inward_contraction(&self, at: usize) -> Result<Plan> {
        let reg = self.reg();
        let s = self.sid(at);
        let mut plan = Plan::default();
        if let Some(k) = self.find_birth(at + 1) {
            let r = self.rep(k);
            if r.d != at + 1 {
                return Err(Error::contract("inward contraction: birth at the middle index outlives it"));
            }
            plan.extra = Some(r.z(at + 1).clone());
            plan.remove.push(k);
            check_rest(self, at, &plan.remove, &[])?;
            return Ok(plan);
        }
        let (Some(xs), Some(xo)) = (self.find_death(at), self.find_birth(at + 2)) else {
            return Err(Error::contract("inward contraction: steps are not a death and a birth"));
        };
        let zs = self.rep(xs);
        let zo = self.rep(xo);
        let mut lam: Vec<usize> = (0..self.n_bars()).filter(|&j| sigma_relevant(reg, self.rep(j), at, s)).collect();
        self.sort_by_birth(&mut lam);
        let mut cur: Vec<Option<RepSeq>> = vec![None; lam.len()];
        let rep_of = |cur: &[Option<RepSeq>], n: usize| cur[n].clone().unwrap_or_else(|| self.rep(lam[n]).clone());
        let mut alive = vec![true; lam.len()];
        for a in 0..lam.len() {
            if !alive[a] {
                continue;
            }
            for c in a + 1..lam.len() {
                if alive[c] && self.interval_less(self.rep(lam[a]), self.rep(lam[c])) {
                    cur[c] = Some(self.sum(self.rep(lam[a]), self.rep(lam[c]))?);
                    alive[c] = false;
                }
            }
        }
        for n in 0..lam.len() {
            if !alive[n] {
                continue;
            }
            let rj = self.rep(lam[n]);
            if self.birth_less(zs.b, rj.b) {
                cur[n] = Some(self.sum(zs, rj)?);
                alive[n] = false;
            } else if self.death_less(zo.d, rj.d) {
                cur[n] = Some(self.sum(zo, rj)?);
                alive[n] = false;
            }
        }
        for n in 0..lam.len() {
            if !alive[n] {
                plan.replace.push((lam[n], rep_of(&cur, n)));
            }
        }
        let rest: Vec<usize> = (0..lam.len()).filter(|&n| alive[n]).collect();
        if rest.is_empty() {
            let wit = link_sum(zs.c(at), zo.c(at + 1))?;
            let mut tail = suffix(zo, at + 2)?;
            tail.shift(-2);
            let k0 = self.complex_ids(at);
            plan.add_new.push(concat(reg, Some(&k0), &prefix(zs, at)?, &tail, &wit)?);
        } else {
            let l = rest.len();
            for j in 0..l - 1 {
                plan.add_old.push(self.sum(self.rep(lam[rest[j]]), self.rep(lam[rest[j + 1]]))?);
            }
            plan.add_old.push(self.sum(zs, self.rep(lam[rest[l - 1]]))?);
            plan.add_old.push(self.sum(zo, self.rep(lam[rest[0]]))?);
            for &n in &rest {
                plan.remove.push(lam[n]);
            }
        }
        plan.remove.push(xs);
        plan.remove.push(xo);
        let relevant = plan.replace.iter().map(|(_, r)| r).chain(&plan.add_old).any(|r| sigma_relevant(reg, r, at, s));
        if relevant {
            return Err(Error::contract("inward contraction: σ survives in a merged chain"));
        }
        let replaced: Vec<usize> = plan.replace.iter().map(|(k, _)| *k).collect();
        let mut skip = plan.remove.clone();
        skip.extend(&replaced);
        let rebuilt: Vec<RepSeq> = plan.replace.iter().map(|(_, r)| r.clone()).chain(plan.add_old.iter().cloned()).collect();
        check_rest(self, at, &skip, &rebuilt)?;
        Ok(plan)
    }
}
