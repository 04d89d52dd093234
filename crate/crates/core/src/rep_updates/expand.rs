//! Outward (`-σ, +σ`) and inward (`+σ, -σ`) expansions after complex `K_at`.
//! New indices `at+1` is the inserted complex, `at+2` repeats `K_at`.

use super::{arc, zero, PersistenceState, Plan};
use crate::chains::{Chain, SimplexId};
use crate::error::{Error, Result};
use crate::reps::{concat_unchecked, prefix, suffix, sum_post_birth_any, sum_pre_death_any, RepSeq};

impl PersistenceState {
    pub(crate) fn plan_outward_expansion(&self, at: usize, s: SimplexId) -> Result<Plan> {
        let p = self.reg().dim(s);
        let mut plan = Plan::default();
        let mut lam: Vec<usize> = (0..self.n_bars())
            .filter(|&k| {
                let r = self.rep(k);
                r.p == p && r.contains(at) && r.z(at).contains(s)
            })
            .collect();
        if lam.is_empty() {
            if p == 0 {
                return Err(Error::contract("outward expansion: a vertex lies in no cycle"));
            }
            let sc = arc(Chain::single(p, s));
            plan.add_new.push(RepSeq::point(p - 1, at + 1, arc(self.reg().boundary(s)), Some(sc.clone()), Some(sc)));
            return Ok(plan);
        }
        self.sort_by_birth(&mut lam);
        // Drop comparable pairs: the later one absorbs the earlier and loses σ.
        let mut keep = vec![true; lam.len()];
        for a in 0..lam.len() {
            if !keep[a] {
                continue;
            }
            for c in a + 1..lam.len() {
                if keep[c] && self.interval_less(self.rep(lam[a]), self.rep(lam[c])) {
                    let r = self.sum(self.rep(lam[a]), self.rep(lam[c]))?;
                    plan.replace.push((lam[c], r));
                    keep[c] = false;
                }
            }
        }
        let lam: Vec<usize> = lam.iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
        let l = lam.len();
        for j in 0..l - 1 {
            plan.add_old.push(self.sum(self.rep(lam[j]), self.rep(lam[j + 1]))?);
        }
        plan.add_new.push(prefix(self.rep(lam[0]), at)?);
        let mut tail = suffix(self.rep(lam[l - 1]), at)?;
        tail.shift(2);
        plan.add_new.push(tail);
        plan.remove.extend(lam);
        Ok(plan)
    }

    pub(crate) fn plan_inward_expansion(&self, at: usize, s: SimplexId) -> Result<Plan> {
        let reg = self.reg();
        let p = reg.dim(s);
        let mut plan = Plan::default();
        if p == 0 {
            plan.add_new.push(RepSeq::point(0, at + 1, arc(Chain::single(0, s)), None, None));
            return Ok(plan);
        }
        let k = self.complex_ids(at);
        let ds = reg.boundary(s);
        if let Some((_, a)) = super::basis::solve(reg, &k, p - 1, &[], &ds) {
            let mut z = a;
            z.add_assign(&Chain::single(p, s));
            plan.add_new.push(RepSeq::point(p, at + 1, arc(z), None, None));
            return Ok(plan);
        }
        let cand: Vec<usize> = (0..self.n_bars()).filter(|&j| self.rep(j).p == p - 1 && self.rep(j).contains(at)).collect();
        let gens: Vec<&Chain> = cand.iter().map(|&j| &**self.rep(j).z(at)).collect();
        let (idx, a) = super::basis::solve(reg, &k, p - 1, &gens, &ds)
            .ok_or_else(|| Error::contract("inward expansion: boundary of σ is not spanned by interval cycles"))?;
        let mut w = a;
        w.add_assign(&Chain::single(p, s));
        let mut lam: Vec<usize> = idx.iter().map(|&x| cand[x]).collect();
        self.sort_by_birth(&mut lam);
        let l = lam.len();
        let dirs = self.dirs();

        // Running ⊕_b of prefixes at `at`, indexed by how many are summed.
        let mut pre = Vec::with_capacity(l);
        for (n, &j) in lam.iter().enumerate() {
            let pj = prefix(self.rep(j), at)?;
            pre.push(if n == 0 { pj } else { sum_post_birth_any(dirs, &pre[n - 1], &pj)? });
        }
        // suf[r] = ⊕_d of suffixes r..l, in old numbering.
        let mut suf: Vec<RepSeq> = vec![suffix(self.rep(lam[l - 1]), at)?];
        for r in (0..l - 1).rev() {
            let sj = suffix(self.rep(lam[r]), at)?;
            let next = sum_pre_death_any(dirs, &sj, &suf[0])?;
            suf.insert(0, next);
        }

        let wa = arc(w.clone());
        let mut head = pre[l - 1].clone();
        head.set_c(at, Some(wa.clone()));
        plan.add_new.push(head);
        let mut tail = suf[0].clone();
        tail.shift(2);
        tail.set_c(at + 1, Some(wa));
        plan.add_new.push(tail);

        let mut paired = vec![suf[0].d];
        let mut kept = vec![false; l];
        for r in 0..l - 1 {
            let dr = self.rep(lam[r]).d;
            if !paired.contains(&dr) {
                paired.push(dr);
                kept[r] = true;
                continue;
            }
            let delta = suf[r + 1].d;
            if paired.contains(&delta) {
                return Err(Error::contract("inward expansion: death index paired twice"));
            }
            paired.push(delta);
            let mut left = pre[r].clone();
            let zl = left.z(at).clone();
            left.extend_back(zl, Some(zero(p)), None);
            let mut right = suf[r + 1].clone();
            right.shift(2);
            let zr = right.z(at + 2).clone();
            right.extend_front(zr, Some(zero(p)), None);
            plan.add_new.push(concat_unchecked(&left, &right, &w));
        }
        for (r, &j) in lam.iter().enumerate() {
            if !kept[r] {
                plan.remove.push(j);
            }
        }
        Ok(plan)
    }
}
