//! Barcode and representatives maintained under the eight atomic edits.
//!
//! Each op first computes every fallible piece (new representatives for the
//! intervals it touches) against the old filtration, then commits: the
//! filtration edit, a uniform re-rooting of every untouched interval, and the
//! new intervals. A failed op leaves the state as it was.

pub mod basis;
mod contract;
mod expand;
mod switches;

use std::sync::Arc;

use crate::barcode::{Barcode, Interval};
use crate::chains::{Chain, IdSet, Registry, SimplexId};
use crate::error::{Error, Result};
use crate::filtration::{Dir, Remap, StepId, ZigzagFiltration};
use crate::fzz;
use crate::ops::{self, Op};
use crate::planner;
use crate::reps::{self, merge_count, validate_rep, Frame, RepKind, RepSeq};

/// A barcode interval with its vine id and representative.
#[derive(Clone, Debug)]
pub struct Bar {
    pub vine: u64,
    pub rep: RepSeq,
}

impl Bar {
    pub fn interval(&self) -> Interval {
        Interval::new(self.rep.p, self.rep.b, self.rep.d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VineEvent {
    /// The vine continues and its interval moved; unmoved vines are not reported.
    Kept { vine: u64, from: Interval, to: Interval },
    Created { vine: u64, to: Interval },
    Destroyed { vine: u64, from: Interval },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpStats {
    /// Intervals whose representative was rebuilt by the op itself.
    pub touched: usize,
    /// Cycle/chain record merges performed by sums.
    pub merges: u64,
    /// Linear solves against boundary bases.
    pub solves: u64,
}

#[derive(Clone, Debug)]
pub struct OpResult {
    pub remap: Remap,
    pub vines: Vec<VineEvent>,
    pub stats: OpStats,
}

/// Everything an op decides before the commit. Representatives in `replace`
/// and `add_old` are in old numbering and still get the uniform re-rooting;
/// `add_new` ones are final.
#[derive(Default)]
pub(crate) struct Plan {
    pub replace: Vec<(usize, RepSeq)>,
    pub remove: Vec<usize>,
    pub add_old: Vec<RepSeq>,
    pub add_new: Vec<RepSeq>,
    /// Cycle folded into the merged chain of σ-relevant intervals (inward
    /// contraction, injective case).
    pub extra: Option<Arc<Chain>>,
}

impl Plan {
    fn touched(&self) -> usize {
        self.replace.len() + self.remove.len() + self.add_old.len() + self.add_new.len()
    }
}

#[derive(Clone, Debug, Default)]
pub struct PersistenceState {
    filt: ZigzagFiltration,
    reg: Registry,
    sids: Vec<SimplexId>,
    dirs: Vec<Dir>,
    bars: Vec<Bar>,
    next_vine: u64,
    /// Pre-op index of every bar the last commit carried over.
    origin: Vec<Option<usize>>,
}

impl PersistenceState {
    /// The state of the empty filtration.
    pub fn new() -> PersistenceState {
        PersistenceState::default()
    }

    /// Builds the state by running the inverse of the planner's reduction of
    /// `f` from the empty filtration.
    pub fn from_filtration(f: &ZigzagFiltration) -> Result<PersistenceState> {
        f.check()?;
        let down = planner::reduce_to_empty(f)?;
        let up = ops::invert_script(f, &down)?;
        let mut st = PersistenceState::new();
        for op in &up {
            st.apply(op)?;
        }
        if st.filt != *f {
            return Err(Error::contract("rebuilding the filtration from empty diverged"));
        }
        // Adopt the caller's step ids.
        st.filt = f.clone();
        // Fresh vines are numbered in interval order.
        let mut order: Vec<usize> = (0..st.bars.len()).collect();
        order.sort_by_key(|&k| st.bars[k].interval());
        for (v, k) in order.into_iter().enumerate() {
            st.bars[k].vine = v as u64;
        }
        st.next_vine = st.bars.len() as u64;
        Ok(st)
    }

    pub fn filtration(&self) -> &ZigzagFiltration {
        &self.filt
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn barcode(&self) -> Barcode {
        Barcode::from_intervals(self.bars.iter().map(Bar::interval).collect())
    }

    /// Bars sorted like the barcode, paired with their vine ids.
    pub fn vine_barcode(&self) -> Vec<(Interval, u64)> {
        let mut v: Vec<_> = self.bars.iter().map(|b| (b.interval(), b.vine)).collect();
        v.sort_unstable();
        v
    }

    pub fn frame(&self) -> Frame<'_> {
        Frame::new(&self.reg, &self.dirs, &self.sids)
    }

    /// Checks the state against the brute-force step classifier and every
    /// representative against the definition.
    pub fn certify(&self) -> Result<()> {
        let m = self.dirs.len();
        let mut used = vec![0u8; m];
        let mut creator = vec![false; m];
        for bar in &self.bars {
            let r = &bar.rep;
            if r.b == 0 || r.d >= m || r.b > r.d {
                return Err(Error::contract(format!("interval [{},{}] outside 1..{}", r.b, r.d, m)));
            }
            used[r.b - 1] += 1;
            used[r.d] += 1;
            creator[r.b - 1] = true;
        }
        if let Some(j) = used.iter().position(|&u| u != 1) {
            return Err(Error::contract(format!("step {j} is used by {} intervals", used[j])));
        }
        let births = fzz::classify_steps(&self.filt)?;
        for j in 0..m {
            // An addition that creates a class, or a deletion that does not destroy one.
            if births[j] != creator[j] {
                return Err(Error::contract(format!("step {j} has the wrong creator/destroyer role")));
            }
        }
        let fr = self.frame();
        for bar in &self.bars {
            if let Err(v) = validate_rep(&fr, &bar.rep, RepKind::Full) {
                return Err(Error::contract(format!("[{},{}] dim {}: {v}", bar.rep.b, bar.rep.d, bar.rep.p)));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, op: &Op) -> Result<OpResult> {
        ops::check(&self.filt, op)?;
        let before = self.keys();
        let m0 = merge_count();
        let s0 = basis::solve_count();
        let p = op.pos();
        let (plan, remap) = match op {
            Op::ForwardSwitch(_) => (self.plan_forward_switch(p + 1)?, Remap::Identity),
            Op::BackwardSwitch(_) => (self.plan_backward_switch(p + 1)?, Remap::Identity),
            Op::OutwardSwitch(_) => (self.plan_outward_switch(p + 1)?, Remap::Identity),
            Op::InwardSwitch(_) => (self.plan_inward_switch(p + 1)?, Remap::Identity),
            Op::OutwardExpansion(_, s) => {
                let sid = self.reg.intern(s);
                (self.plan_outward_expansion(p, sid)?, Remap::Expansion { at: p })
            }
            Op::InwardExpansion(_, s) => {
                let sid = self.reg.intern(s);
                (self.plan_inward_expansion(p, sid)?, Remap::Expansion { at: p })
            }
            Op::OutwardContraction(_) => (self.plan_outward_contraction(p)?, Remap::Contraction { at: p }),
            Op::InwardContraction(_) => (self.plan_inward_contraction(p)?, Remap::Contraction { at: p }),
        };
        let touched = plan.touched();
        self.commit(op, plan);
        let vines = self.rematch(before);
        Ok(OpResult {
            remap,
            vines,
            stats: OpStats { touched, merges: merge_count() - m0, solves: basis::solve_count() - s0 },
        })
    }

    pub fn forward_switch(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::ForwardSwitch(api_pos(i)?))
    }

    pub fn backward_switch(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::BackwardSwitch(api_pos(i)?))
    }

    pub fn outward_switch(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::OutwardSwitch(api_pos(i)?))
    }

    pub fn inward_switch(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::InwardSwitch(api_pos(i)?))
    }

    /// Inserts `-σ, +σ` after complex `K_i`.
    pub fn outward_expansion(&mut self, i: usize, s: &crate::chains::Simplex) -> Result<OpResult> {
        self.apply(&Op::OutwardExpansion(i, s.clone()))
    }

    /// Inserts `+σ, -σ` after complex `K_i`.
    pub fn inward_expansion(&mut self, i: usize, s: &crate::chains::Simplex) -> Result<OpResult> {
        self.apply(&Op::InwardExpansion(i, s.clone()))
    }

    /// Removes steps `i-1, i` (`-σ, +σ`).
    pub fn outward_contraction(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::OutwardContraction(api_pos(i)?))
    }

    /// Removes steps `i-1, i` (`+σ, -σ`).
    pub fn inward_contraction(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::InwardContraction(api_pos(i)?))
    }

    // ---- helpers shared by the op planners ----

    pub(crate) fn dirs(&self) -> &[Dir] {
        &self.dirs
    }

    pub(crate) fn sid(&self, j: usize) -> SimplexId {
        self.sids[j]
    }

    pub(crate) fn rep(&self, k: usize) -> &RepSeq {
        &self.bars[k].rep
    }

    pub(crate) fn n_bars(&self) -> usize {
        self.bars.len()
    }

    pub(crate) fn reg(&self) -> &Registry {
        &self.reg
    }

    pub(crate) fn find_birth(&self, b: usize) -> Option<usize> {
        self.bars.iter().position(|x| x.rep.b == b)
    }

    pub(crate) fn find_death(&self, d: usize) -> Option<usize> {
        self.bars.iter().position(|x| x.rep.d == d)
    }

    pub(crate) fn complex_ids(&self, i: usize) -> IdSet {
        let mut k = IdSet::new();
        for (d, &s) in self.dirs[..i].iter().zip(&self.sids) {
            match d {
                Dir::Add => k.insert(s),
                Dir::Delete => k.remove(s),
            };
        }
        k
    }

    pub(crate) fn birth_less(&self, b1: usize, b2: usize) -> bool {
        reps::birth_less(&self.dirs, b1, b2)
    }

    pub(crate) fn death_less(&self, d1: usize, d2: usize) -> bool {
        reps::death_less(&self.dirs, d1, d2)
    }

    pub(crate) fn interval_less(&self, a: &RepSeq, b: &RepSeq) -> bool {
        a.b != b.b && a.d != b.d && self.birth_less(a.b, b.b) && self.death_less(a.d, b.d)
    }

    /// Sum of two overlapping representatives at their first common index.
    pub(crate) fn sum(&self, a: &RepSeq, b: &RepSeq) -> Result<RepSeq> {
        Ok(reps::rep_sum(&self.dirs, a, b, a.b.max(b.b))?.0)
    }

    /// Sorts bar indices by the birth order.
    pub(crate) fn sort_by_birth(&self, v: &mut [usize]) {
        v.sort_by(|&x, &y| {
            let (bx, by) = (self.bars[x].rep.b, self.bars[y].rep.b);
            if bx == by {
                std::cmp::Ordering::Equal
            } else if self.birth_less(bx, by) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
    }

    // ---- commit and vines ----

    fn commit(&mut self, op: &Op, plan: Plan) {
        let Plan { replace, remove, add_old, add_new, extra } = plan;
        for (k, r) in replace {
            self.bars[k].rep = r;
        }
        let mut gone = vec![false; self.bars.len()];
        for k in remove {
            gone[k] = true;
        }
        let mut kept: Vec<RepSeq> = Vec::with_capacity(self.bars.len() + add_old.len());
        self.origin.clear();
        for (k, bar) in std::mem::take(&mut self.bars).into_iter().enumerate() {
            if !gone[k] {
                kept.push(bar.rep);
                self.origin.push(Some(k));
            }
        }
        kept.extend(add_old);
        let rerooted = self.reroot(op, kept, extra.as_deref());
        let mut all = rerooted;
        all.extend(add_new);
        self.bars = all.into_iter().map(|rep| Bar { vine: u64::MAX, rep }).collect();
        ops::apply_unchecked(&mut self.filt, op);
        match op {
            Op::ForwardSwitch(p) | Op::BackwardSwitch(p) | Op::OutwardSwitch(p) | Op::InwardSwitch(p) => {
                self.sids.swap(*p, p + 1);
                self.dirs.swap(*p, p + 1);
            }
            Op::OutwardExpansion(p, s) | Op::InwardExpansion(p, s) => {
                let sid = self.reg.intern(s);
                let first = if matches!(op, Op::InwardExpansion(..)) { Dir::Add } else { Dir::Delete };
                self.sids.splice(*p..*p, [sid, sid]);
                self.dirs.splice(*p..*p, [first, first.flip()]);
            }
            Op::OutwardContraction(p) | Op::InwardContraction(p) => {
                self.sids.drain(*p..p + 2);
                self.dirs.drain(*p..p + 2);
            }
        }
    }

    /// The uniform update applied to every interval the op did not rebuild.
    fn reroot(&self, op: &Op, mut kept: Vec<RepSeq>, extra: Option<&Chain>) -> Vec<RepSeq> {
        match op {
            Op::ForwardSwitch(p) => {
                let s = self.sids[*p];
                for r in &mut kept {
                    switches::forward_step_one(r, p + 1, s);
                }
            }
            Op::BackwardSwitch(p) => {
                let t = self.sids[p + 1];
                for r in &mut kept {
                    switches::backward_step_one(r, p + 1, t);
                }
            }
            Op::OutwardSwitch(p) => {
                let (s, t) = (self.sids[*p], self.sids[p + 1]);
                let ds = Arc::new(self.reg.boundary(s));
                for r in &mut kept {
                    switches::outward_middle(r, p + 1, s, t, &ds);
                }
            }
            Op::InwardSwitch(_) => {}
            Op::OutwardExpansion(at, _) | Op::InwardExpansion(at, _) => {
                for r in &mut kept {
                    if r.contains(*at) {
                        r.stretch(*at);
                    } else if r.b > *at {
                        r.shift(2);
                    }
                }
            }
            Op::OutwardContraction(at) | Op::InwardContraction(at) => {
                let s = self.sids[*at];
                for r in &mut kept {
                    if r.b <= *at && r.d >= at + 2 {
                        let e = extra.filter(|_| contract::sigma_relevant(&self.reg, r, *at, s));
                        r.contract(*at, e);
                    } else if r.b > at + 2 {
                        r.shift(-2);
                    }
                }
            }
        }
        kept
    }

    fn keys(&self) -> Vec<VineKey> {
        self.bars
            .iter()
            .map(|b| (b.vine, b.interval(), self.filt.step(b.rep.b - 1).id, self.filt.step(b.rep.d).id))
            .collect()
    }

    /// Re-attaches vine ids by creator/destroyer step identity.
    fn rematch(&mut self, before: Vec<VineKey>) -> Vec<VineEvent> {
        let now: Vec<(Interval, StepId, StepId)> = self
            .bars
            .iter()
            .map(|b| (b.interval(), self.filt.step(b.rep.b - 1).id, self.filt.step(b.rep.d).id))
            .collect();
        self.origin.resize(now.len(), None);
        let (ids, events) = match_vines(&before, &now, Some(&self.origin), &mut self.next_vine);
        for (b, v) in self.bars.iter_mut().zip(ids) {
            b.vine = v;
        }
        events
    }
}

/// Vine id, interval, creator step and destroyer step.
pub(crate) type VineKey = (u64, Interval, StepId, StepId);

/// Matches new intervals to old vines: same creator and destroyer step, then
/// same creator, then same destroyer, then roles swapped. Leftovers are
/// created or destroyed.
pub(crate) fn match_vines(
    before: &[VineKey],
    now: &[(Interval, StepId, StepId)],
    hint: Option<&[Option<usize>]>,
    next_vine: &mut u64,
) -> (Vec<u64>, Vec<VineEvent>) {
    let mut used = vec![false; before.len()];
    let mut assigned: Vec<Option<usize>> = vec![None; now.len()];
    // Most bars keep their steps: try the hinted (or same) position first.
    for (n, &(_, c, d)) in now.iter().enumerate() {
        let k = match hint {
            Some(h) => h[n],
            None => Some(n),
        };
        if let Some(k) = k.filter(|&k| k < before.len() && !used[k]) {
            if before[k].2 == c && before[k].3 == d {
                used[k] = true;
                assigned[n] = Some(k);
            }
        }
    }
    if assigned.iter().any(Option::is_none) {
        rest_passes(before, now, &mut used, &mut assigned);
    }
    let mut ids = Vec::with_capacity(now.len());
    let mut events = Vec::new();
    for (n, a) in assigned.iter().enumerate() {
        let to = now[n].0;
        match a {
            Some(k) => {
                let (vine, from, ..) = before[*k];
                ids.push(vine);
                if from != to {
                    events.push(VineEvent::Kept { vine, from, to });
                }
            }
            None => {
                let vine = *next_vine;
                *next_vine += 1;
                ids.push(vine);
                events.push(VineEvent::Created { vine, to });
            }
        }
    }
    for (k, &(vine, from, ..)) in before.iter().enumerate() {
        if !used[k] {
            events.push(VineEvent::Destroyed { vine, from });
        }
    }
    events.sort_by_key(|e| match e {
        VineEvent::Kept { vine, .. } | VineEvent::Created { vine, .. } | VineEvent::Destroyed { vine, .. } => *vine,
    });
    (ids, events)
}

/// Matching by creator, then destroyer, then the two swapped.
fn rest_passes(before: &[VineKey], now: &[(Interval, StepId, StepId)], used: &mut [bool], assigned: &mut [Option<usize>]) {
    // A step creates at most one interval and destroys at most one.
    let index = |key: fn(&VineKey) -> StepId| {
        let mut v: Vec<(StepId, usize)> =
            before.iter().enumerate().filter(|&(k, _)| !used[k]).map(|(k, b)| (key(b), k)).collect();
        v.sort_unstable();
        v
    };
    let by_creator = index(|b| b.2);
    let by_destroyer = index(|b| b.3);
    let find = |v: &[(StepId, usize)], s: StepId| v.binary_search_by(|x| x.0.cmp(&s)).ok().map(|i| v[i].1);
    let passes: [&dyn Fn(StepId, StepId) -> Option<usize>; 4] = [
        &|c, d| find(&by_creator, c).filter(|&k| before[k].3 == d),
        &|c, _| find(&by_creator, c),
        &|_, d| find(&by_destroyer, d),
        &|c, d| find(&by_destroyer, c).or_else(|| find(&by_creator, d)),
    ];
    for pass in passes {
        for (n, &(_, c, d)) in now.iter().enumerate() {
            if assigned[n].is_some() {
                continue;
            }
            if let Some(k) = pass(c, d) {
                if !used[k] {
                    used[k] = true;
                    assigned[n] = Some(k);
                }
            }
        }
    }
}

/// API index `i` (steps `i-1, i`) to the script position.
fn api_pos(i: usize) -> Result<usize> {
    i.checked_sub(1).ok_or_else(|| Error::contract("position 0 has no preceding step"))
}

pub(crate) fn zero(dim: usize) -> Arc<Chain> {
    Arc::new(Chain::zero(dim))
}

pub(crate) fn arc(c: Chain) -> Arc<Chain> {
    Arc::new(c)
}

/// Sum of two defined links; `None` when either is undefined.
pub(crate) fn link_sum(a: &reps::Link, b: &reps::Link) -> Result<Chain> {
    match (a, b) {
        (Some(x), Some(y)) => Ok(x.add(y)),
        _ => Err(Error::contract("sum of an undefined chain")),
    }
}

pub(crate) fn defined(l: &reps::Link) -> Result<&Arc<Chain>> {
    l.as_ref().ok_or_else(|| Error::contract("undefined chain where one is required"))
}
