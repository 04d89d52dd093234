//! Representative sequences and their algebra.
//!
//! A [`RepSeq`] for `[b,d]` stores cycles `z_b..=z_d` and chains
//! `c_{b-1}..=c_d`. Cycles and chains are immutable `Arc` records; equal
//! consecutive entries share one record and mutation replaces the record.
//! `None` in a chain slot means Undefined (an Add birth or Delete death) or
//! absent (the open end of a prefix or suffix).

use std::cell::Cell;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::chains::{Chain, IdSet, Registry, SimplexId};
use crate::error::{Error, Result};
use crate::filtration::Dir;

pub type Link = Option<Arc<Chain>>;

thread_local! {
    static MERGES: Cell<u64> = const { Cell::new(0) };
}

/// Number of record merges performed by sums on this thread.
pub fn merge_count() -> u64 {
    MERGES.with(|m| m.get())
}

fn bump_merges() {
    MERGES.with(|m| m.set(m.get() + 1));
}

#[derive(Clone, Debug)]
pub struct RepSeq {
    pub p: usize,
    pub b: usize,
    pub d: usize,
    z: Vec<Arc<Chain>>,
    c: Vec<Link>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    Full,
    /// Open at the death end.
    PostBirth,
    /// Open at the birth end.
    PreDeath,
}

impl RepSeq {
    pub fn from_parts(p: usize, b: usize, d: usize, z: Vec<Arc<Chain>>, c: Vec<Link>) -> RepSeq {
        assert!(b <= d && z.len() == d - b + 1 && c.len() == d - b + 2, "malformed representative");
        RepSeq { p, b, d, z, c }
    }

    /// The single-index representative `[i,i]`.
    pub fn point(p: usize, i: usize, z: Arc<Chain>, birth: Link, death: Link) -> RepSeq {
        RepSeq { p, b: i, d: i, z: vec![z], c: vec![birth, death] }
    }

    pub fn z(&self, k: usize) -> &Arc<Chain> {
        &self.z[k - self.b]
    }

    /// Chain between `z_k` and `z_{k+1}`; `k` ranges over `b-1..=d`.
    pub fn c(&self, k: usize) -> &Link {
        &self.c[k + 1 - self.b]
    }

    pub fn set_z(&mut self, k: usize, v: Arc<Chain>) {
        let b = self.b;
        self.z[k - b] = v;
    }

    pub fn set_c(&mut self, k: usize, v: Link) {
        let b = self.b;
        self.c[k + 1 - b] = v;
    }

    pub fn birth_chain(&self) -> &Link {
        &self.c[0]
    }

    pub fn death_chain(&self) -> &Link {
        self.c.last().expect("chains never empty")
    }

    pub fn cycles(&self) -> &[Arc<Chain>] {
        &self.z
    }

    pub fn chains(&self) -> &[Link] {
        &self.c
    }

    pub fn contains(&self, k: usize) -> bool {
        self.b <= k && k <= self.d
    }

    /// Number of distinct cycle records, counting maximal shared runs once.
    pub fn record_runs(&self) -> usize {
        let mut n = 0;
        for k in 0..self.z.len() {
            if k == 0 || !Arc::ptr_eq(&self.z[k], &self.z[k - 1]) {
                n += 1;
            }
        }
        n
    }

    /// Shifts every index by `delta`.
    pub fn shift(&mut self, delta: isize) {
        self.b = (self.b as isize + delta) as usize;
        self.d = (self.d as isize + delta) as usize;
    }

    /// Prepends index `b-1` with cycle `z` and chain `c_{b-2}`; the old birth
    /// chain becomes `c_{b-1}`.
    pub fn extend_front(&mut self, z: Arc<Chain>, chain_between: Link, new_birth: Link) {
        self.c[0] = chain_between;
        self.c.insert(0, new_birth);
        self.z.insert(0, z);
        self.b -= 1;
    }

    /// Appends index `d+1` with cycle `z`; the old death chain is replaced by
    /// `chain_between` and `new_death` becomes `c_{d+1}`.
    pub fn extend_back(&mut self, z: Arc<Chain>, chain_between: Link, new_death: Link) {
        *self.c.last_mut().unwrap() = chain_between;
        self.c.push(new_death);
        self.z.push(z);
        self.d += 1;
    }

    /// Drops the first index; the chain `c_b` becomes the birth chain.
    pub fn drop_front(&mut self, new_birth: Link) {
        assert!(self.b < self.d);
        self.z.remove(0);
        self.c.remove(0);
        self.c[0] = new_birth;
        self.b += 1;
    }

    /// Drops the last index; `new_death` replaces `c_{d-1}`.
    pub fn drop_back(&mut self, new_death: Link) {
        assert!(self.b < self.d);
        self.z.pop();
        self.c.pop();
        *self.c.last_mut().unwrap() = new_death;
        self.d -= 1;
    }

    /// Re-roots a representative containing `at` across an expansion that
    /// inserts two steps after complex `at`: indices `at, at+1, at+2` all
    /// carry `z_at`, the two new chains are zero, later indices shift by 2.
    /// Requires the cycle `z_at` to avoid the expanded simplex.
    pub fn stretch(&mut self, at: usize) {
        debug_assert!(self.contains(at));
        let k = at - self.b;
        let zk = self.z[k].clone();
        let zero = Some(Arc::new(Chain::zero(self.p + 1)));
        self.z.insert(k + 1, zk.clone());
        self.z.insert(k + 1, zk);
        self.c.insert(k + 1, zero.clone());
        self.c.insert(k + 1, zero);
        self.d += 2;
    }

    /// Re-roots a representative with `b <= at` and `d >= at+2` across a
    /// contraction removing the two steps after complex `at`. The merged index
    /// keeps `z_at`; the new chain `c_at` is `c_at + c_{at+1} + c_{at+2} (+ extra)`.
    pub fn contract(&mut self, at: usize, extra: Option<&Chain>) {
        debug_assert!(self.b <= at && self.d >= at + 2);
        let k = at + 1 - self.b;
        let merged = match (&self.c[k], &self.c[k + 1], &self.c[k + 2]) {
            (Some(x), Some(y), Some(w)) => {
                let mut s = x.add(y);
                s.add_assign(w);
                if let Some(e) = extra {
                    s.add_assign(e);
                }
                Some(Arc::new(s))
            }
            _ => None,
        };
        let zk = at - self.b;
        self.z.drain(zk + 1..zk + 3);
        self.c.drain(k..k + 2);
        self.c[k] = merged;
        self.d -= 2;
    }

    pub fn dump(&self, reg: &Registry) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[{},{}] dim {} ; birth c = {}", self.b, self.d, self.p, fmt_link(reg, self.birth_chain()));
        for k in self.b..=self.d {
            let _ = writeln!(s, "{k} : z = {} ; c = {}", reg.format_chain(self.z(k)), fmt_link(reg, self.c(k)));
        }
        s
    }
}

fn fmt_link(reg: &Registry, l: &Link) -> String {
    match l {
        None => "UNDEF".to_string(),
        Some(c) => reg.format_chain(c),
    }
}

/// Replayed complexes and step data used by the validator.
pub struct Frame<'a> {
    pub reg: &'a Registry,
    pub dirs: &'a [Dir],
    pub sids: &'a [SimplexId],
    pub complexes: Vec<IdSet>,
}

impl<'a> Frame<'a> {
    pub fn new(reg: &'a Registry, dirs: &'a [Dir], sids: &'a [SimplexId]) -> Frame<'a> {
        let mut complexes = Vec::with_capacity(dirs.len() + 1);
        let mut k = IdSet::new();
        complexes.push(k.clone());
        for (d, &s) in dirs.iter().zip(sids) {
            match d {
                Dir::Add => k.insert(s),
                Dir::Delete => k.remove(s),
            };
            complexes.push(k.clone());
        }
        Frame { reg, dirs, sids, complexes }
    }

    pub fn m(&self) -> usize {
        self.dirs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepViolation {
    pub index: usize,
    pub rule: &'static str,
}

impl std::fmt::Display for RepViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "index {}: {}", self.index, self.rule)
    }
}

fn dim_ok(c: &Chain, p: usize) -> bool {
    c.is_empty() || c.dim == p
}

/// Checks every representative clause; the first violation is reported.
pub fn validate_rep(fr: &Frame<'_>, r: &RepSeq, kind: RepKind) -> std::result::Result<(), RepViolation> {
    let bad = |index, rule| Err(RepViolation { index, rule });
    let m = fr.m();
    if r.b == 0 || r.d >= m || r.b > r.d {
        return bad(r.b, "interval outside 1..m-1");
    }
    if r.z.len() != r.d - r.b + 1 || r.c.len() != r.d - r.b + 2 {
        return bad(r.b, "length mismatch");
    }
    let reg = fr.reg;
    for k in r.b..=r.d {
        let z = r.z(k);
        if !dim_ok(z, r.p) {
            return bad(k, "cycle dimension");
        }
        if !z.is_subset_of(&fr.complexes[k]) {
            return bad(k, "cycle not contained in K_i");
        }
        if r.p > 0 && !reg.boundary_of(z).is_empty() {
            return bad(k, "not a cycle");
        }
    }
    let big = |j: usize| if fr.dirs[j] == Dir::Add { j + 1 } else { j };
    for k in r.b..r.d {
        let Some(c) = r.c(k) else {
            return bad(k, "undefined interior chain");
        };
        if !dim_ok(c, r.p + 1) {
            return bad(k, "chain dimension");
        }
        if !c.is_subset_of(&fr.complexes[big(k)]) {
            return bad(k, "chain not contained in complex");
        }
        if reg.boundary_of(c).ids() != r.z(k).add(r.z(k + 1)).ids() {
            return bad(k, "z_i + z_(i+1) != boundary(c_i)");
        }
    }
    if kind != RepKind::PreDeath {
        let j = r.b - 1;
        let sigma = fr.sids[j];
        match fr.dirs[j] {
            Dir::Add => {
                if r.c(j).is_some() {
                    return bad(r.b, "birth chain must be undefined");
                }
                if !r.z(r.b).contains(sigma) {
                    return bad(r.b, "birth condition");
                }
            }
            Dir::Delete => {
                let Some(c) = r.c(j) else {
                    return bad(r.b, "birth chain undefined");
                };
                if !c.contains(sigma) || !c.is_subset_of(&fr.complexes[j]) || !dim_ok(c, r.p + 1) {
                    return bad(r.b, "birth condition");
                }
                if reg.boundary_of(c).ids() != r.z(r.b).ids() {
                    return bad(r.b, "birth condition");
                }
            }
        }
    }
    if kind != RepKind::PostBirth {
        let j = r.d;
        let sigma = fr.sids[j];
        match fr.dirs[j] {
            Dir::Delete => {
                if r.c(j).is_some() {
                    return bad(r.d, "death chain must be undefined");
                }
                if !r.z(r.d).contains(sigma) {
                    return bad(r.d, "death condition");
                }
            }
            Dir::Add => {
                let Some(c) = r.c(j) else {
                    return bad(r.d, "death chain undefined");
                };
                if !c.contains(sigma) || !c.is_subset_of(&fr.complexes[j + 1]) || !dim_ok(c, r.p + 1) {
                    return bad(r.d, "death condition");
                }
                if reg.boundary_of(c).ids() != r.z(r.d).ids() {
                    return bad(r.d, "death condition");
                }
            }
        }
    }
    Ok(())
}

/// Pointwise sum cache: consecutive equal input pairs reuse one output record.
#[derive(Default)]
struct SumCache {
    last: Option<(*const Chain, *const Chain, Arc<Chain>)>,
}

impl SumCache {
    fn sum(&mut self, a: &Arc<Chain>, b: &Arc<Chain>) -> Arc<Chain> {
        let key = (Arc::as_ptr(a), Arc::as_ptr(b));
        if let Some((x, y, r)) = &self.last {
            if *x == key.0 && *y == key.1 {
                return r.clone();
            }
        }
        bump_merges();
        let r = Arc::new(a.add(b));
        self.last = Some((key.0, key.1, r.clone()));
        r
    }

    fn sum_link(&mut self, a: &Link, b: &Link) -> Link {
        match (a, b) {
            (Some(x), Some(y)) => Some(self.sum(x, y)),
            _ => None,
        }
    }
}

pub(crate) fn birth_less(dirs: &[Dir], b1: usize, b2: usize) -> bool {
    (b1 < b2 && dirs[b2 - 1] == Dir::Add) || (b1 > b2 && dirs[b1 - 1] == Dir::Delete)
}

pub(crate) fn death_less(dirs: &[Dir], d1: usize, d2: usize) -> bool {
    (d1 > d2 && dirs[d2] == Dir::Delete) || (d1 < d2 && dirs[d1] == Dir::Add)
}

/// `r1 ⊕_b r2` for post-birth representatives ending at the same index.
pub fn sum_post_birth(dirs: &[Dir], r1: &RepSeq, r2: &RepSeq) -> Result<RepSeq> {
    if r1.d != r2.d || r1.p != r2.p {
        return Err(Error::contract("post-birth sum needs equal end index and dimension"));
    }
    if r1.b == r2.b || !birth_less(dirs, r1.b, r2.b) {
        return Err(Error::contract("post-birth sum needs b1 before b2 in the birth order"));
    }
    let i = r1.d;
    let (b1, b2) = (r1.b, r2.b);
    let mut cache = SumCache::default();
    let mut zc = SumCache::default();
    let mut z = Vec::with_capacity(i - b2 + 1);
    let mut c: Vec<Link> = Vec::with_capacity(i - b2 + 2);
    if b1 < b2 {
        c.push(r2.c(b2 - 1).clone());
        for k in b2..=i {
            z.push(zc.sum(r1.z(k), r2.z(k)));
            if k < i {
                c.push(cache.sum_link(r1.c(k), r2.c(k)));
            }
        }
    } else {
        c.push(r2.c(b2 - 1).clone());
        for k in b2..b1 {
            z.push(r2.z(k).clone());
            if k + 1 < b1 {
                c.push(r2.c(k).clone());
            }
        }
        c.push(cache.sum_link(r1.c(b1 - 1), r2.c(b1 - 1)));
        for k in b1..=i {
            z.push(zc.sum(r1.z(k), r2.z(k)));
            if k < i {
                c.push(cache.sum_link(r1.c(k), r2.c(k)));
            }
        }
    }
    c.push(None);
    Ok(RepSeq::from_parts(r1.p, b2, i, z, c))
}

/// `r1 ⊕_d r2` for pre-death representatives starting at the same index.
pub fn sum_pre_death(dirs: &[Dir], r1: &RepSeq, r2: &RepSeq) -> Result<RepSeq> {
    if r1.b != r2.b || r1.p != r2.p {
        return Err(Error::contract("pre-death sum needs equal start index and dimension"));
    }
    if r1.d == r2.d || !death_less(dirs, r1.d, r2.d) {
        return Err(Error::contract("pre-death sum needs d1 before d2 in the death order"));
    }
    let i = r1.b;
    let (d1, d2) = (r1.d, r2.d);
    let mut cache = SumCache::default();
    let mut zc = SumCache::default();
    let mut z = Vec::new();
    let mut c: Vec<Link> = vec![None];
    if d1 > d2 {
        for k in i..=d2 {
            z.push(zc.sum(r1.z(k), r2.z(k)));
            if k < d2 {
                c.push(cache.sum_link(r1.c(k), r2.c(k)));
            }
        }
        c.push(r2.c(d2).clone());
    } else {
        for k in i..=d1 {
            z.push(zc.sum(r1.z(k), r2.z(k)));
            c.push(cache.sum_link(r1.c(k), r2.c(k)));
        }
        for k in d1 + 1..=d2 {
            z.push(r2.z(k).clone());
            c.push(r2.c(k).clone());
        }
    }
    Ok(RepSeq::from_parts(r1.p, i, d2, z, c))
}

/// Order-agnostic `⊕_b`: the operand with the earlier birth is absorbed.
pub fn sum_post_birth_any(dirs: &[Dir], r1: &RepSeq, r2: &RepSeq) -> Result<RepSeq> {
    if birth_less(dirs, r1.b, r2.b) {
        sum_post_birth(dirs, r1, r2)
    } else {
        sum_post_birth(dirs, r2, r1)
    }
}

/// Order-agnostic `⊕_d`.
pub fn sum_pre_death_any(dirs: &[Dir], r1: &RepSeq, r2: &RepSeq) -> Result<RepSeq> {
    if death_less(dirs, r1.d, r2.d) {
        sum_pre_death(dirs, r1, r2)
    } else {
        sum_pre_death(dirs, r2, r1)
    }
}

/// Post-birth representative for `[b,i]`.
pub fn prefix(r: &RepSeq, i: usize) -> Result<RepSeq> {
    if !r.contains(i) {
        return Err(Error::contract(format!("prefix index {i} outside [{},{}]", r.b, r.d)));
    }
    let n = i - r.b + 1;
    let z = r.z[..n].to_vec();
    let mut c = r.c[..n + 1].to_vec();
    c[n] = None;
    Ok(RepSeq::from_parts(r.p, r.b, i, z, c))
}

/// Pre-death representative for `[i,d]`.
pub fn suffix(r: &RepSeq, i: usize) -> Result<RepSeq> {
    if !r.contains(i) {
        return Err(Error::contract(format!("suffix index {i} outside [{},{}]", r.b, r.d)));
    }
    let k = i - r.b;
    let z = r.z[k..].to_vec();
    let mut c = r.c[k..].to_vec();
    c[0] = None;
    Ok(RepSeq::from_parts(r.p, i, r.d, z, c))
}

/// `r1 ∥ r2` with witness `a`: `∂a = z_i + z'_i`, checked; `a ⊆ K_i` is checked
/// when `k_i` is given.
pub fn concat(reg: &Registry, k_i: Option<&IdSet>, r1: &RepSeq, r2: &RepSeq, a: &Chain) -> Result<RepSeq> {
    let i = r1.d;
    if r2.b != i || r1.p != r2.p {
        return Err(Error::contract("concatenation needs a shared junction index and dimension"));
    }
    let lhs = reg.boundary_of(a);
    let rhs = r1.z(i).add(r2.z(i));
    if !lhs.ids().eq(rhs.ids()) {
        return Err(Error::contract("witness boundary differs from z_i + z'_i"));
    }
    if let Some(k) = k_i {
        if !a.is_subset_of(k) {
            return Err(Error::contract("witness not contained in K_i"));
        }
    }
    Ok(concat_unchecked(r1, r2, a))
}

pub(crate) fn concat_unchecked(r1: &RepSeq, r2: &RepSeq, a: &Chain) -> RepSeq {
    let i = r1.d;
    debug_assert_eq!(r2.b, i);
    let mut z: Vec<Arc<Chain>> = r1.z[..r1.z.len() - 1].to_vec();
    z.extend(r2.z.iter().cloned());
    let mut c: Vec<Link> = r1.c[..r1.c.len() - 1].to_vec();
    let j = c.len() - 1;
    c[j] = match &c[j] {
        Some(x) if !a.is_empty() => Some(Arc::new(x.add(a))),
        other => other.clone(),
    };
    c.extend(r2.c[1..].iter().cloned());
    RepSeq::from_parts(r1.p, r1.b, r2.d, z, c)
}

/// General sum at a common index `i`; the second value reports whether the
/// two intervals are comparable.
pub fn rep_sum(dirs: &[Dir], r1: &RepSeq, r2: &RepSeq, i: usize) -> Result<(RepSeq, bool)> {
    if !r1.contains(i) || !r2.contains(i) {
        return Err(Error::contract("sum index not common to both intervals"));
    }
    if r1.b == r2.b || r1.d == r2.d {
        return Err(Error::contract("sum of intervals sharing an end point"));
    }
    let pb = sum_post_birth_any(dirs, &prefix(r1, i)?, &prefix(r2, i)?)?;
    let sd = sum_pre_death_any(dirs, &suffix(r1, i)?, &suffix(r2, i)?)?;
    let comparable = birth_less(dirs, r1.b, r2.b) == death_less(dirs, r1.d, r2.d);
    Ok((concat_unchecked(&pb, &sd, &Chain::zero(r1.p + 1)), comparable))
}
