//! Vineyards of moving point clouds.
//!
//! Points move linearly between integer sample times `0..=s`. For a distance
//! threshold δ the Rips complexes over time form a zigzag filtration `F^δ`;
//! it changes only at critical values of the pairwise distance-time curves.
//! The sweep starts above every critical value and walks down one band at a
//! time, turning each band change into atomic ops on a `PersistenceState`.
//!
//! All geometry is in squared distances. Reported deltas are distances.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::barcode::Interval;
use crate::chains::Simplex;
use crate::error::{Error, Result};
use crate::filtration::{Dir, ZigzagFiltration};
use crate::fzz::barcode_from_scratch;
use crate::ops::Op;
use crate::planner;
use crate::rep_updates::PersistenceState;

/// Positions of every point at every sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectories {
    /// Sorted point ids; vertex `ids[k]` is point `k`.
    pub ids: Vec<u32>,
    /// `samples[t][k]`; unused coordinates are zero.
    pub samples: Vec<Vec<[f64; 3]>>,
}

impl Trajectories {
    pub fn n_points(&self) -> usize {
        self.ids.len()
    }

    /// Last sample time `s`.
    pub fn span(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    fn index(&self, id: u32) -> Result<usize> {
        self.ids.binary_search(&id).map_err(|_| Error::contract(format!("unknown point id {id}")))
    }
}

fn d2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

/// Squared distance of one pair: on segment `k` it is `a t² + b t + c` for
/// local time `t ∈ [0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceCurve {
    pub segs: Vec<[f64; 3]>,
    /// Exact squared distances at the samples; segment ends use these.
    pub at_samples: Vec<f64>,
}

impl DistanceCurve {
    pub fn eval(&self, t: f64) -> f64 {
        if self.segs.is_empty() {
            return self.at_samples[0];
        }
        let k = (t.floor() as usize).min(self.segs.len() - 1);
        let u = t - k as f64;
        let [a, b, c] = self.segs[k];
        (a * u + b) * u + c
    }

    fn slope(&self, k: usize, u: f64) -> f64 {
        let [a, b, _] = self.segs[k];
        2.0 * a * u + b
    }
}

pub fn pair_distance_curve(tr: &Trajectories, p: u32, q: u32) -> Result<DistanceCurve> {
    if p == q {
        return Err(Error::contract("distance curve of a point with itself"));
    }
    let (i, j) = (tr.index(p)?, tr.index(q)?);
    let at_samples: Vec<f64> = tr.samples.iter().map(|s| d2(&s[i], &s[j])).collect();
    let segs = tr
        .samples
        .windows(2)
        .map(|w| {
            let d0: Vec<f64> = (0..3).map(|k| w[0][i][k] - w[0][j][k]).collect();
            let v: Vec<f64> = (0..3).map(|k| (w[1][i][k] - w[0][i][k]) - (w[1][j][k] - w[0][j][k])).collect();
            let a: f64 = v.iter().map(|x| x * x).sum();
            let b: f64 = 2.0 * d0.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
            let c: f64 = d0.iter().map(|x| x * x).sum();
            [a, b, c]
        })
        .collect();
    Ok(DistanceCurve { segs, at_samples })
}

/// Real roots of `a t² + b t + c` in `[lo, hi]`, ascending.
fn roots_in(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let tiny = 1e-14 * scale;
    let mut out = Vec::new();
    if a.abs() <= tiny {
        if b.abs() > tiny {
            out.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // Stable form: no cancellation between b and the root.
            let qq = -0.5 * (b + b.signum() * sq);
            let (r1, r2) = if qq == 0.0 { (0.0, 0.0) } else { (qq / a, c / qq) };
            out.push(r1);
            if disc > 0.0 {
                out.push(r2);
            }
        }
    }
    out.retain(|t| t.is_finite() && *t >= lo && *t <= hi);
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    /// Two curves both increasing: two deletions swap.
    IncreasingCrossing,
    /// Two curves both decreasing: two additions swap.
    DecreasingCrossing,
    /// One rising, one falling: an addition and a deletion swap.
    OppositeCrossing,
    /// A presence interval of the edge vanishes.
    LocalMin,
    /// A presence interval of the edge splits.
    LocalMax,
    /// The curve's value at time 0 or `s`: the edge leaves the first or last complex.
    Endpoint,
    /// Curves touching without crossing; no change to the filtration.
    Tangency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    /// Squared distance of the critical value.
    pub value: f64,
    pub t: f64,
    pub kind: EventKind,
    /// One pair for extrema and endpoints, two for crossings.
    pub pairs: Vec<(u32, u32)>,
}

impl Event {
    pub fn delta(&self) -> f64 {
        self.value.sqrt()
    }
}

fn pairs_of(tr: &Trajectories) -> Vec<(u32, u32)> {
    let ids = &tr.ids;
    let mut out = Vec::new();
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            out.push((ids[a], ids[b]));
        }
    }
    out
}

/// Every critical point of the distance-time curves, by decreasing value.
/// Ties are ordered by pairs, then kind.
pub fn detect_events(tr: &Trajectories) -> Result<Vec<Event>> {
    let pairs = pairs_of(tr);
    let curves: Vec<DistanceCurve> = pairs.iter().map(|&(p, q)| pair_distance_curve(tr, p, q)).collect::<Result<_>>()?;
    let s = tr.span();
    let mut out = Vec::new();
    for (e, c) in pairs.iter().zip(&curves) {
        let one = |value: f64, t: f64, kind| Event { value, t, kind, pairs: vec![*e] };
        out.push(one(c.at_samples[0], 0.0, EventKind::Endpoint));
        if s > 0 {
            out.push(one(c.at_samples[s], s as f64, EventKind::Endpoint));
        }
        for (k, &[a, b, _]) in c.segs.iter().enumerate() {
            if a > 0.0 {
                let u = -b / (2.0 * a);
                if u > 0.0 && u < 1.0 {
                    out.push(one(c.eval(k as f64 + u), k as f64 + u, EventKind::LocalMin));
                }
            }
        }
        for k in 1..s {
            let (dl, dr) = (c.slope(k - 1, 1.0), c.slope(k, 0.0));
            let v = c.at_samples[k];
            if dl <= 0.0 && dr >= 0.0 {
                out.push(one(v, k as f64, EventKind::LocalMin));
            }
            if dl >= 0.0 && dr <= 0.0 {
                out.push(one(v, k as f64, EventKind::LocalMax));
            }
        }
    }
    for x in 0..pairs.len() {
        for y in x + 1..pairs.len() {
            let (cx, cy) = (&curves[x], &curves[y]);
            for k in 0..cx.segs.len() {
                let [a1, b1, c1] = cx.segs[k];
                let [a2, b2, c2] = cy.segs[k];
                for u in roots_in(a1 - a2, b1 - b2, c1 - c2, 0.0, 1.0) {
                    let (sx, sy) = (cx.slope(k, u), cy.slope(k, u));
                    let kind = if (sx - sy).abs() <= 1e-12 * (sx.abs() + sy.abs()).max(1e-300) {
                        EventKind::Tangency
                    } else if sx > 0.0 && sy > 0.0 {
                        EventKind::IncreasingCrossing
                    } else if sx < 0.0 && sy < 0.0 {
                        EventKind::DecreasingCrossing
                    } else {
                        EventKind::OppositeCrossing
                    };
                    let t = k as f64 + u;
                    out.push(Event { value: cx.eval(t), t, kind, pairs: vec![pairs[x], pairs[y]] });
                }
            }
        }
    }
    out.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.pairs.cmp(&b.pairs)).then_with(|| a.kind.cmp(&b.kind)));
    Ok(out)
}

/// Distinct critical values, descending; values within `eps` (relative)
/// are one value.
pub fn critical_values(events: &[Event], eps: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for e in events {
        match out.last() {
            Some(&v) if (v - e.value).abs() <= eps * v.abs().max(1.0) => {}
            _ => out.push(e.value),
        }
    }
    out
}

/// Closed time intervals where the pair is within `delta2`, merged across
/// sample times.
pub fn presence(c: &DistanceCurve, delta2: f64) -> Vec<(f64, f64)> {
    let inside = |v: f64| v <= delta2;
    if c.segs.is_empty() {
        return if inside(c.at_samples[0]) { vec![(0.0, 0.0)] } else { Vec::new() };
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, &[a, b, cc]) in c.segs.iter().enumerate() {
        let (in0, in1) = (inside(c.at_samples[k]), inside(c.at_samples[k + 1]));
        let r = roots_in(a, b, cc - delta2, 0.0, 1.0);
        let piece = match (in0, in1) {
            (true, true) => Some((0.0, 1.0)),
            (true, false) => Some((0.0, r.last().copied().unwrap_or(1.0))),
            (false, true) => Some((r.first().copied().unwrap_or(0.0), 1.0)),
            (false, false) if r.len() == 2 && r[0] < r[1] => Some((r[0], r[1])),
            _ => None,
        };
        let Some((lo, hi)) = piece else { continue };
        let (lo, hi) = (k as f64 + lo, k as f64 + hi);
        match out.last_mut() {
            Some(last) if in0 && last.1 == k as f64 => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// `F^δ` with the time of every step.
#[derive(Clone, Debug)]
pub struct BandFiltration {
    pub filt: ZigzagFiltration,
    pub times: Vec<f64>,
    /// Presence intervals of every simplex as (add step, delete step), in order.
    pub intervals: HashMap<Simplex, Vec<(usize, usize)>>,
    /// Index of each step's interval in its simplex's list.
    pub occ: Vec<usize>,
}

impl BandFiltration {
    pub fn new(filt: ZigzagFiltration, times: Vec<f64>) -> BandFiltration {
        let partners = filt.partners();
        let mut intervals: HashMap<Simplex, Vec<(usize, usize)>> = HashMap::new();
        let mut occ = vec![0; filt.len()];
        for j in 0..filt.len() {
            if filt.is_add(j) {
                let list = intervals.entry(filt.simplex(j).clone()).or_default();
                occ[j] = list.len();
                occ[partners[j]] = list.len();
                list.push((j, partners[j]));
            }
        }
        BandFiltration { filt, times, intervals, occ }
    }
}

fn dim_lex(a: &Simplex, b: &Simplex) -> std::cmp::Ordering {
    a.dim().cmp(&b.dim()).then_with(|| a.cmp(b))
}

/// Cliques of dimension `1..=cap` in the graph that contain edge `e`.
fn cofaces_with(e: (u32, u32), adj: &HashMap<u32, Vec<u32>>, ids: &[u32], cap: usize) -> Vec<Simplex> {
    let mut out = Vec::new();
    let linked = |x: u32, y: u32| adj.get(&x).is_some_and(|n| n.contains(&y));
    let common: Vec<u32> = ids.iter().copied().filter(|&v| v != e.0 && v != e.1 && linked(v, e.0) && linked(v, e.1)).collect();
    // Grow cliques over the common neighbourhood.
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 1..cap {
        let mut next = Vec::new();
        for c in &layer {
            let start = c.last().map_or(0, |&l| common.iter().position(|&v| v == l).unwrap() + 1);
            for &v in &common[start..] {
                if c.iter().all(|&u| linked(u, v)) {
                    let mut d = c.clone();
                    d.push(v);
                    next.push(d);
                }
            }
        }
        for c in &next {
            let mut vs = c.clone();
            vs.extend([e.0, e.1]);
            out.push(Simplex::new(vs).expect("distinct"));
        }
        layer = next;
    }
    out
}

/// Builds `F^δ` for squared threshold `delta2`. Vertices persist throughout;
/// the first complex is added by (dim, lex), an edge entry adds the edge then
/// its new cofaces ascending, an exit deletes the cofaces descending then the
/// edge, and the last complex is deleted in reverse (dim, lex).
pub fn build_band(tr: &Trajectories, dim_cap: usize, delta2: f64) -> Result<BandFiltration> {
    let s = tr.span() as f64;
    let pairs = pairs_of(tr);
    let mut events: Vec<(f64, bool, (u32, u32))> = Vec::new();
    let mut start_edges = Vec::new();
    for &e in &pairs {
        let c = pair_distance_curve(tr, e.0, e.1)?;
        for (lo, hi) in presence(&c, delta2) {
            if lo == 0.0 {
                start_edges.push(e);
            } else {
                events.push((lo, true, e));
            }
            if hi < s {
                events.push((hi, false, e));
            }
        }
    }
    // Exits before entries at equal times.
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));

    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    let link = |adj: &mut HashMap<u32, Vec<u32>>, e: (u32, u32), on: bool| {
        for (x, y) in [(e.0, e.1), (e.1, e.0)] {
            let n = adj.entry(x).or_default();
            if on {
                n.push(y);
            } else {
                n.retain(|&v| v != y);
            }
        }
    };
    let mut present: std::collections::BTreeSet<Simplex> = tr.ids.iter().map(|&v| Simplex::vertex(v)).collect();
    let mut first: Vec<Simplex> = present.iter().cloned().collect();
    if dim_cap >= 1 {
        for &e in &start_edges {
            link(&mut adj, e, true);
        }
        for &e in &start_edges {
            first.push(Simplex::new(vec![e.0, e.1]).expect("distinct"));
            first.extend(cofaces_with(e, &adj, &tr.ids, dim_cap));
        }
    }
    first.sort_by(dim_lex);
    first.dedup();
    let mut f = ZigzagFiltration::new();
    let mut times = Vec::new();
    for x in first {
        present.insert(x.clone());
        f.push(Dir::Add, x);
        times.push(0.0);
    }
    if dim_cap >= 1 {
        for (t, entry, e) in events {
            let es = Simplex::new(vec![e.0, e.1]).expect("distinct");
            if entry {
                link(&mut adj, e, true);
                let mut co = cofaces_with(e, &adj, &tr.ids, dim_cap);
                co.sort_by(dim_lex);
                present.insert(es.clone());
                f.push(Dir::Add, es);
                times.push(t);
                for x in co {
                    present.insert(x.clone());
                    f.push(Dir::Add, x);
                    times.push(t);
                }
            } else {
                let mut co = cofaces_with(e, &adj, &tr.ids, dim_cap);
                co.sort_by(|a, b| dim_lex(b, a));
                for x in co {
                    present.remove(&x);
                    f.push(Dir::Delete, x);
                    times.push(t);
                }
                link(&mut adj, e, false);
                present.remove(&es);
                f.push(Dir::Delete, es);
                times.push(t);
            }
        }
    }
    let mut last: Vec<Simplex> = present.into_iter().collect();
    last.sort_by(|a, b| dim_lex(b, a));
    for x in last {
        f.push(Dir::Delete, x);
        times.push(s);
    }
    debug_assert!(f.check().is_ok());
    Ok(BandFiltration::new(f, times))
}

/// Step label: simplex, index of its presence interval, direction.
type Label = (Simplex, usize, Dir);

/// Tracks a window of steps and their labels while ops are appended. Only
/// the local legality of each op is checked here; the window's surroundings
/// are identical before and after.
struct Edit {
    steps: Vec<(Dir, Simplex)>,
    labels: Vec<Label>,
    /// Added to every emitted position.
    offset: usize,
    script: Vec<Op>,
    /// Inverse of every op so far, in application order.
    undo: Vec<Op>,
}

impl Edit {
    fn pos(&self, l: &Label) -> Result<usize> {
        self.labels.iter().position(|x| x == l).ok_or_else(|| Error::contract(format!("step of {} interval {} not in the window", l.0, l.1)))
    }

    /// Adjacent swap of window steps `q`, `q+1`, by their directions.
    fn swap(&mut self, q: usize) -> Result<()> {
        let ((d1, s1), (d2, s2)) = (&self.steps[q], &self.steps[q + 1]);
        let p = q + self.offset;
        let (op, inv) = match (d1, d2) {
            (Dir::Add, Dir::Add) if !s1.is_proper_face_of(s2) => (Op::ForwardSwitch(p), Op::ForwardSwitch(p)),
            (Dir::Delete, Dir::Delete) if !s2.is_proper_face_of(s1) => (Op::BackwardSwitch(p), Op::BackwardSwitch(p)),
            (Dir::Add, Dir::Delete) if s1 != s2 => (Op::OutwardSwitch(p), Op::InwardSwitch(p)),
            (Dir::Delete, Dir::Add) if s1 != s2 => (Op::InwardSwitch(p), Op::OutwardSwitch(p)),
            _ => return Err(Error::IllegalSwitch { pos: p, reason: format!("{s1} and {s2} cannot pass each other") }),
        };
        self.steps.swap(q, q + 1);
        self.labels.swap(q, q + 1);
        self.script.push(op);
        self.undo.push(inv);
        Ok(())
    }

    fn contract(&mut self, q: usize) -> Result<()> {
        let ((d1, s1), (d2, s2)) = (&self.steps[q], &self.steps[q + 1]);
        let p = q + self.offset;
        if s1 != s2 || d1 == d2 {
            return Err(Error::IllegalContraction { pos: p, reason: format!("{s1} and {s2} are not a pair") });
        }
        let s = s1.clone();
        let (op, inv) = match d1 {
            Dir::Add => (Op::InwardContraction(p), Op::InwardExpansion(p, s)),
            Dir::Delete => (Op::OutwardContraction(p), Op::OutwardExpansion(p, s)),
        };
        self.steps.drain(q..q + 2);
        self.labels.drain(q..q + 2);
        self.script.push(op);
        self.undo.push(inv);
        Ok(())
    }

    /// Moves the step at `from` left until it sits right after `to`.
    fn pull_left(&mut self, mut from: usize, to: usize) -> Result<()> {
        while from > to + 1 {
            self.swap(from - 1)?;
            from -= 1;
        }
        Ok(())
    }
}

/// How a band change was compiled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompileNote {
    /// The structured compile failed and the generic transform was used.
    pub fallback: Option<String>,
}

/// Ops taking `old` to `new`, where every presence interval of `new` lies in
/// one of `old` (the threshold went down). Intervals with nothing inside
/// vanish by inward contraction, the rest are reordered by switches, and
/// intervals holding several new ones are split by outward expansions.
pub fn compile(old: &BandFiltration, new: &BandFiltration) -> Result<(Vec<Op>, CompileNote)> {
    match compile_structured(old, new) {
        Ok(s) => Ok((s, CompileNote::default())),
        Err(e) => {
            let s = planner::transform(&old.filt, &new.filt)?;
            Ok((s, CompileNote { fallback: Some(e.to_string()) }))
        }
    }
}

fn compile_structured(old: &BandFiltration, new: &BandFiltration) -> Result<Vec<Op>> {
    let (fo, fnew) = (old.filt.steps(), new.filt.steps());
    let lo = fo.iter().zip(fnew).take_while(|(x, y)| x.dir == y.dir && x.simplex == y.simplex).count();
    if lo == fo.len() && lo == fnew.len() {
        return Ok(Vec::new());
    }
    let suf = fo[lo..].iter().rev().zip(fnew[lo..].iter().rev()).take_while(|(x, y)| x.dir == y.dir && x.simplex == y.simplex).count();
    let (mut lo, mut suf) = (lo, suf);
    // Grow the window until every interval it touches is whole on both sides
    // in the sense the edits need: matching outer ends, inner gaps and
    // vanishing intervals entirely inside.
    let (wo, wn, parent, children) = loop {
        let (wo, wn) = (lo..fo.len() - suf, lo..fnew.len() - suf);
        let mut touched: Vec<&Simplex> = fo[wo.clone()].iter().chain(&fnew[wn.clone()]).map(|s| &s.simplex).collect();
        touched.sort();
        touched.dedup();
        let mut parent: HashMap<(Simplex, usize), usize> = HashMap::new();
        let mut children: HashMap<(Simplex, usize), Vec<usize>> = HashMap::new();
        let (mut lo2, mut suf2) = (lo, suf);
        for &s in &touched {
            let olds = old.intervals.get(s).ok_or_else(|| Error::contract(format!("{s} appears in the lower band only")))?;
            let news = new.intervals.get(s).map_or(&[][..], |v| &v[..]);
            let mut kids: Vec<Vec<usize>> = vec![Vec::new(); olds.len()];
            for (k, &(a, d)) in news.iter().enumerate() {
                let (ta, td) = (new.times[a], new.times[d]);
                // The old interval it overlaps most in time.
                let best = olds
                    .iter()
                    .enumerate()
                    .map(|(i, &(oa, od))| (i, td.min(old.times[od]) - ta.max(old.times[oa])))
                    .max_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("non-empty");
                if best.1 < -1e-9 {
                    return Err(Error::contract(format!("{s} interval at {ta}..{td} lies in no upper-band interval")));
                }
                parent.insert((s.clone(), k), best.0);
                kids[best.0].push(k);
            }
            let (io, inn) = (|x: usize| wo.contains(&x), |x: usize| wn.contains(&x));
            let whole = olds.iter().zip(&kids).all(|(&(a, d), ks)| match ks.len() {
                0 => io(a) && io(d),
                _ => {
                    let inner_ok = ks.windows(2).all(|w| inn(news[w[0]].1) && inn(news[w[1]].0));
                    inner_ok && io(a) == inn(news[ks[0]].0) && io(d) == inn(news[*ks.last().unwrap()].1)
                }
            });
            if !whole {
                let first = olds[0].0.min(news.first().map_or(usize::MAX, |x| x.0));
                let last_o = olds.iter().map(|x| x.1).max().unwrap();
                let last_n = news.iter().map(|x| x.1).max();
                lo2 = lo2.min(first);
                suf2 = suf2.min(fo.len() - 1 - last_o);
                if let Some(l) = last_n {
                    suf2 = suf2.min(fnew.len() - 1 - l);
                }
            }
            for (k, ks) in kids.into_iter().enumerate() {
                if !ks.is_empty() {
                    children.insert((s.clone(), k), ks);
                }
            }
        }
        if (lo2, suf2) == (lo, suf) {
            break (wo, wn, parent, children);
        }
        (lo, suf) = (lo2, suf2);
    };
    let touched: Vec<Simplex> = {
        let mut t: Vec<Simplex> = fo[wo.clone()].iter().map(|s| s.simplex.clone()).collect();
        t.sort();
        t.dedup();
        t
    };

    let window = |f: &[crate::filtration::Step], r: std::ops::Range<usize>| -> Vec<(Dir, Simplex)> {
        f[r].iter().map(|s| (s.dir, s.simplex.clone())).collect()
    };
    let mut cur = Edit {
        steps: window(fo, wo.clone()),
        labels: wo.clone().map(|j| (fo[j].simplex.clone(), old.occ[j], fo[j].dir)).collect(),
        offset: lo,
        script: Vec::new(),
        undo: Vec::new(),
    };

    // Vanishing intervals, cofaces first.
    let mut vanish: Vec<(Simplex, usize)> = Vec::new();
    for s in &touched {
        for k in 0..old.intervals[s].len() {
            if !children.contains_key(&(s.clone(), k)) {
                vanish.push((s.clone(), k));
            }
        }
    }
    vanish.sort_by(|a, b| dim_lex(&b.0, &a.0).then(a.1.cmp(&b.1)));
    for (s, k) in vanish {
        let a = cur.pos(&(s.clone(), k, Dir::Add))?;
        let d = cur.pos(&(s, k, Dir::Delete))?;
        cur.pull_left(d, a)?;
        cur.contract(a)?;
    }

    // Target window with every split interval merged back. Inner piece ends
    // get unique indices `PIECE * (kid + 1) + parent`; the first add and the
    // last delete keep the parent index, so closing the gaps leaves exactly
    // the parent labels.
    const PIECE: usize = 1 << 40;
    let mut tgt = Edit { steps: window(fnew, wn.clone()), labels: Vec::new(), offset: lo, script: Vec::new(), undo: Vec::new() };
    for j in wn.clone() {
        let (s, kid) = (&fnew[j].simplex, new.occ[j]);
        let pi = parent[&(s.clone(), kid)];
        let kids = &children[&(s.clone(), pi)];
        let dir = fnew[j].dir;
        let outer = (dir == Dir::Add && kids[0] == kid) || (dir == Dir::Delete && *kids.last().unwrap() == kid);
        tgt.labels.push((s.clone(), if outer { pi } else { pi + PIECE * (kid + 1) }, dir));
    }
    // Faces' gaps sit inside cofaces' gaps: close the lowest dimension first.
    let mut gaps: Vec<(Simplex, usize, usize, usize)> = Vec::new();
    for ((s, pi), kids) in &children {
        for w in kids.windows(2) {
            gaps.push((s.clone(), *pi, w[0], w[1]));
        }
    }
    gaps.sort_by(|a, b| dim_lex(&a.0, &b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    for (s, pi, left, right) in gaps {
        let d = tgt.pos(&(s.clone(), pi + PIECE * (left + 1), Dir::Delete))?;
        let a = tgt.pos(&(s, pi + PIECE * (right + 1), Dir::Add))?;
        tgt.pull_left(a, d)?;
        tgt.contract(d)?;
    }

    let rank: HashMap<&Label, usize> = tgt.labels.iter().enumerate().map(|(j, l)| (l, j)).collect();
    if rank.len() != cur.labels.len() {
        return Err(Error::contract("band windows do not correspond"));
    }
    let mut r: Vec<usize> = cur
        .labels
        .iter()
        .map(|l| rank.get(l).copied().ok_or_else(|| Error::contract(format!("step of {} interval {} has no counterpart", l.0, l.1))))
        .collect::<Result<_>>()?;
    // Insertion sort: every swap fixes one inversion.
    for i in 1..r.len() {
        let mut j = i;
        while j > 0 && r[j - 1] > r[j] {
            cur.swap(j - 1)?;
            r.swap(j - 1, j);
            j -= 1;
        }
    }
    if cur.steps != tgt.steps {
        return Err(Error::contract("reordering did not reach the merged target"));
    }
    let mut script = cur.script;
    script.extend(tgt.undo.into_iter().rev());
    Ok(script)
}

#[derive(Clone, Debug)]
pub struct VineyardOptions {
    pub dim_cap: usize,
    /// Compare every k-th band against the from-scratch barcode; 0 never.
    pub check_every: usize,
    /// Relative tolerance merging critical values.
    pub eps: f64,
    /// Time the from-scratch barcode of every band.
    pub time_from_scratch: bool,
}

impl Default for VineyardOptions {
    fn default() -> VineyardOptions {
        VineyardOptions { dim_cap: 2, check_every: 0, eps: 1e-9, time_from_scratch: false }
    }
}

#[derive(Clone, Debug)]
pub struct Band {
    /// Distances bounding the band; `delta_hi` is infinite for the first.
    pub delta_hi: f64,
    pub delta_lo: f64,
    /// The squared threshold the band was built at.
    pub delta2: f64,
    pub bars: Vec<(Interval, u64)>,
    pub len: usize,
}

#[derive(Clone, Debug, Default)]
pub struct VineyardStats {
    /// Ops applied, by code.
    pub ops: std::collections::BTreeMap<&'static str, usize>,
    pub max_len: usize,
    pub t_update: Duration,
    /// Part of `t_update` spent compiling band changes into ops.
    pub t_compile: Duration,
    pub t_from_scratch: Duration,
    pub fallbacks: usize,
    pub checked: usize,
}

#[derive(Clone, Debug)]
pub struct Vineyard {
    pub bands: Vec<Band>,
    pub events: Vec<Event>,
    pub stats: VineyardStats,
    pub diagnostics: Vec<String>,
}

/// Band thresholds (squared) from the critical values, top first.
pub fn band_thresholds(values: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let top = values.first().copied().unwrap_or(0.0);
    out.push((f64::INFINITY, top, top + top.max(1.0)));
    for w in values.windows(2) {
        out.push((w[0], w[1], 0.5 * (w[0] + w[1])));
    }
    if let Some(&lo) = values.last() {
        if lo > 0.0 {
            out.push((lo, 0.0, 0.5 * lo));
        }
    }
    out
}

pub fn vineyard(tr: &Trajectories, opts: &VineyardOptions) -> Result<Vineyard> {
    let events = detect_events(tr)?;
    let values = critical_values(&events, opts.eps);
    let mut diagnostics = Vec::new();
    let tangencies = events.iter().filter(|e| e.kind == EventKind::Tangency).count();
    if tangencies > 0 {
        diagnostics.push(format!("{tangencies} tangencies treated as no-op events"));
    }
    let mut stats = VineyardStats::default();
    let mut bands = Vec::new();
    let mut st = PersistenceState::new();
    let mut prev: Option<BandFiltration> = None;
    for (k, (hi, lo, delta2)) in band_thresholds(&values).into_iter().enumerate() {
        let band = build_band(tr, opts.dim_cap, delta2)?;
        let t0 = Instant::now();
        let script = match &prev {
            // The top band is up-down: grow it by nested inward expansions.
            None => {
                let n = (0..band.filt.len()).take_while(|&j| band.filt.is_add(j)).count();
                (0..n).map(|j| Op::InwardExpansion(j, band.filt.simplex(j).clone())).collect()
            }
            Some(p) => {
                let (s, note) = compile(p, &band)?;
                if let Some(why) = note.fallback {
                    stats.fallbacks += 1;
                    diagnostics.push(format!("band {k}: generic transform used ({why})"));
                }
                s
            }
        };
        stats.t_compile += t0.elapsed();
        for op in &script {
            st.apply(op)?;
            *stats.ops.entry(op.code()).or_insert(0) += 1;
        }
        stats.t_update += t0.elapsed();
        if *st.filtration() != band.filt {
            return Err(Error::contract(format!("band {k}: updated filtration differs from the band")));
        }
        if opts.time_from_scratch {
            let t1 = Instant::now();
            let b = barcode_from_scratch(&band.filt)?;
            stats.t_from_scratch += t1.elapsed();
            std::hint::black_box(b);
        }
        if opts.check_every > 0 && k % opts.check_every == 0 {
            let want = barcode_from_scratch(&band.filt)?;
            if st.barcode() != want {
                return Err(Error::contract(format!("band {k}: barcode differs from the from-scratch barcode")));
            }
            stats.checked += 1;
        }
        stats.max_len = stats.max_len.max(band.filt.len());
        bands.push(Band {
            delta_hi: hi.sqrt(),
            delta_lo: lo.sqrt(),
            delta2,
            bars: st.vine_barcode(),
            len: band.filt.len(),
        });
        prev = Some(band);
    }
    Ok(Vineyard { bands, events, stats, diagnostics })
}

/// Ordered edge events of a band: the combinatorial signature the critical
/// values must explain.
pub fn edge_signature(tr: &Trajectories, delta2: f64) -> Result<Vec<(u32, u32, bool, usize)>> {
    let s = tr.span() as f64;
    let mut ev = Vec::new();
    for (p, q) in pairs_of(tr) {
        let c = pair_distance_curve(tr, p, q)?;
        for (lo, hi) in presence(&c, delta2) {
            ev.push((lo, p, q, true));
            ev.push((if hi < s { hi } else { f64::INFINITY }, p, q, false));
        }
    }
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| (a.1, a.2, a.3).cmp(&(b.1, b.2, b.3))));
    // Times are replaced by rank classes: equal-time runs share a class.
    let mut out = Vec::with_capacity(ev.len());
    let mut class = 0;
    for (n, e) in ev.iter().enumerate() {
        if n > 0 && e.0 != ev[n - 1].0 {
            class += 1;
        }
        let cls = if e.0 == 0.0 { 0 } else if e.0.is_infinite() { usize::MAX } else { class + 1 };
        out.push((e.1, e.2, e.3, cls));
    }
    Ok(out)
}

/// Points drawn uniformly in the unit square at every sample.
pub fn random_trajectories(n: usize, samples: usize, seed: u64) -> Trajectories {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..samples.max(1))
        .map(|_| (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), 0.0]).collect())
        .collect();
    Trajectories { ids: (0..n as u32).collect(), samples }
}

/// A bounded random walk: uniform start in the unit square, then each
/// coordinate moves by at most `step` per sample, reflecting at the walls.
pub fn random_walk(n: usize, samples: usize, step: f64, seed: u64) -> Trajectories {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cur: Vec<[f64; 3]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), 0.0]).collect();
    let mut out = vec![cur.clone()];
    for _ in 1..samples.max(1) {
        for p in cur.iter_mut() {
            for x in p.iter_mut().take(2) {
                let y = *x + rng.gen_range(-step..=step);
                *x = if y < 0.0 { -y } else if y > 1.0 { 2.0 - y } else { y };
            }
        }
        out.push(cur.clone());
    }
    Trajectories { ids: (0..n as u32).collect(), samples: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[&[f64]]) -> Trajectories {
        // points[t][k] is the x coordinate of point k at time t.
        let n = points[0].len();
        Trajectories {
            ids: (0..n as u32).collect(),
            samples: points.iter().map(|row| row.iter().map(|&x| [x, 0.0, 0.0]).collect()).collect(),
        }
    }

    #[test]
    fn stationary_curve_is_constant() {
        let tr = line(&[&[0.0, 3.0], &[0.0, 3.0]]);
        let c = pair_distance_curve(&tr, 0, 1).unwrap();
        assert_eq!(c.eval(0.0), 9.0);
        assert_eq!(c.eval(0.5), 9.0);
    }

    #[test]
    fn crossing_points_have_minimum() {
        let tr = line(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let c = pair_distance_curve(&tr, 0, 1).unwrap();
        assert!(c.eval(0.5).abs() < 1e-12);
        let ev = detect_events(&tr).unwrap();
        assert!(ev.iter().any(|e| e.kind == EventKind::LocalMin && (e.t - 0.5).abs() < 1e-12));
    }

    #[test]
    fn monotone_pair_has_only_endpoints() {
        let tr = line(&[&[0.0, 1.0], &[0.0, 2.0], &[0.0, 3.0]]);
        let ev = detect_events(&tr).unwrap();
        assert!(ev.iter().all(|e| e.kind == EventKind::Endpoint));
    }

    #[test]
    fn single_point_single_band() {
        let tr = line(&[&[0.0], &[0.0]]);
        let v = vineyard(&tr, &VineyardOptions::default()).unwrap();
        assert_eq!(v.bands.len(), 1);
        assert_eq!(v.bands[0].bars.iter().map(|b| b.0).collect::<Vec<_>>(), vec![Interval::new(0, 1, 1)]);
    }

    #[test]
    fn three_points_bands_match_scratch() {
        let tr = Trajectories {
            ids: vec![0, 1, 2],
            samples: vec![
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 1.0, 0.0]],
                vec![[0.0, 1.0, 0.0], [2.0, 0.0, 0.0], [1.0, 1.5, 0.0]],
                vec![[1.0, 1.0, 0.0], [1.0, 0.5, 0.0], [0.0, 3.0, 0.0]],
            ],
        };
        let opts = VineyardOptions { check_every: 1, ..VineyardOptions::default() };
        let v = vineyard(&tr, &opts).unwrap();
        assert!(v.bands.len() > 3);
        assert_eq!(v.stats.fallbacks, 0, "{:?}", v.diagnostics);
    }
}
