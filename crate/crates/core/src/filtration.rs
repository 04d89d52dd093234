//! Simplex-wise zigzag filtrations with stable step ids.
//!
//! Positions: steps are `0..m`, complexes are `K_0..=K_m`, step `j` connects
//! `K_j` and `K_{j+1}`. Birth and death indices live in `1..m`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::chains::{Complex, Simplex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dir {
    Add,
    Delete,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Add => Dir::Delete,
            Dir::Delete => Dir::Add,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StepId(pub u64);

#[derive(Clone, Debug)]
pub struct Step {
    pub id: StepId,
    pub dir: Dir,
    pub simplex: Simplex,
}

/// Equality compares directions and simplices only; step ids are ignored.
#[derive(Clone, Debug, Default)]
pub struct ZigzagFiltration {
    steps: Vec<Step>,
    next_id: u64,
}

impl PartialEq for ZigzagFiltration {
    fn eq(&self, other: &Self) -> bool {
        self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(a, b)| a.dir == b.dir && a.simplex == b.simplex)
    }
}

impl Eq for ZigzagFiltration {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pos: usize,
    pub rule: &'static str,
    pub simplex: Option<Simplex>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.simplex {
            Some(s) => write!(f, "step {}: {} ({})", self.pos, self.rule, s),
            None => write!(f, "step {}: {}", self.pos, self.rule),
        }
    }
}

pub fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl ZigzagFiltration {
    pub fn new() -> ZigzagFiltration {
        ZigzagFiltration::default()
    }

    pub fn from_steps<I: IntoIterator<Item = (Dir, Simplex)>>(steps: I) -> ZigzagFiltration {
        let mut f = ZigzagFiltration::new();
        for (d, s) in steps {
            f.push(d, s);
        }
        f
    }

    pub fn push(&mut self, dir: Dir, simplex: Simplex) -> StepId {
        let id = self.fresh_id();
        self.steps.push(Step { id, dir, simplex });
        id
    }

    fn fresh_id(&mut self) -> StepId {
        let id = StepId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step(&self, j: usize) -> &Step {
        &self.steps[j]
    }

    pub fn dir(&self, j: usize) -> Dir {
        self.steps[j].dir
    }

    pub fn simplex(&self, j: usize) -> &Simplex {
        &self.steps[j].simplex
    }

    pub fn is_add(&self, j: usize) -> bool {
        self.steps[j].dir == Dir::Add
    }

    /// Checks every replay rule; returns all violations found.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut k: BTreeSet<&Simplex> = BTreeSet::new();
        for (j, st) in self.steps.iter().enumerate() {
            let s = &st.simplex;
            match st.dir {
                Dir::Add => {
                    if k.contains(s) {
                        out.push(Violation { pos: j, rule: "simplex already present", simplex: Some(s.clone()) });
                        continue;
                    }
                    if s.facets().iter().any(|f| !k.contains(f)) {
                        out.push(Violation { pos: j, rule: "missing faces", simplex: Some(s.clone()) });
                    }
                    k.insert(s);
                }
                Dir::Delete => {
                    if !k.contains(s) {
                        out.push(Violation { pos: j, rule: "simplex absent", simplex: Some(s.clone()) });
                        continue;
                    }
                    if k.iter().any(|t| s.is_proper_face_of(t)) {
                        out.push(Violation { pos: j, rule: "coface present at delete", simplex: Some(s.clone()) });
                    }
                    k.remove(s);
                }
            }
        }
        if !k.is_empty() {
            out.push(Violation { pos: self.len(), rule: "non-empty end", simplex: None });
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn check(&self) -> Result<()> {
        self.validate().map_err(|v| Error::Invalid(format_violations(&v)))
    }

    pub fn complex_at(&self, i: usize) -> Result<Complex> {
        if i > self.len() {
            return Err(Error::contract(format!("complex index {i} out of range 0..={}", self.len())));
        }
        let mut k = Complex::new();
        for st in &self.steps[..i] {
            match st.dir {
                Dir::Add => k.insert(st.simplex.clone()),
                Dir::Delete => k.remove(&st.simplex),
            };
        }
        Ok(k)
    }

    /// `b1 ≺_b b2`.
    pub fn birth_order_less(&self, b1: usize, b2: usize) -> Result<bool> {
        self.check_index(b1)?;
        self.check_index(b2)?;
        if b1 == b2 {
            return Err(Error::contract("birth order on equal positions"));
        }
        Ok(self.birth_less(b1, b2))
    }

    /// `d1 ≺_d d2`.
    pub fn death_order_less(&self, d1: usize, d2: usize) -> Result<bool> {
        self.check_index(d1)?;
        self.check_index(d2)?;
        if d1 == d2 {
            return Err(Error::contract("death order on equal positions"));
        }
        Ok(self.death_less(d1, d2))
    }

    /// `[b1,d1] ≺ [b2,d2]` on non-disjoint intervals.
    pub fn interval_less(&self, i1: (usize, usize), i2: (usize, usize)) -> Result<bool> {
        if i1.1 < i2.0 || i2.1 < i1.0 {
            return Err(Error::contract("comparing disjoint intervals"));
        }
        if i1 == i2 {
            return Ok(false);
        }
        if i1.0 == i2.0 || i1.1 == i2.1 {
            return Ok(false);
        }
        Ok(self.birth_order_less(i1.0, i2.0)? && self.death_order_less(i1.1, i2.1)?)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i >= self.len() {
            return Err(Error::contract(format!("index {i} outside 1..{}", self.len())));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn birth_less(&self, b1: usize, b2: usize) -> bool {
        (b1 < b2 && self.is_add(b2 - 1)) || (b1 > b2 && !self.is_add(b1 - 1))
    }

    #[inline]
    pub(crate) fn death_less(&self, d1: usize, d2: usize) -> bool {
        (d1 > d2 && !self.is_add(d2)) || (d1 < d2 && self.is_add(d1))
    }

    /// Swaps steps `j` and `j+1`; ids travel with their steps.
    pub(crate) fn swap_steps(&mut self, j: usize) {
        self.steps.swap(j, j + 1);
    }

    /// Inserts `first`, then its flip, of `s` at step positions `at`, `at+1`.
    pub(crate) fn insert_pair(&mut self, at: usize, first: Dir, s: Simplex) -> (StepId, StepId) {
        let a = self.fresh_id();
        let b = self.fresh_id();
        self.steps.insert(at, Step { id: a, dir: first, simplex: s.clone() });
        self.steps.insert(at + 1, Step { id: b, dir: first.flip(), simplex: s });
        (a, b)
    }

    pub(crate) fn remove_pair(&mut self, at: usize) {
        self.steps.drain(at..at + 2);
    }

    /// True iff all additions precede all deletions.
    pub fn is_up_down(&self) -> bool {
        match self.steps.iter().position(|s| s.dir == Dir::Delete) {
            None => true,
            Some(k) => self.steps[k..].iter().all(|s| s.dir == Dir::Delete),
        }
    }

    /// Index of the matching deletion for every addition and vice versa.
    pub fn partners(&self) -> Vec<usize> {
        let mut open: HashMap<&Simplex, usize> = HashMap::new();
        let mut out = vec![usize::MAX; self.len()];
        for (j, st) in self.steps.iter().enumerate() {
            match st.dir {
                Dir::Add => {
                    open.insert(&st.simplex, j);
                }
                Dir::Delete => {
                    if let Some(a) = open.remove(&st.simplex) {
                        out[a] = j;
                        out[j] = a;
                    }
                }
            }
        }
        out
    }
}

/// Position remap produced by an edit; positions are eagerly renumbered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Remap {
    Identity,
    /// Two steps inserted at step positions `at`, `at+1`.
    Expansion { at: usize },
    /// Step positions `at`, `at+1` removed.
    Contraction { at: usize },
}

impl Remap {
    pub fn renumber_after_edit(at: usize, delta: i32) -> Result<Remap> {
        match delta {
            2 => Ok(Remap::Expansion { at }),
            -2 => Ok(Remap::Contraction { at }),
            _ => Err(Error::contract("remap delta must be +2 or -2")),
        }
    }

    /// Old step position to new, `None` if removed.
    pub fn step(&self, j: usize) -> Option<usize> {
        match *self {
            Remap::Identity => Some(j),
            Remap::Expansion { at } => Some(if j >= at { j + 2 } else { j }),
            Remap::Contraction { at } => {
                if j < at {
                    Some(j)
                } else if j < at + 2 {
                    None
                } else {
                    Some(j - 2)
                }
            }
        }
    }

    /// Old complex index to new, `None` if merged away.
    pub fn index(&self, k: usize) -> Option<usize> {
        match *self {
            Remap::Identity => Some(k),
            Remap::Expansion { at } => Some(if k > at { k + 2 } else { k }),
            Remap::Contraction { at } => {
                if k <= at {
                    Some(k)
                } else if k <= at + 2 {
                    None
                } else {
                    Some(k - 2)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_tri() -> ZigzagFiltration {
        let a = Simplex::vertex(0);
        let b = Simplex::vertex(1);
        let ab = Simplex::new(vec![0, 1]).unwrap();
        ZigzagFiltration::from_steps([
            (Dir::Add, a.clone()),
            (Dir::Add, b.clone()),
            (Dir::Add, ab.clone()),
            (Dir::Delete, ab),
            (Dir::Delete, b),
            (Dir::Delete, a),
        ])
    }

    #[test]
    fn validate_reports_rules() {
        let a = Simplex::vertex(0);
        let b = Simplex::vertex(1);
        let ab = Simplex::new(vec![0, 1]).unwrap();
        assert!(ZigzagFiltration::from_steps([(Dir::Add, a.clone()), (Dir::Delete, a.clone())]).validate().is_ok());
        let v = ZigzagFiltration::from_steps([(Dir::Add, ab.clone())]).validate().unwrap_err();
        assert!(v.iter().any(|x| x.rule == "missing faces" && x.pos == 0));
        assert!(v.iter().any(|x| x.rule == "non-empty end"));
        let v = ZigzagFiltration::from_steps([
            (Dir::Add, a.clone()),
            (Dir::Add, b.clone()),
            (Dir::Add, ab),
            (Dir::Delete, b),
        ])
        .validate()
        .unwrap_err();
        assert!(v.iter().any(|x| x.rule == "coface present at delete" && x.pos == 3));
    }

    #[test]
    fn complex_at_replays() {
        let f = f_tri();
        assert_eq!(f.complex_at(3).unwrap().len(), 3);
        assert!(f.complex_at(0).unwrap().is_empty());
        assert!(f.complex_at(6).unwrap().is_empty());
        assert!(f.complex_at(7).is_err());
    }

    #[test]
    fn orders_on_f_tri() {
        let f = f_tri();
        assert!(f.birth_order_less(1, 2).unwrap());
        assert!(f.birth_order_less(4, 1).unwrap());
        assert!(f.death_order_less(2, 4).unwrap());
        assert!(f.death_order_less(5, 4).unwrap());
        assert!(f.birth_order_less(2, 2).is_err());
        assert!(f.interval_less((1, 5), (2, 2)).is_ok());
        assert!(!f.interval_less((1, 5), (1, 5)).unwrap());
        assert!(f.interval_less((1, 1), (2, 2)).is_err());
    }

    #[test]
    fn remap_round_trip() {
        let e = Remap::renumber_after_edit(3, 2).unwrap();
        let c = Remap::renumber_after_edit(3, -2).unwrap();
        for j in 0..10 {
            assert_eq!(c.step(e.step(j).unwrap()), Some(j));
            assert_eq!(c.index(e.index(j).unwrap()), Some(j));
        }
    }
}
