//! Zigzag barcodes through a cone construction.
//!
//! A zigzag filtration `F` of length `m` becomes the non-zigzag cell filtration
//! `Ê`: the apex `ω` at position 0, a copy of every addition in order, then the
//! cone `ω·x` over the deleted copy of every deletion, latest deletion first.
//! Standard persistence of `Ê` pairs all cells but `ω`, and every pair maps
//! back to one interval of `F`.
//!
//! `FzzState` keeps the reduced matrix of `Ê` and updates it by adjacent
//! transpositions; outward expansions and contractions change which cells are
//! adjacent and are rejected.

pub mod matrix;

use std::collections::HashMap;

pub use matrix::ReducedMatrix;

use crate::barcode::{Barcode, Interval};
use crate::chains::{Registry, Simplex};
use crate::error::{Error, Result};
use crate::filtration::{Dir, Remap, StepId, ZigzagFiltration};
use crate::ops::{self, Op};
use crate::rep_updates::{basis, match_vines, OpResult, OpStats, VineEvent, VineKey};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellTag {
    Omega,
    /// `occurrence` counts earlier additions of the same simplex.
    Copy { simplex: Simplex, occurrence: usize },
    /// Cone over the cell at this position.
    Cone { of: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaCell {
    pub dim: usize,
    /// Positions of the facets in `Ê`.
    pub boundary: Vec<usize>,
    pub tag: CellTag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaFiltration {
    pub cells: Vec<DeltaCell>,
    /// Step of `F` -> position in `Ê`.
    pub phi: Vec<usize>,
    /// Position in `Ê` -> step of `F`; `None` for `ω`.
    pub phi_inv: Vec<Option<usize>>,
}

/// Position of every step: additions keep their order, deletions reverse it.
fn positions(f: &ZigzagFiltration) -> Vec<usize> {
    let m = f.len();
    let adds = (0..m).filter(|&j| f.is_add(j)).count();
    let mut phi = vec![0; m];
    let mut a = 0;
    for (j, slot) in phi.iter_mut().enumerate() {
        if f.is_add(j) {
            a += 1;
            *slot = a;
        }
    }
    let mut d = 0;
    for j in (0..m).rev() {
        if !f.is_add(j) {
            d += 1;
            phi[j] = adds + d;
        }
    }
    phi
}

fn inverse(phi: &[usize]) -> Vec<Option<usize>> {
    let mut inv = vec![None; phi.len() + 1];
    for (j, &x) in phi.iter().enumerate() {
        inv[x] = Some(j);
    }
    inv
}

/// Cone boundary: the base copy plus the cones over the copies of its facets.
/// A vertex cone is the edge from the copy to `ω`.
fn cone_boundary(copy: usize, facet_cones: impl Iterator<Item = usize>, vertex: bool) -> Vec<usize> {
    let mut b = vec![copy];
    if vertex {
        b.push(0);
    } else {
        b.extend(facet_cones);
    }
    b
}

pub fn convert(f: &ZigzagFiltration) -> Result<DeltaFiltration> {
    f.check()?;
    let m = f.len();
    let phi = positions(f);
    let partners = f.partners();
    let mut cells = vec![DeltaCell { dim: 0, boundary: Vec::new(), tag: CellTag::Omega }; m + 1];
    let mut live: HashMap<&Simplex, usize> = HashMap::new();
    let mut occ: HashMap<&Simplex, usize> = HashMap::new();
    for j in 0..m {
        let s = f.simplex(j);
        let facets = s.facets();
        if f.is_add(j) {
            let boundary = facets.iter().map(|t| phi[live[t]]).collect();
            let n = occ.entry(s).or_insert(0);
            cells[phi[j]] = DeltaCell {
                dim: s.dim(),
                boundary,
                tag: CellTag::Copy { simplex: s.clone(), occurrence: *n },
            };
            *n += 1;
            live.insert(s, j);
        } else {
            let a = live.remove(s).expect("validated");
            let copy = phi[a];
            let cones = facets.iter().map(|t| phi[partners[live[t]]]);
            cells[phi[j]] = DeltaCell {
                dim: s.dim() + 1,
                boundary: cone_boundary(copy, cones, s.dim() == 0),
                tag: CellTag::Cone { of: copy },
            };
        }
    }
    let phi_inv = inverse(&phi);
    Ok(DeltaFiltration { cells, phi, phi_inv })
}

pub fn reduce(d: &DeltaFiltration) -> ReducedMatrix {
    let mut r = ReducedMatrix::new();
    for c in &d.cells {
        r.push(c.boundary.iter().map(|&x| x as u32).collect());
    }
    r
}

/// Interval of `F` for one pair of `Ê`, with its creator and destroyer steps.
fn map_pair(f: &ZigzagFiltration, phi_inv: &[Option<usize>], a: usize, b: usize) -> (Interval, usize, usize) {
    let ja = phi_inv[a].expect("ω is never paired");
    let jb = phi_inv[b].expect("ω is never paired");
    let (lo, hi) = (ja.min(jb), ja.max(jb));
    let p = f.simplex(lo).dim();
    // A deletion that creates gives a class one dimension down.
    let dim = if f.is_add(lo) { p } else { p - 1 };
    (Interval::new(dim, lo + 1, hi), lo, hi)
}

pub fn map_intervals(f: &ZigzagFiltration, d: &DeltaFiltration, r: &ReducedMatrix) -> Barcode {
    Barcode::from_intervals(r.pairs().into_iter().map(|(a, b)| map_pair(f, &d.phi_inv, a, b).0).collect())
}

/// The reference barcode: convert, reduce, map back.
pub fn barcode_from_scratch(f: &ZigzagFiltration) -> Result<Barcode> {
    let d = convert(f)?;
    let r = reduce(&d);
    Ok(map_intervals(f, &d, &r))
}

/// For every step, whether it opens an interval. Brute force: an addition
/// creates iff its boundary already bounds; a deletion creates iff its
/// boundary stops bounding.
pub fn classify_steps(f: &ZigzagFiltration) -> Result<Vec<bool>> {
    f.check()?;
    let mut reg = Registry::new();
    let ids: Vec<_> = f.steps().iter().map(|st| reg.intern(&st.simplex)).collect();
    let mut k = crate::chains::IdSet::new();
    let mut out = Vec::with_capacity(f.len());
    for (j, &s) in ids.iter().enumerate() {
        let p = reg.dim(s);
        let add = f.is_add(j);
        if !add {
            k.remove(s);
        }
        let creator = if p == 0 {
            add
        } else {
            let bounds = basis::solve(&reg, &k, p - 1, &[], &reg.boundary(s)).is_some();
            bounds == add
        };
        if add {
            k.insert(s);
        }
        out.push(creator);
    }
    Ok(out)
}

/// Barcode maintained on `Ê` by transpositions.
#[derive(Clone, Debug)]
pub struct FzzState {
    filt: ZigzagFiltration,
    mat: ReducedMatrix,
    phi: Vec<usize>,
    phi_inv: Vec<Option<usize>>,
    vines: Vec<VineKey>,
    next_vine: u64,
    transpositions: u64,
}

impl Default for FzzState {
    fn default() -> FzzState {
        FzzState::new()
    }
}

impl FzzState {
    pub fn new() -> FzzState {
        let mut mat = ReducedMatrix::new();
        mat.push(Vec::new());
        FzzState {
            filt: ZigzagFiltration::new(),
            mat,
            phi: Vec::new(),
            phi_inv: vec![None],
            vines: Vec::new(),
            next_vine: 0,
            transpositions: 0,
        }
    }

    pub fn from_filtration(f: &ZigzagFiltration) -> Result<FzzState> {
        let d = convert(f)?;
        let mat = reduce(&d);
        let mut st = FzzState {
            filt: f.clone(),
            mat,
            phi: d.phi,
            phi_inv: d.phi_inv,
            vines: Vec::new(),
            next_vine: 0,
            transpositions: 0,
        };
        st.rematch();
        // Fresh vines are numbered in interval order.
        st.vines.sort_by_key(|k| k.1);
        for (v, k) in st.vines.iter_mut().enumerate() {
            k.0 = v as u64;
        }
        Ok(st)
    }

    pub fn filtration(&self) -> &ZigzagFiltration {
        &self.filt
    }

    pub fn matrix(&self) -> &ReducedMatrix {
        &self.mat
    }

    /// Transpositions performed over the state's lifetime.
    pub fn transpositions(&self) -> u64 {
        self.transpositions
    }

    pub fn barcode(&self) -> Barcode {
        Barcode::from_intervals(self.vines.iter().map(|k| k.1).collect())
    }

    pub fn vine_barcode(&self) -> Vec<(Interval, u64)> {
        let mut v: Vec<_> = self.vines.iter().map(|k| (k.1, k.0)).collect();
        v.sort_unstable();
        v
    }

    fn keyed(&self) -> Vec<(Interval, StepId, StepId)> {
        self.mat
            .pairs()
            .into_iter()
            .map(|(a, b)| {
                let (iv, lo, hi) = map_pair(&self.filt, &self.phi_inv, a, b);
                (iv, self.filt.step(lo).id, self.filt.step(hi).id)
            })
            .collect()
    }

    fn rematch(&mut self) -> Vec<VineEvent> {
        let now = self.keyed();
        let (ids, events) = match_vines(&self.vines, &now, None, &mut self.next_vine);
        self.vines = now.into_iter().zip(ids).map(|((iv, c, d), v)| (v, iv, c, d)).collect();
        events
    }

    fn transpose(&mut self, pos: usize) -> Result<()> {
        self.transpositions += 1;
        self.mat.transpose(pos)
    }

    pub fn apply(&mut self, op: &Op) -> Result<OpResult> {
        if let Op::OutwardExpansion(p, _) | Op::OutwardContraction(p) = op {
            return Err(Error::UnsupportedOnFzzPath { op: op.code(), pos: *p });
        }
        ops::check(&self.filt, op)?;
        let t0 = self.transpositions;
        let a0 = self.mat.column_adds();
        let remap = match op {
            Op::ForwardSwitch(p) => {
                self.transpose(self.phi[*p])?;
                Remap::Identity
            }
            Op::BackwardSwitch(p) => {
                self.transpose(self.phi[p + 1])?;
                Remap::Identity
            }
            // Ê is untouched; only the step <-> cell maps change.
            Op::OutwardSwitch(_) | Op::InwardSwitch(_) => Remap::Identity,
            Op::InwardExpansion(p, s) => {
                self.insert_pair(*p, s)?;
                Remap::Expansion { at: *p }
            }
            Op::InwardContraction(p) => {
                self.remove_pair(*p)?;
                Remap::Contraction { at: *p }
            }
            Op::OutwardExpansion(..) | Op::OutwardContraction(_) => unreachable!(),
        };
        ops::apply_unchecked(&mut self.filt, op);
        match op {
            Op::OutwardSwitch(p) | Op::InwardSwitch(p) => {
                let (x, y) = (self.phi[*p], self.phi[p + 1]);
                self.phi.swap(*p, p + 1);
                self.phi_inv.swap(x, y);
            }
            Op::InwardExpansion(..) | Op::InwardContraction(_) => {
                self.phi = positions(&self.filt);
                self.phi_inv = inverse(&self.phi);
            }
            _ => {}
        }
        debug_assert_eq!(self.phi, positions(&self.filt));
        let vines = self.rematch();
        Ok(OpResult {
            remap,
            vines,
            stats: OpStats {
                touched: (self.transpositions - t0) as usize,
                merges: self.mat.column_adds() - a0,
                solves: 0,
            },
        })
    }

    /// Appends `σ̂` and `ω·σ̂`, then walks each to its place.
    fn insert_pair(&mut self, at: usize, s: &Simplex) -> Result<()> {
        let f = &self.filt;
        let partners = f.partners();
        let mut live: HashMap<&Simplex, usize> = HashMap::new();
        for j in 0..at {
            match f.dir(j) {
                Dir::Add => live.insert(f.simplex(j), j),
                Dir::Delete => live.remove(f.simplex(j)),
            };
        }
        let facets = s.facets();
        let copy_faces: Vec<u32> = facets.iter().map(|t| self.phi[live[t]] as u32).collect();
        let n = self.mat.len();
        let cones = facets.iter().map(|t| self.phi[partners[live[t]]]);
        let cone: Vec<u32> = cone_boundary(n, cones, s.dim() == 0).into_iter().map(|x| x as u32).collect();
        let adds_before = (0..at).filter(|&j| f.is_add(j)).count();
        let adds = (0..f.len()).filter(|&j| f.is_add(j)).count();
        let dels_after = (at..f.len()).filter(|&j| !f.is_add(j)).count();
        self.mat.push(copy_faces);
        self.mat.push(cone);
        let copy_at = 1 + adds_before;
        for pos in (copy_at..n).rev() {
            self.transpose(pos)?;
        }
        let cone_at = 1 + (adds + 1) + dels_after;
        for pos in (cone_at..n + 1).rev() {
            self.transpose(pos)?;
        }
        Ok(())
    }

    /// Walks `ω·σ̂` then `σ̂` to the end and drops both.
    fn remove_pair(&mut self, at: usize) -> Result<()> {
        let (copy, cone) = (self.phi[at], self.phi[at + 1]);
        let n = self.mat.len();
        for pos in cone..n - 1 {
            self.transpose(pos)?;
        }
        for pos in copy..n - 2 {
            self.transpose(pos)?;
        }
        self.mat.pop();
        self.mat.pop();
        Ok(())
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

    pub fn inward_expansion(&mut self, i: usize, s: &Simplex) -> Result<OpResult> {
        self.apply(&Op::InwardExpansion(i, s.clone()))
    }

    pub fn inward_contraction(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::InwardContraction(api_pos(i)?))
    }

    /// Always `UnsupportedOnFzzPath`: the edit changes a facet of a cell.
    pub fn outward_expansion(&mut self, i: usize, s: &Simplex) -> Result<OpResult> {
        self.apply(&Op::OutwardExpansion(i, s.clone()))
    }

    pub fn outward_contraction(&mut self, i: usize) -> Result<OpResult> {
        self.apply(&Op::OutwardContraction(api_pos(i)?))
    }
}

fn api_pos(i: usize) -> Result<usize> {
    i.checked_sub(1).ok_or_else(|| Error::contract("position 0 has no preceding step"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[u32]) -> Simplex {
        Simplex::new(x.to_vec()).unwrap()
    }

    fn f_tri() -> ZigzagFiltration {
        ZigzagFiltration::from_steps([
            (Dir::Add, v(&[0])),
            (Dir::Add, v(&[1])),
            (Dir::Add, v(&[0, 1])),
            (Dir::Delete, v(&[0, 1])),
            (Dir::Delete, v(&[1])),
            (Dir::Delete, v(&[0])),
        ])
    }

    #[test]
    fn triangle_conversion() {
        let d = convert(&f_tri()).unwrap();
        assert_eq!(d.phi, vec![1, 2, 3, 6, 5, 4]);
        assert_eq!(d.cells[6].tag, CellTag::Cone { of: 3 });
        let mut b = d.cells[6].boundary.clone();
        b.sort_unstable();
        assert_eq!(b, vec![3, 4, 5]);
        assert_eq!(d.cells[4].boundary, vec![1, 0]);
    }

    #[test]
    fn triangle_barcode() {
        let b = barcode_from_scratch(&f_tri()).unwrap();
        let want = Barcode::from_intervals(vec![Interval::new(0, 1, 5), Interval::new(0, 2, 2), Interval::new(0, 4, 4)]);
        assert_eq!(b, want);
    }

    #[test]
    fn re_added_simplex_gets_second_copy() {
        let a = v(&[0]);
        let f = ZigzagFiltration::from_steps([(Dir::Add, a.clone()), (Dir::Delete, a.clone()), (Dir::Add, a.clone()), (Dir::Delete, a)]);
        let d = convert(&f).unwrap();
        let occ: Vec<usize> = d
            .cells
            .iter()
            .filter_map(|c| match c.tag {
                CellTag::Copy { occurrence, .. } => Some(occurrence),
                _ => None,
            })
            .collect();
        assert_eq!(occ, vec![0, 1]);
        assert_eq!(barcode_from_scratch(&f).unwrap().len(), 2);
    }

    #[test]
    fn empty_is_empty() {
        assert!(barcode_from_scratch(&ZigzagFiltration::new()).unwrap().is_empty());
    }

    #[test]
    fn outward_ops_rejected_with_position() {
        let mut st = FzzState::from_filtration(&f_tri()).unwrap();
        let e = st.apply(&Op::OutwardExpansion(3, v(&[0, 1]))).unwrap_err();
        assert_eq!(e, Error::UnsupportedOnFzzPath { op: "oe", pos: 3 });
        let e = st.apply(&Op::OutwardContraction(1)).unwrap_err();
        assert_eq!(e, Error::UnsupportedOnFzzPath { op: "oc", pos: 1 });
    }

    #[test]
    fn fzz_ops_match_scratch() {
        let mut st = FzzState::from_filtration(&f_tri()).unwrap();
        for op in [
            Op::InwardExpansion(3, v(&[2])),
            Op::ForwardSwitch(2),
            Op::OutwardSwitch(3),
            Op::InwardContraction(4),
            Op::BackwardSwitch(4),
        ] {
            st.apply(&op).unwrap();
            assert_eq!(st.matrix().check(), Ok(()));
            assert_eq!(st.barcode(), barcode_from_scratch(st.filtration()).unwrap(), "after {op}");
        }
    }
}
