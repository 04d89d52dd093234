//! Z2 elimination over boundaries of a complex, with combination tracking.
//!
//! Columns are reduced by their largest simplex id. Boundary columns of the
//! `(p+1)`-simplices come first in id order, then caller-supplied generators
//! in the given order, so results are deterministic.

use std::cell::Cell;

use crate::chains::{sym_diff, Chain, IdSet, Registry, SimplexId};

thread_local! {
    static SOLVES: Cell<u64> = const { Cell::new(0) };
}

pub fn solve_count() -> u64 {
    SOLVES.with(|s| s.get())
}

struct Column {
    vec: Chain,
    /// `(p+1)`-simplices whose boundaries were summed in.
    witness: Vec<SimplexId>,
    /// Generator indices summed in.
    gens: Vec<usize>,
}

#[derive(Default)]
struct Reducer {
    cols: Vec<Column>,
    pivot: Vec<Option<usize>>,
}

impl Reducer {
    fn pivot_of(&self, s: SimplexId) -> Option<usize> {
        self.pivot.get(s.idx()).copied().flatten()
    }

    fn reduce(&self, col: &mut Column) {
        while let Some(low) = col.vec.low() {
            let Some(k) = self.pivot_of(low) else { break };
            let other = &self.cols[k];
            col.vec.add_assign(&other.vec);
            col.witness = sym_diff(&col.witness, &other.witness);
            col.gens = sym_diff_usize(&col.gens, &other.gens);
        }
    }

    /// Reduces and stores the column; returns true if it was independent.
    fn push(&mut self, mut col: Column) -> bool {
        self.reduce(&mut col);
        let Some(low) = col.vec.low() else { return false };
        if low.idx() >= self.pivot.len() {
            self.pivot.resize(low.idx() + 1, None);
        }
        self.pivot[low.idx()] = Some(self.cols.len());
        self.cols.push(col);
        true
    }
}

fn sym_diff_usize(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn boundary_columns(reg: &Registry, complex: &IdSet, p: usize) -> Reducer {
    let mut r = Reducer::default();
    for t in complex.iter() {
        if reg.dim(t) == p + 1 {
            r.push(Column { vec: reg.boundary(t), witness: vec![t], gens: Vec::new() });
        }
    }
    r
}

/// A maximal independent set of `p`-boundaries of `complex`, each with a
/// `(p+1)`-chain witness `w` such that `∂w` is the boundary.
pub fn boundary_basis(reg: &Registry, complex: &IdSet, p: usize) -> Vec<(Chain, Chain)> {
    let r = boundary_columns(reg, complex, p);
    r.cols
        .into_iter()
        .map(|c| {
            let w = Chain::from_unsorted(p + 1, c.witness);
            (reg.boundary_of(&w), w)
        })
        .collect()
}

/// Finds `Λ ⊆ gens` and `A ⊆ complex` with `target = Σ_Λ gens + ∂A`.
/// `A` is a `(p+1)`-chain; `Λ` is returned as sorted generator indices.
pub fn solve(reg: &Registry, complex: &IdSet, p: usize, gens: &[&Chain], target: &Chain) -> Option<(Vec<usize>, Chain)> {
    SOLVES.with(|s| s.set(s.get() + 1));
    let mut r = boundary_columns(reg, complex, p);
    for (j, g) in gens.iter().enumerate() {
        r.push(Column { vec: (*g).clone(), witness: Vec::new(), gens: vec![j] });
    }
    let mut t = Column { vec: target.clone(), witness: Vec::new(), gens: Vec::new() };
    r.reduce(&mut t);
    if !t.vec.is_empty() {
        return None;
    }
    Some((t.gens, Chain::from_unsorted(p + 1, t.witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Simplex;

    fn complex(reg: &mut Registry, simplices: &[&[u32]]) -> IdSet {
        let mut k = IdSet::new();
        for s in simplices {
            let id = reg.intern(&Simplex::new(s.to_vec()).unwrap());
            k.insert(id);
            for f in reg.facets(id).to_vec() {
                k.insert(f);
            }
        }
        k
    }

    #[test]
    fn hollow_triangle_has_no_1_boundaries() {
        let mut reg = Registry::new();
        let k = complex(&mut reg, &[&[0], &[1], &[2], &[0, 1], &[1, 2], &[0, 2]]);
        assert!(boundary_basis(&reg, &k, 1).is_empty());
    }

    #[test]
    fn full_triangle_basis_is_its_boundary() {
        let mut reg = Registry::new();
        let k = complex(&mut reg, &[&[0, 1, 2]]);
        let basis = boundary_basis(&reg, &k, 1);
        assert_eq!(basis.len(), 1);
        let abc = reg.get(&Simplex::new(vec![0, 1, 2]).unwrap()).unwrap();
        assert_eq!(basis[0].1.ids(), &[abc]);
        assert_eq!(basis[0].0.ids(), reg.boundary(abc).ids());
    }

    #[test]
    fn solve_uses_generators_when_needed() {
        let mut reg = Registry::new();
        let k = complex(&mut reg, &[&[0, 1], &[2]]);
        let a = reg.get(&Simplex::vertex(0)).unwrap();
        let b = reg.get(&Simplex::vertex(1)).unwrap();
        let c = reg.get(&Simplex::vertex(2)).unwrap();
        let za = Chain::single(0, a);
        let zc = Chain::single(0, c);
        let target = Chain::from_unsorted(0, vec![b, c]);
        let (lam, w) = solve(&reg, &k, 0, &[&za, &zc], &target).unwrap();
        assert_eq!(lam, vec![0, 1]);
        assert_eq!(w.len(), 1);
        assert!(solve(&reg, &k, 0, &[&za], &target).is_none());
    }
}
