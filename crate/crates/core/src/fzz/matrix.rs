//! `R = D·V` over Z2 with adjacent transpositions.
//!
//! Columns are sorted row positions. `V` stays upper unitriangular and `R`
//! keeps distinct lows; after any structural change the touched columns are
//! re-settled by adding earlier columns into later ones, which preserves both.

use crate::error::{Error, Result};

type Col = Vec<u32>;

fn xor_into(a: &mut Col, b: &[u32]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Relabels rows `i <-> i+1`; returns true if the column had either.
fn swap_rows(c: &mut Col, i: u32) -> bool {
    let a = c.binary_search(&i);
    let b = c.binary_search(&(i + 1));
    match (a, b) {
        (Ok(_), Ok(_)) => true,
        (Ok(k), Err(_)) => {
            c[k] = i + 1;
            true
        }
        (Err(_), Ok(k)) => {
            c[k] = i;
            true
        }
        _ => false,
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReducedMatrix {
    d: Vec<Col>,
    r: Vec<Col>,
    v: Vec<Col>,
    /// Row -> column whose low it is.
    pivot: Vec<Option<u32>>,
    low: Vec<Option<u32>>,
    adds: u64,
}

impl ReducedMatrix {
    pub fn new() -> ReducedMatrix {
        ReducedMatrix::default()
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Column additions performed so far.
    pub fn column_adds(&self) -> u64 {
        self.adds
    }

    pub fn low(&self, j: usize) -> Option<usize> {
        self.low[j].map(|x| x as usize)
    }

    pub fn is_face(&self, row: usize, col: usize) -> bool {
        self.d[col].binary_search(&(row as u32)).is_ok()
    }

    /// Appends a cell whose boundary rows are all earlier positions.
    pub fn push(&mut self, mut boundary: Vec<u32>) {
        boundary.sort_unstable();
        let j = self.d.len();
        debug_assert!(boundary.last().is_none_or(|&x| (x as usize) < j));
        self.d.push(boundary.clone());
        self.r.push(boundary);
        self.v.push(vec![j as u32]);
        self.pivot.push(None);
        self.low.push(None);
        self.settle(j);
    }

    /// Removes the last cell; it must not be a face of anything.
    pub fn pop(&mut self) {
        let j = self.d.len() - 1;
        if let Some(x) = self.low[j] {
            self.pivot[x as usize] = None;
        }
        self.d.pop();
        self.r.pop();
        self.v.pop();
        self.low.pop();
        debug_assert!(self.pivot[j].is_none());
        self.pivot.pop();
    }

    /// `(birth, death)` position pairs.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|j| self.low[j].map(|x| (x as usize, j))).collect()
    }

    fn add_col(&mut self, from: usize, to: usize) {
        debug_assert!(from < to);
        let (rf, vf) = (self.r[from].clone(), self.v[from].clone());
        xor_into(&mut self.r[to], &rf);
        xor_into(&mut self.v[to], &vf);
        self.adds += 1;
    }

    fn detach(&mut self, j: usize) {
        if let Some(x) = self.low[j].take() {
            if self.pivot[x as usize] == Some(j as u32) {
                self.pivot[x as usize] = None;
            }
        }
    }

    /// Reduces column `j` against the pivot table; a later column holding the
    /// same pivot is bumped and re-settled.
    fn settle(&mut self, j: usize) {
        let mut stack = vec![j];
        while let Some(j) = stack.pop() {
            self.detach(j);
            loop {
                let Some(&x) = self.r[j].last() else { break };
                match self.pivot[x as usize] {
                    None => {
                        self.pivot[x as usize] = Some(j as u32);
                        self.low[j] = Some(x);
                        break;
                    }
                    Some(c) if (c as usize) < j => self.add_col(c as usize, j),
                    Some(c) => {
                        let c = c as usize;
                        self.pivot[x as usize] = Some(j as u32);
                        self.low[j] = Some(x);
                        self.low[c] = None;
                        self.add_col(j, c);
                        stack.push(c);
                        break;
                    }
                }
            }
        }
    }

    /// Swaps the cells at positions `i` and `i+1`.
    pub fn transpose(&mut self, i: usize) -> Result<()> {
        if i + 1 >= self.len() {
            return Err(Error::contract(format!("transposition at {i} past the end")));
        }
        if self.is_face(i, i + 1) {
            return Err(Error::IllegalTransposition { pos: i });
        }
        let iu = i as u32;
        // Clear V[i][i+1] so the permuted V stays upper triangular.
        if self.v[i + 1].binary_search(&iu).is_ok() {
            self.add_col(i, i + 1);
        }
        let mut touched = vec![i, i + 1];
        for j in 0..self.len() {
            swap_rows(&mut self.d[j], iu);
            swap_rows(&mut self.v[j], iu);
            if swap_rows(&mut self.r[j], iu) && j != i && j != i + 1 {
                touched.push(j);
            }
        }
        self.d.swap(i, i + 1);
        self.r.swap(i, i + 1);
        self.v.swap(i, i + 1);
        self.pivot.swap(i, i + 1);
        self.low.swap(i, i + 1);
        // Pivot entries name columns; re-point the two swapped ones.
        for row in 0..self.pivot.len() {
            match self.pivot[row] {
                Some(c) if c == iu => self.pivot[row] = Some(iu + 1),
                Some(c) if c == iu + 1 => self.pivot[row] = Some(iu),
                _ => {}
            }
        }
        for &j in &touched {
            self.detach_stale(j, i);
        }
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            self.settle(j);
        }
        Ok(())
    }

    /// Drops the cached low of `j` and any pivot entry still naming it. After
    /// a row swap at `i` that entry sits at the old low or at `i`, `i+1`.
    fn detach_stale(&mut self, j: usize, i: usize) {
        let old = self.low[j].take().map(|x| x as usize);
        for row in old.into_iter().chain([i, i + 1]) {
            if self.pivot[row] == Some(j as u32) {
                self.pivot[row] = None;
            }
        }
    }

    /// Full consistency check, for tests.
    pub fn check(&self) -> std::result::Result<(), String> {
        let n = self.len();
        let mut seen = vec![false; n];
        for j in 0..n {
            if self.v[j].last() != Some(&(j as u32)) {
                return Err(format!("V column {j} is not unitriangular"));
            }
            let mut prod: Col = Vec::new();
            for &k in &self.v[j] {
                xor_into(&mut prod, &self.d[k as usize]);
            }
            if prod != self.r[j] {
                return Err(format!("R != DV at column {j}"));
            }
            if let Some(&x) = self.r[j].last() {
                if seen[x as usize] {
                    return Err(format!("duplicate low {x}"));
                }
                seen[x as usize] = true;
                if self.low[j] != Some(x) || self.pivot[x as usize] != Some(j as u32) {
                    return Err(format!("stale pivot bookkeeping at column {j}"));
                }
            } else if self.low[j].is_some() {
                return Err(format!("zero column {j} has a cached low"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Triangle: a b c ab bc ca abc.
    fn triangle() -> ReducedMatrix {
        let mut m = ReducedMatrix::new();
        for b in [vec![], vec![], vec![], vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4, 5]] {
            m.push(b);
        }
        m
    }

    #[test]
    fn triangle_pairs() {
        let m = triangle();
        assert_eq!(m.check(), Ok(()));
        assert_eq!(m.pairs(), vec![(1, 3), (2, 4), (5, 6)]);
    }

    #[test]
    fn transpositions_keep_invariants() {
        let mut m = triangle();
        m.transpose(0).unwrap();
        assert_eq!(m.check(), Ok(()));
        m.transpose(3).unwrap();
        assert_eq!(m.check(), Ok(()));
        m.transpose(4).unwrap();
        assert_eq!(m.check(), Ok(()));
        assert!(matches!(m.transpose(5), Err(Error::IllegalTransposition { pos: 5 })));
        assert!(matches!(m.transpose(2), Err(Error::IllegalTransposition { .. })));
    }
}
