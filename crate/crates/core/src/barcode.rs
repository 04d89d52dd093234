//! Barcodes as sorted interval lists.

use std::fmt;

/// `[birth, death]` in complex indices, homology dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub dim: usize,
    pub birth: usize,
    pub death: usize,
}

impl Interval {
    pub fn new(dim: usize, birth: usize, death: usize) -> Interval {
        Interval { dim, birth, death }
    }
}

/// Intervals sorted by `(dim, birth, death)`; duplicates are impossible in a
/// simplex-wise zigzag since each index births at most one class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Barcode(Vec<Interval>);

impl Barcode {
    pub fn from_intervals(mut v: Vec<Interval>) -> Barcode {
        v.sort_unstable();
        Barcode(v)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Intervals in `self` but not `other`, then those in `other` only.
    pub fn diff(&self, other: &Barcode) -> (Vec<Interval>, Vec<Interval>) {
        let only = |a: &Barcode, b: &Barcode| a.0.iter().filter(|x| b.0.binary_search(x).is_err()).copied().collect();
        (only(self, other), only(other, self))
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for iv in &self.0 {
            writeln!(f, "{} {} {}", iv.dim, iv.birth, iv.death)?;
        }
        Ok(())
    }
}
