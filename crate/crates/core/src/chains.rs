//! Simplices, Z2 chains and the boundary operator.
//!
//! Simplices are interned in a [`Registry`]; chains are sorted vectors of
//! [`SimplexId`] so that a sum is a linear merge.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// A simplex as a strictly increasing, non-empty vertex list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Simplex> {
        if vertices.is_empty() {
            return Err(Error::contract("simplex with no vertices"));
        }
        let sorted = vertices.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            vertices.sort_unstable();
            if vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::contract("simplex with a repeated vertex"));
            }
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: Vertex) -> Simplex {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-1 faces, empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|skip| {
                let v = self
                    .0
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &x)| x)
                    .collect();
                Simplex(v)
            })
            .collect()
    }

    /// True iff `self` is a proper face of `other`.
    pub fn is_proper_face_of(&self, other: &Simplex) -> bool {
        self.0.len() < other.0.len() && self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }

    /// True iff `self` ⊆ `other` as vertex sets.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }

    /// Parses the text form `v0 v1 ... vk`; vertices must be strictly increasing.
    pub fn parse(text: &str) -> Result<Simplex> {
        let mut v = Vec::new();
        for tok in text.split_whitespace() {
            let x: Vertex = tok
                .parse()
                .map_err(|_| Error::contract(format!("bad vertex id `{tok}`")))?;
            v.push(x);
        }
        if v.is_empty() {
            return Err(Error::contract("simplex with no vertices"));
        }
        if !v.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::contract("vertex ids must be strictly increasing"));
        }
        Ok(Simplex(v))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SimplexId(pub u32);

impl SimplexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Interns simplices. Ids are dense and assigned in first-seen order; every
/// face of an interned simplex is interned before it.
#[derive(Clone, Default, Debug)]
pub struct Registry {
    ids: HashMap<Simplex, SimplexId>,
    simplices: Vec<Simplex>,
    facets: Vec<Vec<SimplexId>>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn intern(&mut self, s: &Simplex) -> SimplexId {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let mut fs: Vec<SimplexId> = s.facets().iter().map(|f| self.intern(f)).collect();
        fs.sort_unstable();
        let id = SimplexId(self.simplices.len() as u32);
        self.ids.insert(s.clone(), id);
        self.simplices.push(s.clone());
        self.facets.push(fs);
        id
    }

    pub fn get(&self, s: &Simplex) -> Option<SimplexId> {
        self.ids.get(s).copied()
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id.idx()]
    }

    pub fn dim(&self, id: SimplexId) -> usize {
        self.simplices[id.idx()].dim()
    }

    /// Sorted facet ids.
    pub fn facets(&self, id: SimplexId) -> &[SimplexId] {
        &self.facets[id.idx()]
    }

    pub fn boundary(&self, id: SimplexId) -> Chain {
        let d = self.dim(id);
        Chain { dim: d.saturating_sub(1), ids: self.facets[id.idx()].clone() }
    }

    /// Boundary of a chain; a 0-chain has empty boundary.
    pub fn boundary_of(&self, c: &Chain) -> Chain {
        let mut acc: Vec<SimplexId> = Vec::with_capacity(c.ids.len() * (c.dim + 1));
        for &s in &c.ids {
            acc.extend_from_slice(self.facets(s));
        }
        Chain::from_unsorted(c.dim.saturating_sub(1), acc)
    }

    pub fn format_chain(&self, c: &Chain) -> String {
        let mut parts: Vec<String> = c.ids.iter().map(|&s| format!("{{{}}}", self.simplex(s))).collect();
        parts.sort();
        parts.join(" ")
    }
}

/// A Z2 chain: a set of simplices of one dimension.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Chain {
    pub dim: usize,
    ids: Vec<SimplexId>,
}

impl Chain {
    pub fn zero(dim: usize) -> Chain {
        Chain { dim, ids: Vec::new() }
    }

    pub fn single(dim: usize, s: SimplexId) -> Chain {
        Chain { dim, ids: vec![s] }
    }

    /// Builds a chain from ids with Z2 multiplicities (pairs cancel).
    pub fn from_unsorted(dim: usize, mut ids: Vec<SimplexId>) -> Chain {
        ids.sort_unstable();
        let mut out = Vec::with_capacity(ids.len());
        let mut k = 0;
        while k < ids.len() {
            let mut j = k;
            while j < ids.len() && ids[j] == ids[k] {
                j += 1;
            }
            if (j - k) % 2 == 1 {
                out.push(ids[k]);
            }
            k = j;
        }
        Chain { dim, ids: out }
    }

    pub fn ids(&self) -> &[SimplexId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, s: SimplexId) -> bool {
        self.ids.binary_search(&s).is_ok()
    }

    /// Largest id, the pivot of elimination.
    pub fn low(&self) -> Option<SimplexId> {
        self.ids.last().copied()
    }

    /// Symmetric difference. Dimensions must agree unless one side is empty.
    pub fn add(&self, other: &Chain) -> Chain {
        debug_assert!(
            self.dim == other.dim || self.is_empty() || other.is_empty(),
            "chain dimension mismatch {} vs {}",
            self.dim,
            other.dim
        );
        let dim = if self.is_empty() { other.dim } else { self.dim };
        Chain { dim, ids: sym_diff(&self.ids, &other.ids) }
    }

    pub fn add_assign(&mut self, other: &Chain) {
        if other.is_empty() {
            return;
        }
        if self.is_empty() {
            self.dim = other.dim;
        }
        self.ids = sym_diff(&self.ids, &other.ids);
    }

    /// Toggles one simplex.
    pub fn toggle(&mut self, s: SimplexId) {
        match self.ids.binary_search(&s) {
            Ok(k) => {
                self.ids.remove(k);
            }
            Err(k) => self.ids.insert(k, s),
        }
    }

    pub fn is_subset_of(&self, set: &IdSet) -> bool {
        self.ids.iter().all(|&s| set.contains(s))
    }
}

pub(crate) fn sym_diff(a: &[SimplexId], b: &[SimplexId]) -> Vec<SimplexId> {
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
    out
}

/// Strict sum: errors on a dimension mismatch.
pub fn chain_add(a: &Chain, b: &Chain) -> Result<Chain> {
    if a.dim != b.dim {
        return Err(Error::contract(format!("adding a {}-chain to a {}-chain", a.dim, b.dim)));
    }
    Ok(a.add(b))
}

pub fn boundary(reg: &Registry, s: SimplexId) -> Chain {
    reg.boundary(s)
}

pub fn chain_boundary(reg: &Registry, c: &Chain) -> Result<Chain> {
    if c.dim == 0 {
        return Err(Error::contract("boundary of a 0-chain"));
    }
    Ok(reg.boundary_of(c))
}

pub fn is_cycle(reg: &Registry, c: &Chain) -> bool {
    c.dim == 0 || reg.boundary_of(c).is_empty()
}

/// A set of simplices, closed under faces when it models a complex.
pub type Complex = BTreeSet<Simplex>;

/// Membership mask over registry ids.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct IdSet {
    mask: Vec<bool>,
    count: usize,
}

impl IdSet {
    pub fn new() -> IdSet {
        IdSet::default()
    }

    pub fn contains(&self, s: SimplexId) -> bool {
        self.mask.get(s.idx()).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, s: SimplexId) -> bool {
        if s.idx() >= self.mask.len() {
            self.mask.resize(s.idx() + 1, false);
        }
        let fresh = !self.mask[s.idx()];
        if fresh {
            self.mask[s.idx()] = true;
            self.count += 1;
        }
        fresh
    }

    pub fn remove(&mut self, s: SimplexId) -> bool {
        let had = self.contains(s);
        if had {
            self.mask[s.idx()] = false;
            self.count -= 1;
        }
        had
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| SimplexId(k as u32))
    }

    pub fn to_complex(&self, reg: &Registry) -> Complex {
        self.iter().map(|s| reg.simplex(s).clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn triangle_boundary_and_cancellation() {
        let mut reg = Registry::new();
        let abc = reg.intern(&sx(&[0, 1, 2]));
        let b = reg.boundary(abc);
        assert_eq!(b.len(), 3);
        assert_eq!(b.dim, 1);
        assert!(reg.boundary_of(&b).is_empty());
        let ab = reg.get(&sx(&[0, 1])).unwrap();
        let bc = reg.get(&sx(&[1, 2])).unwrap();
        let ca = reg.get(&sx(&[0, 2])).unwrap();
        let c1 = Chain::from_unsorted(1, vec![ab, bc]);
        let c2 = Chain::from_unsorted(1, vec![bc, ca]);
        assert_eq!(chain_add(&c1, &c2).unwrap(), Chain::from_unsorted(1, vec![ab, ca]));
        assert!(chain_add(&c1, &c1).unwrap().is_empty());
        let ends = chain_boundary(&reg, &c1).unwrap();
        assert_eq!(ends.len(), 2);
        assert!(!ends.contains(reg.get(&sx(&[1])).unwrap()));
    }

    #[test]
    fn vertex_boundary_is_empty_and_zero_chain_boundary_errors() {
        let mut reg = Registry::new();
        let a = reg.intern(&sx(&[3]));
        assert!(reg.boundary(a).is_empty());
        assert!(chain_boundary(&reg, &Chain::single(0, a)).is_err());
        assert!(is_cycle(&reg, &Chain::single(0, a)));
        assert!(is_cycle(&reg, &Chain::zero(1)));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        assert!(chain_add(&Chain::zero(1), &Chain::zero(2)).is_err());
    }

    #[test]
    fn parse_rejects_unsorted_and_empty() {
        assert!(Simplex::parse("0 2 5").is_ok());
        assert!(Simplex::parse("2 0").is_err());
        assert!(Simplex::parse("").is_err());
        assert!(Simplex::parse("1 1").is_err());
        assert_eq!(Simplex::parse("0 2 5").unwrap().to_string(), "0 2 5");
    }
}
