//! Scripts between filtrations, and random filtrations and scripts.
//!
//! Any valid filtration reaches the empty one: first make it up-down (inward
//! switches pull additions left, outward contractions cancel `-σ, +σ`), then
//! peel off the last-added simplex by moving its deletion next to it.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::{Complex, Simplex};
use crate::error::{Error, Result};
use crate::filtration::{Dir, ZigzagFiltration};
use crate::ops::{self, Op};

pub fn reduce_to_empty(f: &ZigzagFiltration) -> Result<Vec<Op>> {
    f.check()?;
    let mut g = f.clone();
    let mut script = Vec::new();
    let mut push = |g: &mut ZigzagFiltration, op: Op| -> Result<()> {
        ops::apply(g, &op)?;
        script.push(op);
        Ok(())
    };
    // Phase 1: up-down.
    while let Some(d0) = g.steps().iter().position(|s| s.dir == Dir::Delete) {
        let Some(a) = (d0..g.len()).find(|&j| g.is_add(j)) else { break };
        let op = if g.simplex(a - 1) == g.simplex(a) { Op::OutwardContraction(a - 1) } else { Op::InwardSwitch(a - 1) };
        push(&mut g, op)?;
    }
    // Phase 2: the last addition has no coface, so its deletion can move left.
    while !g.is_empty() {
        let n = g.steps().iter().filter(|s| s.dir == Dir::Add).count();
        let s = g.simplex(n - 1).clone();
        let mut j = (n..g.len()).find(|&j| *g.simplex(j) == s).expect("up-down filtration deletes every addition");
        while j > n {
            push(&mut g, Op::BackwardSwitch(j - 1))?;
            j -= 1;
        }
        push(&mut g, Op::InwardContraction(n - 1))?;
    }
    Ok(script)
}

/// A script taking `f1` to `f2` through the empty filtration.
pub fn transform(f1: &ZigzagFiltration, f2: &ZigzagFiltration) -> Result<Vec<Op>> {
    let mut script = reduce_to_empty(f1)?;
    let down = reduce_to_empty(f2)?;
    script.extend(ops::invert_script(f2, &down)?);
    Ok(script)
}

/// Limits for the random generators.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    /// Longest filtration an expansion may produce.
    pub max_len: usize,
    /// Vertices `0..vertices` and their faces up to `max_dim` join the
    /// simplices already in the filtration as expansion candidates.
    pub vertices: u32,
    pub max_dim: usize,
    /// Distinct simplices in a random filtration.
    pub max_simplices: usize,
}

impl Default for RandomSpec {
    fn default() -> RandomSpec {
        RandomSpec { max_len: 40, vertices: 4, max_dim: 2, max_simplices: 12 }
    }
}

/// All simplices on `0..n` of dimension at most `max_dim`, by dimension then
/// lexicographically.
pub fn skeleton(n: u32, max_dim: usize) -> Vec<Simplex> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = (0..n).map(|v| vec![v]).collect();
    for _ in 0..=max_dim {
        out.extend(layer.iter().map(|v| Simplex::new(v.clone()).expect("distinct vertices")));
        layer = layer
            .iter()
            .flat_map(|v| (v[v.len() - 1] + 1..n).map(move |w| [v.as_slice(), &[w]].concat()))
            .collect();
    }
    out
}

fn legal_at(g: &ZigzagFiltration, p: usize, universe: &[Simplex], spec: &RandomSpec, k: &Complex) -> Vec<Op> {
    let mut out = Vec::new();
    if p + 1 < g.len() {
        let op = match (g.dir(p), g.dir(p + 1)) {
            (Dir::Add, Dir::Add) => Op::ForwardSwitch(p),
            (Dir::Delete, Dir::Delete) => Op::BackwardSwitch(p),
            (Dir::Add, Dir::Delete) if g.simplex(p) == g.simplex(p + 1) => Op::InwardContraction(p),
            (Dir::Add, Dir::Delete) => Op::OutwardSwitch(p),
            (Dir::Delete, Dir::Add) if g.simplex(p) == g.simplex(p + 1) => Op::OutwardContraction(p),
            (Dir::Delete, Dir::Add) => Op::InwardSwitch(p),
        };
        if ops::check(g, &op).is_ok() {
            out.push(op);
        }
    }
    if g.len() + 2 <= spec.max_len {
        for s in universe {
            if k.contains(s) {
                if !k.iter().any(|t| s.is_proper_face_of(t)) {
                    out.push(Op::OutwardExpansion(p, s.clone()));
                }
            } else if s.facets().iter().all(|t| k.contains(t)) {
                out.push(Op::InwardExpansion(p, s.clone()));
            }
        }
    }
    out
}

/// `count` legal ops starting from `f`, each drawn uniformly from the legal
/// ops at a uniformly drawn position.
pub fn random_script(f: &ZigzagFiltration, count: usize, seed: u64) -> Result<Vec<Op>> {
    random_script_with(f, count, &mut ChaCha8Rng::seed_from_u64(seed), &RandomSpec::default())
}

pub fn random_script_with<R: Rng>(f: &ZigzagFiltration, count: usize, rng: &mut R, spec: &RandomSpec) -> Result<Vec<Op>> {
    f.check()?;
    let mut universe: BTreeSet<Simplex> = skeleton(spec.vertices, spec.max_dim).into_iter().collect();
    universe.extend(f.steps().iter().map(|s| s.simplex.clone()));
    let universe: Vec<Simplex> = universe.into_iter().collect();
    let mut g = f.clone();
    let mut script = Vec::with_capacity(count);
    for _ in 0..count {
        let mut order: Vec<usize> = (0..=g.len()).collect();
        order.shuffle(rng);
        let mut chosen = None;
        for p in order {
            let k = g.complex_at(p)?;
            let legal = legal_at(&g, p, &universe, spec, &k);
            if let Some(op) = legal.choose(rng) {
                chosen = Some(op.clone());
                break;
            }
        }
        let op = chosen.ok_or(Error::Exhausted)?;
        ops::apply(&mut g, &op)?;
        script.push(op);
    }
    Ok(script)
}

/// A random valid filtration: a walk over the skeleton that adds or deletes
/// one simplex per step, then empties the complex.
pub fn random_filtration<R: Rng>(rng: &mut R, spec: &RandomSpec) -> ZigzagFiltration {
    let universe = skeleton(spec.vertices.max(1), spec.max_dim);
    let mut f = ZigzagFiltration::new();
    let mut k: Complex = Complex::new();
    let mut used: BTreeSet<Simplex> = BTreeSet::new();
    let target = rng.gen_range(0..=spec.max_len);
    while f.len() + k.len() + 1 < target {
        let addable: Vec<&Simplex> = universe
            .iter()
            .filter(|s| !k.contains(*s) && s.facets().iter().all(|t| k.contains(t)))
            .filter(|s| used.contains(*s) || used.len() < spec.max_simplices)
            .collect();
        let deletable: Vec<&Simplex> = k.iter().filter(|s| !k.iter().any(|t| s.is_proper_face_of(t))).collect();
        let add = !addable.is_empty() && (deletable.is_empty() || rng.gen_bool(0.6));
        if add {
            let s = (*addable.choose(rng).expect("non-empty")).clone();
            used.insert(s.clone());
            k.insert(s.clone());
            f.push(Dir::Add, s);
        } else if let Some(&s) = deletable.choose(rng) {
            let s = s.clone();
            k.remove(&s);
            f.push(Dir::Delete, s);
        } else {
            break;
        }
    }
    // Highest dimension first keeps every deletion legal.
    let mut rest: Vec<Simplex> = k.into_iter().collect();
    rest.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| b.cmp(a)));
    for s in rest {
        f.push(Dir::Delete, s);
    }
    f
}

pub fn random_filtration_seeded(seed: u64, spec: &RandomSpec) -> ZigzagFiltration {
    random_filtration(&mut ChaCha8Rng::seed_from_u64(seed), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_tri() -> ZigzagFiltration {
        let v = |x: &[u32]| Simplex::new(x.to_vec()).unwrap();
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
    fn up_down_needs_no_phase_one() {
        let s = reduce_to_empty(&f_tri()).unwrap();
        assert!(s.iter().all(|op| matches!(op, Op::BackwardSwitch(_) | Op::InwardContraction(_))));
        assert!(ops::run(&f_tri(), &s).unwrap().is_empty());
    }

    #[test]
    fn empty_reduces_to_nothing() {
        assert!(reduce_to_empty(&ZigzagFiltration::new()).unwrap().is_empty());
    }

    #[test]
    fn skeleton_counts() {
        assert_eq!(skeleton(4, 2).len(), 14);
        assert_eq!(skeleton(3, 1).len(), 6);
    }

    #[test]
    fn random_filtrations_are_valid_and_reduce() {
        let spec = RandomSpec::default();
        for seed in 0..200 {
            let f = random_filtration_seeded(seed, &spec);
            f.check().unwrap();
            assert!(f.len() <= spec.max_len);
            let distinct: BTreeSet<_> = f.steps().iter().map(|s| s.simplex.clone()).collect();
            assert!(distinct.len() <= spec.max_simplices);
            let s = reduce_to_empty(&f).unwrap();
            assert!(ops::run(&f, &s).unwrap().is_empty());
        }
    }

    #[test]
    fn transform_lands_on_target() {
        let spec = RandomSpec::default();
        for seed in 0..50 {
            let f1 = random_filtration_seeded(seed, &spec);
            let f2 = random_filtration_seeded(seed + 1000, &spec);
            let s = transform(&f1, &f2).unwrap();
            assert_eq!(ops::run(&f1, &s).unwrap(), f2);
        }
    }

    #[test]
    fn random_script_is_reproducible_and_legal() {
        let f = f_tri();
        assert!(random_script(&f, 0, 1).unwrap().is_empty());
        let a = random_script(&f, 30, 7).unwrap();
        assert_eq!(a, random_script(&f, 30, 7).unwrap());
        ops::run(&f, &a).unwrap().check().unwrap();
    }
}
