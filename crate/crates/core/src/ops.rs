//! The eight atomic edits and their effect on a bare filtration.
//!
//! Every position is the 0-based step position before the edit. Switches and
//! contractions act on steps `P` and `P+1`; expansions insert two steps after
//! complex `K_P`, at step positions `P` and `P+1`.

use std::fmt;

use crate::chains::Simplex;
use crate::error::{Error, Result};
use crate::filtration::{Dir, Remap, ZigzagFiltration};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    ForwardSwitch(usize),
    BackwardSwitch(usize),
    OutwardSwitch(usize),
    InwardSwitch(usize),
    OutwardExpansion(usize, Simplex),
    InwardExpansion(usize, Simplex),
    OutwardContraction(usize),
    InwardContraction(usize),
}

impl Op {
    pub fn code(&self) -> &'static str {
        match self {
            Op::ForwardSwitch(_) => "fs",
            Op::BackwardSwitch(_) => "bs",
            Op::OutwardSwitch(_) => "os",
            Op::InwardSwitch(_) => "is",
            Op::OutwardExpansion(..) => "oe",
            Op::InwardExpansion(..) => "ie",
            Op::OutwardContraction(_) => "oc",
            Op::InwardContraction(_) => "ic",
        }
    }

    pub fn pos(&self) -> usize {
        match self {
            Op::ForwardSwitch(p)
            | Op::BackwardSwitch(p)
            | Op::OutwardSwitch(p)
            | Op::InwardSwitch(p)
            | Op::OutwardExpansion(p, _)
            | Op::InwardExpansion(p, _)
            | Op::OutwardContraction(p)
            | Op::InwardContraction(p) => *p,
        }
    }

    pub fn is_switch(&self) -> bool {
        matches!(self, Op::ForwardSwitch(_) | Op::BackwardSwitch(_) | Op::OutwardSwitch(_) | Op::InwardSwitch(_))
    }

    /// Net change in filtration length.
    pub fn delta(&self) -> isize {
        match self {
            Op::OutwardExpansion(..) | Op::InwardExpansion(..) => 2,
            Op::OutwardContraction(_) | Op::InwardContraction(_) => -2,
            _ => 0,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::OutwardExpansion(p, s) | Op::InwardExpansion(p, s) => write!(f, "{} {} {}", self.code(), p, s),
            _ => write!(f, "{} {}", self.code(), self.pos()),
        }
    }
}

fn pair_dirs(f: &ZigzagFiltration, p: usize) -> Option<(Dir, Dir)> {
    (p + 1 < f.len()).then(|| (f.dir(p), f.dir(p + 1)))
}

/// Checks that `op` is legal on `f`. Wrong step directions are contract
/// violations; the remaining failures are the op-specific legality errors.
pub fn check(f: &ZigzagFiltration, op: &Op) -> Result<()> {
    use Dir::{Add, Delete};
    let wrong = |want: &str| Error::contract(format!("{op}: steps are not {want}"));
    match op {
        Op::ForwardSwitch(p) => {
            if pair_dirs(f, *p) != Some((Add, Add)) {
                return Err(wrong("two additions"));
            }
            if f.simplex(*p).is_proper_face_of(f.simplex(p + 1)) {
                return Err(Error::switch(*p, "first simplex is a face of the second"));
            }
        }
        Op::BackwardSwitch(p) => {
            if pair_dirs(f, *p) != Some((Delete, Delete)) {
                return Err(wrong("two deletions"));
            }
            if f.simplex(p + 1).is_proper_face_of(f.simplex(*p)) {
                return Err(Error::switch(*p, "second simplex is a face of the first"));
            }
        }
        Op::OutwardSwitch(p) | Op::InwardSwitch(p) => {
            let want = if matches!(op, Op::OutwardSwitch(_)) { (Add, Delete) } else { (Delete, Add) };
            if pair_dirs(f, *p) != Some(want) {
                return Err(wrong(if want.0 == Add { "an addition then a deletion" } else { "a deletion then an addition" }));
            }
            if f.simplex(*p) == f.simplex(p + 1) {
                return Err(Error::switch(*p, "both steps touch the same simplex"));
            }
        }
        Op::OutwardContraction(p) | Op::InwardContraction(p) => {
            let want = if matches!(op, Op::OutwardContraction(_)) { (Delete, Add) } else { (Add, Delete) };
            if pair_dirs(f, *p) != Some(want) {
                return Err(wrong(if want.0 == Delete { "a deletion then an addition" } else { "an addition then a deletion" }));
            }
            if f.simplex(*p) != f.simplex(p + 1) {
                return Err(Error::contraction(*p, "steps touch different simplices"));
            }
        }
        Op::OutwardExpansion(p, s) | Op::InwardExpansion(p, s) => {
            if *p > f.len() {
                return Err(Error::contract(format!("{op}: position beyond the last complex")));
            }
            let k = f.complex_at(*p)?;
            if matches!(op, Op::OutwardExpansion(..)) {
                if !k.contains(s) {
                    return Err(Error::expansion(*p, format!("{s} is not in the complex")));
                }
                if k.iter().any(|t| s.is_proper_face_of(t)) {
                    return Err(Error::expansion(*p, format!("{s} has a coface in the complex")));
                }
            } else {
                if k.contains(s) {
                    return Err(Error::expansion(*p, format!("{s} is already in the complex")));
                }
                if s.facets().iter().any(|t| !k.contains(t)) {
                    return Err(Error::expansion(*p, format!("{s} is missing a face")));
                }
            }
        }
    }
    Ok(())
}

/// Checks and applies `op` to a bare filtration.
pub fn apply(f: &mut ZigzagFiltration, op: &Op) -> Result<Remap> {
    check(f, op)?;
    Ok(apply_unchecked(f, op))
}

pub(crate) fn apply_unchecked(f: &mut ZigzagFiltration, op: &Op) -> Remap {
    match op {
        Op::ForwardSwitch(p) | Op::BackwardSwitch(p) | Op::OutwardSwitch(p) | Op::InwardSwitch(p) => {
            f.swap_steps(*p);
            Remap::Identity
        }
        Op::OutwardExpansion(p, s) => {
            f.insert_pair(*p, Dir::Delete, s.clone());
            Remap::Expansion { at: *p }
        }
        Op::InwardExpansion(p, s) => {
            f.insert_pair(*p, Dir::Add, s.clone());
            Remap::Expansion { at: *p }
        }
        Op::OutwardContraction(p) | Op::InwardContraction(p) => {
            f.remove_pair(*p);
            Remap::Contraction { at: *p }
        }
    }
}

/// The edit undoing `op`, which must be legal on `before`.
pub fn inverse(before: &ZigzagFiltration, op: &Op) -> Op {
    match op {
        Op::ForwardSwitch(p) => Op::ForwardSwitch(*p),
        Op::BackwardSwitch(p) => Op::BackwardSwitch(*p),
        Op::OutwardSwitch(p) => Op::InwardSwitch(*p),
        Op::InwardSwitch(p) => Op::OutwardSwitch(*p),
        Op::OutwardExpansion(p, _) => Op::OutwardContraction(*p),
        Op::InwardExpansion(p, _) => Op::InwardContraction(*p),
        Op::OutwardContraction(p) => Op::OutwardExpansion(*p, before.simplex(*p).clone()),
        Op::InwardContraction(p) => Op::InwardExpansion(*p, before.simplex(*p).clone()),
    }
}

/// Runs `script` from `f` and returns the script leading back to `f`.
pub fn invert_script(f: &ZigzagFiltration, script: &[Op]) -> Result<Vec<Op>> {
    let mut cur = f.clone();
    let mut inv = Vec::with_capacity(script.len());
    for op in script {
        check(&cur, op)?;
        inv.push(inverse(&cur, op));
        apply_unchecked(&mut cur, op);
    }
    inv.reverse();
    Ok(inv)
}

/// Replays `script` on a copy of `f`.
pub fn run(f: &ZigzagFiltration, script: &[Op]) -> Result<ZigzagFiltration> {
    let mut cur = f.clone();
    for op in script {
        apply(&mut cur, op)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn tri() -> ZigzagFiltration {
        use Dir::*;
        ZigzagFiltration::from_steps([
            (Add, s(&[0])),
            (Add, s(&[1])),
            (Add, s(&[0, 1])),
            (Delete, s(&[0, 1])),
            (Delete, s(&[1])),
            (Delete, s(&[0])),
        ])
    }

    #[test]
    fn face_order_blocks_switches() {
        let f = tri();
        assert!(matches!(check(&f, &Op::ForwardSwitch(1)), Err(Error::IllegalSwitch { pos: 1, .. })));
        assert!(check(&f, &Op::ForwardSwitch(0)).is_ok());
        assert!(matches!(check(&f, &Op::BackwardSwitch(3)), Err(Error::IllegalSwitch { .. })));
        assert!(matches!(check(&f, &Op::OutwardSwitch(2)), Err(Error::IllegalSwitch { .. })));
        assert!(matches!(check(&f, &Op::InwardSwitch(2)), Err(Error::Contract(_))));
    }

    #[test]
    fn contraction_then_expansion_round_trips() {
        let f = tri();
        let script = [Op::InwardContraction(2), Op::OutwardExpansion(1, s(&[0])), Op::ForwardSwitch(2)];
        let inv = invert_script(&f, &script).unwrap();
        let g = run(&f, &script).unwrap();
        assert_eq!(g.check(), Ok(()));
        assert_eq!(run(&g, &inv).unwrap(), f);
    }

    #[test]
    fn expansion_legality() {
        let f = tri();
        assert!(matches!(check(&f, &Op::OutwardExpansion(3, s(&[0]))), Err(Error::IllegalExpansion { .. })));
        assert!(check(&f, &Op::OutwardExpansion(3, s(&[0, 1]))).is_ok());
        assert!(check(&f, &Op::InwardExpansion(1, s(&[0, 1]))).is_err());
        assert!(check(&f, &Op::InwardExpansion(0, s(&[7]))).is_ok());
    }
}
