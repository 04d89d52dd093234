//! The four switches. `i` is the complex between the two swapped steps, so
//! the steps are `i-1` and `i`. Intervals not listed in a case keep their
//! indices; the uniform re-rooting of the others lives in the `*_step_one`
//! and `outward_middle` helpers.

use std::sync::Arc;

use super::{arc, defined, link_sum, zero, PersistenceState, Plan};
use crate::chains::{Chain, SimplexId};
use crate::error::{Error, Result};
use crate::reps::{prefix, suffix, sum_post_birth_any, sum_pre_death_any, RepSeq};

fn roles_err(kind: &str, i: usize) -> Error {
    Error::contract(format!("{kind} at {i}: the two steps are not each used by exactly one interval"))
}

impl PersistenceState {
    /// `+σ, +τ` becomes `+τ, +σ`.
    pub(crate) fn plan_forward_switch(&self, i: usize) -> Result<Plan> {
        let s = self.sid(i - 1);
        let mut plan = Plan::default();
        let out = match (self.find_birth(i), self.find_death(i - 1), self.find_birth(i + 1), self.find_death(i)) {
            // Births at i and i+1.
            (Some(x1), None, Some(x2), None) => {
                let (z1, mut z2) = (self.rep(x1).clone(), self.rep(x2).clone());
                let in_zp = z2.z(i + 1).contains(s);
                if in_zp && !self.death_less(z1.d, z2.d) {
                    // ζ2 keeps [i+1,d2]; the sum re-born one step earlier takes [i,d1].
                    let mut w = self.sum(&z1, &z2)?;
                    let zi = w.z(i + 1).clone();
                    w.extend_front(zi, Some(zero(w.p + 1)), None);
                    vec![(x1, w), (x2, z2)]
                } else {
                    if in_zp {
                        z2 = self.sum(&z1, &z2)?;
                    }
                    let n1 = suffix(&z1, i + 1)?;
                    let zp = z2.z(i + 1).clone();
                    z2.extend_front(zp, Some(zero(z2.p + 1)), None);
                    vec![(x1, n1), (x2, z2)]
                }
            }
            // Deaths at i-1 and i.
            (None, Some(x1), None, Some(x2)) => {
                let (z1, z2) = (self.rep(x1), self.rep(x2));
                let c = defined(z1.c(i - 1))?.clone();
                let sp = link_sum(z2.c(i - 1), z2.c(i))?;
                let long1 = || {
                    let mut n = z1.clone();
                    let zl = n.z(i - 1).clone();
                    n.extend_back(zl, Some(zero(n.p + 1)), Some(c.clone()));
                    n
                };
                if !sp.contains(s) {
                    let mut n2 = z2.clone();
                    n2.drop_back(Some(arc(sp)));
                    vec![(x1, long1()), (x2, n2)]
                } else {
                    let mut short = sum_post_birth_any(self.dirs(), &prefix(z1, i - 1)?, &prefix(z2, i - 1)?)?;
                    short.set_c(i - 1, Some(arc(c.add(&sp))));
                    if self.birth_less(z1.b, z2.b) {
                        vec![(x1, long1()), (x2, short)]
                    } else {
                        let mut n2 = prefix(z2, i - 1)?;
                        let zl = z2.z(i - 1).clone();
                        n2.extend_back(zl, Some(zero(n2.p + 1)), Some(arc(sp)));
                        vec![(x2, n2), (x1, short)]
                    }
                }
            }
            // Birth at i from ζ2, death at i of ζ1.
            (Some(x2), None, None, Some(x1)) => {
                let (z1, z2) = (self.rep(x1), self.rep(x2));
                if x1 == x2 || z1.b >= i || z2.d <= i {
                    return Err(Error::contract(format!("forward switch at {i}: unexpected point interval")));
                }
                let mut c = link_sum(z1.c(i - 1), z1.c(i))?;
                if c.contains(s) {
                    c.add_assign(z2.z(i));
                }
                let mut n1 = z1.clone();
                n1.drop_back(Some(arc(c)));
                vec![(x1, n1), (x2, suffix(z2, i + 1)?)]
            }
            // Death at i-1 of ζ1, birth at i+1 of ζ2.
            (None, Some(x1), Some(x2), None) => {
                let (z1, z2) = (self.rep(x1), self.rep(x2));
                let zp = z2.z(i + 1).clone();
                if zp.contains(s) {
                    let mut n1 = z1.clone();
                    let c = defined(z1.c(i - 1))?.add(&zp);
                    n1.set_c(i - 1, Some(arc(c)));
                    vec![(x1, n1)]
                } else {
                    let mut n1 = z1.clone();
                    let c = defined(z1.c(i - 1))?.clone();
                    let zl = n1.z(i - 1).clone();
                    n1.extend_back(zl, Some(zero(n1.p + 1)), Some(c));
                    let mut n2 = z2.clone();
                    n2.extend_front(zp, Some(zero(n2.p + 1)), None);
                    vec![(x1, n1), (x2, n2)]
                }
            }
            _ => return Err(roles_err("forward switch", i)),
        };
        finish(&mut plan, out);
        Ok(plan)
    }

    /// `-σ, -τ` becomes `-τ, -σ`.
    pub(crate) fn plan_backward_switch(&self, i: usize) -> Result<Plan> {
        let t = self.sid(i);
        let mut plan = Plan::default();
        let out = match (self.find_birth(i), self.find_death(i - 1), self.find_birth(i + 1), self.find_death(i)) {
            // Births at i (ζY) and i+1 (ζX).
            (Some(y), None, Some(x), None) => {
                let (zy, zx) = (self.rep(y), self.rep(x));
                let s = link_sum(zy.c(i - 1), zy.c(i))?;
                let cx = defined(zx.c(i))?.clone();
                let long_x = || {
                    let mut n = zx.clone();
                    let zf = n.z(i + 1).clone();
                    n.extend_front(zf, Some(zero(n.p + 1)), Some(cx.clone()));
                    n
                };
                if !s.contains(t) {
                    let mut ny = zy.clone();
                    ny.drop_front(Some(arc(s)));
                    vec![(x, long_x()), (y, ny)]
                } else {
                    let mut short = sum_pre_death_any(self.dirs(), &suffix(zx, i + 1)?, &suffix(zy, i + 1)?)?;
                    short.set_c(i, Some(arc(cx.add(&s))));
                    if self.death_less(zx.d, zy.d) {
                        vec![(x, long_x()), (y, short)]
                    } else {
                        let mut ny = suffix(zy, i + 1)?;
                        let zf = ny.z(i + 1).clone();
                        ny.extend_front(zf, Some(zero(ny.p + 1)), Some(arc(s)));
                        vec![(y, ny), (x, short)]
                    }
                }
            }
            // Deaths at i-1 (ζB) and i (ζA).
            (None, Some(bb), None, Some(a)) => {
                let (za, mut zb) = (self.rep(a).clone(), self.rep(bb).clone());
                let in_zb = zb.z(i - 1).contains(t);
                if in_zb && !self.birth_less(za.b, zb.b) {
                    let mut w = self.sum(&za, &zb)?;
                    let zl = w.z(i - 1).clone();
                    w.extend_back(zl, Some(zero(w.p + 1)), None);
                    vec![(a, w), (bb, zb)]
                } else {
                    if in_zb {
                        zb = self.sum(&za, &zb)?;
                    }
                    let na = prefix(&za, i - 1)?;
                    let zl = zb.z(i - 1).clone();
                    zb.extend_back(zl, Some(zero(zb.p + 1)), None);
                    vec![(a, na), (bb, zb)]
                }
            }
            // Birth at i of ζ1, death at i of ζ2.
            (Some(x1), None, None, Some(x2)) => {
                let (z1, z2) = (self.rep(x1), self.rep(x2));
                if x1 == x2 || z1.d <= i || z2.b >= i {
                    return Err(Error::contract(format!("backward switch at {i}: unexpected point interval")));
                }
                let mut c = link_sum(z1.c(i - 1), z1.c(i))?;
                if c.contains(t) {
                    c.add_assign(z2.z(i));
                }
                let mut n1 = z1.clone();
                n1.drop_front(Some(arc(c)));
                vec![(x1, n1), (x2, prefix(z2, i - 1)?)]
            }
            // Death at i-1 of ζ2, birth at i+1 of ζ1.
            (None, Some(x2), Some(x1), None) => {
                let (z1, z2) = (self.rep(x1), self.rep(x2));
                let zl = z2.z(i - 1).clone();
                let c1 = defined(z1.c(i))?.clone();
                if zl.contains(t) {
                    let mut n1 = z1.clone();
                    n1.set_c(i, Some(arc(c1.add(&zl))));
                    vec![(x1, n1)]
                } else {
                    let mut n1 = z1.clone();
                    let zf = n1.z(i + 1).clone();
                    n1.extend_front(zf, Some(zero(n1.p + 1)), Some(c1));
                    let mut n2 = z2.clone();
                    n2.extend_back(zl, Some(zero(n2.p + 1)), None);
                    vec![(x1, n1), (x2, n2)]
                }
            }
            _ => return Err(roles_err("backward switch", i)),
        };
        finish(&mut plan, out);
        Ok(plan)
    }

    /// `+σ, -τ` becomes `-τ, +σ`.
    pub(crate) fn plan_outward_switch(&self, i: usize) -> Result<Plan> {
        let (s, t) = (self.sid(i - 1), self.sid(i));
        let reg = self.reg();
        let mut out = Vec::new();
        for k in 0..self.n_bars() {
            let r = self.rep(k);
            let n = if r.b == i && r.d == i {
                if r.p == 0 {
                    return Err(Error::contract(format!("outward switch at {i}: point interval in dimension 0")));
                }
                let tc = Chain::single(r.p, t);
                let death = r.z(i).add(&tc);
                RepSeq::point(r.p - 1, i, arc(reg.boundary(t)), Some(arc(tc)), Some(arc(death)))
            } else if r.d == i {
                prefix(r, i - 1)?
            } else if r.b == i {
                suffix(r, i + 1)?
            } else if r.b == i + 1 {
                let c = defined(r.c(i))?;
                let mut n = r.clone();
                let zf = r.z(i + 1).clone();
                if !c.contains(s) {
                    n.extend_front(zf, Some(zero(r.p + 1)), Some(c.clone()));
                } else {
                    let sc = Chain::single(r.p + 1, s);
                    n.extend_front(arc(zf.add(&reg.boundary(s))), Some(arc(sc.clone())), Some(arc(c.add(&sc))));
                }
                n
            } else if r.d == i - 1 {
                let c = defined(r.c(i - 1))?;
                let mut n = r.clone();
                let zl = r.z(i - 1).clone();
                if !c.contains(t) {
                    n.extend_back(zl, Some(zero(r.p + 1)), Some(c.clone()));
                } else {
                    let tc = Chain::single(r.p + 1, t);
                    n.extend_back(arc(zl.add(&reg.boundary(t))), Some(arc(tc.clone())), Some(arc(c.add(&tc))));
                }
                n
            } else {
                continue;
            };
            out.push((k, n));
        }
        let mut plan = Plan::default();
        finish(&mut plan, out);
        Ok(plan)
    }

    /// `-σ, +τ` becomes `+τ, -σ`.
    pub(crate) fn plan_inward_switch(&self, i: usize) -> Result<Plan> {
        let mut out = Vec::new();
        for k in 0..self.n_bars() {
            let r = self.rep(k);
            let n = if r.b == i && r.d == i {
                let z = link_sum(r.c(i - 1), r.c(i))?;
                RepSeq::point(r.p + 1, i, arc(z), None, None)
            } else if r.d == i {
                let mut n = r.clone();
                n.drop_back(Some(arc(link_sum(r.c(i - 1), r.c(i))?)));
                n
            } else if r.b == i {
                let mut n = r.clone();
                n.drop_front(Some(arc(link_sum(r.c(i - 1), r.c(i))?)));
                n
            } else if r.b == i + 1 {
                let mut n = r.clone();
                let zf = r.z(i + 1).clone();
                n.extend_front(zf, Some(zero(r.p + 1)), None);
                n
            } else if r.d == i - 1 {
                let mut n = r.clone();
                let zl = r.z(i - 1).clone();
                n.extend_back(zl, Some(zero(r.p + 1)), None);
                n
            } else {
                continue;
            };
            out.push((k, n));
        }
        let mut plan = Plan::default();
        finish(&mut plan, out);
        Ok(plan)
    }
}

/// Switch results are final: the old intervals go and the new ones skip the
/// uniform re-rooting.
fn finish(plan: &mut Plan, out: Vec<(usize, RepSeq)>) {
    for (k, r) in out {
        if !plan.remove.contains(&k) {
            plan.remove.push(k);
        }
        plan.add_new.push(r);
    }
}

/// Re-rooting for intervals spanning a forward switch.
pub(crate) fn forward_step_one(r: &mut RepSeq, i: usize, s: SimplexId) {
    if r.b + 1 > i || r.d < i + 1 {
        return;
    }
    let (Some(c0), Some(c1)) = (r.c(i - 1).clone(), r.c(i).clone()) else { return };
    if c0.contains(s) || r.z(i).contains(s) {
        let zl = r.z(i - 1).clone();
        r.set_c(i - 1, Some(zero(r.p + 1)));
        r.set_z(i, zl);
        r.set_c(i, Some(arc(c0.add(&c1))));
    }
}

/// Mirror of [`forward_step_one`] for a backward switch.
pub(crate) fn backward_step_one(r: &mut RepSeq, i: usize, t: SimplexId) {
    if r.b + 1 > i || r.d < i + 1 {
        return;
    }
    let (Some(c0), Some(c1)) = (r.c(i - 1).clone(), r.c(i).clone()) else { return };
    if c1.contains(t) || r.z(i).contains(t) {
        let zn = r.z(i + 1).clone();
        r.set_c(i - 1, Some(arc(c0.add(&c1))));
        r.set_z(i, zn);
        r.set_c(i, Some(zero(r.p + 1)));
    }
}

/// Re-rooting for intervals with `b < i < d` across an outward switch.
pub(crate) fn outward_middle(r: &mut RepSeq, i: usize, s: SimplexId, t: SimplexId, ds: &Arc<Chain>) {
    if !(r.b < i && i < r.d) {
        return;
    }
    let (Some(c0), Some(c1)) = (r.c(i - 1).clone(), r.c(i).clone()) else { return };
    if !c0.contains(s) && !c1.contains(t) {
        return;
    }
    let sum = c0.add(&c1);
    if !sum.contains(s) {
        let zn = r.z(i + 1).clone();
        r.set_z(i, zn);
        r.set_c(i - 1, Some(arc(sum)));
        r.set_c(i, Some(zero(r.p + 1)));
    } else if !sum.contains(t) {
        let zl = r.z(i - 1).clone();
        r.set_z(i, zl);
        r.set_c(i - 1, Some(zero(r.p + 1)));
        r.set_c(i, Some(arc(sum)));
    } else {
        let sc = Chain::single(r.p + 1, s);
        r.set_z(i, arc(r.z(i + 1).add(ds)));
        r.set_c(i - 1, Some(arc(sum.add(&sc))));
        r.set_c(i, Some(arc(sc)));
    }
}
