//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zigzag_update::dpc::{self, VineyardOptions};
use zigzag_update::fzz::{self, barcode_from_scratch, FzzState};
use zigzag_update::ops::{self, inverse};
use zigzag_update::planner::{self, random_filtration, random_filtration_seeded, random_script, RandomSpec};
use zigzag_update::{Barcode, Dir, Interval, Op, PersistenceState, Simplex, ZigzagFiltration};

const CORPUS: u64 = 1000;
const OPS: usize = 50;

type Verdict = Result<String, String>;

fn s(v: &[u32]) -> Simplex {
    Simplex::new(v.to_vec()).unwrap()
}

fn f_tri() -> ZigzagFiltration {
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

fn bars(v: &[(usize, usize, usize)]) -> Barcode {
    Barcode::from_intervals(v.iter().map(|&(d, b, e)| Interval::new(d, b, e)).collect())
}

/// Criteria 1 and 2 share one pass over the corpus.
fn corpus_pass() -> (Verdict, Verdict) {
    let t0 = Instant::now();
    let (mut cert_fail, mut oracle_fail, mut checked) = (Vec::new(), Vec::new(), 0usize);
    for seed in 0..CORPUS {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let script = match random_script(&f, OPS, seed ^ 0x5eed) {
            Ok(s) => s,
            Err(e) => {
                cert_fail.push(format!("seed {seed}: script: {e}"));
                continue;
            }
        };
        let mut st = match PersistenceState::from_filtration(&f) {
            Ok(st) => st,
            Err(e) => {
                cert_fail.push(format!("seed {seed}: build: {e}"));
                continue;
            }
        };
        if let Err(e) = st.certify() {
            cert_fail.push(format!("seed {seed}: initial: {e}"));
        }
        for (n, op) in script.iter().enumerate() {
            if let Err(e) = st.apply(op) {
                cert_fail.push(format!("seed {seed} op {n} {op}: {e}"));
                break;
            }
            checked += 1;
            if let Err(e) = st.certify() {
                cert_fail.push(format!("seed {seed} op {n} {op}: {e}"));
            }
            if barcode_from_scratch(st.filtration()).ok() != Some(st.barcode()) {
                oracle_fail.push(format!("seed {seed} op {n} {op}"));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let one = if cert_fail.is_empty() && secs < 120.0 {
        Ok(format!("{CORPUS} filtrations, {checked} ops certified in {secs:.1}s"))
    } else if cert_fail.is_empty() {
        Err(format!("certified but took {secs:.1}s (limit 120s)"))
    } else {
        Err(format!("{} failures, first: {}", cert_fail.len(), cert_fail[0]))
    };
    let two = if oracle_fail.is_empty() {
        Ok(format!("{checked} barcodes equal the oracle"))
    } else {
        Err(format!("{} mismatches, first: {}", oracle_fail.len(), oracle_fail[0]))
    };
    (one, two)
}

fn engine_agreement() -> Verdict {
    let (mut compared, mut rejected) = (0usize, 0usize);
    for seed in 0..CORPUS {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let script = random_script(&f, OPS, seed ^ 0xa9e).map_err(|e| e.to_string())?;
        let mut rep = PersistenceState::from_filtration(&f).map_err(|e| e.to_string())?;
        let mut fz = FzzState::from_filtration(&f).map_err(|e| e.to_string())?;
        for (n, op) in script.iter().enumerate() {
            let tag = |what: &str| format!("seed {seed} op {n} {op}: {what}");
            rep.apply(op).map_err(|e| tag(&e.to_string()))?;
            match op {
                Op::OutwardExpansion(..) | Op::OutwardContraction(_) => {
                    // Rejected twice in a row, untouched in between.
                    let before = fz.barcode();
                    if fz.apply(op).is_ok() || fz.apply(op).is_ok() || fz.barcode() != before {
                        return Err(tag("fzz accepted an outward expansion or contraction"));
                    }
                    rejected += 1;
                    fz = FzzState::from_filtration(rep.filtration()).map_err(|e| e.to_string())?;
                }
                _ => {
                    fz.apply(op).map_err(|e| tag(&e.to_string()))?;
                    if fz.barcode() != rep.barcode() {
                        return Err(tag("barcodes differ"));
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} ops agree, {rejected} oe/oc rejected"))
}

fn fixtures() -> Verdict {
    let f = f_tri();
    let bc = barcode_from_scratch(&f).map_err(|e| e.to_string())?;
    if bc != bars(&[(0, 1, 5), (0, 2, 2), (0, 4, 4)]) {
        return Err(format!("F_tri barcode {bc}"));
    }
    let mut st = PersistenceState::from_filtration(&f).map_err(|e| e.to_string())?;
    if st.barcode() != bc {
        return Err("F_tri: engine barcode differs".into());
    }
    st.apply(&Op::InwardContraction(2)).map_err(|e| e.to_string())?;
    st.certify().map_err(|e| e.to_string())?;
    if st.barcode() != bars(&[(0, 1, 3), (0, 2, 2)]) {
        return Err(format!("F_tri after ic 2: {}", st.barcode()));
    }
    // Contraction sites from the corpus, undone by the matching expansion.
    let mut sites = 0;
    let mut seed = 0;
    while sites < 20 && seed < 500 {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        seed += 1;
        let Ok(script) = random_script(&f, 30, seed) else { continue };
        let mut g = f.clone();
        for op in script {
            if matches!(op, Op::InwardContraction(_) | Op::OutwardContraction(_)) && sites < 20 {
                let mut st = PersistenceState::from_filtration(&g).map_err(|e| e.to_string())?;
                let want = st.barcode();
                let back = inverse(&g, &op);
                st.apply(&op).map_err(|e| e.to_string())?;
                st.apply(&back).map_err(|e| e.to_string())?;
                st.certify().map_err(|e| e.to_string())?;
                if *st.filtration() != g || st.barcode() != want {
                    return Err(format!("{op} then {back} is not the identity"));
                }
                sites += 1;
            }
            ops::apply(&mut g, &op).map_err(|e| e.to_string())?;
        }
    }
    if sites < 20 {
        return Err(format!("only {sites} contraction sites found"));
    }
    Ok(format!("F_tri fixtures hold, {sites} expansion-contraction round trips"))
}

fn universality() -> Verdict {
    let spec = RandomSpec::default();
    for seed in 0..100u64 {
        let f1 = random_filtration_seeded(seed, &spec);
        let f2 = random_filtration_seeded(seed + 10_000, &spec);
        let down = planner::reduce_to_empty(&f1).map_err(|e| format!("seed {seed}: {e}"))?;
        let end = ops::run(&f1, &down).map_err(|e| format!("seed {seed}: reduce: {e}"))?;
        if !end.is_empty() {
            return Err(format!("seed {seed}: reduce_to_empty left {} steps", end.len()));
        }
        let t = planner::transform(&f1, &f2).map_err(|e| format!("seed {seed}: {e}"))?;
        let mut st = PersistenceState::from_filtration(&f1).map_err(|e| e.to_string())?;
        for op in &t {
            st.apply(op).map_err(|e| format!("seed {seed}: transform {op}: {e}"))?;
        }
        if *st.filtration() != f2 {
            return Err(format!("seed {seed}: transform missed the target"));
        }
    }
    Ok("100 filtrations emptied and transformed".into())
}

fn theorem_mapping() -> Verdict {
    for seed in 0..CORPUS {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let d = fzz::convert(&f).map_err(|e| e.to_string())?;
        let r = fzz::reduce(&d);
        let pairs = r.pairs();
        let pers = barcode_from_scratch(&f).map_err(|e| e.to_string())?;
        if pairs.len() != pers.len() {
            return Err(format!("seed {seed}: {} pairs, {} intervals", pairs.len(), pers.len()));
        }
        let mut paired = vec![false; d.cells.len()];
        for (a, b) in pairs {
            paired[a] = true;
            paired[b] = true;
        }
        let unpaired: Vec<usize> = (0..paired.len()).filter(|&k| !paired[k]).collect();
        if unpaired != [0] {
            return Err(format!("seed {seed}: unpaired cells {unpaired:?}"));
        }
    }
    Ok(format!("{CORPUS} filtrations: pairs match intervals, only the cone vertex unpaired"))
}

fn vineyard_correctness() -> Verdict {
    let (mut bands, mut changes, mut fallbacks) = (0, 0, 0);
    let grid = 10_000;
    for seed in 0..6u64 {
        let tr = if seed % 2 == 0 { dpc::random_walk(8, 10, 0.15, seed) } else { dpc::random_trajectories(6, 6, seed) };
        let opts = VineyardOptions { check_every: 1, ..VineyardOptions::default() };
        let v = dpc::vineyard(&tr, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
        if v.stats.checked != v.bands.len() {
            return Err(format!("seed {seed}: {} of {} bands checked", v.stats.checked, v.bands.len()));
        }
        bands += v.bands.len();
        fallbacks += v.stats.fallbacks;
        // Squared critical values, ascending.
        let mut crit = dpc::critical_values(&v.events, opts.eps);
        crit.reverse();
        let top = crit.last().copied().unwrap_or(1.0).sqrt() * 1.1 + 0.1;
        let at = |k: usize| (top * k as f64 / grid as f64).powi(2);
        let mut prev = dpc::edge_signature(&tr, at(0)).map_err(|e| e.to_string())?;
        for k in 1..=grid {
            let cur = dpc::edge_signature(&tr, at(k)).map_err(|e| e.to_string())?;
            if cur != prev {
                changes += 1;
                let (lo, hi) = (at(k - 1), at(k));
                let slack = 1e-9 * hi.max(1.0);
                if !crit.iter().any(|&c| c >= lo - slack && c <= hi + slack) {
                    return Err(format!("seed {seed}: edge set changes in ({}, {}] with no event", lo.sqrt(), hi.sqrt()));
                }
            }
            prev = cur;
        }
    }
    Ok(format!("{bands} bands equal the oracle ({fallbacks} fallbacks), {changes} grid changes all explained"))
}

fn speedup() -> Verdict {
    let tr = dpc::random_walk(8, 20, 0.1, 0);
    let opts = VineyardOptions { time_from_scratch: true, ..VineyardOptions::default() };
    let v = dpc::vineyard(&tr, &opts).map_err(|e| e.to_string())?;
    let (up, fs) = (v.stats.t_update.as_secs_f64(), v.stats.t_from_scratch.as_secs_f64());
    let ratio = up / fs;
    let msg = format!(
        "ratio {ratio:.3} (update {up:.2}s, from scratch {fs:.2}s, {} bands, MLen {}, {} fallbacks)",
        v.bands.len(),
        v.stats.max_len,
        v.stats.fallbacks
    );
    if ratio <= 0.5 { Ok(msg) } else { Err(msg) }
}

/// A random filtration with length in `[0.9m, m]` over a skeleton large
/// enough that the simplex count grows with `m`.
fn sized_filtration(m: usize, seed: u64) -> ZigzagFiltration {
    let spec = RandomSpec { max_len: m, vertices: 16, max_dim: 2, max_simplices: m / 3 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let f = random_filtration(&mut rng, &spec);
        if f.len() * 10 >= m * 9 {
            return f;
        }
    }
}

fn median(mut v: Vec<Duration>) -> f64 {
    v.sort_unstable();
    v[v.len() / 2].as_secs_f64()
}

/// Median times of outward and inward switches at one size. Each outward
/// switch is undone by the inward switch at the same position.
fn switch_times(m: usize) -> Result<(f64, f64), String> {
    let (mut os, mut is) = (Vec::new(), Vec::new());
    for seed in 0..5u64 {
        let f = sized_filtration(m, seed);
        let mut st = PersistenceState::from_filtration(&f).map_err(|e| e.to_string())?;
        let sites: Vec<usize> = (0..f.len() - 1)
            .filter(|&p| ops::check(&f, &Op::OutwardSwitch(p)).is_ok())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..40 {
            let p = sites[rng.gen_range(0..sites.len())];
            let t = Instant::now();
            st.apply(&Op::OutwardSwitch(p)).map_err(|e| e.to_string())?;
            os.push(t.elapsed());
            let t = Instant::now();
            st.apply(&Op::InwardSwitch(p)).map_err(|e| e.to_string())?;
            is.push(t.elapsed());
        }
        if *st.filtration() != f {
            return Err("switch round trips drifted".into());
        }
    }
    Ok((median(os), median(is)))
}

fn scaling() -> Verdict {
    let sizes = [200, 400, 800];
    let mut t = Vec::new();
    for &m in &sizes {
        t.push(switch_times(m)?);
    }
    let os = t[2].0 / t[0].0;
    let is = t[2].1 / t[0].1;
    let line = sizes
        .iter()
        .zip(&t)
        .map(|(m, (o, i))| format!("m={m} os {:.1}us is {:.1}us", o * 1e6, i * 1e6))
        .collect::<Vec<_>>()
        .join(", ");
    // Quadrupling m: linear growth is 4x, quadratic 16x; factor 2 slack.
    let msg = format!("{line}; t800/t200 is {is:.2} (<= 8), os {os:.2} (<= 32)");
    if is <= 8.0 && os <= 32.0 { Ok(msg) } else { Err(msg) }
}

fn main() {
    let (one, two) = corpus_pass();
    let results: Vec<(usize, &str, Verdict)> = vec![
        (1, "certificates", one),
        (2, "oracle equality", two),
        (3, "engine agreement", engine_agreement()),
        (4, "fixtures", fixtures()),
        (5, "universality", universality()),
        (6, "cone pairing", theorem_mapping()),
        (7, "vineyard correctness", vineyard_correctness()),
        (8, "speedup", speedup()),
        (9, "switch scaling", scaling()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(m) => println!("PASS {n} {name}: {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL {n} {name}: {m}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
