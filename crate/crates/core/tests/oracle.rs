//! Both engines against the from-scratch barcode on random filtrations and
//! random scripts.

use zigzag_update::fzz::{barcode_from_scratch, FzzState};
use zigzag_update::planner::{random_filtration_seeded, random_script, RandomSpec};
use zigzag_update::{Op, PersistenceState};

fn run_seed(seed: u64, ops: usize) -> Result<(), String> {
    let f = random_filtration_seeded(seed, &RandomSpec::default());
    let mut st = PersistenceState::from_filtration(&f).map_err(|e| format!("seed {seed}: build: {e}"))?;
    st.certify().map_err(|e| format!("seed {seed}: initial certify: {e}"))?;
    let mut fz = FzzState::from_filtration(&f).unwrap();
    let script = random_script(&f, ops, seed ^ 0x5eed).unwrap();
    for (n, op) in script.iter().enumerate() {
        let before = st.filtration().clone();
        let tag = || format!("seed {seed} op {n} `{op}` on {:?}", before.steps().iter().map(|s| format!("{}{}", if s.dir == zigzag_update::Dir::Add { "+" } else { "-" }, s.simplex)).collect::<Vec<_>>());
        st.apply(op).map_err(|e| format!("{}: {e}", tag()))?;
        st.certify().map_err(|e| format!("{}: certify: {e}", tag()))?;
        let want = barcode_from_scratch(st.filtration()).unwrap();
        if st.barcode() != want {
            return Err(format!("{}: barcode {:?} want {:?}", tag(), st.barcode(), want));
        }
        match op {
            Op::OutwardExpansion(..) | Op::OutwardContraction(_) => {
                assert!(fz.apply(op).is_err());
                fz = FzzState::from_filtration(st.filtration()).unwrap();
            }
            _ => {
                fz.apply(op).map_err(|e| format!("{}: fzz: {e}", tag()))?;
                fz.matrix().check().map_err(|e| format!("{}: fzz matrix: {e}", tag()))?;
                if fz.barcode() != want {
                    return Err(format!("{}: fzz barcode {:?} want {:?}", tag(), fz.barcode(), want));
                }
            }
        }
    }
    Ok(())
}

#[test]
fn engines_match_scratch() {
    let mut fails = Vec::new();
    for seed in 0..200 {
        if let Err(e) = run_seed(seed, 50) {
            fails.push(e);
        }
    }
    for e in fails.iter().take(5) {
        eprintln!("{e}");
    }
    assert!(fails.is_empty(), "{} failing seeds", fails.len());
}

#[test]
#[ignore]
fn corpus_stats() {
    let mut counts = std::collections::BTreeMap::new();
    let (mut len, mut bars, mut maxdim) = (0, 0, 0);
    for seed in 0..1000u64 {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        len += f.len();
        let b = barcode_from_scratch(&f).unwrap();
        bars += b.len();
        maxdim = maxdim.max(b.intervals().iter().map(|i| i.dim).max().unwrap_or(0));
        for op in random_script(&f, 50, seed).unwrap() {
            *counts.entry(op.code()).or_insert(0) += 1;
        }
    }
    eprintln!("avg len {} avg bars {} maxdim {maxdim} {counts:?}", len / 1000, bars / 1000);
    let mut fails = 0;
    for seed in 0..1000 {
        if let Err(e) = run_seed(seed, 60) {
            fails += 1;
            if fails < 4 { eprintln!("{e}"); }
        }
    }
    assert_eq!(fails, 0);
}
