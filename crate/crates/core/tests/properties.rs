//! Property tests for the invariants the engines rely on.

use proptest::prelude::*;
use zigzag_update::dpc;
use zigzag_update::fzz::{self, barcode_from_scratch};
use zigzag_update::io;
use zigzag_update::ops;
use zigzag_update::planner::{random_filtration_seeded, random_script, RandomSpec};
use zigzag_update::PersistenceState;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    /// Transposing keeps R = DV reduced and agrees with reducing the permuted
    /// boundary matrix from scratch.
    #[test]
    fn transpose_matches_rereduction(seed in 0u64..5000, picks in prop::collection::vec(0usize..1000, 1..40)) {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let d = fzz::convert(&f).unwrap();
        let mut r = fzz::reduce(&d);
        // order[k] = original cell now at position k.
        let mut order: Vec<usize> = (0..d.cells.len()).collect();
        for pick in picks {
            if order.len() < 2 {
                break;
            }
            let i = pick % (order.len() - 1);
            if r.is_face(i, i + 1) {
                prop_assert!(r.transpose(i).is_err());
                continue;
            }
            r.transpose(i).unwrap();
            order.swap(i, i + 1);
            prop_assert_eq!(r.check(), Ok(()));
            let mut at = vec![0; order.len()];
            for (k, &c) in order.iter().enumerate() {
                at[c] = k;
            }
            let mut fresh = fzz::ReducedMatrix::new();
            for &c in &order {
                let mut col: Vec<u32> = d.cells[c].boundary.iter().map(|&x| at[x] as u32).collect();
                col.sort_unstable();
                fresh.push(col);
            }
            prop_assert_eq!(r.pairs(), fresh.pairs());
        }
    }

    /// A script followed by its inverse restores the filtration, the barcode
    /// and a valid certificate.
    #[test]
    fn script_then_inverse_is_identity(seed in 0u64..5000, len in 1usize..30) {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let script = random_script(&f, len, seed.wrapping_mul(31)).unwrap();
        let back = ops::invert_script(&f, &script).unwrap();
        let mut st = PersistenceState::from_filtration(&f).unwrap();
        let want = st.barcode();
        for op in script.iter().chain(&back) {
            st.apply(op).unwrap();
        }
        prop_assert_eq!(st.filtration(), &f);
        prop_assert_eq!(st.barcode(), want);
        prop_assert!(st.certify().is_ok());
    }

    #[test]
    fn filtration_text_round_trips(seed in 0u64..5000) {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        prop_assert_eq!(io::parse_filtration(&io::format_filtration(&f)).unwrap(), f);
    }

    #[test]
    fn script_text_round_trips(seed in 0u64..5000, len in 0usize..30) {
        let f = random_filtration_seeded(seed, &RandomSpec::default());
        let script = random_script(&f, len, seed).unwrap();
        prop_assert_eq!(io::parse_script(&io::format_script(&script)).unwrap(), script);
    }

    #[test]
    fn points_text_round_trips(n in 1usize..6, samples in 1usize..6, seed in any::<u64>()) {
        let tr = dpc::random_trajectories(n, samples, seed);
        prop_assert_eq!(io::parse_points(&io::format_points(&tr)).unwrap(), tr);
    }

    /// Compiling the change between two band filtrations yields a legal
    /// script that lands exactly on the second; adjacent bands never need
    /// the generic fallback.
    #[test]
    fn compile_lands_on_target(seed in 0u64..500, a in 0usize..1000, b in 0usize..1000) {
        let tr = dpc::random_walk(5, 5, 0.2, seed);
        let events = dpc::detect_events(&tr).unwrap();
        let bands = dpc::band_thresholds(&dpc::critical_values(&events, 1e-9));
        let (i, j) = (a % bands.len(), b % bands.len());
        let old = dpc::build_band(&tr, 2, bands[i].2).unwrap();
        let new = dpc::build_band(&tr, 2, bands[j].2).unwrap();
        let (script, note) = dpc::compile(&old, &new).unwrap();
        prop_assert_eq!(ops::run(&old.filt, &script).unwrap(), new.filt.clone());
        if i.abs_diff(j) == 1 {
            prop_assert!(note.fallback.is_none(), "{:?}", note.fallback);
        }
        let mut st = PersistenceState::from_filtration(&old.filt).unwrap();
        for op in &script {
            st.apply(op).unwrap();
        }
        prop_assert_eq!(st.barcode(), barcode_from_scratch(&new.filt).unwrap());
    }
}
