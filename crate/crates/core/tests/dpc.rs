use zigzag_update::dpc::{random_trajectories, vineyard, VineyardOptions};

#[test]
fn random_clouds_track_scratch() {
    for seed in 0..6 {
        let tr = random_trajectories(6, 6, seed);
        let opts = VineyardOptions { check_every: 1, time_from_scratch: true, ..VineyardOptions::default() };
        let v = vineyard(&tr, &opts).unwrap();
        assert_eq!(v.stats.fallbacks, 0, "seed {seed}: {:?}", v.diagnostics);
        eprintln!("seed {seed}: {} bands, upd {:?} compile {:?} fs {:?} ops {:?}", v.bands.len(), v.stats.t_update, v.stats.t_compile, v.stats.t_from_scratch, v.stats.ops);
    }
}

#[test]
#[ignore]
fn desk_scale_timing() {
    for seed in 0..3 {
        let tr = random_trajectories(8, 20, seed);
        let opts = VineyardOptions { check_every: 97, time_from_scratch: true, ..VineyardOptions::default() };
        let v = vineyard(&tr, &opts).unwrap();
        assert_eq!(v.stats.fallbacks, 0, "seed {seed}: {:?}", v.diagnostics);
        eprintln!(
            "seed {seed}: {} bands maxlen {} upd {:?} compile {:?} fs {:?} ratio {:.3}",
            v.bands.len(),
            v.stats.max_len,
            v.stats.t_update,
            v.stats.t_compile,
            v.stats.t_from_scratch,
            v.stats.t_update.as_secs_f64() / v.stats.t_from_scratch.as_secs_f64()
        );
    }
}
