use std::time::Instant;
use crnkit::analysis::{simulate, StopWhen};
use crnkit::dexp::production_fragment;
use num_bigint::BigUint;

fn main() {
    let frag = production_fragment(3, "R");
    let h = frag.h_id();
    let x = frag.x_id();
    let init = frag.crn.config(&[(&frag.s_species, 1)]).unwrap();
    for seed in 0..2u64 {
        let t0 = Instant::now();
        let out = simulate(&frag.crn, &init, seed, 30_000_000_000, StopWhen::SpeciesAtLeast(h, 1)).unwrap();
        eprintln!(
            "seed {seed}: reason {:?} steps {} X={} ({:.0}s, {:.1} M/s)",
            out.reason,
            out.steps,
            out.final_config.get(x),
            t0.elapsed().as_secs_f64(),
            out.steps as f64 / t0.elapsed().as_secs_f64() / 1e6
        );
        assert_eq!(out.final_config.get(x), BigUint::from(256u32));
    }
}
