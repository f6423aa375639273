//! Rough walk-length measurements for the heavy acceptance scenarios.

use std::time::Instant;

use crnkit::analysis::{simulate, ExploreCaps, StopWhen};
use crnkit::crn::Crn;
use crnkit::dexp::production_fragment;

fn main() {
    // ladder assembly: steps until C1 appears from b tokens
    for n in [4u32, 6, 8] {
        let b = 1u64 << n;
        let mut crn = Crn::new();
        crn.add_reversible_by_name(&[("R.I", 2)], &[(&format!("R.C{n}"), 1)]).unwrap();
        for m in (2..=n).rev() {
            let hi = format!("R.C{m}");
            let lo = format!("R.C{}", m - 1);
            crn.add_reversible_by_name(&[(&hi, 2)], &[(&lo, 1)]).unwrap();
        }
        let c1 = crn.species_id("R.C1").unwrap();
        let init = crn.config(&[("R.I", b)]).unwrap();
        let mut steps = Vec::new();
        let t0 = Instant::now();
        let trials = if n == 8 { 4 } else { 20 };
        for seed in 0..trials {
            let out = simulate(&crn, &init, seed, 4_000_000_000, StopWhen::SpeciesAtLeast(c1, 1)).unwrap();
            steps.push(out.steps);
        }
        let total: u64 = steps.iter().sum();
        let secs = t0.elapsed().as_secs_f64();
        steps.sort_unstable();
        eprintln!(
            "ladder b=2^{n}: median {} max {} steps, {:.1} Msteps/s",
            steps[steps.len() / 2],
            steps.last().unwrap(),
            total as f64 / secs / 1e6
        );
    }

    let _ = ExploreCaps::desk();
    // layer-k production runs
    for layer in [2u32, 3] {
        let frag = production_fragment(layer, "R");
        let h = frag.h_id();
        let init = frag.crn.config(&[(&frag.s_species, 1)]).unwrap();
        let trials = if layer == 3 { 3 } else { 20 };
        let mut steps = Vec::new();
        let t0 = Instant::now();
        for seed in 0..trials {
            let out = simulate(&frag.crn, &init, seed, 4_000_000_000, StopWhen::SpeciesAtLeast(h, 1)).unwrap();
            assert_eq!(out.reason, crnkit::analysis::StopReason::Stop);
            steps.push(out.steps);
        }
        let total: u64 = steps.iter().sum();
        let secs = t0.elapsed().as_secs_f64();
        steps.sort_unstable();
        eprintln!(
            "layer {layer}: median {} max {} steps, {:.1} Msteps/s ({} trials in {:.1}s)",
            steps[steps.len() / 2],
            steps.last().unwrap(),
            total as f64 / secs / 1e6,
            trials,
            secs
        );
    }
}
