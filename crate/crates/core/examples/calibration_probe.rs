//! Calibrates surfaces for a few sample sizes and prints the local level.
//!
//! `cargo run --release -p critsurf --example calibration_probe -- 392:19 517:22`

use std::time::Instant;

use critsurf::{calibrate_eta, CalibrationConfig, NullEnsemble};

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let reps = args
        .iter()
        .position(|a| a == "--reps")
        .map(|i| {
            let v = args[i + 1].parse().expect("--reps takes an integer");
            args.drain(i..=i + 1);
            v
        })
        .unwrap_or(CalibrationConfig::DEFAULT_REPLICATES);
    for spec in &args {
        let (n, k) = spec.split_once(':').expect("use n:k");
        let cfg = CalibrationConfig::new(n.parse().unwrap())
            .with_k(k.parse().unwrap())
            .with_replicates(reps)
            .with_seed(1);
        let start = Instant::now();
        let ens = NullEnsemble::generate(&cfg).unwrap();
        let generated = start.elapsed();
        let cs = calibrate_eta(&ens, 0.05).unwrap();
        println!(
            "n={} k={} reps={} eta={:.6} size={:.5} gen={:.1?} total={:.1?}",
            cfg.n,
            cfg.k,
            reps,
            cs.eta,
            cs.achieved_global_size,
            generated,
            start.elapsed()
        );
    }
}
