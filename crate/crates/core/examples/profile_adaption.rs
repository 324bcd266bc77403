//! Timing and unbiased-capacity probe for the adaptive strategy.
//!
//! `cargo run --release --example profile_adaption -- <dim> <copies> <runs>`

use std::time::Instant;

use qudit_tomo::adaption::max_bias_entropy;
use qudit_tomo::harness::{run_indexed, ExperimentConfig, Strategy};

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer"))
        .collect();
    let (dim, copies, runs) = match args[..] {
        [d, n, r] => (d, n, r),
        _ => (6, 6, 100),
    };
    for strategy in [Strategy::Adaptive, Strategy::Random] {
        let cfg = ExperimentConfig {
            dimension: dim,
            copies,
            runs,
            strategy,
            ..ExperimentConfig::default()
        };
        let start = Instant::now();
        let mut final_f = 0.0;
        let mut unbiased_steps = vec![0usize; copies];
        for r in 0..runs {
            let run = run_indexed(&cfg, r).expect("run");
            final_f += run.fidelity_trace[copies - 1];
            for (nu, h) in run.h_trace.iter().enumerate() {
                if *h >= max_bias_entropy(nu, dim) - 1e-3 {
                    unbiased_steps[nu] += 1;
                }
            }
        }
        println!(
            "{strategy}: d={dim} N={copies} R={runs} mean F(N)={:.4} time/run={:.1} ms",
            final_f / runs as f64,
            start.elapsed().as_secs_f64() * 1e3 / runs as f64
        );
        println!("  runs unbiased at nu=0..: {unbiased_steps:?}");
    }
}
