//! Runs the five generators on the noisy 2-D synthetic function with their
//! tuned settings and prints mean test RMSE per method.
//!
//! cargo run --release --example compare_methods -- [trials] [seed]

use randfnn::datasets::TargetFunction;
use randfnn::generators::GeneratorConfig;
use randfnn::harness::{benchmark, BenchmarkEntry, SyntheticSetup};
use randfnn::Seed;

fn main() -> randfnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let seed = Seed(args.next().and_then(|a| a.parse().ok()).unwrap_or(1));

    let data = SyntheticSetup::standard(TargetFunction::Tf2).study::<f64>(0.2, seed)?;
    let entries = [
        BenchmarkEntry::new(GeneratorConfig::Fim, 800),
        BenchmarkEntry::new(GeneratorConfig::Oim { u: 3.0 }, 1000),
        BenchmarkEntry::new(GeneratorConfig::Rsm { r: 0.4, s: 30.0 }, 450),
        BenchmarkEntry::new(GeneratorConfig::Rarsm { alpha_min_deg: 55.0, alpha_max_deg: 70.0 }, 350),
        BenchmarkEntry::new(GeneratorConfig::Ddm { k: 34 }, 300),
    ];
    let result = benchmark(&data.train, &data.test, &entries, trials, seed)?;
    println!("{:<40} {:>6} {:>10} {:>10}", "generator", "m", "mean", "std");
    for row in &result.rows {
        match row.summary {
            Some(s) => println!("{:<40} {:>6} {:>10.4} {:>10.4}", row.entry.config.to_string(), row.entry.m, s.mean, s.std),
            None => println!("{:<40} {:>6} failed: {}", row.entry.config.to_string(), row.entry.m, row.error.as_deref().unwrap_or("all trials failed")),
        }
    }
    Ok(())
}
