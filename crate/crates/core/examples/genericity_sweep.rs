//! How often is the Douglas–Rachford operator of a random symmetric pair a
//! proximal mapping? On the line: always (every monotone operator there is a
//! subdifferential). In dimension two and up: essentially never — the
//! commuting pairs form a closed, nowhere dense set.
//!
//! Run with: cargo run -p drlab --example genericity_sweep

use drlab::lab::{genericity_sweep, SweepConfig};

fn main() {
    for n in [1, 2, 3] {
        let cfg = SweepConfig {
            n,
            trials: 2000,
            seed: 42,
            ..SweepConfig::default()
        };
        let records = genericity_sweep(&cfg).unwrap();
        let in_set = records.iter().filter(|r| r.in_proximal_set).count();
        let min_comm = records
            .iter()
            .map(|r| r.commutator_norm)
            .fold(f64::INFINITY, f64::min);
        println!(
            "n = {n}: {in_set}/{} pairs proximal (smallest commutator norm {min_comm:.3e})",
            records.len()
        );
    }

    println!();
    let cfg = SweepConfig {
        n: 3,
        trials: 5,
        seed: 7,
        ..SweepConfig::default()
    };
    println!("sample records (n = 3, seed 7):");
    print!(
        "{}",
        drlab::lab::sweep_csv_string(&genericity_sweep(&cfg).unwrap())
    );
}
