//! The proximal set is closed: approach a commuting pair through commuting
//! pairs and the limit's operator stays proximal. The probe blends each
//! resolvent toward the identity with weight 1/k, which preserves
//! commutation, and checks every term plus the limit.
//!
//! Run with: cargo run -p drlab --example closedness_probe

use drlab::lab::{closedness_probe, symmetric_relation_from_spectrum};
use drlab::numerics::Matrix;

fn main() {
    // Two diagonal resolvents commute, so the pair is in the proximal set.
    let a = symmetric_relation_from_spectrum(&Matrix::identity(3), &[0.2, 0.5, 0.9]);
    let b = symmetric_relation_from_spectrum(&Matrix::identity(3), &[0.7, 0.1, 0.4]);

    let report = closedness_probe(&a, &b, 10, 1e-8).unwrap();
    println!("k     dist to limit   commutator norm   in set");
    for s in &report.steps {
        println!(
            "{:<5} {:<15.6e} {:<17.3e} {}",
            s.k, s.dist_to_limit, s.commutator_norm, s.in_proximal_set
        );
    }
    println!("\nlimit operator proximal: {}", report.limit_proximal);
    println!("probe passed: {}", report.passed);
}
