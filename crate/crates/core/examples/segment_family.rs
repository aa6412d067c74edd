//! Segment families: blend two pairs of nonexpansive matrices and watch the
//! commutator. Each entry of the commutator is a quadratic in the blend
//! parameter, so a family whose start commutes and whose end does not can
//! commute at no more than one interior parameter.
//!
//! Run with: cargo run -p drlab --example segment_family

use drlab::drcalc::SegmentFamily;
use drlab::numerics::Matrix;

fn main() {
    // The built-in witness family: commuting start, non-commuting end, and
    // no interior commuting parameter at all.
    let fam = SegmentFamily::witness(2).unwrap();
    println!("witness family (n = 2):");
    for &l in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        println!(
            "  λ = {l:<5} ‖R_λ‖ = {:.12}  ‖S_λ‖ = {:.12}  ‖[R_λ,S_λ]‖ = {:.6}",
            fam.r_at(l).spectral_norm(),
            fam.s_at(l).spectral_norm(),
            fam.commutator_at(l).spectral_norm(),
        );
    }
    println!(
        "  commuting λ in (0,1): {:?}",
        fam.commuting_lambdas(1e-9).unwrap()
    );

    // Entry quadratics of the commutator.
    println!("\nnonzero commutator entry polynomials (c0 + c1·λ + c2·λ²):");
    for p in fam.commutator_polynomials() {
        if p.max_coeff() > 1e-12 {
            println!(
                "  entry ({},{}): c0 = {}, c1 = {}, c2 = {}",
                p.row, p.col, p.c0, p.c1, p.c2
            );
        }
    }

    // A family engineered to commute exactly at λ = 1/2.
    let engineered = SegmentFamily::new(
        Matrix::diagonal(&[1.0, -1.0]),
        Matrix::identity(2),
        Matrix::diagonal(&[-1.0, 1.0]),
        Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
    )
    .unwrap();
    println!(
        "\nengineered family: commuting λ in (0,1) = {:?}",
        engineered.commuting_lambdas(1e-9).unwrap()
    );
    for &l in &[0.25, 0.5, 0.75] {
        println!(
            "  ‖[R_λ,S_λ]‖ at λ = {l}: {:.6e}",
            engineered.commutator_at(l).spectral_norm()
        );
    }
}
