//! A matrix is a proximal mapping exactly when it is firmly nonexpansive
//! (‖2T − I‖ ≤ 1) and symmetric. This example runs the decision procedure on
//! a few hand-picked matrices.
//!
//! Run with: cargo run -p drlab --example proximality_check

use drlab::drcalc::is_proximal;
use drlab::numerics::Matrix;

fn report(name: &str, t: &Matrix) {
    let fne = t
        .scale(2.0)
        .sub(&Matrix::identity(t.rows()))
        .spectral_norm();
    let sym = t.sub(&t.transpose()).spectral_norm();
    println!(
        "{name:<28} ‖2T−I‖ = {fne:<20.17} ‖T−Tᵀ‖ = {sym:<9.2e} proximal = {}",
        is_proximal(t, 1e-9)
    );
}

fn main() {
    // Resolvent of diag(1,2): the proximal mapping of a convex quadratic.
    report(
        "resolvent of diag(1,2)",
        &Matrix::diagonal(&[0.5, 1.0 / 3.0]),
    );

    // Orthogonal projector onto a line: prox of an indicator function.
    report(
        "projector onto R(1,1)",
        &Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]),
    );

    // Resolvent of the rotation generator: firmly nonexpansive but not
    // symmetric, hence not proximal.
    report(
        "resolvent of a rotation",
        &Matrix::from_rows(&[vec![0.5, -0.5], vec![0.5, 0.5]]),
    );

    // Scaled identity beyond the nonexpansive range.
    report("1.1 · identity", &Matrix::identity(2).scale(1.1));

    // Symmetric but indefinite beyond the firm bound.
    report("diag(1, -1/2)", &Matrix::diagonal(&[1.0, -0.5]));
}
