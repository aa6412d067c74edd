//! Douglas–Rachford iteration on the two-lines problem: the governing
//! sequence spirals into the origin at rate 1/√2 per step while the shadow
//! sequence J_A x_k converges to the solution of 0 ∈ Ax + Bx.
//!
//! Run with: cargo run -p drlab --example iteration_trace

use drlab::iterate::{run_dr, solution_set};
use drlab::linrel::LinearRelation;
use drlab::numerics::{vec_norm, Matrix};

fn main() {
    let a = LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![1.0]]));

    let trace = run_dr(&a, &b, &[1.0, 1.0], 100, 1e-14).unwrap();
    println!("first ten rows of the trace:");
    for (k, (x, s)) in trace
        .iterates
        .iter()
        .zip(&trace.shadows)
        .take(10)
        .enumerate()
    {
        let ratio = if k == 0 {
            "      —".to_string()
        } else {
            format!("{:.6}", vec_norm(x) / vec_norm(&trace.iterates[k - 1]))
        };
        println!(
            "  k = {k:<3} x = [{:+.6}, {:+.6}]  J_A x = [{:+.6}, {:+.6}]  ‖x_k‖/‖x_(k-1)‖ = {ratio}",
            x[0], x[1], s[0], s[1]
        );
    }
    println!("  1/√2 = {:.6}", std::f64::consts::FRAC_1_SQRT_2);

    println!(
        "\nconverged: {} after {} iterations",
        trace.converged, trace.iterations_used
    );
    let shadow = trace.shadow_limit.clone().unwrap();
    println!("shadow limit: [{:.3e}, {:.3e}]", shadow[0], shadow[1]);

    let z = solution_set(&a, &b, 1e-8).unwrap();
    println!(
        "solution set dimension: {} (the two lines only meet at 0)",
        z.dim()
    );
    println!(
        "distance of shadow limit to the solution set: {:.3e}",
        z.distance(&shadow)
    );

    println!("\nfull trace as CSV:\n{}", trace.to_csv());
}
