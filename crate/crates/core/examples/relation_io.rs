//! Wire formats: matrices, relations, and operator diagnoses all have pinned
//! JSON forms, and sweeps/traces have pinned CSV layouts. This example
//! round-trips each one, the same way the `drlab` binary consumes and
//! produces them.
//!
//! Run with: cargo run -p drlab --example relation_io

use drlab::drcalc::dr_operator;
use drlab::linrel::LinearRelation;
use drlab::numerics::Matrix;

fn main() {
    let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
    let matrix_json = serde_json::to_string(&m).unwrap();
    println!("matrix JSON:\n  {matrix_json}");
    let m_back: Matrix = serde_json::from_str(&matrix_json).unwrap();
    assert_eq!(m, m_back, "matrix JSON round-trips bit-identically");

    let rel = LinearRelation::from_matrix(&m);
    let rel_json = serde_json::to_string(&rel).unwrap();
    println!("\nrelation JSON (graph basis is 2n×n, kind records provenance):\n  {rel_json}");
    let rel_back: LinearRelation = serde_json::from_str(&rel_json).unwrap();
    assert!(rel.same_graph(&rel_back, 1e-14));

    let axis = LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let diagonal =
        LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![1.0]]));
    let diag = dr_operator(&axis, &diagonal).unwrap();
    println!(
        "\noperator diagnosis JSON:\n{}",
        serde_json::to_string_pretty(&diag).unwrap()
    );
}
