//! The classical two-lines feasibility problem in the plane: find a point in
//! the intersection of the lines R(1,0) and R(1,1), i.e. the origin.
//!
//! Both constraint operators are normal cones of subspaces, hence symmetric
//! (subdifferentials of indicator functions). Their Douglas–Rachford
//! operator nevertheless fails to be a proximal mapping: it is the resolvent
//! of a rotation generator, which no convex function produces.
//!
//! Run with: cargo run -p drlab --example two_lines

use drlab::drcalc::{dr_operator, is_proximal};
use drlab::linrel::{LinearRelation, DEFAULT_TOL};
use drlab::numerics::Matrix;

fn main() {
    let a = LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![0.0]]));
    let b = LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![1.0], vec![1.0]]));

    println!("A = normal cone of R(1,0), B = normal cone of R(1,1)");
    println!("J_A = {:?}", a.resolvent().unwrap().matrix());
    println!("J_B = {:?}", b.resolvent().unwrap().matrix());

    let diag = dr_operator(&a, &b).unwrap();
    println!("\nDouglas–Rachford operator T = {:?}", diag.t);
    println!("firmly nonexpansive: {}", diag.firmly_nonexpansive);
    println!("symmetric:           {}", diag.symmetric);
    println!("proximal mapping:    {}", diag.proximal);
    println!("is_proximal(T):      {}", is_proximal(&diag.t, DEFAULT_TOL));

    let c = diag
        .recovered_c
        .as_matrix()
        .expect("C is a matrix operator");
    println!("\nT is the resolvent of C = {c:?}");
    println!(
        "C is symmetric: {} — so T is a resolvent but not a proximal mapping",
        diag.recovered_c.is_symmetric(DEFAULT_TOL).unwrap()
    );
}
