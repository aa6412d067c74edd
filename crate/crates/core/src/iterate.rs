//! The Douglas–Rachford iteration `x_{k+1} = T x_k`, its shadow sequence
//! `J_A x_k`, the fixed-point subspace of T, and the solution set of
//! `0 ∈ Ax + Bx`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::drcalc;
use crate::error::Error;
use crate::linrel::LinearRelation;
use crate::numerics::{vec_norm, vec_sub, Matrix, RANK_TOL};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_STEP_TOL: f64 = 1e-12;

/// Record of one Douglas–Rachford run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationTrace {
    /// Governing sequence, starting with x₀.
    pub iterates: Vec<Vec<f64>>,
    /// Shadow sequence `J_A x_k`, aligned with `iterates`.
    pub shadows: Vec<Vec<f64>>,
    /// Whether the step-norm stopping rule fired before `max_iter`.
    pub converged: bool,
    pub limit: Option<Vec<f64>>,
    pub shadow_limit: Option<Vec<f64>>,
    /// Number of operator applications performed.
    pub iterations_used: usize,
}

impl IterationTrace {
    /// CSV with columns `iter,x_1..x_n,shadow_1..shadow_n,step_norm`; the
    /// step norm is empty on the first row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.iterates.first().map_or(0, Vec::len);
        write!(out, "iter")?;
        for i in 1..=n {
            write!(out, ",x_{i}")?;
        }
        for i in 1..=n {
            write!(out, ",shadow_{i}")?;
        }
        writeln!(out, ",step_norm")?;
        for (k, (x, s)) in self.iterates.iter().zip(&self.shadows).enumerate() {
            write!(out, "{k}")?;
            for v in x {
                write!(out, ",{v}")?;
            }
            for v in s {
                write!(out, ",{v}")?;
            }
            if k == 0 {
                writeln!(out, ",")?;
            } else {
                writeln!(out, ",{}", vec_norm(&vec_sub(x, &self.iterates[k - 1])))?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Runs the Douglas–Rachford iteration from `x0`, stopping when the step
/// norm drops to `tol` or after `max_iter` applications. Exhausting
/// `max_iter` is reported through `converged = false`, not an error.
pub fn run_dr(
    a: &LinearRelation,
    b: &LinearRelation,
    x0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<IterationTrace, Error> {
    assert!(max_iter >= 1, "run_dr: max_iter must be at least 1");
    assert!(tol > 0.0, "run_dr: tol must be positive");
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    if x0.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: x0.len(),
        });
    }
    let ja = a.resolvent()?;
    let jb = b.resolvent()?;
    let t = drcalc::dr_matrix(&ja, &jb)?;

    let mut iterates = vec![x0.to_vec()];
    let mut shadows = vec![ja.matrix().matvec(x0)];
    let mut converged = false;
    let mut iterations_used = 0;
    for _ in 0..max_iter {
        let current = iterates.last().expect("trace is nonempty");
        let next = t.matvec(current);
        let step = vec_norm(&vec_sub(&next, current));
        shadows.push(ja.matrix().matvec(&next));
        iterates.push(next);
        iterations_used += 1;
        if step <= tol {
            converged = true;
            break;
        }
    }
    let (limit, shadow_limit) = if converged {
        (iterates.last().cloned(), shadows.last().cloned())
    } else {
        (None, None)
    };
    Ok(IterationTrace {
        iterates,
        shadows,
        converged,
        limit,
        shadow_limit,
        iterations_used,
    })
}

/// Orthonormal basis of `Fix T = ker(T − I)` at tolerance `tol`.
pub fn fixed_point_subspace(t: &Matrix, tol: f64) -> Matrix {
    assert!(t.is_square(), "fixed_point_subspace: matrix must be square");
    t.sub(&Matrix::identity(t.rows())).kernel_basis(tol)
}

/// The solution subspace Z of `0 ∈ Ax + Bx`.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    /// Orthonormal columns spanning Z; zero columns when Z = {0}.
    pub basis: Matrix,
}

impl SolutionSet {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let px = if self.basis.cols() == 0 {
            vec![0.0; x.len()]
        } else {
            self.basis.matvec(&self.basis.transpose().matvec(x))
        };
        vec_norm(&vec_sub(x, &px))
    }
}

/// Residual of the membership condition `0 ∈ Ax + Bx` at `x`: how far
/// `[x; x; 0]` is from the range of the stacked graph-coefficient map
/// `(c_A, c_B) ↦ (U_A c_A, U_B c_B, W_A c_A + W_B c_B)`. A residual of zero
/// means some `w ∈ Ax` satisfies `−w ∈ Bx`.
pub fn sum_membership_residual(a: &LinearRelation, b: &LinearRelation, x: &[f64]) -> f64 {
    assert_eq!(a.n(), b.n());
    assert_eq!(x.len(), a.n());
    let n = a.n();
    let (ka, kb) = (a.graph_dim(), b.graph_dim());
    let mut g = Matrix::zeros(3 * n, ka + kb);
    let (ua, wa) = (a.point_block(), a.value_block());
    let (ub, wb) = (b.point_block(), b.value_block());
    for j in 0..ka {
        for i in 0..n {
            g.set(i, j, ua.get(i, j));
            g.set(2 * n + i, j, wa.get(i, j));
        }
    }
    for j in 0..kb {
        for i in 0..n {
            g.set(n + i, ka + j, ub.get(i, j));
            g.set(2 * n + i, ka + j, wb.get(i, j));
        }
    }
    let mut rhs = vec![0.0; 3 * n];
    rhs[..n].copy_from_slice(x);
    rhs[n..2 * n].copy_from_slice(x);
    let q = g.orthonormalize(RANK_TOL);
    let proj = if q.cols() == 0 {
        vec![0.0; 3 * n]
    } else {
        q.matvec(&q.transpose().matvec(&rhs))
    };
    vec_norm(&vec_sub(&rhs, &proj))
}

/// Computes Z two independent ways and cross-checks them:
///
/// 1. directly, as the x-projection of the kernel of the stacked constraints
///    `(x, w) ∈ gr A` and `(x, −w) ∈ gr B`;
/// 2. as `J_A(Fix T)` with T the Douglas–Rachford operator.
///
/// The two subspaces must agree within `tol` (projector difference), else
/// [`Error::InternalInconsistency`].
pub fn solution_set(
    a: &LinearRelation,
    b: &LinearRelation,
    tol: f64,
) -> Result<SolutionSet, Error> {
    assert!(tol > 0.0, "solution_set: tol must be positive");
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let n = a.n();

    // Route 1: (x, w) with [x; w] ⟂ (gr A)⊥ and [x; −w] ⟂ (gr B)⊥.
    let eye2n = Matrix::identity(2 * n);
    let pa_perp = eye2n.sub(&a.graph_projector());
    let pb_perp = eye2n.sub(&b.graph_projector());
    let flip = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            0.0
        } else if i < n {
            1.0
        } else {
            -1.0
        }
    });
    let constraints = Matrix::vstack(&[&pa_perp, &pb_perp.matmul(&flip)]);
    let pairs = constraints.kernel_basis(RANK_TOL);
    let x_block = Matrix::from_fn(n, pairs.cols(), |i, j| pairs.get(i, j));
    let direct = x_block.orthonormalize(RANK_TOL);

    // Route 2: shadow of the fixed-point subspace.
    let ja = a.resolvent()?;
    let jb = b.resolvent()?;
    let t = drcalc::dr_matrix(&ja, &jb)?;
    let fix = fixed_point_subspace(&t, RANK_TOL);
    let shadow = if fix.cols() == 0 {
        Matrix::zeros(n, 0)
    } else {
        ja.matrix().matmul(&fix).orthonormalize(RANK_TOL)
    };

    let p_direct = direct.matmul(&direct.transpose());
    let p_shadow = shadow.matmul(&shadow.transpose());
    let gap = p_direct.sub(&p_shadow).spectral_norm();
    if gap > tol {
        return Err(Error::InternalInconsistency {
            what: "direct solution set disagrees with the shadow of Fix T",
            magnitude: gap,
        });
    }
    Ok(SolutionSet { basis: direct })
}
