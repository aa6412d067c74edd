//! Maximally monotone linear relations on ℝⁿ.
//!
//! A linear relation is a set-valued map whose graph is a linear subspace of
//! ℝⁿ×ℝⁿ. We store the graph as an orthonormal 2n×k basis whose top block
//! holds points and bottom block holds values, so relation equality reduces
//! to subspace equality. Monotone relations with graph dimension exactly n
//! are maximally monotone, and those are precisely the relations with a
//! single-valued, everywhere-defined, firmly nonexpansive resolvent
//! `J = (I + A)⁻¹`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{Matrix, RANK_TOL};

/// Default absolute tolerance for monotonicity and symmetry decisions on
/// unit-scale matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack allowed on the firm-nonexpansiveness bound `‖2J − I‖ ≤ 1`.
pub const FIRMLY_NONEXPANSIVE_SLACK: f64 = 1e-10;

/// Provenance tag carried through the JSON form of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Matrix,
    NormalCone,
    Resolvent,
}

/// A linear relation on ℝⁿ, stored as an orthonormal graph basis.
///
/// JSON form: `{"n": n, "graph_basis": <matrix>, "kind": <optional tag>}`.
/// The basis is re-canonicalized (orthonormalized) on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRelation", into = "RawRelation")]
pub struct LinearRelation {
    n: usize,
    graph_basis: Matrix,
    kind: Option<RelationKind>,
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    n: usize,
    graph_basis: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<RelationKind>,
}

impl TryFrom<RawRelation> for LinearRelation {
    type Error = String;

    fn try_from(raw: RawRelation) -> Result<Self, String> {
        if raw.n == 0 {
            return Err("relation dimension must be positive".to_string());
        }
        if raw.graph_basis.rows() != 2 * raw.n {
            return Err(format!(
                "graph basis has {} rows, expected {}",
                raw.graph_basis.rows(),
                2 * raw.n
            ));
        }
        let mut rel =
            LinearRelation::from_graph(raw.n, &raw.graph_basis).map_err(|e| e.to_string())?;
        rel.kind = raw.kind;
        Ok(rel)
    }
}

impl From<LinearRelation> for RawRelation {
    fn from(rel: LinearRelation) -> RawRelation {
        RawRelation {
            n: rel.n,
            graph_basis: rel.graph_basis,
            kind: rel.kind,
        }
    }
}

impl LinearRelation {
    /// Relation with graph spanned by the columns of `span` (2n×k, top block
    /// points, bottom block values). The basis is orthonormalized, so linearly
    /// dependent columns are dropped.
    pub fn from_graph(n: usize, span: &Matrix) -> Result<LinearRelation, Error> {
        if span.rows() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: span.rows(),
            });
        }
        let graph_basis = span.orthonormalize(RANK_TOL);
        Ok(LinearRelation {
            n,
            graph_basis,
            kind: None,
        })
    }

    /// The (total, single-valued) operator `x ↦ Mx` as a relation: graph
    /// `{(x, Mx)}`.
    pub fn from_matrix(m: &Matrix) -> LinearRelation {
        assert!(m.is_square(), "from_matrix: matrix must be square");
        let n = m.rows();
        let span = Matrix::vstack(&[&Matrix::identity(n), m]);
        let mut rel = LinearRelation::from_graph(n, &span).expect("shape is consistent");
        rel.kind = Some(RelationKind::Matrix);
        rel
    }

    /// Normal cone operator of the subspace spanned by the columns of
    /// `v_basis` (n×k): the relation with graph V × V⊥, whose resolvent is
    /// the orthogonal projector onto V.
    pub fn normal_cone_of_subspace(v_basis: &Matrix) -> LinearRelation {
        let n = v_basis.rows();
        assert!(
            n > 0,
            "normal_cone_of_subspace: ambient dimension must be positive"
        );
        let v = v_basis.orthonormalize(RANK_TOL);
        let complement = v.transpose().kernel_basis(RANK_TOL);
        let k = v.cols();
        let mut span = Matrix::zeros(2 * n, n);
        for j in 0..k {
            for i in 0..n {
                span.set(i, j, v.get(i, j));
            }
        }
        for j in 0..complement.cols() {
            for i in 0..n {
                span.set(n + i, k + j, complement.get(i, j));
            }
        }
        let mut rel = LinearRelation::from_graph(n, &span).expect("shape is consistent");
        rel.kind = Some(RelationKind::NormalCone);
        rel
    }

    /// Recovers the relation whose resolvent is `j`: the graph is
    /// `{(Jx, x − Jx)}`. Round-trips with [`LinearRelation::resolvent`].
    pub fn from_resolvent(j: &ResolventMatrix) -> LinearRelation {
        let n = j.matrix().rows();
        let top = j.matrix().clone();
        let bottom = Matrix::identity(n).sub(j.matrix());
        let span = Matrix::vstack(&[&top, &bottom]);
        let mut rel = LinearRelation::from_graph(n, &span).expect("shape is consistent");
        rel.kind = Some(RelationKind::Resolvent);
        rel
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the graph subspace.
    pub fn graph_dim(&self) -> usize {
        self.graph_basis.cols()
    }

    pub fn graph_basis(&self) -> &Matrix {
        &self.graph_basis
    }

    pub fn kind(&self) -> Option<RelationKind> {
        self.kind
    }

    /// Top block of the graph basis: the point components `u`.
    pub fn point_block(&self) -> Matrix {
        Matrix::from_fn(self.n, self.graph_dim(), |i, j| self.graph_basis.get(i, j))
    }

    /// Bottom block of the graph basis: the value components `w`.
    pub fn value_block(&self) -> Matrix {
        Matrix::from_fn(self.n, self.graph_dim(), |i, j| {
            self.graph_basis.get(self.n + i, j)
        })
    }

    /// Monotonicity: the symmetric part of `UᵀW` is positive semidefinite
    /// (minimum eigenvalue ≥ −tol). For linear relations this is equivalent
    /// to `⟨u, w⟩ ≥ 0` on the whole graph.
    pub fn is_monotone(&self, tol: f64) -> bool {
        assert!(tol >= 0.0);
        let k = self.graph_dim();
        if k == 0 {
            return true;
        }
        let uw = self.point_block().transpose().matmul(&self.value_block());
        let sym = uw.add(&uw.transpose()).scale(0.5);
        let vals = sym
            .symmetric_eigenvalues()
            .expect("symmetrized by construction");
        vals.first().copied().unwrap_or(0.0) >= -tol
    }

    /// Maximal monotonicity: monotone and graph dimension exactly n.
    pub fn is_maximally_monotone(&self, tol: f64) -> bool {
        self.graph_dim() == self.n && self.is_monotone(tol)
    }

    /// Resolvent `J = (I + A)⁻¹ = U(U + W)⁻¹` from the graph blocks.
    ///
    /// Fails with [`Error::NotMaximallyMonotone`] when the relation is not
    /// maximally monotone (equivalently, when `U + W` is singular).
    pub fn resolvent(&self) -> Result<ResolventMatrix, Error> {
        if !self.is_maximally_monotone(DEFAULT_TOL) {
            return Err(Error::NotMaximallyMonotone {
                graph_dim: self.graph_dim(),
                n: self.n,
                monotone: self.is_monotone(DEFAULT_TOL),
            });
        }
        let u = self.point_block();
        let w = self.value_block();
        let inv = u
            .add(&w)
            .inverse()
            .map_err(|_| Error::NotMaximallyMonotone {
                graph_dim: self.graph_dim(),
                n: self.n,
                monotone: true,
            })?;
        ResolventMatrix::new(u.matmul(&inv))
    }

    /// Symmetry test through the resolvent: `‖J − Jᵀ‖ ≤ tol`.
    ///
    /// Symmetric maximally monotone linear relations are exactly the linear
    /// subdifferential operators, so this decides "is a subdifferential".
    pub fn is_symmetric(&self, tol: f64) -> Result<bool, Error> {
        let j = self.resolvent()?;
        let asym = j.matrix().sub(&j.matrix().transpose()).spectral_norm();
        Ok(asym <= tol)
    }

    /// Symmetry test directly on the canonical graph basis:
    /// `‖UᵀW − WᵀU‖ ≤ tol`. Independent of the resolvent route.
    pub fn is_symmetric_via_graph(&self, tol: f64) -> bool {
        let uw = self.point_block().transpose().matmul(&self.value_block());
        uw.sub(&uw.transpose()).spectral_norm() <= tol
    }

    /// Resolvent metric: `dist(A₁, A₂) = ‖J_{A₁} − J_{A₂}‖`.
    pub fn dist(&self, other: &LinearRelation) -> Result<f64, Error> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let j1 = self.resolvent()?;
        let j2 = other.resolvent()?;
        Ok(j1.matrix().sub(j2.matrix()).spectral_norm())
    }

    /// The matrix M with graph {(x, Mx)}, when the relation is one:
    /// `M = W U⁻¹` with `U` invertible. Returns `None` for relations that
    /// are not single-valued total operators.
    pub fn as_matrix(&self) -> Option<Matrix> {
        if self.graph_dim() != self.n {
            return None;
        }
        let u = self.point_block();
        let w = self.value_block();
        u.inverse().ok().map(|inv| w.matmul(&inv))
    }

    /// Orthogonal projector onto the graph subspace, `B Bᵀ`.
    pub fn graph_projector(&self) -> Matrix {
        self.graph_basis.matmul(&self.graph_basis.transpose())
    }

    /// Subspace equality of graphs: projector difference at most `tol`.
    pub fn same_graph(&self, other: &LinearRelation, tol: f64) -> bool {
        self.n == other.n
            && self
                .graph_projector()
                .sub(&other.graph_projector())
                .spectral_norm()
                <= tol
    }
}

/// A firmly nonexpansive matrix: `‖2J − I‖ ≤ 1` (within
/// [`FIRMLY_NONEXPANSIVE_SLACK`]). Exactly the matrices that arise as
/// resolvents of maximally monotone linear relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct ResolventMatrix {
    j: Matrix,
}

impl TryFrom<Matrix> for ResolventMatrix {
    type Error = String;

    fn try_from(m: Matrix) -> Result<Self, String> {
        ResolventMatrix::new(m).map_err(|e| e.to_string())
    }
}

impl From<ResolventMatrix> for Matrix {
    fn from(r: ResolventMatrix) -> Matrix {
        r.j
    }
}

impl ResolventMatrix {
    /// Validates firm nonexpansiveness and wraps the matrix.
    pub fn new(j: Matrix) -> Result<ResolventMatrix, Error> {
        assert!(j.is_square(), "resolvent must be square");
        let norm = j
            .scale(2.0)
            .sub(&Matrix::identity(j.rows()))
            .spectral_norm();
        if norm > 1.0 + FIRMLY_NONEXPANSIVE_SLACK {
            return Err(Error::NotFirmlyNonexpansive { norm });
        }
        Ok(ResolventMatrix { j })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.j
    }

    pub fn into_matrix(self) -> Matrix {
        self.j
    }

    /// The reflected resolvent `R = 2J − I`; nonexpansive.
    pub fn reflected(&self) -> Matrix {
        self.j.scale(2.0).sub(&Matrix::identity(self.j.rows()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn rotation_generator() -> Matrix {
        Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]])
    }

    fn line(vx: f64, vy: f64) -> LinearRelation {
        LinearRelation::normal_cone_of_subspace(&Matrix::from_rows(&[vec![vx], vec![vy]]))
    }

    #[test]
    fn zero_operator_graph_is_points_only() {
        let rel = LinearRelation::from_matrix(&Matrix::zeros(3, 3));
        assert_eq!(rel.graph_dim(), 3);
        assert!(rel.value_block().max_abs() <= 1e-15);
        let j = rel.resolvent().unwrap();
        assert!(j.matrix().max_abs_diff(&Matrix::identity(3)) <= 1e-12);
    }

    #[test]
    fn skew_operator_is_monotone_but_not_symmetric() {
        let rel = LinearRelation::from_matrix(&rotation_generator());
        assert!(rel.is_monotone(DEFAULT_TOL));
        assert!(rel.is_maximally_monotone(DEFAULT_TOL));
        assert!(!rel.is_symmetric(DEFAULT_TOL).unwrap());
        assert!(!rel.is_symmetric_via_graph(DEFAULT_TOL));
    }

    #[test]
    fn diagonal_operator_is_symmetric() {
        let rel = LinearRelation::from_matrix(&Matrix::diagonal(&[1.0, 2.0]));
        assert_eq!(rel.graph_dim(), 2);
        assert!(rel.is_monotone(DEFAULT_TOL));
        assert!(rel.is_symmetric(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn negative_definite_operator_is_not_monotone() {
        let rel = LinearRelation::from_matrix(&Matrix::identity(2).scale(-1.0));
        assert!(!rel.is_monotone(DEFAULT_TOL));
    }

    #[test]
    fn normal_cone_resolvents_are_projectors() {
        let axis = line(1.0, 0.0);
        let jx = axis.resolvent().unwrap();
        assert!(jx.matrix().max_abs_diff(&Matrix::diagonal(&[1.0, 0.0])) <= 1e-12);

        let diag = line(1.0, 1.0);
        let jd = diag.resolvent().unwrap();
        let half = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(jd.matrix().max_abs_diff(&half) <= 1e-12);

        let full = LinearRelation::normal_cone_of_subspace(&Matrix::identity(2));
        let jf = full.resolvent().unwrap();
        assert!(jf.matrix().max_abs_diff(&Matrix::identity(2)) <= 1e-12);
    }

    #[test]
    fn normal_cones_are_maximally_monotone_and_symmetric() {
        for rel in [line(1.0, 0.0), line(1.0, 1.0), line(-2.0, 3.0)] {
            assert!(rel.is_maximally_monotone(DEFAULT_TOL));
            assert!(rel.is_symmetric(DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn from_resolvent_identity_gives_zero_operator() {
        let j = ResolventMatrix::new(Matrix::identity(2)).unwrap();
        let rel = LinearRelation::from_resolvent(&j);
        assert!(rel.same_graph(&LinearRelation::from_matrix(&Matrix::zeros(2, 2)), 1e-12));
    }

    #[test]
    fn from_resolvent_half_identity_gives_identity_operator() {
        let j = ResolventMatrix::new(Matrix::identity(2).scale(0.5)).unwrap();
        let rel = LinearRelation::from_resolvent(&j);
        let m = rel.as_matrix().unwrap();
        assert!(m.max_abs_diff(&Matrix::identity(2)) <= 1e-12);
    }

    #[test]
    fn from_resolvent_recovers_rotation_generator() {
        let t = Matrix::from_rows(&[vec![0.5, -0.5], vec![0.5, 0.5]]);
        let rel = LinearRelation::from_resolvent(&ResolventMatrix::new(t).unwrap());
        let m = rel.as_matrix().unwrap();
        assert!(m.max_abs_diff(&rotation_generator()) <= 1e-12);
    }

    #[test]
    fn expansive_matrix_is_rejected_as_resolvent() {
        match ResolventMatrix::new(Matrix::identity(2).scale(1.1)) {
            Err(Error::NotFirmlyNonexpansive { norm }) => {
                assert!((norm - 1.2).abs() <= 1e-12);
            }
            other => panic!("expected NotFirmlyNonexpansive, got {other:?}"),
        }
    }

    #[test]
    fn resolvent_of_diagonal_operator() {
        let rel = LinearRelation::from_matrix(&Matrix::diagonal(&[1.0, 3.0]));
        let j = rel.resolvent().unwrap();
        assert!(j.matrix().max_abs_diff(&Matrix::diagonal(&[0.5, 0.25])) <= 1e-12);
    }

    #[test]
    fn resolvent_of_rotation_generator_matches_closed_form() {
        let rel = LinearRelation::from_matrix(&rotation_generator());
        let j = rel.resolvent().unwrap();
        let expected = Matrix::from_rows(&[vec![0.5, -0.5], vec![0.5, 0.5]]);
        assert!(j.matrix().max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn deficient_graph_is_not_maximal() {
        // Graph spanned by (1,0;0,0) in R^2: dimension 1 < 2.
        let span = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0], vec![0.0]]);
        let rel = LinearRelation::from_graph(2, &span).unwrap();
        assert!(rel.is_monotone(DEFAULT_TOL));
        assert!(!rel.is_maximally_monotone(DEFAULT_TOL));
        match rel.resolvent() {
            Err(Error::NotMaximallyMonotone {
                graph_dim: 1, n: 2, ..
            }) => {}
            other => panic!("expected NotMaximallyMonotone, got {other:?}"),
        }
    }

    #[test]
    fn total_operators_have_full_graph_dimension() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let raw = Matrix::from_fn(4, 4, |_, _| rng.next_f64() * 2.0 - 1.0);
            // Shift to make the symmetric part PSD.
            let m = raw.add(&Matrix::identity(4).scale(4.0));
            let rel = LinearRelation::from_matrix(&m);
            assert_eq!(rel.graph_dim(), 4, "graph of a total map has dimension n");
            assert!(rel.is_maximally_monotone(DEFAULT_TOL));
        }
    }

    #[test]
    fn dist_is_zero_on_equal_relations_and_one_on_crossed_axes() {
        let a = line(1.0, 0.0);
        assert_eq!(a.dist(&a).unwrap(), 0.0);
        let b = line(0.0, 1.0);
        assert!((a.dist(&b).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dist_rejects_dimension_mismatch() {
        let a = line(1.0, 0.0);
        let b = LinearRelation::from_matrix(&Matrix::zeros(3, 3));
        match a.dist(&b) {
            Err(Error::DimensionMismatch { .. }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn reflected_resolvent_distance_is_twice_resolvent_distance() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..10 {
            let a = crate::lab::sample_symmetric_relation(3, &mut rng);
            let b = crate::lab::sample_symmetric_relation(3, &mut rng);
            let d = a.dist(&b).unwrap();
            let ra = a.resolvent().unwrap().reflected();
            let rb = b.resolvent().unwrap().reflected();
            let rd = ra.sub(&rb).spectral_norm();
            assert!((rd - 2.0 * d).abs() <= 1e-12 * rd.max(1.0));
        }
    }

    #[test]
    fn resolvent_round_trip_preserves_graph() {
        let mut rng = SplitMix64::new(37);
        for _ in 0..10 {
            let rel = crate::lab::sample_symmetric_relation(4, &mut rng);
            let back = LinearRelation::from_resolvent(&rel.resolvent().unwrap());
            assert!(rel.same_graph(&back, 1e-10));
        }
    }

    #[test]
    fn symmetry_tests_agree() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..10 {
            let rel = crate::lab::sample_symmetric_relation(3, &mut rng);
            assert!(rel.is_symmetric(DEFAULT_TOL).unwrap());
            assert!(rel.is_symmetric_via_graph(DEFAULT_TOL));
        }
        let skew = LinearRelation::from_matrix(&rotation_generator());
        assert_eq!(
            skew.is_symmetric(DEFAULT_TOL).unwrap(),
            skew.is_symmetric_via_graph(DEFAULT_TOL)
        );
    }

    #[test]
    fn relation_json_round_trip_keeps_graph_and_kind() {
        let rel = line(1.0, 1.0);
        let text = serde_json::to_string(&rel).unwrap();
        let back: LinearRelation = serde_json::from_str(&text).unwrap();
        assert!(rel.same_graph(&back, 1e-12));
        assert_eq!(back.kind(), Some(RelationKind::NormalCone));
    }
}
