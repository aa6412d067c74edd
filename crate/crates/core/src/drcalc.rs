//! Douglas–Rachford operator calculus.
//!
//! Builds the splitting operator `T = ½(I + R_B R_A)` for a pair of maximally
//! monotone linear relations, recovers the monotone operator whose resolvent
//! T is, and decides whether T is a proximal mapping. A matrix is a proximal
//! mapping exactly when it is firmly nonexpansive and symmetric, so for
//! symmetric inputs proximality reduces to the commutator `R_A R_B − R_B R_A`
//! vanishing.
//!
//! Segment families interpolate two endpoint pairs of nonexpansive matrices;
//! each commutator entry is then a quadratic in the parameter, so a family
//! whose start commutes and whose end does not commutes at no more than one
//! interior parameter.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linrel::{LinearRelation, ResolventMatrix, DEFAULT_TOL};
use crate::numerics::Matrix;

/// Threshold beyond which the two algebraically equal constructions of the
/// splitting operator abort the computation.
const FORMULA_AGREEMENT_TOL: f64 = 1e-10;

/// Matching tolerance when intersecting polynomial roots across entries.
const ROOT_MATCH_TOL: f64 = 1e-9;

/// Diagnosis of one Douglas–Rachford operator.
///
/// JSON form: `{"T": …, "symmetric": …, "firmly_nonexpansive": …,
/// "proximal": …, "commutator_norm": real|null, "recovered_C": …}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrDiagnosis {
    /// The splitting operator `½(I + R_B R_A)`.
    #[serde(rename = "T")]
    pub t: Matrix,
    /// `‖T − Tᵀ‖ ≤ tol`.
    pub symmetric: bool,
    /// `‖2T − I‖ ≤ 1 + tol`; always holds for genuine inputs.
    pub firmly_nonexpansive: bool,
    /// Proximal mapping verdict: symmetric and firmly nonexpansive.
    pub proximal: bool,
    /// `‖R_B R_A − R_A R_B‖`, recorded only when both inputs are symmetric
    /// (the commutator characterizes symmetry of T only then).
    pub commutator_norm: Option<f64>,
    /// The maximally monotone operator C with `T = J_C`.
    #[serde(rename = "recovered_C")]
    pub recovered_c: LinearRelation,
}

/// Reflected resolvent `R_A = 2J_A − I` of a maximally monotone relation.
pub fn reflected_resolvent(a: &LinearRelation) -> Result<Matrix, Error> {
    Ok(a.resolvent()?.reflected())
}

/// Commutator `RS − SR`.
pub fn commutator(r: &Matrix, s: &Matrix) -> Result<Matrix, Error> {
    if !r.is_square() || !s.is_square() || r.rows() != s.rows() {
        return Err(Error::DimensionMismatch {
            expected: r.rows(),
            got: s.rows(),
        });
    }
    Ok(r.matmul(s).sub(&s.matmul(r)))
}

/// Proximal-mapping test: firmly nonexpansive (`‖2T − I‖ ≤ 1 + tol`) and
/// symmetric (`‖T − Tᵀ‖ ≤ tol`).
pub fn is_proximal(t: &Matrix, tol: f64) -> bool {
    assert!(t.is_square(), "is_proximal: matrix must be square");
    let fne = t
        .scale(2.0)
        .sub(&Matrix::identity(t.rows()))
        .spectral_norm()
        <= 1.0 + tol;
    let sym = t.sub(&t.transpose()).spectral_norm() <= tol;
    fne && sym
}

/// Splitting operator for the pair, cross-checked between its two standard
/// forms `I − J_A + J_B R_A` and `½(I + R_B R_A)`.
pub(crate) fn dr_matrix(ja: &ResolventMatrix, jb: &ResolventMatrix) -> Result<Matrix, Error> {
    let n = ja.matrix().rows();
    let eye = Matrix::identity(n);
    let ra = ja.reflected();
    let rb = jb.reflected();
    let averaged = eye.add(&rb.matmul(&ra)).scale(0.5);
    let split = eye.sub(ja.matrix()).add(&jb.matrix().matmul(&ra));
    let disagreement = averaged.sub(&split).spectral_norm();
    if disagreement > FORMULA_AGREEMENT_TOL {
        return Err(Error::InternalInconsistency {
            what: "the two splitting-operator forms disagree",
            magnitude: disagreement,
        });
    }
    Ok(averaged)
}

/// Builds and diagnoses the Douglas–Rachford operator of `(a, b)` at the
/// default tolerance.
pub fn dr_operator(a: &LinearRelation, b: &LinearRelation) -> Result<DrDiagnosis, Error> {
    dr_operator_with_tol(a, b, DEFAULT_TOL)
}

/// Builds and diagnoses the Douglas–Rachford operator of `(a, b)`; `tol` is
/// the absolute tolerance for the symmetry and firm-nonexpansiveness
/// decisions.
pub fn dr_operator_with_tol(
    a: &LinearRelation,
    b: &LinearRelation,
    tol: f64,
) -> Result<DrDiagnosis, Error> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let ja = a.resolvent()?;
    let jb = b.resolvent()?;
    let t = dr_matrix(&ja, &jb)?;
    let n = a.n();

    let symmetric = t.sub(&t.transpose()).spectral_norm() <= tol;
    let firmly_nonexpansive = t.scale(2.0).sub(&Matrix::identity(n)).spectral_norm() <= 1.0 + tol;

    let a_sym = ja.matrix().sub(&ja.matrix().transpose()).spectral_norm() <= tol;
    let b_sym = jb.matrix().sub(&jb.matrix().transpose()).spectral_norm() <= tol;
    let commutator_norm = if a_sym && b_sym {
        let ra = ja.reflected();
        let rb = jb.reflected();
        Some(commutator(&rb, &ra)?.spectral_norm())
    } else {
        None
    };

    let recovered_c = LinearRelation::from_resolvent(&ResolventMatrix::new(t.clone())?);

    Ok(DrDiagnosis {
        t,
        symmetric,
        firmly_nonexpansive,
        proximal: symmetric && firmly_nonexpansive,
        commutator_norm,
        recovered_c,
    })
}

/// A segment of matrix pairs: endpoints `(R₀, S₀)` and `(R₁, S₁)` with the
/// blends `R_λ = (1−λ)R₀ + λR₁` and `S_λ = (1−λ)S₀ + λS₁`.
///
/// All four endpoints must be nonexpansive, so every blend is nonexpansive
/// by convexity of the unit ball.
#[derive(Debug, Clone)]
pub struct SegmentFamily {
    r0: Matrix,
    s0: Matrix,
    r1: Matrix,
    s1: Matrix,
}

/// One entry of the commutator of a segment family, as the quadratic
/// `q(λ) = c0 + c1·λ + c2·λ²` it traces out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorPolynomial {
    pub row: usize,
    pub col: usize,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CommutatorPolynomial {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.c0 + lambda * (self.c1 + lambda * self.c2)
    }

    pub fn max_coeff(&self) -> f64 {
        self.c0.abs().max(self.c1.abs()).max(self.c2.abs())
    }

    /// Real roots in the open unit interval, deduplicated.
    fn roots_in_unit_interval(&self) -> Vec<f64> {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        if self.c2.abs() <= 1e-14 * scale {
            if self.c1.abs() > 1e-14 * scale {
                roots.push(-self.c0 / self.c1);
            }
        } else {
            let disc = self.c1 * self.c1 - 4.0 * self.c0 * self.c2;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                // Citardauq-stable split of the two roots.
                let q = -0.5 * (self.c1 + self.c1.signum() * sq);
                if q == 0.0 {
                    roots.push(0.0);
                } else {
                    roots.push(q / self.c2);
                    roots.push(self.c0 / q);
                }
            }
        }
        roots.retain(|l| l.is_finite() && *l > ROOT_MATCH_TOL && *l < 1.0 - ROOT_MATCH_TOL);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MATCH_TOL);
        roots
    }
}

impl SegmentFamily {
    /// Validates shapes and nonexpansiveness of the endpoints.
    pub fn new(r0: Matrix, s0: Matrix, r1: Matrix, s1: Matrix) -> Result<SegmentFamily, Error> {
        let n = r0.rows();
        for m in [&r0, &s0, &r1, &s1] {
            if !m.is_square() || m.rows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.rows(),
                });
            }
            let norm = m.spectral_norm();
            if norm > 1.0 + 1e-10 {
                return Err(Error::PreconditionViolated {
                    what: "segment family endpoints must be nonexpansive",
                });
            }
        }
        Ok(SegmentFamily { r0, s0, r1, s1 })
    }

    /// The built-in witness family in dimension n ≥ 2: the R endpoints are
    /// both `diag(1, −1, 0, …)`, S starts at `diag(−1, 1, 0, …)` and ends at
    /// the coordinate swap on the leading 2×2 block. The start pair commutes;
    /// interior blends never do.
    pub fn witness(n: usize) -> Result<SegmentFamily, Error> {
        if n < 2 {
            return Err(Error::DimensionTooSmall { n, min: 2 });
        }
        let mut r = Matrix::zeros(n, n);
        r.set(0, 0, 1.0);
        r.set(1, 1, -1.0);
        let mut s0 = Matrix::zeros(n, n);
        s0.set(0, 0, -1.0);
        s0.set(1, 1, 1.0);
        let mut s1 = Matrix::zeros(n, n);
        s1.set(0, 1, 1.0);
        s1.set(1, 0, 1.0);
        SegmentFamily::new(r.clone(), s0, r, s1)
    }

    pub fn n(&self) -> usize {
        self.r0.rows()
    }

    pub fn endpoints(&self) -> (&Matrix, &Matrix, &Matrix, &Matrix) {
        (&self.r0, &self.s0, &self.r1, &self.s1)
    }

    pub fn r_at(&self, lambda: f64) -> Matrix {
        self.r0.scale(1.0 - lambda).add(&self.r1.scale(lambda))
    }

    pub fn s_at(&self, lambda: f64) -> Matrix {
        self.s0.scale(1.0 - lambda).add(&self.s1.scale(lambda))
    }

    /// `M_λ = R_λ S_λ − S_λ R_λ`.
    pub fn commutator_at(&self, lambda: f64) -> Matrix {
        let r = self.r_at(lambda);
        let s = self.s_at(lambda);
        r.matmul(&s).sub(&s.matmul(&r))
    }

    /// Expands every entry of `M_λ` as a quadratic in λ, from the endpoint
    /// products:
    /// `M_λ = (1−λ)² M₀₀ + λ(1−λ)(M₀₁ + M₁₀) + λ² M₁₁`
    /// with `M_ab = R_a S_b − S_b R_a`.
    pub fn commutator_polynomials(&self) -> Vec<CommutatorPolynomial> {
        let n = self.n();
        let m = |ra: &Matrix, sb: &Matrix| ra.matmul(sb).sub(&sb.matmul(ra));
        let m00 = m(&self.r0, &self.s0);
        let m11 = m(&self.r1, &self.s1);
        let cross = m(&self.r0, &self.s1).add(&m(&self.r1, &self.s0));
        let mut polys = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let a = m00.get(i, j);
                let b = cross.get(i, j);
                let c = m11.get(i, j);
                polys.push(CommutatorPolynomial {
                    row: i,
                    col: j,
                    c0: a,
                    c1: b - 2.0 * a,
                    c2: a - b + c,
                });
            }
        }
        polys
    }

    /// The set of interior parameters at which `R_λ` commutes with `S_λ`.
    ///
    /// Requires a commuting start (`‖M₀‖ ≤ tol`) and a non-commuting end
    /// (`‖M₁‖ > tol`); under those preconditions the result has at most one
    /// element. Candidates are the common roots of all entry quadratics,
    /// verified against the actual commutator norm.
    pub fn commuting_lambdas(&self, tol: f64) -> Result<Vec<f64>, Error> {
        assert!(tol > 0.0, "commuting_lambdas: tol must be positive");
        if self.commutator_at(0.0).spectral_norm() > tol {
            return Err(Error::PreconditionViolated {
                what: "segment family start endpoints must commute",
            });
        }
        if self.commutator_at(1.0).spectral_norm() <= tol {
            return Err(Error::PreconditionViolated {
                what: "segment family end endpoints must not commute",
            });
        }
        let mut candidates: Option<Vec<f64>> = None;
        for poly in self.commutator_polynomials() {
            if poly.max_coeff() <= tol {
                continue;
            }
            let roots = poly.roots_in_unit_interval();
            candidates = Some(match candidates {
                None => roots,
                Some(prev) => prev
                    .into_iter()
                    .filter(|l| roots.iter().any(|r| (r - l).abs() <= ROOT_MATCH_TOL))
                    .collect(),
            });
            if candidates.as_ref().is_some_and(Vec::is_empty) {
                break;
            }
        }
        let mut verified: Vec<f64> = candidates
            .unwrap_or_default()
            .into_iter()
            .filter(|&l| self.commutator_at(l).spectral_norm() <= tol)
            .collect();
        verified.sort_by(|a, b| a.partial_cmp(b).unwrap());
        verified.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MATCH_TOL);
        Ok(verified)
    }
}
