use std::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A linear solve hit a pivot below the singularity threshold.
    SingularMatrix {
        /// Column at which no acceptable pivot was found.
        pivot_col: usize,
    },
    /// A routine requiring a symmetric matrix was handed an asymmetric one.
    NotSymmetric {
        /// Measured asymmetry `‖M − Mᵀ‖_F / ‖M‖_F`.
        asymmetry: f64,
    },
    /// A matrix claimed to be a resolvent fails `‖2J − I‖ ≤ 1`.
    NotFirmlyNonexpansive {
        /// Measured value of `‖2J − I‖`.
        norm: f64,
    },
    /// The relation is not maximally monotone, so it has no (single-valued,
    /// total) resolvent.
    NotMaximallyMonotone {
        graph_dim: usize,
        n: usize,
        monotone: bool,
    },
    /// Two operands live in different ambient dimensions.
    DimensionMismatch { expected: usize, got: usize },
    /// The ambient dimension is below the minimum the operation supports.
    DimensionTooSmall { n: usize, min: usize },
    /// A documented precondition of the operation does not hold.
    PreconditionViolated { what: &'static str },
    /// The input pair is not in the proximal set (its reflected resolvents
    /// do not commute within tolerance).
    NotInProximalSet { commutator_norm: f64, tol: f64 },
    /// Two internal computation routes disagreed beyond tolerance.
    InternalInconsistency { what: &'static str, magnitude: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::SingularMatrix { pivot_col } => {
                write!(
                    f,
                    "singular matrix: no acceptable pivot in column {pivot_col}"
                )
            }
            Error::NotSymmetric { asymmetry } => {
                write!(
                    f,
                    "matrix is not symmetric (relative asymmetry {asymmetry:.2e})"
                )
            }
            Error::NotFirmlyNonexpansive { norm } => {
                write!(f, "matrix is not firmly nonexpansive: ‖2J − I‖ = {norm}")
            }
            Error::NotMaximallyMonotone {
                graph_dim,
                n,
                monotone,
            } => {
                if monotone {
                    write!(
                        f,
                        "relation is monotone but not maximal: graph dimension {graph_dim} ≠ {n}"
                    )
                } else {
                    write!(f, "relation is not monotone")
                }
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DimensionTooSmall { n, min } => {
                write!(f, "dimension {n} too small: operation needs n ≥ {min}")
            }
            Error::PreconditionViolated { what } => {
                write!(f, "precondition violated: {what}")
            }
            Error::NotInProximalSet {
                commutator_norm,
                tol,
            } => {
                write!(
                    f,
                    "pair is outside the proximal set: commutator norm {commutator_norm:.3e} > tol {tol:.3e}"
                )
            }
            Error::InternalInconsistency { what, magnitude } => {
                write!(
                    f,
                    "internal consistency check failed: {what} (magnitude {magnitude:.3e})"
                )
            }
        }
    }
}

impl std::error::Error for Error {}
