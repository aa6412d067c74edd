//! Genericity experiments over symmetric maximally monotone linear relations.
//!
//! The experiments probe the set of pairs whose Douglas–Rachford operator is
//! a proximal mapping — the "proximal set". Exact membership in that set is
//! not decidable in floating point, so membership is surrogated by a
//! commutator-norm threshold that is carried into every output record: for
//! symmetric inputs, T is proximal exactly when the reflected resolvents
//! commute.
//!
//! All sampling is driven by [`SplitMix64`] streams forked per trial, so a
//! sweep is reproducible byte-for-byte from its config.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::drcalc::{self, SegmentFamily};
use crate::error::Error;
use crate::linrel::{LinearRelation, ResolventMatrix};
use crate::numerics::Matrix;
use crate::rng::SplitMix64;

/// Configuration of a genericity sweep. JSON form uses these field names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Ambient dimension.
    pub n: usize,
    /// Number of sampled pairs.
    pub trials: usize,
    /// Master seed; trial k uses the forked stream k.
    pub seed: u64,
    /// Commutator-norm threshold defining membership in the proximal set.
    pub commute_tol: f64,
    /// Perturbation size used when a trial lands inside the proximal set.
    pub lambda_escape: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 3,
            trials: 1000,
            seed: 0,
            commute_tol: 1e-8,
            lambda_escape: 1e-3,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 1 {
            return Err(Error::PreconditionViolated {
                what: "sweep dimension must be at least 1",
            });
        }
        if self.trials < 1 {
            return Err(Error::PreconditionViolated {
                what: "sweep needs at least one trial",
            });
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.commute_tol) || !positive(self.lambda_escape) {
            return Err(Error::PreconditionViolated {
                what: "sweep tolerances must be positive",
            });
        }
        Ok(())
    }
}

/// One sweep trial. CSV columns:
/// `trial,commutator_norm,in_D,proximal,dist_to_perturbed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub trial: usize,
    /// `‖R_B R_A − R_A R_B‖` for the sampled pair.
    pub commutator_norm: f64,
    /// Membership surrogate: commutator norm within the configured
    /// threshold.
    #[serde(rename = "in_D")]
    pub in_proximal_set: bool,
    /// Independent proximality verdict on T itself.
    pub proximal: bool,
    /// Distance moved by the escape perturbation, when one ran.
    pub dist_to_perturbed: Option<f64>,
}

/// Writes sweep records as CSV with the pinned column layout.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "trial,commutator_norm,in_D,proximal,dist_to_perturbed")?;
    for r in records {
        write!(
            out,
            "{},{},{},{},",
            r.trial, r.commutator_norm, r.in_proximal_set, r.proximal
        )?;
        match r.dist_to_perturbed {
            Some(d) => writeln!(out, "{d}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

pub fn sweep_csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Haar-distributed orthogonal matrix: Gram–Schmidt applied to a Gaussian
/// matrix, in column order with positive normalization (the QR convention
/// with a positive-diagonal R).
pub fn haar_orthogonal(n: usize, rng: &mut SplitMix64) -> Matrix {
    loop {
        let g = Matrix::from_fn(n, n, |_, _| rng.next_gaussian());
        if let Some(q) = gram_schmidt_full(&g) {
            return q;
        }
        // A singular Gaussian draw has probability zero; redraw.
    }
}

fn gram_schmidt_full(g: &Matrix) -> Option<Matrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for pass in 0..2 {
            let (prev, rest) = cols.split_at_mut(j);
            let col = &mut rest[0];
            for q in prev.iter() {
                let d = crate::numerics::dot(q, col);
                for (c, qi) in col.iter_mut().zip(q) {
                    *c -= d * qi;
                }
            }
            if pass == 1 {
                let nrm = crate::numerics::vec_norm(col);
                if nrm < 1e-12 {
                    return None;
                }
                for c in col.iter_mut() {
                    *c /= nrm;
                }
            }
        }
    }
    let mut q = Matrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            q.set(i, j, v);
        }
    }
    Some(q)
}

/// Builds the symmetric relation whose resolvent is `Q diag(d) Qᵀ`. The
/// entries of `d` must lie in `[0, 1]` so the resolvent is firmly
/// nonexpansive.
pub fn symmetric_relation_from_spectrum(q: &Matrix, d: &[f64]) -> LinearRelation {
    assert_eq!(q.rows(), d.len());
    let j = q.matmul(&Matrix::diagonal(d)).matmul(&q.transpose());
    let j = ResolventMatrix::new(j).expect("spectrum in [0,1] is firmly nonexpansive");
    LinearRelation::from_resolvent(&j)
}

/// Draws a symmetric maximally monotone relation by sampling its resolvent:
/// `J = Q diag(d) Qᵀ` with Q Haar-orthogonal and `d` uniform on `[0, 1]ⁿ`.
pub fn sample_symmetric_relation(n: usize, rng: &mut SplitMix64) -> LinearRelation {
    assert!(n >= 1);
    let q = haar_orthogonal(n, rng);
    let d: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    symmetric_relation_from_spectrum(&q, &d)
}

/// Samples `trials` independent pairs, diagnoses each Douglas–Rachford
/// operator, and records commutator norm, the membership surrogate, and the
/// proximality verdict. Deterministic given the config.
///
/// Trials that land inside the proximal set (and have n ≥ 2) are immediately
/// perturbed with [`escape`] at `lambda_escape`, recording the distance
/// moved.
pub fn genericity_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, Error> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = SplitMix64::fork(cfg.seed, trial as u64);
        let a = sample_symmetric_relation(cfg.n, &mut rng);
        let b = sample_symmetric_relation(cfg.n, &mut rng);
        let diag = drcalc::dr_operator(&a, &b)?;
        let commutator_norm = diag
            .commutator_norm
            .expect("sampled relations are symmetric");
        let in_proximal_set = commutator_norm <= cfg.commute_tol;
        let dist_to_perturbed = if in_proximal_set && cfg.n >= 2 {
            escape(&a, &b, cfg.lambda_escape, cfg.commute_tol)
                .ok()
                .map(|o| o.report.dist_moved)
        } else {
            None
        };
        records.push(SweepRecord {
            trial,
            commutator_norm,
            in_proximal_set,
            proximal: diag.proximal,
            dist_to_perturbed,
        });
    }
    Ok(records)
}

/// Report of one escape perturbation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EscapeReport {
    pub lambda_requested: f64,
    /// λ actually used (λ/2 after a retry).
    pub lambda_used: f64,
    /// Whether the one permitted retry fired.
    pub retried: bool,
    /// Commutator norm of the perturbed pair; positive on success.
    pub commutator_norm: f64,
    /// `dist(A₀, A_λ) + dist(B₀, B_λ)` in the resolvent metric.
    pub dist_moved: f64,
}

/// An escape perturbation: the perturbed pair plus its report.
#[derive(Debug, Clone)]
pub struct EscapeOutcome {
    pub a: LinearRelation,
    pub b: LinearRelation,
    pub report: EscapeReport,
}

/// Perturbs a commuting pair out of the proximal set.
///
/// The reflected resolvents are blended toward the witness family's
/// non-commuting endpoints: `R_{A_λ} = (1−λ)R_{A₀} + λR₁` and
/// `R_{B_λ} = (1−λ)R_{B₀} + λS₁`, then mapped back to relations through
/// `J = ½(I + R)`. At most one interior λ can keep the blends commuting, so
/// a single retry at λ/2 always succeeds.
///
/// The distance moved satisfies `dist ≤ 2λ`, since each reflected resolvent
/// moves by at most `2λ` and resolvent distance is half of that.
pub fn escape(
    a0: &LinearRelation,
    b0: &LinearRelation,
    lambda: f64,
    tol: f64,
) -> Result<EscapeOutcome, Error> {
    if a0.n() != b0.n() {
        return Err(Error::DimensionMismatch {
            expected: a0.n(),
            got: b0.n(),
        });
    }
    let n = a0.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::PreconditionViolated {
            what: "escape step must lie in (0, 1)",
        });
    }
    let ja = a0.resolvent()?;
    let jb = b0.resolvent()?;
    if ja.matrix().sub(&ja.matrix().transpose()).spectral_norm() > tol
        || jb.matrix().sub(&jb.matrix().transpose()).spectral_norm() > tol
    {
        return Err(Error::PreconditionViolated {
            what: "escape inputs must be symmetric",
        });
    }
    let ra = ja.reflected();
    let rb = jb.reflected();
    let base = drcalc::commutator(&ra, &rb)?.spectral_norm();
    if base > tol {
        return Err(Error::NotInProximalSet {
            commutator_norm: base,
            tol,
        });
    }

    let family = SegmentFamily::witness(n)?;
    let (_, _, r1, s1) = family.endpoints();
    let eye = Matrix::identity(n);
    let blend = |base: &Matrix, target: &Matrix, l: f64| base.scale(1.0 - l).add(&target.scale(l));

    let mut lambda_used = lambda;
    let mut retried = false;
    loop {
        let ra_l = blend(&ra, r1, lambda_used);
        let rb_l = blend(&rb, s1, lambda_used);
        let commutator_norm = drcalc::commutator(&ra_l, &rb_l)?.spectral_norm();
        if commutator_norm > tol {
            let a_l =
                LinearRelation::from_resolvent(&ResolventMatrix::new(eye.add(&ra_l).scale(0.5))?);
            let b_l =
                LinearRelation::from_resolvent(&ResolventMatrix::new(eye.add(&rb_l).scale(0.5))?);
            let dist_moved = a0.dist(&a_l)? + b0.dist(&b_l)?;
            return Ok(EscapeOutcome {
                a: a_l,
                b: b_l,
                report: EscapeReport {
                    lambda_requested: lambda,
                    lambda_used,
                    retried,
                    commutator_norm,
                    dist_moved,
                },
            });
        }
        if retried {
            return Err(Error::InternalInconsistency {
                what: "escape failed at both the requested step and its half",
                magnitude: commutator_norm,
            });
        }
        retried = true;
        lambda_used = lambda / 2.0;
    }
}

/// One term of a closedness probe sequence.
#[derive(Debug, Clone, Serialize)]
pub struct ClosednessStep {
    pub k: usize,
    /// Distance from the k-th pair to the limit pair (sum metric).
    pub dist_to_limit: f64,
    pub commutator_norm: f64,
    pub in_proximal_set: bool,
}

/// Result of a closedness probe.
#[derive(Debug, Clone, Serialize)]
pub struct ClosednessReport {
    pub steps: Vec<ClosednessStep>,
    /// Proximality verdict for the limit pair's operator.
    pub limit_proximal: bool,
    /// All terms in the set, distances within the 2/k envelope, and the
    /// limit proximal.
    pub passed: bool,
}

/// Builds a sequence inside the proximal set converging to `(a, b)` and
/// checks that every term stays in the set while the limit's operator is
/// proximal.
///
/// The k-th term blends each resolvent toward the identity with weight 1/k:
/// blending toward the identity's reflected resolvent commutes with
/// everything, so the terms' commutators inherit the (vanishing) commutator
/// of the limit scaled by `(1 − 1/k)²`.
pub fn closedness_probe(
    a: &LinearRelation,
    b: &LinearRelation,
    k_max: usize,
    tol: f64,
) -> Result<ClosednessReport, Error> {
    assert!(k_max >= 1, "closedness_probe: k_max must be at least 1");
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let ja = a.resolvent()?;
    let jb = b.resolvent()?;
    let base = drcalc::commutator(&ja.reflected(), &jb.reflected())?.spectral_norm();
    if base > tol {
        return Err(Error::NotInProximalSet {
            commutator_norm: base,
            tol,
        });
    }
    let n = a.n();
    let eye = Matrix::identity(n);
    let mut steps = Vec::with_capacity(k_max);
    let mut passed = true;
    for k in 1..=k_max {
        let t = 1.0 / k as f64;
        // R ↦ (1−t)R + tI corresponds to J ↦ (1−t)J + tI.
        let jak = ResolventMatrix::new(ja.matrix().scale(1.0 - t).add(&eye.scale(t)))?;
        let jbk = ResolventMatrix::new(jb.matrix().scale(1.0 - t).add(&eye.scale(t)))?;
        let ak = LinearRelation::from_resolvent(&jak);
        let bk = LinearRelation::from_resolvent(&jbk);
        let dist_to_limit = ak.dist(a)? + bk.dist(b)?;
        let commutator_norm =
            drcalc::commutator(&jak.reflected(), &jbk.reflected())?.spectral_norm();
        let in_proximal_set = commutator_norm <= tol;
        passed &= in_proximal_set && dist_to_limit <= 2.0 * t + 1e-9;
        steps.push(ClosednessStep {
            k,
            dist_to_limit,
            commutator_norm,
            in_proximal_set,
        });
    }
    let limit_proximal = drcalc::dr_operator(a, b)?.proximal;
    passed &= limit_proximal;
    Ok(ClosednessReport {
        steps,
        limit_proximal,
        passed,
    })
}
