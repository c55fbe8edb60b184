//! Conjugate local diagonal unitary invariant (CLDUI) states.
//!
//! Basis convention: `e_i ⊗ e_k` is flat index `i·n + k`. The state of a pair
//! carries `x_ij` at `((i,i),(j,j))` and, for `i ≠ j`, `y_ij` on the diagonal
//! at `((i,j),(i,j))`. Every criterion has an `O(n²)` coefficient-level
//! implementation; the dense `n²×n²` matrix is built lazily for cross-checks.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::{decompose_auto, ConstructorOutcome, Failure};
use crate::error::{Error, Result};
use crate::linalg::{self, real, Complex64, ComplexMatrix, ComplexVector};
use crate::pairs::{
    check_d, check_necessary, coherence_gaps, gap_passes, Condition, PairXY, PcpDecomposition, Witness,
};

/// Entries off the invariant pattern larger than this (relative to the
/// largest entry) make a dense matrix non-CLDUI.
pub const PATTERN_TOL: f64 = 1e-10;
/// Relative Frobenius tolerance of the sampled invariance test.
pub const INVARIANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CldulState {
    pair: PairXY,
    dense: OnceLock<ComplexMatrix>,
}

impl CldulState {
    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn pair(&self) -> &PairXY {
        &self.pair
    }

    /// The `n²×n²` realization, built on first use.
    pub fn dense(&self) -> &ComplexMatrix {
        self.dense.get_or_init(|| cldui_matrix(&self.pair))
    }

    /// `tr ρ = Σ_i x_ii + Σ_{i≠j} y_ij`.
    pub fn trace(&self) -> f64 {
        let (x, y) = (self.pair.x(), self.pair.y());
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| if i == j { x[(i, i)].re } else { y[(i, j)].re })
            .sum()
    }

    /// The same state scaled to unit trace (unchanged if the trace is zero).
    pub fn normalized(&self) -> Self {
        let t = self.trace();
        if t <= 0.0 {
            return self.clone();
        }
        let (x, y) = (self.pair.x().scale(1.0 / t), self.pair.y().scale(1.0 / t));
        Self {
            pair: PairXY::new(x, y).expect("same shapes"),
            dense: OnceLock::new(),
        }
    }
}

impl PartialEq for CldulState {
    fn eq(&self, other: &Self) -> bool {
        self.pair == other.pair
    }
}

fn require_state(pair: &PairXY) -> Result<()> {
    check_necessary(pair).require_through(Condition::C)
}

/// The CLDUI state of a pair satisfying (a)–(c).
pub fn build_state(pair: &PairXY) -> Result<CldulState> {
    require_state(pair)?;
    Ok(CldulState {
        pair: pair.clone(),
        dense: OnceLock::new(),
    })
}

/// Dense realization of the pair without validating it.
pub fn cldui_matrix(pair: &PairXY) -> ComplexMatrix {
    let n = pair.n();
    let (x, y) = (pair.x(), pair.y());
    let mut rho = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            rho[(i * n + i, j * n + j)] = x[(i, j)];
            if i != j {
                rho[(i * n + j, i * n + j)] = y[(i, j)];
            }
        }
    }
    rho
}

fn check_shape(rho: &ComplexMatrix, n: usize) -> Result<()> {
    let rows = rho.ensure_square()?;
    if rows != n * n {
        return Err(Error::WrongDimension {
            expected: n * n,
            found: rows,
        });
    }
    Ok(())
}

/// Whether `((i,k),(j,l))` belongs to the invariant pattern `{i,l} = {j,k}`.
fn in_pattern(n: usize, r: usize, c: usize) -> bool {
    let (i, k, j, l) = (r / n, r % n, c / n, c % n);
    (i == k && j == l) || (i == j && k == l)
}

/// Local dimension `n` with `n² = dim`, if any.
pub fn local_dimension(dim: usize) -> Option<usize> {
    let n = (dim as f64).sqrt().round() as usize;
    (n * n == dim).then_some(n)
}

/// Reads `(X, Y)` back from a dense CLDUI matrix; `y_ii := x_ii`.
pub fn extract_pair(rho: &ComplexMatrix, n: usize) -> Result<PairXY> {
    check_shape(rho, n)?;
    let tol = PATTERN_TOL * rho.max_abs();
    for r in 0..n * n {
        for c in 0..n * n {
            let magnitude = rho[(r, c)].norm();
            if magnitude > tol && !in_pattern(n, r, c) {
                return Err(Error::NotCldul {
                    row: r,
                    col: c,
                    magnitude,
                });
            }
        }
    }
    let x = ComplexMatrix::from_fn(n, n, |i, j| rho[(i * n + i, j * n + j)]);
    let y = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            rho[(i * n + i, i * n + i)]
        } else {
            rho[(i * n + j, i * n + j)]
        }
    });
    PairXY::new(x, y)
}

/// Projection onto the invariant pattern: the exact average of
/// `(U⊗Ū) ρ (U⊗Ū)*` over all diagonal unitaries `U`.
pub fn diagonal_twirl(rho: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    check_shape(rho, n)?;
    Ok(ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if in_pattern(n, r, c) {
            rho[(r, c)]
        } else {
            real(0.0)
        }
    }))
}

/// Probabilistic invariance test: conjugates by `samples` random diagonal
/// unitaries `U ⊗ Ū` (seeded phases) and compares within
/// [`INVARIANCE_TOL`] relative Frobenius error.
pub fn is_diagonal_unitary_invariant(rho: &ComplexMatrix, n: usize, samples: usize, seed: u64) -> Result<bool> {
    check_shape(rho, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = INVARIANCE_TOL * rho.frobenius_norm();
    for _ in 0..samples {
        let phases: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        // (U⊗Ū) has diagonal entry exp(i(θ_i - θ_k)) at (i,k)
        let u: Vec<Complex64> = (0..n * n)
            .map(|r| Complex64::from_polar(1.0, phases[r / n] - phases[r % n]))
            .collect();
        let mut residual = 0.0;
        for r in 0..n * n {
            for c in 0..n * n {
                let z = rho[(r, c)];
                residual += (u[r] * z * u[c].conj() - z).norm_sqr();
            }
        }
        if residual.sqrt() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(id ⊗ T)`: entry `((i,k),(j,l))` moves to `((i,l),(j,k))`.
pub fn partial_transpose(rho: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    check_shape(rho, n)?;
    Ok(ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, l, j, k) = (r / n, r % n, c / n, c % n);
        rho[(i * n + k, j * n + l)]
    }))
}

/// Realignment `R(e_i e_j* ⊗ e_k e_l*) = e_i e_k* ⊗ e_j e_l*`.
pub fn realign_map(rho: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    check_shape(rho, n)?;
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for r in 0..n * n {
        for c in 0..n * n {
            let (i, k, j, l) = (r / n, r % n, c / n, c % n);
            out[(i * n + j, k * n + l)] = rho[(r, c)];
        }
    }
    Ok(out)
}

/// PPT test at coefficient level: `|x_ij|² <= y_ij y_ji` for all `i < j`.
pub fn ppt_check(pair: &PairXY) -> Result<bool> {
    require_state(pair)?;
    Ok(check_d(pair).is_none())
}

/// First PPT violation, if any.
pub fn ppt_violation(pair: &PairXY) -> Result<Option<Witness>> {
    require_state(pair)?;
    Ok(check_d(pair))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealignmentReport {
    /// `||X||_1 - ||X||_tr`
    pub lhs: f64,
    /// `||Y||_1 - ||Y||_tr`
    pub rhs: f64,
    pub passes: bool,
}

/// Realignment criterion at coefficient level.
pub fn realignment_check(pair: &PairXY) -> Result<RealignmentReport> {
    require_state(pair)?;
    let (lhs, rhs) = coherence_gaps(pair);
    Ok(RealignmentReport {
        lhs,
        rhs,
        passes: gap_passes(lhs, rhs, pair.y()),
    })
}

/// Dense cross-check of the criteria, computed from the `n²×n²` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenseReport {
    pub psd: bool,
    pub trace: f64,
    pub ppt: bool,
    pub realigned_trace_norm: f64,
    pub realignment_passes: bool,
}

pub fn dense_report(rho: &ComplexMatrix, n: usize) -> Result<DenseReport> {
    let psd = linalg::is_psd(rho, linalg::DEFAULT_PSD_TOL)?;
    let ppt = linalg::is_psd(&partial_transpose(rho, n)?, linalg::DEFAULT_PSD_TOL)?;
    let trace = rho.trace().re;
    let realigned_trace_norm = linalg::trace_norm(&realign_map(rho, n)?);
    Ok(DenseReport {
        psd,
        trace,
        ppt,
        realigned_trace_norm,
        realignment_passes: realigned_trace_norm <= trace + 1e-8,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Entanglement {
    Ppt {
        row: usize,
        col: usize,
        x_abs_sq: f64,
        y_product: f64,
    },
    Realignment {
        lhs: f64,
        rhs: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Certified by a verified decomposition of the pair.
    Separable(ConstructorOutcome),
    Entangled(Entanglement),
    /// Every necessary criterion holds but no constructor applies.
    Inconclusive(Failure),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Separable(_) => "separable",
            Self::Entangled(_) => "entangled",
            Self::Inconclusive(_) => "inconclusive",
        }
    }
}

/// PPT, then realignment, then the constructors.
pub fn separability_verdict(pair: &PairXY) -> Result<Verdict> {
    if let Some(Witness::EntryBound {
        row,
        col,
        x_abs_sq,
        y_product,
    }) = ppt_violation(pair)?
    {
        return Ok(Verdict::Entangled(Entanglement::Ppt {
            row,
            col,
            x_abs_sq,
            y_product,
        }));
    }
    let realign = realignment_check(pair)?;
    if !realign.passes {
        return Ok(Verdict::Entangled(Entanglement::Realignment {
            lhs: realign.lhs,
            rhs: realign.rhs,
        }));
    }
    let outcome = decompose_auto(pair);
    if outcome.is_decomposed() {
        Ok(Verdict::Separable(outcome))
    } else {
        Ok(Verdict::Inconclusive(outcome.failure.unwrap_or(Failure::Internal {
            message: "no constructor applies".into(),
        })))
    }
}

/// Product vectors `(v_k, w_k)` whose pattern-projected mixture
/// `Σ_k twirl(|v_k⊗w_k⟩⟨v_k⊗w_k|)` equals the state of the reconstructed pair.
pub fn separable_terms(dec: &PcpDecomposition) -> Vec<(ComplexVector, ComplexVector)> {
    dec.terms().map(|(v, w)| (v.clone(), w.clone())).collect()
}

/// `|v⊗w⟩⟨v⊗w|`.
pub fn product_state(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    let n = v.dim();
    let m = w.dim();
    let psi = ComplexVector::from((0..n * m).map(|r| v[r / m] * w[r % m]).collect::<Vec<_>>());
    psi.outer(&psi)
}
