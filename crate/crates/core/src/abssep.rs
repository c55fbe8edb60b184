//! Absolutely-PPT spectra: orderings of the products `α_k²`, `±α_kα_l`, the
//! associated eigenvalue matrices, the special unitaries built from each
//! ordering, and separability certificates for `UΛU*`.
//!
//! Internally indices are 0-based; [`OrderingTable`]'s `Display` prints the
//! conventional 1-based form.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cldui::{extract_pair, partial_transpose};
use crate::construct::{decompose_comparison, ConstructorOutcome, Failure, Status};
use crate::error::{Error, Result};
use crate::linalg::{self, real, ComplexMatrix, DEFAULT_PSD_TOL};
use crate::pairs::PairXY;

pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 5;
/// Sample budget of [`default_orderings`].
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Seed of [`default_orderings`].
pub const DEFAULT_SEED: u64 = 0x5eed_0a75;
/// Samples whose sorted products come closer than this (relative) are redrawn.
pub const TIE_GAP: f64 = 1e-6;
/// Eigenvalues down to `-NEGATIVE_TOL · max(1, max |λ|)` are clamped to zero.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// One entry of an ordering of the `n²` products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    /// `α_k²`
    Square(usize),
    /// `+α_k α_l`, `k < l`
    Plus(usize, usize),
    /// `-α_k α_l`, `k < l`
    Minus(usize, usize),
}

impl Slot {
    fn value(self, alpha: &[f64]) -> f64 {
        match self {
            Self::Square(k) => alpha[k] * alpha[k],
            Self::Plus(k, l) => alpha[k] * alpha[l],
            Self::Minus(k, l) => -alpha[k] * alpha[l],
        }
    }

    fn all(n: usize) -> Vec<Slot> {
        let mut slots: Vec<Slot> = (0..n).map(Slot::Square).collect();
        for k in 0..n {
            for l in (k + 1)..n {
                slots.push(Slot::Plus(k, l));
                slots.push(Slot::Minus(k, l));
            }
        }
        slots
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Square(k) => write!(f, "a{}^2", k + 1),
            Self::Plus(k, l) => write!(f, "a{}a{}", k + 1, l + 1),
            Self::Minus(k, l) => write!(f, "-a{}a{}", k + 1, l + 1),
        }
    }
}

/// A realizable descending order of the products `α_k²`, `±α_kα_l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingTable {
    pub n: usize,
    /// Slots from largest to smallest product.
    pub slots: Vec<Slot>,
    /// Strictly decreasing positive `α` inducing this order (empty if none is known).
    pub witness: Vec<f64>,
}

impl OrderingTable {
    /// Validates the slot multiset and, if present, the witness.
    pub fn new(n: usize, slots: Vec<Slot>, witness: Vec<f64>) -> Result<Self> {
        let table = Self { n, slots, witness };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.slots.len() != n * n {
            return Err(Error::InvalidOrdering(format!(
                "expected {} slots, found {}",
                n * n,
                self.slots.len()
            )));
        }
        let mut sorted = self.slots.clone();
        sorted.sort_unstable();
        let mut expected = Slot::all(n);
        expected.sort_unstable();
        if sorted != expected {
            return Err(Error::InvalidOrdering(
                "slots must contain each square once and each ± product of k < l once".into(),
            ));
        }
        if !self.witness.is_empty() {
            if self.witness.len() != n {
                return Err(Error::InvalidOrdering(format!(
                    "witness has {} entries, expected {n}",
                    self.witness.len()
                )));
            }
            let values: Vec<f64> = self.slots.iter().map(|s| s.value(&self.witness)).collect();
            if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
                return Err(Error::InvalidOrdering(format!(
                    "witness does not induce the order at positions {} and {}",
                    i + 1,
                    i + 2
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for OrderingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" >= ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if (MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Samples `α` (sorted absolute values of standard normals), records each
/// induced ordering with one witness, and returns them in canonical
/// (lexicographic slot) order.
pub fn enumerate_orderings(n: usize, samples: usize, seed: u64) -> Result<Vec<OrderingTable>> {
    check_dimension(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = Slot::all(n);
    let mut found: BTreeMap<Vec<Slot>, Vec<f64>> = BTreeMap::new();
    let mut alpha = vec![0.0; n];
    let mut drawn = 0;
    while drawn < samples {
        for a in &mut alpha {
            let z: f64 = StandardNormal.sample(&mut rng);
            *a = z.abs();
        }
        alpha.sort_unstable_by(|a, b| b.total_cmp(a));
        let mut scored: Vec<(f64, Slot)> = all.iter().map(|&s| (s.value(&alpha), s)).collect();
        scored.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        let top = scored[0].0;
        let tied = alpha.windows(2).any(|w| w[0] - w[1] <= TIE_GAP * top.sqrt())
            || scored.windows(2).any(|w| w[0].0 - w[1].0 <= TIE_GAP * top);
        if tied {
            continue;
        }
        drawn += 1;
        let slots: Vec<Slot> = scored.into_iter().map(|(_, s)| s).collect();
        found.entry(slots).or_insert_with(|| alpha.clone());
    }
    Ok(found
        .into_iter()
        .map(|(slots, witness)| OrderingTable { n, slots, witness })
        .collect())
}

/// Orderings from [`DEFAULT_SAMPLES`] seeded samples, computed once per `n`.
pub fn default_orderings(n: usize) -> Result<&'static [OrderingTable]> {
    static CACHE: [OnceLock<Vec<OrderingTable>>; MAX_DIMENSION + 1] = [const { OnceLock::new() }; MAX_DIMENSION + 1];
    check_dimension(n)?;
    Ok(CACHE[n].get_or_init(|| enumerate_orderings(n, DEFAULT_SAMPLES, DEFAULT_SEED).expect("supported dimension")))
}

fn check_spectrum(n: usize, lambdas: &[f64]) -> Result<()> {
    if lambdas.len() != n * n {
        return Err(Error::LengthMismatch {
            expected: n * n,
            found: lambdas.len(),
        });
    }
    if let Some((i, _)) = lambdas.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    if let Some(i) = lambdas.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::NotSorted(i + 1));
    }
    Ok(())
}

/// Symmetric matrix pairing the reversed spectrum `λ_{n²}, …, λ_1` with the
/// slots: `2λ` on the diagonal for squares, `λ_+ - λ_-` off the diagonal.
pub fn l_map_matrix(ordering: &OrderingTable, lambdas: &[f64]) -> Result<ComplexMatrix> {
    let n = ordering.n;
    check_spectrum(n, lambdas)?;
    let last = n * n - 1;
    let mut l = ComplexMatrix::zeros(n, n);
    for (s, slot) in ordering.slots.iter().enumerate() {
        let lambda = lambdas[last - s];
        match *slot {
            Slot::Square(k) => l[(k, k)] += real(2.0 * lambda),
            Slot::Plus(k, m) => {
                l[(k, m)] += real(lambda);
                l[(m, k)] += real(lambda);
            }
            Slot::Minus(k, m) => {
                l[(k, m)] -= real(lambda);
                l[(m, k)] -= real(lambda);
            }
        }
    }
    Ok(l)
}

/// Clamps tiny negatives and sorts descending.
pub fn prepare_spectrum(lambdas: &[f64]) -> Result<Vec<f64>> {
    let scale = lambdas.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::with_capacity(lambdas.len());
    for (index, &value) in lambdas.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { row: index, col: 0 });
        }
        if value < -NEGATIVE_TOL * scale {
            return Err(Error::NegativeEigenvalue { index, value });
        }
        out.push(value.max(0.0));
    }
    out.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsPptReport {
    pub passes: bool,
    /// Index of the first ordering whose matrix is not PSD.
    pub failing_ordering: Option<usize>,
    /// Smallest eigenvalue of each ordering's matrix.
    pub min_eigenvalues: Vec<f64>,
}

/// Absolutely-PPT test against the default orderings of dimension `n`.
pub fn abs_ppt_check(n: usize, lambdas: &[f64]) -> Result<AbsPptReport> {
    abs_ppt_check_with(default_orderings(n)?, n, lambdas)
}

pub fn abs_ppt_check_with(orderings: &[OrderingTable], n: usize, lambdas: &[f64]) -> Result<AbsPptReport> {
    check_dimension(n)?;
    if lambdas.len() != n * n {
        return Err(Error::LengthMismatch {
            expected: n * n,
            found: lambdas.len(),
        });
    }
    let spectrum = prepare_spectrum(lambdas)?;
    let mut min_eigenvalues = Vec::with_capacity(orderings.len());
    let mut failing_ordering = None;
    for (j, ordering) in orderings.iter().enumerate() {
        let vals = linalg::hermitian_eigenvalues(&l_map_matrix(ordering, &spectrum)?)?;
        if !linalg::psd_from_spectrum(&vals, DEFAULT_PSD_TOL) && failing_ordering.is_none() {
            failing_ordering = Some(j);
        }
        min_eigenvalues.push(vals.last().copied().unwrap_or(0.0));
    }
    Ok(AbsPptReport {
        passes: failing_ordering.is_none(),
        failing_ordering,
        min_eigenvalues,
    })
}

/// Real orthogonal `U` whose column `m` (eigenvalue `λ_m`) is the symmetric,
/// antisymmetric or product vector of the slot `n² - 1 - m`.
pub fn special_unitary(ordering: &OrderingTable) -> Result<ComplexMatrix> {
    ordering.validate()?;
    let n = ordering.n;
    let dim = n * n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for m in 0..dim {
        match ordering.slots[dim - 1 - m] {
            Slot::Square(k) => u[(k * n + k, m)] = real(1.0),
            Slot::Plus(k, l) => {
                u[(k * n + l, m)] = real(h);
                u[(l * n + k, m)] = real(h);
            }
            Slot::Minus(k, l) => {
                u[(k * n + l, m)] = real(h);
                u[(l * n + k, m)] = real(-h);
            }
        }
    }
    Ok(u)
}

/// `U diag(λ) U*`.
pub fn special_state(ordering: &OrderingTable, lambdas: &[f64]) -> Result<ComplexMatrix> {
    check_spectrum(ordering.n, lambdas)?;
    let u = special_unitary(ordering)?;
    let scaled = ComplexMatrix::from_fn(u.rows(), u.cols(), |r, c| u[(r, c)] * lambdas[c]);
    scaled.matmul(&u.adjoint())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecialCertificate {
    /// CLDUI pair of `σ = (id ⊗ T)(UΛU*)`.
    pub pair: PairXY,
    pub outcome: ConstructorOutcome,
}

/// Certifies separability of `σ = (id ⊗ T)(UΛU*)` (hence of `UΛU*`) through
/// the comparison-matrix constructor; `NotApplicable` if the ordering's
/// matrix is not PSD.
pub fn certify_special_separable(ordering: &OrderingTable, lambdas: &[f64]) -> Result<SpecialCertificate> {
    let n = ordering.n;
    check_spectrum(n, lambdas)?;
    if let Some((index, &value)) = lambdas.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeEigenvalue { index, value });
    }
    let l = l_map_matrix(ordering, lambdas)?;
    let sigma = partial_transpose(&special_state(ordering, lambdas)?, n)?;
    let pair =
        extract_pair(&sigma, n).map_err(|e| Error::Construction(format!("partial transpose is not CLDUI: {e}")))?;

    let scale = lambdas.first().copied().unwrap_or(0.0).max(1.0);
    let tol = 1e-12 * scale;
    let x = pair.x();
    for i in 0..n {
        for j in 0..n {
            let expected = l[(i, j)] * 0.5;
            if (x[(i, j)] - expected).norm() > tol {
                return Err(Error::Construction(format!(
                    "X[{},{}] = {} does not match the ordering matrix ({})",
                    i + 1,
                    j + 1,
                    x[(i, j)],
                    expected
                )));
            }
            if i != j && x[(i, j)].re > tol {
                return Err(Error::Construction(format!(
                    "off-diagonal X[{},{}] = {} is positive",
                    i + 1,
                    j + 1,
                    x[(i, j)].re
                )));
            }
        }
    }

    let vals = linalg::hermitian_eigenvalues(&l)?;
    if !linalg::psd_from_spectrum(&vals, DEFAULT_PSD_TOL) {
        let min_eigenvalue = vals.last().copied().unwrap_or(0.0);
        let outcome = ConstructorOutcome {
            status: Status::NotApplicable,
            decomposition: None,
            method: crate::construct::Method::Comparison,
            permutation: (0..n).collect(),
            failure: Some(Failure::AbsPptViolated { min_eigenvalue }),
            residual: None,
        };
        return Ok(SpecialCertificate { pair, outcome });
    }
    let outcome = decompose_comparison(&pair);
    Ok(SpecialCertificate { pair, outcome })
}
