//! Constructors that turn sufficient conditions into explicit, verified
//! PCP decompositions.
//!
//! Every constructor re-checks its output with [`verify_decomposition`](crate::pairs::verify_decomposition) at
//! [`VERIFY_TOL`] and never reports `Decomposed` for a candidate that fails.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, real, Complex64, ComplexMatrix, ComplexVector, DEFAULT_PSD_TOL};
use crate::pairs::{check_necessary, decomposition_residual, Condition, PairXY, PcpDecomposition};

/// Frobenius tolerance every returned decomposition must meet.
pub const VERIFY_TOL: f64 = 1e-8;
/// Radicands in `[-RADICAND_TOL, 0)` are clamped to zero; scaled by the entry scale.
pub const RADICAND_TOL: f64 = 1e-12;
/// Relative off-diagonal magnitude below which `X` counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-10;
/// Largest dimension for which the recursive constructor searches all `n!` orderings.
pub const MAX_PERMUTATION_SEARCH: usize = 7;
/// Slack allowed on diagonal dominance after Perron scaling.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "diag")]
    DiagonalX,
    #[serde(rename = "2x2")]
    TwoByTwo,
    #[serde(rename = "recursive")]
    Recursive,
    #[serde(rename = "comparison")]
    Comparison,
    #[serde(rename = "isotropic")]
    Isotropic,
    #[serde(rename = "auto")]
    Auto,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::DiagonalX => "diag",
            Self::TwoByTwo => "2x2",
            Self::Recursive => "recursive",
            Self::Comparison => "comparison",
            Self::Isotropic => "isotropic",
            Self::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "diag" => Self::DiagonalX,
            "2x2" => Self::TwoByTwo,
            "recursive" => Self::Recursive,
            "comparison" => Self::Comparison,
            "isotropic" => Self::Isotropic,
            "auto" => Self::Auto,
            other => return Err(Error::Document(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Decomposed,
    NotApplicable,
    ConditionsViolated,
}

/// Why a constructor did not produce a decomposition. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    Conditions {
        condition: Condition,
        detail: String,
    },
    NotDiagonal {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    WrongDimension {
        expected: usize,
        found: usize,
    },
    /// Negative quantity under a square root while building term `term`.
    Radicand {
        term: usize,
        entry: usize,
        value: f64,
    },
    /// Vanishing denominator with a non-vanishing numerator.
    Denominator {
        term: usize,
        entry: usize,
    },
    PermutationLimit {
        n: usize,
    },
    AllPermutationsFailed {
        tried: usize,
        identity: Box<Failure>,
    },
    ComparisonNotPsd {
        min_eigenvalue: f64,
    },
    AbsPptViolated {
        min_eigenvalue: f64,
    },
    Unverified {
        residual: f64,
    },
    Internal {
        message: String,
    },
    Methods {
        attempts: Vec<(Method, Failure)>,
    },
}

fn quantity(term: usize, entry: usize) -> String {
    let q = if entry >= term { 'v' } else { 'w' };
    format!("{q}_{{{},{}}}", term + 1, entry + 1)
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Conditions { condition, detail } => write!(f, "condition {condition} fails: {detail}"),
            Self::NotDiagonal { row, col, magnitude } => {
                write!(f, "X is not diagonal: |x_{},{}| = {magnitude:e}", row + 1, col + 1)
            }
            Self::WrongDimension { expected, found } => {
                write!(f, "requires n = {expected}, got n = {found}")
            }
            Self::Radicand { term, entry, value } => write!(
                f,
                "negative radicand {value} while computing {}",
                quantity(*term, *entry)
            ),
            Self::Denominator { term, entry } => {
                write!(f, "zero denominator while computing {}", quantity(*term, *entry))
            }
            Self::PermutationLimit { n } => write!(
                f,
                "permutation search is limited to n <= {MAX_PERMUTATION_SEARCH} (n = {n})"
            ),
            Self::AllPermutationsFailed { tried, identity } => {
                write!(f, "all {tried} orderings failed; identity ordering: {identity}")
            }
            Self::ComparisonNotPsd { min_eigenvalue } => {
                write!(f, "comparison matrix is not PSD (min eigenvalue {min_eigenvalue:.6e})")
            }
            Self::AbsPptViolated { min_eigenvalue } => {
                write!(f, "ordering matrix is not PSD (min eigenvalue {min_eigenvalue:.6e})")
            }
            Self::Unverified { residual } => {
                write!(f, "candidate failed verification (residual {residual:e})")
            }
            Self::Internal { message } => f.write_str(message),
            Self::Methods { attempts } => {
                for (i, (m, why)) in attempts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{m}: {why}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructorOutcome {
    pub status: Status,
    pub decomposition: Option<PcpDecomposition>,
    pub method: Method,
    /// Index ordering used; `perm[i]` is the original index placed at position `i`.
    pub permutation: Vec<usize>,
    pub failure: Option<Failure>,
    /// Relative reconstruction residual of the returned decomposition.
    pub residual: Option<f64>,
}

impl ConstructorOutcome {
    fn not_applicable(method: Method, n: usize, failure: Failure) -> Self {
        Self {
            status: Status::NotApplicable,
            decomposition: None,
            method,
            permutation: identity(n),
            failure: Some(failure),
            residual: None,
        }
    }

    fn violated(method: Method, n: usize, condition: Condition, detail: String) -> Self {
        Self {
            status: Status::ConditionsViolated,
            decomposition: None,
            method,
            permutation: identity(n),
            failure: Some(Failure::Conditions { condition, detail }),
            residual: None,
        }
    }

    pub fn is_decomposed(&self) -> bool {
        self.status == Status::Decomposed
    }
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Accepts `dec` only if it reconstructs `pair` within [`VERIFY_TOL`].
fn finish(method: Method, dec: PcpDecomposition, pair: &PairXY, permutation: Vec<usize>) -> ConstructorOutcome {
    match decomposition_residual(&dec, pair) {
        Ok(residual) if residual <= VERIFY_TOL => ConstructorOutcome {
            status: Status::Decomposed,
            decomposition: Some(dec),
            method,
            permutation,
            failure: None,
            residual: Some(residual),
        },
        Ok(residual) => ConstructorOutcome::not_applicable(method, pair.n(), Failure::Unverified { residual }),
        Err(e) => ConstructorOutcome::not_applicable(method, pair.n(), Failure::Internal { message: e.to_string() }),
    }
}

/// Checks conditions up to `last`, returning the violation outcome on failure.
fn precheck(method: Method, pair: &PairXY, last: Condition) -> Option<ConstructorOutcome> {
    let report = check_necessary(pair);
    match report.require_through(last) {
        Ok(()) => None,
        Err(Error::ConditionsViolated { condition, detail }) => {
            Some(ConstructorOutcome::violated(method, pair.n(), condition, detail))
        }
        Err(e) => Some(ConstructorOutcome::not_applicable(
            method,
            pair.n(),
            Failure::Internal { message: e.to_string() },
        )),
    }
}

/// Largest off-diagonal entry of `x` if it exceeds the diagonal tolerance.
fn off_diagonal_violation(x: &ComplexMatrix) -> Option<Failure> {
    let tol = DIAGONAL_TOL * x.max_abs().max(1.0);
    let n = x.rows();
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let m = x[(i, j)].norm();
            if i != j && m > tol && worst.is_none_or(|w| m > w.2) {
                worst = Some((i, j, m));
            }
        }
    }
    worst.map(|(row, col, magnitude)| Failure::NotDiagonal { row, col, magnitude })
}

/// The `n²` terms `v_ij = e_i`, `w_ij = sqrt(y_ij) e_j`, which reproduce
/// `(diag(Y), Y)` for any entrywise non-negative `Y`.
pub fn diagonal_terms(y: &ComplexMatrix) -> PcpDecomposition {
    let n = y.rows();
    let mut vs = Vec::with_capacity(n * n);
    let mut ws = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            vs.push(ComplexVector::basis(n, i));
            let mut w = ComplexVector::zeros(n);
            w[j] = real(y[(i, j)].re.max(0.0).sqrt());
            ws.push(w);
        }
    }
    PcpDecomposition::new(vs, ws).unwrap_or_else(|_| PcpDecomposition::zero(n))
}

/// Decomposes `(X, Y)` when `X` is diagonal.
pub fn decompose_diagonal_x(pair: &PairXY) -> ConstructorOutcome {
    let method = Method::DiagonalX;
    if let Some(f) = off_diagonal_violation(pair.x()) {
        return ConstructorOutcome::not_applicable(method, pair.n(), f);
    }
    if let Some(out) = precheck(method, pair, Condition::C) {
        return out;
    }
    finish(method, diagonal_terms(pair.y()), pair, identity(pair.n()))
}

/// Complete characterization for `n = 2`: conditions (a)–(d) suffice.
pub fn decompose_2x2(pair: &PairXY) -> ConstructorOutcome {
    let method = Method::TwoByTwo;
    if pair.n() != 2 {
        return ConstructorOutcome::not_applicable(
            method,
            pair.n(),
            Failure::WrongDimension {
                expected: 2,
                found: pair.n(),
            },
        );
    }
    if let Some(out) = precheck(method, pair, Condition::D) {
        return out;
    }
    let (x, y) = (pair.x(), pair.y());
    let x11 = x[(0, 0)].re;
    let x22 = x[(1, 1)].re;
    let x21 = x[(1, 0)];
    let y12 = y[(0, 1)].re;
    let y21 = y[(1, 0)].re;

    if x11 <= 0.0 || y12 <= 0.0 {
        // X is forced to be diagonal here.
        let dec = diagonal_terms(y);
        let mut out = finish(method, dec, pair, identity(2));
        if out.status == Status::NotApplicable {
            out.failure = off_diagonal_violation(x).or(out.failure);
        }
        return out;
    }

    let a = x21.norm_sqr();
    let r1 = (y21 - a / y12).max(0.0);
    let r2 = (x22 - a / x11).max(0.0);
    let v1 = ComplexVector::from(vec![real(1.0), x21 / (x11 * y12).sqrt()]);
    let w1 = ComplexVector::from_real(&[x11.sqrt(), y12.sqrt()]);
    let v2 = ComplexVector::basis(2, 1);
    let w2 = ComplexVector::from_real(&[r1.sqrt(), r2.sqrt()]);
    let dec = PcpDecomposition::new(vec![v1, v2], vec![w1, w2]).expect("two terms of dimension 2");
    finish(method, dec, pair, identity(2))
}

/// Row-by-row construction. Returns the decomposition of `pair` as given
/// (no reordering) or the first quantity that breaks it.
fn recursive_attempt(pair: &PairXY) -> std::result::Result<PcpDecomposition, Failure> {
    let n = pair.n();
    let (x, y) = (pair.x(), pair.y());
    let tol = RADICAND_TOL * pair.entry_scale();
    let zero = real(0.0);
    let mut vs: Vec<Vec<Complex64>> = vec![vec![zero; n]; n];
    let mut ws: Vec<Vec<Complex64>> = vec![vec![zero; n]; n];

    for k in 0..n {
        // d_{k,j} and the radicands y_{k,j} - d_{k,j}
        let mut radicand = vec![0.0; n];
        for (j, r) in radicand.iter_mut().enumerate() {
            let d: f64 = (0..k).map(|i| vs[i][k].norm_sqr() * ws[i][j].norm_sqr()).sum();
            *r = y[(k, j)].re - d;
        }
        let order = (k..n).chain(0..k);
        for j in order {
            if radicand[j] < -tol {
                return Err(Failure::Radicand {
                    term: k,
                    entry: j,
                    value: radicand[j],
                });
            }
            radicand[j] = radicand[j].max(0.0);
            if j < k {
                continue;
            }
            let c: Complex64 = (0..k).map(|i| vs[i][j] * ws[i][j] * (vs[i][k] * ws[i][k]).conj()).sum();
            let num = x[(j, k)] - c;
            vs[k][j] = if radicand[j] <= tol {
                if num.norm() > tol {
                    return Err(Failure::Denominator { term: k, entry: j });
                }
                zero
            } else {
                num / radicand[j].sqrt()
            };
        }
        let vkk = vs[k][k];
        if vkk.norm() == 0.0 {
            // The k-th residual row is empty; the term must vanish entirely.
            if let Some(j) = (0..n).find(|&j| radicand[j] > tol) {
                return Err(Failure::Denominator { term: k, entry: j });
            }
            continue;
        }
        for j in 0..n {
            ws[k][j] = real(radicand[j].sqrt()) / vkk;
        }
    }
    let vs = vs.into_iter().map(ComplexVector::from).collect();
    let ws = ws.into_iter().map(ComplexVector::from).collect();
    PcpDecomposition::new(vs, ws).map_err(|e| Failure::Internal { message: e.to_string() })
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Recursive constructor, optionally retried under every index ordering
/// (lexicographic, identity first) for `n <= MAX_PERMUTATION_SEARCH`.
pub fn decompose_recursive(pair: &PairXY, search_permutations: bool) -> ConstructorOutcome {
    let method = Method::Recursive;
    if let Some(out) = precheck(method, pair, Condition::C) {
        return out;
    }
    let n = pair.n();
    let identity_failure = match recursive_attempt(pair) {
        Ok(dec) => {
            let out = finish(method, dec, pair, identity(n));
            if out.is_decomposed() {
                return out;
            }
            out.failure.expect("failed outcome carries a failure")
        }
        Err(f) => f,
    };
    if !search_permutations {
        return ConstructorOutcome::not_applicable(method, n, identity_failure);
    }
    if n > MAX_PERMUTATION_SEARCH {
        return ConstructorOutcome::not_applicable(method, n, Failure::PermutationLimit { n });
    }
    let mut perm = identity(n);
    let mut tried = 1;
    while next_permutation(&mut perm) {
        tried += 1;
        if let Ok(dec) = recursive_attempt(&pair.permuted(&perm)) {
            let out = finish(method, dec.unpermuted(&perm), pair, perm.clone());
            if out.is_decomposed() {
                return out;
            }
        }
    }
    ConstructorOutcome::not_applicable(
        method,
        n,
        Failure::AllPermutationsFailed {
            tried,
            identity: Box::new(identity_failure),
        },
    )
}

/// `M(A)`: diagonal `|a_ii|`, off-diagonal `-|a_ij|`.
pub fn comparison_matrix(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let m = a[(i, j)].norm();
        real(if i == j { m } else { -m })
    }))
}

/// Connected components of the off-diagonal support graph of `a`.
fn support_components(a: &ComplexMatrix, tol: f64) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && (a[(i, j)].norm() > tol || a[(j, i)].norm() > tol) {
                    seen[j] = true;
                    comp.push(j);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Eigenvector for the smallest eigenvalue of a real symmetric block, made
/// real and positive-summing and normalized to max entry 1.
fn bottom_eigenvector(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (_, vecs) = linalg::hermitian_eigen(m)?;
    let last = m.rows() - 1;
    let col: Vec<Complex64> = (0..m.rows()).map(|i| vecs[(i, last)]).collect();
    let pivot = col
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let phase = pivot.conj() / pivot.norm();
    let mut u: Vec<f64> = col.iter().map(|z| (z * phase).re).collect();
    let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for t in &mut u {
        *t /= top;
    }
    Ok(u)
}

/// Positive diagonal scaling `d` such that `D X D` is diagonally dominant,
/// built from the Perron vector of each irreducible block of `αI - M(X)`.
pub fn perron_scaling(x: &ComplexMatrix) -> Result<Vec<f64>> {
    let m = comparison_matrix(x)?;
    let n = m.rows();
    let vals = linalg::hermitian_eigenvalues(&m)?;
    if !linalg::psd_from_spectrum(&vals, DEFAULT_PSD_TOL) {
        return Err(Error::ComparisonNotPsd {
            min_eigenvalue: vals.last().copied().unwrap_or(0.0),
        });
    }
    let scale = x.max_abs().max(1.0);
    let mut d = vec![1.0; n];
    for comp in support_components(x, 1e-14 * scale) {
        if comp.len() == 1 {
            continue;
        }
        let block = ComplexMatrix::from_fn(comp.len(), comp.len(), |a, b| m[(comp[a], comp[b])]);
        let mut u = bottom_eigenvector(&block)?;
        if u.iter().any(|&t| t <= 1e-12) {
            // near-degenerate Perron root: perturb P by εJ on this block
            let eps = 1e-10 * block.max_abs().max(1.0);
            let perturbed = block.map(|z| z - eps);
            u = bottom_eigenvector(&perturbed)?;
            if u.iter().any(|&t| t <= 0.0) {
                return Err(Error::Construction(
                    "Perron vector of the comparison block is not positive".into(),
                ));
            }
        }
        for (a, &i) in comp.iter().enumerate() {
            d[i] = u[a];
        }
    }
    if let Some(row) = dominance_violation(x, &d) {
        return Err(Error::Construction(format!(
            "scaled matrix is not diagonally dominant in row {}",
            row + 1
        )));
    }
    Ok(d)
}

/// First row where `D X D` fails diagonal dominance beyond [`DOMINANCE_TOL`].
pub fn dominance_violation(x: &ComplexMatrix, d: &[f64]) -> Option<usize> {
    let n = x.rows();
    let rows: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let diag = d[i] * d[i] * x[(i, i)].norm();
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| d[i] * d[j] * x[(i, j)].norm()).sum();
            (diag, off)
        })
        .collect();
    let scale = rows.iter().map(|(a, b)| a + b).fold(1.0, f64::max);
    rows.iter().position(|(diag, off)| diag - off < -DOMINANCE_TOL * scale)
}

/// The pieces produced along the comparison-matrix route, expressed in the
/// original (unscaled) coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonParts {
    pub scaling: Vec<f64>,
    /// Pair-indexed factorization, one column per nonzero `x_{k,l}`, `k < l`.
    pub core: Option<PcpDecomposition>,
    /// Decomposition of the slack `(diag(P), P)`.
    pub slack: Option<PcpDecomposition>,
}

impl ComparisonParts {
    pub fn combined(&self, n: usize) -> PcpDecomposition {
        match (&self.core, &self.slack) {
            (Some(c), Some(s)) => c.clone().concat(s.clone()).expect("same dimension"),
            (Some(c), None) => c.clone(),
            (None, Some(s)) => s.clone(),
            (None, None) => PcpDecomposition::zero(n),
        }
    }
}

/// Unit complex sign with `sign(0) = 1`.
fn complex_sign(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m == 0.0 {
        real(1.0)
    } else {
        z / m
    }
}

/// Runs the comparison-matrix construction without the final verification.
pub fn comparison_parts(pair: &PairXY) -> Result<ComparisonParts> {
    let n = pair.n();
    let d = perron_scaling(pair.x())?;
    let scaled = pair.scaled(&d);
    let (xs, ys) = (scaled.x(), scaled.y());

    // Tight part Y': y'_ij y'_ji = |x_ij|^2 with y'_ij <= y_ij.
    // slack below this is roundoff from the scaling
    let floor = 1e-13 * scaled.entry_scale();
    let keep = |t: f64| if t > floor { t } else { 0.0 };
    let mut tight = ComplexMatrix::zeros(n, n);
    let mut slack = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let a = xs[(i, j)].norm();
            row_sum += a;
            let (yij, yji) = (ys[(i, j)].re.max(0.0), ys[(j, i)].re.max(0.0));
            let t = if yji > 0.0 { a * (yij / yji).sqrt() } else { 0.0 };
            tight[(i, j)] = real(t);
            slack[(i, j)] = real(keep(yij - t));
        }
        tight[(i, i)] = real(row_sum);
        slack[(i, i)] = real(keep(xs[(i, i)].re - row_sum));
    }

    let mut vs = Vec::new();
    let mut ws = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            let xkl = xs[(k, l)];
            if xkl.norm() == 0.0 {
                continue;
            }
            let (ykl, ylk) = (tight[(k, l)].re.powf(0.25), tight[(l, k)].re.powf(0.25));
            let mut v = ComplexVector::zeros(n);
            let mut w = ComplexVector::zeros(n);
            v[k] = complex_sign(xkl) * ykl;
            v[l] = real(ylk);
            w[k] = real(ylk);
            w[l] = real(ykl);
            vs.push(v);
            ws.push(w);
        }
    }

    let unscale: Vec<f64> = d.iter().map(|t| 1.0 / t).collect();
    let core = if vs.is_empty() {
        None
    } else {
        Some(PcpDecomposition::new(vs, ws)?.scaled(&unscale))
    };
    let slack_dec = diagonal_terms(&slack).pruned(0.0);
    let slack_dec = if slack_dec.len() == 1 && slack_dec.vs()[0].is_zero(0.0) {
        None
    } else {
        Some(slack_dec.scaled(&unscale))
    };
    Ok(ComparisonParts {
        scaling: d,
        core,
        slack: slack_dec,
    })
}

/// Decomposes pairs satisfying (a)–(d) whose `X` has a PSD comparison matrix.
pub fn decompose_comparison(pair: &PairXY) -> ConstructorOutcome {
    let method = Method::Comparison;
    if let Some(out) = precheck(method, pair, Condition::D) {
        return out;
    }
    match comparison_parts(pair) {
        Ok(parts) => finish(method, parts.combined(pair.n()), pair, identity(pair.n())),
        Err(Error::ComparisonNotPsd { min_eigenvalue }) => {
            ConstructorOutcome::not_applicable(method, pair.n(), Failure::ComparisonNotPsd { min_eigenvalue })
        }
        Err(e) => ConstructorOutcome::not_applicable(method, pair.n(), Failure::Internal { message: e.to_string() }),
    }
}

/// `X = aI + bJ`, `Y = bI + aJ`.
pub fn isotropic_pair(n: usize, a: f64, b: f64) -> PairXY {
    let id = ComplexMatrix::identity(n);
    let j = ComplexMatrix::ones(n);
    PairXY::new(&id.scale(a) + &j.scale(b), &id.scale(b) + &j.scale(a)).expect("square pair")
}

/// `(c₊, c₋)` for the `b = -1` endpoint of the `a = n` isotropic family.
pub fn isotropic_coefficients(n: usize) -> (f64, f64) {
    let n = n as f64;
    let base = n * n - n + 2.0;
    let root = (n.powi(4) - 2.0 * n.powi(3) + n * n + 4.0 * n).sqrt();
    (((base + root) / 2.0).sqrt(), ((base - root) / 2.0).max(0.0).sqrt())
}

/// Decomposition of `(nI - J, -I + nJ)`.
fn isotropic_lower_endpoint(n: usize) -> PcpDecomposition {
    let (cp, cm) = isotropic_coefficients(n);
    let s = 1.0 / (n as f64).sqrt();
    let (vs, ws) = (0..n)
        .map(|k| {
            let mut v = ComplexVector::ones(n);
            v[k] = real(cp);
            let mut w = ComplexVector::from_real(&vec![-1.0; n]);
            w[k] = real(cm);
            (v.scale(s), w)
        })
        .unzip();
    PcpDecomposition::new(vs, ws).expect("n >= 1 terms")
}

/// Decomposition of `(nI + nJ, nI + nJ)` from its completely positive factorization.
fn isotropic_upper_endpoint(n: usize) -> PcpDecomposition {
    let nf = n as f64;
    let coeff = (nf / (nf + 2.0 + 2.0 * (nf + 1.0).sqrt())).sqrt();
    let (vs, ws): (Vec<_>, Vec<_>) = (0..n)
        .map(|k| {
            let mut x = vec![coeff; n];
            x[k] = coeff * (2.0 + (nf + 1.0).sqrt());
            let root: Vec<f64> = x.iter().map(|t| t.sqrt()).collect();
            (ComplexVector::from_real(&root), ComplexVector::from_real(&root))
        })
        .unzip();
    PcpDecomposition::new(vs, ws).expect("n >= 1 terms")
}

/// Isotropic family: PCP exactly when `a >= 0` and `-a/n <= b <= a`.
pub fn decompose_isotropic(n: usize, a: f64, b: f64) -> ConstructorOutcome {
    let method = Method::Isotropic;
    let nf = n as f64;
    let tol = 1e-12 * a.abs().max(1.0);
    if n == 0 {
        return ConstructorOutcome::not_applicable(method, n, Failure::WrongDimension { expected: 1, found: 0 });
    }
    if a < -tol || b < -a / nf - tol {
        return ConstructorOutcome::violated(
            method,
            n,
            Condition::A,
            format!("aI + bJ is PSD only for a >= 0 and b >= -a/n (a = {a}, b = {b}, n = {n})"),
        );
    }
    if b > a + tol {
        return ConstructorOutcome::violated(
            method,
            n,
            Condition::D,
            format!("|x_ij|^2 <= y_ij y_ji requires b <= a (a = {a}, b = {b})"),
        );
    }
    let pair = isotropic_pair(n, a, b);
    if a <= tol {
        return finish(method, PcpDecomposition::zero(n), &pair, identity(n));
    }
    // rescale to a = n and mix the endpoints b = -1 and b = n
    let b_scaled = (b * nf / a).clamp(-1.0, nf);
    let t = (nf - b_scaled) / (nf + 1.0);
    let lower = isotropic_lower_endpoint(n).scale_terms(t.sqrt());
    let upper = isotropic_upper_endpoint(n).scale_terms((1.0 - t).sqrt());
    let dec = lower
        .concat(upper)
        .expect("same dimension")
        .pruned(0.0)
        .scale_terms((a / nf).sqrt());
    finish(method, dec, &pair, identity(n))
}

/// Tries the constructors in turn: diagonal `X`, the `n = 2` rule, the
/// comparison-matrix route, then the recursive rule with permutation search.
pub fn decompose_auto(pair: &PairXY) -> ConstructorOutcome {
    let n = pair.n();
    if let Some(out) = precheck(Method::Auto, pair, Condition::C) {
        return out;
    }
    let mut attempts = Vec::new();
    let mut record = |out: ConstructorOutcome| -> Option<ConstructorOutcome> {
        if out.is_decomposed() {
            return Some(out);
        }
        attempts.push((
            out.method,
            out.failure.unwrap_or(Failure::Internal {
                message: "no reason".into(),
            }),
        ));
        None
    };
    if let Some(out) = record(decompose_diagonal_x(pair)) {
        return out;
    }
    if n == 2 {
        if let Some(out) = record(decompose_2x2(pair)) {
            return out;
        }
    }
    if let Some(out) = record(decompose_comparison(pair)) {
        return out;
    }
    if let Some(out) = record(decompose_recursive(pair, true)) {
        return out;
    }
    ConstructorOutcome::not_applicable(Method::Auto, n, Failure::Methods { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::pairs::verify_decomposition;

    fn pair(x: ComplexMatrix, y: ComplexMatrix) -> PairXY {
        PairXY::new(x, y).unwrap()
    }

    fn reorder_pair() -> PairXY {
        pair(
            ComplexMatrix::from_real_rows(&[[2.0, 1.0, -1.0], [1.0, 8.0, 1.0], [-1.0, 1.0, 4.0]]),
            ComplexMatrix::from_real_rows(&[[2.0, 1.0, 3.0], [2.0, 8.0, 1.0], [1.0, 2.0, 4.0]]),
        )
    }

    fn dominant_pair() -> PairXY {
        pair(
            ComplexMatrix::from_rows(&[
                vec![real(2.0), real(1.0), real(-1.0)],
                vec![real(1.0), real(3.0), c64(0.0, 2.0)],
                vec![real(-1.0), c64(0.0, -2.0), real(3.0)],
            ])
            .unwrap(),
            ComplexMatrix::from_real_rows(&[[2.0, 1.0, 2.0], [1.0, 3.0, 4.0], [0.5, 1.0, 3.0]]),
        )
    }

    fn assert_decomposes(out: &ConstructorOutcome, p: &PairXY) {
        assert_eq!(out.status, Status::Decomposed, "{:?}", out.failure);
        assert!(verify_decomposition(out.decomposition.as_ref().unwrap(), p, VERIFY_TOL).unwrap());
    }

    #[test]
    fn diagonal_identity_pair() {
        let p = pair(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
        let out = decompose_diagonal_x(&p);
        assert_decomposes(&out, &p);
        assert_eq!(out.decomposition.unwrap().len(), 4);
    }

    #[test]
    fn diagonal_with_asymmetric_y() {
        let p = pair(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[[1.0, 5.0], [7.0, 1.0]]),
        );
        let out = decompose_diagonal_x(&p);
        assert_decomposes(&out, &p);
        let dec = out.decomposition.unwrap();
        let has = |val: f64| dec.ws().iter().any(|w| w.iter().any(|z| (z.re - val).abs() < 1e-15));
        assert!(has(5f64.sqrt()) && has(7f64.sqrt()));
    }

    #[test]
    fn diagonal_rejects_dense_x() {
        let p = pair(ComplexMatrix::ones(2), ComplexMatrix::ones(2));
        let out = decompose_diagonal_x(&p);
        assert_eq!(out.status, Status::NotApplicable);
        assert!(matches!(out.failure, Some(Failure::NotDiagonal { .. })));
    }

    #[test]
    fn two_by_two_examples() {
        let p = pair(
            ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 2.0]]),
            ComplexMatrix::from_real_rows(&[[1.0, 2.0], [1.0, 2.0]]),
        );
        let out = decompose_2x2(&p);
        assert_decomposes(&out, &p);
        assert!(out.residual.unwrap() < 1e-10);

        let j = pair(ComplexMatrix::ones(2), ComplexMatrix::ones(2));
        assert_decomposes(&decompose_2x2(&j), &j);

        let bad = pair(
            ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 1.0]]),
            ComplexMatrix::ones(2),
        );
        let out = decompose_2x2(&bad);
        assert_eq!(out.status, Status::ConditionsViolated);
        // X = [[1,2],[2,1]] is also indefinite, so (a) is the first failure
        assert!(matches!(
            out.failure,
            Some(Failure::Conditions {
                condition: Condition::A,
                ..
            })
        ));

        let bad_d = pair(
            ComplexMatrix::from_real_rows(&[[5.0, 2.0], [2.0, 5.0]]),
            ComplexMatrix::from_real_rows(&[[5.0, 1.0], [1.0, 5.0]]),
        );
        let out = decompose_2x2(&bad_d);
        assert!(matches!(
            out.failure,
            Some(Failure::Conditions {
                condition: Condition::D,
                ..
            })
        ));

        let three = pair(ComplexMatrix::identity(3), ComplexMatrix::identity(3));
        assert!(matches!(
            decompose_2x2(&three).failure,
            Some(Failure::WrongDimension { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn two_by_two_zero_branches() {
        let p = pair(
            ComplexMatrix::from_real_diagonal(&[0.0, 2.0]),
            ComplexMatrix::from_real_rows(&[[0.0, 3.0], [1.0, 2.0]]),
        );
        assert_decomposes(&decompose_2x2(&p), &p);
        let p = pair(
            ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            ComplexMatrix::from_real_rows(&[[1.0, 0.0], [4.0, 2.0]]),
        );
        assert_decomposes(&decompose_2x2(&p), &p);
    }

    #[test]
    fn recursive_needs_reordering() {
        let p = reorder_pair();
        let out = decompose_recursive(&p, false);
        assert_eq!(out.status, Status::NotApplicable);
        match out.failure {
            Some(Failure::Radicand {
                term: 1,
                entry: 2,
                value,
            }) => assert!((value + 0.5).abs() < 1e-12),
            other => panic!("unexpected failure {other:?}"),
        }
        let out = decompose_recursive(&p, true);
        assert_decomposes(&out, &p);
        assert_ne!(out.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn recursive_diagonal_and_rank_one() {
        let p = pair(
            ComplexMatrix::from_real_diagonal(&[4.0, 9.0]),
            ComplexMatrix::from_real_diagonal(&[4.0, 9.0]),
        );
        let out = decompose_recursive(&p, false);
        assert_decomposes(&out, &p);
        let dec = out.decomposition.unwrap();
        assert_eq!(dec.vs()[0], ComplexVector::from_real(&[2.0, 0.0]));
        assert_eq!(dec.vs()[1], ComplexVector::from_real(&[0.0, 3.0]));

        let j = pair(ComplexMatrix::ones(3), ComplexMatrix::ones(3));
        assert_decomposes(&decompose_recursive(&j, false), &j);
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn comparison_matrix_examples() {
        assert_eq!(
            comparison_matrix(&ComplexMatrix::identity(3)).unwrap(),
            ComplexMatrix::identity(3)
        );
        assert_eq!(
            comparison_matrix(dominant_pair().x()).unwrap(),
            ComplexMatrix::from_real_rows(&[[2.0, -1.0, -1.0], [-1.0, 3.0, -2.0], [-1.0, -2.0, 3.0]])
        );
        assert_eq!(
            comparison_matrix(&ComplexMatrix::ones(2)).unwrap(),
            ComplexMatrix::from_real_rows(&[[1.0, -1.0], [-1.0, 1.0]])
        );
        assert!(comparison_matrix(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn perron_scaling_examples() {
        let x6 = dominant_pair().into_parts().0;
        let d = perron_scaling(&x6).unwrap();
        assert!(dominance_violation(&x6, &d).is_none());

        let diag = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert_eq!(perron_scaling(&diag).unwrap(), vec![1.0, 1.0]);

        let boundary = ComplexMatrix::from_real_rows(&[[1.0, -1.0], [-1.0, 1.0]]);
        let d = perron_scaling(&boundary).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12);

        assert!(matches!(
            perron_scaling(&ComplexMatrix::ones(3)),
            Err(Error::ComparisonNotPsd { .. })
        ));
    }

    #[test]
    fn perron_scaling_fixes_non_dominant_x() {
        // M(X) is PSD but X itself is not diagonally dominant
        let x = ComplexMatrix::from_real_rows(&[[4.0, 2.0, 0.0], [2.0, 2.0, 1.0], [0.0, 1.0, 4.0]]);
        assert_eq!(dominance_violation(&x, &[1.0, 1.0, 1.0]), Some(1));
        let d = perron_scaling(&x).unwrap();
        assert!(dominance_violation(&x, &d).is_none());
    }

    #[test]
    fn comparison_core_matches_known_factors() {
        let p = dominant_pair();
        let out = decompose_comparison(&p);
        assert_decomposes(&out, &p);
        let parts = comparison_parts(&p).unwrap();
        assert!(parts.slack.is_none());
        let core = parts.core.unwrap();
        let q = 2f64.powf(0.25);
        let v_expected = [
            [real(1.0), real(-q), real(0.0)],
            [real(1.0), real(0.0), c64(0.0, 2f64.sqrt())],
            [real(0.0), real(1.0 / q), real(1.0)],
        ];
        let w_expected = [[1.0, 1.0 / q, 0.0], [1.0, 0.0, 1.0], [0.0, q, 2f64.sqrt()]];
        let (v, w) = (core.v_matrix(), core.w_matrix());
        for i in 0..3 {
            for k in 0..3 {
                assert!((v[(i, k)] - v_expected[i][k]).norm() < 1e-12, "V[{i},{k}]");
                assert!((w[(i, k)] - real(w_expected[i][k])).norm() < 1e-12, "W[{i},{k}]");
            }
        }
    }

    #[test]
    fn comparison_other_examples() {
        let n = 4;
        let nf = n as f64;
        let x = &ComplexMatrix::identity(n).scale(nf) - &ComplexMatrix::ones(n);
        let y = &ComplexMatrix::identity(n).scale(nf - 2.0) + &ComplexMatrix::ones(n);
        let p = pair(x, y);
        assert_decomposes(&decompose_comparison(&p), &p);

        let id = pair(ComplexMatrix::identity(3), ComplexMatrix::identity(3));
        assert_decomposes(&decompose_comparison(&id), &id);
        assert!(comparison_parts(&id).unwrap().core.is_none());

        assert_decomposes(&decompose_comparison(&reorder_pair()), &reorder_pair());

        let j = pair(ComplexMatrix::ones(3), ComplexMatrix::ones(3));
        assert!(matches!(
            decompose_comparison(&j).failure,
            Some(Failure::ComparisonNotPsd { .. })
        ));
    }

    #[test]
    fn isotropic_examples() {
        let (cp, cm) = isotropic_coefficients(3);
        assert!((cp - (3f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!((cm - (3f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((cp * cm - 2.0).abs() < 1e-12);
        assert!((cp * cp + cm * cm - 8.0).abs() < 1e-12);

        let out = decompose_isotropic(2, 1.0, 1.0);
        assert_decomposes(&out, &isotropic_pair(2, 1.0, 1.0));

        let out = decompose_isotropic(3, 1.0, -1.0);
        assert_eq!(out.status, Status::ConditionsViolated);
        let out = decompose_isotropic(3, 1.0, 1.5);
        assert_eq!(out.status, Status::ConditionsViolated);

        for (a, b) in [(3.0, -1.0), (0.0, 0.0), (2.0, 0.3)] {
            assert_decomposes(&decompose_isotropic(3, a, b), &isotropic_pair(3, a, b));
        }
        assert_decomposes(&decompose_isotropic(1, 1.0, -0.5), &isotropic_pair(1, 1.0, -0.5));
    }

    #[test]
    fn auto_examples() {
        let p = reorder_pair();
        let out = decompose_auto(&p);
        assert_decomposes(&out, &p);
        assert!(matches!(out.method, Method::Comparison | Method::Recursive));

        let y = ComplexMatrix::from_real_rows(&[[1.0, 2.0, 0.5], [0.5, 1.0, 2.0], [2.0, 0.5, 1.0]]);
        let e1 = pair(ComplexMatrix::ones(3), y);
        let out = decompose_auto(&e1);
        assert_eq!(out.status, Status::NotApplicable);
        assert!(!check_necessary(&e1).holds_e);

        let one = pair(
            ComplexMatrix::from_real_diagonal(&[3.0]),
            ComplexMatrix::from_real_diagonal(&[3.0]),
        );
        assert_decomposes(&decompose_auto(&one), &one);
    }

    #[test]
    fn method_labels_round_trip() {
        for m in [
            Method::DiagonalX,
            Method::TwoByTwo,
            Method::Recursive,
            Method::Comparison,
            Method::Isotropic,
            Method::Auto,
        ] {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("cholesky".parse::<Method>().is_err());
    }
}
