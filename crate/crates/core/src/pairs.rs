//! Matrix pairs `(X, Y)`, PCP decompositions, and the necessary conditions
//! every pairwise completely positive pair satisfies.
//!
//! A decomposition is a pair of vector families `{v_k}`, `{w_k}` with
//!
//! ```text
//! X = Σ_k (v_k ⊙ w_k)(v_k ⊙ w_k)*      Y = Σ_k (v_k ⊙ conj v_k)(w_k ⊙ conj w_k)*
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, entrywise_one_norm, real, trace_norm, Complex64, ComplexMatrix, ComplexVector, DEFAULT_PSD_TOL,
};

/// Relative tolerance on `x_ii = y_ii`.
pub const DIAGONAL_TOL: f64 = 1e-9;
/// Relative tolerance on `Im y_ij`.
pub const IMAG_TOL: f64 = 1e-12;
/// Tolerance on `|x_ij|^2 <= y_ij y_ji`, scaled by the squared entry scale.
pub const ENTRY_BOUND_TOL: f64 = 1e-12;
/// Additive slack on the coherence-gap comparison, scaled by `max(1, ||Y||_1)`.
pub const GAP_TOL: f64 = 1e-8;
/// Threshold for the numerical rank, relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PairXY {
    x: ComplexMatrix,
    y: ComplexMatrix,
}

impl PairXY {
    pub fn new(x: ComplexMatrix, y: ComplexMatrix) -> Result<Self> {
        let n = x.ensure_square()?;
        let m = y.ensure_square()?;
        if n != m {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn y(&self) -> &ComplexMatrix {
        &self.y
    }

    pub fn into_parts(self) -> (ComplexMatrix, ComplexMatrix) {
        (self.x, self.y)
    }

    /// `max(1, max |entry|)` over both matrices.
    pub fn entry_scale(&self) -> f64 {
        self.x.max_abs().max(self.y.max_abs()).max(1.0)
    }

    /// `(D X D, D Y D)` for a real diagonal `D = diag(d)`.
    pub fn scaled(&self, d: &[f64]) -> Self {
        let n = self.n();
        assert_eq!(d.len(), n);
        let f = |m: &ComplexMatrix| ComplexMatrix::from_fn(n, n, |i, j| m[(i, j)] * (d[i] * d[j]));
        Self {
            x: f(&self.x),
            y: f(&self.y),
        }
    }

    /// `(P X P*, P Y P*)` where row `i` of `P` selects index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let f = |m: &ComplexMatrix| ComplexMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
        Self {
            x: f(&self.x),
            y: f(&self.y),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcpDecomposition {
    n: usize,
    vs: Vec<ComplexVector>,
    ws: Vec<ComplexVector>,
}

impl PcpDecomposition {
    pub fn new(vs: Vec<ComplexVector>, ws: Vec<ComplexVector>) -> Result<Self> {
        if vs.is_empty() {
            return Err(Error::Construction("a decomposition needs at least one term".into()));
        }
        if vs.len() != ws.len() {
            return Err(Error::DimensionMismatch {
                expected: vs.len(),
                found: ws.len(),
            });
        }
        let n = vs[0].dim();
        for v in vs.iter().chain(&ws) {
            if v.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.dim(),
                });
            }
        }
        Ok(Self { n, vs, ws })
    }

    /// A single zero term; the decomposition of the zero pair.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            vs: vec![ComplexVector::zeros(n)],
            ws: vec![ComplexVector::zeros(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vs.is_empty()
    }

    pub fn vs(&self) -> &[ComplexVector] {
        &self.vs
    }

    pub fn ws(&self) -> &[ComplexVector] {
        &self.ws
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ComplexVector, &ComplexVector)> {
        self.vs.iter().zip(&self.ws)
    }

    /// Columns of `V` as an `n × m` matrix.
    pub fn v_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.len(), |i, k| self.vs[k][i])
    }

    pub fn w_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.len(), |i, k| self.ws[k][i])
    }

    pub fn concat(mut self, other: Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.vs.extend(other.vs);
        self.ws.extend(other.ws);
        Ok(self)
    }

    /// Drops terms with `v = 0` or `w = 0` (they contribute to neither matrix);
    /// keeps at least one term.
    pub fn pruned(self, tol: f64) -> Self {
        let n = self.n;
        let (vs, ws): (Vec<_>, Vec<_>) = self
            .vs
            .into_iter()
            .zip(self.ws)
            .filter(|(v, w)| !v.is_zero(tol) && !w.is_zero(tol))
            .unzip();
        if vs.is_empty() {
            Self::zero(n)
        } else {
            Self { n, vs, ws }
        }
    }

    /// Decomposition of `(D X D, D Y D)` from one of `(X, Y)`: both families
    /// are multiplied entrywise by `sqrt(d)`.
    pub fn scaled(&self, d: &[f64]) -> Self {
        let root: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
        let f = |v: &ComplexVector| ComplexVector::from((0..v.dim()).map(|i| v[i] * root[i]).collect::<Vec<_>>());
        Self {
            n: self.n,
            vs: self.vs.iter().map(f).collect(),
            ws: self.ws.iter().map(f).collect(),
        }
    }

    /// Maps a decomposition of `pair.permuted(perm)` back to one of `pair`.
    pub fn unpermuted(&self, perm: &[usize]) -> Self {
        Self {
            n: self.n,
            vs: self.vs.iter().map(|v| v.scatter(perm)).collect(),
            ws: self.ws.iter().map(|w| w.scatter(perm)).collect(),
        }
    }

    /// Maps a decomposition of `pair` to one of `pair.permuted(perm)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let f = |v: &ComplexVector| ComplexVector::from(perm.iter().map(|&p| v[p]).collect::<Vec<_>>());
        Self {
            n: self.n,
            vs: self.vs.iter().map(f).collect(),
            ws: self.ws.iter().map(f).collect(),
        }
    }

    pub fn scale_terms(&self, s: f64) -> Self {
        Self {
            n: self.n,
            vs: self.vs.iter().map(|v| v.scale(s)).collect(),
            ws: self.ws.clone(),
        }
    }

    pub fn reconstruct(&self) -> PairXY {
        reconstruct(self)
    }
}

/// Rebuilds `(X, Y)` from a decomposition.
pub fn reconstruct(dec: &PcpDecomposition) -> PairXY {
    let n = dec.n;
    let mut x = ComplexMatrix::zeros(n, n);
    let mut y = ComplexMatrix::zeros(n, n);
    for (v, w) in dec.terms() {
        let u: Vec<Complex64> = v.iter().zip(w.iter()).map(|(a, b)| a * b).collect();
        let (vv, ww) = (v.abs_sq(), w.abs_sq());
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] += u[i] * u[j].conj();
                y[(i, j)] += real(vv[i] * ww[j]);
            }
        }
    }
    debug_assert!(x.is_hermitian());
    debug_assert!(y.as_slice().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
    PairXY { x, y }
}

/// Relative Frobenius residual of a decomposition against a pair:
/// `max(||X' - X||_F, ||Y' - Y||_F) / max(1, ||X||_F, ||Y||_F)`.
pub fn decomposition_residual(dec: &PcpDecomposition, pair: &PairXY) -> Result<f64> {
    if dec.n != pair.n() {
        return Err(Error::DimensionMismatch {
            expected: pair.n(),
            found: dec.n,
        });
    }
    let rec = reconstruct(dec);
    let scale = 1f64.max(pair.x.frobenius_norm()).max(pair.y.frobenius_norm());
    let dx = (&rec.x - &pair.x).frobenius_norm();
    let dy = (&rec.y - &pair.y).frobenius_norm();
    Ok(dx.max(dy) / scale)
}

pub fn verify_decomposition(dec: &PcpDecomposition, pair: &PairXY, tol: f64) -> Result<bool> {
    Ok(decomposition_residual(dec, pair)? <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
    E,
}

impl Condition {
    pub const ALL: [Condition; 5] = [Self::A, Self::B, Self::C, Self::D, Self::E];

    pub fn describe(self) -> &'static str {
        match self {
            Self::A => "X is Hermitian positive semidefinite",
            Self::B => "Y is real and entrywise non-negative",
            Self::C => "X and Y share their diagonal",
            Self::D => "|x_ij|^2 <= y_ij y_ji",
            Self::E => "||X||_1 - ||X||_tr <= ||Y||_1 - ||Y||_tr",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Self::A => 'a',
            Self::B => 'b',
            Self::C => 'c',
            Self::D => 'd',
            Self::E => 'e',
        };
        write!(f, "({c})")
    }
}

/// Evidence for a failed condition. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },
    NegativeEigenvalue {
        min_eigenvalue: f64,
    },
    ComplexEntry {
        row: usize,
        col: usize,
        im: f64,
    },
    NegativeEntry {
        row: usize,
        col: usize,
        value: f64,
    },
    DiagonalMismatch {
        index: usize,
        x: f64,
        y: f64,
    },
    EntryBound {
        row: usize,
        col: usize,
        x_abs_sq: f64,
        y_product: f64,
    },
    CoherenceGap {
        x_gap: f64,
        y_gap: f64,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::NotHermitian { row, col, deviation } => write!(
                f,
                "X not Hermitian at ({}, {}): deviation {deviation:e}",
                row + 1,
                col + 1
            ),
            Self::NegativeEigenvalue { min_eigenvalue } => {
                write!(f, "X has eigenvalue {min_eigenvalue:.6e}")
            }
            Self::ComplexEntry { row, col, im } => {
                write!(f, "y_{},{} has imaginary part {im:e}", row + 1, col + 1)
            }
            Self::NegativeEntry { row, col, value } => {
                write!(f, "y_{},{} = {value} is negative", row + 1, col + 1)
            }
            Self::DiagonalMismatch { index, x, y } => {
                write!(f, "x_{i},{i} = {x} but y_{i},{i} = {y}", i = index + 1)
            }
            Self::EntryBound {
                row,
                col,
                x_abs_sq,
                y_product,
            } => write!(
                f,
                "|x_{r},{c}|^2 = {x_abs_sq:.6} > y_{r},{c} y_{c},{r} = {y_product:.6}",
                r = row + 1,
                c = col + 1
            ),
            Self::CoherenceGap { x_gap, y_gap } => {
                write!(f, "||X||_1 - ||X||_tr = {x_gap:.6} > ||Y||_1 - ||Y||_tr = {y_gap:.6}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub holds_a: bool,
    pub holds_b: bool,
    pub holds_c: bool,
    pub holds_d: bool,
    pub holds_e: bool,
    /// `||X||_1 - ||X||_tr`
    pub x_gap: f64,
    /// `||Y||_1 - ||Y||_tr`
    pub y_gap: f64,
    pub witnesses: Vec<(Condition, Witness)>,
}

impl NecessaryReport {
    pub fn holds(&self, c: Condition) -> bool {
        match c {
            Condition::A => self.holds_a,
            Condition::B => self.holds_b,
            Condition::C => self.holds_c,
            Condition::D => self.holds_d,
            Condition::E => self.holds_e,
        }
    }

    pub fn all_hold(&self) -> bool {
        Condition::ALL.iter().all(|&c| self.holds(c))
    }

    /// True when every condition up to and including `last` holds.
    pub fn holds_through(&self, last: Condition) -> bool {
        Condition::ALL.iter().filter(|&&c| c <= last).all(|&c| self.holds(c))
    }

    pub fn witness(&self, c: Condition) -> Option<&Witness> {
        self.witnesses.iter().find(|(k, _)| *k == c).map(|(_, w)| w)
    }

    /// First failed condition at or before `last`, as an error.
    pub fn require_through(&self, last: Condition) -> Result<()> {
        for &c in Condition::ALL.iter().filter(|&&c| c <= last) {
            if !self.holds(c) {
                let detail = self
                    .witness(c)
                    .map_or_else(|| c.describe().to_string(), ToString::to_string);
                return Err(Error::ConditionsViolated { condition: c, detail });
            }
        }
        Ok(())
    }
}

fn check_a(x: &ComplexMatrix) -> Option<Witness> {
    let (row, col, deviation) = x.hermitian_deviation();
    if deviation > x.hermitian_tolerance() {
        return Some(Witness::NotHermitian { row, col, deviation });
    }
    let vals = linalg::hermitian_eigenvalues(x).ok()?;
    if linalg::psd_from_spectrum(&vals, DEFAULT_PSD_TOL) {
        None
    } else {
        Some(Witness::NegativeEigenvalue {
            min_eigenvalue: *vals.last().unwrap(),
        })
    }
}

fn check_b(y: &ComplexMatrix) -> Option<Witness> {
    let n = y.rows();
    let neg_tol = IMAG_TOL * y.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..n {
            let z = y[(i, j)];
            if z.im.abs() > IMAG_TOL * z.norm().max(1.0) {
                return Some(Witness::ComplexEntry {
                    row: i,
                    col: j,
                    im: z.im,
                });
            }
            if z.re < -neg_tol {
                return Some(Witness::NegativeEntry {
                    row: i,
                    col: j,
                    value: z.re,
                });
            }
        }
    }
    None
}

fn check_c(x: &ComplexMatrix, y: &ComplexMatrix) -> Option<Witness> {
    (0..x.rows()).find_map(|i| {
        let (a, b) = (x[(i, i)], y[(i, i)]);
        ((a - b).norm() > DIAGONAL_TOL * a.norm().max(1.0)).then_some(Witness::DiagonalMismatch {
            index: i,
            x: a.re,
            y: b.re,
        })
    })
}

/// Entry-bound check shared with the PPT criterion: returns the first
/// violating off-diagonal pair.
pub(crate) fn check_d(pair: &PairXY) -> Option<Witness> {
    let (x, y) = (pair.x(), pair.y());
    let n = pair.n();
    let scale = pair.entry_scale();
    let tol = ENTRY_BOUND_TOL * scale * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            let x_abs_sq = x[(i, j)].norm_sqr().max(x[(j, i)].norm_sqr());
            let y_product = y[(i, j)].re * y[(j, i)].re;
            if x_abs_sq > y_product + tol {
                return Some(Witness::EntryBound {
                    row: i,
                    col: j,
                    x_abs_sq,
                    y_product,
                });
            }
        }
    }
    None
}

/// `(||X||_1 - ||X||_tr, ||Y||_1 - ||Y||_tr)`.
pub fn coherence_gaps(pair: &PairXY) -> (f64, f64) {
    let gap = |m: &ComplexMatrix| entrywise_one_norm(m) - trace_norm(m);
    (gap(pair.x()), gap(pair.y()))
}

pub(crate) fn gap_passes(x_gap: f64, y_gap: f64, y: &ComplexMatrix) -> bool {
    x_gap <= y_gap + GAP_TOL * entrywise_one_norm(y).max(1.0)
}

/// Evaluates the five necessary conditions for pairwise complete positivity.
pub fn check_necessary(pair: &PairXY) -> NecessaryReport {
    let (x, y) = (pair.x(), pair.y());
    let mut witnesses = Vec::new();
    let checks = [
        (Condition::A, check_a(x)),
        (Condition::B, check_b(y)),
        (Condition::C, check_c(x, y)),
        (Condition::D, check_d(pair)),
    ];
    for (c, w) in checks {
        if let Some(w) = w {
            witnesses.push((c, w));
        }
    }
    let (x_gap, y_gap) = coherence_gaps(pair);
    let holds_e = gap_passes(x_gap, y_gap, y);
    if !holds_e {
        witnesses.push((Condition::E, Witness::CoherenceGap { x_gap, y_gap }));
    }
    let failed = |c| witnesses.iter().any(|(k, _)| *k == c);
    NecessaryReport {
        holds_a: !failed(Condition::A),
        holds_b: !failed(Condition::B),
        holds_c: !failed(Condition::C),
        holds_d: !failed(Condition::D),
        holds_e,
        x_gap,
        y_gap,
        witnesses,
    }
}

/// Both sides of the strengthened Cauchy–Schwarz inequality
/// `0 <= ||v⊙v̄|| ||w⊙w̄|| - <v⊙v̄, w⊙w̄> <= ||v||²||w||² - |<v,w>|²`.
pub fn strong_cs_gap(v: &ComplexVector, w: &ComplexVector) -> Result<(f64, f64)> {
    let inner = v.inner(w)?;
    let (vv, ww) = (v.abs_sq(), w.abs_sq());
    let norm = |a: &[f64]| a.iter().map(|t| t * t).sum::<f64>().sqrt();
    let dot: f64 = vv.iter().zip(&ww).map(|(a, b)| a * b).sum();
    let lhs = norm(&vv) * norm(&ww) - dot;
    let nv: f64 = vv.iter().sum();
    let nw: f64 = ww.iter().sum();
    let rhs = nv * nw - inner.norm_sqr();
    Ok((lhs, rhs))
}

/// Lower bound on the length of any decomposition: the numerical rank of `X`.
pub fn length_lower_bound(pair: &PairXY) -> Result<usize> {
    check_necessary(pair).require_through(Condition::C)?;
    Ok(linalg::numerical_rank(pair.x(), RANK_TOL))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::c64;

    fn v(xs: &[f64]) -> ComplexVector {
        ComplexVector::from_real(xs)
    }

    pub(crate) fn j3_cyclic(a: f64) -> PairXY {
        PairXY::new(
            ComplexMatrix::ones(3),
            ComplexMatrix::from_real_rows(&[[1.0, a, 1.0 / a], [1.0 / a, 1.0, a], [a, 1.0 / a, 1.0]]),
        )
        .unwrap()
    }

    fn reorder_case() -> (PairXY, PcpDecomposition) {
        let pair = PairXY::new(
            ComplexMatrix::from_real_rows(&[[2.0, 1.0, -1.0], [1.0, 8.0, 1.0], [-1.0, 1.0, 4.0]]),
            ComplexMatrix::from_real_rows(&[[2.0, 1.0, 3.0], [2.0, 8.0, 1.0], [1.0, 2.0, 4.0]]),
        )
        .unwrap();
        let s = f64::sqrt;
        // third entry of w_2 is sqrt(6/31), not its reciprocal
        let dec = PcpDecomposition::new(
            vec![
                v(&[1.0 / s(2.0), s(8.0), 1.0]),
                v(&[-3.0 * s(3.0) / 4.0, 0.0, s(31.0 / 8.0)]),
                v(&[4.0 * s(3.0 / 31.0), 0.0, 0.0]),
            ],
            vec![
                v(&[0.5, 1.0, 1.0 / s(8.0)]),
                v(&[s(6.0 / 31.0), s(8.0 / 31.0), 1.0]),
                v(&[1.0, 1.0 / (2.0 * s(6.0)), s(155.0 / 192.0)]),
            ],
        )
        .unwrap();
        (pair, dec)
    }

    #[test]
    fn reconstruct_all_ones() {
        let dec = PcpDecomposition::new(vec![ComplexVector::ones(3)], vec![ComplexVector::ones(3)]).unwrap();
        let pair = reconstruct(&dec);
        assert_eq!(pair.x(), &ComplexMatrix::ones(3));
        assert_eq!(pair.y(), &ComplexMatrix::ones(3));
    }

    #[test]
    fn reconstruct_single_support() {
        let dec = PcpDecomposition::new(vec![ComplexVector::basis(2, 0)], vec![ComplexVector::basis(2, 1)]).unwrap();
        let pair = reconstruct(&dec);
        // v ⊙ w = 0, so X vanishes; Y has a single 1 at (1,2).
        assert_eq!(pair.x(), &ComplexMatrix::zeros(2, 2));
        assert_eq!(pair.y(), &ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]));
    }

    #[test]
    fn reconstruct_reordered_decomposition() {
        let (pair, dec) = reorder_case();
        let rec = reconstruct(&dec);
        assert!((&rec.x - pair.x()).max_abs() < 1e-12);
        assert!((&rec.y - pair.y()).max_abs() < 1e-12);
        assert!(verify_decomposition(&dec, &pair, 1e-8).unwrap());
    }

    #[test]
    fn verify_rejects_mismatch() {
        let dec = PcpDecomposition::new(vec![ComplexVector::ones(3)], vec![ComplexVector::ones(3)]).unwrap();
        let jj = PairXY::new(ComplexMatrix::ones(3), ComplexMatrix::ones(3)).unwrap();
        let ji = PairXY::new(ComplexMatrix::ones(3), ComplexMatrix::identity(3)).unwrap();
        assert!(verify_decomposition(&dec, &jj, 1e-8).unwrap());
        assert!(!verify_decomposition(&dec, &ji, 1e-8).unwrap());
        let small = PairXY::new(ComplexMatrix::ones(2), ComplexMatrix::ones(2)).unwrap();
        assert!(verify_decomposition(&dec, &small, 1e-8).is_err());
    }

    #[test]
    fn decomposition_shape_errors() {
        assert!(PcpDecomposition::new(vec![], vec![]).is_err());
        assert!(PcpDecomposition::new(vec![ComplexVector::ones(2)], vec![]).is_err());
        assert!(PcpDecomposition::new(vec![ComplexVector::ones(2)], vec![ComplexVector::ones(3)]).is_err());
    }

    #[test]
    fn j3_cyclic_conditions() {
        let r = check_necessary(&j3_cyclic(2.0));
        assert!(r.holds_through(Condition::D));
        assert!(!r.holds_e);
        match r.witness(Condition::E) {
            Some(Witness::CoherenceGap { x_gap, y_gap }) => {
                assert!((x_gap - 6.0).abs() < 1e-10);
                assert!((y_gap - (7.0 - 7f64.sqrt())).abs() < 1e-9);
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(check_necessary(&j3_cyclic(1.0)).all_hold());
    }

    #[test]
    fn identity_with_all_ones() {
        // gaps: X diagonal gives 0, Y = J_2 gives 4 - 2 = 2
        let r = check_necessary(&PairXY::new(ComplexMatrix::identity(2), ComplexMatrix::ones(2)).unwrap());
        assert!(r.all_hold());
        assert!(r.x_gap.abs() < 1e-12);
        assert!((r.y_gap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn witnesses_for_each_failure() {
        let swap = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let r = check_necessary(&PairXY::new(swap.clone(), swap).unwrap());
        assert!(!r.holds_a);
        assert!(matches!(
            r.witness(Condition::A),
            Some(Witness::NegativeEigenvalue { .. })
        ));

        let y = ComplexMatrix::from_rows(&[vec![real(1.0), c64(0.5, 0.5)], vec![real(1.0), real(1.0)]]).unwrap();
        let r = check_necessary(&PairXY::new(ComplexMatrix::identity(2), y).unwrap());
        assert!(matches!(
            r.witness(Condition::B),
            Some(Witness::ComplexEntry { row: 0, col: 1, .. })
        ));

        let y = ComplexMatrix::from_real_rows(&[[1.0, -1.0], [1.0, 1.0]]);
        let r = check_necessary(&PairXY::new(ComplexMatrix::identity(2), y).unwrap());
        assert!(matches!(r.witness(Condition::B), Some(Witness::NegativeEntry { .. })));

        let r = check_necessary(
            &PairXY::new(
                ComplexMatrix::identity(2),
                ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            )
            .unwrap(),
        );
        assert!(matches!(
            r.witness(Condition::C),
            Some(Witness::DiagonalMismatch { index: 1, .. })
        ));

        let x = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 5.0]]);
        let y = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 5.0]]);
        let r = check_necessary(&PairXY::new(x, y).unwrap());
        assert!(r.holds_through(Condition::C));
        assert!(matches!(
            r.witness(Condition::D),
            Some(Witness::EntryBound { row: 0, col: 1, .. })
        ));
        assert!(r.require_through(Condition::D).is_err());
    }

    #[test]
    fn strong_cs_edge_cases() {
        let a = ComplexVector::new(vec![c64(1.0, 2.0), c64(-0.5, 0.3), real(0.7)]).unwrap();
        let (l, r) = strong_cs_gap(&a, &a).unwrap();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12);
        let (l, r) = strong_cs_gap(&ComplexVector::basis(3, 0), &ComplexVector::basis(3, 1)).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
        assert!(strong_cs_gap(&a, &ComplexVector::ones(2)).is_err());
    }

    #[test]
    fn length_bounds() {
        let jj = PairXY::new(ComplexMatrix::ones(3), ComplexMatrix::ones(3)).unwrap();
        assert_eq!(length_lower_bound(&jj).unwrap(), 1);
        for n in 2..6 {
            let m = &ComplexMatrix::identity(n) + &ComplexMatrix::ones(n);
            let p = PairXY::new(m.clone(), m).unwrap();
            assert_eq!(length_lower_bound(&p).unwrap(), n);
        }
        let d = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let y = ComplexMatrix::from_real_rows(&[[1.0, 4.0, 0.0], [1.0, 2.0, 3.0], [0.5, 0.0, 3.0]]);
        assert_eq!(length_lower_bound(&PairXY::new(d, y).unwrap()).unwrap(), 3);
        let bad = PairXY::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_diagonal(&[1.0, 3.0]),
        )
        .unwrap();
        assert!(matches!(
            length_lower_bound(&bad),
            Err(Error::ConditionsViolated { .. })
        ));
        let (pair, dec) = reorder_case();
        assert!(length_lower_bound(&pair).unwrap() <= dec.len());
    }
}
