#![allow(dead_code)]

use std::path::PathBuf;

use pcpkit::linalg::{c64, real, Complex64, ComplexMatrix, ComplexVector};
use pcpkit::{PairXY, PcpDecomposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    c64(normal(rng), normal(rng))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    ComplexVector::from((0..n).map(|_| complex_normal(rng)).collect::<Vec<_>>())
}

/// Complex vector with roughly a fifth of its entries zeroed.
pub fn sparse_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    ComplexVector::from(
        (0..n)
            .map(|_| {
                if rng.random_bool(0.2) {
                    real(0.0)
                } else {
                    complex_normal(rng)
                }
            })
            .collect::<Vec<_>>(),
    )
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    let v = random_vector(rng, n);
    let norm = v.norm();
    v.scale(1.0 / norm)
}

pub fn random_decomposition(rng: &mut impl Rng, n: usize, m: usize) -> PcpDecomposition {
    let vs = (0..m).map(|_| sparse_vector(rng, n)).collect();
    let ws = (0..m).map(|_| sparse_vector(rng, n)).collect();
    PcpDecomposition::new(vs, ws).unwrap()
}

/// `G G*` for a random complex `n×rank` matrix `G`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, rank, |_, _| complex_normal(rng));
    g.matmul(&g.adjoint()).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Pair satisfying (a)–(c); (d) and (e) hold or fail depending on the draw.
/// A third of the draws come from decompositions, so every condition holds.
pub fn random_state_pair(rng: &mut impl Rng, n: usize) -> PairXY {
    if rng.random_bool(1.0 / 3.0) {
        let m = rng.random_range(1..=2 * n);
        return random_decomposition(rng, n, m).reconstruct();
    }
    let rank = rng.random_range(1..=n);
    let x = random_psd(rng, n, rank);
    let spread = rng.random_range(0.1..1.5);
    let factor = [0.7, 1.0, 1.4][rng.random_range(0..3)];
    let mut y = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            y[(i, j)] = if i == j {
                real(x[(i, i)].re)
            } else {
                real(x[(i, j)].norm() * factor * (spread * normal(rng)).exp())
            };
        }
    }
    PairXY::new(x, y).unwrap()
}

/// Random `2×2` pair satisfying (a)–(d), including boundary and zero cases.
pub fn random_2x2_ppt_pair(rng: &mut impl Rng) -> PairXY {
    let kind = rng.random_range(0..10);
    let rank = rng.random_range(1..=2);
    let mut x = random_psd(rng, 2, rank);
    if kind == 0 {
        // x11 = 0 forces x12 = 0
        x = ComplexMatrix::from_real_diagonal(&[0.0, x[(1, 1)].re]);
    }
    let a = x[(0, 1)].norm();
    let (y12, y21) = match kind {
        1 => (0.0, rng.random_range(0.0..3.0)),
        _ if a == 0.0 => (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)),
        2 | 3 => {
            // boundary |x12|² = y12·y21
            let y12 = a * (normal(rng)).exp();
            (y12, a * a / y12)
        }
        _ => {
            let y12 = a * (normal(rng)).exp();
            (y12, a * a / y12 * (1.0 + rng.random_range(0.0..2.0)))
        }
    };
    if kind == 1 {
        x[(0, 1)] = real(0.0);
        x[(1, 0)] = real(0.0);
    }
    let y = ComplexMatrix::from_real_rows(&[[x[(0, 0)].re, y12], [y21, x[(1, 1)].re]]);
    PairXY::new(x, y).unwrap()
}

/// Descending spectrum of length `len` with entries summing to one.
pub fn random_spectrum(rng: &mut impl Rng, len: usize, spread: f64) -> Vec<f64> {
    let mut lam: Vec<f64> = (0..len).map(|_| (spread * normal(rng)).exp()).collect();
    let total: f64 = lam.iter().sum();
    for l in &mut lam {
        *l /= total;
    }
    lam.sort_by(|a, b| b.total_cmp(a));
    lam
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}
