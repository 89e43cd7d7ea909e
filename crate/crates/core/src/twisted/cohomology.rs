//! Twisted simplicial cochain complex and its Betti numbers.
//!
//! A `k`-cochain assigns to each `k`-simplex a coefficient in the fiber over
//! its least vertex. The coboundary of `c` on `[v0, .., v(k+1)]` is
//! `sum_i (-1)^i c(face_i)`, where the face opposite `v0` is based at `v1`
//! and is transported back to `v0` by `w(v0, v1)`.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::SimplicialComplex;
use super::exact::{rank, Rational, RationalMatrix};
use super::local::LocalSystem;

/// Twisted coboundary `C^k -> C^(k+1)` as a dense matrix with one row per
/// `(k+1)`-simplex and one column per `k`-simplex.
pub fn coboundary(complex: &SimplicialComplex, system: &LocalSystem, k: usize) -> RationalMatrix {
    let cols = complex.count(k);
    complex
        .simplices(k + 1)
        .par_iter()
        .map(|s| {
            let mut row = vec![Rational::zero(); cols];
            for i in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
                let col = complex.index_of(&face).expect("closure-complete complex");
                let mut coeff = if i == 0 {
                    system.weight(s[0], s[1]).expect("local system covers every edge")
                } else {
                    Rational::one()
                };
                if i % 2 == 1 {
                    coeff = -coeff;
                }
                row[col] += coeff;
            }
            row
        })
        .collect()
}

/// Dimensions of twisted cohomology together with the Euler characteristic
/// of the underlying space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedBettiResult {
    pub dims: Vec<usize>,
    pub euler_alternating_sum: i64,
    pub chi: i64,
}

impl TwistedBettiResult {
    pub fn new(dims: Vec<usize>, chi: i64) -> Self {
        let euler_alternating_sum = alternating_sum(&dims);
        Self {
            dims,
            euler_alternating_sum,
            chi,
        }
    }
}

pub fn alternating_sum(dims: &[usize]) -> i64 {
    dims.iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

/// `b_k = dim ker delta_k - rank delta_(k-1)`, with ranks computed exactly.
pub fn twisted_betti(complex: &SimplicialComplex, system: &LocalSystem) -> TwistedBettiResult {
    let d = complex.dim();
    let ranks: Vec<usize> = (0..d)
        .into_par_iter()
        .map(|k| rank(&coboundary(complex, system, k)))
        .collect();
    let dims = (0..=d)
        .map(|k| {
            let out = if k < d { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            complex.count(k) - out - inc
        })
        .collect();
    TwistedBettiResult::new(dims, complex.euler_characteristic())
}

/// Ordinary rational Betti numbers.
pub fn untwisted_betti(complex: &SimplicialComplex) -> TwistedBettiResult {
    twisted_betti(complex, &LocalSystem::trivial(complex))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerVerdict {
    pub holds: bool,
    pub alternating_sum: i64,
    pub chi: i64,
}

/// Compares the alternating sum of the twisted Betti numbers with the Euler
/// characteristic.
pub fn euler_check(result: &TwistedBettiResult) -> EulerVerdict {
    let alternating_sum = alternating_sum(&result.dims);
    EulerVerdict {
        holds: alternating_sum == result.chi,
        alternating_sum,
        chi: result.chi,
    }
}
