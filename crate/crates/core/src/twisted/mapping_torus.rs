//! Twisted cohomology of mapping tori of linear torus automorphisms.
//!
//! For `A` in `GL(n, Z)` and twist `t0`, the Wang sequence gives
//! `b_k = null(t0 L_k - I) + null(t0 L_(k-1) - I)` with `L_k` the `k`-th
//! exterior power of `A^T`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::cohomology::TwistedBettiResult;
use super::error::{TwistedError, TwistedResult};
use super::exact::{rank, Rational};
use crate::linalg::bareiss_det;

/// Relative singular-value threshold for numerical nullity.
pub const SVD_THRESHOLD: f64 = 1e-9;
/// Relative singular values strictly inside this band are refused.
pub const AMBIGUITY_BAND: (f64, f64) = (1e-11, 1e-7);

/// Twist parameter: exact rational or a floating-point probe.
#[derive(Clone, Debug, PartialEq)]
pub enum TwistParameter {
    Exact(Rational),
    Float(f64),
}

/// Ascending `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `k`-th compound matrix: entry `(I, J)` is the minor on rows `I`, columns `J`.
pub fn compound_matrix(a: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    let sets = subsets(a.len(), k);
    sets.iter()
        .map(|rows| {
            sets.iter()
                .map(|cols| {
                    let minor: Vec<Vec<BigInt>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| a[r][c].clone()).collect())
                        .collect();
                    bareiss_det(minor)
                })
                .collect()
        })
        .collect()
}

fn check_monodromy(a: &[Vec<i64>]) -> TwistedResult<Vec<Vec<BigInt>>> {
    let n = a.len();
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(TwistedError::NotSquare {
            rows: n,
            cols: row.len(),
        });
    }
    if n == 0 {
        return Err(TwistedError::NotSquare { rows: 0, cols: 0 });
    }
    let big: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let det = bareiss_det(big.clone());
    if !det.abs().is_one() {
        return Err(TwistedError::NotUnimodular { det: det.to_string() });
    }
    Ok(big)
}

fn transpose(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    (0..a.len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `null(t0 L_k - I)` for `k = 0..=n`.
pub fn wang_nullities(a: &[Vec<i64>], t0: &TwistParameter) -> TwistedResult<Vec<usize>> {
    let at = transpose(&check_monodromy(a)?);
    let n = at.len();
    match t0 {
        TwistParameter::Exact(t) if t.is_positive() => Ok((0..=n)
            .map(|k| {
                let l = compound_matrix(&at, k);
                let m: Vec<Vec<Rational>> = l
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, v)| {
                                let x = t * Rational::from_integer(v.clone());
                                if i == j {
                                    x - Rational::one()
                                } else {
                                    x
                                }
                            })
                            .collect()
                    })
                    .collect();
                l.len() - rank(&m)
            })
            .collect()),
        TwistParameter::Float(t) if t.is_finite() && *t > 0.0 => (0..=n)
            .map(|k| {
                let l = compound_matrix(&at, k);
                let d = l.len();
                let m = DMatrix::from_fn(d, d, |i, j| {
                    let x = t * l[i][j].to_f64().expect("finite minor");
                    if i == j {
                        x - 1.0
                    } else {
                        x
                    }
                });
                float_nullity(&m, k)
            })
            .collect(),
        other => Err(TwistedError::BadTwist(format!("{other:?}"))),
    }
}

fn float_nullity(m: &DMatrix<f64>, degree: usize) -> TwistedResult<usize> {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(sv.len());
    }
    let mut null = 0;
    for &s in sv.iter() {
        let ratio = s / max;
        if ratio > AMBIGUITY_BAND.0 && ratio < AMBIGUITY_BAND.1 {
            return Err(TwistedError::SingularThresholdAmbiguous { degree, ratio });
        }
        if ratio < SVD_THRESHOLD {
            null += 1;
        }
    }
    Ok(null)
}

/// Twisted Betti numbers of the `(n+1)`-dimensional mapping torus.
pub fn mapping_torus_betti(a: &[Vec<i64>], t0: &TwistParameter) -> TwistedResult<TwistedBettiResult> {
    let null = wang_nullities(a, t0)?;
    let n = null.len() - 1;
    let dims = (0..=n + 1)
        .map(|k| {
            let here = if k <= n { null[k] } else { 0 };
            let below = if k > 0 { null[k - 1] } else { 0 };
            here + below
        })
        .collect();
    Ok(TwistedBettiResult::new(dims, 0))
}

/// Real root of `x^3 - x^2 - 1` by Newton iteration.
pub fn cubic_real_root() -> f64 {
    let mut x = 1.5f64;
    for _ in 0..60 {
        let f = x * x * x - x * x - 1.0;
        let df = 3.0 * x * x - 2.0 * x;
        let step = f / df;
        x -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }
    x
}

/// Companion matrix of `x^3 - x^2 - 1` (hyperbolic, determinant 1).
pub fn cubic_companion() -> Vec<Vec<i64>> {
    vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 1]]
}

/// The cat map `[[2,1],[1,1]]` extended by the identity on a third circle.
pub fn cat_map_times_circle() -> Vec<Vec<i64>> {
    vec![vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::exact::rational;

    #[test]
    fn compound_of_diagonal() {
        let a: Vec<Vec<BigInt>> = vec![
            vec![2.into(), 0.into(), 0.into()],
            vec![0.into(), 3.into(), 0.into()],
            vec![0.into(), 0.into(), 5.into()],
        ];
        let c2 = compound_matrix(&a, 2);
        let diag: Vec<BigInt> = (0..3).map(|i| c2[i][i].clone()).collect();
        assert_eq!(diag, vec![6.into(), 10.into(), 15.into()]);
        assert_eq!(compound_matrix(&a, 0), vec![vec![BigInt::one()]]);
        assert_eq!(compound_matrix(&a, 3), vec![vec![BigInt::from(30)]]);
    }

    #[test]
    fn circle_bundle_over_circle() {
        let id = vec![vec![1]];
        let r = mapping_torus_betti(&id, &TwistParameter::Exact(rational(1, 1))).unwrap();
        assert_eq!(r.dims, vec![1, 2, 1]);
        let r = mapping_torus_betti(&id, &TwistParameter::Exact(rational(2, 1))).unwrap();
        assert_eq!(r.dims, vec![0, 0, 0]);
        assert_eq!(r.euler_alternating_sum, 0);
    }

    #[test]
    fn rejects_bad_monodromy() {
        let t = TwistParameter::Exact(rational(1, 1));
        assert!(matches!(
            mapping_torus_betti(&[vec![2]], &t),
            Err(TwistedError::NotUnimodular { .. })
        ));
        assert!(matches!(
            mapping_torus_betti(&[vec![1, 0]], &t),
            Err(TwistedError::NotSquare { .. })
        ));
        assert!(matches!(
            mapping_torus_betti(&[vec![1]], &TwistParameter::Float(-1.0)),
            Err(TwistedError::BadTwist(_))
        ));
    }

    #[test]
    fn ambiguous_singular_values_are_refused() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-9]));
        assert!(matches!(
            float_nullity(&m, 1),
            Err(TwistedError::SingularThresholdAmbiguous { .. })
        ));
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-14]));
        assert_eq!(float_nullity(&m, 1).unwrap(), 1);
    }

    #[test]
    fn cubic_root() {
        let x = cubic_real_root();
        assert!((x * x * x - x * x - 1.0).abs() < 1e-15);
        assert!((1.0 / x - 0.6823278038280193).abs() < 1e-15);
    }
}
