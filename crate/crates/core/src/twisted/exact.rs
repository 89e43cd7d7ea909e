//! Exact rational linear algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::error::{TwistedError, TwistedResult};
use crate::linalg::bareiss_rank;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = BigRational;

/// Dense rational matrix, row-major.
pub type RationalMatrix = Vec<Vec<Rational>>;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> TwistedResult<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| TwistedError::BadRational(s.to_string()))
}

/// Scales every row by the lcm of its denominators.
pub fn integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect()
}

/// Rank by fraction-free elimination on the integer-scaled rows.
pub fn rank(m: &[Vec<Rational>]) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    bareiss_rank(integer_rows(m))
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> RationalMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn is_zero_matrix(m: &[Vec<Rational>]) -> bool {
    m.iter().all(|row| row.iter().all(Zero::is_zero))
}

/// Basis of the right null space, one vector per free column of the reduced
/// row echelon form.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> RationalMatrix {
    let mut a: RationalMatrix = m.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][free].clone();
            }
            v
        })
        .collect()
}

/// Integer multiple of a rational vector with all denominators cleared.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    integer_rows(&[v.to_vec()]).remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> RationalMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| rational(v, 1)).collect())
            .collect()
    }

    #[test]
    fn parse_and_reduce() {
        assert_eq!(parse_rational("6/4").unwrap(), rational(3, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), rational(-7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rational(2, -4).to_string(), "-1/2");
    }

    #[test]
    fn rank_with_fractions() {
        let m = vec![
            vec![rational(1, 3), rational(1, 2)],
            vec![rational(2, 3), rational(1, 1)],
        ];
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&q(&[&[1, 0, 2], &[0, 1, 3]])), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn nullspace_annihilates() {
        let m = q(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = nullspace(&m, 4);
        assert_eq!(ns.len(), 2);
        let cols: RationalMatrix = (0..4).map(|i| ns.iter().map(|v| v[i].clone()).collect()).collect();
        assert!(is_zero_matrix(&mat_mul(&m, &cols)));
        assert_eq!(
            primitive_integer_vector(&[rational(1, 2), rational(-1, 3)]),
            vec![BigInt::from(3), BigInt::from(-2)]
        );
    }
}
