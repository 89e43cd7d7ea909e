//! Small dense linear algebra: pivoted solves and least squares for the
//! per-node systems, and fraction-free elimination for exact ranks.

use num_traits::Num;

use crate::grid::MAX_DIM;
use crate::scalar::Real;

pub type Mat4<T> = [[T; MAX_DIM]; MAX_DIM];

/// Solves `a x = b` for the leading `n x n` block by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot vanishes.
pub fn solve<T: Real>(a: &Mat4<T>, b: &[T; MAX_DIM], n: usize) -> Option<[T; MAX_DIM]> {
    let mut m = *a;
    let mut x = *b;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col] == T::zero() {
            return None;
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let v = x[col];
            x[row] -= f * v;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

/// Least-squares solution of the `rows x cols` system `a x ~ b` via
/// Householder QR (`rows >= cols`). Returns the solution and the residual
/// norm, or `None` if `a` is rank deficient.
pub fn least_squares<T: Real>(a: &[Vec<T>], b: &[T], cols: usize) -> Option<(Vec<T>, T)> {
    let rows = a.len();
    if rows < cols {
        return None;
    }
    let mut r: Vec<Vec<T>> = a.to_vec();
    let mut qtb = b.to_vec();
    let scale = r.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..cols {
        let norm = (col..rows).map(|i| r[i][col] * r[i][col]).sum::<T>().sqrt();
        if norm <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        let alpha = if r[col][col] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (col..rows).map(|i| r[i][col]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|x| *x * *x).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        for k in col..cols {
            let dot = (col..rows).map(|i| v[i - col] * r[i][k]).sum::<T>();
            let f = T::lit(2.0) * dot / vnorm2;
            for i in col..rows {
                r[i][k] -= f * v[i - col];
            }
        }
        let dot = (col..rows).map(|i| v[i - col] * qtb[i]).sum::<T>();
        let f = T::lit(2.0) * dot / vnorm2;
        for i in col..rows {
            qtb[i] -= f * v[i - col];
        }
    }
    let mut x = vec![T::zero(); cols];
    for col in (0..cols).rev() {
        let mut s = qtb[col];
        for k in col + 1..cols {
            s -= r[col][k] * x[k];
        }
        x[col] = s / r[col][col];
    }
    let residual = qtb[cols..].iter().map(|v| *v * *v).sum::<T>().sqrt();
    Some((x, residual))
}

/// Pfaffian of a 4x4 antisymmetric matrix given by its upper entries.
#[inline]
pub fn pfaffian4<T: Real>(m: &Mat4<T>) -> T {
    m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2]
}

/// Rank by fraction-free (Bareiss) elimination over an integral domain with
/// exact division (integers, rationals). Row pivoting is deterministic: the
/// first nonzero entry in the current column is used.
pub fn bareiss_rank<R: Num + Clone>(mut m: Vec<Vec<R>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = R::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                // m[i][j] = (m[r][c] m[i][j] - m[i][c] m[r][j]) / prev
                let num = m[rank][col].clone() * m[i][j].clone() - m[i][col].clone() * m[rank][j].clone();
                m[i][j] = num / prev.clone();
            }
            m[i][col] = R::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Determinant by Bareiss elimination.
pub fn bareiss_det<R: Num + Clone>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut sign_negative = false;
    let mut prev = R::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return R::zero();
        };
        if piv != k {
            m.swap(k, piv);
            sign_negative = !sign_negative;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = num / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_negative {
        R::zero() - det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn pivoted_solve() {
        let mut a = [[0.0f64; 4]; 4];
        a[0] = [0.0, 2.0, 0.0, 0.0];
        a[1] = [1.0, 0.0, 0.0, 0.0];
        a[2] = [0.0, 0.0, 3.0, 1.0];
        a[3] = [0.0, 0.0, 1.0, 1.0];
        let x = solve(&a, &[2.0, 5.0, 4.0, 2.0], 4).unwrap();
        assert!((x[0] - 5.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert!((x[2] - 1.0).abs() < 1e-15 && (x[3] - 1.0).abs() < 1e-15);
        a[3] = a[2];
        assert!(solve(&a, &[0.0; 4], 4).is_none() || solve(&a, &[0.0; 4], 4).unwrap().iter().any(|v| !v.is_finite()));
    }

    #[test]
    fn least_squares_overdetermined() {
        // Fit y = 1 + 2x.
        let a: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]];
        let (x, res) = least_squares(&a, &[1.0, 3.0, 5.0], 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        assert!(res < 1e-14);
        let (_, res) = least_squares(&a, &[1.0, 3.0, 6.0], 2).unwrap();
        assert!((res - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
        assert!(least_squares(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[0.0, 0.0], 2).is_none());
    }

    #[test]
    fn bareiss_integer_rank_and_det() {
        let m: Vec<Vec<BigInt>> = [[2, 4, 6], [1, 2, 3], [0, 1, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        assert_eq!(bareiss_rank(m.clone()), 2);
        assert_eq!(bareiss_det(m), BigInt::from(0));
        let c: Vec<Vec<i64>> = vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 1]];
        assert_eq!(bareiss_det(c), 1);
        let q = vec![
            vec![
                BigRational::new(1.into(), 2.into()),
                BigRational::from_integer(1.into()),
            ],
            vec![BigRational::from_integer(1.into()), BigRational::from_integer(2.into())],
        ];
        assert_eq!(bareiss_rank(q), 1);
    }

    #[test]
    fn pfaffian_of_standard_form() {
        let mut m = [[0.0f64; 4]; 4];
        m[0][1] = 1.0;
        m[2][3] = 1.0;
        assert_eq!(pfaffian4(&m), 1.0);
    }
}
