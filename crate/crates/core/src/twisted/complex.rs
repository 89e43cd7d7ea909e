//! Finite abstract simplicial complexes.

use std::collections::{BTreeSet, HashMap};

use super::error::{TwistedError, TwistedResult};

/// Largest supported simplex dimension.
pub const MAX_SIMPLEX_DIM: usize = 4;

/// A simplex as a strictly increasing vertex list.
pub type Simplex = Vec<usize>;

/// Closure-complete simplicial complex on vertices `0..V`.
///
/// Simplices of each dimension are stored sorted lexicographically; the
/// position in that list is the simplex index used by cochains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

/// Builds the closure of a list of (not necessarily maximal) simplices.
pub fn build_complex(top_simplices: &[Vec<usize>]) -> TwistedResult<SimplicialComplex> {
    let mut layers: Vec<BTreeSet<Simplex>> = Vec::new();
    for raw in top_simplices {
        let mut s = raw.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(TwistedError::RepeatedVertex { simplex: raw.clone() });
        }
        if s.is_empty() {
            continue;
        }
        if s.len() > MAX_SIMPLEX_DIM + 1 {
            return Err(TwistedError::DimensionTooLarge {
                simplex: raw.clone(),
                max: MAX_SIMPLEX_DIM,
            });
        }
        // Every nonempty subset is a face.
        for mask in 1u32..(1 << s.len()) {
            let face: Simplex = (0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
            let k = face.len() - 1;
            if layers.len() <= k {
                layers.resize_with(k + 1, BTreeSet::new);
            }
            layers[k].insert(face);
        }
    }
    if layers.is_empty() {
        return Err(TwistedError::EmptyComplex);
    }
    let vertex_count = layers[0].len();
    for (expected, v) in layers[0].iter().enumerate() {
        if v[0] != expected {
            return Err(TwistedError::MissingVertex {
                vertex: expected,
                count: vertex_count,
            });
        }
    }
    let simplices: Vec<Vec<Simplex>> = layers.into_iter().map(|l| l.into_iter().collect()).collect();
    let index = simplices
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    Ok(SimplicialComplex {
        vertex_count,
        simplices,
        index,
    })
}

impl SimplicialComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension.
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Simplices of dimension `k` (empty above the top dimension).
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    /// Number of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    /// Index of a sorted simplex within its dimension.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        self.index.get(k)?.get(simplex).copied()
    }

    pub fn edges(&self) -> &[Simplex] {
        self.simplices(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        let mut count = self.vertex_count;
        for e in self.edges() {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_boundary_is_a_circle() {
        let c = build_complex(&[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(c.f_vector(), vec![3, 3]);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(c.index_of(&[0, 2]), Some(1));
    }

    #[test]
    fn closed_simplex_is_a_disk() {
        let c = build_complex(&[vec![2, 0, 1]]).unwrap();
        assert_eq!(c.f_vector(), vec![3, 3, 1]);
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(c.components(), 1);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            build_complex(&[vec![0, 1, 1]]),
            Err(TwistedError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            build_complex(&[vec![0, 1, 2, 3, 4, 5]]),
            Err(TwistedError::DimensionTooLarge { .. })
        ));
        assert!(matches!(
            build_complex(&[vec![0, 2]]),
            Err(TwistedError::MissingVertex { .. })
        ));
        assert_eq!(build_complex(&[]), Err(TwistedError::EmptyComplex));
    }
}
