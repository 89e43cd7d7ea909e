//! Standard triangulations.

use super::complex::{build_complex, SimplicialComplex};
use super::error::TwistedResult;
use super::exact::Rational;
use super::local::LocalSystem;

/// Boundary of a triangle.
pub fn circle() -> SimplicialComplex {
    build_complex(&[vec![0, 1], vec![1, 2], vec![0, 2]]).expect("valid fixture")
}

/// A closed 2-simplex.
pub fn disk() -> SimplicialComplex {
    build_complex(&[vec![0, 1, 2]]).expect("valid fixture")
}

/// Boundary of a tetrahedron.
pub fn sphere() -> SimplicialComplex {
    build_complex(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).expect("valid fixture")
}

/// Side length of the torus grid.
pub const TORUS_SIDE: usize = 4;

fn torus_vertex(i: usize, j: usize) -> usize {
    TORUS_SIDE * (i % TORUS_SIDE) + j % TORUS_SIDE
}

/// 16-vertex torus: a periodic 4x4 grid with each square cut along its
/// diagonal.
pub fn torus() -> SimplicialComplex {
    let mut top = Vec::new();
    for i in 0..TORUS_SIDE {
        for j in 0..TORUS_SIDE {
            let (a, b, c, d) = (
                torus_vertex(i, j),
                torus_vertex(i + 1, j),
                torus_vertex(i + 1, j + 1),
                torus_vertex(i, j + 1),
            );
            top.push(vec![a, b, c]);
            top.push(vec![a, d, c]);
        }
    }
    build_complex(&top).expect("valid fixture")
}

/// Local system on [`torus`] with holonomy `t` around the first grid
/// direction and `s` around the second.
pub fn torus_holonomy(complex: &SimplicialComplex, t: &Rational, s: &Rational) -> TwistedResult<LocalSystem> {
    let last = TORUS_SIDE - 1;
    let (mut nx, mut ny) = (Vec::new(), Vec::new());
    for e in complex.edges() {
        let (ia, ja) = (e[0] / TORUS_SIDE, e[0] % TORUS_SIDE);
        let (ib, jb) = (e[1] / TORUS_SIDE, e[1] % TORUS_SIDE);
        // Sorted edges across a seam run from index 0 to index `last`,
        // against the direction of travel.
        nx.push(if ia == 0 && ib == last { -1 } else { 0 });
        ny.push(match (ja, jb) {
            (0, j) if j == last => -1,
            (j, 0) if j == last => 1,
            _ => 0,
        });
    }
    LocalSystem::from_exponents(complex, &[(t.clone(), nx), (s.clone(), ny)])
}

/// Six-vertex real projective plane.
pub fn projective_plane() -> SimplicialComplex {
    let top = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 6, 2],
        [2, 3, 5],
        [3, 4, 6],
        [4, 5, 2],
        [5, 6, 3],
        [6, 2, 4],
    ];
    let top: Vec<Vec<usize>> = top.iter().map(|t| t.iter().map(|v| v - 1).collect()).collect();
    build_complex(&top).expect("valid fixture")
}

/// Boundary of a 4-simplex.
pub fn three_sphere() -> SimplicialComplex {
    let top: Vec<Vec<usize>> = (0..5).map(|skip| (0..5).filter(|&v| v != skip).collect()).collect();
    build_complex(&top).expect("valid fixture")
}

/// Every fixture with its name.
pub fn all() -> Vec<(&'static str, SimplicialComplex)> {
    vec![
        ("circle", circle()),
        ("disk", disk()),
        ("sphere", sphere()),
        ("torus", torus()),
        ("projective_plane", projective_plane()),
        ("three_sphere", three_sphere()),
    ]
}

pub fn by_name(name: &str) -> Option<SimplicialComplex> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
