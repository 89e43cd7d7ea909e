use lcs_core::twisted::fixtures;
use lcs_core::twisted::mapping_torus::{cat_map_times_circle, cubic_companion, cubic_real_root};
use lcs_core::twisted::*;
use nalgebra::DMatrix;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Rank oracle over Z/p with its own cochain assembly.
const P: u64 = (1 << 61) - 1;

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powm(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a);
        }
        a = mulm(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(q: &Rational) -> u64 {
    let red = |v: &num_bigint::BigInt| {
        let m = v.abs() % num_bigint::BigInt::from(P);
        let m = m.to_u64().unwrap();
        if v.is_negative() {
            (P - m) % P
        } else {
            m
        }
    };
    mulm(red(q.numer()), powm(red(q.denom()), P - 2))
}

fn rank_mod(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = powm(m[r][c], P - 2);
        for i in r + 1..rows {
            if m[i][c] != 0 {
                let f = mulm(m[i][c], inv);
                for j in c..cols {
                    m[i][j] = (m[i][j] + P - mulm(f, m[r][j])) % P;
                }
            }
        }
        r += 1;
    }
    r
}

fn oracle_matrix(c: &SimplicialComplex, s: &LocalSystem, k: usize) -> Vec<Vec<u64>> {
    let lower = c.simplices(k);
    c.simplices(k + 1)
        .iter()
        .map(|sigma| {
            lower
                .iter()
                .map(|tau| {
                    // tau is a face of sigma iff it misses exactly one vertex.
                    let missing: Vec<usize> = (0..sigma.len()).filter(|&i| !tau.contains(&sigma[i])).collect();
                    if missing.len() != 1 {
                        return 0;
                    }
                    let i = missing[0];
                    let w = if i == 0 {
                        to_mod(&s.weight(sigma[0], sigma[1]).unwrap())
                    } else {
                        1
                    };
                    if i % 2 == 1 {
                        (P - w) % P
                    } else {
                        w
                    }
                })
                .collect()
        })
        .collect()
}

fn oracle_betti(c: &SimplicialComplex, s: &LocalSystem) -> Vec<usize> {
    let d = c.dim();
    let ranks: Vec<usize> = (0..d).map(|k| rank_mod(oracle_matrix(c, s, k))).collect();
    (0..=d)
        .map(|k| c.count(k) - if k < d { ranks[k] } else { 0 } - if k > 0 { ranks[k - 1] } else { 0 })
        .collect()
}

#[test]
fn fixture_face_counts() {
    // Each torus grid vertex starts one horizontal, one vertical and one
    // diagonal edge, and each grid square holds two triangles.
    let t = fixtures::torus();
    let v = fixtures::TORUS_SIDE * fixtures::TORUS_SIDE;
    assert_eq!(t.f_vector(), vec![v, 3 * v, 2 * v]);
    assert_eq!(t.euler_characteristic(), 0);
    assert_eq!(fixtures::circle().euler_characteristic(), 0);
    assert_eq!(fixtures::disk().euler_characteristic(), 1);
    assert_eq!(fixtures::projective_plane().f_vector(), vec![6, 15, 10]);
    assert_eq!(fixtures::three_sphere().f_vector(), vec![5, 10, 10, 5]);
    // Closed surfaces: every edge lies on exactly two triangles.
    for c in [fixtures::sphere(), fixtures::torus(), fixtures::projective_plane()] {
        for e in c.edges() {
            let n = c
                .simplices(2)
                .iter()
                .filter(|t| t.contains(&e[0]) && t.contains(&e[1]))
                .count();
            assert_eq!(n, 2);
        }
    }
}

#[test]
fn trivial_system_gives_classical_betti_numbers() {
    let expected: &[(&str, &[usize])] = &[
        ("circle", &[1, 1]),
        ("disk", &[1, 0, 0]),
        ("sphere", &[1, 0, 1]),
        ("torus", &[1, 2, 1]),
        ("projective_plane", &[1, 0, 0]),
        ("three_sphere", &[1, 0, 0, 1]),
    ];
    for (name, dims) in expected {
        let c = fixtures::by_name(name).unwrap();
        let trivial = LocalSystem::trivial(&c);
        assert_eq!(twisted_betti(&c, &trivial).dims, dims.to_vec(), "{name}");
        assert_eq!(oracle_betti(&c, &trivial), dims.to_vec(), "{name}");
        assert_eq!(untwisted_betti(&c).dims, dims.to_vec());
    }
}

#[test]
fn coboundary_squares_to_zero_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, c) in fixtures::all() {
        for _ in 0..50 {
            let s = random_local_system(&c, &mut rng);
            for k in 0..c.dim().saturating_sub(1) {
                let d0 = coboundary(&c, &s, k);
                let d1 = coboundary(&c, &s, k + 1);
                for row in &d1 {
                    for j in 0..c.count(k) {
                        let v = row
                            .iter()
                            .zip(&d0)
                            .fold(Rational::default(), |acc, (a, r)| acc + a * &r[j]);
                        assert_eq!(v, Rational::default(), "{name} degree {k}");
                    }
                }
            }
        }
    }
}

#[test]
fn euler_identity_and_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, c) in fixtures::all() {
        for trial in 0..50 {
            let s = random_local_system(&c, &mut rng);
            let r = twisted_betti(&c, &s);
            let v = euler_check(&r);
            assert!(v.holds, "{name}: {v:?}");
            assert_eq!(v.chi, c.euler_characteristic());
            if trial < 5 {
                assert_eq!(r.dims, oracle_betti(&c, &s), "{name}");
            }
            // H^0 vanishes exactly when some loop has nontrivial holonomy.
            assert_eq!(r.dims[0] == 0, !s.is_trivial(&c), "{name}");
        }
    }
}

#[test]
fn circle_holonomy_kills_cohomology() {
    let c = fixtures::circle();
    for (p, q) in [(2, 1), (1, 3), (5, 7), (1, 1)] {
        let s = local_system(&c, &[EdgeWeight::new(1, 2, rational(p, q))]).unwrap();
        let expected = if p == q { vec![1, 1] } else { vec![0, 0] };
        assert_eq!(twisted_betti(&c, &s).dims, expected);
        assert_eq!(oracle_betti(&c, &s), expected);
    }
}

#[test]
fn torus_with_holonomy_along_one_direction() {
    let c = fixtures::torus();
    let one = rational(1, 1);
    for t in [rational(2, 1), rational(3, 5)] {
        let s = fixtures::torus_holonomy(&c, &t, &one).unwrap();
        assert_eq!(s.holonomy(&[0, 4, 8, 12]).unwrap(), t);
        assert_eq!(s.holonomy(&[0, 1, 2, 3]).unwrap(), one);
        assert_eq!(twisted_betti(&c, &s).dims, vec![0, 0, 0]);
        // Whole complex at once: sum of Betti numbers = dim C - 2 rank D.
        let (n0, n1, n2) = (c.count(0), c.count(1), c.count(2));
        let mut big = vec![vec![0u64; n0 + n1 + n2]; n0 + n1 + n2];
        for (i, row) in oracle_matrix(&c, &s, 0).into_iter().enumerate() {
            big[n0 + i][..n0].copy_from_slice(&row);
        }
        for (i, row) in oracle_matrix(&c, &s, 1).into_iter().enumerate() {
            big[n0 + n1 + i][n0..n0 + n1].copy_from_slice(&row);
        }
        assert_eq!(n0 + n1 + n2 - 2 * rank_mod(big), 0);
    }
    let s = fixtures::torus_holonomy(&c, &one, &one).unwrap();
    assert_eq!(s, LocalSystem::trivial(&c));
}

#[test]
fn local_system_from_generating_edges() {
    let c = fixtures::torus();
    let full = fixtures::torus_holonomy(&c, &rational(2, 1), &rational(1, 3)).unwrap();
    let given: Vec<EdgeWeight> = full
        .edge_weights()
        .into_iter()
        .filter(|w| w.w != Rational::one())
        .collect();
    let rebuilt = local_system(&c, &given).unwrap();
    assert_eq!(twisted_betti(&c, &rebuilt), twisted_betti(&c, &full));
    assert_eq!(rebuilt.holonomy(&[0, 4, 8, 12]), full.holonomy(&[0, 4, 8, 12]));
}

// Exterior power built from wedge products of columns, independent of minors.
fn exterior_power(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let sets: Vec<Vec<usize>> = (0..1usize << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let mut sets = sets;
    sets.sort();
    let mut out = DMatrix::zeros(sets.len(), sets.len());
    for (j, cols) in sets.iter().enumerate() {
        // Expand A e_{c1} ^ .. ^ A e_{ck} over all index tuples.
        let mut terms: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
        for &c in cols {
            let mut next = Vec::new();
            for (idx, coef) in &terms {
                for r in 0..n {
                    if a[(r, c)] != 0.0 && !idx.contains(&r) {
                        let mut v = idx.clone();
                        v.push(r);
                        next.push((v, coef * a[(r, c)]));
                    }
                }
            }
            terms = next;
        }
        for (idx, coef) in terms {
            let mut sorted = idx.clone();
            sorted.sort();
            let inversions = (0..idx.len())
                .flat_map(|x| (x + 1..idx.len()).map(move |y| (x, y)))
                .filter(|&(x, y)| idx[x] > idx[y])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let i = sets.iter().position(|s| *s == sorted).unwrap();
            out[(i, j)] += sign * coef;
        }
    }
    out
}

fn oracle_wang(a: &[Vec<i64>], t0: f64) -> Vec<usize> {
    let n = a.len();
    let at = DMatrix::from_fn(n, n, |i, j| a[j][i] as f64);
    let null: Vec<usize> = (0..=n)
        .map(|k| {
            let l = exterior_power(&at, k);
            let d = l.nrows();
            let m = l * t0 - DMatrix::identity(d, d);
            let sv = m.svd(false, false).singular_values;
            let max = sv.max();
            sv.iter().filter(|&&s| s < 1e-9 * max).count()
        })
        .collect();
    (0..=n + 1)
        .map(|k| if k <= n { null[k] } else { 0 } + if k > 0 { null[k - 1] } else { 0 })
        .collect()
}

#[test]
fn mapping_torus_of_identity() {
    let id1 = vec![vec![1]];
    let exact = |p, q| TwistParameter::Exact(rational(p, q));
    assert_eq!(mapping_torus_betti(&id1, &exact(1, 1)).unwrap().dims, vec![1, 2, 1]);
    assert_eq!(mapping_torus_betti(&id1, &exact(2, 1)).unwrap().dims, vec![0, 0, 0]);
    // The identity of T^3 gives T^4, matching the spectral torus count.
    let id3 = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let grid = lcs_core::GridSpec::new(4, 8).unwrap();
    let spectral = lcs_core::lichnerowicz::torus_twisted_betti(&[0.0f64; 4], &grid);
    assert_eq!(mapping_torus_betti(&id3, &exact(1, 1)).unwrap().dims, spectral);
    assert_eq!(mapping_torus_betti(&id3, &exact(3, 2)).unwrap().dims, vec![0; 5]);
    assert_eq!(
        mapping_torus_betti(&id3, &TwistParameter::Float(1.0)).unwrap().dims,
        spectral
    );
}

#[test]
fn hyperbolic_surrogate_matches_svd_oracle() {
    let a = cubic_companion();
    let t0 = 1.0 / cubic_real_root();
    assert!((t0 - 0.6823278038280193).abs() < 1e-15);
    let r = mapping_torus_betti(&a, &TwistParameter::Float(t0)).unwrap();
    assert_eq!(r.dims, oracle_wang(&a, t0));
    assert_eq!((r.dims[0], r.dims[4]), (0, 0));
    assert!(r.dims[1] >= 1);
    assert_eq!(r.euler_alternating_sum, 0);
    let v = example_inequality_check(&r).unwrap();
    assert!(v.identity_holds);
    assert_eq!(r.dims[2], r.dims[1] + r.dims[3] - r.dims[0] - r.dims[4]);

    let a = cat_map_times_circle();
    let t0 = 2.0 / (3.0 + 5f64.sqrt());
    let r = mapping_torus_betti(&a, &TwistParameter::Float(t0)).unwrap();
    assert_eq!(r.dims, oracle_wang(&a, t0));
    assert_eq!(r.dims, vec![0, 1, 2, 1, 0]);
    let v = example_inequality_check(&r).unwrap();
    assert!(v.hypotheses_met && v.b2_at_least_two);
}

fn unimodular(ops: &[(usize, usize, i64)], n: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            for col in 0..n {
                a[i][col] += c * a[j][col];
            }
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_invariance(seed in any::<u64>(), fixture in 0usize..6) {
        let (_, c) = fixtures::all().swap_remove(fixture);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_local_system(&c, &mut rng);
        let phi = lcs_core::twisted::local::random_potential(c.vertex_count(), &mut rng);
        let g = s.gauge(&phi).unwrap();
        g.validate(&c).unwrap();
        prop_assert_eq!(twisted_betti(&c, &g), twisted_betti(&c, &s));
    }

    #[test]
    fn mapping_torus_alternating_sum_vanishes(
        ops in proptest::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..6),
        n in 1usize..=3,
        p in 1i64..6,
        q in 1i64..6,
    ) {
        let a = unimodular(&ops, n);
        let r = mapping_torus_betti(&a, &TwistParameter::Exact(rational(p, q))).unwrap();
        prop_assert_eq!(r.euler_alternating_sum, 0);
        prop_assert!(euler_check(&r).holds);
    }
}
