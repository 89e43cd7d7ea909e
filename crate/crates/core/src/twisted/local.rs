//! Flat rank-one local systems given by multiplicative edge weights.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;

use super::cohomology::coboundary;
use super::complex::SimplicialComplex;
use super::error::{TwistedError, TwistedResult};
use super::exact::{nullspace, primitive_integer_vector, rational, Rational};

/// Weight prescribed on one oriented edge; `w` is the holonomy along `a -> b`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeight {
    pub edge: [usize; 2],
    pub w: Rational,
}

impl EdgeWeight {
    pub fn new(a: usize, b: usize, w: Rational) -> Self {
        Self { edge: [a, b], w }
    }
}

/// Positive rational holonomy on every edge with `w(b,a) = 1/w(a,b)` and
/// `w(a,b) w(b,c) w(c,a) = 1` on every 2-simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystem {
    weights: BTreeMap<(usize, usize), Rational>,
}

/// Assembles a local system from weights on a generating set of edges.
///
/// Unlisted edges are inferred from 2-simplices with two known edges; any
/// edge still free afterwards gets weight 1 and inference resumes. The
/// cocycle condition is then checked exactly on every 2-simplex.
pub fn local_system(complex: &SimplicialComplex, edge_weights: &[EdgeWeight]) -> TwistedResult<LocalSystem> {
    let mut known: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for ew in edge_weights {
        let [a, b] = ew.edge;
        let key = (a.min(b), a.max(b));
        if a == b || complex.index_of(&[key.0, key.1]).is_none() {
            return Err(TwistedError::UnknownEdge { a, b });
        }
        if !ew.w.is_positive() {
            return Err(TwistedError::NonPositiveWeight {
                a,
                b,
                weight: ew.w.to_string(),
            });
        }
        let w = if a < b { ew.w.clone() } else { ew.w.recip() };
        if known.insert(key, w).is_some() {
            return Err(TwistedError::DuplicateEdge { a, b });
        }
    }
    loop {
        propagate(complex, &mut known);
        let Some(free) = complex.edges().iter().find(|e| !known.contains_key(&(e[0], e[1]))) else {
            break;
        };
        known.insert((free[0], free[1]), Rational::one());
    }
    let system = LocalSystem { weights: known };
    system.validate(complex)?;
    Ok(system)
}

fn oriented(known: &BTreeMap<(usize, usize), Rational>, a: usize, b: usize) -> Option<Rational> {
    if a < b {
        known.get(&(a, b)).cloned()
    } else {
        known.get(&(b, a)).map(Rational::recip)
    }
}

fn propagate(complex: &SimplicialComplex, known: &mut BTreeMap<(usize, usize), Rational>) {
    let mut changed = true;
    while changed {
        changed = false;
        for t in complex.simplices(2) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let (ab, bc, ac) = (oriented(known, a, b), oriented(known, b, c), oriented(known, a, c));
            let inferred = match (ab, bc, ac) {
                (Some(ab), Some(bc), None) => Some(((a, c), ab * bc)),
                (Some(ab), None, Some(ac)) => Some(((b, c), ac / ab)),
                (None, Some(bc), Some(ac)) => Some(((a, b), ac / bc)),
                _ => None,
            };
            if let Some((key, w)) = inferred {
                known.insert(key, w);
                changed = true;
            }
        }
    }
}

impl LocalSystem {
    /// All weights 1.
    pub fn trivial(complex: &SimplicialComplex) -> Self {
        Self {
            weights: complex
                .edges()
                .iter()
                .map(|e| ((e[0], e[1]), Rational::one()))
                .collect(),
        }
    }

    /// `w(e) = prod_i base_i^{n_i(e)}` for integer 1-cochains `n_i` indexed
    /// like `complex.edges()`.
    pub fn from_exponents(complex: &SimplicialComplex, factors: &[(Rational, Vec<i64>)]) -> TwistedResult<Self> {
        let mut weights = BTreeMap::new();
        for (i, e) in complex.edges().iter().enumerate() {
            let mut w = Rational::one();
            for (base, exps) in factors {
                if !base.is_positive() {
                    return Err(TwistedError::NonPositiveWeight {
                        a: e[0],
                        b: e[1],
                        weight: base.to_string(),
                    });
                }
                w *= pow(base, exps.get(i).copied().unwrap_or(0));
            }
            weights.insert((e[0], e[1]), w);
        }
        let system = Self { weights };
        system.validate(complex)?;
        Ok(system)
    }

    /// Holonomy along the oriented edge `a -> b`.
    pub fn weight(&self, a: usize, b: usize) -> Option<Rational> {
        oriented(&self.weights, a, b)
    }

    /// Product of weights around a closed vertex path (the closing edge is
    /// implied).
    pub fn holonomy(&self, cycle: &[usize]) -> Option<Rational> {
        let mut h = Rational::one();
        for (i, &a) in cycle.iter().enumerate() {
            h *= self.weight(a, cycle[(i + 1) % cycle.len()])?;
        }
        Some(h)
    }

    /// Exact cocycle check on every 2-simplex.
    pub fn validate(&self, complex: &SimplicialComplex) -> TwistedResult<()> {
        for e in complex.edges() {
            match self.weights.get(&(e[0], e[1])) {
                Some(w) if w.is_positive() => {}
                Some(w) => {
                    return Err(TwistedError::NonPositiveWeight {
                        a: e[0],
                        b: e[1],
                        weight: w.to_string(),
                    })
                }
                None => return Err(TwistedError::UnknownEdge { a: e[0], b: e[1] }),
            }
        }
        for t in complex.simplices(2) {
            let h = self.holonomy(t).expect("edges checked above");
            if !h.is_one() {
                return Err(TwistedError::CocycleViolation {
                    simplex: [t[0], t[1], t[2]],
                    holonomy: h.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Vertex potential `phi` with `w(a,b) = phi(b)/phi(a)`, normalized to 1
    /// at the least vertex of each component; `None` when some loop has
    /// nontrivial holonomy.
    pub fn potential(&self, complex: &SimplicialComplex) -> Option<Vec<Rational>> {
        let n = complex.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for e in complex.edges() {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        let mut phi: Vec<Option<Rational>> = vec![None; n];
        for root in 0..n {
            if phi[root].is_some() {
                continue;
            }
            phi[root] = Some(Rational::one());
            let mut queue = VecDeque::from([root]);
            while let Some(a) = queue.pop_front() {
                let pa = phi[a].clone()?;
                for &b in &adj[a] {
                    let expected = &pa * self.weight(a, b)?;
                    match &phi[b] {
                        Some(pb) if *pb != expected => return None,
                        Some(_) => {}
                        None => {
                            phi[b] = Some(expected);
                            queue.push_back(b);
                        }
                    }
                }
            }
        }
        phi.into_iter().collect()
    }

    /// True iff every loop has holonomy 1.
    pub fn is_trivial(&self, complex: &SimplicialComplex) -> bool {
        self.potential(complex).is_some()
    }

    /// Multiplies `w(a,b)` by the coboundary `phi(b)/phi(a)`.
    pub fn gauge(&self, phi: &[Rational]) -> TwistedResult<Self> {
        if let Some(v) = phi.iter().position(|p| !p.is_positive()) {
            return Err(TwistedError::NonPositiveWeight {
                a: v,
                b: v,
                weight: phi[v].to_string(),
            });
        }
        let mut weights = self.weights.clone();
        for (&(a, b), w) in weights.iter_mut() {
            let (Some(pa), Some(pb)) = (phi.get(a), phi.get(b)) else {
                return Err(TwistedError::PotentialLength {
                    expected: a.max(b) + 1,
                    found: phi.len(),
                });
            };
            *w = &*w * pb / pa;
        }
        Ok(Self { weights })
    }

    /// Oriented edge weights in edge order.
    pub fn edge_weights(&self) -> Vec<EdgeWeight> {
        self.weights
            .iter()
            .map(|(&(a, b), w)| EdgeWeight::new(a, b, w.clone()))
            .collect()
    }
}

fn pow(base: &Rational, exp: i64) -> Rational {
    let p = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Integer basis of the additive 1-cocycles (kernel of the untwisted
/// coboundary on edges).
pub fn cocycle_basis(complex: &SimplicialComplex) -> Vec<Vec<i64>> {
    let edges = complex.count(1);
    if edges == 0 {
        return Vec::new();
    }
    let d1 = coboundary(complex, &LocalSystem::trivial(complex), 1);
    nullspace(&d1, edges)
        .iter()
        .map(|v| {
            primitive_integer_vector(v)
                .iter()
                .map(|x: &BigInt| x.to_i64().expect("small cocycle entries"))
                .collect()
        })
        .collect()
}

/// Random positive potential with numerators and denominators in `1..=5`.
pub fn random_potential<R: Rng + ?Sized>(vertices: usize, rng: &mut R) -> Vec<Rational> {
    (0..vertices)
        .map(|_| rational(rng.random_range(1..=5), rng.random_range(1..=5)))
        .collect()
}

/// Random local system: exponents of the primes 2, 3 and 5 are random small
/// combinations of the cocycle basis, followed by a random gauge change.
pub fn random_local_system<R: Rng + ?Sized>(complex: &SimplicialComplex, rng: &mut R) -> LocalSystem {
    let basis = cocycle_basis(complex);
    let edges = complex.count(1);
    let factors: Vec<(Rational, Vec<i64>)> = [2, 3, 5]
        .iter()
        .map(|&p| {
            let mut exps = vec![0i64; edges];
            for b in &basis {
                let c = rng.random_range(-1..=1i64);
                for (e, v) in exps.iter_mut().zip(b) {
                    *e += c * v;
                }
            }
            (rational(p, 1), exps)
        })
        .collect();
    let system = LocalSystem::from_exponents(complex, &factors).expect("basis vectors are cocycles");
    system
        .gauge(&random_potential(complex.vertex_count(), rng))
        .expect("positive potential")
}
