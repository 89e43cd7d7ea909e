//! Exact Lichnerowicz cohomology of combinatorial models.
//!
//! A closed 1-form is replaced by its holonomy: a flat rank-one local system
//! on a simplicial complex, given by positive rational edge weights. Ranks
//! are computed exactly by fraction-free elimination. Mapping tori of torus
//! automorphisms are handled through the Wang sequence, exactly for a
//! rational twist and by thresholded SVD for a floating-point twist.

pub mod cohomology;
pub mod complex;
pub mod error;
pub mod exact;
pub mod example;
pub mod fixtures;
pub mod io;
pub mod local;
pub mod mapping_torus;

pub use cohomology::{coboundary, euler_check, twisted_betti, untwisted_betti, EulerVerdict, TwistedBettiResult};
pub use complex::{build_complex, Simplex, SimplicialComplex};
pub use error::{TwistedError, TwistedResult};
pub use exact::{parse_rational, rational, Rational};
pub use example::{example_inequality_check, ExampleVerdict};
pub use io::{ComplexInput, MappingTorusInput};
pub use local::{cocycle_basis, local_system, random_local_system, EdgeWeight, LocalSystem};
pub use mapping_torus::{mapping_torus_betti, wang_nullities, TwistParameter};
