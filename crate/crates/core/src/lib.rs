//! Combinatorial resolution of singularities for binomial ideals.
//!
//! Ideals live on charts whose variables either may vanish (`x`) or are invertible
//! (`y`). Points are replaced by strata, subsets of the `x` variables, so every
//! quantity used by the algorithm is a finite exact computation.

pub mod chart;
pub mod corpus;
pub mod driver;
pub mod eorder;
pub mod error;
pub mod field;
pub mod io;
pub mod ideal;
pub mod invariant;
pub mod lattice;
pub mod monomialize;
pub mod stratum;
pub mod transform;

pub use chart::{Chart, Divisor, Lineage, Origin, VariableInfo};
pub use error::{Error, Result};
pub use field::{FieldElement, Q};
pub use ideal::{normalize_generator, Generator, Ideal, Term, VarClass};
pub use stratum::{Stratum, StratumFamily};
