//! Strongly diamond-free Cayley posets over finite abelian groups, the
//! diamond-free subset families they induce, and the random-walk
//! computations that give their expected sizes.
//!
//! - [`group`]: cyclic-product groups, generating sets, sumsets, periods.
//! - [`poset`]: the order relation, diamond and strong-chain witnesses.
//! - [`constructions`]: the catalogue of known strongly diamond-free posets.
//! - [`family`]: weighted ground sets, slices, families and the diamond check.
//! - [`markov`]: convolution powers, expected sizes, seeded sampling.
//! - [`search`]: branch and bound for the largest poset in a grid.

pub mod binom;
pub mod constructions;
pub mod error;
pub mod family;
pub mod format;
pub mod group;
pub mod markov;
pub mod poset;
pub mod search;
pub mod sweep;

pub use constructions::{Construction, KindParams};
pub use error::{Error, Result};
pub use family::{SubsetFamily, WeightedGroundSet};
pub use group::{FiniteAbelianGroup, GeneratorSet, GroupElement, PeriodInfo};
pub use markov::{GroupDistribution, StepDistribution};
pub use poset::{CayleyPoset, Convention, PosetElement};
pub use search::{max_sdf_poset, SearchProblem, SearchResult};
