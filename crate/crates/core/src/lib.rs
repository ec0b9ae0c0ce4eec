//! Reconstruction of graphs and point configurations on the line from
//! unlabeled integer edge lengths.
//!
//! The pipeline recovers the signed cycle space from the length vector by
//! lattice reduction ([`relations`]), realizes the graph from it
//! ([`realize`]), recovers the edge orientation induced by the point order
//! ([`orient`]) and lays the points out ([`layout`]). [`pipeline`] ties the
//! stages together and [`cli`] holds the experiment harness.
//!
//! Exact linear algebra is generic over the scalar type; the concrete
//! aliases below are what the pipeline uses.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod exactmath;
pub mod graph;
pub mod layout;
pub mod lll;
pub mod orient;
pub mod pipeline;
pub mod realize;
pub mod relations;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Exact rational over [`Int`].
pub type Rational = BigRational;
pub type IntMatrix = exactmath::Matrix<Int>;
pub type RatMatrix = exactmath::Matrix<Rational>;

/// Derives an independent stream seed from a master seed and a path of
/// indices (SplitMix64 finalizer applied per component).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}
