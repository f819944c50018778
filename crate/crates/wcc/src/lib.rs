//! Weakly constrained codes built from Eulerian cycles on edge-replicated
//! multigraphs.
//!
//! The library covers the full pipeline:
//!
//! * [`graph`] — labeled directed graphs, validation, and lexicographically
//!   first Eulerian completions;
//! * [`markov`] — stationary Markov chains on a graph, entropy rate, the
//!   maxentropic (Parry) chain, n-integral quantization, and spectral gaps;
//! * [`pool`] — the codebook of admissible typical prefixes closed by a
//!   deterministic Eulerian completion;
//! * [`counting`] — exact transition-count path enumeration and the pool-size
//!   and pool-rate lower bounds;
//! * [`bounds`] — finite-blocklength reliability, distance-failure, and
//!   code-size bounds from Bernstein inequalities;
//! * [`ldp`] — product-chain machinery, the large-deviation rate function,
//!   and the asymptotic achievable rates;
//! * [`expurgate`] — extracting a minimum-distance subcode from a pool;
//! * [`concat`] — the Reed-Solomon concatenated codec with polynomial-time
//!   encoding and decoding;
//! * [`formats`] — the line-oriented file formats tying runs together.
//!
//! A narrative guide lives in the `book/` directory of the repository; its
//! chapters are also compiled as doc-tests through the [`guide`] module, so
//! every snippet in the book is checked by `cargo test --doc`.

pub mod bounds;
pub mod concat;
pub mod counting;
pub mod expurgate;
pub mod formats;
pub mod graph;
pub mod guide;
pub mod ldp;
pub mod markov;
pub mod pool;

pub use graph::{LabeledGraph, Multigraph, ValidationReport};
pub use markov::{GapReport, IntegralChain, MarkovChain};
pub use pool::{Codeword, PoolSpec, Walk};

/// Exact rational scalar used wherever the contracts demand exactness.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision integer re-export.
pub type Int = num_bigint::BigInt;

/// Convert an exact rational to `f64` (for report fields and exponents).
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated parts for huge operands.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}
