//! Refocussing sequences for a spin-1/2 under large static resonance offset.
//!
//! Sequences are built from a base π pulse `P` about +y and its
//! phase-reversed twin `P̄`, and propagated exactly as products of SU(2)
//! elements stored as real quaternions. Error cancellation between paired
//! subsequences relies on the spinor sign `(-1)^k` of a `2kπ` rotation.
//!
//! ```
//! use refocus::{analysis::{epsilon_max, Protocol}, pulse::levitt3, sequence::build_canonical};
//!
//! let p = Protocol::new(build_canonical("16").unwrap(), levitt3());
//! let e = epsilon_max(&p, 0.99).unwrap();
//! assert!((e - 0.77).abs() < 0.02);
//! ```

pub mod analysis;
pub mod error;
pub mod order;
pub mod precise;
pub mod pulse;
pub mod reference;
pub mod sequence;
pub mod su2;
pub mod table;

pub use error::{Error, Result};
pub use su2::{Component, ErrorCoeffs, Unitary2};
