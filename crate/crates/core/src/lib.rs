//! Exact T-depth optimal Clifford+T synthesis.
//!
//! Unitaries over Z[i,1/√2] are handled through their channel
//! representation. The search modules build generating sets of
//! T-depth-one products, label Clifford cosets canonically, and either run
//! an exhaustive meet-in-the-middle search or a nested pruned heuristic.

pub mod builtins;
pub mod channel;
pub mod circuit;
pub mod clifford;
pub mod coset;
pub mod decomposition;
pub mod dense;
pub mod error;
pub mod genset;
pub mod heuristic;
pub mod mitm;
pub mod pauli;
pub mod ring;
pub mod sparse;
pub mod synth;

pub use channel::{ChannelMatrix, RpCompact};
pub use circuit::{Circuit, Gate, Metrics};
pub use clifford::CliffordTableau;
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use pauli::SignedPauli;
pub use ring::{DyadicRootTwo, GaussianRootTwo};
