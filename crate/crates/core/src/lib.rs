//! Information complementarity for two-qubit states.
//!
//! The crate builds the standard two-qubit state families and noise
//! channels, evaluates entropy, information, entanglement and
//! visibility/predictability measures, traces the maximal-tangle frontier of
//! the tangle/entropy plane, and simulates Pauli tomography with Poissonian
//! counting noise.
//!
//! All matrices use the basis `|00>, |01>, |10>, |11>` with qubit `a` as the
//! left tensor factor. Information is measured in bits.

pub mod frontier;
pub mod linalg;
pub mod measures;
pub mod search;
pub mod states;
pub mod tomo;

pub use linalg::{Axis, ComplexMatrix, Subsystem};
pub use measures::{InfoBudget, Measure};
pub use states::{make_state, DensityMatrix, Family};
