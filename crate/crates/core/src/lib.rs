//! Fast stabilizer circuit simulation.
//!
//! Two engines share one gate registry and circuit format:
//!
//! - [`TableauSimulator`] tracks the *inverse* of the Clifford applied so far,
//!   so the start-of-time observable of a Z measurement is read straight off
//!   the tableau. Deterministic measurements cost O(n), random ones O(n²).
//! - [`FrameSimulator`] propagates a batch of Pauli frames through a circuit
//!   with word-wide bit operations and turns them into samples by xoring
//!   against one noiseless reference sample.
//!
//! ```
//! use stabsim::{Circuit, sample};
//!
//! let circuit: Circuit = "H 0\nCNOT 0 1\nM 0 1".parse().unwrap();
//! let shots = sample(&circuit, 100, 5).unwrap();
//! for s in 0..shots.num_shots() {
//!     assert_eq!(shots.get(s, 0), shots.get(s, 1));
//! }
//! ```

pub mod bench;
pub mod bits;
pub mod circuit;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod formats;
pub mod frame_sim;
pub mod gates;
pub mod pauli;
pub mod tableau;
pub mod tableau_sim;

pub use bits::{BitBuffer, BitTable};
pub use circuit::{Circuit, Instruction, Operation, Target};
pub use error::{Error, Result};
pub use formats::{OutputFormat, SampleTable};
pub use frame_sim::{detect, sample, FrameSimulator};
pub use gates::{Gate, GateData, GateFlags};
pub use pauli::{Pauli, PauliString};
pub use tableau::{Generator, Layout, Tableau};
pub use tableau_sim::TableauSimulator;
