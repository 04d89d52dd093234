//! Zigzag persistence barcodes with interval representatives, kept current
//! under atomic filtration edits.
//!
//! Two engines maintain the same barcode: [`rep_updates`] carries an explicit
//! representative for every interval and [`fzz`] updates a reduced matrix of
//! a cone-converted filtration. [`fzz::barcode_from_scratch`] is the reference.

pub mod barcode;
pub mod chains;
pub mod cli;
pub mod dpc;
pub mod error;
pub mod filtration;
pub mod fzz;
pub mod io;
pub mod ops;
pub mod planner;
pub mod rep_updates;
pub mod reps;

pub use barcode::{Barcode, Interval};
pub use chains::{Chain, Complex, Registry, Simplex, SimplexId};
pub use error::{Error, Result};
pub use filtration::{Dir, Remap, Step, StepId, ZigzagFiltration};
pub use fzz::FzzState;
pub use ops::Op;
pub use rep_updates::{Bar, OpResult, OpStats, PersistenceState, VineEvent};
