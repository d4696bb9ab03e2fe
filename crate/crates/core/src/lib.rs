//! Tandem duplication distance toolkit.
//!
//! * [`strings`]: token strings, duplications, contractions, square search.
//! * [`search`]: exact distance by bounded contraction search.
//! * [`kernel`]: stable-block kernelization for exemplar sources.
//! * [`ces`]: the Cost-Effective Subgraph problem.
//! * [`reductions`]: CLIQUE → CES → exemplar TD instance builders, forward
//!   witness schedules and a replay verifier.
//! * [`io`]: the plain-text file formats.

pub mod ces;
pub mod generate;
pub mod io;
pub mod kernel;
pub mod reductions;
pub mod search;
pub mod strings;

pub use ces::{CesInstance, CesSolution, Graph};
pub use kernel::{Kernel, StablePartition};
pub use reductions::{TdReduction, WitnessSchedule};
pub use search::{DistanceOutcome, SearchResult, Verdict};
pub use strings::{ContractionStep, Symbol, SymbolTable, TokenString};
