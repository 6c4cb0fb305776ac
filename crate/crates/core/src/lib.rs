//! Construction and exhaustive analysis of locally recoverable codes.
//!
//! Every analysis here works on explicit codebooks and is exact: distances,
//! repair sets and structural properties are found by exhaustive search, so
//! the crate handles linear and non-linear codes alike as long as they fit
//! the size caps in [`code::Limits`].
//!
//! Coordinates are 0-based in the Rust API and 1-based in every JSON form.

pub mod code;
pub mod construct;
pub mod error;
pub mod field;
pub mod locality;
pub mod repair;
pub mod structure;
pub mod subcode;

pub use code::{Codebook, Limits, Symbol, SystematicCode};
pub use construct::{ConstructionSpec, PyramidSpec, TwistSpec};
pub use error::{Error, Result};
pub use locality::LocalityProfile;
pub use repair::{ErasurePattern, Recovery};
pub use structure::StructureReport;
pub use subcode::{OptimalityClaim, Strategy, SubcodeTrace};
