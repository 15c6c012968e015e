pub mod basic;
pub mod bratteli;
pub mod clopen;
pub mod decisive;
pub mod error;
pub mod io;
pub mod partial;
pub mod pipeline;
pub mod section;
pub mod shift;
pub mod towers;

pub use clopen::{ClopenSet, Cylinder, Decision};
pub use error::{Error, Result};
pub use section::{cell_words, cylinder_partition, is_complete_section, CompletenessReport};
pub use shift::{EdgeShift, PeriodicOrbit, PeriodicPoint, Symbol, Word};
