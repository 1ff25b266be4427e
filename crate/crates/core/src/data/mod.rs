//! Collections that stay sound when keys are symbolic.

mod map;
mod range;

pub use map::SymMap;
pub use range::Range;
