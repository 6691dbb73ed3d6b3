//! Bounded pushdown compressors, LZ78 and polylog-space online compressors,
//! together with the witness sequences that separate them.

pub mod alphabet;
pub mod bits;
pub mod harness;
pub mod lz78;
pub mod pda;
pub mod plogon;
pub mod witness;
pub mod zoo;
