//! Finite prime event structures: compilation from terms, configurations,
//! and (weak) pomset and step transitions.

pub mod compile;
pub mod pes;
pub mod pomset;
pub mod text;

pub use compile::{compile_basic, compile_structural, in_structural_fragment};
pub use pes::{Configuration, EventSet, Pes, PesError, DEFAULT_CONFIG_BOUND, MAX_EVENTS};
pub use pomset::{Pomset, PomsetKey};
pub use text::{parse_label, parse_pes};
