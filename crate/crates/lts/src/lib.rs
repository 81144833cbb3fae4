//! Structural operational semantics of APTC as step transitions, and the
//! exploration of finite step transition systems.
//!
//! The semantics is computed in lock-step layers: every term offers a set
//! of steps (multisets of labels), each with a residue. Steps of parallel
//! components are joined; a step of a normal form is executed as any of its
//! nonempty sub-multisets. Shadows are silent, and `τ` is absorbed by
//! visible events of the same step.

pub mod explore;
pub mod guard;
pub mod sos;
mod theta;

pub use explore::{explore, StepGraph, StepLTS, Target, Transition, DEFAULT_MAX_STATES};
pub use guard::{check_guarded_linear, GuardReport};
pub use sos::{canon, sos_basic, sos_steps, Layer, LtsError, Sos, Steps};
