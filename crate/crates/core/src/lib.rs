//! Instruction sequences acting on Boolean registers, their behaviour as
//! finite threads, and checkers for structural equivalence of sequences.

pub mod equivalence;
pub mod pga;
pub mod projection;
pub mod semantics;
pub mod services;
pub mod thread;
