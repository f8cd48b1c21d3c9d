//! Synthesis of sequential uniformizers for automatic relations whose
//! input/output interleaving is constrained by a target synchronization language.

pub mod automata;
pub mod canonical;
pub mod corpus;
pub mod error;
pub mod game;
pub mod io;
pub mod pipeline;
pub mod profiles;
pub mod resync;
pub mod sync;

pub use automata::{Alphabet, Dfa, Nfa, SequentialDfa, StateId, SyncWord, TaggedLetter, Tape};
pub use error::{Error, Result};
