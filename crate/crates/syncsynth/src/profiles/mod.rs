//! State transformation trees and the profile monoids built from them.

pub mod profile;
pub mod stt;
pub mod tree;

pub use profile::{
    compute_k, find_idempotent_factor, input_profile, k_from_counts, output_profile, ramsey_bound, tau, Closure,
    InputProfile, KBound, OutputProfile, ProfileContext, ProfileParams, StateTransformationFn, DEFAULT_CLOSURE_CAP,
};
pub use stt::{
    annotated_output_stt, input_stt, named, named_annotated, node_name, output_stt, strip_annotations, AnnLabel,
    AnnTree, AnnotatedOutputStt, Flavor, InputStt, NodeRef, OutputStt, PairLabel, SttTree,
};
pub use tree::{tree_to_dot, LabeledTree};
