//! TBR distance kernelization for pairs of unrooted binary phylogenetic
//! trees: tree primitives, exact desk-scale oracles, the ten reduction rules,
//! the kernelization driver and the tight instance family.

pub mod chain;
pub mod error;
pub mod kernel;
pub mod maf;
pub mod network;
pub mod newick;
pub mod pair;
pub mod parsimony;
pub mod random;
pub mod reduce;
pub mod tbr;
pub mod tight;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{check_kernel_bound, kernel_bound, kernel_bound_note, kernelize, kernelize_with, KernelResult, TraceFile};
pub use maf::{exact_tbr_distance, tbr_distance, AgreementForest, DistanceCertificate};
pub use newick::{parse_instance, parse_newick, read_instance};
pub use pair::{Orient, TreePair};
pub use parsimony::{fitch_score, mp_lower_bound, BinaryCharacter};
pub use random::random_instance;
pub use reduce::{KernelConfig, ReductionEvent, Rule};
pub use tree::{EdgeRef, PhyloTree, Taxon};
