//! Preimage counts, extendable-prefix counts and partition sums.

mod count;
mod dn;
mod engine;
mod logreal;

pub use count::{
    brute_force_count, fiber_vector, image_word_counts, image_words, preimage_count, FiberVector,
    DEFAULT_ORACLE_BOUND,
};
pub use dn::{dn_count, dn_series};
pub use engine::{
    exact_node_count, partition_series, partition_sum, PartitionSum, SubtreeEngine, Subtree,
    SumMode, DEFAULT_NODE_BUDGET,
};
pub use logreal::LogReal;
