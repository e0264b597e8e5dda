//! Expression alphabet, pre-order codec, constraints, evaluation and
//! simplification.

mod constraints;
mod eval;
mod simplify;
mod token;
mod tree;

pub use constraints::{ConstraintRuleSet, OpenSlots, Slot, Violation};
pub use eval::{evaluate, Evaluated, Evaluator};
pub use simplify::{folds_to_zero, node_count, simplify_basic};
pub use token::{alphabet, parse_tokens, Token};
pub use tree::{decode_preorder, encode_preorder, sequence_depth, Decoded, ExprTree, Node};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("empty token sequence")]
    Empty,
    #[error("token at position {position} follows a complete expression")]
    OverfullSequence { position: usize },
    #[error("token at position {position} exceeds maximum depth {max_depth}")]
    DepthViolation { position: usize, max_depth: usize },
    #[error("expression is incomplete ({open_slots} open slots)")]
    Incomplete { open_slots: usize },
    #[error("expression has unbound constants")]
    UnboundConstant,
    #[error("expected {expected} constants, got {got}")]
    ConstantCount { expected: usize, got: usize },
    #[error("variable x{index} out of range for {dims} input columns")]
    VariableOutOfRange { index: usize, dims: usize },
    #[error("unknown token {0:?}")]
    UnknownToken(String),
}
