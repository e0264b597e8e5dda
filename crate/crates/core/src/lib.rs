//! Symbolic regression with an improved Monte Carlo tree search.
//!
//! Expressions are binary trees over a small alphabet (`+ - * / sin cos exp
//! log`, variables and fitted constants), built token by token in pre-order.
//! The search combines an extreme-bandit selection rule (highest observed
//! reward plus a polynomial exploration bonus) with state-jumping moves:
//! genetic crossover and mutation of the best trajectories each node has seen,
//! shared across the tree by bidirectional queue propagation.
//!
//! Module map:
//! - [`expr`]: tokens, trees, pre-order codec, evaluation, constraints, simplifier
//! - [`objective`]: NRMSE, reward, R², constant fitting
//! - [`mdp`]: the sequential construction process (states, actions, rewards)
//! - [`evolve`]: crossover and mutation operators
//! - [`search`]: the search tree, trajectory queues and the search loop
//! - [`benchdata`]: ground-truth benchmarks and CSV ingestion

pub mod benchdata;
pub mod evolve;
pub mod expr;
pub mod mdp;
pub mod objective;
pub mod search;

pub use benchdata::{BenchmarkSpec, Dataset};
pub use expr::{ConstraintRuleSet, ExprTree, Token};
pub use mdp::{MdpConfig, SrState};
pub use search::{search, SearchConfig, SearchOutcome};
