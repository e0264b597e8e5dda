//! The improved Monte Carlo tree search.
//!
//! Each iteration walks down from the root while the current node is fully
//! expanded. At every step it may first apply a state jump (mutation or
//! crossover of trajectories from the node's queue, with probability
//! `g_s·2^(−depth)`), then moves to a uniformly random child with probability
//! `ε` or to the child maximizing
//! `Ψ = V̂(child) + 2c·(ln T_parent / T_child)^γ`. At the leaf one untried
//! action is expanded and completed by a uniform rollout; the scored
//! expression is propagated to ancestor queues, and the parent's queue is
//! replayed into the new node.
//!
//! Every scored expression is one evaluation against the budget; invalid
//! offspring are dropped without cost.

mod queue;
mod tree;

use std::io::Write;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchdata::Dataset;
use crate::evolve::{crossover_single_point, mutate, EvolveConfig, Offspring};
use crate::expr::{ExprTree, Token};
use crate::mdp::{MdpConfig, MdpError, SrState};
use crate::objective::{Scorer, DEFAULT_FIT_ITERATIONS};

pub use queue::{Entry, ExprId, ExprStore, TopQueue};
pub use tree::{jump_probability, selection_score, NodeId, SearchNode, SearchTree};

/// Rewards at or above `1 − EXACT_TOLERANCE` count as an exact fit.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("evaluation budget must be positive")]
    BudgetZero,
    #[error("dataset has {data} inputs but the alphabet uses x{var}")]
    VariableMismatch { data: usize, var: usize },
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Exploration weight `c`.
    pub c: f64,
    /// Exploration exponent `γ`.
    pub gamma: f64,
    /// Queue capacity `N`.
    pub queue_size: usize,
    /// Base state-jump rate `g_s` at the root.
    pub g_s: f64,
    /// Probability that a state jump is a mutation rather than a crossover.
    pub g_m: f64,
    /// Probability of a uniformly random child during selection.
    pub epsilon: f64,
    /// Maximum number of scored expressions.
    pub budget: u64,
    pub seed: u64,
    /// Stop as soon as an exact fit is found.
    pub stop_on_exact: bool,
    /// Keep a record of every scored expression.
    pub record_log: bool,
    /// Iteration cap of the constant optimizer.
    pub fit_iterations: usize,
    /// Height of random subtrees grown by mutation.
    pub mutation_subtree_depth: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: 0.5,
            queue_size: 500,
            g_s: 0.2,
            g_m: 0.1,
            epsilon: 0.2,
            budget: 2_000_000,
            seed: 0,
            stop_on_exact: true,
            record_log: false,
            fit_iterations: DEFAULT_FIT_ITERATIONS,
            mutation_subtree_depth: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Rollout,
    Mutation,
    Crossover,
}

/// One scored expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub eval_index: u64,
    pub tokens: Vec<Token>,
    pub reward: f64,
    pub source: Source,
    /// Depth of the node the expression was first propagated from.
    pub node_depth: usize,
}

/// Writes records as JSON lines.
pub fn write_log<W: Write>(mut w: W, log: &[LogRecord]) -> std::io::Result<()> {
    for r in log {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best expression with its fitted constants bound.
    pub best: ExprTree,
    pub best_tokens: Vec<Token>,
    pub best_reward: f64,
    /// Evaluation index at which the best was first scored.
    pub best_eval_index: u64,
    pub evaluations: u64,
    pub iterations: u64,
    pub stopped_early: bool,
    pub log: Vec<LogRecord>,
}

struct Best {
    tokens: Vec<Token>,
    constants: Vec<f64>,
    reward: f64,
    eval_index: u64,
}

/// A single search instance. Use [`search`] for a complete run, or
/// [`Searcher::iterate`] to drive it step by step.
pub struct Searcher<'a> {
    data: &'a Dataset,
    mdp: MdpConfig,
    evolve: EvolveConfig,
    cfg: SearchConfig,
    tree: SearchTree,
    store: ExprStore,
    rng: ChaCha8Rng,
    scorer: Scorer,
    evaluations: u64,
    iterations: u64,
    best: Option<Best>,
    log: Vec<LogRecord>,
    done: bool,
    exact: bool,
    actions: Vec<Token>,
    scores: Vec<f64>,
}

impl<'a> Searcher<'a> {
    pub fn new(data: &'a Dataset, mdp: &MdpConfig, cfg: &SearchConfig) -> Result<Self, SearchError> {
        if cfg.budget == 0 {
            return Err(SearchError::BudgetZero);
        }
        mdp.validate()?;
        if let Some(var) = mdp.alphabet.iter().filter_map(|t| match t {
            Token::Var(i) => Some(*i as usize),
            _ => None,
        }).find(|&i| i >= data.n_vars())
        {
            return Err(SearchError::VariableMismatch {
                data: data.n_vars(),
                var,
            });
        }
        let mut evolve = EvolveConfig::from_mdp(mdp);
        evolve.subtree_depth = cfg.mutation_subtree_depth;
        let mut actions = Vec::new();
        SrState::new().actions_into(mdp, &mut actions)?;
        Ok(Self {
            data,
            mdp: mdp.clone(),
            evolve,
            cfg: cfg.clone(),
            tree: SearchTree::new(actions.len(), cfg.queue_size),
            store: ExprStore::default(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            scorer: Scorer::new(cfg.fit_iterations),
            evaluations: 0,
            iterations: 0,
            best: None,
            log: Vec::new(),
            done: false,
            exact: false,
            actions,
            scores: Vec::new(),
        })
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn store(&self) -> &ExprStore {
        &self.store
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn log(&self) -> &[LogRecord] {
        &self.log
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Runs iterations until the budget is spent or an exact fit stops it.
    pub fn run(mut self) -> SearchOutcome {
        while !self.done {
            self.iterate();
        }
        self.finish()
    }

    fn finish(self) -> SearchOutcome {
        let best = self.best.expect("a finished search has scored at least one expression");
        let tree = ExprTree::from_tokens(&best.tokens, best.constants.clone())
            .expect("scored expressions are complete");
        SearchOutcome {
            best: tree,
            best_tokens: best.tokens,
            best_reward: best.reward,
            best_eval_index: best.eval_index,
            evaluations: self.evaluations,
            iterations: self.iterations,
            stopped_early: self.exact && self.cfg.stop_on_exact,
            log: self.log,
        }
    }

    /// One selection-expansion-rollout-propagation cycle.
    pub fn iterate(&mut self) {
        if self.done {
            return;
        }
        self.iterations += 1;
        let mut v = SearchTree::ROOT;
        let mut state = SrState::new();
        let mut path = vec![v];
        self.tree.visit(v);

        loop {
            let node = self.tree.node(v);
            if node.is_terminal() || !node.is_fully_expanded() {
                break;
            }
            let xi1: f64 = self.rng.random();
            let xi2: f64 = self.rng.random();
            let xi3: f64 = self.rng.random();
            if xi1 < jump_probability(node.depth, self.cfg.g_s) && !node.queue().is_empty() {
                self.state_jump(v, &path, state.tokens(), xi2 < self.cfg.g_m);
                if self.done {
                    return;
                }
            }
            let (action, child) = self.select_child(v, xi3 < self.cfg.epsilon);
            state.push_unchecked(action);
            self.tree.visit(child);
            path.push(child);
            v = child;
        }

        let expanded = !self.tree.node(v).is_terminal();
        if expanded {
            state
                .actions_into(&self.mdp, &mut self.actions)
                .expect("non-terminal state has actions");
            let node = self.tree.node(v);
            let untried: Vec<Token> = self.actions.iter().copied().filter(|a| node.child(*a).is_none()).collect();
            let action = *untried.choose(&mut self.rng).expect("a non-expanded node has untried actions");
            state.push_unchecked(action);
            let n_actions = if state.is_terminal() {
                0
            } else {
                state.actions_into(&self.mdp, &mut self.actions).expect("checked non-terminal");
                self.actions.len()
            };
            v = self.tree.add_child(v, action, n_actions);
        }

        while !state.is_terminal() {
            state.actions_into(&self.mdp, &mut self.actions).expect("checked non-terminal");
            let a = *self.actions.choose(&mut self.rng).expect("action space is never empty");
            state.push_unchecked(a);
        }
        let depth = self.tree.node(v).depth;
        let Some(entry) = self.score(state.tokens(), Source::Rollout, depth) else {
            return;
        };
        self.tree.backward_propagate(v, entry);
        if expanded {
            self.tree.replay_into_child(v, &self.store);
        }
        self.check_exact();
    }

    fn select_child(&mut self, v: NodeId, explore: bool) -> (Token, NodeId) {
        let node = self.tree.node(v);
        let children = node.children();
        if explore {
            return *children.choose(&mut self.rng).expect("expanded node has children");
        }
        let parent_visits = node.visits;
        self.scores.clear();
        let mut best = f64::NEG_INFINITY;
        for &(_, id) in children {
            let child = self.tree.node(id);
            let s = selection_score(parent_visits, child.visits, child.v_hat(), self.cfg.c, self.cfg.gamma);
            best = best.max(s);
            self.scores.push(s);
        }
        let ties = self.scores.iter().filter(|s| **s == best).count();
        let pick = if ties > 1 { self.rng.random_range(0..ties) } else { 0 };
        let k = self
            .scores
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == best)
            .nth(pick)
            .map(|(k, _)| k)
            .expect("at least one maximal child");
        children[k]
    }

    fn state_jump(&mut self, v: NodeId, path: &[NodeId], prefix: &[Token], mutation: bool) {
        let queue = self.tree.node(v).queue();
        let offspring: Vec<Offspring> = if mutation {
            let k = self.rng.random_range(0..queue.len());
            let parent = self.parent_tree(queue.get(k).expect("index in range").expr);
            vec![mutate(&parent, &self.evolve, &mut self.rng)]
        } else {
            let n = queue.len();
            let i = self.rng.random_range(0..n);
            let j = if n > 1 {
                let j = self.rng.random_range(0..n - 1);
                if j >= i { j + 1 } else { j }
            } else {
                i
            };
            let a = self.parent_tree(queue.get(i).expect("index in range").expr);
            let b = self.parent_tree(queue.get(j).expect("index in range").expr);
            let (x, y) = crossover_single_point(&a, &b, &self.evolve, &mut self.rng);
            vec![x, y]
        };
        let source = if mutation { Source::Mutation } else { Source::Crossover };
        for child in offspring.into_iter().filter_map(Offspring::valid) {
            let tokens = child.token_vec();
            // The deepest node on the current path that the offspring still
            // passes through.
            let common = prefix.iter().zip(&tokens).take_while(|(a, b)| a == b).count();
            let u = path[common.min(path.len() - 1)];
            let Some(entry) = self.score(&tokens, source, self.tree.node(u).depth) else {
                return;
            };
            self.tree.backward_propagate(u, entry);
            self.tree.forward_propagate(u, entry, &self.store);
            self.check_exact();
            if self.done {
                return;
            }
        }
    }

    fn parent_tree(&self, id: ExprId) -> ExprTree {
        ExprTree::from_tokens(self.store.tokens(id), Vec::new()).expect("stored expressions are complete")
    }

    fn check_exact(&mut self) {
        if self.exact && self.cfg.stop_on_exact {
            self.done = true;
        }
    }

    /// Scores a complete expression, charging one evaluation. Returns `None`
    /// (and marks the search done) once the budget is spent.
    fn score(&mut self, tokens: &[Token], source: Source, node_depth: usize) -> Option<Entry> {
        if self.evaluations >= self.cfg.budget {
            self.done = true;
            return None;
        }
        let eval_index = self.evaluations;
        self.evaluations += 1;
        let (expr, reward) = match self.store.lookup(tokens) {
            Some(id) => (id, self.store.reward(id)),
            None => {
                let fit = self.scorer.score(tokens, self.data);
                let id = self.store.insert(tokens, fit.reward);
                if self.best.as_ref().is_none_or(|b| fit.reward > b.reward) {
                    self.best = Some(Best {
                        tokens: tokens.to_vec(),
                        constants: fit.constants,
                        reward: fit.reward,
                        eval_index,
                    });
                }
                (id, fit.reward)
            }
        };
        if reward >= 1.0 - EXACT_TOLERANCE {
            self.exact = true;
        }
        if self.cfg.record_log {
            self.log.push(LogRecord {
                eval_index,
                tokens: tokens.to_vec(),
                reward,
                source,
                node_depth,
            });
        }
        if self.evaluations >= self.cfg.budget {
            self.done = true;
        }
        Some(Entry {
            expr,
            reward,
            eval_index: eval_index as u32,
        })
    }
}

/// Runs one complete search.
pub fn search(data: &Dataset, mdp: &MdpConfig, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    Ok(Searcher::new(data, mdp, cfg)?.run())
}
