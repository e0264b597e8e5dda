//! Expression construction as a deterministic episodic MDP.
//!
//! A state is a pre-order token prefix; an action appends one token into the
//! next open slot. The episode ends when no slot is open, and the only reward
//! is the terminal one, `1 / (1 + NRMSE)`. Slots at the maximum depth accept
//! terminals only, so every episode ends within `2^(H+1) − 1` tokens.

use serde::{Deserialize, Serialize};

use crate::benchdata::Dataset;
use crate::expr::{alphabet, ConstraintRuleSet, OpenSlots, Slot, Token};
use crate::objective::{FitResult, Scorer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MdpError {
    #[error("state is terminal")]
    TerminalState,
    #[error("action {0} is not available in this state")]
    IllegalAction(Token),
    #[error("state is not terminal")]
    NotTerminal,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdpConfig {
    /// Maximum tree depth H (root at depth 0).
    pub max_depth: usize,
    pub max_constants: usize,
    pub alphabet: Vec<Token>,
    pub rules: ConstraintRuleSet,
}

impl MdpConfig {
    /// Default limits (depth 6, 10 constants) over the full alphabet for
    /// `n_vars` inputs, with or without the constant placeholder.
    pub fn new(n_vars: usize, with_constants: bool) -> Self {
        Self {
            max_depth: 6,
            max_constants: 10,
            alphabet: alphabet(n_vars, with_constants),
            rules: ConstraintRuleSet::default(),
        }
    }

    pub fn validate(&self) -> Result<(), MdpError> {
        if self.max_depth < 1 {
            return Err(MdpError::InvalidConfig("max_depth must be at least 1".into()));
        }
        if !self.alphabet.iter().any(|t| matches!(t, Token::Var(_))) {
            return Err(MdpError::InvalidConfig("alphabet needs at least one variable".into()));
        }
        Ok(())
    }

    /// Tokens that may fill `slot` given `consts_used` constants so far.
    #[inline]
    pub fn allowed(&self, slot: &Slot, token: Token, consts_used: usize) -> bool {
        if slot.depth >= self.max_depth && !token.is_terminal() {
            return false;
        }
        if token == Token::Const && consts_used >= self.max_constants {
            return false;
        }
        self.rules.allows(slot, token)
    }
}

/// A (possibly incomplete) pre-order prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrState {
    tokens: Vec<Token>,
    slots: OpenSlots,
    consts: usize,
}

impl Default for SrState {
    fn default() -> Self {
        Self::new()
    }
}

impl SrState {
    /// The empty initial state.
    pub fn new() -> Self {
        Self {
            tokens: Vec::new(),
            slots: OpenSlots::new(),
            consts: 0,
        }
    }

    /// Replays `tokens` through [`transition`].
    pub fn from_tokens(tokens: &[Token], cfg: &MdpConfig) -> Result<Self, MdpError> {
        tokens.iter().try_fold(Self::new(), |s, &t| transition(&s, t, cfg))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn is_terminal(&self) -> bool {
        self.slots.is_complete()
    }

    /// The slot the next action fills.
    pub fn next_slot(&self) -> Option<&Slot> {
        self.slots.next()
    }

    pub fn open_slots(&self) -> usize {
        self.slots.open_count()
    }

    pub fn const_count(&self) -> usize {
        self.consts
    }

    /// Appends without legality checks. Callers must draw `token` from the
    /// action space.
    #[inline]
    pub fn push_unchecked(&mut self, token: Token) {
        self.slots.fill(token);
        self.tokens.push(token);
        if token == Token::Const {
            self.consts += 1;
        }
    }

    /// Writes the legal actions into `out` (cleared first).
    pub fn actions_into(&self, cfg: &MdpConfig, out: &mut Vec<Token>) -> Result<(), MdpError> {
        let slot = self.slots.next().ok_or(MdpError::TerminalState)?;
        out.clear();
        out.extend(cfg.alphabet.iter().copied().filter(|&t| cfg.allowed(slot, t, self.consts)));
        Ok(())
    }
}

/// Legal actions of a non-terminal state.
pub fn action_space(s: &SrState, cfg: &MdpConfig) -> Result<Vec<Token>, MdpError> {
    let mut out = Vec::with_capacity(cfg.alphabet.len());
    s.actions_into(cfg, &mut out)?;
    Ok(out)
}

/// The successor of `s` under action `a`.
pub fn transition(s: &SrState, a: Token, cfg: &MdpConfig) -> Result<SrState, MdpError> {
    let slot = s.slots.next().ok_or(MdpError::TerminalState)?;
    if !cfg.alphabet.contains(&a) || !cfg.allowed(slot, a, s.consts) {
        return Err(MdpError::IllegalAction(a));
    }
    let mut next = s.clone();
    next.push_unchecked(a);
    Ok(next)
}

/// Fits and scores a terminal state.
pub fn terminal_reward(s: &SrState, data: &Dataset, scorer: &mut Scorer) -> Result<FitResult, MdpError> {
    if !s.is_terminal() {
        return Err(MdpError::NotTerminal);
    }
    Ok(scorer.score(&s.tokens, data))
}
