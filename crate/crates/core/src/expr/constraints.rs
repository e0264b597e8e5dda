use serde::{Deserialize, Serialize};

use super::Token;

/// An unfilled child position in a partial pre-order sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    /// Depth the filling token will sit at (root is 0).
    pub depth: usize,
    /// Operator owning this slot, `None` for the root slot.
    pub parent: Option<Token>,
    /// Whether any ancestor is `sin` or `cos`.
    pub trig_above: bool,
}

impl Slot {
    pub const ROOT: Slot = Slot {
        depth: 0,
        parent: None,
        trig_above: false,
    };

    fn child_of(self, token: Token) -> Slot {
        Slot {
            depth: self.depth + 1,
            parent: Some(token),
            trig_above: self.trig_above || token.is_trig(),
        }
    }
}

/// Stack of open slots of a pre-order prefix. The top of the stack is the
/// next child of the deepest non-full operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSlots {
    stack: Vec<Slot>,
}

impl Default for OpenSlots {
    fn default() -> Self {
        Self::new()
    }
}

impl OpenSlots {
    pub fn new() -> Self {
        Self::starting_at(Slot::ROOT)
    }

    /// Open slots for a subtree grown into `slot`.
    pub fn starting_at(slot: Slot) -> Self {
        let mut stack = Vec::with_capacity(16);
        stack.push(slot);
        Self { stack }
    }

    #[inline]
    pub fn next(&self) -> Option<&Slot> {
        self.stack.last()
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.stack.is_empty()
    }

    #[inline]
    pub fn open_count(&self) -> usize {
        self.stack.len()
    }

    /// Places `token` into the next slot and returns the slot it filled, or
    /// `None` when the sequence is already complete.
    #[inline]
    pub fn fill(&mut self, token: Token) -> Option<Slot> {
        let slot = self.stack.pop()?;
        let child = slot.child_of(token);
        for _ in 0..token.arity() {
            self.stack.push(child);
        }
        Some(slot)
    }
}

/// Structural constraints on the search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRuleSet {
    /// No `sin`/`cos` anywhere below another `sin`/`cos`.
    pub forbid_nested_trig: bool,
    /// No `log` directly under `exp` and no `exp` directly under `log`.
    pub forbid_inverse_chain: bool,
}

impl Default for ConstraintRuleSet {
    fn default() -> Self {
        Self {
            forbid_nested_trig: true,
            forbid_inverse_chain: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    NestedTrig { position: usize },
    InverseChain { position: usize },
}

impl ConstraintRuleSet {
    pub const NONE: ConstraintRuleSet = ConstraintRuleSet {
        forbid_nested_trig: false,
        forbid_inverse_chain: false,
    };

    /// Whether placing `token` into `slot` breaks a rule.
    #[inline]
    pub fn allows(&self, slot: &Slot, token: Token) -> bool {
        self.violation_at(slot, token).is_none()
    }

    #[inline]
    fn violation_at(&self, slot: &Slot, token: Token) -> Option<fn(usize) -> Violation> {
        if self.forbid_nested_trig && slot.trig_above && token.is_trig() {
            return Some(|position| Violation::NestedTrig { position });
        }
        if self.forbid_inverse_chain {
            if let Some(parent) = slot.parent {
                if parent.is_inverse_of(token) {
                    return Some(|position| Violation::InverseChain { position });
                }
            }
        }
        None
    }

    /// Checks a complete or partial pre-order sequence. Tokens past
    /// completion are ignored.
    pub fn check(&self, tokens: &[Token]) -> Result<(), Violation> {
        let mut slots = OpenSlots::new();
        for (position, &token) in tokens.iter().enumerate() {
            let Some(slot) = slots.next().copied() else {
                break;
            };
            if let Some(v) = self.violation_at(&slot, token) {
                return Err(v(position));
            }
            slots.fill(token);
        }
        Ok(())
    }
}
