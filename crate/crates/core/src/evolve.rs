//! Crossover and mutation operators used as state-jumping moves.
//!
//! Operators work on token structure only; constants are refitted when an
//! offspring is scored. Offspring that break the depth limit, the constant cap
//! or a structural constraint come back as [`Offspring::Invalid`].

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::expr::{decode_preorder, ConstraintRuleSet, ExprTree, OpenSlots, Slot, Token};
use crate::mdp::MdpConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub max_depth: usize,
    pub max_constants: usize,
    pub rules: ConstraintRuleSet,
    pub alphabet: Vec<Token>,
    /// Height limit of subtrees grown by uniform mutation and insertion.
    pub subtree_depth: usize,
}

impl EvolveConfig {
    pub fn from_mdp(mdp: &MdpConfig) -> Self {
        Self {
            max_depth: mdp.max_depth,
            max_constants: mdp.max_constants,
            rules: mdp.rules,
            alphabet: mdp.alphabet.clone(),
            subtree_depth: 1,
        }
    }

    fn as_mdp(&self) -> MdpConfig {
        MdpConfig {
            max_depth: self.max_depth,
            max_constants: self.max_constants,
            alphabet: self.alphabet.clone(),
            rules: self.rules,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvalidReason {
    Depth,
    Constraint,
    TooManyConstants,
    /// The operator had nothing to act on (e.g. shrinking a leaf).
    NoOp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Offspring {
    Valid(ExprTree),
    Invalid(InvalidReason),
}

impl Offspring {
    pub fn valid(self) -> Option<ExprTree> {
        match self {
            Offspring::Valid(t) => Some(t),
            Offspring::Invalid(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Uniform,
    NodeReplacement,
    Insertion,
    Shrink,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::Uniform,
        Mutation::NodeReplacement,
        Mutation::Insertion,
        Mutation::Shrink,
    ];
}

/// Validates a candidate token sequence against the depth limit, constant
/// cap and constraints.
pub fn validate(tokens: Vec<Token>, cfg: &EvolveConfig) -> Offspring {
    let tree = match decode_preorder(&tokens, cfg.max_depth).and_then(|d| d.into_complete()) {
        Ok(t) => t,
        Err(_) => return Offspring::Invalid(InvalidReason::Depth),
    };
    if tree.const_count() > cfg.max_constants {
        return Offspring::Invalid(InvalidReason::TooManyConstants);
    }
    if cfg.rules.check(&tokens).is_err() {
        return Offspring::Invalid(InvalidReason::Constraint);
    }
    Offspring::Valid(tree)
}

/// The slot node `i` occupies: its depth, parent token and trig ancestry.
pub fn slot_of(tree: &ExprTree, i: usize) -> Slot {
    let mut slots = OpenSlots::new();
    for (k, t) in tree.tokens().enumerate() {
        let slot = *slots.next().expect("tree is complete");
        if k == i {
            return slot;
        }
        slots.fill(t);
    }
    panic!("node {i} out of range");
}

fn splice(tree: &ExprTree, at: usize, sub: &[Token]) -> Vec<Token> {
    let tokens = tree.token_vec();
    let end = tree.subtree_end(at);
    let mut out = Vec::with_capacity(tokens.len() - (end - at) + sub.len());
    out.extend_from_slice(&tokens[..at]);
    out.extend_from_slice(sub);
    out.extend_from_slice(&tokens[end..]);
    out
}

/// Grows a random subtree into `slot`: below `cap` levels any allowed token is
/// drawn uniformly, at `cap` (or the global depth limit) only terminals.
/// `consts_used` counts constants already present outside the subtree.
pub fn grow_into<R: Rng + ?Sized>(
    slot: Slot,
    cap: usize,
    consts_used: usize,
    cfg: &EvolveConfig,
    rng: &mut R,
) -> Vec<Token> {
    let mdp = cfg.as_mdp();
    let base = slot.depth;
    let mut slots = OpenSlots::starting_at(slot);
    let mut out = Vec::new();
    let mut consts = consts_used;
    let mut choices = Vec::with_capacity(cfg.alphabet.len());
    while let Some(s) = slots.next().copied() {
        choices.clear();
        let at_cap = s.depth - base >= cap;
        choices.extend(
            cfg.alphabet
                .iter()
                .copied()
                .filter(|&t| (!at_cap || t.is_terminal()) && mdp.allowed(&s, t, consts)),
        );
        let t = *choices.choose(rng).expect("terminals are always allowed");
        if t == Token::Const {
            consts += 1;
        }
        slots.fill(t);
        out.push(t);
    }
    out
}

/// A random tree of height at most `cap` rooted at depth 0.
pub fn random_subtree<R: Rng + ?Sized>(cap: usize, cfg: &EvolveConfig, rng: &mut R) -> ExprTree {
    let tokens = grow_into(Slot::ROOT, cap, 0, cfg, rng);
    ExprTree::from_tokens(&tokens, Vec::new()).expect("grown sequences are complete")
}

/// Swaps uniformly chosen subtrees of the two parents.
pub fn crossover_single_point<R: Rng + ?Sized>(
    a: &ExprTree,
    b: &ExprTree,
    cfg: &EvolveConfig,
    rng: &mut R,
) -> (Offspring, Offspring) {
    let i = rng.random_range(0..a.len());
    let j = rng.random_range(0..b.len());
    crossover_at(a, i, b, j, cfg)
}

/// Crossover at fixed points `i` in `a` and `j` in `b`.
pub fn crossover_at(a: &ExprTree, i: usize, b: &ExprTree, j: usize, cfg: &EvolveConfig) -> (Offspring, Offspring) {
    let sub_a: Vec<Token> = a.tokens().skip(i).take(a.subtree_end(i) - i).collect();
    let sub_b: Vec<Token> = b.tokens().skip(j).take(b.subtree_end(j) - j).collect();
    (validate(splice(a, i, &sub_b), cfg), validate(splice(b, j, &sub_a), cfg))
}

/// Applies one of the four mutations, chosen uniformly.
pub fn mutate<R: Rng + ?Sized>(parent: &ExprTree, cfg: &EvolveConfig, rng: &mut R) -> Offspring {
    let kind = Mutation::ALL[rng.random_range(0..4)];
    mutate_with(parent, kind, cfg, rng)
}

pub fn mutate_with<R: Rng + ?Sized>(parent: &ExprTree, kind: Mutation, cfg: &EvolveConfig, rng: &mut R) -> Offspring {
    match kind {
        Mutation::Uniform => {
            let i = rng.random_range(0..parent.len());
            let outside = parent.const_count() - const_count_in(parent, i);
            let sub = grow_into(slot_of(parent, i), cfg.subtree_depth, outside, cfg, rng);
            validate(splice(parent, i, &sub), cfg)
        }
        Mutation::NodeReplacement => {
            let i = rng.random_range(0..parent.len());
            let old = parent.node(i).token;
            let options: Vec<Token> = cfg
                .alphabet
                .iter()
                .copied()
                .filter(|t| t.arity() == old.arity() && *t != old)
                .collect();
            let Some(&new) = options.choose(rng) else {
                return Offspring::Invalid(InvalidReason::NoOp);
            };
            let mut tokens = parent.token_vec();
            tokens[i] = new;
            validate(tokens, cfg)
        }
        Mutation::Insertion => {
            let i = rng.random_range(0..parent.len());
            let ops: Vec<Token> = cfg.alphabet.iter().copied().filter(|t| t.arity() == 2).collect();
            let Some(&op) = ops.choose(rng) else {
                return Offspring::Invalid(InvalidReason::NoOp);
            };
            let slot = slot_of(parent, i);
            let child_slot = Slot {
                depth: slot.depth + 1,
                parent: Some(op),
                trig_above: slot.trig_above,
            };
            let fresh = grow_into(child_slot, cfg.subtree_depth, parent.const_count(), cfg, rng);
            let existing: Vec<Token> = parent.tokens().skip(i).take(parent.subtree_end(i) - i).collect();
            let mut sub = vec![op];
            if rng.random_bool(0.5) {
                sub.extend_from_slice(&existing);
                sub.extend_from_slice(&fresh);
            } else {
                sub.extend_from_slice(&fresh);
                sub.extend_from_slice(&existing);
            }
            validate(splice(parent, i, &sub), cfg)
        }
        Mutation::Shrink => {
            let internal: Vec<usize> = (0..parent.len()).filter(|&k| !parent.node(k).token.is_terminal()).collect();
            let Some(&i) = internal.choose(rng) else {
                return Offspring::Invalid(InvalidReason::NoOp);
            };
            let leaves: Vec<Token> = (i..parent.subtree_end(i))
                .map(|k| parent.node(k).token)
                .filter(|t| t.is_terminal())
                .collect();
            let leaf = *leaves.choose(rng).expect("a subtree has leaves");
            validate(splice(parent, i, &[leaf]), cfg)
        }
    }
}

fn const_count_in(tree: &ExprTree, i: usize) -> usize {
    (i..tree.subtree_end(i)).filter(|&k| tree.node(k).token == Token::Const).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> EvolveConfig {
        EvolveConfig::from_mdp(&MdpConfig::new(2, false))
    }

    fn t(s: &str) -> ExprTree {
        ExprTree::parse(s).unwrap()
    }

    #[test]
    fn crossover_at_roots_swaps_parents() {
        let (a, b) = crossover_at(&t("+ x0 x1"), 0, &t("sin x0"), 0, &cfg());
        assert_eq!(a, Offspring::Valid(t("sin x0")));
        assert_eq!(b, Offspring::Valid(t("+ x0 x1")));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (a, b) = crossover_single_point(&t("x0"), &t("x1"), &cfg(), &mut rng);
        assert_eq!((a, b), (Offspring::Valid(t("x1")), Offspring::Valid(t("x0"))));
    }

    #[test]
    fn crossover_into_trig_is_invalid_sibling_survives() {
        // put cos(x0) under sin
        let (a, b) = crossover_at(&t("sin x0"), 1, &t("+ cos x0 x1"), 1, &cfg());
        assert_eq!(a, Offspring::Invalid(InvalidReason::Constraint));
        assert_eq!(b, Offspring::Valid(t("+ x0 x1")));
    }

    #[test]
    fn shrink_sine_to_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(mutate_with(&t("sin x0"), Mutation::Shrink, &cfg(), &mut rng), Offspring::Valid(t("x0")));
        assert_eq!(
            mutate_with(&t("x0"), Mutation::Shrink, &cfg(), &mut rng),
            Offspring::Invalid(InvalidReason::NoOp)
        );
    }

    #[test]
    fn node_replacement_keeps_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = t("+ x0 sin x1");
            if let Offspring::Valid(c) = mutate_with(&p, Mutation::NodeReplacement, &cfg(), &mut rng) {
                assert_eq!(c.len(), p.len());
                assert!(c.tokens().zip(p.tokens()).all(|(a, b)| a.arity() == b.arity()));
                assert_ne!(c, p);
            }
        }
    }

    #[test]
    fn insertion_beyond_depth_is_invalid() {
        let mut c = cfg();
        c.max_depth = 1;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = mutate_with(&t("+ x0 x1"), Mutation::Insertion, &c, &mut rng);
        assert_eq!(out, Offspring::Invalid(InvalidReason::Depth));
    }

    #[test]
    fn random_subtree_respects_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(random_subtree(0, &cfg(), &mut rng).len(), 1);
        for _ in 0..200 {
            assert!(random_subtree(1, &cfg(), &mut rng).depth() <= 1);
        }
    }

    #[test]
    fn slot_context() {
        let tree = t("* sin + x0 x1 x1");
        let s = slot_of(&tree, 3);
        assert_eq!((s.depth, s.parent, s.trig_above), (3, Some(Token::Add), true));
        let s = slot_of(&tree, 5);
        assert_eq!((s.depth, s.parent, s.trig_above), (1, Some(Token::Mul), false));
    }
}
