use std::fmt;

use super::{ExprError, OpenSlots, Token};

const NO_CHILD: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub token: Token,
    pub depth: usize,
    children: [u32; 2],
    end: u32,
}

impl Node {
    /// Indices of the children, left first.
    #[inline]
    pub fn children(&self) -> &[u32] {
        &self.children[..self.token.arity()]
    }
}

/// A complete binary expression tree.
///
/// Nodes live in an arena in pre-order, so node 0 is the root and the subtree
/// of node `i` occupies the contiguous range `i..subtree_end(i)`.
#[derive(Clone, Debug)]
pub struct ExprTree {
    nodes: Vec<Node>,
    constants: Vec<f64>,
}

/// Result of decoding a pre-order sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoded {
    Complete(ExprTree),
    Incomplete { open_slots: usize },
}

impl Decoded {
    pub fn into_complete(self) -> Result<ExprTree, ExprError> {
        match self {
            Decoded::Complete(t) => Ok(t),
            Decoded::Incomplete { open_slots } => Err(ExprError::Incomplete { open_slots }),
        }
    }
}

/// Rebuilds a tree from its pre-order sequence by attaching each token to the
/// deepest non-full operator (left child first).
///
/// A token may sit at depth `max_depth` only if it is a terminal; an operator
/// there could never be completed and is rejected on arrival.
pub fn decode_preorder(tokens: &[Token], max_depth: usize) -> Result<Decoded, ExprError> {
    if tokens.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(tokens.len());
    // (parent index, child position, depth)
    let mut open: Vec<(u32, usize, usize)> = vec![(NO_CHILD, 0, 0)];
    for (position, &token) in tokens.iter().enumerate() {
        let Some((parent, side, depth)) = open.pop() else {
            return Err(ExprError::OverfullSequence { position });
        };
        if depth > max_depth || (token.arity() > 0 && depth >= max_depth) {
            return Err(ExprError::DepthViolation { position, max_depth });
        }
        let idx = nodes.len() as u32;
        if parent != NO_CHILD {
            nodes[parent as usize].children[side] = idx;
        }
        nodes.push(Node {
            token,
            depth,
            children: [NO_CHILD; 2],
            end: 0,
        });
        for side in (0..token.arity()).rev() {
            open.push((idx, side, depth + 1));
        }
    }
    if !open.is_empty() {
        return Ok(Decoded::Incomplete {
            open_slots: open.len(),
        });
    }
    for i in (0..nodes.len()).rev() {
        let n = nodes[i];
        nodes[i].end = match n.token.arity() {
            0 => i as u32 + 1,
            a => nodes[n.children[a - 1] as usize].end,
        };
    }
    Ok(Decoded::Complete(ExprTree {
        nodes,
        constants: Vec::new(),
    }))
}

/// Pre-order traversal of a complete tree.
pub fn encode_preorder(tree: &ExprTree) -> Vec<Token> {
    tree.tokens().collect()
}

/// Depth of the tree formed by a complete or partial pre-order sequence.
pub fn sequence_depth(tokens: &[Token]) -> usize {
    let mut slots = OpenSlots::new();
    let mut depth = 0;
    for &t in tokens {
        match slots.fill(t) {
            Some(s) => depth = depth.max(s.depth),
            None => break,
        }
    }
    depth
}

impl ExprTree {
    /// Decodes a complete sequence with no depth limit and binds `constants`.
    pub fn from_tokens(tokens: &[Token], constants: Vec<f64>) -> Result<Self, ExprError> {
        let mut tree = decode_preorder(tokens, usize::MAX - 1)?.into_complete()?;
        tree.bind_constants(constants)?;
        Ok(tree)
    }

    /// Parses a whitespace-separated pre-order string such as `"+ x0 sin x0"`.
    pub fn parse(s: &str) -> Result<Self, ExprError> {
        Self::from_tokens(&super::parse_tokens(s)?, Vec::new())
    }

    pub fn leaf(token: Token) -> Self {
        assert!(token.is_terminal());
        Self::from_tokens(&[token], Vec::new()).expect("a terminal is complete")
    }

    #[inline]
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tokens(&self) -> impl ExactSizeIterator<Item = Token> + '_ {
        self.nodes.iter().map(|n| n.token)
    }

    pub fn token_vec(&self) -> Vec<Token> {
        self.tokens().collect()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// One past the last node of the subtree rooted at `i`.
    #[inline]
    pub fn subtree_end(&self, i: usize) -> usize {
        self.nodes[i].end as usize
    }

    /// Height of the subtree rooted at `i` (a leaf has height 0).
    pub fn subtree_height(&self, i: usize) -> usize {
        let base = self.nodes[i].depth;
        self.nodes[i..self.subtree_end(i)]
            .iter()
            .map(|n| n.depth - base)
            .max()
            .unwrap_or(0)
    }

    pub fn const_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.token == Token::Const).count()
    }

    /// Number of `Const` tokens strictly before node `i`, i.e. the slot index
    /// of the first constant in `i`'s subtree.
    pub fn const_slot_before(&self, i: usize) -> usize {
        self.nodes[..i].iter().filter(|n| n.token == Token::Const).count()
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn is_bound(&self) -> bool {
        self.constants.len() == self.const_count()
    }

    pub fn bind_constants(&mut self, constants: Vec<f64>) -> Result<(), ExprError> {
        let expected = self.const_count();
        if !constants.is_empty() && constants.len() != expected {
            return Err(ExprError::ConstantCount {
                expected,
                got: constants.len(),
            });
        }
        self.constants = constants;
        Ok(())
    }

    pub fn with_constants(mut self, constants: Vec<f64>) -> Result<Self, ExprError> {
        self.bind_constants(constants)?;
        Ok(self)
    }

    /// Replaces the subtree at `at` with `sub`. Constants travel with their
    /// placeholders; unbound constants on either side leave the result unbound.
    pub fn replace_subtree(&self, at: usize, sub: &ExprTree) -> Result<ExprTree, ExprError> {
        let end = self.subtree_end(at);
        let mut tokens: Vec<Token> = Vec::with_capacity(self.len() - (end - at) + sub.len());
        tokens.extend(self.nodes[..at].iter().map(|n| n.token));
        tokens.extend(sub.tokens());
        tokens.extend(self.nodes[end..].iter().map(|n| n.token));

        let constants = if self.is_bound() && sub.is_bound() {
            let lo = self.const_slot_before(at);
            let hi = self.const_slot_before(end);
            let mut c = Vec::with_capacity(self.constants.len() - (hi - lo) + sub.constants.len());
            c.extend_from_slice(&self.constants[..lo]);
            c.extend_from_slice(&sub.constants);
            c.extend_from_slice(&self.constants[hi..]);
            c
        } else {
            Vec::new()
        };
        let mut tree = decode_preorder(&tokens, usize::MAX - 1)?.into_complete()?;
        if tree.const_count() == constants.len() {
            tree.constants = constants;
        }
        Ok(tree)
    }

    /// Copy of the subtree rooted at `i`.
    pub fn subtree(&self, i: usize) -> ExprTree {
        let end = self.subtree_end(i);
        let tokens: Vec<Token> = self.nodes[i..end].iter().map(|n| n.token).collect();
        let mut tree = decode_preorder(&tokens, usize::MAX - 1)
            .and_then(Decoded::into_complete)
            .expect("a subtree of a complete tree is complete");
        if self.is_bound() {
            let lo = self.const_slot_before(i);
            tree.constants = self.constants[lo..lo + tree.const_count()].to_vec();
        }
        tree
    }

    /// Canonical infix form: full parenthesization, constants with 17
    /// significant digits, unbound constants as `c`.
    pub fn to_infix(&self) -> String {
        let mut out = String::new();
        let mut next_const = 0;
        self.write_infix(0, &mut out, &mut next_const);
        out
    }

    fn write_infix(&self, i: usize, out: &mut String, next_const: &mut usize) {
        let node = &self.nodes[i];
        match node.token {
            Token::Const => {
                match self.constants.get(*next_const) {
                    Some(v) if self.is_bound() => out.push_str(&format!("{v:.16e}")),
                    _ => out.push('c'),
                }
                *next_const += 1;
            }
            Token::Var(_) => out.push_str(&node.token.symbol()),
            t if t.arity() == 1 => {
                out.push_str(&t.symbol());
                out.push('(');
                self.write_infix(node.children[0] as usize, out, next_const);
                out.push(')');
            }
            t => {
                out.push('(');
                self.write_infix(node.children[0] as usize, out, next_const);
                out.push(' ');
                out.push_str(&t.symbol());
                out.push(' ');
                self.write_infix(node.children[1] as usize, out, next_const);
                out.push(')');
            }
        }
    }
}

/// Structural equality: same tokens in the same shape and bit-identical
/// constant values.
impl PartialEq for ExprTree {
    fn eq(&self, other: &Self) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.tokens().eq(other.tokens())
            && self.constants.len() == other.constants.len()
            && self
                .constants
                .iter()
                .zip(&other.constants)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_infix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_tokens;

    fn toks(s: &str) -> Vec<Token> {
        parse_tokens(s).unwrap()
    }

    #[test]
    fn decodes_product_of_sum_and_sine() {
        let tree = decode_preorder(&toks("* + x0 x1 sin x0"), 6)
            .unwrap()
            .into_complete()
            .unwrap();
        assert_eq!(tree.to_infix(), "((x0 + x1) * sin(x0))");
        assert_eq!(tree.len(), 6);
        assert_eq!(tree.depth(), 2);
        let root = tree.node(0);
        assert_eq!(root.children(), &[1, 4]);
        assert_eq!(tree.subtree_end(1), 4);
        assert_eq!(tree.subtree_end(4), 6);
    }

    #[test]
    fn single_leaf_is_complete() {
        let tree = decode_preorder(&[Token::Var(0)], 6).unwrap().into_complete().unwrap();
        assert_eq!(encode_preorder(&tree), vec![Token::Var(0)]);
        assert_eq!(tree.depth(), 0);
    }

    #[test]
    fn unfilled_operator_is_incomplete() {
        assert_eq!(
            decode_preorder(&toks("+ x0"), 6).unwrap(),
            Decoded::Incomplete { open_slots: 1 }
        );
    }

    #[test]
    fn token_after_completion_is_overfull() {
        assert_eq!(
            decode_preorder(&toks("+ x0 x0 x0"), 6).unwrap_err(),
            ExprError::OverfullSequence { position: 3 }
        );
    }

    #[test]
    fn depth_violation() {
        // sin(sin(x)) has depth 2
        assert!(decode_preorder(&toks("sin sin x0"), 2).is_ok());
        assert_eq!(
            decode_preorder(&toks("sin sin x0"), 1).unwrap_err(),
            ExprError::DepthViolation {
                position: 1,
                max_depth: 1
            }
        );
        assert!(decode_preorder(&toks("sin sin x0"), 0).is_err());
        assert!(decode_preorder(&toks("x0"), 0).is_ok());
    }

    #[test]
    fn empty_sequence_rejected() {
        assert_eq!(decode_preorder(&[], 6).unwrap_err(), ExprError::Empty);
    }

    #[test]
    fn sequence_depth_of_partial() {
        assert_eq!(sequence_depth(&toks("* + x0")), 2);
        assert_eq!(sequence_depth(&toks("x0")), 0);
    }

    #[test]
    fn replace_subtree_moves_constants() {
        let t = ExprTree::from_tokens(&toks("+ * c x0 c"), vec![2.0, 3.0]).unwrap();
        let sub = ExprTree::from_tokens(&toks("- c c"), vec![5.0, 7.0]).unwrap();
        let r = t.replace_subtree(1, &sub).unwrap();
        assert_eq!(r.token_vec(), toks("+ - c c c"));
        assert_eq!(r.constants(), &[5.0, 7.0, 3.0]);
        assert_eq!(t.subtree(1).constants(), &[2.0]);
        assert_eq!(t.subtree(4).constants(), &[3.0]);
    }

    #[test]
    fn infix_prints_constants_with_17_digits() {
        let t = ExprTree::from_tokens(&toks("* c x0"), vec![0.1]).unwrap();
        assert_eq!(t.to_infix(), "(1.0000000000000001e-1 * x0)");
        let unbound = ExprTree::parse("* c x0").unwrap();
        assert_eq!(unbound.to_infix(), "(c * x0)");
    }

    #[test]
    fn equality_compares_constant_values() {
        let a = ExprTree::from_tokens(&toks("+ c x0"), vec![1.0]).unwrap();
        let b = ExprTree::from_tokens(&toks("+ c x0"), vec![1.0]).unwrap();
        let c = ExprTree::from_tokens(&toks("+ c x0"), vec![1.5]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
