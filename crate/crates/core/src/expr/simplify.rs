//! A small algebraic simplifier.
//!
//! [`simplify_basic`] applies local rewrites only: constant folding, neutral
//! elements (`x + 0`, `x * 1`, `x / 1`, `x - 0`), `x * 0`, self-cancellation of
//! structurally identical operands (`x - x`, `x / x`) and `0 - (0 - x)`. None of
//! them reorders arithmetic, so the result agrees with the input exactly
//! wherever both are finite.
//!
//! [`folds_to_zero`] goes further: sums and products are flattened into signed
//! term lists, identical terms of opposite sign cancel across the whole list
//! and operands are put in a canonical order, so commutative rearrangements of
//! the same expression cancel.

use std::cmp::Ordering;

use super::{ExprTree, Token};

#[derive(Clone, Debug)]
enum Sx {
    Num(f64),
    /// Unbound constant placeholder, identified by its slot.
    Param(usize),
    Var(u8),
    Un(Token, Box<Sx>),
    Bin(Token, Box<Sx>, Box<Sx>),
}

impl Sx {
    fn size(&self) -> usize {
        match self {
            Sx::Num(_) | Sx::Param(_) | Sx::Var(_) => 1,
            Sx::Un(_, a) => 1 + a.size(),
            Sx::Bin(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Sx::Num(_) => 0,
            Sx::Param(_) => 1,
            Sx::Var(_) => 2,
            Sx::Un(..) => 3,
            Sx::Bin(..) => 4,
        }
    }

    fn num(&self) -> Option<f64> {
        match self {
            Sx::Num(v) => Some(*v),
            _ => None,
        }
    }
}

fn cmp_sx(a: &Sx, b: &Sx) -> Ordering {
    match (a, b) {
        (Sx::Num(x), Sx::Num(y)) => x.total_cmp(y),
        (Sx::Param(i), Sx::Param(j)) => i.cmp(j),
        (Sx::Var(i), Sx::Var(j)) => i.cmp(j),
        (Sx::Un(f, x), Sx::Un(g, y)) => f.cmp(g).then_with(|| cmp_sx(x, y)),
        (Sx::Bin(f, x1, x2), Sx::Bin(g, y1, y2)) => f
            .cmp(g)
            .then_with(|| cmp_sx(x1, y1))
            .then_with(|| cmp_sx(x2, y2)),
        _ => a.rank().cmp(&b.rank()),
    }
}

fn same(a: &Sx, b: &Sx) -> bool {
    cmp_sx(a, b) == Ordering::Equal
}

fn from_tree(tree: &ExprTree) -> Sx {
    fn build(tree: &ExprTree, i: usize, next_const: &mut usize) -> Sx {
        let node = tree.node(i);
        match node.token {
            Token::Var(v) => Sx::Var(v),
            Token::Const => {
                let slot = *next_const;
                *next_const += 1;
                match tree.constants().get(slot) {
                    Some(&v) if tree.is_bound() => Sx::Num(v),
                    _ => Sx::Param(slot),
                }
            }
            t if t.arity() == 1 => Sx::Un(t, Box::new(build(tree, node.children()[0] as usize, next_const))),
            t => {
                let a = build(tree, node.children()[0] as usize, next_const);
                let b = build(tree, node.children()[1] as usize, next_const);
                Sx::Bin(t, Box::new(a), Box::new(b))
            }
        }
    }
    build(tree, 0, &mut 0)
}

fn to_tree(sx: &Sx) -> ExprTree {
    fn emit(sx: &Sx, tokens: &mut Vec<Token>, constants: &mut Vec<f64>, bound: &mut bool) {
        match sx {
            Sx::Num(v) => {
                tokens.push(Token::Const);
                constants.push(*v);
            }
            Sx::Param(_) => {
                tokens.push(Token::Const);
                constants.push(f64::NAN);
                *bound = false;
            }
            Sx::Var(i) => tokens.push(Token::Var(*i)),
            Sx::Un(t, a) => {
                tokens.push(*t);
                emit(a, tokens, constants, bound);
            }
            Sx::Bin(t, a, b) => {
                tokens.push(*t);
                emit(a, tokens, constants, bound);
                emit(b, tokens, constants, bound);
            }
        }
    }
    let mut tokens = Vec::new();
    let mut constants = Vec::new();
    let mut bound = true;
    emit(sx, &mut tokens, &mut constants, &mut bound);
    if !bound {
        constants.clear();
    }
    ExprTree::from_tokens(&tokens, constants).expect("simplifier emits complete trees")
}

fn simp(sx: Sx, canonical: bool) -> Sx {
    match sx {
        Sx::Un(t, a) => {
            let a = simp(*a, canonical);
            if let Some(v) = a.num() {
                let r = t.apply_unary(v);
                if r.is_finite() {
                    return Sx::Num(r);
                }
            }
            Sx::Un(t, Box::new(a))
        }
        Sx::Bin(t, a, b) => {
            let a = simp(*a, canonical);
            let b = simp(*b, canonical);
            if !canonical {
                return rewrite_local(t, a, b);
            }
            let original = Sx::Bin(t, Box::new(a), Box::new(b));
            let normalized = match t {
                Token::Add | Token::Sub => normalize_sum(&original),
                _ => normalize_product(&original),
            };
            match normalized {
                Some(n) if n.size() <= original.size() => n,
                _ => original,
            }
        }
        leaf => leaf,
    }
}

fn is_num(sx: &Sx, v: f64) -> bool {
    sx.num() == Some(v)
}

fn rewrite_local(t: Token, a: Sx, b: Sx) -> Sx {
    if let (Some(x), Some(y)) = (a.num(), b.num()) {
        let r = t.apply_binary(x, y);
        if r.is_finite() {
            return Sx::Num(r);
        }
    }
    match t {
        Token::Add if is_num(&b, 0.0) => a,
        Token::Add if is_num(&a, 0.0) => b,
        Token::Sub if is_num(&b, 0.0) => a,
        Token::Sub if same(&a, &b) => Sx::Num(0.0),
        Token::Sub if is_num(&a, 0.0) => match b {
            Sx::Bin(Token::Sub, z, x) if is_num(&z, 0.0) => *x,
            b => Sx::Bin(t, Box::new(a), Box::new(b)),
        },
        Token::Mul if is_num(&a, 0.0) || is_num(&b, 0.0) => Sx::Num(0.0),
        Token::Mul if is_num(&b, 1.0) => a,
        Token::Mul if is_num(&a, 1.0) => b,
        Token::Div if is_num(&b, 1.0) => a,
        Token::Div if same(&a, &b) => Sx::Num(1.0),
        _ => Sx::Bin(t, Box::new(a), Box::new(b)),
    }
}

fn collect_terms(sx: &Sx, positive: bool, add: Token, sub: Token, out: &mut Vec<(bool, Sx)>) {
    match sx {
        Sx::Bin(t, a, b) if *t == add => {
            collect_terms(a, positive, add, sub, out);
            collect_terms(b, positive, add, sub, out);
        }
        Sx::Bin(t, a, b) if *t == sub => {
            collect_terms(a, positive, add, sub, out);
            collect_terms(b, !positive, add, sub, out);
        }
        other => out.push((positive, other.clone())),
    }
}

/// Splits terms into (positive, negative), each canonically ordered, after
/// cancelling structurally identical pairs of opposite sign.
fn cancel_and_sort(terms: Vec<(bool, Sx)>) -> (Vec<Sx>, Vec<Sx>) {
    let mut pos: Vec<Sx> = Vec::new();
    let mut neg: Vec<Sx> = Vec::new();
    for (p, t) in terms {
        let (mine, other) = if p { (&mut pos, &mut neg) } else { (&mut neg, &mut pos) };
        if let Some(k) = other.iter().position(|o| same(o, &t)) {
            other.swap_remove(k);
        } else {
            mine.push(t);
        }
    }
    pos.sort_by(cmp_sx);
    neg.sort_by(cmp_sx);
    (pos, neg)
}

fn rebuild(pos: Vec<Sx>, neg: Vec<Sx>, op: Token, inv: Token, identity: f64) -> Sx {
    let mut pos = pos.into_iter();
    let mut acc = pos.next().unwrap_or(Sx::Num(identity));
    for t in pos {
        acc = Sx::Bin(op, Box::new(acc), Box::new(t));
    }
    for t in neg {
        acc = Sx::Bin(inv, Box::new(acc), Box::new(t));
    }
    acc
}

fn normalize_sum(sx: &Sx) -> Option<Sx> {
    let mut terms = Vec::new();
    collect_terms(sx, true, Token::Add, Token::Sub, &mut terms);
    let mut constant = 0.0;
    let mut rest = Vec::with_capacity(terms.len());
    for (p, t) in terms {
        match t.num() {
            Some(v) => constant += if p { v } else { -v },
            None => rest.push((p, t)),
        }
    }
    if !constant.is_finite() {
        return None;
    }
    let (mut pos, neg) = cancel_and_sort(rest);
    if constant != 0.0 || (pos.is_empty() && neg.is_empty()) {
        pos.insert(0, Sx::Num(constant));
    }
    Some(rebuild(pos, neg, Token::Add, Token::Sub, 0.0))
}

fn normalize_product(sx: &Sx) -> Option<Sx> {
    let mut factors = Vec::new();
    collect_terms(sx, true, Token::Mul, Token::Div, &mut factors);
    let mut coefficient = 1.0;
    let mut rest = Vec::with_capacity(factors.len());
    for (p, f) in factors {
        match f.num() {
            Some(v) if p || v != 0.0 => coefficient = if p { coefficient * v } else { coefficient / v },
            _ => rest.push((p, f)),
        }
    }
    if !coefficient.is_finite() {
        return None;
    }
    if coefficient == 0.0 {
        return Some(Sx::Num(0.0));
    }
    let (mut num, den) = cancel_and_sort(rest);
    if coefficient != 1.0 || (num.is_empty() && den.is_empty()) {
        num.insert(0, Sx::Num(coefficient));
    }
    Some(rebuild(num, den, Token::Mul, Token::Div, 1.0))
}

fn fixpoint(tree: &ExprTree, canonical: bool) -> ExprTree {
    let mut sx = from_tree(tree);
    for _ in 0..32 {
        let next = simp(sx.clone(), canonical);
        if same(&next, &sx) {
            break;
        }
        sx = next;
    }
    to_tree(&sx)
}

/// Applies the local rewrites to a fixpoint. Unbound constants are kept
/// opaque; a result that contains them is returned unbound.
pub fn simplify_basic(tree: &ExprTree) -> ExprTree {
    fixpoint(tree, false)
}

/// Complexity: number of nodes of the simplified tree.
pub fn node_count(tree: &ExprTree) -> usize {
    simplify_basic(tree).len()
}

/// Whether `tree` cancels to the constant zero under the canonicalizing
/// rewrites.
pub fn folds_to_zero(tree: &ExprTree) -> bool {
    let s = fixpoint(tree, true);
    s.len() == 1 && s.is_bound() && s.constants().first() == Some(&0.0)
}
