use super::{ExprError, ExprTree, Token};

/// Outcome of evaluating an expression over a batch of points.
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Finite(Vec<f64>),
    /// Some output was NaN or infinite.
    NonFinite,
}

impl Evaluated {
    pub fn finite(self) -> Option<Vec<f64>> {
        match self {
            Evaluated::Finite(v) => Some(v),
            Evaluated::NonFinite => None,
        }
    }
}

/// Column-wise evaluation of `tree` over inputs given as one column per
/// variable (all columns of equal length).
pub fn evaluate(tree: &ExprTree, columns: &[Vec<f64>]) -> Result<Evaluated, ExprError> {
    if !tree.is_bound() {
        return Err(ExprError::UnboundConstant);
    }
    let tokens = tree.token_vec();
    let mut out = Vec::new();
    let ok = Evaluator::new().eval_into(&tokens, tree.constants(), columns, &mut out)?;
    Ok(if ok { Evaluated::Finite(out) } else { Evaluated::NonFinite })
}

/// Reusable stack evaluator over pre-order token sequences.
#[derive(Default)]
pub struct Evaluator {
    stack: Vec<f64>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates a complete pre-order sequence into `out`. Returns `Ok(false)`
    /// if any output is non-finite.
    pub fn eval_into(
        &mut self,
        tokens: &[Token],
        constants: &[f64],
        columns: &[Vec<f64>],
        out: &mut Vec<f64>,
    ) -> Result<bool, ExprError> {
        let n = columns.first().map_or(1, Vec::len);
        // Reverse pre-order: operands are on the stack, left operand on top.
        self.stack.clear();
        self.stack.reserve(tokens.len() * n);
        let mut height = 0usize;
        let mut next_const = constants.len();
        let mut needed_consts = 0usize;
        for &t in tokens.iter().rev() {
            match t {
                Token::Var(i) => {
                    let col = columns.get(i as usize).ok_or(ExprError::VariableOutOfRange {
                        index: i as usize,
                        dims: columns.len(),
                    })?;
                    self.stack.extend_from_slice(col);
                    height += 1;
                }
                Token::Const => {
                    needed_consts += 1;
                    if next_const == 0 {
                        return Err(ExprError::UnboundConstant);
                    }
                    next_const -= 1;
                    let c = constants[next_const];
                    self.stack.extend(std::iter::repeat_n(c, n));
                    height += 1;
                }
                t if t.arity() == 1 => {
                    if height < 1 {
                        return Err(ExprError::Incomplete { open_slots: 1 });
                    }
                    let top = &mut self.stack[(height - 1) * n..height * n];
                    match t {
                        Token::Sin => top.iter_mut().for_each(|v| *v = v.sin()),
                        Token::Cos => top.iter_mut().for_each(|v| *v = v.cos()),
                        Token::Exp => top.iter_mut().for_each(|v| *v = v.exp()),
                        Token::Log => top.iter_mut().for_each(|v| *v = v.ln()),
                        _ => unreachable!(),
                    }
                }
                t => {
                    if height < 2 {
                        return Err(ExprError::Incomplete { open_slots: 2 - height });
                    }
                    let (below, top) = self.stack[(height - 2) * n..height * n].split_at_mut(n);
                    // `top` holds the left operand, `below` the right one.
                    match t {
                        Token::Add => below.iter_mut().zip(top.iter()).for_each(|(r, l)| *r += *l),
                        Token::Sub => below.iter_mut().zip(top.iter()).for_each(|(r, l)| *r = *l - *r),
                        Token::Mul => below.iter_mut().zip(top.iter()).for_each(|(r, l)| *r *= *l),
                        Token::Div => below.iter_mut().zip(top.iter()).for_each(|(r, l)| *r = *l / *r),
                        _ => unreachable!(),
                    }
                    height -= 1;
                    self.stack.truncate(height * n);
                }
            }
        }
        if height != 1 {
            return Err(if height == 0 {
                ExprError::Empty
            } else {
                ExprError::OverfullSequence { position: 0 }
            });
        }
        if needed_consts != constants.len() {
            return Err(ExprError::ConstantCount {
                expected: needed_consts,
                got: constants.len(),
            });
        }
        out.clear();
        out.extend_from_slice(&self.stack[..n]);
        Ok(out.iter().all(|v| v.is_finite()))
    }
}
