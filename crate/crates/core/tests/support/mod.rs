//! Property checks shared by the integration tests and the acceptance run.
//! Each `*_case` function checks one randomized instance and reports the
//! first violation it finds.

#![allow(dead_code)]

use std::collections::HashMap;

use mcts_sr::benchdata::benchmark;
use mcts_sr::evolve::{random_subtree, EvolveConfig};
use mcts_sr::expr::{decode_preorder, encode_preorder, evaluate, node_count, simplify_basic, Decoded, Evaluated, ExprError};
use mcts_sr::objective::Scorer;
use mcts_sr::search::{LogRecord, SearchTree, Searcher, Source};
use mcts_sr::{search, ConstraintRuleSet, Dataset, ExprTree, MdpConfig, SearchConfig, Token};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn unconstrained(n_vars: usize) -> EvolveConfig {
    let mdp = MdpConfig {
        rules: ConstraintRuleSet::NONE,
        ..MdpConfig::new(n_vars, true)
    };
    EvolveConfig::from_mdp(&mdp)
}

/// A random tree of height ≤ `cap` with constants drawn from [-3, 3].
pub fn random_tree(rng: &mut ChaCha8Rng, cap: usize, n_vars: usize) -> ExprTree {
    let t = random_subtree(cap, &unconstrained(n_vars), rng);
    let consts = (0..t.const_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
    t.with_constants(consts).unwrap()
}

pub fn codec_case(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = rng.random_range(0..=6);
    let t = random_tree(&mut rng, cap, 2);
    let back = decode_preorder(&encode_preorder(&t), 6)
        .and_then(Decoded::into_complete)
        .and_then(|b| b.with_constants(t.constants().to_vec()))
        .map_err(|e| format!("{t}: {e}"))?;
    ensure!(back == t, "{t} decoded as {back}");
    Ok(())
}

pub fn random_tokens(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Token> {
    let alphabet = mcts_sr::expr::alphabet(2, true);
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Independent depth bookkeeping: the depth at which each token lands, or
/// `None` once the sequence is complete.
fn landing_depths(tokens: &[Token]) -> Vec<Option<usize>> {
    let mut open = vec![0usize];
    tokens
        .iter()
        .map(|t| {
            let d = open.pop()?;
            open.extend(std::iter::repeat_n(d + 1, t.arity()));
            Some(d)
        })
        .collect()
}

pub fn depth_law_case(tokens: &[Token], max_depth: usize) -> Check {
    let depths = landing_depths(tokens);
    let first_bad = tokens.iter().zip(&depths).position(|(t, d)| match d {
        Some(d) => *d > max_depth || (*d == max_depth && !t.is_terminal()),
        None => false,
    });
    let overfull = depths.iter().position(Option::is_none);
    match decode_preorder(tokens, max_depth) {
        Ok(Decoded::Complete(t)) => {
            ensure!(t.depth() <= max_depth, "depth {} > {max_depth}", t.depth());
            ensure!(first_bad.is_none(), "accepted a violation at {first_bad:?}");
        }
        Ok(Decoded::Incomplete { .. }) => ensure!(first_bad.is_none(), "accepted a violation at {first_bad:?}"),
        Err(ExprError::DepthViolation { position, .. }) => {
            ensure!(Some(position) == first_bad, "violation at {position}, expected {first_bad:?}");
        }
        Err(ExprError::OverfullSequence { position }) => {
            ensure!(Some(position) == overfull, "overfull at {position}, expected {overfull:?}");
            ensure!(first_bad.is_none_or(|b| b > position), "missed a violation at {first_bad:?}");
        }
        Err(e) => return Err(format!("unexpected error {e}")),
    }
    Ok(())
}

pub fn constraint_case(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tokens = random_subtree(6, &unconstrained(2), &mut rng).token_vec();
    let rules = ConstraintRuleSet::default();
    if let Some(k) = (1..=tokens.len()).find(|&k| rules.check(&tokens[..k]).is_err()) {
        for m in k..=tokens.len() {
            ensure!(rules.check(&tokens[..m]).is_err(), "prefix {m} of {tokens:?} passes after {k} failed");
        }
    }
    Ok(())
}

pub fn simplify_case(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_tree(&mut rng, 5, 2);
    let s = simplify_basic(&t);
    ensure!(node_count(&s) <= t.len(), "{t} grew into {s}");
    for _ in 0..32 {
        let point = vec![vec![rng.random_range(-2.0..2.0)], vec![rng.random_range(-2.0..2.0)]];
        let (Ok(Evaluated::Finite(a)), Ok(Evaluated::Finite(b))) = (evaluate(&t, &point), evaluate(&s, &point)) else {
            continue;
        };
        ensure!((a[0] - b[0]).abs() <= 1e-10 * a[0].abs().max(1.0), "{} vs {} for {t} -> {s}", a[0], b[0]);
    }
    Ok(())
}

pub fn smooth_config() -> EvolveConfig {
    let mdp = MdpConfig {
        alphabet: vec![Token::Add, Token::Sub, Token::Mul, Token::Sin, Token::Cos, Token::Var(0), Token::Const],
        rules: ConstraintRuleSet::NONE,
        ..MdpConfig::new(1, true)
    };
    EvolveConfig::from_mdp(&mdp)
}

pub fn line_data(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..30).map(|_| rng.random_range(-2.0..2.0)).collect();
    let ys = xs.iter().map(|x| 2.0 * x + rng.random_range(-0.1..0.1)).collect();
    Dataset::new("line", vec![xs], ys).unwrap()
}

/// Central-difference gradient of a random smooth tree against a
/// forward-difference cross-check, within 1e-4 relative.
pub fn gradient_case(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_subtree(4, &smooth_config(), &mut rng);
    let k = t.const_count();
    if k == 0 {
        return Ok(());
    }
    let data = line_data(seed ^ 1);
    let tokens = t.token_vec();
    let consts: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut scorer = Scorer::new(100);
    let f0 = scorer.sse(&tokens, &consts, &data).map_err(|e| e.to_string())?;
    let grad = scorer.sse_gradient(&tokens, &consts, &data, f0).map_err(|e| e.to_string())?;
    for i in 0..k {
        let h = 1e-7 * consts[i].abs().max(1.0);
        let mut p = consts.clone();
        p[i] += h;
        let forward = (scorer.sse(&tokens, &p, &data).map_err(|e| e.to_string())? - f0) / h;
        let scale = grad[i].abs().max(forward.abs()).max(1.0);
        ensure!((grad[i] - forward).abs() <= 1e-4 * scale, "{t}: d/dc{i} {} vs {forward}", grad[i]);
    }
    Ok(())
}

pub fn nguyen(name: &str, seed: u64) -> (Dataset, MdpConfig) {
    let spec = benchmark(name).unwrap();
    (spec.generate(seed).unwrap(), MdpConfig::new(spec.n_vars, spec.constants_allowed))
}

/// Small logged run with frequent state jumps and no early stop.
pub fn short_run(seed: u64, budget: u64, queue_size: usize) -> SearchConfig {
    SearchConfig {
        seed,
        budget,
        queue_size,
        g_s: 0.6,
        g_m: 0.4,
        stop_on_exact: false,
        record_log: true,
        ..SearchConfig::default()
    }
}

pub fn run_to_end<'a>(data: &'a Dataset, mdp: &MdpConfig, cfg: &SearchConfig) -> Searcher<'a> {
    let mut s = Searcher::new(data, mdp, cfg).unwrap();
    while !s.is_done() {
        s.iterate();
    }
    s
}

/// One queue entry seen from outside: expression, reward, scoring index.
type Item = (Vec<Token>, f64, u64);

/// Newest entry per expression, then the `n` highest by reward with newer
/// entries winning ties. Best first.
fn top_n(items: impl IntoIterator<Item = Item>, n: usize) -> Vec<Item> {
    let mut latest: HashMap<Vec<Token>, Item> = HashMap::new();
    for it in items {
        if latest.get(&it.0).is_none_or(|old| old.2 < it.2) {
            latest.insert(it.0.clone(), it);
        }
    }
    let mut v: Vec<Item> = latest.into_values().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.2.cmp(&a.2)));
    v.truncate(n);
    v
}

fn item(r: &LogRecord) -> Item {
    (r.tokens.clone(), r.reward, r.eval_index)
}

/// Rebuilds every node queue from the run log alone and compares it with the
/// live tree. A node is born at the first rollout scored from it; it then
/// holds the best of what its parent held at that moment that passes
/// through it, plus every later expression passing through it.
pub fn check_queues_against_log(s: &Searcher) -> Check {
    let tree = s.tree();
    let log = s.log();
    let n = tree.queue_size();
    let mut born: Vec<u64> = vec![0; tree.len()];
    let mut inherited: Vec<Vec<Item>> = vec![Vec::new(); tree.len()];
    for id in tree.ids() {
        let node = tree.node(id);
        let prefix = tree.prefix(id);
        let actual: Vec<Item> = node
            .queue()
            .iter()
            .map(|e| (s.store().tokens(e.expr).to_vec(), e.reward, e.eval_index as u64))
            .collect();
        let i = id.0 as usize;
        if let Some(parent) = node.parent {
            let Some(first) = log
                .iter()
                .find(|r| r.source == Source::Rollout && r.node_depth == node.depth && r.tokens.starts_with(&prefix))
            else {
                ensure!(actual.is_empty(), "node {prefix:?} created after the budget ran out holds entries");
                continue;
            };
            born[i] = first.eval_index;
            let p = parent.0 as usize;
            let parent_prefix = tree.prefix(parent);
            let parent_then = top_n(
                inherited[p].iter().cloned().chain(
                    log.iter()
                        .filter(|r| (born[p]..=first.eval_index).contains(&r.eval_index))
                        .filter(|r| r.tokens.starts_with(&parent_prefix))
                        .map(item),
                ),
                n,
            );
            inherited[i] = parent_then.into_iter().filter(|it| it.0.starts_with(&prefix)).collect();
        }
        let expected = top_n(
            inherited[i].iter().cloned().chain(
                log.iter()
                    .filter(|r| r.eval_index >= born[i] && r.tokens.starts_with(&prefix))
                    .map(item),
            ),
            n,
        );
        ensure!(actual == expected, "queue mismatch at {prefix:?}:\n{actual:?}\n{expected:?}");
    }
    Ok(())
}

/// Queue oracle on a short run of at most 2,500 evaluations with small,
/// frequently overflowing queues.
pub fn queue_case(seed: u64) -> Check {
    let (name, queue) = match seed % 3 {
        0 => ("Nguyen-1", 3),
        1 => ("Nguyen-9", 5),
        _ => ("Nguyen-1c", 4),
    };
    let (data, mdp) = nguyen(name, seed);
    let s = run_to_end(&data, &mdp, &short_run(seed, 2500, queue));
    ensure!(s.log().iter().any(|r| r.source != Source::Rollout), "no state jumps happened");
    check_queues_against_log(&s)
}

/// With queues that never overflow, a child's queue is exactly the part of
/// its parent's queue passing through it, and `V̂` of a node is the larger of
/// its children's and that of its own entries not covered by a child.
pub fn edge_identity_case(seed: u64) -> Check {
    let (data, mdp) = nguyen("Nguyen-6", seed);
    let s = run_to_end(&data, &mdp, &short_run(seed, 4000, 100_000));
    let tree = s.tree();
    let best = s.log().iter().map(|r| r.reward).fold(0.0, f64::max);
    ensure!(tree.node(SearchTree::ROOT).v_hat() == best, "root V̂ is not the best reward");
    for id in tree.ids() {
        let node = tree.node(id);
        if let Some(parent) = node.parent {
            let prefix = tree.prefix(id);
            let passing: Vec<_> = tree
                .node(parent)
                .queue()
                .iter()
                .filter(|e| s.store().tokens(e.expr).starts_with(&prefix))
                .copied()
                .collect();
            let own: Vec<_> = node.queue().iter().copied().collect();
            ensure!(own.is_empty() || own == passing, "edge identity fails at {prefix:?}");
        }
        let via_children = node.children().iter().map(|(_, c)| tree.node(*c).v_hat()).fold(0.0, f64::max);
        let depth = node.depth;
        let uncovered = node
            .queue()
            .iter()
            .filter(|e| {
                let toks = s.store().tokens(e.expr);
                toks.len() <= depth || node.child(toks[depth]).is_none()
            })
            .map(|e| e.reward)
            .fold(0.0, f64::max);
        ensure!(node.v_hat() == via_children.max(uncovered), "V̂ recursion fails at depth {depth}");
    }
    Ok(())
}

pub fn budget_case(seed: u64, budget: u64) -> Check {
    let (data, mdp) = nguyen("Nguyen-1c", seed);
    let out = search(&data, &mdp, &short_run(seed, budget, 8)).map_err(|e| e.to_string())?;
    ensure!(out.evaluations == budget, "{} evaluations for budget {budget}", out.evaluations);
    ensure!(out.log.len() as u64 == budget, "{} log records for budget {budget}", out.log.len());
    let max = out.log.iter().map(|r| r.reward).fold(0.0, f64::max);
    ensure!(out.best_reward == max, "best {} is not the log maximum {max}", out.best_reward);
    Ok(())
}

pub fn reproducibility_case(seed: u64) -> Check {
    let (data, mdp) = nguyen("Nguyen-1c", seed);
    let cfg = short_run(seed, 3000, 50);
    let a = search(&data, &mdp, &cfg).map_err(|e| e.to_string())?;
    let b = search(&data, &mdp, &cfg).map_err(|e| e.to_string())?;
    ensure!(a.log == b.log, "logs differ under seed {seed}");
    ensure!(a.best.constants() == b.best.constants(), "fitted constants differ under seed {seed}");
    Ok(())
}
