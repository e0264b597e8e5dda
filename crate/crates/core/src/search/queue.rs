use std::cmp::Ordering;
use std::collections::HashMap;

use crate::expr::Token;

/// Index of an interned complete expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub u32);

/// Interned token sequences of every scored expression, with their rewards.
#[derive(Default)]
pub struct ExprStore {
    exprs: Vec<Box<[Token]>>,
    rewards: Vec<f64>,
    index: HashMap<Box<[Token]>, ExprId>,
}

impl ExprStore {
    pub fn lookup(&self, tokens: &[Token]) -> Option<ExprId> {
        self.index.get(tokens).copied()
    }

    pub fn insert(&mut self, tokens: &[Token], reward: f64) -> ExprId {
        let id = ExprId(self.exprs.len() as u32);
        let boxed: Box<[Token]> = tokens.into();
        self.exprs.push(boxed.clone());
        self.rewards.push(reward);
        self.index.insert(boxed, id);
        id
    }

    #[inline]
    pub fn tokens(&self, id: ExprId) -> &[Token] {
        &self.exprs[id.0 as usize]
    }

    #[inline]
    pub fn reward(&self, id: ExprId) -> f64 {
        self.rewards[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }
}

/// A scored complete expression as stored in a node queue. The trajectory is
/// the expression's suffix after the node's prefix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub expr: ExprId,
    pub reward: f64,
    /// Position in the global scoring order; larger is newer.
    pub eval_index: u32,
}

impl Entry {
    /// Queue order: reward, then recency.
    #[inline]
    pub fn rank_cmp(&self, other: &Entry) -> Ordering {
        self.reward
            .total_cmp(&other.reward)
            .then(self.eval_index.cmp(&other.eval_index))
    }
}

/// Bounded top-N set of entries with one entry per expression.
///
/// Ordered by reward, ties resolved in favour of the newer entry, so a full
/// queue evicts strictly lower rewards first and the older of equal ones.
#[derive(Clone, Debug, Default)]
pub struct TopQueue {
    /// Ascending by [`Entry::rank_cmp`].
    entries: Vec<Entry>,
}

impl TopQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest-ranked entry.
    pub fn best(&self) -> Option<&Entry> {
        self.entries.last()
    }

    /// Highest reward held, 0 when empty.
    pub fn max_reward(&self) -> f64 {
        self.best().map_or(0.0, |e| e.reward)
    }

    /// Entries from best to worst.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Entry> + ExactSizeIterator {
        self.entries.iter().rev()
    }

    /// The `k`-th best entry.
    pub fn get(&self, k: usize) -> Option<&Entry> {
        self.entries.len().checked_sub(k + 1).map(|i| &self.entries[i])
    }

    /// Inserts `e` if it belongs to the top `cap`. Returns whether the queue
    /// changed. An expression already present is replaced only by a
    /// higher-ranked entry for it.
    pub fn offer(&mut self, e: Entry, cap: usize) -> bool {
        if cap == 0 {
            return false;
        }
        if self.entries.len() >= cap && e.rank_cmp(&self.entries[0]) == Ordering::Less {
            return false;
        }
        // Equal expressions score equally, so a duplicate can only sit in
        // the equal-reward run.
        let lo = self.entries.partition_point(|x| x.reward.total_cmp(&e.reward) == Ordering::Less);
        let hi = lo + self.entries[lo..].partition_point(|x| x.reward.total_cmp(&e.reward) != Ordering::Greater);
        if let Some(k) = (lo..hi).find(|&k| self.entries[k].expr == e.expr) {
            if self.entries[k].rank_cmp(&e) != Ordering::Less {
                return false;
            }
            self.entries.remove(k);
        } else if self.entries.len() >= cap {
            self.entries.remove(0);
        }
        let at = self.entries.partition_point(|x| x.rank_cmp(&e) == Ordering::Less);
        self.entries.insert(at, e);
        true
    }
}
