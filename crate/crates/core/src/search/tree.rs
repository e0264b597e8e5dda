use crate::expr::Token;

use super::queue::{Entry, ExprStore, TopQueue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// A search-tree node. Its state is the sequence of actions on the path from
/// the root, so `depth` is also the length of that prefix.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub action: Option<Token>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub visits: u64,
    children: Vec<(Token, NodeId)>,
    /// Number of legal actions in this state (0 when terminal).
    n_actions: usize,
    queue: TopQueue,
}

impl SearchNode {
    pub fn children(&self) -> &[(Token, NodeId)] {
        &self.children
    }

    pub fn child(&self, token: Token) -> Option<NodeId> {
        self.children.iter().find(|(t, _)| *t == token).map(|(_, id)| *id)
    }

    pub fn queue(&self) -> &TopQueue {
        &self.queue
    }

    pub fn is_terminal(&self) -> bool {
        self.n_actions == 0
    }

    pub fn is_fully_expanded(&self) -> bool {
        self.children.len() >= self.n_actions
    }

    /// Highest reward known to pass through this node.
    pub fn v_hat(&self) -> f64 {
        self.queue.max_reward()
    }
}

/// Arena of search nodes with per-node top-N queues.
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    queue_size: usize,
}

impl SearchTree {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new(root_actions: usize, queue_size: usize) -> Self {
        Self {
            nodes: vec![SearchNode {
                action: None,
                parent: None,
                depth: 0,
                visits: 0,
                children: Vec::new(),
                n_actions: root_actions,
                queue: TopQueue::new(),
            }],
            queue_size,
        }
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id.0 as usize]
    }

    #[inline]
    fn node_mut(&mut self, id: NodeId) -> &mut SearchNode {
        &mut self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn queue_size(&self) -> usize {
        self.queue_size
    }

    pub fn visit(&mut self, id: NodeId) {
        self.node_mut(id).visits += 1;
    }

    /// Creates the child reached by `action`, with one visit.
    pub fn add_child(&mut self, parent: NodeId, action: Token, n_actions: usize) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        let depth = self.node(parent).depth + 1;
        self.nodes.push(SearchNode {
            action: Some(action),
            parent: Some(parent),
            depth,
            visits: 1,
            children: Vec::new(),
            n_actions,
            queue: TopQueue::new(),
        });
        self.node_mut(parent).children.push((action, id));
        id
    }

    /// The action prefix that defines `id`'s state.
    pub fn prefix(&self, id: NodeId) -> Vec<Token> {
        let mut out = Vec::with_capacity(self.node(id).depth);
        let mut cur = id;
        while let Some(a) = self.node(cur).action {
            out.push(a);
            cur = self.node(cur).parent.expect("non-root nodes have parents");
        }
        out.reverse();
        out
    }

    fn enqueue(&mut self, id: NodeId, e: Entry) -> bool {
        let cap = self.queue_size;
        self.node_mut(id).queue.offer(e, cap)
    }

    /// Offers `e` to `v` and then to each ancestor, stopping at the first
    /// node that rejects it. Returns the number of queues changed.
    pub fn backward_propagate(&mut self, v: NodeId, e: Entry) -> usize {
        let mut changed = 0;
        let mut cur = Some(v);
        while let Some(id) = cur {
            if !self.enqueue(id, e) {
                break;
            }
            changed += 1;
            cur = self.node(id).parent;
        }
        changed
    }

    /// Follows the expression below `v` through existing children, offering
    /// `e` at each node reached. Stops where the path leaves the tree.
    pub fn forward_propagate(&mut self, v: NodeId, e: Entry, store: &ExprStore) -> usize {
        let tokens = store.tokens(e.expr);
        let mut changed = 0;
        let mut cur = v;
        for &t in &tokens[self.node(v).depth.min(tokens.len())..] {
            let Some(next) = self.node(cur).child(t) else { break };
            cur = next;
            changed += usize::from(self.enqueue(cur, e));
        }
        changed
    }

    /// Hands the parent's queued trajectories that pass through `child` down
    /// to it. Equivalent to forward-propagating the whole parent queue, since
    /// every other descendant has already been offered those entries.
    pub fn replay_into_child(&mut self, child: NodeId, store: &ExprStore) -> usize {
        let node = self.node(child);
        let (Some(parent), Some(action)) = (node.parent, node.action) else {
            return 0;
        };
        let at = self.node(parent).depth;
        let passing: Vec<Entry> = self
            .node(parent)
            .queue
            .iter()
            .filter(|e| store.tokens(e.expr).get(at) == Some(&action))
            .copied()
            .collect();
        passing.into_iter().filter(|e| self.enqueue(child, *e)).count()
    }
}

/// `Ψ = V̂(child) + 2c·(ln T_parent / T_child)^γ`, `+∞` for an unvisited child.
#[inline]
pub fn selection_score(parent_visits: u64, child_visits: u64, v_hat: f64, c: f64, gamma: f64) -> f64 {
    if child_visits == 0 {
        return f64::INFINITY;
    }
    let ratio = (parent_visits.max(1) as f64).ln() / child_visits as f64;
    v_hat + 2.0 * c * ratio.max(0.0).powf(gamma)
}

/// State-jump probability at depth `d`: `g_s·2^(−d)`.
#[inline]
pub fn jump_probability(depth: usize, g_s: f64) -> f64 {
    g_s * 0.5f64.powi(depth.min(1074) as i32)
}
