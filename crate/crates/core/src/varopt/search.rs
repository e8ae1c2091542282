//! Exact branch-and-bound over the implicit code tree.
//!
//! Nodes are decided in depth-first order (`0` branch first). At each node
//! the search tries, in this order: take the node as a codeword, descend into
//! its children, or leave its whole subtree unused. That order enumerates
//! complete codebooks in increasing lexicographic order of their sorted word
//! lists, so the first optimum reached is the lexicographically smallest.
//!
//! Lower bound: for every open subtree a table gives the minimum total cost
//! of `u` prefix-free words inside it; min-plus convolution combines the open
//! forest. The objective `Σ P_j·c_(j)` (costs ascending, probabilities
//! descending) equals `Σ_t (P_t − P_{t+1})·S_t` with `S_t` the sum of the
//! `t` cheapest costs, and each `S_t` is bounded below by the cheapest split
//! between already selected words and the forest table.

use super::tree::Node;

const INF: f64 = f64::INFINITY;

/// Relative slack below which two objective values count as equal.
pub(crate) const REL_TOL: f64 = 1e-12;

/// `a ⊕ b` in the min-plus semiring, truncated to `len` entries.
fn min_plus(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![INF; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == INF {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            let s = x + y;
            if s < out[i + j] {
                out[i + j] = s;
            }
        }
    }
    out
}

/// Minimum total cost of `u` prefix-free words inside each subtree,
/// keyed by the subtree root's (zeros, ones).
pub(crate) struct SubtreeTable {
    depth: u32,
    m: usize,
    rows: Vec<Vec<f64>>,
}

impl SubtreeTable {
    pub fn new(depth: u32, m: usize, beta0: f64, beta1: f64) -> Self {
        let slots = ((depth + 1) * (depth + 2) / 2) as usize;
        let mut table = SubtreeTable { depth, m, rows: vec![Vec::new(); slots] };
        for d in (1..=depth).rev() {
            for ones in 0..=d {
                let zeros = d - ones;
                let own = beta0 * f64::from(zeros) + beta1 * f64::from(ones);
                let mut row = if d == depth {
                    let mut r = vec![INF; m + 1];
                    r[0] = 0.0;
                    r
                } else {
                    min_plus(table.row(zeros + 1, ones), table.row(zeros, ones + 1), m + 1)
                };
                if m >= 1 && own < row[1] {
                    row[1] = own;
                }
                let slot = table.slot(zeros, ones);
                table.rows[slot] = row;
            }
        }
        table
    }

    fn slot(&self, zeros: u32, ones: u32) -> usize {
        let d = zeros + ones;
        (d * (d + 1) / 2 + ones) as usize
    }

    pub fn row(&self, zeros: u32, ones: u32) -> &[f64] {
        &self.rows[self.slot(zeros, ones)]
    }

    pub fn of(&self, node: Node) -> &[f64] {
        self.row(node.zeros(), node.ones())
    }

    /// Best `k` prefix-free words using both root subtrees.
    pub fn forest_min(&self, k: usize) -> f64 {
        min_plus(self.of(Node::ZERO), self.of(Node::ONE), self.m + 1)[k]
    }

    /// One cheapest set of `k` prefix-free words below the root.
    pub fn reconstruct_root(&self, k: usize) -> Vec<Node> {
        let (left, right) = (self.of(Node::ZERO), self.of(Node::ONE));
        let target = self.forest_min(k);
        let split = (0..=k).find(|&a| left[a] + right[k - a] == target).expect("consistent table");
        let mut out = self.reconstruct(Node::ZERO, split);
        out.extend(self.reconstruct(Node::ONE, k - split));
        out
    }

    fn reconstruct(&self, node: Node, k: usize) -> Vec<Node> {
        if k == 0 {
            return Vec::new();
        }
        let row = self.of(node);
        let target = row[k];
        if node.depth < self.depth {
            let (l, r) = (node.child(false), node.child(true));
            let (left, right) = (self.of(l), self.of(r));
            if let Some(a) = (0..=k).find(|&a| left[a] + right[k - a] == target) {
                let mut out = self.reconstruct(l, a);
                out.extend(self.reconstruct(r, k - a));
                return out;
            }
        }
        debug_assert_eq!(k, 1);
        vec![node]
    }
}

/// Fixed inputs of one search.
pub(crate) struct Problem {
    pub depth: u32,
    pub m: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub t0: f64,
    pub t1: f64,
    /// Probabilities, largest first.
    pub probs_desc: Vec<f64>,
    /// `P_t − P_{t+1}` for `t = 1..=m` (index `t − 1`).
    pub steps: Vec<f64>,
    /// Every probability is positive, which makes single-child internal
    /// nodes strictly worse than contracting them.
    pub strict: bool,
    /// Upper limit on the expected codeword duration, if any.
    pub duration_cap: Option<f64>,
    pub budget: u64,
    pub table: SubtreeTable,
}

impl Problem {
    pub fn new(
        depth: u32,
        probs_desc: Vec<f64>,
        (beta0, beta1, t0, t1): (f64, f64, f64, f64),
        duration_cap: Option<f64>,
        budget: u64,
    ) -> Self {
        let m = probs_desc.len();
        let steps = (0..m).map(|t| probs_desc[t] - probs_desc.get(t + 1).copied().unwrap_or(0.0)).collect();
        let strict = probs_desc.iter().all(|&p| p > 0.0);
        let table = SubtreeTable::new(depth, m, beta0, beta1);
        Problem { depth, m, beta0, beta1, t0, t1, probs_desc, steps, strict, duration_cap, budget, table }
    }

    fn cost(&self, node: Node) -> f64 {
        self.beta0 * f64::from(node.zeros()) + self.beta1 * f64::from(node.ones())
    }

    fn duration(&self, node: Node) -> f64 {
        self.t0 * f64::from(node.zeros()) + self.t1 * f64::from(node.ones())
    }

    /// `Σ P_j·x_j` with `x` sorted ascending against probabilities descending.
    fn paired(&self, sorted_asc: &[f64]) -> f64 {
        self.probs_desc.iter().zip(sorted_asc).map(|(p, x)| p * x).sum()
    }

    /// Objective and expected duration of a complete selection, words ranked
    /// by cost then depth-first position.
    pub fn evaluate(&self, nodes: &[Node]) -> (f64, f64) {
        let mut ranked: Vec<(f64, usize)> = nodes.iter().enumerate().map(|(i, &n)| (self.cost(n), i)).collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let costs: Vec<f64> = ranked.iter().map(|r| r.0).collect();
        let durations: Vec<f64> = ranked.iter().map(|r| self.duration(nodes[r.1])).collect();
        (self.paired(&costs), self.probs_desc.iter().zip(&durations).map(|(p, d)| p * d).sum())
    }
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Optional,
    Required,
    /// Required unless something was selected after the selection count
    /// reached this value.
    RequiredIfNoneSince(usize),
}

struct Pending {
    node: Node,
    rule: Rule,
    /// Forest table of this entry and all entries below it.
    forest: Vec<f64>,
}

pub(crate) struct Outcome {
    /// Selected nodes in depth-first order.
    pub best: Option<(f64, Vec<Node>)>,
    pub explored: u64,
    pub exhausted: bool,
}

pub(crate) struct Search<'p> {
    p: &'p Problem,
    selected: Vec<Node>,
    costs_sorted: Vec<f64>,
    durations_sorted: Vec<f64>,
    pending: Vec<Pending>,
    upper: f64,
    best: Option<(f64, Vec<Node>)>,
    explored: u64,
    exhausted: bool,
}

impl<'p> Search<'p> {
    /// `upper` is the value of a known feasible selection (or `INF`); it is
    /// only used to prune, never returned.
    pub fn run(p: &'p Problem, upper: f64) -> Outcome {
        let mut s = Search {
            p,
            selected: Vec::with_capacity(p.m),
            costs_sorted: Vec::with_capacity(p.m),
            durations_sorted: Vec::with_capacity(p.m),
            pending: Vec::new(),
            upper,
            best: None,
            explored: 0,
            exhausted: false,
        };
        // The empty word is never a codeword: the root always descends.
        s.descend_from(None);
        Outcome { best: s.best, explored: s.explored, exhausted: s.exhausted }
    }

    fn pending_forest(&self, len: usize) -> Vec<f64> {
        match self.pending.last() {
            Some(top) => top.forest[..len.min(top.forest.len())].to_vec(),
            None => {
                let mut v = vec![INF; len];
                v[0] = 0.0;
                v
            }
        }
    }

    fn rules(&self) -> (bool, Rule) {
        if self.p.strict {
            let right = if self.p.beta0 > 0.0 { Rule::Required } else { Rule::Optional };
            (true, right)
        } else {
            (false, Rule::RequiredIfNoneSince(self.selected.len()))
        }
    }

    /// Open both children of `parent` (the root when `None`).
    fn descend_from(&mut self, parent: Option<Node>) {
        let (left, right) = match parent {
            Some(n) => (n.child(false), n.child(true)),
            None => (Node::ZERO, Node::ONE),
        };
        let (left_required, right_rule) = self.rules();
        let k = self.p.m - self.selected.len();
        let below = self.pending_forest(k + 1);
        let forest = min_plus(&below, self.p.table.of(right), k + 1);
        self.pending.push(Pending { node: right, rule: right_rule, forest });
        self.visit(left, left_required);
        self.pending.pop();
    }

    fn visit(&mut self, node: Node, required: bool) {
        if self.exhausted {
            return;
        }
        self.explored += 1;
        if self.explored > self.p.budget {
            self.exhausted = true;
            return;
        }
        let k = self.p.m - self.selected.len();
        let below = self.pending_forest(k + 1);
        let forest = min_plus(&below, self.p.table.of(node), k + 1);
        if !self.promising(&forest, node.depth) {
            return;
        }

        self.select(node);
        self.advance();
        self.unselect(node);

        if node.depth < self.p.depth {
            self.descend_from(Some(node));
        }

        if !required {
            self.advance();
        }
    }

    /// Move on to the next open subtree, or record a complete selection.
    fn advance(&mut self) {
        if self.exhausted {
            return;
        }
        if self.selected.len() == self.p.m {
            let count = self.selected.len();
            if self.pending.iter().all(|e| !Self::is_required(e.rule, count)) {
                self.complete();
            }
            return;
        }
        let Some(entry) = self.pending.pop() else {
            return;
        };
        let required = Self::is_required(entry.rule, self.selected.len());
        self.visit(entry.node, required);
        self.pending.push(entry);
    }

    fn is_required(rule: Rule, count: usize) -> bool {
        match rule {
            Rule::Optional => false,
            Rule::Required => true,
            Rule::RequiredIfNoneSince(c) => c == count,
        }
    }

    fn select(&mut self, node: Node) {
        self.selected.push(node);
        insert_sorted(&mut self.costs_sorted, self.p.cost(node));
        insert_sorted(&mut self.durations_sorted, self.p.duration(node));
    }

    fn unselect(&mut self, node: Node) {
        self.selected.pop();
        remove_sorted(&mut self.costs_sorted, self.p.cost(node));
        remove_sorted(&mut self.durations_sorted, self.p.duration(node));
    }

    fn threshold_prunes(&self, bound: f64) -> bool {
        match &self.best {
            Some((value, _)) => bound >= value - REL_TOL * value.abs(),
            None => bound > self.upper + REL_TOL * self.upper.abs(),
        }
    }

    /// Whether the subtree of the current node together with the pending
    /// forest can still beat the incumbent and meet the duration cap.
    fn promising(&self, forest: &[f64], node_depth: u32) -> bool {
        let k = self.p.m - self.selected.len();
        if forest[k] == INF {
            return false;
        }
        let s = self.costs_sorted.len();
        let mut prefix = Vec::with_capacity(s + 1);
        prefix.push(0.0);
        for c in &self.costs_sorted {
            prefix.push(prefix.last().unwrap() + c);
        }
        let mut bound = 0.0;
        for (t0, &step) in self.p.steps.iter().enumerate() {
            if step == 0.0 {
                continue;
            }
            let t = t0 + 1;
            let lo = t.saturating_sub(k);
            let hi = t.min(s);
            let least = (lo..=hi).map(|j| prefix[j] + forest[t - j]).fold(INF, f64::min);
            bound += step * least;
        }
        if self.threshold_prunes(bound) {
            return false;
        }
        if let Some(cap) = self.p.duration_cap {
            let shallowest = self.pending.iter().map(|e| e.node.depth).fold(node_depth, u32::min);
            let floor = self.p.t0.min(self.p.t1) * f64::from(shallowest);
            let mut durations = self.durations_sorted.clone();
            durations.extend(std::iter::repeat_n(floor, k));
            durations.sort_by(f64::total_cmp);
            if self.p.paired(&durations) > cap * (1.0 + REL_TOL) {
                return false;
            }
        }
        true
    }

    fn complete(&mut self) {
        let (value, duration) = self.p.evaluate(&self.selected);
        if let Some(cap) = self.p.duration_cap {
            if duration > cap * (1.0 + REL_TOL) {
                return;
            }
        }
        let better = match &self.best {
            Some((best, _)) => value < best - REL_TOL * best.abs(),
            None => true,
        };
        if better {
            self.best = Some((value, self.selected.clone()));
        }
    }
}

fn insert_sorted(v: &mut Vec<f64>, x: f64) {
    let at = v.partition_point(|&y| y <= x);
    v.insert(at, x);
}

fn remove_sorted(v: &mut Vec<f64>, x: f64) {
    let at = v.partition_point(|&y| y < x);
    debug_assert_eq!(v[at], x);
    v.remove(at);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_plus_truncates() {
        let a = [0.0, 1.0, 5.0];
        let b = [0.0, 2.0, INF];
        assert_eq!(min_plus(&a, &b, 3), vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn table_matches_greedy_splitting_on_uniform_costs() {
        // Splitting the cheapest leaf is optimal for equal weights; with
        // costs 1 and 5 the 8-leaf tree totals 62.
        let t = SubtreeTable::new(7, 8, 1.0, 5.0);
        assert_eq!(t.forest_min(8), 62.0);
        assert_eq!(t.forest_min(2), 6.0);
        let nodes = t.reconstruct_root(8);
        assert_eq!(nodes.len(), 8);
        let total: u32 = nodes.iter().map(|n| n.zeros() + 5 * n.ones()).sum();
        assert_eq!(total, 62);
    }

    #[test]
    fn table_respects_capacity() {
        let t = SubtreeTable::new(2, 5, 1.0, 1.0);
        assert_eq!(t.forest_min(4), 8.0);
        assert_eq!(t.forest_min(5), INF);
    }
}
