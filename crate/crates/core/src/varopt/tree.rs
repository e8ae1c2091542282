//! Explicit code tree, parent-child pair list and selection vectors.

use std::collections::HashMap;

use serde::Serialize;

use crate::codebook::{Codebook, Codeword};
use crate::costmodel::CostModel;
use crate::error::{Error, Result};

/// Largest depth [`build_tree`] will materialize (`2^21 − 2` nodes).
pub const MAX_MATERIALIZED_DEPTH: u32 = 20;

/// A node of the implicit code tree: a codeword of `depth` bits stored
/// most-significant-first in `path`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Node {
    pub depth: u32,
    pub path: u64,
}

impl Node {
    pub const ZERO: Node = Node { depth: 1, path: 0 };
    pub const ONE: Node = Node { depth: 1, path: 1 };

    pub fn ones(self) -> u32 {
        self.path.count_ones()
    }

    pub fn zeros(self) -> u32 {
        self.depth - self.ones()
    }

    pub fn child(self, bit: bool) -> Node {
        Node { depth: self.depth + 1, path: self.path << 1 | u64::from(bit) }
    }

    pub fn codeword(self) -> Codeword {
        Codeword::from_value(self.path, self.depth as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNode {
    pub codeword: Codeword,
    pub cost: f64,
}

/// All `Q = 2^(dp+1) − 2` codewords of depth `1..=dp` in depth-first order,
/// `0` branch before `1` branch, each with its energy cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixTree {
    depth: u32,
    nodes: Vec<TreeNode>,
}

impl PrefixTree {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.cost).collect()
    }

    /// Number of descendants of a node at `depth`: the positions right after
    /// it in depth-first order.
    pub fn descendant_count(&self, depth: u32) -> usize {
        descendant_count(self.depth, depth)
    }

    pub fn index_of(&self, word: &Codeword) -> Option<usize> {
        // Walk the depth-first numbering: a 0 step moves one position, a 1
        // step also skips the 0-subtree.
        if word.is_empty() || word.len() > self.depth as usize {
            return None;
        }
        let mut index = 0usize;
        for (d, &bit) in word.bits().iter().enumerate() {
            let depth = d as u32 + 1;
            if d > 0 {
                index += 1;
            }
            if bit {
                index += 1 + descendant_count(self.depth, depth);
            }
        }
        Some(index)
    }
}

pub(crate) fn descendant_count(tree_depth: u32, depth: u32) -> usize {
    (1usize << (tree_depth - depth + 1)) - 2
}

pub(crate) fn node_count(depth: u32) -> usize {
    (1usize << (depth + 1)) - 2
}

/// Materialize the depth-`dp` code tree with costs from `cm`.
pub fn build_tree(dp: u32, cm: &CostModel) -> Result<PrefixTree> {
    if dp == 0 || dp > MAX_MATERIALIZED_DEPTH {
        return Err(Error::DepthOutOfRange { depth: dp, limit: MAX_MATERIALIZED_DEPTH });
    }
    let mut nodes = Vec::with_capacity(node_count(dp));
    let mut stack = vec![Node::ONE, Node::ZERO];
    while let Some(node) = stack.pop() {
        nodes.push(TreeNode {
            codeword: node.codeword(),
            cost: cm.cost_of_counts(node.zeros() as u64, node.ones() as u64),
        });
        if node.depth < dp {
            stack.push(node.child(true));
            stack.push(node.child(false));
        }
    }
    Ok(PrefixTree { depth: dp, nodes })
}

/// Sparse (ancestor, descendant) index pairs of the depth-first numbered tree:
/// the rows of the prefix-exclusion matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentChildMatrix {
    depth: u32,
    rows: Vec<(usize, usize)>,
}

impl ParentChildMatrix {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    /// Number of columns, `Q`.
    pub fn columns(&self) -> usize {
        node_count(self.depth)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|&(a, b)| {
                let mut row = vec![0; self.columns()];
                row[a] = 1;
                row[b] = 1;
                row
            })
            .collect()
    }
}

/// Pair list built by the block recursion: the depth-`n+1` matrix is two
/// copies of a block holding "root with each of its `q` descendants" followed
/// by the depth-`n` matrix shifted under that root.
pub fn parent_child_pairs(dp: u32) -> Result<ParentChildMatrix> {
    if dp == 0 || dp > MAX_MATERIALIZED_DEPTH {
        return Err(Error::DepthOutOfRange { depth: dp, limit: MAX_MATERIALIZED_DEPTH });
    }
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for n in 1..dp {
        let q = node_count(n);
        let mut block: Vec<(usize, usize)> = (1..=q).map(|j| (0, j)).collect();
        block.extend(rows.iter().map(|&(a, b)| (a + 1, b + 1)));
        let width = q + 1;
        let mut next = block.clone();
        next.extend(block.iter().map(|&(a, b)| (a + width, b + width)));
        rows = next;
    }
    Ok(ParentChildMatrix { depth: dp, rows })
}

/// Binary selection over the nodes of a [`PrefixTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionVector {
    selected: Vec<bool>,
}

impl SelectionVector {
    pub fn from_codebook(tree: &PrefixTree, cb: &Codebook) -> Result<Self> {
        let index: HashMap<&Codeword, usize> = tree.nodes.iter().enumerate().map(|(i, n)| (&n.codeword, i)).collect();
        let mut selected = vec![false; tree.len()];
        for word in cb.entries() {
            let i = index
                .get(word)
                .ok_or_else(|| Error::invalid("codebook", format!("{word} is deeper than the tree")))?;
            selected[*i] = true;
        }
        Ok(SelectionVector { selected })
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.selected
    }

    pub fn count(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    /// `1ᵀa = m` and `𝒫·a ≤ 1`.
    pub fn is_feasible(&self, pairs: &ParentChildMatrix, m: usize) -> bool {
        self.count() == m && pairs.rows.iter().all(|&(a, b)| !(self.selected[a] && self.selected[b]))
    }

    /// `𝓕ᵀa`.
    pub fn objective(&self, tree: &PrefixTree) -> f64 {
        tree.nodes.iter().zip(&self.selected).filter(|(_, &s)| s).map(|(n, _)| n.cost).sum()
    }
}
