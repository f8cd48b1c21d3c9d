//! Finite unordered unranked labeled trees.
//!
//! Children are kept sorted, so derived equality is isomorphism.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabeledTree<L> {
    pub label: L,
    pub children: Vec<LabeledTree<L>>,
}

impl<L: Ord + Clone> LabeledTree<L> {
    pub fn leaf(label: L) -> Self {
        LabeledTree { label, children: Vec::new() }
    }

    /// `label(children…)`, children sorted.
    pub fn node(label: L, mut children: Vec<LabeledTree<L>>) -> Self {
        children.sort();
        LabeledTree { label, children }
    }

    /// `label(children…)` with isomorphic siblings merged.
    pub fn reduced_node(label: L, mut children: Vec<LabeledTree<L>>) -> Self {
        children.sort();
        children.dedup();
        LabeledTree { label, children }
    }

    /// Sorts children recursively.
    pub fn canonical(&self) -> Self {
        Self::node(self.label.clone(), self.children.iter().map(|c| c.canonical()).collect())
    }

    /// Bottom-up removal of isomorphic sibling subtrees.
    pub fn reduce(&self) -> Self {
        Self::reduced_node(self.label.clone(), self.children.iter().map(|c| c.reduce()).collect())
    }

    pub fn is_reduced(&self) -> bool {
        let c = self.canonical();
        c.children.windows(2).all(|w| w[0] != w[1]) && c.children.iter().all(|t| t.is_reduced())
    }

    /// `t₁ ∘ t₂`: both trees share the root label; children are pooled.
    pub fn compose(&self, other: &Self) -> Self {
        assert!(self.label == other.label, "composition needs equal root labels");
        Self::node(self.label.clone(), self.children.iter().chain(&other.children).cloned().collect())
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Subtree reached by following child indices.
    pub fn at(&self, path: &[usize]) -> Option<&Self> {
        let mut t = self;
        for &i in path {
            t = t.children.get(i)?;
        }
        Some(t)
    }

    /// Index of the child equal to `t`.
    pub fn child_index(&self, t: &Self) -> Option<usize> {
        self.children.binary_search(t).ok()
    }

    /// Label sequences along root-to-leaf paths.
    pub fn label_paths(&self) -> BTreeSet<Vec<L>> {
        let mut out = BTreeSet::new();
        let mut prefix = Vec::new();
        self.collect_paths(&mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Vec<L>, out: &mut BTreeSet<Vec<L>>) {
        prefix.push(self.label.clone());
        if self.children.is_empty() {
            out.insert(prefix.clone());
        }
        for c in &self.children {
            c.collect_paths(prefix, out);
        }
        prefix.pop();
    }

    pub fn map<M: Ord + Clone>(&self, f: &impl Fn(&L) -> M) -> LabeledTree<M> {
        LabeledTree::node(f(&self.label), self.children.iter().map(|c| c.map(f)).collect())
    }

    /// Depth-first preorder of `(path, subtree)`.
    pub fn nodes(&self) -> Vec<(Vec<usize>, &Self)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((p, t)) = stack.pop() {
            for (i, c) in t.children.iter().enumerate().rev() {
                let mut q = p.clone();
                q.push(i);
                stack.push((q, c));
            }
            out.push((p, t));
        }
        out
    }
}

impl<L: fmt::Display> LabeledTree<L> {
    /// `label(child,child)` with children in stored order.
    pub fn serialize(&self) -> String {
        let mut s = self.label.to_string();
        if !self.children.is_empty() {
            s.push('(');
            let parts: Vec<String> = self.children.iter().map(|c| c.serialize()).collect();
            s.push_str(&parts.join(","));
            s.push(')');
        }
        s
    }
}

impl<L: fmt::Display> fmt::Display for LabeledTree<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// DOT rendering; even levels are ellipses and odd levels boxes.
pub fn tree_to_dot<L: fmt::Display>(t: &LabeledTree<L>, title: &str) -> String {
    fn walk<L: fmt::Display>(t: &LabeledTree<L>, level: usize, id: &mut usize, out: &mut String) -> usize {
        let me = *id;
        *id += 1;
        let shape = if level % 2 == 0 { "ellipse" } else { "box" };
        let label = t.label.to_string().replace('"', "\\\"");
        let _ = writeln!(out, "  t{me} [label=\"{label}\", shape={shape}];");
        for c in &t.children {
            let child = walk(c, level + 1, id, out);
            let _ = writeln!(out, "  t{me} -> t{child};");
        }
        me
    }
    let mut out = format!("digraph \"{}\" {{\n", title.replace('"', "\\\""));
    let mut id = 0;
    walk(t, 0, &mut id, &mut out);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(l: char, c: Vec<LabeledTree<char>>) -> LabeledTree<char> {
        LabeledTree { label: l, children: c }
    }

    #[test]
    fn reduce_merges_duplicate_leaves() {
        let tree = t('a', vec![t('b', vec![]), t('b', vec![])]);
        assert_eq!(tree.reduce(), t('a', vec![t('b', vec![])]));
        assert!(!tree.is_reduced());
        let r = tree.reduce();
        assert_eq!(r.reduce(), r);
    }

    #[test]
    fn canonical_form_ignores_child_order() {
        let x = t('a', vec![t('b', vec![t('c', vec![])]), t('d', vec![])]);
        let y = t('a', vec![t('d', vec![]), t('b', vec![t('c', vec![])])]);
        assert_ne!(x, y);
        assert_eq!(x.canonical(), y.canonical());
        assert_eq!(x.canonical().serialize(), "a(b(c),d)");
    }

    #[test]
    fn composition_pools_children() {
        let x = LabeledTree::node('a', vec![LabeledTree::leaf('b')]);
        let y = LabeledTree::node('a', vec![LabeledTree::leaf('c')]);
        assert_eq!(x.compose(&y).serialize(), "a(b,c)");
        assert_eq!(x.compose(&y).height(), 1);
    }

    #[test]
    fn paths_and_lookup() {
        let x = LabeledTree::node('a', vec![LabeledTree::node('b', vec![LabeledTree::leaf('c')]), LabeledTree::leaf('d')]);
        assert_eq!(x.at(&[0, 0]).unwrap().label, 'c');
        assert_eq!(x.label_paths().len(), 2);
        assert_eq!(x.nodes().len(), 4);
        assert!(tree_to_dot(&x, "x").contains("shape=box"));
    }
}
