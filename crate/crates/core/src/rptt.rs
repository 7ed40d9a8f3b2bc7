//! Recursive partitioning ternary tree.
//!
//! A node's connections split at a cutline into those entirely on the low
//! side (left), those entirely on the high side (right) and those crossing
//! it (mid). Left and right are geographically independent and may be
//! routed concurrently once the mid subtree is done.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::netlist::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
}

/// Something to partition: an id and the box used for cutting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionItem {
    pub id: u32,
    pub bbox: BBox,
}

/// Outcome of cutting along one axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisCut {
    pub success: bool,
    pub left: Vec<PartitionItem>,
    pub mid: Vec<PartitionItem>,
    pub right: Vec<PartitionItem>,
    /// `|after - before|` at the chosen cutline; `usize::MAX` for empty input.
    pub diff: usize,
    pub cutline: i32,
}

/// Finds the cutline on `axis` that best balances the items entirely
/// before it against those entirely after it. Among equal imbalances the
/// lowest coordinate wins.
pub fn balance_cut_axis(items: &[PartitionItem], axis: Axis) -> AxisCut {
    if items.is_empty() {
        return AxisCut { success: false, left: Vec::new(), mid: Vec::new(), right: Vec::new(), diff: usize::MAX, cutline: 0 };
    }
    let lo = items.iter().map(|c| c.bbox.min_on(axis)).min().unwrap();
    let hi = items.iter().map(|c| c.bbox.max_on(axis)).max().unwrap();
    let span = (hi - lo + 1) as usize;

    // ends_at[i]: items whose max is lo+i; starts_at[i]: items whose min is lo+i.
    let mut ends_at = vec![0usize; span];
    let mut starts_at = vec![0usize; span];
    for c in items {
        ends_at[(c.bbox.max_on(axis) - lo) as usize] += 1;
        starts_at[(c.bbox.min_on(axis) - lo) as usize] += 1;
    }

    let total = items.len();
    let (mut before, mut started) = (0usize, 0usize);
    let (mut diff, mut cutline) = (usize::MAX, 0);
    for i in 0..span {
        before += ends_at[i];
        started += starts_at[i];
        let after = total - started;
        let d = after.abs_diff(before);
        if d < diff {
            diff = d;
            cutline = lo + i as i32;
        }
    }

    let (mut left, mut mid, mut right) = (Vec::new(), Vec::new(), Vec::new());
    for &c in items {
        if c.bbox.max_on(axis) <= cutline {
            left.push(c);
        } else if c.bbox.min_on(axis) > cutline {
            right.push(c);
        } else {
            mid.push(c);
        }
    }
    AxisCut { success: !left.is_empty() && !right.is_empty(), left, mid, right, diff, cutline }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub success: bool,
    pub axis: Axis,
    pub cutline: i32,
    pub diff: usize,
    pub left: Vec<PartitionItem>,
    pub mid: Vec<PartitionItem>,
    pub right: Vec<PartitionItem>,
}

/// Tries both axes and keeps the one with the strictly smaller imbalance,
/// Y on ties. An axis whose best cutline leaves a side empty counts as
/// infinitely imbalanced.
pub fn balance_cut(items: &[PartitionItem]) -> Cut {
    let x = balance_cut_axis(items, Axis::X);
    let y = balance_cut_axis(items, Axis::Y);
    let effective = |c: &AxisCut| if c.success { c.diff } else { usize::MAX };
    let (axis, best) = if effective(&x) < effective(&y) { (Axis::X, x) } else { (Axis::Y, y) };
    Cut { success: best.success, axis, cutline: best.cutline, diff: best.diff, left: best.left, mid: best.mid, right: best.right }
}

/// How crossing connections are handled while building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeShape {
    /// Crossing connections are partitioned recursively as a third subtree.
    #[default]
    Ternary,
    /// Crossing connections stay together in a single leaf that is routed
    /// serially before the two sides, as in a binary partitioning tree.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpttNode {
    /// Preorder position within the tree.
    pub id: u32,
    pub connections: Vec<u32>,
    pub cut: Option<(Axis, i32)>,
    pub left: Option<Box<RpttNode>>,
    pub mid: Option<Box<RpttNode>>,
    pub right: Option<Box<RpttNode>>,
}

pub fn build_tree(items: &[PartitionItem]) -> RpttNode {
    build_tree_shaped(items, TreeShape::Ternary)
}

pub fn build_tree_shaped(items: &[PartitionItem], shape: TreeShape) -> RpttNode {
    let mut next_id = 0;
    build(items, shape, &mut next_id)
}

fn leaf(items: &[PartitionItem], next_id: &mut u32) -> RpttNode {
    let id = *next_id;
    *next_id += 1;
    RpttNode { id, connections: items.iter().map(|c| c.id).collect(), cut: None, left: None, mid: None, right: None }
}

fn build(items: &[PartitionItem], shape: TreeShape, next_id: &mut u32) -> RpttNode {
    let cut = balance_cut(items);
    if !cut.success {
        return leaf(items, next_id);
    }
    let mut node = leaf(items, next_id);
    node.cut = Some((cut.axis, cut.cutline));
    node.left = Some(Box::new(build(&cut.left, shape, next_id)));
    if !cut.mid.is_empty() {
        node.mid = Some(Box::new(match shape {
            TreeShape::Ternary => build(&cut.mid, shape, next_id),
            TreeShape::Binary => leaf(&cut.mid, next_id),
        }));
    }
    node.right = Some(Box::new(build(&cut.right, shape, next_id)));
    node
}

impl RpttNode {
    pub fn is_leaf(&self) -> bool {
        self.cut.is_none()
    }

    pub fn children(&self) -> impl Iterator<Item = &RpttNode> {
        [&self.left, &self.mid, &self.right].into_iter().flatten().map(|b| b.as_ref())
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(RpttNode::depth).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().map(RpttNode::node_count).sum::<usize>()
    }

    pub fn leaves(&self) -> Vec<&RpttNode> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if n.is_leaf() {
                out.push(n);
            }
        });
        out
    }

    /// Preorder visit.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a RpttNode)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Connection order of a single-threaded run: mid subtree, then left,
    /// then right; leaves in stored order.
    pub fn sequential_order(&self) -> Vec<u32> {
        fn walk(n: &RpttNode, out: &mut Vec<u32>) {
            if n.is_leaf() {
                out.extend_from_slice(&n.connections);
                return;
            }
            for c in [&n.mid, &n.left, &n.right].into_iter().flatten() {
                walk(c, out);
            }
        }
        let mut out = Vec::with_capacity(self.connections.len());
        walk(self, &mut out);
        out
    }

    /// Indented text rendering, one line per node.
    pub fn dump(&self) -> String {
        fn walk(n: &RpttNode, label: &str, indent: usize, out: &mut String) {
            write!(out, "{:indent$}{label} #{} n={}", "", n.id, n.connections.len()).unwrap();
            match n.cut {
                Some((axis, at)) => writeln!(out, " cut={axis:?}@{at}").unwrap(),
                None => writeln!(out, " leaf {:?}", n.connections).unwrap(),
            }
            for (label, child) in [("left", &n.left), ("mid", &n.mid), ("right", &n.right)] {
                if let Some(c) = child {
                    walk(c, label, indent + 2, out);
                }
            }
        }
        let mut out = String::new();
        walk(self, "root", 0, &mut out);
        out
    }
}
