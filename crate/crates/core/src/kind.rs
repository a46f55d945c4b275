//! Simple kinds over a single ground kind `o`.
//!
//! Kinds are interned; a [`KindId`] is valid only for the [`KindStore`] that
//! created it. Arity and order are cached at construction.

use std::collections::HashMap;
use std::fmt::Write as _;

/// Interned kind handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KindId(u32);

impl KindId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Structure of one kind node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KindNode {
    /// The ground kind `o`.
    Ground,
    /// `arg -> result`; `->` associates to the right.
    Arrow { arg: KindId, result: KindId },
}

#[derive(Debug, Default)]
pub struct KindStore {
    nodes: Vec<KindNode>,
    arity: Vec<u32>,
    order: Vec<u32>,
    by_node: HashMap<KindNode, KindId>,
}

impl KindStore {
    pub fn new() -> Self {
        let mut s = Self::default();
        s.intern(KindNode::Ground);
        s
    }

    fn intern(&mut self, node: KindNode) -> KindId {
        if let Some(&id) = self.by_node.get(&node) {
            return id;
        }
        let (arity, order) = match node {
            KindNode::Ground => (0, 0),
            KindNode::Arrow { arg, result } => (
                self.arity(result) + 1,
                self.order(arg).saturating_add(1).max(self.order(result)),
            ),
        };
        let id = KindId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.arity.push(arity);
        self.order.push(order);
        self.by_node.insert(node, id);
        id
    }

    /// The ground kind `o`.
    pub fn ground(&self) -> KindId {
        KindId(0)
    }

    pub fn arrow(&mut self, arg: KindId, result: KindId) -> KindId {
        self.intern(KindNode::Arrow { arg, result })
    }

    /// Look up an arrow kind that is already interned.
    pub fn existing_arrow(&self, arg: KindId, result: KindId) -> Option<KindId> {
        self.by_node.get(&KindNode::Arrow { arg, result }).copied()
    }

    /// `k1 -> k2 -> ... -> result`, right-associated.
    pub fn arrow_chain(&mut self, args: &[KindId], result: KindId) -> KindId {
        let mut acc = result;
        for &a in args.iter().rev() {
            acc = self.arrow(a, acc);
        }
        acc
    }

    pub fn node(&self, id: KindId) -> KindNode {
        self.nodes[id.index()]
    }

    /// Number of arguments until ground: `arity(o) = 0`,
    /// `arity(k1 -> k2) = arity(k2) + 1`.
    pub fn arity(&self, id: KindId) -> u32 {
        self.arity[id.index()]
    }

    /// `ord(o) = 0`, `ord(k1 -> k2) = max(ord(k1) + 1, ord(k2))`.
    pub fn order(&self, id: KindId) -> u32 {
        self.order[id.index()]
    }

    pub fn is_ground(&self, id: KindId) -> bool {
        id == self.ground()
    }

    /// Argument kinds in order, plus the ground result.
    /// The result of a fully applied kind is always `o` in this calculus.
    pub fn uncurry(&self, mut id: KindId) -> Vec<KindId> {
        let mut args = Vec::new();
        while let KindNode::Arrow { arg, result } = self.node(id) {
            args.push(arg);
            id = result;
        }
        args
    }

    pub fn render(&self, id: KindId) -> String {
        let mut out = String::new();
        self.render_into(id, false, &mut out);
        out
    }

    fn render_into(&self, id: KindId, parenthesize: bool, out: &mut String) {
        match self.node(id) {
            KindNode::Ground => out.push('o'),
            KindNode::Arrow { arg, result } => {
                if parenthesize {
                    out.push('(');
                }
                // left operand of -> needs parens when itself an arrow
                self.render_into(arg, matches!(self.node(arg), KindNode::Arrow { .. }), out);
                let _ = write!(out, " -> ");
                self.render_into(result, false, out);
                if parenthesize {
                    out.push(')');
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_is_order_zero() {
        let ks = KindStore::new();
        assert_eq!(ks.arity(ks.ground()), 0);
        assert_eq!(ks.order(ks.ground()), 0);
    }

    #[test]
    fn first_order_unary() {
        let mut ks = KindStore::new();
        let o = ks.ground();
        let oo = ks.arrow(o, o);
        assert_eq!(ks.arity(oo), 1);
        assert_eq!(ks.order(oo), 1);
        assert_eq!(ks.render(oo), "o -> o");
    }

    #[test]
    fn second_order_example() {
        // (o -> o) -> o -> o: arity 2, order 2
        let mut ks = KindStore::new();
        let o = ks.ground();
        let oo = ks.arrow(o, o);
        let k = ks.arrow_chain(&[oo, o], o);
        assert_eq!(ks.arity(k), 2);
        assert_eq!(ks.order(k), 2);
        assert_eq!(ks.render(k), "(o -> o) -> o -> o");
        assert_eq!(ks.uncurry(k), vec![oo, o]);
    }

    #[test]
    fn right_association() {
        // o -> o -> o == o -> (o -> o)
        let mut ks = KindStore::new();
        let o = ks.ground();
        let oo = ks.arrow(o, o);
        let a = ks.arrow(o, oo);
        let b = ks.arrow_chain(&[o, o], o);
        assert_eq!(a, b);
        assert_eq!(ks.arity(a), 2);
        assert_eq!(ks.order(a), 1);
        assert_eq!(ks.render(a), "o -> o -> o");
    }

    #[test]
    fn interning_is_stable() {
        let mut ks = KindStore::new();
        let o = ks.ground();
        let a = ks.arrow(o, o);
        let b = ks.arrow(o, o);
        assert_eq!(a, b);
    }

    #[test]
    fn order_of_nested_left_argument() {
        // ((o -> o) -> o) -> o: order 3
        let mut ks = KindStore::new();
        let o = ks.ground();
        let oo = ks.arrow(o, o);
        let k2 = ks.arrow(oo, o);
        let k3 = ks.arrow(k2, o);
        assert_eq!(ks.order(k3), 3);
        assert_eq!(ks.arity(k3), 1);
        assert_eq!(ks.render(k3), "((o -> o) -> o) -> o");
    }
}
