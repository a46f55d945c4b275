//! Applicative terms over a scheme signature.
//!
//! Terms are hash-consed: structurally equal terms share one [`TermId`] within
//! a [`TermStore`]. Variables are de Bruijn indices (0 = innermost binder);
//! binder names from the source are kept only as display hints and never
//! affect term identity. Every term carries its kind, computed and checked at
//! construction.
//!
//! Substitution is deliberately restricted: replacements must be closed
//! terms. That is all OI rewriting ever needs, and it makes capture
//! impossible by construction.

use crate::kind::{KindId, KindNode, KindStore};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Index of a terminal symbol in the owning signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TerminalSym(pub u32);

/// Index of a non-terminal symbol in the owning signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonTerminalSym(pub u32);

/// Interned term handle, valid for the store that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermNode {
    Terminal(TerminalSym),
    NonTerminal(NonTerminalSym),
    /// De Bruijn variable; the kind is part of the identity.
    Var { index: u32, kind: KindId },
    App { func: TermId, arg: TermId },
    Lambda { arg_kind: KindId, body: TermId },
}

#[derive(Debug, Error)]
pub enum TermError {
    #[error("kind mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("cannot apply a term of ground kind")]
    NotAFunction,
    #[error("replacement for variable {index} is not closed")]
    OpenReplacement { index: u32 },
    #[error("expected {expected} replacements, got {got}")]
    ReplacementCount { expected: usize, got: usize },
    #[error("beta reduction requires a lambda")]
    NotALambda,
    #[error("symbol {0:?} was previously interned with a different kind")]
    InconsistentSymbolKind(String),
}

#[derive(Debug)]
struct TermData {
    node: TermNode,
    kind: KindId,
    /// Number of enclosing binders the term needs; 0 means closed.
    free_depth: u32,
    lambda_free: bool,
}

#[derive(Debug, Default)]
pub struct TermStore {
    terms: Vec<TermData>,
    by_node: HashMap<TermNode, TermId>,
    /// Display-only binder hints; first construction wins.
    hints: HashMap<TermId, String>,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, node: TermNode, kind: KindId, free_depth: u32, lambda_free: bool) -> TermId {
        if let Some(&id) = self.by_node.get(&node) {
            debug_assert_eq!(self.terms[id.index()].kind, kind);
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(TermData { node, kind, free_depth, lambda_free });
        self.by_node.insert(node, id);
        id
    }

    pub fn terminal(&mut self, sym: TerminalSym, kind: KindId) -> TermId {
        self.intern(TermNode::Terminal(sym), kind, 0, true)
    }

    pub fn nonterminal(&mut self, sym: NonTerminalSym, kind: KindId) -> TermId {
        self.intern(TermNode::NonTerminal(sym), kind, 0, true)
    }

    pub fn var(&mut self, index: u32, kind: KindId) -> TermId {
        self.intern(TermNode::Var { index, kind }, kind, index + 1, true)
    }

    pub fn app(&mut self, kinds: &KindStore, func: TermId, arg: TermId) -> Result<TermId, TermError> {
        let (fk, ak) = (self.kind_of(func), self.kind_of(arg));
        let KindNode::Arrow { arg: expected, result } = kinds.node(fk) else {
            return Err(TermError::NotAFunction);
        };
        if expected != ak {
            return Err(TermError::TypeMismatch {
                expected: kinds.render(expected),
                found: kinds.render(ak),
            });
        }
        let free_depth = self.free_depth(func).max(self.free_depth(arg));
        let lambda_free = self.is_lambda_free(func) && self.is_lambda_free(arg);
        Ok(self.intern(TermNode::App { func, arg }, result, free_depth, lambda_free))
    }

    pub fn app_chain(&mut self, kinds: &KindStore, head: TermId, args: &[TermId]) -> Result<TermId, TermError> {
        let mut acc = head;
        for &a in args {
            acc = self.app(kinds, acc, a)?;
        }
        Ok(acc)
    }

    pub fn lambda(&mut self, kinds: &mut KindStore, arg_kind: KindId, hint: &str, body: TermId) -> TermId {
        let kind = kinds.arrow(arg_kind, self.kind_of(body));
        let free_depth = self.free_depth(body).saturating_sub(1);
        let id = self.intern(TermNode::Lambda { arg_kind, body }, kind, free_depth, false);
        if !hint.is_empty() {
            self.hints.entry(id).or_insert_with(|| hint.to_string());
        }
        id
    }

    pub fn node(&self, id: TermId) -> TermNode {
        self.terms[id.index()].node
    }

    pub fn kind_of(&self, id: TermId) -> KindId {
        self.terms[id.index()].kind
    }

    /// 1 + the largest unbound de Bruijn index, or 0 for closed terms.
    pub fn free_depth(&self, id: TermId) -> u32 {
        self.terms[id.index()].free_depth
    }

    pub fn is_closed(&self, id: TermId) -> bool {
        self.free_depth(id) == 0
    }

    pub fn is_lambda_free(&self, id: TermId) -> bool {
        self.terms[id.index()].lambda_free
    }

    /// Head and argument list of an application spine.
    pub fn spine(&self, mut id: TermId) -> (TermId, Vec<TermId>) {
        let mut args = Vec::new();
        while let TermNode::App { func, arg } = self.node(id) {
            args.push(arg);
            id = func;
        }
        args.reverse();
        (id, args)
    }

    /// Substitute the `n` outermost-bound variables of `body` (a rule body
    /// stored with its binders stripped) by `replacements`, outermost binder
    /// first. All replacements must be closed and kind-correct.
    pub fn substitute(
        &mut self,
        kinds: &KindStore,
        body: TermId,
        replacements: &[TermId],
    ) -> Result<TermId, TermError> {
        let n = replacements.len();
        if self.free_depth(body) as usize > n {
            return Err(TermError::ReplacementCount {
                expected: self.free_depth(body) as usize,
                got: n,
            });
        }
        for (j, &r) in replacements.iter().enumerate() {
            if !self.is_closed(r) {
                return Err(TermError::OpenReplacement { index: j as u32 });
            }
        }
        let mut memo = HashMap::new();
        self.rewrite(kinds, body, 0, &mut memo, &mut |store, kinds, index, depth, kind| {
            // index >= depth: variable escapes local binders; the j-th binder
            // from the outside (0-based) is de Bruijn index n-1-j at depth 0.
            let outer = (index - depth) as usize;
            debug_assert!(outer < n, "free depth was checked above");
            let r = replacements[n - 1 - outer];
            let rk = store.kind_of(r);
            if rk != kind {
                return Err(TermError::TypeMismatch {
                    expected: kinds.render(kind),
                    found: kinds.render(rk),
                });
            }
            Ok(r)
        })
    }

    /// Contract `(\x. body) arg` for a closed, kind-correct `arg`.
    pub fn beta(&mut self, kinds: &KindStore, lam: TermId, arg: TermId) -> Result<TermId, TermError> {
        let TermNode::Lambda { arg_kind, body } = self.node(lam) else {
            return Err(TermError::NotALambda);
        };
        if !self.is_closed(arg) {
            return Err(TermError::OpenReplacement { index: 0 });
        }
        let ak = self.kind_of(arg);
        if ak != arg_kind {
            return Err(TermError::TypeMismatch {
                expected: kinds.render(arg_kind),
                found: kinds.render(ak),
            });
        }
        let mut memo = HashMap::new();
        self.rewrite(kinds, body, 0, &mut memo, &mut |store, _kinds, index, depth, kind| {
            Ok(if index == depth {
                arg
            } else {
                // a binder was consumed; shift the escaping index down
                store.var(index - 1, kind)
            })
        })
    }

    /// Rewrite free-variable occurrences. `on_free` receives (index, depth,
    /// kind) for every variable with `index >= depth` and returns the
    /// replacement term (valid at that depth).
    fn rewrite(
        &mut self,
        kinds: &KindStore,
        id: TermId,
        depth: u32,
        memo: &mut HashMap<(TermId, u32), TermId>,
        on_free: &mut dyn FnMut(&mut TermStore, &KindStore, u32, u32, KindId) -> Result<TermId, TermError>,
    ) -> Result<TermId, TermError> {
        if self.free_depth(id) <= depth {
            return Ok(id); // nothing free at this depth; share the subterm
        }
        if let Some(&r) = memo.get(&(id, depth)) {
            return Ok(r);
        }
        let result = match self.node(id) {
            TermNode::Var { index, kind } => {
                debug_assert!(index >= depth);
                on_free(self, kinds, index, depth, kind)?
            }
            TermNode::App { func, arg } => {
                let f = self.rewrite(kinds, func, depth, memo, on_free)?;
                let a = self.rewrite(kinds, arg, depth, memo, on_free)?;
                self.app(kinds, f, a)?
            }
            TermNode::Lambda { arg_kind, body } => {
                let b = self.rewrite(kinds, body, depth + 1, memo, on_free)?;
                let hint = self.hints.get(&id).cloned().unwrap_or_default();
                self.lambda_raw(kinds, arg_kind, &hint, b)
            }
            TermNode::Terminal(_) | TermNode::NonTerminal(_) => id,
        };
        memo.insert((id, depth), result);
        Ok(result)
    }

    /// Like [`Self::lambda`], but for rewriting contexts where the arrow kind
    /// is known to be interned already (rewriting preserves kinds).
    fn lambda_raw(&mut self, kinds: &KindStore, arg_kind: KindId, hint: &str, body: TermId) -> TermId {
        let kind = kinds
            .existing_arrow(arg_kind, self.kind_of(body))
            .expect("rewriting preserves kinds, so the arrow kind is interned");
        let free_depth = self.free_depth(body).saturating_sub(1);
        let id = self.intern(TermNode::Lambda { arg_kind, body }, kind, free_depth, false);
        if !hint.is_empty() {
            self.hints.entry(id).or_insert_with(|| hint.to_string());
        }
        id
    }

    /// Binder display hint, if the source provided one.
    pub fn hint(&self, id: TermId) -> Option<&str> {
        self.hints.get(&id).map(|s| s.as_str())
    }

    pub fn render(&self, kinds: &KindStore, id: TermId, names: &dyn SymbolNames) -> String {
        let mut out = String::new();
        let mut binders = Vec::new();
        self.render_into(kinds, id, names, &mut binders, false, &mut out);
        out
    }

    /// Render an open term whose free variables refer to the given binder
    /// names, listed outermost first.
    pub fn render_open(
        &self,
        kinds: &KindStore,
        id: TermId,
        names: &dyn SymbolNames,
        outer: &[String],
    ) -> String {
        let mut out = String::new();
        let mut binders = outer.to_vec();
        self.render_into(kinds, id, names, &mut binders, false, &mut out);
        out
    }

    fn render_into(
        &self,
        kinds: &KindStore,
        id: TermId,
        names: &dyn SymbolNames,
        binders: &mut Vec<String>,
        parenthesize: bool,
        out: &mut String,
    ) {
        match self.node(id) {
            TermNode::Terminal(sym) => out.push_str(names.terminal_name(sym)),
            TermNode::NonTerminal(sym) => out.push_str(names.nonterminal_name(sym)),
            TermNode::Var { index, .. } => {
                let i = index as usize;
                if i < binders.len() {
                    let name = binders[binders.len() - 1 - i].clone();
                    out.push_str(&name);
                } else {
                    // free variable; only reachable for internal terms
                    let _ = write!(out, "?{}", i - binders.len());
                }
            }
            TermNode::App { func, arg } => {
                if parenthesize {
                    out.push('(');
                }
                let func_parens = matches!(self.node(func), TermNode::Lambda { .. });
                self.render_into(kinds, func, names, binders, func_parens, out);
                out.push(' ');
                let arg_parens = matches!(
                    self.node(arg),
                    TermNode::App { .. } | TermNode::Lambda { .. }
                );
                self.render_into(kinds, arg, names, binders, arg_parens, out);
                if parenthesize {
                    out.push(')');
                }
            }
            TermNode::Lambda { arg_kind, body } => {
                if parenthesize {
                    out.push('(');
                }
                let name = self
                    .hint(id)
                    .map(str::to_string)
                    .unwrap_or_else(|| format!("v{}", binders.len()));
                out.push('\\');
                out.push_str(&name);
                out.push(':');
                if matches!(kinds.node(arg_kind), KindNode::Arrow { .. }) {
                    let _ = write!(out, "({})", kinds.render(arg_kind));
                } else {
                    out.push_str(&kinds.render(arg_kind));
                }
                out.push_str(". ");
                binders.push(name);
                self.render_into(kinds, body, names, binders, false, out);
                binders.pop();
                if parenthesize {
                    out.push(')');
                }
            }
        }
    }
}

/// Access to display names for the symbols a term mentions.
pub trait SymbolNames {
    fn terminal_name(&self, sym: TerminalSym) -> &str;
    fn nonterminal_name(&self, sym: NonTerminalSym) -> &str;
}
