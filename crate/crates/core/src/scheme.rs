//! Recursion schemes with owner annotations, their surface syntax, and the
//! rule-choice determinization that folds each non-terminal's rules into one
//! body under a fresh choice terminal.
//!
//! Surface form:
//!
//! ```text
//! terminal a : o -> o;
//! terminal end : o;          # the unique ground terminal
//! nonterminal S : o owner E;
//! start S;
//! rule S = H a end;
//! rule H = \f:(o -> o). \x:o. f (f x);
//! ```
//!
//! `#` starts a comment, application is juxtaposition (left-associative),
//! and every rule binds exactly the variables its non-terminal's kind
//! demands.

use crate::automaton::{AccClosure, LetterId, Nfa, NfaError, RawNfa};
use crate::kind::{KindId, KindStore};
use crate::term::{
    NonTerminalSym, SymbolNames, TermError, TermId, TermNode, TermStore, TerminalSym,
};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Which player resolves the choice at a non-terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Owner {
    E,
    A,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::E => "E",
            Owner::A => "A",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TerminalDecl {
    pub name: String,
    pub kind: KindId,
}

#[derive(Debug, Clone)]
pub struct NonTerminalDecl {
    pub name: String,
    pub kind: KindId,
    pub owner: Owner,
}

/// Symbol table shared by all terms of one scheme.
#[derive(Debug, Clone)]
pub struct Signature {
    pub terminals: Vec<TerminalDecl>,
    pub nonterminals: Vec<NonTerminalDecl>,
    /// The unique terminal of ground kind (the end-of-word marker).
    pub end: TerminalSym,
    /// The unary terminals in declaration order; index = [`LetterId`].
    pub letters: Vec<TerminalSym>,
    pub start: NonTerminalSym,
}

impl Signature {
    pub fn terminal_kind(&self, sym: TerminalSym) -> KindId {
        self.terminals[sym.0 as usize].kind
    }

    pub fn nonterminal_kind(&self, sym: NonTerminalSym) -> KindId {
        self.nonterminals[sym.0 as usize].kind
    }

    pub fn owner(&self, sym: NonTerminalSym) -> Owner {
        self.nonterminals[sym.0 as usize].owner
    }

    /// Letter index of a unary terminal, if it is one.
    pub fn letter_of(&self, sym: TerminalSym) -> Option<LetterId> {
        self.letters
            .iter()
            .position(|&s| s == sym)
            .map(|i| LetterId(i as u32))
    }

    pub fn letter_names(&self) -> Vec<String> {
        self.letters
            .iter()
            .map(|&s| self.terminals[s.0 as usize].name.clone())
            .collect()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminals.len()
    }
}

impl SymbolNames for Signature {
    fn terminal_name(&self, sym: TerminalSym) -> &str {
        &self.terminals[sym.0 as usize].name
    }

    fn nonterminal_name(&self, sym: NonTerminalSym) -> &str {
        &self.nonterminals[sym.0 as usize].name
    }
}

/// One rewrite rule, stored with binders stripped: the body's de Bruijn
/// variables refer to the binders, innermost = 0.
#[derive(Debug, Clone)]
pub struct Rule {
    pub binder_names: Vec<String>,
    pub binder_kinds: Vec<KindId>,
    pub body: TermId,
}

#[derive(Debug, Clone)]
pub struct Scheme {
    pub sig: Signature,
    /// Rules per non-terminal, in source order. Rule indices are 0-based.
    pub rules: Vec<Vec<Rule>>,
}

impl Scheme {
    pub fn rules_of(&self, nt: NonTerminalSym) -> &[Rule] {
        &self.rules[nt.0 as usize]
    }

    pub fn max_order(&self, kinds: &KindStore) -> u32 {
        self.sig
            .nonterminals
            .iter()
            .map(|d| kinds.order(d.kind))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate symbol name {0}")]
    DuplicateName(String),
    #[error("identifier {0} uses the reserved `op$` namespace")]
    ReservedName(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("no `start` declaration")]
    MissingStart,
    #[error("start symbol must have ground kind, found {0}")]
    StartNotGround(String),
    #[error("scheme is not word-generating: {0}")]
    NotWordGenerating(String),
    #[error("non-terminal {0} has no rules")]
    NoRules(String),
    #[error("rule for {nt}: expected {expected} binders matching its kind, found {found}")]
    BinderMismatch { nt: String, expected: usize, found: usize },
    #[error("rule for {nt}: binder {binder} must have kind {expected}, found {found}")]
    BinderKind { nt: String, binder: String, expected: String, found: String },
    #[error("rule for {nt}: body must be lambda-free after the leading binders")]
    InnerLambda { nt: String },
    #[error("rule for {nt}: body must have ground kind, found {found}")]
    BodyNotGround { nt: String, found: String },
    #[error("rule for {nt}: {source}")]
    Term { nt: String, source: TermError },
}

struct Token {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize_scheme(text: &str) -> Result<Vec<Token>, SchemeError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut chars = line.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            let col = i + 1;
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c.is_alphanumeric() || c == '_' || c == '$' {
                let mut tok = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '$' || c == '\'' {
                        tok.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token { text: tok, line: ln + 1, col });
                continue;
            }
            match c {
                ';' | ':' | '=' | '.' | '\\' | '(' | ')' => {
                    chars.next();
                    out.push(Token { text: c.to_string(), line: ln + 1, col });
                }
                '-' => {
                    chars.next();
                    match chars.peek() {
                        Some(&(_, '>')) => {
                            chars.next();
                            out.push(Token { text: "->".into(), line: ln + 1, col });
                        }
                        _ => {
                            return Err(SchemeError::Syntax {
                                line: ln + 1,
                                col,
                                msg: "expected `->`".into(),
                            })
                        }
                    }
                }
                other => {
                    return Err(SchemeError::Syntax {
                        line: ln + 1,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    kinds: &'a mut KindStore,
    terms: &'a mut TermStore,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn next(&mut self, what: &str) -> Result<(String, usize, usize), SchemeError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| {
            let (line, col) = self
                .tokens
                .last()
                .map(|t| (t.line, t.col + t.text.len()))
                .unwrap_or((1, 1));
            SchemeError::Syntax { line, col, msg: format!("expected {what}, found end of input") }
        })?;
        self.pos += 1;
        Ok((t.text.clone(), t.line, t.col))
    }

    fn expect(&mut self, text: &str) -> Result<(), SchemeError> {
        let (tok, line, col) = self.next(&format!("`{text}`"))?;
        if tok == text {
            Ok(())
        } else {
            Err(SchemeError::Syntax {
                line,
                col,
                msg: format!("expected `{text}`, found `{tok}`"),
            })
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize), SchemeError> {
        let (tok, line, col) = self.next(what)?;
        let first = tok.chars().next().unwrap_or(' ');
        if first.is_alphabetic() || first == '_' {
            Ok((tok, line, col))
        } else {
            Err(SchemeError::Syntax {
                line,
                col,
                msg: format!("expected {what}, found `{tok}`"),
            })
        }
    }

    fn kind(&mut self) -> Result<KindId, SchemeError> {
        let lhs = self.kind_atom()?;
        if self.at("->") {
            self.pos += 1;
            let rhs = self.kind()?;
            Ok(self.kinds.arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn kind_atom(&mut self) -> Result<KindId, SchemeError> {
        let (tok, line, col) = self.next("a kind")?;
        match tok.as_str() {
            "o" => Ok(self.kinds.ground()),
            "(" => {
                let k = self.kind()?;
                self.expect(")")?;
                Ok(k)
            }
            other => Err(SchemeError::Syntax {
                line,
                col,
                msg: format!("expected a kind, found `{other}`"),
            }),
        }
    }
}

struct ScopeEntry {
    name: String,
    kind: KindId,
}

impl<'a> Parser<'a> {
    /// term := lambda | application of atoms
    fn term(&mut self, sig: &SigBuilder, scope: &mut Vec<ScopeEntry>) -> Result<TermId, SchemeError> {
        if self.at("\\") {
            self.pos += 1;
            let (name, _, _) = self.ident("a binder name")?;
            self.expect(":")?;
            let kind = self.kind()?;
            self.expect(".")?;
            scope.push(ScopeEntry { name: name.clone(), kind });
            let body = self.term(sig, scope)?;
            scope.pop();
            return Ok(self.terms.lambda(self.kinds, kind, &name, body));
        }
        let mut acc = self.term_atom(sig, scope)?;
        while self.peek().is_some_and(|t| {
            t.text == "("
                || t.text
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_alphabetic() || c == '_')
        }) {
            let arg = self.term_atom(sig, scope)?;
            let t = &self.tokens[self.pos - 1];
            let (line, col) = (t.line, t.col);
            acc = self.terms.app(self.kinds, acc, arg).map_err(|e| SchemeError::Syntax {
                line,
                col,
                msg: e.to_string(),
            })?;
        }
        Ok(acc)
    }

    fn term_atom(&mut self, sig: &SigBuilder, scope: &mut Vec<ScopeEntry>) -> Result<TermId, SchemeError> {
        if self.at("(") {
            self.pos += 1;
            let t = self.term(sig, scope)?;
            self.expect(")")?;
            return Ok(t);
        }
        let (name, line, col) = self.ident("a term")?;
        // innermost binder first
        if let Some(i) = scope.iter().rev().position(|e| e.name == name) {
            let kind = scope[scope.len() - 1 - i].kind;
            return Ok(self.terms.var(i as u32, kind));
        }
        if let Some(&sym) = sig.terminal_index.get(&name) {
            let kind = sig.terminals[sym.0 as usize].kind;
            return Ok(self.terms.terminal(sym, kind));
        }
        if let Some(&sym) = sig.nonterminal_index.get(&name) {
            let kind = sig.nonterminals[sym.0 as usize].kind;
            return Ok(self.terms.nonterminal(sym, kind));
        }
        Err(SchemeError::Syntax {
            line,
            col,
            msg: format!("unknown symbol `{name}`"),
        })
    }
}

#[derive(Default)]
struct SigBuilder {
    terminals: Vec<TerminalDecl>,
    nonterminals: Vec<NonTerminalDecl>,
    terminal_index: HashMap<String, TerminalSym>,
    nonterminal_index: HashMap<String, NonTerminalSym>,
}

/// Parse and validate a scheme. Validation enforces the word-generating
/// shape: exactly one terminal of ground kind, all others of kind `o -> o`.
pub fn parse_scheme(
    text: &str,
    kinds: &mut KindStore,
    terms: &mut TermStore,
) -> Result<Scheme, SchemeError> {
    let tokens = tokenize_scheme(text)?;
    let mut p = Parser { tokens, pos: 0, kinds, terms };
    let mut sig = SigBuilder::default();
    let mut start: Option<NonTerminalSym> = None;
    let mut raw_rules: Vec<(NonTerminalSym, TermId, usize, usize)> = Vec::new();

    while p.peek().is_some() {
        let (decl_kw, line, col) = p.next("a declaration")?;
        match decl_kw.as_str() {
            "terminal" => {
                let (name, _, _) = p.ident("a terminal name")?;
                check_fresh(&sig, &name)?;
                p.expect(":")?;
                let kind = p.kind()?;
                p.expect(";")?;
                let sym = TerminalSym(sig.terminals.len() as u32);
                sig.terminal_index.insert(name.clone(), sym);
                sig.terminals.push(TerminalDecl { name, kind });
            }
            "nonterminal" => {
                let (name, _, _) = p.ident("a non-terminal name")?;
                check_fresh(&sig, &name)?;
                p.expect(":")?;
                let kind = p.kind()?;
                let (owner_kw, oline, ocol) = p.next("`owner`")?;
                if owner_kw != "owner" {
                    return Err(SchemeError::Syntax {
                        line: oline,
                        col: ocol,
                        msg: format!("expected `owner`, found `{owner_kw}`"),
                    });
                }
                let (player, pline, pcol) = p.ident("`E` or `A`")?;
                let owner = match player.as_str() {
                    "E" => Owner::E,
                    "A" => Owner::A,
                    other => {
                        return Err(SchemeError::Syntax {
                            line: pline,
                            col: pcol,
                            msg: format!("expected `E` or `A`, found `{other}`"),
                        })
                    }
                };
                p.expect(";")?;
                let sym = NonTerminalSym(sig.nonterminals.len() as u32);
                sig.nonterminal_index.insert(name.clone(), sym);
                sig.nonterminals.push(NonTerminalDecl { name, kind, owner });
            }
            "start" => {
                let (name, nline, ncol) = p.ident("a non-terminal name")?;
                p.expect(";")?;
                if start.is_some() {
                    return Err(SchemeError::Syntax {
                        line: nline,
                        col: ncol,
                        msg: "duplicate `start` declaration".into(),
                    });
                }
                let sym = *sig.nonterminal_index.get(&name).ok_or(SchemeError::UnknownSymbol(name))?;
                start = Some(sym);
            }
            "rule" => {
                let (name, nline, ncol) = p.ident("a non-terminal name")?;
                p.expect("=")?;
                let sym = *sig
                    .nonterminal_index
                    .get(&name)
                    .ok_or(SchemeError::UnknownSymbol(name))?;
                let mut scope = Vec::new();
                let term = p.term(&sig, &mut scope)?;
                p.expect(";")?;
                raw_rules.push((sym, term, nline, ncol));
            }
            other => {
                return Err(SchemeError::Syntax {
                    line,
                    col,
                    msg: format!("unknown declaration `{other}`"),
                });
            }
        }
    }

    finish_scheme(p.kinds, p.terms, sig, start, raw_rules)
}

fn check_fresh(sig: &SigBuilder, name: &str) -> Result<(), SchemeError> {
    if name.contains('$') {
        return Err(SchemeError::ReservedName(name.to_string()));
    }
    if sig.terminal_index.contains_key(name) || sig.nonterminal_index.contains_key(name) {
        return Err(SchemeError::DuplicateName(name.to_string()));
    }
    Ok(())
}

fn finish_scheme(
    kinds: &KindStore,
    terms: &TermStore,
    sig: SigBuilder,
    start: Option<NonTerminalSym>,
    raw_rules: Vec<(NonTerminalSym, TermId, usize, usize)>,
) -> Result<Scheme, SchemeError> {
    let start = start.ok_or(SchemeError::MissingStart)?;

    // word-generating shape: one ground terminal, the rest unary letters
    let mut end = None;
    let mut letters = Vec::new();
    let o = kinds.ground();
    let oo = kinds.existing_arrow(o, o);
    for (i, decl) in sig.terminals.iter().enumerate() {
        let sym = TerminalSym(i as u32);
        if decl.kind == o {
            if end.replace(sym).is_some() {
                return Err(SchemeError::NotWordGenerating(
                    "more than one terminal of ground kind".into(),
                ));
            }
        } else if Some(decl.kind) == oo {
            letters.push(sym);
        } else {
            return Err(SchemeError::NotWordGenerating(format!(
                "terminal {} has kind {}, only `o` and `o -> o` are allowed",
                decl.name,
                kinds.render(decl.kind)
            )));
        }
    }
    let Some(end) = end else {
        return Err(SchemeError::NotWordGenerating(
            "no terminal of ground kind".into(),
        ));
    };

    let start_kind = sig.nonterminals[start.0 as usize].kind;
    if start_kind != o {
        return Err(SchemeError::StartNotGround(kinds.render(start_kind)));
    }

    // decompose rules into binders + lambda-free ground body
    let mut rules: Vec<Vec<Rule>> = vec![Vec::new(); sig.nonterminals.len()];
    for (nt, term, _, _) in raw_rules {
        let decl = &sig.nonterminals[nt.0 as usize];
        let expected = kinds.uncurry(decl.kind);
        let mut binder_names = Vec::new();
        let mut cursor = term;
        while let TermNode::Lambda { arg_kind, body } = terms.node(cursor) {
            if binder_names.len() == expected.len() {
                break; // extra binder; caught below by the kind check
            }
            let i = binder_names.len();
            if arg_kind != expected[i] {
                return Err(SchemeError::BinderKind {
                    nt: decl.name.clone(),
                    binder: terms.hint(cursor).unwrap_or("_").to_string(),
                    expected: kinds.render(expected[i]),
                    found: kinds.render(arg_kind),
                });
            }
            binder_names.push(terms.hint(cursor).unwrap_or("_").to_string());
            cursor = body;
        }
        if binder_names.len() != expected.len() {
            return Err(SchemeError::BinderMismatch {
                nt: decl.name.clone(),
                expected: expected.len(),
                found: binder_names.len(),
            });
        }
        if !terms.is_lambda_free(cursor) {
            return Err(SchemeError::InnerLambda { nt: decl.name.clone() });
        }
        let body_kind = terms.kind_of(cursor);
        if body_kind != o {
            return Err(SchemeError::BodyNotGround {
                nt: decl.name.clone(),
                found: kinds.render(body_kind),
            });
        }
        debug_assert!(terms.free_depth(cursor) as usize <= expected.len());
        rules[nt.0 as usize].push(Rule {
            binder_names,
            binder_kinds: expected,
            body: cursor,
        });
    }

    for (i, rs) in rules.iter().enumerate() {
        if rs.is_empty() {
            return Err(SchemeError::NoRules(sig.nonterminals[i].name.clone()));
        }
    }

    Ok(Scheme {
        sig: Signature {
            terminals: sig.terminals,
            nonterminals: sig.nonterminals,
            end,
            letters,
            start,
        },
        rules,
    })
}

/// Print a scheme in its surface syntax. `parse(print(s))` reproduces `s`.
pub fn print_scheme(scheme: &Scheme, kinds: &KindStore, terms: &TermStore) -> String {
    let mut out = String::new();
    for decl in &scheme.sig.terminals {
        out.push_str(&format!("terminal {} : {};\n", decl.name, kinds.render(decl.kind)));
    }
    for decl in &scheme.sig.nonterminals {
        out.push_str(&format!(
            "nonterminal {} : {} owner {};\n",
            decl.name,
            kinds.render(decl.kind),
            decl.owner
        ));
    }
    out.push_str(&format!(
        "start {};\n",
        scheme.sig.nonterminals[scheme.sig.start.0 as usize].name
    ));
    for (i, rs) in scheme.rules.iter().enumerate() {
        let nt = &scheme.sig.nonterminals[i].name;
        for rule in rs {
            out.push_str(&format!("rule {nt} = {};\n", render_rule(scheme, kinds, terms, rule)));
        }
    }
    out
}

fn render_rule(scheme: &Scheme, kinds: &KindStore, terms: &TermStore, rule: &Rule) -> String {
    let mut out = String::new();
    for (name, &kind) in rule.binder_names.iter().zip(&rule.binder_kinds) {
        let rendered = kinds.render(kind);
        if kinds.arity(kind) > 0 {
            out.push_str(&format!("\\{name}:({rendered}). "));
        } else {
            out.push_str(&format!("\\{name}:{rendered}. "));
        }
    }
    out.push_str(&terms.render_open(kinds, rule.body, &scheme.sig, &rule.binder_names));
    out
}

/// Determinized scheme: every non-terminal has exactly one rule whose body
/// applies a fresh choice terminal `op$F` to the original rule bodies in
/// source order.
#[derive(Debug, Clone)]
pub struct DetScheme {
    pub scheme: Scheme,
    /// Choice terminal per non-terminal.
    pub op_of: Vec<TerminalSym>,
    /// Original rule count per non-terminal.
    pub rule_count: Vec<usize>,
}

impl DetScheme {
    pub fn rule_body(&self, nt: NonTerminalSym) -> &Rule {
        &self.scheme.rules[nt.0 as usize][0]
    }
}

/// Fold rule choice into choice terminals. Rule order is preserved, so the
/// i-th argument of `op$F` is the body of F's i-th rule; single-rule
/// non-terminals still get a unary choice terminal.
pub fn determinize(
    scheme: &Scheme,
    kinds: &mut KindStore,
    terms: &mut TermStore,
) -> Result<DetScheme, TermError> {
    let mut terminals = scheme.sig.terminals.clone();
    let mut op_of = Vec::new();
    let mut rule_count = Vec::new();
    let o = kinds.ground();

    for (i, decl) in scheme.sig.nonterminals.iter().enumerate() {
        let l = scheme.rules[i].len();
        let kind = kinds.arrow_chain(&vec![o; l], o);
        let sym = TerminalSym(terminals.len() as u32);
        terminals.push(TerminalDecl {
            name: format!("op${}", decl.name),
            kind,
        });
        op_of.push(sym);
        rule_count.push(l);
    }

    let mut rules = Vec::with_capacity(scheme.rules.len());
    for (i, rs) in scheme.rules.iter().enumerate() {
        let op_sym = op_of[i];
        let op_kind = terminals[op_sym.0 as usize].kind;
        let op = terms.terminal(op_sym, op_kind);
        let bodies: Vec<TermId> = rs.iter().map(|r| r.body).collect();
        let body = terms.app_chain(kinds, op, &bodies)?;
        rules.push(vec![Rule {
            binder_names: rs[0].binder_names.clone(),
            binder_kinds: rs[0].binder_kinds.clone(),
            body,
        }]);
    }

    Ok(DetScheme {
        scheme: Scheme {
            sig: Signature {
                terminals,
                nonterminals: scheme.sig.nonterminals.clone(),
                end: scheme.sig.end,
                letters: scheme.sig.letters.clone(),
                start: scheme.sig.start,
            },
            rules,
        },
        op_of,
        rule_count,
    })
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("scheme: {0}")]
    Scheme(#[from] SchemeError),
    #[error("automaton: {0}")]
    Nfa(#[from] NfaError),
    #[error("determinization: {0}")]
    Term(#[from] TermError),
}

/// A fully assembled game: parsed scheme, its determinization, and the
/// automaton bound to the scheme's letter alphabet.
pub struct Instance {
    pub kinds: RefCell<KindStore>,
    pub terms: RefCell<TermStore>,
    pub scheme: Scheme,
    pub det: DetScheme,
    pub nfa: Nfa,
    pub closure: AccClosure,
}

impl Instance {
    pub fn parse(scheme_text: &str, nfa_text: &str) -> Result<Instance, InstanceError> {
        let mut kinds = KindStore::new();
        let mut terms = TermStore::new();
        let scheme = parse_scheme(scheme_text, &mut kinds, &mut terms)?;
        let raw = crate::automaton::parse_nfa(nfa_text)?;
        Self::assemble(kinds, terms, scheme, &raw)
    }

    pub fn assemble(
        mut kinds: KindStore,
        mut terms: TermStore,
        scheme: Scheme,
        raw_nfa: &RawNfa,
    ) -> Result<Instance, InstanceError> {
        let det = determinize(&scheme, &mut kinds, &mut terms)?;
        let nfa = Nfa::bind(raw_nfa, &scheme.sig.letter_names())?;
        let closure = nfa.acc_closure();
        Ok(Instance {
            kinds: RefCell::new(kinds),
            terms: RefCell::new(terms),
            scheme,
            det,
            nfa,
            closure,
        })
    }

    /// The start symbol as a ground term.
    pub fn start_term(&self) -> TermId {
        let sym = self.scheme.sig.start;
        let kind = self.scheme.sig.nonterminal_kind(sym);
        self.terms.borrow_mut().nonterminal(sym, kind)
    }
}
