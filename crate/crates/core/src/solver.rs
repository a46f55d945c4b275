//! Greatest-fixpoint solver over the finite value domains.
//!
//! The fixpoint is computed demand-driven: a variable is a non-terminal
//! together with a tuple of canonical argument values, and only variables
//! reachable from the start symbol are ever touched. Iteration is round-based
//! Kleene descent from the optimistic top assignment; a round recomputes every
//! known variable against the previous round's assignment, and the solver is
//! stable once a round changes nothing and demands nothing new. Stability of
//! the demanded subsystem pins the greatest fixpoint on it, because every
//! lookup of an unknown variable is initialised to top and later driven down
//! monotonically.
//!
//! Arguments are canonical by construction: ground arguments are formulas,
//! function arguments are tables over enumerated domains. Only domains that
//! are actually needed for tabulation are enumerated, so schemes that never
//! pass functions around never pay for enumeration at all; schemes whose
//! argument domains exceed the cap are refused via [`DomainError::TooLarge`].

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::LetterId;
use crate::domain::{
    apply_value, top_value, DomainError, Domains, Model, ModelKind, ValueId, ValueStore,
};
use crate::formula::{FormulaId, FormulaStore};
use crate::kind::KindId;
use crate::scheme::{Instance, Owner};
use crate::term::{NonTerminalSym, TermId, TermNode};

pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("no stable solution within {max_iters} iterations")]
    IterationBudget { max_iters: usize },
}

/// Explicit assignment of a canonical value to every non-terminal.
#[derive(Debug, Clone, Default)]
pub struct Valuation(pub HashMap<NonTerminalSym, ValueId>);

type VarKey = (NonTerminalSym, Box<[ValueId]>);

#[derive(Clone, Copy)]
enum Mode<'v> {
    /// Non-terminal applications resolve against the current fixpoint
    /// assignment, demanding new variables optimistically at top.
    Fixpoint,
    /// Non-terminals resolve against an explicit valuation; nothing is
    /// demanded.
    Explicit(&'v Valuation),
}

pub struct Solver<'a> {
    inst: &'a Instance,
    pub model: Model,
    pub values: ValueStore,
    pub domains: Domains,
    max_iters: usize,
    ground_kind: KindId,
    /// Choice terminal back to the non-terminal it folds.
    op_nt: HashMap<crate::term::TerminalSym, NonTerminalSym>,
    /// Current assignment over all demanded variables.
    vars: HashMap<VarKey, FormulaId>,
    /// Demand order; recomputation sweeps it deterministically.
    order: Vec<VarKey>,
    /// Previous-round snapshot; reads go through it while a round runs.
    prev: Option<HashMap<VarKey, FormulaId>>,
    iterations: usize,
    stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonTerminalReport {
    pub name: String,
    pub kind: String,
    pub owner: Owner,
    pub rules: usize,
    /// Solution formula for ground-kind non-terminals; function-kind
    /// non-terminals are summarised by their demanded instances instead.
    pub formula: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainReport {
    pub kind: String,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub model: ModelKind,
    pub winner: Owner,
    pub iterations: usize,
    pub stable: bool,
    pub start_formula: String,
    pub nonterminals: Vec<NonTerminalReport>,
    /// Number of demanded fixpoint variables.
    pub support: usize,
    pub domains: Vec<DomainReport>,
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a Instance, which: ModelKind, cap: usize, max_iters: usize) -> Solver<'a> {
        let model = Model::build(inst, which);
        let op_nt = inst
            .det
            .op_of
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, NonTerminalSym(i as u32)))
            .collect();
        let ground_kind = inst.kinds.borrow().ground();
        Solver {
            inst,
            model,
            values: ValueStore::new(),
            domains: Domains::new(cap),
            max_iters,
            ground_kind,
            op_nt,
            vars: HashMap::new(),
            order: Vec::new(),
            prev: None,
            iterations: 0,
            stable: false,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    /// Look a variable up, optimistically seeding unknown ones at top.
    fn demand(&mut self, nt: NonTerminalSym, args: Box<[ValueId]>) -> FormulaId {
        let key = (nt, args);
        if let Some(p) = &self.prev {
            if let Some(&f) = p.get(&key) {
                return f;
            }
        } else if let Some(&f) = self.vars.get(&key) {
            return f;
        }
        let top = self.model.formulas.tru();
        self.vars.insert(key.clone(), top);
        if let Some(p) = &mut self.prev {
            p.insert(key.clone(), top);
        }
        self.order.push(key);
        top
    }

    fn enumerate_elems(&mut self, kind: KindId) -> Result<Vec<ValueId>, SolverError> {
        let kinds = self.inst.kinds.borrow();
        let data = self
            .domains
            .enumerate(&kinds, &mut self.model, &mut self.values, kind)?;
        Ok(data.elems.clone())
    }

    /// Evaluate a term under an environment of canonical values for its free
    /// variables (outermost binder first).
    fn eval_in(&mut self, term: TermId, env: &[ValueId], mode: Mode<'_>) -> Result<ValueId, SolverError> {
        let (head, arg_terms) = self.inst.terms.borrow().spine(term);
        let head_node = self.inst.terms.borrow().node(head);
        let mut vals = Vec::with_capacity(arg_terms.len());
        for &t in &arg_terms {
            vals.push(self.eval_in(t, env, mode)?);
        }
        match head_node {
            TermNode::Var { index, .. } => {
                let base = env[env.len() - 1 - index as usize];
                Ok(self.apply_all(base, &vals))
            }
            TermNode::Terminal(sym) => {
                let sig = &self.inst.det.scheme.sig;
                if sym == sig.end {
                    debug_assert!(vals.is_empty());
                    let f = self.model.end_formula;
                    Ok(self.values.ground(f, self.ground_kind))
                } else if let Some(l) = sig.letter_of(sym) {
                    match vals.len() {
                        1 => {
                            let f = self.values.as_ground(vals[0]);
                            let img = self.model.letter_image(l, f);
                            Ok(self.values.ground(img, self.ground_kind))
                        }
                        0 => self.letter_table(sym, l),
                        _ => unreachable!("letters are unary"),
                    }
                } else {
                    let nt = self.op_nt[&sym];
                    debug_assert_eq!(vals.len(), self.inst.det.rule_count[nt.0 as usize]);
                    let fids: Vec<FormulaId> =
                        vals.iter().map(|&v| self.values.as_ground(v)).collect();
                    let owner = sig.owner(nt);
                    let f = self.model.choice_formula(owner, &fids);
                    Ok(self.values.ground(f, self.ground_kind))
                }
            }
            TermNode::NonTerminal(g) => {
                let kind = self.inst.det.scheme.sig.nonterminal_kind(g);
                let arg_kinds = self.inst.kinds.borrow().uncurry(kind);
                match mode {
                    Mode::Fixpoint => {
                        if vals.len() == arg_kinds.len() {
                            let f = self.demand(g, vals.into());
                            Ok(self.values.ground(f, self.ground_kind))
                        } else {
                            let rest = arg_kinds[vals.len()..].to_vec();
                            self.tabulate_nt(g, vals, &rest)
                        }
                    }
                    Mode::Explicit(valn) => {
                        let base = *valn
                            .0
                            .get(&g)
                            .expect("valuation must bind every non-terminal");
                        Ok(self.apply_all(base, &vals))
                    }
                }
            }
            TermNode::Lambda { arg_kind, body } => {
                let kind = self.inst.terms.borrow().kind_of(head);
                let elems = self.enumerate_elems(arg_kind)?;
                let mut entries = Vec::with_capacity(elems.len());
                let mut env2 = env.to_vec();
                for e in elems {
                    env2.push(e);
                    entries.push(self.eval_in(body, &env2, mode)?);
                    env2.pop();
                }
                let table = self.values.table(arg_kind, entries.into(), kind);
                Ok(self.apply_all(table, &vals))
            }
            TermNode::App { .. } => unreachable!("spine heads are not applications"),
        }
    }

    fn apply_all(&self, mut f: ValueId, args: &[ValueId]) -> ValueId {
        for &a in args {
            f = apply_value(&self.values, &self.domains, f, a);
        }
        f
    }

    /// A bare letter used as a function argument: its interpretation as a
    /// table over the ground domain.
    fn letter_table(&mut self, sym: crate::term::TerminalSym, l: LetterId) -> Result<ValueId, SolverError> {
        let kind = self.inst.det.scheme.sig.terminal_kind(sym);
        let elems = self.enumerate_elems(self.ground_kind)?;
        let mut entries = Vec::with_capacity(elems.len());
        for e in elems {
            let f = self.values.as_ground(e);
            let img = self.model.letter_image(l, f);
            entries.push(self.values.ground(img, self.ground_kind));
        }
        Ok(self.values.table(self.ground_kind, entries.into(), kind))
    }

    /// Canonicalise a partial application of a non-terminal by tabulating the
    /// remaining arguments over their enumerated domains.
    fn tabulate_nt(
        &mut self,
        g: NonTerminalSym,
        given: Vec<ValueId>,
        remaining: &[KindId],
    ) -> Result<ValueId, SolverError> {
        if remaining.is_empty() {
            let f = self.demand(g, given.into());
            return Ok(self.values.ground(f, self.ground_kind));
        }
        let arg_kind = remaining[0];
        let elems = self.enumerate_elems(arg_kind)?;
        let mut entries = Vec::with_capacity(elems.len());
        for e in elems {
            let mut next = given.clone();
            next.push(e);
            entries.push(self.tabulate_nt(g, next, &remaining[1..])?);
        }
        let kind = self
            .inst
            .kinds
            .borrow_mut()
            .arrow_chain(remaining, self.ground_kind);
        Ok(self.values.table(arg_kind, entries.into(), kind))
    }

    /// Recompute one variable's right-hand side against the snapshot.
    fn recompute(&mut self, nt: NonTerminalSym, args: &[ValueId]) -> Result<FormulaId, SolverError> {
        let body = self.inst.det.rule_body(nt).body;
        let v = self.eval_in(body, args, Mode::Fixpoint)?;
        Ok(self.values.as_ground(v))
    }

    /// One Kleene round: recompute every variable known at round start
    /// against the previous assignment. Returns (changed, grew).
    fn round(&mut self) -> Result<(bool, bool), SolverError> {
        let snapshot = self.order.len();
        self.prev = Some(self.vars.clone());
        let mut changed = false;
        for idx in 0..snapshot {
            let (nt, args) = self.order[idx].clone();
            let new = self.recompute(nt, &args)?;
            let key = (nt, args);
            let old = self.vars[&key];
            assert!(
                self.model.formulas.implies(new, old),
                "fixpoint iteration must descend"
            );
            if new != old {
                self.vars.insert(key, new);
                changed = true;
            }
        }
        self.prev = None;
        Ok((changed, self.order.len() > snapshot))
    }

    fn ensure_stable(&mut self) -> Result<(), SolverError> {
        while !self.stable {
            if self.iterations >= self.max_iters {
                return Err(SolverError::IterationBudget {
                    max_iters: self.max_iters,
                });
            }
            self.iterations += 1;
            let (changed, grew) = self.round()?;
            if !changed && !grew {
                self.stable = true;
            }
        }
        Ok(())
    }

    /// Solve from the start symbol and report the outcome. Idempotent: a
    /// second call reuses the stable assignment.
    pub fn solve(&mut self) -> Result<SolveReport, SolverError> {
        let start = self.inst.scheme.sig.start;
        self.demand(start, Box::new([]));
        self.ensure_stable()?;

        let mut nonterminals = Vec::new();
        for i in 0..self.inst.scheme.sig.nonterminal_count() {
            let sym = NonTerminalSym(i as u32);
            let kind = self.inst.scheme.sig.nonterminal_kind(sym);
            let formula = if self.inst.kinds.borrow().is_ground(kind) {
                let f = self.solution_at(sym, &[])?;
                Some(self.model.formulas.render(f))
            } else {
                None
            };
            let decl = &self.inst.scheme.sig.nonterminals[i];
            nonterminals.push(NonTerminalReport {
                name: decl.name.clone(),
                kind: self.inst.kinds.borrow().render(kind),
                owner: decl.owner,
                rules: self.inst.det.rule_count[i],
                formula,
            });
        }

        let f = self.solution_at(start, &[])?;
        let winner = if self.model.winner_is_e(f) {
            Owner::E
        } else {
            Owner::A
        };
        let domains = self
            .domains
            .report(&self.inst.kinds.borrow())
            .into_iter()
            .map(|(kind, size)| DomainReport { kind, size })
            .collect();
        Ok(SolveReport {
            model: self.model.which,
            winner,
            iterations: self.iterations,
            stable: self.stable,
            start_formula: self.model.formulas.render(f),
            nonterminals,
            support: self.vars.len(),
            domains,
        })
    }

    pub fn winner(&mut self) -> Result<Owner, SolverError> {
        let start = self.inst.scheme.sig.start;
        let f = self.solution_at(start, &[])?;
        Ok(if self.model.winner_is_e(f) {
            Owner::E
        } else {
            Owner::A
        })
    }

    /// Solution value of one fixpoint variable, demanding and re-stabilising
    /// if it was not part of the solved system yet.
    pub fn solution_at(
        &mut self,
        nt: NonTerminalSym,
        args: &[ValueId],
    ) -> Result<FormulaId, SolverError> {
        let key = (nt, Box::from(args));
        if !self.vars.contains_key(&key) {
            self.demand(nt, Box::from(args));
            self.stable = false;
            self.ensure_stable()?;
        }
        Ok(self.vars[&key])
    }

    /// Evaluate a closed term against the solution, extending the solved
    /// system on demand until the result is stable.
    pub fn eval_settled(&mut self, term: TermId) -> Result<ValueId, SolverError> {
        loop {
            let before = self.order.len();
            let v = self.eval_in(term, &[], Mode::Fixpoint)?;
            if self.order.len() == before {
                return Ok(v);
            }
            self.stable = false;
            self.ensure_stable()?;
        }
    }

    pub fn eval_on_solution(&mut self, term: TermId) -> Result<FormulaId, SolverError> {
        let v = self.eval_settled(term)?;
        Ok(self.values.as_ground(v))
    }

    /// Evaluate a term under an explicit valuation. The valuation's values
    /// must be canonical (tables over enumerated domains).
    pub fn eval_term(
        &mut self,
        term: TermId,
        env: &[ValueId],
        valn: &Valuation,
    ) -> Result<ValueId, SolverError> {
        self.eval_in(term, env, Mode::Explicit(valn))
    }

    /// The valuation assigning top to every non-terminal.
    pub fn top_valuation(&mut self) -> Result<Valuation, SolverError> {
        let mut map = HashMap::new();
        for i in 0..self.inst.scheme.sig.nonterminal_count() {
            let sym = NonTerminalSym(i as u32);
            let kind = self.inst.scheme.sig.nonterminal_kind(sym);
            let kinds = self.inst.kinds.borrow();
            let v = top_value(&kinds, &mut self.model, &mut self.values, &mut self.domains, kind)?;
            drop(kinds);
            map.insert(sym, v);
        }
        Ok(Valuation(map))
    }

    /// One simultaneous rewrite step: evaluate every non-terminal's
    /// determinised body under the given valuation.
    pub fn rhs_step(&mut self, valn: &Valuation) -> Result<Valuation, SolverError> {
        let mut map = HashMap::new();
        for i in 0..self.inst.scheme.sig.nonterminal_count() {
            let sym = NonTerminalSym(i as u32);
            let rule = self.inst.det.rule_body(sym);
            let binder_kinds = rule.binder_kinds.clone();
            let body = rule.body;
            let mut env = Vec::new();
            let v = self.tabulate_explicit(body, &binder_kinds, &mut env, valn)?;
            map.insert(sym, v);
        }
        Ok(Valuation(map))
    }

    fn tabulate_explicit(
        &mut self,
        body: TermId,
        remaining: &[KindId],
        env: &mut Vec<ValueId>,
        valn: &Valuation,
    ) -> Result<ValueId, SolverError> {
        if remaining.is_empty() {
            return self.eval_in(body, env, Mode::Explicit(valn));
        }
        let arg_kind = remaining[0];
        let elems = self.enumerate_elems(arg_kind)?;
        let mut entries = Vec::with_capacity(elems.len());
        for e in elems {
            env.push(e);
            entries.push(self.tabulate_explicit(body, &remaining[1..], env, valn)?);
            env.pop();
        }
        let kind = self
            .inst
            .kinds
            .borrow_mut()
            .arrow_chain(remaining, self.ground_kind);
        Ok(self.values.table(arg_kind, entries.into(), kind))
    }

    /// Materialise the solution as an explicit valuation, tabulating every
    /// non-terminal over its full argument domains.
    pub fn materialize_solution(&mut self) -> Result<Valuation, SolverError> {
        let mut map = HashMap::new();
        for i in 0..self.inst.scheme.sig.nonterminal_count() {
            let sym = NonTerminalSym(i as u32);
            let kind = self.inst.scheme.sig.nonterminal_kind(sym);
            let term = self.inst.terms.borrow_mut().nonterminal(sym, kind);
            let v = self.eval_settled(term)?;
            map.insert(sym, v);
        }
        Ok(Valuation(map))
    }
}

/// Report of an agreement check between the two interpretations of one
/// instance. `alpha` below is the atom-wise translation sending each
/// acceptance-set atom to the disjunction of its member states.
#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub nonterminals_checked: usize,
    pub ground_points: usize,
    pub function_points: usize,
    /// The translated ground domain coincides with the optimized one.
    pub image_matches: bool,
    pub mismatches: Vec<String>,
    /// Non-terminals with argument kinds beyond order 1, outside the check's
    /// sampled coverage.
    pub skipped: Vec<String>,
}

impl TransferReport {
    pub fn exact(&self) -> bool {
        self.image_matches && self.mismatches.is_empty()
    }
}

fn alpha(abs: &FormulaStore, opt: &mut FormulaStore, gens: &[FormulaId], f: FormulaId) -> FormulaId {
    abs.map_atoms_into(f, opt, &|i| gens[i as usize])
}

/// Monotone function expression used to sample compatible argument pairs:
/// both sides evaluate the same tree, so compatibility holds by construction.
enum FnTree {
    Var(usize),
    Const(usize),
    Letter(LetterId, Box<FnTree>),
    Meet(Box<FnTree>, Box<FnTree>),
    Join(Box<FnTree>, Box<FnTree>),
}

impl FnTree {
    fn mentions_var(&self) -> bool {
        match self {
            FnTree::Var(_) => true,
            FnTree::Const(_) => false,
            FnTree::Letter(_, t) => t.mentions_var(),
            FnTree::Meet(a, b) | FnTree::Join(a, b) => a.mentions_var() || b.mentions_var(),
        }
    }
}

fn sample_tree(
    rng: &mut ChaCha8Rng,
    depth: usize,
    arity: usize,
    consts: usize,
    letters: usize,
) -> FnTree {
    if depth == 0 || rng.random_range(0..4) == 0 {
        if arity > 0 && rng.random_range(0..3) < 2 {
            FnTree::Var(rng.random_range(0..arity))
        } else {
            FnTree::Const(rng.random_range(0..consts))
        }
    } else {
        let arm = if letters > 0 {
            rng.random_range(0..3)
        } else {
            rng.random_range(1..3)
        };
        match arm {
            0 => FnTree::Letter(
                LetterId(rng.random_range(0..letters) as u32),
                Box::new(sample_tree(rng, depth - 1, arity, consts, letters)),
            ),
            1 => FnTree::Meet(
                Box::new(sample_tree(rng, depth - 1, arity, consts, letters)),
                Box::new(sample_tree(rng, depth - 1, arity, consts, letters)),
            ),
            _ => FnTree::Join(
                Box::new(sample_tree(rng, depth - 1, arity, consts, letters)),
                Box::new(sample_tree(rng, depth - 1, arity, consts, letters)),
            ),
        }
    }
}

fn eval_tree(model: &mut Model, tree: &FnTree, args: &[FormulaId], consts: &[FormulaId]) -> FormulaId {
    match tree {
        FnTree::Var(i) => args[*i],
        FnTree::Const(i) => consts[*i],
        FnTree::Letter(l, t) => {
            let v = eval_tree(model, t, args, consts);
            model.letter_image(*l, v)
        }
        FnTree::Meet(a, b) => {
            let x = eval_tree(model, a, args, consts);
            let y = eval_tree(model, b, args, consts);
            model.formulas.conj(x, y)
        }
        FnTree::Join(a, b) => {
            let x = eval_tree(model, a, args, consts);
            let y = eval_tree(model, b, args, consts);
            model.formulas.disj(x, y)
        }
    }
}

impl<'a> Solver<'a> {
    /// Tabulate a function expression into a canonical table over the ground
    /// domain (curried over `arity` ground arguments).
    fn tree_value(
        &mut self,
        tree: &FnTree,
        arity: usize,
        consts: &[FormulaId],
    ) -> Result<ValueId, SolverError> {
        let elems = self.enumerate_elems(self.ground_kind)?;
        let fids: Vec<FormulaId> = elems.iter().map(|&v| self.values.as_ground(v)).collect();
        let mut chosen = Vec::new();
        Ok(self.tree_value_rec(tree, arity, consts, &fids, &mut chosen))
    }

    fn tree_value_rec(
        &mut self,
        tree: &FnTree,
        remaining: usize,
        consts: &[FormulaId],
        fids: &[FormulaId],
        chosen: &mut Vec<FormulaId>,
    ) -> ValueId {
        if remaining == 0 {
            let f = eval_tree(&mut self.model, tree, chosen, consts);
            return self.values.ground(f, self.ground_kind);
        }
        let mut entries = Vec::with_capacity(fids.len());
        for &fe in fids {
            chosen.push(fe);
            entries.push(self.tree_value_rec(tree, remaining - 1, consts, fids, chosen));
            chosen.pop();
        }
        let kind = self
            .inst
            .kinds
            .borrow_mut()
            .arrow_chain(&vec![self.ground_kind; remaining], self.ground_kind);
        self.values.table(self.ground_kind, entries.into(), kind)
    }
}

/// Solve an instance in both interpretations and check that they agree:
/// translated solutions coincide on every ground non-terminal, pointwise on
/// enumerated ground arguments, and on sampled compatible function arguments;
/// the translated ground domain, top, the end-of-word interpretation and all
/// letter interpretations must match as well. A mismatch signals an
/// implementation bug, never an expected outcome.
pub fn check_transfer(
    inst: &Instance,
    cap: usize,
    max_iters: usize,
    samples: usize,
    seed: u64,
) -> Result<TransferReport, SolverError> {
    let mut a = Solver::new(inst, ModelKind::Abstract, cap, max_iters);
    a.solve()?;
    let mut o = Solver::new(inst, ModelKind::Optimized, cap, max_iters);
    o.solve()?;
    let gens: Vec<FormulaId> = o.model.generators().to_vec();

    let mut report = TransferReport {
        nonterminals_checked: 0,
        ground_points: 0,
        function_points: 0,
        image_matches: false,
        mismatches: Vec::new(),
        skipped: Vec::new(),
    };

    let at = a.model.formulas.tru();
    if alpha(&a.model.formulas, &mut o.model.formulas, &gens, at) != o.model.formulas.tru() {
        report.mismatches.push("alpha(top) differs from top".into());
    }
    let ae = a.model.end_formula;
    if alpha(&a.model.formulas, &mut o.model.formulas, &gens, ae) != o.model.end_formula {
        report
            .mismatches
            .push("translated end-of-word interpretation differs".into());
    }

    let abs_elems = a.enumerate_elems(a.ground_kind)?;
    let opt_elems = o.enumerate_elems(o.ground_kind)?;
    let mut paired_ground: Vec<(ValueId, ValueId)> = Vec::new();
    let mut abs_consts: Vec<FormulaId> = Vec::new();
    let mut opt_consts: Vec<FormulaId> = Vec::new();
    let mut image: HashSet<FormulaId> = HashSet::new();
    for &va in &abs_elems {
        let fa = a.values.as_ground(va);
        let fo = alpha(&a.model.formulas, &mut o.model.formulas, &gens, fa);
        image.insert(fo);
        let vo = o.values.ground(fo, o.ground_kind);
        paired_ground.push((va, vo));
        abs_consts.push(fa);
        opt_consts.push(fo);
    }
    let opt_set: HashSet<FormulaId> = opt_elems.iter().map(|&v| o.values.as_ground(v)).collect();
    report.image_matches = image == opt_set;

    let letter_count = inst.scheme.sig.letters.len();
    for l in 0..letter_count {
        let l = LetterId(l as u32);
        for &(va, vo) in &paired_ground {
            let fa = a.values.as_ground(va);
            let ia = a.model.letter_image(l, fa);
            let lhs = alpha(&a.model.formulas, &mut o.model.formulas, &gens, ia);
            let rhs = {
                let fo = o.values.as_ground(vo);
                o.model.letter_image(l, fo)
            };
            if lhs != rhs {
                report.mismatches.push(format!(
                    "letter {} disagrees at {}",
                    inst.nfa.letter_name(l),
                    a.model.formulas.render(fa)
                ));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds_of = |nt: NonTerminalSym| {
        let kind = inst.scheme.sig.nonterminal_kind(nt);
        inst.kinds.borrow().uncurry(kind)
    };

    for i in 0..inst.scheme.sig.nonterminal_count() {
        let sym = NonTerminalSym(i as u32);
        let name = inst.scheme.sig.nonterminals[i].name.clone();
        let arg_kinds = kinds_of(sym);

        if arg_kinds.is_empty() {
            let sa = a.solution_at(sym, &[])?;
            let lhs = alpha(&a.model.formulas, &mut o.model.formulas, &gens, sa);
            let rhs = o.solution_at(sym, &[])?;
            report.nonterminals_checked += 1;
            report.ground_points += 1;
            if lhs != rhs {
                report.mismatches.push(format!(
                    "{name}: translated solution {} differs from {}",
                    o.model.formulas.render(lhs),
                    o.model.formulas.render(rhs)
                ));
            }
            continue;
        }

        // Candidate argument pairs per position: full ground enumeration, or
        // sampled function expressions for order-1 argument kinds.
        let mut per_pos: Vec<Vec<(ValueId, ValueId)>> = Vec::new();
        let mut has_function_arg = false;
        let mut too_high = false;
        for &ak in &arg_kinds {
            let (is_ground, order, arity) = {
                let kb = inst.kinds.borrow();
                (kb.is_ground(ak), kb.order(ak), kb.arity(ak) as usize)
            };
            if is_ground {
                per_pos.push(paired_ground.clone());
            } else if order == 1 {
                has_function_arg = true;
                let mut pairs = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let mut tree = sample_tree(&mut rng, 3, arity, abs_consts.len(), letter_count);
                    if !tree.mentions_var() {
                        tree = FnTree::Join(Box::new(tree), Box::new(FnTree::Var(0)));
                    }
                    let va = a.tree_value(&tree, arity, &abs_consts)?;
                    let vo = o.tree_value(&tree, arity, &opt_consts)?;
                    if arity == 1 {
                        for &(da, db) in &paired_ground {
                            let ra = apply_value(&a.values, &a.domains, va, da);
                            let fa = a.values.as_ground(ra);
                            let lhs = alpha(&a.model.formulas, &mut o.model.formulas, &gens, fa);
                            let ro = apply_value(&o.values, &o.domains, vo, db);
                            let rhs = o.values.as_ground(ro);
                            assert_eq!(lhs, rhs, "sampled argument pair must be compatible");
                        }
                    }
                    pairs.push((va, vo));
                }
                per_pos.push(pairs);
            } else {
                too_high = true;
            }
        }
        if too_high {
            report.skipped.push(name);
            continue;
        }

        let total: usize = per_pos.iter().map(|p| p.len()).product();
        if total == 0 {
            report.skipped.push(name);
            continue;
        }
        if total > cap {
            return Err(SolverError::Domain(DomainError::TooLarge {
                kind: format!("argument tuples for {name}"),
                reached: total,
                cap,
            }));
        }

        let mut idx = vec![0usize; per_pos.len()];
        loop {
            let mut abs_args = Vec::with_capacity(idx.len());
            let mut opt_args = Vec::with_capacity(idx.len());
            for (p, &j) in per_pos.iter().zip(&idx) {
                abs_args.push(p[j].0);
                opt_args.push(p[j].1);
            }
            let sa = a.solution_at(sym, &abs_args)?;
            let lhs = alpha(&a.model.formulas, &mut o.model.formulas, &gens, sa);
            let rhs = o.solution_at(sym, &opt_args)?;
            if has_function_arg {
                report.function_points += 1;
            } else {
                report.ground_points += 1;
            }
            if lhs != rhs {
                report.mismatches.push(format!(
                    "{name}: translated solution differs at argument tuple {:?}",
                    idx
                ));
            }
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < per_pos[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&j| j == 0) {
                break;
            }
        }
        report.nonterminals_checked += 1;
    }

    Ok(report)
}
