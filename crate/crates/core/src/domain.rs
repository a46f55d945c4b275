//! Finite semantic domains for the two game models.
//!
//! Both models interpret ground terms as positive Boolean formulas. The
//! abstract model's atoms are the backward-reachable acceptance sets of the
//! automaton; the optimized model's atoms are the automaton's states, with
//! each acceptance set resolved to the disjunction of its members.
//!
//! Function kinds are interpreted as monotone maps, represented as tables
//! over the enumerated argument domain. Tables are interned, so equality of
//! canonical values is id equality. Enumeration is guarded by a size cap;
//! argument kinds whose domains blow past it are refused with a diagnostic
//! rather than ground through.

use crate::automaton::{LetterId, StateSet};
use crate::formula::{AtomSet, FormulaId, FormulaStore};
use crate::kind::{KindId, KindNode, KindStore};
use crate::scheme::{Instance, Owner};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

pub const DEFAULT_DOMAIN_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Abstract,
    Optimized,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Abstract => "abstract",
            ModelKind::Optimized => "optimized",
        })
    }
}

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("domain for kind {kind} exceeds the cap: {reached}+ elements, cap {cap}")]
    TooLarge { kind: String, reached: usize, cap: usize },
}

/// Interpretation of the word alphabet and end marker in one model's ground
/// lattice of formulas.
pub struct Model {
    pub which: ModelKind,
    pub formulas: FormulaStore,
    /// Interpretation of the end-of-word terminal.
    pub end_formula: FormulaId,
    /// Per letter, per atom: the image of the atom under the letter's
    /// predecessor interpretation.
    letter_tables: Vec<Vec<FormulaId>>,
    /// Atoms satisfied in the winner check at the automaton's initial state.
    pub winning_assignment: AtomSet,
    /// Generators of the ground domain (atoms, or resolved acceptance sets).
    generators: Vec<FormulaId>,
}

impl Model {
    pub fn build(inst: &Instance, which: ModelKind) -> Model {
        let nfa = &inst.nfa;
        let closure = &inst.closure;
        match which {
            ModelKind::Abstract => {
                let atom_names: Vec<String> = closure
                    .members()
                    .iter()
                    .map(|&set| nfa.render_state_set(set))
                    .collect();
                let mut formulas = FormulaStore::new(atom_names);
                let end_formula = {
                    let i = closure.position(nfa.finals()).expect("finals set seeds the closure");
                    formulas.atom(i as u32)
                };
                let letter_tables = (0..nfa.alphabet().len())
                    .map(|l| {
                        (0..closure.len())
                            .map(|i| {
                                let pre = nfa.pre(LetterId(l as u32), closure.member(i));
                                let j = closure
                                    .position(pre)
                                    .expect("closure is closed under predecessor");
                                formulas.atom(j as u32)
                            })
                            .collect()
                    })
                    .collect();
                let winning_assignment = AtomSet::from_indices(
                    (0..closure.len())
                        .filter(|&i| closure.member(i).contains(nfa.initial()))
                        .map(|i| i as u32),
                );
                let generators = (0..closure.len()).map(|i| formulas.atom(i as u32)).collect();
                Model {
                    which,
                    formulas,
                    end_formula,
                    letter_tables,
                    winning_assignment,
                    generators,
                }
            }
            ModelKind::Optimized => {
                let atom_names: Vec<String> =
                    (0..nfa.state_count()).map(|q| nfa.state_name(q).to_string()).collect();
                let mut formulas = FormulaStore::new(atom_names);
                let end_formula = {
                    let finals = nfa.finals();
                    let atoms: Vec<FormulaId> =
                        finals.iter().map(|q| formulas.atom(q as u32)).collect();
                    formulas.disj_all(atoms)
                };
                let letter_tables = (0..nfa.alphabet().len())
                    .map(|l| {
                        (0..nfa.state_count())
                            .map(|q| {
                                let pre = nfa.pre(LetterId(l as u32), StateSet::singleton(q));
                                let atoms: Vec<FormulaId> =
                                    pre.iter().map(|p| formulas.atom(p as u32)).collect();
                                formulas.disj_all(atoms)
                            })
                            .collect()
                    })
                    .collect();
                let winning_assignment =
                    AtomSet::from_indices([nfa.initial() as u32]);
                let generators = closure
                    .members()
                    .iter()
                    .map(|&set| {
                        let atoms: Vec<FormulaId> =
                            set.iter().map(|q| formulas.atom(q as u32)).collect();
                        formulas.disj_all(atoms)
                    })
                    .collect();
                Model {
                    which,
                    formulas,
                    end_formula,
                    letter_tables,
                    winning_assignment,
                    generators,
                }
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        self.formulas.atom_count()
    }

    /// Image of a ground value under a letter's interpretation: the atom map
    /// distributed over the formula.
    pub fn letter_image(&mut self, letter: LetterId, f: FormulaId) -> FormulaId {
        let table = std::mem::take(&mut self.letter_tables[letter.index()]);
        let out = self.formulas.map_atoms(f, &|a| table[a as usize]);
        self.letter_tables[letter.index()] = table;
        out
    }

    /// Interpretation of a choice terminal: meet for A-owned, join for
    /// E-owned non-terminals.
    pub fn choice_formula(&mut self, owner: Owner, items: &[FormulaId]) -> FormulaId {
        match owner {
            Owner::A => self.formulas.conj_all(items.iter().copied()),
            Owner::E => self.formulas.disj_all(items.iter().copied()),
        }
    }

    pub(crate) fn generators(&self) -> &[FormulaId] {
        &self.generators
    }

    pub fn winner_is_e(&self, f: FormulaId) -> bool {
        self.formulas.satisfied_by(f, &self.winning_assignment)
    }
}

/// Interned semantic value: a ground formula, or a monotone map as a table
/// over the enumerated argument domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueNode {
    Ground(FormulaId),
    Table { arg_kind: KindId, entries: Box<[ValueId]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueId(u32);

impl ValueId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Default)]
pub struct ValueStore {
    nodes: Vec<ValueNode>,
    kinds: Vec<KindId>,
    by_node: HashMap<ValueNode, ValueId>,
}

impl ValueStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, node: ValueNode, kind: KindId) -> ValueId {
        if let Some(&id) = self.by_node.get(&node) {
            return id;
        }
        let id = ValueId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.kinds.push(kind);
        self.by_node.insert(node, id);
        id
    }

    pub fn ground(&mut self, f: FormulaId, ground_kind: KindId) -> ValueId {
        self.intern(ValueNode::Ground(f), ground_kind)
    }

    pub fn table(&mut self, arg_kind: KindId, entries: Box<[ValueId]>, kind: KindId) -> ValueId {
        self.intern(ValueNode::Table { arg_kind, entries }, kind)
    }

    pub fn node(&self, id: ValueId) -> &ValueNode {
        &self.nodes[id.index()]
    }

    pub fn kind_of(&self, id: ValueId) -> KindId {
        self.kinds[id.index()]
    }

    pub fn as_ground(&self, id: ValueId) -> FormulaId {
        match self.node(id) {
            ValueNode::Ground(f) => *f,
            ValueNode::Table { .. } => panic!("expected a ground value"),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Enumerated domain of one kind: canonical elements with dense ids, the
/// order relation as bit rows, and a linear extension for monotone-map
/// generation.
#[derive(Debug)]
pub struct DomainData {
    pub kind: KindId,
    /// Canonical elements; for the ground kind these are `Ground` values.
    pub elems: Vec<ValueId>,
    pub index: HashMap<ValueId, u32>,
    /// leq[i] bit j set iff elems[i] ≤ elems[j].
    leq: Vec<Box<[u64]>>,
    /// Element indices in a linear extension of ≤ (ascending).
    pub topo: Vec<u32>,
}

impl DomainData {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn leq_ids(&self, i: u32, j: u32) -> bool {
        self.leq[i as usize][(j / 64) as usize] >> (j % 64) & 1 == 1
    }

    pub fn position(&self, v: ValueId) -> Option<u32> {
        self.index.get(&v).copied()
    }
}

fn bitrows(n: usize, mut rel: impl FnMut(usize, usize) -> bool) -> Vec<Box<[u64]>> {
    let words = n.div_ceil(64);
    (0..n)
        .map(|i| {
            let mut row = vec![0u64; words].into_boxed_slice();
            for j in 0..n {
                if rel(i, j) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect()
}

/// Sort indices by how many elements sit below them; any such order is a
/// linear extension of ≤ because strictly-below sets nest strictly.
fn linear_extension(leq: &[Box<[u64]>]) -> Vec<u32> {
    let n = leq.len();
    let below: Vec<u32> = (0..n)
        .map(|j| (0..n).filter(|&i| leq[i][j / 64] >> (j % 64) & 1 == 1).count() as u32)
        .collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&j| (below[j as usize], j));
    order
}

pub struct Domains {
    pub cap: usize,
    by_kind: HashMap<KindId, DomainData>,
}

impl Domains {
    pub fn new(cap: usize) -> Self {
        Domains { cap, by_kind: HashMap::new() }
    }

    pub fn get(&self, kind: KindId) -> Option<&DomainData> {
        self.by_kind.get(&kind)
    }

    /// Sizes of all enumerated domains, sorted by rendered kind.
    pub fn report(&self, kinds: &KindStore) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = self
            .by_kind
            .iter()
            .map(|(&k, d)| (kinds.render(k), d.len()))
            .collect();
        out.sort();
        out
    }

    /// Enumerate the domain of a kind, recursively enumerating argument and
    /// result domains of arrow kinds. Results are cached per kind.
    pub fn enumerate(
        &mut self,
        kinds: &KindStore,
        model: &mut Model,
        values: &mut ValueStore,
        kind: KindId,
    ) -> Result<&DomainData, DomainError> {
        if !self.by_kind.contains_key(&kind) {
            let data = match kinds.node(kind) {
                KindNode::Ground => self.enumerate_ground(kinds, model, values, kind)?,
                KindNode::Arrow { arg, result } => {
                    self.enumerate(kinds, model, values, arg)?;
                    self.enumerate(kinds, model, values, result)?;
                    self.enumerate_arrow(kinds, model, values, kind, arg, result)?
                }
            };
            self.by_kind.insert(kind, data);
        }
        Ok(&self.by_kind[&kind])
    }

    /// Ground domain: the sublattice generated by the model's generators
    /// under conj/disj, plus top.
    fn enumerate_ground(
        &self,
        kinds: &KindStore,
        model: &mut Model,
        values: &mut ValueStore,
        kind: KindId,
    ) -> Result<DomainData, DomainError> {
        let mut elems: Vec<FormulaId> = Vec::new();
        let mut seen: HashSet<FormulaId> = HashSet::new();
        for &g in &model.generators {
            if seen.insert(g) {
                elems.push(g);
            }
        }
        let mut i = 0;
        while i < elems.len() {
            for j in 0..=i {
                let (a, b) = (elems[i], elems[j]);
                for f in [model.formulas.conj(a, b), model.formulas.disj(a, b)] {
                    if seen.insert(f) {
                        elems.push(f);
                        if elems.len() > self.cap {
                            return Err(DomainError::TooLarge {
                                kind: kinds.render(kind),
                                reached: elems.len(),
                                cap: self.cap,
                            });
                        }
                    }
                }
            }
            i += 1;
        }
        let top = model.formulas.tru();
        if seen.insert(top) {
            elems.push(top);
        }
        if elems.len() > self.cap {
            return Err(DomainError::TooLarge {
                kind: kinds.render(kind),
                reached: elems.len(),
                cap: self.cap,
            });
        }

        let leq = bitrows(elems.len(), |i, j| model.formulas.implies(elems[i], elems[j]));
        let topo = linear_extension(&leq);
        let ids: Vec<ValueId> = elems.iter().map(|&f| values.ground(f, kind)).collect();
        let index = ids.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        Ok(DomainData { kind, elems: ids, index, leq, topo })
    }

    /// Arrow domain: every monotone map from the argument enumeration to the
    /// result enumeration, generated by DFS along a linear extension.
    fn enumerate_arrow(
        &self,
        kinds: &KindStore,
        model: &mut Model,
        values: &mut ValueStore,
        kind: KindId,
        arg: KindId,
        result: KindId,
    ) -> Result<DomainData, DomainError> {
        let n_arg = self.by_kind[&arg].len();
        let n_res = self.by_kind[&result].len();
        let mut tables: Vec<Box<[u32]>> = Vec::new();
        let mut assign: Vec<u32> = vec![0; n_arg];

        // resolve join of result elements by index, staying inside the domain
        let join_ix = |a: u32, b: u32, model: &mut Model, values: &mut ValueStore| -> u32 {
            let res_dom = &self.by_kind[&result];
            if res_dom.leq_ids(a, b) {
                return b;
            }
            if res_dom.leq_ids(b, a) {
                return a;
            }
            let joined = join_values(model, values, res_dom.elems[a as usize], res_dom.elems[b as usize]);
            self.by_kind[&result]
                .position(joined)
                .expect("monotone-map domains are join-closed")
        };

        // DFS over the argument linear extension; the candidate set at each
        // position is the up-set of the join of already-assigned predecessors.
        fn dfs(
            pos: usize,
            arg_dom_topo: &[u32],
            arg_leq: &dyn Fn(u32, u32) -> bool,
            res_leq: &dyn Fn(u32, u32) -> bool,
            n_res: usize,
            assign: &mut Vec<u32>,
            tables: &mut Vec<Box<[u32]>>,
            cap: usize,
            join: &mut dyn FnMut(u32, u32) -> u32,
        ) -> Result<(), ()> {
            if pos == arg_dom_topo.len() {
                tables.push(assign.clone().into_boxed_slice());
                if tables.len() > cap {
                    return Err(());
                }
                return Ok(());
            }
            let x = arg_dom_topo[pos];
            let mut lb: Option<u32> = None;
            for &p in &arg_dom_topo[..pos] {
                if arg_leq(p, x) {
                    let v = assign[p as usize];
                    lb = Some(match lb {
                        None => v,
                        Some(l) => join(l, v),
                    });
                }
            }
            for y in 0..n_res as u32 {
                if lb.is_none_or(|l| res_leq(l, y)) {
                    assign[x as usize] = y;
                    dfs(pos + 1, arg_dom_topo, arg_leq, res_leq, n_res, assign, tables, cap, join)?;
                }
            }
            Ok(())
        }

        let arg_dom = &self.by_kind[&arg];
        let res_dom = &self.by_kind[&result];
        let arg_topo = arg_dom.topo.clone();
        let capped = dfs(
            0,
            &arg_topo,
            &|i, j| arg_dom.leq_ids(i, j),
            &|i, j| res_dom.leq_ids(i, j),
            n_res,
            &mut assign,
            &mut tables,
            self.cap,
            &mut |a, b| join_ix(a, b, model, values),
        )
        .is_err();
        if capped {
            return Err(DomainError::TooLarge {
                kind: kinds.render(kind),
                reached: tables.len(),
                cap: self.cap,
            });
        }

        let res_elems: Vec<ValueId> = self.by_kind[&result].elems.clone();
        let elems: Vec<ValueId> = tables
            .iter()
            .map(|t| {
                let entries: Box<[ValueId]> =
                    t.iter().map(|&ri| res_elems[ri as usize]).collect();
                values.table(arg, entries, kind)
            })
            .collect();
        let index: HashMap<ValueId, u32> =
            elems.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let res_dom = &self.by_kind[&result];
        let leq = bitrows(elems.len(), |i, j| {
            tables[i]
                .iter()
                .zip(tables[j].iter())
                .all(|(&a, &b)| res_dom.leq_ids(a, b))
        });
        let topo = linear_extension(&leq);
        Ok(DomainData { kind, elems, index, leq, topo })
    }
}

/// Top of a kind: `true` at ground, the constant-top table at arrows.
pub fn top_value(
    kinds: &KindStore,
    model: &mut Model,
    values: &mut ValueStore,
    domains: &mut Domains,
    kind: KindId,
) -> Result<ValueId, DomainError> {
    match kinds.node(kind) {
        KindNode::Ground => {
            let t = model.formulas.tru();
            Ok(values.ground(t, kind))
        }
        KindNode::Arrow { arg, result } => {
            let n = domains.enumerate(kinds, model, values, arg)?.len();
            let top_res = top_value(kinds, model, values, domains, result)?;
            Ok(values.table(arg, vec![top_res; n].into_boxed_slice(), kind))
        }
    }
}

/// Apply a table to a canonical argument (one with a domain id).
pub fn apply_value(values: &ValueStore, domains: &Domains, f: ValueId, arg: ValueId) -> ValueId {
    let ValueNode::Table { arg_kind, entries } = values.node(f) else {
        panic!("applied a ground value");
    };
    let dom = domains
        .get(*arg_kind)
        .expect("argument domain enumerated before application");
    let i = dom.position(arg).expect("argument is canonical in its domain");
    entries[i as usize]
}

/// Pointwise order. Tables compare entrywise; they share the argument
/// enumeration by construction.
pub fn leq_values(model: &Model, values: &ValueStore, a: ValueId, b: ValueId) -> bool {
    match (values.node(a), values.node(b)) {
        (ValueNode::Ground(f), ValueNode::Ground(g)) => model.formulas.implies(*f, *g),
        (ValueNode::Table { entries: ea, .. }, ValueNode::Table { entries: eb, .. }) => {
            debug_assert_eq!(ea.len(), eb.len());
            ea.iter().zip(eb.iter()).all(|(&x, &y)| leq_values(model, values, x, y))
        }
        _ => panic!("compared values of different kinds"),
    }
}

/// Extensional equality; canonical values make this id comparison.
pub fn eq_values(a: ValueId, b: ValueId) -> bool {
    a == b
}

/// Pointwise meet (conj at ground).
pub fn meet_values(model: &mut Model, values: &mut ValueStore, a: ValueId, b: ValueId) -> ValueId {
    match (values.node(a).clone(), values.node(b).clone()) {
        (ValueNode::Ground(f), ValueNode::Ground(g)) => {
            let m = model.formulas.conj(f, g);
            let kind = values.kind_of(a);
            values.ground(m, kind)
        }
        (
            ValueNode::Table { arg_kind, entries: ea },
            ValueNode::Table { entries: eb, .. },
        ) => {
            debug_assert_eq!(ea.len(), eb.len());
            let entries: Box<[ValueId]> = ea
                .iter()
                .zip(eb.iter())
                .map(|(&x, &y)| meet_values(model, values, x, y))
                .collect();
            let kind = values.kind_of(a);
            values.table(arg_kind, entries, kind)
        }
        _ => panic!("met values of different kinds"),
    }
}

/// Pointwise join (disj at ground).
pub fn join_values(model: &mut Model, values: &mut ValueStore, a: ValueId, b: ValueId) -> ValueId {
    match (values.node(a).clone(), values.node(b).clone()) {
        (ValueNode::Ground(f), ValueNode::Ground(g)) => {
            let m = model.formulas.disj(f, g);
            let kind = values.kind_of(a);
            values.ground(m, kind)
        }
        (
            ValueNode::Table { arg_kind, entries: ea },
            ValueNode::Table { entries: eb, .. },
        ) => {
            debug_assert_eq!(ea.len(), eb.len());
            let entries: Box<[ValueId]> = ea
                .iter()
                .zip(eb.iter())
                .map(|(&x, &y)| join_values(model, values, x, y))
                .collect();
            let kind = values.kind_of(a);
            values.table(arg_kind, entries, kind)
        }
        _ => panic!("joined values of different kinds"),
    }
}
