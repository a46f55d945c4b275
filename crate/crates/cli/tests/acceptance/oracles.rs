//! Independent reference semantics for the acceptance checks: clause sets
//! evaluated over explicit truth assignments, and random well-kinded term
//! generation for the evaluator laws.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hoig_core::formula::{AtomSet, FormulaId, FormulaStore};
use hoig_core::kind::KindStore;
use hoig_core::scheme::Instance;
use hoig_core::term::{TermId, TermStore};

/// A conjunction of disjunctions of atoms, the reference reading of a
/// formula.
pub type Clauses = Vec<Vec<u32>>;

pub fn random_clauses(rng: &mut ChaCha8Rng, atoms: u32) -> Clauses {
    let n = rng.random_range(0..=5);
    (0..n)
        .map(|_| {
            let w = rng.random_range(0..=atoms as usize);
            (0..w).map(|_| rng.random_range(0..atoms)).collect()
        })
        .collect()
}

pub fn build(store: &mut FormulaStore, clauses: &Clauses) -> FormulaId {
    let mut acc = store.tru();
    for c in clauses {
        let mut d = store.fals();
        for &a in c {
            let at = store.atom(a);
            d = store.disj(d, at);
        }
        acc = store.conj(acc, d);
    }
    acc
}

pub fn ref_sat(clauses: &Clauses, assign: u32) -> bool {
    clauses
        .iter()
        .all(|c| c.iter().any(|&a| assign & (1 << a) != 0))
}

pub fn assign_set(assign: u32, atoms: u32) -> AtomSet {
    AtomSet::from_indices((0..atoms).filter(|&a| assign & (1 << a) != 0))
}

pub fn formula_universe(atoms: u32) -> FormulaStore {
    FormulaStore::new((0..atoms).map(|a| format!("x{a}")).collect())
}

/// Random closed ground term over the letters, the end marker, and the
/// instance's unary non-terminal; `var_ok` additionally allows the innermost
/// bound variable.
pub fn random_ground_term(
    rng: &mut ChaCha8Rng,
    inst: &Instance,
    unary_nt: TermId,
    depth: usize,
    var_ok: bool,
) -> TermId {
    let mut kinds = inst.kinds.borrow_mut();
    let mut terms = inst.terms.borrow_mut();
    build_ground(rng, &mut kinds, &mut terms, inst, unary_nt, depth, var_ok)
}

fn build_ground(
    rng: &mut ChaCha8Rng,
    kinds: &mut KindStore,
    terms: &mut TermStore,
    inst: &Instance,
    unary_nt: TermId,
    depth: usize,
    var_ok: bool,
) -> TermId {
    let o = kinds.ground();
    let leaf = depth == 0 || rng.random_range(0..4) == 0;
    if leaf {
        if var_ok && rng.random_bool(0.5) {
            return terms.var(0, o);
        }
        let sym = inst.scheme.sig.end;
        let kind = inst.scheme.sig.terminal_kind(sym);
        return terms.terminal(sym, kind);
    }
    let inner = build_ground(rng, kinds, terms, inst, unary_nt, depth - 1, var_ok);
    match rng.random_range(0..3) {
        0 | 1 => {
            let l = rng.random_range(0..inst.scheme.sig.letters.len());
            let sym = inst.scheme.sig.letters[l];
            let kind = inst.scheme.sig.terminal_kind(sym);
            let head = terms.terminal(sym, kind);
            terms.app(kinds, head, inner).expect("letter application")
        }
        _ => terms.app(kinds, unary_nt, inner).expect("non-terminal application"),
    }
}
